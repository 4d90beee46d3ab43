use std::fs;
use std::io::{Read, Write};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use rand::{Rng, SeedableRng};
use serde_json::json;

use mqsolve::cli::{self, brute_oracle, prepare, verify_certificate, Certificate, OracleOutcome, SolveConfig, Status};
use mqsolve::lifter::Witness;
use mqsolve::mgroup::{sigma, GroupWord};
use mqsolve::qnormal::standardize;
use mqsolve::reducer::LCaps;
use mqsolve::wedgesolve::WedgeCaps;

const EXIT_INPUT: u8 = 3;

#[derive(Parser)]
#[command(name = "mqsolve", version, about = "Solve orientable quadratic equations in free metabelian groups")]
struct Cli {
    /// Print a single JSON document instead of a summary.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct Input {
    /// Equation file, or `-` for stdin.
    #[arg(conflicts_with = "equation")]
    file: Option<String>,
    /// Equation text given inline.
    #[arg(short, long)]
    equation: Option<String>,
}

impl Input {
    fn read(&self) -> Result<String> {
        match (&self.equation, self.file.as_deref()) {
            (Some(t), _) => Ok(t.clone()),
            (None, Some("-")) => {
                let mut s = String::new();
                std::io::stdin().read_to_string(&mut s)?;
                Ok(s)
            }
            (None, Some(p)) => fs::read_to_string(p).with_context(|| format!("reading {}", p)),
            (None, None) => bail!("no equation given"),
        }
    }
}

#[derive(Args)]
struct Caps {
    /// Largest number of candidate lattices listed per conjugator tuple.
    #[arg(long)]
    caps_l: Option<usize>,
    /// Largest number of tuples checked by the wedge search.
    #[arg(long)]
    caps_shell: Option<u64>,
    /// Worker threads (0 = all cores).
    #[arg(long, default_value_t = 0)]
    jobs: usize,
}

impl Caps {
    fn config(&self) -> SolveConfig {
        let mut cfg = SolveConfig { jobs: self.jobs, ..Default::default() };
        if let Some(c) = self.caps_l {
            cfg.lcaps = LCaps { max_candidates: c, ..cfg.lcaps };
        }
        if let Some(c) = self.caps_shell {
            cfg.wedge = WedgeCaps { shell: c, ..cfg.wedge };
        }
        cfg
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Decide an equation and print a witness and certificate when solvable.
    Solve {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        caps: Caps,
    },
    /// Print the standard form and the substitutions leading to it.
    Normalize {
        #[command(flatten)]
        input: Input,
    },
    /// Check a witness (JSON object from variable names to words).
    VerifyWitness {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        witness: String,
    },
    /// Check a certificate produced by `solve`.
    VerifyCert {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        cert: String,
    },
    /// Search all assignments of short words.
    Oracle {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value_t = 3)]
        max_len: usize,
        #[arg(long, default_value_t = 5_000_000)]
        limit: u128,
    },
    /// Decide whether two words are equal in M_n.
    Wordproblem {
        #[arg(short, long)]
        rank: usize,
        left: String,
        #[arg(default_value = "1")]
        right: String,
    },
    /// Print a random solvable genus-1 equation built from a known solution.
    Sample {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 2)]
        rank: usize,
    },
}

fn emit(json_mode: bool, doc: serde_json::Value, summary: String) {
    let text = if json_mode { serde_json::to_string_pretty(&doc).expect("json") } else { summary };
    // a closed pipe downstream is not an error worth reporting
    let _ = writeln!(std::io::stdout().lock(), "{}", text);
}

fn read_json<T: serde::de::DeserializeOwned>(path: &str) -> Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path))
}

fn parse_input(input: &Input) -> Result<cli::Parsed> {
    let text = input.read()?;
    cli::parse(&text).map_err(|e| anyhow!("{}", e))
}

fn run(cli: Cli) -> Result<u8> {
    let jm = cli.json;
    match cli.cmd {
        Cmd::Solve { input, caps } => {
            let parsed = parse_input(&input)?;
            let v = cli::solve(&parsed, &caps.config()).map_err(|e| anyhow!("{}", e))?;
            let mut summary = format!("{}: {}", format!("{:?}", v.status).to_uppercase(), v.reason);
            if let Some(w) = &v.witness {
                for (k, val) in &w.0 {
                    summary.push_str(&format!("\n  {} = {}", k, val));
                }
            }
            for c in &v.caps_hit {
                summary.push_str(&format!("\n  cap: {}", c));
            }
            emit(jm, serde_json::to_value(&v)?, summary);
            Ok(match v.status {
                Status::Sat => 0,
                Status::Unsat => 1,
                Status::Unknown => 2,
            })
        }
        Cmd::Normalize { input } => {
            let parsed = parse_input(&input)?;
            let st = standardize(&parsed.word)?;
            let eq = &st.equation;
            let mut lhs: Vec<String> = (0..eq.genus).map(|i| format!("[x{},y{}]", i + 1, i + 1)).collect();
            if lhs.is_empty() {
                lhs.push("1".into());
            }
            let mut rhs: Vec<String> =
                eq.coeffs.iter().enumerate().map(|(j, c)| format!("z{} ({}) Z{}", j + 1, c, j + 1)).collect();
            if rhs.is_empty() {
                rhs.push("1".into());
            }
            let text = format!("n={}; {} = {}", eq.rank, lhs.join(""), rhs.join(" "));
            let doc = json!({ "equation": text, "standard": eq, "moves": st.log.moves, "move_count": st.log.move_count() });
            emit(jm, doc, text);
            Ok(0)
        }
        Cmd::VerifyWitness { input, witness } => {
            let parsed = parse_input(&input)?;
            let w: Witness = read_json(&witness)?;
            for v in parsed.word.variables() {
                if !w.0.contains_key(&v) {
                    bail!("witness has no value for {}", v);
                }
            }
            let ok = parsed.word.evaluate(&w.0)?.is_identity();
            emit(jm, json!({ "valid": ok }), if ok { "valid".into() } else { "invalid".into() });
            Ok(if ok { 0 } else { 1 })
        }
        Cmd::VerifyCert { input, cert } => {
            let parsed = parse_input(&input)?;
            let prep = prepare(&parsed).map_err(|e| anyhow!("{}", e))?;
            let c: Certificate = read_json(&cert)?;
            let mut check = verify_certificate(&prep.effective, &c);
            if let Some(w) = check.witness.take() {
                check.witness = Some(prep.carry_back(&w));
            }
            let summary = match &check.reason {
                None => "accepted".to_string(),
                Some(r) => format!("rejected: {}", r),
            };
            let code = if check.accepted { 0 } else { 1 };
            emit(jm, serde_json::to_value(&check)?, summary);
            Ok(code)
        }
        Cmd::Oracle { input, max_len, limit } => {
            let parsed = parse_input(&input)?;
            let prep = prepare(&parsed).map_err(|e| anyhow!("{}", e))?;
            let out = match brute_oracle(&prep.standard, max_len, limit) {
                OracleOutcome::Sat { witness } => OracleOutcome::Sat { witness: prep.carry_back(&witness) },
                other => other,
            };
            let code = match &out {
                OracleOutcome::Sat { .. } => 0,
                OracleOutcome::NoWitness { .. } => 1,
                OracleOutcome::Refused { .. } => 2,
            };
            let summary = match &out {
                OracleOutcome::Sat { witness } => {
                    let parts: Vec<String> = witness.0.iter().map(|(k, v)| format!("{} = {}", k, v)).collect();
                    format!("SAT: {}", parts.join(", "))
                }
                OracleOutcome::NoWitness { max_len, .. } => format!("no witness with words of length ≤ {}", max_len),
                OracleOutcome::Refused { estimate, limit } => format!("refused: {} assignments exceed {}", estimate, limit),
            };
            emit(jm, serde_json::to_value(&out)?, summary);
            Ok(code)
        }
        Cmd::Wordproblem { rank, left, right } => {
            let l = GroupWord::parse(&left)?;
            let r = GroupWord::parse(&right)?;
            l.check_rank(rank)?;
            r.check_rank(rank)?;
            let d = sigma(&l, rank).mul(&sigma(&r, rank).inv());
            let equal = d.is_identity();
            emit(jm, json!({ "equal": equal, "quotient": d }), if equal { "equal".into() } else { "different".into() });
            Ok(if equal { 0 } else { 1 })
        }
        Cmd::Sample { seed, rank } => {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let mut word = |len: usize| -> GroupWord {
                let letters = (0..len)
                    .map(|_| {
                        let i = rng.gen_range(1..=rank);
                        mqsolve::mgroup::GeneratorLetter::new(i, rng.gen_bool(0.5))
                    })
                    .collect();
                GroupWord::from_letters(letters).reduced()
            };
            let (x, y, z) = (word(3), word(3), word(2));
            // z c z⁻¹ = [x, y]
            let c = GroupWord::conjugate(&GroupWord::commutator(&x, &y), &z.inverse()).reduced();
            let text = format!("n={}; [x1,y1] = z1 ({}) Z1", rank, c);
            emit(jm, json!({ "equation": text, "solution": { "x1": x, "y1": y, "z1": z } }), text);
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {:#}", e);
            ExitCode::from(EXIT_INPUT)
        }
    }
}

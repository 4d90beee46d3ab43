//! The decision pipeline: standard form, conjugator images, lattices, wedge
//! problem, repair and lifting.

use std::collections::{BTreeMap, BTreeSet};

use log::{debug, info};
use num_bigint::BigInt;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use super::cert::{emit_certificate, Certificate};
use super::dsl::Parsed;
use crate::lifter::{lift, AbelianSolution, LiftError, Witness};
use crate::mgroup::GroupWord;
use crate::qnormal::{standardize, x_name, y_name, AutomorphismLog, MixedWord, QnError, StandardEquation};
use crate::reducer::{
    build_reduced, build_system, enumerate_l, enumerate_wbars, repair_wbar, wbar_count, wbar_radius, LCaps,
    ReduceError, ReducedProblem, ReductionSystem, WbarTuple,
};
use crate::wedgesolve::{solve_with, ExhaustionReport, SymplecticTuple, WedgeCaps, WedgeInstance, WedgeOutcome};
use crate::zlattice::wedge::wedge_big;
use crate::zlattice::{AbVec, Lattice, Wedge};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, Serialize)]
pub struct SolveConfig {
    pub lcaps: LCaps,
    pub wedge: WedgeCaps,
    /// Conjugator tuples tried before giving up.
    pub max_wbars: u64,
    /// Worker threads; `0` uses the global pool, `1` runs inline.
    #[serde(skip)]
    pub jobs: usize,
}

impl Default for SolveConfig {
    fn default() -> Self {
        SolveConfig {
            lcaps: LCaps::default(),
            wedge: WedgeCaps { shell: 2_000_000, confirm: 20_000 },
            max_wbars: 200_000,
            jobs: 0,
        }
    }
}

#[derive(Debug, Error)]
pub enum SolveError {
    #[error(transparent)]
    Input(#[from] QnError),
    #[error("internal error: {0}")]
    Internal(String),
}

impl From<ReduceError> for SolveError {
    fn from(e: ReduceError) -> Self {
        SolveError::Internal(e.to_string())
    }
}

impl From<LiftError> for SolveError {
    fn from(e: LiftError) -> Self {
        SolveError::Internal(e.to_string())
    }
}

/// An equation made ready for the pipeline.
#[derive(Clone, Debug)]
pub struct Prepared {
    /// The word as given.
    pub word: MixedWord,
    pub standard: StandardEquation,
    /// Carries solutions of `standard` back to `word`.
    pub log: AutomorphismLog,
    /// `standard` with the genus capped at the rank.
    pub effective: StandardEquation,
}

/// Brings the parsed equation to standard form and caps the genus at `n`:
/// every element of `M_n'` is a product of `n` commutators, so extra handles
/// never help.
pub fn prepare(parsed: &Parsed) -> Result<Prepared, SolveError> {
    let (standard, log) = match &parsed.standard {
        Some(eq) => (eq.clone(), AutomorphismLog::default()),
        None => {
            let st = standardize(&parsed.word)?;
            (st.equation, st.log)
        }
    };
    let mut effective = standard.clone();
    effective.genus = standard.genus.min(standard.rank);
    Ok(Prepared { word: parsed.word.clone(), standard, log, effective })
}

impl Prepared {
    /// Values for the original variables from a witness of `effective`.
    pub fn carry_back(&self, w: &Witness) -> Witness {
        let mut vals = w.0.clone();
        for i in self.effective.genus..self.standard.genus {
            vals.insert(x_name(i), GroupWord::empty());
            vals.insert(y_name(i), GroupWord::empty());
        }
        let mut out = self.log.transport(&vals);
        let wanted: BTreeSet<String> = self.word.variables().into_iter().collect();
        out.retain(|k, _| wanted.contains(k));
        for v in wanted {
            out.entry(v).or_default();
        }
        Witness(out)
    }

    pub fn check_original(&self, w: &Witness) -> Result<bool, SolveError> {
        Ok(self.word.evaluate(&w.0)?.is_identity())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Status {
    #[serde(rename = "SAT")]
    Sat,
    #[serde(rename = "UNSAT")]
    Unsat,
    #[serde(rename = "UNKNOWN")]
    Unknown,
}

/// What was searched when no solution was found.
#[derive(Clone, Debug, Default, Serialize)]
pub struct Exhaustion {
    pub kind: String,
    pub wbar_radius: i64,
    pub wbar_tuples: u64,
    pub lattices_checked: u64,
    /// Distinct reasons the wedge stage gave, in sorted order.
    pub wedge_reasons: Vec<String>,
    /// Reports of confirming searches, if any were run.
    pub searches: Vec<ExhaustionReport>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Verdict {
    pub schema: u32,
    pub status: Status,
    pub reason: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<Certificate>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exhaustion: Option<Exhaustion>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub caps_hit: Vec<String>,
}

impl Verdict {
    fn new(status: Status, reason: String) -> Self {
        Verdict {
            schema: SCHEMA_VERSION,
            status,
            reason,
            witness: None,
            certificate: None,
            exhaustion: None,
            caps_hit: Vec::new(),
        }
    }
}

/// Abelian data produced from a wedge solution.
pub(crate) fn abelian_solution(
    eq: &StandardEquation,
    sys: &ReductionSystem,
    rp: &ReducedProblem,
    tuple: &SymplecticTuple,
) -> Result<AbelianSolution, SolveError> {
    let n = eq.rank;
    let to_ab = |coords: &Vec<i64>| -> Result<AbVec, SolveError> {
        let big: Vec<BigInt> = coords.iter().map(|&x| BigInt::from(x)).collect();
        AbVec::from_big(&rp.to_ambient(&big)).ok_or_else(|| SolveError::Internal("ambient vector overflows".into()))
    };
    let us: Vec<AbVec> = tuple.us.iter().map(to_ab).collect::<Result<_, _>>()?;
    let vs: Vec<AbVec> = tuple.vs.iter().map(to_ab).collect::<Result<_, _>>()?;
    let mut target = Wedge::zero(n);
    for (u, v) in us.iter().zip(&vs) {
        target = target.add(&wedge_big(&u.to_big(), &v.to_big()));
    }
    let ws = repair_wbar(sys, &rp.lattice, &target)?;
    Ok(AbelianSolution::new(eq, us, vs, ws.0)?)
}

struct Found {
    wbars: WbarTuple,
    lattice: Lattice,
    tuple: SymplecticTuple,
    witness: Witness,
    certificate: Certificate,
}

#[derive(Default)]
struct Miss {
    lattices: u64,
    reasons: BTreeSet<String>,
    searches: Vec<ExhaustionReport>,
    caps: Vec<String>,
}

enum WbarOutcome {
    Found(Box<Found>),
    Miss(Miss),
}

fn try_wbar(eq: &StandardEquation, wbars: &WbarTuple, cfg: &SolveConfig) -> Result<WbarOutcome, SolveError> {
    let sys = build_system(eq, wbars)?;
    let cands = enumerate_l(&sys, &cfg.lcaps);
    let mut miss = Miss::default();
    if !cands.certified {
        miss.caps.extend(cands.notes.iter().map(|s| format!("w̄ = {:?}: {}", wbars.0, s)));
    }
    for l in &cands.lattices {
        miss.lattices += 1;
        let Some(rp) = build_reduced(&sys, l)? else {
            miss.reasons.insert("wedge target outside Λ²(L)".into());
            continue;
        };
        let Some(inst) = WedgeInstance::from_reduced(&rp) else {
            miss.caps.push("wedge instance exceeds machine integers".into());
            continue;
        };
        match solve_with(&inst, cfg.wedge) {
            WedgeOutcome::Solved { tuple } => {
                let sol = abelian_solution(eq, &sys, &rp, &tuple)?;
                let witness = lift(eq, &sol)?;
                let certificate = emit_certificate(eq, wbars, l, &tuple)?;
                debug!("solution for w̄ = {:?} with L of rank {}", wbars.0, l.rank());
                return Ok(WbarOutcome::Found(Box::new(Found {
                    wbars: wbars.clone(),
                    lattice: l.clone(),
                    tuple,
                    witness,
                    certificate,
                })));
            }
            WedgeOutcome::Unsat { reason, report } => {
                miss.reasons.insert(reason);
                if let Some(r) = report {
                    if miss.searches.len() < 8 {
                        miss.searches.push(r);
                    }
                }
            }
            WedgeOutcome::Unknown { reason, .. } => miss.caps.push(reason),
        }
    }
    Ok(WbarOutcome::Miss(miss))
}

/// Decides the equation.
pub fn solve(parsed: &Parsed, cfg: &SolveConfig) -> Result<Verdict, SolveError> {
    let prep = prepare(parsed)?;
    solve_prepared(&prep, cfg)
}

pub fn solve_prepared(prep: &Prepared, cfg: &SolveConfig) -> Result<Verdict, SolveError> {
    let eq = &prep.effective;
    let n = eq.rank;
    let total = eq.coeff_abs().iter().fold(AbVec::zero(n), |a, c| &a + c);
    if !total.is_zero() {
        let mut v = Verdict::new(
            Status::Unsat,
            format!("abelianization: the coefficients sum to {:?}, not 0", total.0),
        );
        v.exhaustion = Some(Exhaustion { kind: "abelian obstruction".into(), ..Default::default() });
        return Ok(v);
    }
    let count = wbar_count(eq, true);
    let budget = u128::from(cfg.max_wbars).min(count) as usize;
    info!("genus {}, {} coefficients, {} conjugator tuples", eq.genus, eq.m(), count);
    let mut tried = 0u64;
    let mut agg = Miss::default();
    let mut iter = enumerate_wbars(eq, true).take(budget);
    let block = if cfg.jobs == 1 { 1 } else { 32 };
    let pool = match cfg.jobs {
        0 | 1 => None,
        j => Some(
            rayon::ThreadPoolBuilder::new()
                .num_threads(j)
                .build()
                .map_err(|e| SolveError::Internal(e.to_string()))?,
        ),
    };
    loop {
        let chunk: Vec<WbarTuple> = iter.by_ref().take(block).collect();
        if chunk.is_empty() {
            break;
        }
        let run = || -> Vec<Result<WbarOutcome, SolveError>> {
            if cfg.jobs == 1 {
                chunk.iter().map(|w| try_wbar(eq, w, cfg)).collect()
            } else {
                chunk.par_iter().map(|w| try_wbar(eq, w, cfg)).collect()
            }
        };
        let results = match &pool {
            Some(p) => p.install(run),
            None => run(),
        };
        for r in results {
            tried += 1;
            match r? {
                WbarOutcome::Found(f) => return finish_sat(prep, *f),
                WbarOutcome::Miss(m) => {
                    agg.lattices += m.lattices;
                    agg.reasons.extend(m.reasons);
                    for s in m.searches {
                        if agg.searches.len() < 8 {
                            agg.searches.push(s);
                        }
                    }
                    agg.caps.extend(m.caps);
                }
            }
        }
    }
    let exhaustion = Exhaustion {
        kind: "search".into(),
        wbar_radius: wbar_radius(eq),
        wbar_tuples: tried,
        lattices_checked: agg.lattices,
        wedge_reasons: agg.reasons.into_iter().collect(),
        searches: agg.searches,
    };
    if (budget as u128) < count {
        agg.caps.push(format!("only {} of {} conjugator tuples tried", budget, count));
    }
    let mut v = if agg.caps.is_empty() {
        Verdict::new(Status::Unsat, "no candidate passes the wedge stage".into())
    } else {
        Verdict::new(Status::Unknown, "search caps were hit before a decision".into())
    };
    agg.caps.sort();
    agg.caps.dedup();
    agg.caps.truncate(20);
    v.caps_hit = agg.caps;
    v.exhaustion = Some(exhaustion);
    Ok(v)
}

fn finish_sat(prep: &Prepared, f: Found) -> Result<Verdict, SolveError> {
    let witness = prep.carry_back(&f.witness);
    if !prep.check_original(&witness)? {
        return Err(SolveError::Internal("witness does not satisfy the input equation".into()));
    }
    debug!("lattice {:?}, tuple {:?}", f.lattice.hnf_basis().to_rows(), f.tuple);
    let mut v = Verdict::new(Status::Sat, format!("solution found for w̄ = {:?}", f.wbars.0));
    v.witness = Some(witness);
    v.certificate = Some(f.certificate);
    Ok(v)
}

/// Witness values keyed by variable name, for display.
pub fn witness_strings(w: &Witness) -> BTreeMap<String, String> {
    w.0.iter().map(|(k, v)| (k.clone(), v.to_string())).collect()
}

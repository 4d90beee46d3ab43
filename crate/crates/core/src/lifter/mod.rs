//! Lifting abelian solutions to solutions in `M_n`, and checking witnesses.
//!
//! With arbitrary lifts `Y` of `(ū, v̄, w̄)` the error `E = W(Y)` lies in
//! `ker φ ∩ ker τ_L`. Multiplying a variable by a conjugate of `[a_i, a_j]`
//! changes `σ(E)` by a fixed linear image of a translated unit square, and
//! those images span the same cycles, so an integer linear system over a
//! finite window of edges produces the correction.

use std::collections::{BTreeMap, HashMap, HashSet};

use log::debug;
use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::mgroup::{sigma, Edge, GroupWord, MElem, OneChain};
use crate::qnormal::mixed::Item;
use crate::qnormal::{x_name, y_name, z_name, QnError, StandardEquation};
use crate::reducer::{build_system, WbarTuple};
use crate::zlattice::sparse::{SparseEchelon, SparseVec};
use crate::zlattice::wedge::wedge_big;
use crate::zlattice::{AbVec, Lattice, Wedge};

/// Number of times the window padding is doubled before giving up.
pub const MAX_EXPANSIONS: u32 = 4;

#[derive(Debug, Error)]
pub enum LiftError {
    #[error("abelian data rejected: {0}")]
    Invalid(String),
    #[error("no correction found within the largest window for {0:?}")]
    Incomplete(Box<AbelianSolution>),
    #[error("malformed witness: {0}")]
    Malformed(String),
    #[error("internal error: {0}")]
    Internal(String),
}

/// `(ū, v̄, w̄)` satisfying the wedge equation and the chain condition for
/// `L = ⟨ū_i, v̄_i, c̄_j⟩`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AbelianSolution {
    pub us: Vec<AbVec>,
    pub vs: Vec<AbVec>,
    pub ws: Vec<AbVec>,
    #[serde(skip, default = "empty_lattice")]
    pub lattice: Lattice,
}

fn empty_lattice() -> Lattice {
    Lattice::zero(0)
}

impl AbelianSolution {
    /// Checks both conditions and computes `L`.
    pub fn new(eq: &StandardEquation, us: Vec<AbVec>, vs: Vec<AbVec>, ws: Vec<AbVec>) -> Result<Self, LiftError> {
        let n = eq.rank;
        if us.len() != eq.genus || vs.len() != eq.genus || ws.len() != eq.m() {
            return Err(LiftError::Invalid("tuple lengths do not match the equation".into()));
        }
        if us.iter().chain(&vs).chain(&ws).any(|v| v.len() != n) {
            return Err(LiftError::Invalid("vector length differs from the rank".into()));
        }
        let sys = build_system(eq, &WbarTuple(ws.clone())).map_err(|e| LiftError::Invalid(e.to_string()))?;
        let mut gens: Vec<AbVec> = us.iter().chain(&vs).cloned().collect();
        gens.extend(sys.cbars.iter().cloned());
        let lattice = Lattice::from_generators(n, &gens);
        let mut wedge = Wedge::zero(n);
        for (u, v) in us.iter().zip(&vs) {
            wedge = wedge.add(&wedge_big(&u.to_big(), &v.to_big()));
        }
        if wedge != sys.h {
            return Err(LiftError::Invalid("Σ ū_i ∧ v̄_i differs from the wedge target".into()));
        }
        if !sys.delta_vanishes(&lattice) {
            return Err(LiftError::Invalid("conjugated coefficient chain does not vanish modulo L".into()));
        }
        Ok(AbelianSolution { us, vs, ws, lattice })
    }
}

/// Values of all variables.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Witness(pub BTreeMap<String, GroupWord>);

impl Witness {
    pub fn get(&self, name: &str) -> Option<&GroupWord> {
        self.0.get(name)
    }

    pub fn total_length(&self) -> usize {
        self.0.values().map(GroupWord::len).sum()
    }
}

/// Substitutes the witness and evaluates in `M_n`.
pub fn verify(eq: &StandardEquation, w: &Witness) -> Result<bool, LiftError> {
    for name in eq.variable_names() {
        let Some(val) = w.0.get(&name) else {
            return Err(LiftError::Malformed(format!("no value for {}", name)));
        };
        if let Err(e) = val.check_rank(eq.rank) {
            return Err(LiftError::Malformed(format!("{}: {}", name, e)));
        }
    }
    eq.verify(&w.0).map_err(|e: QnError| LiftError::Malformed(e.to_string()))
}

/// One appearance of a variable in the equation word: sign and the position
/// at which an appended commutator factor lands.
struct Occurrence {
    var: usize,
    sign: i64,
    shift: AbVec,
}

fn occurrences(eq: &StandardEquation, names: &[String], values: &BTreeMap<String, GroupWord>) -> Vec<Occurrence> {
    let n = eq.rank;
    let index: HashMap<&str, usize> = names.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect();
    let mut pos = AbVec::zero(n);
    let mut out = Vec::new();
    for item in &eq.standard_word().items {
        match item {
            Item::Var { name, inv } => {
                let ab = values[name].abelianization(n);
                let var = index[name.as_str()];
                if *inv {
                    out.push(Occurrence { var, sign: -1, shift: pos.clone() });
                    pos = &pos - &ab;
                } else {
                    pos = &pos + &ab;
                    out.push(Occurrence { var, sign: 1, shift: pos.clone() });
                }
            }
            Item::Const(w) => pos = &pos + &w.abelianization(n),
        }
    }
    out
}

/// Integer points of the box `[lo, hi]`.
fn box_points(lo: &AbVec, hi: &AbVec) -> Vec<AbVec> {
    let mut out = vec![AbVec(Vec::new())];
    for (a, b) in lo.0.iter().zip(&hi.0) {
        let mut next = Vec::with_capacity(out.len() * (b - a + 1).max(0) as usize);
        for p in &out {
            for x in *a..=*b {
                let mut q = p.0.clone();
                q.push(x);
                next.push(AbVec(q));
            }
        }
        out = next;
    }
    out
}

struct EdgeIndex(HashMap<Edge, usize>);

impl EdgeIndex {
    fn sparse(&mut self, c: &OneChain) -> SparseVec {
        let mut v = SparseVec::new();
        for (e, &k) in c.iter() {
            let next = self.0.len();
            let i = *self.0.entry(e.clone()).or_insert(next);
            *v.entry(i).or_insert_with(BigInt::zero) += k;
        }
        v.retain(|_, x| !x.is_zero());
        v
    }
}

/// A correction column: variable, square `(i, j)` and its position.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct Column {
    var: usize,
    i: usize,
    j: usize,
    at: AbVec,
}

/// Paddings tried in order: small windows first, then the schedule that
/// starts at `start` and doubles.
fn paddings(start: i64) -> Vec<i64> {
    let mut out: Vec<i64> = (0..start.min(3)).collect();
    let mut p = start.max(1);
    for _ in 0..=MAX_EXPANSIONS {
        out.push(p);
        p *= 2;
    }
    out.dedup();
    out
}

/// Lifts an abelian solution to an exact witness.
pub fn lift(eq: &StandardEquation, sol: &AbelianSolution) -> Result<Witness, LiftError> {
    let n = eq.rank;
    let names = eq.variable_names();
    let mut values: BTreeMap<String, GroupWord> = BTreeMap::new();
    for i in 0..eq.genus {
        values.insert(x_name(i), GroupWord::from_abelian(&sol.us[i]));
        values.insert(y_name(i), GroupWord::from_abelian(&sol.vs[i]));
    }
    for i in 0..eq.m() {
        values.insert(z_name(i), GroupWord::from_abelian(&sol.ws[i]));
    }
    let err = eq.standard_word().evaluate(&values).map_err(|e| LiftError::Internal(e.to_string()))?;
    if !err.ab().is_zero() {
        return Err(LiftError::Internal("lifted error has nonzero abelianization".into()));
    }
    let phi = err.phi().map_err(|e| LiftError::Internal(e.to_string()))?;
    if !phi.is_zero() || !err.tau(&sol.lattice).is_zero() {
        return Err(LiftError::Internal("lifted error is outside ker φ ∩ ker τ_L".into()));
    }
    if err.is_identity() {
        return Ok(Witness(values));
    }
    let occ = occurrences(eq, &names, &values);
    let mut squares = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let c = GroupWord::commutator(&GroupWord::generator(i + 1), &GroupWord::generator(j + 1));
            squares.push((i, j, sigma(&c, n).chain().clone()));
        }
    }
    let (mut lo, mut hi) = err.chain().bounding_box().expect("nonzero chain");
    for c in eq.coeff_elems() {
        if let Some((a, b)) = c.chain().bounding_box() {
            for k in 0..n {
                lo.0[k] = lo.0[k].min(a.0[k]);
                hi.0[k] = hi.0[k].max(b.0[k]);
            }
        }
    }
    let start = sol.ws.iter().map(AbVec::l1).max().unwrap_or(0) + eq.total_coeff_length() as i64;
    let mut edges = EdgeIndex(HashMap::new());
    let target = edges.sparse(&err.chain().neg());
    let mut ech = SparseEchelon::new();
    let mut cols: Vec<Column> = Vec::new();
    let mut seen: HashSet<Column> = HashSet::new();
    for pad in paddings(start) {
        let plo = AbVec(lo.0.iter().map(|x| x - pad).collect());
        let phi_ = AbVec(hi.0.iter().map(|x| x + pad).collect());
        for p in box_points(&plo, &phi_) {
            for (var, _) in names.iter().enumerate() {
                let Some(first) = occ.iter().find(|o| o.var == var) else { continue };
                let at = &p - &first.shift;
                for (i, j, sq) in &squares {
                    let col = Column { var, i: *i, j: *j, at: at.clone() };
                    if seen.contains(&col) {
                        continue;
                    }
                    let mut chain = OneChain::new();
                    for o in occ.iter().filter(|o| o.var == var) {
                        chain.add_scaled_translate(sq, &(&at + &o.shift), o.sign);
                    }
                    let v = edges.sparse(&chain);
                    if v.is_empty() {
                        continue;
                    }
                    seen.insert(col.clone());
                    ech.push(v);
                    cols.push(col);
                }
            }
        }
        debug!("lift window pad {}: {} columns, rank {}", pad, cols.len(), ech.rank());
        let Some(x) = ech.solve(&target) else { continue };
        let mut out = values.clone();
        for (k, coeff) in x {
            let c = &cols[k];
            let e = coeff
                .to_i64()
                .ok_or_else(|| LiftError::Internal("correction exponent overflows".into()))?;
            let conj = GroupWord::from_abelian(&c.at);
            let comm = GroupWord::commutator(&GroupWord::generator(c.i + 1), &GroupWord::generator(c.j + 1)).power(e);
            let factor = conj.concat(&comm).concat(&conj.inverse());
            let name = &names[c.var];
            let v = out[name].concat(&factor).reduced();
            out.insert(name.clone(), v);
        }
        let w = Witness(out);
        return match verify(eq, &w)? {
            true => Ok(w),
            false => Err(LiftError::Internal("corrected witness fails verification".into())),
        };
    }
    Err(LiftError::Incomplete(Box::new(sol.clone())))
}

/// Evaluates the equation word at the witness.
pub fn residual(eq: &StandardEquation, w: &Witness) -> Result<MElem, LiftError> {
    eq.standard_word().evaluate(&w.0).map_err(|e| LiftError::Malformed(e.to_string()))
}

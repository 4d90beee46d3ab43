//! The abelian data attached to a choice of conjugator images.

use log::warn;
use num_bigint::BigInt;
use serde::Serialize;

use super::wbar::{wbar_radius, WbarTuple};
use super::ReduceError;
use crate::mgroup::OneChain;
use crate::qnormal::StandardEquation;
use crate::zlattice::sparse::solve_left;
use crate::zlattice::wedge::wedge_big;
use crate::zlattice::{AbVec, Lattice, Wedge};

/// For fixed `w̄`, a solution with `⟨ū_i, v̄_i, c̄_j⟩ = L` exists iff
/// `Q ⊆ L`, the chain `delta` vanishes in `Γ_n / L`, and
/// `Σ ū_i ∧ v̄_i ≡ h` modulo `⟨c̄_j ∧ L⟩`.
#[derive(Clone, Debug, Serialize)]
pub struct ReductionSystem {
    pub rank: usize,
    pub genus: usize,
    pub cbars: Vec<AbVec>,
    pub wbars: WbarTuple,
    /// `Σ_i w̄_i · σ(c_i)`.
    #[serde(skip)]
    pub delta: OneChain,
    /// `φ(c_1⋯c_m) + Σ_i w̄_i ∧ c̄_i`.
    #[serde(skip)]
    pub h: Wedge,
}

impl ReductionSystem {
    pub fn q_lattice(&self) -> Lattice {
        Lattice::from_generators(self.rank, &self.cbars)
    }

    /// `π_L(δ) = 0`.
    pub fn delta_vanishes(&self, l: &Lattice) -> bool {
        crate::mgroup::QuotChain::project(&self.delta, l).is_zero()
    }

    /// `Q ⊆ L` and `π_L(δ) = 0`.
    pub fn admits(&self, l: &Lattice) -> bool {
        self.cbars.iter().all(|c| l.contains(c)) && self.delta_vanishes(l)
    }

    /// The generators `c̄_j ∧ e_k` of the kernel subgroup, in ambient coordinates,
    /// for `L` spanned by `basis`.
    pub fn kernel_generators(&self, basis: &[Vec<BigInt>]) -> Vec<Wedge> {
        let mut out = Vec::new();
        for c in &self.cbars {
            let cb = c.to_big();
            for f in basis {
                out.push(wedge_big(&cb, f));
            }
        }
        out
    }
}

/// Builds the reduction system for `w̄`.
///
/// The coefficient images must sum to zero, otherwise the equation has no
/// solution (abelianize both sides).
pub fn build_system(eq: &StandardEquation, wbars: &WbarTuple) -> Result<ReductionSystem, ReduceError> {
    let n = eq.rank;
    assert_eq!(wbars.len(), eq.m(), "one conjugator image per coefficient");
    let elems = eq.coeff_elems();
    let cbars: Vec<AbVec> = elems.iter().map(|e| e.ab().clone()).collect();
    let total = cbars.iter().fold(AbVec::zero(n), |acc, c| &acc + c);
    if !total.is_zero() {
        return Err(ReduceError::AbelianObstruction(total.0));
    }
    let mut delta = OneChain::new();
    for (e, w) in elems.iter().zip(&wbars.0) {
        delta.add_scaled_translate(e.chain(), w, 1);
    }
    let mut h = eq.coeff_product().phi().map_err(|e| ReduceError::Internal(e.to_string()))?;
    for (w, c) in wbars.0.iter().zip(&cbars) {
        h = h.add(&wedge_big(&w.to_big(), &c.to_big()));
    }
    let sys = ReductionSystem { rank: n, genus: eq.genus, cbars, wbars: wbars.clone(), delta, h };
    check_bounds(eq, &sys)?;
    Ok(sys)
}

/// Size bounds for `δ` and `h` in terms of the radius `N = Σ|c_j|`.
///
/// The `h` bound is an invariant of the construction and is enforced. The
/// diameter bound on `supp δ` only holds for `w̄` drawn from the clustered
/// normal form, so a violation is logged rather than treated as an error.
fn check_bounds(eq: &StandardEquation, sys: &ReductionSystem) -> Result<(), ReduceError> {
    let n = wbar_radius(eq);
    if !sys.wbars.within(n) {
        return Ok(());
    }
    let h_bound = BigInt::from(2 * n * n);
    if sys.h.max_abs() > h_bound {
        return Err(ReduceError::Internal(format!("wedge target exceeds 2N² = {}", h_bound)));
    }
    let diam = sys.delta.diameter();
    if diam > 2 * n {
        warn!("supp δ has diameter {} > 2N = {} for w̄ = {:?}", diam, 2 * n, sys.wbars.0);
    }
    Ok(())
}

/// Shifts `w̄_i` by `λ_i ∈ L` so that the wedge target becomes `target`.
///
/// Needs `target - h ∈ ⟨λ ∧ c̄_i : λ ∈ L⟩`; returns the new tuple.
pub fn repair_wbar(sys: &ReductionSystem, l: &Lattice, target: &Wedge) -> Result<WbarTuple, ReduceError> {
    let defect = target.sub(&sys.h);
    let basis = l.hnf_basis().to_rows();
    let k = basis.len();
    if defect.is_zero() {
        return Ok(sys.wbars.clone());
    }
    // unknowns x_{ij}: λ_i = Σ_j x_{ij} f_j, contributing x_{ij} (f_j ∧ c̄_i)
    let mut rows = Vec::new();
    for c in &sys.cbars {
        let cb = c.to_big();
        for f in &basis {
            rows.push(wedge_big(f, &cb).to_dense());
        }
    }
    let x = solve_left(&rows, &defect.to_dense())
        .ok_or_else(|| ReduceError::Internal("wedge defect is not in the kernel subgroup".into()))?;
    let mut out = sys.wbars.clone();
    for (i, w) in out.0.iter_mut().enumerate() {
        let mut shift = vec![BigInt::from(0); sys.rank];
        for (j, f) in basis.iter().enumerate() {
            for (s, fv) in shift.iter_mut().zip(f) {
                *s += &x[i * k + j] * fv;
            }
        }
        let shift = AbVec::from_big(&shift).ok_or_else(|| ReduceError::Internal("conjugator shift overflows".into()))?;
        *w = &*w + &shift;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mgroup::{sigma, GroupWord, MElem};

    fn eq(coeffs: &[&str], n: usize, g: usize) -> StandardEquation {
        StandardEquation::new(n, g, coeffs.iter().map(|c| GroupWord::parse(c).unwrap()).collect()).unwrap()
    }

    fn tuple(v: &[&[i64]]) -> WbarTuple {
        WbarTuple(v.iter().map(|x| AbVec(x.to_vec())).collect())
    }

    #[test]
    fn abelian_obstruction() {
        let e = eq(&["a1"], 2, 1);
        assert!(matches!(build_system(&e, &tuple(&[&[0, 0]])), Err(ReduceError::AbelianObstruction(_))));
    }

    /// `h` equals `φ` of the right-hand side with conjugators of the given images.
    #[test]
    fn h_matches_direct_evaluation() {
        let e = eq(&["a1 a2 a2", "A2 A1 A2"], 2, 1);
        let conj = [GroupWord::parse("a2 a2").unwrap(), GroupWord::parse("A1").unwrap()];
        let wb = tuple(&[&[0, 2], &[-1, 0]]);
        let sys = build_system(&e, &wb).unwrap();
        let rhs = e
            .coeffs
            .iter()
            .zip(&conj)
            .map(|(c, z)| sigma(c, 2).conj(&sigma(z, 2)))
            .fold(MElem::identity(2), |a, b| a.mul(&b));
        assert_eq!(rhs.phi().unwrap(), sys.h);
    }

    #[test]
    fn delta_projection() {
        let e = eq(&["a1 a2 A1 A2"], 2, 1);
        let sys = build_system(&e, &tuple(&[&[1, 0]])).unwrap();
        let l = Lattice::from_generators(2, &[AbVec(vec![1, 0])]);
        assert!(!sys.delta_vanishes(&l));
        assert!(sys.delta_vanishes(&Lattice::full(2)));
        assert!(!sys.delta_vanishes(&Lattice::zero(2)));
    }

    #[test]
    fn repair_hits_target() {
        let e = eq(&["a1", "A1"], 2, 1);
        let sys = build_system(&e, &tuple(&[&[0, 0], &[0, 0]])).unwrap();
        let l = Lattice::full(2);
        let target = sys.h.add(&Wedge::basis(2, 0, 1).scale(&BigInt::from(3)));
        let wb = repair_wbar(&sys, &l, &target).unwrap();
        let sys2 = build_system(&e, &wb).unwrap();
        assert_eq!(sys2.h, target);
    }
}

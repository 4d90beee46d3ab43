//! Passing from `(L, Q, h)` to the finitely generated abelian group
//! `R = L / Q` and the target `h ∈ Λ²(R)`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use serde::Serialize;

use super::system::ReductionSystem;
use super::ReduceError;
use crate::zlattice::wedge::{wedge_big, wedge_in_sublattice};
use crate::zlattice::{snf_with_transform, wedge_mod_subgroup, IntMatrix, Lattice, Wedge};

#[derive(Clone, Debug, Serialize)]
pub struct ReducedProblem {
    #[serde(skip)]
    pub lattice: Lattice,
    pub genus: usize,
    /// HNF basis `f` of `L`.
    pub basis_f: Vec<Vec<BigInt>>,
    /// Ambient vectors of the kept generators of `R`, free ones first.
    pub b_basis: Vec<Vec<BigInt>>,
    /// Order of each kept generator (`0` for infinite order).
    pub moduli: Vec<BigInt>,
    pub free_rank: usize,
    /// `h` in the basis `f_i ∧ f_j` of `Λ²(L)`.
    pub h_l: Wedge,
    /// Canonical representative of `h_l` modulo the kernel subgroup.
    pub h_rep: Wedge,
    /// `h` in the kept generators, coordinate `(i, j)` reduced modulo
    /// `gcd(d_i, d_j)`.
    pub h_r: Wedge,
}

impl ReducedProblem {
    pub fn rank(&self) -> usize {
        self.moduli.len()
    }

    pub fn torsion(&self) -> &[BigInt] {
        &self.moduli[self.free_rank..]
    }

    /// Modulus of the `(i, j)` coordinate of `Λ²(R)`.
    pub fn pair_modulus(&self, i: usize, j: usize) -> BigInt {
        self.moduli[i].gcd(&self.moduli[j])
    }

    /// Ambient vector with the given coordinates in the kept generators.
    pub fn to_ambient(&self, coords: &[BigInt]) -> Vec<BigInt> {
        let n = self.lattice.ambient_rank();
        let mut out = vec![BigInt::zero(); n];
        for (t, b) in coords.iter().zip(&self.b_basis) {
            for (o, x) in out.iter_mut().zip(b) {
                *o += t * x;
            }
        }
        out
    }

    /// Norm of the free-by-free block of `h_r`, used for the search box.
    pub fn free_h_norm(&self) -> BigInt {
        let mut best = BigInt::zero();
        for ((i, j), v) in self.h_r.iter() {
            if *i < self.free_rank && *j < self.free_rank {
                best = best.max(v.abs());
            }
        }
        best
    }
}

fn reduce_coord(x: &BigInt, m: &BigInt) -> BigInt {
    if m.is_zero() {
        x.clone()
    } else {
        x.mod_floor(m)
    }
}

/// Builds `R = L / Q` and the target. Returns `Ok(None)` when `h ∉ Λ²(L)`, in
/// which case no solution with this `L` exists.
pub fn build_reduced(sys: &ReductionSystem, l: &Lattice) -> Result<Option<ReducedProblem>, ReduceError> {
    let basis_f = l.hnf_basis().to_rows();
    let k = basis_f.len();
    let Some(h_l) = wedge_in_sublattice(&sys.h, &basis_f) else {
        return Ok(None);
    };
    let mut kc_rows = Vec::new();
    for c in &sys.cbars {
        let coords = l
            .coordinates(c)
            .ok_or_else(|| ReduceError::Internal("coefficient image outside L".into()))?;
        kc_rows.push(coords);
    }
    let kc = IntMatrix::from_rows(k, &kc_rows);
    let snf = snf_with_transform(&kc);
    let diag = snf.diagonal();
    let d: Vec<BigInt> = (0..k).map(|j| diag.get(j).map(|x| x.abs()).unwrap_or_else(BigInt::zero)).collect();
    let vinv: Vec<Vec<BigInt>> = snf
        .v
        .rational_inverse()
        .ok_or_else(|| ReduceError::Internal("singular SNF transform".into()))?
        .into_iter()
        .map(|r| r.into_iter().map(|x| x.to_integer()).collect())
        .collect();
    let f_m = IntMatrix::from_rows(l.ambient_rank(), &basis_f);
    let b_all = IntMatrix::from_rows(k, &vinv).mul(&f_m).to_rows();
    let w = h_l.to_skew();
    let hb = snf.v.transpose().mul(&w).mul(&snf.v);

    let mut kept: Vec<usize> = (0..k).filter(|&j| d[j].is_zero()).collect();
    let free_rank = kept.len();
    kept.extend((0..k).filter(|&j| d[j] > BigInt::from(1)));
    let moduli: Vec<BigInt> = kept.iter().map(|&j| d[j].clone()).collect();
    let q = kept.len();
    let mut h_r = Wedge::zero(q);
    for a in 0..q {
        for b in a + 1..q {
            let m = moduli[a].gcd(&moduli[b]);
            let v = reduce_coord(&hb[(kept[a], kept[b])], &m);
            if !v.is_zero() {
                h_r.add_at(a, b, &v);
            }
        }
    }

    let mut kgens = Vec::new();
    for row in &kc_rows {
        for j in 0..k {
            let mut e = vec![BigInt::zero(); k];
            e[j] = BigInt::from(1);
            kgens.push(wedge_big(row, &e));
        }
    }
    let h_rep = wedge_mod_subgroup(&h_l, &kgens);
    if h_rep.is_zero() != h_r.is_zero() {
        return Err(ReduceError::Internal("target representatives in Λ²(L)/K and Λ²(R) disagree".into()));
    }
    Ok(Some(ReducedProblem {
        lattice: l.clone(),
        genus: sys.genus,
        basis_f,
        b_basis: kept.iter().map(|&j| b_all[j].clone()).collect(),
        moduli,
        free_rank,
        h_l,
        h_rep,
        h_r,
    }))
}

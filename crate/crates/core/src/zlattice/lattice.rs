use std::cmp::Ordering;
use std::hash::{Hash, Hasher};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use super::matrix::IntMatrix;
use super::normal::{hnf_with_transform, HnfDecomposition};
use super::vector::AbVec;

/// A finitely generated subgroup of `Z^n`, kept with its canonical HNF basis.
///
/// Equality, ordering and hashing only look at the ambient rank and the HNF
/// basis, so two lattices built from different generators compare equal iff
/// they are the same subgroup.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Lattice {
    ambient: usize,
    gens: IntMatrix,
    /// Nonzero rows of the HNF of `gens`.
    basis: IntMatrix,
    pivots: Vec<usize>,
    /// Unimodular transform with `transform * gens = hnf(gens)`.
    transform: IntMatrix,
}

impl Lattice {
    pub fn from_matrix(gens: IntMatrix) -> Self {
        let ambient = gens.cols();
        let HnfDecomposition { h, u, pivots } = hnf_with_transform(&gens);
        let rank = pivots.len();
        let basis = IntMatrix::from_rows(ambient, &(0..rank).map(|i| h.row_vec(i)).collect::<Vec<_>>());
        Lattice { ambient, gens, basis, pivots, transform: u }
    }

    pub fn from_generators(ambient: usize, gens: &[AbVec]) -> Self {
        let rows: Vec<Vec<i64>> = gens.iter().map(|g| g.0.clone()).collect();
        for r in &rows {
            assert_eq!(r.len(), ambient, "generator length differs from ambient rank");
        }
        Self::from_matrix(IntMatrix::from_i64_rows(ambient, &rows))
    }

    pub fn from_big_generators(ambient: usize, gens: &[Vec<BigInt>]) -> Self {
        Self::from_matrix(IntMatrix::from_rows(ambient, gens))
    }

    pub fn zero(ambient: usize) -> Self {
        Self::from_matrix(IntMatrix::zeros(0, ambient))
    }

    pub fn full(ambient: usize) -> Self {
        Self::from_matrix(IntMatrix::identity(ambient))
    }

    pub fn ambient_rank(&self) -> usize {
        self.ambient
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn generators(&self) -> &IntMatrix {
        &self.gens
    }

    pub fn hnf_basis(&self) -> &IntMatrix {
        &self.basis
    }

    pub fn transform(&self) -> &IntMatrix {
        &self.transform
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// HNF basis rows as small vectors (panics only if an entry overflows i64).
    pub fn basis_vecs(&self) -> Vec<AbVec> {
        (0..self.rank())
            .map(|i| AbVec::from_big(self.basis.row(i)).expect("lattice basis entry overflows i64"))
            .collect()
    }

    /// Reduces `x` to the canonical coset representative modulo the lattice:
    /// each pivot coordinate ends up in `[0, pivot)`.
    pub fn reduce_big(&self, x: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(x.len(), self.ambient, "ambient rank mismatch");
        let mut out = x.to_vec();
        for (i, &p) in self.pivots.iter().enumerate() {
            let d = &self.basis[(i, p)];
            let q = out[p].div_floor(d);
            if !q.is_zero() {
                for (j, o) in out.iter_mut().enumerate().skip(p) {
                    *o -= &q * &self.basis[(i, j)];
                }
            }
        }
        out
    }

    pub fn reduce(&self, x: &AbVec) -> AbVec {
        if self.rank() == 0 {
            return x.clone();
        }
        AbVec::from_big(&self.reduce_big(&x.to_big())).expect("coset representative overflows i64")
    }

    pub fn contains_big(&self, x: &[BigInt]) -> bool {
        self.reduce_big(x).iter().all(Zero::is_zero)
    }

    pub fn contains(&self, x: &AbVec) -> bool {
        self.contains_big(&x.to_big())
    }

    pub fn coset_eq(&self, x: &AbVec, y: &AbVec) -> bool {
        self.contains(&(x - y))
    }

    /// Coordinates of `x` in the HNF basis, or `None` if `x` is not in the lattice.
    pub fn coordinates_big(&self, x: &[BigInt]) -> Option<Vec<BigInt>> {
        assert_eq!(x.len(), self.ambient);
        let mut rest = x.to_vec();
        let mut coords = Vec::with_capacity(self.rank());
        for (i, &p) in self.pivots.iter().enumerate() {
            // columns before p must already be cleared
            if rest[..p].iter().any(|v| !v.is_zero()) {
                return None;
            }
            let d = &self.basis[(i, p)];
            let (q, r) = rest[p].div_rem(d);
            if !r.is_zero() {
                return None;
            }
            for (j, o) in rest.iter_mut().enumerate().skip(p) {
                *o -= &q * &self.basis[(i, j)];
            }
            coords.push(q);
        }
        if rest.iter().all(Zero::is_zero) {
            Some(coords)
        } else {
            None
        }
    }

    pub fn coordinates(&self, x: &AbVec) -> Option<Vec<BigInt>> {
        self.coordinates_big(&x.to_big())
    }

    pub fn contains_lattice(&self, other: &Lattice) -> bool {
        (0..other.rank()).all(|i| self.contains_big(other.basis.row(i)))
    }

    /// Squared covolume `det(B B^T)` of the lattice inside its real span (1 for the zero lattice).
    pub fn volume_sq(&self) -> BigInt {
        self.basis.mul(&self.basis.transpose()).determinant()
    }

    /// Sum with another lattice.
    pub fn join(&self, other: &Lattice) -> Lattice {
        let mut rows = self.basis.to_rows();
        rows.extend(other.basis.to_rows());
        Lattice::from_big_generators(self.ambient, &rows)
    }

    /// Index-style key used to order candidate lattices deterministically.
    pub fn order_key(&self) -> (BigInt, usize, Vec<BigInt>) {
        let flat: Vec<BigInt> = (0..self.rank()).flat_map(|i| self.basis.row_vec(i)).collect();
        (self.volume_sq(), self.rank(), flat)
    }

    /// Largest absolute entry of the HNF basis.
    pub fn max_entry(&self) -> BigInt {
        self.basis.max_abs()
    }

    /// Basis vector of maximal Euclidean norm, squared.
    pub fn max_basis_norm_sq(&self) -> BigInt {
        (0..self.rank())
            .map(|i| self.basis.row(i).iter().map(|x| x * x).sum::<BigInt>())
            .max()
            .unwrap_or_else(BigInt::zero)
    }

    pub fn is_full(&self) -> bool {
        self.rank() == self.ambient && self.pivots.iter().enumerate().all(|(i, &p)| self.basis[(i, p)].abs() == BigInt::from(1))
    }
}

impl PartialEq for Lattice {
    fn eq(&self, other: &Self) -> bool {
        self.ambient == other.ambient && self.basis == other.basis
    }
}

impl Eq for Lattice {}

impl Hash for Lattice {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.ambient.hash(state);
        self.basis.hash(state);
    }
}

impl PartialOrd for Lattice {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Lattice {
    fn cmp(&self, other: &Self) -> Ordering {
        self.ambient.cmp(&other.ambient).then_with(|| self.order_key().cmp(&other.order_key()))
    }
}

//! Exterior square of a free Z-module in a fixed basis.
//!
//! An element of `Λ²(Z^k)` is stored as its coordinates on the basis
//! `e_i ∧ e_j` (`i < j`). Equivalently it is a skew-symmetric `k x k` matrix `W`
//! with `W_ij` the coordinate for `i < j`.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::lattice::Lattice;
use super::matrix::IntMatrix;
use super::sparse::{to_sparse, SparseEchelon};
use super::vector::AbVec;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum WedgeError {
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("change of basis produced non-integral coordinates")]
    NonIntegral,
    #[error("basis matrix is singular")]
    Singular,
}

#[derive(Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct Wedge {
    rank: usize,
    coords: BTreeMap<(usize, usize), BigInt>,
}

/// Number of basis bivectors of `Λ²(Z^k)`.
pub fn wedge_dim(k: usize) -> usize {
    k * k.saturating_sub(1) / 2
}

/// Position of `e_i ∧ e_j` (`i < j`) in the lexicographic order of pairs.
pub fn pair_index(k: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < k);
    i * (2 * k - i - 1) / 2 + (j - i - 1)
}

impl Wedge {
    pub fn zero(rank: usize) -> Self {
        Wedge { rank, coords: BTreeMap::new() }
    }

    /// `e_i ∧ e_j` with arbitrary order of indices (sign adjusted).
    pub fn basis(rank: usize, i: usize, j: usize) -> Self {
        let mut w = Self::zero(rank);
        w.add_at(i, j, &BigInt::from(1));
        w
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn is_zero(&self) -> bool {
        self.coords.is_empty()
    }

    /// Coordinate on `e_i ∧ e_j`, antisymmetric in `(i, j)`.
    pub fn get(&self, i: usize, j: usize) -> BigInt {
        match i.cmp(&j) {
            std::cmp::Ordering::Less => self.coords.get(&(i, j)).cloned().unwrap_or_default(),
            std::cmp::Ordering::Greater => -self.coords.get(&(j, i)).cloned().unwrap_or_default(),
            std::cmp::Ordering::Equal => BigInt::zero(),
        }
    }

    /// Adds `c * e_i ∧ e_j`.
    pub fn add_at(&mut self, i: usize, j: usize, c: &BigInt) {
        if i == j || c.is_zero() {
            return;
        }
        let (key, c) = if i < j { ((i, j), c.clone()) } else { ((j, i), -c) };
        let e = self.coords.entry(key).or_insert_with(BigInt::zero);
        *e += c;
        if e.is_zero() {
            self.coords.remove(&key);
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&(usize, usize), &BigInt)> {
        self.coords.iter()
    }

    pub fn add(&self, other: &Wedge) -> Wedge {
        assert_eq!(self.rank, other.rank, "wedge rank mismatch");
        let mut out = self.clone();
        for ((i, j), c) in &other.coords {
            out.add_at(*i, *j, c);
        }
        out
    }

    pub fn sub(&self, other: &Wedge) -> Wedge {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Wedge {
        Wedge { rank: self.rank, coords: self.coords.iter().map(|(k, v)| (*k, -v)).collect() }
    }

    pub fn scale(&self, k: &BigInt) -> Wedge {
        if k.is_zero() {
            return Wedge::zero(self.rank);
        }
        Wedge { rank: self.rank, coords: self.coords.iter().map(|(key, v)| (*key, v * k)).collect() }
    }

    /// Halves every coordinate; `None` if some coordinate is odd.
    pub fn halve(&self) -> Option<Wedge> {
        let two = BigInt::from(2);
        let mut coords = BTreeMap::new();
        for (k, v) in &self.coords {
            let (q, r) = v.div_rem(&two);
            if !r.is_zero() {
                return None;
            }
            coords.insert(*k, q);
        }
        Some(Wedge { rank: self.rank, coords })
    }

    /// Euclidean norm squared on the orthonormal basis `e_i ∧ e_j`.
    pub fn norm_sq(&self) -> BigInt {
        self.coords.values().map(|v| v * v).sum()
    }

    pub fn max_abs(&self) -> BigInt {
        self.coords.values().map(|v| v.abs()).max().unwrap_or_default()
    }

    /// Dense coordinate vector in lexicographic pair order.
    pub fn to_dense(&self) -> Vec<BigInt> {
        let mut out = vec![BigInt::zero(); wedge_dim(self.rank)];
        for ((i, j), v) in &self.coords {
            out[pair_index(self.rank, *i, *j)] = v.clone();
        }
        out
    }

    pub fn from_dense(rank: usize, v: &[BigInt]) -> Wedge {
        assert_eq!(v.len(), wedge_dim(rank));
        let mut w = Wedge::zero(rank);
        let mut idx = 0;
        for i in 0..rank {
            for j in i + 1..rank {
                w.add_at(i, j, &v[idx]);
                idx += 1;
            }
        }
        w
    }

    /// Skew-symmetric matrix with `W_ij = coord(i, j)`.
    pub fn to_skew(&self) -> IntMatrix {
        let mut m = IntMatrix::zeros(self.rank, self.rank);
        for ((i, j), v) in &self.coords {
            m[(*i, *j)] = v.clone();
            m[(*j, *i)] = -v;
        }
        m
    }

    pub fn from_skew(m: &IntMatrix) -> Wedge {
        let mut w = Wedge::zero(m.rows());
        for i in 0..m.rows() {
            for j in i + 1..m.cols() {
                w.add_at(i, j, &m[(i, j)]);
            }
        }
        w
    }

    /// Pushes the wedge forward along a linear map given by the images of the
    /// basis vectors (`images[i]` is the image of `e_i` in `Z^target_rank`).
    pub fn push_forward(&self, images: &[Vec<BigInt>], target_rank: usize) -> Wedge {
        assert_eq!(images.len(), self.rank);
        let mut out = Wedge::zero(target_rank);
        for ((i, j), c) in &self.coords {
            out = out.add(&wedge_big(&images[*i], &images[*j]).scale(c));
        }
        out
    }
}

impl fmt::Debug for Wedge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coords.iter().map(|((i, j), v)| format!("{}·e{}∧e{}", v, i + 1, j + 1)).collect();
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

/// `u ∧ v = Σ_{i<j} (u_i v_j - u_j v_i) e_i ∧ e_j`.
pub fn wedge_big(u: &[BigInt], v: &[BigInt]) -> Wedge {
    assert_eq!(u.len(), v.len(), "wedge of vectors of different lengths");
    let k = u.len();
    let mut w = Wedge::zero(k);
    for i in 0..k {
        if u[i].is_zero() && v[i].is_zero() {
            continue;
        }
        for j in i + 1..k {
            let c = &u[i] * &v[j] - &u[j] * &v[i];
            w.add_at(i, j, &c);
        }
    }
    w
}

pub fn wedge(u: &AbVec, v: &AbVec) -> Result<Wedge, WedgeError> {
    if u.len() != v.len() {
        return Err(WedgeError::LengthMismatch(u.len(), v.len()));
    }
    Ok(wedge_big(&u.to_big(), &v.to_big()))
}

/// Rewrites `w` in a new basis. Row `i` of `p` gives the `i`-th new basis
/// vector in old coordinates; the skew matrix transforms as `P^{-T} W P^{-1}`.
pub fn wedge_change_basis(w: &Wedge, p: &IntMatrix) -> Result<Wedge, WedgeError> {
    if p.rows() != p.cols() || p.rows() != w.rank() {
        return Err(WedgeError::LengthMismatch(p.rows(), w.rank()));
    }
    let inv = p.rational_inverse().ok_or(WedgeError::Singular)?;
    let k = w.rank();
    let skew = w.to_skew();
    // result = inv^T * skew * inv
    let mut tmp = vec![vec![BigRational::zero(); k]; k];
    for a in 0..k {
        for j in 0..k {
            let mut acc = BigRational::zero();
            for b in 0..k {
                if !skew[(a, b)].is_zero() {
                    acc += BigRational::from_integer(skew[(a, b)].clone()) * &inv[b][j];
                }
            }
            tmp[a][j] = acc;
        }
    }
    let mut out = Wedge::zero(k);
    for i in 0..k {
        for j in i + 1..k {
            let mut acc = BigRational::zero();
            for a in 0..k {
                acc += &inv[a][i] * &tmp[a][j];
            }
            if !acc.is_integer() {
                return Err(WedgeError::NonIntegral);
            }
            out.add_at(i, j, &acc.to_integer());
        }
    }
    Ok(out)
}

/// Subgroup of `Λ²(Z^k)` given by generators, with canonical coset representatives.
#[derive(Clone, Debug)]
pub struct WedgeSubgroup {
    rank: usize,
    lattice: Lattice,
}

impl WedgeSubgroup {
    pub fn new(rank: usize, gens: &[Wedge]) -> Self {
        let dim = wedge_dim(rank);
        let rows: Vec<Vec<BigInt>> = gens
            .iter()
            .map(|g| {
                assert_eq!(g.rank(), rank, "generator in a different Λ² coordinate system");
                g.to_dense()
            })
            .collect();
        WedgeSubgroup { rank, lattice: Lattice::from_big_generators(dim, &rows) }
    }

    pub fn representative(&self, x: &Wedge) -> Wedge {
        assert_eq!(x.rank(), self.rank);
        Wedge::from_dense(self.rank, &self.lattice.reduce_big(&x.to_dense()))
    }

    pub fn contains(&self, x: &Wedge) -> bool {
        self.representative(x).is_zero()
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }
}

/// Canonical representative of `x` modulo the subgroup generated by `kgens`.
pub fn wedge_mod_subgroup(x: &Wedge, kgens: &[Wedge]) -> Wedge {
    WedgeSubgroup::new(x.rank(), kgens).representative(x)
}

/// Expresses `h ∈ Λ²(Z^n)` in the basis `{f_i ∧ f_j}` of `Λ²(L)` for the
/// sublattice spanned by the independent rows `basis`; `None` if `h ∉ Λ²(L)`.
pub fn wedge_in_sublattice(h: &Wedge, basis: &[Vec<BigInt>]) -> Option<Wedge> {
    let k = basis.len();
    let mut ech = SparseEchelon::new();
    for i in 0..k {
        for j in i + 1..k {
            ech.push(to_sparse(&wedge_big(&basis[i], &basis[j]).to_dense()));
        }
    }
    let sol = ech.solve(&to_sparse(&h.to_dense()))?;
    let mut dense = vec![BigInt::zero(); wedge_dim(k)];
    for (idx, v) in sol {
        dense[idx] = v;
    }
    Some(Wedge::from_dense(k, &dense))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zlattice::matrix::big;

    fn v(x: &[i64]) -> AbVec {
        AbVec(x.to_vec())
    }

    #[test]
    fn pair_index_enumerates_in_order() {
        let k = 5;
        let mut idx = 0;
        for i in 0..k {
            for j in i + 1..k {
                assert_eq!(pair_index(k, i, j), idx);
                idx += 1;
            }
        }
        assert_eq!(idx, wedge_dim(k));
    }

    #[test]
    fn basic_wedges() {
        let w = wedge(&v(&[1, 0]), &v(&[0, 1])).unwrap();
        assert_eq!(w.get(0, 1), big(1));
        assert!(wedge(&v(&[3, -2, 5]), &v(&[3, -2, 5])).unwrap().is_zero());
        let w = wedge(&v(&[1, 2, 0]), &v(&[0, 1, 1])).unwrap();
        assert_eq!(w.get(0, 1), big(1));
        assert_eq!(w.get(0, 2), big(1));
        assert_eq!(w.get(1, 2), big(2));
        assert!(wedge(&v(&[1]), &v(&[1, 2])).is_err());
    }

    #[test]
    fn change_basis_swap_and_identity() {
        let w = wedge(&v(&[1, 2, 0]), &v(&[0, 1, 1])).unwrap();
        assert_eq!(wedge_change_basis(&w, &IntMatrix::identity(3)).unwrap(), w);
        let swap = IntMatrix::from_i64_rows(3, &[vec![0, 1, 0], vec![1, 0, 0], vec![0, 0, 1]]);
        let s = wedge_change_basis(&w, &swap).unwrap();
        assert_eq!(s.get(0, 1), -w.get(0, 1));
    }

    #[test]
    fn change_basis_non_integral() {
        let w = Wedge::basis(2, 0, 1);
        let p = IntMatrix::from_i64_rows(2, &[vec![2, 0], vec![0, 1]]);
        assert_eq!(wedge_change_basis(&w, &p), Err(WedgeError::NonIntegral));
    }

    #[test]
    fn mod_subgroup_basics() {
        let x = Wedge::basis(3, 0, 2).scale(&big(5));
        assert_eq!(wedge_mod_subgroup(&x, &[]), x);
        let k = vec![Wedge::basis(3, 0, 2)];
        assert!(wedge_mod_subgroup(&x, &k).is_zero());
    }

    #[test]
    fn sublattice_coordinates() {
        let f = vec![vec![big(1), big(1), big(0)], vec![big(0), big(2), big(1)]];
        let h = wedge_big(&f[0], &f[1]).scale(&big(3));
        let c = wedge_in_sublattice(&h, &f).unwrap();
        assert_eq!(c.get(0, 1), big(3));
        assert!(wedge_in_sublattice(&Wedge::basis(3, 0, 1), &f).is_none());
    }
}

//! Hermite-reduced lattice bases.
//!
//! Gram-Schmidt orthogonalization runs from the last basis vector backwards:
//! `b_r* = b_r` and `b_i*` is the component of `b_i` orthogonal to
//! `b_{i+1}, ..., b_r`. A basis is reduced when
//!
//! * `‖b_i*‖² ≥ ¾ ‖b_{i+1}*‖²` for all `i`, and
//! * `|b_i · b_j*| ≤ ½ ‖b_j*‖²` for all `i < j`.
//!
//! The reduction is LLL with Lovász parameter 1 applied to the reversed list;
//! everything is exact.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;
use thiserror::Error;

use super::lattice::Lattice;
use super::vector::AbVec;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ReduceError {
    #[error("basis reduction exceeded {0} steps")]
    StepLimit(usize),
    #[error("reduced basis failed verification: {0}")]
    Verification(String),
}

#[derive(Clone, Debug, Serialize)]
pub struct ReducedBasis {
    /// Basis vectors `b_1, ..., b_r`.
    pub vectors: Vec<Vec<BigInt>>,
    /// Squared norms `‖b_i*‖²` of the backward Gram-Schmidt vectors.
    #[serde(skip)]
    pub gso_norms: Vec<BigRational>,
}

const STEP_LIMIT: usize = 200_000;

fn dot(a: &[BigInt], b: &[BigInt]) -> BigInt {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn rdot(a: &[BigInt], b: &[BigRational]) -> BigRational {
    a.iter().zip(b).fold(BigRational::zero(), |acc, (x, y)| acc + y * BigRational::from_integer(x.clone()))
}

fn rnorm(a: &[BigRational]) -> BigRational {
    a.iter().fold(BigRational::zero(), |acc, x| acc + x * x)
}

/// Forward Gram-Schmidt data of `c` (in the given order): starred vectors and
/// their squared norms.
fn gso(c: &[Vec<BigInt>]) -> (Vec<Vec<BigRational>>, Vec<BigRational>) {
    let mut stars: Vec<Vec<BigRational>> = Vec::with_capacity(c.len());
    let mut norms: Vec<BigRational> = Vec::with_capacity(c.len());
    for v in c {
        let mut s: Vec<BigRational> = v.iter().map(|x| BigRational::from_integer(x.clone())).collect();
        for (prev, n) in stars.iter().zip(&norms) {
            let mu = rdot(v, prev) / n;
            for (si, pi) in s.iter_mut().zip(prev) {
                *si -= &mu * pi;
            }
        }
        norms.push(rnorm(&s));
        stars.push(s);
    }
    (stars, norms)
}

fn round_half_up(x: &BigRational) -> BigInt {
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    (x + half).floor().to_integer()
}

/// Runs LLL (Lovász parameter 1) on `c` in place; `c` must be independent.
fn lll_exact(c: &mut [Vec<BigInt>]) -> Result<(), ReduceError> {
    let r = c.len();
    if r <= 1 {
        return Ok(());
    }
    let (mut stars, mut norms) = gso(c);
    let mut k = 1;
    let mut steps = 0usize;
    while k < r {
        steps += 1;
        if steps > STEP_LIMIT {
            return Err(ReduceError::StepLimit(STEP_LIMIT));
        }
        // size-reduce c_k against c_{k-1}, ..., c_0
        for j in (0..k).rev() {
            let mu = rdot(&c[k], &stars[j]) / &norms[j];
            let q = round_half_up(&mu);
            if !q.is_zero() {
                let src = c[j].clone();
                for (a, b) in c[k].iter_mut().zip(&src) {
                    *a -= &q * b;
                }
            }
        }
        let mu = rdot(&c[k], &stars[k - 1]) / &norms[k - 1];
        let lhs = &norms[k];
        let rhs = (BigRational::one() - &mu * &mu) * &norms[k - 1];
        if *lhs < rhs {
            c.swap(k, k - 1);
            let g = gso(c);
            stars = g.0;
            norms = g.1;
            k = k.max(2) - 1;
        } else {
            k += 1;
        }
    }
    Ok(())
}

impl ReducedBasis {
    pub fn rank(&self) -> usize {
        self.vectors.len()
    }

    pub fn vectors_ab(&self) -> Vec<AbVec> {
        self.vectors.iter().map(|v| AbVec::from_big(v).expect("reduced vector overflows i64")).collect()
    }

    /// Backward Gram-Schmidt vectors `b_1*, ..., b_r*` and their squared norms.
    pub fn backward_gso(vectors: &[Vec<BigInt>]) -> (Vec<Vec<BigRational>>, Vec<BigRational>) {
        let rev: Vec<Vec<BigInt>> = vectors.iter().rev().cloned().collect();
        let (mut stars, mut norms) = gso(&rev);
        stars.reverse();
        norms.reverse();
        (stars, norms)
    }

    /// Checks `‖b_i*‖² ≥ ¾ ‖b_{i+1}*‖²`.
    pub fn check_norm_ratios(vectors: &[Vec<BigInt>]) -> Result<(), String> {
        let (_, norms) = Self::backward_gso(vectors);
        let three_q = BigRational::new(BigInt::from(3), BigInt::from(4));
        for i in 0..norms.len().saturating_sub(1) {
            if norms[i] < &three_q * &norms[i + 1] {
                return Err(format!("norm ratio fails at position {}", i + 1));
            }
        }
        Ok(())
    }

    /// Checks `|b_i · b_j*| ≤ ½ ‖b_j*‖²` for `i < j`.
    pub fn check_size_reduced(vectors: &[Vec<BigInt>]) -> Result<(), String> {
        let (stars, norms) = Self::backward_gso(vectors);
        let half = BigRational::new(BigInt::one(), BigInt::from(2));
        for i in 0..vectors.len() {
            for j in i + 1..vectors.len() {
                if rdot(&vectors[i], &stars[j]).abs() > &half * &norms[j] {
                    return Err(format!("size condition fails for ({}, {})", i + 1, j + 1));
                }
            }
        }
        Ok(())
    }

    /// Checks `‖b_i‖² < 4^r (4/3)^{r(r-1)/2} Vol²` for every vector.
    pub fn check_length_bound(vectors: &[Vec<BigInt>]) -> Result<(), String> {
        let r = vectors.len();
        if r == 0 {
            return Ok(());
        }
        let vol_sq = gram_det(vectors);
        let e = r * (r - 1) / 2;
        let rhs = num_traits::pow(BigInt::from(4), r + e) * vol_sq;
        let three_e = num_traits::pow(BigInt::from(3), e);
        for (i, v) in vectors.iter().enumerate() {
            if dot(v, v) * &three_e >= rhs {
                return Err(format!("length bound fails for vector {}", i + 1));
            }
        }
        Ok(())
    }

    pub fn verify(&self) -> Result<(), ReduceError> {
        Self::check_norm_ratios(&self.vectors)
            .and_then(|_| Self::check_size_reduced(&self.vectors))
            .and_then(|_| Self::check_length_bound(&self.vectors))
            .map_err(ReduceError::Verification)
    }
}

/// Gram determinant `det(B B^T)`, the squared covolume.
pub fn gram_det(vectors: &[Vec<BigInt>]) -> BigInt {
    let (_, norms) = gso(vectors);
    let prod = norms.iter().fold(BigRational::one(), |acc, n| acc * n);
    debug_assert!(prod.is_integer());
    prod.to_integer()
}

/// Computes a reduced basis of the lattice generated by `gens`.
pub fn reduce_basis(gens: &[AbVec]) -> Result<ReducedBasis, ReduceError> {
    let n = gens.first().map_or(0, |g| g.len());
    let lat = Lattice::from_generators(n, gens);
    reduce_lattice(&lat)
}

pub fn reduce_lattice(lat: &Lattice) -> Result<ReducedBasis, ReduceError> {
    let mut c: Vec<Vec<BigInt>> = lat.hnf_basis().to_rows();
    c.reverse();
    lll_exact(&mut c)?;
    c.reverse();
    let (_, gso_norms) = ReducedBasis::backward_gso(&c);
    let rb = ReducedBasis { vectors: c, gso_norms };
    rb.verify()?;
    let same = Lattice::from_big_generators(lat.ambient_rank(), &rb.vectors);
    if same != *lat {
        return Err(ReduceError::Verification("reduced basis spans a different lattice".into()));
    }
    Ok(rb)
}

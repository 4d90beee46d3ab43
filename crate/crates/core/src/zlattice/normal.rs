//! Hermite and Smith normal forms with unimodular transforms.
//!
//! Every transform is a product of elementary operations and 2x2 blocks of
//! determinant 1 (or sign flips), so it stays unimodular by construction.

use log::debug;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::matrix::{ext_gcd, floor_div, IntMatrix};

/// Row-style Hermite normal form `H = U * M`.
#[derive(Clone, Debug)]
pub struct HnfDecomposition {
    pub h: IntMatrix,
    pub u: IntMatrix,
    /// Pivot column of each nonzero row of `h`, strictly increasing.
    pub pivots: Vec<usize>,
}

impl HnfDecomposition {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }
}

/// Computes the row Hermite normal form of `m` together with a unimodular `u`
/// such that `h = u * m`. Pivots are positive and entries above each pivot lie
/// in `[0, pivot)`. Zero rows are collected at the bottom.
pub fn hnf_with_transform(m: &IntMatrix) -> HnfDecomposition {
    let rows = m.rows();
    let cols = m.cols();
    let mut h = m.clone();
    let mut u = IntMatrix::identity(rows);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        // Bring the row with the smallest nonzero entry to position r first;
        // this keeps intermediate entries small.
        let best = (r..rows).filter(|&i| !h[(i, c)].is_zero()).min_by(|&a, &b| h[(a, c)].abs().cmp(&h[(b, c)].abs()));
        let Some(best) = best else { continue };
        h.swap_rows(r, best);
        u.swap_rows(r, best);
        for k in r + 1..rows {
            if h[(k, c)].is_zero() {
                continue;
            }
            let a = h[(r, c)].clone();
            let b = h[(k, c)].clone();
            if (&b % &a).is_zero() {
                let q = -(&b / &a);
                h.add_row_multiple(k, r, &q);
                u.add_row_multiple(k, r, &q);
                continue;
            }
            let (g, s, t) = ext_gcd(&a, &b);
            let p = -(&b / &g);
            let q = &a / &g;
            h.combine_rows(r, k, &s, &t, &p, &q);
            u.combine_rows(r, k, &s, &t, &p, &q);
        }
        if h[(r, c)].is_negative() {
            h.negate_row(r);
            u.negate_row(r);
        }
        let piv = h[(r, c)].clone();
        for i in 0..r {
            let q = floor_div(&h[(i, c)], &piv);
            if !q.is_zero() {
                let nq = -q;
                h.add_row_multiple(i, r, &nq);
                u.add_row_multiple(i, r, &nq);
            }
        }
        pivots.push(c);
        r += 1;
    }
    HnfDecomposition { h, u, pivots }
}

/// Smith normal form `S = U * M * V` with the diagonal divisibility chain.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SnfDecomposition {
    pub s: IntMatrix,
    pub u: IntMatrix,
    pub v: IntMatrix,
    /// Number of nonzero diagonal entries.
    pub rank: usize,
}

impl SnfDecomposition {
    /// Diagonal entries `d_1 | d_2 | ... ` (length `min(rows, cols)`, trailing zeros included).
    pub fn diagonal(&self) -> Vec<BigInt> {
        (0..self.s.rows().min(self.s.cols())).map(|i| self.s[(i, i)].clone()).collect()
    }

    /// Nonzero diagonal entries different from 1.
    pub fn invariant_factors(&self) -> Vec<BigInt> {
        self.diagonal().into_iter().filter(|d| !d.is_zero() && !d.is_one()).collect()
    }
}

/// Entry bound `r^(4r+5) * |M|^(4r+1)` for SNF transforms, with `r = max(rows, cols)`.
pub fn snf_transform_bound(m: &IntMatrix) -> BigInt {
    let r = m.rows().max(m.cols()) as u32;
    let norm = m.max_abs().max(BigInt::one());
    num_traits::pow(BigInt::from(r.max(1)), (4 * r + 5) as usize) * num_traits::pow(norm, (4 * r + 1) as usize)
}

/// Nearest-integer quotient `a / b`.
fn round_div(a: &BigInt, b: &BigInt) -> BigInt {
    let (a, b) = if b.is_negative() { (-a, -b) } else { (a.clone(), b.clone()) };
    floor_div(&(a * 2 + &b), &(b * 2))
}

pub fn snf_with_transform(m: &IntMatrix) -> SnfDecomposition {
    let rows = m.rows();
    let cols = m.cols();
    let mut s = m.clone();
    let mut u = IntMatrix::identity(rows);
    let mut v = IntMatrix::identity(cols);
    let mut rank = 0;
    for t in 0..rows.min(cols) {
        loop {
            // smallest nonzero entry of the remaining block becomes the pivot
            let mut best: Option<(usize, usize)> = None;
            for i in t..rows {
                for j in t..cols {
                    if !s[(i, j)].is_zero() && best.map_or(true, |(bi, bj)| s[(i, j)].abs() < s[(bi, bj)].abs()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((bi, bj)) = best else { break };
            s.swap_rows(t, bi);
            u.swap_rows(t, bi);
            s.swap_cols(t, bj);
            v.swap_cols(t, bj);
            // division with remainder along the pivot row and column; any
            // nonzero remainder is smaller than the pivot and is picked next
            let piv = s[(t, t)].clone();
            let mut clean = true;
            for k in t + 1..rows {
                let q = round_div(&s[(k, t)], &piv);
                if !q.is_zero() {
                    let nq = -q;
                    s.add_row_multiple(k, t, &nq);
                    u.add_row_multiple(k, t, &nq);
                }
                clean &= s[(k, t)].is_zero();
            }
            for k in t + 1..cols {
                let q = round_div(&s[(t, k)], &piv);
                if !q.is_zero() {
                    let nq = -q;
                    s.add_col_multiple(k, t, &nq);
                    v.add_col_multiple(k, t, &nq);
                }
                clean &= s[(t, k)].is_zero();
            }
            if !clean {
                continue;
            }
            // divisibility: pull in a row whose entries the pivot does not divide
            let bad = (t + 1..rows).find(|&i| (t + 1..cols).any(|j| !s[(i, j)].is_multiple_of(&piv)));
            match bad {
                Some(i) => {
                    let one = BigInt::one();
                    s.add_row_multiple(t, i, &one);
                    u.add_row_multiple(t, i, &one);
                }
                None => break,
            }
        }
        if s[(t, t)].is_zero() {
            break;
        }
        if s[(t, t)].is_negative() {
            s.negate_row(t);
            u.negate_row(t);
        }
        rank += 1;
    }
    let dec = SnfDecomposition { s, u, v, rank };
    let bound = snf_transform_bound(m);
    let worst = dec.u.max_abs().max(dec.v.max_abs());
    if worst > bound {
        debug!("SNF transform entry {} exceeds reference bound {}", worst, bound);
    }
    dec
}

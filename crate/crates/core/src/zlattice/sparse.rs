//! Sparse integer echelon form for solving `sum_k x_k * row_k = target` over Z.
//!
//! Rows are inserted one at a time. Each stored row keeps the combination of
//! input rows that produced it, so a solution can be read off after reducing
//! the target against the pivots.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use super::matrix::ext_gcd;

pub type SparseVec = BTreeMap<usize, BigInt>;

#[derive(Clone, Debug)]
struct EchelonRow {
    vec: SparseVec,
    combo: SparseVec,
}

fn axpy(dst: &mut SparseVec, a: &BigInt, src: &SparseVec) {
    if a.is_zero() {
        return;
    }
    for (k, v) in src {
        let e = dst.entry(*k).or_insert_with(BigInt::zero);
        *e += a * v;
        if e.is_zero() {
            dst.remove(k);
        }
    }
}

fn lin2(a: &BigInt, x: &SparseVec, b: &BigInt, y: &SparseVec) -> SparseVec {
    let mut out = SparseVec::new();
    axpy(&mut out, a, x);
    axpy(&mut out, b, y);
    out
}

/// Integer row echelon form over sparse rows.
#[derive(Clone, Debug, Default)]
pub struct SparseEchelon {
    pivots: BTreeMap<usize, EchelonRow>,
    inserted: usize,
}

impl SparseEchelon {
    pub fn new() -> Self {
        Self::default()
    }

    /// Number of rows inserted so far; the next row gets this index.
    pub fn len(&self) -> usize {
        self.inserted
    }

    pub fn is_empty(&self) -> bool {
        self.inserted == 0
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// Inserts a row and returns its index in solution vectors.
    pub fn push(&mut self, row: SparseVec) -> usize {
        let idx = self.inserted;
        self.inserted += 1;
        let mut combo = SparseVec::new();
        combo.insert(idx, BigInt::from(1));
        let mut cur = EchelonRow { vec: row, combo };
        cur.vec.retain(|_, v| !v.is_zero());
        while let Some((&lead, _)) = cur.vec.iter().next() {
            match self.pivots.remove(&lead) {
                None => {
                    if cur.vec[&lead].is_negative() {
                        negate(&mut cur.vec);
                        negate(&mut cur.combo);
                    }
                    self.pivots.insert(lead, cur);
                    return idx;
                }
                Some(piv) => {
                    let a = piv.vec[&lead].clone();
                    let b = cur.vec[&lead].clone();
                    if b.is_multiple_of(&a) {
                        let q = -(&b / &a);
                        axpy(&mut cur.vec, &q, &piv.vec);
                        axpy(&mut cur.combo, &q, &piv.combo);
                        self.pivots.insert(lead, piv);
                        continue;
                    }
                    let (g, s, t) = ext_gcd(&a, &b);
                    let p = -(&b / &g);
                    let q = &a / &g;
                    let new_piv = EchelonRow {
                        vec: lin2(&s, &piv.vec, &t, &cur.vec),
                        combo: lin2(&s, &piv.combo, &t, &cur.combo),
                    };
                    cur = EchelonRow {
                        vec: lin2(&p, &piv.vec, &q, &cur.vec),
                        combo: lin2(&p, &piv.combo, &q, &cur.combo),
                    };
                    let mut np = new_piv;
                    if np.vec[&lead].is_negative() {
                        negate(&mut np.vec);
                        negate(&mut np.combo);
                    }
                    self.pivots.insert(lead, np);
                }
            }
        }
        idx
    }

    /// Reduces `target` against the pivots; returns the canonical remainder
    /// and the combination subtracted.
    fn reduce(&self, target: &SparseVec) -> (SparseVec, SparseVec) {
        let mut t: SparseVec = target.iter().filter(|(_, v)| !v.is_zero()).map(|(k, v)| (*k, v.clone())).collect();
        let mut combo = SparseVec::new();
        let mut done = SparseVec::new();
        while let Some((&lead, val)) = t.iter().next() {
            let val = val.clone();
            match self.pivots.get(&lead) {
                Some(piv) => {
                    let a = &piv.vec[&lead];
                    let q = val.div_floor(a);
                    if !q.is_zero() {
                        let nq = -&q;
                        axpy(&mut t, &nq, &piv.vec);
                        axpy(&mut combo, &q, &piv.combo);
                    }
                    if let Some(rem) = t.remove(&lead) {
                        done.insert(lead, rem);
                    }
                }
                None => {
                    t.remove(&lead);
                    done.insert(lead, val);
                }
            }
        }
        (done, combo)
    }

    /// Finds integer `x` with `sum_k x_k * row_k = target`, if one exists.
    pub fn solve(&self, target: &SparseVec) -> Option<SparseVec> {
        let (rem, combo) = self.reduce(target);
        if rem.is_empty() {
            Some(combo)
        } else {
            None
        }
    }

    pub fn contains(&self, target: &SparseVec) -> bool {
        self.reduce(target).0.is_empty()
    }
}

fn negate(v: &mut SparseVec) {
    for x in v.values_mut() {
        *x = -std::mem::take(x);
    }
}

pub fn to_sparse(v: &[BigInt]) -> SparseVec {
    v.iter().enumerate().filter(|(_, x)| !x.is_zero()).map(|(i, x)| (i, x.clone())).collect()
}

/// Solves `x * M = target` for integer row vector `x`, where `rows` are the rows of `M`.
pub fn solve_left(rows: &[Vec<BigInt>], target: &[BigInt]) -> Option<Vec<BigInt>> {
    let mut ech = SparseEchelon::new();
    for r in rows {
        ech.push(to_sparse(r));
    }
    let sol = ech.solve(&to_sparse(target))?;
    let mut out = vec![BigInt::zero(); rows.len()];
    for (k, v) in sol {
        out[k] = v;
    }
    Some(out)
}

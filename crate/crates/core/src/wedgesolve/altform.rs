//! Normal form of integer alternating forms under congruence `Pᵀ A P`.
//!
//! Every alternating form on `Z^q` has a basis `f_1, …, f_q` in which it is
//! `Σ_i a_i f_{2i-1} ∧ f_{2i}` with `a_1 | a_2 | ⋯` positive.

/// Result of [`alternating_normal_form`]: `pᵀ · a · p = diag(a_i J) ⊕ 0`.
#[derive(Clone, Debug)]
pub struct AltNormalForm {
    /// Columns are the new basis vectors in old coordinates.
    pub p: Vec<Vec<i128>>,
    /// Rows of `p⁻¹`: vectors `g_j` with `Σ_{i<j} a_ij e_i ∧ e_j = Σ_i a_i g_{2i-1} ∧ g_{2i}`
    /// when the form is read as an element of `Λ²(Z^q)`.
    pub dual: Vec<Vec<i128>>,
    /// Block invariants `a_1 | a_2 | ⋯`, all positive.
    pub blocks: Vec<i128>,
}

struct Work {
    a: Vec<Vec<i128>>,
    p: Vec<Vec<i128>>,
    pinv: Vec<Vec<i128>>,
}

impl Work {
    fn q(&self) -> usize {
        self.a.len()
    }

    /// `f_i ↔ f_j`.
    fn swap(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        self.a.swap(i, j);
        for row in &mut self.a {
            row.swap(i, j);
        }
        for row in &mut self.p {
            row.swap(i, j);
        }
        self.pinv.swap(i, j);
    }

    /// `f_j ← f_j + t f_i`.
    fn add(&mut self, j: usize, i: usize, t: i128) {
        if t == 0 {
            return;
        }
        let q = self.q();
        for k in 0..q {
            let v = self.a[k][i];
            self.a[k][j] += t * v;
        }
        for k in 0..q {
            let v = self.a[i][k];
            self.a[j][k] += t * v;
        }
        for row in &mut self.p {
            let v = row[i];
            row[j] += t * v;
        }
        let rj = self.pinv[j].clone();
        for (x, y) in self.pinv[i].iter_mut().zip(rj) {
            *x -= t * y;
        }
    }
}

pub fn alternating_normal_form(a: &[Vec<i128>]) -> AltNormalForm {
    let q = a.len();
    let mut p = vec![vec![0i128; q]; q];
    for (i, row) in p.iter_mut().enumerate() {
        row[i] = 1;
    }
    let pinv = p.clone();
    let mut w = Work { a: a.to_vec(), p, pinv };
    let mut blocks = Vec::new();
    let mut b = 0;
    while b + 1 < q {
        // smallest nonzero entry of the trailing block
        let mut best: Option<(usize, usize)> = None;
        for i in b..q {
            for j in b..q {
                if w.a[i][j] != 0 && best.map_or(true, |(x, y)| w.a[i][j].abs() < w.a[x][y].abs()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((i, j)) = best else { break };
        w.swap(b, i);
        let j = if j == b { i } else { j };
        w.swap(b + 1, j);
        if w.a[b][b + 1] < 0 {
            w.swap(b, b + 1);
        }
        let piv = w.a[b][b + 1];
        let mut dirty = false;
        for k in b + 2..q {
            // f_k ← f_k - t f_{b+1} changes a[b][k] by -t·piv
            let t = w.a[b][k].div_euclid(piv);
            w.add(k, b + 1, -t);
            // f_k ← f_k + s f_b changes a[b+1][k] by s·a[b+1][b] = -s·piv
            let s = w.a[b + 1][k].div_euclid(piv);
            w.add(k, b, s);
            if w.a[b][k] != 0 || w.a[b + 1][k] != 0 {
                dirty = true;
            }
        }
        if dirty {
            continue;
        }
        // enforce divisibility with the rest
        let mut bad = None;
        'outer: for i in b + 2..q {
            for j in b + 2..q {
                if w.a[i][j] % piv != 0 {
                    bad = Some(i);
                    break 'outer;
                }
            }
        }
        if let Some(i) = bad {
            // f_b ← f_b + f_i brings a non-multiple into row b
            w.add(b, i, 1);
            continue;
        }
        blocks.push(piv);
        b += 2;
    }
    AltNormalForm { p: w.p, dual: w.pinv, blocks }
}

/// `pᵀ a p`.
pub fn congruence(a: &[Vec<i128>], p: &[Vec<i128>]) -> Vec<Vec<i128>> {
    let q = a.len();
    let mut ap = vec![vec![0i128; q]; q];
    for i in 0..q {
        for j in 0..q {
            ap[i][j] = (0..q).map(|k| a[i][k] * p[k][j]).sum();
        }
    }
    let mut out = vec![vec![0i128; q]; q];
    for i in 0..q {
        for j in 0..q {
            out[i][j] = (0..q).map(|k| p[k][i] * ap[k][j]).sum();
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn skew(q: usize, upper: &[i128]) -> Vec<Vec<i128>> {
        let mut a = vec![vec![0i128; q]; q];
        let mut it = upper.iter();
        for i in 0..q {
            for j in i + 1..q {
                let v = *it.next().unwrap();
                a[i][j] = v;
                a[j][i] = -v;
            }
        }
        a
    }

    fn det(m: &[Vec<i128>]) -> i128 {
        let rows: Vec<Vec<i64>> = m.iter().map(|r| r.iter().map(|&x| x as i64).collect()).collect();
        crate::zlattice::IntMatrix::from_i64_rows(m.len(), &rows).determinant().try_into().unwrap()
    }

    proptest! {
        #[test]
        fn normal_form_is_congruent(q in 2usize..=5, vals in proptest::collection::vec(-6i128..=6, 10)) {
            let a = skew(q, &vals[..q * (q - 1) / 2]);
            let nf = alternating_normal_form(&a);
            prop_assert_eq!(det(&nf.p).abs(), 1);
            for i in 0..q {
                for j in 0..q {
                    let x: i128 = (0..q).map(|k| nf.p[i][k] * nf.dual[k][j]).sum();
                    prop_assert_eq!(x, i128::from(i == j));
                }
            }
            let c = congruence(&a, &nf.p);
            for i in 0..q {
                for j in 0..q {
                    let blk = i / 2;
                    let expect = if i % 2 == 0 && j == i + 1 && blk < nf.blocks.len() {
                        nf.blocks[blk]
                    } else if i % 2 == 1 && j + 1 == i && blk < nf.blocks.len() {
                        -nf.blocks[blk]
                    } else {
                        0
                    };
                    prop_assert_eq!(c[i][j], expect);
                }
            }
            for w in nf.blocks.windows(2) {
                prop_assert_eq!(w[1] % w[0], 0);
            }
            prop_assert!(nf.blocks.iter().all(|&x| x > 0));
        }
    }
}

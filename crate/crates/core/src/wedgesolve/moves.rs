//! Elementary moves on tuples `(u_1, v_1, …, u_g, v_g)` that preserve both
//! `Σ u_i ∧ v_i` and the subgroup generated by the tuple.

use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymplecticTuple {
    pub us: Vec<Vec<i64>>,
    pub vs: Vec<Vec<i64>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SymplecticMove {
    /// Swap pairs `i` and `j`.
    SwapPairs { i: usize, j: usize },
    /// `u_i += t v_i`.
    ShearU { i: usize, t: i64 },
    /// `v_i += t u_i`.
    ShearV { i: usize, t: i64 },
    /// `u_i += t u_j`, `v_j -= t v_i`.
    Transvect { i: usize, j: usize, t: i64 },
    /// `u_i += t v_j`, `u_j += t v_i`.
    Cross { i: usize, j: usize, t: i64 },
}

fn axpy(dst: &mut [i64], src: &[i64], t: i64) {
    for (d, s) in dst.iter_mut().zip(src) {
        *d += t * s;
    }
}

impl SymplecticTuple {
    pub fn new(us: Vec<Vec<i64>>, vs: Vec<Vec<i64>>) -> Self {
        assert_eq!(us.len(), vs.len());
        SymplecticTuple { us, vs }
    }

    pub fn genus(&self) -> usize {
        self.us.len()
    }

    /// Dense `Σ u_i ∧ v_i` as a skew-symmetric matrix (upper triangle used).
    pub fn wedge_sum(&self, q: usize) -> Vec<Vec<i128>> {
        let mut out = vec![vec![0i128; q]; q];
        for (u, v) in self.us.iter().zip(&self.vs) {
            for a in 0..q {
                for b in a + 1..q {
                    out[a][b] += i128::from(u[a]) * i128::from(v[b]) - i128::from(u[b]) * i128::from(v[a]);
                }
            }
        }
        out
    }

    /// Like [`SymplecticTuple::apply`], but leaves `self` untouched and returns
    /// `false` if an entry would overflow.
    pub fn checked_apply(&mut self, mv: SymplecticMove) -> bool {
        let big = |v: &Vec<i64>| v.iter().map(|&x| i128::from(x)).collect::<Vec<i128>>();
        let mut us: Vec<Vec<i128>> = self.us.iter().map(big).collect();
        let mut vs: Vec<Vec<i128>> = self.vs.iter().map(big).collect();
        fn ax(d: &mut [i128], s: &[i128], t: i128) {
            for (a, b) in d.iter_mut().zip(s) {
                *a += t * b;
            }
        }
        match mv {
            SymplecticMove::SwapPairs { i, j } => {
                us.swap(i, j);
                vs.swap(i, j);
            }
            SymplecticMove::ShearU { i, t } => {
                let v = vs[i].clone();
                ax(&mut us[i], &v, t.into());
            }
            SymplecticMove::ShearV { i, t } => {
                let u = us[i].clone();
                ax(&mut vs[i], &u, t.into());
            }
            SymplecticMove::Transvect { i, j, t } => {
                let (uj, vi) = (us[j].clone(), vs[i].clone());
                ax(&mut us[i], &uj, t.into());
                ax(&mut vs[j], &vi, -i128::from(t));
            }
            SymplecticMove::Cross { i, j, t } => {
                let (vj, vi) = (vs[j].clone(), vs[i].clone());
                ax(&mut us[i], &vj, t.into());
                ax(&mut us[j], &vi, t.into());
            }
        }
        let small = |m: &Vec<Vec<i128>>| -> Option<Vec<Vec<i64>>> {
            m.iter().map(|r| r.iter().map(|&x| i64::try_from(x).ok()).collect()).collect()
        };
        match (small(&us), small(&vs)) {
            (Some(u), Some(v)) => {
                self.us = u;
                self.vs = v;
                true
            }
            _ => false,
        }
    }

    pub fn apply(&mut self, mv: SymplecticMove) {
        match mv {
            SymplecticMove::SwapPairs { i, j } => {
                self.us.swap(i, j);
                self.vs.swap(i, j);
            }
            SymplecticMove::ShearU { i, t } => {
                let v = self.vs[i].clone();
                axpy(&mut self.us[i], &v, t);
            }
            SymplecticMove::ShearV { i, t } => {
                let u = self.us[i].clone();
                axpy(&mut self.vs[i], &u, t);
            }
            SymplecticMove::Transvect { i, j, t } => {
                assert_ne!(i, j);
                let uj = self.us[j].clone();
                let vi = self.vs[i].clone();
                axpy(&mut self.us[i], &uj, t);
                axpy(&mut self.vs[j], &vi, -t);
            }
            SymplecticMove::Cross { i, j, t } => {
                assert_ne!(i, j);
                let vj = self.vs[j].clone();
                let vi = self.vs[i].clone();
                axpy(&mut self.us[i], &vj, t);
                axpy(&mut self.us[j], &vi, t);
            }
        }
    }
}

/// Integer combination of `rows` equal to `target`, kept small by reducing
/// against the relations among the rows.
fn small_combination(rows: &[Vec<num_bigint::BigInt>], target: &[num_bigint::BigInt]) -> Option<Vec<i64>> {
    use num_bigint::BigInt;
    use num_integer::Integer;
    use num_traits::{ToPrimitive, Zero};
    let q = target.len();
    let lat = crate::zlattice::Lattice::from_big_generators(q, rows);
    let coords = lat.coordinates_big(target)?;
    let u = lat.transform();
    let k = rows.len();
    let mut x = vec![BigInt::zero(); k];
    for (c, row) in coords.iter().zip(0..lat.rank()) {
        for (xi, uij) in x.iter_mut().zip(u.row(row)) {
            *xi += c * uij;
        }
    }
    let kernel: Vec<Vec<BigInt>> = (lat.rank()..k).map(|r| u.row_vec(r)).collect();
    for _ in 0..4 {
        for kv in &kernel {
            let nn: BigInt = kv.iter().map(|a| a * a).sum();
            if nn.is_zero() {
                continue;
            }
            let dot: BigInt = kv.iter().zip(&x).map(|(a, b)| a * b).sum();
            // nearest integer to dot / nn
            let num: BigInt = 2 * &dot + &nn;
            let r = num.div_floor(&(2 * &nn));
            if !r.is_zero() {
                for (xi, a) in x.iter_mut().zip(kv) {
                    *xi -= &r * a;
                }
            }
        }
    }
    x.iter().map(ToPrimitive::to_i64).collect()
}

/// Replays `moves` on a copy of `t`.
pub fn apply_moves(t: &SymplecticTuple, moves: &[SymplecticMove]) -> SymplecticTuple {
    let mut out = t.clone();
    for m in moves {
        out.apply(*m);
    }
    out
}

/// Makes coordinate `0` of `u_1` equal to the (nonnegative) gcd of all
/// coordinate-0 entries, with every other `u_i[0]` and `v_i[0]` zero. If the
/// tuple generates `Z^q`, continues until `u_1 = e_1`, so that the remaining
/// entries generate `⟨e_2, …, e_q⟩`. Returns the moves used.
pub fn normalize_first_pair(t: &mut SymplecticTuple) -> Vec<SymplecticMove> {
    let mut log = Vec::new();
    fn step(t: &mut SymplecticTuple, m: SymplecticMove, log: &mut Vec<SymplecticMove>) {
        t.apply(m);
        log.push(m);
    }
    let g = t.genus();
    if g == 0 || t.us[0].is_empty() {
        return log;
    }
    // within each pair, collect the gcd in u_i[0]
    for i in 0..g {
        loop {
            let (a, b) = (t.us[i][0], t.vs[i][0]);
            if b == 0 {
                break;
            }
            if a == 0 {
                step(t, SymplecticMove::ShearU { i, t: 1 }, &mut log);
                step(t, SymplecticMove::ShearV { i, t: -1 }, &mut log);
                continue;
            }
            if a.abs() >= b.abs() {
                step(t, SymplecticMove::ShearU { i, t: -(a / b) }, &mut log);
            } else {
                step(t, SymplecticMove::ShearV { i, t: -(b / a) }, &mut log);
            }
        }
    }
    // across pairs: v_i[0] = 0 for all i, so the transvection only touches u[0]
    for j in 1..g {
        loop {
            let (a, b) = (t.us[0][0], t.us[j][0]);
            if b == 0 {
                break;
            }
            if a.abs() < b.abs() {
                step(t, SymplecticMove::SwapPairs { i: 0, j }, &mut log);
                continue;
            }
            step(t, SymplecticMove::Transvect { i: 0, j, t: -(a / b) }, &mut log);
        }
    }
    if t.us[0][0] < 0 {
        // (u, v) ↦ (-u, -v) as a product of shears
        for m in [
            SymplecticMove::ShearU { i: 0, t: 1 },
            SymplecticMove::ShearV { i: 0, t: -1 },
            SymplecticMove::ShearU { i: 0, t: 1 },
            SymplecticMove::ShearU { i: 0, t: 1 },
            SymplecticMove::ShearV { i: 0, t: -1 },
            SymplecticMove::ShearU { i: 0, t: 1 },
        ] {
            step(t, m, &mut log);
        }
    }
    if t.us[0][0] == 1 {
        clear_first_vector(t, &mut log, step);
    }
    log
}

/// With `u_1 = e_1 + x` and every other entry in `{0} × Z^{q-1}`, writes
/// `x = α v_1 + Σ β_j u_j + Σ γ_j v_j` and removes it by a cross move for
/// each `v_j`, a transvection for each `u_j` and a final shear.
fn clear_first_vector(
    t: &mut SymplecticTuple,
    log: &mut Vec<SymplecticMove>,
    step: impl Fn(&mut SymplecticTuple, SymplecticMove, &mut Vec<SymplecticMove>),
) {
    use num_bigint::BigInt;
    let g = t.genus();
    let mut rest: Vec<Vec<BigInt>> = vec![t.vs[0].iter().map(|&x| BigInt::from(x)).collect()];
    for j in 1..g {
        rest.push(t.us[j].iter().map(|&x| BigInt::from(x)).collect());
        rest.push(t.vs[j].iter().map(|&x| BigInt::from(x)).collect());
    }
    let mut target: Vec<BigInt> = t.us[0].iter().map(|&x| BigInt::from(x)).collect();
    target[0] = BigInt::from(0);
    let Some(coef) = small_combination(&rest, &target) else {
        return;
    };
    let alpha = coef[0];
    let mut extra = 0i64;
    let mut moves = Vec::new();
    for j in 1..g {
        let (beta, gamma) = (coef[2 * j - 1], coef[2 * j]);
        moves.push(SymplecticMove::Cross { i: 0, j, t: -gamma });
        moves.push(SymplecticMove::Transvect { i: 0, j, t: -beta });
        extra = match beta.checked_mul(gamma).and_then(|x| x.checked_add(extra)) {
            Some(x) => x,
            None => return,
        };
    }
    let Some(last) = alpha.checked_add(extra) else { return };
    moves.push(SymplecticMove::ShearU { i: 0, t: -last });
    let mut trial = t.clone();
    for m in &moves {
        if !trial.checked_apply(*m) {
            return;
        }
    }
    for m in moves {
        step(t, m, log);
    }
    debug_assert!(t.us[0].iter().enumerate().all(|(k, &x)| x == i64::from(k == 0)));
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zlattice::{AbVec, Lattice};
    use proptest::prelude::*;

    fn span(t: &SymplecticTuple, q: usize) -> Lattice {
        let gens: Vec<AbVec> = t.us.iter().chain(&t.vs).map(|x| AbVec(x.clone())).collect();
        Lattice::from_generators(q, &gens)
    }

    fn tuple_strategy(g: usize, q: usize) -> impl Strategy<Value = SymplecticTuple> {
        proptest::collection::vec(proptest::collection::vec(-6i64..=6, q), 2 * g).prop_map(move |rows| {
            SymplecticTuple::new(rows[..g].to_vec(), rows[g..].to_vec())
        })
    }

    fn move_strategy(g: usize) -> impl Strategy<Value = SymplecticMove> {
        let i = 0..g;
        let j = 0..g;
        (0u8..5, i, j, -3i64..=3).prop_map(move |(k, i, j, t)| {
            let j = if i == j { (j + 1) % g } else { j };
            match k {
                0 => SymplecticMove::SwapPairs { i, j },
                1 => SymplecticMove::ShearU { i, t },
                2 => SymplecticMove::ShearV { i, t },
                3 => SymplecticMove::Transvect { i, j, t },
                _ => SymplecticMove::Cross { i, j, t },
            }
        })
    }

    #[test]
    fn euclid_reaches_basis() {
        let mut t = SymplecticTuple::new(vec![vec![1, 3]], vec![vec![0, 1]]);
        let log = normalize_first_pair(&mut t);
        assert_eq!(t, SymplecticTuple::new(vec![vec![1, 0]], vec![vec![0, 1]]));
        assert!(!log.is_empty());
        let mut id = SymplecticTuple::new(vec![vec![1, 0]], vec![vec![0, 1]]);
        normalize_first_pair(&mut id);
        assert_eq!(id, SymplecticTuple::new(vec![vec![1, 0]], vec![vec![0, 1]]));
    }

    proptest! {
        #[test]
        fn moves_preserve_wedge_and_span(
            t in tuple_strategy(3, 3),
            moves in proptest::collection::vec(move_strategy(3), 0..12),
        ) {
            let out = apply_moves(&t, &moves);
            prop_assert_eq!(out.wedge_sum(3), t.wedge_sum(3));
            prop_assert_eq!(span(&out, 3), span(&t, 3));
        }

        #[test]
        fn first_column_normalizes(t in tuple_strategy(3, 3)) {
            let mut out = t.clone();
            let log = normalize_first_pair(&mut out);
            prop_assert_eq!(&apply_moves(&t, &log), &out);
            prop_assert_eq!(out.wedge_sum(3), t.wedge_sum(3));
            prop_assert_eq!(span(&out, 3), span(&t, 3));
            let g = t.us.iter().chain(&t.vs).fold(0i64, |acc, x| num_integer::gcd(acc, x[0]));
            prop_assert_eq!(out.us[0][0], g);
            if span(&t, 3) == Lattice::full(3) {
                prop_assert_eq!(&out.us[0], &vec![1, 0, 0]);
            }
            for i in 0..3 {
                prop_assert_eq!(out.vs[i][0], 0);
                if i > 0 {
                    prop_assert_eq!(out.us[i][0], 0);
                }
            }
        }
    }
}

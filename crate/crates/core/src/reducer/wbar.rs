//! Enumeration of the abelianized conjugator tuples `(w̄_1, …, w̄_m)`.

use serde::{Deserialize, Serialize};

use crate::qnormal::StandardEquation;
use crate::zlattice::AbVec;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct WbarTuple(pub Vec<AbVec>);

impl WbarTuple {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Largest ℓ1 norm among the entries.
    pub fn max_l1(&self) -> i64 {
        self.0.iter().map(AbVec::l1).max().unwrap_or(0)
    }

    /// Checks `|w̄_i|₁ ≤ radius` for every entry.
    pub fn within(&self, radius: i64) -> bool {
        self.0.iter().all(|w| w.l1() <= radius)
    }
}

/// Radius of the ℓ1 ball the conjugator images are drawn from: the sum of the
/// literal coefficient word lengths.
pub fn wbar_radius(eq: &StandardEquation) -> i64 {
    eq.total_coeff_length() as i64
}

/// Integer points of the ℓ1 ball of radius `radius` in `Z^n`, ordered by norm
/// and then lexicographically.
pub fn l1_ball(n: usize, radius: i64) -> Vec<AbVec> {
    let mut out = Vec::new();
    let mut cur = vec![0i64; n];
    fn rec(i: usize, budget: i64, cur: &mut Vec<i64>, out: &mut Vec<AbVec>) {
        if i == cur.len() {
            out.push(AbVec(cur.clone()));
            return;
        }
        for x in -budget..=budget {
            cur[i] = x;
            rec(i + 1, budget - x.abs(), cur, out);
        }
        cur[i] = 0;
    }
    if radius >= 0 {
        rec(0, radius, &mut cur, &mut out);
    }
    out.sort_by(|a, b| a.l1().cmp(&b.l1()).then_with(|| a.cmp(b)));
    out
}

/// Odometer over tuples of ball points. With `anchored`, the first entry is
/// pinned to zero.
pub struct WbarIter {
    ball: Vec<AbVec>,
    idx: Vec<usize>,
    anchored: bool,
    done: bool,
}

impl Iterator for WbarIter {
    type Item = WbarTuple;

    fn next(&mut self) -> Option<WbarTuple> {
        if self.done {
            return None;
        }
        let tuple = WbarTuple(self.idx.iter().map(|&i| self.ball[i].clone()).collect());
        // advance: the last coordinate varies fastest
        let start = usize::from(self.anchored).min(self.idx.len());
        let mut k = self.idx.len();
        loop {
            if k == start {
                self.done = true;
                break;
            }
            k -= 1;
            self.idx[k] += 1;
            if self.idx[k] < self.ball.len() {
                break;
            }
            self.idx[k] = 0;
        }
        Some(tuple)
    }
}

/// Enumerates all tuples with `|w̄_i|₁ ≤ Σ|c_j|`.
///
/// With `anchored = true` only tuples with `w̄_1 = 0` are produced. Shifting
/// every `w̄_i` by a common vector changes neither the vanishing of the
/// projected chain nor the wedge target (the `c̄_i` sum to zero), and a
/// solution can always be renormalized so that the cluster containing index
/// 1 is anchored at zero while the other entries stay within the radius.
pub fn enumerate_wbars(eq: &StandardEquation, anchored: bool) -> WbarIter {
    let ball = l1_ball(eq.rank, wbar_radius(eq));
    let m = eq.m();
    WbarIter { ball, idx: vec![0; m], anchored, done: false }
}

/// Number of tuples [`enumerate_wbars`] yields.
pub fn wbar_count(eq: &StandardEquation, anchored: bool) -> u128 {
    let b = l1_ball(eq.rank, wbar_radius(eq)).len() as u128;
    let free = eq.m().saturating_sub(usize::from(anchored && eq.m() > 0));
    b.pow(free as u32)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mgroup::GroupWord;

    fn eq(coeffs: &[&str], n: usize) -> StandardEquation {
        StandardEquation::new(n, 1, coeffs.iter().map(|c| GroupWord::parse(c).unwrap()).collect()).unwrap()
    }

    #[test]
    fn empty_coefficients_give_one_tuple() {
        let e = eq(&[], 2);
        let all: Vec<_> = enumerate_wbars(&e, false).collect();
        assert_eq!(all, vec![WbarTuple(vec![])]);
        assert_eq!(enumerate_wbars(&e, true).count(), 1);
    }

    #[test]
    fn ball_radius_one() {
        let e = eq(&["a1"], 2);
        assert_eq!(enumerate_wbars(&e, false).count(), 5);
        assert_eq!(enumerate_wbars(&e, true).count(), 1);
    }

    #[test]
    fn pairs_are_full_product() {
        let e = eq(&["a1", "A1 a2"], 2);
        let r = wbar_radius(&e);
        let ball = l1_ball(2, r).len();
        let all: Vec<_> = enumerate_wbars(&e, false).collect();
        assert_eq!(all.len(), ball * ball);
        assert!(all.iter().all(|t| t.within(r)));
        assert_eq!(wbar_count(&e, false), (ball * ball) as u128);
        assert_eq!(enumerate_wbars(&e, true).count(), ball);
    }
}

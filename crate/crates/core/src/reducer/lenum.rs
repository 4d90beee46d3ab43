//! Candidate lattices `L` with `Q ⊆ L` and `π_L(δ) = 0`.
//!
//! The admissibility condition is upward closed in `L`. The search first finds
//! every minimal admissible lattice (a "seed"). This uses the fact that an
//! edge class with nonzero coefficient sum must merge with another class of
//! the same direction, which forces the difference of two base points into
//! `L`. Full-rank seeds have finitely many superlattices and give a certified
//! candidate list. In other cases the list is extended by small lattices and,
//! when the cap allows, by all lattices spanned by vectors of the a priori
//! norm ball.

use std::collections::{BTreeMap, HashSet, VecDeque};

use log::debug;
use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use super::system::ReductionSystem;
use crate::zlattice::{snf_with_transform, AbVec, IntMatrix, Lattice};

#[derive(Clone, Debug, Serialize)]
pub struct LCaps {
    /// Entry bound for the supplementary small-lattice sweep.
    pub max_entry: i64,
    /// Node budget of the seed search.
    pub seed_nodes: usize,
    /// Budget on lattices examined per enumeration step.
    pub max_candidates: usize,
}

impl Default for LCaps {
    fn default() -> Self {
        LCaps { max_entry: 2, seed_nodes: 4096, max_candidates: 50_000 }
    }
}

#[derive(Clone, Debug)]
pub struct LCandidates {
    pub lattices: Vec<Lattice>,
    /// Every admissible `L` that can carry a solution appears in `lattices`.
    pub certified: bool,
    pub notes: Vec<String>,
}

#[derive(Clone, Debug)]
pub struct SeedSearch {
    pub seeds: Vec<Lattice>,
    pub complete: bool,
}

/// Nonzero class sums of `δ` modulo `l`, keyed by (direction, coset).
fn class_sums(sys: &ReductionSystem, l: &Lattice) -> BTreeMap<(usize, AbVec), (i64, AbVec)> {
    let mut out: BTreeMap<(usize, AbVec), (i64, AbVec)> = BTreeMap::new();
    for ((p, j), c) in sys.delta.iter() {
        let e = out.entry((*j, l.reduce(p))).or_insert((0, p.clone()));
        e.0 += c;
    }
    out
}

/// Finds lattices `S ⊇ Q` with `π_S(δ) = 0` such that every admissible
/// lattice contains one of them.
pub fn find_seeds(sys: &ReductionSystem, node_cap: usize) -> SeedSearch {
    let q = sys.q_lattice();
    let mut seeds: Vec<Lattice> = Vec::new();
    let mut seen: HashSet<Lattice> = HashSet::new();
    let mut queue = VecDeque::new();
    seen.insert(q.clone());
    queue.push_back(q);
    let mut complete = true;
    let mut nodes = 0usize;
    while let Some(l) = queue.pop_front() {
        nodes += 1;
        if nodes > node_cap {
            complete = false;
            break;
        }
        if seeds.iter().any(|s| l.contains_lattice(s)) {
            continue;
        }
        let sums = class_sums(sys, &l);
        let bad = sums.iter().find(|(_, (s, _))| *s != 0);
        let Some(((dir, coset), (_, p))) = bad else {
            seeds.push(l);
            continue;
        };
        for ((d2, c2), (_, p2)) in &sums {
            if d2 != dir || c2 == coset {
                continue;
            }
            let child = l.join(&Lattice::from_generators(sys.rank, &[p2 - p]));
            if seen.insert(child.clone()) {
                queue.push_back(child);
            }
        }
    }
    seeds.sort_by_key(Lattice::order_key);
    // drop seeds that contain another seed
    let minimal: Vec<Lattice> = seeds
        .iter()
        .filter(|s| !seeds.iter().any(|t| t != *s && s.contains_lattice(t)))
        .cloned()
        .collect();
    debug!("seed search: {} nodes, {} seeds, complete = {}", nodes, minimal.len(), complete);
    SeedSearch { seeds: minimal, complete }
}

/// Basis of the saturation `span(L) ∩ Z^n` and the coordinates of `L` in it
/// (diagonal).
fn saturation(l: &Lattice) -> (Vec<Vec<BigInt>>, Vec<BigInt>) {
    let snf = snf_with_transform(l.hnf_basis());
    let s = l.rank();
    let inv = snf.v.rational_inverse().expect("unimodular transform");
    let rows: Vec<Vec<BigInt>> = inv[..s].iter().map(|r| r.iter().map(|x| x.to_integer()).collect()).collect();
    let diag: Vec<BigInt> = snf.diagonal()[..s].iter().map(|d| d.abs()).collect();
    (rows, diag)
}

/// All full-rank HNF matrices in dimension `s` whose determinant divides `det`,
/// in the form pivot on the diagonal, entries right of the pivot in `[0, d_j)`.
fn hnf_with_det_dividing(s: usize, det: &BigInt, cap: usize) -> Option<Vec<Vec<Vec<BigInt>>>> {
    fn divisors(x: &BigInt) -> Vec<BigInt> {
        let mut out = Vec::new();
        let mut d = BigInt::one();
        while &d * &d <= *x {
            if (x % &d).is_zero() {
                out.push(d.clone());
                let e = x / &d;
                if e != d {
                    out.push(e);
                }
            }
            d += 1;
        }
        out.sort();
        out
    }
    let mut diags: Vec<Vec<BigInt>> = vec![vec![]];
    for _ in 0..s {
        let mut next = Vec::new();
        for d in &diags {
            let used: BigInt = d.iter().product();
            for x in divisors(&(det / &used)) {
                let mut e = d.clone();
                e.push(x);
                next.push(e);
            }
        }
        diags = next;
    }
    let mut out = Vec::new();
    for d in diags {
        // free entries (i, j) with i < j range over [0, d_j)
        let slots: Vec<(usize, usize)> = (0..s).flat_map(|i| (i + 1..s).map(move |j| (i, j))).collect();
        let mut count = BigInt::one();
        for &(_, j) in &slots {
            count *= &d[j];
        }
        if out.len() as u128 + count.to_u128().unwrap_or(u128::MAX) > cap as u128 {
            return None;
        }
        let mut m: Vec<Vec<BigInt>> = (0..s)
            .map(|i| (0..s).map(|j| if i == j { d[i].clone() } else { BigInt::zero() }).collect())
            .collect();
        loop {
            out.push(m.clone());
            let mut k = slots.len();
            let mut advanced = false;
            while k > 0 {
                k -= 1;
                let (i, j) = slots[k];
                m[i][j] += 1;
                if m[i][j] < d[j] {
                    advanced = true;
                    break;
                }
                m[i][j] = BigInt::zero();
            }
            if !advanced {
                break;
            }
        }
    }
    Some(out)
}

/// All lattices `L` with `S ⊆ L ⊆ span(S) ∩ Z^n`, or `None` if there are more
/// than `cap`.
pub fn superlattices_in_span(seed: &Lattice, cap: usize) -> Option<Vec<Lattice>> {
    let n = seed.ambient_rank();
    if seed.rank() == 0 {
        return Some(vec![seed.clone()]);
    }
    let (sat, diag) = saturation(seed);
    let s = sat.len();
    let det: BigInt = diag.iter().product();
    let sat_m = IntMatrix::from_rows(n, &sat);
    let mut out = Vec::new();
    for coords in hnf_with_det_dividing(s, &det, cap)? {
        let local = Lattice::from_big_generators(s, &coords);
        let contains = (0..s).all(|i| {
            let mut e = vec![BigInt::zero(); s];
            e[i] = diag[i].clone();
            local.contains_big(&e)
        });
        if contains {
            out.push(Lattice::from_matrix(IntMatrix::from_rows(s, &coords).mul(&sat_m)));
        }
    }
    out.sort_by(|a, b| b.volume_sq().cmp(&a.volume_sq()).then_with(|| a.order_key().cmp(&b.order_key())));
    Some(out)
}

/// Every lattice in `Z^n` whose HNF basis has all entries in `[-e, e]`.
pub fn bounded_lattices(n: usize, e: i64) -> Vec<Lattice> {
    let mut out = vec![Lattice::zero(n)];
    let mut seen: HashSet<Lattice> = out.iter().cloned().collect();
    // rows in HNF shape: leading positive entry, arbitrary entries after it
    let mut rows: Vec<Vec<i64>> = Vec::new();
    for p in 0..n {
        let tail = n - p - 1;
        let width = (2 * e + 1) as usize;
        let total = width.pow(tail as u32);
        for lead in 1..=e {
            for code in 0..total {
                let mut r = vec![0i64; n];
                r[p] = lead;
                let mut c = code;
                for k in 0..tail {
                    r[p + 1 + k] = (c % width) as i64 - e;
                    c /= width;
                }
                rows.push(r);
            }
        }
    }
    let lead = |r: &Vec<i64>| r.iter().position(|&x| x != 0).unwrap();
    fn rec(
        start_col: usize,
        rows: &[Vec<i64>],
        lead: &dyn Fn(&Vec<i64>) -> usize,
        cur: &mut Vec<Vec<i64>>,
        n: usize,
        e: i64,
        out: &mut Vec<Lattice>,
        seen: &mut HashSet<Lattice>,
    ) {
        for r in rows.iter().filter(|r| lead(r) >= start_col) {
            cur.push(r.clone());
            let l = Lattice::from_generators(n, &cur.iter().map(|x| AbVec(x.clone())).collect::<Vec<_>>());
            // only HNF-canonical choices are kept, so each lattice appears once
            let canon = l.hnf_basis().to_rows() == cur.iter().map(|x| crate::zlattice::matrix::big_vec(x)).collect::<Vec<_>>();
            if canon && seen.insert(l.clone()) {
                out.push(l);
            }
            if canon {
                rec(lead(r) + 1, rows, lead, cur, n, e, out, seen);
            }
            cur.pop();
        }
    }
    let mut cur = Vec::new();
    rec(0, &rows, &lead, &mut cur, n, e, &mut out, &mut seen);
    out.sort_by_key(Lattice::order_key);
    out
}

/// Admissible lattices among [`bounded_lattices`].
pub fn enumerate_l_bounded(sys: &ReductionSystem, e: i64) -> Vec<Lattice> {
    bounded_lattices(sys.rank, e).into_iter().filter(|l| sys.admits(l)).collect()
}

/// Norm bound on a basis of `L`:
/// `n 2^n ω^{-n(n-1)/2} D^n + 2 ω^{1-n} ‖h‖ (max‖c̄‖)^n` with `ω = √3/2` and
/// `D = max‖c̄‖ + diam supp δ`.
pub fn b19_bound(sys: &ReductionSystem) -> f64 {
    let n = sys.rank as f64;
    let omega = 3f64.sqrt() / 2.0;
    let cmax = sys.cbars.iter().map(|c| (c.l2_sq() as f64).sqrt()).fold(0.0, f64::max);
    let d = cmax + sys.delta.diameter() as f64;
    let hnorm = sys.h.norm_sq().to_f64().unwrap_or(f64::INFINITY).sqrt();
    let a = n * 2f64.powf(n) * omega.powf(-n * (n - 1.0) / 2.0) * d.powf(n);
    let b = 2.0 * omega.powf(1.0 - n) * hnorm * cmax.powf(n);
    // round up generously against floating error
    (a + b) * (1.0 + 1e-9) + 1e-9
}

/// Vectors with Euclidean norm at most `bound`, one per `±` pair, or `None`
/// when there are more than `cap` of them.
fn half_ball(n: usize, bound: f64, cap: usize) -> Option<Vec<AbVec>> {
    // volume of the half ball; the lattice point count is within a constant factor
    let nf = n as f64;
    let unit = std::f64::consts::PI.powf(nf / 2.0) / half_gamma(nf / 2.0 + 1.0);
    if unit * bound.powf(nf) / 2.0 > 4.0 * cap as f64 + 64.0 {
        return None;
    }
    let r2 = bound * bound;
    let mut out = Vec::new();
    let mut cur = vec![0i64; n];
    fn rec(i: usize, used: f64, r2: f64, cur: &mut Vec<i64>, out: &mut Vec<AbVec>, cap: usize) -> bool {
        if i == cur.len() {
            let first = cur.iter().find(|&&x| x != 0);
            if matches!(first, Some(&x) if x > 0) {
                out.push(AbVec(cur.clone()));
                if out.len() > cap {
                    return false;
                }
            }
            return true;
        }
        let r = (r2 - used).max(0.0).sqrt().floor() as i64;
        for x in -r..=r {
            cur[i] = x;
            let sq = (x * x) as f64;
            if used + sq > r2 {
                continue;
            }
            if !rec(i + 1, used + sq, r2, cur, out, cap) {
                return false;
            }
        }
        cur[i] = 0;
        true
    }
    if !rec(0, 0.0, r2, &mut cur, &mut out, cap) {
        return None;
    }
    Some(out)
}

/// `Γ(x)` for `x` a positive multiple of `1/2`.
fn half_gamma(x: f64) -> f64 {
    let mut acc = if (x.fract() - 0.5).abs() < 1e-9 { std::f64::consts::PI.sqrt() } else { 1.0 };
    let mut t = if (x.fract() - 0.5).abs() < 1e-9 { 0.5 } else { 1.0 };
    while t < x - 1e-9 {
        acc *= t;
        t += 1.0;
    }
    acc
}

fn binomial_sum(k: usize, upto: usize) -> u128 {
    let mut total: u128 = 0;
    let mut c: u128 = 1;
    for i in 0..=upto.min(k) {
        total = total.saturating_add(c);
        c = c.saturating_mul((k - i) as u128) / (i as u128 + 1);
    }
    total
}

/// All admissible lattices spanned by at most `n` vectors of norm `≤ bound`,
/// or `None` when the number of spanning sets exceeds `cap`.
pub fn ball_lattices(sys: &ReductionSystem, bound: f64, cap: usize) -> Option<Vec<Lattice>> {
    let n = sys.rank;
    let ball = half_ball(n, bound, cap)?;
    if binomial_sum(ball.len(), n) > cap as u128 {
        return None;
    }
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    let mut idx: Vec<usize> = Vec::new();
    fn rec(
        from: usize,
        depth: usize,
        ball: &[AbVec],
        idx: &mut Vec<usize>,
        sys: &ReductionSystem,
        seen: &mut HashSet<Lattice>,
        out: &mut Vec<Lattice>,
    ) {
        let gens: Vec<AbVec> = idx.iter().map(|&i| ball[i].clone()).collect();
        let l = Lattice::from_generators(sys.rank, &gens);
        if seen.insert(l.clone()) && sys.admits(&l) {
            out.push(l);
        }
        if depth == 0 {
            return;
        }
        for i in from..ball.len() {
            idx.push(i);
            rec(i + 1, depth - 1, ball, idx, sys, seen, out);
            idx.pop();
        }
    }
    rec(0, n, &ball, &mut idx, sys, &mut seen, &mut out);
    out.sort_by_key(Lattice::order_key);
    Some(out)
}

/// Candidate lattices for the wedge stage, in the order they should be tried.
pub fn enumerate_l(sys: &ReductionSystem, caps: &LCaps) -> LCandidates {
    let mut notes = Vec::new();
    let q = sys.q_lattice();
    if sys.genus == 0 {
        // with no handles L is generated by the coefficients alone
        let lattices = if sys.admits(&q) { vec![q] } else { vec![] };
        return LCandidates { lattices, certified: true, notes };
    }
    let search = find_seeds(sys, caps.seed_nodes);
    let mut lattices: Vec<Lattice> = Vec::new();
    let mut seen: HashSet<Lattice> = HashSet::new();
    let mut push = |l: Lattice, lattices: &mut Vec<Lattice>| {
        if seen.insert(l.clone()) {
            lattices.push(l);
        }
    };
    let mut certified = search.complete;
    if !search.complete {
        notes.push(format!("seed search stopped after {} nodes", caps.seed_nodes));
    }
    for s in &search.seeds {
        match superlattices_in_span(s, caps.max_candidates) {
            Some(sups) => {
                for l in sups {
                    push(l, &mut lattices);
                }
            }
            None => {
                certified = false;
                notes.push(format!("superlattices of a seed of volume² {} exceed the cap", s.volume_sq()));
                push(s.clone(), &mut lattices);
            }
        }
        if s.rank() < sys.rank {
            certified = false;
        }
    }
    if search.complete && !certified {
        let bound = b19_bound(sys);
        match ball_lattices(sys, bound, caps.max_candidates) {
            Some(ls) => {
                notes.push(format!("exhausted all lattices spanned by vectors of norm ≤ {:.2}", bound));
                for l in ls {
                    push(l, &mut lattices);
                }
                certified = true;
            }
            None => notes.push(format!("norm ball of radius {:.2} is too large to exhaust", bound)),
        }
    }
    if !certified {
        for l in enumerate_l_bounded(sys, caps.max_entry) {
            push(l, &mut lattices);
        }
    }
    LCandidates { lattices, certified, notes }
}

/// `|det|` of a full-rank lattice (its index in `Z^n`).
pub fn lattice_index(l: &Lattice) -> Option<BigInt> {
    if l.rank() != l.ambient_rank() {
        return None;
    }
    Some(l.volume_sq().sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mgroup::GroupWord;
    use crate::qnormal::StandardEquation;
    use crate::reducer::system::build_system;
    use crate::reducer::wbar::WbarTuple;

    fn sys(coeffs: &[&str], wb: &[&[i64]], n: usize, g: usize) -> ReductionSystem {
        let e = StandardEquation::new(n, g, coeffs.iter().map(|c| GroupWord::parse(c).unwrap()).collect()).unwrap();
        build_system(&e, &WbarTuple(wb.iter().map(|x| AbVec(x.to_vec())).collect())).unwrap()
    }

    #[test]
    fn half_ball_matches_brute_force() {
        for (n, bound) in [(1, 4.0), (2, 3.5), (3, 2.9), (4, 2.0)] {
            let r = bound as i64;
            let mut count = 0;
            let total = (2 * r + 1).pow(n as u32);
            for code in 0..total {
                let mut c = code;
                let v: Vec<i64> = (0..n)
                    .map(|_| {
                        let x = c % (2 * r + 1) - r;
                        c /= 2 * r + 1;
                        x
                    })
                    .collect();
                let first = v.iter().find(|&&x| x != 0);
                if matches!(first, Some(&x) if x > 0) && (v.iter().map(|x| x * x).sum::<i64>() as f64) <= bound * bound {
                    count += 1;
                }
            }
            assert_eq!(half_ball(n, bound, 10_000).unwrap().len(), count);
        }
        assert!(half_ball(3, 997.0, 50_000).is_none());
        assert!((half_gamma(2.5) - 1.329_340_388).abs() < 1e-6);
    }

    /// Independent oracle: HNF of every generator set with small entries.
    fn brute_lattices(n: usize, e: i64) -> HashSet<Lattice> {
        let vals: Vec<i64> = (-e..=e).collect();
        let mut vecs = Vec::new();
        let total = vals.len().pow(n as u32);
        for code in 0..total {
            let mut c = code;
            let v: Vec<i64> = (0..n)
                .map(|_| {
                    let x = vals[c % vals.len()];
                    c /= vals.len();
                    x
                })
                .collect();
            vecs.push(AbVec(v));
        }
        let mut out = HashSet::new();
        for a in &vecs {
            for b in &vecs {
                let l = Lattice::from_generators(n, &[a.clone(), b.clone()]);
                if l.max_entry() <= BigInt::from(e) {
                    out.insert(l);
                }
            }
        }
        out
    }

    #[test]
    fn bounded_matches_brute_force() {
        let ours: HashSet<Lattice> = bounded_lattices(2, 2).into_iter().collect();
        assert_eq!(ours, brute_lattices(2, 2));
    }

    #[test]
    fn bounded_filter_matches_brute_force() {
        let s = sys(&["a1 a2 A1 A2"], &[&[0, 0]], 2, 1);
        let ours: HashSet<Lattice> = enumerate_l_bounded(&s, 2).into_iter().collect();
        let brute: HashSet<Lattice> = brute_lattices(2, 2).into_iter().filter(|l| s.admits(l)).collect();
        assert_eq!(ours, brute);
    }

    #[test]
    fn seeds_are_contained_in_every_admissible_small_lattice() {
        let cases: Vec<(Vec<&str>, Vec<&[i64]>)> = vec![
            (vec!["a1 a2 A1 A2"], vec![&[0, 0]]),
            (vec!["a1 a1", "A1 A1"], vec![&[0, 0], &[0, 1]]),
            (vec!["a1 a2 A1", "A2"], vec![&[0, 0], &[1, 1]]),
        ];
        for (c, w) in cases {
            let s = sys(&c, &w, 2, 1);
            let seeds = find_seeds(&s, 10_000);
            assert!(seeds.complete);
            for seed in &seeds.seeds {
                assert!(s.admits(seed));
            }
            for l in brute_lattices(2, 3).into_iter().filter(|l| s.admits(l)) {
                assert!(seeds.seeds.iter().any(|sd| l.contains_lattice(sd)), "{:?} contains no seed", l.hnf_basis());
            }
        }
    }

    #[test]
    fn superlattices_of_full_rank_seed() {
        let seed = Lattice::from_generators(2, &[AbVec(vec![2, 0]), AbVec(vec![0, 2])]);
        let sups: HashSet<Lattice> = superlattices_in_span(&seed, 1000).unwrap().into_iter().collect();
        let brute: HashSet<Lattice> = brute_lattices(2, 2).into_iter().filter(|l| l.contains_lattice(&seed)).collect();
        assert_eq!(sups, brute);
        assert_eq!(sups.len(), 5);
    }

    #[test]
    fn superlattices_of_rank_one_seed() {
        let seed = Lattice::from_generators(3, &[AbVec(vec![2, 4, 0])]);
        let sups = superlattices_in_span(&seed, 1000).unwrap();
        assert_eq!(sups.len(), 2);
        assert!(sups.iter().any(|l| l.contains(&AbVec(vec![1, 2, 0]))));
    }

    #[test]
    fn genus_zero_forces_q() {
        let s = sys(&["a1 a2 A1 A2"], &[&[0, 0]], 2, 0);
        let c = enumerate_l(&s, &LCaps::default());
        assert!(c.certified);
        assert!(c.lattices.is_empty());
    }

    #[test]
    fn commutator_coefficient_is_certified() {
        let s = sys(&["a1 a2 A1 A2"], &[&[0, 0]], 2, 1);
        let c = enumerate_l(&s, &LCaps::default());
        assert!(c.certified);
        assert_eq!(c.lattices, vec![Lattice::full(2)]);
    }

    #[test]
    fn b19_is_positive() {
        let s = sys(&["a1 a2 A1 A2"], &[&[0, 0]], 2, 1);
        let b = b19_bound(&s);
        assert!(b > 2.0);
    }
}

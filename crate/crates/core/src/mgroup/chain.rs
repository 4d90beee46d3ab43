use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::zlattice::{AbVec, Lattice};

/// Positively oriented edge from `base` to `base + e_dir` (`dir` is 0-based).
pub type Edge = (AbVec, usize);

/// Finite 1-chain on the Cayley graph of `Z^n`. Zero coefficients are never stored.
#[derive(Clone, PartialEq, Eq, Hash, Default, Debug)]
pub struct OneChain {
    edges: BTreeMap<Edge, i64>,
}

#[derive(Serialize, Deserialize)]
pub(crate) struct EdgeRecord {
    pub base: Vec<i64>,
    pub dir: usize,
    pub coeff: i64,
}

impl OneChain {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn get(&self, e: &Edge) -> i64 {
        self.edges.get(e).copied().unwrap_or(0)
    }

    pub fn add_edge(&mut self, base: AbVec, dir: usize, coeff: i64) {
        if coeff == 0 {
            return;
        }
        let key = (base, dir);
        let e = self.edges.entry(key.clone()).or_insert(0);
        *e += coeff;
        if *e == 0 {
            self.edges.remove(&key);
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Edge, &i64)> {
        self.edges.iter()
    }

    /// `self += k * translate(other, shift)`.
    pub fn add_scaled_translate(&mut self, other: &OneChain, shift: &AbVec, k: i64) {
        if k == 0 {
            return;
        }
        for ((base, dir), c) in &other.edges {
            self.add_edge(base + shift, *dir, k * c);
        }
    }

    pub fn translate(&self, shift: &AbVec) -> OneChain {
        let mut out = OneChain::new();
        out.add_scaled_translate(self, shift, 1);
        out
    }

    pub fn add(&self, other: &OneChain) -> OneChain {
        let mut out = self.clone();
        for ((b, d), c) in &other.edges {
            out.add_edge(b.clone(), *d, *c);
        }
        out
    }

    pub fn neg(&self) -> OneChain {
        OneChain { edges: self.edges.iter().map(|(k, v)| (k.clone(), -v)).collect() }
    }

    pub fn scale(&self, k: i64) -> OneChain {
        if k == 0 {
            return OneChain::new();
        }
        OneChain { edges: self.edges.iter().map(|(e, v)| (e.clone(), v * k)).collect() }
    }

    /// Boundary as a 0-chain: each edge contributes `coeff * ([head] - [tail])`.
    pub fn boundary(&self) -> BTreeMap<AbVec, i64> {
        let mut out: BTreeMap<AbVec, i64> = BTreeMap::new();
        for ((base, dir), c) in &self.edges {
            let mut head = base.clone();
            head.0[*dir] += 1;
            *out.entry(head).or_insert(0) += c;
            *out.entry(base.clone()).or_insert(0) -= c;
        }
        out.retain(|_, v| *v != 0);
        out
    }

    pub fn is_cycle(&self) -> bool {
        self.boundary().is_empty()
    }

    /// Coordinatewise bounding box `(lo, hi)` of all edge endpoints.
    pub fn bounding_box(&self) -> Option<(AbVec, AbVec)> {
        let mut it = self.edges.keys();
        let (first, _) = it.next()?;
        let mut lo = first.clone();
        let mut hi = first.clone();
        for ((b, d), _) in self.edges.iter() {
            for i in 0..b.len() {
                let top = b.0[i] + i64::from(i == *d);
                lo.0[i] = lo.0[i].min(b.0[i]);
                hi.0[i] = hi.0[i].max(top);
            }
        }
        Some((lo, hi))
    }

    /// Largest graph distance between midpoints of two support edges.
    pub fn diameter(&self) -> i64 {
        let keys: Vec<&Edge> = self.edges.keys().collect();
        let mut best = 0;
        for (a, ea) in keys.iter().enumerate() {
            for eb in &keys[a + 1..] {
                best = best.max(edge_distance(ea, eb));
            }
        }
        best
    }

    pub(crate) fn records(&self) -> Vec<EdgeRecord> {
        self.edges.iter().map(|((b, d), c)| EdgeRecord { base: b.0.clone(), dir: d + 1, coeff: *c }).collect()
    }

    pub(crate) fn from_records(recs: &[EdgeRecord]) -> OneChain {
        let mut out = OneChain::new();
        for r in recs {
            out.add_edge(AbVec(r.base.clone()), r.dir - 1, r.coeff);
        }
        out
    }
}

fn endpoints(e: &Edge) -> [AbVec; 2] {
    let mut head = e.0.clone();
    head.0[e.1] += 1;
    [e.0.clone(), head]
}

/// Graph distance between the midpoints of two edges of the grid.
pub fn edge_distance(a: &Edge, b: &Edge) -> i64 {
    if a == b {
        return 0;
    }
    let pa = endpoints(a);
    let pb = endpoints(b);
    let mut best = i64::MAX;
    for x in &pa {
        for y in &pb {
            best = best.min((x - y).l1());
        }
    }
    best + 1
}

/// Image of a 1-chain in the quotient graph `Γ_n / L`; base points are canonical
/// coset representatives modulo `L`.
#[derive(Clone, Debug)]
pub struct QuotChain {
    support: BTreeMap<Edge, i64>,
    modulus: Lattice,
}

impl QuotChain {
    pub fn project(chain: &OneChain, modulus: &Lattice) -> QuotChain {
        let mut support: BTreeMap<Edge, i64> = BTreeMap::new();
        for ((b, d), c) in chain.iter() {
            let key = (modulus.reduce(b), *d);
            let e = support.entry(key.clone()).or_insert(0);
            *e += c;
            if *e == 0 {
                support.remove(&key);
            }
        }
        QuotChain { support, modulus: modulus.clone() }
    }

    pub fn is_zero(&self) -> bool {
        self.support.is_empty()
    }

    pub fn modulus(&self) -> &Lattice {
        &self.modulus
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Edge, &i64)> {
        self.support.iter()
    }

    pub fn get(&self, e: &Edge) -> i64 {
        self.support.get(e).copied().unwrap_or(0)
    }
}

impl PartialEq for QuotChain {
    fn eq(&self, other: &Self) -> bool {
        self.modulus == other.modulus && self.support == other.support
    }
}

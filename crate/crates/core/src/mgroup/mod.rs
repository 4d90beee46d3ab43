//! Exact arithmetic in the free metabelian group `M_n`.
//!
//! An element is stored as its image in `Z^n` together with the 1-chain on the
//! Cayley graph of `Z^n` traced by any representing word. Two words are equal
//! in `M_n` iff these pairs agree, so the pair is a normal form.

pub mod chain;
pub mod word;

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::zlattice::{AbVec, Lattice, Wedge};

pub use chain::{edge_distance, Edge, OneChain, QuotChain};
pub use word::{GeneratorLetter, GroupWord, WordError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MGroupError {
    #[error(transparent)]
    Word(#[from] WordError),
    #[error("rank mismatch: {0} vs {1}")]
    RankMismatch(usize, usize),
    #[error("element is not in the commutator subgroup (abelianization {0:?})")]
    NotInCommutator(Vec<i64>),
    #[error("internal invariant violated: odd half-sum in exterior-square map")]
    OddHalfSum,
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct MElem {
    ab: AbVec,
    chain: OneChain,
}

impl MElem {
    pub fn identity(n: usize) -> Self {
        MElem { ab: AbVec::zero(n), chain: OneChain::new() }
    }

    /// The generator `a_i` (1-based) of `M_n`.
    pub fn generator(n: usize, i: usize) -> Self {
        Self::from_letters(n, &[GeneratorLetter::pos(i)])
    }

    fn from_letters(n: usize, letters: &[GeneratorLetter]) -> Self {
        let mut pos = AbVec::zero(n);
        let mut chain = OneChain::new();
        for l in letters {
            let d = l.index - 1;
            if l.inverse {
                pos.0[d] -= 1;
                chain.add_edge(pos.clone(), d, -1);
            } else {
                chain.add_edge(pos.clone(), d, 1);
                pos.0[d] += 1;
            }
        }
        MElem { ab: pos, chain }
    }

    /// Traces `w` on the Cayley graph of `Z^n`.
    pub fn from_word(w: &GroupWord, n: usize) -> Result<Self, MGroupError> {
        w.check_rank(n)?;
        Ok(Self::from_letters(n, &w.letters))
    }

    pub fn from_parts(ab: AbVec, chain: OneChain) -> Self {
        MElem { ab, chain }
    }

    pub fn rank(&self) -> usize {
        self.ab.len()
    }

    pub fn ab(&self) -> &AbVec {
        &self.ab
    }

    pub fn chain(&self) -> &OneChain {
        &self.chain
    }

    pub fn try_mul(&self, h: &MElem) -> Result<MElem, MGroupError> {
        if self.rank() != h.rank() {
            return Err(MGroupError::RankMismatch(self.rank(), h.rank()));
        }
        let mut chain = self.chain.clone();
        chain.add_scaled_translate(&h.chain, &self.ab, 1);
        Ok(MElem { ab: &self.ab + &h.ab, chain })
    }

    /// Product `self * h`. Panics on rank mismatch; see [`MElem::try_mul`].
    pub fn mul(&self, h: &MElem) -> MElem {
        self.try_mul(h).expect("rank mismatch in M_n product")
    }

    pub fn inv(&self) -> MElem {
        let shift = -&self.ab;
        let mut chain = OneChain::new();
        chain.add_scaled_translate(&self.chain, &shift, -1);
        MElem { ab: shift, chain }
    }

    /// `by * self * by⁻¹`.
    pub fn conj(&self, by: &MElem) -> MElem {
        by.mul(self).mul(&by.inv())
    }

    pub fn commutator(g: &MElem, h: &MElem) -> MElem {
        g.mul(h).mul(&g.inv()).mul(&h.inv())
    }

    pub fn pow(&self, k: i64) -> MElem {
        let base = if k < 0 { self.inv() } else { self.clone() };
        let mut out = MElem::identity(self.rank());
        for _ in 0..k.unsigned_abs() {
            out = out.mul(&base);
        }
        out
    }

    pub fn is_identity(&self) -> bool {
        self.ab.is_zero() && self.chain.is_empty()
    }

    pub fn in_commutator(&self) -> bool {
        self.ab.is_zero()
    }

    /// Checks that the chain boundary is `[ab] - [0]`.
    pub fn boundary_ok(&self) -> bool {
        let b = self.chain.boundary();
        let origin = AbVec::zero(self.rank());
        if self.ab.is_zero() {
            return b.is_empty();
        }
        b.len() == 2 && b.get(&self.ab) == Some(&1) && b.get(&origin) == Some(&-1)
    }

    /// Exterior-square image of an element of `M_n'`:
    /// `½ Σ_{(p,j)} m_{p,j} (p ∧ e_j)`.
    pub fn phi(&self) -> Result<Wedge, MGroupError> {
        if !self.ab.is_zero() {
            return Err(MGroupError::NotInCommutator(self.ab.0.clone()));
        }
        let n = self.rank();
        let mut w = Wedge::zero(n);
        for ((p, j), m) in self.chain.iter() {
            for (i, &pi) in p.0.iter().enumerate() {
                if i != *j && pi != 0 {
                    w.add_at(i, *j, &num_bigint::BigInt::from(i128::from(*m) * i128::from(pi)));
                }
            }
        }
        w.halve().ok_or(MGroupError::OddHalfSum)
    }

    /// Projection of the chain to `Γ_n / L`.
    pub fn tau(&self, lattice: &Lattice) -> QuotChain {
        QuotChain::project(&self.chain, lattice)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("element serializes")
    }
}

impl fmt::Debug for MElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MElem {{ ab: {:?}, chain: [", self.ab)?;
        for (i, ((b, d), c)) in self.chain.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{:?}/{}: {}", b, d + 1, c)?;
        }
        write!(f, "] }}")
    }
}

#[derive(Serialize, Deserialize)]
struct MElemRecord {
    ab: Vec<i64>,
    chain: Vec<chain::EdgeRecord>,
}

impl Serialize for MElem {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        MElemRecord { ab: self.ab.0.clone(), chain: self.chain.records() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for MElem {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let r = MElemRecord::deserialize(d)?;
        let n = r.ab.len();
        if r.chain.iter().any(|e| e.base.len() != n || e.dir == 0 || e.dir > n) {
            return Err(serde::de::Error::custom("edge does not match the rank"));
        }
        let el = MElem { ab: AbVec(r.ab), chain: OneChain::from_records(&r.chain) };
        if !el.boundary_ok() {
            return Err(serde::de::Error::custom("chain boundary does not match abelianization"));
        }
        Ok(el)
    }
}

/// Evaluates a word in `M_n`; panics if the word uses generators beyond `n`.
pub fn sigma(w: &GroupWord, n: usize) -> MElem {
    MElem::from_word(w, n).expect("word exceeds rank")
}

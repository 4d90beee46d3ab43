use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::zlattice::AbVec;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WordError {
    #[error("generator index {index} out of range for rank {rank}")]
    IndexOutOfRange { index: usize, rank: usize },
    #[error("bad generator token `{0}`")]
    BadToken(String),
    #[error("rank mismatch: {0} vs {1}")]
    RankMismatch(usize, usize),
}

/// A generator `a_k` (`inverse = false`) or its inverse `A_k`. Indices are 1-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GeneratorLetter {
    pub index: usize,
    pub inverse: bool,
}

impl GeneratorLetter {
    pub fn new(index: usize, inverse: bool) -> Self {
        GeneratorLetter { index, inverse }
    }

    pub fn pos(index: usize) -> Self {
        Self::new(index, false)
    }

    pub fn neg(index: usize) -> Self {
        Self::new(index, true)
    }

    pub fn inv(self) -> Self {
        GeneratorLetter { index: self.index, inverse: !self.inverse }
    }

    pub fn sign(self) -> i64 {
        if self.inverse {
            -1
        } else {
            1
        }
    }
}

impl fmt::Display for GeneratorLetter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", if self.inverse { 'A' } else { 'a' }, self.index)
    }
}

impl FromStr for GeneratorLetter {
    type Err = WordError;
    fn from_str(s: &str) -> Result<Self, WordError> {
        let mut chars = s.chars();
        let inverse = match chars.next() {
            Some('a') => false,
            Some('A') => true,
            _ => return Err(WordError::BadToken(s.to_string())),
        };
        let idx: usize = chars.as_str().parse().map_err(|_| WordError::BadToken(s.to_string()))?;
        if idx == 0 {
            return Err(WordError::BadToken(s.to_string()));
        }
        Ok(GeneratorLetter { index: idx, inverse })
    }
}

/// A word over `a_1, ..., a_n` and their inverses.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct GroupWord {
    pub letters: Vec<GeneratorLetter>,
}

impl GroupWord {
    pub fn empty() -> Self {
        GroupWord { letters: Vec::new() }
    }

    pub fn from_letters(letters: Vec<GeneratorLetter>) -> Self {
        GroupWord { letters }
    }

    pub fn generator(index: usize) -> Self {
        GroupWord { letters: vec![GeneratorLetter::pos(index)] }
    }

    /// Parses a whitespace-separated list of `a<k>` / `A<k>` tokens. Tokens may
    /// also be written without separators (`a1A2`), and `1` alone is the empty word.
    pub fn parse(s: &str) -> Result<Self, WordError> {
        let s = s.trim();
        if s.is_empty() || s == "1" {
            return Ok(Self::empty());
        }
        let mut letters = Vec::new();
        let bytes: Vec<char> = s.chars().collect();
        let mut i = 0;
        while i < bytes.len() {
            let c = bytes[i];
            if c.is_whitespace() {
                i += 1;
                continue;
            }
            if c != 'a' && c != 'A' {
                return Err(WordError::BadToken(c.to_string()));
            }
            let mut j = i + 1;
            while j < bytes.len() && bytes[j].is_ascii_digit() {
                j += 1;
            }
            let tok: String = bytes[i..j].iter().collect();
            letters.push(tok.parse()?);
            i = j;
        }
        Ok(GroupWord { letters })
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn max_index(&self) -> usize {
        self.letters.iter().map(|l| l.index).max().unwrap_or(0)
    }

    pub fn check_rank(&self, rank: usize) -> Result<(), WordError> {
        match self.letters.iter().find(|l| l.index > rank || l.index == 0) {
            Some(l) => Err(WordError::IndexOutOfRange { index: l.index, rank }),
            None => Ok(()),
        }
    }

    pub fn inverse(&self) -> GroupWord {
        GroupWord { letters: self.letters.iter().rev().map(|l| l.inv()).collect() }
    }

    pub fn concat(&self, other: &GroupWord) -> GroupWord {
        let mut letters = self.letters.clone();
        letters.extend_from_slice(&other.letters);
        GroupWord { letters }
    }

    pub fn power(&self, k: i64) -> GroupWord {
        let base = if k < 0 { self.inverse() } else { self.clone() };
        let mut letters = Vec::with_capacity(base.len() * k.unsigned_abs() as usize);
        for _ in 0..k.unsigned_abs() {
            letters.extend_from_slice(&base.letters);
        }
        GroupWord { letters }
    }

    /// Commutator `[u, v] = u v u⁻¹ v⁻¹`.
    pub fn commutator(u: &GroupWord, v: &GroupWord) -> GroupWord {
        u.concat(v).concat(&u.inverse()).concat(&v.inverse())
    }

    /// `g h g⁻¹`.
    pub fn conjugate(h: &GroupWord, g: &GroupWord) -> GroupWord {
        g.concat(h).concat(&g.inverse())
    }

    /// Free reduction (cancels adjacent `x x⁻¹`).
    pub fn reduced(&self) -> GroupWord {
        let mut out: Vec<GeneratorLetter> = Vec::with_capacity(self.len());
        for &l in &self.letters {
            if out.last() == Some(&l.inv()) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        GroupWord { letters: out }
    }

    /// Image in `Z^rank`.
    pub fn abelianization(&self, rank: usize) -> AbVec {
        let mut v = vec![0i64; rank];
        for l in &self.letters {
            v[l.index - 1] += l.sign();
        }
        AbVec(v)
    }

    /// The word `a_1^{k_1} a_2^{k_2} ... a_n^{k_n}` for `k = v`.
    pub fn from_abelian(v: &AbVec) -> GroupWord {
        let mut letters = Vec::new();
        for (i, &k) in v.0.iter().enumerate() {
            let l = GeneratorLetter::new(i + 1, k < 0);
            for _ in 0..k.unsigned_abs() {
                letters.push(l);
            }
        }
        GroupWord { letters }
    }
}

impl fmt::Display for GroupWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return write!(f, "1");
        }
        for (i, l) in self.letters.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{}", l)?;
        }
        Ok(())
    }
}

impl fmt::Debug for GroupWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "\"{}\"", self)
    }
}

impl FromStr for GroupWord {
    type Err = WordError;
    fn from_str(s: &str) -> Result<Self, WordError> {
        GroupWord::parse(s)
    }
}

impl Serialize for GroupWord {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for GroupWord {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        GroupWord::parse(&s).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_display() {
        let w = GroupWord::parse("a1 a2 A1 A2").unwrap();
        assert_eq!(w.len(), 4);
        assert_eq!(w.to_string(), "a1 a2 A1 A2");
        assert_eq!(GroupWord::parse("a1A2a10").unwrap().to_string(), "a1 A2 a10");
        assert!(GroupWord::parse("b1").is_err());
        assert!(GroupWord::parse("a0").is_err());
        assert_eq!(GroupWord::parse("1").unwrap(), GroupWord::empty());
    }

    #[test]
    fn reduce_and_inverse() {
        let w = GroupWord::parse("a1 a2 A2 A1 a3").unwrap();
        assert_eq!(w.reduced().to_string(), "a3");
        let u = GroupWord::parse("a1 A3 a2").unwrap();
        assert!(u.concat(&u.inverse()).reduced().is_empty());
    }

    #[test]
    fn rank_check() {
        let w = GroupWord::parse("a3").unwrap();
        assert!(w.check_rank(2).is_err());
        assert!(w.check_rank(3).is_ok());
    }
}

use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

/// Integer vector in the free abelian group `Z^n` (coordinates in the standard basis).
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AbVec(pub Vec<i64>);

impl AbVec {
    pub fn zero(n: usize) -> Self {
        AbVec(vec![0; n])
    }

    pub fn unit(n: usize, i: usize) -> Self {
        let mut v = vec![0; n];
        v[i] = 1;
        AbVec(v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&x| x == 0)
    }

    /// Word norm on `Z^n`: sum of absolute coordinates.
    pub fn l1(&self) -> i64 {
        self.0.iter().map(|x| x.abs()).sum()
    }

    /// Squared Euclidean norm.
    pub fn l2_sq(&self) -> i64 {
        self.0.iter().map(|x| x * x).sum()
    }

    pub fn linf(&self) -> i64 {
        self.0.iter().map(|x| x.abs()).max().unwrap_or(0)
    }

    pub fn scale(&self, k: i64) -> AbVec {
        AbVec(self.0.iter().map(|x| x * k).collect())
    }

    pub fn dot(&self, other: &AbVec) -> i64 {
        self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum()
    }

    pub fn to_big(&self) -> Vec<BigInt> {
        self.0.iter().map(|&x| BigInt::from(x)).collect()
    }

    /// Converts back from big integers; `None` on overflow.
    pub fn from_big(v: &[BigInt]) -> Option<AbVec> {
        v.iter().map(i64::try_from).collect::<Result<Vec<_>, _>>().ok().map(AbVec)
    }

    pub fn as_slice(&self) -> &[i64] {
        &self.0
    }
}

impl Add for &AbVec {
    type Output = AbVec;
    fn add(self, rhs: &AbVec) -> AbVec {
        debug_assert_eq!(self.len(), rhs.len());
        AbVec(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &AbVec {
    type Output = AbVec;
    fn sub(self, rhs: &AbVec) -> AbVec {
        debug_assert_eq!(self.len(), rhs.len());
        AbVec(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl Neg for &AbVec {
    type Output = AbVec;
    fn neg(self) -> AbVec {
        AbVec(self.0.iter().map(|a| -a).collect())
    }
}

impl fmt::Debug for AbVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

impl From<Vec<i64>> for AbVec {
    fn from(v: Vec<i64>) -> Self {
        AbVec(v)
    }
}

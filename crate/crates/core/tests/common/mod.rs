#![allow(dead_code)]

use mqsolve::mgroup::{GeneratorLetter, GroupWord};
use rand::Rng;

pub fn random_word(rng: &mut impl Rng, n: usize, len: usize) -> GroupWord {
    let letters = (0..len).map(|_| GeneratorLetter::new(rng.gen_range(1..=n), rng.gen_bool(0.5))).collect();
    GroupWord::from_letters(letters)
}

pub fn random_reduced(rng: &mut impl Rng, n: usize, max_len: usize) -> GroupWord {
    let len = rng.gen_range(0..=max_len);
    random_word(rng, n, len).reduced()
}

pub fn w(s: &str) -> GroupWord {
    GroupWord::parse(s).unwrap()
}

/// Degree ≤ 2 truncation of the Magnus expansion `a_i ↦ 1 + X_i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Magnus2 {
    pub c0: i64,
    pub c1: Vec<i64>,
    pub c2: Vec<Vec<i64>>,
}

impl Magnus2 {
    pub fn one(n: usize) -> Self {
        Magnus2 { c0: 1, c1: vec![0; n], c2: vec![vec![0; n]; n] }
    }

    pub fn mul(&self, o: &Magnus2) -> Magnus2 {
        let n = self.c1.len();
        let mut r = Magnus2::one(n);
        r.c0 = self.c0 * o.c0;
        for i in 0..n {
            r.c1[i] = self.c0 * o.c1[i] + self.c1[i] * o.c0;
            for j in 0..n {
                r.c2[i][j] = self.c0 * o.c2[i][j] + self.c1[i] * o.c1[j] + self.c2[i][j] * o.c0;
            }
        }
        r
    }

    pub fn of_word(word: &GroupWord, n: usize) -> Magnus2 {
        let mut acc = Magnus2::one(n);
        for l in &word.letters {
            let i = l.index - 1;
            let mut m = Magnus2::one(n);
            // (1 + X)⁻¹ = 1 - X + X² - …
            m.c1[i] = if l.inverse { -1 } else { 1 };
            m.c2[i][i] = if l.inverse { 1 } else { 0 };
            acc = acc.mul(&m);
        }
        acc
    }
}

//! Exhaustive search over short words, independent of the decision pipeline.

use std::collections::HashMap;

use serde::Serialize;

use crate::lifter::{verify, Witness};
use crate::mgroup::{sigma, GeneratorLetter, GroupWord, MElem};
use crate::qnormal::{x_name, y_name, z_name, StandardEquation};

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum OracleOutcome {
    Sat { witness: Witness },
    NoWitness { max_len: usize, words: usize },
    Refused { estimate: u128, limit: u128 },
}

/// Freely reduced words of length at most `max_len`, shortest first.
pub fn reduced_words(n: usize, max_len: usize) -> Vec<GroupWord> {
    let letters: Vec<GeneratorLetter> =
        (1..=n).flat_map(|i| [GeneratorLetter::pos(i), GeneratorLetter::neg(i)]).collect();
    let mut out = vec![GroupWord::empty()];
    let mut frontier = vec![GroupWord::empty()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in &frontier {
            for &l in &letters {
                if w.letters.last() == Some(&l.inv()) {
                    continue;
                }
                let mut v = w.letters.clone();
                v.push(l);
                next.push(GroupWord::from_letters(v));
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

/// All index tuples of length `k` over `0..base`, last index fastest.
fn tuples(base: usize, k: usize) -> impl Iterator<Item = Vec<usize>> {
    let mut cur = vec![0usize; k];
    let mut done = base == 0 && k > 0;
    std::iter::from_fn(move || {
        if done {
            return None;
        }
        let out = cur.clone();
        let mut i = k;
        loop {
            if i == 0 {
                done = true;
                break;
            }
            i -= 1;
            cur[i] += 1;
            if cur[i] < base {
                break;
            }
            cur[i] = 0;
        }
        Some(out)
    })
}

/// Exhaustive searcher over words of length `≤ max_len`. The handle side of
/// an equation only depends on the genus, so its table is built once per
/// genus and reused across equations.
pub struct Oracle {
    n: usize,
    max_len: usize,
    words: Vec<GroupWord>,
    elems: Vec<MElem>,
    handles: HashMap<usize, HashMap<MElem, Vec<usize>>>,
}

impl Oracle {
    pub fn new(n: usize, max_len: usize) -> Self {
        let words = reduced_words(n, max_len);
        let elems = words.iter().map(|w| sigma(w, n)).collect();
        Oracle { n, max_len, words, elems, handles: HashMap::new() }
    }

    fn handle_table(&mut self, genus: usize) -> &HashMap<MElem, Vec<usize>> {
        let (n, elems) = (self.n, &self.elems);
        self.handles.entry(genus).or_insert_with(|| {
            let mut table = HashMap::new();
            for t in tuples(elems.len(), 2 * genus) {
                let mut acc = MElem::identity(n);
                for i in 0..genus {
                    acc = acc.mul(&MElem::commutator(&elems[t[2 * i]], &elems[t[2 * i + 1]]));
                }
                table.entry(acc).or_insert(t);
            }
            table
        })
    }

    /// Tries every assignment. The two sides of the equation are tabulated
    /// separately and matched, so the work is the sum rather than the product
    /// of the two search spaces.
    pub fn search(&mut self, eq: &StandardEquation, limit: u128) -> OracleOutcome {
        assert_eq!(eq.rank, self.n, "oracle built for another rank");
        let b = self.words.len() as u128;
        let estimate = b.saturating_pow(2 * eq.genus as u32).saturating_add(b.saturating_pow(eq.m() as u32));
        if estimate > limit {
            return OracleOutcome::Refused { estimate, limit };
        }
        let n = self.n;
        // conjugates c^z for every coefficient and word
        let conj: Vec<Vec<MElem>> =
            eq.coeff_elems().iter().map(|c| self.elems.iter().map(|z| c.conj(z)).collect()).collect();
        let nwords = self.words.len();
        let table = self.handle_table(eq.genus);
        let mut found = None;
        for t in tuples(nwords, eq.m()) {
            let mut acc = MElem::identity(n);
            for (row, &k) in conj.iter().zip(&t) {
                acc = acc.mul(&row[k]);
            }
            if let Some(h) = table.get(&acc) {
                found = Some((h.clone(), t));
                break;
            }
        }
        let Some((h, z)) = found else {
            return OracleOutcome::NoWitness { max_len: self.max_len, words: nwords };
        };
        let mut w = Witness(Default::default());
        for i in 0..eq.genus {
            w.0.insert(x_name(i), self.words[h[2 * i]].clone());
            w.0.insert(y_name(i), self.words[h[2 * i + 1]].clone());
        }
        for (j, &k) in z.iter().enumerate() {
            w.0.insert(z_name(j), self.words[k].clone());
        }
        assert!(verify(eq, &w).unwrap_or(false), "oracle match does not verify");
        OracleOutcome::Sat { witness: w }
    }
}

/// One-shot [`Oracle::search`].
pub fn brute_oracle(eq: &StandardEquation, max_len: usize, limit: u128) -> OracleOutcome {
    Oracle::new(eq.rank, max_len).search(eq, limit)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn eq(g: usize, cs: &[&str]) -> StandardEquation {
        StandardEquation::new(2, g, cs.iter().map(|c| GroupWord::parse(c).unwrap()).collect()).unwrap()
    }

    #[test]
    fn word_counts() {
        // 1 + 4 + 12 + 36
        assert_eq!(reduced_words(2, 3).len(), 53);
    }

    #[test]
    fn commutator_target() {
        assert!(matches!(brute_oracle(&eq(1, &["a1 a2 A1 A2"]), 2, 1 << 20), OracleOutcome::Sat { .. }));
    }

    #[test]
    fn abelian_obstruction_has_no_witness() {
        assert!(matches!(brute_oracle(&eq(1, &["a1"]), 2, 1 << 20), OracleOutcome::NoWitness { .. }));
    }

    #[test]
    fn refuses_large_spaces() {
        assert!(matches!(brute_oracle(&eq(2, &["a1"]), 6, 1000), OracleOutcome::Refused { .. }));
    }
}

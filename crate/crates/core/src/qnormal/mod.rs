//! Reduction of orientable quadratic words to the standard form
//! `[x_1,y_1]⋯[x_g,y_g] = z_1 c_1 z_1⁻¹ ⋯ z_m c_m z_m⁻¹`.
//!
//! Standardization only uses automorphisms of `M_n * F_X` that fix the
//! constants, plus two bookkeeping steps (trailing constants become a pinned
//! conjugation block, trivial coefficients are dropped). Every step is logged
//! so solutions of the standard equation can be carried back.

pub mod mixed;

use std::collections::BTreeMap;

use log::debug;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::mgroup::{GroupWord, MElem, MGroupError, WordError};
use crate::zlattice::AbVec;

pub use mixed::{inverse_items, normalize_items, Classification, Item, MixedWord};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum QnError {
    #[error("variable `{0}` does not occur exactly twice; the word is not quadratic")]
    NotQuadratic(String),
    #[error("variable `{0}` occurs twice with the same sign; non-orientable equations are not supported")]
    NonOrientable(String),
    #[error("no value given for variable `{0}`")]
    MissingVariable(String),
    #[error(transparent)]
    Group(#[from] MGroupError),
    #[error(transparent)]
    Word(#[from] WordError),
    #[error("log replay failed: {0}")]
    Replay(String),
}

/// One logged step of the standardization.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Move {
    /// `var ↦ left · var · right`; neither side involves `var`.
    Substitute { var: String, left: Vec<Item>, right: Vec<Item> },
    /// `var ↦ var⁻¹`.
    Invert { var: String },
    /// Simultaneous renaming `from ↦ to`.
    Rename { pairs: Vec<(String, String)> },
    /// Replaces the trailing constant `constant` by `var · constant · var⁻¹`.
    /// Solutions of the new word give solutions of the old one after
    /// conjugating every value by `var⁻¹`.
    PinConjugator { var: String, constant: GroupWord },
    /// Removes the block `var · d · var⁻¹` whose constant `d` is trivial in `M_n`.
    DropBlock { var: String },
}

impl Move {
    /// Number of elementary Nielsen steps the move stands for.
    pub fn cost(&self) -> usize {
        match self {
            Move::Substitute { left, right, .. } => mixed::items_weight(left) + mixed::items_weight(right),
            Move::Invert { .. } => 1,
            Move::Rename { .. } | Move::PinConjugator { .. } | Move::DropBlock { .. } => 0,
        }
    }

    /// Applies the move to a word.
    pub fn apply(&self, w: &MixedWord) -> Result<MixedWord, QnError> {
        match self {
            Move::Substitute { var, left, right } => {
                let mut image = left.clone();
                image.push(Item::var(var));
                image.extend(right.iter().cloned());
                Ok(w.substitute(var, &image))
            }
            Move::Invert { var } => Ok(w.substitute(var, &[Item::var_inv(var)])),
            Move::Rename { pairs } => {
                let map: BTreeMap<&str, &str> = pairs.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect();
                let items = w
                    .items
                    .iter()
                    .map(|it| match it {
                        Item::Var { name, inv } => Item::Var { name: map.get(name.as_str()).map_or(name.clone(), |s| s.to_string()), inv: *inv },
                        c => c.clone(),
                    })
                    .collect();
                Ok(MixedWord::new(w.rank, items))
            }
            Move::PinConjugator { var, constant } => {
                let mut items = w.items.clone();
                match items.pop() {
                    Some(Item::Const(c)) if c == *constant => {}
                    _ => return Err(QnError::Replay("word does not end in the pinned constant".into())),
                }
                items.push(Item::var(var));
                items.push(Item::Const(constant.clone()));
                items.push(Item::var_inv(var));
                Ok(MixedWord::new(w.rank, items))
            }
            Move::DropBlock { var } => {
                let i = w
                    .items
                    .iter()
                    .position(|it| it.var_name() == Some(var))
                    .ok_or_else(|| QnError::Replay(format!("block variable {} missing", var)))?;
                if i + 2 >= w.items.len() || w.items[i + 2] != w.items[i].inverse() {
                    return Err(QnError::Replay(format!("{} does not bound a block", var)));
                }
                let mut items = w.items[..i].to_vec();
                items.extend(w.items[i + 3..].iter().cloned());
                Ok(MixedWord::new(w.rank, items))
            }
        }
    }

    /// Turns values solving the word after this move into values solving the
    /// word before it.
    fn pull_back(&self, values: &mut BTreeMap<String, GroupWord>) {
        match self {
            Move::Substitute { var, left, right } => {
                let l = mixed::eval_items_lenient(left, values);
                let r = mixed::eval_items_lenient(right, values);
                let cur = values.get(var).cloned().unwrap_or_default();
                values.insert(var.clone(), l.concat(&cur).concat(&r).reduced());
            }
            Move::Invert { var } => {
                let cur = values.get(var).cloned().unwrap_or_default();
                values.insert(var.clone(), cur.inverse());
            }
            Move::Rename { pairs } => {
                let taken: Vec<(String, GroupWord)> =
                    pairs.iter().map(|(from, to)| (from.clone(), values.get(to).cloned().unwrap_or_default())).collect();
                for (_, to) in pairs {
                    values.remove(to);
                }
                values.extend(taken);
            }
            Move::PinConjugator { var, .. } => {
                let t = values.remove(var).unwrap_or_default();
                let ti = t.inverse();
                for v in values.values_mut() {
                    *v = ti.concat(v).concat(&t).reduced();
                }
            }
            Move::DropBlock { var } => {
                values.insert(var.clone(), GroupWord::empty());
            }
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AutomorphismLog {
    pub moves: Vec<Move>,
}

impl AutomorphismLog {
    pub fn is_identity(&self) -> bool {
        self.moves.is_empty()
    }

    pub fn move_count(&self) -> usize {
        self.moves.iter().map(Move::cost).sum()
    }

    pub fn replay(&self, w: &MixedWord) -> Result<MixedWord, QnError> {
        let mut cur = w.clone();
        for mv in &self.moves {
            cur = mv.apply(&cur)?;
        }
        Ok(cur)
    }

    /// Carries a solution of the standardized word back to the original word.
    pub fn transport(&self, values: &BTreeMap<String, GroupWord>) -> BTreeMap<String, GroupWord> {
        let mut vals = values.clone();
        for mv in self.moves.iter().rev() {
            mv.pull_back(&mut vals);
        }
        vals
    }
}

/// An equation `[x_1,y_1]⋯[x_g,y_g] = z_1 c_1 z_1⁻¹ ⋯ z_m c_m z_m⁻¹` over `M_n`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StandardEquation {
    pub rank: usize,
    pub genus: usize,
    pub coeffs: Vec<GroupWord>,
}

pub fn x_name(i: usize) -> String {
    format!("x{}", i + 1)
}

pub fn y_name(i: usize) -> String {
    format!("y{}", i + 1)
}

pub fn z_name(i: usize) -> String {
    format!("z{}", i + 1)
}

impl StandardEquation {
    pub fn new(rank: usize, genus: usize, coeffs: Vec<GroupWord>) -> Result<Self, QnError> {
        for c in &coeffs {
            c.check_rank(rank)?;
        }
        Ok(StandardEquation { rank, genus, coeffs })
    }

    pub fn m(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeff_elems(&self) -> Vec<MElem> {
        self.coeffs.iter().map(|c| crate::mgroup::sigma(c, self.rank)).collect()
    }

    pub fn coeff_abs(&self) -> Vec<AbVec> {
        self.coeffs.iter().map(|c| c.abelianization(self.rank)).collect()
    }

    /// `c_1 c_2 ⋯ c_m` as an element of `M_n`.
    pub fn coeff_product(&self) -> MElem {
        self.coeff_elems().iter().fold(MElem::identity(self.rank), |acc, c| acc.mul(c))
    }

    /// Sum of the literal coefficient word lengths.
    pub fn total_coeff_length(&self) -> usize {
        self.coeffs.iter().map(GroupWord::len).sum()
    }

    pub fn variable_names(&self) -> Vec<String> {
        let mut out = Vec::new();
        for i in 0..self.genus {
            out.push(x_name(i));
            out.push(y_name(i));
        }
        out.extend((0..self.m()).map(z_name));
        out
    }

    /// `LHS · RHS⁻¹ = [x_1,y_1]⋯[x_g,y_g] · z_m c_m⁻¹ z_m⁻¹ ⋯ z_1 c_1⁻¹ z_1⁻¹`.
    pub fn standard_word(&self) -> MixedWord {
        let mut items = Vec::new();
        for i in 0..self.genus {
            items.push(Item::var(&x_name(i)));
            items.push(Item::var(&y_name(i)));
            items.push(Item::var_inv(&x_name(i)));
            items.push(Item::var_inv(&y_name(i)));
        }
        for i in (0..self.m()).rev() {
            items.push(Item::var(&z_name(i)));
            items.push(Item::Const(self.coeffs[i].inverse()));
            items.push(Item::var_inv(&z_name(i)));
        }
        MixedWord::new(self.rank, items)
    }

    pub fn verify(&self, values: &BTreeMap<String, GroupWord>) -> Result<bool, QnError> {
        Ok(self.standard_word().evaluate(values)?.is_identity())
    }
}

/// Locates an interleaved pair `x … y … x^{±1} … y^{±1}` in `items`; the
/// returned `x` is opened first.
fn find_linked_pair(items: &[Item]) -> Option<(String, String)> {
    let mut stack: Vec<&str> = Vec::new();
    for it in items {
        if let Item::Var { name, .. } = it {
            match stack.iter().rposition(|s| *s == name.as_str()) {
                None => stack.push(name),
                Some(pos) if pos + 1 == stack.len() => {
                    stack.pop();
                }
                Some(pos) => return Some((stack[pos].to_string(), stack[pos + 1].to_string())),
            }
        }
    }
    None
}

fn positions(items: &[Item], var: &str) -> (usize, usize) {
    let mut it = items.iter().enumerate().filter(|(_, x)| x.var_name() == Some(var)).map(|(i, _)| i);
    let a = it.next().expect("variable occurs");
    let b = it.next().expect("variable occurs twice");
    (a, b)
}

fn first_is_inverse(items: &[Item], var: &str) -> bool {
    let (p, _) = positions(items, var);
    matches!(&items[p], Item::Var { inv: true, .. })
}

struct Standardizer {
    word: MixedWord,
    log: AutomorphismLog,
    fixed: usize,
}

impl Standardizer {
    fn push(&mut self, mv: Move) {
        let skip = match &mv {
            Move::Substitute { left, right, .. } => left.is_empty() && right.is_empty(),
            Move::Rename { pairs } => pairs.iter().all(|(a, b)| a == b),
            _ => false,
        };
        if skip {
            return;
        }
        self.word = mv.apply(&self.word).expect("standardization move applies");
        self.log.moves.push(mv);
    }

    fn rest(&self) -> &[Item] {
        &self.word.items[self.fixed..]
    }

    fn subst(&mut self, var: &str, left: Vec<Item>, right: Vec<Item>) {
        self.push(Move::Substitute { var: var.to_string(), left, right });
    }

    /// Moves an interleaved pair to the front of the unfixed part as `[x, y]`.
    fn extract_handle(&mut self, x: &str, y: &str) {
        for v in [x, y] {
            if first_is_inverse(self.rest(), v) {
                self.push(Move::Invert { var: v.to_string() });
            }
        }
        // rest = A x P y Q X R Y S
        let (p, _) = positions(self.rest(), x);
        let a = self.rest()[..p].to_vec();
        self.subst(x, inverse_items(&a), vec![]);
        // rest = x P y Q X R Y S
        let (r, _) = positions(self.rest(), y);
        let pp = self.rest()[1..r].to_vec();
        self.subst(x, vec![], inverse_items(&pp));
        // rest = x y M X R Y S
        let (_, q) = positions(self.rest(), x);
        let mm = self.rest()[2..q].to_vec();
        self.subst(y, vec![], inverse_items(&mm));
        // rest = x y X T Y S
        let (_, s) = positions(self.rest(), y);
        let t = self.rest()[3..s].to_vec();
        self.subst(x, vec![], t.clone());
        self.subst(y, inverse_items(&t), t);
        debug_assert_eq!(
            &self.rest()[..4],
            &[Item::var(x), Item::var(y), Item::var_inv(x), Item::var_inv(y)]
        );
        self.fixed += 4;
    }

    /// Moves an innermost block `z d z⁻¹` to the front of the unfixed part.
    fn extract_block(&mut self) -> Option<(String, GroupWord)> {
        let rest = self.rest();
        let i = (0..rest.len().saturating_sub(2)).find(|&i| {
            rest[i].var_name().is_some() && matches!(rest[i + 1], Item::Const(_)) && rest[i + 2] == rest[i].inverse()
        })?;
        let z = rest[i].var_name().unwrap().to_string();
        if first_is_inverse(rest, &z) {
            self.push(Move::Invert { var: z.clone() });
        }
        let a = self.rest()[..i].to_vec();
        self.subst(&z, inverse_items(&a), vec![]);
        let d = match &self.rest()[1] {
            Item::Const(d) => d.clone(),
            _ => unreachable!("block constant"),
        };
        self.fixed += 3;
        Some((z, d))
    }
}

fn fresh_name(w: &MixedWord) -> String {
    let used = w.variables();
    (0..).map(|k| format!("t{}", k)).find(|n| !used.contains(n)).unwrap()
}

/// Result of standardization.
#[derive(Clone, Debug)]
pub struct Standardized {
    pub equation: StandardEquation,
    pub log: AutomorphismLog,
    /// `log` replayed on the input word.
    pub word: MixedWord,
}

/// Brings an orientable quadratic word to the standard form.
pub fn standardize(w: &MixedWord) -> Result<Standardized, QnError> {
    w.check_orientable()?;
    let mut st = Standardizer { word: MixedWord::new(w.rank, w.items.clone()), log: AutomorphismLog::default(), fixed: 0 };
    let mut handles: Vec<(String, String)> = Vec::new();
    while let Some((x, y)) = find_linked_pair(st.rest()) {
        st.extract_handle(&x, &y);
        handles.push((x, y));
    }
    let mut blocks: Vec<(String, GroupWord)> = Vec::new();
    while let Some(b) = st.extract_block() {
        blocks.push(b);
    }
    match st.rest() {
        [] => {}
        [Item::Const(e)] => {
            let e = e.clone();
            let t = fresh_name(&st.word);
            st.push(Move::PinConjugator { var: t.clone(), constant: e.clone() });
            st.fixed += 3;
            blocks.push((t, e));
        }
        other => unreachable!("unexpected remainder after standardization: {:?}", other),
    }
    let mut kept = Vec::new();
    for (z, d) in blocks {
        if crate::mgroup::sigma(&d, w.rank).is_identity() {
            st.push(Move::DropBlock { var: z });
        } else {
            kept.push((z, d));
        }
    }
    let m = kept.len();
    let mut pairs = Vec::new();
    for (i, (x, y)) in handles.iter().enumerate() {
        pairs.push((x.clone(), x_name(i)));
        pairs.push((y.clone(), y_name(i)));
    }
    for (j, (z, _)) in kept.iter().enumerate() {
        pairs.push((z.clone(), z_name(m - 1 - j)));
    }
    st.push(Move::Rename { pairs });
    let coeffs: Vec<GroupWord> = (0..m).map(|i| kept[m - 1 - i].1.inverse()).collect();
    let equation = StandardEquation { rank: w.rank, genus: handles.len(), coeffs };
    debug_assert_eq!(st.word, equation.standard_word());
    debug!("standardized: genus {}, {} coefficients, {} moves", equation.genus, m, st.log.move_count());
    Ok(Standardized { equation, log: st.log, word: st.word })
}

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use super::QnError;
use crate::mgroup::{GroupWord, MElem};

/// One letter of a word in `M_n * F_X`: a variable (possibly inverted) or a
/// nonempty constant segment.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Item {
    Var { name: String, inv: bool },
    Const(GroupWord),
}

impl Item {
    pub fn var(name: &str) -> Item {
        Item::Var { name: name.to_string(), inv: false }
    }

    pub fn var_inv(name: &str) -> Item {
        Item::Var { name: name.to_string(), inv: true }
    }

    pub fn inverse(&self) -> Item {
        match self {
            Item::Var { name, inv } => Item::Var { name: name.clone(), inv: !inv },
            Item::Const(w) => Item::Const(w.inverse()),
        }
    }

    pub fn var_name(&self) -> Option<&str> {
        match self {
            Item::Var { name, .. } => Some(name),
            Item::Const(_) => None,
        }
    }

    /// Letter count: 1 for a variable, word length for a constant.
    pub fn weight(&self) -> usize {
        match self {
            Item::Var { .. } => 1,
            Item::Const(w) => w.len(),
        }
    }
}

impl fmt::Display for Item {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Item::Var { name, inv: false } => write!(f, "{}", name),
            Item::Var { name, inv: true } => write!(f, "{}", invert_case(name)),
            Item::Const(w) => write!(f, "{}", w),
        }
    }
}

fn invert_case(name: &str) -> String {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_lowercase() => c.to_ascii_uppercase().to_string() + chars.as_str(),
        _ => format!("{}^-1", name),
    }
}

pub fn inverse_items(items: &[Item]) -> Vec<Item> {
    items.iter().rev().map(Item::inverse).collect()
}

/// Total letter count of an item list.
pub fn items_weight(items: &[Item]) -> usize {
    items.iter().map(Item::weight).sum()
}

/// Free reduction in `M_n * F_X`: cancels `x x⁻¹`, merges adjacent constants
/// and freely reduces them, and drops empty constants.
pub fn normalize_items(items: Vec<Item>) -> Vec<Item> {
    let mut out: Vec<Item> = Vec::with_capacity(items.len());
    for it in items {
        match it {
            Item::Const(w) => {
                let w = if let Some(Item::Const(prev)) = out.last() {
                    let merged = prev.concat(&w).reduced();
                    out.pop();
                    merged
                } else {
                    w.reduced()
                };
                if !w.is_empty() {
                    out.push(Item::Const(w));
                }
            }
            v @ Item::Var { .. } => {
                if out.last() == Some(&v.inverse()) {
                    out.pop();
                } else {
                    out.push(v);
                }
            }
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Classification {
    Orientable,
    NonOrientable,
    NotQuadratic,
}

/// A word in `M_n * F_X`, kept freely reduced.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MixedWord {
    pub rank: usize,
    pub items: Vec<Item>,
}

impl MixedWord {
    pub fn new(rank: usize, items: Vec<Item>) -> Self {
        MixedWord { rank, items: normalize_items(items) }
    }

    pub fn len(&self) -> usize {
        items_weight(&self.items)
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn inverse(&self) -> MixedWord {
        MixedWord { rank: self.rank, items: inverse_items(&self.items) }
    }

    pub fn concat(&self, other: &MixedWord) -> MixedWord {
        let mut items = self.items.clone();
        items.extend(other.items.iter().cloned());
        MixedWord::new(self.rank, items)
    }

    /// Variables in order of first occurrence.
    pub fn variables(&self) -> Vec<String> {
        let mut seen = Vec::new();
        for it in &self.items {
            if let Item::Var { name, .. } = it {
                if !seen.contains(name) {
                    seen.push(name.clone());
                }
            }
        }
        seen
    }

    /// Occurrence signs (`false` = positive) per variable.
    fn occurrences(&self) -> HashMap<&str, Vec<bool>> {
        let mut occ: HashMap<&str, Vec<bool>> = HashMap::new();
        for it in &self.items {
            if let Item::Var { name, inv } = it {
                occ.entry(name.as_str()).or_default().push(*inv);
            }
        }
        occ
    }

    pub fn classify(&self) -> Classification {
        let occ = self.occurrences();
        let mut result = Classification::Orientable;
        for signs in occ.values() {
            if signs.len() != 2 {
                return Classification::NotQuadratic;
            }
            if signs[0] == signs[1] {
                result = Classification::NonOrientable;
            }
        }
        result
    }

    /// Checks the word is quadratic and orientable.
    pub fn check_orientable(&self) -> Result<(), QnError> {
        let occ = self.occurrences();
        let mut names: Vec<&&str> = occ.keys().collect();
        names.sort();
        for name in &names {
            if occ[**name].len() != 2 {
                return Err(QnError::NotQuadratic(name.to_string()));
            }
        }
        for name in names {
            let s = &occ[*name];
            if s[0] == s[1] {
                return Err(QnError::NonOrientable(name.to_string()));
            }
        }
        Ok(())
    }

    /// Replaces `var` by `image` (and `var⁻¹` by `image⁻¹`), then reduces.
    pub fn substitute(&self, var: &str, image: &[Item]) -> MixedWord {
        let inv_image = inverse_items(image);
        let mut items = Vec::with_capacity(self.items.len() + 2 * image.len());
        for it in &self.items {
            match it {
                Item::Var { name, inv } if name == var => {
                    items.extend(if *inv { inv_image.iter().cloned() } else { image.iter().cloned() });
                }
                other => items.push(other.clone()),
            }
        }
        MixedWord::new(self.rank, items)
    }

    /// Evaluates under an assignment of words to variables (missing variables
    /// are an error).
    pub fn evaluate(&self, values: &BTreeMap<String, GroupWord>) -> Result<MElem, QnError> {
        Ok(MElem::from_word(&self.substitute_values(values)?, self.rank)?)
    }

    /// The constant word obtained by plugging in `values`.
    pub fn substitute_values(&self, values: &BTreeMap<String, GroupWord>) -> Result<GroupWord, QnError> {
        let mut letters = Vec::new();
        for it in &self.items {
            match it {
                Item::Var { name, inv } => {
                    let v = values.get(name).ok_or_else(|| QnError::MissingVariable(name.clone()))?;
                    letters.extend(if *inv { v.inverse().letters } else { v.letters.clone() });
                }
                Item::Const(w) => letters.extend_from_slice(&w.letters),
            }
        }
        Ok(GroupWord::from_letters(letters))
    }
}

impl fmt::Display for MixedWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.items.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self.items.iter().map(|i| i.to_string()).collect();
        write!(f, "{}", parts.join(" "))
    }
}

/// Evaluates an item list to a word under `values`; missing variables count as 1.
pub fn eval_items_lenient(items: &[Item], values: &BTreeMap<String, GroupWord>) -> GroupWord {
    let mut letters = Vec::new();
    for it in items {
        match it {
            Item::Var { name, inv } => {
                if let Some(v) = values.get(name) {
                    letters.extend(if *inv { v.inverse().letters } else { v.letters.clone() });
                }
            }
            Item::Const(w) => letters.extend_from_slice(&w.letters),
        }
    }
    GroupWord::from_letters(letters)
}

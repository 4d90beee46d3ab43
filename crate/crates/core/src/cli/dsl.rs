//! Text format for equations.
//!
//! ```text
//! n=2; [x1,y1] = z1 (a1 a2 A1 A2) Z1
//! n=2; raw: x1 a1 y1 X1 a2 Y1 = 1
//! ```
//!
//! Lowercase `a<k>` is a generator and uppercase its inverse; any other letter
//! followed by digits is a variable, uppercase meaning inverse. `1` is the
//! empty word. Whitespace is ignored.

use std::fmt;

use thiserror::Error;

use crate::mgroup::{GeneratorLetter, GroupWord};
use crate::qnormal::{inverse_items, x_name, y_name, z_name, Item, MixedWord, StandardEquation};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("line {line}, column {column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(u64),
    Sym(char),
    End,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{}`", s),
            Tok::Int(k) => write!(f, "`{}`", k),
            Tok::Sym(c) => write!(f, "`{}`", c),
            Tok::End => write!(f, "end of input"),
        }
    }
}

#[derive(Clone, Debug)]
struct Spanned {
    tok: Tok,
    line: usize,
    column: usize,
}

fn lex(text: &str) -> Result<Vec<Spanned>, ParseError> {
    let mut out = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let (mut line, mut column) = (1, 1);
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let (l0, c0) = (line, column);
        let err = |m: String| ParseError { line: l0, column: c0, message: m };
        if c == '\n' {
            line += 1;
            column = 1;
            i += 1;
            continue;
        }
        if c.is_whitespace() {
            column += 1;
            i += 1;
            continue;
        }
        let start = i;
        let tok = if c.is_ascii_alphabetic() {
            while i < chars.len() && chars[i].is_ascii_alphabetic() {
                i += 1;
            }
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            Tok::Ident(chars[start..i].iter().collect())
        } else if c.is_ascii_digit() {
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            Tok::Int(s.parse().map_err(|_| err(format!("integer `{}` is too large", s)))?)
        } else if "[],()=;:".contains(c) {
            i += 1;
            Tok::Sym(c)
        } else {
            return Err(err(format!("unexpected character `{}`", c)));
        };
        column += i - start;
        out.push(Spanned { tok, line: l0, column: c0 });
    }
    out.push(Spanned { tok: Tok::End, line, column });
    Ok(out)
}

/// A parsed equation. `standard` is filled in when the text is already in
/// standard form with variables `x_i, y_i, z_j` numbered in order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Parsed {
    pub rank: usize,
    /// Left side times the inverse of the right side.
    pub word: MixedWord,
    pub standard: Option<StandardEquation>,
}

/// One syntactic unit of an equation side.
#[derive(Clone, Debug)]
enum Term {
    Comm(Item, Item),
    Block { var: Item, word: GroupWord, back: Item },
    Items(Vec<Item>),
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
    rank: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)].tok
    }

    fn error<T>(&self, message: String) -> Result<T, ParseError> {
        let s = &self.toks[self.pos];
        Err(ParseError { line: s.line, column: s.column, message })
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, c: char) -> Result<(), ParseError> {
        if *self.peek() == Tok::Sym(c) {
            self.bump();
            Ok(())
        } else {
            self.error(format!("expected `{}`, found {}", c, self.peek()))
        }
    }

    fn header(&mut self) -> Result<(), ParseError> {
        if *self.peek() != Tok::Ident("n".into()) {
            return self.error(format!("expected header `n=<rank>;`, found {}", self.peek()));
        }
        self.bump();
        self.expect('=')?;
        match self.peek().clone() {
            Tok::Int(k) if k >= 1 && k <= 64 => {
                self.rank = k as usize;
                self.bump();
            }
            Tok::Int(k) => return self.error(format!("rank {} is out of range 1..=64", k)),
            t => return self.error(format!("expected rank, found {}", t)),
        }
        self.expect(';')
    }

    /// A generator or variable letter.
    fn letter(&mut self) -> Result<Item, ParseError> {
        let Tok::Ident(s) = self.peek().clone() else {
            return self.error(format!("expected a generator or variable, found {}", self.peek()));
        };
        let head = s.chars().next().unwrap();
        let digits = &s[1..];
        if digits.is_empty() || !digits.chars().all(|c| c.is_ascii_digit()) {
            return self.error(format!("`{}` is not a letter followed by an index", s));
        }
        let inv = head.is_ascii_uppercase();
        let item = if head.eq_ignore_ascii_case(&'a') {
            let k: usize = match digits.parse() {
                Ok(k) => k,
                Err(_) => return self.error(format!("generator index in `{}` is too large", s)),
            };
            if k == 0 || k > self.rank {
                return self.error(format!("unknown generator `{}` (rank is {})", s, self.rank));
            }
            Item::Const(GroupWord::from_letters(vec![GeneratorLetter::new(k, inv)]))
        } else {
            Item::Var { name: format!("{}{}", head.to_ascii_lowercase(), digits), inv }
        };
        self.bump();
        Ok(item)
    }

    /// Generators only, inside parentheses.
    fn group_word(&mut self) -> Result<GroupWord, ParseError> {
        let mut letters = Vec::new();
        loop {
            match self.peek() {
                Tok::Sym(')') => break,
                Tok::Int(1) => {
                    self.bump();
                }
                _ => match self.letter()? {
                    Item::Const(w) => letters.extend(w.letters),
                    Item::Var { .. } => {
                        self.pos -= 1;
                        return self.error("variables are not allowed inside a coefficient".into());
                    }
                },
            }
        }
        Ok(GroupWord::from_letters(letters))
    }

    fn side(&mut self) -> Result<Vec<Term>, ParseError> {
        let mut terms = Vec::new();
        loop {
            match self.peek().clone() {
                Tok::Sym('[') => {
                    self.bump();
                    let a = self.letter()?;
                    self.expect(',')?;
                    let b = self.letter()?;
                    self.expect(']')?;
                    terms.push(Term::Comm(a, b));
                }
                Tok::Sym('(') => {
                    self.bump();
                    let w = self.group_word()?;
                    self.expect(')')?;
                    terms.push(Term::Items(vec![Item::Const(w)]));
                }
                Tok::Int(1) => {
                    self.bump();
                }
                Tok::Ident(_) => {
                    let it = self.letter()?;
                    if matches!(it, Item::Var { .. }) && *self.peek() == Tok::Sym('(') {
                        self.bump();
                        let w = self.group_word()?;
                        self.expect(')')?;
                        let back = self.letter()?;
                        terms.push(Term::Block { var: it, word: w, back });
                    } else {
                        terms.push(Term::Items(vec![it]));
                    }
                }
                Tok::Sym('=') | Tok::End => break,
                t => return self.error(format!("unexpected {}", t)),
            }
            if terms.is_empty() && *self.peek() == Tok::End {
                break;
            }
        }
        Ok(terms)
    }
}

fn term_items(t: &Term) -> Vec<Item> {
    match t {
        Term::Comm(a, b) => vec![a.clone(), b.clone(), a.inverse(), b.inverse()],
        Term::Block { var, word, back } => vec![var.clone(), Item::Const(word.clone()), back.clone()],
        Term::Items(v) => v.clone(),
    }
}

fn is_var(it: &Item, name: &str, inv: bool) -> bool {
    matches!(it, Item::Var { name: n, inv: i } if n == name && *i == inv)
}

/// Recognizes `[x1,y1]⋯[xg,yg] = z1 (c1) Z1 ⋯ zm (cm) Zm`.
/// `z1 (c1) Z1 ⋯ = 1` is read as `1 = z1 (c1) Z1 ⋯`, which has the same solutions.
fn as_standard(rank: usize, lhs: &[Term], rhs: &[Term]) -> Option<StandardEquation> {
    if rhs.is_empty() && !lhs.is_empty() && lhs.iter().all(|t| matches!(t, Term::Block { .. })) {
        return as_standard(rank, &[], lhs);
    }
    let mut genus = 0;
    for t in lhs {
        match t {
            Term::Comm(a, b) if is_var(a, &x_name(genus), false) && is_var(b, &y_name(genus), false) => genus += 1,
            _ => return None,
        }
    }
    let mut coeffs = Vec::new();
    for t in rhs {
        match t {
            Term::Block { var, word, back } => {
                let z = z_name(coeffs.len());
                if !is_var(var, &z, false) || !is_var(back, &z, true) {
                    return None;
                }
                coeffs.push(word.clone());
            }
            _ => return None,
        }
    }
    StandardEquation::new(rank, genus, coeffs).ok()
}

pub fn parse(text: &str) -> Result<Parsed, ParseError> {
    let toks = lex(text)?;
    let mut p = Parser { toks, pos: 0, rank: 0 };
    p.header()?;
    let raw = *p.peek() == Tok::Ident("raw".into()) && *p.peek_at(1) == Tok::Sym(':');
    if raw {
        p.bump();
        p.bump();
    }
    let lhs = p.side()?;
    if *p.peek() != Tok::Sym('=') {
        return p.error(format!("expected `=`, found {}", p.peek()));
    }
    p.bump();
    let rhs_start = p.pos;
    let rhs = p.side()?;
    if *p.peek() != Tok::End {
        return p.error(format!("unexpected {} after the equation", p.peek()));
    }
    if raw && !rhs.is_empty() {
        p.pos = rhs_start;
        return p.error("a raw equation must have right-hand side `1`".into());
    }
    let mut items: Vec<Item> = lhs.iter().flat_map(term_items).collect();
    let r: Vec<Item> = rhs.iter().flat_map(term_items).collect();
    items.extend(inverse_items(&r));
    let standard = if raw { None } else { as_standard(p.rank, &lhs, &rhs) };
    Ok(Parsed { rank: p.rank, word: MixedWord::new(p.rank, items), standard })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn standard_form() {
        let p = parse("n=2; [x1,y1] = z1 (a1 a2 A1 A2) Z1").unwrap();
        let eq = p.standard.unwrap();
        assert_eq!((eq.genus, eq.m()), (1, 1));
        assert_eq!(eq.coeffs[0], GroupWord::parse("a1 a2 A1 A2").unwrap());
        assert_eq!(p.word, eq.standard_word());
    }

    #[test]
    fn raw_form() {
        let p = parse("n=2; raw: x1 a1 y1 X1 a2 Y1 = 1").unwrap();
        assert!(p.standard.is_none());
        assert_eq!(p.word.len(), 6);
        assert_eq!(p.word.variables(), vec!["x1".to_string(), "y1".to_string()]);
    }

    #[test]
    fn whitespace_insensitive() {
        let a = parse("n=2;[x1,y1]=z1(a1a2A1A2)Z1").unwrap();
        let b = parse("n = 2 ;\n [ x1 , y1 ] =\n z1 ( a1 a2 A1 A2 ) Z1").unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn bare_right_side() {
        let p = parse("n=2; [x1,y1] = a1").unwrap();
        assert!(p.standard.is_none());
        let q = parse("n=2; z1 (a1 a2 A1 A2) Z1 = 1").unwrap();
        assert_eq!(q.standard.unwrap().genus, 0);
    }

    #[test]
    fn errors_carry_positions() {
        let e = parse("n=2; [x1,y1").unwrap_err();
        assert_eq!((e.line, e.column), (1, 12));
        let e = parse("n=2;\n[x1,y1] = a3").unwrap_err();
        assert_eq!((e.line, e.column), (2, 11));
        assert!(e.message.contains("unknown generator"));
        assert!(parse("[x1,y1] = 1").is_err());
        assert!(parse("n=2; raw: x1 X1 = a1").is_err());
    }
}

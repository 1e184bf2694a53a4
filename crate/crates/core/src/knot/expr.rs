//! Symbolic knot expressions built from named atoms by mirroring and
//! connected sum.
//!
//! Grammar: `name`, `-expr`, `expr + expr`, `(expr)`. A name is a run of
//! identifier characters that may carry balanced parenthesised groups, so
//! `T(2,3)` and `Wh(T(2,3))` are single atoms. A parenthesis that does not
//! directly follow a name opens a subexpression. U+2212 (−) is accepted as a
//! minus sign.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Name of the identity atom for connected sum.
pub const UNKNOT: &str = "unknot";

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum KnotExpression {
    Atom(String),
    Mirror(Box<KnotExpression>),
    Sum(Box<KnotExpression>, Box<KnotExpression>),
}

impl KnotExpression {
    pub fn atom(name: impl Into<String>) -> Self {
        Self::Atom(name.into())
    }

    pub fn unknot() -> Self {
        Self::Atom(UNKNOT.to_string())
    }

    pub fn mirror(self) -> Self {
        Self::Mirror(Box::new(self))
    }

    pub fn sum(self, other: Self) -> Self {
        Self::Sum(Box::new(self), Box::new(other))
    }

    /// Atom names occurring in the expression, with repetition.
    pub fn atoms(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms<'a>(&'a self, out: &mut Vec<&'a str>) {
        match self {
            Self::Atom(n) => out.push(n),
            Self::Mirror(e) => e.collect_atoms(out),
            Self::Sum(a, b) => {
                a.collect_atoms(out);
                b.collect_atoms(out);
            }
        }
    }

    /// Flattens into signed atom terms, in left-to-right order.
    pub fn terms(&self) -> Vec<SignedAtom> {
        let mut out = Vec::new();
        self.collect_terms(false, &mut out);
        out
    }

    fn collect_terms(&self, mirrored: bool, out: &mut Vec<SignedAtom>) {
        match self {
            Self::Atom(n) => out.push(SignedAtom {
                name: n.clone(),
                mirrored,
            }),
            Self::Mirror(e) => e.collect_terms(!mirrored, out),
            Self::Sum(a, b) => {
                a.collect_terms(mirrored, out);
                b.collect_terms(mirrored, out);
            }
        }
    }

    pub fn from_terms(terms: impl IntoIterator<Item = SignedAtom>) -> Self {
        terms
            .into_iter()
            .map(|t| t.to_expression())
            .reduce(|acc, t| acc.sum(t))
            .unwrap_or_else(Self::unknot)
    }
}

/// Canonical form: mirrors pushed down to atoms, sums flattened, unknot
/// summands removed and the remaining terms sorted by atom name (an atom
/// sorts before its mirror).
pub fn normalize(expr: &KnotExpression) -> KnotExpression {
    let mut terms: Vec<SignedAtom> = expr
        .terms()
        .into_iter()
        .filter(|t| t.name != UNKNOT)
        .collect();
    terms.sort();
    KnotExpression::from_terms(terms)
}

/// An atom, possibly mirrored. Ledger facts are attached to these.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SignedAtom {
    pub name: String,
    pub mirrored: bool,
}

impl SignedAtom {
    pub fn new(name: impl Into<String>, mirrored: bool) -> Self {
        Self {
            name: name.into(),
            mirrored,
        }
    }

    pub fn positive(name: impl Into<String>) -> Self {
        Self::new(name, false)
    }

    pub fn mirror(&self) -> Self {
        Self::new(self.name.clone(), !self.mirrored)
    }

    pub fn to_expression(&self) -> KnotExpression {
        let a = KnotExpression::Atom(self.name.clone());
        if self.mirrored {
            a.mirror()
        } else {
            a
        }
    }

    /// Parses `name` or `-name`.
    pub fn parse(s: &str) -> Result<Self> {
        match normalize(&s.parse()?) {
            KnotExpression::Atom(n) => Ok(Self::positive(n)),
            KnotExpression::Mirror(e) => match *e {
                KnotExpression::Atom(n) => Ok(Self::new(n, true)),
                _ => unreachable!("normal form mirrors only atoms"),
            },
            KnotExpression::Sum(..) => Err(Error::Syntax {
                offset: 0,
                message: format!("`{s}` is a sum, expected a single (possibly mirrored) atom"),
            }),
        }
    }
}

impl fmt::Display for SignedAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.mirrored {
            write!(f, "-{}", self.name)
        } else {
            write!(f, "{}", self.name)
        }
    }
}

/// Element of the free abelian group on atoms: the concordance class of a
/// connected sum up to cancelling K + (−K), which is slice.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ConcordanceClass(BTreeMap<String, i64>);

impl ConcordanceClass {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn from_expression(expr: &KnotExpression) -> Self {
        let mut c = Self::zero();
        for t in expr.terms() {
            if t.name != UNKNOT {
                c.add_term(&t.name, if t.mirrored { -1 } else { 1 });
            }
        }
        c
    }

    pub fn unit(atom: &SignedAtom) -> Self {
        let mut c = Self::zero();
        c.add_term(&atom.name, if atom.mirrored { -1 } else { 1 });
        c
    }

    fn add_term(&mut self, name: &str, k: i64) {
        let e = self.0.entry(name.to_string()).or_insert(0);
        *e += k;
        if *e == 0 {
            self.0.remove(name);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn coefficients(&self) -> impl Iterator<Item = (&str, i64)> {
        self.0.iter().map(|(n, &k)| (n.as_str(), k))
    }

    pub fn coefficient(&self, name: &str) -> i64 {
        self.0.get(name).copied().unwrap_or(0)
    }

    /// Number of atom summands, counted with multiplicity.
    pub fn weight(&self) -> i64 {
        self.0.values().map(|k| k.abs()).sum()
    }

    /// The single signed atom this class consists of, if any.
    pub fn as_unit(&self) -> Option<SignedAtom> {
        if self.0.len() != 1 {
            return None;
        }
        let (name, &k) = self.0.iter().next()?;
        match k {
            1 => Some(SignedAtom::positive(name.clone())),
            -1 => Some(SignedAtom::new(name.clone(), true)),
            _ => None,
        }
    }

    pub fn mirror(&self) -> Self {
        Self(self.0.iter().map(|(n, k)| (n.clone(), -k)).collect())
    }

    pub fn plus(&self, other: &Self) -> Self {
        let mut c = self.clone();
        for (n, &k) in &other.0 {
            c.add_term(n, k);
        }
        c
    }

    pub fn minus(&self, other: &Self) -> Self {
        self.plus(&other.mirror())
    }

    pub fn without(&self, name: &str) -> Self {
        let mut c = self.clone();
        c.0.remove(name);
        c
    }

    /// Expands into unit terms in canonical order.
    pub fn units(&self) -> Vec<SignedAtom> {
        let mut out = Vec::new();
        for (n, &k) in &self.0 {
            for _ in 0..k.abs() {
                out.push(SignedAtom::new(n.clone(), k < 0));
            }
        }
        out
    }

    pub fn to_expression(&self) -> KnotExpression {
        KnotExpression::from_terms(self.units())
    }
}

impl fmt::Display for ConcordanceClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_expression())
    }
}

impl fmt::Display for KnotExpression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Atom(n) => write!(f, "{n}"),
            Self::Mirror(e) => match e.as_ref() {
                Self::Sum(..) | Self::Mirror(_) => write!(f, "-({e})"),
                Self::Atom(_) => write!(f, "-{e}"),
            },
            Self::Sum(a, b) => match b.as_ref() {
                Self::Sum(..) => write!(f, "{a} + ({b})"),
                _ => write!(f, "{a} + {b}"),
            },
        }
    }
}

impl FromStr for KnotExpression {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut p = Parser { src: s, pos: 0 };
        let e = p.expr()?;
        p.skip_ws();
        if p.pos < s.len() {
            return Err(p.error("unexpected trailing input"));
        }
        Ok(e)
    }
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

fn is_ident(c: char) -> bool {
    c.is_alphanumeric() || matches!(c, '_' | '.' | '\'' | '#' | '*')
}

impl Parser<'_> {
    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        Some(c)
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(char::is_whitespace) {
            self.bump();
        }
    }

    fn error(&self, message: &str) -> Error {
        Error::Syntax {
            offset: self.pos,
            message: message.to_string(),
        }
    }

    fn expr(&mut self) -> Result<KnotExpression> {
        let mut acc = self.unary()?;
        loop {
            self.skip_ws();
            if self.peek() == Some('+') {
                self.bump();
                let rhs = self.unary()?;
                acc = acc.sum(rhs);
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<KnotExpression> {
        self.skip_ws();
        match self.peek() {
            Some('-') | Some('\u{2212}') => {
                self.bump();
                Ok(self.unary()?.mirror())
            }
            Some('(') => {
                self.bump();
                let e = self.expr()?;
                self.skip_ws();
                if self.bump() != Some(')') {
                    return Err(self.error("expected `)`"));
                }
                Ok(e)
            }
            Some(c) if is_ident(c) => self.name().map(KnotExpression::Atom),
            Some(_) => Err(self.error("expected an atom name, `-` or `(`")),
            None => Err(self.error("unexpected end of expression")),
        }
    }

    fn name(&mut self) -> Result<String> {
        let start = self.pos;
        loop {
            match self.peek() {
                Some(c) if is_ident(c) => {
                    self.bump();
                }
                Some('(') if self.pos > start => self.group()?,
                _ => break,
            }
        }
        Ok(self.src[start..self.pos].to_string())
    }

    /// Consumes a balanced parenthesised group belonging to a name.
    fn group(&mut self) -> Result<()> {
        let open = self.pos;
        let mut depth = 0usize;
        while let Some(c) = self.bump() {
            match c {
                '(' => depth += 1,
                ')' => {
                    depth -= 1;
                    if depth == 0 {
                        return Ok(());
                    }
                }
                c if c.is_whitespace() => {
                    return Err(self.error("whitespace inside an atom name"));
                }
                _ => {}
            }
        }
        Err(Error::Syntax {
            offset: open,
            message: "unbalanced `(` in atom name".to_string(),
        })
    }
}

//! Formal rational combinations of counting quasimorphisms.
//!
//! Textual form: terms joined by `+`/`-`, each `[coef *] C[word]` (overlapping)
//! or `[coef *] N[word]` (non-overlapping), e.g. `C[ab] - 2/3*N[aBb]`.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num::{BigInt, BigRational, One, Signed, Zero};

use crate::error::{Error, Result};
use crate::word::Word;

pub type Rational = BigRational;

pub fn rational(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Kind {
    Overlapping,
    NonOverlapping,
}

impl Kind {
    fn tag(self) -> char {
        match self {
            Kind::Overlapping => 'C',
            Kind::NonOverlapping => 'N',
        }
    }
}

/// `phi_w` (overlapping) or `phi*_w` (non-overlapping) for a non-empty pattern.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QmTerm {
    pub kind: Kind,
    pub pattern: Word,
}

impl QmTerm {
    pub fn new(kind: Kind, pattern: Word) -> Result<QmTerm> {
        if pattern.is_empty() {
            return Err(Error::EmptyPattern);
        }
        Ok(QmTerm { kind, pattern })
    }
}

impl Ord for QmTerm {
    fn cmp(&self, other: &Self) -> Ordering {
        self.kind
            .cmp(&other.kind)
            .then_with(|| self.pattern.shortlex_cmp(&other.pattern))
    }
}

impl PartialOrd for QmTerm {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for QmTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}[{}]", self.kind.tag(), self.pattern)
    }
}

/// A finite rational combination of counting quasimorphisms.
///
/// Since `phi_{w^{-1}} = -phi_w` (for both kinds), every pattern is stored in
/// the orientation that is smaller in the default letter order, with the
/// coefficient sign adjusted. Zero coefficients are never stored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QmExpr {
    rank: usize,
    terms: BTreeMap<QmTerm, Rational>,
}

impl QmExpr {
    pub fn zero(rank: usize) -> QmExpr {
        QmExpr { rank, terms: BTreeMap::new() }
    }

    pub fn term(kind: Kind, pattern: Word) -> Result<QmExpr> {
        let mut e = QmExpr::zero(pattern.rank());
        e.add_term(kind, pattern, Rational::one())?;
        Ok(e)
    }

    pub fn overlapping(pattern: &Word) -> QmExpr {
        QmExpr::term(Kind::Overlapping, pattern.clone()).expect("non-empty pattern")
    }

    pub fn non_overlapping(pattern: &Word) -> QmExpr {
        QmExpr::term(Kind::NonOverlapping, pattern.clone()).expect("non-empty pattern")
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&QmTerm, &Rational)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, kind: Kind, pattern: &Word) -> Rational {
        let inv = pattern.inverse();
        let (p, sign) = if inv < *pattern { (inv, -Rational::one()) } else { (pattern.clone(), Rational::one()) };
        self.terms
            .get(&QmTerm { kind, pattern: p })
            .map(|c| c * &sign)
            .unwrap_or_else(Rational::zero)
    }

    pub fn add_term(&mut self, kind: Kind, pattern: Word, coef: Rational) -> Result<()> {
        if pattern.rank() != self.rank {
            return Err(Error::RankMismatch { left: self.rank, right: pattern.rank() });
        }
        if pattern.is_empty() {
            return Err(Error::EmptyPattern);
        }
        let inv = pattern.inverse();
        let (pattern, coef) = if inv < pattern { (inv, -coef) } else { (pattern, coef) };
        let key = QmTerm { kind, pattern };
        let entry = self.terms.entry(key.clone()).or_insert_with(Rational::zero);
        *entry += coef;
        if entry.is_zero() {
            self.terms.remove(&key);
        }
        Ok(())
    }

    pub fn add(&self, other: &QmExpr) -> Result<QmExpr> {
        self.add_scaled(other, &Rational::one())
    }

    pub fn sub(&self, other: &QmExpr) -> Result<QmExpr> {
        self.add_scaled(other, &-Rational::one())
    }

    /// `self + factor * other`.
    pub fn add_scaled(&self, other: &QmExpr, factor: &Rational) -> Result<QmExpr> {
        if self.rank != other.rank {
            return Err(Error::RankMismatch { left: self.rank, right: other.rank });
        }
        let mut out = self.clone();
        for (t, c) in &other.terms {
            out.add_term(t.kind, t.pattern.clone(), c * factor)?;
        }
        Ok(out)
    }

    pub fn scale(&self, factor: &Rational) -> QmExpr {
        let mut out = QmExpr::zero(self.rank);
        if factor.is_zero() {
            return out;
        }
        for (t, c) in &self.terms {
            out.terms.insert(t.clone(), c * factor);
        }
        out
    }

    pub fn has_non_overlapping(&self) -> bool {
        self.terms.keys().any(|t| t.kind == Kind::NonOverlapping)
    }

    pub fn max_pattern_len(&self) -> usize {
        self.terms.keys().map(|t| t.pattern.len()).max().unwrap_or(0)
    }

    /// Sum of absolute values of the coefficients.
    pub fn l1_norm(&self) -> Rational {
        self.terms.values().map(|c| c.abs()).fold(Rational::zero(), |a, b| a + b)
    }

    pub fn parse(rank: usize, text: &str) -> Result<QmExpr> {
        Parser { src: text.as_bytes(), pos: 0, rank }.expr()
    }

    /// Smallest rank (at least `min`) covering every letter in the bracketed patterns.
    pub fn infer_rank(text: &str, min: usize) -> usize {
        let mut rank = min;
        let mut inside = false;
        for c in text.chars() {
            match c {
                '[' => inside = true,
                ']' => inside = false,
                c if inside => rank = rank.max(Word::infer_rank(&c.to_string(), 1)),
                _ => {}
            }
        }
        rank
    }
}

impl fmt::Display for QmExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (t, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            match (i, neg) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let a = c.abs();
            if !a.is_one() {
                write!(f, "{a}*")?;
            }
            write!(f, "{t}")?;
        }
        Ok(())
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    rank: usize,
}

impl Parser<'_> {
    fn err<T>(&self, msg: &str) -> Result<T> {
        Err(Error::ExprParse { pos: self.pos, msg: msg.to_string() })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn number(&mut self) -> Result<BigInt> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected digits");
        }
        let s = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        Ok(s.parse::<BigInt>().unwrap())
    }

    fn expr(&mut self) -> Result<QmExpr> {
        let mut out = QmExpr::zero(self.rank);
        if self.peek().is_none() {
            return self.err("empty expression");
        }
        // a bare "0" denotes the zero expression
        if self.src[self.pos..].iter().all(|c| c.is_ascii_whitespace() || *c == b'0')
            && self.src[self.pos..].contains(&b'0')
        {
            return Ok(out);
        }
        let mut first = true;
        loop {
            let mut sign = Rational::one();
            match self.peek() {
                Some(b'+') if !first => self.pos += 1,
                Some(b'-') => {
                    sign = -sign;
                    self.pos += 1;
                }
                None if !first => break,
                _ if first => {}
                _ => return self.err("expected '+' or '-'"),
            }
            first = false;
            let (kind, pattern, coef) = self.term()?;
            out.add_term(kind, pattern, coef * sign)?;
            if self.peek().is_none() {
                break;
            }
        }
        Ok(out)
    }

    fn term(&mut self) -> Result<(Kind, Word, Rational)> {
        let mut coef = Rational::one();
        if matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            let num = self.number()?;
            let den = if self.peek() == Some(b'/') {
                self.pos += 1;
                self.number()?
            } else {
                BigInt::one()
            };
            if den.is_zero() {
                return self.err("zero denominator");
            }
            coef = Rational::new(num, den);
            if self.peek() != Some(b'*') {
                return self.err("expected '*' after coefficient");
            }
            self.pos += 1;
        }
        let kind = match self.peek() {
            Some(b'C') => Kind::Overlapping,
            Some(b'N') => Kind::NonOverlapping,
            _ => return self.err("expected 'C[' or 'N['"),
        };
        self.pos += 1;
        if self.src.get(self.pos) != Some(&b'[') {
            return self.err("expected '['");
        }
        self.pos += 1;
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos] != b']' {
            self.pos += 1;
        }
        if self.pos >= self.src.len() {
            return self.err("unterminated '['");
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        self.pos += 1;
        if text.is_empty() {
            return Err(Error::EmptyPattern);
        }
        if text.len() != text.trim().len() {
            return self.err("whitespace inside pattern");
        }
        let pattern = Word::parse(self.rank, text)?;
        if pattern.is_empty() {
            return Err(Error::EmptyPattern);
        }
        Ok((kind, pattern, coef))
    }
}

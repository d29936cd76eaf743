//! Freely reduced words over a free basis `a_1, ..., a_n`.
//!
//! Generator `i` prints as the `i`-th lowercase Latin letter and its inverse
//! as the matching uppercase letter, so ranks are limited to 26. Every
//! [`Word`] is kept freely reduced; constructors reduce eagerly.

use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};

pub const MAX_RANK: usize = 26;

/// A generator or its inverse. Stored as `+i` for `a_i` and `-i` for `a_i^{-1}`.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Letter(i8);

impl Letter {
    /// `gen` is 1-based.
    pub fn new(gen: usize, positive: bool) -> Letter {
        assert!((1..=MAX_RANK).contains(&gen), "generator index {gen} out of range");
        let v = gen as i8;
        Letter(if positive { v } else { -v })
    }

    pub fn gen(self) -> usize {
        self.0.unsigned_abs() as usize
    }

    pub fn is_positive(self) -> bool {
        self.0 > 0
    }

    pub fn inverse(self) -> Letter {
        Letter(-self.0)
    }

    /// Position in the default order `a < A < b < B < ...`.
    pub fn default_key(self) -> usize {
        2 * (self.gen() - 1) + usize::from(!self.is_positive())
    }

    pub fn to_char(self) -> char {
        let c = (b'a' + (self.gen() - 1) as u8) as char;
        if self.is_positive() {
            c
        } else {
            c.to_ascii_uppercase()
        }
    }

    pub fn from_char(c: char) -> Result<Letter> {
        if c.is_ascii_lowercase() {
            Ok(Letter::new((c as u8 - b'a') as usize + 1, true))
        } else if c.is_ascii_uppercase() {
            Ok(Letter::new((c as u8 - b'A') as usize + 1, false))
        } else {
            Err(Error::InvalidChar(c))
        }
    }

    /// All `2n` letters of rank `n` in default order.
    pub fn alphabet(rank: usize) -> Vec<Letter> {
        (1..=rank)
            .flat_map(|g| [Letter::new(g, true), Letter::new(g, false)])
            .collect()
    }
}

impl Ord for Letter {
    fn cmp(&self, other: &Self) -> Ordering {
        self.default_key().cmp(&other.default_key())
    }
}

impl PartialOrd for Letter {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_char())
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_char())
    }
}

fn check_rank(rank: usize) -> Result<()> {
    if (1..=MAX_RANK).contains(&rank) {
        Ok(())
    } else {
        Err(Error::UnsupportedRank(rank))
    }
}

/// Push `x` onto an already reduced buffer, cancelling if needed.
#[inline]
pub(crate) fn push_reduced(buf: &mut Vec<Letter>, x: Letter) {
    if buf.last() == Some(&x.inverse()) {
        buf.pop();
    } else {
        buf.push(x);
    }
}

/// An element of the free group of a given rank, as its reduced word.
///
/// Ordering is lexicographic in the default letter order; use
/// [`Word::shortlex_cmp`] for length-first ordering.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word {
    rank: usize,
    letters: Vec<Letter>,
}

impl Word {
    pub fn identity(rank: usize) -> Word {
        check_rank(rank).expect("unsupported rank");
        Word { rank, letters: Vec::new() }
    }

    /// Freely reduces `letters`; fails if a generator exceeds `rank`.
    pub fn reduce<I: IntoIterator<Item = Letter>>(rank: usize, letters: I) -> Result<Word> {
        check_rank(rank)?;
        let mut buf = Vec::new();
        for x in letters {
            if x.gen() > rank {
                return Err(Error::LetterOutOfRank { index: x.gen(), rank });
            }
            push_reduced(&mut buf, x);
        }
        Ok(Word { rank, letters: buf })
    }

    /// Caller guarantees the letters are reduced and within rank.
    pub(crate) fn from_reduced_unchecked(rank: usize, letters: Vec<Letter>) -> Word {
        debug_assert!(letters.windows(2).all(|p| p[0] != p[1].inverse()));
        debug_assert!(letters.iter().all(|x| x.gen() <= rank));
        Word { rank, letters }
    }

    pub fn parse(rank: usize, text: &str) -> Result<Word> {
        check_rank(rank)?;
        let letters = text.chars().map(Letter::from_char).collect::<Result<Vec<_>>>()?;
        Word::reduce(rank, letters)
    }

    /// Smallest rank (at least `min`) that can hold every letter of `text`.
    pub fn infer_rank(text: &str, min: usize) -> usize {
        text.chars()
            .filter_map(|c| Letter::from_char(c).ok())
            .map(Letter::gen)
            .fold(min, usize::max)
    }

    pub fn generator(rank: usize, gen: usize) -> Word {
        Word::reduce(rank, [Letter::new(gen, true)]).expect("generator within rank")
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn first(&self) -> Option<Letter> {
        self.letters.first().copied()
    }

    pub fn last(&self) -> Option<Letter> {
        self.letters.last().copied()
    }

    pub fn with_rank(&self, rank: usize) -> Result<Word> {
        Word::reduce(rank, self.letters.iter().copied())
    }

    pub fn concat(&self, other: &Word) -> Result<Word> {
        if self.rank != other.rank {
            return Err(Error::RankMismatch { left: self.rank, right: other.rank });
        }
        Ok(self.mul(other))
    }

    /// Group product; panics on rank mismatch.
    pub fn mul(&self, other: &Word) -> Word {
        assert_eq!(self.rank, other.rank, "rank mismatch in word product");
        let mut buf = self.letters.clone();
        for &x in &other.letters {
            push_reduced(&mut buf, x);
        }
        Word { rank: self.rank, letters: buf }
    }

    pub fn inverse(&self) -> Word {
        Word {
            rank: self.rank,
            letters: self.letters.iter().rev().map(|x| x.inverse()).collect(),
        }
    }

    pub fn is_cyclically_reduced(&self) -> bool {
        match (self.first(), self.last()) {
            (Some(f), Some(l)) => f != l.inverse() || self.len() == 1,
            _ => true,
        }
    }

    /// Returns `(conjugator, core)` with `self = conjugator * core * conjugator^{-1}`
    /// and `core` cyclically reduced.
    pub fn cyclic_reduce(&self) -> (Word, Word) {
        let n = self.len();
        let mut i = 0;
        while 2 * i + 1 < n && self.letters[i] == self.letters[n - 1 - i].inverse() {
            i += 1;
        }
        (
            Word::from_reduced_unchecked(self.rank, self.letters[..i].to_vec()),
            Word::from_reduced_unchecked(self.rank, self.letters[i..n - i].to_vec()),
        )
    }

    pub fn pow(&self, m: i64) -> Word {
        if m == 0 || self.is_empty() {
            return Word::identity(self.rank);
        }
        if m < 0 {
            return self.inverse().pow(-m);
        }
        let (conj, core) = self.cyclic_reduce();
        let m = m as usize;
        let mut letters = Vec::with_capacity(2 * conj.len() + m * core.len());
        letters.extend_from_slice(&conj.letters);
        for _ in 0..m {
            letters.extend_from_slice(&core.letters);
        }
        letters.extend(conj.letters.iter().rev().map(|x| x.inverse()));
        Word::from_reduced_unchecked(self.rank, letters)
    }

    /// All cyclic rotations, starting with `self`.
    pub fn rotations(&self) -> Vec<Word> {
        let n = self.len().max(1);
        (0..n)
            .map(|i| {
                let mut v = self.letters[i.min(self.len())..].to_vec();
                v.extend_from_slice(&self.letters[..i.min(self.len())]);
                Word { rank: self.rank, letters: v }
            })
            .collect()
    }

    pub fn shortlex_cmp(&self, other: &Word) -> Ordering {
        self.len().cmp(&other.len()).then_with(|| self.letters.cmp(&other.letters))
    }

    /// Whether `self` is a power of the letter `b` (including the identity).
    pub fn is_power_of(&self, b: Letter) -> bool {
        self.letters.iter().all(|&x| x == b || x == b.inverse())
    }

    pub fn normal_form(&self, b: Letter) -> NormalForm {
        assert!(b.is_positive(), "normal form is taken relative to a positive generator");
        let mut exponents = vec![0i64];
        let mut interleaved = Vec::new();
        for &x in &self.letters {
            if x == b {
                *exponents.last_mut().unwrap() += 1;
            } else if x == b.inverse() {
                *exponents.last_mut().unwrap() -= 1;
            } else {
                interleaved.push(x);
                exponents.push(0);
            }
        }
        NormalForm { rank: self.rank, distinguished: b, exponents, interleaved }
    }

    /// Strips the leading and trailing powers of `b`; interior powers are kept.
    pub fn truncate(&self, b: Letter) -> Word {
        let is_b = |x: &Letter| *x == b || *x == b.inverse();
        let start = self.letters.iter().position(|x| !is_b(x));
        match start {
            None => Word::identity(self.rank),
            Some(s) => {
                let e = self.letters.iter().rposition(|x| !is_b(x)).unwrap();
                Word::from_reduced_unchecked(self.rank, self.letters[s..=e].to_vec())
            }
        }
    }

    /// Count of letter `x` in the word.
    pub fn letter_count(&self, x: Letter) -> usize {
        self.letters.iter().filter(|&&y| y == x).count()
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for x in &self.letters {
            write!(f, "{}", x.to_char())?;
        }
        Ok(())
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            write!(f, "ε")
        } else {
            write!(f, "{self}")
        }
    }
}

/// `b^{n_0} s_1 b^{n_1} ... s_l b^{n_l}` with every `s_j` different from `b^{±1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormalForm {
    pub rank: usize,
    pub distinguished: Letter,
    /// `n_0, ..., n_l`; always one longer than `interleaved`.
    pub exponents: Vec<i64>,
    /// `s_1, ..., s_l`.
    pub interleaved: Vec<Letter>,
}

impl NormalForm {
    pub fn l(&self) -> usize {
        self.interleaved.len()
    }

    /// Checks the side conditions: no `s_j` is `b^{±1}`, and a zero interior
    /// exponent never sits between mutually inverse letters.
    pub fn is_valid(&self) -> bool {
        let b = self.distinguished;
        let l = self.l();
        self.exponents.len() == l + 1
            && self.interleaved.iter().all(|&s| s != b && s != b.inverse())
            && (1..l).all(|j| self.exponents[j] != 0 || self.interleaved[j - 1] != self.interleaved[j].inverse())
    }

    /// Raw letter sequence `b^{n_0} s_1 ... s_l b^{n_l}` (not re-reduced).
    pub fn letters(&self) -> Vec<Letter> {
        let b = self.distinguished;
        let mut out = Vec::new();
        let run = |out: &mut Vec<Letter>, n: i64| {
            let x = if n >= 0 { b } else { b.inverse() };
            out.extend(std::iter::repeat_n(x, n.unsigned_abs() as usize));
        };
        run(&mut out, self.exponents[0]);
        for (j, &s) in self.interleaved.iter().enumerate() {
            out.push(s);
            run(&mut out, self.exponents[j + 1]);
        }
        out
    }

    pub fn to_word(&self) -> Word {
        Word::reduce(self.rank, self.letters()).expect("normal form letters within rank")
    }
}

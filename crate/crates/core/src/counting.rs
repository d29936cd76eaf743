//! Occurrence counting, evaluation of counting quasimorphisms, homogenization
//! and empirical defect scans.

use num::{BigInt, Signed, Zero};
use rayon::prelude::*;

use crate::enumerate::{reduced_words, WordSampler};
use crate::error::{Error, Result};
use crate::expr::{Kind, QmExpr, Rational};
use crate::word::{Letter, Word};

#[inline]
fn matches_at(pattern: &[Letter], text: &[Letter], i: usize) -> bool {
    text[i..i + pattern.len()] == *pattern
}

pub(crate) fn count_overlapping_raw(pattern: &[Letter], text: &[Letter]) -> usize {
    if pattern.len() > text.len() {
        return 0;
    }
    (0..=text.len() - pattern.len())
        .filter(|&i| matches_at(pattern, text, i))
        .count()
}

pub(crate) fn count_nonoverlapping_raw(pattern: &[Letter], text: &[Letter]) -> usize {
    let m = pattern.len();
    let mut count = 0;
    let mut i = 0;
    while i + m <= text.len() {
        if matches_at(pattern, text, i) {
            count += 1;
            i += m;
        } else {
            i += 1;
        }
    }
    count
}

/// Number of distinct start positions of `pattern` in `text`.
pub fn count_overlapping(pattern: &Word, text: &Word) -> Result<usize> {
    if pattern.is_empty() {
        return Err(Error::EmptyPattern);
    }
    Ok(count_overlapping_raw(pattern.letters(), text.letters()))
}

/// Maximum number of pairwise disjoint occurrences (leftmost greedy, which is
/// optimal because all occurrence intervals have the same length).
pub fn count_nonoverlapping(pattern: &Word, text: &Word) -> Result<usize> {
    if pattern.is_empty() {
        return Err(Error::EmptyPattern);
    }
    Ok(count_nonoverlapping_raw(pattern.letters(), text.letters()))
}

fn count_kind(kind: Kind, pattern: &[Letter], text: &[Letter]) -> usize {
    match kind {
        Kind::Overlapping => count_overlapping_raw(pattern, text),
        Kind::NonOverlapping => count_nonoverlapping_raw(pattern, text),
    }
}

/// `#_w(g) - #_{w^{-1}}(g)` for the given kind.
pub(crate) fn signed_count(kind: Kind, pattern: &Word, g: &Word) -> i64 {
    let inv = pattern.inverse();
    count_kind(kind, pattern.letters(), g.letters()) as i64
        - count_kind(kind, inv.letters(), g.letters()) as i64
}

pub fn eval(expr: &QmExpr, g: &Word) -> Result<Rational> {
    if expr.rank() != g.rank() && !expr.is_zero() {
        return Err(Error::RankMismatch { left: expr.rank(), right: g.rank() });
    }
    let mut acc = Rational::zero();
    for (t, c) in expr.terms() {
        let n = signed_count(t.kind, &t.pattern, g);
        if n != 0 {
            acc += c * Rational::from_integer(BigInt::from(n));
        }
    }
    Ok(acc)
}

/// Horizon used by [`homogenize_eval_with`]. `None` fields take the defaults
/// derived from the pattern and word lengths.
#[derive(Debug, Clone, Copy, Default)]
pub struct Horizon {
    pub max_power: Option<usize>,
    pub window: Option<usize>,
}

/// Exact value of `lim_m eval(expr, g^m) / m`.
pub fn homogenize_eval(expr: &QmExpr, g: &Word) -> Result<Rational> {
    homogenize_eval_with(expr, g, Horizon::default())
}

pub fn homogenize_eval_with(expr: &QmExpr, g: &Word, horizon: Horizon) -> Result<Rational> {
    if expr.rank() != g.rank() && !expr.is_zero() {
        return Err(Error::RankMismatch { left: expr.rank(), right: g.rank() });
    }
    let mut acc = Rational::zero();
    if g.is_empty() {
        return Ok(acc);
    }
    for (t, c) in expr.terms() {
        let plus = homogenized_count(t.kind, &t.pattern, g, horizon)?;
        let minus = homogenized_count(t.kind, &t.pattern.inverse(), g, horizon)?;
        acc += c * (plus - minus);
    }
    Ok(acc)
}

/// Asymptotic growth rate of `m -> #_u(g^m)`.
///
/// Overlapping counts become affine in `m`. Greedy non-overlapping counts
/// become affine plus a periodic term, since the greedy scan over the periodic
/// text `core^m` revisits the same phase modulo `|core|`; its period is at most
/// `|u| + |core|` powers. The rate is the constant step-`p` difference divided
/// by `p` for the smallest period `p` that holds over the final `window`
/// periods of the horizon.
fn homogenized_count(kind: Kind, pattern: &Word, g: &Word, horizon: Horizon) -> Result<Rational> {
    let (_, core) = g.cyclic_reduce();
    let max_period = match kind {
        Kind::Overlapping => 1,
        Kind::NonOverlapping => pattern.len() + core.len(),
    };
    let window = horizon.window.unwrap_or(pattern.len() + 2);
    let max_power = horizon
        .max_power
        .unwrap_or(4 * (g.len() + pattern.len()) + 8 + (window + 1) * max_period);
    let values: Vec<i64> = (0..=max_power)
        .map(|m| count_kind(kind, pattern.letters(), g.pow(m as i64).letters()) as i64)
        .collect();
    for p in 1..=max_period {
        let span = window * p;
        if max_power < p + span + 1 {
            break;
        }
        let last = max_power - p;
        let first = last - span;
        let step = values[last + p] - values[last];
        if (first..=last).all(|m| values[m + p] - values[m] == step) {
            return Ok(Rational::new(BigInt::from(step), BigInt::from(p as i64)));
        }
    }
    Err(Error::NonStabilization { pattern: pattern.to_string(), horizon: max_power })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sampler {
    Exhaustive,
    SeededRandom { samples: usize, seed: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DefectScanResult {
    pub observed_sup: Rational,
    pub witness_pair: (Word, Word),
    pub exhaustive_up_to: usize,
    pub pairs_examined: usize,
}

/// Lower bound on the defect `sup |e(uv) - e(u) - e(v)|` over reduced pairs of
/// length at most `max_len`. Ties keep the earliest pair in enumeration order.
pub fn defect_scan(expr: &QmExpr, max_len: usize, sampler: Sampler) -> Result<DefectScanResult> {
    defect_scan_by(expr.rank(), max_len, sampler, |w| eval(expr, w))
}

/// Defect scan for an arbitrary rational-valued function on words.
pub fn defect_scan_by<F>(rank: usize, max_len: usize, sampler: Sampler, f: F) -> Result<DefectScanResult>
where
    F: Fn(&Word) -> Result<Rational> + Sync,
{
    let (words, sampled): (Vec<Word>, Vec<(Word, Word)>) = match sampler {
        Sampler::Exhaustive => (reduced_words(rank, max_len), Vec::new()),
        Sampler::SeededRandom { samples, seed } => {
            let mut s = WordSampler::new(rank, max_len, seed);
            (Vec::new(), (0..samples).map(|_| (s.sample(), s.sample())).collect())
        }
    };
    let pair = |i: usize| -> (&Word, &Word) {
        if words.is_empty() {
            (&sampled[i].0, &sampled[i].1)
        } else {
            (&words[i / words.len()], &words[i % words.len()])
        }
    };
    let n = if words.is_empty() { sampled.len() } else { words.len() * words.len() };
    let (sup, idx) = (0..n)
        .into_par_iter()
        .map(|i| -> Result<(Rational, usize)> {
            let (u, v) = pair(i);
            let d = f(&u.mul(v))? - f(u)? - f(v)?;
            Ok((d.abs(), i))
        })
        .try_reduce(
            || (Rational::from_integer((-1).into()), usize::MAX),
            |a, b| Ok(if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) { b } else { a }),
        )?;
    let witness_pair = if idx == usize::MAX {
        (Word::identity(rank), Word::identity(rank))
    } else {
        let (u, v) = pair(idx);
        (u.clone(), v.clone())
    };
    Ok(DefectScanResult {
        observed_sup: if idx == usize::MAX { Rational::zero() } else { sup },
        witness_pair,
        exhaustive_up_to: max_len,
        pairs_examined: n,
    })
}

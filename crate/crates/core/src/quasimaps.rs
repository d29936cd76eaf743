//! Quasi-endomorphisms of free groups given by explicit rules: Nielsen words,
//! local transformations, wobbling maps, word replacements, the surjection
//! `F_{n-1} -> F_n`, and chains of these.

use std::collections::BTreeMap;

use num::Zero;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::counting::eval;
use crate::enumerate::{reduced_words, reduced_words_of_len};
use crate::error::{Error, Result};
use crate::expr::{QmExpr, Rational};
use crate::independence::is_independent_set;
use crate::nielsen::{apply_word, NielsenWord};
use crate::word::{push_reduced, Letter, Word};

/// Sliding-window map `w ↦ f(w_1..w_k) f(w_2..w_{k+1}) ...`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalTransformation {
    pub dom_rank: usize,
    pub cod_rank: usize,
    pub window: usize,
    pub table: BTreeMap<Word, Word>,
}

impl LocalTransformation {
    /// Checks totality on reduced `window`-letter words and the symmetry
    /// `f(u^{-1}) = f(u)^{-1}`.
    pub fn new(
        dom_rank: usize,
        cod_rank: usize,
        window: usize,
        table: BTreeMap<Word, Word>,
    ) -> Result<LocalTransformation> {
        if window == 0 {
            return Err(Error::InvalidLocal("window must be at least 1".into()));
        }
        for u in reduced_words_of_len(dom_rank, window) {
            let Some(img) = table.get(&u) else {
                return Err(Error::InvalidLocal(format!("no entry for {u}")));
            };
            if img.rank() != cod_rank {
                return Err(Error::InvalidLocal(format!("entry for {u} has wrong rank")));
            }
            if table.get(&u.inverse()) != Some(&img.inverse()) {
                return Err(Error::InvalidLocal(format!("entry for {u} is not symmetric")));
            }
        }
        if table.len() != reduced_words_of_len(dom_rank, window).len()
            || table.keys().any(|k| k.len() != window || k.rank() != dom_rank)
        {
            return Err(Error::InvalidLocal("table has keys of the wrong shape".into()));
        }
        Ok(LocalTransformation { dom_rank, cod_rank, window, table })
    }

    pub fn identity(rank: usize) -> LocalTransformation {
        let table = reduced_words_of_len(rank, 1).into_iter().map(|u| (u.clone(), u)).collect();
        LocalTransformation { dom_rank: rank, cod_rank: rank, window: 1, table }
    }

    pub fn apply(&self, g: &Word) -> Word {
        let k = self.window;
        let mut out = Vec::new();
        if g.len() >= k {
            for i in 0..=g.len() - k {
                let key = Word::from_reduced_unchecked(self.dom_rank, g.letters()[i..i + k].to_vec());
                for &x in self.table[&key].letters() {
                    push_reduced(&mut out, x);
                }
            }
        }
        Word::from_reduced_unchecked(self.cod_rank, out)
    }

    fn max_image_len(&self) -> usize {
        self.table.values().map(Word::len).max().unwrap_or(0)
    }
}

/// An element `σ` of the monoid of maps `N_0 -> N_0` with `σ(0) = 0` and
/// bounded displacement: explicit values on `1..=horizon`, then `k ↦ k + d`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WobblingMap {
    horizon: u64,
    exceptions: BTreeMap<u64, u64>,
    tail_shift: i64,
}

impl WobblingMap {
    /// `horizon` defaults to the largest exception key.
    pub fn new(exceptions: BTreeMap<u64, u64>, tail_shift: i64, horizon: Option<u64>) -> Result<WobblingMap> {
        if let Some(&v) = exceptions.get(&0) {
            if v != 0 {
                return Err(Error::InvalidWobble("σ(0) must be 0".into()));
            }
        }
        let max_key = exceptions.keys().next_back().copied().unwrap_or(0);
        let horizon = horizon.unwrap_or(max_key);
        if max_key > horizon {
            return Err(Error::InvalidWobble(format!("exception at {max_key} beyond horizon {horizon}")));
        }
        if (horizon as i64) + 1 + tail_shift < 0 {
            return Err(Error::InvalidWobble("tail shift sends values below 0".into()));
        }
        let mut m = WobblingMap { horizon, exceptions, tail_shift };
        m.exceptions.remove(&0);
        m.normalize();
        Ok(m)
    }

    pub fn identity() -> WobblingMap {
        WobblingMap { horizon: 0, exceptions: BTreeMap::new(), tail_shift: 0 }
    }

    pub fn horizon(&self) -> u64 {
        self.horizon
    }

    pub fn tail_shift(&self) -> i64 {
        self.tail_shift
    }

    pub fn exceptions(&self) -> &BTreeMap<u64, u64> {
        &self.exceptions
    }

    pub fn eval(&self, k: u64) -> u64 {
        if k == 0 {
            0
        } else if k <= self.horizon {
            self.exceptions.get(&k).copied().unwrap_or(k)
        } else {
            (k as i64 + self.tail_shift) as u64
        }
    }

    /// `sup_k |σ(k) - k|`.
    pub fn displacement(&self) -> u64 {
        let inner = (1..=self.horizon).map(|k| self.eval(k).abs_diff(k)).max().unwrap_or(0);
        inner.max(self.tail_shift.unsigned_abs())
    }

    /// Shrinks the horizon while the tail rule already gives the right value,
    /// and drops identity exceptions, so equal maps compare equal.
    fn normalize(&mut self) {
        while self.horizon > 0 {
            let k = self.horizon;
            if self.eval(k) as i64 == k as i64 + self.tail_shift {
                self.exceptions.remove(&k);
                self.horizon -= 1;
            } else {
                break;
            }
        }
        self.exceptions.retain(|k, v| k != v);
    }

    /// `self ∘ other`, i.e. `k ↦ self(other(k))`.
    pub fn compose(&self, other: &WobblingMap) -> WobblingMap {
        let h = other.horizon.max((self.horizon as i64 - other.tail_shift).max(0) as u64);
        let exceptions = (1..=h).map(|k| (k, self.eval(other.eval(k)))).collect();
        let mut m = WobblingMap { horizon: h, exceptions, tail_shift: self.tail_shift + other.tail_shift };
        m.normalize();
        m
    }

    /// `π_σ`: every maximal run `a_n^i` becomes `a_n^{sign(i) σ(|i|)}`,
    /// boundary runs included.
    pub fn apply(&self, g: &Word) -> Word {
        let rank = g.rank();
        let t = Letter::new(rank, true);
        let mut out = Vec::with_capacity(g.len());
        let letters = g.letters();
        let mut i = 0;
        while i < letters.len() {
            let x = letters[i];
            if x.gen() != rank {
                push_reduced(&mut out, x);
                i += 1;
                continue;
            }
            let mut j = i;
            while j < letters.len() && letters[j] == x {
                j += 1;
            }
            let img = self.eval((j - i) as u64);
            let y = if x == t { t } else { t.inverse() };
            for _ in 0..img {
                push_reduced(&mut out, y);
            }
            i = j;
        }
        Word::from_reduced_unchecked(rank, out)
    }
}

/// Image of a bounded-displacement permutation of `Z` (given on its finite
/// support) under `i ↦ 2i+2` for `i ≥ 0`, `i ↦ -2i-1` for `i < 0`.
pub fn embed_wobbling(perm: &BTreeMap<i64, i64>) -> Result<WobblingMap> {
    let mut values: Vec<i64> = perm.values().copied().collect();
    values.sort_unstable();
    let keys: Vec<i64> = perm.keys().copied().collect();
    if values != keys {
        return Err(Error::NotBijective);
    }
    let iota = |i: i64| -> u64 { if i >= 0 { (2 * i + 2) as u64 } else { (-2 * i - 1) as u64 } };
    let exceptions: BTreeMap<u64, u64> = perm.iter().map(|(&i, &j)| (iota(i), iota(j))).collect();
    WobblingMap::new(exceptions, 0, None)
}

/// Two words swapped by the word-replacement map.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReplacementPair {
    w1: Word,
    w2: Word,
}

impl ReplacementPair {
    pub fn new(w1: Word, w2: Word) -> Result<ReplacementPair> {
        let bad = |why: &str| Err(Error::InvalidReplacementPair(format!("{{{w1}, {w2}}}: {why}")));
        if w1.rank() != w2.rank() {
            return Err(Error::RankMismatch { left: w1.rank(), right: w2.rank() });
        }
        if w1.is_empty() || w2.is_empty() || w1 == w2 {
            return bad("need two distinct non-empty words");
        }
        if !is_independent_set(&[w1.clone(), w2.clone()]) {
            return bad("not independent");
        }
        if w1.first() != w2.first() || w1.last() != w2.last() {
            return bad("first or last letters differ");
        }
        Ok(ReplacementPair { w1, w2 })
    }

    pub fn w1(&self) -> &Word {
        &self.w1
    }

    pub fn w2(&self) -> &Word {
        &self.w2
    }

    pub fn apply(&self, g: &Word) -> Word {
        let set = [self.w1.clone(), self.w2.clone()];
        let swap = [self.w2.clone(), self.w1.clone()];
        let mut out = Vec::with_capacity(g.len());
        for (part, hit) in marked_parts(&set, g) {
            let img = match hit {
                None => part,
                Some((i, false)) => swap[i].clone(),
                Some((i, true)) => swap[i].inverse(),
            };
            for &x in img.letters() {
                push_reduced(&mut out, x);
            }
        }
        Word::from_reduced_unchecked(g.rank(), out)
    }

    fn radius(&self) -> usize {
        2 * self.w1.len().max(self.w2.len())
    }
}

/// Parts of the minimal W-maximal decomposition, each tagged with the
/// member it matches (index and whether it is the inverse). Assumes `set` is
/// independent.
fn marked_parts(set: &[Word], g: &Word) -> Vec<(Word, Option<(usize, bool)>)> {
    let pats: Vec<(Word, usize, bool)> = set
        .iter()
        .enumerate()
        .flat_map(|(i, w)| [(w.clone(), i, false), (w.inverse(), i, true)])
        .collect();
    let text = g.letters();
    let mut parts = Vec::new();
    let mut gap_start = 0;
    let mut i = 0;
    let piece = |a: usize, b: usize| Word::from_reduced_unchecked(g.rank(), text[a..b].to_vec());
    while i < text.len() {
        let hit = pats
            .iter()
            .find(|(p, _, _)| text.len() - i >= p.len() && text[i..i + p.len()] == *p.letters());
        match hit {
            Some((p, idx, inv)) => {
                if gap_start < i {
                    parts.push((piece(gap_start, i), None));
                }
                parts.push((p.clone(), Some((*idx, *inv))));
                i += p.len();
                gap_start = i;
            }
            None => i += 1,
        }
    }
    if gap_start < text.len() {
        parts.push((piece(gap_start, text.len()), None));
    }
    parts
}

/// The unique minimal W-maximal decomposition of `g`.
pub fn decompose(set: &[Word], g: &Word) -> Result<Vec<Word>> {
    if set.iter().any(|w| w.rank() != g.rank()) {
        return Err(Error::RankMismatch { left: set[0].rank(), right: g.rank() });
    }
    if !is_independent_set(set) {
        return Err(Error::NotIndependent);
    }
    Ok(marked_parts(set, g).into_iter().map(|(p, _)| p).collect())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MapBody {
    Nielsen(NielsenWord),
    Local(LocalTransformation),
    Wobble(WobblingMap),
    Replace(ReplacementPair),
    /// The windowed map `F_{n-1} -> F_n` (before the wobbling correction).
    Surjection(usize),
    Chain(Vec<QuasiMap>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuasiMap {
    pub dom_rank: usize,
    pub cod_rank: usize,
    pub body: MapBody,
}

impl QuasiMap {
    pub fn nielsen(nw: NielsenWord) -> QuasiMap {
        QuasiMap { dom_rank: nw.rank, cod_rank: nw.rank, body: MapBody::Nielsen(nw) }
    }

    pub fn local(l: LocalTransformation) -> QuasiMap {
        QuasiMap { dom_rank: l.dom_rank, cod_rank: l.cod_rank, body: MapBody::Local(l) }
    }

    pub fn wobble(rank: usize, sigma: WobblingMap) -> QuasiMap {
        QuasiMap { dom_rank: rank, cod_rank: rank, body: MapBody::Wobble(sigma) }
    }

    pub fn replace(p: ReplacementPair) -> QuasiMap {
        let r = p.w1.rank();
        QuasiMap { dom_rank: r, cod_rank: r, body: MapBody::Replace(p) }
    }

    pub fn surjection_stage(n: usize) -> Result<QuasiMap> {
        if n < 4 {
            return Err(Error::RankTooSmall { required: 4, rank: n });
        }
        Ok(QuasiMap { dom_rank: n - 1, cod_rank: n, body: MapBody::Surjection(n) })
    }

    pub fn chain(stages: Vec<QuasiMap>) -> Result<QuasiMap> {
        let Some(first) = stages.first() else {
            return Err(Error::InvalidSpec("empty chain".into()));
        };
        for p in stages.windows(2) {
            if p[0].cod_rank != p[1].dom_rank {
                return Err(Error::RankMismatch { left: p[0].cod_rank, right: p[1].dom_rank });
            }
        }
        let (dom_rank, cod_rank) = (first.dom_rank, stages.last().unwrap().cod_rank);
        Ok(QuasiMap { dom_rank, cod_rank, body: MapBody::Chain(stages) })
    }

    pub fn apply(&self, g: &Word) -> Result<Word> {
        if g.rank() != self.dom_rank {
            return Err(Error::RankMismatch { left: self.dom_rank, right: g.rank() });
        }
        Ok(match &self.body {
            MapBody::Nielsen(nw) => apply_word(nw, g)?,
            MapBody::Local(l) => l.apply(g),
            MapBody::Wobble(s) => s.apply(g),
            MapBody::Replace(p) => p.apply(g),
            MapBody::Surjection(n) => surjection_window_map(*n, g),
            MapBody::Chain(stages) => {
                let mut cur = g.clone();
                for s in stages {
                    cur = s.apply(&cur)?;
                }
                cur
            }
        })
    }

    /// Radius `r` such that the ball `E` of radius `r` satisfies the
    /// reduced-splitting criterion for this map; `None` for chains.
    pub fn criterion_radius(&self) -> Option<usize> {
        match &self.body {
            MapBody::Nielsen(_) => Some(0),
            MapBody::Local(l) => Some(l.window * l.max_image_len()),
            MapBody::Wobble(s) => Some(3 * s.displacement() as usize),
            MapBody::Replace(p) => Some(p.radius()),
            MapBody::Surjection(_) => Some(3),
            MapBody::Chain(_) => None,
        }
    }
}

/// `q1` followed by `q2`.
pub fn compose(q1: &QuasiMap, q2: &QuasiMap) -> Result<QuasiMap> {
    if q1.cod_rank != q2.dom_rank {
        return Err(Error::RankMismatch { left: q1.cod_rank, right: q2.dom_rank });
    }
    let mut stages = Vec::new();
    for q in [q1, q2] {
        match &q.body {
            MapBody::Chain(s) => stages.extend(s.iter().cloned()),
            _ => stages.push(q.clone()),
        }
    }
    QuasiMap::chain(stages)
}

pub fn pullback_eval(q: &QuasiMap, e: &QmExpr, g: &Word) -> Result<Rational> {
    if e.is_zero() {
        q.apply(g)?;
        return Ok(Rational::zero());
    }
    if e.rank() != q.cod_rank {
        return Err(Error::RankMismatch { left: q.cod_rank, right: e.rank() });
    }
    eval(e, &q.apply(g)?)
}

/// `φ(s_1 ... s_l) = f(s_1 s_2) ... f(s_{l-1} s_l) s_l` where the domain
/// letter `a_i` stands for `a_{i+1}`, `f(a_2 a_3) = a_1 a_3^{-1}`,
/// `f(a_3^{-1} a_2^{-1}) = a_1^{-1} a_2` and `f(s t) = s` otherwise.
fn surjection_window_map(n: usize, g: &Word) -> Word {
    let lift = |x: Letter| Letter::new(x.gen() + 1, x.is_positive());
    let s: Vec<Letter> = g.letters().iter().map(|&x| lift(x)).collect();
    let l = |i: usize, p: bool| Letter::new(i, p);
    let mut out = Vec::with_capacity(2 * s.len());
    for i in 0..s.len() {
        let img: Vec<Letter> = match s.get(i + 1) {
            None => vec![s[i]],
            Some(&t) if s[i] == l(2, true) && t == l(3, true) => vec![l(1, true), l(3, false)],
            Some(&t) if s[i] == l(3, false) && t == l(2, false) => vec![l(1, false), l(2, true)],
            Some(_) => vec![s[i]],
        };
        for x in img {
            push_reduced(&mut out, x);
        }
    }
    Word::from_reduced_unchecked(n, out)
}

/// The surjective quasimorphism `F_{n-1} -> F_n`: the windowed map followed
/// by shortening every `a_n` run by one.
pub fn surjection_map(n: usize) -> Result<QuasiMap> {
    let stage = QuasiMap::surjection_stage(n)?;
    let shorten = WobblingMap::new(BTreeMap::from([(1, 0)]), -1, Some(1))?;
    QuasiMap::chain(vec![stage, QuasiMap::wobble(n, shorten)])
}

/// A preimage of `w` under [`surjection_map`]: lengthen every `a_n` run by one
/// (inserting `a_n` between adjacent letters of other generators), then
/// substitute `a_1 -> a_2 a_3`, `a_1^{-1} -> a_3^{-1} a_2^{-1}` and shift
/// indices down.
pub fn surjection_preimage(n: usize, w: &Word) -> Result<Word> {
    if n < 4 {
        return Err(Error::RankTooSmall { required: 4, rank: n });
    }
    if w.rank() != n {
        return Err(Error::RankMismatch { left: n, right: w.rank() });
    }
    let t = Letter::new(n, true);
    // run-length form: runs[j] is the exponent of a_n before letters[j]
    let mut others = Vec::new();
    let mut runs = vec![0i64];
    for &x in w.letters() {
        if x.gen() == n {
            *runs.last_mut().unwrap() += if x == t { 1 } else { -1 };
        } else {
            others.push(x);
            runs.push(0);
        }
    }
    let mut lifted = Vec::new();
    let emit = |out: &mut Vec<Letter>, e: i64| {
        let e = if e >= 0 { e + 1 } else { e - 1 };
        let y = if e > 0 { t } else { t.inverse() };
        out.extend(std::iter::repeat_n(y, e.unsigned_abs() as usize));
    };
    emit(&mut lifted, runs[0]);
    for (j, &x) in others.iter().enumerate() {
        match (x.gen(), x.is_positive()) {
            (1, true) => lifted.extend([Letter::new(2, true), Letter::new(3, true)]),
            (1, false) => lifted.extend([Letter::new(3, false), Letter::new(2, false)]),
            _ => lifted.push(x),
        }
        emit(&mut lifted, runs[j + 1]);
    }
    let lowered: Vec<Letter> = lifted.iter().map(|x| Letter::new(x.gen() - 1, x.is_positive())).collect();
    Word::reduce(n - 1, lowered)
}

/// Whether `x ∈ E y E z E` for `E` the ball of radius `r`.
fn in_triple_product(x: &Word, y: &Word, z: &Word, r: usize) -> bool {
    let direct = y.inverse().mul(x).mul(&z.inverse());
    if direct.len() <= r {
        return true;
    }
    let ball = reduced_words(x.rank(), r);
    ball.iter().any(|e1| {
        let left = e1.mul(y).inverse().mul(x);
        ball.iter().any(|e3| left.mul(&z.mul(e3).inverse()).len() <= r)
    })
}

/// Whether `x ∈ E y E` for `E` the ball of radius `r`.
fn in_double_product(x: &Word, y: &Word, r: usize) -> bool {
    let e = Word::identity(x.rank());
    in_triple_product(x, y, &e, r)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CriterionReport {
    pub radius: usize,
    pub splittings_checked: usize,
    pub violations: usize,
    /// First failing word and split point (`None` split means the inverse clause).
    pub witness: Option<(Word, Option<usize>)>,
}

/// Checks `f(w_1 w_2) ∈ E f(w_1) E f(w_2) E` over all reduced splittings and
/// `f(w^{-1}) ∈ E f(w)^{-1} E`, for all words of length at most `max_len`.
pub fn check_criterion(q: &QuasiMap, max_len: usize) -> Result<CriterionReport> {
    check_criterion_on(q, &reduced_words(q.dom_rank, max_len))
}

/// [`check_criterion`] over an explicit list of words.
pub fn check_criterion_on(q: &QuasiMap, words: &[Word]) -> Result<CriterionReport> {
    let radius = q.criterion_radius().ok_or_else(|| Error::InvalidSpec("chains carry no criterion radius".into()))?;
    if let Some(w) = words.iter().find(|w| w.rank() != q.dom_rank) {
        return Err(Error::RankMismatch { left: q.dom_rank, right: w.rank() });
    }
    let per_word: Vec<(usize, Vec<Option<usize>>)> = words
        .par_iter()
        .map(|w| -> Result<(usize, Vec<Option<usize>>)> {
            let fw = q.apply(w)?;
            let mut fails = Vec::new();
            let n = w.len();
            for i in 0..=n {
                let (a, b) = (
                    Word::from_reduced_unchecked(w.rank(), w.letters()[..i].to_vec()),
                    Word::from_reduced_unchecked(w.rank(), w.letters()[i..].to_vec()),
                );
                if !in_triple_product(&fw, &q.apply(&a)?, &q.apply(&b)?, radius) {
                    fails.push(Some(i));
                }
            }
            if !in_double_product(&q.apply(&w.inverse())?, &fw.inverse(), radius) {
                fails.push(None);
            }
            Ok((n + 2, fails))
        })
        .collect::<Result<_>>()?;
    let mut report = CriterionReport { radius, splittings_checked: 0, violations: 0, witness: None };
    for (w, (checked, fails)) in words.iter().zip(per_word) {
        report.splittings_checked += checked;
        report.violations += fails.len();
        if report.witness.is_none() {
            if let Some(&f) = fails.first() {
                report.witness = Some((w.clone(), f));
            }
        }
    }
    Ok(report)
}

// ---- map-spec JSON ----

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MapSpec {
    pub dom_rank: usize,
    pub cod_rank: usize,
    pub body: BodySpec,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum BodySpec {
    Nielsen {
        moves: String,
    },
    Local {
        window: usize,
        table: BTreeMap<String, String>,
    },
    Wobble {
        /// Keys are decimal integers.
        exceptions: BTreeMap<String, u64>,
        tail_shift: i64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        horizon: Option<u64>,
    },
    Replace {
        w1: String,
        w2: String,
    },
    Surjection {
        n: usize,
    },
    Chain {
        stages: Vec<MapSpec>,
    },
}

impl QuasiMap {
    pub fn from_spec(spec: &MapSpec) -> Result<QuasiMap> {
        let (d, c) = (spec.dom_rank, spec.cod_rank);
        let same = || {
            if d == c {
                Ok(())
            } else {
                Err(Error::RankMismatch { left: d, right: c })
            }
        };
        let q = match &spec.body {
            BodySpec::Nielsen { moves } => {
                same()?;
                QuasiMap::nielsen(NielsenWord::parse(d, moves)?)
            }
            BodySpec::Local { window, table } => {
                let mut t = BTreeMap::new();
                for (k, v) in table {
                    t.insert(Word::parse(d, k)?, Word::parse(c, v)?);
                }
                QuasiMap::local(LocalTransformation::new(d, c, *window, t)?)
            }
            BodySpec::Wobble { exceptions, tail_shift, horizon } => {
                same()?;
                let mut ex = BTreeMap::new();
                for (k, v) in exceptions {
                    let k: u64 = k.parse().map_err(|_| Error::InvalidWobble(format!("bad key {k:?}")))?;
                    ex.insert(k, *v);
                }
                QuasiMap::wobble(d, WobblingMap::new(ex, *tail_shift, *horizon)?)
            }
            BodySpec::Replace { w1, w2 } => {
                same()?;
                QuasiMap::replace(ReplacementPair::new(Word::parse(d, w1)?, Word::parse(d, w2)?)?)
            }
            BodySpec::Surjection { n } => {
                let q = QuasiMap::surjection_stage(*n)?;
                if (q.dom_rank, q.cod_rank) != (d, c) {
                    return Err(Error::InvalidSpec(format!("surjection {n} maps rank {} to {}", n - 1, n)));
                }
                q
            }
            BodySpec::Chain { stages } => {
                let q = QuasiMap::chain(stages.iter().map(QuasiMap::from_spec).collect::<Result<_>>()?)?;
                if (q.dom_rank, q.cod_rank) != (d, c) {
                    return Err(Error::InvalidSpec("chain ranks disagree with the declared ranks".into()));
                }
                q
            }
        };
        Ok(q)
    }

    pub fn to_spec(&self) -> MapSpec {
        let body = match &self.body {
            MapBody::Nielsen(nw) => BodySpec::Nielsen { moves: nw.to_string() },
            MapBody::Local(l) => BodySpec::Local {
                window: l.window,
                table: l.table.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect(),
            },
            MapBody::Wobble(s) => BodySpec::Wobble {
                exceptions: s.exceptions.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
                tail_shift: s.tail_shift,
                horizon: Some(s.horizon),
            },
            MapBody::Replace(p) => BodySpec::Replace { w1: p.w1.to_string(), w2: p.w2.to_string() },
            MapBody::Surjection(n) => BodySpec::Surjection { n: *n },
            MapBody::Chain(stages) => BodySpec::Chain { stages: stages.iter().map(QuasiMap::to_spec).collect() },
        };
        MapSpec { dom_rank: self.dom_rank, cod_rank: self.cod_rank, body }
    }

    pub fn from_json(text: &str) -> Result<QuasiMap> {
        let spec: MapSpec = serde_json::from_str(text).map_err(|e| Error::InvalidSpec(e.to_string()))?;
        QuasiMap::from_spec(&spec)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::rational;

    fn w(s: &str) -> Word {
        Word::parse(2, s).unwrap()
    }

    fn strs(v: &[Word]) -> Vec<String> {
        v.iter().map(Word::to_string).collect()
    }

    #[test]
    fn decompose_examples() {
        assert_eq!(strs(&decompose(&[w("aBAb"), w("abb")], &w("aBAbabb")).unwrap()), ["aBAb", "abb"]);
        assert!(decompose(&[w("ab")], &Word::identity(2)).unwrap().is_empty());
        assert_eq!(strs(&decompose(&[w("ab")], &w("aab")).unwrap()), ["a", "ab"]);
        assert_eq!(strs(&decompose(&[w("ab")], &w("aBAbaa")).unwrap()), ["a", "BA", "baa"]);
        assert_eq!(decompose(&[w("aBAb"), w("ab")], &w("aBAbab")), Err(Error::NotIndependent));
    }

    #[test]
    fn replace_examples() {
        let p = ReplacementPair::new(w("aBAb"), w("abb")).unwrap();
        assert_eq!(p.apply(&w("aBAbabb")), w("abbaBAb"));
        assert_eq!(p.apply(&w("BBAbAB")), w("BabAbAB"));
        assert!(matches!(ReplacementPair::new(w("aBAb"), w("ab")), Err(Error::InvalidReplacementPair(_))));
        assert!(matches!(ReplacementPair::new(w("ab"), w("abb")), Err(Error::InvalidReplacementPair(_))));
    }

    #[test]
    fn wobble_examples() {
        let swap = WobblingMap::new(BTreeMap::from([(1, 2), (2, 1)]), 0, None).unwrap();
        assert_eq!(swap.apply(&w("abba")), w("aba"));
        assert_eq!(swap.apply(&w("bab")), w("bbabb"));
        assert_eq!(swap.apply(&w("aBBa")), w("aBa"));
        assert_eq!(swap.compose(&swap), WobblingMap::identity());
        assert!(WobblingMap::new(BTreeMap::from([(0, 1)]), 0, None).is_err());
        assert!(WobblingMap::new(BTreeMap::new(), -2, Some(0)).is_err());
    }

    #[test]
    fn wobble_compose_matches_pointwise() {
        let s = WobblingMap::new(BTreeMap::from([(1, 3), (2, 5)]), 2, Some(3)).unwrap();
        let t = WobblingMap::new(BTreeMap::from([(1, 0), (4, 1)]), -1, Some(5)).unwrap();
        let st = s.compose(&t);
        for k in 0..40 {
            assert_eq!(st.eval(k), s.eval(t.eval(k)), "k={k}");
        }
    }

    #[test]
    fn embedding_examples() {
        assert_eq!(embed_wobbling(&BTreeMap::new()).unwrap(), WobblingMap::identity());
        let t = embed_wobbling(&BTreeMap::from([(0, 1), (1, 0)])).unwrap();
        assert_eq!((t.eval(2), t.eval(4), t.eval(1), t.eval(3)), (4, 2, 1, 3));
        let t = embed_wobbling(&BTreeMap::from([(0, -1), (-1, 0)])).unwrap();
        assert_eq!((t.eval(2), t.eval(1), t.eval(4)), (1, 2, 4));
        assert_eq!(embed_wobbling(&BTreeMap::from([(0, 1), (1, 1)])), Err(Error::NotBijective));
        let c3 = embed_wobbling(&BTreeMap::from([(0, 1), (1, -1), (-1, 0)])).unwrap();
        assert_ne!(c3.compose(&c3), WobblingMap::identity());
        assert_eq!(c3.compose(&c3).compose(&c3), WobblingMap::identity());
    }

    #[test]
    fn local_identity_and_window() {
        let id = LocalTransformation::identity(2);
        assert_eq!(id.apply(&w("aBBa")), w("aBBa"));
        let mut table = BTreeMap::new();
        for u in reduced_words_of_len(2, 2) {
            table.insert(u.clone(), Word::from_reduced_unchecked(2, vec![u.letters()[0]]));
        }
        assert!(LocalTransformation::new(2, 2, 2, table.clone()).is_err());
        let l = LocalTransformation { dom_rank: 2, cod_rank: 2, window: 2, table };
        assert_eq!(l.apply(&w("a")), Word::identity(2));
        assert_eq!(l.apply(&w("abb")), w("ab"));
    }

    #[test]
    fn surjection_examples() {
        let q = surjection_map(4).unwrap();
        assert_eq!((q.dom_rank, q.cod_rank), (3, 4));
        let e = Word::identity(4);
        let p = surjection_preimage(4, &e).unwrap();
        assert_eq!(q.apply(&p).unwrap(), e);
        let a = Word::parse(4, "a").unwrap();
        let p = surjection_preimage(4, &a).unwrap();
        // domain letters a,b,c stand for a_2,a_3,a_4
        assert_eq!(p.to_string(), "cabc");
        assert_eq!(q.apply(&p).unwrap(), a);
        assert!(surjection_map(3).is_err());
    }

    #[test]
    fn pullback_eval_swap() {
        let q = QuasiMap::replace(ReplacementPair::new(w("aBAb"), w("aab")).unwrap());
        let c1 = QmExpr::parse(2, "C[aBAb]").unwrap();
        let c2 = QmExpr::parse(2, "C[aab]").unwrap();
        for g in reduced_words(2, 6) {
            assert_eq!(pullback_eval(&q, &c1, &g).unwrap(), eval(&c2, &g).unwrap());
        }
        assert_eq!(pullback_eval(&q, &QmExpr::zero(2), &w("ab")).unwrap(), rational(0));
    }

    #[test]
    fn spec_roundtrip() {
        let text = r#"{"dom_rank":2,"cod_rank":2,"body":{"kind":"replace","w1":"aBAb","w2":"abb"}}"#;
        let q = QuasiMap::from_json(text).unwrap();
        assert_eq!(serde_json::to_string(&q.to_spec()).unwrap(), text);
        let bad = r#"{"dom_rank":2,"cod_rank":2,"body":{"kind":"replace","w1":"aBAb","w2":"ab"}}"#;
        assert!(matches!(QuasiMap::from_json(bad), Err(Error::InvalidReplacementPair(_))));
        let wob = r#"{"dom_rank":2,"cod_rank":2,"body":{"kind":"wobble","exceptions":{"1":2,"2":1},"tail_shift":0}}"#;
        let q = QuasiMap::from_json(wob).unwrap();
        assert_eq!(q.apply(&w("abba")).unwrap(), w("aba"));
        let s = surjection_map(4).unwrap();
        assert_eq!(QuasiMap::from_spec(&s.to_spec()).unwrap(), s);
    }

    #[test]
    fn criterion_holds_for_basic_maps() {
        let maps = vec![
            QuasiMap::nielsen(NielsenWord::parse(2, "T,P1").unwrap()),
            QuasiMap::replace(ReplacementPair::new(w("aBAb"), w("abb")).unwrap()),
            QuasiMap::wobble(2, WobblingMap::new(BTreeMap::from([(1, 2), (2, 1)]), 0, None).unwrap()),
            QuasiMap::local(LocalTransformation::identity(2)),
        ];
        for q in maps {
            let r = check_criterion(&q, 5).unwrap();
            assert_eq!(r.violations, 0, "{:?}", r.witness);
        }
    }
}

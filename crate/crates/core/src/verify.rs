//! Registry of brute-force checks. Each check enumerates a finite domain of
//! words (or samples it when too large) and reports the observed supremum of
//! some discrepancy against the claimed bound.

use std::collections::BTreeMap;

use num::{Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::counting::{count_overlapping, eval, homogenize_eval};
use crate::enumerate::{cyclically_reduced_words, reduced_word_count, reduced_words, WordSampler};
use crate::error::{Error, Result};
use crate::expr::{rational, ratio, Kind, QmExpr, Rational};
use crate::independence::{grigorchuk_family, overlaps, LetterOrder};
use crate::linalg::IncrementalBasis;
use crate::nielsen::{
    apply_move, pullback_t_bpower, reduction_trick, t_pullback_patterns, NielsenMove, NielsenWord,
};
use crate::quasimaps::{
    check_criterion_on, embed_wobbling, surjection_map, surjection_preimage, LocalTransformation, QuasiMap,
    ReplacementPair, WobblingMap,
};
use crate::word::{Letter, Word};

/// Largest number of enumerated words checked exhaustively.
pub const EXHAUSTIVE_BUDGET: u128 = 500_000;
/// Sample size once the budget is exceeded.
pub const SAMPLE_SIZE: usize = 100_000;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CheckParams {
    pub rank: Option<usize>,
    pub max_len: Option<usize>,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Claimed {
    Bound(Rational),
    /// Equality is claimed; the observed value is a discrepancy that must be 0.
    Exact,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerificationReport {
    pub lemma: String,
    pub claimed: Claimed,
    pub observed: Rational,
    pub witness: Vec<String>,
    pub space: String,
    pub pass: bool,
}

impl VerificationReport {
    fn new(lemma: &str, claimed: Claimed, observed: Rational, witness: Vec<String>, space: String) -> Self {
        let pass = match &claimed {
            Claimed::Bound(b) => observed <= *b,
            Claimed::Exact => observed.is_zero(),
        };
        VerificationReport { lemma: lemma.to_string(), claimed, observed, witness, space, pass }
    }

    pub fn to_json(&self) -> Value {
        let claimed = match &self.claimed {
            Claimed::Exact => json!("exact(0)"),
            Claimed::Bound(b) => match b.to_integer().to_i64() {
                Some(n) if b.is_integer() => json!(n),
                _ => json!(b.to_string()),
            },
        };
        json!({
            "lemma": self.lemma,
            "claimed": claimed,
            "observed": self.observed.to_string(),
            "witness": self.witness,
            "space": self.space,
            "pass": self.pass,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CheckInfo {
    pub id: &'static str,
    pub summary: &'static str,
    pub default_rank: usize,
    pub default_max_len: usize,
}

const REGISTRY: &[CheckInfo] = &[
    CheckInfo {
        id: "L2.4-self-inverse-no-overlap",
        summary: "cyclically reduced w and w^-1 are distinct and do not overlap (violation count)",
        default_rank: 2,
        default_max_len: 6,
    },
    CheckInfo {
        id: "C2.6-hoc-value-one",
        summary: "homogenized N[w] takes the value 1 on cyclically reduced w",
        default_rank: 2,
        default_max_len: 5,
    },
    CheckInfo {
        id: "L2.9-reduction-trick",
        summary: "|phi_w - sum_s' phi_ws'| <= 1 for |w| <= 3",
        default_rank: 2,
        default_max_len: 8,
    },
    CheckInfo {
        id: "L2.8-T-rewrite",
        summary: "|#_w(Tg) - sum_{u in W} #_u(g)| <= 2 for |w| <= 4, w not a power of b",
        default_rank: 2,
        default_max_len: 8,
    },
    CheckInfo {
        id: "L2.10-bpower",
        summary: "T-pullback of phi_{b^k}, k <= 3, within its tracked error bound",
        default_rank: 2,
        default_max_len: 8,
    },
    CheckInfo {
        id: "Eq-SwapWords",
        summary: "replacement swaps phi_w1 and phi_w2 exactly",
        default_rank: 2,
        default_max_len: 8,
    },
    CheckInfo {
        id: "L5.12-replacement-formula",
        summary: "pullback of phi_a under replacement equals phi_a + (phi_a(w2)-phi_a(w1))(phi_w1 - phi_w2)",
        default_rank: 2,
        default_max_len: 8,
    },
    CheckInfo {
        id: "WRQ-involution",
        summary: "replacement maps are involutions (max |f(f(g)) g^-1|)",
        default_rank: 2,
        default_max_len: 8,
    },
    CheckInfo {
        id: "P5.3-criterion",
        summary: "f(w1w2) in E f(w1) E f(w2) E and f(w^-1) in E f(w)^-1 E (violation count)",
        default_rank: 2,
        default_max_len: 8,
    },
    CheckInfo {
        id: "W-monoid-hom",
        summary: "pi_sigma pi_tau = pi_{sigma tau} (mismatch count)",
        default_rank: 2,
        default_max_len: 8,
    },
    CheckInfo {
        id: "W-torsion-m",
        summary: "pi_sigma^m = id for sigma of order m in {2,3,4} (mismatch count)",
        default_rank: 2,
        default_max_len: 8,
    },
    CheckInfo {
        id: "S5.4-surjectivity",
        summary: "the surjection maps the constructed preimage back to w (mismatch count)",
        default_rank: 4,
        default_max_len: 4,
    },
    CheckInfo {
        id: "C5.13-vanishing",
        summary: "homogenized C[a B^k a b A b] vanishes on g for |g| < k <= max_len",
        default_rank: 2,
        default_max_len: 12,
    },
    CheckInfo {
        id: "T2.7-rank",
        summary: "homogenized Grigorchuk terms up to max_len have full rank on test words (rank deficiency)",
        default_rank: 2,
        default_max_len: 4,
    },
    CheckInfo {
        id: "P5.1-power-values",
        summary: "homogenized N[a_j^k](a_j) = 1/k and C[a_j^k](a_j) = 1 for k <= max_len",
        default_rank: 2,
        default_max_len: 5,
    },
];

pub fn list_checks() -> &'static [CheckInfo] {
    REGISTRY
}

pub fn run_check(id: &str, params: CheckParams) -> Result<VerificationReport> {
    let info = REGISTRY.iter().find(|c| c.id == id).ok_or_else(|| Error::UnknownCheck(id.to_string()))?;
    let rank = params.rank.unwrap_or(info.default_rank);
    let max_len = params.max_len.unwrap_or(info.default_max_len);
    let ctx = Ctx { id: info.id, rank, max_len, seed: params.seed };
    match id {
        "L2.4-self-inverse-no-overlap" => ctx.self_inverse(),
        "C2.6-hoc-value-one" => ctx.hoc_value_one(),
        "L2.9-reduction-trick" => ctx.reduction_trick(),
        "L2.8-T-rewrite" => ctx.t_rewrite(),
        "L2.10-bpower" => ctx.bpower(),
        "Eq-SwapWords" => ctx.swap_words(),
        "L5.12-replacement-formula" => ctx.replacement_formula(),
        "WRQ-involution" => ctx.involution(),
        "P5.3-criterion" => ctx.criterion(),
        "W-monoid-hom" => ctx.monoid_hom(),
        "W-torsion-m" => ctx.torsion(),
        "S5.4-surjectivity" => ctx.surjectivity(),
        "C5.13-vanishing" => ctx.vanishing(),
        "T2.7-rank" => ctx.grig_rank(),
        "P5.1-power-values" => ctx.power_values(),
        _ => unreachable!(),
    }
}

/// Reduced words of length at most `max_len`, sampled when the count exceeds
/// the budget, with a description of the domain.
pub fn word_domain(rank: usize, max_len: usize, seed: u64) -> (Vec<Word>, String) {
    if reduced_word_count(rank, max_len) <= EXHAUSTIVE_BUDGET {
        (reduced_words(rank, max_len), format!("rank={rank},maxlen={max_len},exhaustive"))
    } else {
        let mut s = WordSampler::new(rank, max_len, seed);
        let words = (0..SAMPLE_SIZE).map(|_| s.sample()).collect();
        (words, format!("rank={rank},maxlen={max_len},sampled(n={SAMPLE_SIZE},seed={seed})"))
    }
}

/// Supremum of `f` over `items`; ties keep the earliest item. `f` returns the
/// value and a witness description.
fn sup_over<T, F>(items: &[T], f: F) -> Result<(Rational, Vec<String>)>
where
    T: Sync,
    F: Fn(&T) -> Result<(Rational, Vec<String>)> + Sync,
{
    let best = items
        .par_iter()
        .enumerate()
        .map(|(i, x)| f(x).map(|(v, w)| Some((v, i, w))))
        .try_reduce(
            || None,
            |a, b| {
                Ok(match (a, b) {
                    (None, x) | (x, None) => x,
                    (Some(a), Some(b)) => Some(if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) { b } else { a }),
                })
            },
        )?;
    Ok(best.map_or((Rational::zero(), Vec::new()), |(v, _, w)| (v, w)))
}

/// Number of items where `f` reports a failure, and the earliest failure.
fn count_failures<T, F>(items: &[T], f: F) -> Result<(Rational, Vec<String>)>
where
    T: Sync,
    F: Fn(&T) -> Result<Option<Vec<String>>> + Sync,
{
    let fails: Vec<Option<Vec<String>>> = items.par_iter().map(&f).collect::<Result<_>>()?;
    let count = fails.iter().filter(|x| x.is_some()).count();
    let witness = fails.into_iter().flatten().next().unwrap_or_default();
    Ok((rational(count as i64), witness))
}

fn s(w: &Word) -> String {
    w.to_string()
}

/// Valid replacement pairs in the given rank: the first few independent pairs
/// with common end letters among words of length 2 to 4, shortlex order.
pub fn replacement_pool(rank: usize) -> Vec<ReplacementPair> {
    let words: Vec<Word> = reduced_words(rank, 4).into_iter().filter(|w| w.len() >= 2).collect();
    let mut pool = Vec::new();
    'outer: for (i, w1) in words.iter().enumerate() {
        for w2 in &words[i + 1..] {
            if let Ok(p) = ReplacementPair::new(w1.clone(), w2.clone()) {
                pool.push(p);
                if pool.len() == 6 {
                    break 'outer;
                }
            }
        }
    }
    pool
}

/// Embedded permutations of `Z` of orders 2, 3 and 4, tagged with the order.
pub fn wobble_pool() -> Vec<(usize, WobblingMap)> {
    let perms: [(usize, &[(i64, i64)]); 5] = [
        (2, &[(0, 1), (1, 0)]),
        (2, &[(0, -1), (-1, 0)]),
        (3, &[(0, 1), (1, -1), (-1, 0)]),
        (4, &[(0, 1), (1, 2), (2, -1), (-1, 0)]),
        (2, &[(1, 2), (2, 1), (-2, -1), (-1, -2)]),
    ];
    perms
        .iter()
        .map(|(m, p)| (*m, embed_wobbling(&p.iter().copied().collect::<BTreeMap<_, _>>()).expect("bijection")))
        .collect()
}

struct Ctx {
    id: &'static str,
    rank: usize,
    max_len: usize,
    seed: u64,
}

impl Ctx {
    fn report(&self, claimed: Claimed, (observed, witness): (Rational, Vec<String>), space: String) -> Result<VerificationReport> {
        Ok(VerificationReport::new(self.id, claimed, observed, witness, space))
    }

    fn domain(&self) -> (Vec<Word>, String) {
        word_domain(self.rank, self.max_len, self.seed)
    }

    fn need_rank(&self, required: usize) -> Result<()> {
        if self.rank < required {
            Err(Error::RankTooSmall { required, rank: self.rank })
        } else {
            Ok(())
        }
    }

    fn self_inverse(&self) -> Result<VerificationReport> {
        let ws = cyclically_reduced_words(self.rank, self.max_len);
        let r = count_failures(&ws, |w| {
            let inv = w.inverse();
            Ok((inv == *w || overlaps(w, &inv)?).then(|| vec![s(w)]))
        })?;
        let space = format!("rank={},maxlen={},cyclically-reduced,exhaustive", self.rank, self.max_len);
        self.report(Claimed::Bound(rational(0)), r, space)
    }

    fn hoc_value_one(&self) -> Result<VerificationReport> {
        let ws = cyclically_reduced_words(self.rank, self.max_len);
        let r = sup_over(&ws, |w| {
            let v = homogenize_eval(&QmExpr::non_overlapping(w), w)?;
            Ok(((v - rational(1)).abs(), vec![s(w)]))
        })?;
        let space = format!("rank={},maxlen={},cyclically-reduced,exhaustive", self.rank, self.max_len);
        self.report(Claimed::Exact, r, space)
    }

    fn reduction_trick(&self) -> Result<VerificationReport> {
        let patterns: Vec<Word> = reduced_words(self.rank, 3.min(self.max_len)).into_iter().skip(1).collect();
        let (gs, space) = self.domain();
        let exprs: Vec<(Word, QmExpr, QmExpr)> = patterns
            .into_iter()
            .map(|w| Ok((w.clone(), QmExpr::overlapping(&w), reduction_trick(&w)?)))
            .collect::<Result<_>>()?;
        let r = sup_over(&exprs, |(w, phi, trick)| {
            let mut best = (Rational::zero(), vec![s(w), String::new()]);
            for g in &gs {
                let d = (eval(phi, g)? - eval(trick, g)?).abs();
                if d > best.0 {
                    best = (d, vec![s(w), s(g)]);
                }
            }
            Ok(best)
        })?;
        self.report(Claimed::Bound(rational(1)), r, format!("patterns<=3,{space}"))
    }

    fn t_rewrite(&self) -> Result<VerificationReport> {
        self.need_rank(2)?;
        let b = Letter::new(2, true);
        let patterns: Vec<Word> =
            reduced_words(self.rank, 4).into_iter().filter(|w| !w.is_empty() && !w.is_power_of(b)).collect();
        let (gs, space) = self.domain();
        let images: Vec<Word> = gs.iter().map(|g| apply_move(NielsenMove::T, g)).collect::<Result<_>>()?;
        let r = sup_over(&patterns, |w| {
            let (pats, _) = t_pullback_patterns(w)?;
            let mut best = (Rational::zero(), vec![s(w), String::new()]);
            for (g, tg) in gs.iter().zip(&images) {
                let lhs = count_overlapping(w, tg)? as i64;
                let mut rhs = 0i64;
                for u in &pats {
                    rhs += count_overlapping(u, g)? as i64;
                }
                let d = rational((lhs - rhs).abs());
                if d > best.0 {
                    best = (d, vec![s(w), s(g)]);
                }
            }
            Ok(best)
        })?;
        self.report(Claimed::Bound(rational(2)), r, format!("patterns<=4,{space}"))
    }

    fn bpower(&self) -> Result<VerificationReport> {
        self.need_rank(2)?;
        let (gs, space) = self.domain();
        let mut worst: Option<(Rational, Rational, Rational, Vec<String>)> = None;
        for k in 1..=3 {
            let rw = pullback_t_bpower(self.rank, k)?;
            let bk = Word::generator(self.rank, 2).pow(k);
            let phi = QmExpr::overlapping(&bk);
            let (sup, wit) = sup_over(&gs, |g| {
                let d = eval(&phi, &apply_move(NielsenMove::T, g)?)? - eval(&rw.expr, g)?;
                Ok((d.abs(), vec![s(&bk), s(g)]))
            })?;
            let excess = &sup - &rw.error_bound;
            if worst.as_ref().is_none_or(|w| excess > w.0) {
                worst = Some((excess, sup, rw.error_bound, wit));
            }
        }
        let (_, sup, bound, wit) = worst.unwrap();
        self.report(Claimed::Bound(bound), (sup, wit), format!("k<=3,{space}"))
    }

    fn pool(&self) -> Result<Vec<ReplacementPair>> {
        let pool = replacement_pool(self.rank);
        if pool.is_empty() {
            return Err(Error::RankTooSmall { required: 2, rank: self.rank });
        }
        Ok(pool)
    }

    fn swap_words(&self) -> Result<VerificationReport> {
        let pool = self.pool()?;
        let (gs, space) = self.domain();
        let r = sup_over(&pool, |p| {
            let q = QuasiMap::replace(p.clone());
            let (c1, c2) = (QmExpr::overlapping(p.w1()), QmExpr::overlapping(p.w2()));
            let mut best = (Rational::zero(), vec![s(p.w1()), s(p.w2()), String::new()]);
            for g in &gs {
                let fg = q.apply(g)?;
                let d1 = (eval(&c1, &fg)? - eval(&c2, g)?).abs();
                let d2 = (eval(&c2, &fg)? - eval(&c1, g)?).abs();
                let d = d1.max(d2);
                if d > best.0 {
                    best = (d, vec![s(p.w1()), s(p.w2()), s(g)]);
                }
            }
            Ok(best)
        })?;
        self.report(Claimed::Exact, r, format!("pairs={},{space}", pool.len()))
    }

    fn replacement_formula(&self) -> Result<VerificationReport> {
        let pool = self.pool()?;
        let (gs, space) = self.domain();
        let a = Word::generator(self.rank, 1);
        let phi_a = QmExpr::overlapping(&a);
        let r = sup_over(&pool, |p| {
            let q = QuasiMap::replace(p.clone());
            let coef = eval(&phi_a, p.w2())? - eval(&phi_a, p.w1())?;
            let diff = QmExpr::overlapping(p.w1()).sub(&QmExpr::overlapping(p.w2()))?;
            let rhs = phi_a.add_scaled(&diff, &coef)?;
            let mut best = (Rational::zero(), vec![s(p.w1()), s(p.w2()), String::new()]);
            for g in &gs {
                let d = (eval(&phi_a, &q.apply(g)?)? - eval(&rhs, g)?).abs();
                if d > best.0 {
                    best = (d, vec![s(p.w1()), s(p.w2()), s(g)]);
                }
            }
            Ok(best)
        })?;
        self.report(Claimed::Exact, r, format!("pairs={},{space}", pool.len()))
    }

    fn involution(&self) -> Result<VerificationReport> {
        let pool = self.pool()?;
        let (gs, space) = self.domain();
        let r = sup_over(&pool, |p| {
            let mut best = (Rational::zero(), vec![s(p.w1()), s(p.w2()), String::new()]);
            for g in &gs {
                let d = rational(p.apply(&p.apply(g)).mul(&g.inverse()).len() as i64);
                if d > best.0 {
                    best = (d, vec![s(p.w1()), s(p.w2()), s(g)]);
                }
            }
            Ok(best)
        })?;
        self.report(Claimed::Exact, r, format!("pairs={},{space}", pool.len()))
    }

    /// Maps whose criterion radius is known, each named for witnesses.
    fn criterion_maps(&self) -> Result<Vec<(String, QuasiMap)>> {
        self.need_rank(2)?;
        let n = self.rank;
        let mut maps = vec![
            ("nielsen:T".to_string(), QuasiMap::nielsen(NielsenWord::parse(n, "T")?)),
            ("nielsen:Tinv,P2,I".to_string(), QuasiMap::nielsen(NielsenWord::parse(n, "Tinv,P2,I")?)),
            ("local:identity".to_string(), QuasiMap::local(LocalTransformation::identity(n))),
            (
                "wobble:shorten".to_string(),
                QuasiMap::wobble(n, WobblingMap::new(BTreeMap::from([(1, 0)]), -1, Some(1))?),
            ),
        ];
        for (m, w) in wobble_pool().into_iter().take(3) {
            maps.push((format!("wobble:order{m}"), QuasiMap::wobble(n, w)));
        }
        for p in replacement_pool(n).into_iter().take(3) {
            maps.push((format!("replace:{},{}", p.w1(), p.w2()), QuasiMap::replace(p)));
        }
        if n >= 3 {
            maps.push((format!("surjection:{}", n + 1), QuasiMap::surjection_stage(n + 1)?));
        }
        Ok(maps)
    }

    fn criterion(&self) -> Result<VerificationReport> {
        let (gs, space) = self.domain();
        let mut violations = 0usize;
        let mut witness = Vec::new();
        for (name, q) in self.criterion_maps()? {
            let r = check_criterion_on(&q, &gs)?;
            violations += r.violations;
            if witness.is_empty() {
                if let Some((w, split)) = r.witness {
                    let at = split.map_or("inverse".to_string(), |i| i.to_string());
                    witness = vec![name, s(&w), at];
                }
            }
        }
        self.report(Claimed::Bound(rational(0)), (rational(violations as i64), witness), space)
    }

    fn monoid_hom(&self) -> Result<VerificationReport> {
        let (gs, space) = self.domain();
        let pool = wobble_pool();
        let pairs: Vec<(usize, usize)> =
            (0..pool.len()).flat_map(|i| (0..pool.len()).map(move |j| (i, j))).collect();
        let mut total = 0i64;
        let mut witness = Vec::new();
        for (i, j) in pairs {
            let (sig, tau) = (&pool[i].1, &pool[j].1);
            let st = sig.compose(tau);
            let (c, w) = count_failures(&gs, |g| {
                Ok((sig.apply(&tau.apply(g)) != st.apply(g)).then(|| vec![format!("pool{i}"), format!("pool{j}"), s(g)]))
            })?;
            total += c.to_integer().to_i64().unwrap_or(i64::MAX);
            if witness.is_empty() {
                witness = w;
            }
        }
        self.report(Claimed::Exact, (rational(total), witness), format!("pool={0}x{0},{space}", pool.len()))
    }

    fn torsion(&self) -> Result<VerificationReport> {
        let (gs, space) = self.domain();
        let mut total = 0i64;
        let mut witness = Vec::new();
        for (idx, (m, sig)) in wobble_pool().into_iter().enumerate() {
            let (c, w) = count_failures(&gs, |g| {
                let mut cur = g.clone();
                for _ in 0..m {
                    cur = sig.apply(&cur);
                }
                Ok((cur != *g).then(|| vec![format!("pool{idx}(order {m})"), s(g)]))
            })?;
            total += c.to_integer().to_i64().unwrap_or(i64::MAX);
            if witness.is_empty() {
                witness = w;
            }
        }
        self.report(Claimed::Exact, (rational(total), witness), format!("orders=2,3,4,{space}"))
    }

    fn surjectivity(&self) -> Result<VerificationReport> {
        let n = self.rank;
        let q = surjection_map(n)?;
        let (ws, space) = self.domain();
        let r = count_failures(&ws, |w| {
            let pre = surjection_preimage(n, w)?;
            Ok((q.apply(&pre)? != *w).then(|| vec![s(w), s(&pre)]))
        })?;
        self.report(Claimed::Exact, r, space)
    }

    fn vanishing(&self) -> Result<VerificationReport> {
        self.need_rank(2)?;
        let gs: Vec<Word> = ["ab", "aBab", "abAB"].iter().map(|t| Word::parse(self.rank, t)).collect::<Result<_>>()?;
        let cases: Vec<(Word, i64)> = gs
            .iter()
            .flat_map(|g| ((g.len() as i64 + 1)..=(self.max_len as i64)).map(move |k| (g.clone(), k)))
            .collect();
        let r = sup_over(&cases, |(g, k)| {
            let wk = w_k(self.rank, *k)?;
            let v = homogenize_eval(&QmExpr::overlapping(&wk), g)?;
            Ok((v.abs(), vec![s(&wk), s(g)]))
        })?;
        let space = format!("rank={},g in {{ab,aBab,abAB}},|g|<k<={}", self.rank, self.max_len);
        self.report(Claimed::Exact, r, space)
    }

    fn grig_rank(&self) -> Result<VerificationReport> {
        let order = LetterOrder::default_for(self.rank);
        let family = grigorchuk_family(self.rank, &order, self.max_len)?;
        let test_len = 10;
        let (size, rank) = grig_eval_rank(&family, self.rank, test_len)?;
        let witness = vec![format!("family={size}"), format!("rank={rank}")];
        let space = format!(
            "rank={},family maxlen={},test words cyclically reduced <= {test_len}",
            self.rank, self.max_len
        );
        self.report(Claimed::Bound(rational(0)), (rational((size - rank) as i64), witness), space)
    }

    fn power_values(&self) -> Result<VerificationReport> {
        let cases: Vec<(usize, i64)> =
            (1..=self.rank).flat_map(|j| (1..=self.max_len as i64).map(move |k| (j, k))).collect();
        let r = sup_over(&cases, |&(j, k)| {
            let aj = Word::generator(self.rank, j);
            let p = aj.pow(k);
            let n = homogenize_eval(&QmExpr::term(Kind::NonOverlapping, p.clone())?, &aj)?;
            let c = homogenize_eval(&QmExpr::overlapping(&p), &aj)?;
            let d = (n - ratio(1, k)).abs().max((c - rational(1)).abs());
            Ok((d, vec![s(&p), s(&aj)]))
        })?;
        self.report(Claimed::Exact, r, format!("rank={},k<={}", self.rank, self.max_len))
    }
}

/// `a b^{-k} a b a^{-1} b`.
pub fn w_k(rank: usize, k: i64) -> Result<Word> {
    let b = Word::generator(rank, 2);
    let a = Word::generator(rank, 1);
    Ok(a.mul(&b.pow(-k)).mul(&Word::parse(rank, "abAb")?))
}

/// Family size and the rank of the matrix of homogenized C-terms of `family`
/// evaluated on cyclically reduced test words of length at most `test_len`,
/// adding test words in shortlex order until the rank is full.
pub fn grig_eval_rank(family: &[Word], rank: usize, test_len: usize) -> Result<(usize, usize)> {
    let exprs: Vec<QmExpr> = family.iter().map(QmExpr::overlapping).collect();
    let mut basis = IncrementalBasis::new();
    for g in cyclically_reduced_words(rank, test_len) {
        if basis.rank() == family.len() {
            break;
        }
        let col: Vec<Rational> =
            exprs.par_iter().map(|e| homogenize_eval(e, &g)).collect::<Result<_>>()?;
        basis.insert(col);
    }
    Ok((family.len(), basis.rank()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::independence::is_independent_set;

    #[test]
    fn registry_listing() {
        let ids: Vec<&str> = list_checks().iter().map(|c| c.id).collect();
        assert_eq!(ids.len(), 15);
        for id in ["L5.12-replacement-formula", "Eq-SwapWords", "T2.7-rank"] {
            assert!(ids.contains(&id));
        }
        assert!(matches!(run_check("nope", CheckParams::default()), Err(Error::UnknownCheck(_))));
    }

    #[test]
    fn pools_are_valid() {
        let pool = replacement_pool(2);
        assert_eq!(pool.len(), 6);
        assert!(pool.iter().all(|p| is_independent_set(&[p.w1().clone(), p.w2().clone()])));
        for (m, sig) in wobble_pool() {
            let mut cur = WobblingMap::identity();
            for i in 1..=m {
                cur = cur.compose(&sig);
                assert_eq!(cur == WobblingMap::identity(), i == m);
            }
        }
    }

    #[test]
    fn json_shape() {
        let r = run_check("L2.4-self-inverse-no-overlap", CheckParams { max_len: Some(4), ..Default::default() }).unwrap();
        assert_eq!(
            serde_json::to_string(&r.to_json()).unwrap(),
            r#"{"lemma":"L2.4-self-inverse-no-overlap","claimed":0,"observed":"0","witness":[],"space":"rank=2,maxlen=4,cyclically-reduced,exhaustive","pass":true}"#
        );
    }

    #[test]
    fn budget_switches_to_sampling() {
        let (ws, space) = word_domain(2, 12, 0);
        assert_eq!(ws.len(), SAMPLE_SIZE);
        assert_eq!(space, "rank=2,maxlen=12,sampled(n=100000,seed=0)");
        let (ws, space) = word_domain(2, 8, 0);
        assert_eq!(ws.len(), 13121);
        assert!(space.ends_with("exhaustive"));
    }

    #[test]
    fn w_k_shape() {
        assert_eq!(w_k(2, 3).unwrap().to_string(), "aBBBabAb");
    }
}

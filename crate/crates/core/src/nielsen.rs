//! Nielsen moves acting on words, and pullbacks of overlapping counting
//! quasimorphisms through them.
//!
//! Throughout, `a` and `b` denote the first two generators. `T` sends
//! `a -> ab` and fixes the other generators.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::{Mutex, OnceLock};

use num::{One, Signed, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::expr::{rational, Kind, QmExpr, Rational};
use crate::word::{push_reduced, Letter, Word};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NielsenMove {
    /// Swap `a_1` and `a_2`.
    P1,
    /// Cyclic shift `a_i -> a_{i+1}`, `a_n -> a_1`.
    P2,
    /// Invert `a_1`.
    I,
    /// `a_1 -> a_1 a_2`.
    T,
    /// `a_1 -> a_1 a_2^{-1}`.
    Tinv,
}

impl NielsenMove {
    pub const ALL: [NielsenMove; 5] =
        [NielsenMove::P1, NielsenMove::P2, NielsenMove::I, NielsenMove::T, NielsenMove::Tinv];

    fn tag(self) -> &'static str {
        match self {
            NielsenMove::P1 => "P1",
            NielsenMove::P2 => "P2",
            NielsenMove::I => "I",
            NielsenMove::T => "T",
            NielsenMove::Tinv => "Tinv",
        }
    }

    fn is_permutation(self) -> bool {
        matches!(self, NielsenMove::P1 | NielsenMove::P2 | NielsenMove::I)
    }

    /// Image of a single letter, as a letter sequence.
    fn image(self, x: Letter, rank: usize) -> Vec<Letter> {
        let g = x.gen();
        let pos = x.is_positive();
        let letter = |gen: usize, p: bool| Letter::new(gen, p);
        match self {
            NielsenMove::P1 => {
                let h = match g {
                    1 => 2,
                    2 => 1,
                    _ => g,
                };
                vec![letter(h, pos)]
            }
            NielsenMove::P2 => vec![letter(g % rank + 1, pos)],
            NielsenMove::I => vec![if g == 1 { x.inverse() } else { x }],
            NielsenMove::T | NielsenMove::Tinv => {
                if g != 1 {
                    return vec![x];
                }
                let b = letter(2, self == NielsenMove::T);
                if pos {
                    vec![x, b]
                } else {
                    vec![b.inverse(), x]
                }
            }
        }
    }

    /// Letter image under the inverse of a permutation move.
    fn inverse_permutation_letter(self, x: Letter, rank: usize) -> Letter {
        let g = x.gen();
        let pos = x.is_positive();
        match self {
            NielsenMove::P1 | NielsenMove::I => self.image(x, rank)[0],
            NielsenMove::P2 => Letter::new(if g == 1 { rank } else { g - 1 }, pos),
            _ => unreachable!("not a permutation move"),
        }
    }
}

impl fmt::Display for NielsenMove {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for NielsenMove {
    type Err = Error;

    fn from_str(s: &str) -> Result<NielsenMove> {
        NielsenMove::ALL
            .into_iter()
            .find(|m| m.tag() == s)
            .ok_or_else(|| Error::UnknownMove(s.to_string()))
    }
}

/// A finite sequence of moves, applied left to right.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NielsenWord {
    pub rank: usize,
    pub moves: Vec<NielsenMove>,
}

impl NielsenWord {
    pub fn new(rank: usize, moves: Vec<NielsenMove>) -> Result<NielsenWord> {
        check_rank(rank)?;
        Ok(NielsenWord { rank, moves })
    }

    /// Comma-separated tags such as `T,P1,I,Tinv`; the empty string is the
    /// identity.
    pub fn parse(rank: usize, text: &str) -> Result<NielsenWord> {
        let moves = if text.trim().is_empty() {
            Vec::new()
        } else {
            text.split(',').map(|t| t.trim().parse()).collect::<Result<_>>()?
        };
        NielsenWord::new(rank, moves)
    }
}

impl fmt::Display for NielsenWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tags: Vec<&str> = self.moves.iter().map(|m| m.tag()).collect();
        f.write_str(&tags.join(","))
    }
}

fn check_rank(rank: usize) -> Result<()> {
    if rank < 2 {
        Err(Error::RankTooSmall { required: 2, rank })
    } else {
        Ok(())
    }
}

pub fn apply_move(m: NielsenMove, g: &Word) -> Result<Word> {
    let rank = g.rank();
    check_rank(rank)?;
    let mut out = Vec::with_capacity(g.len() + 4);
    for &x in g.letters() {
        for y in m.image(x, rank) {
            push_reduced(&mut out, y);
        }
    }
    Ok(Word::from_reduced_unchecked(rank, out))
}

pub fn apply_word(nw: &NielsenWord, g: &Word) -> Result<Word> {
    if nw.rank != g.rank() {
        return Err(Error::RankMismatch { left: nw.rank, right: g.rank() });
    }
    let mut cur = g.clone();
    for &m in &nw.moves {
        cur = apply_move(m, &cur)?;
    }
    Ok(cur)
}

/// A rewritten expression together with a uniform bound on its distance from
/// the pulled-back function.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RewriteResult {
    pub expr: QmExpr,
    pub error_bound: Rational,
}

fn a_letter() -> Letter {
    Letter::new(1, true)
}

fn b_letter() -> Letter {
    Letter::new(2, true)
}

fn b_pow(k: i64) -> Vec<Letter> {
    let b = b_letter();
    let x = if k >= 0 { b } else { b.inverse() };
    vec![x; k.unsigned_abs() as usize]
}

fn cat(parts: &[&[Letter]]) -> Vec<Letter> {
    parts.iter().flat_map(|p| p.iter().copied()).collect()
}

/// Letters other than `excluded`.
fn alphabet_without(rank: usize, excluded: &[Letter]) -> Vec<Letter> {
    Letter::alphabet(rank).into_iter().filter(|x| !excluded.contains(x)).collect()
}

/// The pattern set `W_left · core* · W_right` whose occurrence counts in `g`
/// match the occurrences of `w` in `T(g)` away from the ends of `g`, together
/// with the per-orientation count error.
pub fn t_pullback_patterns(w: &Word) -> Result<(Vec<Word>, usize)> {
    let rank = w.rank();
    check_rank(rank)?;
    let a = a_letter();
    let (b, big_a) = (b_letter(), a.inverse());
    if w.is_empty() || w.is_power_of(b) {
        return Err(Error::BPower(w.to_string()));
    }
    let nf = w.normal_form(b);
    let r = &nf.interleaved;
    let m = &nf.exponents;
    let k = r.len();
    let (m0, mk) = (m[0], m[k]);
    let (r1, rk) = (r[0], r[k - 1]);

    let mut core = vec![r1];
    for i in 1..k {
        let adj = m[i] - i64::from(r[i - 1] == a) + i64::from(r[i] == big_a);
        core.extend(b_pow(adj));
        core.push(r[i]);
    }

    let outside = |ex: &[Letter]| alphabet_without(rank, ex);
    let left: Vec<Vec<Letter>> = if m0 == 0 {
        vec![vec![]]
    } else if m0 > 0 {
        let e = if r1 == big_a { m0 + 1 } else { m0 };
        vec![b_pow(e), cat(&[&[a], &b_pow(e - 1)])]
    } else {
        let e = if r1 == big_a { m0 + 1 } else { m0 };
        let mut v: Vec<Vec<Letter>> =
            outside(&[a, b, b.inverse()]).into_iter().map(|s| cat(&[&[s], &b_pow(e)])).collect();
        v.push(b_pow(e - 1));
        v
    };
    let right: Vec<Vec<Letter>> = if mk == 0 {
        vec![vec![]]
    } else if mk > 0 {
        let e = if rk == a { mk - 1 } else { mk };
        let mut v = vec![b_pow(e + 1)];
        v.extend(outside(&[big_a, b, b.inverse()]).into_iter().map(|s| cat(&[&b_pow(e), &[s]])));
        v
    } else {
        let e = if rk == a { mk - 1 } else { mk };
        vec![b_pow(e), cat(&[&b_pow(e + 1), &[big_a]])]
    };

    let mut out = Vec::with_capacity(left.len() * right.len());
    for l in &left {
        for rr in &right {
            let letters = cat(&[l, &core, rr]);
            let n = letters.len();
            let u = Word::reduce(rank, letters)?;
            debug_assert_eq!(u.len(), n, "pattern for {w} not reduced");
            out.push(u);
        }
    }
    let err = usize::from(m0 != 0) + usize::from(mk != 0);
    Ok((out, err))
}

/// Rewrite of `φ_w ∘ T` as a sum of overlapping counting quasimorphisms, for
/// `w` not a power of `b`.
pub fn pullback_t_counting(w: &Word) -> Result<RewriteResult> {
    let (patterns, err) = t_pullback_patterns(w)?;
    let mut expr = QmExpr::zero(w.rank());
    for u in patterns {
        expr.add_term(Kind::Overlapping, u, Rational::one())?;
    }
    Ok(RewriteResult { expr, error_bound: rational(2 * err as i64) })
}

/// Rewrite of `φ_{b^k} ∘ T`.
pub fn pullback_t_bpower(rank: usize, k: i64) -> Result<RewriteResult> {
    check_rank(rank)?;
    if k <= 0 {
        return Err(Error::NonPositiveExponent(k));
    }
    let b = b_letter();
    if k == 1 {
        // T preserves the b exponent sum up to adding the a exponent sum
        let expr = QmExpr::parse(rank, "C[a] + C[b]")?;
        return Ok(RewriteResult { expr, error_bound: Rational::zero() });
    }
    let prefix = Word::reduce(rank, b_pow(k - 1))?;
    let mut acc = pullback_t_bpower(rank, k - 1)?;
    acc.error_bound += Rational::one();
    for s in alphabet_without(rank, &[b, b.inverse()]) {
        let u = Word::reduce(rank, cat(&[prefix.letters(), &[s]]))?;
        let r = pullback_t_counting(&u)?;
        acc.expr = acc.expr.sub(&r.expr)?;
        acc.error_bound += r.error_bound;
    }
    Ok(acc)
}

/// `Σ_{s' ≠ s^{-1}} C[w s']` over the full signed alphabet, where `s` is the
/// last letter of `w`; it differs from `φ_w` by at most 1 everywhere.
pub fn reduction_trick(w: &Word) -> Result<QmExpr> {
    let s = w.last().ok_or(Error::EmptyWord)?;
    let mut e = QmExpr::zero(w.rank());
    for t in alphabet_without(w.rank(), &[s.inverse()]) {
        let u = Word::reduce(w.rank(), cat(&[w.letters(), &[t]]))?;
        e.add_term(Kind::Overlapping, u, Rational::one())?;
    }
    Ok(e)
}

fn inverse_permutation_word(m: NielsenMove, w: &Word) -> Word {
    let letters: Vec<Letter> =
        w.letters().iter().map(|&x| m.inverse_permutation_letter(x, w.rank())).collect();
    Word::reduce(w.rank(), letters).expect("permutation keeps rank")
}

/// Pullback of a sum of C-terms through one move.
fn pullback_move(m: NielsenMove, e: &QmExpr) -> Result<RewriteResult> {
    let rank = e.rank();
    if m.is_permutation() {
        let mut expr = QmExpr::zero(rank);
        for (t, c) in e.terms() {
            expr.add_term(t.kind, inverse_permutation_word(m, &t.pattern), c.clone())?;
        }
        return Ok(RewriteResult { expr, error_bound: Rational::zero() });
    }
    if m == NielsenMove::Tinv {
        return pullback_word_terms(&tinv_canonical(rank)?, e);
    }
    let b = b_letter();
    let pieces: Vec<(Rational, RewriteResult)> = e
        .terms()
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|(t, c)| {
            let r = if t.pattern.is_power_of(b) {
                let k = t.pattern.len() as i64;
                let r = pullback_t_bpower(rank, k)?;
                if t.pattern.first() == Some(b) {
                    r
                } else {
                    RewriteResult { expr: r.expr.scale(&rational(-1)), error_bound: r.error_bound }
                }
            } else {
                pullback_t_counting(&t.pattern)?
            };
            Ok((c.clone(), r))
        })
        .collect::<Result<_>>()?;
    let mut expr = QmExpr::zero(rank);
    let mut error_bound = Rational::zero();
    for (c, r) in pieces {
        expr = expr.add_scaled(&r.expr, &c)?;
        error_bound += c.abs() * r.error_bound;
    }
    Ok(RewriteResult { expr, error_bound })
}

fn pullback_word_terms(moves: &[NielsenMove], e: &QmExpr) -> Result<RewriteResult> {
    let mut cur = RewriteResult { expr: e.clone(), error_bound: Rational::zero() };
    for &m in moves.iter().rev() {
        let r = pullback_move(m, &cur.expr)?;
        cur = RewriteResult { expr: r.expr, error_bound: cur.error_bound + r.error_bound };
    }
    Ok(cur)
}

/// Rewrite of `e ∘ apply_word(nw, ·)` for an expression built from C-terms.
pub fn pullback_expr(nw: &NielsenWord, e: &QmExpr) -> Result<RewriteResult> {
    if e.has_non_overlapping() {
        let t = e.terms().find(|(t, _)| t.kind == Kind::NonOverlapping).unwrap().0;
        return Err(Error::NonOverlappingTerm(t.to_string()));
    }
    if nw.rank != e.rank() && !e.is_zero() {
        return Err(Error::RankMismatch { left: nw.rank, right: e.rank() });
    }
    check_rank(nw.rank)?;
    pullback_word_terms(&nw.moves, e)
}

/// `X, T, X` with `X` a shortest word in `P1, P2, I` such that the composite
/// equals `Tinv` on every generator. Found by search and cached per rank.
pub fn tinv_canonical(rank: usize) -> Result<Vec<NielsenMove>> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Vec<NielsenMove>>>> = OnceLock::new();
    check_rank(rank)?;
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(v) = cache.lock().unwrap().get(&rank) {
        return Ok(v.clone());
    }
    let found = search_tinv(rank).expect("a conjugator of length at most 6 exists");
    cache.lock().unwrap().insert(rank, found.clone());
    Ok(found)
}

fn search_tinv(rank: usize) -> Option<Vec<NielsenMove>> {
    let gens: Vec<Word> = (1..=rank).map(|i| Word::generator(rank, i)).collect();
    let perms = [NielsenMove::P1, NielsenMove::P2, NielsenMove::I];
    let mut layer: Vec<Vec<NielsenMove>> = vec![vec![]];
    for _ in 0..=6 {
        for x in &layer {
            let moves: Vec<NielsenMove> =
                x.iter().copied().chain([NielsenMove::T]).chain(x.iter().copied()).collect();
            let nw = NielsenWord { rank, moves: moves.clone() };
            let ok = gens.iter().all(|g| {
                apply_word(&nw, g).unwrap() == apply_move(NielsenMove::Tinv, g).unwrap()
            });
            if ok {
                return Some(moves);
            }
        }
        layer = layer
            .iter()
            .flat_map(|x| perms.iter().map(move |&p| x.iter().copied().chain([p]).collect()))
            .collect();
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::counting::{count_overlapping, eval};
    use crate::enumerate::reduced_words;

    fn w(s: &str) -> Word {
        Word::parse(2, s).unwrap()
    }

    fn moves(s: &str) -> NielsenWord {
        NielsenWord::parse(2, s).unwrap()
    }

    /// Substitute images letter by letter, then reduce.
    fn substitute(images: &[(char, &str)], g: &str) -> String {
        let mut s = String::new();
        for c in g.chars() {
            let lower = c.to_ascii_lowercase();
            let img = images.iter().find(|(k, _)| *k == lower).map(|(_, v)| *v).unwrap_or("");
            let img = if img.is_empty() { lower.to_string() } else { img.to_string() };
            if c.is_ascii_uppercase() {
                s.push_str(&Word::parse(2, &img).unwrap().inverse().to_string());
            } else {
                s.push_str(&img);
            }
        }
        Word::parse(2, &s).unwrap().to_string()
    }

    #[test]
    fn move_examples() {
        assert_eq!(apply_move(NielsenMove::T, &w("a")).unwrap(), w("ab"));
        assert_eq!(apply_move(NielsenMove::Tinv, &w("a")).unwrap(), w("aB"));
        assert_eq!(apply_move(NielsenMove::I, &w("a")).unwrap(), w("A"));
        assert_eq!(apply_move(NielsenMove::T, &w("aB")).unwrap(), w("a"));
        assert_eq!(apply_word(&moves("T,T"), &w("a")).unwrap(), w("abb"));
        assert_eq!(apply_word(&moves(""), &w("aBB")).unwrap(), w("aBB"));
        assert_eq!(apply_word(&moves("I,I"), &w("aBB")).unwrap(), w("aBB"));
        assert!(matches!(
            apply_move(NielsenMove::T, &Word::parse(1, "a").unwrap()),
            Err(Error::RankTooSmall { .. })
        ));
        assert!(matches!(NielsenWord::parse(2, "T,X"), Err(Error::UnknownMove(_))));
    }

    #[test]
    fn moves_match_substitution_oracle() {
        let table: [(&str, Vec<(char, &str)>); 3] = [
            ("T", vec![('a', "ab")]),
            ("Tinv", vec![('a', "aB")]),
            ("P1", vec![('a', "b"), ('b', "a")]),
        ];
        for g in reduced_words(2, 5) {
            for (m, img) in &table {
                let got = apply_word(&moves(m), &g).unwrap().to_string();
                assert_eq!(got, substitute(img, &g.to_string()), "{m} on {g}");
            }
        }
    }

    #[test]
    fn p2_is_cyclic_shift() {
        let g = Word::parse(3, "abC").unwrap();
        let img = apply_move(NielsenMove::P2, &g).unwrap();
        assert_eq!(img.to_string(), "bcA");
        let nw = NielsenWord::parse(3, "P2,P2,P2").unwrap();
        assert_eq!(apply_word(&nw, &g).unwrap(), g);
    }

    #[test]
    fn tinv_conjugator_is_valid() {
        assert_eq!(NielsenWord { rank: 2, moves: tinv_canonical(2).unwrap() }.to_string(), "P1,I,P1,T,P1,I,P1");
        for rank in 2..=4 {
            let ms = tinv_canonical(rank).unwrap();
            assert!(ms.iter().filter(|m| **m == NielsenMove::T).count() == 1);
            let nw = NielsenWord { rank, moves: ms };
            for g in reduced_words(rank, 3) {
                assert_eq!(apply_word(&nw, &g).unwrap(), apply_move(NielsenMove::Tinv, &g).unwrap());
            }
        }
    }

    #[test]
    fn ba_pattern_set() {
        let (p, err) = t_pullback_patterns(&w("ba")).unwrap();
        let mut s: Vec<String> = p.iter().map(Word::to_string).collect();
        s.sort();
        assert_eq!(s, vec!["aa", "ba"]);
        assert_eq!(err, 1);
        assert!(matches!(pullback_t_counting(&w("bb")), Err(Error::BPower(_))));
        assert!(matches!(pullback_t_counting(&w("b")), Err(Error::BPower(_))));
    }

    fn sup_diff(f: impl Fn(&Word) -> Rational, e: &QmExpr, max_len: usize) -> Rational {
        reduced_words(e.rank(), max_len)
            .into_iter()
            .map(|g| (f(&g) - eval(e, &g).unwrap()).abs())
            .max()
            .unwrap()
    }

    #[test]
    fn ba_rewrite_bounded_over_len_10() {
        let r = pullback_t_counting(&w("ba")).unwrap();
        assert_eq!(r.expr, QmExpr::parse(2, "C[ba] + C[aa]").unwrap());
        let phi = QmExpr::parse(2, "C[ba]").unwrap();
        let d = sup_diff(|g| eval(&phi, &apply_move(NielsenMove::T, g).unwrap()).unwrap(), &r.expr, 10);
        assert!(d <= r.error_bound, "{d} > {}", r.error_bound);
    }

    #[test]
    fn count_level_bound_two() {
        for u in reduced_words(2, 4).into_iter().filter(|u| !u.is_empty() && !u.is_power_of(b_letter())) {
            let (pats, err) = t_pullback_patterns(&u).unwrap();
            assert!(err <= 2);
            for g in reduced_words(2, 6) {
                let tg = apply_move(NielsenMove::T, &g).unwrap();
                let lhs = count_overlapping(&u, &tg).unwrap() as i64;
                let rhs: i64 = pats.iter().map(|p| count_overlapping(p, &g).unwrap() as i64).sum();
                assert!((lhs - rhs).abs() <= err as i64, "{u} {g}: {lhs} vs {rhs}");
            }
        }
    }

    #[test]
    fn bpower_rewrites() {
        let r = pullback_t_bpower(2, 1).unwrap();
        assert_eq!(r.expr.to_string(), "C[a] + C[b]");
        assert!(r.error_bound.is_zero());
        assert!(matches!(pullback_t_bpower(2, 0), Err(Error::NonPositiveExponent(0))));
        for k in 1..=3 {
            let r = pullback_t_bpower(2, k).unwrap();
            let phi = QmExpr::overlapping(&Word::reduce(2, b_pow(k)).unwrap());
            let d = sup_diff(|g| eval(&phi, &apply_move(NielsenMove::T, g).unwrap()).unwrap(), &r.expr, 7);
            assert!(d <= r.error_bound, "k={k}: {d} > {}", r.error_bound);
        }
    }

    #[test]
    fn reduction_trick_examples() {
        assert_eq!(reduction_trick(&w("a")).unwrap(), QmExpr::parse(2, "C[aa] + C[ab] + C[aB]").unwrap());
        assert_eq!(reduction_trick(&w("b")).unwrap(), QmExpr::parse(2, "C[ba] + C[bA] + C[bb]").unwrap());
        for u in ["a", "b", "aB"] {
            let r = reduction_trick(&w(u)).unwrap();
            let phi = QmExpr::parse(2, &format!("C[{u}]")).unwrap();
            assert!(sup_diff(|g| eval(&phi, g).unwrap(), &r, 6) <= rational(1));
        }
        assert_eq!(reduction_trick(&Word::identity(2)), Err(Error::EmptyWord));
    }

    #[test]
    fn pullback_expr_examples() {
        let r = pullback_expr(&moves("P1"), &QmExpr::parse(2, "C[a]").unwrap()).unwrap();
        assert_eq!(r.expr.to_string(), "C[b]");
        let r = pullback_expr(&moves("I"), &QmExpr::parse(2, "C[a]").unwrap()).unwrap();
        assert_eq!(r.expr.to_string(), "-C[a]");
        assert!(r.error_bound.is_zero());
        let r = pullback_expr(&moves("T"), &QmExpr::parse(2, "C[b]").unwrap()).unwrap();
        assert_eq!(r.expr.to_string(), "C[a] + C[b]");
        assert!(matches!(
            pullback_expr(&moves("T"), &QmExpr::parse(2, "N[ab]").unwrap()),
            Err(Error::NonOverlappingTerm(_))
        ));
    }

    #[test]
    fn pullback_expr_bounded_for_mixed_words() {
        let e = QmExpr::parse(2, "C[ab] - 2*C[aBB] + C[b]").unwrap();
        for text in ["T", "Tinv", "T,P1", "P2,T,I", "Tinv,T", "T,T"] {
            let nw = moves(text);
            let r = pullback_expr(&nw, &e).unwrap();
            let d = sup_diff(|g| eval(&e, &apply_word(&nw, g).unwrap()).unwrap(), &r.expr, 6);
            assert!(d <= r.error_bound, "{text}: {d} > {}", r.error_bound);
        }
    }
}

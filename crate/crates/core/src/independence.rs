//! Overlap and independence of words, conjugacy-minimal representatives and
//! Grigorchuk's family of self-independent words.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::enumerate::reduced_words_of_len;
use crate::error::{Error, Result};
use crate::word::{Letter, Word};

/// A total order on the `2n` letters of rank `n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LetterOrder {
    rank: usize,
    symbols: Vec<Letter>,
    key: Vec<usize>,
}

impl LetterOrder {
    /// `a < A < b < B < ...`
    pub fn default_for(rank: usize) -> LetterOrder {
        LetterOrder::from_symbols(rank, Letter::alphabet(rank)).unwrap()
    }

    pub fn from_symbols(rank: usize, symbols: Vec<Letter>) -> Result<LetterOrder> {
        let text: String = symbols.iter().map(|x| x.to_char()).collect();
        if symbols.len() != 2 * rank || symbols.iter().any(|x| x.gen() > rank) {
            return Err(Error::InvalidOrder(text));
        }
        let mut key = vec![usize::MAX; 2 * rank];
        for (i, x) in symbols.iter().enumerate() {
            if key[x.default_key()] != usize::MAX {
                return Err(Error::InvalidOrder(text));
            }
            key[x.default_key()] = i;
        }
        Ok(LetterOrder { rank, symbols, key })
    }

    pub fn parse(rank: usize, text: &str) -> Result<LetterOrder> {
        let symbols = text
            .chars()
            .map(Letter::from_char)
            .collect::<Result<Vec<_>>>()
            .map_err(|_| Error::InvalidOrder(text.to_string()))?;
        LetterOrder::from_symbols(rank, symbols)
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn position(&self, x: Letter) -> usize {
        self.key[x.default_key()]
    }

    /// Induced lexicographic order on words.
    pub fn cmp_words(&self, u: &Word, v: &Word) -> Ordering {
        let ku = u.letters().iter().map(|&x| self.position(x));
        let kv = v.letters().iter().map(|&x| self.position(x));
        ku.cmp(kv)
    }
}

impl std::fmt::Display for LetterOrder {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for x in &self.symbols {
            write!(f, "{x}")?;
        }
        Ok(())
    }
}

fn is_subword(short: &[Letter], long: &[Letter]) -> bool {
    short.len() <= long.len() && long.windows(short.len()).any(|w| w == short)
}

/// Some proper non-empty suffix of `u` equals a proper prefix of `v`.
fn suffix_prefix_overlap(u: &[Letter], v: &[Letter]) -> bool {
    let max = u.len().min(v.len());
    (1..max).any(|l| u[u.len() - l..] == v[..l])
}

/// Whether `u` and `v` overlap: a proper prefix of one is a proper postfix of
/// the other, or one is a proper subword of the other.
pub fn overlaps(u: &Word, v: &Word) -> Result<bool> {
    if u.is_empty() || v.is_empty() {
        return Err(Error::EmptyWord);
    }
    let (a, b) = (u.letters(), v.letters());
    Ok(suffix_prefix_overlap(a, b)
        || suffix_prefix_overlap(b, a)
        || (a.len() < b.len() && is_subword(a, b))
        || (b.len() < a.len() && is_subword(b, a)))
}

pub fn is_self_independent(w: &Word) -> bool {
    !w.is_empty() && is_independent_set(std::slice::from_ref(w))
}

/// Whether the set `ws` is independent: the words and their inverses are
/// pairwise distinct and no two of them (possibly equal) overlap.
pub fn is_independent_set(ws: &[Word]) -> bool {
    let mut set: Vec<&Word> = ws.iter().collect();
    set.sort();
    set.dedup();
    if set.iter().any(|w| w.is_empty()) {
        return false;
    }
    let mut all: Vec<Word> = set.iter().map(|w| (*w).clone()).collect();
    all.extend(set.iter().map(|w| w.inverse()));
    let mut distinct = all.clone();
    distinct.sort();
    distinct.dedup();
    if distinct.len() != all.len() {
        return false;
    }
    all.iter()
        .all(|u| all.iter().all(|v| !overlaps(u, v).expect("non-empty")))
}

/// Least cyclic rotation of a cyclically reduced word under `order`.
pub fn conjugacy_minimal(w: &Word, order: &LetterOrder) -> Result<Word> {
    if !w.is_cyclically_reduced() {
        return Err(Error::NotCyclicallyReduced(w.to_string()));
    }
    Ok(w.rotations()
        .into_iter()
        .min_by(|a, b| order.cmp_words(a, b))
        .unwrap())
}

fn in_grigorchuk_base(w: &Word) -> bool {
    !w.is_empty() && w.is_cyclically_reduced() && !overlaps(w, w).expect("non-empty")
}

/// Least rotation of `w` that is itself cyclically reduced and
/// non-self-overlapping (conjugates of `w` inside the base set are exactly its
/// rotations lying in the base set).
fn base_minimal(w: &Word, order: &LetterOrder) -> Word {
    w.rotations()
        .into_iter()
        .filter(in_grigorchuk_base)
        .min_by(|a, b| order.cmp_words(a, b))
        .expect("w itself lies in the base set")
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GrigFamily {
    pub order: String,
    pub max_len: usize,
    pub members: Vec<String>,
}

/// Members `w† = min{w*, w^{-*}}` for every conjugacy class of cyclically
/// reduced, non-self-overlapping words of length at most `max_len`, in
/// shortlex order.
pub fn grigorchuk_family(rank: usize, order: &LetterOrder, max_len: usize) -> Result<Vec<Word>> {
    if order.rank() != rank {
        return Err(Error::RankMismatch { left: rank, right: order.rank() });
    }
    let strata: Vec<Vec<Word>> = (1..=max_len)
        .into_par_iter()
        .map(|len| {
            let mut reps: BTreeMap<Word, Word> = BTreeMap::new();
            for w in reduced_words_of_len(rank, len) {
                if !in_grigorchuk_base(&w) {
                    continue;
                }
                let star = base_minimal(&w, order);
                let inv_star = base_minimal(&w.inverse(), order);
                debug_assert_ne!(star, inv_star, "w conjugate to its inverse");
                let dagger = match order.cmp_words(&star, &inv_star) {
                    Ordering::Less => star,
                    Ordering::Greater => inv_star,
                    Ordering::Equal => panic!("{w} is conjugate to its inverse"),
                };
                reps.insert(dagger.clone(), dagger);
            }
            let mut v: Vec<Word> = reps.into_values().collect();
            v.sort_by(|a, b| order.cmp_words(a, b));
            v
        })
        .collect();
    Ok(strata.into_iter().flatten().collect())
}

pub fn grigorchuk_enumerate(rank: usize, order: &LetterOrder, max_len: usize) -> Result<GrigFamily> {
    let members = grigorchuk_family(rank, order, max_len)?;
    Ok(GrigFamily {
        order: order.to_string(),
        max_len,
        members: members.iter().map(Word::to_string).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enumerate::cyclically_reduced_words;

    fn w(s: &str) -> Word {
        Word::parse(2, s).unwrap()
    }

    #[test]
    fn overlap_examples() {
        assert!(overlaps(&w("ab"), &w("ba")).unwrap());
        assert!(overlaps(&w("aa"), &w("aa")).unwrap());
        assert!(!overlaps(&w("ab"), &w("ab")).unwrap());
        assert!(overlaps(&w("ab"), &w("aab")).unwrap());
        assert_eq!(overlaps(&Word::identity(2), &w("a")), Err(Error::EmptyWord));
    }

    #[test]
    fn self_independence_examples() {
        assert!(is_self_independent(&w("ab")));
        assert!(!is_self_independent(&w("aa")));
        // abA is not cyclically reduced, yet it overlaps neither itself nor aBA
        assert!(is_self_independent(&w("abA")));
        assert!(!is_self_independent(&w("aba")));
    }

    #[test]
    fn independent_set_examples() {
        assert!(!is_independent_set(&[w("ab"), w("ba")]));
        // (ab)^{-1} = BA is a subword of aBAb
        assert!(!is_independent_set(&[w("aBAb"), w("ab")]));
        assert!(is_independent_set(&[w("aBAb"), w("abb")]));
        assert!(is_independent_set(&[w("aBAb"), w("aab")]));
        assert!(!is_independent_set(&[w("ab"), w("BA")]));
    }

    #[test]
    fn conjugacy_minimal_examples() {
        let o = LetterOrder::default_for(2);
        assert_eq!(conjugacy_minimal(&w("ba"), &o).unwrap(), w("ab"));
        assert_eq!(conjugacy_minimal(&w("a"), &o).unwrap(), w("a"));
        assert_eq!(conjugacy_minimal(&w("bAbb"), &o).unwrap(), w("Abbb"));
        let rev = LetterOrder::parse(2, "BbAa").unwrap();
        assert_eq!(conjugacy_minimal(&w("ab"), &rev).unwrap(), w("ba"));
        assert!(matches!(conjugacy_minimal(&w("abA"), &o), Err(Error::NotCyclicallyReduced(_))));
    }

    #[test]
    fn conjugacy_minimal_matches_rotation_oracle() {
        let o = LetterOrder::parse(2, "bAaB").unwrap();
        for c in cyclically_reduced_words(2, 6) {
            let m = conjugacy_minimal(&c, &o).unwrap();
            let n = c.len();
            let letters = c.letters();
            for i in 0..n {
                let rot: Vec<Letter> = letters[i..].iter().chain(&letters[..i]).copied().collect();
                let rw = Word::reduce(2, rot).unwrap();
                assert_ne!(order_cmp(&o, &rw, &m), Ordering::Less);
            }
        }
    }

    fn order_cmp(o: &LetterOrder, a: &Word, b: &Word) -> Ordering {
        let ka: Vec<usize> = a.letters().iter().map(|&x| o.position(x)).collect();
        let kb: Vec<usize> = b.letters().iter().map(|&x| o.position(x)).collect();
        ka.cmp(&kb)
    }

    #[test]
    fn order_parse_errors() {
        assert!(LetterOrder::parse(2, "aAb").is_err());
        assert!(LetterOrder::parse(2, "aAbb").is_err());
        assert!(LetterOrder::parse(2, "aAbC").is_err());
        assert_eq!(LetterOrder::default_for(3).to_string(), "aAbBcC");
    }

    #[test]
    fn grigorchuk_small() {
        let o = LetterOrder::default_for(2);
        assert_eq!(grigorchuk_family(2, &o, 1).unwrap(), vec![w("a"), w("b")]);
        assert_eq!(
            grigorchuk_family(2, &o, 2).unwrap(),
            vec![w("a"), w("b"), w("ab"), w("aB")]
        );
    }

    #[test]
    fn grigorchuk_invariants() {
        let o = LetterOrder::default_for(2);
        let fam = grigorchuk_family(2, &o, 5).unwrap();
        for m in &fam {
            assert!(is_self_independent(m), "{m}");
            assert!(in_grigorchuk_base(m));
            assert!(!fam.contains(&m.inverse()));
        }
        // pairwise non-conjugate
        for (i, x) in fam.iter().enumerate() {
            for y in &fam[i + 1..] {
                if x.len() == y.len() {
                    assert!(!x.rotations().contains(y));
                    assert!(!x.inverse().rotations().contains(y));
                }
            }
        }
        // every base word is conjugate to a member or a member's inverse
        for c in cyclically_reduced_words(2, 5).into_iter().filter(in_grigorchuk_base) {
            let hit = fam
                .iter()
                .filter(|m| c.rotations().contains(m) || c.rotations().contains(&m.inverse()))
                .count();
            assert_eq!(hit, 1, "{c}");
        }
    }

    #[test]
    fn family_serializes() {
        let f = grigorchuk_enumerate(2, &LetterOrder::default_for(2), 1).unwrap();
        let s = serde_json::to_string(&f).unwrap();
        assert_eq!(s, r#"{"order":"aAbB","max_len":1,"members":["a","b"]}"#);
    }
}

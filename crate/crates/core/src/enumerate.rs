//! Enumeration and sampling of reduced words.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::word::{Letter, Word};

/// `1 + sum_{j=1..max_len} 2n (2n-1)^{j-1}`.
pub fn reduced_word_count(rank: usize, max_len: usize) -> u128 {
    let n = rank as u128;
    let mut total = 1u128;
    let mut layer = 2 * n;
    for _ in 0..max_len {
        total += layer;
        layer *= 2 * n - 1;
    }
    total
}

/// Reduced words of length exactly `len`, in lexicographic default order.
pub fn reduced_words_of_len(rank: usize, len: usize) -> Vec<Word> {
    let alphabet = Letter::alphabet(rank);
    let mut layer: Vec<Vec<Letter>> = vec![Vec::new()];
    for _ in 0..len {
        let mut next = Vec::with_capacity(layer.len() * (alphabet.len() - 1).max(1));
        for w in &layer {
            for &x in &alphabet {
                if w.last() == Some(&x.inverse()) {
                    continue;
                }
                let mut v = w.clone();
                v.push(x);
                next.push(v);
            }
        }
        layer = next;
    }
    layer
        .into_iter()
        .map(|v| Word::from_reduced_unchecked(rank, v))
        .collect()
}

/// All reduced words of length at most `max_len`, in shortlex order.
///
/// Panics if the enumerated count disagrees with [`reduced_word_count`].
pub fn reduced_words(rank: usize, max_len: usize) -> Vec<Word> {
    let out: Vec<Word> = (0..=max_len).flat_map(|l| reduced_words_of_len(rank, l)).collect();
    assert_eq!(out.len() as u128, reduced_word_count(rank, max_len));
    out
}

/// Non-empty cyclically reduced words of length at most `max_len`, shortlex.
pub fn cyclically_reduced_words(rank: usize, max_len: usize) -> Vec<Word> {
    (1..=max_len)
        .flat_map(|l| reduced_words_of_len(rank, l))
        .filter(Word::is_cyclically_reduced)
        .collect()
}

/// Seeded sampler of reduced words of length at most `max_len`, with the
/// length drawn proportionally to the number of words of that length.
pub struct WordSampler {
    rank: usize,
    cumulative: Vec<u128>,
    rng: ChaCha8Rng,
}

impl WordSampler {
    pub fn new(rank: usize, max_len: usize, seed: u64) -> WordSampler {
        let cumulative = (0..=max_len).map(|l| reduced_word_count(rank, l)).collect();
        WordSampler { rank, cumulative, rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    pub fn sample(&mut self) -> Word {
        let total = *self.cumulative.last().unwrap();
        let r = self.rng.gen_range(0..total);
        let len = self.cumulative.iter().position(|&c| r < c).unwrap();
        let alphabet = Letter::alphabet(self.rank);
        let mut v: Vec<Letter> = Vec::with_capacity(len);
        while v.len() < len {
            let x = alphabet[self.rng.gen_range(0..alphabet.len())];
            if v.last() != Some(&x.inverse()) {
                v.push(x);
            }
        }
        Word::from_reduced_unchecked(self.rank, v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_match_closed_form() {
        for rank in 1..=3 {
            for len in 0..=5 {
                assert_eq!(reduced_words(rank, len).len() as u128, reduced_word_count(rank, len));
            }
        }
        assert_eq!(reduced_word_count(2, 8), 13121);
        assert_eq!(reduced_word_count(4, 4), 3201);
    }

    #[test]
    fn shortlex_and_distinct() {
        let ws = reduced_words(2, 4);
        assert!(ws.windows(2).all(|p| p[0].shortlex_cmp(&p[1]).is_lt()));
    }

    #[test]
    fn sampler_is_deterministic() {
        let a: Vec<Word> = {
            let mut s = WordSampler::new(2, 8, 7);
            (0..20).map(|_| s.sample()).collect()
        };
        let b: Vec<Word> = {
            let mut s = WordSampler::new(2, 8, 7);
            (0..20).map(|_| s.sample()).collect()
        };
        assert_eq!(a, b);
        assert!(a.iter().all(|w| w.len() <= 8));
    }
}

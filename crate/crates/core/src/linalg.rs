//! Exact rank over the rationals.

use num::{One, Zero};

use crate::expr::Rational;

/// Row-echelon basis grown one vector at a time.
#[derive(Debug, Clone, Default)]
pub struct IncrementalBasis {
    // each row is normalized to have a 1 at its pivot, and every other row
    // has a 0 in that column
    rows: Vec<(usize, Vec<Rational>)>,
}

impl IncrementalBasis {
    pub fn new() -> IncrementalBasis {
        IncrementalBasis { rows: Vec::new() }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Inserts `v`; returns whether it raised the rank.
    pub fn insert(&mut self, mut v: Vec<Rational>) -> bool {
        for (pivot, row) in &self.rows {
            if v[*pivot].is_zero() {
                continue;
            }
            let f = v[*pivot].clone();
            for (x, r) in v.iter_mut().zip(row) {
                *x -= &f * r;
            }
        }
        let Some(pivot) = v.iter().position(|x| !x.is_zero()) else {
            return false;
        };
        let inv = Rational::one() / &v[pivot];
        for x in v.iter_mut() {
            *x *= &inv;
        }
        for (_, row) in self.rows.iter_mut() {
            if row[pivot].is_zero() {
                continue;
            }
            let f = row[pivot].clone();
            for (x, r) in row.iter_mut().zip(&v) {
                *x -= &f * r;
            }
        }
        self.rows.push((pivot, v));
        true
    }
}

/// Rank of a matrix given as rows.
pub fn rank(rows: &[Vec<Rational>]) -> usize {
    let mut basis = IncrementalBasis::new();
    for r in rows {
        basis.insert(r.clone());
    }
    basis.rank()
}

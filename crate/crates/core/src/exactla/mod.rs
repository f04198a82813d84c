//! Exact rational linear algebra: rationals, matrices, partial traces, chain
//! complexes, homology and Lefschetz traces. There are no tolerances anywhere;
//! equality is literal.

mod chain;
mod matrix;
mod rational;

pub use chain::{homology, ChainComplex, ChainEndo, ComplexSummary, Homology, HomologyDegree};
pub use matrix::{partial_trace, RatMatrix};
pub use rational::{lcm, radical, ParseRationalError, Rational};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ExactLaError {
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("d∘d ≠ 0 at degree {0}")]
    NotAComplex(i64),
    #[error("endomorphism does not commute with the differential at degree {0}")]
    NotAChainMap(i64),
}

/// A subspace of `Q^n` grown one vector at a time, kept in reduced echelon
/// form so membership is a single reduction.
#[derive(Debug, Clone)]
pub struct Subspace {
    ambient: usize,
    rows: Vec<Vec<Rational>>,
    pivots: Vec<usize>,
}

impl Subspace {
    pub fn new(ambient: usize) -> Self {
        Self {
            ambient,
            rows: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn is_full(&self) -> bool {
        self.rows.len() == self.ambient
    }

    fn reduce(&self, v: &[Rational]) -> Vec<Rational> {
        let mut v = v.to_vec();
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            if v[p].is_zero() {
                continue;
            }
            let f = v[p].clone();
            for (x, r) in v.iter_mut().zip(row).skip(p) {
                if !r.is_zero() {
                    *x -= &(&f * r);
                }
            }
        }
        v
    }

    pub fn contains(&self, v: &[Rational]) -> bool {
        self.reduce(v).iter().all(Rational::is_zero)
    }

    /// Adds `v`; returns whether the dimension grew.
    pub fn insert(&mut self, v: &[Rational]) -> bool {
        assert_eq!(v.len(), self.ambient, "vector length");
        let mut r = self.reduce(v);
        let Some(p) = r.iter().position(|x| !x.is_zero()) else {
            return false;
        };
        let inv = r[p].recip();
        for x in r.iter_mut().skip(p) {
            *x = &*x * &inv;
        }
        for (row, _) in self.rows.iter_mut().zip(&self.pivots) {
            if row[p].is_zero() {
                continue;
            }
            let f = row[p].clone();
            for (x, y) in row.iter_mut().zip(&r).skip(p) {
                if !y.is_zero() {
                    *x -= &(&f * y);
                }
            }
        }
        let at = self.pivots.partition_point(|&q| q < p);
        self.pivots.insert(at, p);
        self.rows.insert(at, r);
        true
    }
}

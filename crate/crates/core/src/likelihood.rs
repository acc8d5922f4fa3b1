//! Likelihood vectors: the diagonal of a likelihood matrix.
//!
//! A plausible proposition over `k` truth classes is described by the
//! probability of falling into each class. Class 0 is the most true one:
//! for two classes `[true, false]`, for three `[T, U, F]`.

use std::ops::Index;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default tolerance on `|sum - 1|` accepted at construction.
pub const NORMALIZATION_TOL: f64 = 1e-9;

/// Probability vector over `k >= 2` ordered truth classes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "Vec<f64>", try_from = "Vec<f64>")]
pub struct Likelihood(Vec<f64>);

impl Likelihood {
    /// Validates and renormalizes `probs` using [`NORMALIZATION_TOL`].
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        Self::with_tolerance(probs, NORMALIZATION_TOL)
    }

    /// Like [`Likelihood::new`] with an explicit normalization tolerance.
    pub fn with_tolerance(mut probs: Vec<f64>, tol: f64) -> Result<Self> {
        if probs.len() < 2 {
            return Err(Error::TooFewClasses(probs.len()));
        }
        if let Some((index, &value)) = probs
            .iter()
            .enumerate()
            .find(|(_, v)| !v.is_finite() || **v < 0.0)
        {
            return Err(Error::NegativeEntry { index, value });
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > tol {
            return Err(Error::NotNormalized { sum, tol });
        }
        if sum != 1.0 {
            probs.iter_mut().for_each(|v| *v /= sum);
        }
        Ok(Likelihood(probs))
    }

    /// Two-valued proposition that is true with probability `p`.
    pub fn boolean(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::OutOfRange {
                name: "p",
                value: p,
            });
        }
        Ok(Likelihood(vec![p, 1.0 - p]))
    }

    /// All mass on `class`.
    pub fn point(k: usize, class: usize) -> Result<Self> {
        if k < 2 {
            return Err(Error::TooFewClasses(k));
        }
        if class >= k {
            return Err(Error::DimensionMismatch {
                expected: k,
                found: class + 1,
            });
        }
        let mut probs = vec![0.0; k];
        probs[class] = 1.0;
        Ok(Likelihood(probs))
    }

    pub fn uniform(k: usize) -> Result<Self> {
        if k < 2 {
            return Err(Error::TooFewClasses(k));
        }
        Ok(Likelihood(vec![1.0 / k as f64; k]))
    }

    /// Skips validation; callers guarantee the invariants.
    pub(crate) fn from_raw(probs: Vec<f64>) -> Self {
        debug_assert!(probs.len() >= 2);
        Likelihood(probs)
    }

    /// Number of truth classes.
    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn probs(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    /// Mass of the most true class.
    pub fn truth(&self) -> f64 {
        self.0[0]
    }

    /// Tensor product with `other` as the minor index.
    pub fn tensor(&self, other: &Likelihood) -> Likelihood {
        let probs = self
            .0
            .iter()
            .flat_map(|&a| other.0.iter().map(move |&b| a * b))
            .collect();
        Likelihood(probs)
    }

    /// Largest entrywise absolute difference.
    pub fn max_abs_diff(&self, other: &Likelihood) -> f64 {
        assert_eq!(self.dim(), other.dim(), "dimension mismatch");
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Free-function form of [`Likelihood::tensor`].
pub fn tensor(a: &Likelihood, b: &Likelihood) -> Likelihood {
    a.tensor(b)
}

/// Left-folded tensor product; the first factor is the most significant index.
pub fn tensor_all<'a, I>(factors: I) -> Option<Likelihood>
where
    I: IntoIterator<Item = &'a Likelihood>,
{
    factors
        .into_iter()
        .fold(None, |acc: Option<Likelihood>, f| {
            Some(match acc {
                None => f.clone(),
                Some(acc) => acc.tensor(f),
            })
        })
}

impl Index<usize> for Likelihood {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl From<Likelihood> for Vec<f64> {
    fn from(l: Likelihood) -> Self {
        l.0
    }
}

impl TryFrom<Vec<f64>> for Likelihood {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        Likelihood::new(v)
    }
}

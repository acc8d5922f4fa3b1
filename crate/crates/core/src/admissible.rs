//! Admissible 0/1 transforms.
//!
//! An `M x N` matrix `G` whose entries are 0 or 1, with exactly one 1 per
//! column, maps a diagonal probability matrix `rho` to `G rho G^T`, which is
//! again diagonal with unit trace. On the diagonal this is the push-forward
//! of a categorical distribution along the function "column -> row of its 1",
//! which is how maps are stored here.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::error::{Error, Result};
use crate::likelihood::Likelihood;

/// Why a candidate matrix or column map is not admissible.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Violation {
    #[error("matrix has no rows or no columns")]
    Empty,
    #[error("row {row} has {found} entries, expected {expected}")]
    Ragged {
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("column {column}, row {row}: entry {value} is not 0 or 1")]
    NonBinary {
        column: usize,
        row: usize,
        value: i64,
    },
    #[error("column {column} has no 1")]
    NoOne { column: usize },
    #[error("column {column} has {count} ones")]
    MultipleOnes { column: usize, count: usize },
    #[error("column {column} targets row {target}, but there are only {rows} rows")]
    TargetOutOfRange {
        column: usize,
        target: usize,
        rows: usize,
    },
    #[error("output dimension {0} is below 2")]
    OutputTooSmall(usize),
}

impl Violation {
    /// Offending column, when the violation is local to one.
    pub fn column(&self) -> Option<usize> {
        match *self {
            Violation::NonBinary { column, .. }
            | Violation::NoOne { column }
            | Violation::MultipleOnes { column, .. }
            | Violation::TargetOutOfRange { column, .. } => Some(column),
            _ => None,
        }
    }
}

/// Column-to-row function of an admissible matrix.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawMap", into = "RawMap")]
pub struct AdmissibleMap {
    output_dim: usize,
    columns: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
struct RawMap {
    input_dim: usize,
    output_dim: usize,
    columns: Vec<usize>,
}

impl TryFrom<RawMap> for AdmissibleMap {
    type Error = Error;

    fn try_from(raw: RawMap) -> Result<Self> {
        if raw.columns.len() != raw.input_dim {
            return Err(Error::DimensionMismatch {
                expected: raw.input_dim,
                found: raw.columns.len(),
            });
        }
        AdmissibleMap::new(raw.output_dim, raw.columns)
    }
}

impl From<AdmissibleMap> for RawMap {
    fn from(g: AdmissibleMap) -> Self {
        RawMap {
            input_dim: g.columns.len(),
            output_dim: g.output_dim,
            columns: g.columns,
        }
    }
}

/// Checks a column map against an output dimension.
pub fn validate_columns(output_dim: usize, columns: &[usize]) -> Result<(), Violation> {
    if output_dim < 2 {
        return Err(Violation::OutputTooSmall(output_dim));
    }
    if columns.is_empty() {
        return Err(Violation::Empty);
    }
    match columns.iter().position(|&t| t >= output_dim) {
        Some(column) => Err(Violation::TargetOutOfRange {
            column,
            target: columns[column],
            rows: output_dim,
        }),
        None => Ok(()),
    }
}

/// Checks a raw matrix (rows of integers), reporting the first offending column.
pub fn validate_matrix(rows: &[Vec<i64>]) -> Result<(), Violation> {
    columns_of_matrix(rows).map(|_| ())
}

fn columns_of_matrix(rows: &[Vec<i64>]) -> Result<Vec<usize>, Violation> {
    let width = rows.first().map_or(0, Vec::len);
    if rows.is_empty() || width == 0 {
        return Err(Violation::Empty);
    }
    if let Some((row, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != width) {
        return Err(Violation::Ragged {
            row,
            expected: width,
            found: r.len(),
        });
    }
    (0..width)
        .map(|column| {
            let mut target = None;
            let mut count = 0;
            for (row, r) in rows.iter().enumerate() {
                match r[column] {
                    0 => {}
                    1 => {
                        count += 1;
                        target.get_or_insert(row);
                    }
                    value => return Err(Violation::NonBinary { column, row, value }),
                }
            }
            match (count, target) {
                (1, Some(t)) => Ok(t),
                (0, _) => Err(Violation::NoOne { column }),
                _ => Err(Violation::MultipleOnes { column, count }),
            }
        })
        .collect()
}

impl AdmissibleMap {
    pub fn new(output_dim: usize, columns: Vec<usize>) -> Result<Self> {
        validate_columns(output_dim, &columns)?;
        Ok(AdmissibleMap {
            output_dim,
            columns,
        })
    }

    /// Extracts the column map from a 0/1 matrix.
    pub fn from_matrix(rows: &[Vec<i64>]) -> Result<Self> {
        let columns = columns_of_matrix(rows)?;
        Self::new(rows.len(), columns)
    }

    pub fn identity(k: usize) -> Result<Self> {
        Self::new(k, (0..k).collect())
    }

    /// Sends every input class to `target`.
    pub fn constant(input_dim: usize, output_dim: usize, target: usize) -> Result<Self> {
        Self::new(output_dim, vec![target; input_dim])
    }

    /// `N`, the number of input classes.
    pub fn input_dim(&self) -> usize {
        self.columns.len()
    }

    /// `M`, the number of output classes.
    pub fn output_dim(&self) -> usize {
        self.output_dim
    }

    pub fn columns(&self) -> &[usize] {
        &self.columns
    }

    pub fn target(&self, column: usize) -> usize {
        self.columns[column]
    }

    /// The `M x N` 0/1 matrix `G`.
    pub fn matrix_form(&self) -> Vec<Vec<u8>> {
        (0..self.output_dim)
            .map(|m| self.columns.iter().map(|&t| u8::from(t == m)).collect())
            .collect()
    }

    /// Push-forward `G rho G^T` on the diagonal.
    pub fn apply(&self, rho: &Likelihood) -> Result<Likelihood> {
        if rho.dim() != self.input_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.input_dim(),
                found: rho.dim(),
            });
        }
        let mut out = vec![0.0; self.output_dim];
        for (&t, &p) in self.columns.iter().zip(rho.probs()) {
            out[t] += p;
        }
        Ok(Likelihood::from_raw(out))
    }

    /// `self ∘ first`: apply `first`, then `self`.
    pub fn compose(&self, first: &AdmissibleMap) -> Result<AdmissibleMap> {
        if first.output_dim != self.input_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.input_dim(),
                found: first.output_dim,
            });
        }
        Ok(AdmissibleMap {
            output_dim: self.output_dim,
            columns: first.columns.iter().map(|&t| self.columns[t]).collect(),
        })
    }

    /// Kronecker product acting on tensor states, `self` on the major factor.
    pub fn product(&self, other: &AdmissibleMap) -> AdmissibleMap {
        let columns = self
            .columns
            .iter()
            .flat_map(|&a| other.columns.iter().map(move |&b| a * other.output_dim + b))
            .collect();
        AdmissibleMap {
            output_dim: self.output_dim * other.output_dim,
            columns,
        }
    }
}

impl fmt::Display for AdmissibleMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, row) in self.matrix_form().iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            for (j, v) in row.iter().enumerate() {
                if j > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{v}")?;
            }
        }
        Ok(())
    }
}

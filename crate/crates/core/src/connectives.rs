//! Logical connectives as admissible maps, for any number of truth classes.
//!
//! Classes are totally ordered by truth, 0 being the most true. Conjunction
//! keeps the less true of two classes (max index), disjunction the more true
//! one (min index), negation reverses the order. With two classes this is
//! Boolean logic; with three it is the strong three-valued calculus
//! T / U / F.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::admissible::AdmissibleMap;
use crate::error::{Error, Result};
use crate::likelihood::Likelihood;

/// Largest number of maps [`enumerate_admissible`] will iterate.
pub const ENUMERATION_CAP: u64 = 1_000_000;

fn check_arity(k: usize) -> Result<()> {
    if k < 2 {
        Err(Error::InvalidArity(k))
    } else {
        Ok(())
    }
}

fn binary_map(k: usize, f: impl Fn(usize, usize) -> usize) -> Result<AdmissibleMap> {
    check_arity(k)?;
    let columns = (0..k)
        .flat_map(|i| (0..k).map(move |j| (i, j)))
        .map(|(i, j)| f(i, j))
        .collect();
    AdmissibleMap::new(k, columns)
}

/// `i -> k-1-i`.
pub fn not_map(k: usize) -> Result<AdmissibleMap> {
    check_arity(k)?;
    AdmissibleMap::new(k, (0..k).rev().collect())
}

/// `(i, j) -> max(i, j)` on `k*k` classes.
pub fn and_map(k: usize) -> Result<AdmissibleMap> {
    binary_map(k, usize::max)
}

/// `(i, j) -> min(i, j)` on `k*k` classes.
pub fn or_map(k: usize) -> Result<AdmissibleMap> {
    binary_map(k, usize::min)
}

/// `(i, j) -> min(k-1-i, j)`, i.e. `not A or B`.
pub fn implies_map(k: usize) -> Result<AdmissibleMap> {
    binary_map(k, |i, j| (k - 1 - i).min(j))
}

/// Connective names accepted on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Connective {
    Not,
    And,
    Or,
    Implies,
}

impl Connective {
    pub const ALL: [Connective; 4] = [
        Connective::Not,
        Connective::And,
        Connective::Or,
        Connective::Implies,
    ];

    pub fn arity(self) -> usize {
        match self {
            Connective::Not => 1,
            _ => 2,
        }
    }

    pub fn map(self, k: usize) -> Result<AdmissibleMap> {
        match self {
            Connective::Not => not_map(k),
            Connective::And => and_map(k),
            Connective::Or => or_map(k),
            Connective::Implies => implies_map(k),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Connective::Not => "not",
            Connective::And => "and",
            Connective::Or => "or",
            Connective::Implies => "implies",
        }
    }
}

impl fmt::Display for Connective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Connective {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Connective::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| format!("unknown connective `{s}`, expected not, and, or, implies"))
    }
}

/// Prebuilt connective maps for one arity.
#[derive(Debug, Clone)]
pub struct ConnectiveSet {
    pub not: AdmissibleMap,
    pub and: AdmissibleMap,
    pub or: AdmissibleMap,
    pub implies: AdmissibleMap,
}

impl ConnectiveSet {
    pub fn new(k: usize) -> Result<Self> {
        Ok(ConnectiveSet {
            not: not_map(k)?,
            and: and_map(k)?,
            or: or_map(k)?,
            implies: implies_map(k)?,
        })
    }

    pub fn arity(&self) -> usize {
        self.not.input_dim()
    }

    pub fn not(&self, a: &Likelihood) -> Result<Likelihood> {
        self.not.apply(a)
    }

    pub fn and(&self, a: &Likelihood, b: &Likelihood) -> Result<Likelihood> {
        self.and.apply(&a.tensor(b))
    }

    pub fn or(&self, a: &Likelihood, b: &Likelihood) -> Result<Likelihood> {
        self.or.apply(&a.tensor(b))
    }

    pub fn implies(&self, a: &Likelihood, b: &Likelihood) -> Result<Likelihood> {
        self.implies.apply(&a.tensor(b))
    }
}

/// Total function from class tuples to an output class.
///
/// The table is flattened with the first variable as the most significant
/// index, matching [`Likelihood::tensor`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawClassFunction", into = "RawClassFunction")]
pub struct ClassFunction {
    input_dims: Vec<usize>,
    output_dim: usize,
    table: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
struct RawClassFunction {
    input_dims: Vec<usize>,
    output_dim: usize,
    table: BTreeMap<String, usize>,
}

fn tuple_key(tuple: &[usize]) -> String {
    tuple
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(",")
}

impl TryFrom<RawClassFunction> for ClassFunction {
    type Error = Error;

    fn try_from(raw: RawClassFunction) -> Result<Self> {
        let mut missing = None;
        let f = ClassFunction::from_fn(raw.input_dims.clone(), raw.output_dim, |t| {
            let key = tuple_key(t);
            match raw.table.get(&key) {
                Some(&v) => v,
                None => {
                    missing.get_or_insert(key);
                    0
                }
            }
        })?;
        if let Some(key) = missing {
            return Err(Error::MissingTableEntry(key));
        }
        if raw.table.len() != f.table.len() {
            return Err(Error::DimensionMismatch {
                expected: f.table.len(),
                found: raw.table.len(),
            });
        }
        Ok(f)
    }
}

impl From<ClassFunction> for RawClassFunction {
    fn from(f: ClassFunction) -> Self {
        let table = f
            .tuples()
            .zip(&f.table)
            .map(|(t, &v)| (tuple_key(&t), v))
            .collect();
        RawClassFunction {
            input_dims: f.input_dims,
            output_dim: f.output_dim,
            table,
        }
    }
}

impl ClassFunction {
    /// Tabulates `f` over every tuple in `input_dims`.
    pub fn from_fn(
        input_dims: Vec<usize>,
        output_dim: usize,
        mut f: impl FnMut(&[usize]) -> usize,
    ) -> Result<Self> {
        if let Some(&k) = input_dims.iter().find(|&&k| k < 2) {
            return Err(Error::InvalidArity(k));
        }
        check_arity(output_dim)?;
        let mut out = ClassFunction {
            input_dims,
            output_dim,
            table: Vec::new(),
        };
        let table: Vec<usize> = out.tuples().map(|t| f(&t)).collect();
        if let Some((column, &target)) = table.iter().enumerate().find(|(_, &v)| v >= output_dim) {
            return Err(crate::admissible::Violation::TargetOutOfRange {
                column,
                target,
                rows: output_dim,
            }
            .into());
        }
        out.table = table;
        Ok(out)
    }

    /// Boolean function under the convention class 0 = true.
    pub fn boolean(arity: usize, f: impl Fn(&[bool]) -> bool) -> Result<Self> {
        Self::from_fn(vec![2; arity], 2, |t| {
            let bits: Vec<bool> = t.iter().map(|&c| c == 0).collect();
            usize::from(!f(&bits))
        })
    }

    pub fn arity(&self) -> usize {
        self.input_dims.len()
    }

    pub fn input_dims(&self) -> &[usize] {
        &self.input_dims
    }

    pub fn output_dim(&self) -> usize {
        self.output_dim
    }

    pub fn get(&self, tuple: &[usize]) -> usize {
        assert_eq!(tuple.len(), self.arity(), "tuple arity");
        let index = tuple
            .iter()
            .zip(&self.input_dims)
            .fold(0, |acc, (&c, &k)| acc * k + c);
        self.table[index]
    }

    /// All input tuples in flattened order.
    pub fn tuples(&self) -> impl Iterator<Item = Vec<usize>> + '_ {
        let total: usize = self.input_dims.iter().product();
        (0..total).map(move |mut index| {
            let mut t = vec![0; self.input_dims.len()];
            for (slot, &k) in t.iter_mut().zip(&self.input_dims).rev() {
                *slot = index % k;
                index /= k;
            }
            t
        })
    }

    pub fn to_map(&self) -> AdmissibleMap {
        AdmissibleMap::new(self.output_dim, self.table.clone())
            .expect("class function table is validated at construction")
    }
}

/// Admissible map with `columns[flat(tuple)] = f(tuple)`.
pub fn from_class_function(f: &ClassFunction) -> AdmissibleMap {
    f.to_map()
}

/// `M^N` as a big integer.
pub fn count_admissible(input_dim: usize, output_dim: usize) -> BigUint {
    BigUint::from(output_dim).pow(input_dim as u32)
}

/// Number of distinct connectives of `n` two-valued propositions, `2^(2^n)`.
pub fn boolean_function_count(n: u32) -> BigUint {
    count_admissible(1 << n, 2)
}

/// Iterates every admissible `M x N` map exactly once.
///
/// Column 0 is the most significant digit of the enumeration order.
pub fn enumerate_admissible(input_dim: usize, output_dim: usize) -> Result<AdmissibleMaps> {
    check_arity(output_dim)?;
    if input_dim == 0 {
        return Err(Error::InvalidArity(input_dim));
    }
    let count = count_admissible(input_dim, output_dim);
    if count > BigUint::from(ENUMERATION_CAP) {
        return Err(Error::EnumerationTooLarge {
            count,
            cap: ENUMERATION_CAP,
        });
    }
    let remaining = u64::try_from(&count).expect("count is below the cap");
    Ok(AdmissibleMaps {
        output_dim,
        next: Some(vec![0; input_dim]),
        remaining,
    })
}

/// Iterator returned by [`enumerate_admissible`].
#[derive(Debug, Clone)]
pub struct AdmissibleMaps {
    output_dim: usize,
    next: Option<Vec<usize>>,
    remaining: u64,
}

impl Iterator for AdmissibleMaps {
    type Item = AdmissibleMap;

    fn next(&mut self) -> Option<AdmissibleMap> {
        let current = self.next.take()?;
        let mut succ = current.clone();
        let mut carried = true;
        for digit in succ.iter_mut().rev() {
            *digit += 1;
            if *digit < self.output_dim {
                carried = false;
                break;
            }
            *digit = 0;
        }
        if !carried {
            self.next = Some(succ);
        }
        self.remaining -= 1;
        Some(AdmissibleMap::new(self.output_dim, current).expect("digits below output_dim"))
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = self.remaining as usize;
        (n, Some(n))
    }
}

impl ExactSizeIterator for AdmissibleMaps {}

/// Embeds a two-valued likelihood into `k` classes: truth mass to class 0,
/// falsity mass to class `k-1`.
///
/// This is one choice of mixed-arity bridge, not a canonical one.
pub fn lift_arity(rho: &Likelihood, k: usize) -> Result<Likelihood> {
    check_arity(k)?;
    if rho.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: rho.dim(),
        });
    }
    let mut probs = vec![0.0; k];
    probs[0] = rho[0];
    probs[k - 1] += rho[1];
    Ok(Likelihood::from_raw(probs))
}

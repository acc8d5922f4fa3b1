use num_bigint::BigUint;
use thiserror::Error;

use crate::formula::ParseError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("likelihood needs at least 2 classes, got {0}")]
    TooFewClasses(usize),

    #[error("likelihood entry {index} is {value}, expected a finite nonnegative number")]
    NegativeEntry { index: usize, value: f64 },

    #[error("likelihood sums to {sum}, outside tolerance {tol} of 1")]
    NotNormalized { sum: f64, tol: f64 },

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid admissible map: {0}")]
    InvalidMap(#[from] crate::admissible::Violation),

    #[error("arity {0} is not supported, need at least 2")]
    InvalidArity(usize),

    #[error("enumeration of {count} maps exceeds the cap of {cap}")]
    EnumerationTooLarge { count: BigUint, cap: u64 },

    #[error("class function table has no entry for tuple ({0})")]
    MissingTableEntry(String),

    #[error(transparent)]
    Parse(#[from] ParseError),

    #[error("atom `{0}` is not bound in the environment")]
    UnboundAtom(String),

    #[error("atom `{atom}` has arity {found}, expected {expected}")]
    ArityMismatch {
        atom: String,
        expected: usize,
        found: usize,
    },

    #[error("atom `{0}` does not appear in the atom order")]
    AtomNotInOrder(String),

    #[error("atom `{0}` is listed more than once in the atom order")]
    DuplicateAtom(String),

    #[error("{0} atoms is too many to compile, limit is {1}")]
    TooManyAtoms(usize, usize),

    #[error("mode index {index} out of range for {modes} modes")]
    ModeOutOfRange { index: usize, modes: usize },

    #[error("register of {0} modes exceeds the limit of {1}")]
    TooManyModes(usize, usize),

    #[error("jump operator uses mode {0} in more than one role")]
    OverlappingSites(usize),

    #[error("rate {0} is not a finite nonnegative number")]
    InvalidRate(f64),

    #[error("duration {0} is not a finite nonnegative number")]
    InvalidDuration(f64),

    #[error("degenerate preparation rates: {0}")]
    DegenerateRates(&'static str),

    #[error("no convergence after {steps} steps (t = {time}, residual {residual:e})")]
    NonConvergence {
        steps: usize,
        time: f64,
        residual: f64,
    },

    #[error("stationary state disagrees with closed form by {0:e}")]
    CrossCheck(f64),

    #[error("{name} = {value} is outside [0, 1]")]
    OutOfRange { name: &'static str, value: f64 },

    #[error("sample count must be positive")]
    ZeroSamples,
}

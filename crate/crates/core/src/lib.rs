//! Probabilistic many-valued logic over likelihood vectors.
//!
//! A plausible proposition over `k` ordered truth classes is a
//! [`Likelihood`]: the diagonal of a unit-trace diagonal density matrix.
//! Every connective is an [`AdmissibleMap`], a 0/1 matrix with one 1 per
//! column, applied to the tensor product of its operands. The same
//! connectives arise as stationary states of diagonal Lindblad rate
//! dynamics on a small fermionic register ([`lindblad`]), and the calculus
//! is applied to Lefebvre's reflexive-choice model ([`lefebvre`]).
//!
//! ```
//! use lmlogic::{evaluate, parse, Environment, Likelihood};
//!
//! let env = Environment::new()
//!     .with("A", Likelihood::boolean(0.2).unwrap())
//!     .with("B", Likelihood::boolean(0.3).unwrap());
//! let out = evaluate(&parse("A and B").unwrap(), &env).unwrap();
//! assert!((out[0] - 0.06).abs() < 1e-15);
//! ```

pub mod admissible;
pub mod connectives;
mod error;
pub mod formula;
pub mod lefebvre;
pub mod likelihood;
pub mod lindblad;

pub use admissible::{validate_matrix, AdmissibleMap, Violation};
pub use connectives::{
    and_map, count_admissible, enumerate_admissible, from_class_function, implies_map, lift_arity,
    not_map, or_map, ClassFunction, Connective, ConnectiveSet, ENUMERATION_CAP,
};
pub use error::{Error, Result};
pub use formula::{
    compile_boolean, compile_boolean_default, evaluate, parse, Environment, Formula,
};
pub use likelihood::{tensor, tensor_all, Likelihood};

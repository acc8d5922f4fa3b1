//! Propositional formulas over named atoms.
//!
//! Two semantics are offered:
//!
//! * [`evaluate`] walks the tree bottom-up, tensoring the children of every
//!   connective and pushing the product forward through the connective's
//!   admissible map. Every atom occurrence is an independent event, so
//!   `A or not A` is not a tautology.
//! * [`compile_boolean`] builds one admissible map from the joint state of
//!   the distinct atoms, treating repeated occurrences as the same variable.
//!
//! The two agree whenever no atom occurs twice.

mod parse;

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use parse::{parse, ParseError};

use crate::admissible::AdmissibleMap;
use crate::connectives::ConnectiveSet;
use crate::error::{Error, Result};
use crate::likelihood::Likelihood;

/// Upper bound on distinct atoms for [`compile_boolean`] (`2^20` columns).
pub const MAX_COMPILE_ATOMS: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    Atom(String),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
}

impl Formula {
    pub fn atom(name: impl Into<String>) -> Self {
        Formula::Atom(name.into())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Self {
        Formula::Not(Box::new(f))
    }

    pub fn and(l: Formula, r: Formula) -> Self {
        Formula::And(Box::new(l), Box::new(r))
    }

    pub fn or(l: Formula, r: Formula) -> Self {
        Formula::Or(Box::new(l), Box::new(r))
    }

    pub fn implies(l: Formula, r: Formula) -> Self {
        Formula::Implies(Box::new(l), Box::new(r))
    }

    /// Distinct atom names in order of first appearance.
    pub fn atoms(&self) -> Vec<&str> {
        fn walk<'a>(f: &'a Formula, out: &mut Vec<&'a str>) {
            match f {
                Formula::Atom(name) => {
                    if !out.contains(&name.as_str()) {
                        out.push(name);
                    }
                }
                Formula::Not(c) => walk(c, out),
                Formula::And(l, r) | Formula::Or(l, r) | Formula::Implies(l, r) => {
                    walk(l, out);
                    walk(r, out);
                }
            }
        }
        let mut out = Vec::new();
        walk(self, &mut out);
        out
    }

    /// Whether some atom occurs more than once.
    pub fn has_repeated_atoms(&self) -> bool {
        fn count(f: &Formula) -> usize {
            match f {
                Formula::Atom(_) => 1,
                Formula::Not(c) => count(c),
                Formula::And(l, r) | Formula::Or(l, r) | Formula::Implies(l, r) => {
                    count(l) + count(r)
                }
            }
        }
        count(self) != self.atoms().len()
    }

    /// Classical two-valued evaluation.
    pub fn eval_bool(&self, value: &impl Fn(&str) -> bool) -> bool {
        match self {
            Formula::Atom(name) => value(name),
            Formula::Not(c) => !c.eval_bool(value),
            Formula::And(l, r) => l.eval_bool(value) && r.eval_bool(value),
            Formula::Or(l, r) => l.eval_bool(value) || r.eval_bool(value),
            Formula::Implies(l, r) => !l.eval_bool(value) || r.eval_bool(value),
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Formula::Implies(..) => 0,
            Formula::Or(..) => 1,
            Formula::And(..) => 2,
            Formula::Not(_) | Formula::Atom(_) => 3,
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn child(f: &mut fmt::Formatter<'_>, c: &Formula, min: u8) -> fmt::Result {
            if c.precedence() < min {
                write!(f, "({c})")
            } else {
                write!(f, "{c}")
            }
        }
        match self {
            Formula::Atom(name) => f.write_str(name),
            Formula::Not(c) => {
                f.write_str("not ")?;
                child(f, c, 3)
            }
            Formula::And(l, r) => {
                child(f, l, 2)?;
                f.write_str(" and ")?;
                child(f, r, 3)
            }
            Formula::Or(l, r) => {
                child(f, l, 1)?;
                f.write_str(" or ")?;
                child(f, r, 2)
            }
            Formula::Implies(l, r) => {
                child(f, l, 1)?;
                f.write_str(" => ")?;
                child(f, r, 0)
            }
        }
    }
}

impl FromStr for Formula {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, ParseError> {
        parse(s)
    }
}

/// Bindings from atom names to likelihoods.
///
/// In JSON this is an object `name -> probability array`; a bare number `p`
/// is accepted as shorthand for the two-valued `[p, 1 - p]`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Environment(BTreeMap<String, Binding>);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawBinding")]
struct Binding(Likelihood);

#[derive(Deserialize)]
#[serde(untagged)]
enum RawBinding {
    Truth(f64),
    Probs(Vec<f64>),
}

impl TryFrom<RawBinding> for Binding {
    type Error = Error;

    fn try_from(raw: RawBinding) -> Result<Self> {
        match raw {
            RawBinding::Truth(p) => Likelihood::boolean(p).map(Binding),
            RawBinding::Probs(v) => Likelihood::new(v).map(Binding),
        }
    }
}

impl Environment {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn bind(&mut self, name: impl Into<String>, rho: Likelihood) -> &mut Self {
        self.0.insert(name.into(), Binding(rho));
        self
    }

    pub fn with(mut self, name: impl Into<String>, rho: Likelihood) -> Self {
        self.bind(name, rho);
        self
    }

    pub fn get(&self, name: &str) -> Option<&Likelihood> {
        self.0.get(name).map(|b| &b.0)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Looks up every atom of `f`, checking they share one arity.
    fn resolve<'a>(&'a self, f: &Formula) -> Result<HashMap<&'a str, &'a Likelihood>> {
        let mut arity: Option<(String, usize)> = None;
        let mut out = HashMap::new();
        for name in f.atoms() {
            let (key, binding) = self
                .0
                .get_key_value(name)
                .ok_or_else(|| Error::UnboundAtom(name.to_string()))?;
            let k = binding.0.dim();
            match &arity {
                None => arity = Some((name.to_string(), k)),
                Some((_, expected)) if *expected != k => {
                    return Err(Error::ArityMismatch {
                        atom: name.to_string(),
                        expected: *expected,
                        found: k,
                    })
                }
                _ => {}
            }
            out.insert(key.as_str(), &binding.0);
        }
        Ok(out)
    }
}

impl<S: Into<String>> FromIterator<(S, Likelihood)> for Environment {
    fn from_iter<I: IntoIterator<Item = (S, Likelihood)>>(iter: I) -> Self {
        Environment(
            iter.into_iter()
                .map(|(k, v)| (k.into(), Binding(v)))
                .collect(),
        )
    }
}

/// Tree evaluation with independent atom occurrences.
pub fn evaluate(f: &Formula, env: &Environment) -> Result<Likelihood> {
    let bound = env.resolve(f)?;
    let k = bound.values().next().map_or(2, |l| l.dim());
    let ops = ConnectiveSet::new(k)?;
    eval_node(f, &bound, &ops)
}

fn eval_node(
    f: &Formula,
    env: &HashMap<&str, &Likelihood>,
    ops: &ConnectiveSet,
) -> Result<Likelihood> {
    match f {
        Formula::Atom(name) => Ok(env[name.as_str()].clone()),
        Formula::Not(c) => ops.not(&eval_node(c, env, ops)?),
        Formula::And(l, r) => ops.and(&eval_node(l, env, ops)?, &eval_node(r, env, ops)?),
        Formula::Or(l, r) => ops.or(&eval_node(l, env, ops)?, &eval_node(r, env, ops)?),
        Formula::Implies(l, r) => ops.implies(&eval_node(l, env, ops)?, &eval_node(r, env, ops)?),
    }
}

/// Boolean function of `f` as a `2^N -> 2` admissible map.
///
/// Column `c` encodes the assignment whose bit for `atom_order[i]` is bit
/// `N-1-i` of `c`, with bit 0 meaning true. Atoms listed in `atom_order` but
/// absent from `f` are dummy variables.
pub fn compile_boolean<S: AsRef<str>>(f: &Formula, atom_order: &[S]) -> Result<AdmissibleMap> {
    let order: Vec<&str> = atom_order.iter().map(AsRef::as_ref).collect();
    for (i, name) in order.iter().enumerate() {
        if order[..i].contains(name) {
            return Err(Error::DuplicateAtom(name.to_string()));
        }
    }
    if let Some(missing) = f.atoms().into_iter().find(|a| !order.contains(a)) {
        return Err(Error::AtomNotInOrder(missing.to_string()));
    }
    let n = order.len();
    if n > MAX_COMPILE_ATOMS {
        return Err(Error::TooManyAtoms(n, MAX_COMPILE_ATOMS));
    }
    let slot: HashMap<&str, usize> = order.iter().enumerate().map(|(i, &a)| (a, i)).collect();
    let columns = (0..1usize << n)
        .map(|c| {
            let truth = |name: &str| (c >> (n - 1 - slot[name])) & 1 == 0;
            usize::from(!f.eval_bool(&truth))
        })
        .collect();
    AdmissibleMap::new(2, columns)
}

/// [`compile_boolean`] with atoms in first-appearance order.
pub fn compile_boolean_default(f: &Formula) -> Result<AdmissibleMap> {
    compile_boolean(f, &f.atoms())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn env2(pairs: &[(&str, f64)]) -> Environment {
        pairs
            .iter()
            .map(|&(n, p)| (n, Likelihood::boolean(p).unwrap()))
            .collect()
    }

    #[test]
    fn evaluate_examples() {
        let f = parse("A and B").unwrap();
        let out = evaluate(&f, &env2(&[("A", 0.5), ("B", 0.5)])).unwrap();
        assert_eq!(out.probs(), &[0.25, 0.75]);

        let f = parse("A or not A").unwrap();
        let out = evaluate(&f, &env2(&[("A", 0.3)])).unwrap();
        assert!((out[0] - 0.79).abs() < 1e-15);
        assert!((out[1] - 0.21).abs() < 1e-15);

        let env = env2(&[("A", 0.37), ("B", 0.81)]);
        let lhs = evaluate(&parse("not (A and B)").unwrap(), &env).unwrap();
        let rhs = evaluate(&parse("not A or not B").unwrap(), &env).unwrap();
        assert!(lhs.max_abs_diff(&rhs) < 1e-15);
    }

    #[test]
    fn evaluate_errors() {
        let f = parse("A and C").unwrap();
        assert_eq!(
            evaluate(&f, &env2(&[("A", 0.5)])),
            Err(Error::UnboundAtom("C".into()))
        );
        let env = Environment::new()
            .with("A", Likelihood::boolean(0.5).unwrap())
            .with("C", Likelihood::uniform(3).unwrap());
        assert!(matches!(
            evaluate(&f, &env),
            Err(Error::ArityMismatch {
                expected: 2,
                found: 3,
                ..
            })
        ));
        // unrelated bindings of another arity are ignored
        let env = env.with("Z", Likelihood::uniform(4).unwrap());
        assert!(evaluate(&parse("A").unwrap(), &env).is_ok());
    }

    #[test]
    fn compile_examples() {
        let g = compile_boolean_default(&parse("A and B").unwrap()).unwrap();
        assert_eq!(g.columns(), &[0, 1, 1, 1]);
        let g = compile_boolean_default(&parse("A or not A").unwrap()).unwrap();
        assert_eq!(g, AdmissibleMap::constant(2, 2, 0).unwrap());

        let f = parse("(x3 => x2) => x1").unwrap();
        let g = compile_boolean_default(&f).unwrap();
        let h = Likelihood::boolean(0.5).unwrap();
        let joint = crate::likelihood::tensor_all([&h, &h, &h]).unwrap();
        assert_eq!(g.apply(&joint).unwrap()[0], 0.625);
    }

    #[test]
    fn compile_respects_atom_order() {
        let f = parse("A and not B").unwrap();
        let ab = compile_boolean(&f, &["A", "B"]).unwrap();
        let ba = compile_boolean(&f, &["B", "A"]).unwrap();
        assert_eq!(ab.columns(), &[1, 0, 1, 1]);
        assert_eq!(ba.columns(), &[1, 1, 0, 1]);
        assert_eq!(
            compile_boolean(&f, &["A"]),
            Err(Error::AtomNotInOrder("B".into()))
        );
        assert_eq!(
            compile_boolean(&f, &["A", "B", "A"]),
            Err(Error::DuplicateAtom("A".into()))
        );
        let padded = compile_boolean(&f, &["A", "B", "C"]).unwrap();
        assert_eq!(padded.input_dim(), 8);
    }

    #[test]
    fn printing_round_trips() {
        for s in [
            "(x3 => x2) => x1",
            "a => b => c",
            "not (a or b) and c",
            "a or (b => c)",
            "a and (b and c)",
            "not not a",
        ] {
            let f = parse(s).unwrap();
            assert_eq!(parse(&f.to_string()).unwrap(), f, "{s} -> {f}");
        }
        assert_eq!(parse("(a => b) => c").unwrap().to_string(), "(a => b) => c");
        assert_eq!(parse("a & (b | c)").unwrap().to_string(), "a and (b or c)");
    }

    #[test]
    fn environment_json() {
        let env: Environment =
            serde_json::from_str(r#"{"A": 0.25, "B": [0.2, 0.3, 0.5]}"#).unwrap();
        assert_eq!(env.get("A").unwrap().probs(), &[0.25, 0.75]);
        assert_eq!(env.get("B").unwrap().dim(), 3);
        assert!(serde_json::from_str::<Environment>(r#"{"A": 1.5}"#).is_err());
        assert!(serde_json::from_str::<Environment>(r#"{"A": [0.5, 0.6]}"#).is_err());
    }

    #[test]
    fn repeated_atoms() {
        assert!(parse("A or not A").unwrap().has_repeated_atoms());
        assert!(!parse("A or not B").unwrap().has_repeated_atoms());
    }
}

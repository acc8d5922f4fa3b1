//! Lefebvre's model of reflexive bipolar choice and a three-alternative
//! extension.
//!
//! Three inputs push a subject towards the positive pole: `x1` environment
//! pressure, `x2` past experience, `x3` own intention. Read as Boolean
//! variables, the choice is the double implication `(x3 => x2) => x1`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::formula::{evaluate, parse, Environment};
use crate::likelihood::Likelihood;

/// The choice formula, in the syntax accepted by [`parse`].
pub const DOUBLE_IMPLICATION: &str = "(x3 => x2) => x1";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawBipolar")]
pub struct BipolarInputs {
    pub x1: f64,
    pub x2: f64,
    pub x3: f64,
}

#[derive(Deserialize)]
struct RawBipolar {
    x1: f64,
    x2: f64,
    x3: f64,
}

impl TryFrom<RawBipolar> for BipolarInputs {
    type Error = Error;

    fn try_from(r: RawBipolar) -> Result<Self> {
        BipolarInputs::new(r.x1, r.x2, r.x3)
    }
}

impl BipolarInputs {
    pub fn new(x1: f64, x2: f64, x3: f64) -> Result<Self> {
        for (name, v) in [("x1", x1), ("x2", x2), ("x3", x3)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::OutOfRange { name, value: v });
            }
        }
        Ok(BipolarInputs { x1, x2, x3 })
    }
}

/// Probability of choosing the positive pole: `x1 + x3 (1 - x1)(1 - x2)`.
pub fn bipolar_choice(inputs: &BipolarInputs) -> f64 {
    let BipolarInputs { x1, x2, x3 } = *inputs;
    x1 + x3 * (1.0 - x1) * (1.0 - x2)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExpectationMode {
    Analytic,
    MonteCarlo { samples: u64, seed: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub mean: f64,
    /// Standard error of the mean; absent for analytic values and single samples.
    pub std_error: Option<f64>,
    pub samples: u64,
}

/// `E[X]` when `x1, x2, x3` are independent and uniform on `[0, 1]`.
pub fn bipolar_uniform_expectation(mode: ExpectationMode) -> Result<Estimate> {
    match mode {
        // E[x1] + E[x3] E[1-x1] E[1-x2]
        ExpectationMode::Analytic => Ok(Estimate {
            mean: 0.5 + 0.5 * 0.5 * 0.5,
            std_error: None,
            samples: 0,
        }),
        ExpectationMode::MonteCarlo { samples, seed } => {
            if samples == 0 {
                return Err(Error::ZeroSamples);
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            // Welford
            let (mut mean, mut m2) = (0.0, 0.0);
            for i in 1..=samples {
                let x = BipolarInputs {
                    x1: rng.random(),
                    x2: rng.random(),
                    x3: rng.random(),
                };
                let v = bipolar_choice(&x);
                let delta = v - mean;
                mean += delta / i as f64;
                m2 += delta * (v - mean);
            }
            let std_error =
                (samples > 1).then(|| (m2 / (samples - 1) as f64 / samples as f64).sqrt());
            Ok(Estimate {
                mean,
                std_error,
                samples,
            })
        }
    }
}

/// Three-valued likelihoods `(T, U, F)` of `x1`, `x2`, `x3`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawTripolar")]
pub struct TripolarInputs {
    pub x1: Likelihood,
    pub x2: Likelihood,
    pub x3: Likelihood,
}

#[derive(Deserialize)]
struct RawTripolar {
    x1: Likelihood,
    x2: Likelihood,
    x3: Likelihood,
}

impl TryFrom<RawTripolar> for TripolarInputs {
    type Error = Error;

    fn try_from(r: RawTripolar) -> Result<Self> {
        TripolarInputs::new(r.x1, r.x2, r.x3)
    }
}

impl TripolarInputs {
    pub fn new(x1: Likelihood, x2: Likelihood, x3: Likelihood) -> Result<Self> {
        for (name, l) in [("x1", &x1), ("x2", &x2), ("x3", &x3)] {
            if l.dim() != 3 {
                return Err(Error::ArityMismatch {
                    atom: name.to_string(),
                    expected: 3,
                    found: l.dim(),
                });
            }
        }
        Ok(TripolarInputs { x1, x2, x3 })
    }

    pub fn uniform() -> Self {
        let u = Likelihood::uniform(3).expect("3 classes");
        TripolarInputs {
            x1: u.clone(),
            x2: u.clone(),
            x3: u,
        }
    }

    fn environment(&self) -> Environment {
        Environment::new()
            .with("x1", self.x1.clone())
            .with("x2", self.x2.clone())
            .with("x3", self.x3.clone())
    }
}

/// Probabilities of the positive pole, the negative pole and the middle way.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TripolarChoice {
    #[serde(rename = "X")]
    pub positive: f64,
    #[serde(rename = "Y")]
    pub negative: f64,
    #[serde(rename = "Z")]
    pub middle: f64,
}

impl TripolarChoice {
    pub fn max_abs_diff(&self, other: &TripolarChoice) -> f64 {
        [
            self.positive - other.positive,
            self.negative - other.negative,
            self.middle - other.middle,
        ]
        .iter()
        .map(|d| d.abs())
        .fold(0.0, f64::max)
    }
}

/// Closed form: `X = p1 + r1 q3 - p1 q3 r1`, `Y = p3 (q1 + r3 - q1 r3)`,
/// `Z = 1 - X - Y`, with `p, q, r` the likelihoods of `x1, x2, x3`.
pub fn tripolar_choice(inputs: &TripolarInputs) -> TripolarChoice {
    let (p, q, r) = (&inputs.x1, &inputs.x2, &inputs.x3);
    let positive = p[0] + r[0] * q[2] - p[0] * q[2] * r[0];
    let negative = p[2] * (q[0] + r[2] - q[0] * r[2]);
    TripolarChoice {
        positive,
        negative,
        middle: 1.0 - positive - negative,
    }
}

/// Evaluates [`DOUBLE_IMPLICATION`] with three-valued connectives; T mass is
/// the positive pole, F mass the negative one, U mass the middle way.
pub fn tripolar_via_formula(inputs: &TripolarInputs) -> Result<TripolarChoice> {
    let f = parse(DOUBLE_IMPLICATION)?;
    let out = evaluate(&f, &inputs.environment())?;
    Ok(TripolarChoice {
        positive: out[0],
        negative: out[2],
        middle: out[1],
    })
}

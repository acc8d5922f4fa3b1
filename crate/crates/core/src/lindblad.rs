//! Diagonal Lindblad dynamics of an `n`-mode fermionic register.
//!
//! With zero Hamiltonian and monomial jump operators
//! `R = sqrt(rate/2) * f†_{c..} f_{a..} N_{k..}`, the diagonal of the density
//! matrix (the distribution over occupation patterns) obeys a closed
//! classical master equation `dp/dt = Q p`. Each operator moves probability
//! from every state where it acts to the single state it maps onto, at the
//! bare `rate` (`2 |sqrt(rate/2)|^2`). Fermionic signs drop out.
//!
//! States are indexed by their occupation bits read as a binary number with
//! mode 0 as the most significant bit. An occupied mode means "true".
//!
//! Time evolution uses uniformization: with `L` the largest exit rate,
//! `exp(Q t) = sum_k Poisson(k; L t) P^k` where `P = I + Q / L` is
//! stochastic, so every partial sum is nonnegative.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::likelihood::{Likelihood, NORMALIZATION_TOL};

/// Largest register size; the generator is stored densely.
pub const MAX_MODES: usize = 12;

/// Stationarity threshold on `‖Q p‖₁`.
pub const STATIONARY_TOL: f64 = 1e-10;

/// Agreement required between a prepared state and its closed form.
pub const CROSS_CHECK_TOL: f64 = 1e-8;

/// Rate used by the built-in two-mode gates.
pub const GATE_RATE: f64 = 1.0;

// Poisson mean per uniformization chunk; keeps exp(-L dt) far from underflow.
const CHUNK: f64 = 20.0;
const TAIL_TOL: f64 = 1e-16;

/// Monomial jump operator `sqrt(rate/2) * prod f†_create * prod f_annihilate * prod N_control`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JumpOperator {
    pub rate: f64,
    #[serde(default)]
    pub create: Vec<usize>,
    #[serde(default)]
    pub annihilate: Vec<usize>,
    #[serde(default)]
    pub control: Vec<usize>,
}

impl JumpOperator {
    pub fn new(
        rate: f64,
        create: Vec<usize>,
        annihilate: Vec<usize>,
        control: Vec<usize>,
    ) -> Result<Self> {
        let op = JumpOperator {
            rate,
            create,
            annihilate,
            control,
        };
        op.check(usize::MAX)?;
        Ok(op)
    }

    /// `f†_mode`.
    pub fn creation(mode: usize, rate: f64) -> Self {
        JumpOperator {
            rate,
            create: vec![mode],
            annihilate: vec![],
            control: vec![],
        }
    }

    /// `f_mode`.
    pub fn annihilation(mode: usize, rate: f64) -> Self {
        JumpOperator {
            rate,
            create: vec![],
            annihilate: vec![mode],
            control: vec![],
        }
    }

    /// `f†_to f_from`: moves a particle from `from` to `to`.
    pub fn hop(from: usize, to: usize, rate: f64) -> Self {
        JumpOperator {
            rate,
            create: vec![to],
            annihilate: vec![from],
            control: vec![],
        }
    }

    /// `f†_target N_control`.
    pub fn controlled_creation(target: usize, control: usize, rate: f64) -> Self {
        JumpOperator {
            rate,
            create: vec![target],
            annihilate: vec![],
            control: vec![control],
        }
    }

    fn sites(&self) -> impl Iterator<Item = usize> + '_ {
        self.create
            .iter()
            .chain(&self.annihilate)
            .chain(&self.control)
            .copied()
    }

    fn check(&self, modes: usize) -> Result<()> {
        if !self.rate.is_finite() || self.rate < 0.0 {
            return Err(Error::InvalidRate(self.rate));
        }
        let mut seen = Vec::new();
        for site in self.sites() {
            if site >= modes {
                return Err(Error::ModeOutOfRange { index: site, modes });
            }
            if seen.contains(&site) {
                return Err(Error::OverlappingSites(site));
            }
            seen.push(site);
        }
        Ok(())
    }

    /// Target state if the operator acts on `state`.
    fn fire(&self, state: usize, modes: usize) -> Option<usize> {
        let mask = |m: &usize| 1usize << (modes - 1 - m);
        let occupied = |m: &usize| state & mask(m) != 0;
        let acts = self.annihilate.iter().all(occupied)
            && self.control.iter().all(occupied)
            && !self.create.iter().any(occupied);
        if !acts {
            return None;
        }
        let flip = self
            .create
            .iter()
            .chain(&self.annihilate)
            .fold(0, |acc, m| acc | mask(m));
        Some(state ^ flip)
    }
}

/// Register size plus jump operators, as read from gate-spec JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GateSpec {
    pub n: usize,
    pub ops: Vec<JumpOperator>,
}

impl GateSpec {
    pub fn build(&self) -> Result<RateModel> {
        RateModel::new(self.n, &self.ops)
    }
}

/// Occupation pattern of an `n`-mode register.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct OccupationState {
    modes: usize,
    index: usize,
}

impl OccupationState {
    pub fn new(modes: usize, index: usize) -> Result<Self> {
        check_modes(modes)?;
        if index >= 1 << modes {
            return Err(Error::DimensionMismatch {
                expected: 1 << modes,
                found: index + 1,
            });
        }
        Ok(OccupationState { modes, index })
    }

    pub fn from_bits(bits: &[bool]) -> Result<Self> {
        let index = bits.iter().fold(0, |acc, &b| (acc << 1) | usize::from(b));
        Self::new(bits.len(), index)
    }

    pub fn index(&self) -> usize {
        self.index
    }

    pub fn occupied(&self, mode: usize) -> bool {
        assert!(mode < self.modes, "mode out of range");
        self.index >> (self.modes - 1 - mode) & 1 == 1
    }

    pub fn bits(&self) -> Vec<bool> {
        (0..self.modes).map(|m| self.occupied(m)).collect()
    }
}

impl fmt::Display for OccupationState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.bits() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

fn check_modes(modes: usize) -> Result<()> {
    if modes == 0 || modes > MAX_MODES {
        return Err(Error::TooManyModes(modes, MAX_MODES));
    }
    Ok(())
}

/// Generator `Q` of the diagonal dynamics; columns sum to zero.
#[derive(Debug, Clone, PartialEq)]
pub struct RateModel {
    modes: usize,
    /// Row-major, `q[to * dim + from]`.
    q: Vec<f64>,
    /// Off-diagonal entries as `(from, to, rate)`.
    transitions: Vec<(usize, usize, f64)>,
    exit: Vec<f64>,
}

impl RateModel {
    pub fn new(modes: usize, ops: &[JumpOperator]) -> Result<Self> {
        check_modes(modes)?;
        for op in ops {
            op.check(modes)?;
        }
        let dim = 1 << modes;
        let mut q = vec![0.0; dim * dim];
        for op in ops.iter().filter(|op| op.rate > 0.0) {
            for from in 0..dim {
                if let Some(to) = op.fire(from, modes) {
                    if to != from {
                        q[to * dim + from] += op.rate;
                        q[from * dim + from] -= op.rate;
                    }
                }
            }
        }
        let transitions = (0..dim)
            .flat_map(|to| (0..dim).map(move |from| (from, to)))
            .filter(|&(from, to)| from != to && q[to * dim + from] > 0.0)
            .map(|(from, to)| (from, to, q[to * dim + from]))
            .collect();
        let exit = (0..dim).map(|s| -q[s * dim + s]).collect();
        Ok(RateModel {
            modes,
            q,
            transitions,
            exit,
        })
    }

    pub fn zero(modes: usize) -> Result<Self> {
        Self::new(modes, &[])
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    /// Number of occupation states, `2^n`.
    pub fn dim(&self) -> usize {
        self.exit.len()
    }

    /// Generator entry `Q[to][from]`.
    pub fn entry(&self, to: usize, from: usize) -> f64 {
        self.q[to * self.dim() + from]
    }

    /// Transition rate `W(to <- from)`, zero on the diagonal.
    pub fn rate(&self, to: usize, from: usize) -> f64 {
        if to == from {
            0.0
        } else {
            self.entry(to, from)
        }
    }

    pub fn generator(&self) -> Vec<Vec<f64>> {
        self.q.chunks(self.dim()).map(<[f64]>::to_vec).collect()
    }

    pub fn transitions(&self) -> &[(usize, usize, f64)] {
        &self.transitions
    }

    pub fn max_exit_rate(&self) -> f64 {
        self.exit.iter().copied().fold(0.0, f64::max)
    }

    pub fn is_zero(&self) -> bool {
        self.transitions.is_empty()
    }

    /// `Q p`.
    pub fn apply(&self, p: &[f64]) -> Vec<f64> {
        let mut out: Vec<f64> = p.iter().zip(&self.exit).map(|(v, e)| -e * v).collect();
        for &(from, to, rate) in &self.transitions {
            out[to] += rate * p[from];
        }
        out
    }

    /// `‖Q p‖₁`.
    pub fn residual(&self, p: &[f64]) -> f64 {
        self.apply(p).iter().map(|v| v.abs()).sum()
    }

    /// `(I + Q / lambda) p`, entrywise nonnegative for `lambda >= max exit`.
    fn uniformized(&self, p: &[f64], lambda: f64) -> Vec<f64> {
        let mut out: Vec<f64> = p
            .iter()
            .zip(&self.exit)
            .map(|(v, e)| v * (1.0 - e / lambda))
            .collect();
        for &(from, to, rate) in &self.transitions {
            out[to] += rate / lambda * p[from];
        }
        out
    }

    /// `exp(Q dt) p` for `lambda * dt` of order [`CHUNK`].
    fn chunk(&self, p: &[f64], lambda: f64, dt: f64) -> Vec<f64> {
        let x = lambda * dt;
        let mut weight = (-x).exp();
        let mut term = p.to_vec();
        let mut acc: Vec<f64> = p.iter().map(|v| weight * v).collect();
        let mut k = 0.0;
        loop {
            k += 1.0;
            term = self.uniformized(&term, lambda);
            weight *= x / k;
            acc.iter_mut()
                .zip(&term)
                .for_each(|(a, t)| *a += weight * t);
            if k + 1.0 > x {
                let ratio = x / (k + 1.0);
                if weight * ratio / (1.0 - ratio) < TAIL_TOL {
                    break;
                }
            }
        }
        acc
    }

    fn check_distribution(&self, p: &[f64]) -> Result<()> {
        if p.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: p.len(),
            });
        }
        check_distribution(p)
    }
}

fn check_distribution(p: &[f64]) -> Result<()> {
    if let Some((index, &value)) = p
        .iter()
        .enumerate()
        .find(|(_, v)| !v.is_finite() || **v < 0.0)
    {
        return Err(Error::NegativeEntry { index, value });
    }
    let sum: f64 = p.iter().sum();
    if (sum - 1.0).abs() > NORMALIZATION_TOL {
        return Err(Error::NotNormalized {
            sum,
            tol: NORMALIZATION_TOL,
        });
    }
    Ok(())
}

/// Distribution at time `t` starting from `p0`.
pub fn evolve(model: &RateModel, p0: &[f64], t: f64) -> Result<Vec<f64>> {
    model.check_distribution(p0)?;
    if !t.is_finite() || t < 0.0 {
        return Err(Error::InvalidDuration(t));
    }
    let lambda = model.max_exit_rate();
    if lambda == 0.0 || t == 0.0 {
        return Ok(p0.to_vec());
    }
    let chunks = (lambda * t / CHUNK).ceil().max(1.0);
    let dt = t / chunks;
    let mut p = p0.to_vec();
    for _ in 0..chunks as u64 {
        p = model.chunk(&p, lambda, dt);
    }
    Ok(p)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StationaryOptions {
    /// Convergence threshold on `‖Q p‖₁`.
    pub tol: f64,
    /// Budget of uniformization chunks (each spans a Poisson mean of 20 jumps).
    pub max_steps: usize,
}

impl Default for StationaryOptions {
    fn default() -> Self {
        StationaryOptions {
            tol: STATIONARY_TOL,
            max_steps: 200_000,
        }
    }
}

/// Long-time limit reached from a given initial distribution.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Stationary {
    pub distribution: Vec<f64>,
    /// `‖Q p‖₁` at the returned state.
    pub residual: f64,
    /// Simulated time to reach it.
    pub time: f64,
    pub steps: usize,
}

/// Follows the trajectory from `p0` until `‖Q p‖₁ < opts.tol`.
///
/// The limit depends on `p0` whenever the generator has more than one
/// closed class.
pub fn stationary(model: &RateModel, p0: &[f64], opts: &StationaryOptions) -> Result<Stationary> {
    model.check_distribution(p0)?;
    let lambda = model.max_exit_rate();
    let mut p = p0.to_vec();
    let mut residual = model.residual(&p);
    if lambda == 0.0 {
        return Ok(Stationary {
            distribution: p,
            residual,
            time: 0.0,
            steps: 0,
        });
    }
    let dt = CHUNK / lambda;
    let mut steps = 0;
    while residual >= opts.tol {
        if steps == opts.max_steps {
            return Err(Error::NonConvergence {
                steps,
                time: steps as f64 * dt,
                residual,
            });
        }
        p = model.chunk(&p, lambda, dt);
        residual = model.residual(&p);
        steps += 1;
    }
    Ok(Stationary {
        distribution: p,
        residual,
        time: steps as f64 * dt,
        steps,
    })
}

/// Two-valued likelihood of mode `site` being occupied.
pub fn marginal(p: &[f64], site: usize) -> Result<Likelihood> {
    if !p.len().is_power_of_two() || p.len() < 2 {
        return Err(Error::DimensionMismatch {
            expected: p.len().next_power_of_two().max(2),
            found: p.len(),
        });
    }
    let modes = p.len().trailing_zeros() as usize;
    if site >= modes {
        return Err(Error::ModeOutOfRange { index: site, modes });
    }
    let bit = 1 << (modes - 1 - site);
    let occupied: f64 = p
        .iter()
        .enumerate()
        .filter(|(s, _)| s & bit != 0)
        .map(|(_, v)| v)
        .sum();
    let total: f64 = p.iter().sum();
    Likelihood::new(vec![occupied, total - occupied])
}

/// Product distribution with `P(N_m = 1) = occupation[m]`.
pub fn product_distribution(occupation: &[f64]) -> Result<Vec<f64>> {
    check_modes(occupation.len())?;
    let modes = occupation.len();
    if let Some(&v) = occupation.iter().find(|v| !(0.0..=1.0).contains(*v)) {
        return Err(Error::OutOfRange {
            name: "occupation",
            value: v,
        });
    }
    Ok((0..1usize << modes)
        .map(|s| {
            occupation
                .iter()
                .enumerate()
                .map(|(m, &o)| {
                    if s >> (modes - 1 - m) & 1 == 1 {
                        o
                    } else {
                        1.0 - o
                    }
                })
                .product()
        })
        .collect())
}

/// Re-indexes a tensor of two-valued likelihoods (class 0 = true first)
/// as an occupation distribution (all-empty first).
pub fn distribution_from_tensor(rho: &Likelihood) -> Result<Vec<f64>> {
    let dim = rho.dim();
    if !dim.is_power_of_two() {
        return Err(Error::DimensionMismatch {
            expected: dim.next_power_of_two(),
            found: dim,
        });
    }
    Ok((0..dim).map(|s| rho[dim - 1 - s]).collect())
}

/// Creation/annihilation rates of the two-mode preparation stage.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PreparationRates {
    /// `f†_0`
    pub a: f64,
    /// `f†_1`
    pub b: f64,
    /// `f_0`
    pub c: f64,
    /// `f_1`
    pub d: f64,
}

impl PreparationRates {
    /// `a = p, c = 1 - p, b = q, d = 1 - q`.
    pub fn from_probabilities(p: f64, q: f64) -> Result<Self> {
        check_unit("p", p)?;
        check_unit("q", q)?;
        Ok(PreparationRates {
            a: p,
            b: q,
            c: 1.0 - p,
            d: 1.0 - q,
        })
    }

    fn check(&self) -> Result<()> {
        for r in [self.a, self.b, self.c, self.d] {
            if !r.is_finite() || r < 0.0 {
                return Err(Error::InvalidRate(r));
            }
        }
        if self.a + self.c == 0.0 {
            return Err(Error::DegenerateRates("a + c = 0"));
        }
        if self.b + self.d == 0.0 {
            return Err(Error::DegenerateRates("b + d = 0"));
        }
        Ok(())
    }

    pub fn operators(&self) -> Vec<JumpOperator> {
        vec![
            JumpOperator::creation(0, self.a),
            JumpOperator::creation(1, self.b),
            JumpOperator::annihilation(0, self.c),
            JumpOperator::annihilation(1, self.d),
        ]
    }

    pub fn model(&self) -> Result<RateModel> {
        self.check()?;
        RateModel::new(2, &self.operators())
    }

    /// Closed-form stationary distribution over `00, 01, 10, 11`.
    pub fn closed_form(&self) -> Result<[f64; 4]> {
        self.check()?;
        let z = (self.a + self.c) * (self.b + self.d);
        Ok([
            self.c * self.d / z,
            self.b * self.c / z,
            self.a * self.d / z,
            self.a * self.b / z,
        ])
    }
}

fn check_unit(name: &'static str, v: f64) -> Result<()> {
    if (0.0..=1.0).contains(&v) {
        Ok(())
    } else {
        Err(Error::OutOfRange { name, value: v })
    }
}

/// Runs the preparation dynamics from the uniform state and checks the
/// result against the closed form.
pub fn prepare_product(rates: &PreparationRates, opts: &StationaryOptions) -> Result<Stationary> {
    let model = rates.model()?;
    let expected = rates.closed_form()?;
    let st = stationary(&model, &[0.25; 4], opts)?;
    let err = st
        .distribution
        .iter()
        .zip(&expected)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    if err > CROSS_CHECK_TOL {
        return Err(Error::CrossCheck(err));
    }
    Ok(st)
}

/// Single hop `f†_1 f_0` (or `f_1 f†_0` when `swapped`).
pub fn and_or_model(rate: f64, swapped: bool) -> Result<RateModel> {
    let op = if swapped {
        JumpOperator::hop(1, 0, rate)
    } else {
        JumpOperator::hop(0, 1, rate)
    };
    RateModel::new(2, &[op])
}

/// `f†_1 N_0` at rate `a` and `f†_0 N_1` at rate `b`.
pub fn copy_model(a: f64, b: f64) -> Result<RateModel> {
    RateModel::new(
        2,
        &[
            JumpOperator::controlled_creation(1, 0, a),
            JumpOperator::controlled_creation(0, 1, b),
        ],
    )
}

/// Result of running a two-mode gate on a prepared product state.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GateOutcome {
    pub input: Vec<f64>,
    pub stationary: Stationary,
    pub first: Likelihood,
    pub second: Likelihood,
}

impl GateOutcome {
    pub fn marginals(&self) -> (&Likelihood, &Likelihood) {
        (&self.first, &self.second)
    }
}

/// Prepares the product state for `(p, q)` and relaxes it under `model`.
pub fn run_gate(
    model: &RateModel,
    p: f64,
    q: f64,
    opts: &StationaryOptions,
) -> Result<GateOutcome> {
    if model.modes() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: model.modes(),
        });
    }
    let prepared = prepare_product(&PreparationRates::from_probabilities(p, q)?, opts)?;
    let st = stationary(model, &prepared.distribution, opts)?;
    Ok(GateOutcome {
        first: marginal(&st.distribution, 0)?,
        second: marginal(&st.distribution, 1)?,
        input: prepared.distribution,
        stationary: st,
    })
}

/// Marginals are `(A and B, A or B)`, or `(A or B, A and B)` when swapped.
pub fn gate_and_or(p: f64, q: f64, swapped: bool, opts: &StationaryOptions) -> Result<GateOutcome> {
    run_gate(&and_or_model(GATE_RATE, swapped)?, p, q, opts)
}

/// Both marginals become `A or B`.
pub fn gate_copy(p: f64, q: f64, opts: &StationaryOptions) -> Result<GateOutcome> {
    run_gate(&copy_model(GATE_RATE, GATE_RATE)?, p, q, opts)
}

#[cfg(test)]
mod tests {
    use super::*;

    // Index of (N1, N2) in the two-mode layout.
    fn ix(n1: usize, n2: usize) -> usize {
        n1 * 2 + n2
    }

    fn bar(n: usize) -> usize {
        1 - n
    }

    fn rhs_preparation(p: &[f64], a: f64, b: f64, c: f64, d: f64) -> Vec<f64> {
        let mut out = vec![0.0; 4];
        for n1 in 0..2 {
            for n2 in 0..2 {
                let (f1, f2) = (n1 as f64, n2 as f64);
                let (g1, g2) = (bar(n1) as f64, bar(n2) as f64);
                let here = p[ix(n1, n2)];
                let flip1 = p[ix(bar(n1), n2)];
                let flip2 = p[ix(n1, bar(n2))];
                out[ix(n1, n2)] = a * (f1 * flip1 - g1 * here)
                    + b * (f2 * flip2 - g2 * here)
                    + c * (g1 * flip1 - f1 * here)
                    + d * (g2 * flip2 - f2 * here);
            }
        }
        out
    }

    fn rhs_hop(p: &[f64], a: f64) -> Vec<f64> {
        let mut out = vec![0.0; 4];
        for n1 in 0..2 {
            for n2 in 0..2 {
                let gain = (n2 * bar(n1)) as f64 * p[ix(bar(n1), bar(n2))];
                let loss = (bar(n2) * n1) as f64 * p[ix(n1, n2)];
                out[ix(n1, n2)] = a * (gain - loss);
            }
        }
        out
    }

    fn rhs_copy(p: &[f64], a: f64, b: f64) -> Vec<f64> {
        let mut out = vec![0.0; 4];
        for n1 in 0..2 {
            for n2 in 0..2 {
                let here = p[ix(n1, n2)];
                out[ix(n1, n2)] = a
                    * ((n2 * n1) as f64 * p[ix(n1, bar(n2))] - (n1 * bar(n2)) as f64 * here)
                    + b * ((n1 * n2) as f64 * p[ix(bar(n1), n2)] - (bar(n1) * n2) as f64 * here);
            }
        }
        out
    }

    fn assert_vec_close(a: &[f64], b: &[f64], tol: f64) {
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(b) {
            assert!((x - y).abs() <= tol, "{a:?} vs {b:?}");
        }
    }

    const P: [f64; 4] = [0.1, 0.2, 0.3, 0.4];

    #[test]
    fn preparation_generator_matches_rate_equation() {
        let (a, b, c, d) = (0.7, 1.3, 0.4, 2.1);
        let rates = PreparationRates { a, b, c, d };
        let model = rates.model().unwrap();
        assert_vec_close(&model.apply(&P), &rhs_preparation(&P, a, b, c, d), 1e-15);
        assert_eq!(model.rate(ix(1, 0), ix(0, 0)), a);
        assert_eq!(model.rate(ix(0, 1), ix(0, 0)), b);
        assert_eq!(model.rate(ix(0, 0), ix(1, 0)), c);
        assert_eq!(model.rate(ix(0, 0), ix(0, 1)), d);
        assert_eq!(model.rate(ix(1, 1), ix(0, 0)), 0.0);
    }

    #[test]
    fn single_hop_generator() {
        let model = and_or_model(0.8, false).unwrap();
        assert_eq!(model.transitions(), &[(ix(1, 0), ix(0, 1), 0.8)]);
        assert_vec_close(&model.apply(&P), &rhs_hop(&P, 0.8), 1e-15);
        let swapped = and_or_model(0.8, true).unwrap();
        assert_eq!(swapped.transitions(), &[(ix(0, 1), ix(1, 0), 0.8)]);
    }

    #[test]
    fn copy_generator() {
        let model = copy_model(0.6, 1.7).unwrap();
        assert_vec_close(&model.apply(&P), &rhs_copy(&P, 0.6, 1.7), 1e-15);
    }

    #[test]
    fn generator_columns_sum_to_zero() {
        let ops = vec![
            JumpOperator::new(0.3, vec![0, 2], vec![1], vec![]).unwrap(),
            JumpOperator::new(1.1, vec![], vec![0], vec![2]).unwrap(),
            JumpOperator::hop(2, 1, 0.5),
        ];
        let model = RateModel::new(3, &ops).unwrap();
        for from in 0..model.dim() {
            let sum: f64 = (0..model.dim()).map(|to| model.entry(to, from)).sum();
            assert!(sum.abs() < 1e-15);
        }
        // f†_0 f†_2 f_1 acts on 010 only
        assert_eq!(model.rate(0b101, 0b010), 0.3);
    }

    #[test]
    fn empty_operator_list_is_zero_generator() {
        let model = RateModel::zero(2).unwrap();
        assert!(model.is_zero());
        assert!(model.generator().iter().flatten().all(|&v| v == 0.0));
        assert_eq!(evolve(&model, &P, 3.0).unwrap(), P.to_vec());
        let st = stationary(&model, &P, &StationaryOptions::default()).unwrap();
        assert_eq!(st.distribution, P.to_vec());
    }

    #[test]
    fn operator_validation() {
        assert_eq!(
            RateModel::new(2, &[JumpOperator::creation(2, 1.0)]),
            Err(Error::ModeOutOfRange { index: 2, modes: 2 })
        );
        assert_eq!(
            JumpOperator::new(1.0, vec![0], vec![0], vec![]),
            Err(Error::OverlappingSites(0))
        );
        assert_eq!(
            RateModel::new(2, &[JumpOperator::creation(0, f64::INFINITY)]),
            Err(Error::InvalidRate(f64::INFINITY))
        );
        assert!(RateModel::new(13, &[]).is_err());
        assert!(RateModel::new(0, &[]).is_err());
    }

    #[test]
    fn evolve_input_validation() {
        let model = copy_model(1.0, 1.0).unwrap();
        assert!(evolve(&model, &[0.5, 0.5], 1.0).is_err());
        assert!(evolve(&model, &[0.5, 0.5, 0.5, -0.5], 1.0).is_err());
        assert_eq!(evolve(&model, &P, -1.0), Err(Error::InvalidDuration(-1.0)));
    }

    #[test]
    fn copy_decay_is_exponential() {
        let a = 2.5;
        let model = copy_model(a, 0.9).unwrap();
        let p0 = product_distribution(&[0.4, 0.7]).unwrap();
        for t in [0.1 / a, 1.0 / a, 5.0 / a, 12.0 / a] {
            let p = evolve(&model, &p0, t).unwrap();
            let expected = p0[ix(1, 0)] * (-a * t).exp();
            assert!(((p[ix(1, 0)] - expected) / expected).abs() < 1e-12);
        }
    }

    #[test]
    fn marginal_examples() {
        let m = marginal(&[0.25; 4], 0).unwrap();
        assert_eq!(m.probs(), &[0.5, 0.5]);
        assert_eq!(marginal(&[0.25; 4], 1).unwrap().probs(), &[0.5, 0.5]);
        assert_eq!(
            marginal(&[0.25; 4], 2),
            Err(Error::ModeOutOfRange { index: 2, modes: 2 })
        );
        assert!(marginal(&[0.5, 0.25, 0.25], 0).is_err());
    }

    #[test]
    fn prepare_examples() {
        let opts = StationaryOptions::default();
        let sym = PreparationRates {
            a: 1.0,
            b: 1.0,
            c: 1.0,
            d: 1.0,
        };
        let st = prepare_product(&sym, &opts).unwrap();
        assert_vec_close(&st.distribution, &[0.25; 4], 1e-10);

        let st = prepare_product(
            &PreparationRates::from_probabilities(0.3, 0.6).unwrap(),
            &opts,
        )
        .unwrap();
        // (00, 01, 10, 11)
        assert_vec_close(&st.distribution, &[0.28, 0.42, 0.12, 0.18], 1e-9);

        let st = prepare_product(
            &PreparationRates::from_probabilities(1.0, 0.0).unwrap(),
            &opts,
        )
        .unwrap();
        assert_vec_close(&st.distribution, &[0.0, 0.0, 1.0, 0.0], 1e-9);

        let bad = PreparationRates {
            a: 0.0,
            b: 1.0,
            c: 0.0,
            d: 1.0,
        };
        assert_eq!(
            prepare_product(&bad, &opts),
            Err(Error::DegenerateRates("a + c = 0"))
        );
        assert!(PreparationRates::from_probabilities(1.5, 0.0).is_err());
    }

    #[test]
    fn gate_examples() {
        let opts = StationaryOptions::default();
        let g = gate_and_or(0.5, 0.5, false, &opts).unwrap();
        assert_vec_close(g.first.probs(), &[0.25, 0.75], 1e-9);
        assert_vec_close(g.second.probs(), &[0.75, 0.25], 1e-9);

        let g = gate_and_or(1.0, 1.0, false, &opts).unwrap();
        assert_vec_close(g.first.probs(), &[1.0, 0.0], 1e-9);
        assert_vec_close(g.second.probs(), &[1.0, 0.0], 1e-9);

        let g = gate_and_or(0.2, 0.3, true, &opts).unwrap();
        assert_vec_close(g.first.probs(), &[0.44, 0.56], 1e-9);
        assert_vec_close(g.second.probs(), &[0.06, 0.94], 1e-9);

        for (p, q, expected) in [(0.5, 0.5, 0.75), (0.0, 0.0, 0.0), (1.0, 0.3, 1.0)] {
            let g = gate_copy(p, q, &opts).unwrap();
            assert_vec_close(g.first.probs(), &[expected, 1.0 - expected], 1e-9);
            assert_eq!(g.first, g.second);
        }
    }

    #[test]
    fn hop_gate_stationary_state() {
        let (p, q) = (0.3, 0.6);
        let g = gate_and_or(p, q, false, &StationaryOptions::default()).unwrap();
        let expected = [(1.0 - p) * (1.0 - q), p + q - 2.0 * p * q, 0.0, p * q];
        assert_vec_close(&g.stationary.distribution, &expected, 1e-9);
    }

    #[test]
    fn non_convergence_is_reported() {
        let model = RateModel::new(
            2,
            &[
                JumpOperator::creation(0, 1.0),
                JumpOperator::creation(1, 1e-9),
            ],
        )
        .unwrap();
        let opts = StationaryOptions {
            max_steps: 50,
            ..Default::default()
        };
        assert!(matches!(
            stationary(&model, &[1.0, 0.0, 0.0, 0.0], &opts),
            Err(Error::NonConvergence { steps: 50, .. })
        ));
    }

    #[test]
    fn tensor_reindexing() {
        let a = Likelihood::boolean(0.3).unwrap();
        let b = Likelihood::boolean(0.6).unwrap();
        let d = distribution_from_tensor(&a.tensor(&b)).unwrap();
        assert_vec_close(&d, &product_distribution(&[0.3, 0.6]).unwrap(), 1e-15);
    }

    #[test]
    fn occupation_states() {
        let s = OccupationState::from_bits(&[true, false, true]).unwrap();
        assert_eq!(s.index(), 0b101);
        assert!(s.occupied(0) && !s.occupied(1) && s.occupied(2));
        assert_eq!(s.to_string(), "101");
        assert!(OccupationState::new(2, 4).is_err());
    }

    #[test]
    fn gate_spec_json() {
        let spec: GateSpec = serde_json::from_str(
            r#"{"n": 2, "ops": [{"rate": 1.0, "create": [1], "annihilate": [0], "control": []}]}"#,
        )
        .unwrap();
        assert_eq!(spec.ops[0], JumpOperator::hop(0, 1, 1.0));
        assert_eq!(spec.build().unwrap(), and_or_model(1.0, false).unwrap());
        let spec: GateSpec = serde_json::from_str(
            r#"{"n": 2, "ops": [{"rate": 1.0, "create": [1], "control": [0]}]}"#,
        )
        .unwrap();
        assert_eq!(spec.ops[0], JumpOperator::controlled_creation(1, 0, 1.0));
    }
}

use serde_json::{Map, Value};

use super::{binary_entropy, Coupling, SlidingBlockCode};
use crate::enumerate::EnumerationCap;
use crate::error::{Error, Result};
use crate::numfmt::num;
use crate::process::{rate_at_most, ProcessModel};

/// Slack for comparisons of exactly computed probabilities.
const EXACT_TOL: f64 = 1e-12;

/// Exact check of `Pr((1/n) log2 P_theta/P <= -gamma) <= 2^(-n gamma)` under
/// the component law.
#[derive(Debug, Clone, PartialEq)]
pub struct ChangeOfMeasureReport {
    pub component: usize,
    pub n: usize,
    pub gamma: f64,
    pub lhs: f64,
    pub bound: f64,
    pub pass: bool,
}

impl ChangeOfMeasureReport {
    pub fn to_json(&self) -> Value {
        let mut obj = Map::new();
        obj.insert("component".into(), Value::from(self.component));
        obj.insert("n".into(), Value::from(self.n));
        obj.insert("gamma".into(), num(self.gamma));
        obj.insert("lhs".into(), num(self.lhs));
        obj.insert("rhs_terms".into(), serde_json::json!({ "change_of_measure": num(self.bound) }));
        obj.insert("pass".into(), Value::from(self.pass));
        Value::Object(obj)
    }
}

pub fn verify_change_of_measure(
    mixture: &ProcessModel,
    component: usize,
    n: usize,
    gamma: f64,
    cap: EnumerationCap,
) -> Result<ChangeOfMeasureReport> {
    let ProcessModel::Mixture(mix) = mixture else {
        return Err(Error::InvalidModel("change of measure needs a mixture model".into()));
    };
    let theta = mix
        .components()
        .get(component)
        .ok_or_else(|| Error::OutOfRange(format!("mixture has no component {component}")))?;
    if !(gamma > 0.0) {
        return Err(Error::OutOfRange("gamma must be positive".into()));
    }
    if n == 0 {
        return Err(Error::OutOfRange("n must be at least 1".into()));
    }
    let p_theta = theta.block_distribution(n, cap)?;
    let p_mix = mixture.block_distribution(n, cap)?;
    let lhs: f64 = p_theta
        .iter()
        .zip(&p_mix)
        .filter(|(&pt, _)| pt > 0.0)
        .filter(|(&pt, &pm)| (pm.log2() - pt.log2()) / n as f64 >= gamma - EXACT_TOL)
        .map(|(&pt, _)| pt)
        .sum();
    let bound = (-(n as f64) * gamma).exp2();
    Ok(ChangeOfMeasureReport {
        component,
        n,
        gamma,
        lhs,
        bound,
        pass: lhs <= bound + EXACT_TOL,
    })
}

/// Exact evaluation of the finite-length homomorphism bound
///
/// `Pr((1/N) log2 1/P_X(X_{-m}^m) <= tau + gamma)
///   <= Pr((1/N) log2 1/P_Y(Y_{-n}^n) <= tau + 2 gamma) + eps/beta
///      + 2^(-N (gamma - h(beta) - beta log2|Y|))`
///
/// together with the three intermediate inequalities of its proof, evaluated
/// on the sets `S = {(x, y) : r_X(x) <= r_Y(y) - gamma}` and
/// `C = {(x, y) : d_H(y, f(x)) <= N beta}`.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteBoundReport {
    pub tau: f64,
    pub gamma: f64,
    pub beta: f64,
    pub lhs: f64,
    pub y_term: f64,
    pub mismatch_term: f64,
    pub exponent: f64,
    pub exponent_term: f64,
    pub rhs: f64,
    pub epsilon: f64,
    pub pass: bool,
    /// The exponent is nonpositive, so the last term alone is at least 1.
    pub trivially_pass: bool,
    pub p_s: f64,
    pub p_not_c: f64,
    pub p_s_and_c: f64,
    /// `P(C^c) <= eps/beta`, `P(S and C) <= 2^(-N e)` and
    /// `P(S) >= lhs - y_term` all hold.
    pub chain_pass: bool,
}

impl FiniteBoundReport {
    pub fn to_json(&self) -> Value {
        serde_json::json!({
            "tau": num(self.tau),
            "gamma": num(self.gamma),
            "beta": num(self.beta),
            "lhs": num(self.lhs),
            "rhs": num(self.rhs),
            "rhs_terms": {
                "y_spectrum": num(self.y_term),
                "mismatch": num(self.mismatch_term),
                "exponential": num(self.exponent_term),
            },
            "exponent": num(self.exponent),
            "epsilon": num(self.epsilon),
            "pass": self.pass,
            "trivially_pass": self.trivially_pass,
            "proof_chain": {
                "p_s": num(self.p_s),
                "p_not_c": num(self.p_not_c),
                "p_s_and_c": num(self.p_s_and_c),
                "pass": self.chain_pass,
            },
        })
    }
}

impl Coupling {
    /// Evaluates the finite-length bound at one `(tau, gamma, beta)`.
    pub fn finite_bound(&self, tau: f64, gamma: f64, beta: f64) -> Result<FiniteBoundReport> {
        if !(beta > 0.0 && beta < 0.5) {
            return Err(Error::OutOfRange(format!("beta = {beta} must lie in (0, 1/2)")));
        }
        if !(gamma > 0.0) {
            return Err(Error::OutOfRange("gamma must be positive".into()));
        }
        let big_n = self.y_block_len() as f64;
        let x_rate = |x: usize| -self.x_law()[x].log2() / big_n;
        let y_rate = |y: usize| -self.y_law()[y].log2() / big_n;

        let lhs: f64 = self
            .x_law()
            .iter()
            .enumerate()
            .filter(|(x, &p)| p > 0.0 && rate_at_most(x_rate(*x), tau + gamma))
            .map(|(_, &p)| p)
            .sum();
        let y_term: f64 = self
            .y_law()
            .iter()
            .enumerate()
            .filter(|(y, &p)| p > 0.0 && rate_at_most(y_rate(*y), tau + 2.0 * gamma))
            .map(|(_, &p)| p)
            .sum();
        let epsilon = self.epsilon();
        let mismatch_term = epsilon / beta;
        let exponent = gamma - binary_entropy(beta)? - beta * (self.y_alphabet_size() as f64).log2();
        let exponent_term = (-big_n * exponent).exp2();
        let rhs = y_term + mismatch_term + exponent_term;

        let radius = (big_n * beta + 1e-9).floor() as usize;
        let (mut p_s, mut p_not_c, mut p_s_and_c) = (0.0, 0.0, 0.0);
        for &(x, y, p) in self.joint() {
            let in_s = x_rate(x) <= y_rate(y) - gamma;
            let in_c = self.y_distance(y, self.approx_image(x)) <= radius;
            if in_s {
                p_s += p;
                if in_c {
                    p_s_and_c += p;
                }
            }
            if !in_c {
                p_not_c += p;
            }
        }
        let chain_pass = p_not_c <= mismatch_term + EXACT_TOL
            && p_s_and_c <= exponent_term + EXACT_TOL
            && p_s >= lhs - y_term - EXACT_TOL;
        Ok(FiniteBoundReport {
            tau,
            gamma,
            beta,
            lhs,
            y_term,
            mismatch_term,
            exponent,
            exponent_term,
            rhs,
            epsilon,
            pass: lhs <= rhs + EXACT_TOL,
            trivially_pass: exponent <= 0.0,
            p_s,
            p_not_c,
            p_s_and_c,
            chain_pass,
        })
    }
}

/// Cartesian grid of `(tau, gamma, beta)` points.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundGrid {
    pub taus: Vec<f64>,
    pub gammas: Vec<f64>,
    pub betas: Vec<f64>,
}

impl Default for BoundGrid {
    /// `tau in {0.2, 0.4, ..., 1.2}`, `gamma in {0.05, 0.2, 0.5}`,
    /// `beta in {0.01, 0.05, 0.25}`: 54 points, 18 with a positive exponent
    /// for binary outputs.
    fn default() -> Self {
        BoundGrid {
            taus: (1..=6).map(|i| 0.2 * i as f64).collect(),
            gammas: vec![0.05, 0.2, 0.5],
            betas: vec![0.01, 0.05, 0.25],
        }
    }
}

impl BoundGrid {
    pub fn points(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        self.taus.iter().flat_map(move |&t| {
            self.gammas
                .iter()
                .flat_map(move |&g| self.betas.iter().map(move |&b| (t, g, b)))
        })
    }

    pub fn len(&self) -> usize {
        self.taus.len() * self.gammas.len() * self.betas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// One-point convenience wrapper: builds the exact-image coupling (or the
/// reference coupling when `reference` is given) and evaluates the bound.
#[allow(clippy::too_many_arguments)]
pub fn verify_finite_bound(
    x_model: &ProcessModel,
    code: &SlidingBlockCode,
    reference: Option<&SlidingBlockCode>,
    n: usize,
    tau: f64,
    gamma: f64,
    beta: f64,
    cap: EnumerationCap,
) -> Result<FiniteBoundReport> {
    if !(beta > 0.0 && beta < 0.5) {
        return Err(Error::OutOfRange(format!("beta = {beta} must lie in (0, 1/2)")));
    }
    coupling_for(x_model, code, reference, n, cap)?.finite_bound(tau, gamma, beta)
}

/// Evaluates the bound over every grid point with one coupling.
pub fn verify_finite_bound_grid(
    x_model: &ProcessModel,
    code: &SlidingBlockCode,
    reference: Option<&SlidingBlockCode>,
    n: usize,
    grid: &BoundGrid,
    cap: EnumerationCap,
) -> Result<Vec<FiniteBoundReport>> {
    let coupling = coupling_for(x_model, code, reference, n, cap)?;
    grid.points()
        .map(|(t, g, b)| coupling.finite_bound(t, g, b))
        .collect()
}

fn coupling_for(
    x_model: &ProcessModel,
    code: &SlidingBlockCode,
    reference: Option<&SlidingBlockCode>,
    n: usize,
    cap: EnumerationCap,
) -> Result<Coupling> {
    match reference {
        None => Coupling::exact_image(x_model, code, n, cap),
        Some(g) => Coupling::with_reference(x_model, code, g, n, cap),
    }
}

/// Hamming-ball size versus `|Y|^(N beta) 2^(N h(beta))`.
#[derive(Debug, Clone, PartialEq)]
pub struct HammingBallReport {
    pub block_len: usize,
    pub beta: f64,
    pub alphabet_size: usize,
    pub radius: usize,
    pub count: u128,
    pub bound: f64,
    pub pass: bool,
}

impl HammingBallReport {
    pub fn to_json(&self) -> Value {
        serde_json::json!({
            "N": self.block_len,
            "beta": num(self.beta),
            "alphabet_size": self.alphabet_size,
            "radius": self.radius,
            "lhs": self.count.to_string(),
            "rhs_terms": { "ball_bound": num(self.bound) },
            "pass": self.pass,
        })
    }
}

/// Counts `#{y' : d_H(y, y') <= N beta}` combinatorially,
/// `sum_{i <= N beta} C(N, i) (|Y| - 1)^i`.
pub fn hamming_ball_bound_check(block_len: usize, beta: f64, alphabet_size: usize) -> Result<HammingBallReport> {
    if !(0.0..0.5).contains(&beta) {
        return Err(Error::OutOfRange(format!("beta = {beta} must lie in [0, 1/2)")));
    }
    if alphabet_size == 0 || block_len == 0 {
        return Err(Error::OutOfRange("block length and alphabet size must be positive".into()));
    }
    let radius = (block_len as f64 * beta + 1e-9).floor() as usize;
    let mut count: u128 = 0;
    let mut binom: u128 = 1;
    let mut power: u128 = 1;
    for i in 0..=radius {
        let term = binom
            .checked_mul(power)
            .ok_or_else(|| Error::OutOfRange("ball size overflows u128".into()))?;
        count = count
            .checked_add(term)
            .ok_or_else(|| Error::OutOfRange("ball size overflows u128".into()))?;
        binom = binom * (block_len - i) as u128 / (i + 1) as u128;
        power = power.saturating_mul(alphabet_size as u128 - 1);
    }
    let n = block_len as f64;
    let bound = (alphabet_size as f64).powf(n * beta) * (n * binary_entropy(beta)?).exp2();
    Ok(HammingBallReport {
        block_len,
        beta,
        alphabet_size,
        radius,
        count,
        bound,
        pass: count as f64 <= bound * (1.0 + EXACT_TOL),
    })
}

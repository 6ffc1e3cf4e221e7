//! Finite-alphabet stationary process models.
//!
//! [`ProcessModel`] evaluates exact log2-probabilities of finite paths,
//! samples reproducible paths, and computes conditional entropies and entropy
//! rates. Zero-probability paths have log-probability `-inf` and
//! self-information rate `+inf`.
//!
//! Conditional entropies `H(X_{k+1} | X^k)` of a stationary process are
//! nonincreasing in `k` and converge to the entropy rate from above; the tests
//! assert the nonincreasing direction.
//!
//! # Random streams
//!
//! Path `i` of a batch seeded with `seed` is drawn from
//! `ChaCha8Rng::seed_from_u64(seed)` switched to stream `i`
//! (`set_stream(i)`). Each path therefore depends only on `(seed, i)`, never
//! on which worker produced it.

mod alphabet;
mod cursor;
mod factor;
mod iid;
mod markov;
mod mixture;
mod path;

use std::hash::{Hash, Hasher};
use std::sync::Arc;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

pub use alphabet::Alphabet;
pub use factor::FactorModel;
pub use iid::IidModel;
pub use markov::MarkovModel;
pub use mixture::{log_sum_exp2, MixtureModel};
pub use path::{Provenance, SamplePath};

pub(crate) use factor::conditional_from_blocks;

use crate::coding::{same_alphabet, SlidingBlockCode};
use crate::enumerate::{with_workers, EnumerationCap};
use crate::error::{Error, Result};

const SUM_TOL: f64 = 1e-12;

/// A stationary process over a finite alphabet.
#[derive(Debug, Clone)]
pub enum ProcessModel {
    Iid(IidModel),
    Markov(MarkovModel),
    Factor(FactorModel),
    Mixture(MixtureModel),
}

/// Entropy rate: exact, or a certified bracket for factor models.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EntropyRate {
    Exact(f64),
    Bracket { lower: f64, upper: f64, order: usize },
}

impl EntropyRate {
    pub fn lower(&self) -> f64 {
        match *self {
            EntropyRate::Exact(h) => h,
            EntropyRate::Bracket { lower, .. } => lower,
        }
    }

    pub fn upper(&self) -> f64 {
        match *self {
            EntropyRate::Exact(h) => h,
            EntropyRate::Bracket { upper, .. } => upper,
        }
    }

    /// Width of the bracket, `upper - lower`.
    pub fn gap(&self) -> f64 {
        self.upper() - self.lower()
    }

    pub fn contains(&self, value: f64, tol: f64) -> bool {
        value >= self.lower() - tol && value <= self.upper() + tol
    }

    /// A single value when the rate is exact or the bracket is narrower than
    /// `tol`.
    pub fn value_within(&self, tol: f64) -> Option<f64> {
        match *self {
            EntropyRate::Exact(h) => Some(h),
            EntropyRate::Bracket { lower, upper, .. } if upper - lower <= tol => {
                Some(0.5 * (lower + upper))
            }
            EntropyRate::Bracket { .. } => None,
        }
    }
}

/// Options for [`ProcessModel::entropy_rate`].
#[derive(Debug, Clone, Copy)]
pub struct EntropyRateOptions {
    /// Conditioning depth `k` of the factor-model bracket.
    pub bracket_order: usize,
    pub cap: EnumerationCap,
}

impl Default for EntropyRateOptions {
    fn default() -> Self {
        EntropyRateOptions {
            bracket_order: 8,
            cap: EnumerationCap::default(),
        }
    }
}

/// Per-path random stream as documented at module level.
pub fn substream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

impl ProcessModel {
    pub fn iid(alphabet: Arc<Alphabet>, probs: Vec<f64>) -> Result<Self> {
        IidModel::new(alphabet, probs).map(ProcessModel::Iid)
    }

    pub fn markov(alphabet: Arc<Alphabet>, order: usize, rows: Vec<Vec<f64>>) -> Result<Self> {
        MarkovModel::new(alphabet, order, rows).map(ProcessModel::Markov)
    }

    pub fn factor(base: ProcessModel, code: SlidingBlockCode) -> Result<Self> {
        FactorModel::new(base, code, EnumerationCap::default()).map(ProcessModel::Factor)
    }

    pub fn mixture(components: Vec<ProcessModel>, weights: Vec<f64>) -> Result<Self> {
        MixtureModel::new(components, weights).map(ProcessModel::Mixture)
    }

    pub fn alphabet(&self) -> &Arc<Alphabet> {
        match self {
            ProcessModel::Iid(m) => m.alphabet(),
            ProcessModel::Markov(m) => m.alphabet(),
            ProcessModel::Factor(m) => m.code().output(),
            ProcessModel::Mixture(m) => m.components()[0].alphabet(),
        }
    }

    pub fn is_mixture(&self) -> bool {
        matches!(self, ProcessModel::Mixture(_))
    }

    pub fn kind(&self) -> &'static str {
        match self {
            ProcessModel::Iid(_) => "iid",
            ProcessModel::Markov(_) => "markov",
            ProcessModel::Factor(_) => "factor",
            ProcessModel::Mixture(_) => "mixture",
        }
    }

    /// Stable 64-bit identifier derived from the canonical JSON form.
    pub fn model_id(&self) -> u64 {
        let mut hasher = std::collections::hash_map::DefaultHasher::new();
        crate::json::model_to_value(self).to_string().hash(&mut hasher);
        hasher.finish()
    }

    /// `(weight, component)` pairs; an ergodic model is its own single
    /// component with weight 1.
    pub fn components(&self) -> Vec<(f64, &ProcessModel)> {
        match self {
            ProcessModel::Mixture(m) => m.weights().iter().copied().zip(m.components()).collect(),
            other => vec![(1.0, other)],
        }
    }

    /// Log2-probability of raw symbol indices (assumed in range).
    pub fn log_prob_symbols(&self, symbols: &[usize]) -> f64 {
        match self {
            ProcessModel::Iid(m) => m.log_prob(symbols),
            ProcessModel::Markov(m) => m.log_prob(symbols),
            ProcessModel::Factor(m) => m.log_prob(symbols),
            ProcessModel::Mixture(m) => m.log_prob(symbols),
        }
    }

    fn check_path(&self, path: &SamplePath) -> Result<()> {
        if path.is_empty() {
            return Err(Error::EmptyPath);
        }
        if !same_alphabet(path.alphabet(), self.alphabet()) {
            return Err(Error::AlphabetMismatch(
                "path alphabet differs from the model alphabet".into(),
            ));
        }
        Ok(())
    }

    /// Exact `log2 P(x_1 .. x_n)`; `-inf` when the probability is zero.
    pub fn log_probability(&self, path: &SamplePath) -> Result<f64> {
        self.check_path(path)?;
        Ok(self.log_prob_symbols(path.symbols()))
    }

    /// `(1/n) log2 1/P(x_1 .. x_n)` in bits per symbol; `+inf` iff `P = 0`.
    pub fn self_information_rate(&self, path: &SamplePath) -> Result<f64> {
        let lp = self.log_probability(path)?;
        Ok(rate_from_log_prob(lp, path.len()))
    }

    /// Draws `n` symbols, returning them with the mixture component used.
    pub fn sample_symbols<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> (Vec<usize>, Option<usize>) {
        let mut out = Vec::with_capacity(n);
        let component = self.sample_into(n, rng, &mut out);
        (out, component)
    }

    fn sample_into<R: Rng + ?Sized>(&self, n: usize, rng: &mut R, out: &mut Vec<usize>) -> Option<usize> {
        match self {
            ProcessModel::Iid(m) => {
                m.sample_into(rng, n, out);
                None
            }
            ProcessModel::Markov(m) => {
                m.sample_into(rng, n, out);
                None
            }
            ProcessModel::Factor(f) => {
                let mut base = Vec::with_capacity(n + 2 * f.code().radius());
                f.base().sample_into(n + 2 * f.code().radius(), rng, &mut base);
                out.extend(f.code().apply_symbols(&base));
                None
            }
            ProcessModel::Mixture(m) => {
                let pick = WeightedIndex::new(m.weights())
                    .expect("validated weights")
                    .sample(rng);
                m.components()[pick].sample_into(n, rng, out);
                Some(pick)
            }
        }
    }

    /// Reproducible path of length `n` (stream 0 of `seed`).
    pub fn sample(&self, n: usize, seed: u64) -> Result<SamplePath> {
        self.sample_stream(n, seed, 0)
    }

    pub fn sample_stream(&self, n: usize, seed: u64, stream: u64) -> Result<SamplePath> {
        if n == 0 {
            return Err(Error::OutOfRange("sample length must be at least 1".into()));
        }
        let mut rng = substream(seed, stream);
        let (symbols, _) = self.sample_symbols(n, &mut rng);
        Ok(SamplePath::new(self.alphabet().clone(), symbols)?.with_provenance(Provenance {
            seed,
            stream,
            model_id: self.model_id(),
        }))
    }

    /// Maps `f` over paths `0 .. count` of `seed` on `workers` threads,
    /// returning results in stream order.
    pub fn map_samples<T, F>(&self, n: usize, count: usize, seed: u64, workers: usize, f: F) -> Result<Vec<T>>
    where
        T: Send,
        F: Fn(&[usize], Option<usize>) -> T + Sync + Send,
    {
        if n == 0 {
            return Err(Error::OutOfRange("sample length must be at least 1".into()));
        }
        Ok(with_workers(workers, || {
            (0..count as u64)
                .into_par_iter()
                .map(|i| {
                    let mut rng = substream(seed, i);
                    let (symbols, component) = self.sample_symbols(n, &mut rng);
                    f(&symbols, component)
                })
                .collect()
        }))
    }

    /// Exact `H(X_{k+1} | X_1^k)` by enumerating `X^(k+1)`; `H(X_1)` for `k = 0`.
    pub fn conditional_entropy(&self, k: usize, cap: EnumerationCap) -> Result<f64> {
        if self.is_mixture() {
            return Err(Error::MixtureNotAllowed);
        }
        let probs = self.block_distribution(k + 1, cap)?;
        Ok(conditional_from_blocks(&probs, self.alphabet().size()))
    }

    /// Entropy rate: closed form for i.i.d. and Markov models, a certified
    /// bracket for factors.
    pub fn entropy_rate(&self, options: EntropyRateOptions) -> Result<EntropyRate> {
        match self {
            ProcessModel::Iid(m) => Ok(EntropyRate::Exact(m.entropy())),
            ProcessModel::Markov(m) => Ok(EntropyRate::Exact(m.entropy_rate())),
            ProcessModel::Factor(f) => {
                let (lower, upper) = f.entropy_bracket(options.bracket_order, options.cap)?;
                Ok(EntropyRate::Bracket {
                    lower,
                    upper,
                    order: options.bracket_order,
                })
            }
            ProcessModel::Mixture(_) => Err(Error::MixtureNotAllowed),
        }
    }
}

pub(crate) fn rate_from_log_prob(log_prob: f64, n: usize) -> f64 {
    if log_prob == f64::NEG_INFINITY {
        f64::INFINITY
    } else {
        (-log_prob / n as f64).max(0.0)
    }
}

/// `rate <= threshold` with a relative guard against rounding in `log2`.
pub(crate) fn rate_at_most(rate: f64, threshold: f64) -> bool {
    rate <= threshold + 1e-12 * threshold.abs().max(1.0)
}

pub(crate) fn validate_distribution(probs: &[f64], what: &str) -> Result<()> {
    if probs.iter().any(|p| !p.is_finite() || *p < 0.0) {
        return Err(Error::InvalidModel(format!("{what}: entries must be finite and nonnegative")));
    }
    let total: f64 = probs.iter().sum();
    if (total - 1.0).abs() > SUM_TOL {
        return Err(Error::InvalidModel(format!("{what}: sums to {total}, not 1")));
    }
    Ok(())
}

/// Shannon entropy in bits; terms are summed in sorted order so the result
/// does not depend on the order of `probs`.
pub fn entropy_of(probs: &[f64]) -> f64 {
    let mut terms: Vec<f64> = probs
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| -p * p.log2())
        .collect();
    terms.sort_by(|a, b| a.total_cmp(b));
    terms.iter().sum()
}

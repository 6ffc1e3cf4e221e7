use crate::enumerate::EnumerationCap;
use crate::error::{Error, Result};
use crate::process::{rate_at_most, rate_from_log_prob, ProcessModel};

use super::SpectralBounds;

/// Points of the default tau grid.
pub const DEFAULT_GRID_POINTS: usize = 512;

/// `points` evenly spaced values on `[min, max]`.
pub fn linear_grid(min: f64, max: f64, points: usize) -> Result<Vec<f64>> {
    if points == 0 || !(min.is_finite() && max.is_finite()) || max < min {
        return Err(Error::OutOfRange(format!("bad grid [{min}, {max}] with {points} points")));
    }
    if points == 1 {
        return Ok(vec![min]);
    }
    let step = (max - min) / (points - 1) as f64;
    Ok((0..points)
        .map(|i| if i + 1 == points { max } else { min + step * i as f64 })
        .collect())
}

/// 512 points on `[0, log2|X| + 2 gamma]`.
pub fn default_grid(alphabet_size: usize, gamma: f64) -> Vec<f64> {
    linear_grid(0.0, (alphabet_size as f64).log2() + 2.0 * gamma, DEFAULT_GRID_POINTS).expect("valid default grid")
}

/// Parameters of [`empirical_spectrum`].
#[derive(Debug, Clone)]
pub struct EstimateConfig {
    pub n: usize,
    pub gamma: f64,
    pub num_samples: usize,
    pub seed: u64,
    /// `None` selects [`default_grid`].
    pub tau_grid: Option<Vec<f64>>,
    /// 0 uses the global thread pool.
    pub workers: usize,
}

impl EstimateConfig {
    pub fn new(n: usize, gamma: f64, num_samples: usize, seed: u64) -> Self {
        EstimateConfig {
            n,
            gamma,
            num_samples,
            seed,
            tau_grid: None,
            workers: 0,
        }
    }

    pub fn with_grid(mut self, grid: Vec<f64>) -> Self {
        self.tau_grid = Some(grid);
        self
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = workers;
        self
    }
}

/// Empirical `Pr((1/n) log2 1/P(X^n) <= tau + gamma)` on a tau grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumEstimate {
    pub n: usize,
    pub gamma: f64,
    pub num_samples: usize,
    pub seed: u64,
    pub alphabet_size: usize,
    pub tau_grid: Vec<f64>,
    pub cdf: Vec<f64>,
    // sorted; empty when read back from a file
    rates: Vec<f64>,
}

impl SpectrumEstimate {
    /// Estimate from explicit grid values, e.g. parsed from a file.
    pub fn from_parts(
        n: usize,
        gamma: f64,
        num_samples: usize,
        seed: u64,
        alphabet_size: usize,
        tau_grid: Vec<f64>,
        cdf: Vec<f64>,
    ) -> Result<Self> {
        if tau_grid.is_empty() || tau_grid.len() != cdf.len() {
            return Err(Error::Parse("tau grid and cdf must be non-empty and of equal length".into()));
        }
        if tau_grid.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::Parse("tau grid must be sorted".into()));
        }
        if cdf.iter().any(|c| !(0.0..=1.0).contains(c)) || cdf.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::Parse("cdf must be nondecreasing in [0, 1]".into()));
        }
        Ok(SpectrumEstimate {
            n,
            gamma,
            num_samples,
            seed,
            alphabet_size,
            tau_grid,
            cdf,
            rates: Vec::new(),
        })
    }

    /// Sorted sampled self-information rates (empty for parsed estimates).
    pub fn rates(&self) -> &[f64] {
        &self.rates
    }

    /// Empirical value at an arbitrary `tau` when the rates are available,
    /// otherwise the value at the last grid point `<= tau` (0 below the grid).
    pub fn eval(&self, tau: f64) -> f64 {
        if !self.rates.is_empty() {
            return fraction_at_most(&self.rates, tau + self.gamma);
        }
        let idx = self.tau_grid.partition_point(|&t| t <= tau);
        if idx == 0 {
            0.0
        } else {
            self.cdf[idx - 1]
        }
    }

    /// Generalized `epsilon` and `1 - epsilon` quantiles of the grid cdf:
    /// the first grid points where the cdf reaches each level.
    pub fn bounds(&self, epsilon: f64) -> Result<SpectralBounds> {
        if !(epsilon > 0.0 && epsilon < 0.5) {
            return Err(Error::OutOfRange(format!("epsilon = {epsilon} must lie in (0, 1/2)")));
        }
        let quantile = |level: f64| {
            self.tau_grid
                .iter()
                .zip(&self.cdf)
                .find(|(_, &c)| c >= level)
                .map(|(&t, _)| t)
                .unwrap_or(*self.tau_grid.last().expect("non-empty grid"))
        };
        Ok(SpectralBounds {
            inf_entropy: quantile(epsilon),
            sup_entropy: quantile(1.0 - epsilon),
        })
    }
}

fn fraction_at_most(sorted: &[f64], threshold: f64) -> f64 {
    sorted.partition_point(|&r| rate_at_most(r, threshold)) as f64 / sorted.len() as f64
}

/// Monte Carlo spectrum estimate. Path `i` uses random stream `i` of
/// `seed`, so the result does not depend on the worker count.
pub fn empirical_spectrum(model: &ProcessModel, config: &EstimateConfig) -> Result<SpectrumEstimate> {
    if !(config.gamma > 0.0) {
        return Err(Error::OutOfRange("gamma must be positive".into()));
    }
    if config.num_samples == 0 {
        return Err(Error::OutOfRange("at least one sample is required".into()));
    }
    if config.n == 0 {
        return Err(Error::OutOfRange("n must be at least 1".into()));
    }
    let q = model.alphabet().size();
    let grid = match &config.tau_grid {
        Some(g) => {
            if g.is_empty() || g.windows(2).any(|w| w[1] < w[0]) {
                return Err(Error::OutOfRange("tau grid must be non-empty and sorted".into()));
            }
            g.clone()
        }
        None => default_grid(q, config.gamma),
    };
    let n = config.n;
    let mut rates = model.map_samples(n, config.num_samples, config.seed, config.workers, |symbols, _| {
        rate_from_log_prob(model.log_prob_symbols(symbols), n)
    })?;
    rates.sort_by(|a, b| a.total_cmp(b));
    let cdf = grid.iter().map(|&t| fraction_at_most(&rates, t + config.gamma)).collect();
    Ok(SpectrumEstimate {
        n,
        gamma: config.gamma,
        num_samples: config.num_samples,
        seed: config.seed,
        alphabet_size: q,
        tau_grid: grid,
        cdf,
        rates,
    })
}

/// Exact `Pr((1/n) log2 1/P(X^n) > log2|X| + gamma)` against `2^(-n gamma)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TailReport {
    pub n: usize,
    pub gamma: f64,
    pub lhs: f64,
    pub bound: f64,
    pub pass: bool,
}

pub fn exact_tail_check(model: &ProcessModel, n: usize, gamma: f64, cap: EnumerationCap) -> Result<TailReport> {
    if !(gamma > 0.0) || n == 0 {
        return Err(Error::OutOfRange("need n >= 1 and gamma > 0".into()));
    }
    let threshold = (model.alphabet().size() as f64).log2() + gamma;
    let lhs: f64 = model
        .block_distribution(n, cap)?
        .into_iter()
        .filter(|&p| p > 0.0 && !rate_at_most(-p.log2() / n as f64, threshold))
        .sum();
    let bound = (-(n as f64) * gamma).exp2();
    Ok(TailReport {
        n,
        gamma,
        lhs,
        bound,
        pass: lhs <= bound,
    })
}

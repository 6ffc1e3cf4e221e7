use super::{validate_distribution, ProcessModel};
use crate::coding::same_alphabet;
use crate::error::{Error, Result};

/// Finite mixture `sum_theta w(theta) mu_theta` of ergodic components.
#[derive(Debug, Clone)]
pub struct MixtureModel {
    components: Vec<ProcessModel>,
    weights: Vec<f64>,
    log_weights: Vec<f64>,
}

impl MixtureModel {
    pub fn new(components: Vec<ProcessModel>, weights: Vec<f64>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::InvalidModel("mixture: no components".into()));
        }
        if components.len() != weights.len() {
            return Err(Error::InvalidModel(format!(
                "mixture: {} components but {} weights",
                components.len(),
                weights.len()
            )));
        }
        validate_distribution(&weights, "mixture weights")?;
        let alphabet = components[0].alphabet().clone();
        for (i, c) in components.iter().enumerate() {
            if c.is_mixture() {
                return Err(Error::InvalidModel(format!(
                    "mixture: component {i} is itself a mixture"
                )));
            }
            if !same_alphabet(c.alphabet(), &alphabet) {
                return Err(Error::AlphabetMismatch(format!(
                    "mixture: component {i} has a different alphabet"
                )));
            }
        }
        let log_weights = weights.iter().map(|w| w.log2()).collect();
        Ok(MixtureModel {
            components,
            weights,
            log_weights,
        })
    }

    pub fn components(&self) -> &[ProcessModel] {
        &self.components
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `log2 sum_theta 2^(log2 w_theta + log2 P_theta(x))`.
    pub(crate) fn log_prob(&self, symbols: &[usize]) -> f64 {
        log_sum_exp2(
            self.components
                .iter()
                .zip(&self.log_weights)
                .filter(|(_, &lw)| lw > f64::NEG_INFINITY)
                .map(|(c, &lw)| lw + c.log_prob_symbols(symbols)),
        )
    }
}

/// Base-2 log-sum-exp; `-inf` for an empty or all `-inf` input.
pub fn log_sum_exp2(terms: impl IntoIterator<Item = f64>) -> f64 {
    let terms: Vec<f64> = terms.into_iter().collect();
    let max = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + terms.iter().map(|t| (t - max).exp2()).sum::<f64>().log2()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lse_matches_direct_sum() {
        let v = log_sum_exp2([-1.0, -2.0, -3.0]);
        assert!((v - (0.5f64 + 0.25 + 0.125).log2()).abs() < 1e-15);
        assert_eq!(log_sum_exp2([f64::NEG_INFINITY; 2]), f64::NEG_INFINITY);
        // no underflow far below f64 range
        let tiny = log_sum_exp2([-5000.0, -5000.0]);
        assert!((tiny + 4999.0).abs() < 1e-12);
    }
}

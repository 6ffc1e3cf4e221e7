use std::sync::Arc;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;

use super::{entropy_of, validate_distribution, Alphabet};
use crate::error::{Error, Result};

/// Independent, identically distributed symbols.
#[derive(Debug, Clone)]
pub struct IidModel {
    alphabet: Arc<Alphabet>,
    probs: Vec<f64>,
}

impl IidModel {
    pub fn new(alphabet: Arc<Alphabet>, probs: Vec<f64>) -> Result<Self> {
        if probs.len() != alphabet.size() {
            return Err(Error::InvalidModel(format!(
                "iid: {} probabilities for an alphabet of size {}",
                probs.len(),
                alphabet.size()
            )));
        }
        validate_distribution(&probs, "iid probabilities")?;
        Ok(IidModel { alphabet, probs })
    }

    pub fn uniform(alphabet: Arc<Alphabet>) -> Self {
        let q = alphabet.size();
        IidModel {
            alphabet,
            probs: vec![1.0 / q as f64; q],
        }
    }

    /// Binary i.i.d. process with `P(1) = p_one`.
    pub fn bernoulli(p_one: f64) -> Result<Self> {
        IidModel::new(Alphabet::binary().shared(), vec![1.0 - p_one, p_one])
    }

    pub fn alphabet(&self) -> &Arc<Alphabet> {
        &self.alphabet
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub(crate) fn log_prob(&self, symbols: &[usize]) -> f64 {
        symbols.iter().map(|&s| self.probs[s].log2()).sum()
    }

    pub fn entropy(&self) -> f64 {
        entropy_of(&self.probs)
    }

    pub(crate) fn sample_into<R: Rng + ?Sized>(&self, rng: &mut R, n: usize, out: &mut Vec<usize>) {
        let dist = WeightedIndex::new(&self.probs).expect("validated distribution");
        out.extend((0..n).map(|_| dist.sample(rng)));
    }
}

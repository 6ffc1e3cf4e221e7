use std::sync::Arc;

use super::Alphabet;
use crate::error::{Error, Result};

/// Where a sampled path came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Provenance {
    pub seed: u64,
    pub stream: u64,
    pub model_id: u64,
}

/// A finite realization `x_1 .. x_n` over an alphabet.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SamplePath {
    alphabet: Arc<Alphabet>,
    symbols: Vec<usize>,
    provenance: Option<Provenance>,
}

impl SamplePath {
    pub fn new(alphabet: Arc<Alphabet>, symbols: Vec<usize>) -> Result<Self> {
        if symbols.is_empty() {
            return Err(Error::EmptyPath);
        }
        if let Some(&bad) = symbols.iter().find(|&&s| s >= alphabet.size()) {
            return Err(Error::AlphabetMismatch(format!(
                "symbol index {bad} outside alphabet of size {}",
                alphabet.size()
            )));
        }
        Ok(SamplePath {
            alphabet,
            symbols,
            provenance: None,
        })
    }

    /// Parses `text` with the alphabet's label convention.
    pub fn from_labels(alphabet: Arc<Alphabet>, text: &str) -> Result<Self> {
        let symbols = alphabet.parse(text)?;
        SamplePath::new(alphabet, symbols)
    }

    pub(crate) fn with_provenance(mut self, provenance: Provenance) -> Self {
        self.provenance = Some(provenance);
        self
    }

    pub fn alphabet(&self) -> &Arc<Alphabet> {
        &self.alphabet
    }

    pub fn symbols(&self) -> &[usize] {
        &self.symbols
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn provenance(&self) -> Option<Provenance> {
        self.provenance
    }

    pub fn to_labels(&self) -> String {
        self.alphabet.format(&self.symbols)
    }

    pub fn into_symbols(self) -> Vec<usize> {
        self.symbols
    }
}

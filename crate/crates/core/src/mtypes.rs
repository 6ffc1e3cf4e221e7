//! Overlapping-block Markov types and order-k Markov approximations.
//!
//! The order-k type of `x_1^n` is the empirical distribution of its `n - k`
//! overlapping `(k+1)`-blocks. Types store exact integer counts, so two
//! sequences have the same type iff their [`MarkovType`] values are equal.
//!
//! Sequences of one type share the multiset of `(k+1)`-windows, so any
//! product `prod_{i>k} P(x_i | x_{i-k}^{i-1})` takes the same value on the
//! whole class, for a single approximation and for a weighted sum of them.

use std::collections::BTreeMap;
use std::sync::Arc;

use rayon::prelude::*;
use serde_json::{json, Map, Value};

use crate::enumerate::{checked_pow, decode, EnumerationCap};
use crate::error::{Error, Result};
use crate::process::{log_sum_exp2, Alphabet, ProcessModel, SamplePath};

/// Order-k type: counts of overlapping `(k+1)`-blocks.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MarkovType {
    k: usize,
    alphabet_size: usize,
    windows: u64,
    // block index (first symbol most significant) -> count, positive only
    counts: BTreeMap<u64, u64>,
}

impl MarkovType {
    /// Type of raw symbols; requires `symbols.len() > k`.
    pub fn of_symbols(symbols: &[usize], alphabet_size: usize, k: usize) -> Result<Self> {
        if symbols.len() <= k {
            return Err(Error::PathTooShort {
                needed: k + 1,
                got: symbols.len(),
            });
        }
        let width = checked_pow(alphabet_size, k + 1)
            .ok_or_else(|| Error::OutOfRange("block space overflows".into()))? as u64;
        let modulus = width / alphabet_size as u64;
        let q = alphabet_size as u64;
        let mut counts = BTreeMap::new();
        let mut idx: u64 = 0;
        for (i, &s) in symbols.iter().enumerate() {
            idx = (idx % modulus) * q + s as u64;
            if i >= k {
                *counts.entry(idx).or_insert(0) += 1;
            }
        }
        Ok(MarkovType {
            k,
            alphabet_size,
            windows: (symbols.len() - k) as u64,
            counts,
        })
    }

    pub fn order(&self) -> usize {
        self.k
    }

    pub fn alphabet_size(&self) -> usize {
        self.alphabet_size
    }

    /// `n - k`.
    pub fn windows(&self) -> u64 {
        self.windows
    }

    /// Positive counts by block index.
    pub fn counts(&self) -> &BTreeMap<u64, u64> {
        &self.counts
    }

    pub fn count(&self, block: &[usize]) -> u64 {
        let idx = block.iter().fold(0u64, |a, &s| a * self.alphabet_size as u64 + s as u64);
        self.counts.get(&idx).copied().unwrap_or(0)
    }

    /// `Q(block) = count / (n - k)`.
    pub fn mass(&self, block: &[usize]) -> f64 {
        self.count(block) as f64 / self.windows as f64
    }

    /// Dense distribution over all `|X|^(k+1)` blocks.
    pub fn distribution(&self) -> Vec<f64> {
        let len = checked_pow(self.alphabet_size, self.k + 1).expect("type was built");
        let mut out = vec![0.0; len];
        for (&b, &c) in &self.counts {
            out[b as usize] = c as f64 / self.windows as f64;
        }
        out
    }

    /// `{k, counts: block label -> count, windows}`.
    pub fn to_json(&self, alphabet: &Alphabet) -> Value {
        let mut counts = Map::new();
        for (&b, &c) in &self.counts {
            let block = decode(b as usize, self.alphabet_size, self.k + 1);
            counts.insert(alphabet.format(&block), Value::from(c));
        }
        json!({ "k": self.k, "counts": counts, "windows": self.windows })
    }
}

/// Order-k type of a path; requires `n > k`.
pub fn markov_type(path: &SamplePath, k: usize) -> Result<MarkovType> {
    MarkovType::of_symbols(path.symbols(), path.alphabet().size(), k)
}

fn census(alphabet_size: usize, n: usize, k: usize, cap: EnumerationCap) -> Result<Vec<MarkovType>> {
    if n <= k {
        return Err(Error::PathTooShort { needed: k + 1, got: n });
    }
    let total = cap.check_pow(alphabet_size, n)?;
    Ok((0..total)
        .into_par_iter()
        .map(|i| MarkovType::of_symbols(&decode(i, alphabet_size, n), alphabet_size, k).expect("n > k"))
        .collect())
}

/// All `x^n` of type `q`, in lexicographic order, by exhaustive filtering.
pub fn type_class(alphabet_size: usize, n: usize, q: &MarkovType, cap: EnumerationCap) -> Result<Vec<Vec<usize>>> {
    if q.alphabet_size != alphabet_size {
        return Err(Error::AlphabetMismatch("type and alphabet sizes differ".into()));
    }
    Ok(census(alphabet_size, n, q.k, cap)?
        .into_iter()
        .enumerate()
        .filter(|(_, t)| t == q)
        .map(|(i, _)| decode(i, alphabet_size, n))
        .collect())
}

/// Every type class of `X^n` with its members as block indices.
pub fn type_partition(
    alphabet_size: usize,
    n: usize,
    k: usize,
    cap: EnumerationCap,
) -> Result<BTreeMap<MarkovType, Vec<usize>>> {
    let mut classes: BTreeMap<MarkovType, Vec<usize>> = BTreeMap::new();
    for (i, t) in census(alphabet_size, n, k, cap)?.into_iter().enumerate() {
        classes.entry(t).or_default().push(i);
    }
    Ok(classes)
}

/// Number of distinct order-k types in `X^n` against
/// `L_{n,k} = (n - k + 1)^(|X|^(k+1))`.
#[derive(Debug, Clone, PartialEq)]
pub struct TypeCountReport {
    pub n: usize,
    pub k: usize,
    pub alphabet_size: usize,
    pub observed: usize,
    pub bound: f64,
    pub pass: bool,
}

impl TypeCountReport {
    pub fn to_json(&self) -> Value {
        json!({
            "n": self.n,
            "k": self.k,
            "alphabet_size": self.alphabet_size,
            "lhs": self.observed,
            "rhs_terms": { "type_count_bound": crate::numfmt::num(self.bound) },
            "pass": self.pass,
        })
    }
}

pub fn type_count_bound(n: usize, k: usize, alphabet_size: usize, cap: EnumerationCap) -> Result<TypeCountReport> {
    let observed = type_partition(alphabet_size, n, k, cap)?.len();
    let bound = ((n - k + 1) as f64).powf((alphabet_size as f64).powi(k as i32 + 1));
    Ok(TypeCountReport {
        n,
        k,
        alphabet_size,
        observed,
        bound,
        pass: observed as f64 <= bound,
    })
}

/// Order-k Markov approximation `P^(k)(x_{k+1} | x_1^k)` built from a
/// model's exact `(k+1)`-block marginals.
#[derive(Debug, Clone)]
pub struct MarkovApproximation {
    k: usize,
    alphabet: Arc<Alphabet>,
    blocks: Vec<f64>,
    // NaN where the context has probability zero
    conditional: Vec<f64>,
}

impl MarkovApproximation {
    pub fn order(&self) -> usize {
        self.k
    }

    pub fn alphabet(&self) -> &Arc<Alphabet> {
        &self.alphabet
    }

    /// `P(x_{k+1} | context)`, `None` for a zero-probability context.
    pub fn conditional(&self, context: &[usize], symbol: usize) -> Option<f64> {
        let q = self.alphabet.size();
        let idx = context.iter().fold(0, |a, &s| a * q + s) * q + symbol;
        let p = self.conditional[idx];
        (!p.is_nan()).then_some(p)
    }

    /// `H(X_{k+1} | X_1^k)` of the underlying process, which is also the
    /// entropy rate of the approximating chain.
    pub fn conditional_entropy(&self) -> f64 {
        self.blocks
            .iter()
            .zip(&self.conditional)
            .filter(|(&p, _)| p > 0.0)
            .map(|(&p, &c)| -p * c.log2())
            .sum()
    }

    fn log_conditional(&self, symbols: &[usize]) -> Result<f64> {
        let k = self.k;
        if symbols.len() <= k {
            return Err(Error::PathTooShort {
                needed: k + 1,
                got: symbols.len(),
            });
        }
        let q = self.alphabet.size();
        let modulus = self.conditional.len() / q;
        let mut idx = 0usize;
        let mut total = 0.0;
        for (i, &s) in symbols.iter().enumerate() {
            idx = (idx % modulus) * q + s;
            if i >= k {
                let p = self.conditional[idx];
                if p.is_nan() {
                    return Err(Error::ZeroProbabilityContext(
                        self.alphabet.format(&symbols[i - k..i]),
                    ));
                }
                total += p.log2();
            }
        }
        Ok(total)
    }
}

/// Approximation of an ergodic model from its `(k+1)`-block law.
pub fn markov_approximation(model: &ProcessModel, k: usize, cap: EnumerationCap) -> Result<MarkovApproximation> {
    if model.is_mixture() {
        return Err(Error::MixtureNotAllowed);
    }
    let q = model.alphabet().size();
    let blocks = model.block_distribution(k + 1, cap)?;
    let mut conditional = vec![f64::NAN; blocks.len()];
    for (ctx, row) in blocks.chunks(q).enumerate() {
        let mass: f64 = row.iter().sum();
        if mass > 0.0 {
            for (x, &p) in row.iter().enumerate() {
                conditional[ctx * q + x] = p / mass;
            }
        }
    }
    Ok(MarkovApproximation {
        k,
        alphabet: model.alphabet().clone(),
        blocks,
        conditional,
    })
}

/// `log2 prod_{i=k+1}^n P^(k)(x_i | x_{i-k}^{i-1})`; errors on a context of
/// probability zero.
pub fn approx_log_probability(approx: &MarkovApproximation, path: &SamplePath) -> Result<f64> {
    if !crate::coding::same_alphabet(approx.alphabet(), path.alphabet()) {
        return Err(Error::AlphabetMismatch("path alphabet differs from the approximation".into()));
    }
    approx.log_conditional(path.symbols())
}

/// Order-k approximations of every component of a mixture, with weights.
#[derive(Debug, Clone)]
pub struct MixedApproximation {
    parts: Vec<(f64, MarkovApproximation)>,
}

impl MixedApproximation {
    pub fn new(model: &ProcessModel, k: usize, cap: EnumerationCap) -> Result<Self> {
        let parts = model
            .components()
            .into_iter()
            .map(|(w, c)| Ok((w, markov_approximation(c, k, cap)?)))
            .collect::<Result<Vec<_>>>()?;
        Ok(MixedApproximation { parts })
    }

    pub fn components(&self) -> &[(f64, MarkovApproximation)] {
        &self.parts
    }

    /// `log2 sum_theta w_theta P^(k)_theta(x_{k+1}^n | x_1^k)`. A component
    /// whose approximation hits a zero-probability context contributes 0;
    /// it is an error only when every component does.
    pub fn log_probability(&self, symbols: &[usize]) -> Result<f64> {
        let mut terms = Vec::with_capacity(self.parts.len());
        let mut last_err = None;
        for (w, a) in &self.parts {
            if *w == 0.0 {
                continue;
            }
            match a.log_conditional(symbols) {
                Ok(lp) => terms.push(w.log2() + lp),
                Err(e @ Error::ZeroProbabilityContext(_)) => last_err = Some(e),
                Err(e) => return Err(e),
            }
        }
        if terms.is_empty() {
            return Err(last_err.expect("weights sum to 1"));
        }
        Ok(log_sum_exp2(terms))
    }
}

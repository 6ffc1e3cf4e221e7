//! Sliding-block codes, pushforward processes, and exhaustive checks of the
//! finite-length inequalities behind homomorphic monotonicity of the
//! information spectrum.

mod bounds;
mod code;
mod coupling;

pub use bounds::{
    hamming_ball_bound_check, verify_change_of_measure, verify_finite_bound, verify_finite_bound_grid,
    BoundGrid, ChangeOfMeasureReport, FiniteBoundReport, HammingBallReport,
};
pub use code::{BoundaryPolicy, CodePair, SlidingBlockCode};
pub(crate) use code::same_alphabet;
pub use coupling::Coupling;

use crate::enumerate::{with_workers, EnumerationCap};
use crate::error::{Error, Result};
use crate::process::{substream, FactorModel, MixtureModel, ProcessModel, SamplePath};
use rayon::prelude::*;

/// `h(b) = -b log2 b - (1-b) log2 (1-b)` with `h(0) = h(1) = 0`.
pub fn binary_entropy(beta: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&beta) {
        return Err(Error::OutOfRange(format!("binary entropy argument {beta} outside [0, 1]")));
    }
    Ok(crate::process::entropy_of(&[beta, 1.0 - beta]))
}

/// Number of positions where `a` and `b` differ.
pub fn hamming_distance(a: &[usize], b: &[usize]) -> Result<usize> {
    if a.len() != b.len() {
        return Err(Error::OutOfRange(format!(
            "hamming distance of sequences with lengths {} and {}",
            a.len(),
            b.len()
        )));
    }
    Ok(a.iter().zip(b).filter(|(x, y)| x != y).count())
}

/// Hamming distance of paths.
pub fn path_hamming_distance(a: &SamplePath, b: &SamplePath) -> Result<usize> {
    hamming_distance(a.symbols(), b.symbols())
}

/// Applies a code to a path; see [`SlidingBlockCode::apply`].
pub fn apply_code(code: &SlidingBlockCode, path: &SamplePath, policy: &BoundaryPolicy) -> Result<SamplePath> {
    code.apply(path, policy)
}

/// The image process `phi_* mu` of `base` under `code`.
///
/// I.i.d. and Markov bases become a factor model; a factor base is re-based
/// on its own base with the composed code; a mixture maps componentwise with
/// the same weights.
pub fn pushforward_model(code: &SlidingBlockCode, base: &ProcessModel, cap: EnumerationCap) -> Result<ProcessModel> {
    match base {
        ProcessModel::Iid(_) | ProcessModel::Markov(_) => {
            FactorModel::new(base.clone(), code.clone(), cap).map(ProcessModel::Factor)
        }
        ProcessModel::Factor(f) => {
            let composed = f.code().then(code)?;
            FactorModel::new(f.base().clone(), composed, cap).map(ProcessModel::Factor)
        }
        ProcessModel::Mixture(m) => {
            let components = m
                .components()
                .iter()
                .map(|c| pushforward_model(code, c, cap))
                .collect::<Result<Vec<_>>>()?;
            MixtureModel::new(components, m.weights().to_vec()).map(ProcessModel::Mixture)
        }
    }
}

/// How [`mismatch_rate`] evaluates `Pr(Y_0 != f(X_{-l}^l))`.
#[derive(Debug, Clone, Copy)]
pub enum MismatchMethod {
    Exact { cap: EnumerationCap },
    MonteCarlo { samples: usize, seed: u64, workers: usize },
}

/// Probability that `code` and `reference` disagree at the origin when both
/// read the same realization of `base`.
pub fn mismatch_rate(
    code: &SlidingBlockCode,
    reference: &SlidingBlockCode,
    base: &ProcessModel,
    method: MismatchMethod,
) -> Result<f64> {
    if !same_alphabet(code.input(), reference.input()) || !same_alphabet(code.output(), reference.output()) {
        return Err(Error::AlphabetMismatch(
            "code and reference must share input and output alphabets".into(),
        ));
    }
    if !same_alphabet(code.input(), base.alphabet()) {
        return Err(Error::AlphabetMismatch("base alphabet differs from the code input".into()));
    }
    let radius = code.radius().max(reference.radius());
    let width = 2 * radius + 1;
    let disagree = |w: &[usize]| {
        let a = code.apply_symbols(&w[radius - code.radius()..=radius + code.radius()]);
        let b = reference.apply_symbols(&w[radius - reference.radius()..=radius + reference.radius()]);
        a[0] != b[0]
    };
    match method {
        MismatchMethod::Exact { cap } => {
            let law = base.block_distribution(width, cap)?;
            let q = base.alphabet().size();
            Ok(law
                .par_iter()
                .enumerate()
                .filter(|(_, &p)| p > 0.0)
                .map(|(i, &p)| {
                    if disagree(&crate::enumerate::decode(i, q, width)) {
                        p
                    } else {
                        0.0
                    }
                })
                .collect::<Vec<f64>>()
                .iter()
                .sum())
        }
        MismatchMethod::MonteCarlo { samples, seed, workers } => {
            if samples == 0 {
                return Err(Error::OutOfRange("at least one sample is required".into()));
            }
            let hits: usize = with_workers(workers, || {
                (0..samples as u64)
                    .into_par_iter()
                    .map(|i| {
                        let mut rng = substream(seed, i);
                        let (w, _) = base.sample_symbols(width, &mut rng);
                        usize::from(disagree(&w))
                    })
                    .sum()
            });
            Ok(hits as f64 / samples as f64)
        }
    }
}

#[cfg(test)]
mod tests;

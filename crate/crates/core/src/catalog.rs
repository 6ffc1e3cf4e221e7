//! Bundled example models and codes, addressable by name.

use std::sync::Arc;

use crate::coding::SlidingBlockCode;
use crate::error::{Error, Result};
use crate::process::{Alphabet, ProcessModel};

/// Names accepted by [`model`], in a fixed order.
pub const MODEL_NAMES: &[&str] = &[
    "fair-coin",
    "bernoulli-0.1",
    "bernoulli-0.25",
    "bernoulli-0.9",
    "all-zeros",
    "ternary-iid",
    "ternary-uniform",
    "markov-flip-0.2",
    "markov-asym",
    "markov-sticky",
    "markov-order2",
    "xor3-fair",
    "xor3-markov",
    "mixture-0.3-0.7",
    "mixture-fair-zeros",
    "mixture-markov",
    "mixture-ternary",
    "counterexample-mixture",
    "counterexample-ergodic",
    "iso-x",
    "iso-y",
];

/// Names accepted by [`code`].
pub const CODE_NAMES: &[&str] = &["identity", "bit-flip", "xor3", "majority3", "constant-zero"];

fn binary() -> Arc<Alphabet> {
    Alphabet::binary().shared()
}

fn ternary() -> Arc<Alphabet> {
    Alphabet::numeric(3).expect("three labels").shared()
}

fn bernoulli(p_one: f64) -> ProcessModel {
    ProcessModel::iid(binary(), vec![1.0 - p_one, p_one]).expect("valid bernoulli")
}

// `1 - 0.9` is not the double nearest 0.1, so the mirror image of
// Bernoulli(0.1) is written out
fn bernoulli_09() -> ProcessModel {
    ProcessModel::iid(binary(), vec![0.1, 0.9]).expect("valid bernoulli")
}

fn markov(rows: Vec<Vec<f64>>) -> ProcessModel {
    let order = if rows.len() == 2 { 1 } else { 2 };
    ProcessModel::markov(binary(), order, rows).expect("ergodic chain")
}

fn mixture(weights: Vec<f64>, components: Vec<ProcessModel>) -> ProcessModel {
    ProcessModel::mixture(components, weights).expect("valid mixture")
}

/// A bundled model by name.
pub fn model(name: &str) -> Result<ProcessModel> {
    Ok(match name {
        "fair-coin" => bernoulli(0.5),
        "bernoulli-0.1" => bernoulli(0.1),
        "bernoulli-0.25" => bernoulli(0.25),
        "bernoulli-0.9" => bernoulli_09(),
        "all-zeros" => bernoulli(0.0),
        "ternary-iid" => ProcessModel::iid(ternary(), vec![0.5, 0.3, 0.2])?,
        "ternary-uniform" => ProcessModel::iid(ternary(), vec![1.0 / 3.0; 3])?,
        "markov-flip-0.2" => markov(vec![vec![0.8, 0.2], vec![0.2, 0.8]]),
        "markov-asym" => markov(vec![vec![0.9, 0.1], vec![0.5, 0.5]]),
        "markov-sticky" => markov(vec![vec![0.95, 0.05], vec![0.3, 0.7]]),
        "markov-order2" => markov(vec![
            vec![0.7, 0.3],
            vec![0.4, 0.6],
            vec![0.8, 0.2],
            vec![0.5, 0.5],
        ]),
        "xor3-fair" => ProcessModel::factor(bernoulli(0.5), SlidingBlockCode::xor(1))?,
        "xor3-markov" => ProcessModel::factor(model("markov-asym")?, SlidingBlockCode::xor(1))?,
        "mixture-0.3-0.7" => mixture(vec![0.3, 0.7], vec![bernoulli(0.5), bernoulli(0.1)]),
        "mixture-fair-zeros" => mixture(vec![0.5, 0.5], vec![bernoulli(0.5), bernoulli(0.0)]),
        "mixture-markov" => mixture(vec![0.5, 0.5], vec![model("markov-asym")?, model("markov-sticky")?]),
        "mixture-ternary" => mixture(vec![0.6, 0.4], vec![model("ternary-iid")?, model("ternary-uniform")?]),
        "counterexample-mixture" => mixture(vec![0.5, 0.5], vec![bernoulli(0.1), bernoulli_09()]),
        "counterexample-ergodic" => bernoulli(0.1),
        "iso-x" => mixture(vec![0.7, 0.3], vec![bernoulli(0.1), bernoulli(0.5)]),
        "iso-y" => mixture(vec![0.7, 0.3], vec![bernoulli_09(), bernoulli(0.5)]),
        _ => return Err(Error::Parse(format!("unknown bundled model {name:?}"))),
    })
}

/// A bundled binary code by name.
pub fn code(name: &str) -> Result<SlidingBlockCode> {
    Ok(match name {
        "identity" => SlidingBlockCode::identity(binary()),
        "bit-flip" => SlidingBlockCode::bit_flip(),
        "xor3" => SlidingBlockCode::xor(1),
        "majority3" => SlidingBlockCode::majority(1),
        "constant-zero" => SlidingBlockCode::constant(binary(), binary(), 0, 0)?,
        _ => return Err(Error::Parse(format!("unknown bundled code {name:?}"))),
    })
}

/// Every bundled model with its name.
pub fn all_models() -> Vec<(&'static str, ProcessModel)> {
    MODEL_NAMES
        .iter()
        .map(|&n| (n, model(n).expect("bundled models are valid")))
        .collect()
}

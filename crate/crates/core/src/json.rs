//! JSON documents for process models and sliding-block codes.
//!
//! A model file is a tagged object with a schema version:
//!
//! ```json
//! {"schema": 1, "type": "mixture", "weights": [0.3, 0.7], "components": [
//!   {"type": "iid", "alphabet": ["0", "1"], "probs": [0.5, 0.5]},
//!   {"type": "iid", "alphabet": ["0", "1"], "probs": [0.9, 0.1]}]}
//! ```
//!
//! Markov kernels are arrays of rows in lexicographic context order; the
//! optional `initial` field must then be stationary. Factor models carry a
//! `base` model and a `code`:
//!
//! ```json
//! {"radius": 1, "input_alphabet": ["0", "1"], "output_alphabet": ["0", "1"],
//!  "table": {"000": "0", "001": "1", "...": "..."}}
//! ```

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::coding::SlidingBlockCode;
use crate::enumerate::{decode, encode, EnumerationCap};
use crate::error::{Error, Result};
use crate::process::{Alphabet, FactorModel, IidModel, MarkovModel, MixtureModel, ProcessModel};

pub const SCHEMA_VERSION: u64 = 1;

#[derive(Debug, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
enum ModelDoc {
    Iid {
        alphabet: Vec<String>,
        probs: Vec<f64>,
    },
    Markov {
        alphabet: Vec<String>,
        order: usize,
        kernel: Vec<Vec<f64>>,
        #[serde(default)]
        initial: Option<Vec<f64>>,
    },
    Factor {
        base: Box<ModelDoc>,
        code: CodeDoc,
    },
    Mixture {
        weights: Vec<f64>,
        components: Vec<ModelDoc>,
    },
}

#[derive(Debug, Serialize, Deserialize)]
struct CodeDoc {
    radius: usize,
    input_alphabet: Vec<String>,
    output_alphabet: Vec<String>,
    table: BTreeMap<String, String>,
}

/// Parses a versioned model document.
pub fn parse_model(text: &str) -> Result<ProcessModel> {
    let mut value: Value = serde_json::from_str(text)?;
    let obj = value
        .as_object_mut()
        .ok_or_else(|| Error::Parse("model document must be a JSON object".into()))?;
    match obj.remove("schema").and_then(|v| v.as_u64()) {
        Some(SCHEMA_VERSION) => {}
        Some(other) => return Err(Error::Parse(format!("unsupported schema version {other}"))),
        None => return Err(Error::Parse("missing integer field \"schema\"".into())),
    }
    let doc: ModelDoc = serde_json::from_value(value)?;
    build_model(doc, EnumerationCap::default())
}

/// Parses a code document.
pub fn parse_code(text: &str) -> Result<SlidingBlockCode> {
    let doc: CodeDoc = serde_json::from_str(text)?;
    build_code(doc)
}

fn build_model(doc: ModelDoc, cap: EnumerationCap) -> Result<ProcessModel> {
    match doc {
        ModelDoc::Iid { alphabet, probs } => {
            Ok(ProcessModel::Iid(IidModel::new(Alphabet::new(alphabet)?.shared(), probs)?))
        }
        ModelDoc::Markov {
            alphabet,
            order,
            kernel,
            initial,
        } => {
            let alphabet = Alphabet::new(alphabet)?.shared();
            let m = match initial {
                Some(init) => MarkovModel::with_initial(alphabet, order, kernel, init)?,
                None => MarkovModel::new(alphabet, order, kernel)?,
            };
            Ok(ProcessModel::Markov(m))
        }
        ModelDoc::Factor { base, code } => {
            let base = build_model(*base, cap)?;
            let code = build_code(code)?;
            Ok(ProcessModel::Factor(FactorModel::new(base, code, cap)?))
        }
        ModelDoc::Mixture {
            weights,
            components,
        } => {
            let components = components
                .into_iter()
                .map(|c| build_model(c, cap))
                .collect::<Result<Vec<_>>>()?;
            Ok(ProcessModel::Mixture(MixtureModel::new(components, weights)?))
        }
    }
}

fn build_code(doc: CodeDoc) -> Result<SlidingBlockCode> {
    let input = Alphabet::new(doc.input_alphabet)?.shared();
    let output = Alphabet::new(doc.output_alphabet)?.shared();
    let width = 2 * doc.radius + 1;
    let total = EnumerationCap(1 << 22)
        .check_pow(input.size(), width)
        .map_err(|_| Error::InvalidCode("window table too large".into()))?;
    let mut table = vec![usize::MAX; total];
    for (window, symbol) in &doc.table {
        let w = input.parse(window)?;
        if w.len() != width {
            return Err(Error::InvalidCode(format!(
                "window {window:?} has length {}, expected {width}",
                w.len()
            )));
        }
        let y = output
            .index_of(symbol)
            .ok_or_else(|| Error::InvalidCode(format!("unknown output symbol {symbol:?}")))?;
        let slot = &mut table[encode(&w, input.size())];
        if *slot != usize::MAX {
            return Err(Error::InvalidCode(format!("window {window:?} listed twice")));
        }
        *slot = y;
    }
    if let Some(missing) = table.iter().position(|&y| y == usize::MAX) {
        return Err(Error::InvalidCode(format!(
            "table is not total: window {:?} is missing",
            input.format(&decode(missing, input.size(), width))
        )));
    }
    SlidingBlockCode::new(input, output, doc.radius, table)
}

fn labels(alphabet: &Arc<Alphabet>) -> Value {
    Value::Array(alphabet.labels().iter().cloned().map(Value::String).collect())
}

// Model parameters keep full precision so documents re-validate exactly.
fn nums(xs: &[f64]) -> Value {
    Value::Array(xs.iter().map(|&x| Value::from(x)).collect())
}

/// Canonical JSON form of a code.
pub fn code_to_value(code: &SlidingBlockCode) -> Value {
    let q = code.input().size();
    let mut table = Map::new();
    for (w, &y) in code.table().iter().enumerate() {
        table.insert(
            code.input().format(&decode(w, q, code.width())),
            Value::String(code.output().label(y).to_string()),
        );
    }
    let mut obj = Map::new();
    obj.insert("radius".into(), Value::from(code.radius()));
    obj.insert("input_alphabet".into(), labels(code.input()));
    obj.insert("output_alphabet".into(), labels(code.output()));
    obj.insert("table".into(), Value::Object(table));
    Value::Object(obj)
}

fn model_body(model: &ProcessModel) -> Map<String, Value> {
    let mut obj = Map::new();
    obj.insert("type".into(), Value::from(model.kind()));
    match model {
        ProcessModel::Iid(m) => {
            obj.insert("alphabet".into(), labels(m.alphabet()));
            obj.insert("probs".into(), nums(m.probs()));
        }
        ProcessModel::Markov(m) => {
            obj.insert("alphabet".into(), labels(m.alphabet()));
            obj.insert("order".into(), Value::from(m.order()));
            obj.insert(
                "kernel".into(),
                Value::Array(m.rows().iter().map(|r| nums(r)).collect()),
            );
        }
        ProcessModel::Factor(f) => {
            obj.insert("base".into(), Value::Object(model_body(f.base())));
            obj.insert("code".into(), code_to_value(f.code()));
        }
        ProcessModel::Mixture(m) => {
            obj.insert("weights".into(), nums(m.weights()));
            obj.insert(
                "components".into(),
                Value::Array(m.components().iter().map(|c| Value::Object(model_body(c))).collect()),
            );
        }
    }
    obj
}

/// Canonical JSON document (with `"schema": 1`) for a model.
pub fn model_to_value(model: &ProcessModel) -> Value {
    let mut obj = Map::new();
    obj.insert("schema".into(), Value::from(SCHEMA_VERSION));
    obj.extend(model_body(model));
    Value::Object(obj)
}

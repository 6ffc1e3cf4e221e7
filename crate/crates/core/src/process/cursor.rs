//! Incremental prefix probabilities for exhaustive block enumeration.

use rayon::prelude::*;

use super::ProcessModel;
use crate::enumerate::{checked_pow, EnumerationCap};
use crate::error::Result;

#[derive(Debug, Clone)]
pub(crate) enum Cursor {
    Iid {
        prob: f64,
    },
    Markov {
        prob: f64,
        recent: usize,
        depth: usize,
    },
    Factor {
        prob: f64,
        pred: Vec<f64>,
    },
    Mixture {
        prob: f64,
        parts: Vec<Cursor>,
    },
}

impl Cursor {
    pub(crate) fn prob(&self) -> f64 {
        match self {
            Cursor::Iid { prob }
            | Cursor::Markov { prob, .. }
            | Cursor::Factor { prob, .. }
            | Cursor::Mixture { prob, .. } => *prob,
        }
    }
}

impl ProcessModel {
    pub(crate) fn root_cursor(&self) -> Cursor {
        match self {
            ProcessModel::Iid(_) => Cursor::Iid { prob: 1.0 },
            ProcessModel::Markov(_) => Cursor::Markov {
                prob: 1.0,
                recent: 0,
                depth: 0,
            },
            ProcessModel::Factor(f) => Cursor::Factor {
                prob: 1.0,
                pred: f.chain().initial().to_vec(),
            },
            ProcessModel::Mixture(m) => Cursor::Mixture {
                prob: 1.0,
                parts: m.components().iter().map(|c| c.root_cursor()).collect(),
            },
        }
    }

    /// Cursor for the prefix extended by `x`.
    pub(crate) fn extend_cursor(&self, cursor: &Cursor, x: usize) -> Cursor {
        match (self, cursor) {
            (ProcessModel::Iid(m), Cursor::Iid { prob }) => Cursor::Iid {
                prob: prob * m.probs()[x],
            },
            (ProcessModel::Markov(m), Cursor::Markov { prob, recent, depth }) => {
                let q = m.alphabet().size();
                let k = m.order();
                if *depth < k {
                    let recent = recent * q + x;
                    Cursor::Markov {
                        prob: m.prefix_marginal(depth + 1, recent),
                        recent,
                        depth: depth + 1,
                    }
                } else {
                    let wrap = m.context_count() / q;
                    Cursor::Markov {
                        prob: prob * m.transition(*recent, x),
                        recent: (recent % wrap) * q + x,
                        depth: depth + 1,
                    }
                }
            }
            (ProcessModel::Factor(f), Cursor::Factor { pred, .. }) => {
                let chain = f.chain();
                let alpha: Vec<f64> = pred
                    .iter()
                    .zip(chain.emission())
                    .map(|(&p, &e)| if e == x { p } else { 0.0 })
                    .collect();
                let prob = alpha.iter().sum();
                let mut next = vec![0.0; alpha.len()];
                chain.propagate(&alpha, &mut next);
                Cursor::Factor { prob, pred: next }
            }
            (ProcessModel::Mixture(m), Cursor::Mixture { parts, .. }) => {
                let parts: Vec<Cursor> = m
                    .components()
                    .iter()
                    .zip(parts)
                    .map(|(c, p)| c.extend_cursor(p, x))
                    .collect();
                let prob = parts
                    .iter()
                    .zip(m.weights())
                    .map(|(p, w)| w * p.prob())
                    .sum();
                Cursor::Mixture { prob, parts }
            }
            _ => unreachable!("cursor does not belong to this model"),
        }
    }

    fn block_dfs(&self, cursor: &Cursor, len: usize, out: &mut [f64]) {
        if len == 0 {
            out[0] = cursor.prob();
            return;
        }
        let q = self.alphabet().size();
        let sub = out.len() / q;
        for x in 0..q {
            let child = self.extend_cursor(cursor, x);
            if child.prob() > 0.0 {
                self.block_dfs(&child, len - 1, &mut out[x * sub..(x + 1) * sub]);
            }
        }
    }

    /// Exact law of `X_1 .. X_len`, indexed base |X| with the first symbol
    /// most significant.
    pub fn block_distribution(&self, len: usize, cap: EnumerationCap) -> Result<Vec<f64>> {
        let q = self.alphabet().size();
        let total = cap.check_pow(q, len)?;
        let mut out = vec![0.0; total];
        // Split on a short prefix so the subtrees can be filled in parallel.
        let mut split = 0;
        while split < len && checked_pow(q, split).unwrap_or(usize::MAX) < 64 {
            split += 1;
        }
        let chunk = total / checked_pow(q, split).expect("bounded by total");
        out.par_chunks_mut(chunk).enumerate().for_each(|(prefix, slot)| {
            let symbols = crate::enumerate::decode(prefix, q, split);
            let mut cursor = self.root_cursor();
            for &x in &symbols {
                cursor = self.extend_cursor(&cursor, x);
                if cursor.prob() <= 0.0 {
                    return;
                }
            }
            self.block_dfs(&cursor, len - split, slot);
        });
        Ok(out)
    }
}

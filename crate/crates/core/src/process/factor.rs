//! Sliding-block factors of i.i.d. and Markov processes.
//!
//! The hidden state at time `t` is the block `x_{t+l-W+1} .. x_{t+l}` of the
//! base process, with `W = max(2l + 1, k)`; it evolves as a Markov chain on
//! `|X|^W` states and the output symbol is the code applied to its last
//! `2l + 1` symbols.

use rayon::prelude::*;

use super::{ProcessModel, MarkovModel};
use crate::coding::SlidingBlockCode;
use crate::enumerate::{checked_pow, decode, EnumerationCap};
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct FactorModel {
    base: Box<ProcessModel>,
    code: SlidingBlockCode,
    chain: LiftedChain,
}

#[derive(Debug, Clone)]
pub(crate) struct LiftedChain {
    q: usize,
    wrap: usize,
    initial: Vec<f64>,
    trans: Vec<f64>,
    emission: Vec<usize>,
}

impl FactorModel {
    pub fn new(base: ProcessModel, code: SlidingBlockCode, cap: EnumerationCap) -> Result<Self> {
        if !crate::coding::same_alphabet(base.alphabet(), code.input()) {
            return Err(Error::AlphabetMismatch(
                "factor: code input alphabet differs from the base alphabet".into(),
            ));
        }
        let q = base.alphabet().size();
        let chain = match &base {
            ProcessModel::Iid(m) => {
                let width = code.width();
                let states = cap.check_pow(q, width)?;
                let initial = (0..states)
                    .map(|s| m.log_prob(&decode(s, q, width)).exp2())
                    .collect();
                let trans = (0..states).flat_map(|_| m.probs().iter().copied()).collect();
                LiftedChain::new(q, states, initial, trans, &code)
            }
            ProcessModel::Markov(m) => Self::lift_markov(m, &code, cap)?,
            _ => {
                return Err(Error::InvalidModel(
                    "factor: base must be an iid or markov model".into(),
                ))
            }
        };
        Ok(FactorModel {
            base: Box::new(base),
            code,
            chain,
        })
    }

    fn lift_markov(m: &MarkovModel, code: &SlidingBlockCode, cap: EnumerationCap) -> Result<LiftedChain> {
        let q = m.alphabet().size();
        let width = code.width().max(m.order());
        let states = cap.check_pow(q, width)?;
        let ctx_mod = m.context_count();
        let initial = (0..states)
            .map(|s| m.log_prob(&decode(s, q, width)).exp2())
            .collect();
        let mut trans = Vec::with_capacity(states * q);
        for s in 0..states {
            let ctx = s % ctx_mod;
            trans.extend((0..q).map(|x| m.transition(ctx, x)));
        }
        Ok(LiftedChain::new(q, states, initial, trans, code))
    }

    pub fn base(&self) -> &ProcessModel {
        &self.base
    }

    pub fn code(&self) -> &SlidingBlockCode {
        &self.code
    }

    pub(crate) fn chain(&self) -> &LiftedChain {
        &self.chain
    }

    pub(crate) fn log_prob(&self, symbols: &[usize]) -> f64 {
        self.chain.forward_log_prob(symbols)
    }

    /// Exact bounds `H(Y_{k+1} | Y^k, S_1) <= H(Y) <= H(Y_{k+1} | Y^k)`
    /// where `S_1` is the hidden block at time 1.
    pub(crate) fn entropy_bracket(&self, order: usize, cap: EnumerationCap) -> Result<(f64, f64)> {
        let outputs = self.code.output().size();
        let blocks = cap.check_pow(outputs, order + 1)?;
        cap.check(blocks.saturating_mul(self.chain.states()))?;
        let upper = conditional_from_blocks(&self.chain.block_probs(&self.chain.initial, order + 1, outputs), outputs);
        let lower: f64 = (0..self.chain.states())
            .into_par_iter()
            .filter(|&s| self.chain.initial[s] > 0.0)
            .map(|s| {
                let mut start = vec![0.0; self.chain.states()];
                start[s] = 1.0;
                let probs = self.chain.block_probs(&start, order + 1, outputs);
                self.chain.initial[s] * conditional_from_blocks(&probs, outputs)
            })
            .collect::<Vec<f64>>()
            .iter()
            .sum();
        Ok((lower.min(upper), upper))
    }
}

/// `H(Z_L | Z^(L-1))` from the joint law of `Z^L` (last symbol least significant).
pub(crate) fn conditional_from_blocks(probs: &[f64], q: usize) -> f64 {
    probs
        .chunks(q)
        .map(|group| {
            let marginal: f64 = group.iter().sum();
            group
                .iter()
                .filter(|&&p| p > 0.0)
                .map(|&p| p * (marginal / p).log2())
                .sum::<f64>()
        })
        .sum::<f64>()
        .max(0.0)
}

impl LiftedChain {
    fn new(q: usize, states: usize, initial: Vec<f64>, trans: Vec<f64>, code: &SlidingBlockCode) -> Self {
        let window = checked_pow(q, code.width()).expect("table size already validated");
        let emission = (0..states).map(|s| code.lookup(s % window)).collect();
        LiftedChain {
            q,
            wrap: states / q,
            initial,
            trans,
            emission,
        }
    }

    pub(crate) fn states(&self) -> usize {
        self.initial.len()
    }

    pub(crate) fn initial(&self) -> &[f64] {
        &self.initial
    }

    pub(crate) fn emission(&self) -> &[usize] {
        &self.emission
    }

    /// `next[s'] = sum_s alpha[s] P(s -> s')`.
    pub(crate) fn propagate(&self, alpha: &[f64], next: &mut [f64]) {
        next.iter_mut().for_each(|v| *v = 0.0);
        for (s, &a) in alpha.iter().enumerate() {
            if a == 0.0 {
                continue;
            }
            let base = (s % self.wrap) * self.q;
            for x in 0..self.q {
                next[base + x] += a * self.trans[s * self.q + x];
            }
        }
    }

    /// Scaled forward recursion in log2 space.
    fn forward_log_prob(&self, ys: &[usize]) -> f64 {
        let mut pred = self.initial.clone();
        let mut alpha = vec![0.0; pred.len()];
        let mut log_p = 0.0;
        for (t, &y) in ys.iter().enumerate() {
            let mut mass = 0.0;
            for ((a, &p), &e) in alpha.iter_mut().zip(&pred).zip(&self.emission) {
                *a = if e == y { p } else { 0.0 };
                mass += *a;
            }
            if mass <= 0.0 {
                return f64::NEG_INFINITY;
            }
            log_p += mass.log2();
            let inv = 1.0 / mass;
            alpha.iter_mut().for_each(|a| *a *= inv);
            if t + 1 < ys.len() {
                self.propagate(&alpha, &mut pred);
            }
        }
        log_p
    }

    /// Probabilities of all output blocks of length `len` when the hidden
    /// state at time 1 has (unnormalized) law `start`.
    pub(crate) fn block_probs(&self, start: &[f64], len: usize, outputs: usize) -> Vec<f64> {
        let total = checked_pow(outputs, len).expect("caller checked the cap");
        let mut out = vec![0.0; total];
        self.block_dfs(start, len, outputs, &mut out);
        out
    }

    fn block_dfs(&self, pred: &[f64], len: usize, outputs: usize, out: &mut [f64]) {
        if len == 0 {
            out[0] = pred.iter().sum();
            return;
        }
        let sub = out.len() / outputs;
        let mut alpha = vec![0.0; pred.len()];
        let mut next = vec![0.0; pred.len()];
        for y in 0..outputs {
            let mut mass = 0.0;
            for ((a, &p), &e) in alpha.iter_mut().zip(pred).zip(&self.emission) {
                *a = if e == y { p } else { 0.0 };
                mass += *a;
            }
            if mass <= 0.0 {
                continue;
            }
            let chunk = &mut out[y * sub..(y + 1) * sub];
            if len == 1 {
                chunk[0] = mass;
            } else {
                self.propagate(&alpha, &mut next);
                self.block_dfs(&next, len - 1, outputs, chunk);
            }
        }
    }
}

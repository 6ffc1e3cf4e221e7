use std::sync::Arc;

use petgraph::algo::kosaraju_scc;
use petgraph::graph::{DiGraph, NodeIndex};
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;

use super::{entropy_of, validate_distribution, Alphabet};
use crate::enumerate::{checked_pow, decode_into, encode};
use crate::error::{Error, Result};

const STATIONARY_TOL: f64 = 1e-12;
const FIXED_POINT_TOL: f64 = 1e-10;
const MAX_POWER_ITERATIONS: usize = 5_000_000;

/// Stationary order-k Markov chain.
///
/// Contexts `x_1 .. x_k` are indexed base |X| with `x_1` most significant;
/// `kernel[c * |X| + x]` is `P(x | c)` and `initial[c]` the stationary
/// probability of context `c`.
#[derive(Debug, Clone)]
pub struct MarkovModel {
    alphabet: Arc<Alphabet>,
    order: usize,
    kernel: Vec<f64>,
    initial: Vec<f64>,
    // prefix_marginals[j][p] = P(x_1^j = p) for j = 0..=order
    prefix_marginals: Vec<Vec<f64>>,
}

impl MarkovModel {
    /// Builds the chain and solves for its stationary distribution.
    ///
    /// The context graph must have exactly one closed communicating class and
    /// that class must be aperiodic; transient contexts are allowed and get
    /// stationary mass zero.
    pub fn new(alphabet: Arc<Alphabet>, order: usize, rows: Vec<Vec<f64>>) -> Result<Self> {
        let kernel = Self::validate_rows(&alphabet, order, rows)?;
        check_unichain_aperiodic(alphabet.size(), order, &kernel)?;
        let initial = stationary_distribution(alphabet.size(), order, &kernel)?;
        Ok(Self::assemble(alphabet, order, kernel, initial))
    }

    /// Builds the chain with a caller-supplied stationary distribution, which
    /// must satisfy the fixed-point equation within 1e-10.
    pub fn with_initial(
        alphabet: Arc<Alphabet>,
        order: usize,
        rows: Vec<Vec<f64>>,
        initial: Vec<f64>,
    ) -> Result<Self> {
        let kernel = Self::validate_rows(&alphabet, order, rows)?;
        check_unichain_aperiodic(alphabet.size(), order, &kernel)?;
        if initial.len() != kernel.len() / alphabet.size() {
            return Err(Error::InvalidModel(format!(
                "markov: initial distribution has {} entries, expected {}",
                initial.len(),
                kernel.len() / alphabet.size()
            )));
        }
        validate_distribution(&initial, "markov initial distribution")?;
        let residual = fixed_point_residual(alphabet.size(), order, &kernel, &initial);
        if residual > FIXED_POINT_TOL {
            return Err(Error::InvalidModel(format!(
                "markov: initial distribution is not stationary (residual {residual:e})"
            )));
        }
        Ok(Self::assemble(alphabet, order, kernel, initial))
    }

    /// Symmetric binary chain that flips state with probability `flip`.
    pub fn symmetric_binary(flip: f64) -> Result<Self> {
        MarkovModel::new(
            Alphabet::binary().shared(),
            1,
            vec![vec![1.0 - flip, flip], vec![flip, 1.0 - flip]],
        )
    }

    fn validate_rows(alphabet: &Alphabet, order: usize, rows: Vec<Vec<f64>>) -> Result<Vec<f64>> {
        if order == 0 {
            return Err(Error::InvalidModel("markov: order must be at least 1".into()));
        }
        let q = alphabet.size();
        let contexts = checked_pow(q, order)
            .filter(|&c| c <= crate::DEFAULT_CAP as usize)
            .ok_or_else(|| Error::InvalidModel(format!("markov: {q}^{order} contexts is too many")))?;
        if rows.len() != contexts {
            return Err(Error::InvalidModel(format!(
                "markov: kernel has {} rows, expected {contexts}",
                rows.len()
            )));
        }
        let mut kernel = Vec::with_capacity(contexts * q);
        for (c, row) in rows.into_iter().enumerate() {
            if row.len() != q {
                return Err(Error::InvalidModel(format!(
                    "markov: kernel row {c} has {} entries, expected {q}",
                    row.len()
                )));
            }
            validate_distribution(&row, &format!("markov kernel row {c}"))?;
            kernel.extend(row);
        }
        Ok(kernel)
    }

    fn assemble(alphabet: Arc<Alphabet>, order: usize, kernel: Vec<f64>, initial: Vec<f64>) -> Self {
        let q = alphabet.size();
        let mut prefix_marginals = vec![Vec::new(); order + 1];
        prefix_marginals[order] = initial.clone();
        for j in (0..order).rev() {
            prefix_marginals[j] = prefix_marginals[j + 1]
                .chunks(q)
                .map(|c| c.iter().sum())
                .collect();
        }
        MarkovModel {
            alphabet,
            order,
            kernel,
            initial,
            prefix_marginals,
        }
    }

    pub fn alphabet(&self) -> &Arc<Alphabet> {
        &self.alphabet
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn initial(&self) -> &[f64] {
        &self.initial
    }

    pub fn kernel_row(&self, context: usize) -> &[f64] {
        let q = self.alphabet.size();
        &self.kernel[context * q..(context + 1) * q]
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.kernel.chunks(self.alphabet.size()).map(<[f64]>::to_vec).collect()
    }

    pub(crate) fn transition(&self, context: usize, symbol: usize) -> f64 {
        self.kernel[context * self.alphabet.size() + symbol]
    }

    pub(crate) fn prefix_marginal(&self, len: usize, prefix: usize) -> f64 {
        self.prefix_marginals[len][prefix]
    }

    pub(crate) fn context_count(&self) -> usize {
        self.initial.len()
    }

    pub(crate) fn log_prob(&self, symbols: &[usize]) -> f64 {
        let q = self.alphabet.size();
        let k = self.order;
        if symbols.len() <= k {
            return self.prefix_marginals[symbols.len()][encode(symbols, q)].log2();
        }
        let wrap = self.context_count() / q;
        let mut context = encode(&symbols[..k], q);
        let mut acc = self.initial[context].log2();
        for &x in &symbols[k..] {
            acc += self.transition(context, x).log2();
            if acc == f64::NEG_INFINITY {
                return acc;
            }
            context = (context % wrap) * q + x;
        }
        acc
    }

    /// `sum_c pi(c) H(P(. | c))`.
    pub fn entropy_rate(&self) -> f64 {
        self.initial
            .iter()
            .enumerate()
            .filter(|(_, &p)| p > 0.0)
            .map(|(c, &p)| p * entropy_of(self.kernel_row(c)))
            .sum()
    }

    pub(crate) fn sample_into<R: Rng + ?Sized>(&self, rng: &mut R, n: usize, out: &mut Vec<usize>) {
        let q = self.alphabet.size();
        let k = self.order;
        let start = WeightedIndex::new(&self.initial).expect("validated distribution");
        let rows: Vec<WeightedIndex<f64>> = self
            .kernel
            .chunks(q)
            .map(|row| WeightedIndex::new(row).expect("validated row"))
            .collect();
        let mut context = start.sample(rng);
        let mut head = vec![0; k];
        decode_into(context, q, &mut head);
        let base = out.len();
        out.extend(head);
        let wrap = self.context_count() / q;
        while out.len() - base < n {
            let x = rows[context].sample(rng);
            out.push(x);
            context = (context % wrap) * q + x;
        }
        out.truncate(base + n);
    }
}

fn successor(context: usize, symbol: usize, q: usize, wrap: usize) -> usize {
    (context % wrap) * q + symbol
}

fn check_unichain_aperiodic(q: usize, order: usize, kernel: &[f64]) -> Result<()> {
    let contexts = kernel.len() / q;
    let wrap = contexts / q;
    let mut graph = DiGraph::<(), ()>::with_capacity(contexts, kernel.len());
    let nodes: Vec<NodeIndex> = (0..contexts).map(|_| graph.add_node(())).collect();
    for c in 0..contexts {
        for x in 0..q {
            if kernel[c * q + x] > 0.0 {
                graph.add_edge(nodes[c], nodes[successor(c, x, q, wrap)], ());
            }
        }
    }
    let sccs = kosaraju_scc(&graph);
    let mut component = vec![0usize; contexts];
    for (i, scc) in sccs.iter().enumerate() {
        for n in scc {
            component[n.index()] = i;
        }
    }
    let closed: Vec<usize> = (0..sccs.len())
        .filter(|&i| {
            sccs[i].iter().all(|n| {
                graph
                    .neighbors(*n)
                    .all(|m| component[m.index()] == i)
            })
        })
        .collect();
    if closed.len() != 1 {
        return Err(Error::InvalidModel(format!(
            "markov: kernel of order {order} is not irreducible ({} closed classes)",
            closed.len()
        )));
    }
    // Period of the closed class via BFS levels.
    let class = closed[0];
    let root = sccs[class][0];
    let mut level = vec![usize::MAX; contexts];
    level[root.index()] = 0;
    let mut queue = std::collections::VecDeque::from([root]);
    let mut period = 0usize;
    while let Some(u) = queue.pop_front() {
        for v in graph.neighbors(u) {
            if level[v.index()] == usize::MAX {
                level[v.index()] = level[u.index()] + 1;
                queue.push_back(v);
            } else {
                let diff = (level[u.index()] + 1).abs_diff(level[v.index()]);
                period = gcd(period, diff);
            }
        }
    }
    if period != 1 {
        return Err(Error::InvalidModel(format!(
            "markov: recurrent class has period {period}; an aperiodic kernel is required"
        )));
    }
    Ok(())
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn step(q: usize, kernel: &[f64], from: &[f64], to: &mut [f64]) {
    let wrap = from.len() / q;
    to.iter_mut().for_each(|v| *v = 0.0);
    for (c, &p) in from.iter().enumerate() {
        if p == 0.0 {
            continue;
        }
        for x in 0..q {
            to[successor(c, x, q, wrap)] += p * kernel[c * q + x];
        }
    }
}

fn fixed_point_residual(q: usize, _order: usize, kernel: &[f64], pi: &[f64]) -> f64 {
    let mut next = vec![0.0; pi.len()];
    step(q, kernel, pi, &mut next);
    next.iter().zip(pi).map(|(a, b)| (a - b).abs()).sum()
}

/// Lazy power iteration `pi <- (pi + pi P) / 2` from the uniform distribution.
fn stationary_distribution(q: usize, order: usize, kernel: &[f64]) -> Result<Vec<f64>> {
    let contexts = kernel.len() / q;
    let mut pi = vec![1.0 / contexts as f64; contexts];
    let mut moved = vec![0.0; contexts];
    for _ in 0..MAX_POWER_ITERATIONS {
        step(q, kernel, &pi, &mut moved);
        let mut delta = 0.0;
        for (p, m) in pi.iter_mut().zip(&moved) {
            let next = 0.5 * (*p + m);
            delta += (next - *p).abs();
            *p = next;
        }
        if delta < STATIONARY_TOL {
            let total: f64 = pi.iter().sum();
            pi.iter_mut().for_each(|p| *p /= total);
            let residual = fixed_point_residual(q, order, kernel, &pi);
            if residual > FIXED_POINT_TOL {
                break;
            }
            return Ok(pi);
        }
    }
    Err(Error::InvalidModel(
        "markov: power iteration for the stationary distribution did not converge".into(),
    ))
}

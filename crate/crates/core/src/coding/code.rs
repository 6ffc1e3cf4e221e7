use std::sync::Arc;

use crate::enumerate::{checked_pow, decode};
use crate::error::{Error, Result};
use crate::process::{Alphabet, SamplePath};

/// Largest window table a code may carry.
const MAX_TABLE: usize = 1 << 22;

/// Finite-window stationary coding `y_i = f(x_{i-l} .. x_{i+l})`.
///
/// `table` is indexed by the window read as a base-|X| number with
/// `x_{i-l}` most significant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SlidingBlockCode {
    input: Arc<Alphabet>,
    output: Arc<Alphabet>,
    radius: usize,
    table: Vec<usize>,
}

/// How `apply` treats the ends of a finite path.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum BoundaryPolicy {
    /// Emit only the `n - 2l` outputs whose windows lie inside the path.
    #[default]
    Truncate,
    /// Extend the path with caller-supplied symbols (`l` on each side) so the
    /// output has the same length as the input.
    Exact { left: Vec<usize>, right: Vec<usize> },
}

impl SlidingBlockCode {
    pub fn new(
        input: Arc<Alphabet>,
        output: Arc<Alphabet>,
        radius: usize,
        table: Vec<usize>,
    ) -> Result<Self> {
        let expected = checked_pow(input.size(), 2 * radius + 1)
            .filter(|&n| n <= MAX_TABLE)
            .ok_or_else(|| Error::InvalidCode(format!("window table for radius {radius} is too large")))?;
        if table.len() != expected {
            return Err(Error::InvalidCode(format!(
                "table has {} entries, expected {expected}",
                table.len()
            )));
        }
        if let Some(&bad) = table.iter().find(|&&y| y >= output.size()) {
            return Err(Error::InvalidCode(format!(
                "table maps to symbol {bad} outside output alphabet of size {}",
                output.size()
            )));
        }
        Ok(SlidingBlockCode {
            input,
            output,
            radius,
            table,
        })
    }

    /// Tabulates `f` over every window.
    pub fn from_fn(
        input: Arc<Alphabet>,
        output: Arc<Alphabet>,
        radius: usize,
        mut f: impl FnMut(&[usize]) -> usize,
    ) -> Result<Self> {
        let width = 2 * radius + 1;
        let count = checked_pow(input.size(), width)
            .filter(|&n| n <= MAX_TABLE)
            .ok_or_else(|| Error::InvalidCode(format!("window table for radius {radius} is too large")))?;
        let table = (0..count).map(|w| f(&decode(w, input.size(), width))).collect();
        SlidingBlockCode::new(input, output, radius, table)
    }

    pub fn identity(alphabet: Arc<Alphabet>) -> Self {
        let table = (0..alphabet.size()).collect();
        SlidingBlockCode {
            input: alphabet.clone(),
            output: alphabet,
            radius: 0,
            table,
        }
    }

    /// Radius-0 relabeling `x -> perm[x]`.
    pub fn permutation(alphabet: Arc<Alphabet>, perm: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; alphabet.size()];
        for &p in &perm {
            if p >= seen.len() || std::mem::replace(&mut seen[p], true) {
                return Err(Error::InvalidCode(format!("{perm:?} is not a permutation")));
            }
        }
        SlidingBlockCode::new(alphabet.clone(), alphabet, 0, perm)
    }

    /// Binary bit flip.
    pub fn bit_flip() -> Self {
        SlidingBlockCode::permutation(Alphabet::binary().shared(), vec![1, 0]).expect("valid permutation")
    }

    pub fn constant(input: Arc<Alphabet>, output: Arc<Alphabet>, radius: usize, symbol: usize) -> Result<Self> {
        SlidingBlockCode::from_fn(input, output, radius, |_| symbol)
    }

    /// Binary parity of the `2l + 1` window; `xor(1)` is the XOR-3 map.
    pub fn xor(radius: usize) -> Self {
        let bin = Alphabet::binary().shared();
        SlidingBlockCode::from_fn(bin.clone(), bin, radius, |w| w.iter().sum::<usize>() % 2)
            .expect("binary xor table")
    }

    /// Binary majority of the `2l + 1` window.
    pub fn majority(radius: usize) -> Self {
        let bin = Alphabet::binary().shared();
        SlidingBlockCode::from_fn(bin.clone(), bin, radius, |w| {
            usize::from(2 * w.iter().sum::<usize>() > w.len())
        })
        .expect("binary majority table")
    }

    pub fn input(&self) -> &Arc<Alphabet> {
        &self.input
    }

    pub fn output(&self) -> &Arc<Alphabet> {
        &self.output
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn width(&self) -> usize {
        2 * self.radius + 1
    }

    pub fn table(&self) -> &[usize] {
        &self.table
    }

    /// Output for a window given by its index.
    pub fn lookup(&self, window_index: usize) -> usize {
        self.table[window_index]
    }

    pub fn eval(&self, window: &[usize]) -> usize {
        debug_assert_eq!(window.len(), self.width());
        self.table[crate::enumerate::encode(window, self.input.size())]
    }

    /// Block application on raw symbols: output length `n - 2l` (empty when
    /// the input is shorter than one window).
    pub fn apply_symbols(&self, symbols: &[usize]) -> Vec<usize> {
        let width = self.width();
        if symbols.len() < width {
            return Vec::new();
        }
        let q = self.input.size();
        let wrap = self.table.len() / q;
        let mut idx = crate::enumerate::encode(&symbols[..width - 1], q);
        let mut out = Vec::with_capacity(symbols.len() + 1 - width);
        for &x in &symbols[width - 1..] {
            idx = (idx % wrap) * q + x;
            out.push(self.table[idx]);
        }
        out
    }

    /// Applies the code to a path under a boundary policy.
    pub fn apply(&self, path: &SamplePath, policy: &BoundaryPolicy) -> Result<SamplePath> {
        if !same_alphabet(path.alphabet(), &self.input) {
            return Err(Error::AlphabetMismatch(
                "path alphabet differs from the code's input alphabet".into(),
            ));
        }
        let symbols = match policy {
            BoundaryPolicy::Truncate => {
                if path.len() < self.width() {
                    return Err(Error::PathTooShort {
                        needed: self.width(),
                        got: path.len(),
                    });
                }
                self.apply_symbols(path.symbols())
            }
            BoundaryPolicy::Exact { left, right } => {
                if left.len() != self.radius || right.len() != self.radius {
                    return Err(Error::OutOfRange(format!(
                        "exact boundary policy needs {} symbols on each side",
                        self.radius
                    )));
                }
                if left.iter().chain(right).any(|&s| s >= self.input.size()) {
                    return Err(Error::AlphabetMismatch("boundary symbol outside alphabet".into()));
                }
                let mut extended = Vec::with_capacity(path.len() + 2 * self.radius);
                extended.extend_from_slice(left);
                extended.extend_from_slice(path.symbols());
                extended.extend_from_slice(right);
                self.apply_symbols(&extended)
            }
        };
        SamplePath::new(self.output.clone(), symbols)
    }

    /// `other ∘ self`: the code of radius `l_self + l_other` that applies
    /// `self` then `other`.
    pub fn then(&self, other: &SlidingBlockCode) -> Result<SlidingBlockCode> {
        if !same_alphabet(&self.output, &other.input) {
            return Err(Error::AlphabetMismatch("composed codes do not chain".into()));
        }
        let radius = self.radius + other.radius;
        SlidingBlockCode::from_fn(self.input.clone(), other.output.clone(), radius, |w| {
            other.apply_symbols(&self.apply_symbols(w))[0]
        })
    }
}

/// Alphabet equality with a pointer fast path.
pub(crate) fn same_alphabet(a: &Arc<Alphabet>, b: &Arc<Alphabet>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

/// Forward/backward code pair `(phi, psi)` between two alphabets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CodePair {
    forward: SlidingBlockCode,
    backward: SlidingBlockCode,
}

impl CodePair {
    pub fn new(forward: SlidingBlockCode, backward: SlidingBlockCode) -> Result<Self> {
        if !same_alphabet(forward.output(), backward.input())
            || !same_alphabet(forward.input(), backward.output())
        {
            return Err(Error::AlphabetMismatch(
                "forward output must equal backward input and vice versa".into(),
            ));
        }
        Ok(CodePair { forward, backward })
    }

    /// Pair of mutually inverse radius-0 relabelings.
    pub fn permutation(alphabet: Arc<Alphabet>, perm: Vec<usize>) -> Result<Self> {
        let mut inverse = vec![0; perm.len()];
        for (i, &p) in perm.iter().enumerate() {
            if p < inverse.len() {
                inverse[p] = i;
            }
        }
        let forward = SlidingBlockCode::permutation(alphabet.clone(), perm)?;
        let backward = SlidingBlockCode::permutation(alphabet, inverse)?;
        CodePair::new(forward, backward)
    }

    pub fn identity(alphabet: Arc<Alphabet>) -> Self {
        let id = SlidingBlockCode::identity(alphabet);
        CodePair {
            forward: id.clone(),
            backward: id,
        }
    }

    pub fn forward(&self) -> &SlidingBlockCode {
        &self.forward
    }

    pub fn backward(&self) -> &SlidingBlockCode {
        &self.backward
    }

    /// Total radius of `backward ∘ forward`.
    pub fn round_trip_radius(&self) -> usize {
        self.forward.radius + self.backward.radius
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path(text: &str) -> SamplePath {
        SamplePath::from_labels(Alphabet::binary().shared(), text).unwrap()
    }

    #[test]
    fn identity_and_flip() {
        let p = path("0110");
        let id = SlidingBlockCode::identity(Alphabet::binary().shared());
        assert_eq!(id.apply(&p, &BoundaryPolicy::Truncate).unwrap().to_labels(), "0110");
        let flip = SlidingBlockCode::bit_flip();
        assert_eq!(flip.apply(&p, &BoundaryPolicy::Truncate).unwrap().to_labels(), "1001");
    }

    #[test]
    fn xor3_on_01101() {
        // windows 011, 110, 101
        let xor3 = SlidingBlockCode::xor(1);
        let out = xor3.apply(&path("01101"), &BoundaryPolicy::Truncate).unwrap();
        assert_eq!(out.to_labels(), "000");
        // direct table oracle
        let direct: Vec<usize> = [[0, 1, 1], [1, 1, 0], [1, 0, 1]]
            .iter()
            .map(|w| xor3.table()[w[0] * 4 + w[1] * 2 + w[2]])
            .collect();
        assert_eq!(out.symbols(), direct.as_slice());
    }

    #[test]
    fn truncate_needs_a_full_window() {
        let xor3 = SlidingBlockCode::xor(1);
        assert!(matches!(
            xor3.apply(&path("01"), &BoundaryPolicy::Truncate),
            Err(Error::PathTooShort { needed: 3, got: 2 })
        ));
    }

    #[test]
    fn exact_policy_keeps_length() {
        let xor3 = SlidingBlockCode::xor(1);
        let out = xor3
            .apply(
                &path("0110"),
                &BoundaryPolicy::Exact {
                    left: vec![1],
                    right: vec![0],
                },
            )
            .unwrap();
        // extended 1 0110 0 -> windows 101,011,110,100
        assert_eq!(out.to_labels(), "0001");
        assert!(xor3
            .apply(&path("0110"), &BoundaryPolicy::Exact { left: vec![], right: vec![] })
            .is_err());
    }

    #[test]
    fn composition_matches_sequential_application() {
        let xor3 = SlidingBlockCode::xor(1);
        let maj = SlidingBlockCode::majority(1);
        let both = xor3.then(&maj).unwrap();
        assert_eq!(both.radius(), 2);
        let p = path("0110100111010");
        let seq = maj.apply_symbols(&xor3.apply_symbols(p.symbols()));
        assert_eq!(both.apply_symbols(p.symbols()), seq);
    }

    #[test]
    fn code_pair_alphabets_must_chain() {
        let tern = Alphabet::numeric(3).unwrap().shared();
        let bin = Alphabet::binary().shared();
        let f = SlidingBlockCode::constant(tern.clone(), bin.clone(), 0, 0).unwrap();
        let g = SlidingBlockCode::constant(bin, tern.clone(), 0, 0).unwrap();
        assert!(CodePair::new(f.clone(), g).is_ok());
        assert!(CodePair::new(f.clone(), f).is_err());
        assert!(CodePair::permutation(tern, vec![0, 0, 1]).is_err());
    }
}

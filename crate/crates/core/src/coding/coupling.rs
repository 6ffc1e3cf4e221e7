use rayon::prelude::*;

use super::{same_alphabet, SlidingBlockCode};
use crate::enumerate::{decode, encode, EnumerationCap};
use crate::error::{Error, Result};
use crate::process::ProcessModel;

/// Exact joint law of `(X_{-m}^m, Y_{-n}^n)` induced by a process and a code.
///
/// `Y` is the image of `X` under the target code; `f`, the approximating code
/// of radius `l`, fixes `m = n + l`. When the target is `f` itself the joint
/// law sits on the graph of the block map `x -> f_{-n}^n(x)`.
#[derive(Debug, Clone)]
pub struct Coupling {
    n: usize,
    m: usize,
    x_size: usize,
    y_size: usize,
    x_law: Vec<f64>,
    y_law: Vec<f64>,
    // (x block, y block, probability), sorted by x then y, positive mass only
    joint: Vec<(usize, usize, f64)>,
    // f-block image of every x block, as a Y^N index
    approx_image: Vec<usize>,
    epsilon: f64,
}

impl Coupling {
    /// Coupling where the target process is the exact image `f(X)`
    /// (mismatch rate 0).
    pub fn exact_image(model: &ProcessModel, code: &SlidingBlockCode, n: usize, cap: EnumerationCap) -> Result<Self> {
        Self::build(model, code, None, n, cap)
    }

    /// Coupling where `Y = g(X)` for a reference code `g` and `code`
    /// approximates it with mismatch rate `epsilon`.
    pub fn with_reference(
        model: &ProcessModel,
        code: &SlidingBlockCode,
        reference: &SlidingBlockCode,
        n: usize,
        cap: EnumerationCap,
    ) -> Result<Self> {
        Self::build(model, code, Some(reference), n, cap)
    }

    fn build(
        model: &ProcessModel,
        code: &SlidingBlockCode,
        reference: Option<&SlidingBlockCode>,
        n: usize,
        cap: EnumerationCap,
    ) -> Result<Self> {
        if !same_alphabet(model.alphabet(), code.input()) {
            return Err(Error::AlphabetMismatch("model alphabet differs from the code input".into()));
        }
        let target = reference.unwrap_or(code);
        if !same_alphabet(code.input(), target.input()) || !same_alphabet(code.output(), target.output()) {
            return Err(Error::AlphabetMismatch("reference code alphabets differ".into()));
        }
        let q = model.alphabet().size();
        let y_size = code.output().size();
        let m = n + code.radius();
        let big_m = 2 * m + 1;
        let big_n = 2 * n + 1;
        let outer = n + code.radius().max(target.radius());
        let big_r = 2 * outer + 1;
        cap.check_pow(y_size, big_n)?;
        let x_law = model.block_distribution(big_m, cap)?;
        let outer_law = if big_r == big_m {
            x_law.clone()
        } else {
            model.block_distribution(big_r, cap)?
        };

        let approx_image: Vec<usize> = (0..x_law.len())
            .into_par_iter()
            .map(|xi| encode(&code.apply_symbols(&decode(xi, q, big_m)), y_size))
            .collect();

        // y_{-n} sits at offset outer - n of the outer block; the target's
        // output index i corresponds to input position i + l_target.
        let x_offset = outer - m;
        let y_offset = outer - n - target.radius();
        let mut joint: Vec<(usize, usize, f64)> = outer_law
            .par_iter()
            .enumerate()
            .filter(|(_, &p)| p > 0.0)
            .map(|(wi, &p)| {
                let w = decode(wi, q, big_r);
                let x = encode(&w[x_offset..x_offset + big_m], q);
                let image = target.apply_symbols(&w);
                let y = encode(&image[y_offset..y_offset + big_n], y_size);
                (x, y, p)
            })
            .collect();
        joint.sort_by_key(|a| (a.0, a.1));
        joint.dedup_by(|later, earlier| {
            if later.0 == earlier.0 && later.1 == earlier.1 {
                earlier.2 += later.2;
                true
            } else {
                false
            }
        });

        let mut y_law = vec![0.0; crate::enumerate::checked_pow(y_size, big_n).expect("checked")];
        for &(_, y, p) in &joint {
            y_law[y] += p;
        }
        let epsilon = match reference {
            None => 0.0,
            Some(g) => super::mismatch_rate(code, g, model, super::MismatchMethod::Exact { cap })?,
        };
        Ok(Coupling {
            n,
            m,
            x_size: q,
            y_size,
            x_law,
            y_law,
            joint,
            approx_image,
            epsilon,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// `M = 2m + 1`.
    pub fn x_block_len(&self) -> usize {
        2 * self.m + 1
    }

    /// `N = 2n + 1`.
    pub fn y_block_len(&self) -> usize {
        2 * self.n + 1
    }

    pub fn x_alphabet_size(&self) -> usize {
        self.x_size
    }

    pub fn y_alphabet_size(&self) -> usize {
        self.y_size
    }

    /// `P_X` on `X^M`.
    pub fn x_law(&self) -> &[f64] {
        &self.x_law
    }

    /// `P_Y` on `Y^N`, the Y-marginal of the joint law.
    pub fn y_law(&self) -> &[f64] {
        &self.y_law
    }

    /// Positive-mass entries `(x, y, P(x, y))`.
    pub fn joint(&self) -> &[(usize, usize, f64)] {
        &self.joint
    }

    /// Total joint mass.
    pub fn total_mass(&self) -> f64 {
        self.joint.iter().map(|e| e.2).sum()
    }

    /// X-marginal of the joint law.
    pub fn x_marginal(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.x_law.len()];
        for &(x, _, p) in &self.joint {
            out[x] += p;
        }
        out
    }

    /// `f_{-n}^n(x)` as a `Y^N` index.
    pub fn approx_image(&self, x: usize) -> usize {
        self.approx_image[x]
    }

    /// Exact mismatch rate `Pr(Y_0 != f(X_{-l}^l))`.
    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// Hamming distance between two `Y^N` indices.
    pub fn y_distance(&self, a: usize, b: usize) -> usize {
        let (mut a, mut b) = (a, b);
        let mut d = 0;
        for _ in 0..self.y_block_len() {
            d += usize::from(a % self.y_size != b % self.y_size);
            a /= self.y_size;
            b /= self.y_size;
        }
        d
    }
}

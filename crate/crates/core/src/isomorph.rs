//! Pasting component isomorphisms of regular mixtures.
//!
//! A regular mixture has components with pairwise distinct entropy rates.
//! Given two regular mixtures whose components match in entropy rate and
//! weight, and a code pair for every matched component, the pasted map
//! classifies a path to a component, then applies that component's code.
//! Classification uses the likelihood of the first `window` symbols, a finite
//! stand-in for the invariant sets that separate the components; its error
//! rate is reported by [`verify_isomorphism`].

use serde_json::{json, Value};

use crate::coding::{same_alphabet, CodePair};
use crate::enumerate::{checked_pow, EnumerationCap};
use crate::error::{Error, Result};
use crate::numfmt::num;
use crate::process::{log_sum_exp2, EntropyRateOptions, ProcessModel, SamplePath};
use crate::spectrum::{dominance_check, mixture_spectrum, Spectrum, StaircaseSpectrum};

/// Minimum entropy-rate separation within a regular mixture.
pub const REGULARITY_GAP: f64 = 1e-6;

/// Tolerance for matching entropy rates and weights across mixtures.
pub const MATCH_TOL: f64 = 1e-9;

/// Most likely component of a path window.
#[derive(Debug, Clone, PartialEq)]
pub struct Classification {
    pub index: usize,
    /// Posterior of `index` given the window.
    pub posterior: f64,
    /// Posterior of every component.
    pub posteriors: Vec<f64>,
}

/// Argmax of `log2 w_theta + log2 P_theta(x_1^window)`, lowest index on ties.
pub fn classify_component(model: &ProcessModel, path: &SamplePath, window: usize) -> Result<Classification> {
    if !same_alphabet(model.alphabet(), path.alphabet()) {
        return Err(Error::AlphabetMismatch("path alphabet differs from the mixture".into()));
    }
    classify_symbols(model, path.symbols(), window)
}

fn classify_symbols(model: &ProcessModel, symbols: &[usize], window: usize) -> Result<Classification> {
    if window == 0 {
        return Err(Error::OutOfRange("classifier window must be positive".into()));
    }
    if symbols.len() < window {
        return Err(Error::PathTooShort {
            needed: window,
            got: symbols.len(),
        });
    }
    let head = &symbols[..window];
    let scores: Vec<f64> = model
        .components()
        .into_iter()
        .map(|(w, c)| if w > 0.0 { w.log2() + c.log_prob_symbols(head) } else { f64::NEG_INFINITY })
        .collect();
    let mut index = 0;
    for (i, &s) in scores.iter().enumerate() {
        if s > scores[index] {
            index = i;
        }
    }
    if scores[index] == f64::NEG_INFINITY {
        return Err(Error::Unclassifiable);
    }
    let total = log_sum_exp2(scores.iter().copied());
    let posteriors: Vec<f64> = scores.iter().map(|&s| (s - total).exp2()).collect();
    Ok(Classification {
        index,
        posterior: posteriors[index],
        posteriors,
    })
}

/// Two regular mixtures with a weight- and entropy-preserving component
/// matching `kappa`.
#[derive(Debug, Clone)]
pub struct RegularMixturePair {
    x: ProcessModel,
    y: ProcessModel,
    x_rates: Vec<f64>,
    y_rates: Vec<f64>,
    kappa: Vec<usize>,
}

impl RegularMixturePair {
    /// Checks regularity of both sides and builds the unique matching. An
    /// ergodic model counts as a one-component mixture.
    pub fn new(x: ProcessModel, y: ProcessModel) -> Result<Self> {
        let x_rates = regular_rates(&x, "source")?;
        let y_rates = regular_rates(&y, "target")?;
        if x_rates.len() != y_rates.len() {
            return Err(Error::Unmatched(format!(
                "{} source components but {} target components",
                x_rates.len(),
                y_rates.len()
            )));
        }
        let xw: Vec<f64> = x.components().iter().map(|c| c.0).collect();
        let yw: Vec<f64> = y.components().iter().map(|c| c.0).collect();
        let mut kappa = Vec::with_capacity(x_rates.len());
        let mut used = vec![false; y_rates.len()];
        for (i, (&h, &w)) in x_rates.iter().zip(&xw).enumerate() {
            let j = (0..y_rates.len())
                .find(|&j| !used[j] && (y_rates[j] - h).abs() <= MATCH_TOL && (yw[j] - w).abs() <= MATCH_TOL)
                .ok_or_else(|| {
                    Error::Unmatched(format!(
                        "no target component with entropy rate {h} and weight {w} for source component {i}"
                    ))
                })?;
            used[j] = true;
            kappa.push(j);
        }
        Ok(RegularMixturePair {
            x,
            y,
            x_rates,
            y_rates,
            kappa,
        })
    }

    pub fn source(&self) -> &ProcessModel {
        &self.x
    }

    pub fn target(&self) -> &ProcessModel {
        &self.y
    }

    pub fn source_rates(&self) -> &[f64] {
        &self.x_rates
    }

    pub fn target_rates(&self) -> &[f64] {
        &self.y_rates
    }

    /// `kappa[theta]` is the target component matched to source `theta`.
    pub fn matching(&self) -> &[usize] {
        &self.kappa
    }

    pub fn len(&self) -> usize {
        self.kappa.len()
    }

    pub fn is_empty(&self) -> bool {
        self.kappa.is_empty()
    }
}

fn regular_rates(model: &ProcessModel, side: &str) -> Result<Vec<f64>> {
    let rates = model
        .components()
        .iter()
        .enumerate()
        .map(|(index, (_, c))| {
            let r = c
                .entropy_rate(EntropyRateOptions::default())
                .map_err(|e| Error::EntropyRateUnavailable { index, reason: e.to_string() })?;
            r.value_within(MATCH_TOL).ok_or_else(|| Error::EntropyRateUnavailable {
                index,
                reason: "entropy rate bracket is too wide to compare".into(),
            })
        })
        .collect::<Result<Vec<f64>>>()?;
    for i in 0..rates.len() {
        for j in i + 1..rates.len() {
            if (rates[i] - rates[j]).abs() <= REGULARITY_GAP {
                return Err(Error::NotRegular(format!(
                    "{side} components {i} and {j} both have entropy rate {}. A mixture of distinct \
                     ergodic components with equal entropy rates has the same spectrum as a single \
                     ergodic process of that rate, yet is not isomorphic to it because one is ergodic \
                     and the other is not, so component-wise pasting does not apply",
                    rates[i]
                )));
            }
        }
    }
    Ok(rates)
}

/// Classifier settings of a [`PastedCode`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassifierConfig {
    /// Number of leading symbols scored.
    pub window: usize,
    /// Output symbol for unclassifiable paths; `None` is the first symbol.
    pub fallback: Option<usize>,
}

impl ClassifierConfig {
    pub fn new(window: usize) -> Self {
        ClassifierConfig { window, fallback: None }
    }
}

/// Per-component code pairs pasted along a component classifier.
#[derive(Debug, Clone)]
pub struct PastedCode {
    pair: RegularMixturePair,
    codes: Vec<CodePair>,
    window: usize,
    fallback: usize,
    inverse_on_support: Vec<bool>,
    cap: EnumerationCap,
}

/// Result of the pasted forward map on one path.
#[derive(Debug, Clone, PartialEq)]
pub struct PastedImage {
    pub symbols: Vec<usize>,
    /// `None` when the path was unclassifiable and the fallback was used.
    pub component: Option<usize>,
}

/// Pastes `codes[theta]` (source component `theta` to target component
/// `kappa[theta]`). Each pair is checked for being an exact inverse on the
/// support of its component by enumerating all round-trip windows.
pub fn paste_codes(pair: RegularMixturePair, codes: Vec<CodePair>, config: ClassifierConfig) -> Result<PastedCode> {
    paste_codes_with_cap(pair, codes, config, EnumerationCap::default())
}

pub fn paste_codes_with_cap(
    pair: RegularMixturePair,
    codes: Vec<CodePair>,
    config: ClassifierConfig,
    cap: EnumerationCap,
) -> Result<PastedCode> {
    if codes.len() != pair.len() {
        return Err(Error::Unmatched(format!(
            "{} code pairs for {} components",
            codes.len(),
            pair.len()
        )));
    }
    if config.window == 0 {
        return Err(Error::OutOfRange("classifier window must be positive".into()));
    }
    for (i, c) in codes.iter().enumerate() {
        if !same_alphabet(c.forward().input(), pair.source().alphabet())
            || !same_alphabet(c.forward().output(), pair.target().alphabet())
        {
            return Err(Error::AlphabetMismatch(format!(
                "code pair {i} does not map the source alphabet to the target alphabet"
            )));
        }
    }
    let out_size = pair.target().alphabet().size();
    let fallback = config.fallback.unwrap_or(0);
    if fallback >= out_size {
        return Err(Error::OutOfRange(format!("fallback symbol {fallback} is not in the target alphabet")));
    }
    let components = pair.source().components();
    let inverse_on_support = codes
        .iter()
        .zip(&components)
        .map(|(c, (_, model))| exact_inverse_on_support(c, model, cap))
        .collect::<Result<Vec<bool>>>()?;
    Ok(PastedCode {
        pair,
        codes,
        window: config.window,
        fallback,
        inverse_on_support,
        cap,
    })
}

fn exact_inverse_on_support(codes: &CodePair, model: &ProcessModel, cap: EnumerationCap) -> Result<bool> {
    let round = codes.forward().then(codes.backward())?;
    let radius = round.radius();
    let width = round.width();
    let q = model.alphabet().size();
    checked_pow(q, width).ok_or_else(|| Error::OutOfRange("round-trip window space overflows".into()))?;
    let support = model.block_distribution(width, cap)?;
    Ok(support.iter().enumerate().all(|(w, &p)| {
        p == 0.0 || {
            let symbols = crate::enumerate::decode(w, q, width);
            round.lookup(w) == symbols[radius]
        }
    }))
}

impl PastedCode {
    pub fn pair(&self) -> &RegularMixturePair {
        &self.pair
    }

    pub fn codes(&self) -> &[CodePair] {
        &self.codes
    }

    pub fn window(&self) -> usize {
        self.window
    }

    pub fn fallback(&self) -> usize {
        self.fallback
    }

    /// Whether pair `theta` is an exact inverse on its component's support.
    pub fn inverse_on_support(&self, theta: usize) -> bool {
        self.inverse_on_support[theta]
    }

    /// Classifies on the first `window` symbols, then applies that
    /// component's forward code (truncating boundary). Unclassifiable paths
    /// map to the constant fallback symbol.
    pub fn forward_symbols(&self, symbols: &[usize]) -> Result<PastedImage> {
        match classify_symbols(self.pair.source(), symbols, self.window) {
            Ok(c) => Ok(PastedImage {
                symbols: self.codes[c.index].forward().apply_symbols(symbols),
                component: Some(c.index),
            }),
            Err(Error::Unclassifiable) => {
                let radius = self.codes.iter().map(|c| c.forward().radius()).max().unwrap_or(0);
                Ok(PastedImage {
                    symbols: vec![self.fallback; symbols.len().saturating_sub(2 * radius)],
                    component: None,
                })
            }
            Err(e) => Err(e),
        }
    }

    /// Inverse direction: classifies the image among the target components
    /// (window capped at the image length) and applies the matched backward
    /// code.
    pub fn backward_symbols(&self, symbols: &[usize]) -> Result<PastedImage> {
        let window = self.window.min(symbols.len());
        match classify_symbols(self.pair.target(), symbols, window) {
            Ok(c) => {
                let theta = self
                    .pair
                    .matching()
                    .iter()
                    .position(|&j| j == c.index)
                    .expect("matching is a bijection");
                Ok(PastedImage {
                    symbols: self.codes[theta].backward().apply_symbols(symbols),
                    component: Some(theta),
                })
            }
            Err(Error::Unclassifiable) => Ok(PastedImage {
                symbols: Vec::new(),
                component: None,
            }),
            Err(e) => Err(e),
        }
    }

    pub fn forward(&self, path: &SamplePath) -> Result<SamplePath> {
        if !same_alphabet(path.alphabet(), self.pair.source().alphabet()) {
            return Err(Error::AlphabetMismatch("path alphabet differs from the source".into()));
        }
        let image = self.forward_symbols(path.symbols())?;
        SamplePath::new(self.pair.target().alphabet().clone(), image.symbols)
    }

    pub fn backward(&self, path: &SamplePath) -> Result<SamplePath> {
        if !same_alphabet(path.alphabet(), self.pair.target().alphabet()) {
            return Err(Error::AlphabetMismatch("path alphabet differs from the target".into()));
        }
        let image = self.backward_symbols(path.symbols())?;
        SamplePath::new(self.pair.source().alphabet().clone(), image.symbols)
    }
}

/// Sample sizes and seed of [`verify_isomorphism`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyConfig {
    pub n: usize,
    pub num_samples: usize,
    pub k_block: usize,
    pub seed: u64,
    pub workers: usize,
}

/// Monte Carlo evidence that a pasted code is an isomorphism.
#[derive(Debug, Clone, PartialEq)]
pub struct IsomorphismCertificate {
    pub n: usize,
    pub window: usize,
    pub samples: usize,
    pub k_block: usize,
    pub seed: u64,
    /// Fraction of paths whose round trip differs from the input anywhere.
    pub round_trip_failure_rate: f64,
    /// The same among paths classified to their true component.
    pub round_trip_failure_rate_classified: f64,
    pub classification_accuracy: f64,
    /// Fraction of paths whose image is classified to the matched target
    /// component.
    pub agreement_rate: f64,
    /// Total variation between pooled overlapping k-blocks of the images and
    /// the exact k-block law of the target.
    pub tv_distance: f64,
    /// `confusion[true][assigned]`; the last column counts unclassified paths.
    pub confusion: Vec<Vec<u64>>,
    /// Fraction of paths assigned to each source component.
    pub assigned_fraction: Vec<f64>,
    pub weights: Vec<f64>,
    pub inverse_on_support: Vec<bool>,
}

impl IsomorphismCertificate {
    pub fn to_json(&self) -> Value {
        json!({
            "n": self.n,
            "window": self.window,
            "samples": self.samples,
            "k_block": self.k_block,
            "seed": self.seed,
            "round_trip_failure_rate": num(self.round_trip_failure_rate),
            "round_trip_failure_rate_classified": num(self.round_trip_failure_rate_classified),
            "classification_accuracy": num(self.classification_accuracy),
            "agreement_rate": num(self.agreement_rate),
            "tv_distance": num(self.tv_distance),
            "classification_confusion_matrix": self.confusion,
            "assigned_fraction": self.assigned_fraction.iter().map(|&f| num(f)).collect::<Vec<_>>(),
            "weights": self.weights.iter().map(|&w| num(w)).collect::<Vec<_>>(),
            "inverse_on_support": self.inverse_on_support,
        })
    }
}

struct PathOutcome {
    truth: usize,
    assigned: Option<usize>,
    round_trip_ok: bool,
    agrees: bool,
    blocks: Vec<u64>,
}

/// Samples source paths, pushes them through the pasted map and back, and
/// pools the evidence. Path `i` uses random stream `i` of `seed`.
pub fn verify_isomorphism(pasted: &PastedCode, config: &VerifyConfig) -> Result<IsomorphismCertificate> {
    if config.num_samples == 0 || config.k_block == 0 {
        return Err(Error::OutOfRange("need at least one sample and k_block >= 1".into()));
    }
    let max_round = pasted.codes.iter().map(|c| c.round_trip_radius()).max().unwrap_or(0);
    if config.n < pasted.window || config.n <= 2 * max_round + config.k_block {
        return Err(Error::PathTooShort {
            needed: pasted.window.max(2 * max_round + config.k_block + 1),
            got: config.n,
        });
    }
    let target = pasted.pair.target();
    let q_out = target.alphabet().size();
    let exact = target.block_distribution(config.k_block, pasted.cap)?;
    let k = config.k_block;
    let components = pasted.pair.len();

    let source = pasted.pair.source();
    let outcomes: Vec<Result<PathOutcome>> = source.map_samples(config.n, config.num_samples, config.seed, config.workers, |x, truth| {
        let truth = truth.unwrap_or(0);
        let image = pasted.forward_symbols(x)?;
        let mut blocks = vec![0u64; exact.len()];
        let mut idx = 0usize;
        for (i, &s) in image.symbols.iter().enumerate() {
            idx = (idx % (exact.len() / q_out)) * q_out + s;
            if i + 1 >= k {
                blocks[idx] += 1;
            }
        }
        let (round_trip_ok, agrees) = match image.component {
            Some(theta) => {
                let back = pasted.backward_symbols(&image.symbols)?;
                let offset = pasted.codes[theta].round_trip_radius();
                let ok = back.component == Some(theta)
                    && back.symbols.len() + 2 * offset == x.len()
                    && back.symbols[..] == x[offset..x.len() - offset];
                (ok, back.component == Some(theta))
            }
            None => (false, false),
        };
        Ok(PathOutcome {
            truth,
            assigned: image.component,
            round_trip_ok,
            agrees,
            blocks,
        })
    })?;

    let mut confusion = vec![vec![0u64; components + 1]; components];
    let mut pooled = vec![0u64; exact.len()];
    let (mut failures, mut correct, mut correct_failures, mut agree) = (0usize, 0usize, 0usize, 0usize);
    for outcome in outcomes {
        let o = outcome?;
        confusion[o.truth][o.assigned.unwrap_or(components)] += 1;
        for (p, b) in pooled.iter_mut().zip(&o.blocks) {
            *p += b;
        }
        if !o.round_trip_ok {
            failures += 1;
        }
        if o.assigned == Some(o.truth) {
            correct += 1;
            if !o.round_trip_ok {
                correct_failures += 1;
            }
        }
        if o.agrees {
            agree += 1;
        }
    }
    let total_blocks: u64 = pooled.iter().sum();
    let tv = 0.5
        * pooled
            .iter()
            .zip(&exact)
            .map(|(&c, &p)| (c as f64 / total_blocks.max(1) as f64 - p).abs())
            .sum::<f64>();
    let m = config.num_samples as f64;
    let assigned_fraction = (0..components)
        .map(|j| confusion.iter().map(|row| row[j]).sum::<u64>() as f64 / m)
        .collect();
    Ok(IsomorphismCertificate {
        n: config.n,
        window: pasted.window,
        samples: config.num_samples,
        k_block: k,
        seed: config.seed,
        round_trip_failure_rate: failures as f64 / m,
        round_trip_failure_rate_classified: if correct == 0 {
            0.0
        } else {
            correct_failures as f64 / correct as f64
        },
        classification_accuracy: correct as f64 / m,
        agreement_rate: agree as f64 / m,
        tv_distance: tv,
        confusion,
        assigned_fraction,
        weights: source.components().iter().map(|c| c.0).collect(),
        inverse_on_support: pasted.inverse_on_support.clone(),
    })
}

/// Ergodic or a genuine mixture.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ergodicity {
    Ergodic,
    NonErgodicMixture,
}

impl Ergodicity {
    pub fn as_str(&self) -> &'static str {
        match self {
            Ergodicity::Ergodic => "ergodic",
            Ergodicity::NonErgodicMixture => "non_ergodic_mixture",
        }
    }
}

/// Longest block length compared when deciding whether two components are
/// the same process.
const IDENTITY_BLOCK_LEN: usize = 8;
const IDENTITY_MAX_BLOCKS: usize = 4096;

/// Mixtures with at least two distinct positive-weight components are
/// non-ergodic. Components count as distinct when their block laws differ by
/// more than `1e-12` at some length up to 8 (fewer for large alphabets).
pub fn ergodicity_flag(model: &ProcessModel) -> Ergodicity {
    let live: Vec<&ProcessModel> = model
        .components()
        .into_iter()
        .filter(|c| c.0 > 0.0)
        .map(|c| c.1)
        .collect();
    let q = model.alphabet().size();
    let mut len = 1;
    while len < IDENTITY_BLOCK_LEN && checked_pow(q, len + 1).is_some_and(|s| s <= IDENTITY_MAX_BLOCKS) {
        len += 1;
    }
    let cap = EnumerationCap(IDENTITY_MAX_BLOCKS as u64);
    let laws: Vec<Option<Vec<f64>>> = live.iter().map(|c| c.block_distribution(len, cap).ok()).collect();
    let first = &laws[0];
    let distinct = laws.iter().skip(1).any(|l| match (first, l) {
        (Some(a), Some(b)) => a.iter().zip(b).any(|(x, y)| (x - y).abs() > 1e-12),
        _ => true,
    });
    if distinct {
        Ergodicity::NonErgodicMixture
    } else {
        Ergodicity::Ergodic
    }
}

/// What the isomorphism invariants say about a pair of processes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InvariantVerdict {
    NonIsomorphicBySpectrum,
    NonIsomorphicByErgodicity,
    /// Spectra and ergodicity agree; the invariants do not separate them.
    Undecided,
}

impl InvariantVerdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            InvariantVerdict::NonIsomorphicBySpectrum => "non_isomorphic_by_spectrum",
            InvariantVerdict::NonIsomorphicByErgodicity => "non_isomorphic_by_ergodicity",
            InvariantVerdict::Undecided => "undecided",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InvariantComparison {
    pub x_spectrum: StaircaseSpectrum,
    pub y_spectrum: StaircaseSpectrum,
    pub spectra_equal: bool,
    pub x_into_y: bool,
    pub y_into_x: bool,
    pub x_ergodicity: Ergodicity,
    pub y_ergodicity: Ergodicity,
    pub verdict: InvariantVerdict,
}

impl InvariantComparison {
    pub fn to_json(&self) -> Value {
        let jumps = |s: &StaircaseSpectrum| s.jumps().iter().map(|&(t, m)| json!([num(t), num(m)])).collect::<Vec<_>>();
        json!({
            "x_spectrum": jumps(&self.x_spectrum),
            "y_spectrum": jumps(&self.y_spectrum),
            "spectra_equal": self.spectra_equal,
            "dominance_x_into_y": self.x_into_y,
            "dominance_y_into_x": self.y_into_x,
            "x_ergodicity": self.x_ergodicity.as_str(),
            "y_ergodicity": self.y_ergodicity.as_str(),
            "verdict": self.verdict.as_str(),
        })
    }
}

/// Compares exact spectra (both dominance directions) and ergodicity.
pub fn compare_invariants(x: &ProcessModel, y: &ProcessModel) -> Result<InvariantComparison> {
    let xs = mixture_spectrum(x)?;
    let ys = mixture_spectrum(y)?;
    let (sx, sy) = (Spectrum::Staircase(xs.clone()), Spectrum::Staircase(ys.clone()));
    let x_into_y = dominance_check(&sy, &sx, 0.0)?.dominates();
    let y_into_x = dominance_check(&sx, &sy, 0.0)?.dominates();
    let x_ergodicity = ergodicity_flag(x);
    let y_ergodicity = ergodicity_flag(y);
    let verdict = if !(x_into_y && y_into_x) {
        InvariantVerdict::NonIsomorphicBySpectrum
    } else if x_ergodicity != y_ergodicity {
        InvariantVerdict::NonIsomorphicByErgodicity
    } else {
        InvariantVerdict::Undecided
    };
    Ok(InvariantComparison {
        spectra_equal: xs.approx_eq(&ys, MATCH_TOL),
        x_spectrum: xs,
        y_spectrum: ys,
        x_into_y,
        y_into_x,
        x_ergodicity,
        y_ergodicity,
        verdict,
    })
}

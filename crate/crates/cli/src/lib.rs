//! Command-line front end for `spectrascope`.
//!
//! Exit codes: 0 on success, 2 when a verified inequality or dominance check
//! fails, 1 on usage or input errors. Output files are written whole, after
//! the computation has succeeded.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use spectrascope::coding::{
    hamming_ball_bound_check, verify_change_of_measure, verify_finite_bound_grid, BoundGrid, CodePair,
    SlidingBlockCode,
};
use spectrascope::isomorph::{
    compare_invariants, paste_codes_with_cap, verify_isomorphism, ClassifierConfig, InvariantVerdict,
    RegularMixturePair, VerifyConfig,
};
use spectrascope::mtypes::{type_count_bound, type_partition, MixedApproximation};
use spectrascope::numfmt::{num, to_text};
use spectrascope::process::{EntropyRate, EntropyRateOptions, ProcessModel};
use spectrascope::spectrum::{
    default_grid, default_slack, dominance_check, dominance_to_json, empirical_spectrum, exact_tail_check,
    linear_grid, mixture_spectrum_opts, mixture_spectrum_with_rates, parse_spectrum, spectrum_to_csv,
    spectrum_to_json, EstimateConfig, Spectrum,
};
use spectrascope::{catalog, json as docs, EnumerationCap};

/// Environment variable overriding the enumeration cap.
pub const CAP_ENV: &str = "SPECTRASCOPE_CAP";

#[derive(Debug, Parser)]
#[command(name = "spectrascope", version, about = "Information spectra of finite-alphabet stationary processes")]
struct Cli {
    /// Largest enumerated state space (default 2^20, or $SPECTRASCOPE_CAP).
    #[arg(long, global = true)]
    cap: Option<u64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Exact staircase spectrum of a mixture (or single ergodic model).
    SpectrumExact(SpectrumExactArgs),
    /// Monte Carlo estimate of the finite-length spectrum.
    SpectrumEstimate(SpectrumEstimateArgs),
    /// Checks F_lower <= F_upper + slack on two spectrum files.
    Dominance(DominanceArgs),
    /// Exhaustive checks of finite-length inequalities.
    #[command(subcommand)]
    Verify(VerifyCommand),
    /// Pasted-isomorphism demo, or the equal-entropy counterexample.
    IsoDemo(IsoDemoArgs),
    /// Entropy rate and conditional entropies of a model.
    Entropy(EntropyArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, Args)]
struct OutArgs {
    /// Output file; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SpectrumExactArgs {
    /// Model file, or bundled:NAME.
    #[arg(long)]
    model: String,
    /// Certified component entropy rates, comma separated.
    #[arg(long, value_delimiter = ',')]
    rates: Option<Vec<f64>>,
    /// Conditioning depth of factor-component brackets.
    #[arg(long, default_value_t = 8)]
    bracket_order: usize,
    /// Output format; inferred from a .csv extension otherwise json.
    #[arg(long, value_enum)]
    format: Option<Format>,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Debug, Args)]
struct GridArgs {
    #[arg(long)]
    tau_min: Option<f64>,
    #[arg(long)]
    tau_max: Option<f64>,
    #[arg(long)]
    tau_points: Option<usize>,
}

#[derive(Debug, Args)]
struct SpectrumEstimateArgs {
    #[arg(long)]
    model: String,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 0.02)]
    gamma: f64,
    #[arg(long, default_value_t = 1000)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Worker threads; 0 uses every core.
    #[arg(long, default_value_t = 0)]
    workers: usize,
    #[command(flatten)]
    grid: GridArgs,
    #[arg(long, value_enum)]
    format: Option<Format>,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Debug, Args)]
struct DominanceArgs {
    /// Spectrum file of the candidate image Y.
    #[arg(long)]
    upper: PathBuf,
    /// Spectrum file of the source X.
    #[arg(long)]
    lower: PathBuf,
    /// Slack; defaults to the sum of the 95% DKW radii of estimated sides.
    #[arg(long)]
    slack: Option<f64>,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Debug, Subcommand)]
enum VerifyCommand {
    /// Finite-length homomorphism bound on a (tau, gamma, beta) grid.
    Lemma2(Lemma2Args),
    /// Change-of-measure bound for every mixture component.
    ChangeOfMeasure(ChangeOfMeasureArgs),
    /// Markov-type partition, type-count bound and same-type probabilities.
    Types(TypesArgs),
    /// Hamming-ball size bound.
    Hamming(HammingArgs),
    /// Upper tail of the self-information rate.
    Tail(TailArgs),
}

#[derive(Debug, Args)]
struct Lemma2Args {
    #[arg(long)]
    model: String,
    /// Code file, or bundled:NAME.
    #[arg(long)]
    code: String,
    /// Target code the first code approximates; the code itself otherwise.
    #[arg(long)]
    reference: Option<String>,
    #[arg(long)]
    n: usize,
    /// `default`, or `custom` with --taus/--gammas/--betas.
    #[arg(long, default_value = "default")]
    grid: String,
    #[arg(long, value_delimiter = ',')]
    taus: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    gammas: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    betas: Option<Vec<f64>>,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Debug, Args)]
struct ChangeOfMeasureArgs {
    #[arg(long)]
    model: String,
    #[arg(long, value_delimiter = ',')]
    n: Vec<usize>,
    #[arg(long, value_delimiter = ',')]
    gamma: Vec<f64>,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Debug, Args)]
struct TypesArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    k: usize,
    #[arg(long, default_value_t = 2)]
    alphabet_size: usize,
    /// Model whose order-k approximation is checked for equal probabilities
    /// across every type class.
    #[arg(long)]
    model: Option<String>,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Debug, Args)]
struct HammingArgs {
    /// Block length N.
    #[arg(long)]
    n: usize,
    #[arg(long)]
    beta: f64,
    #[arg(long, default_value_t = 2)]
    alphabet_size: usize,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Debug, Args)]
struct TailArgs {
    #[arg(long)]
    model: String,
    #[arg(long, value_delimiter = ',')]
    n: Vec<usize>,
    #[arg(long, value_delimiter = ',')]
    gamma: Vec<f64>,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Demo {
    Pasting,
    Counterexample,
}

#[derive(Debug, Args)]
struct IsoDemoArgs {
    #[arg(long, value_enum, default_value = "pasting")]
    demo: Demo,
    /// Source mixture (pasting) or first process (counterexample).
    #[arg(long)]
    x: Option<String>,
    /// Target mixture (pasting) or second process (counterexample).
    #[arg(long)]
    y: Option<String>,
    /// Per-component forward codes, comma separated; each must be a
    /// permutation code unless --backward is given.
    #[arg(long, value_delimiter = ',')]
    codes: Option<Vec<String>>,
    /// Per-component backward codes, comma separated.
    #[arg(long, value_delimiter = ',')]
    backward: Option<Vec<String>>,
    #[arg(long, default_value_t = 2000)]
    n: usize,
    #[arg(long, default_value_t = 5000)]
    samples: usize,
    /// Classifier window.
    #[arg(long, default_value_t = 1000)]
    window: usize,
    #[arg(long, default_value_t = 3)]
    k_block: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 0)]
    workers: usize,
    #[arg(long, default_value_t = 0.02)]
    max_tv: f64,
    #[arg(long, default_value_t = 0.999)]
    min_accuracy: f64,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Debug, Args)]
struct EntropyArgs {
    #[arg(long)]
    model: String,
    /// Largest conditioning depth reported.
    #[arg(long, default_value_t = 8)]
    order: usize,
    #[command(flatten)]
    out: OutArgs,
}

/// Outcome of a command that parsed and ran.
enum Outcome {
    Ok,
    Failed,
}

/// Runs the command line and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli) {
        Ok(Outcome::Ok) => 0,
        Ok(Outcome::Failed) => 2,
        Err(e) => {
            eprintln!("error: {e:#}");
            1
        }
    }
}

fn resolve_cap(flag: Option<u64>) -> Result<EnumerationCap> {
    if let Some(c) = flag {
        if c == 0 {
            bail!("--cap must be positive");
        }
        return Ok(EnumerationCap(c));
    }
    match std::env::var(CAP_ENV) {
        Ok(v) => {
            let c: u64 = v.trim().parse().with_context(|| format!("{CAP_ENV}={v:?} is not a positive integer"))?;
            if c == 0 {
                bail!("{CAP_ENV} must be positive");
            }
            Ok(EnumerationCap(c))
        }
        Err(_) => Ok(EnumerationCap::default()),
    }
}

const BUNDLED: &str = "bundled:";

fn load_model(source: &str) -> Result<ProcessModel> {
    if let Some(name) = source.strip_prefix(BUNDLED) {
        return Ok(catalog::model(name)?);
    }
    let text = std::fs::read_to_string(source).with_context(|| format!("reading model {source}"))?;
    docs::parse_model(&text).with_context(|| format!("model {source}"))
}

fn load_code(source: &str) -> Result<SlidingBlockCode> {
    if let Some(name) = source.strip_prefix(BUNDLED) {
        return Ok(catalog::code(name)?);
    }
    let text = std::fs::read_to_string(source).with_context(|| format!("reading code {source}"))?;
    docs::parse_code(&text).with_context(|| format!("code {source}"))
}

fn load_spectrum(path: &Path) -> Result<Spectrum> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading spectrum {}", path.display()))?;
    parse_spectrum(&text).with_context(|| format!("spectrum {}", path.display()))
}

/// Writes through a sibling temporary file so a reader never sees a
/// partial output.
fn emit(out: &OutArgs, text: &str) -> Result<()> {
    match &out.out {
        None => {
            print!("{text}");
            Ok(())
        }
        Some(path) => {
            let mut tmp = path.clone().into_os_string();
            tmp.push(".partial");
            let tmp = PathBuf::from(tmp);
            std::fs::write(&tmp, text).with_context(|| format!("writing {}", tmp.display()))?;
            std::fs::rename(&tmp, path).with_context(|| format!("writing {}", path.display()))
        }
    }
}

fn emit_json(out: &OutArgs, value: &Value) -> Result<()> {
    emit(out, &to_text(value))
}

fn format_for(explicit: Option<Format>, out: &OutArgs) -> Format {
    explicit.unwrap_or_else(|| match &out.out {
        Some(p) if p.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv")) => Format::Csv,
        _ => Format::Json,
    })
}

fn verdict(pass: bool) -> Outcome {
    if pass {
        Outcome::Ok
    } else {
        Outcome::Failed
    }
}

fn execute(cli: Cli) -> Result<Outcome> {
    let cap = resolve_cap(cli.cap)?;
    match cli.command {
        Command::SpectrumExact(a) => spectrum_exact(a, cap),
        Command::SpectrumEstimate(a) => spectrum_estimate(a),
        Command::Dominance(a) => dominance(a),
        Command::Verify(v) => match v {
            VerifyCommand::Lemma2(a) => lemma2(a, cap),
            VerifyCommand::ChangeOfMeasure(a) => change_of_measure(a, cap),
            VerifyCommand::Types(a) => types(a, cap),
            VerifyCommand::Hamming(a) => hamming(a),
            VerifyCommand::Tail(a) => tail(a, cap),
        },
        Command::IsoDemo(a) => iso_demo(a, cap),
        Command::Entropy(a) => entropy(a, cap),
    }
}

fn write_spectrum(spectrum: &Spectrum, format: Format, out: &OutArgs) -> Result<()> {
    match format {
        Format::Json => emit_json(out, &spectrum_to_json(spectrum)),
        Format::Csv => emit(out, &spectrum_to_csv(spectrum)),
    }
}

fn spectrum_exact(a: SpectrumExactArgs, cap: EnumerationCap) -> Result<Outcome> {
    let model = load_model(&a.model)?;
    let staircase = match &a.rates {
        Some(r) => mixture_spectrum_with_rates(&model, r)?,
        None => mixture_spectrum_opts(
            &model,
            EntropyRateOptions {
                bracket_order: a.bracket_order,
                cap,
            },
        )?,
    };
    write_spectrum(&Spectrum::Staircase(staircase), format_for(a.format, &a.out), &a.out)?;
    Ok(Outcome::Ok)
}

fn spectrum_estimate(a: SpectrumEstimateArgs) -> Result<Outcome> {
    let model = load_model(&a.model)?;
    if a.gamma.is_nan() || a.gamma <= 0.0 {
        bail!("--gamma must be positive");
    }
    if a.samples == 0 {
        bail!("--samples must be at least 1");
    }
    let q = model.alphabet().size();
    let grid = match (a.grid.tau_min, a.grid.tau_max, a.grid.tau_points) {
        (None, None, None) => default_grid(q, a.gamma),
        (min, max, points) => {
            let top = (q as f64).log2() + 2.0 * a.gamma;
            linear_grid(min.unwrap_or(0.0), max.unwrap_or(top), points.unwrap_or(512))?
        }
    };
    let config = EstimateConfig::new(a.n, a.gamma, a.samples, a.seed)
        .with_grid(grid)
        .with_workers(a.workers);
    let estimate = empirical_spectrum(&model, &config)?;
    write_spectrum(&Spectrum::Estimate(estimate), format_for(a.format, &a.out), &a.out)?;
    Ok(Outcome::Ok)
}

fn dominance(a: DominanceArgs) -> Result<Outcome> {
    let upper = load_spectrum(&a.upper)?;
    let lower = load_spectrum(&a.lower)?;
    let slack = a.slack.unwrap_or_else(|| default_slack(&upper, &lower));
    let report = dominance_check(&upper, &lower, slack)?;
    emit_json(&a.out, &dominance_to_json(&report))?;
    Ok(verdict(report.dominates()))
}

fn lemma2(a: Lemma2Args, cap: EnumerationCap) -> Result<Outcome> {
    let model = load_model(&a.model)?;
    let code = load_code(&a.code)?;
    let reference = a.reference.as_deref().map(load_code).transpose()?;
    let grid = match a.grid.as_str() {
        "default" => BoundGrid::default(),
        "custom" => BoundGrid {
            taus: a.taus.context("--grid custom needs --taus")?,
            gammas: a.gammas.context("--grid custom needs --gammas")?,
            betas: a.betas.context("--grid custom needs --betas")?,
        },
        other => bail!("unknown grid {other:?}; use default or custom"),
    };
    let reports = verify_finite_bound_grid(&model, &code, reference.as_ref(), a.n, &grid, cap)?;
    let pass = reports.iter().all(|r| r.pass && r.chain_pass);
    let m = a.n + code.radius();
    let value = json!({
        "n": a.n,
        "m": m,
        "M": 2 * m + 1,
        "N": 2 * a.n + 1,
        "points": reports.len(),
        "nontrivial_points": reports.iter().filter(|r| !r.trivially_pass).count(),
        "epsilon": num(reports.first().map_or(0.0, |r| r.epsilon)),
        "pass": pass,
        "reports": reports.iter().map(|r| r.to_json()).collect::<Vec<_>>(),
    });
    emit_json(&a.out, &value)?;
    Ok(verdict(pass))
}

fn change_of_measure(a: ChangeOfMeasureArgs, cap: EnumerationCap) -> Result<Outcome> {
    let model = load_model(&a.model)?;
    if !model.is_mixture() {
        bail!("change-of-measure needs a mixture model");
    }
    if a.n.is_empty() || a.gamma.is_empty() {
        bail!("give at least one --n and one --gamma");
    }
    let mut reports = Vec::new();
    for &n in &a.n {
        for &g in &a.gamma {
            for theta in 0..model.components().len() {
                reports.push(verify_change_of_measure(&model, theta, n, g, cap)?);
            }
        }
    }
    let pass = reports.iter().all(|r| r.pass);
    emit_json(
        &a.out,
        &json!({ "pass": pass, "reports": reports.iter().map(|r| r.to_json()).collect::<Vec<_>>() }),
    )?;
    Ok(verdict(pass))
}

fn types(a: TypesArgs, cap: EnumerationCap) -> Result<Outcome> {
    let count = type_count_bound(a.n, a.k, a.alphabet_size, cap)?;
    let classes = type_partition(a.alphabet_size, a.n, a.k, cap)?;
    let covered: usize = classes.values().map(|c| c.len()).sum();
    let space = cap.check_pow(a.alphabet_size, a.n)?;
    let mut seen = vec![false; space];
    let mut disjoint = true;
    for members in classes.values() {
        for &m in members {
            disjoint &= !std::mem::replace(&mut seen[m], true);
        }
    }
    let partition = disjoint && covered == space;
    let mut value = json!({
        "n": a.n,
        "k": a.k,
        "alphabet_size": a.alphabet_size,
        "classes": classes.len(),
        "partition": partition,
        "type_count": count.to_json(),
    });
    let mut pass = partition && count.pass;
    if let Some(source) = &a.model {
        let model = load_model(source)?;
        if model.alphabet().size() != a.alphabet_size {
            bail!("model alphabet size differs from --alphabet-size");
        }
        let mixed = MixedApproximation::new(&model, a.k, cap)?;
        let mut worst: f64 = 0.0;
        for members in classes.values() {
            let probs: Vec<f64> = members
                .iter()
                .map(|&i| {
                    let x = decode(i, a.alphabet_size, a.n);
                    mixed.log_probability(&x).map(f64::exp2).unwrap_or(0.0)
                })
                .collect();
            for p in &probs {
                worst = worst.max((p - probs[0]).abs());
            }
        }
        let same = worst <= 1e-12;
        pass &= same;
        value["same_type_max_difference"] = num(worst);
        value["same_type_pass"] = Value::from(same);
    }
    value["pass"] = Value::from(pass);
    emit_json(&a.out, &value)?;
    Ok(verdict(pass))
}

fn decode(mut index: usize, q: usize, len: usize) -> Vec<usize> {
    let mut out = vec![0; len];
    for slot in out.iter_mut().rev() {
        *slot = index % q;
        index /= q;
    }
    out
}

fn hamming(a: HammingArgs) -> Result<Outcome> {
    let r = hamming_ball_bound_check(a.n, a.beta, a.alphabet_size)?;
    emit_json(&a.out, &r.to_json())?;
    Ok(verdict(r.pass))
}

fn tail(a: TailArgs, cap: EnumerationCap) -> Result<Outcome> {
    let model = load_model(&a.model)?;
    let mut rows = Vec::new();
    let mut pass = true;
    for &n in &a.n {
        for &g in &a.gamma {
            let r = exact_tail_check(&model, n, g, cap)?;
            pass &= r.pass;
            rows.push(json!({
                "n": n,
                "gamma": num(g),
                "lhs": num(r.lhs),
                "rhs_terms": { "tail": num(r.bound) },
                "pass": r.pass,
            }));
        }
    }
    emit_json(&a.out, &json!({ "pass": pass, "reports": rows }))?;
    Ok(verdict(pass))
}

fn code_pairs(a: &IsoDemoArgs, components: usize) -> Result<Vec<CodePair>> {
    let forward: Vec<String> = match &a.codes {
        Some(c) => c.clone(),
        None if a.x.is_none() && a.y.is_none() => vec!["bundled:bit-flip".into(), "bundled:identity".into()],
        None => bail!("--codes is required with custom mixtures"),
    };
    if forward.len() != components {
        bail!("{} codes for {components} components", forward.len());
    }
    let mut pairs = Vec::with_capacity(components);
    for (i, f) in forward.iter().enumerate() {
        let f = load_code(f)?;
        let pair = match &a.backward {
            Some(b) => {
                let b = b.get(i).context("one --backward code per component")?;
                CodePair::new(f, load_code(b)?)?
            }
            None => {
                if f.radius() != 0 {
                    bail!("code {i} is not a relabeling; give --backward codes");
                }
                CodePair::permutation(f.input().clone(), f.table().to_vec())?
            }
        };
        pairs.push(pair);
    }
    Ok(pairs)
}

fn iso_demo(a: IsoDemoArgs, cap: EnumerationCap) -> Result<Outcome> {
    match a.demo {
        Demo::Pasting => {
            let x = load_model(a.x.as_deref().unwrap_or("bundled:iso-x"))?;
            let y = load_model(a.y.as_deref().unwrap_or("bundled:iso-y"))?;
            let invariants = compare_invariants(&x, &y)?;
            let pair = RegularMixturePair::new(x, y)?;
            let pairs = code_pairs(&a, pair.len())?;
            let pasted = paste_codes_with_cap(pair, pairs, ClassifierConfig::new(a.window), cap)?;
            let cert = verify_isomorphism(
                &pasted,
                &VerifyConfig {
                    n: a.n,
                    num_samples: a.samples,
                    k_block: a.k_block,
                    seed: a.seed,
                    workers: a.workers,
                },
            )?;
            let pass = cert.round_trip_failure_rate_classified == 0.0
                && cert.classification_accuracy >= a.min_accuracy
                && cert.tv_distance <= a.max_tv
                && invariants.spectra_equal;
            let mut value = cert.to_json();
            value["matching"] = json!(pasted.pair().matching());
            value["spectra_equal"] = Value::from(invariants.spectra_equal);
            value["pass"] = Value::from(pass);
            emit_json(&a.out, &value)?;
            Ok(verdict(pass))
        }
        Demo::Counterexample => {
            let x = load_model(a.x.as_deref().unwrap_or("bundled:counterexample-mixture"))?;
            let y = load_model(a.y.as_deref().unwrap_or("bundled:counterexample-ergodic"))?;
            let c = compare_invariants(&x, &y)?;
            let regular = RegularMixturePair::new(x, y).err().map(|e| e.to_string());
            let mut value = c.to_json();
            value["pasting_rejected"] = json!(regular);
            emit_json(&a.out, &value)?;
            Ok(verdict(c.verdict != InvariantVerdict::Undecided))
        }
    }
}

fn entropy(a: EntropyArgs, cap: EnumerationCap) -> Result<Outcome> {
    let model = load_model(&a.model)?;
    let mut rows = Vec::new();
    for (index, (w, c)) in model.components().into_iter().enumerate() {
        let rate = c.entropy_rate(EntropyRateOptions {
            bracket_order: a.order,
            cap,
        })?;
        let conditional = (0..=a.order)
            .map(|k| c.conditional_entropy(k, cap).map(num))
            .collect::<spectrascope::Result<Vec<_>>>()?;
        let rate = match rate {
            EntropyRate::Exact(h) => json!({ "exact": num(h) }),
            EntropyRate::Bracket { lower, upper, order } => {
                json!({ "lower": num(lower), "upper": num(upper), "order": order })
            }
        };
        rows.push(json!({
            "component": index,
            "weight": num(w),
            "kind": c.kind(),
            "entropy_rate": rate,
            "conditional_entropy": conditional,
        }));
    }
    emit_json(&a.out, &json!({ "components": rows }))?;
    Ok(Outcome::Ok)
}

//! Acceptance criteria. Each test prints one `ACCEPTANCE Cn PASS|FAIL` line
//! and then asserts the criterion at its pinned tolerance.

use std::collections::BTreeMap;
use std::process::Command;
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use spectrascope::catalog;
use spectrascope::coding::{
    pushforward_model, verify_change_of_measure, verify_finite_bound_grid, BoundGrid, CodePair,
};
use spectrascope::isomorph::{
    compare_invariants, paste_codes, verify_isomorphism, ClassifierConfig, Ergodicity, InvariantVerdict,
    RegularMixturePair, VerifyConfig,
};
use spectrascope::mtypes::{type_count_bound, type_partition, MixedApproximation};
use spectrascope::process::{Alphabet, ProcessModel};
use spectrascope::spectrum::{
    default_slack, dominance_check, empirical_spectrum, exact_tail_check, mixture_spectrum, validate_theorem1,
    EstimateConfig, Spectrum, Theorem1Config,
};
use spectrascope::EnumerationCap;

fn report(id: &str, pass: bool, elapsed: Duration, budget: Duration, detail: &str) {
    let status = if pass && elapsed <= budget { "PASS" } else { "FAIL" };
    println!(
        "ACCEPTANCE {id} {status} {detail} runtime={:.3}s budget={:.0}s",
        elapsed.as_secs_f64(),
        budget.as_secs_f64()
    );
}

fn cap() -> EnumerationCap {
    EnumerationCap::default()
}

fn binary() -> Arc<Alphabet> {
    Arc::new(Alphabet::binary())
}

#[test]
fn c01_staircase_matches_estimate() {
    const TOLERANCE: f64 = 0.03;
    const EXCLUSION: f64 = 0.05;
    const BUDGET: Duration = Duration::from_secs(60);
    let start = Instant::now();
    let model = ProcessModel::mixture(
        vec![
            ProcessModel::iid(binary(), vec![0.5, 0.5]).unwrap(),
            ProcessModel::iid(binary(), vec![0.9, 0.1]).unwrap(),
        ],
        vec![0.3, 0.7],
    )
    .unwrap();
    let mut cfg = Theorem1Config::new(EstimateConfig::new(2000, 0.02, 5000, 1).with_workers(1));
    cfg.tolerance = TOLERANCE;
    cfg.exclusion = EXCLUSION;
    let r = validate_theorem1(&model, &cfg).unwrap();
    let elapsed = start.elapsed();
    let pass = r.sup_gap <= TOLERANCE && r.points_compared > 0;
    report(
        "C1",
        pass,
        elapsed,
        BUDGET,
        &format!(
            "sup_gap={:.4} at tau={:.4} tol={TOLERANCE} points={} (gap against F(tau+gamma) with the same exclusion: {:.4})",
            r.sup_gap, r.sup_gap_tau, r.points_compared, r.shifted_sup_gap
        ),
    );
    assert_eq!(r.pass, pass);
    assert!(pass, "sup gap {} exceeds {TOLERANCE}", r.sup_gap);
    assert!(elapsed <= BUDGET);
}

#[test]
fn c02_tail_bound_all_bundled_models() {
    const BUDGET: Duration = Duration::from_secs(5);
    let start = Instant::now();
    let mut checked = 0;
    let mut failures = Vec::new();
    for (name, model) in catalog::all_models() {
        for n in 8..=12 {
            for gamma in [0.1, 0.5] {
                let r = exact_tail_check(&model, n, gamma, cap()).unwrap();
                // oracle: the bound itself, recomputed here
                assert_eq!(r.bound, (-(n as f64) * gamma).exp2());
                checked += 1;
                if !(r.pass && r.lhs <= r.bound) {
                    failures.push(format!("{name} n={n} gamma={gamma} lhs={} bound={}", r.lhs, r.bound));
                }
            }
        }
    }
    let elapsed = start.elapsed();
    let pass = failures.is_empty();
    report("C2", pass, elapsed, BUDGET, &format!("cases={checked} failures={}", failures.len()));
    assert!(pass, "{failures:?}");
    assert!(elapsed <= BUDGET);
}

#[test]
fn c03_change_of_measure_grid() {
    const BUDGET: Duration = Duration::from_secs(10);
    let start = Instant::now();
    let mut checked = 0;
    let mut failures = Vec::new();
    for name in ["mixture-0.3-0.7", "mixture-markov", "mixture-ternary"] {
        let model = catalog::model(name).unwrap();
        for n in [6, 8, 10] {
            for gamma in [0.05, 0.2, 0.5] {
                for theta in 0..model.components().len() {
                    let r = verify_change_of_measure(&model, theta, n, gamma, cap()).unwrap();
                    checked += 1;
                    if !(r.pass && r.lhs <= r.bound) {
                        failures.push(format!("{name} theta={theta} n={n} gamma={gamma}"));
                    }
                }
            }
        }
    }
    let elapsed = start.elapsed();
    let pass = failures.is_empty();
    report("C3", pass, elapsed, BUDGET, &format!("cases={checked} failures={}", failures.len()));
    assert!(pass, "{failures:?}");
    assert!(elapsed <= BUDGET);
}

#[test]
fn c04_finite_homomorphism_bound() {
    const BUDGET: Duration = Duration::from_secs(120);
    const MAX_WINDOW: usize = 11;
    const MIN_POINTS: usize = 32;
    const MIN_NONTRIVIAL: usize = 4;
    let start = Instant::now();
    let grid = BoundGrid::default();
    let cases: [(&str, &str, Option<&str>, usize); 4] = [
        ("markov-asym", "xor3", None, 4),
        ("bernoulli-0.25", "majority3", None, 4),
        ("markov-sticky", "bit-flip", None, 5),
        ("markov-asym", "majority3", Some("xor3"), 4),
    ];
    let mut details = Vec::new();
    let mut pass = grid.len() >= MIN_POINTS;
    for (model, code, reference, n) in cases {
        let m = catalog::model(model).unwrap();
        let c = catalog::code(code).unwrap();
        let g = reference.map(|r| catalog::code(r).unwrap());
        let window = 2 * (n + c.radius().max(g.as_ref().map_or(0, |g| g.radius()))) + 1;
        let reports = verify_finite_bound_grid(&m, &c, g.as_ref(), n, &grid, cap()).unwrap();
        let nontrivial = reports.iter().filter(|r| r.exponent > 0.0).count();
        let ok = window <= MAX_WINDOW
            && reports.len() >= MIN_POINTS
            && nontrivial >= MIN_NONTRIVIAL
            && reports.iter().all(|r| r.pass && r.chain_pass && r.lhs <= r.rhs);
        pass &= ok;
        details.push(format!("{model}/{code}{}:M={window},nontrivial={nontrivial},ok={ok}", reference.map_or(String::new(), |r| format!("~{r}"))));
    }
    let elapsed = start.elapsed();
    report("C4", pass, elapsed, BUDGET, &format!("grid={} {}", grid.len(), details.join(" ")));
    assert!(pass, "{details:?}");
    assert!(elapsed <= BUDGET);
}

#[test]
fn c05_dominance_under_xor3() {
    const BUDGET: Duration = Duration::from_secs(120);
    let start = Instant::now();
    let base = catalog::model("mixture-markov").unwrap();
    let image = pushforward_model(&catalog::code("xor3").unwrap(), &base, cap()).unwrap();
    let x = empirical_spectrum(&base, &EstimateConfig::new(1000, 0.02, 5000, 7)).unwrap();
    let y = empirical_spectrum(&image, &EstimateConfig::new(1000, 0.02, 5000, 8)).unwrap();
    let (x, y) = (Spectrum::Estimate(x), Spectrum::Estimate(y));
    let slack = default_slack(&y, &x);
    let r = dominance_check(&y, &x, slack).unwrap();
    let elapsed = start.elapsed();
    let pass = r.dominates();
    report(
        "C5",
        pass,
        elapsed,
        BUDGET,
        &format!("worst_gap={:.4} at tau={:.4} slack={:.4} points={}", r.worst_gap, r.worst_tau, r.slack, r.points),
    );
    assert!(pass);
    assert!(elapsed <= BUDGET);
}

fn h2(p: f64) -> f64 {
    [p, 1.0 - p].iter().filter(|&&x| x > 0.0).map(|x| -x * x.log2()).sum()
}

fn shannon(probs: &[f64]) -> f64 {
    probs.iter().filter(|&&x| x > 0.0).map(|x| -x * x.log2()).sum()
}

#[test]
fn c06_entropy_integral_identity() {
    const TOL: f64 = 1e-9;
    const BUDGET: Duration = Duration::from_secs(1);
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst: f64 = 0.0;
    for _ in 0..10 {
        let parts = rng.random_range(1..=5);
        let mut raw: Vec<f64> = (0..parts).map(|_| rng.random_range(0.05..1.0)).collect();
        let total: f64 = raw.iter().sum();
        raw.iter_mut().for_each(|w| *w /= total);
        let mut components = Vec::new();
        let mut expected = 0.0;
        for &w in &raw {
            if rng.random_bool(0.5) {
                let p: f64 = rng.random_range(0.02..0.98);
                components.push(ProcessModel::iid(binary(), vec![1.0 - p, p]).unwrap());
                expected += w * h2(p);
            } else {
                let a: f64 = rng.random_range(0.02..0.98);
                let b: f64 = rng.random_range(0.02..0.98);
                components
                    .push(ProcessModel::markov(binary(), 1, vec![vec![1.0 - a, a], vec![b, 1.0 - b]]).unwrap());
                // two-state chain: pi = (b, a) / (a + b)
                let pi0 = b / (a + b);
                expected += w * (pi0 * shannon(&[1.0 - a, a]) + (1.0 - pi0) * shannon(&[b, 1.0 - b]));
            }
        }
        let model = ProcessModel::mixture(components, raw.clone()).unwrap();
        let integral = mixture_spectrum(&model).unwrap().entropy_integral();
        worst = worst.max((integral - expected).abs());
    }
    let elapsed = start.elapsed();
    let pass = worst <= TOL;
    report("C6", pass, elapsed, BUDGET, &format!("mixtures=10 max_abs_error={worst:.3e} tol={TOL:e}"));
    assert!(pass);
    assert!(elapsed <= BUDGET);
}

fn decode(mut index: usize, q: usize, len: usize) -> Vec<usize> {
    let mut out = vec![0; len];
    for slot in out.iter_mut().rev() {
        *slot = index % q;
        index /= q;
    }
    out
}

#[test]
fn c07_markov_types() {
    const SAME_TYPE_TOL: f64 = 1e-12;
    const BUDGET: Duration = Duration::from_secs(30);
    let start = Instant::now();
    let models: BTreeMap<usize, Vec<ProcessModel>> = BTreeMap::from([
        (
            2,
            ["markov-asym", "mixture-markov", "xor3-markov", "markov-order2"]
                .iter()
                .map(|n| catalog::model(n).unwrap())
                .collect(),
        ),
        (3, ["ternary-iid", "mixture-ternary"].iter().map(|n| catalog::model(n).unwrap()).collect()),
    ]);
    let mut cases = 0;
    let mut worst: f64 = 0.0;
    let mut failures = Vec::new();
    for (&q, q_models) in &models {
        for k in 0..=2usize {
            let approxes: Vec<MixedApproximation> =
                q_models.iter().map(|m| MixedApproximation::new(m, k, cap()).unwrap()).collect();
            for n in (k + 1)..=8 {
                cases += 1;
                let classes = type_partition(q, n, k, cap()).unwrap();
                // oracle: group sequences by their sorted window lists
                let mut oracle: BTreeMap<Vec<Vec<usize>>, Vec<usize>> = BTreeMap::new();
                let total = q.pow(n as u32);
                for i in 0..total {
                    let x = decode(i, q, n);
                    let mut w: Vec<Vec<usize>> = x.windows(k + 1).map(|w| w.to_vec()).collect();
                    w.sort();
                    oracle.entry(w).or_default().push(i);
                }
                let mut ours: Vec<Vec<usize>> = classes.values().cloned().collect();
                let mut theirs: Vec<Vec<usize>> = oracle.into_values().collect();
                ours.iter_mut().for_each(|c| c.sort());
                ours.sort();
                theirs.sort();
                if ours != theirs {
                    failures.push(format!("partition q={q} n={n} k={k}"));
                }
                let count = type_count_bound(n, k, q, cap()).unwrap();
                let bound = ((n - k + 1) as f64).powi(q.pow(k as u32 + 1) as i32);
                if !(count.pass && (classes.len() as f64) <= bound) {
                    failures.push(format!("count q={q} n={n} k={k}"));
                }
                for approx in &approxes {
                    for members in classes.values() {
                        let probs: Vec<f64> = members
                            .iter()
                            .map(|&i| approx.log_probability(&decode(i, q, n)).map_or(0.0, f64::exp2))
                            .collect();
                        for p in &probs {
                            let diff = (p - probs[0]).abs();
                            worst = worst.max(diff);
                            if diff > SAME_TYPE_TOL {
                                failures.push(format!("same-type q={q} n={n} k={k}"));
                            }
                        }
                    }
                }
            }
        }
    }
    let elapsed = start.elapsed();
    let pass = failures.is_empty();
    report(
        "C7",
        pass,
        elapsed,
        BUDGET,
        &format!("cases={cases} same_type_max_diff={worst:.3e} tol={SAME_TYPE_TOL:e} failures={}", failures.len()),
    );
    assert!(pass, "{failures:?}");
    assert!(elapsed <= BUDGET);
}

#[test]
fn c08_pasted_isomorphism() {
    const MIN_ACCURACY: f64 = 0.999;
    const MAX_TV: f64 = 0.02;
    const BUDGET: Duration = Duration::from_secs(120);
    let start = Instant::now();
    let x = catalog::model("iso-x").unwrap();
    let y = catalog::model("iso-y").unwrap();
    let spectra_equal = mixture_spectrum(&x).unwrap() == mixture_spectrum(&y).unwrap();
    let pair = RegularMixturePair::new(x, y).unwrap();
    let alphabet = pair.source().alphabet().clone();
    let codes = vec![
        CodePair::permutation(alphabet.clone(), vec![1, 0]).unwrap(),
        CodePair::permutation(alphabet, vec![0, 1]).unwrap(),
    ];
    let pasted = paste_codes(pair, codes, ClassifierConfig::new(1000)).unwrap();
    let cert = verify_isomorphism(
        &pasted,
        &VerifyConfig {
            n: 2000,
            num_samples: 5000,
            k_block: 3,
            seed: 11,
            workers: 0,
        },
    )
    .unwrap();
    let elapsed = start.elapsed();
    let pass = cert.round_trip_failure_rate_classified == 0.0
        && cert.classification_accuracy >= MIN_ACCURACY
        && cert.tv_distance <= MAX_TV
        && spectra_equal;
    report(
        "C8",
        pass,
        elapsed,
        BUDGET,
        &format!(
            "round_trip_classified={} accuracy={:.4} tv3={:.5} spectra_equal={spectra_equal}",
            cert.round_trip_failure_rate_classified, cert.classification_accuracy, cert.tv_distance
        ),
    );
    assert!(pass);
    assert!(elapsed <= BUDGET);
}

#[test]
fn c09_equal_spectra_counterexample() {
    const BUDGET: Duration = Duration::from_secs(1);
    let start = Instant::now();
    let x = catalog::model("counterexample-mixture").unwrap();
    let y = catalog::model("counterexample-ergodic").unwrap();
    let first = compare_invariants(&x, &y).unwrap();
    let second = compare_invariants(&x, &y).unwrap();
    let rejected = RegularMixturePair::new(x, y).is_err();
    let elapsed = start.elapsed();
    let pass = first.x_spectrum == first.y_spectrum
        && first.spectra_equal
        && first.x_ergodicity != first.y_ergodicity
        && first.y_ergodicity == Ergodicity::Ergodic
        && first.verdict == InvariantVerdict::NonIsomorphicByErgodicity
        && first.to_json() == second.to_json()
        && rejected;
    report(
        "C9",
        pass,
        elapsed,
        BUDGET,
        &format!("verdict={} x={} y={}", first.verdict.as_str(), first.x_ergodicity.as_str(), first.y_ergodicity.as_str()),
    );
    assert!(pass);
    assert!(elapsed <= BUDGET);
}

fn cli(args: &[&str]) -> Vec<u8> {
    let o = Command::new(env!("CARGO_BIN_EXE_spectrascope"))
        .args(args)
        .env_remove(spectrascope_cli::CAP_ENV)
        .output()
        .unwrap();
    assert!(o.status.code().is_some_and(|c| c == 0 || c == 2), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    o.stdout
}

#[test]
fn c10_reproducible_outputs() {
    let start = Instant::now();
    let dir = tempfile::tempdir().unwrap();
    let x = dir.path().join("x.json");
    let y = dir.path().join("y.json");
    std::fs::write(&x, cli(&["spectrum-estimate", "--model", "bundled:mixture-markov", "--n", "300", "--samples", "800", "--seed", "3"])).unwrap();
    std::fs::write(&y, cli(&["spectrum-estimate", "--model", "bundled:xor3-markov", "--n", "300", "--samples", "800", "--seed", "4"])).unwrap();
    let (xs, ys) = (x.to_str().unwrap(), y.to_str().unwrap());
    let parallel: Vec<Vec<&str>> = vec![
        vec!["spectrum-estimate", "--model", "bundled:mixture-markov", "--n", "300", "--samples", "800", "--seed", "3"],
        vec!["spectrum-estimate", "--model", "bundled:mixture-ternary", "--n", "200", "--samples", "500", "--seed", "9", "--format", "csv"],
        vec!["iso-demo", "--n", "600", "--window", "500", "--samples", "400", "--seed", "5", "--max-tv", "0.1"],
    ];
    let sequential: Vec<Vec<&str>> = vec![
        vec!["spectrum-exact", "--model", "bundled:mixture-markov"],
        vec!["dominance", "--upper", ys, "--lower", xs],
        vec!["verify", "lemma2", "--model", "bundled:markov-asym", "--code", "bundled:xor3", "--n", "3"],
        vec!["verify", "change-of-measure", "--model", "bundled:mixture-ternary", "--n", "6", "--gamma", "0.2"],
        vec!["verify", "types", "--n", "6", "--k", "1", "--model", "bundled:mixture-markov"],
        vec!["verify", "hamming", "--n", "24", "--beta", "0.2"],
        vec!["iso-demo", "--demo", "counterexample"],
        vec!["entropy", "--model", "bundled:xor3-markov"],
    ];
    let mut mismatches = Vec::new();
    for args in &parallel {
        let one: Vec<&str> = args.iter().copied().chain(["--workers", "1"]).collect();
        let four: Vec<&str> = args.iter().copied().chain(["--workers", "4"]).collect();
        let a = cli(&one);
        if a != cli(&four) || a != cli(&one) || a.is_empty() {
            mismatches.push(args[0]);
        }
    }
    for args in &sequential {
        let a = cli(args);
        if a != cli(args) || a.is_empty() {
            mismatches.push(args[0]);
        }
    }
    let pass = mismatches.is_empty();
    let elapsed = start.elapsed();
    report(
        "C10",
        pass,
        elapsed,
        Duration::from_secs(120),
        &format!("commands={} mismatches={mismatches:?}", parallel.len() + sequential.len()),
    );
    assert!(pass);
}

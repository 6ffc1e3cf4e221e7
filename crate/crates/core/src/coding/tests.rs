use super::*;
use crate::catalog;
use crate::enumerate::{decode, encode};
use crate::process::Alphabet;

fn cap() -> EnumerationCap {
    EnumerationCap::default()
}

fn binom(n: u64, k: u64) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

#[test]
fn binary_entropy_values() {
    assert_eq!(binary_entropy(0.5).unwrap(), 1.0);
    assert_eq!(binary_entropy(0.0).unwrap(), 0.0);
    assert!((binary_entropy(0.1).unwrap() - 0.4689956).abs() < 1e-7);
    assert!(binary_entropy(1.5).is_err());
}

#[test]
fn hamming_distance_values() {
    assert_eq!(hamming_distance(&[0, 1, 0, 1], &[0, 1, 1, 1]).unwrap(), 1);
    assert!(hamming_distance(&[0], &[0, 1]).is_err());
}

#[test]
fn mismatch_rates() {
    let fair = catalog::model("fair-coin").unwrap();
    let id = catalog::code("identity").unwrap();
    let zero = catalog::code("constant-zero").unwrap();
    let flip = catalog::code("bit-flip").unwrap();
    let exact = MismatchMethod::Exact { cap: cap() };
    assert!((mismatch_rate(&id, &zero, &fair, exact).unwrap() - 0.5).abs() < 1e-15);
    assert_eq!(mismatch_rate(&flip, &id, &fair, exact).unwrap(), 1.0);
    let mc = MismatchMethod::MonteCarlo { samples: 20_000, seed: 4, workers: 0 };
    assert!((mismatch_rate(&id, &zero, &fair, mc).unwrap() - 0.5).abs() < 0.02);
    // majority-3 differs from the centre symbol iff both neighbours differ
    // from it: probability 2 * p (1-p)^2 + ... on Bernoulli(p)
    let b = catalog::model("bernoulli-0.25").unwrap();
    let maj = catalog::code("majority3").unwrap();
    let p: f64 = 0.25;
    let oracle = p * (1.0 - p) * (1.0 - p) + (1.0 - p) * p * p;
    assert!((mismatch_rate(&maj, &id, &b, exact).unwrap() - oracle).abs() < 1e-15);
}

#[test]
fn pushforward_matches_preimage_sums() {
    let code = SlidingBlockCode::xor(1);
    for name in ["fair-coin", "bernoulli-0.25", "markov-asym", "markov-order2"] {
        let base = catalog::model(name).unwrap();
        let image = pushforward_model(&code, &base, cap()).unwrap();
        for n in 1..=8 {
            let mut oracle = vec![0.0; 1 << n];
            for x in 0..(1usize << (n + 2)) {
                let xs = decode(x, 2, n + 2);
                oracle[encode(&code.apply_symbols(&xs), 2)] += base.log_prob_symbols(&xs).exp2();
            }
            for (y, &p) in oracle.iter().enumerate() {
                let direct = image.log_prob_symbols(&decode(y, 2, n)).exp2();
                assert!((direct - p).abs() < 1e-10, "{name} n={n}");
            }
        }
        for n in 1..=10 {
            let total: f64 = image.block_distribution(n, cap()).unwrap().iter().sum();
            assert!((total - 1.0).abs() < 1e-9);
        }
    }
}

#[test]
fn pushforward_of_factor_and_mixture() {
    let flip = catalog::code("bit-flip").unwrap();
    let xor = catalog::model("xor3-markov").unwrap();
    let twice = pushforward_model(&flip, &xor, cap()).unwrap();
    let p = crate::process::SamplePath::from_labels(Alphabet::binary().shared(), "0110100").unwrap();
    let q = crate::process::SamplePath::from_labels(Alphabet::binary().shared(), "1001011").unwrap();
    assert!((twice.log_probability(&p).unwrap() - xor.log_probability(&q).unwrap()).abs() < 1e-12);
    let mix = catalog::model("iso-x").unwrap();
    let flipped = pushforward_model(&flip, &mix, cap()).unwrap();
    let weights: Vec<f64> = flipped.components().iter().map(|c| c.0).collect();
    assert_eq!(weights, vec![0.7, 0.3]);
}

#[test]
fn coupling_marginals() {
    let cases = [("bernoulli-0.25", "xor3", 2), ("markov-asym", "bit-flip", 3), ("fair-coin", "majority3", 2)];
    for (m, c, n) in cases {
        let model = catalog::model(m).unwrap();
        let code = catalog::code(c).unwrap();
        let coupling = Coupling::exact_image(&model, &code, n, cap()).unwrap();
        assert!((coupling.total_mass() - 1.0).abs() < 1e-12);
        for (a, b) in coupling.x_marginal().iter().zip(coupling.x_law()) {
            assert!((a - b).abs() < 1e-12);
        }
        let image = pushforward_model(&code, &model, cap()).unwrap();
        let law = image.block_distribution(coupling.y_block_len(), cap()).unwrap();
        for (a, b) in coupling.y_law().iter().zip(&law) {
            assert!((a - b).abs() < 1e-12);
        }
        for &(x, y, _) in coupling.joint() {
            assert_eq!(coupling.approx_image(x), y);
        }
    }
}

#[test]
fn reference_coupling_has_positive_mismatch() {
    let model = catalog::model("bernoulli-0.25").unwrap();
    let id = catalog::code("identity").unwrap();
    let maj = catalog::code("majority3").unwrap();
    let c = Coupling::with_reference(&model, &id, &maj, 2, cap()).unwrap();
    let p: f64 = 0.25;
    assert!((c.epsilon() - (p * (1.0 - p) * (1.0 - p) + (1.0 - p) * p * p)).abs() < 1e-15);
    assert!((c.total_mass() - 1.0).abs() < 1e-12);
    assert!(c.joint().iter().any(|&(x, y, _)| c.approx_image(x) != y));
}

#[test]
fn finite_bound_on_default_grid() {
    let grid = BoundGrid::default();
    assert_eq!(grid.len(), 54);
    let cases = [("bernoulli-0.25", "identity", 5), ("markov-asym", "bit-flip", 4), ("fair-coin", "xor3", 3)];
    for (m, c, n) in cases {
        let model = catalog::model(m).unwrap();
        let code = catalog::code(c).unwrap();
        let reports = verify_finite_bound_grid(&model, &code, None, n, &grid, cap()).unwrap();
        assert_eq!(reports.len(), 54);
        let informative = reports.iter().filter(|r| !r.trivially_pass).count();
        assert_eq!(informative, 18, "{m}");
        for r in &reports {
            assert!(r.pass && r.chain_pass, "{m} {c}: {r:?}");
            assert_eq!(r.epsilon, 0.0);
            assert_eq!(r.p_not_c, 0.0);
        }
    }
}

#[test]
fn finite_bound_with_reference_code() {
    let model = catalog::model("bernoulli-0.25").unwrap();
    let id = catalog::code("identity").unwrap();
    let maj = catalog::code("majority3").unwrap();
    let reports = verify_finite_bound_grid(&model, &id, Some(&maj), 3, &BoundGrid::default(), cap()).unwrap();
    for r in &reports {
        assert!(r.pass && r.chain_pass, "{r:?}");
        assert!(r.epsilon > 0.0);
    }
}

#[test]
fn finite_bound_exponent_sign() {
    let model = catalog::model("fair-coin").unwrap();
    let id = catalog::code("identity").unwrap();
    let r = verify_finite_bound(&model, &id, None, 2, 0.5, 0.05, 0.25, cap()).unwrap();
    assert!(r.trivially_pass && r.exponent_term >= 1.0);
    let r = verify_finite_bound(&model, &id, None, 2, 0.5, 0.5, 0.01, cap()).unwrap();
    let e = 0.5 - binary_entropy(0.01).unwrap() - 0.01;
    assert!(!r.trivially_pass && (r.exponent - e).abs() < 1e-15);
    assert!(verify_finite_bound(&model, &id, None, 2, 0.5, 0.5, 0.5, cap()).is_err());
}

#[test]
fn hamming_ball_counts() {
    let r = hamming_ball_bound_check(5, 0.2, 2).unwrap();
    assert_eq!((r.radius, r.count), (1, 6));
    assert!(r.pass);
    for (n, beta, q) in [(5, 0.2, 2), (7, 2.0 / 7.0, 3), (9, 0.4, 2), (6, 0.3, 4), (11, 0.1, 2)] {
        let r = hamming_ball_bound_check(n, beta, q).unwrap();
        let oracle = (0..q.pow(n as u32))
            .filter(|&y| decode(y, q, n).iter().filter(|&&s| s != 0).count() as f64 <= n as f64 * beta + 1e-9)
            .count() as u128;
        assert_eq!(r.count, oracle, "N={n} beta={beta} q={q}");
        assert!(r.pass);
    }
    assert!(hamming_ball_bound_check(5, 0.5, 2).is_err());
}

#[test]
fn change_of_measure_examples() {
    let fair = catalog::model("fair-coin").unwrap();
    let b = catalog::model("bernoulli-0.1").unwrap();
    let degenerate = ProcessModel::mixture(vec![fair.clone(), b.clone()], vec![1.0, 0.0]).unwrap();
    let r = verify_change_of_measure(&degenerate, 0, 8, 0.05, cap()).unwrap();
    assert_eq!(r.lhs, 0.0);
    let mix = ProcessModel::mixture(vec![fair, b], vec![0.5, 0.5]).unwrap();
    let n = 8u64;
    for gamma in [0.5, 0.05] {
        let r = verify_change_of_measure(&mix, 1, n as usize, gamma, cap()).unwrap();
        let oracle: f64 = (0..=n)
            .map(|k| {
                let pt = 0.1f64.powi(k as i32) * 0.9f64.powi((n - k) as i32);
                let pm = 0.5 * 0.5f64.powi(n as i32) + 0.5 * pt;
                if (pm / pt).log2() / n as f64 >= gamma {
                    binom(n, k) * pt
                } else {
                    0.0
                }
            })
            .sum();
        assert!((r.lhs - oracle).abs() < 1e-12, "gamma {gamma}: {} vs {oracle}", r.lhs);
        assert!(r.pass);
        let r0 = verify_change_of_measure(&mix, 0, n as usize, gamma, cap()).unwrap();
        assert!(r0.pass);
    }
}

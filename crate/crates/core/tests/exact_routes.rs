use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;
use tasep_core::exact::{
    stationary_weights_matrix, stationary_weights_recursive, tle_enumerate, tle_top_marginal,
};
use tasep_core::sampler::{partition_sum_plain, PartitionTable};
use tasep_core::verify::{rule_spread, run_suite, Corruption, SuiteConfig};
use tasep_core::{normalization_k, Params};

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

#[test]
fn one_site_law() {
    let p = stationary_weights_recursive(1, 2.0, 1.0).unwrap().probabilities_f64();
    assert!((p[1] - 0.4).abs() < 1e-15);
    let p = stationary_weights_recursive(2, 1.0, 1.0).unwrap().probabilities_f64();
    assert!(p.iter().all(|&x| (x - 0.25).abs() < 1e-15));
}

#[test]
fn rational_tables_agree_exactly() {
    for n in 1..=7 {
        let (a, b) = (q(3, 2), q(5, 7));
        let rec = stationary_weights_recursive(n, a.clone(), b.clone()).unwrap();
        let tle = tle_top_marginal(n, a.clone(), b.clone()).unwrap();
        assert_eq!(rec.weights, tle);
        let z = partition_sum_plain(n, a, b).unwrap();
        assert_eq!(rec.z, z);
    }
}

#[test]
fn enumerated_pairs_sum_to_marginal() {
    let t = tle_enumerate(5, 0.7f64, 1.9).unwrap();
    let direct = tle_top_marginal(5, 0.7, 1.9).unwrap();
    for (x, y) in t.top_marginal().iter().zip(&direct) {
        assert!((x - y).abs() <= 1e-12 * y);
    }
}

#[test]
fn log_z_per_site_approaches_normalization() {
    assert!((PartitionTable::build(12, 1.0, 1.0).unwrap().log_z() / 12.0 - 4f64.ln()).abs() < 1e-14);
    for &(a, b) in &[(0.5, 0.5), (2.0, 1.0), (1.0, 3.0), (3.0, 3.0), (0.4, 1.7)] {
        let k = normalization_k(a, b).unwrap();
        let gap = |n: usize| (PartitionTable::build(n, a, b).unwrap().log_z() / n as f64 + k).abs();
        let (g1, g2) = (gap(200), gap(3200));
        assert!(g2 < g1, "({a},{b}): {g1} then {g2}");
        assert!(g2 < 5e-3, "({a},{b}): {g2}");
    }
}

#[test]
fn suite_passes_and_detects_corruption() {
    let cfg = SuiteConfig { sizes: vec![1, 4, 6], ..SuiteConfig::default() };
    assert!(run_suite(&cfg).unwrap().pass);
    let bad = SuiteConfig { corrupt: Some(Corruption { n: 4, index: 5, factor: 1.001 }), ..cfg };
    let report = run_suite(&bad).unwrap();
    assert!(!report.pass);
    assert!(report.checks.iter().filter(|c| !c.pass).all(|c| c.n == 4));
}

#[test]
fn caps_are_enforced() {
    assert!(stationary_weights_recursive(21, 1.0, 1.0).is_err());
    assert!(tle_top_marginal(17, 1.0, 1.0).is_err());
    assert!(tle_enumerate(13, 1.0, 1.0).is_err());
    assert!(stationary_weights_matrix(17, 1.0, 1.0).is_err());
    assert!(stationary_weights_recursive(0, 1.0, 1.0).is_err());
}

proptest! {
    #[test]
    fn rates_round_trip(alpha in 0.01f64..0.99, beta in 0.01f64..0.99) {
        let p = Params::from_rates(alpha, beta).unwrap();
        let back = Params::from_ab(p.a, p.b).unwrap();
        prop_assert!((back.alpha - alpha).abs() <= 1e-14);
        prop_assert!((back.beta - beta).abs() <= 1e-14);
    }

    #[test]
    fn alternative_rules_agree(a in 0.1f64..5.0, b in 0.1f64..5.0, n in 2usize..8) {
        prop_assert!(rule_spread(n, a, b).unwrap() <= 1e-12);
    }

    #[test]
    fn matrix_route_matches(a in 0.1f64..5.0, b in 0.1f64..5.0, n in 1usize..9) {
        let m = stationary_weights_matrix(n, a, b).unwrap();
        let r = stationary_weights_recursive(n, a, b).unwrap();
        for (x, y) in m.weights.iter().zip(&r.weights) {
            prop_assert!((x - y).abs() <= 1e-10 * y);
        }
    }
}

//! Test statistics against direct formulas, invariances and null calibration.

mod common;
mod oracles;

use common::read_fixture;
use listgaze::stats::{
    kruskal_wallis, one_way_anova, parse_responses_csv, pearson, pearson_test, relative_increase, search_summary,
    AccuracyMode, Df, Feature,
};
use listgaze::stimulus::Magnitude;
use proptest::prelude::*;
use rand::Rng;
use rand_distr::StandardNormal;

fn random_groups(rng: &mut impl Rng, tied: bool) -> Vec<Vec<f64>> {
    let k = rng.random_range(2..6);
    (0..k)
        .map(|_| {
            (0..rng.random_range(2..12))
                .map(|_| {
                    let v: f64 = rng.sample(StandardNormal);
                    if tied { (v * 2.0).round() } else { v }
                })
                .collect()
        })
        .collect()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

#[test]
fn kruskal_wallis_hand_example() {
    let r = kruskal_wallis(&[vec![1.0, 2.0, 3.0], vec![4.0, 5.0, 6.0]]).unwrap();
    // 12/(6·7) · (3·(2 − 3.5)² + 3·(5 − 3.5)²) = 27/7
    assert!((r.statistic - 27.0 / 7.0).abs() < 1e-9);
    assert_eq!(r.df, Df::One(1.0));
    // chi-square(1) survival at 27/7 = erfc(sqrt(27/14))
    assert!((r.p_value - 0.049534613435626706).abs() < 1e-9);
}

#[test]
fn kruskal_wallis_matches_rank_counting_oracle() {
    let mut rng = common::rng(21);
    for trial in 0..300 {
        let groups = random_groups(&mut rng, trial % 2 == 0);
        let pooled: Vec<f64> = groups.iter().flatten().copied().collect();
        if pooled.iter().all(|v| *v == pooled[0]) {
            continue;
        }
        let got = kruskal_wallis(&groups).unwrap().statistic;
        assert!((got - oracles::kruskal_wallis_h(&groups)).abs() < 1e-9 * oracles::kruskal_wallis_h(&groups).max(1.0), "trial {trial}");
    }
}

#[test]
fn anova_matches_decomposition_oracle_and_reference_p() {
    let mut rng = common::rng(22);
    for trial in 0..300 {
        let groups = random_groups(&mut rng, false);
        let got = one_way_anova(&groups).unwrap().statistic;
        assert!(rel(got, oracles::anova_f(&groups)) < 1e-9, "trial {trial}");
    }
    // 3 groups of 5 at F = 3.885294, the tabulated 5% critical value of F(2, 12):
    // groups 0..4 shifted by 0, +d, -d give MS_within = 2.5, MS_between = 5d², F = 2d²
    let d = (3.885294f64 / 2.0).sqrt();
    let scaled: Vec<Vec<f64>> = [0.0, d, -d].iter().map(|s| (0..5).map(|v| v as f64 + s).collect()).collect();
    let r = one_way_anova(&scaled).unwrap();
    assert!((r.statistic - 3.885294).abs() < 1e-5, "{}", r.statistic);
    assert!((r.p_value - 0.05).abs() < 1e-5, "{}", r.p_value);
    assert_eq!(r.df, Df::Pair(2.0, 12.0));
}

#[test]
fn anova_is_invariant_under_affine_maps() {
    let mut rng = common::rng(23);
    for _ in 0..200 {
        let groups = random_groups(&mut rng, false);
        let base = one_way_anova(&groups).unwrap();
        let a: f64 = rng.random_range(0.01..100.0) * if rng.random_bool(0.5) { -1.0 } else { 1.0 };
        let b: f64 = rng.random_range(-1e3..1e3);
        let mapped: Vec<Vec<f64>> = groups.iter().map(|g| g.iter().map(|v| a * v + b).collect()).collect();
        let r = one_way_anova(&mapped).unwrap();
        assert!(rel(r.statistic, base.statistic) < 1e-9);
        // scaling by a power of two is exact in floating point
        let doubled: Vec<Vec<f64>> = groups.iter().map(|g| g.iter().map(|v| v * 8.0).collect()).collect();
        assert_eq!(one_way_anova(&doubled).unwrap().statistic, base.statistic);
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 1000, ..ProptestConfig::default() })]

    #[test]
    fn kruskal_wallis_ignores_monotone_transforms(
        groups in prop::collection::vec(prop::collection::vec(-50i32..50, 1..8), 2..5)
    ) {
        let groups: Vec<Vec<f64>> = groups.iter().map(|g| g.iter().map(|v| *v as f64).collect()).collect();
        let mapped: Vec<Vec<f64>> =
            groups.iter().map(|g| g.iter().map(|v| (v / 10.0).exp() + v.powi(3)).collect()).collect();
        let (a, b) = (kruskal_wallis(&groups).unwrap(), kruskal_wallis(&mapped).unwrap());
        prop_assert_eq!(a.statistic.to_bits(), b.statistic.to_bits());
        prop_assert_eq!(a.p_value.to_bits(), b.p_value.to_bits());
    }

    #[test]
    fn pearson_properties(
        pairs in prop::collection::vec((-1e3f64..1e3, -1e3f64..1e3), 3..40),
        a in 0.1f64..10.0,
        b in -100f64..100.0,
    ) {
        let (x, y): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
        prop_assume!(x.iter().any(|v| *v != x[0]) && y.iter().any(|v| *v != y[0]));
        let r = pearson(&x, &y).unwrap();
        prop_assert!((-1.0..=1.0).contains(&r));
        prop_assert!((r - pearson(&y, &x).unwrap()).abs() < 1e-12);
        let mapped: Vec<f64> = x.iter().map(|v| a * v + b).collect();
        prop_assert!((pearson(&mapped, &y).unwrap() - r).abs() < 1e-9);
        let negated: Vec<f64> = x.iter().map(|v| -v).collect();
        prop_assert!((pearson(&negated, &y).unwrap() + r).abs() < 1e-12);
        prop_assert!((pearson(&x, &mapped).unwrap() - 1.0).abs() < 1e-9);
    }
}

#[test]
fn pearson_hand_example_and_test() {
    assert!((pearson(&[1.0, 2.0, 3.0], &[1.0, 3.0, 2.0]).unwrap() - 0.5).abs() < 1e-12);
    // r = 0 exactly: t = 0 and p = 1
    let r = pearson_test(&[1.0, 2.0, 3.0, 4.0], &[1.0, -1.0, -1.0, 1.0]).unwrap();
    assert_eq!(r.statistic, 0.0);
    assert!((r.p_value - 1.0).abs() < 1e-12);
    assert!(pearson(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]).is_err());
}

#[test]
fn null_p_values_are_uniform() {
    let mut rng = common::rng(500);
    let (mut kw, mut anova) = (Vec::new(), Vec::new());
    for _ in 0..500 {
        let groups: Vec<Vec<f64>> =
            (0..3).map(|_| (0..10).map(|_| rng.sample::<f64, _>(StandardNormal)).collect()).collect();
        kw.push(kruskal_wallis(&groups).unwrap().p_value);
        anova.push(one_way_anova(&groups).unwrap().p_value);
    }
    let (dk, da) = (oracles::ks_uniform(kw), oracles::ks_uniform(anova));
    assert!(dk < 0.1, "kruskal-wallis KS {dk}");
    assert!(da < 0.1, "anova KS {da}");
}

#[test]
fn bundled_responses_reproduce_search_summary() {
    let responses = parse_responses_csv(&read_fixture("responses.csv")).unwrap();
    let summary = search_summary(&responses, AccuracyMode::Precision).unwrap();
    let cell = |v: Magnitude, f: Feature| summary.cells.iter().find(|c| c.variant == v && c.feature == f).unwrap();
    let tag1 = cell(Magnitude::TypeI, Feature::Tag);
    assert_eq!(tag1.first.mean_ms, Some(4220.0));
    assert!((tag1.accuracy - 0.98).abs() < 1e-12);
    let tag2 = cell(Magnitude::TypeII, Feature::Tag);
    assert_eq!(tag2.first.mean_ms, Some(19840.0));
    let inc = summary.relative_increase.iter().find(|r| r.feature == Feature::Tag).unwrap();
    assert_eq!(format!("{:.2}", inc.percent), "370.14");
    assert_eq!(inc.percent, relative_increase(4220.0, 19840.0));
}

//! GBVS Markov chains and their equilibria against dense oracles.

mod common;
mod oracles;

use std::time::Instant;

use listgaze::imaging::{ChannelKind, FeatureChannel};
use listgaze::saliency::{build_chain, equilibrium, ChainMode, GbvsParams, TransitionMatrix};
use oracles::{dense_stationary, linf, random_chain};
use rand::seq::SliceRandom;
use rand::Rng;

#[test]
fn two_by_two_activation_chain_matches_hand_formula() {
    let params = GbvsParams { grid_width: 4, ..GbvsParams::default() };
    let values = [1.0, 1.0, 1.0, 2.0];
    let f = FeatureChannel::new(2, 2, values.to_vec(), ChannelKind::Intensity).unwrap();
    let chain = build_chain(&f, &params, ChainMode::Activation).unwrap();

    let sigma = params.sigma_frac * params.grid_width as f64;
    let eps = params.epsilon;
    let mut oracle = [[0.0f64; 4]; 4];
    for a in 0..4 {
        for b in 0..4 {
            let (ar, ac, br, bc) = ((a / 2) as f64, (a % 2) as f64, (b / 2) as f64, (b % 2) as f64);
            let d = (((values[a] + eps) / (values[b] + eps)).ln()).abs().max(eps);
            oracle[a][b] = d * (-((ar - br).powi(2) + (ac - bc).powi(2)) / (2.0 * sigma * sigma)).exp();
        }
        let s: f64 = oracle[a].iter().sum();
        oracle[a].iter_mut().for_each(|v| *v /= s);
    }
    for a in 0..4 {
        for b in 0..4 {
            assert!((chain.get(a, b) - oracle[a][b]).abs() < 1e-15, "({a},{b})");
        }
        assert!((chain.row(a).iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }
    assert!(chain.entries().iter().all(|v| *v > 0.0));
}

#[test]
fn constant_feature_chain_is_flip_symmetric() {
    let params = GbvsParams::default();
    let (w, h) = (6, 4);
    let f = FeatureChannel::constant(w, h, 0.3, ChannelKind::Intensity);
    let chain = build_chain(&f, &params, ChainMode::Activation).unwrap();
    let flip = |i: usize| (i / w) * w + (w - 1 - i % w);
    for a in 0..w * h {
        for b in 0..w * h {
            // equal up to summation order in the row normalization
            assert!((chain.get(a, b) - chain.get(flip(a), flip(b))).abs() < 1e-15);
        }
    }
}

#[test]
fn birth_death_chain() {
    let p = TransitionMatrix::new(3, vec![0.5, 0.5, 0.0, 0.25, 0.5, 0.25, 0.0, 0.5, 0.5]).unwrap();
    let pi = equilibrium(&p, &GbvsParams::default()).unwrap();
    assert!(linf(&pi, &[0.25, 0.5, 0.25]) < 1e-9);
}

#[test]
fn sixty_four_node_chain_matches_dense_solve() {
    let mut rng = common::rng(64);
    let p = random_chain(&mut rng, 64);
    let pi = equilibrium(&p, &GbvsParams::default()).unwrap();
    assert!(linf(&pi, &dense_stationary(&p)) < 1e-8);
    assert!((pi.iter().sum::<f64>() - 1.0).abs() < 1e-10);
    assert!(pi.iter().all(|v| *v >= 0.0));
}

#[test]
fn fifty_random_chains_match_dense_solve_quickly() {
    let mut rng = common::rng(50);
    let start = Instant::now();
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let n = rng.random_range(2..=64);
        let p = random_chain(&mut rng, n);
        let pi = equilibrium(&p, &GbvsParams::default()).unwrap();
        worst = worst.max(linf(&pi, &dense_stationary(&p)));
    }
    assert!(worst < 1e-8, "worst L-inf {worst:e}");
    assert!(start.elapsed().as_secs_f64() < 5.0);
}

#[test]
fn equilibrium_permutes_with_node_labels() {
    let mut rng = common::rng(16);
    let params = GbvsParams::default();
    for _ in 0..20 {
        let n = 16;
        let p = random_chain(&mut rng, n);
        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(&mut rng);
        // node i of the relabeled chain is node perm[i] of the original
        let mut entries = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                entries[i * n + j] = p.get(perm[i], perm[j]);
            }
        }
        let q = TransitionMatrix::new(n, entries).unwrap();
        let (pi, qi) = (equilibrium(&p, &params).unwrap(), equilibrium(&q, &params).unwrap());
        for i in 0..n {
            assert!((qi[i] - pi[perm[i]]).abs() < 1e-10);
        }
    }
}

#[test]
fn activation_chain_ignores_feature_scale_without_epsilon() {
    let mut rng = common::rng(3);
    let params = GbvsParams { epsilon: 0.0, ..GbvsParams::default() };
    let values: Vec<f64> = (0..48).map(|_| rng.random::<f64>() + 0.1).collect();
    let f = FeatureChannel::new(8, 6, values.clone(), ChannelKind::Intensity).unwrap();
    let g = FeatureChannel::new(8, 6, values.iter().map(|v| v * 37.5).collect(), ChannelKind::Intensity).unwrap();
    let a = build_chain(&f, &params, ChainMode::Activation).unwrap();
    let b = build_chain(&g, &params, ChainMode::Activation).unwrap();
    assert!(linf(a.entries(), b.entries()) < 1e-12);
}

#[test]
fn rejects_non_stochastic_and_reports_non_convergence() {
    assert!(TransitionMatrix::new(2, vec![0.5, 0.4, 0.5, 0.5]).is_err());
    // a periodic chain never settles from a non-uniform start
    let flip = TransitionMatrix::new(2, vec![0.0, 1.0, 1.0, 0.0]).unwrap();
    let params = GbvsParams { max_iters: 50, ..GbvsParams::default() };
    match listgaze::saliency::equilibrium_from(&flip, &[0.9, 0.1], &params) {
        Err(listgaze::Error::NoConvergence { iterations, residual }) => {
            assert_eq!(iterations, 50);
            assert!(residual > 0.5);
        }
        other => panic!("{other:?}"),
    }
}

//! Brute-force reference implementations shared by the integration tests and
//! the acceptance target. Written from the definitions, not from library code.
#![allow(dead_code)]

use listgaze::gaze::{Fixation, GazeSample};
use listgaze::saliency::TransitionMatrix;
use listgaze::stimulus::AoiLayout;
use nalgebra::{DMatrix, DVector};
use rand::Rng;

/// Stationary distribution from a dense solve of (Pᵀ − I)x = 0 with the
/// last equation replaced by Σx = 1.
pub fn dense_stationary(p: &TransitionMatrix) -> Vec<f64> {
    let n = p.n();
    let mut a = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            a[(i, j)] = p.get(j, i) - if i == j { 1.0 } else { 0.0 };
        }
    }
    for j in 0..n {
        a[(n - 1, j)] = 1.0;
    }
    let mut b = DVector::<f64>::zeros(n);
    b[n - 1] = 1.0;
    a.lu().solve(&b).expect("ergodic chain has a unique solution").iter().copied().collect()
}

/// Dense row-stochastic matrix with strictly positive entries.
pub fn random_chain(rng: &mut impl Rng, n: usize) -> TransitionMatrix {
    let mut entries: Vec<f64> = (0..n * n).map(|_| rng.random::<f64>() + 1e-3).collect();
    for row in entries.chunks_mut(n) {
        let s: f64 = row.iter().sum();
        row.iter_mut().for_each(|v| *v /= s);
    }
    TransitionMatrix::new(n, entries).unwrap()
}

pub fn linf(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Webcam-like trace: dwell clusters joined by saccades, with jitter and
/// uneven sampling.
pub fn random_trace(rng: &mut impl Rng) -> Vec<GazeSample> {
    let mut out = Vec::new();
    let mut t = rng.random_range(0..200u64);
    for _ in 0..rng.random_range(1..25) {
        let (cx, cy): (f64, f64) = (rng.random_range(0.0..800.0), rng.random_range(0.0..2480.0));
        let jitter: f64 = rng.random_range(0.0..70.0);
        for _ in 0..rng.random_range(1..15) {
            let x = (cx + rng.random_range(-jitter..=jitter)).round();
            let y = (cy + rng.random_range(-jitter..=jitter)).round();
            out.push(GazeSample { participant: 1, stimulus: 1, t, x, y });
            t += rng.random_range(20..70);
        }
    }
    out
}

fn dispersion(window: &[GazeSample]) -> f64 {
    let span = |v: Vec<f64>| v.iter().cloned().fold(f64::MIN, f64::max) - v.iter().cloned().fold(f64::MAX, f64::min);
    span(window.iter().map(|s| s.x).collect()) + span(window.iter().map(|s| s.y).collect())
}

/// I-DT recomputing every window from scratch:
/// `(start, duration, sample_count, cx, cy)` per fixation.
pub fn fixations(s: &[GazeSample], max_dispersion: f64, min_duration: u64) -> Vec<(u64, u64, usize, f64, f64)> {
    let mut out = Vec::new();
    let mut i = 0;
    while i < s.len() {
        let mut j = i;
        while j + 1 < s.len() && dispersion(&s[i..=j + 1]) <= max_dispersion {
            j += 1;
        }
        if j > i && s[j].t - s[i].t >= min_duration {
            let n = (j - i + 1) as f64;
            let cx = s[i..=j].iter().map(|p| p.x).sum::<f64>() / n;
            let cy = s[i..=j].iter().map(|p| p.y).sum::<f64>() / n;
            out.push((s[i].t, s[j].t - s[i].t, j - i + 1, cx, cy));
            i = j + 1;
        } else {
            i += 1;
        }
    }
    out
}

/// `(ttff, fixation_count, time_spent, revisit_count)` per AOI, scanning the
/// fixation sequence once per AOI.
pub fn aoi_metrics(fixations: &[Fixation], layout: &AoiLayout) -> Vec<(Option<u64>, usize, u64, usize)> {
    let inside = |f: &Fixation, k: usize| {
        let r = layout.aois[k].rect;
        f.x >= r.x as f64 && f.x < (r.x + r.w) as f64 && f.y >= r.y as f64 && f.y < (r.y + r.h) as f64
    };
    (0..layout.aois.len())
        .map(|k| {
            let hits: Vec<bool> = fixations.iter().map(|f| inside(f, k)).collect();
            let ttff = fixations.iter().find(|f| inside(f, k)).map(|f| f.start);
            let count = hits.iter().filter(|h| **h).count();
            let time = fixations.iter().filter(|f| inside(f, k)).map(|f| f.duration).sum();
            let runs = (0..hits.len()).filter(|&i| hits[i] && (i == 0 || !hits[i - 1])).count();
            (ttff, count, time, runs.saturating_sub(1))
        })
        .collect()
}

/// Kruskal-Wallis H with tie correction from O(n²) rank counting.
pub fn kruskal_wallis_h(groups: &[Vec<f64>]) -> f64 {
    let pooled: Vec<f64> = groups.iter().flatten().copied().collect();
    let n = pooled.len() as f64;
    let rank = |v: f64| {
        let below = pooled.iter().filter(|&&u| u < v).count() as f64;
        let equal = pooled.iter().filter(|&&u| u == v).count() as f64;
        below + (equal + 1.0) / 2.0
    };
    let mean_rank = (n + 1.0) / 2.0;
    let mut h = 0.0;
    for g in groups {
        let r = g.iter().map(|v| rank(*v)).sum::<f64>() / g.len() as f64;
        h += g.len() as f64 * (r - mean_rank).powi(2);
    }
    h *= 12.0 / (n * (n + 1.0));
    let mut seen: Vec<f64> = Vec::new();
    let mut ties = 0.0;
    for v in &pooled {
        if !seen.contains(v) {
            seen.push(*v);
            let t = pooled.iter().filter(|u| *u == v).count() as f64;
            ties += t * t * t - t;
        }
    }
    h / (1.0 - ties / (n * n * n - n))
}

/// One-way ANOVA F from the between/within split of the total sum of squares.
pub fn anova_f(groups: &[Vec<f64>]) -> f64 {
    let all: Vec<f64> = groups.iter().flatten().copied().collect();
    let n = all.len() as f64;
    let k = groups.len() as f64;
    let grand = all.iter().sum::<f64>() / n;
    let sst: f64 = all.iter().map(|v| (v - grand).powi(2)).sum();
    let ssw: f64 = groups
        .iter()
        .map(|g| {
            let m = g.iter().sum::<f64>() / g.len() as f64;
            g.iter().map(|v| (v - m).powi(2)).sum::<f64>()
        })
        .sum();
    ((sst - ssw) / (k - 1.0)) / (ssw / (n - k))
}

/// Kolmogorov-Smirnov distance of a sample from Uniform(0, 1).
pub fn ks_uniform(mut p: Vec<f64>) -> f64 {
    p.sort_by(f64::total_cmp);
    let n = p.len() as f64;
    p.iter()
        .enumerate()
        .map(|(i, v)| (v - i as f64 / n).max((i + 1) as f64 / n - v))
        .fold(0.0, f64::max)
}

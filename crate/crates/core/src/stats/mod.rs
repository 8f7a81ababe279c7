//! Kruskal-Wallis, one-way ANOVA, Pearson correlation and visual-search
//! response summaries.

mod search;

pub use search::{
    parse_responses_csv, relative_increase, search_summary, AccuracyMode, Feature, RelativeIncrease, RtStats,
    SearchResponse, SearchSummary, Selection, SummaryCell, Task, RESPONSES_CSV_HEADER,
};

use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF, FisherSnedecor, StudentsT};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Df {
    One(f64),
    Pair(f64, f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestResult {
    pub statistic: f64,
    pub df: Df,
    pub p_value: f64,
    pub method: String,
}

fn check_groups(groups: &[Vec<f64>], min_len: usize) -> Result<()> {
    if groups.len() < 2 {
        return Err(Error::InsufficientData(format!("need at least 2 groups, found {}", groups.len())));
    }
    for (i, g) in groups.iter().enumerate() {
        if g.len() < min_len {
            return Err(Error::InsufficientData(format!(
                "group {i} has {} samples, need at least {min_len}",
                g.len()
            )));
        }
        if g.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("sample value"));
        }
    }
    Ok(())
}

/// Mid-ranks (1-based, ties averaged) of `values` plus the tie term Σ(t³ − t).
fn mid_ranks(values: &[f64]) -> (Vec<f64>, f64) {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut ties = 0.0;
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        // positions i..=j share the average of ranks i+1..=j+1
        let rank = (i + j + 2) as f64 / 2.0;
        for &k in &order[i..=j] {
            ranks[k] = rank;
        }
        let t = (j - i + 1) as f64;
        ties += t * t * t - t;
        i = j + 1;
    }
    (ranks, ties)
}

/// Kruskal-Wallis H with tie correction; p from chi-square with k − 1 df.
///
/// Depends on the data only through pooled ranks, so any strictly increasing
/// transform of all values gives a bit-identical result.
pub fn kruskal_wallis(groups: &[Vec<f64>]) -> Result<TestResult> {
    check_groups(groups, 1)?;
    let pooled: Vec<f64> = groups.iter().flatten().copied().collect();
    let n = pooled.len() as f64;
    let (ranks, ties) = mid_ranks(&pooled);
    let mut offset = 0;
    let mut sum = 0.0;
    for g in groups {
        let r: f64 = ranks[offset..offset + g.len()].iter().sum();
        sum += r * r / g.len() as f64;
        offset += g.len();
    }
    let correction = 1.0 - ties / (n * n * n - n);
    let df = (groups.len() - 1) as f64;
    let h = if correction <= 0.0 {
        // every value tied: no rank information
        0.0
    } else {
        ((12.0 / (n * (n + 1.0)) * sum - 3.0 * (n + 1.0)) / correction).max(0.0)
    };
    let p = ChiSquared::new(df).expect("df >= 1").sf(h);
    Ok(TestResult {
        statistic: h,
        df: Df::One(df),
        p_value: p.clamp(0.0, 1.0),
        method: "kruskal-wallis".into(),
    })
}

/// One-way ANOVA F = MS_between / MS_within; p from F(k − 1, N − k).
pub fn one_way_anova(groups: &[Vec<f64>]) -> Result<TestResult> {
    check_groups(groups, 2)?;
    let k = groups.len() as f64;
    let n: f64 = groups.iter().map(|g| g.len() as f64).sum();
    let grand = groups.iter().flatten().sum::<f64>() / n;
    let (mut ssb, mut ssw) = (0.0, 0.0);
    for g in groups {
        let m = g.iter().sum::<f64>() / g.len() as f64;
        ssb += g.len() as f64 * (m - grand).powi(2);
        ssw += g.iter().map(|v| (v - m).powi(2)).sum::<f64>();
    }
    if !(ssw > 0.0) {
        return Err(Error::ZeroVariance("within-group variance"));
    }
    let (d1, d2) = (k - 1.0, n - k);
    let f = (ssb / d1) / (ssw / d2);
    let p = FisherSnedecor::new(d1, d2).expect("positive df").sf(f);
    Ok(TestResult {
        statistic: f,
        df: Df::Pair(d1, d2),
        p_value: p.clamp(0.0, 1.0),
        method: "one-way anova".into(),
    })
}

/// Pearson product-moment correlation.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch { expected: (x.len(), 1), found: (y.len(), 1) });
    }
    if x.len() < 3 {
        return Err(Error::InsufficientData(format!("pearson needs at least 3 pairs, found {}", x.len())));
    }
    if x.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("pearson input"));
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if !(sxx > 0.0) || !(syy > 0.0) {
        return Err(Error::ZeroVariance("pearson input"));
    }
    Ok((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

/// Pearson r with a two-sided t-test of r = 0 (n − 2 df).
pub fn pearson_test(x: &[f64], y: &[f64]) -> Result<TestResult> {
    let r = pearson(x, y)?;
    let df = x.len() as f64 - 2.0;
    let p = if r.abs() >= 1.0 {
        0.0
    } else {
        let t = r * (df / (1.0 - r * r)).sqrt();
        2.0 * StudentsT::new(0.0, 1.0, df).expect("df >= 1").sf(t.abs())
    };
    Ok(TestResult {
        statistic: r,
        df: Df::One(df),
        p_value: p.clamp(0.0, 1.0),
        method: "pearson".into(),
    })
}

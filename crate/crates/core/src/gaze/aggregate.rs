use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::AoiMetrics;
use crate::error::{Error, Result};
use crate::stimulus::AoiKind;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    Ttff,
    FixationCount,
    TimeSpent,
    RevisitCount,
}

impl Metric {
    pub const ALL: [Metric; 4] = [Metric::Ttff, Metric::FixationCount, Metric::TimeSpent, Metric::RevisitCount];

    pub fn name(self) -> &'static str {
        match self {
            Metric::Ttff => "ttff",
            Metric::FixationCount => "fixation_count",
            Metric::TimeSpent => "time_spent",
            Metric::RevisitCount => "revisit_count",
        }
    }

    fn value(self, m: &AoiMetrics) -> Option<f64> {
        match self {
            Metric::Ttff => m.ttff.map(|t| t as f64),
            Metric::FixationCount => Some(m.fixation_count as f64),
            Metric::TimeSpent => Some(m.time_spent as f64),
            Metric::RevisitCount => Some(m.revisit_count as f64),
        }
    }
}

/// Which products count as "distant" from an outlier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DistantRule {
    /// Positions exactly two away.
    #[default]
    PlusMinusTwo,
    /// Every position outside the near set.
    Remaining,
}

/// Near set = outlier and its immediate neighbours; distant set per [`DistantRule`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NeighborGrouping {
    pub outlier: usize,
    pub near: Vec<usize>,
    pub distant: Vec<usize>,
}

impl NeighborGrouping {
    pub fn new(outlier: usize, rule: DistantRule, products: usize) -> Result<Self> {
        if outlier == 0 || outlier > products {
            return Err(Error::validation(
                "outlier_pos",
                format!("must lie within [1, {products}], found {outlier}"),
            ));
        }
        let valid = |p: i64| p >= 1 && p <= products as i64;
        let o = outlier as i64;
        let near: Vec<usize> = (o - 1..=o + 1).filter(|p| valid(*p)).map(|p| p as usize).collect();
        let distant = match rule {
            DistantRule::PlusMinusTwo => [o - 2, o + 2].into_iter().filter(|p| valid(*p)).map(|p| p as usize).collect(),
            DistantRule::Remaining => (1..=products).filter(|p| !near.contains(p)).collect(),
        };
        Ok(Self { outlier, near, distant })
    }

    fn side(&self, product: usize) -> Option<GroupKey> {
        if self.near.contains(&product) {
            Some(GroupKey::Near)
        } else if self.distant.contains(&product) {
            Some(GroupKey::Distant)
        } else {
            None
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "by", rename_all = "snake_case")]
pub enum Grouping {
    Aoi,
    Kind,
    Position,
    Neighborhood {
        outlier: usize,
        #[serde(default)]
        distant: DistantRule,
        /// Restrict pooling to one AOI kind.
        #[serde(default)]
        kind: Option<AoiKind>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum GroupKey {
    Aoi(usize, AoiKind),
    Kind(AoiKind),
    Position(usize),
    Near,
    Distant,
}

impl fmt::Display for GroupKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupKey::Aoi(p, k) => write!(f, "{p}:{}", k.name()),
            GroupKey::Kind(k) => f.write_str(k.name()),
            GroupKey::Position(p) => write!(f, "{p}"),
            GroupKey::Near => f.write_str("near"),
            GroupKey::Distant => f.write_str("distant"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateCell {
    pub group: String,
    pub metric: Metric,
    /// `None` when no observation in the cell defines the metric.
    pub mean: Option<f64>,
    pub median: Option<f64>,
    /// Observations contributing to mean and median.
    pub n: usize,
    /// All (participant, AOI) observations in the cell, defined or not.
    pub coverage: usize,
}

fn median(sorted: &[f64]) -> Option<f64> {
    let n = sorted.len();
    match n {
        0 => None,
        _ if n % 2 == 1 => Some(sorted[n / 2]),
        _ => Some((sorted[n / 2 - 1] + sorted[n / 2]) / 2.0),
    }
}

/// Pools per-participant AOI metrics into cells of `grouping`, one cell per
/// (group, metric) in sorted group order. Undefined values (TTFF of a
/// never-fixated AOI) are left out of mean and median but counted in coverage.
pub fn aggregate_metrics(per_participant: &[Vec<AoiMetrics>], grouping: &Grouping) -> Result<Vec<AggregateCell>> {
    let first = per_participant.first().ok_or(Error::EmptyInput("participant metrics"))?;
    let keys: Vec<(usize, AoiKind)> = first.iter().map(|m| (m.product, m.kind)).collect();
    for (i, p) in per_participant.iter().enumerate().skip(1) {
        if p.len() != keys.len() || p.iter().zip(&keys).any(|(m, k)| (m.product, m.kind) != *k) {
            return Err(Error::validation(
                "metrics",
                format!("collection {i} does not share the first collection's AOI layout"),
            ));
        }
    }
    let neighbors = match grouping {
        Grouping::Neighborhood { outlier, distant, .. } => {
            let products = keys.iter().map(|k| k.0).max().unwrap_or(0);
            Some(NeighborGrouping::new(*outlier, *distant, products)?)
        }
        _ => None,
    };
    let key_of = |m: &AoiMetrics| -> Option<GroupKey> {
        match grouping {
            Grouping::Aoi => Some(GroupKey::Aoi(m.product, m.kind)),
            Grouping::Kind => Some(GroupKey::Kind(m.kind)),
            Grouping::Position => Some(GroupKey::Position(m.product)),
            Grouping::Neighborhood { kind, .. } => {
                if kind.is_some_and(|k| k != m.kind) {
                    return None;
                }
                neighbors.as_ref().and_then(|g| g.side(m.product))
            }
        }
    };

    let mut cells: BTreeMap<(GroupKey, Metric), (Vec<f64>, usize)> = BTreeMap::new();
    for m in per_participant.iter().flatten() {
        let Some(key) = key_of(m) else { continue };
        for metric in Metric::ALL {
            let cell = cells.entry((key, metric)).or_default();
            cell.1 += 1;
            if let Some(v) = metric.value(m) {
                cell.0.push(v);
            }
        }
    }
    Ok(cells
        .into_iter()
        .map(|((key, metric), (mut values, coverage))| {
            values.sort_by(f64::total_cmp);
            let n = values.len();
            AggregateCell {
                group: key.to_string(),
                metric,
                mean: (n > 0).then(|| values.iter().sum::<f64>() / n as f64),
                median: median(&values),
                n,
                coverage,
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(product: usize, ttff: Option<u64>) -> AoiMetrics {
        AoiMetrics {
            product,
            kind: AoiKind::Image,
            ttff,
            fixation_count: ttff.is_some() as usize,
            time_spent: ttff.map_or(0, |_| 150),
            revisit_count: 0,
        }
    }

    fn cell<'a>(cells: &'a [AggregateCell], group: &str, metric: Metric) -> &'a AggregateCell {
        cells.iter().find(|c| c.group == group && c.metric == metric).unwrap()
    }

    #[test]
    fn two_participants_mean_and_median() {
        let cells = aggregate_metrics(&[vec![m(1, Some(100))], vec![m(1, Some(300))]], &Grouping::Aoi).unwrap();
        let c = cell(&cells, "1:image", Metric::Ttff);
        assert_eq!((c.mean, c.median, c.n), (Some(200.0), Some(200.0), 2));
    }

    #[test]
    fn missing_ttff_is_excluded() {
        let cells = aggregate_metrics(&[vec![m(1, None)], vec![m(1, Some(300))]], &Grouping::Kind).unwrap();
        let c = cell(&cells, "image", Metric::Ttff);
        assert_eq!((c.mean, c.n, c.coverage), (Some(300.0), 1, 2));
        assert_eq!(cell(&cells, "image", Metric::FixationCount).n, 2);
    }

    #[test]
    fn neighbor_sets() {
        let g = NeighborGrouping::new(3, DistantRule::PlusMinusTwo, 15).unwrap();
        assert_eq!((g.near, g.distant), (vec![2, 3, 4], vec![1, 5]));
        let g = NeighborGrouping::new(1, DistantRule::PlusMinusTwo, 15).unwrap();
        assert_eq!((g.near, g.distant), (vec![1, 2], vec![3]));
        let g = NeighborGrouping::new(15, DistantRule::Remaining, 15).unwrap();
        assert_eq!((g.near.len(), g.distant.len()), (2, 13));
        assert!(NeighborGrouping::new(16, DistantRule::Remaining, 15).is_err());
    }

    #[test]
    fn mismatched_layouts() {
        assert!(aggregate_metrics(&[vec![m(1, None)], vec![m(2, None)]], &Grouping::Kind).is_err());
        assert!(aggregate_metrics(&[], &Grouping::Kind).is_err());
    }
}

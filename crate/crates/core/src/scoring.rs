//! Per-AOI saliency aggregation, outlier ranking and hit@k reports.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::saliency::{Model, SaliencyMap};
use crate::stimulus::{AoiKind, AoiLayout, OutlierFeature, StimulusSpec};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AoiSaliency {
    pub product: usize,
    pub kind: AoiKind,
    pub mean: f64,
    pub max: f64,
    /// Fraction of the whole map's mass inside this AOI.
    pub mass_share: f64,
}

/// Mean, max and mass share of the map inside every AOI, in layout order.
pub fn aoi_saliency(map: &SaliencyMap, layout: &AoiLayout) -> Result<Vec<AoiSaliency>> {
    let page = (layout.page.w as usize, layout.page.h as usize);
    if map.dims() != page {
        return Err(Error::DimensionMismatch {
            expected: page,
            found: map.dims(),
        });
    }
    let total: f64 = map.values().iter().sum();
    let w = map.width();
    layout
        .aois
        .iter()
        .map(|aoi| {
            let r = aoi.rect;
            let (mut sum, mut max) = (0.0, 0.0f64);
            for y in r.y as usize..(r.y + r.h) as usize {
                let row = &map.values()[y * w + r.x as usize..y * w + (r.x + r.w) as usize];
                for v in row {
                    sum += v;
                    max = max.max(*v);
                }
            }
            let area = r.area() as f64;
            Ok(AoiSaliency {
                product: aoi.product,
                kind: aoi.kind,
                mean: if area > 0.0 { sum / area } else { 0.0 },
                max,
                mass_share: if total > 0.0 { sum / total } else { 0.0 },
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RankedProduct {
    pub product: usize,
    pub mean: f64,
    pub z: f64,
}

/// Products ranked by descending z-score of mean saliency within one AOI kind.
///
/// With `z_normalize = false` the `z` field carries the raw mean. Zero
/// variance gives every product `z = 0` in original order.
pub fn rank_outliers(
    scores: &[AoiSaliency],
    kind: AoiKind,
    z_normalize: bool,
) -> Result<Vec<RankedProduct>> {
    let of_kind: Vec<&AoiSaliency> = scores.iter().filter(|s| s.kind == kind).collect();
    if of_kind.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "ranking needs at least 3 products, found {}",
            of_kind.len()
        )));
    }
    let n = of_kind.len() as f64;
    let mean = of_kind.iter().map(|s| s.mean).sum::<f64>() / n;
    let var = of_kind.iter().map(|s| (s.mean - mean).powi(2)).sum::<f64>() / n;
    // exact check: the mean of equal values need not round back to them
    let flat = of_kind.iter().all(|s| s.mean == of_kind[0].mean);
    let sd = if flat { 0.0 } else { var.sqrt() };
    let mut ranked: Vec<RankedProduct> = of_kind
        .iter()
        .map(|s| RankedProduct {
            product: s.product,
            mean: s.mean,
            z: if !z_normalize {
                s.mean
            } else if sd > 0.0 {
                (s.mean - mean) / sd
            } else {
                0.0
            },
        })
        .collect();
    // stable: ties keep layout order
    ranked.sort_by(|a, b| b.z.total_cmp(&a.z));
    Ok(ranked)
}

/// AOI kind in which an outlier feature is rendered.
pub fn outlier_aoi_kind(feature: OutlierFeature) -> AoiKind {
    match feature {
        OutlierFeature::Image => AoiKind::Image,
        OutlierFeature::Price | OutlierFeature::DiscountTag => AoiKind::Price,
        OutlierFeature::StarRating => AoiKind::Description,
    }
}

/// 1-based rank of the true outlier among its AOI kind.
pub fn outlier_rank(spec: &StimulusSpec, scores: &[AoiSaliency]) -> Result<usize> {
    let outlier = spec
        .outlier
        .ok_or_else(|| Error::validation("outlier", "stimulus has no outlier"))?;
    let ranked = rank_outliers(scores, outlier_aoi_kind(outlier.feature), true)?;
    ranked
        .iter()
        .position(|r| r.product == outlier.position)
        .map(|i| i + 1)
        .ok_or_else(|| Error::validation("outlier.position", "no AOI for the outlier product"))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectionRow {
    pub model: Model,
    pub feature: OutlierFeature,
    pub position: usize,
    pub k: usize,
    pub hits: usize,
    pub total: usize,
    pub hit_rate: f64,
}

/// One scored stimulus of a detection corpus.
#[derive(Debug, Clone)]
pub struct CorpusItem<'a> {
    pub model: Model,
    pub spec: &'a StimulusSpec,
    pub map: &'a SaliencyMap,
    pub layout: &'a AoiLayout,
}

/// Fraction of stimuli whose outlier ranks within the top `k`, per
/// `(model, feature, position)`, in sorted key order.
pub fn detection_report(corpus: &[CorpusItem<'_>], k: usize) -> Result<Vec<DetectionRow>> {
    let mut ranks = Vec::with_capacity(corpus.len());
    for item in corpus {
        let scores = aoi_saliency(item.map, item.layout)?;
        ranks.push((item.model, item.spec, outlier_rank(item.spec, &scores)?));
    }
    Ok(report_from_ranks(
        ranks.iter().map(|(m, s, r)| {
            let o = s.outlier.expect("checked by outlier_rank");
            (*m, o.feature, o.position, *r)
        }),
        k,
    ))
}

/// Folds `(model, feature, position, rank)` tuples into hit@k rows.
pub fn report_from_ranks(
    ranks: impl IntoIterator<Item = (Model, OutlierFeature, usize, usize)>,
    k: usize,
) -> Vec<DetectionRow> {
    let mut cells: BTreeMap<(Model, OutlierFeature, usize), (usize, usize)> = BTreeMap::new();
    for (model, feature, position, rank) in ranks {
        let cell = cells.entry((model, feature, position)).or_default();
        cell.1 += 1;
        if rank <= k {
            cell.0 += 1;
        }
    }
    cells
        .into_iter()
        .map(|((model, feature, position), (hits, total))| DetectionRow {
            model,
            feature,
            position,
            k,
            hits,
            total,
            hit_rate: hits as f64 / total as f64,
        })
        .collect()
}

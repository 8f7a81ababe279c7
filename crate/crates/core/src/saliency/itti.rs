//! Itti & Koch saliency: center-surround contrast over Gaussian pyramids of
//! intensity, color opponency and orientation, combined through peak
//! normalization into three conspicuity maps.

use serde::{Deserialize, Serialize};

use super::SaliencyMap;
use crate::error::{Error, Result};
use crate::imaging::{
    build_pyramid, center_surround, extract_channels, gabor_bank, max_levels, normalize_map,
    ChannelKind, FeatureChannel, GaborParams, GaussianPyramid, NormalizeParams, RasterImage,
    DEFAULT_ORIENTATIONS, WORKING_MAX_SIDE,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct IttiParams {
    pub pyramid_levels: usize,
    pub center_levels: Vec<usize>,
    pub deltas: Vec<usize>,
    pub output_level: usize,
    pub orientations: Vec<f64>,
    pub gabor: GaborParams,
    pub normalize: NormalizeParams,
    /// Longer side of the working resolution.
    pub max_side: usize,
}

impl Default for IttiParams {
    fn default() -> Self {
        Self {
            pyramid_levels: 9,
            center_levels: vec![2, 3, 4],
            deltas: vec![3, 4],
            output_level: 4,
            orientations: DEFAULT_ORIENTATIONS.to_vec(),
            gabor: GaborParams::default(),
            normalize: NormalizeParams::default(),
            max_side: WORKING_MAX_SIDE,
        }
    }
}

impl IttiParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidParams(m.to_string()));
        if self.center_levels.is_empty() || self.deltas.is_empty() {
            return bad("center_levels and deltas must be non-empty");
        }
        if self.deltas.contains(&0) {
            return bad("deltas must be positive");
        }
        let max_c = *self.center_levels.iter().max().expect("non-empty");
        let max_d = *self.deltas.iter().max().expect("non-empty");
        if max_c + max_d >= self.pyramid_levels {
            return bad("max(center_levels) + max(deltas) must be below pyramid_levels");
        }
        if self.output_level >= self.pyramid_levels {
            return bad("output_level must be a pyramid level");
        }
        if self.orientations.is_empty() {
            return Err(Error::EmptyOrientations);
        }
        if self.max_side < crate::imaging::MIN_SIDE {
            return bad("max_side below minimum image size");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FeatureGroup {
    Intensity,
    Color,
    Orientation,
}

impl FeatureGroup {
    pub const ALL: [FeatureGroup; 3] = [
        FeatureGroup::Intensity,
        FeatureGroup::Color,
        FeatureGroup::Orientation,
    ];
}

/// Scale plan after clamping to what the working image supports.
struct Plan {
    levels: usize,
    pairs: Vec<(usize, usize)>,
    output_dims: (usize, usize),
}

fn plan(image: &RasterImage, params: &IttiParams) -> Result<Plan> {
    let (w, h) = image.dims();
    let feasible = max_levels(w, h);
    let levels = params.pyramid_levels.min(feasible);
    let mut pairs = Vec::new();
    for &c in &params.center_levels {
        for &d in &params.deltas {
            if c + d < levels {
                pairs.push((c, c + d));
            }
        }
    }
    if pairs.is_empty() {
        let needed = params.center_levels.iter().min().copied().unwrap_or(0)
            + params.deltas.iter().min().copied().unwrap_or(0)
            + 1;
        return Err(Error::PyramidTooDeep {
            requested: needed,
            max: feasible,
        });
    }
    let output_level = params.output_level.min(levels - 1);
    let mut dims = (w, h);
    for _ in 0..output_level {
        dims = (dims.0.div_ceil(2), dims.1.div_ceil(2));
    }
    Ok(Plan {
        levels,
        pairs,
        output_dims: dims,
    })
}

/// Sum of normalized center-surround maps, all resized to the output level.
fn accumulate(
    maps: impl IntoIterator<Item = Result<FeatureChannel>>,
    plan: &Plan,
    params: &IttiParams,
) -> Result<FeatureChannel> {
    let (ow, oh) = plan.output_dims;
    let mut acc = FeatureChannel::constant(ow, oh, 0.0, ChannelKind::Intensity);
    for map in maps {
        let n = normalize_map(&map?, &params.normalize)?.resize(ow, oh);
        acc.values
            .iter_mut()
            .zip(&n.values)
            .for_each(|(a, b)| *a += b);
    }
    Ok(acc)
}

fn pyramid_maps<'a>(
    pyramid: &'a GaussianPyramid,
    plan: &'a Plan,
) -> impl Iterator<Item = Result<FeatureChannel>> + 'a {
    plan.pairs
        .iter()
        .map(move |&(c, s)| center_surround(pyramid, c, s))
}

fn group_map(
    working: &RasterImage,
    group: FeatureGroup,
    params: &IttiParams,
    plan: &Plan,
) -> Result<FeatureChannel> {
    let channels = extract_channels(working)?;
    let summed = match group {
        FeatureGroup::Intensity => {
            let p = build_pyramid(&channels[0], plan.levels)?;
            accumulate(pyramid_maps(&p, plan), plan, params)?
        }
        FeatureGroup::Color => {
            let rg = build_pyramid(&channels[1], plan.levels)?;
            let by = build_pyramid(&channels[2], plan.levels)?;
            accumulate(pyramid_maps(&rg, plan).chain(pyramid_maps(&by, plan)), plan, params)?
        }
        FeatureGroup::Orientation => {
            let intensity = build_pyramid(&channels[0], plan.levels)?;
            // Gabor energy at every pyramid level, one pyramid per angle.
            let per_level: Vec<Vec<FeatureChannel>> = intensity
                .levels()
                .iter()
                .map(|lvl| gabor_bank(lvl, &params.orientations, &params.gabor))
                .collect::<Result<_>>()?;
            let mut maps = Vec::new();
            for k in 0..params.orientations.len() {
                let levels = per_level.iter().map(|l| l[k].clone()).collect();
                let p = GaussianPyramid::from_levels(levels)?;
                maps.extend(pyramid_maps(&p, plan));
            }
            accumulate(maps, plan, params)?
        }
    };
    normalize_map(&summed, &params.normalize)
}

/// Per-group conspicuity map at the output level.
pub fn conspicuity_map(
    image: &RasterImage,
    group: FeatureGroup,
    params: &IttiParams,
) -> Result<FeatureChannel> {
    params.validate()?;
    let working = image.fit_within(params.max_side)?;
    let plan = plan(&working, params)?;
    group_map(&working, group, params, &plan)
}

/// Mean of the three conspicuity maps at the output level, before upsampling.
pub fn itti_saliency_raw(image: &RasterImage, params: &IttiParams) -> Result<FeatureChannel> {
    params.validate()?;
    let working = image.fit_within(params.max_side)?;
    let plan = plan(&working, params)?;
    let (ow, oh) = plan.output_dims;
    let mut mean = FeatureChannel::constant(ow, oh, 0.0, ChannelKind::Intensity);
    for group in FeatureGroup::ALL {
        let c = group_map(&working, group, params, &plan)?;
        mean.values
            .iter_mut()
            .zip(&c.values)
            .for_each(|(m, v)| *m += v / 3.0);
    }
    Ok(mean)
}

pub fn itti_saliency(image: &RasterImage, params: &IttiParams) -> Result<SaliencyMap> {
    let raw = itti_saliency_raw(image, params)?;
    SaliencyMap::from_coarse(&raw, image.width(), image.height())
}

use super::raster::FeatureChannel;
use super::resample::resize_bilinear;
use crate::error::{Error, Result};

/// 5-tap binomial smoothing kernel.
pub const BINOMIAL_5: [f64; 5] = [1.0 / 16.0, 4.0 / 16.0, 6.0 / 16.0, 4.0 / 16.0, 1.0 / 16.0];

/// Level 0 is full resolution; each further level is the previous one
/// smoothed and halved (rounded up).
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianPyramid {
    levels: Vec<FeatureChannel>,
}

impl GaussianPyramid {
    /// Wraps precomputed levels; dimensions must be non-increasing.
    pub fn from_levels(levels: Vec<FeatureChannel>) -> Result<Self> {
        if levels.is_empty() {
            return Err(Error::EmptyInput("pyramid levels"));
        }
        for pair in levels.windows(2) {
            if pair[1].width > pair[0].width || pair[1].height > pair[0].height {
                return Err(Error::InvalidParams(
                    "pyramid level dimensions must be non-increasing".into(),
                ));
            }
        }
        Ok(Self { levels })
    }

    pub fn levels(&self) -> &[FeatureChannel] {
        &self.levels
    }

    pub fn level(&self, index: usize) -> Option<&FeatureChannel> {
        self.levels.get(index)
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }
}

/// Deepest pyramid that satisfies `2^(levels-1) <= min(width, height)`.
pub fn max_levels(width: usize, height: usize) -> usize {
    let side = width.min(height).max(1);
    (usize::BITS - side.leading_zeros()) as usize
}

/// Separable convolution with a symmetric odd-length kernel, clamp-to-edge borders.
pub(crate) fn convolve_separable(src: &[f64], w: usize, h: usize, kernel: &[f64]) -> Vec<f64> {
    let r = (kernel.len() / 2) as isize;
    let clamp = |v: isize, n: usize| v.clamp(0, n as isize - 1) as usize;

    let mut tmp = vec![0.0; w * h];
    for y in 0..h {
        let row = &src[y * w..(y + 1) * w];
        for x in 0..w {
            let mut acc = 0.0;
            for (k, kv) in kernel.iter().enumerate() {
                acc += kv * row[clamp(x as isize + k as isize - r, w)];
            }
            tmp[y * w + x] = acc;
        }
    }
    let mut out = vec![0.0; w * h];
    for y in 0..h {
        for (k, kv) in kernel.iter().enumerate() {
            let sy = clamp(y as isize + k as isize - r, h);
            let src_row = &tmp[sy * w..(sy + 1) * w];
            let dst_row = &mut out[y * w..(y + 1) * w];
            for (d, s) in dst_row.iter_mut().zip(src_row) {
                *d += kv * s;
            }
        }
    }
    out
}

/// One pyramid step: binomial smoothing then center-aligned 2:1 decimation.
pub fn reduce(channel: &FeatureChannel) -> FeatureChannel {
    let (w, h) = channel.dims();
    let smooth = convolve_separable(&channel.values, w, h, &BINOMIAL_5);
    let (nw, nh) = (w.div_ceil(2), h.div_ceil(2));
    FeatureChannel {
        width: nw,
        height: nh,
        values: resize_bilinear(&smooth, w, h, nw, nh),
        kind: channel.kind,
    }
}

pub fn build_pyramid(channel: &FeatureChannel, levels: usize) -> Result<GaussianPyramid> {
    let max = max_levels(channel.width, channel.height);
    if levels == 0 || levels > max {
        return Err(Error::PyramidTooDeep {
            requested: levels,
            max,
        });
    }
    if !channel.is_finite() {
        return Err(Error::NonFinite("pyramid input"));
    }
    let mut out = Vec::with_capacity(levels);
    out.push(channel.clone());
    for _ in 1..levels {
        let next = reduce(out.last().expect("non-empty"));
        out.push(next);
    }
    Ok(GaussianPyramid { levels: out })
}

/// `|center - upsample(surround)|` at the center level's resolution.
pub fn center_surround(
    pyramid: &GaussianPyramid,
    center: usize,
    surround: usize,
) -> Result<FeatureChannel> {
    let levels = pyramid.len();
    if center >= surround || surround >= levels {
        return Err(Error::InvalidLevels {
            center,
            surround,
            levels,
        });
    }
    let c = &pyramid.levels[center];
    let s = pyramid.levels[surround].resize(c.width, c.height);
    let values = c
        .values
        .iter()
        .zip(&s.values)
        .map(|(a, b)| (a - b).abs())
        .collect();
    Ok(FeatureChannel {
        width: c.width,
        height: c.height,
        values,
        kind: c.kind,
    })
}

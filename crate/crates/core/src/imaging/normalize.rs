use serde::{Deserialize, Serialize};

use super::raster::FeatureChannel;
use crate::error::{Error, Result};

/// Peak-competition normalization settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct NormalizeParams {
    /// Side of the square neighborhood used to find local maxima.
    pub window: usize,
    /// Local maxima below this (after rescaling to [0,1]) are ignored.
    pub min_peak: f64,
}

impl Default for NormalizeParams {
    fn default() -> Self {
        Self {
            window: 7,
            min_peak: 0.05,
        }
    }
}

/// Ranges narrower than this are treated as a flat map.
const FLAT_RANGE: f64 = 1e-12;

/// Local maxima of `values`, one raster-first representative per peak.
///
/// A pixel is a candidate when it is `>= min_peak` and no neighbor in the
/// window is larger. Equal-valued candidates within the window of each other
/// form one plateau and count as a single peak, so the result does not
/// depend on scan direction.
pub fn local_maxima(values: &[f64], w: usize, h: usize, window: usize, min_peak: f64) -> Vec<usize> {
    let r = (window / 2) as isize;
    let neighbors = |i: usize| {
        let (x, y) = ((i % w) as isize, (i / w) as isize);
        ((y - r).max(0)..=(y + r).min(h as isize - 1)).flat_map(move |ny| {
            ((x - r).max(0)..=(x + r).min(w as isize - 1))
                .map(move |nx| (ny as usize) * w + nx as usize)
                .filter(move |&j| j != i)
        })
    };
    let candidate: Vec<bool> = (0..values.len())
        .map(|i| values[i] >= min_peak && neighbors(i).all(|j| values[j] <= values[i]))
        .collect();
    let mut seen = vec![false; values.len()];
    let mut out = Vec::new();
    let mut stack = Vec::new();
    for i in 0..values.len() {
        if !candidate[i] || seen[i] {
            continue;
        }
        out.push(i);
        seen[i] = true;
        stack.push(i);
        while let Some(k) = stack.pop() {
            for j in neighbors(k) {
                if candidate[j] && !seen[j] && values[j] == values[i] {
                    seen[j] = true;
                    stack.push(j);
                }
            }
        }
    }
    out
}

/// Rescales to [0,1] and multiplies by `(1 - m)^2`, where `m` is the mean of
/// the local maxima other than the global one. Flat maps become all-zero.
pub fn normalize_map(map: &FeatureChannel, params: &NormalizeParams) -> Result<FeatureChannel> {
    if !map.is_finite() {
        return Err(Error::NonFinite("normalize_map input"));
    }
    let (lo, hi) = (map.min(), map.max());
    let mut out = map.clone();
    if hi - lo <= FLAT_RANGE * hi.abs().max(1.0) {
        out.values.iter_mut().for_each(|v| *v = 0.0);
        return Ok(out);
    }
    let span = hi - lo;
    out.values.iter_mut().for_each(|v| *v = (*v - lo) / span);

    let maxima = local_maxima(&out.values, out.width, out.height, params.window, params.min_peak);
    // the global maximum is the first raster-order pixel at value 1
    let global = out.values.iter().position(|v| *v >= 1.0);
    let others: Vec<f64> = maxima
        .iter()
        .filter(|&&i| Some(i) != global)
        .map(|&i| out.values[i])
        .collect();
    let mean_others = if others.is_empty() {
        0.0
    } else {
        others.iter().sum::<f64>() / others.len() as f64
    };
    let gain = (1.0 - mean_others).powi(2);
    out.values.iter_mut().for_each(|v| *v *= gain);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::imaging::ChannelKind;

    fn channel(w: usize, h: usize, values: Vec<f64>) -> FeatureChannel {
        FeatureChannel::new(w, h, values, ChannelKind::Intensity).unwrap()
    }

    #[test]
    fn single_peak_is_kept() {
        let mut v = vec![0.0; 100];
        v[45] = 3.0;
        let out = normalize_map(&channel(10, 10, v), &NormalizeParams::default()).unwrap();
        assert_eq!(out.values[45], 1.0);
        assert_eq!(out.values.iter().sum::<f64>(), 1.0);
    }

    #[test]
    fn two_equal_peaks_cancel() {
        let mut v = vec![0.0; 400];
        v[22] = 1.0;
        v[377] = 1.0;
        let out = normalize_map(&channel(20, 20, v), &NormalizeParams::default()).unwrap();
        assert!(out.values.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn flat_map_is_zeroed() {
        let out =
            normalize_map(&channel(8, 8, vec![0.4; 64]), &NormalizeParams::default()).unwrap();
        assert!(out.values.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn plateau_counts_once() {
        let mut v = vec![0.0; 400];
        for i in [22, 23, 42, 43] {
            v[i] = 1.0;
        }
        let m = local_maxima(&v, 20, 20, 7, 0.05);
        assert_eq!(m, vec![22]);
    }

    #[test]
    fn plateau_count_ignores_scan_direction() {
        // one pixel above the left end of a row; mirrored, above the right end
        let (w, h) = (20, 6);
        let mut v = vec![0.0; w * h];
        v[10] = 1.0;
        for x in 0..14 {
            v[w + x] = 1.0;
        }
        let mirrored: Vec<f64> = (0..w * h).map(|i| v[(i / w) * w + w - 1 - i % w]).collect();
        assert_eq!(local_maxima(&v, w, h, 7, 0.05).len(), local_maxima(&mirrored, w, h, 7, 0.05).len());
    }
}

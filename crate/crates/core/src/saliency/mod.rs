//! Bottom-up saliency models and the map type they produce.

pub mod gbvs;
pub mod itti;
pub mod overlay;

use std::io::Cursor;
use std::path::Path;

use image::{ImageBuffer, ImageFormat, Luma};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::imaging::{resample, FeatureChannel};

pub use gbvs::{
    build_chain, equilibrium, equilibrium_from, gbvs_grid, gbvs_saliency, ChainMode, GbvsParams,
    TransitionMatrix,
};
pub use itti::{conspicuity_map, itti_saliency, itti_saliency_raw, FeatureGroup, IttiParams};
pub use overlay::{colormap, overlay, OVERLAY_ALPHA, VIRIDIS};

/// Saliency model selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    Itti,
    Gbvs,
}

impl Model {
    pub fn name(self) -> &'static str {
        match self {
            Model::Itti => "itti",
            Model::Gbvs => "gbvs",
        }
    }
}

impl std::str::FromStr for Model {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "itti" => Ok(Model::Itti),
            "gbvs" => Ok(Model::Gbvs),
            other => Err(Error::validation("model", format!("unknown model `{other}`"))),
        }
    }
}

impl std::fmt::Display for Model {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Per-pixel attention density in `[0, 1]`; the maximum is 1 unless the map
/// is identically zero.
#[derive(Debug, Clone, PartialEq)]
pub struct SaliencyMap {
    width: usize,
    height: usize,
    values: Vec<f64>,
}

impl SaliencyMap {
    /// Builds a map from non-negative values, rescaling so the maximum is 1.
    pub fn from_values(width: usize, height: usize, mut values: Vec<f64>) -> Result<Self> {
        if values.len() != width * height {
            return Err(Error::DimensionMismatch {
                expected: (width, height),
                found: (values.len(), 1),
            });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("saliency map"));
        }
        values.iter_mut().for_each(|v| *v = v.max(0.0));
        let max = values.iter().copied().fold(0.0, f64::max);
        if max > 0.0 {
            values.iter_mut().for_each(|v| *v /= max);
        }
        Ok(Self {
            width,
            height,
            values,
        })
    }

    /// Upsamples a coarse channel to `width x height` and rescales to max 1.
    pub(crate) fn from_coarse(coarse: &FeatureChannel, width: usize, height: usize) -> Result<Self> {
        let up = resample::resize_bilinear(&coarse.values, coarse.width, coarse.height, width, height);
        Self::from_values(width, height, up)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn at(&self, x: usize, y: usize) -> f64 {
        self.values[y * self.width + x]
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }

    pub fn argmax(&self) -> (usize, usize) {
        let mut best = 0;
        for (i, v) in self.values.iter().enumerate() {
            if *v > self.values[best] {
                best = i;
            }
        }
        (best % self.width, best / self.width)
    }

    pub fn flip_horizontal(&self) -> Self {
        Self {
            width: self.width,
            height: self.height,
            values: crate::imaging::raster::flip_plane_horizontal(&self.values, self.width, self.height),
        }
    }

    /// Shannon entropy (nats) of the map normalized to unit mass; 0 for an all-zero map.
    pub fn entropy(&self) -> f64 {
        let total: f64 = self.values.iter().sum();
        if total <= 0.0 {
            return 0.0;
        }
        -self
            .values
            .iter()
            .filter(|v| **v > 0.0)
            .map(|v| {
                let p = v / total;
                p * p.ln()
            })
            .sum::<f64>()
    }

    /// 16-bit grayscale PNG, value 1 mapped to 65535.
    pub fn to_png16_bytes(&self) -> Result<Vec<u8>> {
        let img: ImageBuffer<Luma<u16>, Vec<u16>> =
            ImageBuffer::from_fn(self.width as u32, self.height as u32, |x, y| {
                let v = self.at(x as usize, y as usize);
                Luma([(v * 65535.0).round().clamp(0.0, 65535.0) as u16])
            });
        let mut out = Cursor::new(Vec::new());
        img.write_to(&mut out, ImageFormat::Png)?;
        Ok(out.into_inner())
    }

    /// Raw export: width and height as little-endian `u32`, then the values
    /// as little-endian `f32` in row-major order.
    pub fn to_f32_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(8 + 4 * self.values.len());
        out.extend_from_slice(&(self.width as u32).to_le_bytes());
        out.extend_from_slice(&(self.height as u32).to_le_bytes());
        for v in &self.values {
            out.extend_from_slice(&(*v as f32).to_le_bytes());
        }
        out
    }

    pub fn from_f32_bytes(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < 8 {
            return Err(Error::validation("map", "missing 8-byte header"));
        }
        let w = u32::from_le_bytes(bytes[0..4].try_into().expect("4 bytes")) as usize;
        let h = u32::from_le_bytes(bytes[4..8].try_into().expect("4 bytes")) as usize;
        let body = &bytes[8..];
        if body.len() != 4 * w * h {
            return Err(Error::validation(
                "map",
                format!("expected {} value bytes for {w}x{h}, found {}", 4 * w * h, body.len()),
            ));
        }
        let values: Vec<f64> = body
            .chunks_exact(4)
            .map(|c| f32::from_le_bytes(c.try_into().expect("4 bytes")) as f64)
            .collect();
        if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::validation("map", "values must be finite and non-negative"));
        }
        Ok(Self {
            width: w,
            height: h,
            values,
        })
    }

    pub fn read_f32(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_f32_bytes(&std::fs::read(path)?)
    }
}

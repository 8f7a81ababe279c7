use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::raster::{ChannelKind, FeatureChannel};
use crate::error::{Error, Result};

/// Default orientations, degrees.
pub const DEFAULT_ORIENTATIONS: [f64; 4] = [0.0, 45.0, 90.0, 135.0];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GaborParams {
    /// Carrier wavelength in pixels.
    pub wavelength: f64,
    /// Gaussian envelope standard deviation in pixels.
    pub sigma: f64,
    /// Kernel side length (odd).
    pub size: usize,
}

impl Default for GaborParams {
    fn default() -> Self {
        Self {
            wavelength: 8.0,
            sigma: 4.0,
            size: 17,
        }
    }
}

/// Quadrature pair of kernels for one orientation.
///
/// An angle of 0° prefers horizontal stripes, 90° vertical ones. The even
/// kernel has its DC response removed so flat regions give exactly zero.
#[derive(Debug, Clone)]
pub struct GaborKernel {
    pub size: usize,
    pub even: Vec<f64>,
    pub odd: Vec<f64>,
}

impl GaborKernel {
    pub fn new(angle_deg: f64, params: &GaborParams) -> Self {
        let size = params.size;
        let r = (size / 2) as f64;
        let theta = angle_deg.to_radians();
        // carrier direction, perpendicular to the stripes
        let (nx, ny) = (-theta.sin(), theta.cos());
        let two_s2 = 2.0 * params.sigma * params.sigma;

        let mut env = Vec::with_capacity(size * size);
        let mut phase = Vec::with_capacity(size * size);
        for j in 0..size {
            for i in 0..size {
                let (x, y) = (i as f64 - r, j as f64 - r);
                env.push((-(x * x + y * y) / two_s2).exp());
                phase.push(2.0 * PI * (x * nx + y * ny) / params.wavelength);
            }
        }
        let env_sum: f64 = env.iter().sum();
        let dc = env.iter().zip(&phase).map(|(e, p)| e * p.cos()).sum::<f64>() / env_sum;
        let even = env
            .iter()
            .zip(&phase)
            .map(|(e, p)| e * (p.cos() - dc))
            .collect();
        let odd = env.iter().zip(&phase).map(|(e, p)| e * p.sin()).collect();
        Self { size, even, odd }
    }

    /// Magnitude of the quadrature response at every pixel, clamp-to-edge.
    pub fn energy(&self, src: &[f64], w: usize, h: usize) -> Vec<f64> {
        let r = (self.size / 2) as isize;
        let size = self.size;
        let mut out = vec![0.0; w * h];
        out.par_chunks_mut(w).enumerate().for_each(|(y, row)| {
            for (x, o) in row.iter_mut().enumerate() {
                let (mut e, mut q) = (0.0, 0.0);
                for j in 0..size {
                    let sy = (y as isize + j as isize - r).clamp(0, h as isize - 1) as usize;
                    let src_row = &src[sy * w..(sy + 1) * w];
                    let k = j * size;
                    for i in 0..size {
                        let sx = (x as isize + i as isize - r).clamp(0, w as isize - 1) as usize;
                        let v = src_row[sx];
                        e += self.even[k + i] * v;
                        q += self.odd[k + i] * v;
                    }
                }
                *o = (e * e + q * q).sqrt();
            }
        });
        out
    }
}

/// One orientation-energy channel per angle.
pub fn gabor_bank(
    channel: &FeatureChannel,
    orientations: &[f64],
    params: &GaborParams,
) -> Result<Vec<FeatureChannel>> {
    if orientations.is_empty() {
        return Err(Error::EmptyOrientations);
    }
    if params.size % 2 == 0 || params.wavelength <= 0.0 || params.sigma <= 0.0 {
        return Err(Error::InvalidParams(
            "gabor kernel needs odd size and positive wavelength/sigma".into(),
        ));
    }
    if !channel.is_finite() {
        return Err(Error::NonFinite("gabor input"));
    }
    Ok(orientations
        .iter()
        .map(|&angle| {
            let kernel = GaborKernel::new(angle, params);
            FeatureChannel {
                width: channel.width,
                height: channel.height,
                values: kernel.energy(&channel.values, channel.width, channel.height),
                kind: ChannelKind::Orientation(angle),
            }
        })
        .collect())
}

use std::io::Cursor;
use std::path::Path;

use image::{ImageFormat, Rgb, RgbImage};

use crate::error::{Error, Result};

/// Smallest accepted side length of a [`RasterImage`].
pub const MIN_SIDE: usize = 16;

/// RGB image with samples in `[0, 1]`, stored as three row-major planes.
#[derive(Debug, Clone, PartialEq)]
pub struct RasterImage {
    width: usize,
    height: usize,
    red: Vec<f64>,
    green: Vec<f64>,
    blue: Vec<f64>,
}

impl RasterImage {
    pub fn new(
        width: usize,
        height: usize,
        red: Vec<f64>,
        green: Vec<f64>,
        blue: Vec<f64>,
    ) -> Result<Self> {
        if width < MIN_SIDE || height < MIN_SIDE {
            return Err(Error::ImageTooSmall {
                width,
                height,
                min: MIN_SIDE,
            });
        }
        let n = width * height;
        for plane in [&red, &green, &blue] {
            if plane.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: (width, height),
                    found: (plane.len(), 1),
                });
            }
            if plane.iter().any(|v| !v.is_finite() || *v < 0.0 || *v > 1.0) {
                return Err(Error::validation("image", "samples must lie in [0, 1]"));
            }
        }
        Ok(Self {
            width,
            height,
            red,
            green,
            blue,
        })
    }

    /// Image filled with a single color.
    pub fn filled(width: usize, height: usize, rgb: [f64; 3]) -> Result<Self> {
        let n = width * height;
        Self::new(
            width,
            height,
            vec![rgb[0]; n],
            vec![rgb[1]; n],
            vec![rgb[2]; n],
        )
    }

    /// Builds an image by evaluating `f(x, y)` at every pixel.
    pub fn from_fn(
        width: usize,
        height: usize,
        mut f: impl FnMut(usize, usize) -> [f64; 3],
    ) -> Result<Self> {
        let n = width * height;
        let (mut r, mut g, mut b) = (Vec::with_capacity(n), Vec::with_capacity(n), Vec::with_capacity(n));
        for y in 0..height {
            for x in 0..width {
                let px = f(x, y);
                r.push(px[0]);
                g.push(px[1]);
                b.push(px[2]);
            }
        }
        Self::new(width, height, r, g, b)
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

    pub fn red(&self) -> &[f64] {
        &self.red
    }

    pub fn green(&self) -> &[f64] {
        &self.green
    }

    pub fn blue(&self) -> &[f64] {
        &self.blue
    }

    pub fn pixel(&self, x: usize, y: usize) -> [f64; 3] {
        let i = y * self.width + x;
        [self.red[i], self.green[i], self.blue[i]]
    }

    pub fn flip_horizontal(&self) -> Self {
        let f = |p: &[f64]| flip_plane_horizontal(p, self.width, self.height);
        Self {
            width: self.width,
            height: self.height,
            red: f(&self.red),
            green: f(&self.green),
            blue: f(&self.blue),
        }
    }

    /// Adds `offset` to every sample of every plane; fails when leaving the unit gamut.
    pub fn offset(&self, offset: f64) -> Result<Self> {
        let f = |p: &[f64]| p.iter().map(|v| v + offset).collect::<Vec<_>>();
        Self::new(
            self.width,
            self.height,
            f(&self.red),
            f(&self.green),
            f(&self.blue),
        )
    }

    /// Resamples every plane with center-aligned bilinear interpolation.
    pub fn resize_bilinear(&self, width: usize, height: usize) -> Result<Self> {
        let f = |p: &[f64]| {
            super::resample::resize_bilinear(p, self.width, self.height, width, height)
        };
        Self::new(width, height, f(&self.red), f(&self.green), f(&self.blue))
    }

    /// Shrinks the image so its longer side is at most `max_side`; returns a
    /// clone when it already fits.
    pub fn fit_within(&self, max_side: usize) -> Result<Self> {
        let longer = self.width.max(self.height);
        if longer <= max_side {
            return Ok(self.clone());
        }
        let scale = max_side as f64 / longer as f64;
        let w = ((self.width as f64 * scale).round() as usize).max(MIN_SIDE);
        let h = ((self.height as f64 * scale).round() as usize).max(MIN_SIDE);
        self.resize_bilinear(w, h)
    }

    /// Decodes 8-bit RGB/RGBA PNG bytes; alpha is composited over white.
    pub fn from_png_bytes(bytes: &[u8]) -> Result<Self> {
        let decoded = image::load_from_memory_with_format(bytes, ImageFormat::Png)?;
        let rgba = decoded.to_rgba8();
        let (w, h) = (rgba.width() as usize, rgba.height() as usize);
        let n = w * h;
        let (mut r, mut g, mut b) = (Vec::with_capacity(n), Vec::with_capacity(n), Vec::with_capacity(n));
        for px in rgba.pixels() {
            let a = px[3] as f64 / 255.0;
            let over = |c: u8| (c as f64 / 255.0) * a + (1.0 - a);
            r.push(over(px[0]));
            g.push(over(px[1]));
            b.push(over(px[2]));
        }
        Self::new(w, h, r, g, b)
    }

    pub fn read_png(path: impl AsRef<Path>) -> Result<Self> {
        let bytes = std::fs::read(path)?;
        Self::from_png_bytes(&bytes)
    }

    pub fn to_rgb8(&self) -> RgbImage {
        let q = |v: f64| (v * 255.0).round().clamp(0.0, 255.0) as u8;
        RgbImage::from_fn(self.width as u32, self.height as u32, |x, y| {
            let [r, g, b] = self.pixel(x as usize, y as usize);
            Rgb([q(r), q(g), q(b)])
        })
    }

    /// Encodes as 8-bit RGB PNG.
    pub fn to_png_bytes(&self) -> Result<Vec<u8>> {
        let mut out = Cursor::new(Vec::new());
        self.to_rgb8().write_to(&mut out, ImageFormat::Png)?;
        Ok(out.into_inner())
    }
}

/// Which feature a [`FeatureChannel`] carries.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ChannelKind {
    Intensity,
    OpponentRg,
    OpponentBy,
    /// Orientation-selective energy; angle in degrees.
    Orientation(f64),
}

/// Single-channel real plane, possibly signed.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureChannel {
    pub width: usize,
    pub height: usize,
    pub values: Vec<f64>,
    pub kind: ChannelKind,
}

impl FeatureChannel {
    pub fn new(width: usize, height: usize, values: Vec<f64>, kind: ChannelKind) -> Result<Self> {
        if values.len() != width * height {
            return Err(Error::DimensionMismatch {
                expected: (width, height),
                found: (values.len(), 1),
            });
        }
        Ok(Self {
            width,
            height,
            values,
            kind,
        })
    }

    pub fn constant(width: usize, height: usize, value: f64, kind: ChannelKind) -> Self {
        Self {
            width,
            height,
            values: vec![value; width * height],
            kind,
        }
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn at(&self, x: usize, y: usize) -> f64 {
        self.values[y * self.width + x]
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
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

    pub fn with_kind(mut self, kind: ChannelKind) -> Self {
        self.kind = kind;
        self
    }

    pub fn flip_horizontal(&self) -> Self {
        Self {
            values: flip_plane_horizontal(&self.values, self.width, self.height),
            ..self.clone()
        }
    }

    pub fn resize(&self, width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            values: super::resample::resize_bilinear(
                &self.values,
                self.width,
                self.height,
                width,
                height,
            ),
            kind: self.kind,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }
}

pub(crate) fn flip_plane_horizontal(plane: &[f64], width: usize, height: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(plane.len());
    for y in 0..height {
        let row = &plane[y * width..(y + 1) * width];
        out.extend(row.iter().rev());
    }
    out
}

/// Fraction of the maximum intensity below which color opponency is zeroed.
pub const DARK_SUPPRESSION: f64 = 0.1;

/// Splits an image into intensity and the two color-opponency channels
/// (red-green, blue-yellow), in that order.
pub fn extract_channels(image: &RasterImage) -> Result<Vec<FeatureChannel>> {
    let (w, h) = image.dims();
    if w < MIN_SIDE || h < MIN_SIDE {
        return Err(Error::ImageTooSmall {
            width: w,
            height: h,
            min: MIN_SIDE,
        });
    }
    let n = w * h;
    let mut intensity = Vec::with_capacity(n);
    for i in 0..n {
        intensity.push((image.red[i] + image.green[i] + image.blue[i]) / 3.0);
    }
    let max_i = intensity.iter().copied().fold(0.0, f64::max);
    let threshold = DARK_SUPPRESSION * max_i;

    let mut rg = Vec::with_capacity(n);
    let mut by = Vec::with_capacity(n);
    for i in 0..n {
        if intensity[i] < threshold {
            rg.push(0.0);
            by.push(0.0);
            continue;
        }
        let (r, g, b) = (image.red[i], image.green[i], image.blue[i]);
        let big_r = (r - (g + b) / 2.0).max(0.0);
        let big_g = (g - (r + b) / 2.0).max(0.0);
        let big_b = (b - (r + g) / 2.0).max(0.0);
        let big_y = ((r + g) / 2.0 - (r - g).abs() / 2.0 - b).max(0.0);
        rg.push(big_r - big_g);
        by.push(big_b - big_y);
    }
    Ok(vec![
        FeatureChannel::new(w, h, intensity, ChannelKind::Intensity)?,
        FeatureChannel::new(w, h, rg, ChannelKind::OpponentRg)?,
        FeatureChannel::new(w, h, by, ChannelKind::OpponentBy)?,
    ])
}

//! Image primitives shared by both saliency models.

mod gabor;
mod normalize;
mod pyramid;
pub(crate) mod raster;
pub mod resample;

pub use gabor::{gabor_bank, GaborKernel, GaborParams, DEFAULT_ORIENTATIONS};
pub use normalize::{local_maxima, normalize_map, NormalizeParams};
pub use pyramid::{build_pyramid, center_surround, max_levels, reduce, GaussianPyramid, BINOMIAL_5};
pub use raster::{extract_channels, ChannelKind, FeatureChannel, RasterImage, DARK_SUPPRESSION, MIN_SIDE};

/// Longer image side the saliency models work at; larger inputs are shrunk first.
pub const WORKING_MAX_SIDE: usize = 768;

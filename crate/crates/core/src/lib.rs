//! Bottom-up visual saliency over rendered product-list pages, synthetic
//! outlier stimuli, AOI gaze metrics and the statistics used to compare them.
//!
//! The crate is organised bottom-up:
//!
//! * [`imaging`]: rasters, feature channels, pyramids, Gabor filtering and map normalization.
//! * [`saliency`]: the Itti & Koch model and graph-based visual saliency (GBVS).
//! * [`stimulus`]: deterministic product lists, outlier injection and page rendering.
//! * [`gaze`]: I-DT fixation detection, AOI metrics and cohort aggregation.
//! * [`stats`]: Kruskal-Wallis, one-way ANOVA, Pearson and visual-search summaries.
//! * [`scoring`]: per-AOI saliency, outlier ranking and hit@k detection reports.

pub mod error;
pub mod gaze;
pub mod imaging;
pub mod saliency;
pub mod scoring;
pub mod stats;
pub mod stimulus;

pub use error::{Error, Result};

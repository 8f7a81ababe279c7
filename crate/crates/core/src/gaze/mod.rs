//! Fixation detection (I-DT), per-AOI engagement metrics and their
//! aggregation across participants.

mod aggregate;
mod io;

pub use aggregate::{aggregate_metrics, AggregateCell, DistantRule, Grouping, Metric, NeighborGrouping};
pub use io::{metrics_to_csv, parse_gaze_csv, parse_metrics_csv, GazeTrace, GAZE_CSV_HEADER, METRICS_CSV_HEADER};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stimulus::{AoiKind, AoiLayout};

/// Trial length per page: 90 seconds of free exploration.
pub const TRIAL_DURATION_MS: u64 = 90_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GazeSample {
    pub participant: u64,
    pub stimulus: u64,
    /// Milliseconds from trial start.
    pub t: u64,
    pub x: f64,
    pub y: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Fixation {
    pub x: f64,
    pub y: f64,
    pub start: u64,
    pub duration: u64,
    pub sample_count: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FixationParams {
    /// Maximum (max x − min x) + (max y − min y) inside a fixation, in pixels.
    pub dispersion: f64,
    /// Minimum span between first and last sample of a fixation, in ms.
    pub min_duration: u64,
    pub trial_duration: u64,
}

impl Default for FixationParams {
    fn default() -> Self {
        Self {
            dispersion: 100.0,
            min_duration: 100,
            trial_duration: TRIAL_DURATION_MS,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AoiMetrics {
    pub product: usize,
    pub kind: AoiKind,
    /// Start of the first fixation inside the AOI.
    pub ttff: Option<u64>,
    pub fixation_count: usize,
    /// Summed fixation durations.
    pub time_spent: u64,
    /// Entries into the AOI after the first one.
    pub revisit_count: usize,
}

/// Running bounding box of a sample window.
#[derive(Clone, Copy)]
struct Bounds {
    min_x: f64,
    max_x: f64,
    min_y: f64,
    max_y: f64,
}

impl Bounds {
    fn at(s: &GazeSample) -> Self {
        Self { min_x: s.x, max_x: s.x, min_y: s.y, max_y: s.y }
    }

    fn with(self, s: &GazeSample) -> Self {
        Self {
            min_x: self.min_x.min(s.x),
            max_x: self.max_x.max(s.x),
            min_y: self.min_y.min(s.y),
            max_y: self.max_y.max(s.y),
        }
    }

    fn dispersion(&self) -> f64 {
        (self.max_x - self.min_x) + (self.max_y - self.min_y)
    }
}

fn check_samples(samples: &[GazeSample], params: &FixationParams) -> Result<()> {
    if !(params.dispersion >= 0.0) || !params.dispersion.is_finite() {
        return Err(Error::InvalidParams("dispersion must be a finite non-negative number".into()));
    }
    for (i, s) in samples.iter().enumerate() {
        if !s.x.is_finite() || !s.y.is_finite() {
            return Err(Error::NonFinite("gaze sample coordinate"));
        }
        if s.t > params.trial_duration {
            return Err(Error::validation(
                "timestamp_ms",
                format!("sample {i} at {} ms exceeds the {} ms trial", s.t, params.trial_duration),
            ));
        }
        if i > 0 {
            let prev = &samples[i - 1];
            if (prev.participant, prev.stimulus) != (s.participant, s.stimulus) {
                return Err(Error::validation(
                    "samples",
                    "a trace must hold a single (participant, stimulus) pair",
                ));
            }
            if s.t < prev.t {
                return Err(Error::UnsortedSamples(i));
            }
            if s.t == prev.t {
                return Err(Error::DuplicateTimestamp(i));
            }
        }
    }
    Ok(())
}

/// Dispersion-threshold fixation detection.
///
/// From each start sample the window grows while its dispersion stays within
/// `params.dispersion`. A window spanning at least `min_duration` ms (and two
/// samples) becomes a fixation and detection resumes after it; otherwise the
/// start advances by one sample.
pub fn detect_fixations(samples: &[GazeSample], params: &FixationParams) -> Result<Vec<Fixation>> {
    check_samples(samples, params)?;
    let mut out = Vec::new();
    let mut i = 0;
    while i < samples.len() {
        let mut bounds = Bounds::at(&samples[i]);
        let mut j = i;
        while j + 1 < samples.len() {
            let grown = bounds.with(&samples[j + 1]);
            if grown.dispersion() > params.dispersion {
                break;
            }
            bounds = grown;
            j += 1;
        }
        let span = samples[j].t - samples[i].t;
        if j > i && span >= params.min_duration {
            let window = &samples[i..=j];
            let n = window.len() as f64;
            out.push(Fixation {
                x: window.iter().map(|s| s.x).sum::<f64>() / n,
                y: window.iter().map(|s| s.y).sum::<f64>() / n,
                start: samples[i].t,
                duration: span,
                sample_count: window.len(),
            });
            i = j + 1;
        } else {
            i += 1;
        }
    }
    Ok(out)
}

/// Engagement metrics for every AOI of `layout`, in layout order.
///
/// A fixation belongs to the AOI containing its centroid; fixations outside
/// every AOI stay unassigned but still break runs for revisit counting.
pub fn compute_aoi_metrics(fixations: &[Fixation], layout: &AoiLayout) -> Result<Vec<AoiMetrics>> {
    layout.validate()?;
    if let Some(i) = fixations.windows(2).position(|w| w[1].start < w[0].start) {
        return Err(Error::validation(
            "fixations",
            format!("fixation {} starts before its predecessor", i + 1),
        ));
    }
    let mut out: Vec<AoiMetrics> = layout
        .aois
        .iter()
        .map(|a| AoiMetrics {
            product: a.product,
            kind: a.kind,
            ttff: None,
            fixation_count: 0,
            time_spent: 0,
            revisit_count: 0,
        })
        .collect();
    let mut previous: Option<usize> = None;
    for f in fixations {
        let hit = layout.locate(f.x, f.y);
        if let Some(k) = hit {
            let m = &mut out[k];
            if m.ttff.is_none() {
                m.ttff = Some(f.start);
            } else if previous != Some(k) {
                m.revisit_count += 1;
            }
            m.fixation_count += 1;
            m.time_spent += f.duration;
        }
        previous = hit;
    }
    Ok(out)
}

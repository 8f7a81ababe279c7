//! Graph-based visual saliency.
//!
//! Each feature map is sampled onto a coarse lattice. A fully connected
//! Markov chain over the lattice nodes is built twice: once with log-ratio
//! dissimilarity weights (activation) and once with target-value weights on
//! the activation (normalization). Both passes take the chain's equilibrium
//! distribution as their output.

use serde::{Deserialize, Serialize};

use super::SaliencyMap;
use crate::error::{Error, Result};
use crate::imaging::{
    extract_channels, gabor_bank, resample, ChannelKind, FeatureChannel, GaborParams,
    RasterImage, DEFAULT_ORIENTATIONS, WORKING_MAX_SIDE,
};

/// Row sums must be within this of 1 for a matrix to count as stochastic.
const STOCHASTIC_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GbvsParams {
    /// Lattice width in cells; the height follows the image aspect ratio.
    pub grid_width: usize,
    /// Activation-pass distance-kernel sigma as a fraction of `grid_width`.
    pub sigma_frac: f64,
    /// Normalization-pass distance-kernel sigma as a fraction of `grid_width`.
    pub sigma_frac_norm: f64,
    /// Dissimilarity floor.
    pub epsilon: f64,
    /// Power-iteration stopping tolerance (L-infinity between iterates).
    pub tol: f64,
    pub max_iters: usize,
    pub orientations: Vec<f64>,
    pub gabor: GaborParams,
    pub max_side: usize,
}

impl Default for GbvsParams {
    fn default() -> Self {
        Self {
            grid_width: 32,
            sigma_frac: 0.15,
            sigma_frac_norm: 0.06,
            epsilon: 1e-4,
            tol: 1e-9,
            max_iters: 10_000,
            orientations: DEFAULT_ORIENTATIONS.to_vec(),
            gabor: GaborParams::default(),
            max_side: WORKING_MAX_SIDE,
        }
    }
}

impl GbvsParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidParams(m.to_string()));
        for s in [self.sigma_frac, self.sigma_frac_norm] {
            if !(s > 0.0 && s <= 1.0) {
                return bad("sigma fractions must lie in (0, 1]");
            }
        }
        if !(self.tol > 0.0) {
            return bad("tol must be positive");
        }
        if self.grid_width < 4 {
            return bad("grid_width must be at least 4");
        }
        if !(self.epsilon >= 0.0) {
            return bad("epsilon must be non-negative");
        }
        if self.max_iters == 0 {
            return bad("max_iters must be positive");
        }
        Ok(())
    }

    /// Lattice dimensions for an image of the given size.
    pub fn grid_dims(&self, width: usize, height: usize) -> (usize, usize) {
        let gh = ((self.grid_width as f64 * height as f64 / width as f64).round() as usize).max(1);
        (self.grid_width, gh)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChainMode {
    Activation,
    Normalization,
}

/// Dense row-stochastic matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionMatrix {
    n: usize,
    entries: Vec<f64>,
}

impl TransitionMatrix {
    /// Wraps `entries` (n*n, row-major) after checking it is row-stochastic.
    pub fn new(n: usize, entries: Vec<f64>) -> Result<Self> {
        if entries.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: (n, n),
                found: (entries.len(), 1),
            });
        }
        let m = Self { n, entries };
        m.check_stochastic()?;
        Ok(m)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.entries[i * self.n..(i + 1) * self.n]
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.n + j]
    }

    fn check_stochastic(&self) -> Result<()> {
        for i in 0..self.n {
            let row = self.row(i);
            if row.iter().any(|v| !v.is_finite() || *v < 0.0) {
                return Err(Error::NotStochastic {
                    row: i,
                    sum: row.iter().sum(),
                });
            }
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > STOCHASTIC_TOL {
                return Err(Error::NotStochastic { row: i, sum });
            }
        }
        Ok(())
    }
}

/// A chain plus, when the weight structure allows it, the exact stationary
/// distribution implied by detailed balance.
struct BuiltChain {
    matrix: TransitionMatrix,
    balance: Option<Vec<f64>>,
}

fn build(feature: &FeatureChannel, params: &GbvsParams, mode: ChainMode) -> Result<BuiltChain> {
    params.validate()?;
    if !feature.is_finite() {
        return Err(Error::NonFinite("gbvs feature"));
    }
    let (gw, gh) = feature.dims();
    let n = gw * gh;
    let eps = params.epsilon;
    let frac = match mode {
        ChainMode::Activation => params.sigma_frac,
        ChainMode::Normalization => params.sigma_frac_norm,
    };
    let sigma = frac * params.grid_width as f64;
    let two_s2 = 2.0 * sigma * sigma;

    // distance kernel indexed by |drow| * gw + |dcol|
    let mut kernel = vec![0.0; gh * gw];
    for dr in 0..gh {
        for dc in 0..gw {
            kernel[dr * gw + dc] = (-((dr * dr + dc * dc) as f64) / two_s2).exp();
        }
    }

    let values = &feature.values;
    let logs: Vec<f64> = values.iter().map(|v| (v + eps).ln()).collect();
    if mode == ChainMode::Activation && logs.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("gbvs activation log-ratio (feature + epsilon must be > 0)"));
    }
    let mass: Vec<f64> = values.iter().map(|v| v + eps).collect();

    let mut entries = vec![0.0; n * n];
    let mut row_sums = vec![0.0; n];
    let mut degenerate = false;
    for a in 0..n {
        let (ar, ac) = (a / gw, a % gw);
        let row = &mut entries[a * n..(a + 1) * n];
        let mut sum = 0.0;
        for (b, w) in row.iter_mut().enumerate() {
            let (br, bc) = (b / gw, b % gw);
            let dist = kernel[ar.abs_diff(br) * gw + ac.abs_diff(bc)];
            let d = match mode {
                ChainMode::Activation => (logs[a] - logs[b]).abs().max(eps),
                ChainMode::Normalization => mass[b],
            };
            *w = d * dist;
            sum += *w;
        }
        if sum > 0.0 {
            row.iter_mut().for_each(|w| *w /= sum);
        } else {
            degenerate = true;
            row.iter_mut().for_each(|w| *w = 1.0 / n as f64);
        }
        row_sums[a] = sum;
    }

    // Weights are w(a,b) = u(b) * s(a,b) with s symmetric, so
    // pi(a) ∝ u(a) * rowsum(a) balances every edge.
    let balance = (!degenerate).then(|| {
        let raw: Vec<f64> = match mode {
            ChainMode::Activation => row_sums.clone(),
            ChainMode::Normalization => row_sums.iter().zip(&mass).map(|(s, m)| s * m).collect(),
        };
        let total: f64 = raw.iter().sum();
        raw.into_iter().map(|v| v / total).collect()
    });

    Ok(BuiltChain {
        matrix: TransitionMatrix { n, entries },
        balance,
    })
}

/// Markov chain over the lattice of `feature` (one node per cell).
pub fn build_chain(
    feature: &FeatureChannel,
    params: &GbvsParams,
    mode: ChainMode,
) -> Result<TransitionMatrix> {
    build(feature, params, mode).map(|c| c.matrix)
}

/// Stationary distribution by power iteration from the uniform distribution.
pub fn equilibrium(chain: &TransitionMatrix, params: &GbvsParams) -> Result<Vec<f64>> {
    let n = chain.n();
    equilibrium_from(chain, &vec![1.0 / n as f64; n], params)
}

/// Power iteration from a caller-supplied starting distribution.
pub fn equilibrium_from(
    chain: &TransitionMatrix,
    start: &[f64],
    params: &GbvsParams,
) -> Result<Vec<f64>> {
    chain.check_stochastic()?;
    let n = chain.n();
    if start.len() != n {
        return Err(Error::DimensionMismatch {
            expected: (n, 1),
            found: (start.len(), 1),
        });
    }
    let total: f64 = start.iter().sum();
    if !(total > 0.0) || start.iter().any(|v| *v < 0.0 || !v.is_finite()) {
        return Err(Error::InvalidParams("start must be a non-negative distribution".into()));
    }
    let mut pi: Vec<f64> = start.iter().map(|v| v / total).collect();
    let mut next = vec![0.0; n];
    let mut residual = f64::INFINITY;
    for _ in 0..params.max_iters {
        next.iter_mut().for_each(|v| *v = 0.0);
        for (a, &p) in pi.iter().enumerate() {
            if p == 0.0 {
                continue;
            }
            for (nb, w) in next.iter_mut().zip(chain.row(a)) {
                *nb += p * w;
            }
        }
        let s: f64 = next.iter().sum();
        next.iter_mut().for_each(|v| *v /= s);
        residual = pi
            .iter()
            .zip(&next)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        std::mem::swap(&mut pi, &mut next);
        if residual < params.tol {
            return Ok(pi);
        }
    }
    Err(Error::NoConvergence {
        iterations: params.max_iters,
        residual,
    })
}

/// Activation then normalization for one feature lattice; returns a
/// distribution over cells (sums to 1).
fn channel_saliency(grid: &FeatureChannel, params: &GbvsParams) -> Result<Vec<f64>> {
    let solve = |chain: BuiltChain| match &chain.balance {
        Some(guess) => equilibrium_from(&chain.matrix, guess, params),
        None => equilibrium(&chain.matrix, params),
    };
    let activation = solve(build(grid, params, ChainMode::Activation)?)?;
    let peak = activation.iter().copied().fold(0.0, f64::max);
    let scaled = FeatureChannel {
        values: activation.iter().map(|v| v / peak).collect(),
        ..grid.clone()
    };
    solve(build(&scaled, params, ChainMode::Normalization)?)
}

/// Non-negative feature maps fed to the chains, in fixed order: intensity,
/// |RG|, |BY|, then one orientation-energy map per angle.
pub(crate) fn feature_maps(working: &RasterImage, params: &GbvsParams) -> Result<Vec<FeatureChannel>> {
    let mut channels = extract_channels(working)?;
    let orient = gabor_bank(&channels[0], &params.orientations, &params.gabor)?;
    for ch in channels.iter_mut().skip(1) {
        ch.values.iter_mut().for_each(|v| *v = v.abs());
    }
    channels.extend(orient);
    Ok(channels)
}

/// Cell-level saliency (sum of per-channel equilibria) on the GBVS lattice.
pub fn gbvs_grid(image: &RasterImage, params: &GbvsParams) -> Result<FeatureChannel> {
    params.validate()?;
    let working = image.fit_within(params.max_side)?;
    let (w, h) = working.dims();
    let (gw, gh) = params.grid_dims(w, h);
    let mut total = FeatureChannel::constant(gw, gh, 0.0, ChannelKind::Intensity);
    for feature in feature_maps(&working, params)? {
        let grid = FeatureChannel {
            width: gw,
            height: gh,
            values: resample::resize_area(&feature.values, w, h, gw, gh),
            kind: feature.kind,
        };
        let s = channel_saliency(&grid, params)?;
        let weight = match feature.kind {
            ChannelKind::Intensity => 1.0,
            ChannelKind::OpponentRg | ChannelKind::OpponentBy => 0.5,
            ChannelKind::Orientation(_) => 1.0 / params.orientations.len() as f64,
        };
        total.values.iter_mut().zip(&s).for_each(|(t, v)| *t += weight * v);
    }
    Ok(total)
}

pub fn gbvs_saliency(image: &RasterImage, params: &GbvsParams) -> Result<SaliencyMap> {
    let grid = gbvs_grid(image, params)?;
    SaliencyMap::from_coarse(&grid, image.width(), image.height())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(w: usize, h: usize, values: Vec<f64>) -> FeatureChannel {
        FeatureChannel::new(w, h, values, ChannelKind::Intensity).unwrap()
    }

    #[test]
    fn rows_are_stochastic() {
        let f = grid(5, 4, (0..20).map(|v| (v % 3) as f64).collect());
        for mode in [ChainMode::Activation, ChainMode::Normalization] {
            let m = build_chain(&f, &GbvsParams::default(), mode).unwrap();
            for i in 0..m.n() {
                assert!((m.row(i).iter().sum::<f64>() - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn birth_death_chain() {
        let p = TransitionMatrix::new(
            3,
            vec![0.5, 0.5, 0.0, 0.25, 0.5, 0.25, 0.0, 0.5, 0.5],
        )
        .unwrap();
        let pi = equilibrium(&p, &GbvsParams::default()).unwrap();
        for (a, b) in pi.iter().zip([0.25, 0.5, 0.25]) {
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn uniform_chain_is_uniform() {
        let p = TransitionMatrix::new(4, vec![0.25; 16]).unwrap();
        assert_eq!(equilibrium(&p, &GbvsParams::default()).unwrap(), vec![0.25; 4]);
    }

    #[test]
    fn rejects_non_stochastic() {
        assert!(matches!(
            TransitionMatrix::new(2, vec![0.5, 0.4, 0.5, 0.5]),
            Err(Error::NotStochastic { row: 0, .. })
        ));
    }

    #[test]
    fn periodic_chain_does_not_converge() {
        let p = TransitionMatrix::new(2, vec![0.0, 1.0, 1.0, 0.0]).unwrap();
        let params = GbvsParams {
            max_iters: 50,
            ..GbvsParams::default()
        };
        match equilibrium_from(&p, &[1.0, 0.0], &params) {
            Err(Error::NoConvergence { residual, .. }) => assert!(residual > 0.5),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn balance_guess_is_stationary() {
        let f = grid(6, 5, (0..30).map(|v| ((v * 7) % 11) as f64 / 10.0).collect());
        for mode in [ChainMode::Activation, ChainMode::Normalization] {
            let built = build(&f, &GbvsParams::default(), mode).unwrap();
            let guess = built.balance.unwrap();
            let pi = equilibrium(&built.matrix, &GbvsParams::default()).unwrap();
            for (a, b) in guess.iter().zip(&pi) {
                assert!((a - b).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn non_finite_feature_rejected() {
        let f = grid(2, 2, vec![0.0, f64::NAN, 0.0, 0.0]);
        assert!(build_chain(&f, &GbvsParams::default(), ChainMode::Activation).is_err());
    }
}

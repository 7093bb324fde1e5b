//! End-to-end dehazing.
//!
//! The hazy image is padded to a dyadic size and decomposed `levels` times
//! per channel. Transmission is estimated only on the coarsest low band,
//! where the scattering model holds with airlight `2^L a`. The haze-free low
//! band follows in closed form. Walking back up the pyramid, the detail
//! bands of each level are divided by the current transmission and the
//! transmission is upsampled 2x by pixel replication for the next level.

use crate::airlight::{estimate_airlight, Airlight};
use crate::error::{Error, Result};
use crate::haar::{dhwt_forward_multi, dhwt_inverse, DetailBands, SubbandSet, WaveletPyramid};
use crate::image::{clamp_unit, crop, pad_dyadic, ColorImage, Plane};
use crate::transmission::TransmissionMap;
use crate::tv::{self, lower_bound_plane, solve_swto, BoxTvProblem, SolverDiagnostics};

pub const MAX_LEVELS: usize = 4;
pub const DEFAULT_LEVELS: usize = 2;
pub const DEFAULT_LAMBDA0: f64 = 0.1;
pub const DEFAULT_EPSILON: f64 = 0.05;

/// Optional replacements for the solver defaults.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SolverOverrides {
    pub mu: Option<f64>,
    pub tol: Option<f64>,
    pub max_iters: Option<usize>,
    pub sweeps: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DehazeConfig {
    /// Number of wavelet levels, `0..=MAX_LEVELS`.
    pub levels: usize,
    /// TV weight scale; the effective weight is `lambda0 * mean(airlight)`.
    pub lambda0: f64,
    /// Transmission floor.
    pub epsilon: f64,
    pub solver: SolverOverrides,
}

impl Default for DehazeConfig {
    fn default() -> Self {
        Self {
            levels: DEFAULT_LEVELS,
            lambda0: DEFAULT_LAMBDA0,
            epsilon: DEFAULT_EPSILON,
            solver: SolverOverrides::default(),
        }
    }
}

impl DehazeConfig {
    pub fn with_levels(mut self, levels: usize) -> Self {
        self.levels = levels;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.levels > MAX_LEVELS {
            return Err(Error::InvalidParameter(format!(
                "levels must be in 0..={MAX_LEVELS}, got {}",
                self.levels
            )));
        }
        if !(self.lambda0 >= 0.0 && self.lambda0.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "lambda0 must be finite and non-negative, got {}",
                self.lambda0
            )));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "epsilon must be in (0, 1), got {}",
                self.epsilon
            )));
        }
        Ok(())
    }

    /// TV weight at decomposition level `level`:
    /// `lambda0 * mean(2^level * a) / 2^level`.
    pub fn lambda_for(&self, airlight: &Airlight, level: usize) -> f64 {
        let scaled = airlight.scaled(level);
        self.lambda0 * (scaled.iter().sum::<f64>() / 3.0) / (1u64 << level) as f64
    }

    fn problem(&self, lower: Plane, lambda: f64) -> Result<BoxTvProblem> {
        let mut p = BoxTvProblem::new(lower, lambda)?;
        let o = &self.solver;
        if let Some(mu) = o.mu {
            p.mu = mu;
        }
        p.tol = o.tol.unwrap_or(tv::DEFAULT_TOL);
        p.max_iters = o.max_iters.unwrap_or(tv::DEFAULT_MAX_ITERS);
        p.sweeps = o.sweeps.unwrap_or(tv::DEFAULT_SWEEPS);
        p.validate()?;
        Ok(p)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DehazeResult {
    pub image: ColorImage,
    /// Full-resolution transmission, values in `[epsilon, 1]`.
    pub transmission: TransmissionMap,
    pub airlight: Airlight,
    pub diagnostics: SolverDiagnostics,
}

/// Coarsest-level quantities of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct CoarseTrace {
    pub levels: usize,
    /// Airlight as seen by the coarsest low band (`2^L a`).
    pub airlight: [f64; 3],
    pub lambda: f64,
    pub lower: Plane,
    pub transmission: Plane,
    pub hazy_low: [Plane; 3],
    pub clear_low: [Plane; 3],
}

impl CoarseTrace {
    /// Largest deviation of `J t + A (1 - t)` from the hazy low band.
    pub fn model_residual(&self) -> f64 {
        let t = &self.transmission;
        let mut worst: f64 = 0.0;
        for c in 0..3 {
            let a = self.airlight[c];
            for ((j, i), tv) in self.clear_low[c]
                .values()
                .iter()
                .zip(self.hazy_low[c].values())
                .zip(t.values())
            {
                worst = worst.max((j * tv + a * (1.0 - tv) - i).abs());
            }
        }
        worst
    }
}

/// Nearest-neighbour 2x enlargement.
pub fn upsample_transmission(t: &Plane) -> Plane {
    Plane::from_fn(2 * t.rows(), 2 * t.cols(), |r, c| t.get(r / 2, c / 2))
}

/// Samples at even coordinates, the left inverse of [`upsample_transmission`].
pub fn downsample(t: &Plane) -> Plane {
    Plane::from_fn(t.rows().div_ceil(2), t.cols().div_ceil(2), |r, c| {
        t.get(2 * r, 2 * c)
    })
}

/// Undoes the attenuation of detail coefficients: `J = I / t` per band.
///
/// `t` must already be floored at `epsilon`; a smaller value is a bug
/// upstream and is reported as an error rather than amplified.
pub fn recover_detail_bands(details: &DetailBands, t: &Plane, epsilon: f64) -> Result<DetailBands> {
    if let Some(bad) = t.values().iter().find(|&&v| !(v >= epsilon)) {
        return Err(Error::OutOfRange(format!(
            "transmission {bad} below floor {epsilon}"
        )));
    }
    let div = |band: &Plane| band.zip_map(t, |x, tv| x / tv);
    Ok(DetailBands {
        h: div(&details.h)?,
        v: div(&details.v)?,
        d: div(&details.d)?,
    })
}

pub fn dehaze(input: &ColorImage, config: &DehazeConfig) -> Result<DehazeResult> {
    dehaze_traced(input, config).map(|(result, _)| result)
}

/// Same as [`dehaze`], also returning the coarsest-level quantities.
pub fn dehaze_traced(input: &ColorImage, config: &DehazeConfig) -> Result<(DehazeResult, CoarseTrace)> {
    config.validate()?;
    let levels = config.levels;

    let airlight = estimate_airlight(input)?;
    let (padded, cropbox) = pad_dyadic(input, levels as u32);
    let scaled = airlight.scaled(levels);

    let pyramids: Vec<WaveletPyramid> = padded
        .channels()
        .iter()
        .map(|p| dhwt_forward_multi(p, levels))
        .collect::<Result<_>>()?;
    let hazy_low = [0, 1, 2].map(|c| pyramids[c].low.clone());

    let lower = lower_bound_plane(&hazy_low, scaled, config.epsilon)?;
    let lambda = config.lambda_for(&airlight, levels);
    let (t_coarse, diagnostics) = solve_swto(&config.problem(lower.clone(), lambda)?)?;
    let t_coarse = t_coarse.into_plane();

    // invert the low-band model: J = (I - A (1 - t)) / t
    let clear_low = [0, 1, 2].map(|c| {
        hazy_low[c]
            .zip_map(&t_coarse, |i, t| (i - scaled[c] * (1.0 - t)) / t)
            .expect("low bands share dimensions")
    });

    let mut lows = clear_low.clone();
    let mut t = t_coarse.clone();
    for k in (0..levels).rev() {
        for (c, low) in lows.iter_mut().enumerate() {
            let details = recover_detail_bands(&pyramids[c].details[k], &t, config.epsilon)?;
            *low = dhwt_inverse(&SubbandSet::from_parts(low.clone(), details)?)?;
        }
        t = upsample_transmission(&t);
    }

    let restored = ColorImage::new(lows.map(|p| clamp_unit(&p)))?;
    let image = crop(&restored, &cropbox)?;
    let transmission = TransmissionMap::new(t.crop(cropbox.orig_rows, cropbox.orig_cols)?)?;

    let trace = CoarseTrace {
        levels,
        airlight: scaled,
        lambda,
        lower,
        transmission: t_coarse,
        hazy_low,
        clear_low,
    };
    Ok((
        DehazeResult {
            image,
            transmission,
            airlight,
            diagnostics,
        },
        trace,
    ))
}

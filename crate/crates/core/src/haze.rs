//! Forward haze synthesis: `I_c = J_c * t + a_c * (1 - t)` with `t = exp(-beta d)`.
//!
//! Also hosts the seeded fixture generators used for round-trip checks and
//! benchmarks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::airlight::Airlight;
use crate::error::{Error, Result};
use crate::image::{ColorImage, Plane};
use crate::transmission::TransmissionMap;

/// Scene distance per pixel, non-negative, in arbitrary units.
#[derive(Debug, Clone, PartialEq)]
pub struct DepthMap {
    plane: Plane,
}

impl DepthMap {
    pub fn new(plane: Plane) -> Result<Self> {
        if let Some(bad) = plane.values().iter().find(|&&d| d < 0.0) {
            return Err(Error::OutOfRange(format!("negative depth {bad}")));
        }
        Ok(Self { plane })
    }

    /// Linear map of 16-bit gray levels onto `[dmin, dmax]`.
    pub fn from_gray16(levels: &[u16], rows: usize, cols: usize, dmin: f64, dmax: f64) -> Result<Self> {
        if !(dmin >= 0.0 && dmax >= dmin && dmax.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "depth range [{dmin}, {dmax}] is not a valid non-negative interval"
            )));
        }
        let data = levels
            .iter()
            .map(|&g| dmin + (dmax - dmin) * f64::from(g) / f64::from(u16::MAX))
            .collect();
        Self::new(Plane::new(rows, cols, data)?)
    }

    pub fn plane(&self) -> &Plane {
        &self.plane
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScatterParams {
    pub beta: f64,
    pub airlight: Airlight,
}

impl ScatterParams {
    pub fn new(beta: f64, airlight: Airlight) -> Result<Self> {
        check_beta(beta)?;
        Ok(Self { beta, airlight })
    }
}

fn check_beta(beta: f64) -> Result<()> {
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "scattering coefficient must be positive, got {beta}"
        )));
    }
    Ok(())
}

/// `t = exp(-beta * d)`, optionally floored at `floor`.
pub fn transmission_from_depth(depth: &DepthMap, beta: f64, floor: Option<f64>) -> Result<TransmissionMap> {
    check_beta(beta)?;
    let lo = floor.unwrap_or(0.0);
    TransmissionMap::new(depth.plane.map(|d| (-beta * d).exp().max(lo)))
}

/// Applies the scattering model channel by channel.
pub fn apply_haze(clear: &ColorImage, t: &TransmissionMap, airlight: &Airlight) -> Result<ColorImage> {
    clear.channel(0).ensure_same_dims(t.plane())?;
    let a = airlight.components();
    let channels = [0, 1, 2].map(|c| {
        clear
            .channel(c)
            .zip_map(t.plane(), |j, tv| (j * tv + a[c] * (1.0 - tv)).clamp(0.0, 1.0))
            .expect("dimensions checked above")
    });
    ColorImage::new(channels)
}

fn check_block(rows: usize, cols: usize, block: usize) -> Result<()> {
    if block == 0 || !block.is_power_of_two() {
        return Err(Error::InvalidParameter(format!(
            "block size {block} is not a power of two"
        )));
    }
    if rows == 0 || cols == 0 || !rows.is_multiple_of(block) || !cols.is_multiple_of(block) {
        return Err(Error::NotDivisible {
            rows,
            cols,
            divisor: block,
        });
    }
    Ok(())
}

/// Random map that is constant on aligned `block`x`block` tiles, with tile
/// values drawn uniformly from `[lo, hi]`.
pub fn block_constant_transmission(
    rows: usize,
    cols: usize,
    block: usize,
    lo: f64,
    hi: f64,
    seed: u64,
) -> Result<TransmissionMap> {
    check_block(rows, cols, block)?;
    if !(0.0..=1.0).contains(&lo) || !(lo..=1.0).contains(&hi) {
        return Err(Error::InvalidParameter(format!(
            "transmission range [{lo}, {hi}] not inside [0, 1]"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let tiles: Vec<f64> = (0..(rows / block) * (cols / block))
        .map(|_| lo + (hi - lo) * rng.gen::<f64>())
        .collect();
    let tiles_per_row = cols / block;
    TransmissionMap::new(Plane::from_fn(rows, cols, |r, c| {
        tiles[(r / block) * tiles_per_row + c / block]
    }))
}

/// Block-constant transmission with tile values in `[0.2, 1]`.
pub fn make_block_constant_t(rows: usize, cols: usize, block: usize, seed: u64) -> Result<TransmissionMap> {
    block_constant_transmission(rows, cols, block, 0.2, 1.0, seed)
}

/// Piecewise-constant clear scene on `block`x`block` tiles. Every tile has one
/// near-black channel (at most `dark_max`) and its other channels in `[0.3, 1]`,
/// so the dark-pixel bound on transmission is nearly tight everywhere.
pub fn dark_channel_scene(
    rows: usize,
    cols: usize,
    block: usize,
    dark_max: f64,
    seed: u64,
) -> Result<ColorImage> {
    check_block(rows, cols, block)?;
    if !(0.0..0.3).contains(&dark_max) {
        return Err(Error::InvalidParameter(format!(
            "dark_max {dark_max} outside [0, 0.3)"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let tiles: Vec<[f64; 3]> = (0..(rows / block) * (cols / block))
        .map(|_| {
            let dark = rng.gen_range(0..3);
            let mut px = [0.0; 3];
            for (c, v) in px.iter_mut().enumerate() {
                *v = if c == dark {
                    rng.gen_range(0.0..=dark_max)
                } else {
                    rng.gen_range(0.3..=1.0)
                };
            }
            px
        })
        .collect();
    let tiles_per_row = cols / block;
    ColorImage::from_fn(rows, cols, |r, c| tiles[(r / block) * tiles_per_row + c / block])
}

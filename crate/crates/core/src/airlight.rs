//! Atmospheric light estimation: per channel, the brightest value that
//! survives a 3x3 minimum filter.

use crate::error::{Error, Result};
use crate::image::{ColorImage, Plane};

/// Lower clamp applied to every estimated airlight component.
pub const MIN_AIRLIGHT: f64 = 0.5;

/// Atmospheric light per RGB channel, each in `(0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Airlight(pub [f64; 3]);

impl Airlight {
    pub fn new(rgb: [f64; 3]) -> Result<Self> {
        if rgb.iter().any(|&a| !(a > 0.0 && a <= 1.0)) {
            return Err(Error::OutOfRange(format!(
                "airlight {rgb:?} must lie in (0, 1]"
            )));
        }
        Ok(Self(rgb))
    }

    pub fn white() -> Self {
        Self([1.0; 3])
    }

    pub fn components(&self) -> [f64; 3] {
        self.0
    }

    /// Airlight seen by the level-`l` low band: `2^l * a_c`.
    pub fn scaled(&self, level: usize) -> [f64; 3] {
        let s = (1u64 << level) as f64;
        self.0.map(|a| s * a)
    }

    pub fn mean(&self) -> f64 {
        self.0.iter().sum::<f64>() / 3.0
    }
}

/// 3x3 grayscale erosion with replicated borders, done as two separable
/// 3-tap minimum passes.
pub fn min_filter_3x3(plane: &Plane) -> Plane {
    let (rows, cols) = plane.dims();
    let horiz = Plane::from_fn(rows, cols, |r, c| {
        let lo = c.saturating_sub(1);
        let hi = (c + 1).min(cols - 1);
        plane.get(r, lo).min(plane.get(r, c)).min(plane.get(r, hi))
    });
    Plane::from_fn(rows, cols, |r, c| {
        let lo = r.saturating_sub(1);
        let hi = (r + 1).min(rows - 1);
        horiz.get(lo, c).min(horiz.get(r, c)).min(horiz.get(hi, c))
    })
}

/// Per-channel `max over pixels of (3x3 min)`, without the lower clamp.
pub fn eroded_channel_max(image: &ColorImage) -> Result<[f64; 3]> {
    let (rows, cols) = image.dims();
    if rows < 3 || cols < 3 {
        return Err(Error::TooSmall {
            rows,
            cols,
            min_rows: 3,
            min_cols: 3,
        });
    }
    Ok([0, 1, 2].map(|c| min_filter_3x3(image.channel(c)).max()))
}

/// Estimate of the atmospheric light, each component clamped to
/// `[MIN_AIRLIGHT, 1]`.
pub fn estimate_airlight(image: &ColorImage) -> Result<Airlight> {
    let raw = eroded_channel_max(image)?;
    Ok(Airlight(raw.map(|a| a.clamp(MIN_AIRLIGHT, 1.0))))
}

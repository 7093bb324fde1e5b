use crate::error::{Error, Result};
use crate::image::Plane;

/// Fraction of scene radiance reaching the sensor, per pixel, in `[0, 1]`.
///
/// Maps produced by the dehazing pipeline are additionally floored at the
/// configured epsilon.
#[derive(Debug, Clone, PartialEq)]
pub struct TransmissionMap {
    plane: Plane,
}

impl TransmissionMap {
    pub fn new(plane: Plane) -> Result<Self> {
        if let Some(bad) = plane.values().iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(Error::OutOfRange(format!(
                "transmission value {bad} outside [0, 1]"
            )));
        }
        Ok(Self { plane })
    }

    pub fn constant(rows: usize, cols: usize, value: f64) -> Result<Self> {
        Self::new(Plane::filled(rows, cols, value))
    }

    pub fn plane(&self) -> &Plane {
        &self.plane
    }

    pub fn into_plane(self) -> Plane {
        self.plane
    }

    pub fn dims(&self) -> (usize, usize) {
        self.plane.dims()
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.plane.get(row, col)
    }

    /// Elementwise product, the transmission of two stacked haze layers.
    pub fn compose(&self, other: &TransmissionMap) -> Result<Self> {
        Ok(Self {
            plane: self.plane.zip_map(&other.plane, |a, b| a * b)?,
        })
    }
}

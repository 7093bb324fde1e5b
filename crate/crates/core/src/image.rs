//! Image containers shared by every stage: a single real-valued [`Plane`],
//! the three-plane [`ColorImage`], and the padding/cropping helpers that
//! make arbitrary sizes compatible with a dyadic wavelet decomposition.

use crate::error::{dims_mismatch, Error, Result};

/// A dense row-major matrix of finite reals.
#[derive(Debug, Clone, PartialEq)]
pub struct Plane {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Plane {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidParameter(format!(
                "plane dimensions must be positive, got {rows}x{cols}"
            )));
        }
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: format!("{} values", rows * cols),
                actual: format!("{} values", data.len()),
            });
        }
        if let Some(bad) = data.iter().find(|v| !v.is_finite()) {
            return Err(Error::OutOfRange(format!("non-finite plane value {bad}")));
        }
        Ok(Self { rows, cols, data })
    }

    /// Build from nested rows. Mostly useful for small literal fixtures.
    pub fn from_rows(rows: &[&[f64]]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::InvalidParameter("ragged rows".into()));
        }
        Self::new(rows.len(), cols, rows.concat())
    }

    pub fn filled(rows: usize, cols: usize, value: f64) -> Self {
        assert!(rows > 0 && cols > 0, "plane dimensions must be positive");
        Self {
            rows,
            cols,
            data: vec![value; rows * cols],
        }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::filled(rows, cols, 0.0)
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        assert!(rows > 0 && cols > 0, "plane dimensions must be positive");
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self { rows, cols, data }
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn dims(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.data.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.cols + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: f64) {
        self.data[row * self.cols + col] = value;
    }

    pub fn values(&self) -> &[f64] {
        &self.data
    }

    pub fn into_values(self) -> Vec<f64> {
        self.data
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }

    /// Elementwise combination of two planes of identical size.
    pub fn zip_map(&self, other: &Plane, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        self.ensure_same_dims(other)?;
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    pub fn ensure_same_dims(&self, other: &Plane) -> Result<()> {
        if self.dims() != other.dims() {
            return Err(dims_mismatch(self.dims(), other.dims()));
        }
        Ok(())
    }

    pub fn sum_sq(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.sum_sq().sqrt()
    }

    pub fn mean(&self) -> f64 {
        self.data.iter().sum::<f64>() / self.data.len() as f64
    }

    pub fn min(&self) -> f64 {
        self.data.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.data.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Largest absolute elementwise difference. Panics on size mismatch.
    pub fn max_abs_diff(&self, other: &Plane) -> f64 {
        assert_eq!(self.dims(), other.dims());
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// Top-left `rows`x`cols` window.
    pub fn crop(&self, rows: usize, cols: usize) -> Result<Self> {
        if rows == 0 || cols == 0 || rows > self.rows || cols > self.cols {
            return Err(Error::InvalidParameter(format!(
                "crop {rows}x{cols} does not fit in {}x{}",
                self.rows, self.cols
            )));
        }
        Ok(Self::from_fn(rows, cols, |r, c| self.get(r, c)))
    }

    /// Symmetric extension to `rows`x`cols` (edge sample repeated, then mirrored).
    pub fn pad_symmetric(&self, rows: usize, cols: usize) -> Self {
        assert!(rows >= self.rows && cols >= self.cols);
        Self::from_fn(rows, cols, |r, c| {
            self.get(mirror_index(r, self.rows), mirror_index(c, self.cols))
        })
    }
}

fn mirror_index(i: usize, len: usize) -> usize {
    let m = i % (2 * len);
    if m < len {
        m
    } else {
        2 * len - 1 - m
    }
}

/// Elementwise `min(max(v, 0), 1)`.
pub fn clamp_unit(plane: &Plane) -> Plane {
    plane.map(|v| v.clamp(0.0, 1.0))
}

/// Three planes in RGB order with identical dimensions and values in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ColorImage {
    channels: [Plane; 3],
}

impl ColorImage {
    pub fn new(channels: [Plane; 3]) -> Result<Self> {
        channels[0].ensure_same_dims(&channels[1])?;
        channels[0].ensure_same_dims(&channels[2])?;
        for (idx, ch) in channels.iter().enumerate() {
            if let Some(bad) = ch.values().iter().find(|v| !(0.0..=1.0).contains(*v)) {
                return Err(Error::OutOfRange(format!(
                    "channel {idx} holds {bad}, outside [0, 1]"
                )));
            }
        }
        Ok(Self { channels })
    }

    /// Build pixel by pixel; every returned component must lie in `[0, 1]`.
    pub fn from_fn(
        rows: usize,
        cols: usize,
        mut f: impl FnMut(usize, usize) -> [f64; 3],
    ) -> Result<Self> {
        let mut planes = [
            Plane::zeros(rows, cols),
            Plane::zeros(rows, cols),
            Plane::zeros(rows, cols),
        ];
        for r in 0..rows {
            for c in 0..cols {
                let px = f(r, c);
                for (plane, v) in planes.iter_mut().zip(px) {
                    plane.set(r, c, v);
                }
            }
        }
        Self::new(planes)
    }

    pub fn filled(rows: usize, cols: usize, rgb: [f64; 3]) -> Result<Self> {
        Self::from_fn(rows, cols, |_, _| rgb)
    }

    pub fn rows(&self) -> usize {
        self.channels[0].rows()
    }

    pub fn cols(&self) -> usize {
        self.channels[0].cols()
    }

    pub fn dims(&self) -> (usize, usize) {
        self.channels[0].dims()
    }

    pub fn channel(&self, c: usize) -> &Plane {
        &self.channels[c]
    }

    pub fn channels(&self) -> &[Plane; 3] {
        &self.channels
    }

    pub fn into_channels(self) -> [Plane; 3] {
        self.channels
    }

    pub fn pixel(&self, row: usize, col: usize) -> [f64; 3] {
        [
            self.channels[0].get(row, col),
            self.channels[1].get(row, col),
            self.channels[2].get(row, col),
        ]
    }

    pub fn ensure_same_dims(&self, other: &ColorImage) -> Result<()> {
        if self.dims() != other.dims() {
            return Err(dims_mismatch(self.dims(), other.dims()));
        }
        Ok(())
    }

    /// ITU-R BT.601 luma.
    pub fn luma(&self) -> Plane {
        let [r, g, b] = &self.channels;
        Plane::from_fn(self.rows(), self.cols(), |y, x| {
            0.299 * r.get(y, x) + 0.587 * g.get(y, x) + 0.114 * b.get(y, x)
        })
    }

    /// Interleaved 8-bit RGB, `round(255 * v)`.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.rows() * self.cols() * 3);
        for r in 0..self.rows() {
            for c in 0..self.cols() {
                for v in self.pixel(r, c) {
                    out.push(quantize_unit(v));
                }
            }
        }
        out
    }
}

/// Maps a unit-interval value to a byte, `round(255 * v)`.
pub fn quantize_unit(v: f64) -> u8 {
    (v.clamp(0.0, 1.0) * 255.0).round() as u8
}

/// Interleaved 8-bit RGB to a unit-range image.
pub fn normalize_bytes(raw: &[u8], rows: usize, cols: usize) -> Result<ColorImage> {
    if rows == 0 || cols == 0 {
        return Err(Error::InvalidParameter(format!(
            "image dimensions must be positive, got {rows}x{cols}"
        )));
    }
    if raw.len() != rows * cols * 3 {
        return Err(Error::DimensionMismatch {
            expected: format!("{} bytes for {rows}x{cols} RGB", rows * cols * 3),
            actual: format!("{} bytes", raw.len()),
        });
    }
    ColorImage::from_fn(rows, cols, |r, c| {
        let i = (r * cols + c) * 3;
        [
            f64::from(raw[i]) / 255.0,
            f64::from(raw[i + 1]) / 255.0,
            f64::from(raw[i + 2]) / 255.0,
        ]
    })
}

/// Records how an image was padded so the padding can be cut away again.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CropBox {
    pub orig_rows: usize,
    pub orig_cols: usize,
    pub pad_bottom: usize,
    pub pad_right: usize,
}

impl CropBox {
    pub fn padded_dims(&self) -> (usize, usize) {
        (
            self.orig_rows + self.pad_bottom,
            self.orig_cols + self.pad_right,
        )
    }
}

/// Smallest multiple of `2^levels` that is at least `n`.
pub fn dyadic_ceil(n: usize, levels: u32) -> usize {
    let block = 1usize << levels;
    n.div_ceil(block) * block
}

/// Pads bottom and right by symmetric extension so both dimensions become
/// multiples of `2^levels`. `levels == 0` leaves the image unchanged.
pub fn pad_dyadic(image: &ColorImage, levels: u32) -> (ColorImage, CropBox) {
    let (rows, cols) = image.dims();
    let (prows, pcols) = (dyadic_ceil(rows, levels), dyadic_ceil(cols, levels));
    let cropbox = CropBox {
        orig_rows: rows,
        orig_cols: cols,
        pad_bottom: prows - rows,
        pad_right: pcols - cols,
    };
    if prows == rows && pcols == cols {
        return (image.clone(), cropbox);
    }
    let channels = image
        .channels()
        .clone()
        .map(|p| p.pad_symmetric(prows, pcols));
    (ColorImage { channels }, cropbox)
}

/// Returns the top-left `orig_rows`x`orig_cols` region.
pub fn crop(image: &ColorImage, cropbox: &CropBox) -> Result<ColorImage> {
    let (rows, cols) = image.dims();
    if cropbox.orig_rows > rows || cropbox.orig_cols > cols {
        return Err(Error::InvalidParameter(format!(
            "crop box {}x{} exceeds image {rows}x{cols}",
            cropbox.orig_rows, cropbox.orig_cols
        )));
    }
    let [r, g, b] = image.channels();
    Ok(ColorImage {
        channels: [
            r.crop(cropbox.orig_rows, cropbox.orig_cols)?,
            g.crop(cropbox.orig_rows, cropbox.orig_cols)?,
            b.crop(cropbox.orig_rows, cropbox.orig_cols)?,
        ],
    })
}

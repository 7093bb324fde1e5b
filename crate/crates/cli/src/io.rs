//! PNG input and output.

use std::path::Path;

use anyhow::{bail, Context, Result};
use image::{GrayImage, ImageBuffer, Luma, RgbImage};
use wavedehaze::image::quantize_unit;
use wavedehaze::{normalize_bytes, ColorImage, Plane};

/// Decodes any PNG as 8-bit RGB in `[0, 1]`.
pub fn read_rgb(path: &Path) -> Result<ColorImage> {
    let img = image::open(path)
        .with_context(|| format!("cannot read image {}", path.display()))?
        .to_rgb8();
    let (w, h) = img.dimensions();
    Ok(normalize_bytes(img.as_raw(), h as usize, w as usize)?)
}

pub fn write_rgb(path: &Path, img: &ColorImage) -> Result<()> {
    let (rows, cols) = img.dims();
    let buf = RgbImage::from_raw(cols as u32, rows as u32, img.to_bytes())
        .context("pixel buffer size mismatch")?;
    buf.save(path)
        .with_context(|| format!("cannot write {}", path.display()))
}

/// Writes a unit-range plane as 8-bit grayscale, `round(255 v)`.
pub fn write_gray(path: &Path, plane: &Plane) -> Result<()> {
    let bytes = plane.values().iter().map(|&v| quantize_unit(v)).collect();
    let buf = GrayImage::from_raw(plane.cols() as u32, plane.rows() as u32, bytes)
        .context("pixel buffer size mismatch")?;
    buf.save(path)
        .with_context(|| format!("cannot write {}", path.display()))
}

/// Reads a grayscale PNG as 16-bit levels; 8-bit input is widened.
pub fn read_gray16(path: &Path) -> Result<(Vec<u16>, usize, usize)> {
    let img: ImageBuffer<Luma<u16>, Vec<u16>> = image::open(path)
        .with_context(|| format!("cannot read depth map {}", path.display()))?
        .to_luma16();
    let (w, h) = img.dimensions();
    if w == 0 || h == 0 {
        bail!("depth map {} is empty", path.display());
    }
    Ok((img.into_raw(), h as usize, w as usize))
}

/// Writes 16-bit grayscale levels.
pub fn write_gray16(path: &Path, levels: Vec<u16>, rows: usize, cols: usize) -> Result<()> {
    let buf: ImageBuffer<Luma<u16>, Vec<u16>> =
        ImageBuffer::from_raw(cols as u32, rows as u32, levels).context("pixel buffer size mismatch")?;
    buf.save(path)
        .with_context(|| format!("cannot write {}", path.display()))
}

//! The `bench` subcommand: wall time of the pipeline against image size.

use std::io::Write;
use std::time::Instant;

use anyhow::{bail, Result};
use wavedehaze::haze::{apply_haze, block_constant_transmission, dark_channel_scene};
use wavedehaze::{dehaze, Airlight, ColorImage, DehazeConfig};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BenchRow {
    pub size: usize,
    pub mean_secs: f64,
    pub min_secs: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchReport {
    pub rows: Vec<BenchRow>,
    /// Least-squares slope of `ln(mean time)` against `ln(side length)`.
    pub slope: Option<f64>,
}

/// Square hazy fixture of side `size`, reproducible from `seed`.
pub fn bench_fixture(size: usize, seed: u64) -> Result<ColorImage> {
    let block = if size.is_multiple_of(8) { 8 } else { 1 };
    let clear = dark_channel_scene(size, size, block, 0.03, seed)?;
    let t = block_constant_transmission(size, size, block, 0.4, 0.9, seed.wrapping_add(1))?;
    Ok(apply_haze(&clear, &t, &Airlight::white())?)
}

/// Ordinary least-squares slope of `y` on `x`; `None` with fewer than two
/// distinct abscissae.
pub fn fit_slope(x: &[f64], y: &[f64]) -> Option<f64> {
    let n = x.len() as f64;
    if x.len() < 2 || x.len() != y.len() {
        return None;
    }
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx) * (v - mx)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    Some(sxy / sxx)
}

pub fn loglog_slope(rows: &[BenchRow]) -> Option<f64> {
    let x: Vec<f64> = rows.iter().map(|r| (r.size as f64).ln()).collect();
    let y: Vec<f64> = rows.iter().map(|r| r.mean_secs.max(1e-9).ln()).collect();
    fit_slope(&x, &y)
}

pub fn run_bench(sizes: &[usize], reps: usize, seed: u64, config: &DehazeConfig) -> Result<BenchReport> {
    if sizes.is_empty() {
        bail!("no benchmark sizes given");
    }
    if reps == 0 {
        bail!("repetitions must be at least 1");
    }
    if let Some(bad) = sizes.iter().find(|&&s| s < 3) {
        bail!("benchmark size {bad} is below the 3x3 minimum");
    }
    config.validate()?;
    let mut rows = Vec::with_capacity(sizes.len());
    for &size in sizes {
        let img = bench_fixture(size, seed)?;
        let mut times = Vec::with_capacity(reps);
        for _ in 0..reps {
            let start = Instant::now();
            let out = dehaze(&img, config)?;
            times.push(start.elapsed().as_secs_f64());
            std::hint::black_box(out);
        }
        let mean_secs = times.iter().sum::<f64>() / reps as f64;
        let min_secs = times.iter().copied().fold(f64::INFINITY, f64::min);
        rows.push(BenchRow {
            size,
            mean_secs,
            min_secs,
        });
    }
    let slope = loglog_slope(&rows);
    Ok(BenchReport { rows, slope })
}

pub fn write_csv<W: Write>(out: W, report: &BenchReport) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["size", "mean_secs", "min_secs"])?;
    for r in &report.rows {
        w.write_record([r.size.to_string(), r.mean_secs.to_string(), r.min_secs.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

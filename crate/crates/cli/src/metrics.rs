//! The `metrics` subcommand.

use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use wavedehaze::metrics::{hautiere, reference_report, ReferenceReport, VisibilityReport};

use crate::io::read_rgb;

#[derive(Debug, Clone)]
pub struct MetricsArgs {
    pub reference: PathBuf,
    pub test: PathBuf,
    pub hazy: Option<PathBuf>,
    pub threshold: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricsRow {
    pub path: String,
    pub reference: ReferenceReport,
    pub visibility: Option<VisibilityReport>,
}

pub fn compute_metrics(args: &MetricsArgs) -> Result<MetricsRow> {
    let reference = read_rgb(&args.reference)?;
    let test = read_rgb(&args.test)?;
    let report = reference_report(&reference, &test)
        .with_context(|| format!("comparing {} with {}", args.test.display(), args.reference.display()))?;
    let visibility = match &args.hazy {
        Some(path) => {
            let hazy = read_rgb(path)?;
            Some(hautiere(&hazy, &test, args.threshold).context("visibility descriptors")?)
        }
        None => None,
    };
    Ok(MetricsRow {
        path: args.test.display().to_string(),
        reference: report,
        visibility,
    })
}

/// Writes a header and one row. Floats use Rust's shortest round-trip
/// formatting, so the output never depends on locale.
pub fn write_csv<W: Write>(out: W, row: &MetricsRow) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["path", "mse", "psnr", "ssim"];
    let r = &row.reference;
    let mut record = vec![row.path.clone(), r.mse.to_string(), r.psnr.to_string(), r.ssim.to_string()];
    if let Some(v) = &row.visibility {
        header.extend(["e", "sigma", "rbar"]);
        record.extend([v.e.to_string(), v.sigma.to_string(), v.rbar.to_string()]);
    }
    w.write_record(&header)?;
    w.write_record(&record)?;
    w.flush()?;
    Ok(())
}

pub fn cmd_metrics(args: &MetricsArgs, csv_out: Option<&Path>) -> Result<MetricsRow> {
    let row = compute_metrics(args)?;
    match csv_out {
        Some(path) => {
            let file = std::fs::File::create(path)
                .with_context(|| format!("cannot create {}", path.display()))?;
            write_csv(file, &row)?;
        }
        None => write_csv(std::io::stdout().lock(), &row)?,
    }
    Ok(row)
}

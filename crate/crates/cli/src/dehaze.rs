//! The `dehaze` subcommand.

use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use anyhow::{bail, Context, Result};
use wavedehaze::{dehaze, DehazeConfig, DehazeResult};

use crate::io::{read_rgb, write_gray, write_rgb};

#[derive(Debug, Clone)]
pub struct DehazeJob {
    pub input: PathBuf,
    pub output: PathBuf,
    /// Where to write the 8-bit transmission map, if requested.
    pub transmission: Option<PathBuf>,
}

#[derive(Debug)]
pub struct DehazeOutcome {
    pub job: DehazeJob,
    pub result: DehazeResult,
    pub elapsed: Duration,
}

/// `out.png` -> `out_transmission.png`.
pub fn transmission_path(output: &Path) -> PathBuf {
    let stem = output
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "out".into());
    output.with_file_name(format!("{stem}_transmission.png"))
}

/// Pairs inputs with output paths. A single input writes to `output`
/// directly; several inputs treat `output` as a directory and reuse each
/// input's file name.
pub fn plan_jobs(inputs: &[PathBuf], output: &Path, emit_transmission: bool) -> Result<Vec<DehazeJob>> {
    if inputs.is_empty() {
        bail!("no input images given");
    }
    for input in inputs {
        if !input.is_file() {
            bail!("input {} does not exist", input.display());
        }
    }
    let outputs: Vec<PathBuf> = if inputs.len() == 1 {
        vec![output.to_path_buf()]
    } else {
        if !output.is_dir() {
            bail!(
                "with {} inputs the output {} must be an existing directory",
                inputs.len(),
                output.display()
            );
        }
        inputs
            .iter()
            .map(|p| {
                let name = p.file_name().context("input path has no file name")?;
                Ok(output.join(name).with_extension("png"))
            })
            .collect::<Result<_>>()?
    };
    Ok(inputs
        .iter()
        .zip(outputs)
        .map(|(input, output)| DehazeJob {
            input: input.clone(),
            transmission: emit_transmission.then(|| transmission_path(&output)),
            output,
        })
        .collect())
}

pub fn run_job(job: &DehazeJob, config: &DehazeConfig) -> Result<DehazeOutcome> {
    let img = read_rgb(&job.input)?;
    let start = Instant::now();
    let result = dehaze(&img, config).with_context(|| format!("dehazing {}", job.input.display()))?;
    let elapsed = start.elapsed();
    write_rgb(&job.output, &result.image)?;
    if let Some(path) = &job.transmission {
        write_gray(path, result.transmission.plane())?;
    }
    Ok(DehazeOutcome {
        job: job.clone(),
        result,
        elapsed,
    })
}

/// Runs every job, spreading them over `jobs` worker threads. Results come
/// back in input order.
pub fn cmd_dehaze(plan: &[DehazeJob], config: &DehazeConfig, jobs: usize) -> Result<Vec<DehazeOutcome>> {
    config.validate()?;
    let workers = jobs.max(1).min(plan.len().max(1));
    if workers == 1 {
        return plan.iter().map(|job| run_job(job, config)).collect();
    }
    let chunk = plan.len().div_ceil(workers);
    std::thread::scope(|scope| {
        let handles: Vec<_> = plan
            .chunks(chunk)
            .map(|part| scope.spawn(move || part.iter().map(|job| run_job(job, config)).collect::<Vec<_>>()))
            .collect();
        let mut out = Vec::with_capacity(plan.len());
        for handle in handles {
            let results = handle.join().expect("dehaze worker panicked");
            for r in results {
                out.push(r?);
            }
        }
        Ok(out)
    })
}

pub fn describe(outcome: &DehazeOutcome) -> String {
    let d = &outcome.result.diagnostics;
    let [r, g, b] = outcome.result.airlight.components();
    format!(
        "{}: iterations={} converged={} airlight={r:.4},{g:.4},{b:.4} time={:.3}s",
        outcome.job.output.display(),
        d.iterations,
        d.converged,
        outcome.elapsed.as_secs_f64()
    )
}

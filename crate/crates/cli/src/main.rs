use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use wavedehaze::pipeline::{DEFAULT_EPSILON, DEFAULT_LAMBDA0, DEFAULT_LEVELS};
use wavedehaze::{DehazeConfig, SolverOverrides};
use wavedehaze_cli::bench::{run_bench, write_csv as write_bench_csv};
use wavedehaze_cli::dehaze::{cmd_dehaze, describe, plan_jobs};
use wavedehaze_cli::metrics::{cmd_metrics, MetricsArgs};
use wavedehaze_cli::simulate::{cmd_simulate, parse_airlight, SimulateArgs, TransmissionSource};

#[derive(Parser)]
#[command(name = "wavedehaze", version, about = "Single-image dehazing on Haar wavelet low bands")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Remove haze from one or more PNG images.
    Dehaze(DehazeCmd),
    /// Add synthetic haze to a clear PNG image.
    Simulate(SimulateCmd),
    /// Compare a restored image with its reference as one CSV row.
    Metrics(MetricsCmd),
    /// Time the pipeline on synthetic square images.
    Bench(BenchCmd),
}

#[derive(Args)]
struct PipelineFlags {
    /// Wavelet decomposition depth (0 solves at full resolution).
    #[arg(long, default_value_t = DEFAULT_LEVELS)]
    levels: usize,
    /// TV weight scale; the weight is lambda0 times the mean airlight.
    #[arg(long, default_value_t = DEFAULT_LAMBDA0)]
    lambda0: f64,
    /// Transmission floor.
    #[arg(long, default_value_t = DEFAULT_EPSILON)]
    epsilon: f64,
    /// Solver relative-change tolerance.
    #[arg(long)]
    tol: Option<f64>,
    /// Solver iteration cap.
    #[arg(long)]
    max_iters: Option<usize>,
    /// Bregman penalty (default 2 lambda + 0.1).
    #[arg(long)]
    mu: Option<f64>,
}

impl PipelineFlags {
    fn config(&self) -> DehazeConfig {
        DehazeConfig {
            levels: self.levels,
            lambda0: self.lambda0,
            epsilon: self.epsilon,
            solver: SolverOverrides {
                mu: self.mu,
                tol: self.tol,
                max_iters: self.max_iters,
                sweeps: None,
            },
        }
    }
}

#[derive(Args)]
struct DehazeCmd {
    /// Input PNG images.
    #[arg(required = true)]
    inputs: Vec<PathBuf>,
    /// Output file, or directory when several inputs are given.
    #[arg(short, long)]
    output: PathBuf,
    /// Also write the transmission map as `<output stem>_transmission.png`.
    #[arg(long)]
    emit_transmission: bool,
    /// Images processed in parallel.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    #[command(flatten)]
    pipeline: PipelineFlags,
}

#[derive(Args)]
struct SimulateCmd {
    /// Clear PNG image.
    clear: PathBuf,
    #[arg(short, long)]
    output: PathBuf,
    /// 16-bit grayscale depth map.
    #[arg(long)]
    depth: Option<PathBuf>,
    /// Constant transmission in [0, 1].
    #[arg(long = "t")]
    constant_t: Option<f64>,
    /// Scattering coefficient for depth input.
    #[arg(long, default_value_t = 1.0)]
    beta: f64,
    /// Distance mapped to gray level 0.
    #[arg(long, default_value_t = 0.0)]
    dmin: f64,
    /// Distance mapped to the largest gray level.
    #[arg(long, default_value_t = 1.0)]
    dmax: f64,
    /// Airlight as `r,g,b` or a single gray value.
    #[arg(long, default_value = "1,1,1")]
    airlight: String,
    /// Write the ground-truth transmission as 8-bit grayscale.
    #[arg(long)]
    transmission_out: Option<PathBuf>,
}

#[derive(Args)]
struct MetricsCmd {
    reference: PathBuf,
    test: PathBuf,
    /// Hazy input; adds the e, sigma and rbar columns.
    hazy: Option<PathBuf>,
    /// Visible-edge threshold on the Sobel magnitude.
    #[arg(long, default_value_t = wavedehaze::metrics::DEFAULT_EDGE_THRESHOLD)]
    tau: f64,
    /// Write the CSV here instead of standard output.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct BenchCmd {
    /// Comma-separated square side lengths.
    #[arg(long, default_value = "256,512,1024")]
    sizes: String,
    #[arg(long, default_value_t = 3)]
    reps: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write the CSV here instead of standard output.
    #[arg(long)]
    csv: Option<PathBuf>,
    #[command(flatten)]
    pipeline: PipelineFlags,
}

fn parse_sizes(s: &str) -> Result<Vec<usize>> {
    s.split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(|p| p.parse::<usize>().with_context(|| format!("bad size {p:?}")))
        .collect()
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Dehaze(cmd) => {
            let plan = plan_jobs(&cmd.inputs, &cmd.output, cmd.emit_transmission)?;
            for outcome in cmd_dehaze(&plan, &cmd.pipeline.config(), cmd.jobs)? {
                println!("{}", describe(&outcome));
                if !outcome.result.diagnostics.converged {
                    eprintln!(
                        "warning: solver stopped at the iteration cap for {}",
                        outcome.job.input.display()
                    );
                }
            }
        }
        Command::Simulate(cmd) => {
            let source = match (cmd.depth, cmd.constant_t) {
                (Some(_), Some(_)) => bail!("give either --depth or --t, not both"),
                (None, None) => bail!("one of --depth or --t is required"),
                (Some(path), None) => TransmissionSource::Depth {
                    path,
                    beta: cmd.beta,
                    dmin: cmd.dmin,
                    dmax: cmd.dmax,
                },
                (None, Some(t)) => TransmissionSource::Constant(t),
            };
            let args = SimulateArgs {
                clear: cmd.clear,
                output: cmd.output,
                source,
                airlight: parse_airlight(&cmd.airlight)?,
                transmission_out: cmd.transmission_out,
            };
            let t = cmd_simulate(&args)?;
            println!(
                "{}: transmission range [{:.6}, {:.6}]",
                args.output.display(),
                t.plane().min(),
                t.plane().max()
            );
        }
        Command::Metrics(cmd) => {
            let args = MetricsArgs {
                reference: cmd.reference,
                test: cmd.test,
                hazy: cmd.hazy,
                threshold: cmd.tau,
            };
            cmd_metrics(&args, cmd.csv.as_deref())?;
        }
        Command::Bench(cmd) => {
            let sizes = parse_sizes(&cmd.sizes)?;
            let report = run_bench(&sizes, cmd.reps, cmd.seed, &cmd.pipeline.config())?;
            match &cmd.csv {
                Some(path) => write_bench_csv(
                    std::fs::File::create(path).with_context(|| format!("cannot create {}", path.display()))?,
                    &report,
                )?,
                None => write_bench_csv(std::io::stdout().lock(), &report)?,
            }
            match report.slope {
                Some(s) => eprintln!("log-log slope of time vs side length: {s:.3}"),
                None => eprintln!("log-log slope needs at least two sizes"),
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}

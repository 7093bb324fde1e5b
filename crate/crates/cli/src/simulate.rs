//! The `simulate` subcommand: clear image plus depth or constant
//! transmission to hazy image.

use std::path::PathBuf;

use anyhow::{bail, Result};
use wavedehaze::haze::{apply_haze, transmission_from_depth, DepthMap, ScatterParams};
use wavedehaze::{Airlight, TransmissionMap};

use crate::io::{read_gray16, read_rgb, write_gray, write_rgb};

#[derive(Debug, Clone, PartialEq)]
pub enum TransmissionSource {
    Depth {
        path: PathBuf,
        beta: f64,
        dmin: f64,
        dmax: f64,
    },
    Constant(f64),
}

#[derive(Debug, Clone)]
pub struct SimulateArgs {
    pub clear: PathBuf,
    pub output: PathBuf,
    pub source: TransmissionSource,
    pub airlight: Airlight,
    /// Optional ground-truth transmission output.
    pub transmission_out: Option<PathBuf>,
}

/// Parses `r,g,b` into an airlight.
pub fn parse_airlight(s: &str) -> Result<Airlight> {
    let parts: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()?;
    let rgb: [f64; 3] = match parts.as_slice() {
        [v] => [*v; 3],
        [r, g, b] => [*r, *g, *b],
        _ => bail!("airlight must be one value or r,g,b, got {s:?}"),
    };
    Ok(Airlight::new(rgb)?)
}

pub fn cmd_simulate(args: &SimulateArgs) -> Result<TransmissionMap> {
    let clear = read_rgb(&args.clear)?;
    let (rows, cols) = clear.dims();
    let t = match &args.source {
        TransmissionSource::Constant(v) => TransmissionMap::constant(rows, cols, *v)?,
        TransmissionSource::Depth {
            path,
            beta,
            dmin,
            dmax,
        } => {
            let (levels, drows, dcols) = read_gray16(path)?;
            if (drows, dcols) != (rows, cols) {
                bail!("depth map is {drows}x{dcols} but the image is {rows}x{cols}");
            }
            let params = ScatterParams::new(*beta, args.airlight)?;
            let depth = DepthMap::from_gray16(&levels, rows, cols, *dmin, *dmax)?;
            transmission_from_depth(&depth, params.beta, None)?
        }
    };
    let hazy = apply_haze(&clear, &t, &args.airlight)?;
    write_rgb(&args.output, &hazy)?;
    if let Some(path) = &args.transmission_out {
        write_gray(path, t.plane())?;
    }
    Ok(t)
}

//! Single-image dehazing on the low band of a multilevel Haar wavelet
//! decomposition.
//!
//! The haze model `I = J t + a (1 - t)` survives an orthonormal Haar
//! transform when `t` is constant on aligned `2^L` tiles: the level-`L` low
//! band obeys the same model with airlight `2^L a`, and detail bands are
//! only attenuated by `t`. Transmission is therefore estimated on a band
//! `4^L` times smaller than the image, by a box-constrained TV program, and
//! the full-resolution result is rebuilt by the inverse transform.

pub mod airlight;
pub mod error;
pub mod haar;
pub mod haze;
pub mod image;
pub mod metrics;
pub mod pipeline;
pub mod transmission;
pub mod tv;

pub use airlight::{estimate_airlight, Airlight};
pub use error::{Error, Result};
pub use haar::{
    dhwt_forward, dhwt_forward_multi, dhwt_inverse, dhwt_inverse_multi, DetailBands, SubbandSet,
    WaveletPyramid,
};
pub use haze::{apply_haze, transmission_from_depth, DepthMap, ScatterParams};
pub use image::{clamp_unit, crop, normalize_bytes, pad_dyadic, ColorImage, CropBox, Plane};
pub use pipeline::{dehaze, dehaze_traced, CoarseTrace, DehazeConfig, DehazeResult, SolverOverrides};
pub use transmission::TransmissionMap;
pub use tv::{solve_swto, BoxTvProblem, SolverDiagnostics};

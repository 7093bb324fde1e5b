//! Subcommand implementations behind the `wavedehaze` binary.

pub mod bench;
pub mod dehaze;
pub mod io;
pub mod metrics;
pub mod simulate;

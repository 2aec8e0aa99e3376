//! Pseudo-spectral solver for the 2D generalized MHD system in vorticity–current form
//!
//! ```text
//! ω_t + u·∇ω + 𝓛ω = b·∇j
//! j_t + u·∇j − Δj = b·∇ω + T(∇u, ∇b)
//! ```
//!
//! on the torus [0, 2π)², where 𝓛 is the nonlocal operator with kernel 1/(|y|² m(|y|)),
//! with diagnostics for the energy and enstrophy ledgers, Lᵖ norms, positivity of the
//! dissipation and the Beale–Kato–Majda integral.

pub mod cli;
pub mod config;
pub mod diagnostics;
pub mod dynamics;
pub mod io;
pub mod kernel;
pub mod presets;
pub mod spectral;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Kernel(#[from] kernel::KernelError),
    #[error(transparent)]
    Spectral(#[from] spectral::SpectralError),
    #[error(transparent)]
    Dynamics(#[from] dynamics::DynamicsError),
    #[error(transparent)]
    Diagnostics(#[from] diagnostics::DiagnosticsError),
    #[error(transparent)]
    Config(#[from] config::ConfigError),
    #[error(transparent)]
    Preset(#[from] presets::PresetError),
    #[error(transparent)]
    Snapshot(#[from] io::snapshot::SnapshotError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("{0}")]
    Usage(String),
}

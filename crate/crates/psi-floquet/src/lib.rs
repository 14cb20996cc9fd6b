//! Parametric subharmonic instability of internal gravity waves.
//!
//! A plane internal wave `k = (m̂, n̂)` of amplitude `ε` in a fluid with
//! buoyancy frequency `N` destabilises pairs of secondary waves whose Floquet
//! parameter `μ` lies on a resonant curve. This crate locates that curve,
//! evaluates the closed-form growth function `e(μ)` (so that the leading
//! unstable eigenvalue has real part `ε√e`), and checks the prediction
//! against the spectrum of the truncated Floquet–Bloch operator and against
//! direct time integration.
//!
//! Modules, bottom up:
//!
//! - [`wavefield`]: dispersion relation, eigenbasis, symplectic pairing
//! - [`resonance`]: the resonant branches `φ±` and the spectral gap
//! - [`bloch`]: the banded Bloch operator
//! - [`entanglement`]: matrix elements of the jets in the eigenbasis
//! - [`reduced`]: the 2×2 reduction, `e(μ)` and the physics comparison
//! - [`spectral`]: eigensolves, convergence and growth simulations
//! - [`cli`]: configuration and the `psi` subcommands

// Guards such as `!(x > 0.0)` are written to reject NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bloch;
pub mod cli;
pub mod entanglement;
pub mod error;
pub mod reduced;
pub mod resonance;
pub mod spectral;
pub mod wavefield;

pub use error::{Error, Result};
pub use resonance::{Branch, GapReport, ResonantPoint};
pub use wavefield::{FloquetPoint, Mode, PrimaryWave, Sign};

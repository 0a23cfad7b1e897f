//! Two-fluid (electron/ion) isothermal Euler–Poisson solver for a plasma
//! bounded by two grounded, floating walls.
//!
//! Everything here is non-dimensional: lengths in units of the wall gap,
//! velocities in units of the Bohm speed, potentials in units of `k_B T_e / e`.
//! The crate is `no_std` (with `alloc`); IO, configuration files and the CLI
//! live in the companion `sheath` crate.
//!
//! Module map:
//!
//! * [`params`]: parameter sets and closed-form potential-drop targets.
//! * [`mesh`]: uniform cell-centred grid and the evolving [`mesh::PlasmaState`].
//! * [`riemann`]: interface fluxes (Rusanov, HLL and the Bohm-bounded variants).
//! * [`boundary`]: ghost cells at the walls.
//! * [`poisson`]: implicit potential solve.
//! * [`sources`]: ionization closure, collisions, Lorentz force, source time steps.
//! * [`scheme`]: Lie, modified Lie and Strang integrators plus the run loop.
//! * [`diagnostics`]: ambipolarity, oscillation and sheath measurements.
#![no_std]
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::result_large_err)]

extern crate alloc;
#[cfg(feature = "std")]
extern crate std;

pub mod boundary;
pub mod diagnostics;
mod error;
pub mod mesh;
pub mod params;
pub mod poisson;
pub mod riemann;
pub mod scheme;
pub mod sources;

pub use error::{Error, Result};

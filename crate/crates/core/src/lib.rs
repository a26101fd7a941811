//! 1D compressible Navier-Stokes with gamma-law pressure and power-law
//! (possibly degenerate) viscosity.
//!
//! The crate integrates the system in two equivalent forms: the
//! conservative primitive form in `(rho, m)`, and the effective-velocity
//! form in `(rho, v)` with `v = u + d/dx phi(rho)`, which is parabolic in
//! the density and a transport equation for `v`. On top of the solvers it
//! provides the energy functionals of both forms, the relative entropy
//! between a candidate run and a strong reference run, the associated
//! dissipation distance, and a Gronwall-type stability certificate that
//! checks `H(t) <= H(0) exp(int lambda)` snapshot by snapshot.

pub mod cli;
pub mod config;
pub mod entropy;
pub mod error;
pub mod mms;
pub mod model;
mod num;
pub mod pipeline;
pub mod report;
pub mod scenarios;
pub mod solver;
pub mod transform;

pub use error::{Error, Result};
pub use model::{
    discrete_norm, total_mass, BoundaryKind, FaceAverage, FluidParams, Formulation, Grid1D,
    NormKind, Snapshots, StateU, StateV, TimeControls, Trajectory, DEFAULT_DENSITY_FLOOR,
};
pub use transform::{phi, pressure, to_effective, to_primitive, viscosity};

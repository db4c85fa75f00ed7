//! Numerical model of wall defects in smectic-A thin films.
//!
//! The crate implements the pieces needed to evaluate and minimize
//! free-discontinuity energies for layered liquid crystals in two
//! dimensions:
//!
//! * [`qtensor`] — algebra of normalized 2D uniaxial Q-tensors
//!   (director/angle conversions, distances, the constant-layer-thickness
//!   constraint residual on sampled fields);
//! * [`jump_energy`] — interfacial energy densities for director walls:
//!   the singular density with its bisector constraint, its finite
//!   envelope, and the bisector geometry;
//! * [`fields`] — restricted configuration classes: polar-curve jump sets,
//!   rectangle and quarter-disk director fields, piecewise-constant
//!   partitions;
//! * [`functionals`] — discretized energy functionals (trapezoid rule,
//!   second-order difference stencils) for those classes;
//! * [`optimizer`] — BFGS quasi-Newton minimization with strong Wolfe line
//!   search, mesh continuation, gradient verification, and drivers for the
//!   rectangle and quarter-disk problems;
//! * [`bv_probe`] — numerical probing of BV-ellipticity with
//!   piecewise-constant competitor families.

// Validation uses `!(x > 0.0)` so that NaN fails the check too; the
// numerical kernels index several arrays in lockstep.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![allow(clippy::needless_range_loop)]

pub mod bv_probe;
pub mod error;
pub mod fields;
pub mod functionals;
pub mod jump_energy;
pub mod numdiff;
pub mod optimizer;
pub mod qtensor;

pub use error::Error;

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

//! Measurement-theoretic toolkit for Gleason-type theorems on qubits.
//!
//! - [`operator`]: Hermitian operators, effects, projectors, densities, Bloch coordinates.
//! - [`measurement`]: measurements as ordered effect sequences, mixing, padding, named catalog.
//! - [`simulability`]: constructive projective simulations and a certified membership test.
//! - [`frame`]: frame functions over finite measurement sets and their rigidity.
//! - [`report`]: the command-line reports.

pub mod constants;
pub mod error;
pub mod frame;
pub mod measurement;
pub mod operator;
pub mod random;
pub mod report;
pub mod simulability;
pub mod tolerance;

pub use error::{Error, Result};
pub use measurement::{Measurement, MeasurementSetTag, MeasurementVector};
pub use operator::{BlochCoefficients, DensityOperator, Effect, HermitianOperator, Projector, SpectralDecomposition};

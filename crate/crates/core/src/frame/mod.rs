//! Frame functions over finite sets of measurements.
//!
//! A frame function assigns a value in `[0, 1]` to every effect so that the
//! values of each measurement's outcomes add up to one. Over a finite set of
//! measurements these conditions form a linear system whose solution space
//! measures how far the set is from pinning down a density operator.

mod check;
mod fit;
mod registry;
mod sample;
mod system;

use crate::error::{Error, Result};
use crate::operator::{born_probability, DensityOperator, Effect};

pub use check::{additivity_check, check_frame, mixture_outcome_probability, FrameCheck, FrameTable, TableFrame};
pub use fit::{fit_density, fit_values, DensityFit};
pub use registry::EffectRegistry;
pub use sample::{sample_3psm_prime, sample_measurements, sample_pvm, sample_two_outcome};
pub use system::{build_system, sample_feasible, solve_space, FrameSystem, SolutionSpace};

/// Sine of the largest angle to `±z` still treated as on-axis.
const AXIS_TOL: f64 = 1e-9;

/// Anything that assigns a number to an effect.
pub trait FrameFunction {
    fn value(&self, e: &Effect) -> Result<f64>;
}

/// The frame function that is `0` on `|0⟩⟨0|`, `1` on `|1⟩⟨1|` and `½` on every
/// other rank-1 projector, extended to effects by
/// `g(α, r) = α - |r|` along `+z`, `α + |r|` along `-z` and `α` elsewhere.
#[derive(Clone, Copy, Debug, Default)]
pub struct CounterexampleG;

impl FrameFunction for CounterexampleG {
    fn value(&self, e: &Effect) -> Result<f64> {
        counterexample_g(e)
    }
}

pub fn counterexample_g(e: &Effect) -> Result<f64> {
    if e.dim() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, got: e.dim() });
    }
    let b = e.bloch()?;
    let r = b.radius();
    if r == 0.0 {
        return Ok(b.a);
    }
    let transverse = (b.b * b.b + b.c * b.c).sqrt();
    if transverse <= AXIS_TOL * r {
        Ok(if b.d > 0.0 { b.a - r } else { b.a + r })
    } else {
        Ok(b.a)
    }
}

/// `e ↦ Tr(ρ e)`.
#[derive(Clone, Debug)]
pub struct BornRule(pub DensityOperator);

impl FrameFunction for BornRule {
    fn value(&self, e: &Effect) -> Result<f64> {
        born_probability(&self.0, e)
    }
}

/// Adapts a closure.
pub struct FnFrame<F>(pub F);

impl<F: Fn(&Effect) -> f64> FrameFunction for FnFrame<F> {
    fn value(&self, e: &Effect) -> Result<f64> {
        Ok((self.0)(e))
    }
}

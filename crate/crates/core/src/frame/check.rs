use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measurement::Measurement;
use crate::operator::{Effect, HermitianOperator, Projector};
use crate::tolerance::VALIDATION_TOL;

use super::{EffectRegistry, FrameFunction};

/// Values of a frame function on the ids of an [`EffectRegistry`].
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FrameTable {
    values: BTreeMap<usize, f64>,
}

impl FrameTable {
    /// Rejects values outside `[0, 1]` by more than `1e-10`.
    pub fn new(values: BTreeMap<usize, f64>) -> Result<Self> {
        if let Some((id, v)) = values.iter().find(|(_, v)| !(-VALIDATION_TOL..=1.0 + VALIDATION_TOL).contains(*v)) {
            return Err(Error::InvalidInput(format!("frame value {v} for effect #{id} is outside [0, 1]")));
        }
        Ok(Self { values })
    }

    /// One value per registry id, in id order.
    pub fn from_values(values: &[f64]) -> Result<Self> {
        Self::new(values.iter().copied().enumerate().collect())
    }

    /// Evaluates `f` on every registered effect.
    pub fn from_function(registry: &EffectRegistry, f: &dyn FrameFunction) -> Result<Self> {
        let values = registry
            .entries()
            .iter()
            .enumerate()
            .map(|(id, e)| Ok((id, f.value(e)?)))
            .collect::<Result<BTreeMap<_, _>>>()?;
        Self::new(values)
    }

    pub fn get(&self, id: usize) -> Option<f64> {
        self.values.get(&id).copied()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &BTreeMap<usize, f64> {
        &self.values
    }
}

/// A table read through its registry, usable wherever a frame function is expected.
pub struct TableFrame<'a> {
    pub registry: &'a EffectRegistry,
    pub table: &'a FrameTable,
}

impl FrameFunction for TableFrame<'_> {
    fn value(&self, e: &Effect) -> Result<f64> {
        let id = self
            .registry
            .find(e)
            .ok_or_else(|| Error::MissingValue(format!("unregistered effect {:?}", e.op())))?;
        self.table.get(id).ok_or_else(|| Error::MissingValue(format!("effect #{id}")))
    }
}

/// Outcome of [`check_frame`].
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FrameCheck {
    pub holds: bool,
    /// Indices of measurements whose values do not add up to one.
    pub violations: Vec<usize>,
    pub row_sums: Vec<f64>,
}

/// Checks `Σ_j f(e_j) = 1` for every measurement.
pub fn check_frame(f: &dyn FrameFunction, measurements: &[Measurement], tol: f64) -> Result<FrameCheck> {
    let row_sums = measurements
        .iter()
        .map(|m| m.effects().iter().map(|e| f.value(e)).sum::<Result<f64>>())
        .collect::<Result<Vec<_>>>()?;
    let violations: Vec<usize> = row_sums
        .iter()
        .enumerate()
        .filter(|(_, s)| (*s - 1.0).abs() > tol)
        .map(|(i, _)| i)
        .collect();
    Ok(FrameCheck { holds: violations.is_empty(), violations, row_sums })
}

/// `Σ_i w_i f(e^{(i)}_outcome)`: the probability of `outcome` when measurement
/// `i` is performed with probability `w_i` and `f` predicts each one separately.
pub fn mixture_outcome_probability(f: &dyn FrameFunction, parts: &[(f64, &Measurement)], outcome: usize) -> Result<f64> {
    parts
        .iter()
        .map(|(w, m)| {
            if outcome >= m.n_outcomes() {
                return Err(Error::IndexOutOfRange { index: outcome, max: m.n_outcomes() - 1 });
            }
            Ok(w * f.value(m.effect(outcome))?)
        })
        .sum()
}

/// `|Σ_j f(P_j) - f(Σ_j P_j)| ≤ tol` for mutually orthogonal projectors.
pub fn additivity_check(f: &dyn FrameFunction, projectors: &[Projector], tol: f64) -> Result<bool> {
    let Some(first) = projectors.first() else {
        return Err(Error::InvalidInput("additivity check needs at least one projector".into()));
    };
    let d = first.op().dim();
    for (i, p) in projectors.iter().enumerate() {
        first.op().check_dim(p.op())?;
        for (j, q) in projectors.iter().enumerate().skip(i + 1) {
            // PQ need not be Hermitian, so look at the raw product
            let off = p.op().raw_product(q.op()).iter().map(|z| z.norm()).fold(0.0, f64::max);
            if off > VALIDATION_TOL {
                return Err(Error::NotOrthogonal(i, j));
            }
        }
    }
    let sum = projectors.iter().fold(HermitianOperator::zero(d), |acc, p| &acc + p.op());
    let total = Effect::new(sum)?;
    let lhs = projectors.iter().map(|p| f.value(p.effect())).sum::<Result<f64>>()?;
    Ok((lhs - f.value(&total)?).abs() <= tol)
}

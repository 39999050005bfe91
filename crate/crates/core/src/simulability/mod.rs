//! Projective simulability of measurements.
//!
//! [`staircase`] and the `simulate_*` functions build explicit mixtures of
//! projective measurements for `D_e`, `T_e` and `T_{e,e'}` in any finite
//! dimension. [`membership`] decides, for qubit measurements, whether a target
//! lies in the convex hull of projective measurements and returns either a
//! mixture reconstructing it or a separating functional.

mod decompose;
mod membership;
mod oracle;

use serde::{Deserialize, Serialize};

use crate::measurement::{Measurement, MeasurementVector};
use crate::operator::Projector;

pub use decompose::{simulate_t_e, simulate_t_ee, simulate_two_outcome, staircase, verify_decomposition};
pub use membership::{membership, membership_default, MembershipOptions};
pub use oracle::{atom_oracle, best_atom, Atom};

/// `e = Σ_{k=1}^{d} p_k Q_k` with nested projectors `Q_k = Σ_{j≥k} P_j` and `Q_0 = 0`.
#[derive(Clone, Debug)]
pub struct StaircaseDecomposition {
    /// `p_0 … p_d`, summing to one.
    pub probabilities: Vec<f64>,
    /// `Q_0 … Q_d`.
    pub projectors: Vec<Projector>,
}

impl StaircaseDecomposition {
    pub fn dim(&self) -> usize {
        self.projectors[0].op().dim()
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MixturePart {
    pub weight: f64,
    pub measurement: Measurement,
}

/// Classical mixture of projective (possibly zero-padded) measurements.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MixtureDecomposition {
    pub parts: Vec<MixturePart>,
}

impl MixtureDecomposition {
    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn weights(&self) -> Vec<f64> {
        self.parts.iter().map(|p| p.weight).collect()
    }

    /// `Σ_i w_i M_i` as a measurement vector; `None` for an empty or ragged mixture.
    pub fn combined(&self) -> Option<MeasurementVector> {
        let first = self.parts.first()?;
        let mut acc = MeasurementVector::zeros(first.measurement.dim(), first.measurement.n_outcomes());
        for p in &self.parts {
            acc = acc.add(&p.measurement.to_vector().scale(p.weight)).ok()?;
        }
        Some(acc)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum VerdictStatus {
    Simulable,
    NotSimulable,
    Inconclusive,
}

/// Separating functional: `⟨separator, target⟩ - max_atom ⟨separator, atom⟩ = margin`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Certificate {
    pub separator: MeasurementVector,
    pub margin: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SimulabilityVerdict {
    pub status: VerdictStatus,
    pub witness: Option<MixtureDecomposition>,
    pub certificate: Option<Certificate>,
    /// Final Frank–Wolfe duality gap.
    pub gap: f64,
    pub iterations: usize,
    /// Distance from the target to the last iterate, in the outcome-wise Hilbert–Schmidt norm.
    pub distance: f64,
}

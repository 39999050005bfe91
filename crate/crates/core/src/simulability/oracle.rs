//! Linear maximization over projective qubit measurements.
//!
//! A projective qubit measurement with `n` outcome slots either puts `1` in one
//! slot, or a rank-1 projector `P` in slot `i` and `1 - P` in slot `j`, with
//! zeros elsewhere. For a functional `G = (G_1, …, G_n)` with
//! `G_k = a_k·1 + v_k·σ`, the trivial atom at `i` scores `Tr G_i = 2a_i`, and
//! the best binary atom on `(i, j)` scores `a_i + a_j + |v_i - v_j|`, attained
//! at `P = ½(1 + n·σ)` with `n` along `v_i - v_j`.

use crate::error::{Error, Result};
use crate::measurement::{Measurement, MeasurementVector};
use crate::operator::{Effect, HermitianOperator};

/// Extreme point of the projective-simulable hull.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Atom {
    /// `1` at `slot`.
    Trivial { slot: usize },
    /// `½(1 + axis·σ)` at `first`, its complement at `second`.
    Binary { first: usize, second: usize, axis: [f64; 3] },
}

impl Atom {
    /// Bloch coordinates `(a, b, c, d)` per outcome, flattened.
    pub(crate) fn coords(&self, n: usize) -> Vec<f64> {
        let mut v = vec![0.0; 4 * n];
        match *self {
            Atom::Trivial { slot } => v[4 * slot] = 1.0,
            Atom::Binary { first, second, axis } => {
                v[4 * first] = 0.5;
                v[4 * second] = 0.5;
                for k in 0..3 {
                    v[4 * first + 1 + k] = 0.5 * axis[k];
                    v[4 * second + 1 + k] = -0.5 * axis[k];
                }
            }
        }
        v
    }

    pub fn to_measurement(&self, n: usize) -> Measurement {
        let c = self.coords(n);
        let effects = (0..n)
            .map(|k| Effect::new_unchecked(HermitianOperator::qubit(c[4 * k], c[4 * k + 1], c[4 * k + 2], c[4 * k + 3])))
            .collect();
        Measurement::new_unchecked(effects)
    }
}

/// Score of the best atom for a functional given in flattened Bloch coordinates,
/// using the trace pairing `Tr(G e) = 2(a a' + v·v')`.
pub(crate) fn best_atom_coords(g: &[f64]) -> (Atom, f64) {
    let n = g.len() / 4;
    let mut best = (Atom::Trivial { slot: 0 }, f64::NEG_INFINITY);
    for i in 0..n {
        let score = 2.0 * g[4 * i];
        if score > best.1 {
            best = (Atom::Trivial { slot: i }, score);
        }
    }
    for i in 0..n {
        for j in (i + 1)..n {
            let dv = [
                g[4 * i + 1] - g[4 * j + 1],
                g[4 * i + 2] - g[4 * j + 2],
                g[4 * i + 3] - g[4 * j + 3],
            ];
            let len = (dv[0] * dv[0] + dv[1] * dv[1] + dv[2] * dv[2]).sqrt();
            let score = g[4 * i] + g[4 * j] + len;
            if score > best.1 {
                let axis = if len > 0.0 { [dv[0] / len, dv[1] / len, dv[2] / len] } else { [0.0, 0.0, 1.0] };
                best = (Atom::Binary { first: i, second: j, axis }, score);
            }
        }
    }
    best
}

pub(crate) fn vector_coords(g: &MeasurementVector) -> Result<Vec<f64>> {
    if g.dim() != 2 {
        return Err(Error::UnsupportedDimension(g.dim()));
    }
    let mut out = Vec::with_capacity(4 * g.len());
    for h in &g.entries {
        let b = h.bloch()?;
        out.extend([b.a, b.b, b.c, b.d]);
    }
    Ok(out)
}

/// Best projective atom for `gradient` together with its score `Σ_j Tr(G_j e_j)`.
pub fn best_atom(gradient: &MeasurementVector) -> Result<(Atom, f64)> {
    Ok(best_atom_coords(&vector_coords(gradient)?))
}

/// Projective measurement maximizing `Σ_j Tr(G_j e_j)`.
pub fn atom_oracle(gradient: &MeasurementVector, n_outcomes: usize) -> Result<Measurement> {
    if gradient.len() != n_outcomes {
        return Err(Error::ShapeMismatch(format!(
            "gradient has {} entries, expected {n_outcomes}",
            gradient.len()
        )));
    }
    let (atom, _) = best_atom(gradient)?;
    Ok(atom.to_measurement(n_outcomes))
}

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operator::{Effect, HermitianOperator};
use crate::tolerance::RANK_TOL;

use super::{EffectRegistry, FrameTable};

/// Eigenvalues above `-PSD_TOL` count as nonnegative.
const PSD_TOL: f64 = 1e-8;

/// Least-squares density operator for a table of values.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DensityFit {
    /// Unit-trace Hermitian fit; not necessarily positive.
    pub rho: HermitianOperator,
    /// `max_i |Tr(ρ e_i) - f_i|`.
    pub residual: f64,
    pub psd: bool,
    pub min_eigenvalue: f64,
}

/// Hermitian basis: `|i⟩⟨i|`, then `(|i⟩⟨j| + |j⟩⟨i|)` and `i(|i⟩⟨j| - |j⟩⟨i|)` for `i < j`.
fn hermitian_basis(d: usize) -> Vec<DMatrix<C64>> {
    let mut out = Vec::with_capacity(d * d);
    for i in 0..d {
        let mut m = DMatrix::zeros(d, d);
        m[(i, i)] = C64::new(1.0, 0.0);
        out.push(m);
    }
    for i in 0..d {
        for j in (i + 1)..d {
            let mut re = DMatrix::zeros(d, d);
            re[(i, j)] = C64::new(1.0, 0.0);
            re[(j, i)] = C64::new(1.0, 0.0);
            out.push(re);
            let mut im = DMatrix::zeros(d, d);
            im[(i, j)] = C64::new(0.0, -1.0);
            im[(j, i)] = C64::new(0.0, 1.0);
            out.push(im);
        }
    }
    out
}

fn trace_pairing(e: &HermitianOperator, b: &DMatrix<C64>) -> f64 {
    e.matrix().iter().zip(b.transpose().iter()).map(|(x, y)| (x * y).re).sum()
}

/// Fits `ρ` with `Tr ρ = 1` to `Tr(ρ e_i) ≈ f_i` in the least-squares sense.
pub fn fit_values(effects: &[&Effect], values: &[f64]) -> Result<DensityFit> {
    if effects.len() != values.len() {
        return Err(Error::ShapeMismatch(format!("{} effects but {} values", effects.len(), values.len())));
    }
    let Some(first) = effects.first() else {
        return Err(Error::RankDeficient { rank: 0, needed: 4 });
    };
    let d = first.dim();
    if let Some(e) = effects.iter().find(|e| e.dim() != d) {
        return Err(Error::DimensionMismatch { expected: d, got: e.dim() });
    }
    let basis = hermitian_basis(d);
    let n = d * d;
    let full = DMatrix::from_fn(effects.len(), n, |i, k| trace_pairing(effects[i].op(), &basis[k]));
    let rank = full.clone().svd(false, false).singular_values.iter().filter(|&&s| s > RANK_TOL).count();
    if rank < n {
        return Err(Error::RankDeficient { rank, needed: n });
    }

    // ρ = 1/d + Σ_k y_k F_k over the traceless directions F_k = B_k - B_0 (k < d)
    // and F_k = B_k for the off-diagonal basis elements
    let reduced = DMatrix::from_fn(effects.len(), n - 1, |i, k| {
        let k = k + 1;
        if k < d {
            full[(i, k)] - full[(i, 0)]
        } else {
            full[(i, k)]
        }
    });
    let rhs = DVector::from_fn(effects.len(), |i, _| values[i] - effects[i].op().trace() / d as f64);
    let svd = reduced.svd(true, true);
    let y = svd.solve(&rhs, RANK_TOL).map_err(|e| Error::InvalidInput(e.to_string()))?;

    let mut m = DMatrix::<C64>::identity(d, d) / C64::new(d as f64, 0.0);
    for k in 1..n {
        let coeff = C64::new(y[k - 1], 0.0);
        if k < d {
            m += (&basis[k] - &basis[0]) * coeff;
        } else {
            m += &basis[k] * coeff;
        }
    }
    let rho = HermitianOperator::new(m)?;
    let residual = effects
        .iter()
        .zip(values)
        .map(|(e, v)| (rho.trace_product(e.op()) - v).abs())
        .fold(0.0, f64::max);
    let min_eigenvalue = rho.eigenvalues()?.into_iter().fold(f64::INFINITY, f64::min);
    Ok(DensityFit { rho, residual, psd: min_eigenvalue >= -PSD_TOL, min_eigenvalue })
}

/// [`fit_values`] over every registered effect; each id must have a value.
pub fn fit_density(registry: &EffectRegistry, values: &FrameTable) -> Result<DensityFit> {
    let effects: Vec<&Effect> = registry.entries().iter().collect();
    let vals = (0..registry.len())
        .map(|id| values.get(id).ok_or_else(|| Error::MissingValue(format!("effect #{id}"))))
        .collect::<Result<Vec<_>>>()?;
    fit_values(&effects, &vals)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frame::{counterexample_g, BornRule, CounterexampleG, FrameFunction};
    use crate::operator::{DensityOperator, Projector};
    use crate::random::{random_effect, random_qubit_effect, seeded};

    #[test]
    fn recovers_a_qubit_state() {
        let rho0 = DensityOperator::qubit([0.0, 0.0, 0.5]).unwrap();
        let mut rng = seeded(1);
        let effects: Vec<Effect> = (0..50).map(|_| random_qubit_effect(&mut rng)).collect();
        let refs: Vec<&Effect> = effects.iter().collect();
        let born = BornRule(rho0.clone());
        let vals: Vec<f64> = effects.iter().map(|e| born.value(e).unwrap()).collect();
        let fit = fit_values(&refs, &vals).unwrap();
        assert!(fit.rho.approx_eq(rho0.op(), 1e-10));
        assert!(fit.residual < 1e-10 && fit.psd);
    }

    #[test]
    fn recovers_a_qutrit_state() {
        let mut rng = seeded(2);
        let rho0 = crate::random::random_density(&mut rng, 3);
        let effects: Vec<Effect> = (0..40).map(|_| random_effect(&mut rng, 3)).collect();
        let refs: Vec<&Effect> = effects.iter().collect();
        let vals: Vec<f64> = effects.iter().map(|e| rho0.op().trace_product(e.op())).collect();
        let fit = fit_values(&refs, &vals).unwrap();
        assert!(fit.rho.approx_eq(rho0.op(), 1e-10));
    }

    #[test]
    fn axis_only_effects_are_rank_deficient() {
        let effects = [
            Projector::basis(2, 0).into_effect(),
            Projector::basis(2, 1).into_effect(),
            Effect::zero(2),
            Effect::identity(2),
        ];
        let refs: Vec<&Effect> = effects.iter().collect();
        let vals: Vec<f64> = effects.iter().map(|e| counterexample_g(e).unwrap()).collect();
        assert!(matches!(fit_values(&refs, &vals), Err(Error::RankDeficient { rank: 2, needed: 4 })));
    }

    #[test]
    fn g_is_not_a_trace_rule() {
        let mut effects = vec![Projector::basis(2, 0).into_effect(), Projector::basis(2, 1).into_effect()];
        let mut rng = seeded(3);
        effects.extend((0..30).map(|_| random_qubit_effect(&mut rng)));
        let refs: Vec<&Effect> = effects.iter().collect();
        let vals: Vec<f64> = effects.iter().map(|e| CounterexampleG.value(e).unwrap()).collect();
        assert!(fit_values(&refs, &vals).unwrap().residual > 0.05);
    }
}

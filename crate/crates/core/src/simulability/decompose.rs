use crate::error::Result;
use crate::measurement::{d_e, pad_zero, Measurement};
use crate::operator::{spectral, Effect, HermitianOperator, Projector};
use crate::tolerance::VALIDATION_TOL;

use super::{MixtureDecomposition, MixturePart, StaircaseDecomposition};

/// Parts lighter than this are dropped from constructed mixtures.
const NEGLIGIBLE_WEIGHT: f64 = 1e-15;

/// Rewrites an effect as `Σ_k p_k Q_k` over nested projectors.
///
/// With ascending eigenvalues `λ_1 ≤ … ≤ λ_d` and `λ_0 = 0`, `p_k = λ_k - λ_{k-1}`
/// for `k ≥ 1` and `p_0 = 1 - λ_d`.
pub fn staircase(e: &Effect) -> Result<StaircaseDecomposition> {
    // Effect's constructor has already bounded the spectrum; re-check in case
    // the caller built it with a looser tolerance.
    let e = Effect::new(e.op().clone())?;
    let d = e.dim();
    let spec = spectral(e.op())?;
    let lambda: Vec<f64> = spec.eigenvalues.iter().map(|l| l.clamp(0.0, 1.0)).collect();

    let mut probabilities = Vec::with_capacity(d + 1);
    probabilities.push(1.0 - lambda[d - 1]);
    let mut prev = 0.0;
    for &l in &lambda {
        probabilities.push(l - prev);
        prev = l;
    }

    // Q_k for k = d, d-1, …, 1 accumulated from the top eigenvector down.
    let mut tail = vec![HermitianOperator::zero(d); d + 1];
    for k in (1..=d).rev() {
        let next = if k == d { HermitianOperator::zero(d) } else { tail[k + 1].clone() };
        tail[k] = &next + spec.projectors[k - 1].op();
    }
    tail[1] = HermitianOperator::identity(d);
    let projectors = tail.into_iter().map(Projector::new_unchecked).collect();

    Ok(StaircaseDecomposition { probabilities, projectors })
}

/// `D_e = Σ_k p_k ⟦Q_k, 1 - Q_k⟧`.
pub fn simulate_two_outcome(e: &Effect) -> Result<MixtureDecomposition> {
    let st = staircase(e)?;
    let parts = st
        .probabilities
        .iter()
        .zip(&st.projectors)
        .filter(|(w, _)| **w > NEGLIGIBLE_WEIGHT)
        .map(|(&weight, q)| MixturePart { weight, measurement: d_e(q.effect()) })
        .collect();
    Ok(MixtureDecomposition { parts })
}

fn padded(dec: &MixtureDecomposition, position: usize, scale: f64) -> Result<Vec<MixturePart>> {
    dec.parts
        .iter()
        .map(|p| {
            Ok(MixturePart {
                weight: scale * p.weight,
                measurement: pad_zero(&p.measurement, position)?,
            })
        })
        .collect()
}

/// `T_e = ½⟦e, 0, 1 - e⟧ + ½⟦0, e, 1 - e⟧`, each half expanded into projective parts.
pub fn simulate_t_e(e: &Effect) -> Result<MixtureDecomposition> {
    let two = simulate_two_outcome(e)?;
    let mut parts = padded(&two, 1, 0.5)?;
    parts.extend(padded(&two, 0, 0.5)?);
    Ok(MixtureDecomposition { parts })
}

/// `T_{e,e'} = ½⟦e, 0, 1 - e⟧ + ½⟦0, e', 1 - e'⟧`, each half expanded into projective parts.
pub fn simulate_t_ee(e: &Effect, e2: &Effect) -> Result<MixtureDecomposition> {
    e.op().check_dim(e2.op())?;
    let mut parts = padded(&simulate_two_outcome(e)?, 1, 0.5)?;
    parts.extend(padded(&simulate_two_outcome(e2)?, 0, 0.5)?);
    Ok(MixtureDecomposition { parts })
}

/// True iff every part is projective, the weights form a probability vector and
/// `Σ w_i M_i` matches `target` entrywise within `tol`.
pub fn verify_decomposition(target: &Measurement, dec: &MixtureDecomposition, tol: f64) -> bool {
    if dec.is_empty() {
        return false;
    }
    let idempotence_tol = tol.max(VALIDATION_TOL);
    let shapes_ok = dec.parts.iter().all(|p| {
        p.measurement.n_outcomes() == target.n_outcomes()
            && p.measurement.dim() == target.dim()
            && p.measurement.is_projective(idempotence_tol)
    });
    if !shapes_ok {
        return false;
    }
    if dec.parts.iter().any(|p| p.weight < -tol || !p.weight.is_finite()) {
        return false;
    }
    let total: f64 = dec.parts.iter().map(|p| p.weight).sum();
    if (total - 1.0).abs() > tol {
        return false;
    }
    let Some(combined) = dec.combined() else {
        return false;
    };
    combined
        .entries
        .iter()
        .zip(target.effects())
        .all(|(c, e)| c.max_abs_diff(e.op()) <= tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measurement::{catalog_entry, m_effect, t_e, t_ee, t_prime, trine};
    use crate::operator::{bloch_to_effect, BlochCoefficients};

    fn diag(v: &[f64]) -> Effect {
        Effect::new(HermitianOperator::from_real_diagonal(v).unwrap()).unwrap()
    }

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
    }

    #[test]
    fn staircase_identity() {
        let st = staircase(&Effect::identity(2)).unwrap();
        assert!(close(&st.probabilities, &[0.0, 1.0, 0.0], 1e-14));
        assert!(st.projectors[1].op().approx_eq(&HermitianOperator::identity(2), 0.0));
        assert!(st.projectors[0].op().is_zero(0.0));
    }

    #[test]
    fn staircase_diagonal() {
        let st = staircase(&diag(&[0.7, 0.3])).unwrap();
        assert!(close(&st.probabilities, &[0.3, 0.3, 0.4], 1e-14));
        assert!(st.projectors[2].op().approx_eq(Projector::basis(2, 0).op(), 1e-14));
        let rebuilt = &st.projectors[1].op().scale(0.3) + &st.projectors[2].op().scale(0.4);
        assert!(rebuilt.approx_eq(&HermitianOperator::from_real_diagonal(&[0.7, 0.3]).unwrap(), 1e-14));
    }

    #[test]
    fn staircase_zero() {
        let st = staircase(&Effect::zero(3)).unwrap();
        assert!(close(&st.probabilities, &[1.0, 0.0, 0.0, 0.0], 0.0));
    }

    #[test]
    fn staircase_rejects_non_effect() {
        // an Effect can only be built loosely through with_tol
        let loose = Effect::with_tol(HermitianOperator::from_real_diagonal(&[1.2, 0.0]).unwrap(), 1.0).unwrap();
        assert!(staircase(&loose).is_err());
    }

    #[test]
    fn two_outcome_diagonal() {
        let dec = simulate_two_outcome(&diag(&[0.7, 0.3])).unwrap();
        assert!(close(&dec.weights(), &[0.3, 0.3, 0.4], 1e-14));
        assert!(dec.parts[0].measurement.effect(0).op().is_zero(0.0));
        assert!(dec.parts[1].measurement.effect(1).op().is_zero(0.0));
        let p0 = Projector::basis(2, 0);
        let p1 = Projector::basis(2, 1);
        assert!(dec.parts[2].measurement.effect(0).op().approx_eq(p0.op(), 1e-14));
        assert!(dec.parts[2].measurement.effect(1).op().approx_eq(p1.op(), 1e-14));
        assert!(verify_decomposition(&d_e(&diag(&[0.7, 0.3])), &dec, 1e-12));
    }

    #[test]
    fn two_outcome_projector_is_single_part() {
        let p = bloch_to_effect(BlochCoefficients::new(0.5, 0.3, 0.0, 0.4)).unwrap();
        let dec = simulate_two_outcome(&p).unwrap();
        assert_eq!(dec.len(), 1);
        assert!((dec.parts[0].weight - 1.0).abs() < 1e-14);
        assert!(dec.parts[0].measurement.effect(0).op().approx_eq(p.op(), 1e-12));
    }

    #[test]
    fn two_outcome_qutrit() {
        let e = diag(&[0.2, 0.5, 0.9]);
        let dec = simulate_two_outcome(&e).unwrap();
        assert!(close(&dec.weights(), &[0.1, 0.2, 0.3, 0.4], 1e-14));
        assert!(verify_decomposition(&d_e(&e), &dec, 1e-12));
    }

    #[test]
    fn t_e_projector() {
        let p = bloch_to_effect(BlochCoefficients::new(0.5, 0.0, 0.5, 0.0)).unwrap();
        let dec = simulate_t_e(&p).unwrap();
        assert_eq!(dec.len(), 2);
        assert!(close(&dec.weights(), &[0.5, 0.5], 1e-14));
        assert!(dec.parts[0].measurement.effect(1).op().is_zero(0.0));
        assert!(dec.parts[1].measurement.effect(0).op().is_zero(0.0));
        assert!(verify_decomposition(&t_e(&p), &dec, 1e-12));
    }

    #[test]
    fn t_ee_with_zero_partner() {
        let e = bloch_to_effect(BlochCoefficients::new(0.4, 0.1, -0.1, 0.2)).unwrap();
        let dec = simulate_t_ee(&e, &Effect::zero(2)).unwrap();
        assert!(verify_decomposition(&t_ee(&e, &Effect::zero(2)).unwrap(), &dec, 1e-12));
        // the zero partner contributes the single part ½⟦0, 0, 1⟧
        let last = dec.parts.last().unwrap();
        assert!((last.weight - 0.5).abs() < 1e-15);
        assert!(last.measurement.effect(2).op().approx_eq(&HermitianOperator::identity(2), 0.0));
        assert_eq!(dec.len(), simulate_two_outcome(&e).unwrap().len() + 1);
    }

    #[test]
    fn t_prime_reconstructed() {
        let pz = bloch_to_effect(BlochCoefficients::new(0.5, 0.0, 0.0, 0.5)).unwrap();
        let px = bloch_to_effect(BlochCoefficients::new(0.5, 0.5, 0.0, 0.0)).unwrap();
        let dec = simulate_t_ee(&pz, &px).unwrap();
        assert!(verify_decomposition(&t_prime(), &dec, 1e-12));
        assert!(simulate_t_ee(&pz, &Effect::zero(3)).is_err());
    }

    #[test]
    fn verify_examples() {
        let dm = catalog_entry("D_m", 0.5).unwrap();
        assert!(verify_decomposition(&dm, &simulate_two_outcome(&m_effect()).unwrap(), 1e-12));
        assert!(!verify_decomposition(&trine(), &simulate_two_outcome(&m_effect()).unwrap(), 1e-12));
        let mx = catalog_entry("M_x", 0.5).unwrap();
        let single = MixtureDecomposition { parts: vec![MixturePart { weight: 1.0, measurement: mx.clone() }] };
        assert!(verify_decomposition(&mx, &single, 1e-12));
        // D_m itself is not projective
        let fake = MixtureDecomposition { parts: vec![MixturePart { weight: 1.0, measurement: dm.clone() }] };
        assert!(!verify_decomposition(&dm, &fake, 1e-12));
    }
}

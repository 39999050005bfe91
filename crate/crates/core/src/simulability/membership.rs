//! Frank–Wolfe membership test against the hull of projective qubit measurements.
//!
//! Minimizes `½‖x - t‖²` over the hull, where `‖·‖` is the outcome-wise
//! Hilbert–Schmidt norm. Each major iteration asks the closed-form oracle for
//! the best atom and then re-optimizes the weights of the whole active set
//! exactly (Wolfe's minimum-norm-point minor cycles). The duality gap
//! `⟨t - x, s - x⟩` bounds the suboptimality of the current iterate.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::measurement::{Measurement, MeasurementVector};
use crate::operator::HermitianOperator;
use crate::tolerance::{MEMBERSHIP_MAX_ITER, MEMBERSHIP_TOL, VALIDATION_TOL};

use super::oracle::{best_atom_coords, Atom};
use super::{Certificate, MixtureDecomposition, MixturePart, SimulabilityVerdict, VerdictStatus};

const MAX_OUTCOMES: usize = 8;
const MAX_MINOR_CYCLES: usize = 64;
const DROP_WEIGHT: f64 = 1e-14;

#[derive(Clone, Copy, Debug)]
pub struct MembershipOptions {
    /// Distance below which the target counts as reached.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for MembershipOptions {
    fn default() -> Self {
        Self { tol: MEMBERSHIP_TOL, max_iter: MEMBERSHIP_MAX_ITER }
    }
}

/// Trace pairing in flattened Bloch coordinates.
fn inner(x: &[f64], y: &[f64]) -> f64 {
    2.0 * x.iter().zip(y).map(|(a, b)| a * b).sum::<f64>()
}

fn measurement_coords(m: &Measurement) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(4 * m.n_outcomes());
    for e in m.effects() {
        let b = e.bloch()?;
        out.extend([b.a, b.b, b.c, b.d]);
    }
    Ok(out)
}

fn coords_to_vector(c: &[f64]) -> MeasurementVector {
    MeasurementVector {
        entries: c.chunks(4).map(|q| HermitianOperator::qubit(q[0], q[1], q[2], q[3])).collect(),
    }
}

/// Atoms aligned with the eigenbases of the target's effects. When the target is
/// a mixture of padded two-outcome measurements these contain an exact
/// decomposition, which the minor cycles then find without any search.
fn seed_atoms(target: &[f64]) -> Vec<Atom> {
    let n = target.len() / 4;
    let mut atoms: Vec<Atom> = (0..n).map(|slot| Atom::Trivial { slot }).collect();
    for i in 0..n {
        let v = [target[4 * i + 1], target[4 * i + 2], target[4 * i + 3]];
        let len = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if len < 1e-12 {
            continue;
        }
        let axis = [v[0] / len, v[1] / len, v[2] / len];
        let anti = [-axis[0], -axis[1], -axis[2]];
        for j in (0..n).filter(|&j| j != i) {
            let (first, second) = if i < j { (i, j) } else { (j, i) };
            // P along ±axis at slot i means the complement sits at slot j
            for a in [axis, anti] {
                let oriented = if first == i { a } else { [-a[0], -a[1], -a[2]] };
                atoms.push(Atom::Binary { first, second, axis: oriented });
            }
        }
    }
    atoms
}

/// Active set of Wolfe's algorithm, stored relative to the target.
struct ActiveSet {
    atoms: Vec<Atom>,
    points: Vec<Vec<f64>>,
    weights: Vec<f64>,
}

impl ActiveSet {
    fn iterate(&self) -> Vec<f64> {
        let mut x = vec![0.0; self.points[0].len()];
        for (p, w) in self.points.iter().zip(&self.weights) {
            for (xi, pi) in x.iter_mut().zip(p) {
                *xi += w * pi;
            }
        }
        x
    }

    /// Coefficients (summing to one) of the minimum-norm point in the affine hull.
    fn affine_minimizer(&self) -> Vec<f64> {
        let m = self.points.len();
        if m == 1 {
            return vec![1.0];
        }
        let dim = self.points[0].len();
        let base = &self.points[0];
        let diffs = DMatrix::from_fn(dim, m - 1, |r, c| self.points[c + 1][r] - base[r]);
        let rhs = DVector::from_fn(dim, |r, _| -base[r]);
        let svd = diffs.svd(true, true);
        let cutoff = 1e-12 * svd.singular_values.max().max(1e-300);
        let beta = svd.solve(&rhs, cutoff).unwrap_or_else(|_| DVector::zeros(m - 1));
        let mut alpha = Vec::with_capacity(m);
        alpha.push(1.0 - beta.sum());
        alpha.extend(beta.iter());
        alpha
    }

    /// Wolfe's minor cycles. Returns false when the newest point was immediately dropped.
    fn reoptimize(&mut self) -> bool {
        let newest = self.atoms.len() - 1;
        let newest_atom = self.atoms[newest];
        for _ in 0..MAX_MINOR_CYCLES {
            let alpha = self.affine_minimizer();
            if alpha.iter().all(|&a| a > DROP_WEIGHT) {
                self.weights = alpha;
                return true;
            }
            let mut theta = 1.0f64;
            for (&l, &a) in self.weights.iter().zip(&alpha) {
                if a <= DROP_WEIGHT && l - a > 0.0 {
                    theta = theta.min(l / (l - a));
                }
            }
            let theta = theta.clamp(0.0, 1.0);
            for (l, a) in self.weights.iter_mut().zip(&alpha) {
                *l = theta * a + (1.0 - theta) * *l;
            }
            // drop at least the blocking point
            let (argmin, _) = self
                .weights
                .iter()
                .enumerate()
                .fold((0, f64::INFINITY), |acc, (k, &w)| if w < acc.1 { (k, w) } else { acc });
            let mut keep: Vec<bool> = self.weights.iter().map(|&w| w > DROP_WEIGHT).collect();
            keep[argmin] = false;
            if keep.iter().all(|k| !k) {
                keep[0] = true;
            }
            let mut k = 0;
            self.atoms.retain(|_| {
                k += 1;
                keep[k - 1]
            });
            k = 0;
            self.points.retain(|_| {
                k += 1;
                keep[k - 1]
            });
            k = 0;
            self.weights.retain(|_| {
                k += 1;
                keep[k - 1]
            });
            let total: f64 = self.weights.iter().sum();
            self.weights.iter_mut().for_each(|w| *w /= total);
            if !self.atoms.contains(&newest_atom) {
                return false;
            }
        }
        true
    }

    fn witness(&self, n: usize) -> MixtureDecomposition {
        MixtureDecomposition {
            parts: self
                .atoms
                .iter()
                .zip(&self.weights)
                .map(|(a, &weight)| MixturePart { weight, measurement: a.to_measurement(n) })
                .collect(),
        }
    }
}

/// Decides whether a qubit measurement is a mixture of projective measurements.
///
/// Returns `Simulable` with an explicit mixture when the hull is reached within
/// `tol`, `NotSimulable` with a separating functional when the separation
/// certifies a distance above `tol`, and `Inconclusive` otherwise.
pub fn membership(pom: &Measurement, tol: f64, max_iter: usize) -> Result<SimulabilityVerdict> {
    if pom.dim() != 2 {
        return Err(Error::UnsupportedDimension(pom.dim()));
    }
    let n = pom.n_outcomes();
    if n > MAX_OUTCOMES {
        return Err(Error::InvalidInput(format!("membership supports at most {MAX_OUTCOMES} outcomes, got {n}")));
    }
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::InvalidInput(format!("tolerance must be positive, got {tol}")));
    }

    if pom.is_projective(VALIDATION_TOL) {
        return Ok(SimulabilityVerdict {
            status: VerdictStatus::Simulable,
            witness: Some(MixtureDecomposition {
                parts: vec![MixturePart { weight: 1.0, measurement: pom.clone() }],
            }),
            certificate: None,
            gap: 0.0,
            iterations: 0,
            distance: 0.0,
        });
    }

    let target = measurement_coords(pom)?;
    let relative = |a: &Atom| -> Vec<f64> { a.coords(n).iter().zip(&target).map(|(x, t)| x - t).collect() };

    let seeds = seed_atoms(&target);
    let start = seeds
        .iter()
        .copied()
        .min_by(|a, b| {
            let (pa, pb) = (relative(a), relative(b));
            inner(&pa, &pa).total_cmp(&inner(&pb, &pb))
        })
        .expect("seed set always holds the trivial atoms");
    let mut active = ActiveSet { atoms: vec![start], points: vec![relative(&start)], weights: vec![1.0] };

    let gap_tol = 0.25 * tol * tol;
    let mut gap = f64::INFINITY;
    let mut iterations = 0;
    let mut x = active.iterate();
    while iterations < max_iter {
        iterations += 1;
        // residual r = t - x_abs = -x in relative coordinates
        let r: Vec<f64> = x.iter().map(|v| -v).collect();
        let r_dot_x = -inner(&r, &r) + inner(&r, &target);
        let (lmo_atom, score) = best_atom_coords(&r);
        gap = score - r_dot_x;
        if gap <= gap_tol {
            break;
        }
        // prefer an eigen-aligned seed if it is nearly as good as the oracle's choice
        let seed_pick = seeds
            .iter()
            .filter(|a| !active.atoms.contains(*a))
            .map(|a| (*a, inner(&r, &a.coords(n)) - r_dot_x))
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .filter(|(_, improvement)| *improvement >= 0.25 * gap);
        let next = seed_pick.map_or(lmo_atom, |(a, _)| a);
        if active.atoms.contains(&next) {
            break;
        }
        active.atoms.push(next);
        active.points.push(relative(&next));
        active.weights.push(0.0);
        if !active.reoptimize() {
            x = active.iterate();
            break;
        }
        x = active.iterate();
    }

    let r: Vec<f64> = x.iter().map(|v| -v).collect();
    let distance = inner(&r, &r).sqrt();
    if distance <= tol {
        return Ok(SimulabilityVerdict {
            status: VerdictStatus::Simulable,
            witness: Some(active.witness(n)),
            certificate: None,
            gap: gap.max(0.0),
            iterations,
            distance,
        });
    }

    let (_, max_atom) = best_atom_coords(&r);
    let margin = inner(&r, &target) - max_atom;
    // the hyperplane {⟨r, ·⟩ = max_atom} lies margin/‖r‖ away from the target
    let certified = margin > 0.0 && margin / distance > tol;
    Ok(SimulabilityVerdict {
        status: if certified { VerdictStatus::NotSimulable } else { VerdictStatus::Inconclusive },
        witness: None,
        certificate: certified.then(|| Certificate { separator: coords_to_vector(&r), margin }),
        gap: gap.max(0.0),
        iterations,
        distance,
    })
}

/// [`membership`] with default tolerance and iteration budget.
pub fn membership_default(pom: &Measurement) -> Result<SimulabilityVerdict> {
    let o = MembershipOptions::default();
    membership(pom, o.tol, o.max_iter)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measurement::{catalog_entry, d_e, depolarize, t_prime, trine};
    use crate::operator::{bloch_to_effect, BlochCoefficients};
    use crate::simulability::{best_atom, verify_decomposition};

    #[test]
    fn projective_short_circuit() {
        let v = membership_default(&catalog_entry("M_x", 0.5).unwrap()).unwrap();
        assert_eq!(v.status, VerdictStatus::Simulable);
        assert_eq!(v.iterations, 0);
        assert_eq!(v.witness.unwrap().len(), 1);
    }

    #[test]
    fn d_m_is_simulable() {
        let dm = catalog_entry("D_m", 0.5).unwrap();
        let v = membership_default(&dm).unwrap();
        assert_eq!(v.status, VerdictStatus::Simulable);
        assert!(v.distance < 1e-8);
        assert!(verify_decomposition(&dm, v.witness.as_ref().unwrap(), 1e-8));
    }

    #[test]
    fn t_prime_is_simulable() {
        let v = membership_default(&t_prime()).unwrap();
        assert_eq!(v.status, VerdictStatus::Simulable);
        assert!(v.distance < 1e-8, "distance {}", v.distance);
        assert!(verify_decomposition(&t_prime(), v.witness.as_ref().unwrap(), 1e-8));
    }

    #[test]
    fn trine_is_not_simulable() {
        let v = membership_default(&trine()).unwrap();
        assert_eq!(v.status, VerdictStatus::NotSimulable, "{v:?}");
        let cert = v.certificate.unwrap();
        assert!(cert.margin > 0.0);
        let (_, max_atom) = best_atom(&cert.separator).unwrap();
        let recomputed = cert.separator.inner_measurement(&trine()).unwrap() - max_atom;
        assert!((recomputed - cert.margin).abs() < 1e-12);
    }

    #[test]
    fn heavily_depolarized_trine_is_simulable() {
        let v = membership_default(&depolarize(&trine(), 0.3).unwrap()).unwrap();
        assert_eq!(v.status, VerdictStatus::Simulable);
    }

    #[test]
    fn random_looking_two_outcome() {
        let e = bloch_to_effect(BlochCoefficients::new(0.45, 0.12, -0.2, 0.05)).unwrap();
        let v = membership_default(&d_e(&e)).unwrap();
        assert_eq!(v.status, VerdictStatus::Simulable);
        assert!(v.distance < 1e-8);
    }

    #[test]
    fn rejects_qutrit_and_large_outcome_counts() {
        let m = crate::measurement::make_measurement(vec![crate::operator::Effect::identity(3)], 1e-12).unwrap();
        assert!(matches!(membership_default(&m), Err(Error::UnsupportedDimension(3))));
        let mut effects = vec![crate::operator::Effect::zero(2); 8];
        effects.push(crate::operator::Effect::identity(2));
        let m = crate::measurement::make_measurement(effects, 1e-12).unwrap();
        assert!(membership_default(&m).is_err());
    }
}

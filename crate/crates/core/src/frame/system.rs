use nalgebra::{DMatrix, DVector};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measurement::Measurement;
use crate::random::{random_unit_vector_n, seeded};
use crate::tolerance::RANK_TOL;

use super::EffectRegistry;

/// Largest acceptable residual of the particular solution.
const CONSISTENCY_TOL: f64 = 1e-6;
/// Direction components below this do not constrain a hit-and-run chord.
const CHORD_EPS: f64 = 1e-12;

/// The linear system `Σ_j f(e_j) = 1`, one row per measurement.
#[derive(Clone, Debug)]
pub struct FrameSystem {
    pub registry: EffectRegistry,
    /// Registry ids of each measurement's outcomes, repeats included.
    pub rows: Vec<Vec<usize>>,
    /// Rows × registry incidence counts.
    pub matrix: DMatrix<f64>,
}

impl FrameSystem {
    pub fn n_effects(&self) -> usize {
        self.registry.len()
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    /// `max_r |Σ_j A_rj x_j - 1|`.
    pub fn residual(&self, x: &[f64]) -> f64 {
        let v = &self.matrix * DVector::from_column_slice(x);
        v.iter().map(|s| (s - 1.0).abs()).fold(0.0, f64::max)
    }
}

pub fn build_system(measurements: &[Measurement]) -> Result<FrameSystem> {
    let mut registry = EffectRegistry::new();
    if let Some(first) = measurements.first() {
        if let Some(m) = measurements.iter().find(|m| m.dim() != first.dim()) {
            return Err(Error::DimensionMismatch { expected: first.dim(), got: m.dim() });
        }
    }
    let rows: Vec<Vec<usize>> = measurements
        .iter()
        .map(|m| m.effects().iter().map(|e| registry.insert(e)).collect())
        .collect();
    let mut matrix = DMatrix::zeros(rows.len(), registry.len());
    for (r, ids) in rows.iter().enumerate() {
        for &id in ids {
            matrix[(r, id)] += 1.0;
        }
    }
    Ok(FrameSystem { registry, rows, matrix })
}

/// Affine space `{x : A x = 1}` as a particular solution plus an orthonormal
/// basis of the homogeneous solutions.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SolutionSpace {
    pub particular: Vec<f64>,
    pub basis: Vec<Vec<f64>>,
    pub affine_dim: usize,
    pub rank: usize,
    /// Smallest singular value kept in the rank.
    pub smallest_retained: f64,
    /// Largest singular value treated as zero (0 when every direction is constrained).
    pub largest_discarded: f64,
}

impl SolutionSpace {
    /// `particular + Σ_k t_k basis_k`.
    pub fn point(&self, t: &[f64]) -> Vec<f64> {
        let mut x = self.particular.clone();
        for (b, &tk) in self.basis.iter().zip(t) {
            for (xi, bi) in x.iter_mut().zip(b) {
                *xi += tk * bi;
            }
        }
        x
    }

    /// Coordinates of the projection of `x` onto the space.
    pub fn coordinates(&self, x: &[f64]) -> Vec<f64> {
        self.basis
            .iter()
            .map(|b| b.iter().zip(x).zip(&self.particular).map(|((bi, xi), pi)| bi * (xi - pi)).sum())
            .collect()
    }
}

pub fn solve_space(sys: &FrameSystem) -> Result<SolutionSpace> {
    let n = sys.n_effects();
    let m = sys.n_rows();
    if n == 0 {
        return Ok(SolutionSpace {
            particular: vec![],
            basis: vec![],
            affine_dim: 0,
            rank: 0,
            smallest_retained: 0.0,
            largest_discarded: 0.0,
        });
    }
    // pad to at least square so that V spans the whole column space
    let a = if m < n {
        let mut padded = DMatrix::zeros(n, n);
        padded.rows_mut(0, m).copy_from(&sys.matrix);
        padded
    } else {
        sys.matrix.clone()
    };
    let rows_padded = a.nrows();
    let svd = a.svd(true, true);
    let v_t = svd.v_t.as_ref().expect("requested V");
    let sigma = &svd.singular_values;
    let kept: Vec<usize> = (0..sigma.len()).filter(|&k| sigma[k] > RANK_TOL).collect();
    let rank = kept.len();
    let smallest_retained = kept.iter().map(|&k| sigma[k]).fold(f64::INFINITY, f64::min);
    let largest_discarded = (0..sigma.len()).filter(|&k| sigma[k] <= RANK_TOL).map(|k| sigma[k]).fold(0.0, f64::max);

    let mut rhs = DVector::zeros(rows_padded);
    rhs.rows_mut(0, m).fill(1.0);
    let particular = svd.solve(&rhs, RANK_TOL).map_err(|e| Error::InvalidInput(e.to_string()))?;
    let particular: Vec<f64> = particular.iter().copied().collect();
    let residual = sys.residual(&particular);
    if residual > CONSISTENCY_TOL {
        return Err(Error::InconsistentSystem(residual));
    }
    let basis: Vec<Vec<f64>> = (0..sigma.len())
        .filter(|&k| sigma[k] <= RANK_TOL)
        .map(|k| v_t.row(k).iter().copied().collect())
        .collect();
    Ok(SolutionSpace {
        particular,
        affine_dim: basis.len(),
        basis,
        rank,
        smallest_retained: if rank == 0 { 0.0 } else { smallest_retained },
        largest_discarded,
    })
}

/// Hit-and-run samples from `{x in the space : 0 ≤ x ≤ 1}`, started at `start`
/// (which must be a strictly feasible solution where that is possible).
pub fn sample_feasible(space: &SolutionSpace, start: &[f64], count: usize, seed: u64) -> Result<Vec<Vec<f64>>> {
    const BURN_IN: usize = 200;
    const THIN: usize = 25;
    let k = space.affine_dim;
    let n = space.particular.len();
    if start.len() != n {
        return Err(Error::ShapeMismatch(format!("start has {} entries, expected {n}", start.len())));
    }
    let mut t = space.coordinates(start);
    let x0 = space.point(&t);
    if x0.iter().any(|v| !(-1e-9..=1.0 + 1e-9).contains(v)) {
        return Err(Error::InvalidInput("starting point is not feasible".into()));
    }
    if k == 0 {
        return Ok(vec![x0; count]);
    }
    let mut rng = seeded(seed);
    let mut x = x0;
    let mut out = Vec::with_capacity(count);
    let total = BURN_IN + count * THIN;
    for step in 1..=total {
        let u = random_unit_vector_n(&mut rng, k);
        let dir: Vec<f64> = (0..n).map(|i| space.basis.iter().zip(&u).map(|(b, uk)| b[i] * uk).sum()).collect();
        let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
        for (xi, di) in x.iter().zip(&dir) {
            if di.abs() < CHORD_EPS {
                continue;
            }
            let (a, b) = ((0.0 - xi) / di, (1.0 - xi) / di);
            lo = lo.max(a.min(b));
            hi = hi.min(a.max(b));
        }
        if !(lo.is_finite() && hi.is_finite()) {
            return Err(Error::InvalidInput("feasible region is unbounded".into()));
        }
        let s = if hi > lo { rng.random_range(lo..=hi) } else { 0.0 };
        for (tk, uk) in t.iter_mut().zip(&u) {
            *tk += s * uk;
        }
        // recompute from coordinates so rounding does not drift off the space
        x = space.point(&t);
        if step > BURN_IN && (step - BURN_IN).is_multiple_of(THIN) {
            out.push(x.iter().map(|v| v.clamp(0.0, 1.0)).collect());
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measurement::{d_e, make_measurement, t_e};
    use crate::operator::Effect;
    use crate::random::random_qubit_effect;

    #[test]
    fn single_identity_row() {
        let m = make_measurement(vec![Effect::identity(2)], 1e-12).unwrap();
        let sys = build_system(&[m]).unwrap();
        let sp = solve_space(&sys).unwrap();
        assert_eq!(sp.affine_dim, 0);
        assert!((sp.particular[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn d_e_t_e_pair() {
        let e = random_qubit_effect(&mut seeded(9));
        let sys = build_system(&[d_e(&e), t_e(&e)]).unwrap();
        assert_eq!(sys.n_effects(), 3);
        assert_eq!(sys.rows[1][0], sys.rows[1][1]);
        let half = sys.rows[1][0];
        let whole = sys.rows[0][0];
        assert_eq!(sys.matrix[(1, half)], 2.0);
        let sp = solve_space(&sys).unwrap();
        assert_eq!(sp.affine_dim, 1);
        assert!((sp.particular[half] - 0.5 * sp.particular[whole]).abs() < 1e-10);
        for b in &sp.basis {
            assert!((b[half] - 0.5 * b[whole]).abs() < 1e-10);
        }
    }

    #[test]
    fn inconsistent_rows_are_reported() {
        let e = Effect::new(crate::operator::HermitianOperator::qubit(0.5, 0.0, 0.0, 0.0)).unwrap();
        // rows 2 f = 1 and 3 f = 1 cannot both hold
        let sys = FrameSystem {
            registry: {
                let mut r = EffectRegistry::new();
                r.insert(&e);
                r
            },
            rows: vec![vec![0, 0], vec![0, 0, 0]],
            matrix: DMatrix::from_row_slice(2, 1, &[2.0, 3.0]),
        };
        assert!(matches!(solve_space(&sys), Err(Error::InconsistentSystem(_))));
    }

    #[test]
    fn hit_and_run_stays_feasible() {
        let mut rng = seeded(4);
        let ms: Vec<_> = (0..5).map(|_| d_e(&random_qubit_effect(&mut rng))).collect();
        let sys = build_system(&ms).unwrap();
        let sp = solve_space(&sys).unwrap();
        assert_eq!(sp.affine_dim, 5);
        let start: Vec<f64> = sys.registry.entries().iter().map(|e| e.op().trace() / 2.0).collect();
        let draws = sample_feasible(&sp, &start, 20, 1).unwrap();
        assert_eq!(draws.len(), 20);
        for x in &draws {
            assert!(sys.residual(x) < 1e-9);
            assert!(x.iter().all(|v| (0.0..=1.0).contains(v)));
        }
    }
}

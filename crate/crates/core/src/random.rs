//! Seeded generators for random operators.
//!
//! Everything draws from a caller-supplied RNG so that results are fixed by a seed.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::operator::{BlochCoefficients, DensityOperator, Effect, HermitianOperator, Projector};

/// The generator used for every seeded computation in the crate.
pub fn seeded(seed: u64) -> ChaCha8Rng {
    rand::SeedableRng::seed_from_u64(seed)
}

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    StandardNormal.sample(rng)
}

fn ginibre<R: Rng + ?Sized>(rng: &mut R, d: usize) -> DMatrix<C64> {
    DMatrix::from_fn(d, d, |_, _| C64::new(gaussian(rng), gaussian(rng)))
}

/// Haar-random unitary from the QR decomposition of a complex Gaussian matrix.
pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, d: usize) -> DMatrix<C64> {
    let qr = ginibre(rng, d).qr();
    let (mut q, r) = qr.unpack();
    // fix the phase freedom so the distribution is Haar
    for k in 0..d {
        let diag = r[(k, k)];
        let phase = if diag.norm() > 0.0 { diag / diag.norm() } else { C64::new(1.0, 0.0) };
        let col = q.column(k) * phase;
        q.set_column(k, &col);
    }
    q
}

/// Uniform point on the unit sphere.
pub fn random_unit_vector<R: Rng + ?Sized>(rng: &mut R) -> [f64; 3] {
    loop {
        let v = [gaussian(rng), gaussian(rng), gaussian(rng)];
        let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if n > 1e-9 {
            return [v[0] / n, v[1] / n, v[2] / n];
        }
    }
}

/// Uniform point on the unit sphere in `R^n`.
pub fn random_unit_vector_n<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..n).map(|_| gaussian(rng)).collect();
        let len = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if len > 1e-9 {
            return v.into_iter().map(|x| x / len).collect();
        }
    }
}

/// Qubit effect drawn uniformly from the double cone of valid Bloch tuples.
pub fn random_qubit_effect<R: Rng + ?Sized>(rng: &mut R) -> Effect {
    loop {
        let b = BlochCoefficients::new(
            rng.random_range(0.0..1.0),
            rng.random_range(-0.5..0.5),
            rng.random_range(-0.5..0.5),
            rng.random_range(-0.5..0.5),
        );
        if b.is_effect(0.0) {
            return Effect::new_unchecked(b.to_operator());
        }
    }
}

/// Rank-1 qubit projector with a uniformly random Bloch direction.
pub fn random_qubit_projector<R: Rng + ?Sized>(rng: &mut R) -> Projector {
    Projector::bloch_pure(random_unit_vector(rng)).expect("unit vector")
}

/// `U diag(λ) U†` with Haar `U` and eigenvalues uniform on `[0, 1]`.
pub fn random_effect<R: Rng + ?Sized>(rng: &mut R, d: usize) -> Effect {
    let u = random_unitary(rng, d);
    let lambda: Vec<f64> = (0..d).map(|_| rng.random_range(0.0..=1.0)).collect();
    let diag = DMatrix::from_fn(d, d, |i, j| if i == j { C64::new(lambda[i], 0.0) } else { C64::new(0.0, 0.0) });
    let m = &u * diag * u.adjoint();
    Effect::new_unchecked(HermitianOperator::new(m).expect("conjugation preserves hermiticity"))
}

/// `G G† / Tr(G G†)` for a complex Gaussian `G`.
pub fn random_density<R: Rng + ?Sized>(rng: &mut R, d: usize) -> DensityOperator {
    let g = ginibre(rng, d);
    let m = &g * g.adjoint();
    let tr = m.trace().re;
    let h = HermitianOperator::new(m / C64::new(tr, 0.0)).expect("Gram matrices are Hermitian");
    DensityOperator::new(h).expect("normalized Gram matrix")
}

/// Projectors onto a random partition of a Haar-random orthonormal basis into
/// `parts` nonempty groups.
pub fn random_orthogonal_family<R: Rng + ?Sized>(rng: &mut R, d: usize, parts: usize) -> Vec<Projector> {
    let parts = parts.clamp(1, d);
    let u = random_unitary(rng, d);
    // every group gets one vector, the rest are spread at random
    let mut group: Vec<usize> = (0..d).map(|k| if k < parts { k } else { rng.random_range(0..parts) }).collect();
    for k in (1..d).rev() {
        let j = rng.random_range(0..=k);
        group.swap(k, j);
    }
    (0..parts)
        .map(|g| {
            let mut m = DMatrix::<C64>::zeros(d, d);
            for k in (0..d).filter(|&k| group[k] == g) {
                let v = u.column(k);
                m += v * v.adjoint();
            }
            Projector::new_unchecked(HermitianOperator::new(m).expect("sum of ket-bras"))
        })
        .collect()
}

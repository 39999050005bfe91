//! Dense Hermitian operators and the effect, projector and density types built on them.
//!
//! Qubit operators are also addressed through their Bloch coefficients
//! `(a, b, c, d)` in `h = a·1 + b·σx + c·σy + d·σz`. The computational basis
//! follows the usual convention `|0⟩⟨0| = ½(1 + σz)`, so `|0⟩` sits at the
//! north pole of the Bloch sphere.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tolerance::{ARITH_TOL, HERMITIAN_TOL, VALIDATION_TOL};

const EIGEN_EPS: f64 = 1e-15;
const EIGEN_MAX_ITER: usize = 10_000;

/* Hermitian operators ********************************************************/

/// A `d × d` complex Hermitian matrix, `d ≥ 2`.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "HermitianJson", into = "HermitianJson")]
pub struct HermitianOperator {
    m: DMatrix<C64>,
}

/// Wire form: `{ "dim": d, "entries": [[re, im], ...] }`, row-major, `d²` pairs.
#[derive(Serialize, Deserialize)]
struct HermitianJson {
    dim: usize,
    entries: Vec<[f64; 2]>,
}

impl TryFrom<HermitianJson> for HermitianOperator {
    type Error = Error;

    fn try_from(j: HermitianJson) -> Result<Self> {
        let pairs: Vec<(f64, f64)> = j.entries.iter().map(|p| (p[0], p[1])).collect();
        HermitianOperator::from_entries(j.dim, &pairs)
    }
}

impl From<HermitianOperator> for HermitianJson {
    fn from(h: HermitianOperator) -> Self {
        let d = h.dim();
        let mut entries = Vec::with_capacity(d * d);
        for i in 0..d {
            for j in 0..d {
                let z = h.m[(i, j)];
                entries.push([z.re, z.im]);
            }
        }
        HermitianJson { dim: d, entries }
    }
}

impl fmt::Debug for HermitianOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d = self.dim();
        write!(f, "Hermitian[")?;
        for i in 0..d {
            if i > 0 {
                write!(f, "; ")?;
            }
            for j in 0..d {
                let z = self.m[(i, j)];
                if j > 0 {
                    write!(f, ", ")?;
                }
                if z.im == 0.0 {
                    write!(f, "{}", z.re)?;
                } else {
                    write!(f, "{}{:+}i", z.re, z.im)?;
                }
            }
        }
        write!(f, "]")
    }
}

impl HermitianOperator {
    /// Validates hermiticity to [`HERMITIAN_TOL`] and stores the symmetrized matrix.
    pub fn new(m: DMatrix<C64>) -> Result<Self> {
        let d = m.nrows();
        if m.ncols() != d {
            return Err(Error::DimensionMismatch { expected: d, got: m.ncols() });
        }
        if d < 2 {
            return Err(Error::InvalidInput(format!("dimension must be at least 2, got {d}")));
        }
        if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidInput("non-finite matrix entry".into()));
        }
        let adj = m.adjoint();
        let asym = (&m - &adj).iter().map(|z| z.norm()).fold(0.0, f64::max);
        if asym > HERMITIAN_TOL {
            return Err(Error::NotHermitian(asym));
        }
        Ok(Self::from_matrix_unchecked((m + adj) * C64::new(0.5, 0.0)))
    }

    pub(crate) fn from_matrix_unchecked(m: DMatrix<C64>) -> Self {
        Self { m }
    }

    /// Builds an operator from `dim²` row-major `(re, im)` pairs.
    pub fn from_entries(dim: usize, entries: &[(f64, f64)]) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(Error::ShapeMismatch(format!(
                "expected {} entries for dim {dim}, got {}",
                dim * dim,
                entries.len()
            )));
        }
        let m = DMatrix::from_fn(dim, dim, |i, j| {
            let (re, im) = entries[i * dim + j];
            C64::new(re, im)
        });
        Self::new(m)
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Result<Self> {
        let d = diag.len();
        if d < 2 {
            return Err(Error::InvalidInput(format!("dimension must be at least 2, got {d}")));
        }
        let mut m = DMatrix::zeros(d, d);
        for (i, &x) in diag.iter().enumerate() {
            m[(i, i)] = C64::new(x, 0.0);
        }
        Ok(Self { m })
    }

    pub fn identity(dim: usize) -> Self {
        Self { m: DMatrix::identity(dim, dim) }
    }

    pub fn zero(dim: usize) -> Self {
        Self { m: DMatrix::zeros(dim, dim) }
    }

    /// `|v⟩⟨v| / ⟨v|v⟩`.
    pub fn ket_bra(v: &[C64]) -> Result<Self> {
        let norm2: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        if norm2 <= 0.0 || !norm2.is_finite() {
            return Err(Error::InvalidInput("zero or non-finite state vector".into()));
        }
        let d = v.len();
        let m = DMatrix::from_fn(d, d, |i, j| v[i] * v[j].conj() / norm2);
        Ok(Self { m })
    }

    pub fn pauli_x() -> Self {
        Self::qubit(0.0, 1.0, 0.0, 0.0)
    }

    pub fn pauli_y() -> Self {
        Self::qubit(0.0, 0.0, 1.0, 0.0)
    }

    pub fn pauli_z() -> Self {
        Self::qubit(0.0, 0.0, 0.0, 1.0)
    }

    /// `a·1 + b·σx + c·σy + d·σz`.
    pub fn qubit(a: f64, b: f64, c: f64, d: f64) -> Self {
        let m = DMatrix::from_row_slice(
            2,
            2,
            &[
                C64::new(a + d, 0.0),
                C64::new(b, -c),
                C64::new(b, c),
                C64::new(a - d, 0.0),
            ],
        );
        Self { m }
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.m
    }

    pub fn entry(&self, i: usize, j: usize) -> C64 {
        self.m[(i, j)]
    }

    pub fn trace(&self) -> f64 {
        self.m.diagonal().iter().map(|z| z.re).sum()
    }

    /// `Tr(self · other)`, real for Hermitian arguments.
    pub fn trace_product(&self, other: &Self) -> f64 {
        debug_assert_eq!(self.dim(), other.dim());
        // Tr(AB) = Σ_ij A_ij B_ji = Σ_ij A_ij conj(B_ij) for Hermitian B.
        self.m.iter().zip(other.m.iter()).map(|(a, b)| (a * b.conj()).re).sum()
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        if self.dim() != other.dim() {
            return f64::INFINITY;
        }
        (&self.m - &other.m).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.max_abs_diff(other) <= tol
    }

    pub fn is_zero(&self, tol: f64) -> bool {
        self.m.iter().all(|z| z.norm() <= tol)
    }

    pub fn scale(&self, s: f64) -> Self {
        Self { m: &self.m * C64::new(s, 0.0) }
    }

    /// Operator product, returned only when the result is Hermitian.
    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        Self::new(&self.m * &other.m)
    }

    pub(crate) fn raw_product(&self, other: &Self) -> DMatrix<C64> {
        &self.m * &other.m
    }

    pub fn check_dim(&self, other: &Self) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: other.dim() });
        }
        Ok(())
    }

    /// Bloch coefficients of a qubit operator.
    pub fn bloch(&self) -> Result<BlochCoefficients> {
        if self.dim() != 2 {
            return Err(Error::DimensionMismatch { expected: 2, got: self.dim() });
        }
        let m = &self.m;
        Ok(BlochCoefficients {
            a: 0.5 * (m[(0, 0)].re + m[(1, 1)].re),
            b: 0.5 * (m[(0, 1)].re + m[(1, 0)].re),
            c: 0.5 * (m[(1, 0)].im - m[(0, 1)].im),
            d: 0.5 * (m[(0, 0)].re - m[(1, 1)].re),
        })
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        if self.dim() == 2 {
            // closed form keeps the hot qubit paths off the iterative solver
            let bc = self.bloch()?;
            let r = bc.radius();
            return Ok(vec![bc.a - r, bc.a + r]);
        }
        let eig = SymmetricEigen::try_new(self.m.clone(), EIGEN_EPS, EIGEN_MAX_ITER)
            .ok_or(Error::ConvergenceFailure)?;
        let mut ev: Vec<f64> = eig.eigenvalues.iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        Ok(ev)
    }
}

impl Add for &HermitianOperator {
    type Output = HermitianOperator;
    fn add(self, rhs: Self) -> HermitianOperator {
        assert_eq!(self.dim(), rhs.dim(), "dimension mismatch in operator sum");
        HermitianOperator { m: &self.m + &rhs.m }
    }
}

impl Sub for &HermitianOperator {
    type Output = HermitianOperator;
    fn sub(self, rhs: Self) -> HermitianOperator {
        assert_eq!(self.dim(), rhs.dim(), "dimension mismatch in operator difference");
        HermitianOperator { m: &self.m - &rhs.m }
    }
}

impl Mul<&HermitianOperator> for f64 {
    type Output = HermitianOperator;
    fn mul(self, rhs: &HermitianOperator) -> HermitianOperator {
        rhs.scale(self)
    }
}

impl Neg for &HermitianOperator {
    type Output = HermitianOperator;
    fn neg(self) -> HermitianOperator {
        self.scale(-1.0)
    }
}

/* Bloch coefficients *********************************************************/

/// Expansion of a qubit operator over `{1, σx, σy, σz}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlochCoefficients {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl BlochCoefficients {
    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Self {
        Self { a, b, c, d }
    }

    /// Length of the Bloch vector `(b, c, d)`.
    pub fn radius(&self) -> f64 {
        (self.b * self.b + self.c * self.c + self.d * self.d).sqrt()
    }

    pub fn vector(&self) -> [f64; 3] {
        [self.b, self.c, self.d]
    }

    /// `a - r ≥ -tol` and `a + r ≤ 1 + tol`.
    pub fn is_effect(&self, tol: f64) -> bool {
        let r = self.radius();
        self.a - r >= -tol && self.a + r <= 1.0 + tol
    }

    pub fn to_operator(&self) -> HermitianOperator {
        HermitianOperator::qubit(self.a, self.b, self.c, self.d)
    }
}

/// `a·1 + b·σx + c·σy + d·σz`, rejected when it leaves the effect band.
pub fn bloch_to_effect(coeffs: BlochCoefficients) -> Result<Effect> {
    if !coeffs.is_effect(VALIDATION_TOL) {
        let r = coeffs.radius();
        return Err(Error::NotAnEffect { min: coeffs.a - r, max: coeffs.a + r });
    }
    Ok(Effect(coeffs.to_operator()))
}

pub fn effect_to_bloch(e: &Effect) -> Result<BlochCoefficients> {
    e.op().bloch()
}

/* Effects, projectors, densities *********************************************/

/// True iff every eigenvalue of `h` lies in `[-tol, 1 + tol]`.
pub fn is_effect(h: &HermitianOperator, tol: f64) -> bool {
    match h.eigenvalues() {
        Ok(ev) => ev.first().is_some_and(|&lo| lo >= -tol) && ev.last().is_some_and(|&hi| hi <= 1.0 + tol),
        Err(_) => false,
    }
}

/// Hermitian `e` with `0 ≤ e ≤ 1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "HermitianOperator", into = "HermitianOperator")]
pub struct Effect(HermitianOperator);

impl TryFrom<HermitianOperator> for Effect {
    type Error = Error;
    fn try_from(h: HermitianOperator) -> Result<Self> {
        Effect::new(h)
    }
}

impl From<Effect> for HermitianOperator {
    fn from(e: Effect) -> Self {
        e.0
    }
}

impl Effect {
    pub fn new(h: HermitianOperator) -> Result<Self> {
        Self::with_tol(h, VALIDATION_TOL)
    }

    pub fn with_tol(h: HermitianOperator, tol: f64) -> Result<Self> {
        let ev = h.eigenvalues()?;
        let (min, max) = (ev[0], ev[ev.len() - 1]);
        if min < -tol || max > 1.0 + tol {
            return Err(Error::NotAnEffect { min, max });
        }
        Ok(Effect(h))
    }

    pub(crate) fn new_unchecked(h: HermitianOperator) -> Self {
        Effect(h)
    }

    pub fn identity(dim: usize) -> Self {
        Effect(HermitianOperator::identity(dim))
    }

    pub fn zero(dim: usize) -> Self {
        Effect(HermitianOperator::zero(dim))
    }

    pub fn op(&self) -> &HermitianOperator {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    /// `1 - e`.
    pub fn complement(&self) -> Effect {
        Effect(&HermitianOperator::identity(self.dim()) - &self.0)
    }

    /// `s·e` for `s ∈ [0, 1]`.
    pub fn scaled(&self, s: f64) -> Result<Effect> {
        if !(0.0..=1.0).contains(&s) {
            return Err(Error::InvalidInput(format!("effect scale {s} outside [0, 1]")));
        }
        Ok(Effect(self.0.scale(s)))
    }

    /// `e + other`, checked against the effect band.
    pub fn checked_add(&self, other: &Effect) -> Result<Effect> {
        self.0.check_dim(&other.0)?;
        Effect::new(&self.0 + &other.0)
    }

    pub fn bloch(&self) -> Result<BlochCoefficients> {
        self.0.bloch()
    }

    /// Idempotent within `tol` entrywise.
    pub fn is_projector(&self, tol: f64) -> bool {
        let sq = self.0.raw_product(&self.0);
        (&sq - self.0.matrix()).iter().all(|z| z.norm() <= tol)
    }
}

impl AsRef<HermitianOperator> for Effect {
    fn as_ref(&self) -> &HermitianOperator {
        &self.0
    }
}

/// Idempotent effect, `P² = P`.
#[derive(Clone, Debug, PartialEq)]
pub struct Projector(Effect);

impl Projector {
    pub fn new(h: HermitianOperator) -> Result<Self> {
        let e = Effect(h);
        let sq = e.0.raw_product(&e.0);
        let dev = (&sq - e.0.matrix()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        if dev > VALIDATION_TOL {
            return Err(Error::NotProjector(dev));
        }
        Ok(Projector(e))
    }

    pub(crate) fn new_unchecked(h: HermitianOperator) -> Self {
        Projector(Effect(h))
    }

    /// Rank-1 qubit projector `½(1 + n·σ)` for a unit vector `n`.
    pub fn bloch_pure(n: [f64; 3]) -> Result<Self> {
        let len = (n[0] * n[0] + n[1] * n[1] + n[2] * n[2]).sqrt();
        if (len - 1.0).abs() > ARITH_TOL {
            return Err(Error::NotUnitVector(len));
        }
        Ok(Projector(Effect(HermitianOperator::qubit(0.5, 0.5 * n[0], 0.5 * n[1], 0.5 * n[2]))))
    }

    /// Computational basis projector `|k⟩⟨k|` in dimension `dim`.
    pub fn basis(dim: usize, k: usize) -> Self {
        let mut m = DMatrix::zeros(dim, dim);
        m[(k, k)] = C64::new(1.0, 0.0);
        Projector(Effect(HermitianOperator::from_matrix_unchecked(m)))
    }

    pub fn effect(&self) -> &Effect {
        &self.0
    }

    pub fn op(&self) -> &HermitianOperator {
        &self.0 .0
    }

    pub fn into_effect(self) -> Effect {
        self.0
    }

    pub fn rank(&self) -> usize {
        self.op().trace().round() as usize
    }
}

/// Positive semidefinite, unit trace.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "HermitianOperator", into = "HermitianOperator")]
pub struct DensityOperator(HermitianOperator);

impl TryFrom<HermitianOperator> for DensityOperator {
    type Error = Error;
    fn try_from(h: HermitianOperator) -> Result<Self> {
        DensityOperator::new(h)
    }
}

impl From<DensityOperator> for HermitianOperator {
    fn from(d: DensityOperator) -> Self {
        d.0
    }
}

impl DensityOperator {
    pub fn new(h: HermitianOperator) -> Result<Self> {
        let tr = h.trace();
        if (tr - 1.0).abs() > VALIDATION_TOL {
            return Err(Error::NotDensity(format!("trace {tr} != 1")));
        }
        let ev = h.eigenvalues()?;
        if ev[0] < -VALIDATION_TOL {
            return Err(Error::NotDensity(format!("negative eigenvalue {}", ev[0])));
        }
        Ok(DensityOperator(h))
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        DensityOperator(HermitianOperator::identity(dim).scale(1.0 / dim as f64))
    }

    /// `½(1 + s·σ)` for `|s| ≤ 1`.
    pub fn qubit(s: [f64; 3]) -> Result<Self> {
        Self::new(HermitianOperator::qubit(0.5, 0.5 * s[0], 0.5 * s[1], 0.5 * s[2]))
    }

    pub fn op(&self) -> &HermitianOperator {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }
}

/// `Tr(ρ e)`, snapped onto `[0, 1]` when within [`VALIDATION_TOL`] of the boundary.
pub fn born_probability(rho: &DensityOperator, e: &Effect) -> Result<f64> {
    rho.0.check_dim(&e.0)?;
    let p = rho.0.trace_product(&e.0);
    Ok(if (-VALIDATION_TOL..0.0).contains(&p) {
        0.0
    } else if p > 1.0 && p <= 1.0 + VALIDATION_TOL {
        1.0
    } else {
        p
    })
}

/* Spectral decomposition *****************************************************/

/// Ascending eigenvalues with matching mutually orthogonal rank-1 projectors.
#[derive(Clone, Debug)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<f64>,
    pub projectors: Vec<Projector>,
}

impl SpectralDecomposition {
    /// `Σ_j λ_j P_j`.
    pub fn reconstruct(&self) -> HermitianOperator {
        let d = self.projectors[0].op().dim();
        self.eigenvalues
            .iter()
            .zip(&self.projectors)
            .fold(HermitianOperator::zero(d), |acc, (&l, p)| &acc + &p.op().scale(l))
    }
}

/// Eigen-resolution `h = Σ_j λ_j P_j` with `λ_1 ≤ … ≤ λ_d`.
///
/// Within a degenerate eigenspace the basis is whatever the solver returns.
pub fn spectral(h: &HermitianOperator) -> Result<SpectralDecomposition> {
    let eig = SymmetricEigen::try_new(h.matrix().clone(), EIGEN_EPS, EIGEN_MAX_ITER)
        .ok_or(Error::ConvergenceFailure)?;
    let d = h.dim();
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let mut eigenvalues = Vec::with_capacity(d);
    let mut projectors = Vec::with_capacity(d);
    for k in order {
        let v: Vec<C64> = eig.eigenvectors.column(k).iter().copied().collect();
        eigenvalues.push(eig.eigenvalues[k]);
        projectors.push(Projector::new_unchecked(HermitianOperator::ket_bra(&v)?));
    }
    Ok(SpectralDecomposition { eigenvalues, projectors })
}

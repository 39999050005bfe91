//! Numerical tolerances shared by every module.

/// Eigenvalue band used when validating effects, projectors and densities.
pub const VALIDATION_TOL: f64 = 1e-10;

/// Arithmetic identities (round trips, linearity, mixture equality).
pub const ARITH_TOL: f64 = 1e-12;

/// Hermiticity check on raw matrices.
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Default distance tolerance for the simulability membership test.
pub const MEMBERSHIP_TOL: f64 = 1e-7;

/// Default iteration budget for the membership test.
pub const MEMBERSHIP_MAX_ITER: usize = 20_000;

/// Singular values below this are treated as zero when computing ranks and nullspaces.
pub const RANK_TOL: f64 = 1e-8;

/// Environment variable that overrides [`MEMBERSHIP_TOL`] for the command-line front end.
pub const TOL_ENV_VAR: &str = "GLEASON_LAB_TOL";

/// Membership tolerance honoring the `GLEASON_LAB_TOL` override.
pub fn membership_tol_from_env() -> f64 {
    std::env::var(TOL_ENV_VAR)
        .ok()
        .and_then(|s| s.trim().parse::<f64>().ok())
        .filter(|t| t.is_finite() && *t > 0.0)
        .unwrap_or(MEMBERSHIP_TOL)
}

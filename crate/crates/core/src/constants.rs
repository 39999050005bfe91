//! Reference values for the Stern–Gerlach mixture example and its counterexample frame function.
//!
//! These are fixed numbers, not recomputed anywhere; `reproduce` compares
//! the library's output against them.

/// Mixing weights `p± = (1 ± 1/√3)/2` for the `M_r` / `M_s` mixture.
pub fn p_plus() -> f64 {
    0.5 * (1.0 + 1.0 / 3f64.sqrt())
}

pub fn p_minus() -> f64 {
    0.5 * (1.0 - 1.0 / 3f64.sqrt())
}

/// Bloch coefficients of `m = ½(1 + ½(σx + σz))`.
pub const M_EFFECT_BLOCH: [f64; 4] = [0.5, 0.25, 0.0, 0.25];

/// Outcome probabilities `(outcome 1, outcome 2)` assigned by the counterexample `g`.
pub const G_TABLE: [(&str, f64, f64); 4] = [
    ("M_x", 0.5, 0.5),
    ("M_z", 0.0, 1.0),
    ("M_r", 0.5, 0.5),
    ("M_s", 0.5, 0.5),
];

/// First-outcome probability of `½M_x + ½M_z` under `g`.
pub const G_MIXTURE_XZ: f64 = 0.25;

/// First-outcome probability of `p₊M_r + p₋M_s` under `g`.
pub const G_MIXTURE_RS: f64 = 0.5;

/// Tolerance for every comparison against these constants.
pub const REPRODUCE_TOL: f64 = 1e-12;

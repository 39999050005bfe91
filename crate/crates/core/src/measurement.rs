//! Measurements as ordered effect sequences, their convex mixtures, and a catalog
//! of named qubit measurements.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::constants::{p_minus, p_plus, M_EFFECT_BLOCH};
use crate::error::{Error, Result};
use crate::operator::{Effect, HermitianOperator};
use crate::tolerance::{ARITH_TOL, VALIDATION_TOL};

/// Ordered effects `[e_1, …, e_n]` with `Σ e_j = 1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MeasurementJson", into = "MeasurementJson")]
pub struct Measurement {
    effects: Vec<Effect>,
}

#[derive(Serialize, Deserialize)]
struct MeasurementJson {
    dim: usize,
    effects: Vec<HermitianOperator>,
}

impl TryFrom<MeasurementJson> for Measurement {
    type Error = Error;

    fn try_from(j: MeasurementJson) -> Result<Self> {
        if let Some(h) = j.effects.iter().find(|h| h.dim() != j.dim) {
            return Err(Error::DimensionMismatch { expected: j.dim, got: h.dim() });
        }
        let effects = j.effects.into_iter().map(Effect::new).collect::<Result<Vec<_>>>()?;
        make_measurement(effects, VALIDATION_TOL)
    }
}

impl From<Measurement> for MeasurementJson {
    fn from(m: Measurement) -> Self {
        MeasurementJson {
            dim: m.dim(),
            effects: m.effects.into_iter().map(HermitianOperator::from).collect(),
        }
    }
}

/// Validates completeness `Σ e_j = 1` within `tol` entrywise.
pub fn make_measurement(effects: Vec<Effect>, tol: f64) -> Result<Measurement> {
    let first = effects
        .first()
        .ok_or_else(|| Error::InvalidInput("a measurement needs at least one outcome".into()))?;
    let d = first.dim();
    if let Some(e) = effects.iter().find(|e| e.dim() != d) {
        return Err(Error::DimensionMismatch { expected: d, got: e.dim() });
    }
    let sum = effects.iter().fold(HermitianOperator::zero(d), |acc, e| &acc + e.op());
    let dev = sum.max_abs_diff(&HermitianOperator::identity(d));
    if dev > tol {
        return Err(Error::IncompleteMeasurement(dev));
    }
    Ok(Measurement { effects })
}

impl Measurement {
    pub(crate) fn new_unchecked(effects: Vec<Effect>) -> Self {
        Measurement { effects }
    }

    pub fn effects(&self) -> &[Effect] {
        &self.effects
    }

    pub fn effect(&self, i: usize) -> &Effect {
        &self.effects[i]
    }

    pub fn n_outcomes(&self) -> usize {
        self.effects.len()
    }

    pub fn dim(&self) -> usize {
        self.effects[0].dim()
    }

    /// Every effect idempotent (the zero effect included).
    pub fn is_projective(&self, tol: f64) -> bool {
        self.effects.iter().all(|e| e.is_projector(tol))
    }

    /// Largest entrywise deviation between corresponding effects; infinite on shape mismatch.
    pub fn max_abs_diff(&self, other: &Measurement) -> f64 {
        if self.n_outcomes() != other.n_outcomes() || self.dim() != other.dim() {
            return f64::INFINITY;
        }
        self.effects
            .iter()
            .zip(&other.effects)
            .map(|(a, b)| a.op().max_abs_diff(b.op()))
            .fold(0.0, f64::max)
    }

    pub fn to_vector(&self) -> MeasurementVector {
        MeasurementVector {
            entries: self.effects.iter().map(|e| e.op().clone()).collect(),
        }
    }
}

impl fmt::Display for Measurement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "⟦")?;
        for (i, e) in self.effects.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{:?}", e.op())?;
        }
        write!(f, "⟧")
    }
}

/* Measurement vectors ********************************************************/

/// Tuple of Hermitian operators without the completeness constraint; the ambient
/// real vector space in which measurements are mixed and separated.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MeasurementVector {
    pub entries: Vec<HermitianOperator>,
}

impl MeasurementVector {
    pub fn new(entries: Vec<HermitianOperator>) -> Result<Self> {
        let first = entries
            .first()
            .ok_or_else(|| Error::InvalidInput("empty measurement vector".into()))?;
        if let Some(h) = entries.iter().find(|h| h.dim() != first.dim()) {
            return Err(Error::DimensionMismatch { expected: first.dim(), got: h.dim() });
        }
        Ok(Self { entries })
    }

    pub fn zeros(dim: usize, n: usize) -> Self {
        Self { entries: vec![HermitianOperator::zero(dim); n] }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.entries[0].dim()
    }

    fn check_shape(&self, other: &Self) -> Result<()> {
        if self.len() != other.len() || self.dim() != other.dim() {
            return Err(Error::ShapeMismatch(format!(
                "{} outcomes (d = {}) vs {} outcomes (d = {})",
                self.len(),
                self.dim(),
                other.len(),
                other.dim()
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_shape(other)?;
        Ok(Self {
            entries: self.entries.iter().zip(&other.entries).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn scale(&self, s: f64) -> Self {
        Self { entries: self.entries.iter().map(|h| h.scale(s)).collect() }
    }

    /// Outcome-wise trace inner product `Σ_j Tr(X_j Y_j)`.
    pub fn inner(&self, other: &Self) -> Result<f64> {
        self.check_shape(other)?;
        Ok(self.entries.iter().zip(&other.entries).map(|(a, b)| a.trace_product(b)).sum())
    }

    pub fn inner_measurement(&self, m: &Measurement) -> Result<f64> {
        self.inner(&m.to_vector())
    }
}

/* Named measurement sets *****************************************************/

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MeasurementSetTag {
    /// All projective measurements.
    Pvm,
    /// All measurements.
    Pom,
    /// Qubit measurements with at most two outcomes.
    TwoPom,
    /// Qubit measurements with at most three outcomes.
    ThreePom,
    /// Projective-simulable measurements.
    Psm,
    /// Two-outcome qubit measurements together with every `T_e` and `T_{e,e'}`.
    ThreePsmPrime,
}

impl FromStr for MeasurementSetTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace(['_', '-', '\''], "").as_str() {
            "pvm" => Ok(Self::Pvm),
            "pom" => Ok(Self::Pom),
            "2pom" | "twopom" => Ok(Self::TwoPom),
            "3pom" | "threepom" => Ok(Self::ThreePom),
            "psm" => Ok(Self::Psm),
            "3psmprime" | "threepsmprime" => Ok(Self::ThreePsmPrime),
            _ => Err(Error::InvalidInput(format!("unknown measurement set {s:?}"))),
        }
    }
}

impl fmt::Display for MeasurementSetTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Pvm => "PVM",
            Self::Pom => "POM",
            Self::TwoPom => "2POM",
            Self::ThreePom => "3POM",
            Self::Psm => "PSM",
            Self::ThreePsmPrime => "3PSM'",
        })
    }
}

/* Constructors ***************************************************************/

/// Convex combination `Σ_i w_i M_i`, outcome by outcome.
///
/// Parts must already have equal outcome counts; use [`pad_zero`] to align them.
pub fn mix(parts: &[(f64, &Measurement)]) -> Result<Measurement> {
    let (_, first) = parts.first().ok_or_else(|| Error::WeightError("no parts to mix".into()))?;
    let (n, d) = (first.n_outcomes(), first.dim());
    let mut total = 0.0;
    for (w, m) in parts {
        if !(w.is_finite() && (-ARITH_TOL..=1.0 + ARITH_TOL).contains(w)) {
            return Err(Error::WeightError(format!("weight {w} outside [0, 1]")));
        }
        if m.dim() != d {
            return Err(Error::DimensionMismatch { expected: d, got: m.dim() });
        }
        if m.n_outcomes() != n {
            return Err(Error::ShapeMismatch(format!(
                "cannot mix {n}-outcome and {}-outcome measurements",
                m.n_outcomes()
            )));
        }
        total += w;
    }
    if (total - 1.0).abs() > ARITH_TOL {
        return Err(Error::WeightError(format!("weights sum to {total}")));
    }
    let effects = (0..n)
        .map(|j| {
            let op = parts
                .iter()
                .fold(HermitianOperator::zero(d), |acc, (w, m)| &acc + &m.effect(j).op().scale(*w));
            Effect::new_unchecked(op)
        })
        .collect();
    make_measurement(effects, VALIDATION_TOL)
}

/// Inserts the zero effect at `position` (`0 ≤ position ≤ n`).
pub fn pad_zero(m: &Measurement, position: usize) -> Result<Measurement> {
    let n = m.n_outcomes();
    if position > n {
        return Err(Error::IndexOutOfRange { index: position, max: n });
    }
    let mut effects = m.effects.clone();
    effects.insert(position, Effect::zero(m.dim()));
    Ok(Measurement { effects })
}

/// `D_e = ⟦e, 1 - e⟧`.
pub fn d_e(e: &Effect) -> Measurement {
    Measurement { effects: vec![e.clone(), e.complement()] }
}

/// `T_e = ⟦e/2, e/2, 1 - e⟧`.
pub fn t_e(e: &Effect) -> Measurement {
    let half = Effect::new_unchecked(e.op().scale(0.5));
    Measurement { effects: vec![half.clone(), half, e.complement()] }
}

/// `T_{e,e'} = ⟦e/2, e'/2, 1 - (e + e')/2⟧`; a measurement for any two effects.
pub fn t_ee(e: &Effect, e2: &Effect) -> Result<Measurement> {
    e.op().check_dim(e2.op())?;
    // (e + e')/2 is an effect for any pair of effects
    let half_sum = Effect::new_unchecked((e.op() + e2.op()).scale(0.5));
    Ok(Measurement {
        effects: vec![
            Effect::new_unchecked(e.op().scale(0.5)),
            Effect::new_unchecked(e2.op().scale(0.5)),
            half_sum.complement(),
        ],
    })
}

/// Spin measurement along a unit axis: `½⟦1 + n·σ, 1 - n·σ⟧`.
pub fn stern_gerlach(axis: [f64; 3]) -> Result<Measurement> {
    let len = axis.iter().map(|x| x * x).sum::<f64>().sqrt();
    if (len - 1.0).abs() > ARITH_TOL {
        return Err(Error::NotUnitVector(len));
    }
    let plus = HermitianOperator::qubit(0.5, 0.5 * axis[0], 0.5 * axis[1], 0.5 * axis[2]);
    let minus = HermitianOperator::qubit(0.5, -0.5 * axis[0], -0.5 * axis[1], -0.5 * axis[2]);
    Ok(Measurement {
        effects: vec![Effect::new_unchecked(plus), Effect::new_unchecked(minus)],
    })
}

/// Replaces each effect `e_j` by `v·e_j + (1 - v)·Tr(e_j)·1/d`.
pub fn depolarize(m: &Measurement, visibility: f64) -> Result<Measurement> {
    if !(0.0..=1.0).contains(&visibility) {
        return Err(Error::InvalidInput(format!("visibility {visibility} outside [0, 1]")));
    }
    let d = m.dim();
    let effects = m
        .effects
        .iter()
        .map(|e| {
            let noise = HermitianOperator::identity(d).scale((1.0 - visibility) * e.op().trace() / d as f64);
            Effect::new_unchecked(&e.op().scale(visibility) + &noise)
        })
        .collect();
    Ok(Measurement { effects })
}

/* Catalog ********************************************************************/

fn qubit_effect(a: f64, b: f64, c: f64, d: f64) -> Effect {
    Effect::new_unchecked(HermitianOperator::qubit(a, b, c, d))
}

/// The mixed effect `m = ½(1 + ½(σx + σz))`.
pub fn m_effect() -> Effect {
    let [a, b, c, d] = M_EFFECT_BLOCH;
    qubit_effect(a, b, c, d)
}

/// `M_xz(p) = p·M_x + (1 - p)·M_z`.
pub fn m_xz(p: f64) -> Result<Measurement> {
    let mx = stern_gerlach([1.0, 0.0, 0.0])?;
    let mz = stern_gerlach([0.0, 0.0, 1.0])?;
    mix(&[(p, &mx), (1.0 - p, &mz)])
}

/// The symmetric trine `⅓⟦1 + σx, 1 - ½σx + (√3/2)σz, 1 - ½σx - (√3/2)σz⟧`.
pub fn trine() -> Measurement {
    let h = 3f64.sqrt() / 2.0;
    let third = 1.0 / 3.0;
    Measurement {
        effects: vec![
            qubit_effect(third, third, 0.0, 0.0),
            qubit_effect(third, -0.5 * third, 0.0, h * third),
            qubit_effect(third, -0.5 * third, 0.0, -h * third),
        ],
    }
}

/// `T' = ¼⟦1 + σz, 1 + σx, 2·1 - (σz + σx)⟧`.
pub fn t_prime() -> Measurement {
    Measurement {
        effects: vec![
            qubit_effect(0.25, 0.0, 0.0, 0.25),
            qubit_effect(0.25, 0.25, 0.0, 0.0),
            qubit_effect(0.5, -0.25, 0.0, -0.25),
        ],
    }
}

/// Names accepted by [`catalog_entry`].
pub const CATALOG_NAMES: [&str; 8] = ["M_x", "M_z", "M_xz", "M_r", "M_s", "E", "Tprime", "D_m"];

/// Named qubit measurements; `p` parameterizes `M_xz`.
pub fn catalog(p: f64) -> Result<BTreeMap<String, Measurement>> {
    CATALOG_NAMES
        .iter()
        .map(|&name| Ok((name.to_string(), catalog_entry(name, p)?)))
        .collect()
}

/// Looks up one catalog measurement by name (`T'` and `Tprime` are synonyms).
pub fn catalog_entry(name: &str, p: f64) -> Result<Measurement> {
    let s3 = 3f64.sqrt();
    let m = match name {
        "M_x" => stern_gerlach([1.0, 0.0, 0.0])?,
        "M_z" => stern_gerlach([0.0, 0.0, 1.0])?,
        "M_xz" => m_xz(p)?,
        "M_r" => stern_gerlach([0.5, 0.0, 0.5 * s3])?,
        "M_s" => stern_gerlach([0.5, 0.0, -0.5 * s3])?,
        "E" => trine(),
        "Tprime" | "T'" => t_prime(),
        "D_m" => d_e(&m_effect()),
        _ => return Err(Error::InvalidInput(format!("unknown catalog measurement {name:?}"))),
    };
    make_measurement(m.effects, ARITH_TOL)
}

/// `½(M_x + M_z)` and `p₊M_r + p₋M_s`, the two preparations of `D_m`.
pub fn d_m_mixtures() -> Result<(Measurement, Measurement)> {
    let cat = catalog(0.5)?;
    let xz = mix(&[(0.5, &cat["M_x"]), (0.5, &cat["M_z"])])?;
    let rs = mix(&[(p_plus(), &cat["M_r"]), (p_minus(), &cat["M_s"])])?;
    Ok((xz, rs))
}

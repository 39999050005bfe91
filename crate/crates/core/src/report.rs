//! Command-line front end: argument definitions and the commands behind them.
//!
//! Each command returns an [`Outcome`] holding the rendered report and the
//! process exit code, so the binary only parses arguments and prints.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::constants::{p_minus, p_plus, G_MIXTURE_RS, G_MIXTURE_XZ, G_TABLE, M_EFFECT_BLOCH, REPRODUCE_TOL};
use crate::error::{Error, Result};
use crate::frame::{
    build_system, check_frame, fit_density, fit_values, mixture_outcome_probability, sample_measurements, solve_space,
    CounterexampleG, FrameFunction, FrameTable,
};
use crate::measurement::{catalog_entry, d_e, mix, stern_gerlach, Measurement, MeasurementSetTag};
use crate::operator::{bloch_to_effect, BlochCoefficients, Effect, HermitianOperator};
use crate::simulability::{membership, simulate_two_outcome, staircase, verify_decomposition, VerdictStatus};
use crate::tolerance::{membership_tol_from_env, MEMBERSHIP_MAX_ITER};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_INCONCLUSIVE: i32 = 3;

#[derive(Parser, Debug, Clone)]
#[command(name = "gleason-lab", version, about = "Qubit measurement simulability and frame-function analysis")]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// Decompose the two-outcome measurement of an effect into projective measurements.
    Decompose(DecomposeArgs),
    /// Decide whether a qubit measurement is a mixture of projective ones.
    Simulable(SimulableArgs),
    /// Recompute the Stern–Gerlach mixture table for the counterexample frame function.
    Reproduce(ReproduceArgs),
    /// Solve the frame-function constraints of a sampled measurement set.
    Rigidity(RigidityArgs),
    /// Points on the boundary of a three-dimensional slice of the qubit effect space.
    CrossSection(CrossSectionArgs),
}

#[derive(Args, Debug, Clone, Default)]
pub struct MeasurementSource {
    /// Catalog name: M_x, M_z, M_xz, M_r, M_s, E, Tprime, D_m.
    #[arg(long)]
    pub catalog: Option<String>,
    /// JSON file with an operator (`decompose`) or a measurement (`simulable`).
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Mixing weight of `M_xz`.
    #[arg(long, default_value_t = 0.5)]
    pub p: f64,
}

#[derive(Args, Debug, Clone, Default)]
pub struct DecomposeArgs {
    #[command(flatten)]
    pub source: MeasurementSource,
    /// Bloch coefficients `a,b,c,d` of a qubit effect.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub bloch: Option<Vec<f64>>,
}

#[derive(Args, Debug, Clone, Default)]
pub struct SimulableArgs {
    #[command(flatten)]
    pub source: MeasurementSource,
    /// Distance tolerance (defaults to $GLEASON_LAB_TOL or 1e-7).
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long, default_value_t = MEMBERSHIP_MAX_ITER)]
    pub max_iter: usize,
}

#[derive(Args, Debug, Clone, Default)]
pub struct ReproduceArgs {
    /// Tilt the named catalog measurement before evaluating (fault injection).
    #[arg(long, hide = true)]
    pub perturb: Option<String>,
}

#[derive(Args, Debug, Clone)]
pub struct RigidityArgs {
    /// Measurement set: pvm, 2pom or 3psmprime.
    #[arg(long = "set")]
    pub set: String,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// One count for pvm and 2pom, three (`D_e`, `T_e`, `T_{e,e'}`) for 3psmprime.
    #[arg(long, value_delimiter = ',', required = true)]
    pub counts: Vec<usize>,
}

#[derive(Args, Debug, Clone)]
pub struct CrossSectionArgs {
    /// Bloch axis set to zero.
    #[arg(long, value_enum, default_value_t = Axis::Y)]
    pub axis: Axis,
    #[arg(long, default_value_t = 64)]
    pub resolution: usize,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
    Z,
}

/// Rendered report and exit code.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub text: String,
    pub code: i32,
}

impl Outcome {
    fn input_error(e: &Error) -> Self {
        Outcome { text: format!("error: {e}\n"), code: EXIT_INPUT }
    }
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("reports are plain data");
    s.push('\n');
    s
}

fn csv_writer() -> csv::Writer<Vec<u8>> {
    csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new())
}

fn csv_finish(w: csv::Writer<Vec<u8>>) -> String {
    String::from_utf8(w.into_inner().expect("in-memory writer")).expect("CSV output is UTF-8")
}

/// Shortest round-trip form, with an exponent for very small or large values.
fn num(v: f64) -> String {
    serde_json::Value::from(v).to_string()
}

fn operator_header(d: usize) -> Vec<String> {
    if d == 2 {
        ["a", "b", "c", "d"].map(String::from).to_vec()
    } else {
        (0..d * d).map(|k| format!("m{}{}", k / d, k % d)).collect()
    }
}

/// `[a, b, c, d]` of a Hermitian qubit operator, or every `(re, im)` entry otherwise.
fn operator_row(h: &HermitianOperator) -> Vec<String> {
    match h.bloch() {
        Ok(b) => [b.a, b.b, b.c, b.d].into_iter().map(num).collect(),
        Err(_) => {
            let d = h.dim();
            (0..d * d).map(|k| h.entry(k / d, k % d)).map(|z| format!("{}{:+}i", z.re, z.im)).collect()
        }
    }
}

pub fn run(cfg: &RunConfig) -> Outcome {
    match &cfg.command {
        Command::Decompose(a) => cmd_decompose(a, cfg.format),
        Command::Simulable(a) => cmd_simulable(a, cfg.format),
        Command::Reproduce(a) => cmd_reproduce(a, cfg.format),
        Command::Rigidity(a) => cmd_rigidity(a, cfg.format),
        Command::CrossSection(a) => cmd_cross_section(a, cfg.format),
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &PathBuf) -> Result<T> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))
}

fn decompose_target(args: &DecomposeArgs) -> Result<Effect> {
    match (&args.bloch, &args.source.catalog, &args.source.input) {
        (Some(v), None, None) => match v.as_slice() {
            &[a, b, c, d] => bloch_to_effect(BlochCoefficients::new(a, b, c, d)),
            _ => Err(Error::InvalidInput(format!("--bloch takes four numbers, got {}", v.len()))),
        },
        (None, Some(name), None) => {
            let m = catalog_entry(name, args.source.p)?;
            if m.n_outcomes() != 2 {
                return Err(Error::InvalidInput(format!("{name} has {} outcomes; decompose needs two", m.n_outcomes())));
            }
            Ok(m.effect(0).clone())
        }
        (None, None, Some(path)) => Effect::new(read_json::<HermitianOperator>(path)?),
        _ => Err(Error::InvalidInput("give exactly one of --bloch, --catalog, --input".into())),
    }
}

pub fn cmd_decompose(args: &DecomposeArgs, format: Format) -> Outcome {
    let result = (|| -> Result<Outcome> {
        let e = decompose_target(args)?;
        let st = staircase(&e)?;
        let dec = simulate_two_outcome(&e)?;
        let verified = verify_decomposition(&d_e(&e), &dec, 1e-10);
        let text = match format {
            Format::Json => to_json(&json!({
                "effect": e.op(),
                "staircase": {
                    "probabilities": st.probabilities,
                    "projectors": st.projectors.iter().map(|p| p.op()).collect::<Vec<_>>(),
                },
                "witness": dec,
                "verified": verified,
            })),
            Format::Csv => {
                let mut w = csv_writer();
                let mut header = vec!["k".to_string(), "probability".to_string()];
                header.extend(operator_header(e.dim()));
                w.write_record(&header).ok();
                for (k, (p, q)) in st.probabilities.iter().zip(&st.projectors).enumerate() {
                    let mut rec = vec![k.to_string(), num(*p)];
                    rec.extend(operator_row(q.op()));
                    w.write_record(&rec).ok();
                }
                csv_finish(w)
            }
        };
        Ok(Outcome { text, code: if verified { EXIT_OK } else { EXIT_NEGATIVE } })
    })();
    result.unwrap_or_else(|e| Outcome::input_error(&e))
}

fn simulable_target(src: &MeasurementSource) -> Result<Measurement> {
    match (&src.catalog, &src.input) {
        (Some(name), None) => catalog_entry(name, src.p),
        (None, Some(path)) => read_json::<Measurement>(path),
        _ => Err(Error::InvalidInput("give exactly one of --catalog, --input".into())),
    }
}

pub fn cmd_simulable(args: &SimulableArgs, format: Format) -> Outcome {
    let result = (|| -> Result<Outcome> {
        let m = simulable_target(&args.source)?;
        let tol = args.tol.unwrap_or_else(membership_tol_from_env);
        let v = membership(&m, tol, args.max_iter)?;
        let code = match v.status {
            VerdictStatus::Simulable => EXIT_OK,
            VerdictStatus::NotSimulable => EXIT_NEGATIVE,
            VerdictStatus::Inconclusive => EXIT_INCONCLUSIVE,
        };
        let text = match format {
            Format::Json => to_json(&v),
            Format::Csv => {
                let mut w = csv_writer();
                w.write_record(["status", "distance", "gap", "iterations", "margin", "witness_parts"]).ok();
                w.write_record([
                    format!("{:?}", v.status),
                    num(v.distance),
                    num(v.gap),
                    v.iterations.to_string(),
                    v.certificate.as_ref().map(|c| num(c.margin)).unwrap_or_default(),
                    v.witness.as_ref().map(|w| w.len().to_string()).unwrap_or_default(),
                ])
                .ok();
                csv_finish(w)
            }
        };
        Ok(Outcome { text, code })
    })();
    result.unwrap_or_else(|e| Outcome::input_error(&e))
}

/// One compared quantity of the reproduction table.
#[derive(Clone, Debug, Serialize)]
pub struct ReproCell {
    pub quantity: String,
    pub value: f64,
    pub expected: f64,
    pub ok: bool,
}

impl ReproCell {
    fn new(quantity: String, value: f64, expected: f64) -> Self {
        ReproCell { quantity, ok: (value - expected).abs() <= REPRODUCE_TOL, value, expected }
    }
}

/// Catalog entry, optionally tilted by `1e-6` rad about `y`.
fn repro_entry(name: &str, perturb: Option<&str>) -> Result<Measurement> {
    let m = catalog_entry(name, 0.5)?;
    if perturb != Some(name) {
        return Ok(m);
    }
    let b = m.effect(0).bloch()?;
    let n = [2.0 * b.b, 2.0 * b.c, 2.0 * b.d];
    let (s, c) = 1e-6f64.sin_cos();
    stern_gerlach([c * n[0] + s * n[2], n[1], -s * n[0] + c * n[2]])
}

/// Values behind `reproduce`: eight table cells, two mixture probabilities and
/// the entrywise deviations of both mixtures from `D_m`.
pub fn reproduce_cells(perturb: Option<&str>) -> Result<Vec<ReproCell>> {
    let g = CounterexampleG;
    let mut cells = Vec::new();
    let mut cat = std::collections::BTreeMap::new();
    for (name, first, second) in G_TABLE {
        let m = repro_entry(name, perturb)?;
        cells.push(ReproCell::new(format!("g({name}, outcome 1)"), g.value(m.effect(0))?, first));
        cells.push(ReproCell::new(format!("g({name}, outcome 2)"), g.value(m.effect(1))?, second));
        cat.insert(name, m);
    }
    let xz = mixture_outcome_probability(&g, &[(0.5, &cat["M_x"]), (0.5, &cat["M_z"])], 0)?;
    cells.push(ReproCell::new("g(½M_x + ½M_z, outcome 1)".into(), xz, G_MIXTURE_XZ));
    let rs = mixture_outcome_probability(&g, &[(p_plus(), &cat["M_r"]), (p_minus(), &cat["M_s"])], 0)?;
    cells.push(ReproCell::new("g(p₊M_r + p₋M_s, outcome 1)".into(), rs, G_MIXTURE_RS));

    let [a, b, c, d] = M_EFFECT_BLOCH;
    let dm = d_e(&bloch_to_effect(BlochCoefficients::new(a, b, c, d))?);
    let mix_xz = mix(&[(0.5, &cat["M_x"]), (0.5, &cat["M_z"])])?;
    let mix_rs = mix(&[(p_plus(), &cat["M_r"]), (p_minus(), &cat["M_s"])])?;
    cells.push(ReproCell::new("max |½M_x + ½M_z - D_m|".into(), mix_xz.max_abs_diff(&dm), 0.0));
    cells.push(ReproCell::new("max |p₊M_r + p₋M_s - D_m|".into(), mix_rs.max_abs_diff(&dm), 0.0));
    Ok(cells)
}

pub fn cmd_reproduce(args: &ReproduceArgs, format: Format) -> Outcome {
    let cells = match reproduce_cells(args.perturb.as_deref()) {
        Ok(c) => c,
        Err(e) => return Outcome::input_error(&e),
    };
    let mismatches: Vec<&str> = cells.iter().filter(|c| !c.ok).map(|c| c.quantity.as_str()).collect();
    let code = if mismatches.is_empty() { EXIT_OK } else { EXIT_NEGATIVE };
    let text = match format {
        Format::Json => to_json(&json!({
            "cells": cells,
            "tolerance": REPRODUCE_TOL,
            "all_match": mismatches.is_empty(),
            "mismatches": mismatches,
        })),
        Format::Csv => {
            let mut w = csv_writer();
            w.write_record(["quantity", "value", "expected", "ok"]).ok();
            for c in &cells {
                w.write_record([c.quantity.clone(), num(c.value), num(c.expected), c.ok.to_string()]).ok();
            }
            csv_finish(w)
        }
    };
    Outcome { text, code }
}

/// Machine-readable result of `rigidity`.
#[derive(Clone, Debug, Serialize)]
pub struct FrameReport {
    pub set: String,
    pub seed: u64,
    pub n_effects: usize,
    pub n_rows: usize,
    pub affine_dim: usize,
    pub rank: usize,
    pub smallest_retained: f64,
    pub largest_discarded: f64,
    /// Fit of the minimum-norm solution.
    pub fit: FitReport,
    /// Rows on which the counterexample frame function does not sum to one.
    pub violations: Vec<usize>,
    /// Fit of the counterexample frame function's values (three-outcome sets only).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub g_fit: Option<FitReport>,
}

#[derive(Clone, Debug, Serialize)]
pub struct FitReport {
    pub rho: HermitianOperator,
    pub residual: f64,
    pub psd: bool,
}

pub fn frame_report(tag: MeasurementSetTag, seed: u64, counts: &[usize]) -> Result<FrameReport> {
    if !matches!(tag, MeasurementSetTag::Pvm | MeasurementSetTag::TwoPom | MeasurementSetTag::ThreePsmPrime) {
        return Err(Error::InvalidInput(format!("rigidity supports pvm, 2pom and 3psmprime, not {tag}")));
    }
    let ms = sample_measurements(tag, seed, counts)?;
    let sys = build_system(&ms)?;
    let space = solve_space(&sys)?;
    // the minimum-norm solution can leave [0, 1], so fit it without a table
    let effects: Vec<&Effect> = sys.registry.entries().iter().collect();
    let fit = fit_values(&effects, &space.particular)?;
    let check = check_frame(&CounterexampleG, &ms, 1e-10)?;
    let g_fit = if tag == MeasurementSetTag::ThreePsmPrime {
        let table = FrameTable::from_function(&sys.registry, &CounterexampleG)?;
        let f = fit_density(&sys.registry, &table)?;
        Some(FitReport { rho: f.rho, residual: f.residual, psd: f.psd })
    } else {
        None
    };
    Ok(FrameReport {
        set: tag.to_string(),
        seed,
        n_effects: sys.n_effects(),
        n_rows: sys.n_rows(),
        affine_dim: space.affine_dim,
        rank: space.rank,
        smallest_retained: space.smallest_retained,
        largest_discarded: space.largest_discarded,
        fit: FitReport { rho: fit.rho, residual: fit.residual, psd: fit.psd },
        violations: check.violations,
        g_fit,
    })
}

pub fn cmd_rigidity(args: &RigidityArgs, format: Format) -> Outcome {
    let report = match args.set.parse::<MeasurementSetTag>().and_then(|t| frame_report(t, args.seed, &args.counts)) {
        Ok(r) => r,
        Err(e) => return Outcome::input_error(&e),
    };
    let text = match format {
        Format::Json => to_json(&report),
        Format::Csv => {
            let mut w = csv_writer();
            w.write_record(["key", "value"]).ok();
            let mut rows = vec![
                ("set", report.set.clone()),
                ("seed", report.seed.to_string()),
                ("n_effects", report.n_effects.to_string()),
                ("n_rows", report.n_rows.to_string()),
                ("affine_dim", report.affine_dim.to_string()),
                ("rank", report.rank.to_string()),
                ("fit_residual", num(report.fit.residual)),
                ("fit_psd", report.fit.psd.to_string()),
                ("violations", report.violations.len().to_string()),
            ];
            if let Some(g) = &report.g_fit {
                rows.push(("g_fit_residual", num(g.residual)));
            }
            for (k, v) in rows {
                w.write_record([k.to_string(), v]).ok();
            }
            csv_finish(w)
        }
    };
    Outcome { text, code: EXIT_OK }
}

/// Boundary points of the slice of the effect space with one Bloch component
/// set to zero: both cone surfaces at several heights, the rank-1 projector
/// circle, and the extremal effects `0` and `1`.
pub fn cross_section_points(axis: Axis, resolution: usize) -> Result<Vec<(&'static str, [f64; 4])>> {
    if resolution < 8 {
        return Err(Error::InvalidInput(format!("resolution must be at least 8, got {resolution}")));
    }
    let embed = |a: f64, u: f64, v: f64| -> [f64; 4] {
        match axis {
            Axis::X => [a, 0.0, u, v],
            Axis::Y => [a, u, 0.0, v],
            Axis::Z => [a, u, v, 0.0],
        }
    };
    let angle = |k: usize| 2.0 * std::f64::consts::PI * k as f64 / resolution as f64;
    let mut pts = vec![("extremal", embed(0.0, 0.0, 0.0)), ("extremal", embed(1.0, 0.0, 0.0))];
    let rings = resolution / 4;
    for level in 1..rings {
        // heights strictly between the apex and the projector circle
        let r = 0.5 * level as f64 / rings as f64;
        for k in 0..resolution {
            let (s, c) = angle(k).sin_cos();
            pts.push(("lower", embed(r, r * c, r * s)));
            pts.push(("upper", embed(1.0 - r, r * c, r * s)));
        }
    }
    for k in 0..resolution {
        let (s, c) = angle(k).sin_cos();
        pts.push(("projector", embed(0.5, 0.5 * c, 0.5 * s)));
    }
    Ok(pts)
}

pub fn cmd_cross_section(args: &CrossSectionArgs, format: Format) -> Outcome {
    let pts = match cross_section_points(args.axis, args.resolution) {
        Ok(p) => p,
        Err(e) => return Outcome::input_error(&e),
    };
    let text = match format {
        Format::Csv => {
            let mut w = csv_writer();
            w.write_record(["kind", "a", "b", "c", "d"]).ok();
            for (kind, p) in &pts {
                let mut rec = vec![kind.to_string()];
                rec.extend(p.iter().copied().map(num));
                w.write_record(rec).ok();
            }
            csv_finish(w)
        }
        Format::Json => {
            let rows: Vec<_> = pts.iter().map(|(k, p)| json!({"kind": k, "bloch": p})).collect();
            to_json(&rows)
        }
    };
    Outcome { text, code: EXIT_OK }
}

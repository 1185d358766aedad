//! Verification checks as run on documents.

use fairtile::assembly::{scale_to_equilateral, strip_deviation};
use fairtile::quadsplit::p0;
use fairtile::strip::{strip_tiling, undistorted_tiling, DeviationSeries};
use fairtile::verify::{self, CheckKind, VerificationReport};
use serde_json::{json, Value};

use crate::document::{Kind, TilingDocument};
use crate::CliError;

pub const CHECK_NAMES: [&str; 9] = [
    "equal-area",
    "equal-perimeter",
    "vertex-to-vertex",
    "incongruent",
    "halfturn-incongruent",
    "convex",
    "closeness",
    "shear-budget",
    "deviation-decay",
];

#[derive(Debug, Clone, Copy)]
pub struct CheckOptions {
    pub quantum: f64,
    /// Tolerance for area and perimeter residuals; defaults by kind.
    pub tol: Option<f64>,
    pub vertex_tol: f64,
    /// Length of the deviation series for `deviation-decay`.
    pub terms: usize,
}

impl Default for CheckOptions {
    fn default() -> Self {
        Self {
            quantum: 1e-9,
            tol: None,
            vertex_tol: 1e-9,
            terms: 100_000,
        }
    }
}

/// Checks run when none are named.
pub fn default_checks(kind: Kind) -> &'static [&'static str] {
    match kind {
        Kind::Strip => &["equal-area", "vertex-to-vertex", "halfturn-incongruent", "deviation-decay"],
        Kind::Plane => &["equal-area", "vertex-to-vertex", "incongruent", "closeness", "shear-budget"],
        Kind::Quad => &["equal-area", "equal-perimeter", "incongruent", "convex"],
    }
}

fn applicable(kind: Kind, name: &str) -> bool {
    match name {
        "equal-area" | "incongruent" => true,
        "equal-perimeter" | "convex" => kind == Kind::Quad,
        "vertex-to-vertex" => true,
        "halfturn-incongruent" | "deviation-decay" => kind != Kind::Quad,
        "closeness" | "shear-budget" => kind == Kind::Plane,
        _ => false,
    }
}

fn area_target(doc: &TilingDocument) -> f64 {
    doc.real_param("area").unwrap_or(match doc.kind {
        Kind::Strip => 1.0,
        Kind::Plane => 3f64.sqrt(),
        Kind::Quad => 3f64.sqrt() / 3.0,
    })
}

fn default_tol(kind: Kind) -> f64 {
    match kind {
        Kind::Quad => 1e-9,
        _ => 1e-10,
    }
}

fn doc_err(e: crate::document::DocumentError) -> CliError {
    CliError::Usage(e.to_string())
}

/// Deviation of the stretched strip from the undistorted one, and the
/// shear drift `Σ 2√3 |μ_n|`, each required below `epsilon`.
fn shear_budget(doc: &TilingDocument) -> Result<VerificationReport, CliError> {
    let eps = doc.real_param("epsilon").map_err(doc_err)?;
    let y0 = doc.real_param("y0").map_err(doc_err)?;
    let cols = doc.real_param("cols").map_err(doc_err)? as usize;
    let shears = doc.reals_param("shears").map_err(doc_err)?;
    let base = scale_to_equilateral(&strip_tiling(y0, cols)?);
    let reference = scale_to_equilateral(&undistorted_tiling::<f64>(cols)?);
    let dev = strip_deviation(&base, &reference);
    let drift: f64 = shears.iter().map(|m| 2.0 * 3f64.sqrt() * m.abs()).sum();
    let part = |name: &str, v: f64| VerificationReport {
        check_name: name.into(),
        kind: CheckKind::Separation,
        passed: v < eps,
        worst_residual: v,
        margin: eps - v,
        offenders: Vec::new(),
        offence_count: 0,
        tiles_checked: 0,
        tolerance_used: eps,
        parts: Vec::new(),
    };
    let parts = vec![part("strip-deviation", dev), part("shear-drift", drift)];
    let mut r = part("shear-budget", dev.max(drift));
    r.passed = parts.iter().all(|p| p.passed);
    r.parts = parts;
    Ok(r)
}

pub fn run_check(doc: &TilingDocument, name: &str, opts: &CheckOptions) -> Result<VerificationReport, CliError> {
    if !CHECK_NAMES.contains(&name) {
        return Err(CliError::Usage(format!(
            "unknown check {name:?}; known checks: {}",
            CHECK_NAMES.join(", ")
        )));
    }
    if !applicable(doc.kind, name) {
        return Err(CliError::Usage(format!("check {name} does not apply to a {} document", doc.kind)));
    }
    let tol = opts.tol.unwrap_or(default_tol(doc.kind));
    if doc.kind == Kind::Quad {
        let q = doc.quadrangles().map_err(doc_err)?;
        return Ok(match name {
            "equal-area" => verify::check_equal_area(&q, Some(area_target(doc)), tol),
            "equal-perimeter" => {
                let target = doc.real_param("perimeter").unwrap_or(2.0 * p0::<f64>());
                verify::check_equal_perimeter(&q, Some(target), tol)
            }
            "vertex-to-vertex" => verify::check_vertex_to_vertex(&q, opts.vertex_tol),
            "incongruent" => verify::check_pairwise_incongruent(&q, opts.quantum),
            _ => verify::check_convexity(&q, 1e-12),
        });
    }
    let t = doc.triangles().map_err(doc_err)?;
    Ok(match name {
        "equal-area" => verify::check_equal_area(&t, Some(area_target(doc)), tol),
        "vertex-to-vertex" => verify::check_vertex_to_vertex(&t, opts.vertex_tol),
        "incongruent" => verify::check_pairwise_incongruent(&t, opts.quantum),
        "halfturn-incongruent" => verify::check_halfturn_incongruent(&t, opts.quantum),
        "closeness" => {
            let eps = doc.real_param("epsilon").map_err(doc_err)?;
            verify::check_closeness(&t, eps)?.report
        }
        "shear-budget" => shear_budget(doc)?,
        _ => {
            let y0 = doc.real_param("y0").map_err(doc_err)?;
            verify::check_deviation_decay(&DeviationSeries::generate(y0, opts.terms)?)
        }
    })
}

pub fn run_checks(doc: &TilingDocument, names: &[String], opts: &CheckOptions) -> Result<Vec<VerificationReport>, CliError> {
    let names: Vec<&str> = if names.is_empty() {
        default_checks(doc.kind).to_vec()
    } else {
        names.iter().map(String::as_str).collect()
    };
    names.iter().map(|n| run_check(doc, n, opts)).collect()
}

fn fmt_line(r: &VerificationReport, depth: usize, out: &mut String) {
    use std::fmt::Write as _;
    let indent = "  ".repeat(depth);
    let status = if r.passed { "PASS" } else { "FAIL" };
    let _ = match r.kind {
        CheckKind::Residual => write!(
            out,
            "{indent}{status} {} worst_residual={:e} tol={:e}",
            r.check_name, r.worst_residual, r.tolerance_used
        ),
        CheckKind::Separation => write!(
            out,
            "{indent}{status} {} margin={:e} tol={:e}",
            r.check_name, r.margin, r.tolerance_used
        ),
    };
    if r.tiles_checked > 0 {
        let _ = write!(out, " tiles={}", r.tiles_checked);
    }
    if r.offence_count > 0 {
        let shown: Vec<String> = r
            .offenders
            .iter()
            .map(|(a, b)| match b {
                Some(b) => format!("{a}/{b}"),
                None => a.to_string(),
            })
            .collect();
        let _ = write!(out, " offenders({})={}", r.offence_count, shown.join(","));
    }
    out.push('\n');
    for p in &r.parts {
        fmt_line(p, depth + 1, out);
    }
}

pub fn format_text(reports: &[VerificationReport]) -> String {
    let mut out = String::new();
    for r in reports {
        fmt_line(r, 0, &mut out);
    }
    out
}

fn finite(v: f64) -> Value {
    if v.is_finite() {
        json!(v)
    } else if v.is_nan() {
        json!("nan")
    } else if v > 0.0 {
        json!("inf")
    } else {
        json!("-inf")
    }
}

pub fn report_json(r: &VerificationReport) -> Value {
    json!({
        "check_name": r.check_name,
        "kind": match r.kind { CheckKind::Residual => "residual", CheckKind::Separation => "separation" },
        "passed": r.passed,
        "worst_residual": finite(r.worst_residual),
        "margin": finite(r.margin),
        "offenders": r.offenders.iter().map(|(a, b)| json!([a.to_string(), b.map(|b| b.to_string())])).collect::<Vec<_>>(),
        "offence_count": r.offence_count,
        "tiles_checked": r.tiles_checked,
        "tolerance_used": finite(r.tolerance_used),
        "parts": r.parts.iter().map(report_json).collect::<Vec<_>>(),
    })
}

pub fn format_json(reports: &[VerificationReport]) -> String {
    let v = json!({
        "passed": reports.iter().all(|r| r.passed),
        "reports": reports.iter().map(report_json).collect::<Vec<_>>(),
    });
    let mut s = serde_json::to_string_pretty(&v).expect("report serializes");
    s.push('\n');
    s
}

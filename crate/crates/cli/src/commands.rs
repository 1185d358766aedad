use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use fairtile::assembly::{build_plane, choose_base, MAX_EPSILON};
use fairtile::quadsplit::{p0, quadify_plane, PLANE_SCALE};
use fairtile::strip::{strip_tiling, undistorted_tiling};
use serde_json::Value;

use crate::checks::{format_json, format_text, run_check, run_checks, CheckOptions};
use crate::document::{real_value, Kind, TilingDocument};
use crate::render::{render_svg, Rect, RenderOptions};
use crate::CliError;

pub const MAX_STRIP_COLS: usize = 100_000;
pub const MAX_PLANE_ROWS: usize = 32;
pub const MAX_PLANE_COLS: usize = 64;

#[derive(Debug, Parser)]
#[command(name = "fairtile", version, about = "Generate, split, verify and render fair tilings")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Strip tiling of unit-area triangles for one apex height.
    GenStrip(GenStripArgs),
    /// Window of a plane tiling by pairwise incongruent triangles of equal area.
    GenPlane(GenPlaneArgs),
    /// Split every triangle of a plane document into three quadrangles.
    Quadify(QuadifyArgs),
    /// Run verification checks on a document.
    Verify(VerifyArgs),
    /// Draw a document as SVG.
    Render(RenderArgs),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Y0 {
    Auto,
    Value(f64),
}

fn parse_y0(s: &str) -> Result<Y0, String> {
    if s == "auto" {
        return Ok(Y0::Auto);
    }
    let v: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if (0.0..1.0).contains(&v) {
        Ok(Y0::Value(v))
    } else {
        Err(format!("y0 = {v} outside [0, 1)"))
    }
}

#[derive(Debug, Args)]
pub struct GenStripArgs {
    /// Apex height in [0, 1), or `auto` to draw one from the seed.
    #[arg(long, value_parser = parse_y0)]
    pub y0: Y0,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Closeness target used with `--y0 auto`.
    #[arg(long, default_value_t = 0.005)]
    pub epsilon: f64,
    /// Columns on each side of the centre.
    #[arg(long, default_value_t = 6)]
    pub cols: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GenPlaneArgs {
    #[arg(long)]
    pub epsilon: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 4)]
    pub rows: usize,
    /// Columns on each side of the centre.
    #[arg(long, default_value_t = 8)]
    pub cols: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct QuadifyArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Check to run; repeatable. Defaults to every check for the document kind.
    #[arg(long = "check")]
    pub checks: Vec<String>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Signature quantum for congruence checks.
    #[arg(long, default_value_t = 1e-9)]
    pub quantum: f64,
    /// Area and perimeter tolerance.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Series length for `deviation-decay`.
    #[arg(long, default_value_t = 100_000)]
    pub terms: usize,
}

#[derive(Debug, Args)]
pub struct RenderArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, default_value_t = 0.02)]
    pub stroke_width: f64,
    /// Visible region `x0,y0,x1,y1`.
    #[arg(long)]
    pub viewbox: Option<Rect>,
    #[arg(long)]
    pub labels: bool,
    /// Pixels per unit.
    #[arg(long, default_value_t = 40.0)]
    pub scale: f64,
}

fn read_doc(path: &Path) -> Result<TilingDocument, CliError> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.into(),
        source,
    })?;
    TilingDocument::parse(&text).map_err(|source| CliError::Document {
        path: path.into(),
        source,
    })
}

fn write_out(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => fs::write(p, text).map_err(|source| CliError::Io { path: p.into(), source }),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|source| CliError::Io { path: "<stdout>".into(), source }),
    }
}

fn usage(cond: bool, msg: impl FnOnce() -> String) -> Result<(), CliError> {
    if cond {
        Ok(())
    } else {
        Err(CliError::Usage(msg()))
    }
}

pub fn gen_strip(a: &GenStripArgs) -> Result<TilingDocument, CliError> {
    usage((1..=MAX_STRIP_COLS).contains(&a.cols), || {
        format!("--cols must lie in 1..={MAX_STRIP_COLS}")
    })?;
    let mut params = serde_json::Map::new();
    let y0 = match a.y0 {
        Y0::Value(v) => v,
        Y0::Auto => {
            usage(a.epsilon > 0.0 && a.epsilon.is_finite(), || "--epsilon must be positive".into())?;
            let c = choose_base(a.epsilon, a.seed, a.cols)?;
            params.insert("seed".into(), a.seed.into());
            params.insert("epsilon".into(), real_value(a.epsilon));
            params.insert("y0_attempts".into(), c.attempts.into());
            params.insert("strip_deviation".into(), real_value(c.max_deviation));
            c.y0
        }
    };
    let t = if y0 == 0.0 {
        undistorted_tiling(a.cols)?
    } else {
        strip_tiling(y0, a.cols)?
    };
    let mut doc = TilingDocument::with_tiles(Kind::Strip, &t.tiles(a.cols)?);
    params.insert("y0".into(), real_value(y0));
    params.insert("cols".into(), a.cols.into());
    params.insert("area".into(), real_value(1.0));
    doc.parameters.extend(params);
    Ok(doc)
}

pub fn gen_plane(a: &GenPlaneArgs) -> Result<TilingDocument, CliError> {
    usage(a.epsilon > 0.0 && a.epsilon <= MAX_EPSILON, || {
        format!("--epsilon must lie in (0, {MAX_EPSILON}]")
    })?;
    usage((1..=MAX_PLANE_ROWS).contains(&a.rows), || {
        format!("--rows must lie in 1..={MAX_PLANE_ROWS}")
    })?;
    usage((1..=MAX_PLANE_COLS).contains(&a.cols), || {
        format!("--cols must lie in 1..={MAX_PLANE_COLS}")
    })?;
    let b = build_plane(a.epsilon, a.seed, a.rows, a.cols)?;
    let rows = b.plane.rows();
    let mut doc = TilingDocument::with_tiles(Kind::Plane, &b.plane.tiles()?);
    let used = rows.clone().map(fairtile::assembly::shear_index).max().unwrap_or(1);
    doc.set("epsilon", real_value(a.epsilon))
        .set("seed", a.seed)
        .set("rows", a.rows)
        .set("cols", a.cols)
        .set("row_range", Value::from(vec![*rows.start(), *rows.end()]))
        .set("y0", real_value(b.choice.y0))
        .set("y0_attempts", b.choice.attempts)
        .set("strip_deviation", real_value(b.choice.max_deviation))
        .set("shears", Value::from(b.plane.shears[..used].iter().map(|&m| real_value(m)).collect::<Vec<_>>()))
        .set("shear_budget", real_value(b.plane.shear_budget()))
        .set("area", real_value(3f64.sqrt()))
        .set("quantum", real_value(1e-9));
    let reports = run_checks(&doc, &[], &CheckOptions::default())?;
    if reports.iter().any(|r| !r.passed) {
        return Err(CliError::ChecksFailed {
            report: format_text(&reports),
            generation: true,
        });
    }
    Ok(doc)
}

pub fn quadify(a: &QuadifyArgs) -> Result<TilingDocument, CliError> {
    let src = read_doc(&a.input)?;
    let tiles = src.triangles().map_err(|source| CliError::Document {
        path: a.input.clone(),
        source,
    })?;
    if src.kind != Kind::Plane {
        return Err(CliError::Usage(format!("{}: expected a plane document", a.input.display())));
    }
    let quads = quadify_plane(&tiles)?;
    let mut doc = TilingDocument::with_tiles(Kind::Quad, &quads);
    doc.parameters = src.parameters.clone();
    let area = src.real_param("area").unwrap_or(3f64.sqrt()) / 3.0;
    doc.set("area", real_value(area))
        .set("perimeter", real_value(p0::<f64>() / PLANE_SCALE))
        .set("split_scale", real_value(PLANE_SCALE));
    let opts = CheckOptions::default();
    let reports = ["equal-area", "equal-perimeter", "incongruent", "convex"]
        .iter()
        .map(|n| run_check(&doc, n, &opts))
        .collect::<Result<Vec<_>, _>>()?;
    if reports.iter().any(|r| !r.passed) {
        return Err(CliError::ChecksFailed {
            report: format_text(&reports),
            generation: true,
        });
    }
    Ok(doc)
}

/// Runs the checks and returns the formatted report and overall result.
pub fn verify(a: &VerifyArgs) -> Result<(String, bool), CliError> {
    let doc = read_doc(&a.input)?;
    usage(a.quantum > 0.0, || "--quantum must be positive".into())?;
    usage(a.terms > 0, || "--terms must be positive".into())?;
    let opts = CheckOptions {
        quantum: a.quantum,
        tol: a.tol,
        terms: a.terms,
        ..CheckOptions::default()
    };
    let reports = run_checks(&doc, &a.checks, &opts)?;
    let passed = reports.iter().all(|r| r.passed);
    let text = match a.format {
        Format::Text => format_text(&reports),
        Format::Json => format_json(&reports),
    };
    Ok((text, passed))
}

pub fn render(a: &RenderArgs) -> Result<String, CliError> {
    usage(a.scale > 0.0 && a.scale.is_finite(), || "--scale must be positive".into())?;
    usage(a.stroke_width >= 0.0, || "--stroke-width must be non-negative".into())?;
    let doc = read_doc(&a.input)?;
    let opts = RenderOptions {
        stroke_width: a.stroke_width,
        viewbox: a.viewbox,
        label_tiles: a.labels,
        scale: a.scale,
    };
    Ok(render_svg(&doc, &opts))
}

pub fn execute(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::GenStrip(a) => write_out(a.out.as_deref(), &gen_strip(a)?.serialize()),
        Command::GenPlane(a) => write_out(a.out.as_deref(), &gen_plane(a)?.serialize()),
        Command::Quadify(a) => write_out(a.out.as_deref(), &quadify(a)?.serialize()),
        Command::Render(a) => write_out(a.out.as_deref(), &render(a)?),
        Command::Verify(a) => {
            let (text, passed) = verify(a)?;
            write_out(None, &text)?;
            if passed {
                Ok(())
            } else {
                Err(CliError::ChecksFailed {
                    report: String::new(),
                    generation: false,
                })
            }
        }
    }
}

#![allow(clippy::type_complexity)]

//! Acceptance suite: one line per criterion, each at its stated tolerance
//! and time limit.

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use fairtile::congruence::{congruence_signature, edge_spread};
use fairtile::quadsplit::{
    fair_split, jacobian_check, p0, reconstruct_triangle, reconstruction_jacobian_check,
    reconstruction_jacobian_closed_form, split_jacobian_closed_form,
};
use fairtile::strip::{strip_tiling, DeviationSeries};
use fairtile::verify::{
    check_closeness, check_convex, check_deviation_decay, check_equal_area, check_equal_perimeter,
    check_pairwise_incongruent, check_strip_identity, check_vertex_to_vertex,
};
use fairtile::{Point, Polygonal, Triangle};
use fairtile_cli::TilingDocument;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn fairtile(args: &[&str]) -> Result<(), String> {
    let o = Command::new(env!("CARGO_BIN_EXE_fairtile"))
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    ensure(o.status.success(), || {
        format!("fairtile {} exited {:?}: {}", args.join(" "), o.status.code(), String::from_utf8_lossy(&o.stderr))
    })
}

fn load(path: &Path) -> Result<TilingDocument, String> {
    let text = std::fs::read_to_string(path).map_err(|e| e.to_string())?;
    TilingDocument::parse(&text).map_err(|e| e.to_string())
}

fn s(path: &Path) -> &str {
    path.to_str().expect("utf-8 temp path")
}

fn critical_closed_forms() -> Outcome {
    let t = strip_tiling(1.0 / 3f64.sqrt(), 100).map_err(|e| e.to_string())?;
    let s3 = 3f64.sqrt();
    let mut worst = 0f64;
    for i in 1..=100 {
        let fi = i as f64;
        worst = worst
            .max((t.x(i) - (2.0 * fi - 0.5)).abs())
            .max(t.y(i).abs())
            .max((t.a(i) - (2.0 * fi + (s3 - 1.0) / 2.0)).abs())
            .max((t.b(i) - (2.0 * fi - (s3 + 1.0) / 2.0)).abs());
    }
    ensure(worst <= 1e-12, || format!("max error {worst:e}"))?;
    Ok(format!("max error {worst:e}"))
}

const ONE_FIFTH: [(f64, f64); 6] = [
    (1.92307692308, -0.169230769231),
    (3.88360118583, 0.112523014511),
    (5.86782183927, -0.0671455252767),
    (7.86284679278, 0.0385390385326),
    (9.86102836451, -0.021837269111),
    (11.8605645724, 0.0123225275777),
];
const UPPER: [f64; 6] = [1.25, 2.96052631579, 5.21410588202, 7.08826451609, 9.16843217775, 11.1256909903];
const LOWER: [f64; 6] = [0.833333333333, 3.24074074074, 5.03845636003, 7.18241348752, 9.1081956929, 11.1528452556];

fn one_fifth_reference() -> Outcome {
    let t = strip_tiling(0.2, 6).map_err(|e| e.to_string())?;
    let mut worst = 0f64;
    for i in 1..=6 {
        let (x, y) = ONE_FIFTH[i - 1];
        worst = worst
            .max((t.x(i) - x).abs())
            .max((t.y(i) - y).abs())
            .max((t.a(i) - UPPER[i - 1]).abs())
            .max((t.b(i) - LOWER[i - 1]).abs());
    }
    ensure(worst <= 1e-9, || format!("max error {worst:e}"))?;
    Ok(format!("max error {worst:e} over 24 coordinates"))
}

fn deviation_decay() -> Outcome {
    let mut margins = Vec::new();
    for y0 in [0.001, 0.005, 0.01] {
        let d = DeviationSeries::generate(y0, 100_000).map_err(|e| e.to_string())?;
        let r = check_deviation_decay(&d);
        for p in &r.parts {
            ensure(p.passed, || format!("{} fails at y0 = {y0} (margin {:e})", p.check_name, p.margin))?;
        }
        margins.push(format!("{y0}: {:.3e}", r.margin));
    }
    Ok(format!("1e5 terms, smallest margins {}", margins.join(", ")))
}

fn areas_and_identity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let (mut area, mut ident) = (0f64, 0f64);
    for _ in 0..10 {
        let y0: f64 = rng.random_range(0.0..0.01);
        let y0 = if y0 == 0.0 { 0.01 } else { y0 };
        let t = strip_tiling(y0, 10_000).map_err(|e| e.to_string())?;
        let tiles = t.tiles(10_000).map_err(|e| e.to_string())?;
        area = area.max(check_equal_area(&tiles, Some(1.0), 1e-10).worst_residual);
        ident = ident.max(check_strip_identity(&t, 1e-10).worst_residual);
    }
    ensure(area <= 1e-10 && ident <= 1e-10, || format!("area {area:e}, identity {ident:e}"))?;
    Ok(format!("area residual {area:e}, identity residual {ident:e}"))
}

fn plane_window(dir: &Path) -> Outcome {
    let out = dir.join("plane.jsonl");
    fairtile(&["gen-plane", "--epsilon", "0.005", "--seed", "42", "--rows", "6", "--cols", "20", "--out", s(&out)])?;
    let doc = load(&out)?;
    let tiles = doc.triangles().map_err(|e| e.to_string())?;
    let eps = 0.005;
    let area = check_equal_area(&tiles, Some(3f64.sqrt()), 1e-10);
    ensure(area.passed, || format!("area residual {:e}", area.worst_residual))?;
    let v = check_vertex_to_vertex(&tiles, 1e-9);
    ensure(v.passed, || format!("vertex-to-vertex offenders {:?}", v.offenders))?;
    let inc = check_pairwise_incongruent(&tiles, 1e-9);
    ensure(inc.passed && inc.margin > 0.0, || format!("incongruence margin {:e}", inc.margin))?;
    let spread = tiles.iter().map(|(_, t)| edge_spread(t)).fold(f64::INFINITY, f64::min);
    ensure(spread > 1e-9, || format!("near-equilateral tile, spread {spread:e}"))?;
    let c = check_closeness(&tiles, eps).map_err(|e| e.to_string())?;
    ensure(c.max_coord_deviation < 2.0 * eps, || format!("deviation {:e}", c.max_coord_deviation))?;
    let drift: f64 = doc
        .reals_param("shears")
        .map_err(|e| e.to_string())?
        .iter()
        .map(|m| 2.0 * 3f64.sqrt() * m.abs())
        .sum();
    ensure(drift < eps, || format!("shear drift {drift:e}"))?;
    Ok(format!(
        "{} tiles, incongruence margin {:.3e}, min edge spread {:.3e}, deviation {:.3e}, shear drift {:.3e}",
        tiles.len(),
        inc.margin,
        spread,
        c.max_coord_deviation,
        drift
    ))
}

fn jacobians() -> Outcome {
    let a = jacobian_check(1e-6);
    let b = reconstruction_jacobian_check(1e-6);
    let (ea, eb) = (
        (a - split_jacobian_closed_form::<f64>()).abs(),
        (b - reconstruction_jacobian_closed_form::<f64>()).abs(),
    );
    ensure(ea <= 1e-6 && eb <= 1e-6, || format!("split {a} (error {ea:e}), reconstruction {b} (error {eb:e})"))?;
    Ok(format!("split {a:.7} (error {ea:.1e}), reconstruction {b:.7} (error {eb:.1e})"))
}

fn from_sides(a: f64, b: f64, c: f64, theta: f64, shift: Point) -> Triangle {
    let x = (a * a + b * b - c * c) / (2.0 * a);
    let (sn, cs) = theta.sin_cos();
    let r = |p: Point| Point::new(cs * p.x - sn * p.y, sn * p.x + cs * p.y) + shift;
    Triangle::new(r(Point::new(0.0, 0.0)), r(Point::new(a, 0.0)), r(Point::new(x, (b * b - x * x).sqrt())))
        .expect("valid sides")
}

fn random_triangles() -> Vec<Triangle> {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    (0..1000)
        .map(|_| {
            let mut side = || rng.random_range(0.99..1.01);
            let (a, b, c) = (side(), side(), side());
            let th = rng.random_range(0.0..std::f64::consts::TAU);
            let shift = Point::new(rng.random_range(-10.0..10.0), rng.random_range(-10.0..10.0));
            from_sides(a, b, c, th, shift)
        })
        .collect()
}

fn fair_splits() -> Outcome {
    let mut iters = 0;
    let (mut per, mut area) = (0f64, 0f64);
    let mut distinct = 0;
    for t in random_triangles() {
        let sp = fair_split(&t).map_err(|e| e.to_string())?;
        iters = iters.max(sp.solved.iterations);
        for q in &sp.quads {
            per = per.max((q.perimeter() - p0::<f64>()).abs());
            area = area.max((q.area() - t.area() / 3.0).abs());
            ensure(check_convex(q), || "non-convex quadrangle".into())?;
        }
        if edge_spread(&t) >= 1e-4 {
            let sig: Vec<_> = sp.quads.iter().map(|q| congruence_signature(q, 1e-9).quantized).collect();
            ensure(sig[0] != sig[1] && sig[1] != sig[2] && sig[0] != sig[2], || "coinciding signatures".into())?;
            distinct += 1;
        }
    }
    ensure(iters <= 12 && per <= 1e-10 && area <= 1e-10, || {
        format!("iterations {iters}, perimeter {per:e}, area {area:e}")
    })?;
    let eq = fair_split(&from_sides(1.0, 1.0, 1.0, 0.3, Point::new(1.0, 2.0))).map_err(|e| e.to_string())?;
    let sig: Vec<_> = eq.quads.iter().map(|q| congruence_signature(q, 1e-9).quantized).collect();
    ensure(sig[0] == sig[1] && sig[1] == sig[2], || "equilateral split not congruent".into())?;
    Ok(format!(
        "1000 triangles, max {iters} iterations, perimeter {per:.1e}, area {area:.1e}, {distinct} distinct triples"
    ))
}

fn round_trip() -> Outcome {
    let mut worst = 0f64;
    for t in random_triangles() {
        let mut want = t.edge_lengths();
        want.sort_by(f64::total_cmp);
        let sp = fair_split(&t).map_err(|e| e.to_string())?;
        for q in &sp.quads {
            let (r, _) = reconstruct_triangle(q).map_err(|e| e.to_string())?;
            let mut got = r.edge_lengths();
            got.sort_by(f64::total_cmp);
            for k in 0..3 {
                worst = worst.max((got[k] - want[k]).abs());
            }
        }
    }
    ensure(worst <= 1e-8, || format!("max edge error {worst:e}"))?;
    Ok(format!("3000 reconstructions, max edge error {worst:.1e}"))
}

fn quadified_window(dir: &Path) -> Outcome {
    let plane = dir.join("plane.jsonl");
    if !plane.exists() {
        fairtile(&["gen-plane", "--epsilon", "0.005", "--seed", "42", "--rows", "6", "--cols", "20", "--out", s(&plane)])?;
    }
    let out = dir.join("quad.jsonl");
    fairtile(&["quadify", "--in", s(&plane), "--out", s(&out)])?;
    let n_tri = load(&plane)?.tiles.len();
    let doc = load(&out)?;
    let q = doc.quadrangles().map_err(|e| e.to_string())?;
    ensure(q.len() == 3 * n_tri, || format!("{} quadrangles from {n_tri} triangles", q.len()))?;
    let a = check_equal_area(&q, None, 1e-9);
    let p = check_equal_perimeter(&q, None, 1e-9);
    ensure(a.passed && p.passed, || format!("area {:e}, perimeter {:e}", a.worst_residual, p.worst_residual))?;
    ensure(q.iter().all(|(_, x)| check_convex(x)), || "non-convex quadrangle".into())?;
    let inc = check_pairwise_incongruent(&q, 1e-9);
    ensure(inc.passed && inc.margin > 0.0, || format!("incongruence margin {:e}", inc.margin))?;
    let svg = dir.join("quad.svg");
    fairtile(&["render", "--in", s(&out), "--out", s(&svg)])?;
    let paths = std::fs::read_to_string(&svg).map_err(|e| e.to_string())?.matches("<path ").count();
    ensure(paths == q.len(), || format!("{paths} paths for {} tiles", q.len()))?;
    Ok(format!(
        "{n_tri} triangles -> {} quadrangles, area {:.1e}, perimeter {:.1e}, incongruence margin {:.3e}; pattern of {} not inspected automatically",
        q.len(),
        a.worst_residual,
        p.worst_residual,
        inc.margin,
        svg.file_name().unwrap().to_string_lossy()
    ))
}

fn determinism(dir: &Path) -> Outcome {
    let mut bytes = Vec::new();
    for k in 0..2 {
        let plane = dir.join(format!("det-plane-{k}.jsonl"));
        let quad = dir.join(format!("det-quad-{k}.jsonl"));
        fairtile(&["gen-plane", "--epsilon", "0.005", "--seed", "42", "--rows", "6", "--cols", "20", "--out", s(&plane)])?;
        fairtile(&["quadify", "--in", s(&plane), "--out", s(&quad)])?;
        let read = |p: &Path| std::fs::read(p).map_err(|e| e.to_string());
        bytes.push((read(&plane)?, read(&quad)?));
    }
    ensure(bytes[0].0 == bytes[1].0, || "plane documents differ".into())?;
    ensure(bytes[0].1 == bytes[1].1, || "quad documents differ".into())?;
    Ok(format!("plane {} bytes, quad {} bytes, identical", bytes[0].0.len(), bytes[0].1.len()))
}

fn main() {
    let dir = tempfile::tempdir().expect("temporary directory");
    let d = dir.path();
    let criteria: Vec<(&str, u64, Box<dyn Fn() -> Outcome>)> = vec![
        ("critical strip closed forms", 1, Box::new(critical_closed_forms)),
        ("strip at y0 = 0.2 reference coordinates", 1, Box::new(one_fifth_reference)),
        ("deviation decay estimates", 5, Box::new(deviation_decay)),
        ("unit areas and denominator identity", 10, Box::new(areas_and_identity)),
        ("plane window properties", 60, Box::new(|| plane_window(d))),
        ("Jacobian determinants", 1, Box::new(jacobians)),
        ("fair split of near-equilateral triangles", 30, Box::new(fair_splits)),
        ("reconstruction round trip", 60, Box::new(round_trip)),
        ("quadrangle window properties", 120, Box::new(|| quadified_window(d))),
        ("determinism", 240, Box::new(|| determinism(d))),
    ];
    let mut failed = 0;
    for (k, (name, limit, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = f();
        let took = start.elapsed();
        let limit = Duration::from_secs(*limit);
        let (ok, detail) = match result {
            Ok(d) if took <= limit => (true, d),
            Ok(d) => (false, format!("{d}; over the time limit")),
            Err(e) => (false, e),
        };
        if !ok {
            failed += 1;
        }
        println!(
            "{} {:>2} {name} [{:.2} s / {} s] {detail}",
            if ok { "PASS" } else { "FAIL" },
            k + 1,
            took.as_secs_f64(),
            limit.as_secs()
        );
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}

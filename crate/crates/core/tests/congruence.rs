use fairtile::congruence::{
    bad_shear_set, congruence_signature, congruent, halfturn_translate_congruent, ShearRootSet,
};
use fairtile::{Point, Polygon, Polygonal, Triangle};
use proptest::prelude::*;

/// Convex polygon with vertices at the given angles on an ellipse-like curve.
fn convex(angles: &[f64], rx: f64, ry: f64) -> Option<Polygon> {
    let mut a = angles.to_vec();
    a.sort_by(|x, y| x.partial_cmp(y).unwrap());
    if a.windows(2).any(|w| w[1] - w[0] < 0.05) || a[0] + std::f64::consts::TAU - a[a.len() - 1] < 0.05 {
        return None;
    }
    Polygon::new(a.iter().map(|t| Point::new(rx * t.cos(), ry * t.sin())).collect()).ok()
}

fn isometry(theta: f64, reflect: bool, dx: f64, dy: f64) -> impl Fn(Point) -> Point {
    let (s, c) = theta.sin_cos();
    move |p: Point| {
        let p = if reflect { Point::new(-p.x, p.y) } else { p };
        Point::new(c * p.x - s * p.y + dx, s * p.x + c * p.y + dy)
    }
}

fn triangle() -> impl Strategy<Value = Triangle> {
    (prop::array::uniform6(-2.0f64..2.0)).prop_filter_map("degenerate", |v| {
        let t = Triangle::new(Point::new(v[0], v[1]), Point::new(v[2], v[3]), Point::new(v[4], v[5])).ok()?;
        (t.area() > 0.05 && t.edge_lengths().iter().all(|&l| l > 0.1)).then_some(t)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    // rounding in a random isometry moves raw values by ~1e-15; at quantum
    // 1e-6 a bucket boundary is hit with probability ~1e-8 per polygon
    #[test]
    fn signature_invariant_under_isometries(
        angles in prop::collection::vec(0.0f64..std::f64::consts::TAU, 3..7),
        rx in 0.5f64..3.0, ry in 0.5f64..3.0,
        theta in 0.0f64..std::f64::consts::TAU, reflect: bool,
        dx in -100.0f64..100.0, dy in -100.0f64..100.0,
    ) {
        if let Some(p) = convex(&angles, rx, ry) {
            let q = p.map(isometry(theta, reflect, dx, dy));
            prop_assert_eq!(
                congruence_signature(&p, 1e-6).quantized,
                congruence_signature(&q, 1e-6).quantized
            );
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2_000))]

    // quarter turns, axis reflections and dyadic translations are exact
    #[test]
    fn signature_exact_under_exact_isometries(
        angles in prop::collection::vec(0.0f64..std::f64::consts::TAU, 3..7),
        rx in 0.5f64..3.0, ry in 0.5f64..3.0,
        quarter in 0u8..4, reflect: bool, dx in -64i32..64, dy in -64i32..64,
    ) {
        if let Some(p) = convex(&angles, rx, ry) {
            let (dx, dy) = (dx as f64 / 8.0, dy as f64 / 8.0);
            let q = p.map(|v| {
                let v = if reflect { Point::new(v.x, -v.y) } else { v };
                let v = (0..quarter).fold(v, |w, _| Point::new(-w.y, w.x));
                Point::new(v.x + dx, v.y + dy)
            });
            prop_assert_eq!(
                congruence_signature(&p, 1e-9).quantized,
                congruence_signature(&q, 1e-9).quantized
            );
        }
    }

    #[test]
    fn congruence_bounds_perimeter_and_area(
        angles in prop::collection::vec(0.0f64..std::f64::consts::TAU, 3..6),
        rx in 0.5f64..2.0, ry in 0.5f64..2.0,
        jitter in prop::collection::vec(-1e-7f64..1e-7, 12),
        theta in 0.0f64..6.3, reflect: bool,
    ) {
        if let Some(p) = convex(&angles, rx, ry) {
            let n = p.vertices().len();
            let moved: Vec<Point> = p
                .vertices()
                .iter()
                .enumerate()
                .map(|(k, v)| Point::new(v.x + jitter[2 * k], v.y + jitter[2 * k + 1]))
                .collect();
            let q = Polygon::new(moved).unwrap().map(isometry(theta, reflect, 1.0, -2.0));
            let tol = 1e-6;
            if congruent(&p, &q, tol) {
                prop_assert!((p.perimeter() - q.perimeter()).abs() <= 4.0 * tol * n as f64);
                let diam = 2.0 * rx.max(ry);
                prop_assert!((p.area() - q.area()).abs() <= 4.0 * tol * n as f64 * diam);
            }
        }
    }

    #[test]
    fn avoiding_bad_shears_prevents_congruence(t in triangle(), u in triangle(), mu in -2.0f64..2.0) {
        let set: ShearRootSet<f64> = match bad_shear_set(&t, &u) {
            Ok(s) => s,
            Err(_) => return Ok(()),
        };
        prop_assume!(set.clearance(mu) >= 1e-6);
        prop_assert!(!congruent(&t.sheared(mu), &u.sheared(mu), 1e-9));
        prop_assert!(!congruent(&t.sheared(mu), &u, 1e-9));
    }

    #[test]
    fn halfturn_relation_is_symmetric_and_reflexive(t in triangle(), u in triangle(), flip: bool) {
        prop_assert!(halfturn_translate_congruent(&t, &t, 1e-12));
        let v = if flip { t.map(|p| Point::new(3.0 - p.x, 1.0 - p.y)) } else { u };
        prop_assert_eq!(
            halfturn_translate_congruent(&t, &v, 1e-9),
            halfturn_translate_congruent(&v, &t, 1e-9)
        );
        if flip {
            prop_assert!(halfturn_translate_congruent(&t, &v, 1e-9));
        }
    }
}

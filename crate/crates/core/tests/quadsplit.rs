use fairtile::congruence::{congruence_signature, congruence_distance};
use fairtile::quadsplit::{
    fair_split, p0, quad_vertices, reconstruct_triangle, FairConstants, FairSplitParams,
};
use fairtile::verify::check_convex;
use fairtile::{Point, Polygonal, Triangle};
use proptest::prelude::*;

/// Triangle with the given side lengths, `|AB| = a`, `|AC| = b`, `|BC| = c`.
fn from_sides(a: f64, b: f64, c: f64) -> Triangle {
    let x = (a * a + b * b - c * c) / (2.0 * a);
    Triangle::new(Point::new(0.0, 0.0), Point::new(a, 0.0), Point::new(x, (b * b - x * x).sqrt())).unwrap()
}

fn sorted_edges(t: &impl Polygonal<f64>) -> Vec<f64> {
    let mut l = t.edge_lengths();
    l.sort_by(|x, y| x.partial_cmp(y).unwrap());
    l
}

fn near_equilateral() -> impl Strategy<Value = Triangle> {
    (0.99f64..1.01, 0.99f64..1.01, 0.99f64..1.01, 0.0f64..6.3, any::<bool>(), -5.0f64..5.0, -5.0f64..5.0)
        .prop_map(|(a, b, c, th, refl, dx, dy)| {
            let (s, co) = th.sin_cos();
            from_sides(a, b, c).map(|p| {
                let p = if refl { Point::new(p.x, -p.y) } else { p };
                Point::new(co * p.x - s * p.y + dx, s * p.x + co * p.y + dy)
            })
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn equal_areas_for_any_parameters_near_the_undistorted_point(
        da in -0.05f64..0.05, db in -0.05f64..0.05, dg in -0.05f64..0.05,
        a in 0.98f64..1.02, b in 0.98f64..1.02, c in 0.98f64..1.02,
    ) {
        let k = FairConstants::<f64>::new();
        let p = FairSplitParams::from_abg(k.alpha0 + da, k.beta0 + db, k.gamma0 + dg).unwrap();
        let qs = quad_vertices(a, b, c, &p).unwrap();
        let areas: Vec<f64> = qs.iter().map(|q| q.area()).collect();
        prop_assert!((areas[0] - areas[1]).abs() <= 1e-10);
        prop_assert!((areas[0] - areas[2]).abs() <= 1e-10);
    }

    #[test]
    fn split_properties(t in near_equilateral()) {
        let s = fair_split(&t).unwrap();
        prop_assert!(s.solved.iterations <= 12);
        let total: f64 = s.quads.iter().map(|q| q.area()).sum();
        prop_assert!((total - t.area()).abs() <= 1e-10);
        for q in &s.quads {
            prop_assert!((q.perimeter() - p0::<f64>()).abs() <= 1e-10);
            prop_assert!((q.area() - t.area() / 3.0).abs() <= 1e-10);
            prop_assert!(check_convex(q));
        }
        // the interior vertex is shared bit for bit
        let m = s.quads[0].points()
            .into_iter()
            .find(|v| s.quads[1].points().contains(v) && s.quads[2].points().contains(v));
        prop_assert!(m.is_some());
    }

    #[test]
    fn round_trip_recovers_edges(t in near_equilateral()) {
        let s = fair_split(&t).unwrap();
        let want = sorted_edges(&t);
        for q in &s.quads {
            let (r, _) = reconstruct_triangle(q).unwrap();
            let got = sorted_edges(&r);
            for k in 0..3 {
                prop_assert!((got[k] - want[k]).abs() <= 1e-8, "{:?} vs {:?}", got, want);
            }
        }
    }

    #[test]
    fn split_commutes_with_isometries(
        a in 0.99f64..1.01, b in 0.99f64..1.01, c in 0.99f64..1.01,
        th in 0.0f64..6.3, refl: bool, dx in -3.0f64..3.0,
    ) {
        let t = from_sides(a, b, c);
        let (s, co) = th.sin_cos();
        let g = |p: Point| {
            let p = if refl { Point::new(p.x, -p.y) } else { p };
            Point::new(co * p.x - s * p.y + dx, s * p.x + co * p.y)
        };
        let direct = fair_split(&t.map(g)).unwrap();
        let moved = fair_split(&t).unwrap();
        for (q, r) in direct.quads.iter().zip(&moved.quads) {
            let r = r.map(g);
            let mut u: Vec<(f64, f64)> = q.points().iter().map(|p| (p.x, p.y)).collect();
            let mut v: Vec<(f64, f64)> = r.points().iter().map(|p| (p.x, p.y)).collect();
            u.sort_by(|x, y| x.partial_cmp(y).unwrap());
            v.sort_by(|x, y| x.partial_cmp(y).unwrap());
            for (p, w) in u.iter().zip(&v) {
                prop_assert!((p.0 - w.0).abs() <= 1e-9 && (p.1 - w.1).abs() <= 1e-9);
            }
        }
    }

    #[test]
    fn unequal_edges_give_distinct_quads(
        a in 0.99f64..1.01, b in 0.99f64..1.01, c in 0.99f64..1.01,
    ) {
        let t = from_sides(a, b, c);
        let l = sorted_edges(&t);
        prop_assume!(l[2] - l[0] >= 1e-4);
        let s = fair_split(&t).unwrap();
        let sig: Vec<_> = s.quads.iter().map(|q| congruence_signature(q, 1e-9).quantized).collect();
        prop_assert!(sig[0] != sig[1] && sig[1] != sig[2] && sig[0] != sig[2]);
        for (i, j) in [(0, 1), (1, 2), (0, 2)] {
            prop_assert!(congruence_distance(&s.quads[i], &s.quads[j]) > 0.0);
        }
    }
}

#[test]
fn equilateral_gives_congruent_quads() {
    let s = fair_split(&from_sides(1.0, 1.0, 1.0)).unwrap();
    let sig: Vec<_> = s.quads.iter().map(|q| congruence_signature(q, 1e-9).quantized).collect();
    assert_eq!(sig[0], sig[1]);
    assert_eq!(sig[1], sig[2]);
}

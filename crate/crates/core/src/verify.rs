//! Numerical checks of the properties a tiling window is meant to have.
//!
//! Every check returns a [`VerificationReport`]. Residual checks pass when
//! the worst residual is within tolerance; separation checks pass when the
//! reported margin is positive.

use std::collections::HashMap;

use rayon::prelude::*;

use crate::congruence::{congruence_signature, edge_spread, Shape};
use crate::geom::{convexity_margin, Point, Polygonal, TileId, TileKey, Triangle};
use crate::scalar::{lit, sqrt3, Real};
use crate::strip::{undistorted_tiling, DeviationSeries, StripTiling};

/// Offender lists are cut off after this many entries.
pub const MAX_OFFENDERS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckKind {
    /// Passes iff `worst_residual <= tolerance_used`.
    Residual,
    /// Passes iff `margin > 0`.
    Separation,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerificationReport {
    pub check_name: String,
    pub kind: CheckKind,
    pub passed: bool,
    pub worst_residual: f64,
    pub margin: f64,
    /// Offending tiles, or pairs of tiles, in a deterministic order.
    pub offenders: Vec<(TileKey, Option<TileKey>)>,
    /// Total number of offences, of which at most [`MAX_OFFENDERS`] are listed.
    pub offence_count: usize,
    pub tiles_checked: usize,
    pub tolerance_used: f64,
    /// Sub-checks, for checks made of several parts.
    pub parts: Vec<VerificationReport>,
}

impl VerificationReport {
    fn residual(name: &str, worst: f64, tol: f64, tiles: usize) -> Self {
        Self {
            check_name: name.into(),
            kind: CheckKind::Residual,
            passed: worst <= tol,
            worst_residual: worst,
            margin: tol - worst,
            offenders: Vec::new(),
            offence_count: 0,
            tiles_checked: tiles,
            tolerance_used: tol,
            parts: Vec::new(),
        }
    }

    fn separation(name: &str, margin: f64, tol: f64, tiles: usize) -> Self {
        Self {
            check_name: name.into(),
            kind: CheckKind::Separation,
            passed: margin > 0.0,
            worst_residual: 0.0,
            margin,
            offenders: Vec::new(),
            offence_count: 0,
            tiles_checked: tiles,
            tolerance_used: tol,
            parts: Vec::new(),
        }
    }

    fn with_offenders(mut self, mut offenders: Vec<(TileKey, Option<TileKey>)>) -> Self {
        offenders.sort();
        self.offence_count = offenders.len();
        offenders.truncate(MAX_OFFENDERS);
        self.passed &= self.offence_count == 0;
        self.offenders = offenders;
        self
    }
}

fn f<T: Real>(v: T) -> f64 {
    v.to_f64().unwrap_or(f64::NAN)
}

fn value_check<T, K, P>(
    name: &str,
    tiles: &[(K, P)],
    value: impl Fn(&P) -> T + Sync,
    target: Option<T>,
    tol: T,
) -> VerificationReport
where
    T: Real,
    K: Copy + Into<TileKey> + Sync,
    P: Polygonal<T> + Sync,
{
    let values: Vec<T> = tiles.par_iter().map(|(_, p)| value(p)).collect();
    let target = target.unwrap_or_else(|| {
        if values.is_empty() {
            T::zero()
        } else {
            values.iter().copied().sum::<T>() / lit(values.len() as f64)
        }
    });
    let mut worst = T::zero();
    let mut offenders = Vec::new();
    for ((k, _), v) in tiles.iter().zip(&values) {
        let r = (*v - target).abs();
        if !(r <= tol) {
            offenders.push(((*k).into(), None));
        }
        worst = if r.is_nan() { r } else { worst.max(r) };
    }
    VerificationReport::residual(name, f(worst), f(tol), tiles.len()).with_offenders(offenders)
}

/// Every tile has area `target` (or, without a target, the mean area).
pub fn check_equal_area<T, K, P>(tiles: &[(K, P)], target: Option<T>, tol: T) -> VerificationReport
where
    T: Real,
    K: Copy + Into<TileKey> + Sync,
    P: Polygonal<T> + Sync,
{
    value_check("equal-area", tiles, |p| p.area(), target, tol)
}

/// Every tile has perimeter `target` (or, without a target, the mean perimeter).
pub fn check_equal_perimeter<T, K, P>(tiles: &[(K, P)], target: Option<T>, tol: T) -> VerificationReport
where
    T: Real,
    K: Copy + Into<TileKey> + Sync,
    P: Polygonal<T> + Sync,
{
    value_check("equal-perimeter", tiles, |p| p.perimeter(), target, tol)
}

pub fn check_convex<T: Real, P: Polygonal<T> + ?Sized>(q: &P) -> bool {
    convexity_margin(q.vertices()) > lit(1e-12)
}

/// Every tile is strictly convex; the margin is the smallest turning sine.
pub fn check_convexity<T, K, P>(tiles: &[(K, P)], tol: T) -> VerificationReport
where
    T: Real,
    K: Copy + Into<TileKey> + Sync,
    P: Polygonal<T> + Sync,
{
    let margins: Vec<T> = tiles.par_iter().map(|(_, p)| convexity_margin(p.vertices())).collect();
    let offenders = tiles
        .iter()
        .zip(&margins)
        .filter(|(_, m)| !(**m > tol))
        .map(|((k, _), _)| ((*k).into(), None))
        .collect();
    let m = margins.iter().copied().fold(T::infinity(), T::min);
    VerificationReport::separation("convex", f(m - tol), f(tol), tiles.len()).with_offenders(offenders)
}

/// Pairs of tiles whose signatures coincide at `quantum`, found by hashing.
pub fn congruent_pairs_bucketed<T, P>(tiles: &[P], quantum: T) -> Vec<(usize, usize)>
where
    T: Real,
    P: Polygonal<T> + Sync,
{
    let sigs: Vec<_> = tiles.par_iter().map(|p| congruence_signature(p, quantum)).collect();
    let mut buckets: HashMap<&[(i64, i64)], Vec<usize>> = HashMap::new();
    for (i, s) in sigs.iter().enumerate() {
        buckets.entry(&s.quantized).or_default().push(i);
    }
    let mut pairs = Vec::new();
    for members in buckets.values() {
        for (a, &i) in members.iter().enumerate() {
            for &j in &members[a + 1..] {
                pairs.push((i.min(j), i.max(j)));
            }
        }
    }
    pairs.sort_unstable();
    pairs
}

/// Same as [`congruent_pairs_bucketed`], comparing every pair.
pub fn congruent_pairs_all_pairs<T, P>(tiles: &[P], quantum: T) -> Vec<(usize, usize)>
where
    T: Real,
    P: Polygonal<T> + Sync,
{
    let sigs: Vec<_> = tiles.par_iter().map(|p| congruence_signature(p, quantum)).collect();
    let mut pairs = Vec::new();
    for i in 0..sigs.len() {
        for j in i + 1..sigs.len() {
            if sigs[i].quantized == sigs[j].quantized {
                pairs.push((i, j));
            }
        }
    }
    pairs
}

/// Smallest congruence distance over all pairs, with the pair attaining it.
pub fn min_pair_distance<T: Real, P: Polygonal<T> + Sync>(tiles: &[P]) -> (T, Option<(usize, usize)>) {
    let shapes: Vec<Shape<T>> = tiles.par_iter().map(|p| Shape::new(p)).collect();
    (0..shapes.len())
        .into_par_iter()
        .map(|i| {
            let mut best = (T::infinity(), None);
            for j in i + 1..shapes.len() {
                let d = shapes[i].distance(&shapes[j]);
                if d < best.0 {
                    best = (d, Some((i, j)));
                }
            }
            best
        })
        .reduce(
            || (T::infinity(), None),
            |a, b| match (a.1, b.1) {
                (_, None) => a,
                (None, _) => b,
                (Some(pa), Some(pb)) => {
                    if b.0 < a.0 || (b.0 == a.0 && pb < pa) {
                        b
                    } else {
                        a
                    }
                }
            },
        )
}

/// No two tiles share a quantized signature and no triangle is
/// equilateral at `quantum`. The margin is the smallest raw congruence
/// distance between two tiles.
pub fn check_pairwise_incongruent<T, K, P>(tiles: &[(K, P)], quantum: T) -> VerificationReport
where
    T: Real,
    K: Copy + Into<TileKey> + Sync,
    P: Polygonal<T> + Sync,
{
    let polys: Vec<&P> = tiles.iter().map(|(_, p)| p).collect();
    let key = |i: usize| -> TileKey { tiles[i].0.into() };
    let mut offenders: Vec<_> = congruent_pairs_bucketed(&polys, quantum)
        .into_iter()
        .map(|(i, j)| (key(i), Some(key(j))))
        .collect();
    offenders.extend(
        tiles
            .iter()
            .filter(|(_, p)| p.vertices().len() == 3 && edge_spread(p) <= quantum)
            .map(|(k, _)| ((*k).into(), None)),
    );
    let (margin, _) = min_pair_distance(&polys);
    let margin = if tiles.len() < 2 { f64::INFINITY } else { f(margin) };
    VerificationReport::separation("incongruent", margin, f(quantum), tiles.len()).with_offenders(offenders)
}

/// No two triangles are translates of each other or of each other's
/// half-turn, at tolerance `tol`. The margin is the smallest edge-vector
/// distance between two tiles.
pub fn check_halfturn_incongruent<T, K>(tiles: &[(K, Triangle<T>)], tol: T) -> VerificationReport
where
    T: Real,
    K: Copy + Into<TileKey> + Sync,
{
    let rows: Vec<(T, Vec<(usize, usize)>)> = (0..tiles.len())
        .into_par_iter()
        .map(|i| {
            let mut m = T::infinity();
            let mut bad = Vec::new();
            for j in i + 1..tiles.len() {
                let d = crate::congruence::halfturn_translate_distance(&tiles[i].1, &tiles[j].1);
                m = m.min(d);
                if d <= tol {
                    bad.push((i, j));
                }
            }
            (m, bad)
        })
        .collect();
    let margin = rows.iter().map(|r| r.0).fold(T::infinity(), T::min);
    let offenders = rows
        .into_iter()
        .flat_map(|r| r.1)
        .map(|(i, j)| (tiles[i].0.into(), Some(tiles[j].0.into())))
        .collect();
    VerificationReport::separation("halfturn-incongruent", f(margin - tol), f(tol), tiles.len())
        .with_offenders(offenders)
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&mut self, mut i: usize) -> usize {
        while self.0[i] != i {
            self.0[i] = self.0[self.0[i]];
            i = self.0[i];
        }
        i
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }
}

fn segment_distance<T: Real>(p: Point<T>, a: Point<T>, b: Point<T>) -> T {
    let ab = b - a;
    let t = ((p - a).dot(ab) / ab.norm_sq()).max(T::zero()).min(T::one());
    (p - (a + ab * t)).norm()
}

/// Largest overlap of the projections of `a` and `b` onto the normals of
/// the edges of both; non-positive (up to tolerance) iff the convex
/// polygons have disjoint interiors.
fn min_axis_overlap<T: Real>(a: &[Point<T>], b: &[Point<T>]) -> T {
    let mut best = T::infinity();
    for poly in [a, b] {
        let n = poly.len();
        for k in 0..n {
            let e = poly[(k + 1) % n] - poly[k];
            let axis = Point::new(-e.y, e.x) * (T::one() / e.norm());
            let span = |v: &[Point<T>]| {
                v.iter().fold((T::infinity(), T::neg_infinity()), |(lo, hi), p| {
                    let d = p.dot(axis);
                    (lo.min(d), hi.max(d))
                })
            };
            let (alo, ahi) = span(a);
            let (blo, bhi) = span(b);
            best = best.min(ahi.min(bhi) - alo.max(blo));
        }
    }
    best
}

/// Any two tiles meet in a full common edge, a common vertex, or not at
/// all. Vertices closer than `tol` are treated as one for the
/// classification only. Tiles must be convex.
///
/// The residual is the largest distance between vertices treated as one;
/// the margin is the smallest distance from a vertex to an edge of a
/// neighbouring tile it is not an endpoint of.
pub fn check_vertex_to_vertex<T, K, P>(tiles: &[(K, P)], tol: T) -> VerificationReport
where
    T: Real,
    K: Copy + Into<TileKey> + Sync,
    P: Polygonal<T> + Sync,
{
    // cluster vertices
    let mut pts: Vec<(Point<T>, usize)> = Vec::new();
    let mut first = Vec::with_capacity(tiles.len());
    for (t, (_, p)) in tiles.iter().enumerate() {
        first.push(pts.len());
        pts.extend(p.vertices().iter().map(|&v| (v, t)));
    }
    let mut order: Vec<usize> = (0..pts.len()).collect();
    order.sort_by(|&i, &j| pts[i].0.x.partial_cmp(&pts[j].0.x).unwrap_or(core::cmp::Ordering::Equal));
    let mut uf = UnionFind((0..pts.len()).collect());
    let mut snap = T::zero();
    for (a, &i) in order.iter().enumerate() {
        for &j in &order[a + 1..] {
            if pts[j].0.x - pts[i].0.x > tol {
                break;
            }
            let d = pts[i].0.max_coord_diff(pts[j].0);
            if d <= tol {
                uf.union(i, j);
                snap = snap.max(d);
            }
        }
    }
    let cluster: Vec<Vec<usize>> = tiles
        .iter()
        .enumerate()
        .map(|(t, (_, p))| (0..p.vertices().len()).map(|k| uf.find(first[t] + k)).collect())
        .collect();

    // candidate pairs by overlapping bounding boxes
    let boxes: Vec<(Point<T>, Point<T>)> = tiles.iter().map(|(_, p)| p.bbox()).collect();
    let mut by_x: Vec<usize> = (0..tiles.len()).collect();
    by_x.sort_by(|&i, &j| boxes[i].0.x.partial_cmp(&boxes[j].0.x).unwrap_or(core::cmp::Ordering::Equal));
    let mut pairs = Vec::new();
    for (a, &i) in by_x.iter().enumerate() {
        for &j in &by_x[a + 1..] {
            if boxes[j].0.x > boxes[i].1.x + tol {
                break;
            }
            if boxes[j].0.y <= boxes[i].1.y + tol && boxes[i].0.y <= boxes[j].1.y + tol {
                pairs.push((i.min(j), i.max(j)));
            }
        }
    }

    let results: Vec<(T, bool)> = pairs
        .par_iter()
        .map(|&(i, j)| {
            let (a, b) = (tiles[i].1.vertices(), tiles[j].1.vertices());
            let (ca, cb) = (&cluster[i], &cluster[j]);
            let shared: Vec<usize> = ca.iter().copied().filter(|c| cb.contains(c)).collect();
            let mut closest = T::infinity();
            let mut bad = false;
            // vertices lying on the other tile's boundary away from its vertices
            for (poly, own, other, oc) in [(a, ca, b, cb), (b, cb, a, ca)] {
                let m = other.len();
                for (k, &v) in poly.iter().enumerate() {
                    if oc.contains(&own[k]) {
                        continue;
                    }
                    for e in 0..m {
                        let d = segment_distance(v, other[e], other[(e + 1) % m]);
                        closest = closest.min(d);
                        if d <= tol {
                            bad = true;
                        }
                    }
                }
            }
            match shared.len() {
                0 | 1 => {}
                2 => {
                    let adjacent = |c: &Vec<usize>| {
                        let n = c.len();
                        (0..n).any(|k| {
                            let (p, q) = (c[k], c[(k + 1) % n]);
                            (p == shared[0] && q == shared[1]) || (p == shared[1] && q == shared[0])
                        })
                    };
                    bad |= !(adjacent(ca) && adjacent(cb));
                }
                _ => bad = true,
            }
            if min_axis_overlap(a, b) > tol {
                bad = true;
            }
            (closest, bad)
        })
        .collect();

    let margin = results.iter().map(|r| r.0).fold(T::infinity(), T::min);
    let offenders = pairs
        .iter()
        .zip(&results)
        .filter(|(_, r)| r.1)
        .map(|(&(i, j), _)| (tiles[i].0.into(), Some(tiles[j].0.into())))
        .collect();
    let mut r = VerificationReport::residual("vertex-to-vertex", f(snap), f(tol), tiles.len())
        .with_offenders(offenders);
    r.margin = f(margin);
    r
}

/// The tile with the given id in the periodic tiling by equilateral
/// triangles of side 2 that the plane construction perturbs.
pub fn periodic_counterpart<T: Real>(id: TileId) -> crate::Result<Triangle<T>> {
    let n = (id.col.unsigned_abs() as usize).max(1);
    let base = undistorted_tiling::<T>(n)?.scaled_vertically(sqrt3());
    let t = base.triangle_at(id.col, id.slot)?;
    let dy = lit::<T>(2.0) * sqrt3::<T>() * lit(id.strip as f64);
    let reflect = id.strip.rem_euclid(2) == 1;
    Ok(t.map(|p| {
        let p = if reflect { p.flipped_y() } else { p };
        p + Point::new(T::zero(), dy)
    }))
}

fn matched_deviation<T: Real>(t: &Triangle<T>, u: &Triangle<T>) -> T {
    let (a, b) = (t.points(), u.points());
    (0..3)
        .map(|r| (0..3).map(|k| a[(k + r) % 3].max_coord_diff(b[k])).fold(T::zero(), T::max))
        .fold(T::infinity(), T::min)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClosenessReport {
    pub epsilon_target: f64,
    pub max_coord_deviation: f64,
    pub reference: String,
    pub worst_tile: Option<TileKey>,
    pub report: VerificationReport,
}

/// Largest coordinate deviation of each tile from its periodic
/// counterpart; passes iff below `2 ε`.
pub fn check_closeness<T: Real>(tiles: &[(TileId, Triangle<T>)], epsilon: T) -> crate::Result<ClosenessReport> {
    let devs: Vec<crate::Result<T>> = tiles
        .par_iter()
        .map(|(id, t)| Ok(matched_deviation(t, &periodic_counterpart(*id)?)))
        .collect();
    let mut worst = T::zero();
    let mut worst_tile = None;
    for ((id, _), d) in tiles.iter().zip(devs) {
        let d = d?;
        if d > worst || worst_tile.is_none() {
            worst = worst.max(d);
            worst_tile = Some(TileKey::from(*id));
        }
    }
    let bound = lit::<T>(2.0) * epsilon;
    let mut report = VerificationReport::separation("closeness", f(bound - worst), f(bound), tiles.len());
    report.worst_residual = f(worst);
    Ok(ClosenessReport {
        epsilon_target: f(epsilon),
        max_coord_deviation: f(worst),
        reference: "periodic equilateral tiling, side 2".into(),
        worst_tile,
        report,
    })
}

/// Residual of `4i - 3 = ((x_{i-1} + a_i)(1 - y_{i-1}) + (x_{i-1} + b_i)(1 + y_{i-1})) / 2`
/// over all columns.
pub fn check_strip_identity<T: Real>(t: &StripTiling<T>, tol: T) -> VerificationReport {
    let half = lit::<T>(0.5);
    let worst = (1..=t.n_cols())
        .map(|i| {
            let y = t.y(i - 1) / t.height();
            let x = t.x(i - 1);
            let rhs = half * ((x + t.a(i)) * (T::one() - y) + (x + t.b(i)) * (T::one() + y));
            (lit::<T>(4.0 * i as f64 - 3.0) - rhs).abs()
        })
        .fold(T::zero(), T::max);
    VerificationReport::residual("strip-identity", f(worst), f(tol), t.n_cols())
}

/// The four decay properties of the deviation series:
///
/// * `h_i < 1 + 5 (y_0² + ... + y_i²) < 2`,
/// * `h` is strictly increasing and stays in `(1, 2)`,
/// * the `y_i` alternate in sign with strictly decreasing magnitude,
/// * `|y_0| + ... + |y_i| < 4`.
///
/// Strictness of the increase of `h` is read off the increments
/// `4 y_i² / (1 - y_i²)`, which are positive exactly when `y_i ≠ 0`; the
/// magnitudes of `y` are compared through `ln |y_i|`, which stays exact
/// after `y_i` itself underflows.
pub fn check_deviation_decay<T: Real>(d: &DeviationSeries<T>) -> VerificationReport {
    let n = d.len();
    let one = T::one();
    let two = lit::<T>(2.0);
    let five = lit::<T>(5.0);

    let mut sq = T::zero();
    let mut m19 = T::infinity();
    for i in 0..=n {
        sq += d.y[i] * d.y[i];
        let bound = one + five * sq;
        m19 = m19.min(bound - d.h[i]).min(two - bound);
    }
    let p19 = VerificationReport::separation("h-below-square-sum-bound", f(m19), 0.0, n + 1);

    // an increment rounding swallows still counts when y_i != 0
    let mut m20 = (d.h[0] - one).min(two - d.h[n]);
    for i in 1..=n {
        let step = d.h[i] - d.h[i - 1];
        if d.sign_y[i] == 0 || !d.ln_abs_y[i].is_finite() || step < T::zero() {
            m20 = m20.min(step.min(T::zero()) - T::epsilon());
        }
    }
    let p20 = VerificationReport::separation("h-increasing-in-(1,2)", f(m20), 0.0, n + 1);

    let mut m21 = T::infinity();
    for i in 1..=n {
        if d.sign_y[i] == 0 || d.sign_y[i] != -d.sign_y[i - 1] {
            m21 = m21.min(-one);
        }
        m21 = m21.min(d.ln_abs_y[i - 1] - d.ln_abs_y[i]);
    }
    let p21 = VerificationReport::separation("y-alternating-decreasing", f(m21), 0.0, n + 1);

    let mut abs_sum = T::zero();
    for i in 0..=n {
        abs_sum += d.y[i].abs();
    }
    let p22 = VerificationReport::separation("y-abs-sum-below-4", f(lit::<T>(4.0) - abs_sum), 0.0, n + 1);

    let parts = vec![p19, p20, p21, p22];
    let margin = parts.iter().map(|p| p.margin).fold(f64::INFINITY, f64::min);
    let mut r = VerificationReport::separation("deviation-decay", margin, 0.0, n + 1);
    r.passed = parts.iter().all(|p| p.passed);
    r.parts = parts;
    r
}

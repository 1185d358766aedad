//! Shape comparison: congruence under all isometries, congruence under
//! translations and half-turns, and the finite sets of shear parameters at
//! which sheared triangles can become congruent.

use core::cmp::Ordering;

use crate::error::{Error, Result};
use crate::geom::{Point, Polygonal, Triangle};
use crate::scalar::{lit, Real};

/// Default quantum for signatures.
pub const DEFAULT_QUANTUM: f64 = 1e-9;

/// Roots closer than this are merged.
const ROOT_MERGE: f64 = 1e-9;

/// Leading coefficients at or below this are treated as zero.
const COEFF_FLOOR: f64 = 1e-14;

/// Discriminants this close to zero are clamped to zero.
const DISCRIMINANT_CLAMP: f64 = 1e-12;

/// Edges closer than this count as translates of each other.
const EDGE_MATCH: f64 = 1e-12;

/// Canonical `(edge length, interior angle)` sequence of a polygon.
///
/// Pair `k` holds the length of the edge leaving vertex `k` and the interior
/// angle at vertex `k`. Among all cyclic rotations of the polygon and of its
/// mirror image, the one whose quantized sequence is lexicographically
/// smallest is kept.
#[derive(Debug, Clone)]
pub struct Signature<T = f64> {
    pub quantum: T,
    pub quantized: Vec<(i64, i64)>,
    pub raw: Vec<(T, T)>,
}

impl<T: Real> PartialEq for Signature<T> {
    fn eq(&self, other: &Self) -> bool {
        self.quantized == other.quantized
    }
}

impl<T: Real> Eq for Signature<T> {}

impl<T: Real> core::hash::Hash for Signature<T> {
    fn hash<H: core::hash::Hasher>(&self, state: &mut H) {
        self.quantized.hash(state);
    }
}

/// The `(length, angle)` pairs of every rotation of `p` and of its mirror image.
fn candidates<T: Real, P: Polygonal<T> + ?Sized>(p: &P) -> Vec<Vec<(T, T)>> {
    let len = p.edge_lengths();
    let ang = p.interior_angles();
    let n = len.len();
    let mut out = Vec::with_capacity(2 * n);
    for r in 0..n {
        out.push((0..n).map(|k| (len[(r + k) % n], ang[(r + k) % n])).collect());
    }
    // mirror image: vertices in reverse order, the edge leaving vertex k is edge k-1
    for r in 0..n {
        out.push(
            (0..n)
                .map(|k| {
                    let v = (r + n - k) % n;
                    (len[(v + n - 1) % n], ang[v])
                })
                .collect(),
        );
    }
    out
}

fn quantize<T: Real>(v: T, quantum: T) -> i64 {
    (v / quantum).round().to_i64().unwrap_or(i64::MAX)
}

fn raw_cmp<T: Real>(a: &[(T, T)], b: &[(T, T)]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        let o = x
            .0
            .partial_cmp(&y.0)
            .unwrap_or(Ordering::Equal)
            .then(x.1.partial_cmp(&y.1).unwrap_or(Ordering::Equal));
        if o != Ordering::Equal {
            return o;
        }
    }
    Ordering::Equal
}

/// Canonical signature at the given quantum.
pub fn congruence_signature<T: Real, P: Polygonal<T> + ?Sized>(p: &P, quantum: T) -> Signature<T> {
    let mut best: Option<(Vec<(i64, i64)>, Vec<(T, T)>)> = None;
    for c in candidates(p) {
        let q: Vec<_> = c
            .iter()
            .map(|&(l, a)| (quantize(l, quantum), quantize(a, quantum)))
            .collect();
        let better = match &best {
            None => true,
            Some((bq, braw)) => match q.cmp(bq) {
                Ordering::Less => true,
                Ordering::Equal => raw_cmp(&c, braw) == Ordering::Less,
                Ordering::Greater => false,
            },
        };
        if better {
            best = Some((q, c));
        }
    }
    let (quantized, raw) = best.expect("polygon has at least three vertices");
    Signature {
        quantum,
        quantized,
        raw,
    }
}

/// Edge lengths and interior angles of a polygon, precomputed for repeated
/// distance queries.
#[derive(Debug, Clone, PartialEq)]
pub struct Shape<T = f64> {
    pairs: Vec<(T, T)>,
}

impl<T: Real> Shape<T> {
    pub fn new<P: Polygonal<T> + ?Sized>(p: &P) -> Self {
        Self {
            pairs: p.edge_lengths().into_iter().zip(p.interior_angles()).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Smallest, over all vertex correspondences that an isometry could
    /// realise, of the largest difference in edge length or interior angle.
    pub fn distance(&self, other: &Self) -> T {
        let n = self.pairs.len();
        if n != other.pairs.len() {
            return T::infinity();
        }
        let (a, b) = (&self.pairs, &other.pairs);
        let diff = |x: (T, T), y: (T, T)| (x.0 - y.0).abs().max((x.1 - y.1).abs());
        let mut best = T::infinity();
        for r in 0..n {
            let mut d = T::zero();
            for k in 0..n {
                d = d.max(diff(a[(r + k) % n], b[k]));
                if d >= best {
                    break;
                }
            }
            best = best.min(d);
            // mirror image: reversed vertex order, the edge leaving vertex v is edge v-1
            let mut d = T::zero();
            for k in 0..n {
                let v = (r + n - k) % n;
                d = d.max(diff((a[(v + n - 1) % n].0, a[v].1), b[k]));
                if d >= best {
                    break;
                }
            }
            best = best.min(d);
        }
        best
    }
}

/// Smallest, over all vertex correspondences that an isometry could
/// realise, of the largest difference in edge length or interior angle.
///
/// Zero exactly for congruent polygons; `T::infinity()` when the vertex
/// counts differ.
pub fn congruence_distance<T: Real, P, Q>(p: &P, q: &Q) -> T
where
    P: Polygonal<T> + ?Sized,
    Q: Polygonal<T> + ?Sized,
{
    Shape::new(p).distance(&Shape::new(q))
}

/// Congruence up to an isometry (reflections included).
///
/// Triangles are compared by their sorted edge lengths; larger polygons by
/// [`congruence_distance`].
pub fn congruent<T: Real, P, Q>(p: &P, q: &Q, tol: T) -> bool
where
    P: Polygonal<T> + ?Sized,
    Q: Polygonal<T> + ?Sized,
{
    let n = p.vertices().len();
    if n != q.vertices().len() {
        return false;
    }
    if n == 3 {
        let mut a = p.edge_lengths();
        let mut b = q.edge_lengths();
        a.sort_by(|x, y| x.partial_cmp(y).unwrap_or(Ordering::Equal));
        b.sort_by(|x, y| x.partial_cmp(y).unwrap_or(Ordering::Equal));
        return a.iter().zip(&b).all(|(x, y)| (*x - *y).abs() <= tol);
    }
    congruence_distance(p, q) <= tol
}

/// Smallest edge-vector mismatch between `u` and a translate of `t` or of
/// its half-turn.
pub fn halfturn_translate_distance<T: Real>(t: &Triangle<T>, u: &Triangle<T>) -> T {
    let et = t.edge_vectors();
    let eu = u.edge_vectors();
    let mut best = T::infinity();
    for sign in [T::one(), -T::one()] {
        for r in 0..3 {
            let d = (0..3)
                .map(|k| eu[k].max_coord_diff(et[(k + r) % 3] * sign))
                .fold(T::zero(), T::max);
            best = best.min(d);
        }
    }
    best
}

/// Congruence under translations and rotations by π.
pub fn halfturn_translate_congruent<T: Real>(t: &Triangle<T>, u: &Triangle<T>, tol: T) -> bool {
    halfturn_translate_distance(t, u) <= tol
}

/// Shear parameters at which a sheared triangle might meet a congruence
/// condition. Sorted ascending, duplicates within 1e-9 merged.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ShearRootSet<T = f64> {
    pub roots: Vec<T>,
    /// Every shear parameter is bad.
    pub degenerate: bool,
}

impl<T: Real> ShearRootSet<T> {
    pub fn from_roots(mut roots: Vec<T>) -> Self {
        sort_dedup(&mut roots);
        Self {
            roots,
            degenerate: false,
        }
    }

    pub fn degenerate() -> Self {
        Self {
            roots: Vec::new(),
            degenerate: true,
        }
    }

    /// Distance from `mu` to the nearest root; infinite for an empty set and
    /// zero for a degenerate one.
    pub fn clearance(&self, mu: T) -> T {
        if self.degenerate {
            return T::zero();
        }
        nearest_distance(&self.roots, mu)
    }

    pub fn merge(&mut self, other: &Self) {
        self.degenerate |= other.degenerate;
        self.roots.extend_from_slice(&other.roots);
        sort_dedup(&mut self.roots);
    }
}

/// Sorts ascending and merges values closer than 1e-9.
pub fn sort_dedup<T: Real>(v: &mut Vec<T>) {
    v.sort_by(|a, b| a.partial_cmp(b).unwrap_or(Ordering::Equal));
    let merge = lit::<T>(ROOT_MERGE);
    v.dedup_by(|b, a| (*b - *a).abs() <= merge);
}

/// Distance from `x` to the nearest element of a sorted slice.
pub fn nearest_distance<T: Real>(sorted: &[T], x: T) -> T {
    let i = sorted.partition_point(|&r| r < x);
    let mut d = T::infinity();
    if i < sorted.len() {
        d = d.min((sorted[i] - x).abs());
    }
    if i > 0 {
        d = d.min((x - sorted[i - 1]).abs());
    }
    d
}

/// Real roots of `a μ² + b μ + c = 0`.
///
/// Returns `None` when all three coefficients vanish (every `μ` solves it).
pub fn solve_quadratic<T: Real>(a: T, b: T, c: T) -> Option<Vec<T>> {
    let floor = lit::<T>(COEFF_FLOOR);
    if a.abs() > floor {
        let (p, q) = (b / a, c / a);
        let half = p * lit(0.5);
        let mut disc = half * half - q;
        if disc.abs() <= lit(DISCRIMINANT_CLAMP) {
            disc = T::zero();
        }
        if disc < T::zero() {
            return Some(Vec::new());
        }
        if disc == T::zero() {
            return Some(vec![-half]);
        }
        // avoid cancellation: the larger root first, the other from Vieta
        let big = -half - half.signum() * disc.sqrt();
        let other = if big != T::zero() { q / big } else { half.abs() };
        let mut r = vec![big, other];
        r.sort_by(|x, y| x.partial_cmp(y).unwrap_or(Ordering::Equal));
        Some(r)
    } else if b.abs() > floor {
        Some(vec![-c / b])
    } else if c.abs() > floor {
        Some(Vec::new())
    } else {
        None
    }
}

/// Coefficients of `|S_μ e|² - |S_μ f|²` as a polynomial in `μ`, where
/// `S_μ` is the shear `(x, y) -> (x + μ y, y)`.
fn length_difference<T: Real>(e: Point<T>, f: Point<T>) -> (T, T, T) {
    let two = lit::<T>(2.0);
    (
        e.y * e.y - f.y * f.y,
        two * (e.x * e.y - f.x * f.y),
        e.norm_sq() - f.norm_sq(),
    )
}

/// Edge of `t` farthest from being a translate of `±` an edge of `u`, with
/// that distance.
fn most_distinct_edge<T: Real>(t: &Triangle<T>, u: &Triangle<T>) -> (Point<T>, T) {
    let eu = u.edge_vectors();
    t.edge_vectors()
        .into_iter()
        .map(|e| {
            let d = eu
                .iter()
                .map(|&f| e.max_coord_diff(f).min(e.max_coord_diff(-f)))
                .fold(T::infinity(), T::min);
            (e, d)
        })
        .fold((Point::origin(), -T::one()), |best, c| if c.1 > best.1 { c } else { best })
}

/// Shears `μ` at which `S_μ t` and `S_μ u` could be congruent.
///
/// One edge of `t` that is not a translate of `±` any edge of `u` is
/// compared in length with each edge of `u`; congruence forces one of the
/// three resulting quadratics to vanish.
pub fn co_sheared_roots<T: Real>(t: &Triangle<T>, u: &Triangle<T>) -> Result<ShearRootSet<T>> {
    let (e0, sep) = most_distinct_edge(t, u);
    if sep <= lit(EDGE_MATCH) {
        return Err(Error::DegeneratePair);
    }
    let mut roots = Vec::new();
    for f in u.edge_vectors() {
        let (a, b, c) = length_difference(e0, f);
        match solve_quadratic(a, b, c) {
            Some(r) => roots.extend(r),
            None => return Err(Error::DegeneratePair),
        }
    }
    Ok(ShearRootSet::from_roots(roots))
}

/// Shears `μ` at which `S_μ t` could be congruent to the fixed triangle `u`.
///
/// The edge of `t` with the largest vertical extent must match one of the
/// three edge lengths of `u`.
pub fn sheared_vs_fixed_roots<T: Real>(t: &Triangle<T>, u: &Triangle<T>) -> ShearRootSet<T> {
    let e0 = t
        .edge_vectors()
        .into_iter()
        .fold(Point::<T>::origin(), |m, e| if e.y.abs() > m.y.abs() { e } else { m });
    let two = lit::<T>(2.0);
    let mut roots = Vec::new();
    for f in u.edge_vectors() {
        let a = e0.y * e0.y;
        let b = two * e0.x * e0.y;
        let c = e0.norm_sq() - f.norm_sq();
        if let Some(r) = solve_quadratic(a, b, c) {
            roots.extend(r);
        }
    }
    ShearRootSet::from_roots(roots)
}

/// Union of [`co_sheared_roots`] and [`sheared_vs_fixed_roots`].
pub fn bad_shear_set<T: Real>(t: &Triangle<T>, u: &Triangle<T>) -> Result<ShearRootSet<T>> {
    if halfturn_translate_congruent(t, u, lit(EDGE_MATCH)) {
        return Err(Error::DegeneratePair);
    }
    let mut s = co_sheared_roots(t, u)?;
    s.merge(&sheared_vs_fixed_roots(t, u));
    Ok(s)
}

/// Shears at which the edges `e` and `f` have equal sheared length.
pub fn equal_length_shears<T: Real>(e: Point<T>, f: Point<T>) -> Result<ShearRootSet<T>> {
    if (e.y.abs() - f.y.abs()).abs() <= lit(COEFF_FLOOR) {
        return Err(Error::NoUnequalHeights);
    }
    let (a, b, c) = length_difference(e, f);
    let roots = solve_quadratic(a, b, c).ok_or(Error::NoUnequalHeights)?;
    Ok(ShearRootSet::from_roots(roots))
}

/// Shears at which `S_μ t` could be equilateral.
///
/// Uses the pair of edges whose vertical extents differ most; their sheared
/// lengths must agree.
pub fn equilateral_shear_set<T: Real>(t: &Triangle<T>) -> Result<ShearRootSet<T>> {
    let e = t.edge_vectors();
    let mut best = (0, 1, -T::one());
    for i in 0..3 {
        for j in i + 1..3 {
            let gap = (e[i].y.abs() - e[j].y.abs()).abs();
            if gap > best.2 {
                best = (i, j, gap);
            }
        }
    }
    equal_length_shears(e[best.0], e[best.1])
}

/// Largest difference between the edge lengths of a triangle.
pub fn edge_spread<T: Real, P: Polygonal<T> + ?Sized>(p: &P) -> T {
    let l = p.edge_lengths();
    let lo = l.iter().copied().fold(T::infinity(), T::min);
    let hi = l.iter().copied().fold(T::neg_infinity(), T::max);
    hi - lo
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::{Polygon, Quadrangle};
    use crate::strip::critical_tiling;
    use approx::assert_abs_diff_eq;

    fn p(x: f64, y: f64) -> Point {
        Point::new(x, y)
    }

    fn tri(a: (f64, f64), b: (f64, f64), c: (f64, f64)) -> Triangle {
        Triangle::new(p(a.0, a.1), p(b.0, b.1), p(c.0, c.1)).unwrap()
    }

    #[test]
    fn congruent_examples() {
        let t = tri((0., 0.), (1., 0.), (0., 1.));
        let u = tri((5., 5.), (6., 5.), (5., 6.));
        assert!(congruent(&t, &u, 1e-12));
        let r1 = tri((0., 0.), (2., 0.), (0., 1.));
        let r2 = tri((0., 0.), (2., 0.), (2., 1.));
        assert!(congruent(&r1, &r2, 1e-12));
        assert!(!congruent(&t, &r1, 1e-3));
    }

    #[test]
    fn critical_tiling_cross_column_congruence() {
        let c = critical_tiling::<f64>(4).unwrap();
        let t11 = c.triangle_at(1, 1).unwrap();
        let t22 = c.triangle_at(2, 2).unwrap();
        assert!(congruent(&t11, &t22, 1e-12));
        assert!(congruence_distance(&t11, &t22) < 1e-12);
        for i in 1..=4 {
            for j in 1..=4 {
                let a = c.triangle_at(i, j).unwrap();
                let b = c.triangle_at(-i, j).unwrap();
                assert!(!halfturn_translate_congruent(&a, &b, 1e-9), "{i} {j}");
            }
        }
    }

    #[test]
    fn halfturn_examples() {
        let t = tri((0., 0.), (2., 0.3), (0.7, 1.1));
        let shifted = t.map(|q| q + p(7., -3.));
        let turned = t.map(|q| -q + p(1., 1.));
        assert!(halfturn_translate_congruent(&t, &shifted, 1e-12));
        assert!(halfturn_translate_congruent(&t, &turned, 1e-12));
        let mirrored = t.map(Point::mirrored_x);
        assert!(!halfturn_translate_congruent(&t, &mirrored, 1e-6));
        assert!(congruent(&t, &mirrored, 1e-12));
    }

    #[test]
    fn signature_rotation_and_reflection() {
        let sq = [p(0., 0.), p(1., 0.), p(1., 1.), p(0., 1.)];
        let a = Quadrangle::new(sq).unwrap();
        let b = Quadrangle::new([sq[2], sq[3], sq[0], sq[1]]).unwrap();
        assert_eq!(
            congruence_signature(&a, 1e-9).quantized,
            congruence_signature(&b, 1e-9).quantized
        );
        let q = Quadrangle::new([p(0., 0.), p(2., 0.), p(1.5, 1.), p(0.25, 0.75)]).unwrap();
        let r = q.map(|v| p(-v.x + 3.0, v.y));
        let sq_ = congruence_signature(&q, 1e-9);
        let sr = congruence_signature(&r, 1e-9);
        assert_eq!(sq_, sr);
        assert!(congruence_distance(&q, &r) < 1e-12);
        let other = Quadrangle::new([p(0., 0.), p(2., 0.), p(1.5, 1.01), p(0.25, 0.75)]).unwrap();
        assert_ne!(congruence_signature(&other, 1e-9), sq_);
        assert!(congruence_distance(&q, &other) > 1e-3);
    }

    #[test]
    fn distance_across_vertex_counts() {
        let t = tri((0., 0.), (1., 0.), (0., 1.));
        let sq = Polygon::new(vec![p(0., 0.), p(1., 0.), p(1., 1.), p(0., 1.)]).unwrap();
        assert!(congruence_distance(&t, &sq).is_infinite());
        assert!(!congruent(&Polygon::from(t), &sq, 1.0));
    }

    #[test]
    fn quadratic_solver() {
        assert_eq!(solve_quadratic(1.0, -3.0, 2.0).unwrap(), vec![1.0, 2.0]);
        assert_eq!(solve_quadratic(0.0, 4.0, 0.0).unwrap(), vec![0.0]);
        assert!(solve_quadratic(1.0, 0.0, 1.0).unwrap().is_empty());
        assert!(solve_quadratic(0.0, 0.0, 1.0).unwrap().is_empty());
        assert!(solve_quadratic(0.0, 0.0, 0.0).is_none());
        let r = solve_quadratic(1.0, -2.0, 1.0 - 1e-13).unwrap();
        assert_eq!(r, vec![1.0]);
        let r = solve_quadratic(1.0, 1e8, 1.0).unwrap();
        assert_abs_diff_eq!(r[1], -1e-8, epsilon = 1e-22);
    }

    #[test]
    fn edge_pair_with_opposite_slopes() {
        let (a, b, c) = length_difference(p(1., 1.), p(1., -1.));
        assert_eq!((a, b, c), (0.0, 4.0, 0.0));
        assert_eq!(solve_quadratic(a, b, c).unwrap(), vec![0.0]);
        // horizontal edges of different lengths never match
        let (a, b, c) = length_difference(p(2., 0.), p(1., 0.));
        assert!(solve_quadratic(a, b, c).unwrap().is_empty());
    }

    #[test]
    fn equal_triangles_are_degenerate_pairs() {
        let t = tri((0., 0.), (2., 0.3), (0.7, 1.1));
        let u = t.map(|q| q + p(3., 1.));
        assert_eq!(bad_shear_set(&t, &u), Err(Error::DegeneratePair));
        let v = t.map(|q| -q);
        assert_eq!(co_sheared_roots(&t, &v), Err(Error::DegeneratePair));
    }

    #[test]
    fn mirror_pair_has_root_at_zero() {
        let t = tri((0., 0.), (2., 0.), (1.2, 1.0));
        let m = t.map(Point::mirrored_x);
        let s = bad_shear_set(&t, &m).unwrap();
        assert!(s.clearance(0.0) < 1e-12);
        for &mu in &s.roots {
            assert!(mu.is_finite());
        }
    }

    #[test]
    fn equilateral_roots() {
        let s3 = 3f64.sqrt();
        let t = tri((0., 0.), (1., 0.), (0.5, s3 / 2.0));
        let s = equilateral_shear_set(&t).unwrap();
        assert_eq!(s.roots.len(), 2);
        assert_abs_diff_eq!(s.roots[0], 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(s.roots[1], 2.0 * s3 / 3.0, epsilon = 1e-12);

        let scalene = tri((0., 0.), (3., 0.), (0., 1.));
        for mu in equilateral_shear_set(&scalene).unwrap().roots {
            assert!(edge_spread(&scalene.sheared(mu)) > 0.1);
        }
    }

    #[test]
    fn no_unequal_heights() {
        assert_eq!(
            equal_length_shears(p(2., 0.), p(-1., 0.)),
            Err(Error::NoUnequalHeights)
        );
        assert_eq!(
            equal_length_shears(p(1., 1.), p(3., -1.)),
            Err(Error::NoUnequalHeights)
        );
        // the isosceles cell has sides with equal |y|, so the base is paired with a side
        let t = tri((0., 0.), (2., 0.), (1., 1.));
        for mu in equilateral_shear_set(&t).unwrap().roots {
            let l = t.sheared(mu).edge_lengths();
            assert!(l.iter().filter(|&&x| (x - 2.0).abs() < 1e-9).count() >= 2);
        }
    }

    #[test]
    fn clearance_and_merge() {
        let mut s = ShearRootSet::from_roots(vec![0.5, -1.0, 0.5 + 1e-12]);
        assert_eq!(s.roots, vec![-1.0, 0.5]);
        assert_abs_diff_eq!(s.clearance(0.0), 0.5);
        s.merge(&ShearRootSet::from_roots(vec![0.1]));
        assert_abs_diff_eq!(s.clearance(0.0), 0.1);
        assert!(ShearRootSet::<f64>::default().clearance(3.0).is_infinite());
        assert_eq!(ShearRootSet::<f64>::degenerate().clearance(3.0), 0.0);
    }
}

//! Splitting a nearly equilateral triangle into three convex quadrangles of
//! equal area and equal perimeter, and recovering the triangle from one of
//! them.
//!
//! With `A` at a corner, `B` and `C` the other two corners and `a, b, c` the
//! lengths of `AB`, `AC`, `BC`, the split uses the points
//!
//! ```text
//! C' = A + α (B - A)        on AB
//! B' = C + β (A - C)        on AC
//! A' = B + γ (C - B)        on BC
//! M  = A + ξ (B - A) + η (C - A)
//! ```
//!
//! and the quadrangles `[A, C', M, B']`, `[C', B, A', M]`, `[M, A', C, B']`.
//! For each `(α, β, γ)` there is a unique `(ξ, η)` equalising the three
//! areas; Newton's method then picks `(α, β, γ)` so that all three
//! perimeters equal the perimeter of the split of the unit equilateral
//! triangle.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geom::{convexity_margin, Corner, Point, Polygonal, Quadrangle, TileId, TileKey, Triangle};
use crate::newton::{fd_jacobian, det3, newton3_with, Mat3, NewtonOptions, NewtonSolution, Vec3};
use crate::scalar::{lit, Real};

/// Half-width of the admissible edge-length window around 1.
pub const EDGE_WINDOW: f64 = 0.02;

/// Triangles whose edge lengths differ by at most this are equilateral.
pub const EQUILATERAL_TOL: f64 = 1e-9;

/// Quadrangles must turn by at least this (as a sine) at every corner.
pub const CONVEXITY_TOL: f64 = 1e-12;

/// Similarity factor applied to plane tiles (edge about 2) before splitting.
pub const PLANE_SCALE: f64 = 0.5;

const DENOMINATOR_FLOOR: f64 = 1e-10;
const RADICAND_FLOOR: f64 = 1e-14;
const BASIN_RADIUS: f64 = 0.1;
const ANGLE_TIE: f64 = 1e-9;

/// Values of the split of the unit equilateral triangle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FairConstants<T = f64> {
    /// Common perimeter `1 + √2 - √6/3`.
    pub p0: T,
    pub alpha0: T,
    pub beta0: T,
    pub gamma0: T,
    pub xi0: T,
    pub eta0: T,
}

impl<T: Real> FairConstants<T> {
    pub fn new() -> Self {
        let s3 = lit::<T>(3.0).sqrt();
        let a0 = T::one() - s3 / lit(3.0);
        let third = T::one() / lit(3.0);
        Self {
            p0: T::one() + lit::<T>(2.0).sqrt() - lit::<T>(6.0).sqrt() / lit(3.0),
            alpha0: a0,
            beta0: a0,
            gamma0: a0,
            xi0: third,
            eta0: third,
        }
    }
}

impl<T: Real> Default for FairConstants<T> {
    fn default() -> Self {
        Self::new()
    }
}

pub fn p0<T: Real>() -> T {
    FairConstants::<T>::new().p0
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FairSplitParams<T = f64> {
    pub alpha: T,
    pub beta: T,
    pub gamma: T,
    pub xi: T,
    pub eta: T,
}

impl<T: Real> FairSplitParams<T> {
    /// Completes `(α, β, γ)` with the equal-area `(ξ, η)`.
    pub fn from_abg(alpha: T, beta: T, gamma: T) -> Result<Self> {
        let (xi, eta) = xi_eta(alpha, beta, gamma)?;
        Ok(Self {
            alpha,
            beta,
            gamma,
            xi,
            eta,
        })
    }

    pub fn undistorted() -> Self {
        let c = FairConstants::<T>::new();
        Self {
            alpha: c.alpha0,
            beta: c.beta0,
            gamma: c.gamma0,
            xi: c.xi0,
            eta: c.eta0,
        }
    }
}

/// Result of [`solve_fair_split`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolvedSplit<T = f64> {
    pub params: FairSplitParams<T>,
    pub iterations: usize,
    pub residual: T,
}

/// Third vertex of the triangle with base `(0,0)-(a,0)`, left side `b` and
/// right side `c`, above the base.
pub fn apex<T: Real>(a: T, b: T, c: T) -> Result<Point<T>> {
    let two = lit::<T>(2.0);
    let (a2, b2, c2) = (a * a, b * b, c * c);
    let radicand = two * (a2 * b2 + a2 * c2 + b2 * c2) - a2 * a2 - b2 * b2 - c2 * c2;
    if !(a > T::zero() && b > T::zero() && c > T::zero()) || !(radicand > lit(RADICAND_FLOOR)) {
        return Err(Error::DegenerateTriangle {
            radicand: radicand.to_f64().unwrap_or(f64::NAN),
        });
    }
    Ok(Point::new((a2 + b2 - c2) / (two * a), radicand.sqrt() / (two * a)))
}

/// The interior-point weights that give the three quadrangles equal area.
pub fn xi_eta<T: Real>(alpha: T, beta: T, gamma: T) -> Result<(T, T)> {
    let three = lit::<T>(3.0);
    let den = three
        * (T::one() - alpha - beta - gamma + alpha * beta + alpha * gamma + beta * gamma);
    if !(den.abs() > lit(DENOMINATOR_FLOOR)) {
        return Err(Error::SingularDenominator {
            value: den.to_f64().unwrap_or(f64::NAN),
        });
    }
    let two = lit::<T>(2.0);
    let xi = (T::one() - two * alpha - gamma + three * alpha * gamma) / den;
    let eta = (T::one() - beta - two * gamma + three * beta * gamma) / den;
    Ok((xi, eta))
}

/// The seven split points `[A, B, C, C', A', B', M]`.
fn split_points<T: Real>(
    a: Point<T>,
    b: Point<T>,
    c: Point<T>,
    p: &FairSplitParams<T>,
) -> [Point<T>; 7] {
    let cp = a + (b - a) * p.alpha;
    let bp = c + (a - c) * p.beta;
    let ap = b + (c - b) * p.gamma;
    let m = a + (b - a) * p.xi + (c - a) * p.eta;
    [a, b, c, cp, ap, bp, m]
}

/// Quadrangles at the corners `A`, `B`, `C`, in that order.
fn corner_quads<T: Real>(pts: &[Point<T>; 7]) -> [[Point<T>; 4]; 3] {
    let [a, b, c, cp, ap, bp, m] = *pts;
    [[a, cp, m, bp], [cp, b, ap, m], [m, ap, c, bp]]
}

fn perimeter4<T: Real>(q: &[Point<T>; 4]) -> T {
    (0..4).map(|k| (q[(k + 1) % 4] - q[k]).norm()).sum()
}

/// Perimeter residuals `(per Q_A - p0, per Q_C - p0, per Q_B - p0)` of the
/// split of the canonically posed triangle with sides `a, b, c`.
pub fn fair_residuals<T: Real>(a: T, b: T, c: T, abg: Vec3<T>) -> Result<Vec3<T>> {
    let apex = apex(a, b, c)?;
    let p = FairSplitParams::from_abg(abg[0], abg[1], abg[2])?;
    let pts = split_points(Point::origin(), Point::new(a, T::zero()), apex, &p);
    let [qa, qb, qc] = corner_quads(&pts);
    let p0 = p0::<T>();
    Ok([perimeter4(&qa) - p0, perimeter4(&qc) - p0, perimeter4(&qb) - p0])
}

fn nan3<T: Real>() -> Vec3<T> {
    [T::nan(); 3]
}

/// Solves the perimeter system for the triangle with sides `a, b, c`
/// starting from the undistorted parameters.
pub fn solve_fair_split<T: Real>(a: T, b: T, c: T) -> Result<SolvedSplit<T>> {
    apex(a, b, c)?;
    let k = FairConstants::<T>::new();
    let f = |x: Vec3<T>| fair_residuals(a, b, c, x).unwrap_or_else(|_| nan3());
    let NewtonSolution {
        x,
        iterations,
        residual,
    } = newton3_with(
        &f,
        None::<&fn(Vec3<T>) -> Mat3<T>>,
        [k.alpha0, k.beta0, k.gamma0],
        &NewtonOptions::default(),
    )?;
    Ok(SolvedSplit {
        params: FairSplitParams::from_abg(x[0], x[1], x[2])?,
        iterations,
        residual,
    })
}

/// The three corner quadrangles of the canonically posed triangle
/// `(0,0), (a,0), apex(a,b,c)`, checked for convexity.
pub fn quad_vertices<T: Real>(a: T, b: T, c: T, p: &FairSplitParams<T>) -> Result<[Quadrangle<T>; 3]> {
    let apex = apex(a, b, c)?;
    build_quads(Point::origin(), Point::new(a, T::zero()), apex, p)
}

fn build_quads<T: Real>(
    a: Point<T>,
    b: Point<T>,
    c: Point<T>,
    p: &FairSplitParams<T>,
) -> Result<[Quadrangle<T>; 3]> {
    let pts = split_points(a, b, c, p);
    let raw = corner_quads(&pts);
    let mut out = Vec::with_capacity(3);
    for (corner, v) in Corner::ALL.into_iter().zip(raw) {
        let q = Quadrangle::new(v).map_err(|_| Error::NonConvexOutput {
            corner: corner.as_char(),
        })?;
        if !(convexity_margin(q.vertices()) > lit(CONVEXITY_TOL)) {
            return Err(Error::NonConvexOutput {
                corner: corner.as_char(),
            });
        }
        out.push(q);
    }
    Ok([out[0], out[1], out[2]])
}

/// Jacobian determinant of [`fair_residuals`] in `(α, β, γ)` at the
/// undistorted point of the unit equilateral triangle, by central
/// differences with step `h`.
pub fn jacobian_check<T: Real>(h: T) -> T {
    let k = FairConstants::<T>::new();
    let one = T::one();
    let f = |x: Vec3<T>| fair_residuals(one, one, one, x).unwrap_or_else(|_| nan3());
    det3(&fd_jacobian(f, [k.alpha0, k.beta0, k.gamma0], h))
}

/// Closed form of [`jacobian_check`]: `2√2 + √3 - 2√6`.
pub fn split_jacobian_closed_form<T: Real>() -> T {
    let two = lit::<T>(2.0);
    two * two.sqrt() + lit::<T>(3.0).sqrt() - two * lit::<T>(6.0).sqrt()
}

/// A triangle split into three corner quadrangles.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FairSplit<T = f64> {
    /// Quadrangles at corners `A`, `B`, `C`.
    pub quads: [Quadrangle<T>; 3],
    /// The triangle's vertices as labelled for the split.
    pub corners: [Point<T>; 3],
    pub solved: SolvedSplit<T>,
}

fn lex_lt<T: Real>(p: Point<T>, q: Point<T>) -> bool {
    p.x < q.x || (p.x == q.x && p.y < q.y)
}

/// Labels the vertices `A, B, C`: `AB` is the longest edge and `AC` the
/// longer of the remaining two, so the labelling depends on the shape only.
/// Ties fall back to lexicographic vertex order.
pub fn canonical_labels<T: Real>(t: &Triangle<T>) -> [Point<T>; 3] {
    let v = t.points();
    let mut best: Option<([Point<T>; 3], T, T)> = None;
    for i in 0..3 {
        for j in 0..3 {
            if i == j {
                continue;
            }
            let k = 3 - i - j;
            let (a, b, c) = (v[i], v[j], v[k]);
            let ab = (b - a).norm();
            let ac = (c - a).norm();
            let better = match &best {
                None => true,
                Some((w, bab, bac)) => {
                    if ab != *bab {
                        ab > *bab
                    } else if ac != *bac {
                        ac > *bac
                    } else {
                        lex_lt(a, w[0]) || (a == w[0] && lex_lt(b, w[1]))
                    }
                }
            };
            if better {
                best = Some(([a, b, c], ab, ac));
            }
        }
    }
    best.expect("three vertices").0
}

/// Splits `t` into three convex quadrangles of equal area and perimeter
/// `p0`. Edge lengths must lie within `1 ± 0.02`.
pub fn fair_split<T: Real>(t: &Triangle<T>) -> Result<FairSplit<T>> {
    let window = lit::<T>(EDGE_WINDOW);
    for l in t.edge_lengths() {
        if !((l - T::one()).abs() < window) {
            return Err(Error::EdgeOutOfRange {
                length: l.to_f64().unwrap_or(f64::NAN),
            });
        }
    }
    let [a, b, c] = canonical_labels(t);
    let solved = solve_fair_split((b - a).norm(), (c - a).norm(), (c - b).norm())?;
    let quads = build_quads(a, b, c, &solved.params)?;
    Ok(FairSplit {
        quads,
        corners: [a, b, c],
        solved,
    })
}

/// Splits every plane tile into three quadrangles.
///
/// Tiles are scaled by `1/2` about the origin before splitting and the
/// quadrangles scaled back, so all quadrangles have perimeter `2 p0` and
/// area a third of the tile's. Equilateral tiles are rejected since their
/// quadrangles would be congruent.
pub fn quadify_plane<T: Real>(tiles: &[(TileId, Triangle<T>)]) -> Result<Vec<(TileKey, Quadrangle<T>)>> {
    let s = lit::<T>(PLANE_SCALE);
    let inv = T::one() / s;
    let per_tile: Vec<Result<[(TileKey, Quadrangle<T>); 3]>> = tiles
        .par_iter()
        .map(|(id, t)| {
            let key = TileKey::from(*id);
            if crate::congruence::edge_spread(t) <= lit::<T>(EQUILATERAL_TOL) {
                return Err(Error::EquilateralTile(key));
            }
            let split = fair_split(&t.map(|p| p * s)).map_err(|e| e.at(key))?;
            let q = split.quads.map(|q| q.map(|p| p * inv));
            Ok([
                (TileKey::quad(*id, Corner::A), q[0]),
                (TileKey::quad(*id, Corner::B), q[1]),
                (TileKey::quad(*id, Corner::C), q[2]),
            ])
        })
        .collect();
    let mut out = Vec::with_capacity(3 * tiles.len());
    for r in per_tile {
        out.extend(r?);
    }
    Ok(out)
}

/// Parameters recovering a triangle from one of its quadrangles.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReconstructionTriple<T = f64> {
    pub rho: T,
    pub sigma: T,
    pub tau: T,
    pub iterations: usize,
    pub residual: T,
}

/// A corner quadrangle posed with its corner at the origin, the shorter
/// corner edge along the positive x-axis and the rest above it:
/// `(0,0), (a,0), z, x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PosedQuad<T = f64> {
    pub a: T,
    pub z: Point<T>,
    pub x: Point<T>,
}

impl<T: Real> PosedQuad<T> {
    pub fn undistorted() -> Self {
        let s3 = lit::<T>(3.0).sqrt();
        let half = lit::<T>(0.5);
        Self {
            a: T::one() - s3 / lit(3.0),
            z: Point::new(half, s3 / lit(6.0)),
            x: Point::new(s3 / lit(6.0), half),
        }
    }

    fn max_deviation(&self, o: &Self) -> T {
        (self.a - o.a)
            .abs()
            .max(self.z.max_coord_diff(o.z))
            .max(self.x.max_coord_diff(o.x))
    }
}

/// Equal-area and perimeter residuals of the split whose corner quadrangle
/// is `q`, for the triangle `(0,0), ρ(a,0), σ x` and `A' = (1-τ) ρ(a,0) + τ σ x`.
pub fn reconstruction_residuals<T: Real>(q: &PosedQuad<T>, rst: Vec3<T>) -> Vec3<T> {
    let [rho, sigma, tau] = rst;
    let half = lit::<T>(0.5);
    let p = Point::new(q.a, T::zero());
    let (x, z) = (q.x, q.z);
    let rp = p * rho;
    let sx = x * sigma;
    let ap = rp * (T::one() - tau) + sx * tau;
    let area1 = half * p.cross(x) + half * (x - z).cross(p - z);
    let area2 = half * (ap - rp).cross(p - rp) + half * (p - z).cross(ap - z);
    let area3 = half * (x - sx).cross(ap - sx) + half * (ap - z).cross(x - z);
    let per = (ap - rp).norm() + (p - rp).norm() + (p - z).norm() + (ap - z).norm();
    [area1 - area2, area1 - area3, per - p0::<T>()]
}

/// Starting point `((3+√3)/2, √3, 1-√3/3)`.
pub fn reconstruction_start<T: Real>() -> Vec3<T> {
    let s3 = lit::<T>(3.0).sqrt();
    [(lit::<T>(3.0) + s3) / lit(2.0), s3, T::one() - s3 / lit(3.0)]
}

/// Jacobian determinant of [`reconstruction_residuals`] in `(ρ, σ, τ)` at
/// the undistorted configuration, by central differences with step `h`.
pub fn reconstruction_jacobian_check<T: Real>(h: T) -> T {
    let q = PosedQuad::<T>::undistorted();
    det3(&fd_jacobian(|v| reconstruction_residuals(&q, v), reconstruction_start(), h))
}

/// Closed form of [`reconstruction_jacobian_check`]: `√6/48 - √2/24`.
pub fn reconstruction_jacobian_closed_form<T: Real>() -> T {
    lit::<T>(6.0).sqrt() / lit(48.0) - lit::<T>(2.0).sqrt() / lit(24.0)
}

/// Rigid motion (possibly orientation reversing) placing a quadrangle in
/// the pose of [`PosedQuad`].
struct Pose<T> {
    origin: Point<T>,
    u: Point<T>,
    reflect: bool,
}

impl<T: Real> Pose<T> {
    fn forward(&self, p: Point<T>) -> Point<T> {
        let d = p - self.origin;
        let y = self.u.cross(d);
        Point::new(self.u.dot(d), if self.reflect { -y } else { y })
    }

    fn inverse(&self, p: Point<T>) -> Point<T> {
        let perp = Point::new(-self.u.y, self.u.x);
        let y = if self.reflect { -p.y } else { p.y };
        self.origin + self.u * p.x + perp * y
    }
}

/// Recovers the triangle that `q` was split from, assuming `q` is close to
/// a corner quadrangle of a nearly equilateral triangle (at any scale).
pub fn reconstruct_triangle<T: Real>(q: &Quadrangle<T>) -> Result<(Triangle<T>, ReconstructionTriple<T>)> {
    let k = p0::<T>() / q.perimeter();
    let v: Vec<Point<T>> = q.points().iter().map(|&p| p * k).collect();
    let ang = q.interior_angles();
    let mut order: Vec<usize> = (0..4).collect();
    order.sort_by(|&i, &j| ang[i].partial_cmp(&ang[j]).unwrap_or(core::cmp::Ordering::Equal));
    if ang[order[1]] - ang[order[0]] <= lit(ANGLE_TIE) {
        return Err(Error::OutOfBasin {
            deviation: (ang[order[1]] - ang[order[0]]).to_f64().unwrap_or(f64::NAN),
        });
    }
    let c = order[0];
    let next = v[(c + 1) % 4];
    let prev = v[(c + 3) % 4];
    let reflect = (next - v[c]).norm() > (prev - v[c]).norm();
    let axis = if reflect { prev } else { next };
    let pose = Pose {
        origin: v[c],
        u: (axis - v[c]) * (T::one() / (axis - v[c]).norm()),
        reflect,
    };
    let (zi, xi) = if reflect { ((c + 2) % 4, (c + 1) % 4) } else { ((c + 2) % 4, (c + 3) % 4) };
    let posed = PosedQuad {
        a: (axis - v[c]).norm(),
        z: pose.forward(v[zi]),
        x: pose.forward(v[xi]),
    };
    let dev = posed.max_deviation(&PosedQuad::undistorted());
    if !(dev <= lit(BASIN_RADIUS)) {
        return Err(Error::OutOfBasin {
            deviation: dev.to_f64().unwrap_or(f64::NAN),
        });
    }
    let sol = newton3_with(
        &|r: Vec3<T>| reconstruction_residuals(&posed, r),
        None::<&fn(Vec3<T>) -> Mat3<T>>,
        reconstruction_start(),
        &NewtonOptions::default(),
    )?;
    let [rho, sigma, tau] = sol.x;
    let inv = T::one() / k;
    let corners = [
        Point::origin(),
        Point::new(posed.a * rho, T::zero()),
        posed.x * sigma,
    ]
    .map(|p| pose.inverse(p) * inv);
    let t = Triangle::new(corners[0], corners[1], corners[2])?;
    Ok((
        t,
        ReconstructionTriple {
            rho,
            sigma,
            tau,
            iterations: sol.iterations,
            residual: sol.residual,
        },
    ))
}

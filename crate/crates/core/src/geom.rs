//! Planar points, polygons and tile identifiers.
//!
//! Polygons are stored counterclockwise. Edge `k` runs from vertex `k` to
//! vertex `k + 1` (cyclically) and its edge vector is `v[k+1] - v[k]`.

use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::scalar::{lit, Real};

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point<T = f64> {
    pub x: T,
    pub y: T,
}

impl<T: Real> Point<T> {
    #[inline]
    pub const fn new(x: T, y: T) -> Self {
        Self { x, y }
    }

    #[inline]
    pub fn origin() -> Self {
        Self::new(T::zero(), T::zero())
    }

    #[inline]
    pub fn dot(self, o: Self) -> T {
        self.x * o.x + self.y * o.y
    }

    /// z-component of the 3D cross product.
    #[inline]
    pub fn cross(self, o: Self) -> T {
        self.x * o.y - self.y * o.x
    }

    #[inline]
    pub fn norm_sq(self) -> T {
        self.dot(self)
    }

    #[inline]
    pub fn norm(self) -> T {
        self.x.hypot(self.y)
    }

    #[inline]
    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    /// Image under the shear `(x, y) -> (x + mu*y, y)`.
    #[inline]
    pub fn sheared(self, mu: T) -> Self {
        Self::new(self.x + mu * self.y, self.y)
    }

    /// Reflection through the horizontal axis.
    #[inline]
    pub fn flipped_y(self) -> Self {
        Self::new(self.x, -self.y)
    }

    /// Reflection through the vertical axis.
    #[inline]
    pub fn mirrored_x(self) -> Self {
        Self::new(-self.x, self.y)
    }

    #[inline]
    pub fn scaled(self, sx: T, sy: T) -> Self {
        Self::new(self.x * sx, self.y * sy)
    }

    /// Maximum of the coordinate-wise absolute differences.
    #[inline]
    pub fn max_coord_diff(self, o: Self) -> T {
        (self.x - o.x).abs().max((self.y - o.y).abs())
    }

    #[inline]
    pub fn lerp(self, o: Self, t: T) -> Self {
        self + (o - self) * t
    }
}

impl<T: Real> Add for Point<T> {
    type Output = Self;
    #[inline]
    fn add(self, o: Self) -> Self {
        Self::new(self.x + o.x, self.y + o.y)
    }
}

impl<T: Real> Sub for Point<T> {
    type Output = Self;
    #[inline]
    fn sub(self, o: Self) -> Self {
        Self::new(self.x - o.x, self.y - o.y)
    }
}

impl<T: Real> Mul<T> for Point<T> {
    type Output = Self;
    #[inline]
    fn mul(self, s: T) -> Self {
        Self::new(self.x * s, self.y * s)
    }
}

impl<T: Real> Neg for Point<T> {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        Self::new(-self.x, -self.y)
    }
}

/// Common read-only interface of triangles, quadrangles and general polygons.
pub trait Polygonal<T: Real> {
    fn vertices(&self) -> &[Point<T>];

    fn signed_area(&self) -> T {
        signed_area(self.vertices())
    }

    fn area(&self) -> T {
        self.signed_area().abs()
    }

    fn perimeter(&self) -> T {
        self.edge_vectors().into_iter().map(Point::norm).sum()
    }

    fn edge_vectors(&self) -> Vec<Point<T>> {
        let v = self.vertices();
        let n = v.len();
        (0..n).map(|k| v[(k + 1) % n] - v[k]).collect()
    }

    fn edge_lengths(&self) -> Vec<T> {
        self.edge_vectors().into_iter().map(Point::norm).collect()
    }

    /// Interior angle at each vertex, in radians. Assumes counterclockwise order.
    fn interior_angles(&self) -> Vec<T> {
        let v = self.vertices();
        let n = v.len();
        (0..n)
            .map(|k| {
                let incoming = v[k] - v[(k + n - 1) % n];
                let outgoing = v[(k + 1) % n] - v[k];
                let turn = incoming.cross(outgoing).atan2(incoming.dot(outgoing));
                T::PI() - turn
            })
            .collect()
    }

    fn bbox(&self) -> (Point<T>, Point<T>) {
        let v = self.vertices();
        let mut lo = v[0];
        let mut hi = v[0];
        for p in &v[1..] {
            lo = Point::new(lo.x.min(p.x), lo.y.min(p.y));
            hi = Point::new(hi.x.max(p.x), hi.y.max(p.y));
        }
        (lo, hi)
    }

    /// Largest difference of second coordinates over the vertices.
    fn vertical_width(&self) -> T {
        let (lo, hi) = self.bbox();
        hi.y - lo.y
    }
}

impl<T: Real, P: Polygonal<T> + ?Sized> Polygonal<T> for &P {
    fn vertices(&self) -> &[Point<T>] {
        (**self).vertices()
    }
}

pub fn signed_area<T: Real>(v: &[Point<T>]) -> T {
    let n = v.len();
    let mut twice = T::zero();
    for k in 0..n {
        twice += v[k].cross(v[(k + 1) % n]);
    }
    twice * lit(0.5)
}

/// Smallest sine of the turning angle between consecutive edges of a
/// counterclockwise polygon; positive iff the polygon is strictly convex.
pub fn convexity_margin<T: Real>(v: &[Point<T>]) -> T {
    let n = v.len();
    (0..n)
        .map(|k| {
            let e = v[(k + 1) % n] - v[k];
            let f = v[(k + 2) % n] - v[(k + 1) % n];
            e.cross(f) / (e.norm() * f.norm())
        })
        .fold(T::infinity(), T::min)
}

fn check_finite<T: Real>(v: &[Point<T>]) -> Result<()> {
    if v.iter().all(|p| p.is_finite()) {
        Ok(())
    } else {
        Err(Error::DegeneratePolygon("non-finite coordinate".into()))
    }
}

/// Area below which a polygon with the given vertices counts as degenerate.
fn area_floor<T: Real>(v: &[Point<T>]) -> T {
    let extent = v
        .iter()
        .fold(T::zero(), |m, p| m.max(p.x.abs()).max(p.y.abs()))
        .max(T::one());
    extent * extent * T::epsilon() * lit(16.0)
}

fn segments_cross<T: Real>(p1: Point<T>, p2: Point<T>, q1: Point<T>, q2: Point<T>) -> bool {
    let d1 = (p2 - p1).cross(q1 - p1);
    let d2 = (p2 - p1).cross(q2 - p1);
    let d3 = (q2 - q1).cross(p1 - q1);
    let d4 = (q2 - q1).cross(p2 - q1);
    d1 * d2 <= T::zero() && d3 * d4 <= T::zero()
}

fn is_simple<T: Real>(v: &[Point<T>]) -> bool {
    let n = v.len();
    for i in 0..n {
        for j in i + 1..n {
            let adjacent = j == i + 1 || (i == 0 && j == n - 1);
            if !adjacent && segments_cross(v[i], v[(i + 1) % n], v[j], v[(j + 1) % n]) {
                return false;
            }
        }
    }
    true
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Triangle<T = f64> {
    v: [Point<T>; 3],
}

impl<T: Real> Triangle<T> {
    /// Builds a triangle, reordering the vertices counterclockwise.
    pub fn new(a: Point<T>, b: Point<T>, c: Point<T>) -> Result<Self> {
        let v = [a, b, c];
        check_finite(&v)?;
        let s = signed_area(&v);
        if s.abs() <= area_floor(&v) {
            return Err(Error::DegeneratePolygon("collinear triangle".into()));
        }
        Ok(Self::oriented(v, s))
    }

    fn oriented(v: [Point<T>; 3], s: T) -> Self {
        if s < T::zero() {
            Self { v: [v[0], v[2], v[1]] }
        } else {
            Self { v }
        }
    }

    /// Applies a point map; orientation is restored afterwards. The map must
    /// be affine and non-singular.
    pub fn map(&self, f: impl Fn(Point<T>) -> Point<T>) -> Self {
        let v = self.v.map(f);
        Self::oriented(v, signed_area(&v))
    }

    pub fn points(&self) -> [Point<T>; 3] {
        self.v
    }

    pub fn sheared(&self, mu: T) -> Self {
        self.map(|p| p.sheared(mu))
    }
}

impl<T: Real> Polygonal<T> for Triangle<T> {
    fn vertices(&self) -> &[Point<T>] {
        &self.v
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrangle<T = f64> {
    v: [Point<T>; 4],
}

impl<T: Real> Quadrangle<T> {
    /// Builds a simple quadrangle, reordering counterclockwise if needed.
    pub fn new(v: [Point<T>; 4]) -> Result<Self> {
        check_finite(&v)?;
        let s = signed_area(&v);
        if s.abs() <= area_floor(&v) {
            return Err(Error::DegeneratePolygon("zero-area quadrangle".into()));
        }
        if !is_simple(&v) {
            return Err(Error::DegeneratePolygon("self-intersecting quadrangle".into()));
        }
        Ok(Self::oriented(v, s))
    }

    fn oriented(v: [Point<T>; 4], s: T) -> Self {
        if s < T::zero() {
            Self {
                v: [v[0], v[3], v[2], v[1]],
            }
        } else {
            Self { v }
        }
    }

    pub fn map(&self, f: impl Fn(Point<T>) -> Point<T>) -> Self {
        let v = self.v.map(f);
        Self::oriented(v, signed_area(&v))
    }

    pub fn points(&self) -> [Point<T>; 4] {
        self.v
    }
}

impl<T: Real> Polygonal<T> for Quadrangle<T> {
    fn vertices(&self) -> &[Point<T>] {
        &self.v
    }
}

/// Simple polygon with any number of vertices, stored counterclockwise.
#[derive(Debug, Clone, PartialEq)]
pub struct Polygon<T = f64> {
    v: Vec<Point<T>>,
}

impl<T: Real> Polygon<T> {
    pub fn new(mut v: Vec<Point<T>>) -> Result<Self> {
        if v.len() < 3 {
            return Err(Error::DegeneratePolygon(format!("{} vertices", v.len())));
        }
        check_finite(&v)?;
        let s = signed_area(&v);
        if s.abs() <= area_floor(&v) {
            return Err(Error::DegeneratePolygon("zero area".into()));
        }
        if !is_simple(&v) {
            return Err(Error::DegeneratePolygon("self-intersecting".into()));
        }
        if s < T::zero() {
            v[1..].reverse();
        }
        Ok(Self { v })
    }

    pub fn map(&self, f: impl Fn(Point<T>) -> Point<T>) -> Self {
        let mut v: Vec<_> = self.v.iter().copied().map(f).collect();
        if signed_area(&v) < T::zero() {
            v[1..].reverse();
        }
        Self { v }
    }
}

impl<T: Real> Polygonal<T> for Polygon<T> {
    fn vertices(&self) -> &[Point<T>] {
        &self.v
    }
}

impl<T: Real> From<Triangle<T>> for Polygon<T> {
    fn from(t: Triangle<T>) -> Self {
        Self { v: t.v.to_vec() }
    }
}

impl<T: Real> From<Quadrangle<T>> for Polygon<T> {
    fn from(q: Quadrangle<T>) -> Self {
        Self { v: q.v.to_vec() }
    }
}

/// Identifies triangle `T_col^slot` of strip row `strip`.
///
/// Column 0 carries only slots 1 (above the centre vertex) and 4 (below it).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TileId {
    pub strip: i64,
    pub col: i64,
    pub slot: u8,
}

impl TileId {
    pub fn new(strip: i64, col: i64, slot: u8) -> Result<Self> {
        let id = Self { strip, col, slot };
        if id.is_valid() {
            Ok(id)
        } else {
            Err(Error::IndexOutOfRange(format!("no tile {id}")))
        }
    }

    pub fn is_valid(&self) -> bool {
        matches!(self.slot, 1..=4) && (self.col != 0 || self.slot == 1 || self.slot == 4)
    }
}

impl fmt::Display for TileId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "r{}:c{}:s{}", self.strip, self.col, self.slot)
    }
}

/// Corner of a fairly split triangle that a quadrangle is attached to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Corner {
    A,
    B,
    C,
}

impl Corner {
    pub const ALL: [Corner; 3] = [Corner::A, Corner::B, Corner::C];

    pub fn as_char(self) -> char {
        match self {
            Corner::A => 'A',
            Corner::B => 'B',
            Corner::C => 'C',
        }
    }

    pub fn from_char(c: char) -> Option<Self> {
        match c {
            'A' => Some(Corner::A),
            'B' => Some(Corner::B),
            'C' => Some(Corner::C),
            _ => None,
        }
    }
}

/// Key for any tile a verification report can name: a triangle, or one of
/// the three quadrangles split from it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TileKey {
    pub id: TileId,
    pub corner: Option<Corner>,
}

impl TileKey {
    pub fn quad(id: TileId, corner: Corner) -> Self {
        Self {
            id,
            corner: Some(corner),
        }
    }
}

impl From<TileId> for TileKey {
    fn from(id: TileId) -> Self {
        Self { id, corner: None }
    }
}

impl fmt::Display for TileKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.corner {
            Some(c) => write!(f, "{}:{}", self.id, c.as_char()),
            None => write!(f, "{}", self.id),
        }
    }
}

//! Distorted unit-area triangle tilings of the strip `R x [-h, h]`.
//!
//! The tiling is determined by the height `y0` of the centre vertex on the
//! axis `x = 0`. To the right of the axis the centre line carries vertices
//! `(x_i, y_i)`, the upper boundary `(a_i, h)` and the lower boundary
//! `(b_i, -h)`. Column `i >= 1` holds four triangles:
//!
//! ```text
//! slot 1: (a_i, h)        (x_i, y_i)   (a_{i+1}, h)
//! slot 2: (x_{i-1}, y_{i-1}) (x_i, y_i) (a_i, h)
//! slot 3: (x_{i-1}, y_{i-1}) (b_i, -h) (x_i, y_i)
//! slot 4: (b_i, -h)       (b_{i+1}, -h) (x_i, y_i)
//! ```
//!
//! Column 0 holds the two triangles above and below `(0, y0)` that straddle
//! the axis. Columns `-i` are mirror images of columns `i`.
//!
//! Coordinates are produced from the deviation recursion (offsets from the
//! undistorted lattice), which is algebraically the same recursion as the
//! one on raw coordinates but keeps the small quantities small.

use crate::error::{Error, Result};
use crate::geom::{Point, TileId, Triangle};
use crate::scalar::{int, lit, Real};

/// Upper bound on the number of generated columns.
pub const MAX_COLS: usize = 10_000_000;

/// Recursion denominators smaller than this abort generation.
const DENOMINATOR_FLOOR: f64 = 1e-14;

/// Offsets of a distorted strip tiling from the undistorted one.
///
/// Indexing: `alpha[k]` and `beta[k]` hold the deviations of `a_{k+1}` and
/// `b_{k+1}`; `xi`, `y`, `h` and the sign/log fields are indexed from 0.
#[derive(Debug, Clone, PartialEq)]
pub struct DeviationSeries<T = f64> {
    pub y0: T,
    pub alpha: Vec<T>,
    pub beta: Vec<T>,
    pub xi: Vec<T>,
    pub y: Vec<T>,
    /// `h_i = h_{i-1} + 4 y_i^2 / (1 - y_i^2)`, `h_0 = 1 + 2 y0^2 / (1 - y0^2)`.
    pub h: Vec<T>,
    /// `ln |y_i|`; stays finite after `y_i` itself underflows.
    pub ln_abs_y: Vec<T>,
    /// Sign of `y_i` as -1, 0 or 1.
    pub sign_y: Vec<i8>,
}

impl<T: Real> DeviationSeries<T> {
    /// Runs the deviation recursion for `n` columns.
    ///
    /// Accepts `y0 = 0`, which yields the undistorted tiling.
    pub fn generate(y0: T, n: usize) -> Result<Self> {
        if !(y0 >= T::zero() && y0 < T::one()) {
            return Err(Error::InvalidParameter(format!("y0 = {y0} outside [0, 1)")));
        }
        if n == 0 || n > MAX_COLS {
            return Err(Error::InvalidParameter(format!(
                "column count {n} outside 1..={MAX_COLS}"
            )));
        }
        let one = T::one();
        let two = lit::<T>(2.0);
        let four = lit::<T>(4.0);
        let floor = lit::<T>(DENOMINATOR_FLOOR);

        let mut s = Self {
            y0,
            alpha: Vec::with_capacity(n + 1),
            beta: Vec::with_capacity(n + 1),
            xi: Vec::with_capacity(n + 1),
            y: Vec::with_capacity(n + 1),
            h: Vec::with_capacity(n + 1),
            ln_abs_y: Vec::with_capacity(n + 1),
            sign_y: Vec::with_capacity(n + 1),
        };
        s.alpha.push(y0 / (one - y0));
        s.beta.push(-y0 / (one + y0));
        s.xi.push(T::zero());
        s.y.push(y0);
        s.h.push(one + two * y0 * y0 / (one - y0 * y0));
        s.ln_abs_y.push(y0.ln());
        s.sign_y.push(if y0 > T::zero() { 1 } else { 0 });

        for i in 1..=n {
            let (al, be) = (s.alpha[i - 1], s.beta[i - 1]);
            let yp = s.y[i - 1];
            let denom = one + al + be;
            if denom.abs() < floor {
                return Err(Error::DenominatorVanished(i));
            }
            let factor = one - two / denom;
            let yi = yp * factor;
            s.xi.push(s.xi[i - 1] - (al - be) * yp / denom);
            s.y.push(yi);
            s.ln_abs_y.push(s.ln_abs_y[i - 1] + factor.abs().ln());
            let sign = if factor > T::zero() {
                1
            } else if factor < T::zero() {
                -1
            } else {
                0
            };
            s.sign_y.push(s.sign_y[i - 1] * sign);
            s.alpha.push(al + two * yi / (one - yi));
            s.beta.push(be - two * yi / (one + yi));
            s.h.push(s.h[i - 1] + four * yi * yi / (one - yi * yi));
        }
        Ok(s)
    }

    /// Number of generated columns.
    pub fn len(&self) -> usize {
        self.xi.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `α_i` for `1 <= i <= n + 1`.
    pub fn alpha_at(&self, i: usize) -> T {
        self.alpha[i - 1]
    }

    /// `β_i` for `1 <= i <= n + 1`.
    pub fn beta_at(&self, i: usize) -> T {
        self.beta[i - 1]
    }
}

/// Vertex data of a distorted strip tiling for columns `-n..=n`.
#[derive(Debug, Clone, PartialEq)]
pub struct StripTiling<T = f64> {
    y0: T,
    n_cols: usize,
    height: T,
    x: Vec<T>,
    y: Vec<T>,
    a: Vec<T>,
    b: Vec<T>,
}

/// Builds the strip tiling for centre height `y0 ∈ (0, 1)`.
pub fn strip_tiling<T: Real>(y0: T, n_cols: usize) -> Result<StripTiling<T>> {
    if !(y0 > T::zero() && y0 < T::one()) {
        return Err(Error::InvalidParameter(format!("y0 = {y0} outside (0, 1)")));
    }
    let d = DeviationSeries::generate(y0, n_cols)?;
    Ok(StripTiling::from_deviations(&d))
}

/// Runs the deviation recursion for the tiling's own parameter.
pub fn deviations<T: Real>(t: &StripTiling<T>) -> Result<DeviationSeries<T>> {
    DeviationSeries::generate(t.y0, t.n_cols)
}

/// The tiling at `y0 = 1/√3` from its closed form, independent of the recursion.
pub fn critical_tiling<T: Real>(n_cols: usize) -> Result<StripTiling<T>> {
    check_cols(n_cols)?;
    let s3 = lit::<T>(3.0).sqrt();
    let half = lit::<T>(0.5);
    let two = lit::<T>(2.0);
    let mut x = vec![T::zero()];
    let mut y = vec![T::one() / s3];
    for i in 1..=n_cols {
        x.push(two * int(i as i64) - half);
        y.push(T::zero());
    }
    let (a, b) = (1..=n_cols + 1)
        .map(|i| {
            let c = two * int(i as i64);
            (c + (s3 - T::one()) * half, c - (s3 + T::one()) * half)
        })
        .unzip();
    Ok(StripTiling {
        y0: T::one() / s3,
        n_cols,
        height: T::one(),
        x,
        y,
        a,
        b,
    })
}

/// The undistorted tiling by triangles with edges `√2, √2, 2` (`y0 = 0`).
pub fn undistorted_tiling<T: Real>(n_cols: usize) -> Result<StripTiling<T>> {
    check_cols(n_cols)?;
    let x = (0..=n_cols).map(|i| int(2 * i as i64)).collect();
    let y = vec![T::zero(); n_cols + 1];
    let a: Vec<T> = (1..=n_cols + 1).map(|i| int(2 * i as i64 - 1)).collect();
    Ok(StripTiling {
        y0: T::zero(),
        n_cols,
        height: T::one(),
        x,
        y,
        b: a.clone(),
        a,
    })
}

fn check_cols(n: usize) -> Result<()> {
    if n == 0 || n > MAX_COLS {
        Err(Error::InvalidParameter(format!(
            "column count {n} outside 1..={MAX_COLS}"
        )))
    } else {
        Ok(())
    }
}

impl<T: Real> StripTiling<T> {
    fn from_deviations(d: &DeviationSeries<T>) -> Self {
        let n = d.len();
        let two = lit::<T>(2.0);
        let x = (0..=n).map(|i| two * int(i as i64) + d.xi[i]).collect();
        let a = (1..=n + 1)
            .map(|i| int::<T>(2 * i as i64 - 1) + d.alpha_at(i))
            .collect();
        let b = (1..=n + 1)
            .map(|i| int::<T>(2 * i as i64 - 1) + d.beta_at(i))
            .collect();
        Self {
            y0: d.y0,
            n_cols: n,
            height: T::one(),
            x,
            y: d.y.clone(),
            a,
            b,
        }
    }

    /// Parameter the tiling was generated from (before any vertical scaling).
    pub fn y0(&self) -> T {
        self.y0
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    /// Half-height of the strip: 1 before scaling, √3 in the equilateral regime.
    pub fn height(&self) -> T {
        self.height
    }

    /// `x_i` for `0 <= i <= n`.
    pub fn x(&self, i: usize) -> T {
        self.x[i]
    }

    /// Second coordinate of the `i`-th centre vertex, including scaling.
    pub fn y(&self, i: usize) -> T {
        self.y[i]
    }

    /// `a_i` for `1 <= i <= n + 1`.
    pub fn a(&self, i: usize) -> T {
        self.a[i - 1]
    }

    /// `b_i` for `1 <= i <= n + 1`.
    pub fn b(&self, i: usize) -> T {
        self.b[i - 1]
    }

    pub fn centre(&self, i: usize) -> Point<T> {
        Point::new(self.x[i], self.y[i])
    }

    pub fn upper(&self, i: usize) -> Point<T> {
        Point::new(self.a[i - 1], self.height)
    }

    pub fn lower(&self, i: usize) -> Point<T> {
        Point::new(self.b[i - 1], -self.height)
    }

    /// Applies `(x, y) -> (x, s*y)` to every vertex.
    pub fn scaled_vertically(&self, s: T) -> Self {
        let mut t = self.clone();
        t.height *= s;
        for y in &mut t.y {
            *y *= s;
        }
        t
    }

    /// Triangle `T_i^j`; negative `i` is the mirror image through `x = 0`.
    pub fn triangle_at(&self, i: i64, j: u8) -> Result<Triangle<T>> {
        let id = TileId::new(0, i, j)?;
        let k = i.unsigned_abs() as usize;
        if k > self.n_cols {
            return Err(Error::IndexOutOfRange(format!(
                "column {i} outside -{0}..={0}",
                self.n_cols
            )));
        }
        let [p, q, r] = match (k, j) {
            (0, 1) => [self.centre(0), self.upper(1), self.upper(1).mirrored_x()],
            (0, 4) => [self.centre(0), self.lower(1).mirrored_x(), self.lower(1)],
            (_, 1) => [self.upper(k), self.centre(k), self.upper(k + 1)],
            (_, 2) => [self.centre(k - 1), self.centre(k), self.upper(k)],
            (_, 3) => [self.centre(k - 1), self.lower(k), self.centre(k)],
            (_, 4) => [self.lower(k), self.lower(k + 1), self.centre(k)],
            _ => unreachable!("validated by TileId::new"),
        };
        let t = Triangle::new(p, q, r).map_err(|e| e.at(id.into()))?;
        Ok(if i < 0 { t.map(Point::mirrored_x) } else { t })
    }

    /// All tiles with `|col| <= cols`, ordered by column then slot.
    pub fn tiles(&self, cols: usize) -> Result<Vec<(TileId, Triangle<T>)>> {
        if cols > self.n_cols {
            return Err(Error::IndexOutOfRange(format!(
                "window of {cols} columns exceeds generated {}",
                self.n_cols
            )));
        }
        let c = cols as i64;
        let mut out = Vec::with_capacity(8 * cols + 2);
        for i in -c..=c {
            for &j in slots(i) {
                out.push((TileId { strip: 0, col: i, slot: j }, self.triangle_at(i, j)?));
            }
        }
        Ok(out)
    }
}

/// Valid slots of a column.
pub fn slots(col: i64) -> &'static [u8] {
    if col == 0 {
        &[1, 4]
    } else {
        &[1, 2, 3, 4]
    }
}

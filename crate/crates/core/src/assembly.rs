//! Stacking sheared copies of one strip tiling into a tiling of the plane.
//!
//! The strip tiling is first stretched vertically by `√3`, so the
//! undistorted tiles become equilateral triangles of side 2 and the strip
//! becomes `R x [-√3, √3]`. Row `k` of the plane occupies
//! `R x [(2k-1)√3, (2k+1)√3]` and holds the base strip sheared by its own
//! parameter, reflected through the x-axis when `k` is odd, and translated
//! by `(t_k, 2k√3)`. The horizontal offsets `t_k` are chosen so that
//! adjacent rows share their boundary vertices.
//!
//! Rows receive shear parameters in the order `0, 1, -1, 2, -2, ...`, i.e.
//! row `k` uses `μ_n` with `n = 1` for `k = 0`, `n = 2k` for `k > 0` and
//! `n = 1 - 2k` for `k < 0`.

use core::ops::RangeInclusive;
use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::congruence::{
    co_sheared_roots, edge_spread, equilateral_shear_set, halfturn_translate_distance,
    nearest_distance, sheared_vs_fixed_roots, sort_dedup, Shape,
};
use crate::error::{Error, Result};
use crate::geom::{Point, Polygonal, TileId, Triangle};
use crate::strip::{deviations, slots, strip_tiling, undistorted_tiling, StripTiling};
use crate::scalar::{lit, sqrt3, Real};

/// Shared boundary vertices may disagree by at most this much.
pub const BOUNDARY_TOL: f64 = 1e-9;

/// Interval from which the strip parameter is drawn, before it is narrowed
/// to keep the strip within the closeness target.
pub const Y0_RANGE: (f64, f64) = (0.001, 0.01);

/// Largest closeness target accepted by [`build_plane`].
pub const MAX_EPSILON: f64 = 0.05;

/// Maps the base strip onto row `k`: shear, then reflect, then translate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StripTransform<T = f64> {
    pub mu: T,
    pub reflected: bool,
    pub translation: Point<T>,
}

impl<T: Real> StripTransform<T> {
    pub fn identity() -> Self {
        Self {
            mu: T::zero(),
            reflected: false,
            translation: Point::origin(),
        }
    }

    pub fn apply(&self, p: Point<T>) -> Point<T> {
        let s = p.sheared(self.mu);
        let r = if self.reflected { s.flipped_y() } else { s };
        r + self.translation
    }

    /// Horizontal offset of the upper boundary vertices relative to the
    /// base's (upper or, if reflected, lower) boundary.
    fn top_offset(&self) -> T {
        let s = self.mu * sqrt3::<T>();
        if self.reflected {
            -s
        } else {
            s
        }
    }

    fn bottom_offset(&self) -> T {
        -self.top_offset()
    }
}

/// Index `n` of the shear parameter used by row `k`.
pub fn shear_index(row: i64) -> usize {
    match row {
        0 => 1,
        k if k > 0 => 2 * k as usize,
        k => (1 - 2 * k) as usize,
    }
}

/// The first `count` rows in shear order `0, 1, -1, 2, -2, ...` as an
/// interval.
pub fn rows_in_order(count: usize) -> Result<RangeInclusive<i64>> {
    if count == 0 {
        return Err(Error::InvalidParameter("row count must be positive".into()));
    }
    let c = count as i64;
    Ok(-((c - 1) / 2)..=c / 2)
}

/// The vertical stretch taking the unit-area strip tiling to the one whose
/// undistorted tiles are equilateral.
pub fn scale_to_equilateral<T: Real>(t: &StripTiling<T>) -> StripTiling<T> {
    t.scaled_vertically(sqrt3())
}

/// Applies the shear `(x, y) -> (x + μ y, y)` to every tile.
pub fn shear<T: Real>(tiles: &[(TileId, Triangle<T>)], mu: T) -> Vec<(TileId, Triangle<T>)> {
    tiles.iter().map(|(id, t)| (*id, t.sheared(mu))).collect()
}

/// Selection of the strip parameter.
#[derive(Debug, Clone, PartialEq)]
pub struct BaseChoice<T = f64> {
    pub y0: T,
    /// The strip tiling after the vertical stretch.
    pub base: StripTiling<T>,
    pub attempts: usize,
    /// Largest coordinate deviation from the undistorted strip on the window.
    pub max_deviation: T,
    /// Smallest distance between two window tiles up to translation and
    /// half-turn.
    pub min_distance: T,
}

/// Draws `y0` from the seeded generator until the stretched strip stays
/// within `epsilon` of the undistorted one on `|col| <= window_cols` and its
/// tiles are pairwise distinct up to translation and half-turn.
///
/// The draw is uniform on `[lo, hi]` with `hi = min(0.01, 0.9 ε/√3)` and
/// `lo = min(0.001, hi/2)`: the centre vertex moves by `√3 y0`, so larger
/// values could not be `ε`-close.
pub fn choose_base<T: Real>(epsilon: T, seed: u64, window_cols: usize) -> Result<BaseChoice<T>> {
    check_epsilon(epsilon)?;
    let hi = lit::<T>(Y0_RANGE.1).min(lit::<T>(0.9) * epsilon / sqrt3());
    let lo = lit::<T>(Y0_RANGE.0).min(hi * lit(0.5));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let undistorted = scale_to_equilateral(&undistorted_tiling::<T>(window_cols)?);
    const ATTEMPTS: usize = 100;
    for attempt in 1..=ATTEMPTS {
        let u: f64 = rng.random_range(0.0..=1.0);
        let y0 = lo + (hi - lo) * lit(u);
        let raw = strip_tiling(y0, window_cols)?;
        deviations(&raw)?;
        let base = scale_to_equilateral(&raw);
        let max_deviation = strip_deviation(&base, &undistorted);
        if !(max_deviation < epsilon) {
            continue;
        }
        let tiles = base.tiles(window_cols)?;
        if tiles.iter().any(|(_, t)| edge_spread(t) <= lit(crate::quadsplit::EQUILATERAL_TOL)) {
            continue;
        }
        let min_distance = min_halfturn_distance(&tiles);
        if min_distance > lit(BOUNDARY_TOL) {
            return Ok(BaseChoice {
                y0,
                base,
                attempts: attempt,
                max_deviation,
                min_distance,
            });
        }
    }
    Err(Error::ExhaustedRetries {
        index: 0,
        attempts: ATTEMPTS,
    })
}

fn check_epsilon<T: Real>(epsilon: T) -> Result<()> {
    if !(epsilon > T::zero() && epsilon.is_finite()) {
        return Err(Error::InvalidParameter(format!("epsilon = {epsilon} must be positive")));
    }
    Ok(())
}

fn check_plane_epsilon<T: Real>(epsilon: T) -> Result<()> {
    if !(epsilon > T::zero() && epsilon <= lit(MAX_EPSILON)) {
        return Err(Error::InvalidParameter(format!(
            "epsilon = {epsilon} outside (0, {MAX_EPSILON}]"
        )));
    }
    Ok(())
}

/// Largest coordinate difference between corresponding vertices.
pub fn strip_deviation<T: Real>(t: &StripTiling<T>, reference: &StripTiling<T>) -> T {
    let n = t.n_cols().min(reference.n_cols());
    let mut d = T::zero();
    for i in 0..=n {
        d = d.max(t.centre(i).max_coord_diff(reference.centre(i)));
    }
    for i in 1..=n + 1 {
        d = d.max(t.upper(i).max_coord_diff(reference.upper(i)));
        d = d.max(t.lower(i).max_coord_diff(reference.lower(i)));
    }
    d
}

fn min_halfturn_distance<T: Real>(tiles: &[(TileId, Triangle<T>)]) -> T {
    (0..tiles.len())
        .into_par_iter()
        .map(|i| {
            tiles[i + 1..]
                .iter()
                .map(|(_, u)| halfturn_translate_distance(&tiles[i].1, u))
                .fold(T::infinity(), T::min)
        })
        .reduce(T::infinity, T::min)
}

/// Tuning of [`select_shears`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShearOptions<T = f64> {
    /// Required distance from every bad root.
    pub clearance: T,
    /// Required congruence distance between any two tiles involving the new
    /// row.
    pub min_separation: T,
    pub max_attempts: usize,
}

impl<T: Real> Default for ShearOptions<T> {
    fn default() -> Self {
        Self {
            clearance: lit(1e-9),
            min_separation: lit(1e-9),
            max_attempts: 1000,
        }
    }
}

/// Bound on `|μ_n|`: `2^-n ε / (2√3)`.
pub fn shear_bound<T: Real>(n: usize, epsilon: T) -> T {
    epsilon / (lit::<T>(2.0) * sqrt3::<T>()) * lit::<T>(0.5).powi(n as i32)
}

/// Draws `count` shear parameters and certifies each against the window.
///
/// `μ_n` is uniform on the open interval of radius [`shear_bound`] and is
/// accepted when it keeps the given clearance from
/// * every shear at which two window tiles of its own row could be congruent,
/// * every shear at which one of its tiles could be congruent to a tile of a
///   row fixed earlier,
/// * every shear at which one of its tiles could be equilateral,
///
/// and the resulting tiles are directly checked to be pairwise incongruent
/// with each other and with the earlier rows.
pub fn select_shears<T: Real>(
    base: &StripTiling<T>,
    count: usize,
    epsilon: T,
    seed: u64,
    window_cols: usize,
) -> Result<Vec<T>> {
    select_shears_with(base, count, epsilon, seed, window_cols, &ShearOptions::default())
}

pub fn select_shears_with<T: Real>(
    base: &StripTiling<T>,
    count: usize,
    epsilon: T,
    seed: u64,
    window_cols: usize,
    opts: &ShearOptions<T>,
) -> Result<Vec<T>> {
    check_epsilon(epsilon)?;
    let tiles: Vec<Triangle<T>> = base.tiles(window_cols)?.into_iter().map(|(_, t)| t).collect();
    let own = own_row_roots(&tiles)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(1);

    let mut shears: Vec<T> = Vec::with_capacity(count);
    let mut fixed_roots: Vec<T> = Vec::new();
    let mut fixed_shapes: Vec<Shape<T>> = Vec::new();
    for n in 1..=count {
        let bound = shear_bound(n, epsilon);
        let mut chosen = None;
        for _ in 0..opts.max_attempts {
            let u: f64 = rng.random_range(-1.0..1.0);
            let mu = bound * lit(u);
            if !(mu.abs() < bound) {
                continue;
            }
            if nearest_distance(&own, mu) < opts.clearance
                || nearest_distance(&fixed_roots, mu) < opts.clearance
            {
                continue;
            }
            let shapes: Vec<Shape<T>> = tiles.iter().map(|t| Shape::new(&t.sheared(mu))).collect();
            if min_cross_distance(&shapes, &fixed_shapes) > opts.min_separation {
                chosen = Some((mu, shapes));
                break;
            }
        }
        let (mu, shapes) = chosen.ok_or(Error::ExhaustedRetries {
            index: n,
            attempts: opts.max_attempts,
        })?;
        let sheared: Vec<Triangle<T>> = tiles.iter().map(|t| t.sheared(mu)).collect();
        fixed_roots.extend(fixed_row_roots(&tiles, &sheared));
        sort_dedup(&mut fixed_roots);
        fixed_shapes.extend(shapes);
        shears.push(mu);
    }
    Ok(shears)
}

/// Bad shears for tiles of one row, including the equilateral ones.
fn own_row_roots<T: Real>(tiles: &[Triangle<T>]) -> Result<Vec<T>> {
    let per_tile: Vec<Result<Vec<T>>> = (0..tiles.len())
        .into_par_iter()
        .map(|i| {
            let mut r = equilateral_shear_set(&tiles[i])?.roots;
            for u in &tiles[i + 1..] {
                r.extend(co_sheared_roots(&tiles[i], u)?.roots);
            }
            Ok(r)
        })
        .collect();
    let mut roots = Vec::new();
    for r in per_tile {
        roots.extend(r?);
    }
    sort_dedup(&mut roots);
    Ok(roots)
}

/// Shears at which a tile of the base could become congruent to one of the
/// fixed tiles.
fn fixed_row_roots<T: Real>(tiles: &[Triangle<T>], fixed: &[Triangle<T>]) -> Vec<T> {
    tiles
        .par_iter()
        .flat_map_iter(|t| {
            fixed
                .iter()
                .flat_map(|u| sheared_vs_fixed_roots(t, u).roots)
                .collect::<Vec<_>>()
        })
        .collect()
}

/// Smallest congruence distance among `new` and between `new` and `old`.
fn min_cross_distance<T: Real>(new: &[Shape<T>], old: &[Shape<T>]) -> T {
    (0..new.len())
        .into_par_iter()
        .map(|i| {
            new[i + 1..]
                .iter()
                .chain(old)
                .map(|s| new[i].distance(s))
                .fold(T::infinity(), T::min)
        })
        .reduce(T::infinity, T::min)
}

/// Rows of sheared strips stacked into a window of the plane.
#[derive(Debug, Clone, PartialEq)]
pub struct PlaneTiling<T = f64> {
    /// The stretched strip tiling every row is a copy of.
    pub base: StripTiling<T>,
    /// `μ_1, μ_2, ...`
    pub shears: Vec<T>,
    pub window_cols: usize,
    transforms: BTreeMap<i64, StripTransform<T>>,
}

/// Stacks the rows in `rows` (which must contain 0) and checks that
/// adjacent rows agree on their common boundary.
pub fn stack_plane<T: Real>(
    base: &StripTiling<T>,
    shears: &[T],
    rows: RangeInclusive<i64>,
    window_cols: usize,
) -> Result<PlaneTiling<T>> {
    if !rows.contains(&0) {
        return Err(Error::InvalidParameter("row range must contain row 0".into()));
    }
    if window_cols > base.n_cols() {
        return Err(Error::IndexOutOfRange(format!(
            "window of {window_cols} columns exceeds generated {}",
            base.n_cols()
        )));
    }
    let needed = rows.clone().map(shear_index).max().unwrap_or(1);
    if shears.len() < needed {
        return Err(Error::InvalidParameter(format!(
            "{} shear parameters given, rows need {needed}",
            shears.len()
        )));
    }
    let step = lit::<T>(2.0) * sqrt3::<T>();
    let make = |k: i64, tx: T| StripTransform {
        mu: shears[shear_index(k) - 1],
        reflected: k.rem_euclid(2) == 1,
        translation: Point::new(tx, step * lit(k as f64)),
    };
    let mut transforms = BTreeMap::new();
    transforms.insert(0, make(0, T::zero()));
    for k in 1..=*rows.end() {
        let below = transforms[&(k - 1)];
        let probe = make(k, T::zero());
        let tx = below.translation.x + below.top_offset() - probe.bottom_offset();
        transforms.insert(k, make(k, tx));
    }
    for k in (*rows.start()..0).rev() {
        let above = transforms[&(k + 1)];
        let probe = make(k, T::zero());
        let tx = above.translation.x + above.bottom_offset() - probe.top_offset();
        transforms.insert(k, make(k, tx));
    }
    let plane = PlaneTiling {
        base: base.clone(),
        shears: shears.to_vec(),
        window_cols,
        transforms,
    };
    plane.check_boundaries()?;
    Ok(plane)
}

impl<T: Real> PlaneTiling<T> {
    /// The periodic tiling by equilateral triangles with the same rows and
    /// columns.
    pub fn periodic(rows: RangeInclusive<i64>, window_cols: usize) -> Result<Self> {
        let base = scale_to_equilateral(&undistorted_tiling::<T>(window_cols)?);
        let needed = rows.clone().map(shear_index).max().unwrap_or(1);
        stack_plane(&base, &vec![T::zero(); needed], rows, window_cols)
    }

    pub fn rows(&self) -> RangeInclusive<i64> {
        let lo = *self.transforms.keys().next().expect("row 0 present");
        let hi = *self.transforms.keys().next_back().expect("row 0 present");
        lo..=hi
    }

    pub fn transform(&self, row: i64) -> Option<&StripTransform<T>> {
        self.transforms.get(&row)
    }

    /// `Σ 2√3 |μ_n|` over the shears in use.
    pub fn shear_budget(&self) -> T {
        let used = self.rows().map(shear_index).max().unwrap_or(1);
        self.shears[..used]
            .iter()
            .map(|m| lit::<T>(2.0) * sqrt3::<T>() * m.abs())
            .sum()
    }

    pub fn tile(&self, id: TileId) -> Result<Triangle<T>> {
        let tr = self
            .transforms
            .get(&id.strip)
            .ok_or_else(|| Error::IndexOutOfRange(format!("no row {}", id.strip)))?;
        if id.col.unsigned_abs() as usize > self.window_cols {
            return Err(Error::IndexOutOfRange(format!("no tile {id} in the window")));
        }
        Ok(self.base.triangle_at(id.col, id.slot)?.map(|p| tr.apply(p)))
    }

    /// Every tile of the window, ordered by row, column and slot.
    pub fn tiles(&self) -> Result<Vec<(TileId, Triangle<T>)>> {
        self.collect(self.rows(), |_| true)
    }

    /// Tiles of the given rows whose bounding box meets `x_lo <= x <= x_hi`.
    pub fn window(&self, x_range: (T, T), rows: RangeInclusive<i64>) -> Result<Vec<(TileId, Triangle<T>)>> {
        let own = self.rows();
        if rows.is_empty() || x_range.0 > x_range.1 {
            return Ok(Vec::new());
        }
        if *rows.start() < *own.start() || *rows.end() > *own.end() {
            return Err(Error::IndexOutOfRange(format!(
                "rows {}..={} outside generated {}..={}",
                rows.start(),
                rows.end(),
                own.start(),
                own.end()
            )));
        }
        self.collect(rows, |t| {
            let (lo, hi) = t.bbox();
            hi.x >= x_range.0 && lo.x <= x_range.1
        })
    }

    fn collect(
        &self,
        rows: RangeInclusive<i64>,
        keep: impl Fn(&Triangle<T>) -> bool,
    ) -> Result<Vec<(TileId, Triangle<T>)>> {
        let c = self.window_cols as i64;
        let mut out = Vec::new();
        for k in rows {
            for col in -c..=c {
                for &slot in slots(col) {
                    let id = TileId { strip: k, col, slot };
                    let t = self.tile(id)?;
                    if keep(&t) {
                        out.push((id, t));
                    }
                }
            }
        }
        Ok(out)
    }

    /// Boundary vertices shared by rows `k` and `k + 1`, as seen from each.
    fn boundary(&self, k: i64) -> (Vec<Point<T>>, Vec<Point<T>>) {
        let (lo, hi) = (&self.transforms[&k], &self.transforms[&(k + 1)]);
        let n = self.window_cols + 1;
        let side = |tr: &StripTransform<T>, top: bool| -> Vec<Point<T>> {
            // the base's upper boundary ends up on top unless reflected
            let upper = top != tr.reflected;
            let mut v: Vec<Point<T>> = (1..=n)
                .flat_map(|i| {
                    let p = if upper { self.base.upper(i) } else { self.base.lower(i) };
                    [p, p.mirrored_x()]
                })
                .map(|p| tr.apply(p))
                .collect();
            v.sort_by(|a, b| a.x.partial_cmp(&b.x).unwrap_or(core::cmp::Ordering::Equal));
            v
        };
        (side(lo, true), side(hi, false))
    }

    fn check_boundaries(&self) -> Result<()> {
        let rows = self.rows();
        for k in *rows.start()..*rows.end() {
            let (a, b) = self.boundary(k);
            let dev = a
                .iter()
                .zip(&b)
                .map(|(p, q)| p.max_coord_diff(*q))
                .fold(T::zero(), T::max);
            if !(dev <= lit(BOUNDARY_TOL)) {
                return Err(Error::BoundaryMismatch {
                    lower: k,
                    upper: k + 1,
                    deviation: dev.to_f64().unwrap_or(f64::NAN),
                });
            }
        }
        Ok(())
    }
}

/// A plane window together with the choices that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct PlaneBuild<T = f64> {
    pub choice: BaseChoice<T>,
    pub plane: PlaneTiling<T>,
    pub epsilon: T,
    pub seed: u64,
}

/// Runs parameter choice, shear selection and stacking for the first
/// `rows` rows and columns `|col| <= cols`.
pub fn build_plane<T: Real>(epsilon: T, seed: u64, rows: usize, cols: usize) -> Result<PlaneBuild<T>> {
    check_plane_epsilon(epsilon)?;
    if cols == 0 {
        return Err(Error::InvalidParameter("column count must be positive".into()));
    }
    let range = rows_in_order(rows)?;
    let choice = choose_base(epsilon, seed, cols)?;
    let shears = select_shears(&choice.base, rows, epsilon, seed, cols)?;
    let plane = stack_plane(&choice.base, &shears, range, cols)?;
    Ok(PlaneBuild {
        choice,
        plane,
        epsilon,
        seed,
    })
}

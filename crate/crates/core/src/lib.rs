//! Convex tilings of the plane by unit-area, unit-perimeter tiles that are
//! pairwise non-congruent.
//!
//! The pipeline: distorted strip tilings ([`strip`]) are sheared and stacked
//! into a plane tiling by unit-area triangles ([`assembly`]), every triangle
//! is split into three quadrangles of equal area and perimeter
//! ([`quadsplit`]), and the results are checked numerically ([`verify`]).
//! [`congruence`] provides the shape signatures that the selection and the
//! checks rely on.
//!
//! Everything is generic over [`Real`]; the aliases at the crate root fix the
//! scalar to `f64`.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop, clippy::type_complexity)]

pub mod assembly;
pub mod congruence;
pub mod error;
pub mod geom;
pub mod newton;
pub mod quadsplit;
pub mod scalar;
pub mod strip;
pub mod verify;

pub use error::{Error, Result};
pub use geom::{Corner, Polygonal, TileId, TileKey};
pub use scalar::Real;

pub type Point = geom::Point<f64>;
pub type Triangle = geom::Triangle<f64>;
pub type Quadrangle = geom::Quadrangle<f64>;
pub type Polygon = geom::Polygon<f64>;
pub type StripTiling = strip::StripTiling<f64>;
pub type DeviationSeries = strip::DeviationSeries<f64>;

//! Exact rational geometry: hulls, polars, triangulations and simplex integrals.

pub mod clip;
pub mod polytope;
pub mod rational;
pub mod simplex;

pub use clip::{clip_cone, clip_cone_f64, FPolygon};
pub use polytope::{Facet, HalfSpace, Polygon, Polytope, Polytope3};
pub use rational::{fmt_q, parse_q, pt, q, qr, to_f64, Matrix, Point, Q};
pub use simplex::{integrate_affine_power, Affine, Simplex};

use crate::error::{Error, Result};

/// Convex hull of at least four affinely independent points in `R^3`.
pub fn convex_hull_3d(points: &[Point]) -> Result<Polytope3> {
    if points.iter().any(|p| p.len() != 3) {
        return Err(Error::InvalidInput("expected 3-vectors".into()));
    }
    Polytope::hull(points)
}

pub fn polar_polytope3(p: &Polytope3) -> Result<Polytope3> {
    p.polar()
}

pub fn polar_polygon(p: &Polygon) -> Result<Polygon> {
    p.polar()
}

pub fn triangulate(p: &Polytope) -> Vec<Simplex> {
    p.triangulate()
}

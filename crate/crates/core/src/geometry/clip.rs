//! Intersections of planar polygons with angular cones `R_+ u + R_+ v`.

use num_traits::{Signed, Zero};

use super::polytope::{HalfSpace, Polygon};
use super::rational::*;
use crate::error::{Error, Result};

fn cross(u: &[Q], v: &[Q]) -> Q {
    &u[0] * &v[1] - &u[1] * &v[0]
}

/// Half-planes whose intersection is the cone `R_+ u + R_+ v`.
pub fn cone_halfspaces(u: &[Q], v: &[Q]) -> Result<[HalfSpace; 2]> {
    if is_zero_vec(u) || is_zero_vec(v) {
        return Err(Error::EmptyCone);
    }
    if !cross(u, v).is_positive() {
        // v = u (or a positive multiple), antiparallel, or past the half-turn
        return Err(Error::EmptyCone);
    }
    Ok([
        // cross(u, x) >= 0
        HalfSpace::new(vec![u[1].clone(), -u[0].clone()], Q::zero()),
        // cross(x, v) >= 0
        HalfSpace::new(vec![-v[1].clone(), v[0].clone()], Q::zero()),
    ])
}

/// Exact `P ∩ C(u, v)` for rational directions with `v` strictly inside the
/// open half-turn counterclockwise from `u`.
pub fn clip_cone(p: &Polygon, u: &[Q], v: &[Q]) -> Result<Polygon> {
    let hs = cone_halfspaces(u, v)?;
    p.clip(&hs)
}

/// Floating-point convex polygon, counterclockwise.
pub type FPolygon = Vec<[f64; 2]>;

pub fn polygon_to_f64(p: &Polygon) -> FPolygon {
    p.vertices().iter().map(|v| [to_f64(&v[0]), to_f64(&v[1])]).collect()
}

/// Sutherland–Hodgman step: keeps `{x : n · x <= c}`.
pub fn clip_halfplane_f64(poly: &[[f64; 2]], n: [f64; 2], c: f64) -> FPolygon {
    let mut out = Vec::with_capacity(poly.len() + 1);
    let k = poly.len();
    for i in 0..k {
        let a = poly[i];
        let b = poly[(i + 1) % k];
        let sa = c - (n[0] * a[0] + n[1] * a[1]);
        let sb = c - (n[0] * b[0] + n[1] * b[1]);
        if sa >= 0.0 {
            out.push(a);
        }
        if (sa >= 0.0) != (sb >= 0.0) {
            let t = sa / (sa - sb);
            out.push([a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])]);
        }
    }
    out
}

/// Float `P ∩ C(u, v)`; requires `cross(u, v) > 0`.
pub fn clip_cone_f64(poly: &[[f64; 2]], u: [f64; 2], v: [f64; 2]) -> FPolygon {
    let p = clip_halfplane_f64(poly, [u[1], -u[0]], 0.0);
    clip_halfplane_f64(&p, [-v[1], v[0]], 0.0)
}

pub fn area_f64(poly: &[[f64; 2]]) -> f64 {
    let k = poly.len();
    if k < 3 {
        return 0.0;
    }
    (0..k)
        .map(|i| {
            let a = poly[i];
            let b = poly[(i + 1) % k];
            a[0] * b[1] - a[1] * b[0]
        })
        .sum::<f64>()
        / 2.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::polytope::Polytope;

    #[test]
    fn square_first_quadrant() {
        let sq = Polytope::cube(2, &q(1)).unwrap();
        let c = clip_cone(&sq, &pt(&[1, 0]), &pt(&[0, 1])).unwrap();
        let unit = Polytope::hull(&[pt(&[0, 0]), pt(&[1, 0]), pt(&[0, 1]), pt(&[1, 1])]).unwrap();
        assert_eq!(c, unit);
    }

    #[test]
    fn equal_directions_are_rejected() {
        let sq = Polytope::cube(2, &q(1)).unwrap();
        assert_eq!(clip_cone(&sq, &pt(&[1, 0]), &pt(&[1, 0])), Err(Error::EmptyCone));
        assert_eq!(clip_cone(&sq, &pt(&[1, 0]), &pt(&[-1, 0])), Err(Error::EmptyCone));
    }

    #[test]
    fn opening_cone_converges_to_half_plane() {
        let sq = Polytope::cube(2, &q(1)).unwrap();
        let mut last = q(0);
        for k in 1..8 {
            let eps = qr(1, 1 << k);
            let v = vec![q(-1), eps.clone()];
            let a = clip_cone(&sq, &pt(&[1, 0]), &v).unwrap().volume();
            if k > 1 {
                assert!(a > last);
            }
            last = a;
        }
        // area(upper half) = 2; the missing wedge has area eps/2
        assert!(2.0 - to_f64(&last) < 0.01 && last < q(2));
    }

    #[test]
    fn float_clip_matches_exact() {
        let sq = Polytope::cube(2, &q(1)).unwrap();
        let c = clip_cone(&sq, &pt(&[2, 1]), &pt(&[-1, 3])).unwrap();
        let f = clip_cone_f64(&polygon_to_f64(&sq), [2.0, 1.0], [-1.0, 3.0]);
        assert!((area_f64(&f) - to_f64(&c.volume())).abs() < 1e-14);
    }
}

//! Floating-point integrals of `f^q` for real `q`, used for non-integer
//! exponents and angular cones. Along each ray `f` is piecewise affine, so the
//! radial integral has a closed form; the angular integral is done with
//! adaptive Gauss–Legendre on sectors between breakpoint directions.

use std::f64::consts::PI;
use std::sync::OnceLock;

use gauss_quad::GaussLegendre;

use crate::functions::{PLConcaveFn, PLConvexFn};
use crate::geometry::rational::{point_to_f64, to_f64};
use crate::transforms::{breakpoints, recession_directions, subdivision_vertices};

/// `f` restricted to a ray is `alpha * r + beta` on `[r0, r1]`.
#[derive(Clone, Copy, Debug)]
struct Segment {
    r0: f64,
    r1: f64,
    alpha: f64,
    beta: f64,
}

/// Float copy of a PL function with the data needed for ray profiles.
#[derive(Clone, Debug)]
pub struct FloatPL {
    n: usize,
    concave: bool,
    pieces: Vec<(Vec<f64>, f64)>,
    /// Bounding half-spaces `h · x <= e` (support or domain).
    bounds: Vec<(Vec<f64>, f64)>,
    /// Directions where the ray profile changes combinatorially.
    angles: Vec<f64>,
}

fn angles_of(points: impl Iterator<Item = Vec<f64>>) -> Vec<f64> {
    let mut a: Vec<f64> = points
        .filter(|p| p.iter().any(|c| *c != 0.0))
        .map(|p| p[1].atan2(p[0]).rem_euclid(2.0 * PI))
        .collect();
    a.sort_by(f64::total_cmp);
    a.dedup_by(|x, y| (*x - *y).abs() < 1e-15);
    a
}

impl FloatPL {
    pub fn from_concave(f: &PLConcaveFn) -> Self {
        let pieces = f.pieces().iter().map(|p| (point_to_f64(&p.coeffs), to_f64(&p.constant))).collect();
        let bounds = f.support().halfspaces().iter().map(|h| (point_to_f64(&h.normal), to_f64(&h.offset))).collect();
        let angles = if f.n() == 2 {
            angles_of(subdivision_vertices(f).iter().map(|v| point_to_f64(v)))
        } else {
            Vec::new()
        };
        Self { n: f.n(), concave: true, pieces, bounds, angles }
    }

    pub fn from_convex(f: &PLConvexFn) -> Self {
        let pieces = f.pieces().iter().map(|p| (point_to_f64(&p.coeffs), to_f64(&p.constant))).collect();
        let bounds = f
            .domain()
            .map(|d| d.halfspaces().iter().map(|h| (point_to_f64(&h.normal), to_f64(&h.offset))).collect())
            .unwrap_or_default();
        let angles = if f.n() == 2 {
            let pts = breakpoints(f).into_iter().chain(recession_directions(f));
            angles_of(pts.map(|v| point_to_f64(&v)))
        } else {
            Vec::new()
        };
        Self { n: f.n(), concave: false, pieces, bounds, angles }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        let inside = self.bounds.iter().all(|(h, e)| dot(h, x) <= e + 1e-12);
        let vals = self.pieces.iter().map(|(c, d)| dot(c, x) + d);
        match (self.concave, inside) {
            (true, false) => 0.0,
            (true, true) => vals.fold(f64::INFINITY, f64::min).max(0.0),
            (false, false) => f64::INFINITY,
            (false, true) => vals.fold(f64::NEG_INFINITY, f64::max),
        }
    }

    fn ray(&self, e: &[f64]) -> Vec<Segment> {
        let reach = self
            .bounds
            .iter()
            .filter_map(|(h, off)| {
                let he = dot(h, e);
                (he > 0.0).then(|| off / he)
            })
            .fold(f64::INFINITY, f64::min);
        let lines: Vec<(f64, f64)> = self.pieces.iter().map(|(c, d)| (dot(c, e), *d)).collect();
        let mut cuts = vec![0.0];
        for i in 0..lines.len() {
            for j in i + 1..lines.len() {
                let ds = lines[i].0 - lines[j].0;
                if ds != 0.0 {
                    let r = (lines[j].1 - lines[i].1) / ds;
                    if r > 0.0 && r < reach {
                        cuts.push(r);
                    }
                }
            }
        }
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();
        cuts.push(reach);
        let pick = |r: f64| {
            let vals = lines.iter().map(|(s, d)| (s * r + d, *s, *d));
            if self.concave {
                vals.min_by(|a, b| a.0.total_cmp(&b.0)).unwrap()
            } else {
                vals.max_by(|a, b| a.0.total_cmp(&b.0)).unwrap()
            }
        };
        cuts.windows(2)
            .map(|w| {
                let mid = if w[1].is_finite() { 0.5 * (w[0] + w[1]) } else { w[0] + 1.0 };
                let (_, alpha, beta) = pick(mid);
                Segment { r0: w[0], r1: w[1], alpha, beta }
            })
            .collect()
    }

    /// `∫_0^∞ r^w f(r e)^q dr` with `w ∈ {0, 1}`.
    fn ray_integral(&self, e: &[f64], w: i32, q: f64) -> f64 {
        self.ray(e).iter().map(|s| segment_integral(*s, w, q)).sum()
    }

    /// Polar angles in `[0, 2π)` across which the ray profile changes.
    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    /// `∫_0^∞ r f(r e_θ)^q dr`, the angular density of `∫ f^q`.
    pub fn angular_density(&self, q: f64, theta: f64) -> f64 {
        self.ray_integral(&[theta.cos(), theta.sin()], 1, q)
    }

    /// Sector integral over `[a, b]` without splitting at breakpoint
    /// angles; accurate when no breakpoint lies strictly inside.
    pub fn smooth_sector(&self, q: f64, a: f64, b: f64) -> f64 {
        if b <= a {
            return 0.0;
        }
        adaptive(&|t: f64| self.angular_density(q, t), a, b, 0)
    }

    /// `∫ f^q` over the whole space.
    pub fn integral(&self, q: f64) -> f64 {
        if self.n == 1 {
            return 2.0 * self.ray_integral(&[1.0], 0, q);
        }
        self.sector_integral(q, 0.0, 2.0 * PI)
    }

    /// `∫ f^q` over the directions `θ ∈ [a, b]`, `b - a <= 2π`.
    pub fn sector_integral(&self, q: f64, a: f64, b: f64) -> f64 {
        assert_eq!(self.n, 2, "sector integrals are planar");
        let mut cuts = vec![a];
        for k in -1..=2 {
            for &t in &self.angles {
                let t = t + 2.0 * PI * k as f64;
                if t > a && t < b {
                    cuts.push(t);
                }
            }
        }
        cuts.sort_by(f64::total_cmp);
        cuts.push(b);
        let g = |t: f64| self.ray_integral(&[t.cos(), t.sin()], 1, q);
        cuts.windows(2).filter(|w| w[1] > w[0]).map(|w| adaptive(&g, w[0], w[1], 0)).sum()
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn rules() -> &'static (GaussLegendre, GaussLegendre) {
    static RULES: OnceLock<(GaussLegendre, GaussLegendre)> = OnceLock::new();
    RULES.get_or_init(|| (GaussLegendre::new(12).expect("degree >= 2"), GaussLegendre::new(24).expect("degree >= 2")))
}

fn adaptive(g: &dyn Fn(f64) -> f64, a: f64, b: f64, depth: u32) -> f64 {
    let (lo, hi) = rules();
    let coarse = lo.integrate(a, b, g);
    let fine = hi.integrate(a, b, g);
    if depth >= 40 || (fine - coarse).abs() <= 1e-14 * fine.abs().max(1e-300) {
        return fine;
    }
    let mid = 0.5 * (a + b);
    adaptive(g, a, mid, depth + 1) + adaptive(g, mid, b, depth + 1)
}

/// `∫_{r0}^{r1} r^w (beta + alpha r)^q dr`, `r1` possibly infinite.
fn segment_integral(s: Segment, w: i32, q: f64) -> f64 {
    let u0 = s.beta + s.alpha * s.r0;
    let len = s.r1 - s.r0;
    if len <= 0.0 {
        return 0.0;
    }
    if s.r1.is_infinite() {
        // convergent tails only: alpha > 0 and q < -(w + 1)
        if s.alpha <= 0.0 || q >= -(w as f64) - 1.0 {
            return f64::INFINITY;
        }
        let a = s.alpha;
        let t0 = u0.powf(q + 1.0) / (a * (-q - 1.0));
        return if w == 0 { t0 } else { s.r0 * t0 + u0.powf(q + 2.0) / (a * a * (q + 1.0) * (q + 2.0)) };
    }
    let u1 = s.beta + s.alpha * s.r1;
    let umax = u0.max(u1);
    if umax <= 0.0 {
        return 0.0;
    }
    let rho = (s.alpha * len).abs() / u0.min(u1).max(0.0).max(1e-300);
    let resonant = (q + 1.0).abs() < 1e-9 || (q + 2.0).abs() < 1e-9;
    if rho < 0.1 || resonant {
        let (_, hi) = rules();
        return hi.integrate(s.r0, s.r1, |r| r.powi(w) * (s.beta + s.alpha * r).max(0.0).powf(q));
    }
    // shifted variable r = r0 + t, u = u0 + alpha t
    let a = s.alpha;
    let p1 = |u: f64| if u <= 0.0 { 0.0 } else { u.powf(q + 1.0) };
    let p2 = |u: f64| if u <= 0.0 { 0.0 } else { u.powf(q + 2.0) };
    let i0 = (p1(u1) - p1(u0)) / (a * (q + 1.0));
    if w == 0 {
        return i0;
    }
    let i1 = ((p2(u1) - p2(u0)) / (q + 2.0) - u0 * (p1(u1) - p1(u0)) / (q + 1.0)) / (a * a);
    s.r0 * i0 + i1
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functions::named::{make_named, parse_named};
    use crate::functions::Base;

    fn fl(n: usize, s: &str) -> FloatPL {
        match make_named(n, &parse_named(n, s).unwrap()).unwrap() {
            Base::Concave(f) => FloatPL::from_concave(&f),
            Base::Convex(f) => FloatPL::from_convex(&f),
        }
    }

    #[test]
    fn segment_closed_forms() {
        // ∫_0^1 r (1 - r)^2.5 dr = B(2, 3.5) = 1 / (3.5 * 4.5)
        let s = Segment { r0: 0.0, r1: 1.0, alpha: -1.0, beta: 1.0 };
        assert!((segment_integral(s, 1, 2.5) - 1.0 / (3.5 * 4.5)).abs() < 1e-15);
        // ∫_1^∞ r^{-4} dr = 1/3
        let s = Segment { r0: 1.0, r1: f64::INFINITY, alpha: 1.0, beta: 0.0 };
        assert!((segment_integral(s, 0, -4.0) - 1.0 / 3.0).abs() < 1e-15);
        let nearly_flat = Segment { r0: 0.0, r1: 2.0, alpha: 1e-9, beta: 1.0 };
        assert!((segment_integral(nearly_flat, 1, 3.0) - 2.0).abs() < 1e-7);
    }

    #[test]
    fn tent_and_inverse_powers() {
        // ∫ (1 - ‖x‖_1)_+^p = 4 / ((p + 1)(p + 2))
        let p = 2.5;
        let v = fl(2, "tent:l1").integral(p);
        assert!((v - 4.0 / ((p + 1.0) * (p + 2.0))).abs() < 1e-12);
        // ∫ max(1, ‖x‖_∞)^{-m} = 4m / (m - 2)
        let m = 3.5;
        let v = fl(2, "max-one-norm:inf").integral(-m);
        assert!((v / (4.0 * m / (m - 2.0)) - 1.0).abs() < 1e-12);
        // ∫ (1 + |x|)^{-m} = 2 / (m - 1)
        let v = fl(1, "one-plus-norm:l1").integral(-m);
        assert!((v - 2.0 / (m - 1.0)).abs() < 1e-14);
    }

    #[test]
    fn quadrant_of_square() {
        let f = fl(2, "indicator");
        assert!((f.sector_integral(3.0, 0.0, PI / 2.0) - 1.0).abs() < 1e-13);
    }
}

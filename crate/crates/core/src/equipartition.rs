//! Linear changes of basis after which the four quadrant masses of `f^m` and
//! `f^{m-1}` (of `f^{-m}` and `f^{-(m-1)}` for convex `f`) are all equal.
//!
//! For a direction `u`, `v(u)` is the direction with `∫_{C(u, v)} f^m` equal
//! to a quarter of the total, and `g(u) = ∫_{C(u, v(u))} f^{m-1} - ¼ ∫ f^{m-1}`
//! satisfies `g(v(u)) = -g(u)`, so a sign change is bracketed within a
//! half-turn and refined by bisection.

use std::f64::consts::PI;

use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::functions::{Base, PLConvexFn};
use crate::geometry::clip::{area_f64, clip_cone_f64, polygon_to_f64, FPolygon};
use crate::geometry::polytope::{HalfSpace, Polytope};
use crate::geometry::rational::*;
use crate::integrals::{quadrant_cones, quadrant_integrals, FloatPL};

pub type Dir = [f64; 2];

const SCAN: usize = 720;
const INNER_TOL: f64 = 1e-14;
const SNAP_BITS: u32 = 20;

fn dir(theta: f64) -> Dir {
    [theta.cos(), theta.sin()]
}

fn angle(u: Dir) -> f64 {
    u[1].atan2(u[0])
}

/// Angles `(a, b)` of `C(u, v)` with `a < b < a + π`.
fn cone_angles(u: Dir, v: Dir) -> Result<(f64, f64)> {
    let cross = u[0] * v[1] - u[1] * v[0];
    if cross <= 0.0 || u == [0.0, 0.0] || v == [0.0, 0.0] {
        return Err(Error::EmptyCone);
    }
    let a = angle(u);
    let mut b = angle(v);
    while b <= a {
        b += 2.0 * PI;
    }
    Ok((a, b))
}

/// `∫_0^θ` of the angular density of `∫ f^q`, tabulated at breakpoint angles.
#[derive(Clone, Debug)]
struct Cumulative {
    f: FloatPL,
    q: f64,
    cuts: Vec<f64>,
    acc: Vec<f64>,
}

impl Cumulative {
    fn new(f: FloatPL, q: f64) -> Self {
        let mut cuts = vec![0.0];
        cuts.extend(f.angles().iter().copied().filter(|t| *t > 0.0 && *t < 2.0 * PI));
        cuts.push(2.0 * PI);
        let mut acc = vec![0.0];
        for w in cuts.windows(2) {
            let last = *acc.last().expect("non-empty");
            acc.push(last + f.smooth_sector(q, w[0], w[1]));
        }
        Self { f, q, cuts, acc }
    }

    fn total(&self) -> f64 {
        *self.acc.last().expect("non-empty")
    }

    fn at(&self, theta: f64) -> f64 {
        let turns = (theta / (2.0 * PI)).floor();
        let r = theta - turns * 2.0 * PI;
        let i = self.cuts.partition_point(|c| *c <= r).clamp(1, self.cuts.len() - 1) - 1;
        turns * self.total() + self.acc[i] + self.f.smooth_sector(self.q, self.cuts[i], r)
    }
}

/// A planar measure evaluated on angular sectors.
#[derive(Clone, Debug)]
enum Density {
    Power(Box<Cumulative>),
    /// Area of `{rec_f <= 1}`: the section measure replacing `f^{-(m-1)}`
    /// when that integral diverges.
    RecessionArea { poly: FPolygon, normals: Vec<Dir> },
}

impl Density {
    fn sector(&self, a: f64, b: f64) -> f64 {
        match self {
            Density::Power(c) => c.at(b) - c.at(a),
            Density::RecessionArea { poly, .. } => {
                let pieces = ((b - a) / (PI / 2.0)).ceil().max(1.0) as usize;
                let h = (b - a) / pieces as f64;
                (0..pieces)
                    .map(|k| {
                        let t = a + h * k as f64;
                        area_f64(&clip_cone_f64(poly, dir(t), dir(t + h)))
                    })
                    .sum()
            }
        }
    }

    fn density(&self, theta: f64) -> f64 {
        match self {
            Density::Power(c) => c.f.angular_density(c.q, theta),
            Density::RecessionArea { normals, .. } => {
                let e = dir(theta);
                let rec = normals.iter().map(|a| a[0] * e[0] + a[1] * e[1]).fold(0.0, f64::max);
                if rec > 0.0 {
                    0.5 / (rec * rec)
                } else {
                    0.0
                }
            }
        }
    }

    fn total(&self) -> f64 {
        match self {
            Density::Power(c) => c.total(),
            Density::RecessionArea { poly, .. } => area_f64(poly),
        }
    }
}

fn recession_body(f: &PLConvexFn) -> Option<Polytope> {
    if f.domain().is_some() {
        return None;
    }
    let hs: Vec<HalfSpace> = f.pieces().iter().map(|p| HalfSpace::new(p.coeffs.clone(), Q::one())).collect();
    Some(Polytope::from_halfspaces(2, &hs).expect("coercive"))
}

fn check_exponent(f: &Base, p: f64) -> Result<()> {
    if f.n() != 2 {
        return Err(Error::InvalidInput("equipartition is planar".into()));
    }
    match f {
        Base::Concave(_) if p <= -1.0 => Err(Error::DivergentIntegral(format!("f^{p} near the support boundary"))),
        Base::Convex(_) if p >= -2.0 => Err(Error::DivergentIntegral(format!("f^{p} at infinity needs p < -2"))),
        _ => Ok(()),
    }
}

fn float_of(f: &Base) -> FloatPL {
    match f {
        Base::Concave(g) => FloatPL::from_concave(g),
        Base::Convex(g) => FloatPL::from_convex(g),
    }
}

/// Effective exponents for `m`: `(m, m-1)` or `(-m, -(m-1))`; the second is
/// `None` when it is replaced by the recession-body area.
fn exponents(f: &Base, m: f64) -> Result<(f64, Option<f64>)> {
    match f {
        Base::Concave(_) => {
            if m < 1.0 {
                return Err(Error::BadParams(format!("need m >= 1, got {m}")));
            }
            Ok((m, Some(m - 1.0)))
        }
        Base::Convex(_) => {
            check_exponent(f, -m)?;
            Ok((-m, (m - 1.0 > 2.0).then_some(-(m - 1.0))))
        }
    }
}

fn densities(f: &Base, m: f64) -> Result<[Density; 2]> {
    let (p0, p1) = exponents(f, m)?;
    check_exponent(f, p0)?;
    let fp = float_of(f);
    let first = Density::Power(Box::new(Cumulative::new(fp.clone(), p0)));
    let second = match (p1, f) {
        (Some(p), _) => Density::Power(Box::new(Cumulative::new(fp, p))),
        (None, Base::Convex(g)) => {
            let body = recession_body(g);
            Density::RecessionArea {
                poly: body.as_ref().map(polygon_to_f64).unwrap_or_default(),
                normals: g.pieces().iter().map(|p| [to_f64(&p.coeffs[0]), to_f64(&p.coeffs[1])]).collect(),
            }
        }
        (None, Base::Concave(_)) => unreachable!("concave exponents are always finite"),
    };
    Ok([first, second])
}

/// `∫_{C(u, v)} f^p`, `v` strictly within the half-turn counterclockwise from `u`.
pub fn cone_mass(f: &Base, p: f64, u: Dir, v: Dir) -> Result<f64> {
    check_exponent(f, p)?;
    let (a, b) = cone_angles(u, v)?;
    Ok(float_of(f).sector_integral(p, a, b))
}

/// Angle `b ∈ (a, a + π)` with `mass(a, b) = target`, by bracketed Newton steps.
fn solve_v(d: &Density, a: f64, target: f64) -> (f64, usize) {
    let scale = 4.0 * target;
    let (mut lo, mut hi) = (a, a + PI);
    let mut b = a + PI / 2.0;
    let mut it = 0;
    while it < 200 {
        it += 1;
        let h = d.sector(a, b) - target;
        if h.abs() <= INNER_TOL * scale {
            break;
        }
        if h < 0.0 {
            lo = b;
        } else {
            hi = b;
        }
        if hi - lo <= 1e-15 {
            break;
        }
        let rho = d.density(b);
        let nb = b - h / rho;
        b = if rho > 0.0 && nb > lo && nb < hi { nb } else { 0.5 * (lo + hi) };
    }
    (b, it)
}

/// `v(u)` for the exponent `m` (or `-m`).
pub fn find_v(f: &Base, m: f64, u: Dir) -> Result<Dir> {
    let [d, _] = densities(f, m)?;
    let total = d.total();
    if !(total > 0.0 && total.is_finite()) {
        return Err(Error::DivergentIntegral("total mass must be finite and positive".into()));
    }
    let (b, _) = solve_v(&d, angle(u), total / 4.0);
    Ok(dir(b))
}

/// Masses, totals and relative deviations of the four cones of a frame.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ResidualReport {
    pub labels: [String; 2],
    pub masses: [[f64; 4]; 2],
    pub totals: [f64; 2],
    pub residuals: [[f64; 4]; 2],
    pub max_residual: f64,
    pub passes: bool,
}

fn labels(f: &Base, m: f64) -> Result<[String; 2]> {
    let (p0, p1) = exponents(f, m)?;
    Ok([format!("f^{p0}"), p1.map_or("rec-area".to_string(), |p| format!("f^{p}"))])
}

/// Cones `C(u, v), C(v, -u), C(-u, -v), C(-v, u)`, the images of the
/// quadrants `(+,+), (-,+), (-,-), (+,-)` under `[u v]`.
fn quadrant_sectors(a: f64, b: f64) -> [(f64, f64); 4] {
    [(a, b), (b, a + PI), (a + PI, b + PI), (b + PI, a + 2.0 * PI)]
}

fn frame_report(f: &Base, m: f64, a: f64, b: f64, tol: f64) -> Result<ResidualReport> {
    let (p0, p1) = exponents(f, m)?;
    let fp = float_of(f);
    let [_, second] = densities(f, m)?;
    let sectors = quadrant_sectors(a, b);
    let mut masses = [[0.0; 4]; 2];
    for (k, &(s, e)) in sectors.iter().enumerate() {
        masses[0][k] = fp.sector_integral(p0, s, e);
        masses[1][k] = match p1 {
            Some(p) => fp.sector_integral(p, s, e),
            None => second.sector(s, e),
        };
    }
    let mut totals = [0.0; 2];
    let mut residuals = [[0.0; 4]; 2];
    for j in 0..2 {
        totals[j] = masses[j].iter().sum();
        if totals[j] > 0.0 {
            for k in 0..4 {
                residuals[j][k] = (4.0 * masses[j][k] / totals[j] - 1.0).abs();
            }
        }
    }
    let max_residual = residuals.iter().flatten().copied().fold(0.0, f64::max);
    Ok(ResidualReport { labels: labels(f, m)?, masses, totals, residuals, max_residual, passes: max_residual <= tol })
}

/// Quadrant deviations of `f` itself.
pub fn verify_equipartition(f: &Base, m: f64, tol: f64) -> Result<ResidualReport> {
    frame_report(f, m, 0.0, PI / 2.0, tol)
}

/// Quadrant deviations of `f ∘ [u v]`, computed on the cones of `f`.
pub fn verify_frame(f: &Base, m: f64, u: Dir, v: Dir, tol: f64) -> Result<ResidualReport> {
    let (a, b) = cone_angles(u, v)?;
    frame_report(f, m, a, b, tol)
}

/// `T` rounded to a dyadic grid, with the exact quadrant residuals of `f ∘ T`.
#[derive(Clone, Debug, PartialEq)]
pub struct SnappedFrame {
    pub t: Matrix,
    pub function: Base,
    /// `4 ∫_{quadrant} / ∫ - 1` for both measures.
    pub residuals: [[Q; 4]; 2],
    pub max_residual: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EquipartitionResult {
    /// Columns `u` and `v`.
    pub t: [[f64; 2]; 2],
    pub u: Dir,
    pub v: Dir,
    pub report: ResidualReport,
    pub scan_steps: usize,
    pub bisection_steps: usize,
    pub newton_steps: usize,
    pub snapped: Option<SnappedFrame>,
}

/// Finds `T = [u v(u)]` making `f ∘ T` equipartitioned for `m`.
pub fn equipartition_map(f: &Base, m: f64, tol: f64) -> Result<EquipartitionResult> {
    let [d0, d1] = densities(f, m)?;
    let (t0, t1) = (d0.total(), d1.total());
    if !(t0 > 0.0 && t0.is_finite()) {
        return Err(Error::DivergentIntegral("total mass must be finite and positive".into()));
    }
    let mut newton_steps = 0;
    let mut g = |a: f64| {
        let (b, it) = solve_v(&d0, a, t0 / 4.0);
        newton_steps += it;
        (d1.sector(a, b) - t1 / 4.0, b)
    };
    let zero = |x: f64| x.abs() <= 1e-13 * t1.max(f64::MIN_POSITIVE);
    let (mut lo, mut glo) = (0.0, g(0.0));
    let mut scan_steps = 1;
    let mut found = zero(glo.0).then_some((0.0, glo.1));
    let mut hi = 0.0;
    if found.is_none() {
        for j in 1..=SCAN {
            let a = PI * j as f64 / SCAN as f64;
            let ga = g(a);
            scan_steps += 1;
            if zero(ga.0) {
                found = Some((a, ga.1));
                break;
            }
            if ga.0.signum() != glo.0.signum() {
                hi = a;
                break;
            }
            (lo, glo) = (a, ga);
        }
        if found.is_none() && hi == 0.0 {
            return Err(Error::BracketNotFound);
        }
    }
    let mut bisection_steps = 0;
    let (a, b) = match found {
        Some(x) => x,
        None => {
            let mut best = (lo, glo.1);
            while hi - lo > 1e-15 && bisection_steps < 200 {
                bisection_steps += 1;
                let mid = 0.5 * (lo + hi);
                let gm = g(mid);
                best = (mid, gm.1);
                if zero(gm.0) {
                    break;
                }
                if gm.0.signum() == glo.0.signum() {
                    (lo, glo) = (mid, gm);
                } else {
                    hi = mid;
                }
            }
            best
        }
    };
    let (u, v) = (dir(a), dir(b));
    let report = frame_report(f, m, a, b, tol)?;
    if !report.passes {
        return Err(Error::NotEquipartitioned(format!("max residual {:.3e} exceeds {tol:.1e}", report.max_residual)));
    }
    Ok(EquipartitionResult {
        t: [[u[0], v[0]], [u[1], v[1]]],
        u,
        v,
        report,
        scan_steps,
        bisection_steps,
        newton_steps,
        snapped: None,
    })
}

/// `T` rounded entrywise to multiples of `2^-20`.
pub fn snap_matrix(t: &[[f64; 2]; 2]) -> Matrix {
    t.iter().map(|row| row.iter().map(|x| snap_f64(*x, SNAP_BITS)).collect()).collect()
}

/// Exact quadrant areas of `{rec_f <= 1}` (all zero with a bounded domain).
pub fn recession_quadrant_areas(f: &PLConvexFn) -> [Q; 4] {
    let mut out: [Q; 4] = Default::default();
    if let Some(body) = recession_body(f) {
        for (k, c) in quadrant_cones().iter().enumerate() {
            out[k] = body.clip(c).map(|p| p.volume()).unwrap_or_else(|_| Q::zero());
        }
    }
    out
}

/// Exact quadrant masses of both measures for integer `m`.
pub fn exact_quadrant_masses(f: &Base, m: u32) -> Result<[[Q; 4]; 2]> {
    let (_, p1) = exponents(f, m as f64)?;
    let first = quadrant_integrals(f, m)?;
    let second = match (p1, f) {
        (Some(_), _) => quadrant_integrals(f, m - 1)?,
        (None, Base::Convex(g)) => recession_quadrant_areas(g),
        (None, Base::Concave(_)) => unreachable!("concave exponents are always finite"),
    };
    Ok([first, second])
}

/// Signed exact deviations `4 mass / total - 1`.
pub fn exact_residuals(f: &Base, m: u32) -> Result<[[Q; 4]; 2]> {
    let masses = exact_quadrant_masses(f, m)?;
    let mut out: [[Q; 4]; 2] = Default::default();
    for j in 0..2 {
        let total: Q = masses[j].iter().cloned().sum();
        if total.is_positive() {
            for k in 0..4 {
                out[j][k] = q(4) * &masses[j][k] / &total - Q::one();
            }
        }
    }
    Ok(out)
}

pub fn snap_frame(f: &Base, m: u32, t: &[[f64; 2]; 2]) -> Result<SnappedFrame> {
    let tq = snap_matrix(t);
    let g = f.apply_linear(&tq)?;
    let residuals = exact_residuals(&g, m)?;
    let max_residual = residuals.iter().flatten().map(|r| to_f64(&r.abs())).fold(0.0, f64::max);
    Ok(SnappedFrame { t: tq, function: g, residuals, max_residual })
}

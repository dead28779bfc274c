//! Lifted convex bodies `K_{L,m}(f) = {(x, t) : ‖t‖_L <= f(x)}` over concave
//! `f` and `C^K_k(f) = {(x, s) : ‖s‖_K f(x/‖s‖_K) <= 1}` over convex `f`.
//! They are never built as polytopes: volumes come from closed-form
//! identities and Monte Carlo uses the membership predicate.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::equipartition::{exact_residuals, snap_matrix, verify_frame};
use crate::error::{Error, Result};
use crate::functions::{Base, PLConcaveFn, PLConvexFn};
use crate::geometry::polytope::Polytope;
use crate::geometry::rational::*;
use crate::geometry::simplex::Affine;
use crate::integrals::{inverse_power_integral, p_m, power_integral, q_m, FloatPL, ProductReport, Scope};
use crate::transforms::{l_transform, m_transform, perspective_body};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Family {
    KBody,
    CBody,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum FiberNorm {
    LInf,
    L1,
}

impl FiberNorm {
    pub fn dual(self) -> Self {
        match self {
            FiberNorm::LInf => FiberNorm::L1,
            FiberNorm::L1 => FiberNorm::LInf,
        }
    }

    /// `|B_∞^k| = 2^k`, `|B_1^k| = 2^k / k!`.
    pub fn ball_volume(self, k: u32) -> Q {
        let cube = pow_q(&q(2), k);
        match self {
            FiberNorm::LInf => cube,
            FiberNorm::L1 => cube / factorial(k),
        }
    }

    pub fn norm(self, s: &[Q]) -> Q {
        match self {
            FiberNorm::LInf => s.iter().map(|x| x.abs()).max().unwrap_or_else(Q::zero),
            FiberNorm::L1 => s.iter().map(|x| x.abs()).sum(),
        }
    }

    fn norm_f64(self, s: &[f64]) -> f64 {
        match self {
            FiberNorm::LInf => s.iter().fold(0.0, |a, x| a.max(x.abs())),
            FiberNorm::L1 => s.iter().map(|x| x.abs()).sum(),
        }
    }
}

/// `4^d / d!`, the volume product of the cube in `R^d`.
pub fn mahler_bound(d: u32) -> Q {
    pow_q(&q(4), d) / factorial(d)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LiftedBodySpec {
    pub family: Family,
    pub f: Base,
    pub m: u32,
    pub fiber: FiberNorm,
}

impl LiftedBodySpec {
    pub fn new(family: Family, f: Base, m: u32, fiber: FiberNorm) -> Result<Self> {
        match (&family, &f) {
            (Family::KBody, Base::Concave(_)) => {}
            (Family::CBody, Base::Convex(g)) => {
                if m as usize <= g.n() {
                    return Err(Error::DivergentIntegral(format!("C-body needs m > n, got m = {m}")));
                }
            }
            _ => return Err(Error::InvalidInput("K-bodies lift concave functions, C-bodies convex ones".into())),
        }
        Ok(Self { family, f, m, fiber })
    }

    pub fn k_body(f: PLConcaveFn, m: u32, fiber: FiberNorm) -> Self {
        Self { family: Family::KBody, f: Base::Concave(f), m, fiber }
    }

    pub fn c_body(f: PLConvexFn, m: u32, fiber: FiberNorm) -> Result<Self> {
        Self::new(Family::CBody, Base::Convex(f), m, fiber)
    }

    pub fn n(&self) -> usize {
        self.f.n()
    }

    pub fn fiber_dim(&self) -> u32 {
        match self.family {
            Family::KBody => self.m,
            Family::CBody => self.m - self.n() as u32,
        }
    }

    pub fn ambient_dim(&self) -> u32 {
        self.n() as u32 + self.fiber_dim()
    }

    /// Exact membership of `z = (x, t)`.
    pub fn contains(&self, z: &[Q]) -> Result<bool> {
        let n = self.n();
        if z.len() != self.ambient_dim() as usize {
            return Err(Error::InvalidInput("point has the wrong dimension".into()));
        }
        let (x, t) = z.split_at(n);
        let r = self.fiber.norm(t);
        Ok(match &self.f {
            Base::Concave(f) => r <= f.eval(x),
            Base::Convex(f) => {
                let mut p = x.to_vec();
                p.push(r);
                f.perspective_halfspaces().iter().all(|h| h.contains(&p))
            }
        })
    }

    /// The polar body: `K_{L°,m}(Lf)` or `C^{K°}(Mf)`.
    pub fn polar(&self) -> Result<Self> {
        let f = match &self.f {
            Base::Concave(f) => Base::Concave(l_transform(f)?),
            Base::Convex(f) => Base::Convex(m_transform(f)?),
        };
        Ok(Self { f, fiber: self.fiber.dual(), ..self.clone() })
    }

    /// The section by the hyperplane orthogonal to one fiber coordinate.
    pub fn fiber_section(&self) -> Result<Self> {
        if self.fiber_dim() == 0 {
            return Err(Error::BadParams("no fiber coordinate left".into()));
        }
        Self::new(self.family, self.f.clone(), self.m - 1, self.fiber)
    }
}

/// `|K_{L,m}(f)| = |L| ∫ f^m`; `|C^K_{m-n}(f)| = ((m-n)/m) |K| ∫ f^{-m}`.
pub fn lifted_volume(spec: &LiftedBodySpec) -> Result<Q> {
    let k = spec.fiber_dim();
    let ball = spec.fiber.ball_volume(k);
    match &spec.f {
        Base::Concave(f) => Ok(ball * power_integral(f, spec.m)),
        Base::Convex(f) => {
            let m = q(spec.m as i64);
            Ok(q(k as i64) / m * ball * inverse_power_integral(f, spec.m)?)
        }
    }
}

/// `|conv B| |B°|` against `4^d / d!`. A C-body over a function outside
/// class F is not convex; its hull is the C-body of `MMf`.
pub fn santalo_product(spec: &LiftedBodySpec) -> Result<ProductReport> {
    let d = spec.ambient_dim();
    let n = spec.n();
    let polar = spec.polar()?;
    let (hull, context, scope) = match &polar.f {
        Base::Concave(_) => (spec.clone(), "santalo K-body", Scope::Theorem),
        Base::Convex(mf) => {
            let mmf = m_transform(mf)?;
            let scope = if mmf.check_class_f().passes() { Scope::Theorem } else { Scope::Conjecture };
            (LiftedBodySpec { f: Base::Convex(mmf), ..spec.clone() }, "santalo C-body", scope)
        }
    };
    let lhs = lifted_volume(&hull)? * lifted_volume(&polar)?;
    let m = q(spec.m as i64);
    let s = if spec.m == 0 { Q::zero() } else { Q::one() / &m };
    Ok(ProductReport::new(lhs, mahler_bound(d), context, scope, n, m, s))
}

/// The same product through the functional: `P(L) P_m(f)`, or
/// `((m-n)/m)^2 P(K) Q_m(MMf)` for C-bodies.
pub fn santalo_via_functional(spec: &LiftedBodySpec) -> Result<Q> {
    let k = spec.fiber_dim();
    let ball = mahler_bound(k);
    match &spec.f {
        Base::Concave(f) => Ok(ball * p_m(f, spec.m)?.lhs),
        Base::Convex(f) => {
            let mmf = m_transform(&m_transform(f)?)?;
            let r = q(k as i64) / q(spec.m as i64);
            Ok(&r * &r * ball * q_m(&mmf, spec.m)?.lhs)
        }
    }
}

enum Member {
    K(FloatPL),
    C(Vec<(Vec<f64>, f64)>),
}

const MC_CHUNKS: u64 = 64;

/// Hit-or-miss estimate `(volume, standard error)`, deterministic in `seed`.
pub fn mc_volume(spec: &LiftedBodySpec, samples: u64, seed: u64) -> Result<(f64, f64)> {
    let d = spec.ambient_dim() as usize;
    if d > 6 {
        return Err(Error::DimensionTooLarge(d));
    }
    if samples == 0 {
        return Err(Error::BadParams("need at least one sample".into()));
    }
    let n = spec.n();
    let k = spec.fiber_dim() as usize;
    let (xlo, xhi, reach, member) = match &spec.f {
        Base::Concave(f) => {
            let (lo, hi) = f.support().bounding_box();
            (lo, hi, to_f64(&f.max_value()), Member::K(FloatPL::from_concave(f)))
        }
        Base::Convex(f) => {
            let upper = perspective_body(f)?.upper;
            let (lo, hi) = upper.bounding_box();
            let hs = f
                .perspective_halfspaces()
                .iter()
                .map(|h| (point_to_f64(&h.normal), to_f64(&h.offset)))
                .collect();
            (lo[..n].to_vec(), hi[..n].to_vec(), to_f64(&hi[n]), Member::C(hs))
        }
    };
    let mut lo: Vec<f64> = point_to_f64(&xlo);
    let mut hi: Vec<f64> = point_to_f64(&xhi);
    lo.extend(std::iter::repeat(-reach).take(k));
    hi.extend(std::iter::repeat(reach).take(k));
    let box_volume: f64 = lo.iter().zip(&hi).map(|(a, b)| b - a).product();
    let fiber = spec.fiber;
    let inside = |z: &[f64]| {
        let (x, t) = z.split_at(n);
        let r = fiber.norm_f64(t);
        match &member {
            Member::K(f) => r <= f.eval(x),
            Member::C(hs) => hs.iter().all(|(a, e)| {
                let s: f64 = a[..n].iter().zip(x).map(|(p, y)| p * y).sum::<f64>() + a[n] * r;
                s <= *e
            }),
        }
    };
    let hits: u64 = (0..MC_CHUNKS)
        .into_par_iter()
        .map(|c| {
            let count = samples / MC_CHUNKS + u64::from(c < samples % MC_CHUNKS);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c);
            let mut z = vec![0.0; d];
            let mut h = 0;
            for _ in 0..count {
                for (i, zi) in z.iter_mut().enumerate() {
                    *zi = rng.gen_range(lo[i]..=hi[i]);
                }
                h += u64::from(inside(&z));
            }
            h
        })
        .sum();
    let p = hits as f64 / samples as f64;
    Ok((box_volume * p, box_volume * (p * (1.0 - p) / samples as f64).sqrt()))
}

/// `f` restricted to the `i`-th coordinate axis.
pub fn restrict_to_axis(f: &Base, i: usize) -> Result<Base> {
    let reach = |body: &Polytope| -> Q {
        body.halfspaces()
            .iter()
            .filter(|h| h.normal[i].is_positive())
            .map(|h| &h.offset / &h.normal[i])
            .min()
            .expect("bounded body")
    };
    let line = |pieces: &[Affine]| -> Vec<Affine> {
        let mut out: Vec<Affine> = pieces.iter().map(|p| Affine::new(vec![p.coeffs[i].clone()], p.constant.clone())).collect();
        out.sort();
        out.dedup();
        out
    };
    Ok(match f {
        Base::Concave(g) => {
            let a = reach(g.support());
            Base::Concave(PLConcaveFn::new_clipped(1, Polytope::cube(1, &a)?, line(g.pieces()))?)
        }
        Base::Convex(g) => {
            let domain = g.domain().map(|d| Polytope::cube(1, &reach(d))).transpose()?;
            Base::Convex(PLConvexFn::new(1, line(g.pieces()), domain)?)
        }
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SectionStatus {
    Verified,
    Failed,
    Delegated(String),
}

/// Reduction of the partition hypotheses for `K_{∞,m}(f)` (or
/// `C^∞_{m-2}(f)`) to planar and one-dimensional computations:
/// (a) equal orthant volumes, (b) equally split coordinate sections,
/// (c) Mahler's bound for every coordinate section.
#[derive(Clone, Debug, PartialEq)]
pub struct PartitionReport {
    pub family: Family,
    pub m: u32,
    /// Quadrant deviations for the orthant measure and the section measure.
    pub residuals: [[f64; 4]; 2],
    /// Whether the residuals were computed exactly.
    pub exact: bool,
    pub even: bool,
    pub orthants_equal: bool,
    pub sections_equal: bool,
    pub section_products: Vec<ProductReport>,
    pub sections_mahler: SectionStatus,
    pub violated: Option<String>,
}

impl PartitionReport {
    pub fn passes(&self) -> bool {
        self.even && self.orthants_equal && self.sections_equal && self.sections_mahler != SectionStatus::Failed
    }
}

const QUADRANT_SIGNS: [&str; 4] = ["+,+", "-,+", "-,-", "+,-"];

fn orthant_name(quadrant: usize, fibers: u32) -> String {
    let mut s = QUADRANT_SIGNS[quadrant].to_string();
    for _ in 0..fibers {
        s.push_str(",+");
    }
    format!("({s})")
}

/// Computes the report; `frame` is a float basis `[u v]` from the
/// equipartition search, applied before checking.
pub fn partition_report(
    f: &Base,
    m: u32,
    family: Family,
    frame: Option<&[[f64; 2]; 2]>,
    tol: f64,
) -> Result<PartitionReport> {
    if f.n() != 2 {
        return Err(Error::InvalidInput("partition hypotheses are checked for n = 2".into()));
    }
    let spec = LiftedBodySpec::new(family, f.clone(), m, FiberNorm::LInf)?;
    let fibers = spec.fiber_dim();
    let (residuals, exact) = match frame {
        None => {
            let r = exact_residuals(f, m)?;
            let mut out = [[0.0; 4]; 2];
            for j in 0..2 {
                for k in 0..4 {
                    out[j][k] = to_f64(&r[j][k].abs());
                }
            }
            (out, true)
        }
        Some(t) => {
            let u = [t[0][0], t[1][0]];
            let v = [t[0][1], t[1][1]];
            (verify_frame(f, m as f64, u, v, tol)?.residuals, false)
        }
    };
    let even = match f {
        Base::Concave(g) => g.is_even(),
        // enforced on construction
        Base::Convex(_) => true,
    };
    let worst = |j: usize| {
        (0..4).filter(|&k| residuals[j][k] > tol).max_by(|&a, &b| residuals[j][a].total_cmp(&residuals[j][b]))
    };
    let bad_orthant = worst(0);
    let bad_section = worst(1);
    let violated = match (bad_orthant, bad_section) {
        (Some(k), _) => Some(format!("orthant {} (deviation {:.3e})", orthant_name(k, fibers), residuals[0][k])),
        (None, Some(k)) if fibers > 0 => Some(format!(
            "section t_1 = 0, orthant {} (deviation {:.3e})",
            orthant_name(k, fibers - 1),
            residuals[1][k]
        )),
        (None, Some(k)) => Some(format!("support quadrant ({}) (deviation {:.3e})", QUADRANT_SIGNS[k], residuals[1][k])),
        (None, None) => (!even).then(|| "f is not even".to_string()),
    };

    let g = match frame {
        None => f.clone(),
        Some(t) => f.apply_linear(&snap_matrix(t))?,
    };
    let mut section_products = Vec::new();
    let sections_mahler = if family == Family::CBody && m == 3 {
        SectionStatus::Delegated("base case is the three-dimensional Mahler theorem".into())
    } else {
        let mut specs = Vec::new();
        for i in 0..2 {
            let gi = restrict_to_axis(&g, i)?;
            let m_axis = if family == Family::KBody { m } else { m - 1 };
            specs.push(LiftedBodySpec::new(family, gi, m_axis, FiberNorm::LInf)?);
        }
        if fibers > 0 {
            specs.push(LiftedBodySpec::new(family, g.clone(), m - 1, FiberNorm::LInf)?);
        }
        for s in &specs {
            let mut r = santalo_product(s)?;
            r.context = format!("{} section (dim {})", r.context, s.ambient_dim());
            section_products.push(r);
        }
        if section_products.iter().all(|r| r.holds()) {
            SectionStatus::Verified
        } else {
            SectionStatus::Failed
        }
    };
    Ok(PartitionReport {
        family,
        m,
        residuals,
        exact,
        even,
        orthants_equal: bad_orthant.is_none(),
        sections_equal: bad_section.is_none() && even,
        section_products,
        sections_mahler,
        violated,
    })
}

/// As [`partition_report`], failing with `NotEquipartitioned` when a
/// hypothesis does not hold.
pub fn check_partition_hypotheses(
    f: &Base,
    m: u32,
    family: Family,
    frame: Option<&[[f64; 2]; 2]>,
    tol: f64,
) -> Result<PartitionReport> {
    let r = partition_report(f, m, family, frame, tol)?;
    if r.passes() {
        return Ok(r);
    }
    let what = r.violated.clone().unwrap_or_else(|| "a section misses the Mahler bound".into());
    Err(Error::NotEquipartitioned(what))
}

/// Random rational point in `[-r, r]^d` on a grid of step `r / 16`.
pub fn random_grid_point(rng: &mut impl Rng, d: usize, r: &Q) -> Point {
    (0..d).map(|_| r * Q::new(BigInt::from(rng.gen_range(-16i64..=16)), BigInt::from(16))).collect()
}

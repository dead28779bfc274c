//! Exact integral functionals, volume products and their lower bounds.

pub mod float;

use std::fmt;

use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::functions::{Base, PLConcaveFn, PLConvexFn, SConcaveFn, Sign};
use crate::geometry::polytope::{HalfSpace, Polytope};
use crate::geometry::rational::*;
use crate::geometry::simplex::{integrate_affine_power, Affine};
use crate::transforms::{l_transform, m_transform, perspective_body, PerspectiveBody};

pub use float::FloatPL;

/// `∫ f^p` over the support, exact.
pub fn power_integral(f: &PLConcaveFn, p: u32) -> Q {
    power_integral_in(f, p, &[])
}

/// `∫ f^p` over the part of the support satisfying `extra`.
pub fn power_integral_in(f: &PLConcaveFn, p: u32, extra: &[HalfSpace]) -> Q {
    let mut total = Q::zero();
    for (i, cell) in f.cells() {
        let piece = &f.pieces()[i];
        let Ok(part) = (if extra.is_empty() { Ok(cell) } else { cell.clip(extra) }) else {
            continue;
        };
        for s in part.triangulate() {
            total += integrate_affine_power(&s, piece, p).expect("f >= 0 on its support");
        }
    }
    total
}

/// `(I_m, J_m) = ((m+1) ∫_0^a f^m, (m+1) ∫_0^{1/a} (Lf)^m)` for even `f` on `[-a, a]`.
pub fn half_integrals(f: &PLConcaveFn, m: u32) -> Result<(Q, Q)> {
    if f.n() != 1 {
        return Err(Error::InvalidInput("half integrals are one-dimensional".into()));
    }
    let lf = l_transform(f)?;
    let k = q(m as i64 + 1) / q(2);
    Ok((&k * power_integral(f, m), &k * power_integral(&lf, m)))
}

/// `∫_B |t|^k`, `t` the last coordinate, splitting `B` by the sign of `t`.
pub fn t_moment(body: &Polytope, k: u32) -> Q {
    let d = body.dim();
    let mut up = vec![Q::zero(); d];
    up[d - 1] = Q::one();
    let t = Affine::new(up.clone(), Q::zero());
    let mut total = Q::zero();
    for side in [t.clone(), t.reflected()] {
        // keep {side >= 0}
        let keep = HalfSpace::new(neg(&side.coeffs), Q::zero());
        if let Ok(part) = body.clip(&[keep]) {
            for s in part.triangulate() {
                total += integrate_affine_power(&s, &side, k).expect("side >= 0 on its half");
            }
        }
    }
    total
}

fn weight_exponent(m: u32, n: usize) -> Result<u32> {
    if (m as usize) <= n {
        return Err(Error::DivergentIntegral(format!("need m > n, got m = {m}, n = {n}")));
    }
    Ok(m - n as u32 - 1)
}

/// `μ_m(B) = (m/2) ∫_B |t|^{m-n-1}` for a body `B ⊂ R^{n+1}`.
pub fn mu_m(body: &Polytope, m: u32, n: usize) -> Result<Q> {
    let k = weight_exponent(m, n)?;
    Ok(q(m as i64) / q(2) * t_moment(body, k))
}

/// `μ_m` of the possibly non-convex `C_1(f) = upper ∪ σ(upper)`.
pub fn mu_m_perspective(b: &PerspectiveBody, m: u32) -> Result<Q> {
    let k = weight_exponent(m, b.n())?;
    Ok(q(m as i64) * t_moment(&b.upper, k))
}

/// `∫ f^{-m} = μ_m(C_1(f))`; requires `m > n`.
pub fn inverse_power_integral(f: &PLConvexFn, m: u32) -> Result<Q> {
    weight_exponent(m, f.n())?;
    mu_m_perspective(&perspective_body(f)?, m)
}

/// `∫ f^{-m}` over a cone `{x : h_j · x <= 0}`; the perspective body is cut
/// by the same homogeneous half-spaces.
pub fn inverse_power_integral_in(f: &PLConvexFn, m: u32, cone: &[HalfSpace]) -> Result<Q> {
    let k = weight_exponent(m, f.n())?;
    if cone.iter().any(|h| !h.offset.is_zero()) {
        return Err(Error::InvalidInput("region must be a cone with apex at the origin".into()));
    }
    let lifted: Vec<HalfSpace> = cone
        .iter()
        .map(|h| {
            let mut normal = h.normal.clone();
            normal.push(Q::zero());
            HalfSpace::new(normal, Q::zero())
        })
        .collect();
    let upper = perspective_body(f)?.upper;
    Ok(match upper.clip(&lifted) {
        Ok(part) => q(m as i64) * t_moment(&part, k),
        Err(Error::DegenerateInput(_)) => Q::zero(),
        Err(e) => return Err(e),
    })
}

/// Closed coordinate quadrants in the order `(+,+), (-,+), (-,-), (+,-)`.
pub fn quadrant_cones() -> [Vec<HalfSpace>; 4] {
    let h = |a: i64, b: i64| HalfSpace::new(pt(&[a, b]), Q::zero());
    [
        vec![h(-1, 0), h(0, -1)],
        vec![h(1, 0), h(0, -1)],
        vec![h(1, 0), h(0, 1)],
        vec![h(-1, 0), h(0, 1)],
    ]
}

/// Quadrant integrals of `f^p` (concave base) or `f^{-p}` (convex base).
pub fn quadrant_integrals(base: &Base, p: u32) -> Result<[Q; 4]> {
    if base.n() != 2 {
        return Err(Error::InvalidInput("quadrants are planar".into()));
    }
    let cones = quadrant_cones();
    let mut out: [Q; 4] = Default::default();
    for (k, c) in cones.iter().enumerate() {
        out[k] = match base {
            Base::Concave(f) => power_integral_in(f, p, c),
            Base::Convex(f) => inverse_power_integral_in(f, p, c)?,
        };
    }
    Ok(out)
}

pub fn power_integral_f64(f: &PLConcaveFn, p: f64) -> f64 {
    FloatPL::from_concave(f).integral(p)
}

pub fn inverse_power_integral_f64(f: &PLConvexFn, m: f64) -> Result<f64> {
    if m <= f.n() as f64 {
        return Err(Error::DivergentIntegral(format!("need m > n, got m = {m}")));
    }
    Ok(FloatPL::from_convex(f).integral(-m))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Scope {
    Theorem,
    Conjecture,
}

/// An exact inequality check `lhs >= bound`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProductReport {
    pub lhs: Q,
    pub bound: Q,
    pub margin: Q,
    pub equality: bool,
    pub context: String,
    pub scope: Scope,
    pub n: usize,
    pub m: Q,
    pub s: Q,
}

impl ProductReport {
    pub(crate) fn new(lhs: Q, bound: Q, context: &str, scope: Scope, n: usize, m: Q, s: Q) -> Self {
        let margin = &lhs - &bound;
        let equality = margin.is_zero();
        Self { lhs, bound, margin, equality, context: context.to_string(), scope, n, m, s }
    }

    pub fn holds(&self) -> bool {
        !self.margin.is_negative()
    }
}

impl fmt::Display for ProductReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} (n={}, m={}): lhs = {} ~ {:.12}, bound = {} ~ {:.12}, margin = {}, equality = {}, scope = {:?}",
            self.context,
            self.n,
            fmt_q(&self.m),
            fmt_q(&self.lhs),
            to_f64(&self.lhs),
            fmt_q(&self.bound),
            to_f64(&self.bound),
            fmt_q(&self.margin),
            self.equality,
            self.scope
        )
    }
}

/// Floating-point counterpart of [`ProductReport`] for non-integer `m`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ApproxReport {
    pub lhs: f64,
    pub bound: f64,
    pub margin: f64,
    pub context: String,
    pub scope: Scope,
    pub n: usize,
    pub m: f64,
    pub s: f64,
    pub approximate: bool,
}

impl fmt::Display for ApproxReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} (n={}, m={}): lhs ~ {:.12}, bound ~ {:.12}, margin ~ {:.3e}, scope = {:?}, approximate",
            self.context, self.n, self.m, self.lhs, self.bound, self.margin, self.scope
        )
    }
}

/// `4^n / ((m+1)...(m+n))`.
pub fn p_bound(n: usize, m: &Q) -> Q {
    (1..=n).fold(pow_q(&q(4), n as u32), |acc, k| acc / (m + q(k as i64)))
}

/// `4^n / ((m-1)...(m-n))`.
pub fn q_bound(n: usize, m: &Q) -> Q {
    (1..=n).fold(pow_q(&q(4), n as u32), |acc, k| acc / (m - q(k as i64)))
}

/// `m/(m-n) · 4^n / ((m-1)...(m-n))`.
pub fn q_bound_class_f(n: usize, m: &Q) -> Q {
    q_bound(n, m) * m / (m - q(n as i64))
}

/// `4^n / ((1+s)...(1+ns))`, times `1/(1+ns)` in the class-F variant.
pub fn volume_product_bound(n: usize, s: &Q, class_f: bool) -> Q {
    let base = (1..=n).fold(pow_q(&q(4), n as u32), |acc, k| acc / (Q::one() + q(k as i64) * s));
    if class_f {
        base / (Q::one() + q(n as i64) * s)
    } else {
        base
    }
}

/// `P_m(f) = ∫ f^m ∫ (Lf)^m`.
pub fn p_m(f: &PLConcaveFn, m: u32) -> Result<ProductReport> {
    let lf = l_transform(f)?;
    let lhs = power_integral(f, m) * power_integral(&lf, m);
    let mq = q(m as i64);
    let s = if m == 0 { Q::zero() } else { Q::one() / &mq };
    Ok(ProductReport::new(lhs, p_bound(f.n(), &mq), "P_m", Scope::Theorem, f.n(), mq, s))
}

/// `Q_m(f) = ∫ f^{-m} ∫ (Mf)^{-m}` against the class-F bound when `f ∈ F`
/// and the general bound otherwise.
pub fn q_m(f: &PLConvexFn, m: u32) -> Result<ProductReport> {
    let n = f.n();
    let mf = m_transform(f)?;
    let lhs = inverse_power_integral(f, m)? * inverse_power_integral(&mf, m)?;
    let mq = q(m as i64);
    let s = -(Q::one() / &mq);
    Ok(if f.check_class_f().passes() {
        ProductReport::new(lhs, q_bound_class_f(n, &mq), "Q_m class F", Scope::Theorem, n, mq, s)
    } else {
        let scope = if n == 1 { Scope::Theorem } else { Scope::Conjecture };
        ProductReport::new(lhs, q_bound(n, &mq), "Q_m", scope, n, mq, s)
    })
}

/// `∫ g ∫ L_s g = m^n P_m(f)` or `m^n Q_m(f)`; requires integer `m`.
pub fn volume_product(g: &SConcaveFn) -> Result<ProductReport> {
    let m = g.m_int().ok_or_else(|| Error::BadParams("exact volume product needs integer m".into()))?;
    let n = g.n();
    let mn = pow_q(g.m(), n as u32);
    let s = g.s();
    Ok(match g.base() {
        Base::Concave(f) => {
            let p = p_m(f, m)?;
            ProductReport::new(mn * p.lhs, volume_product_bound(n, &s, false), "volume product", p.scope, n, q(m as i64), s)
        }
        Base::Convex(f) => {
            let r = q_m(f, m)?;
            let class_f = r.context == "Q_m class F";
            let context = if class_f { "volume product class F" } else { "volume product" };
            ProductReport::new(mn * r.lhs, volume_product_bound(n, &s, class_f), context, r.scope, n, q(m as i64), s)
        }
    })
}

/// `∫ f^{-m} >= ((m-n)/m) ∫ (MMf)^{-m}`.
pub fn bipolar_deficit(g: &SConcaveFn) -> Result<ProductReport> {
    let Base::Convex(f) = g.base() else {
        return Err(Error::BadParams("the bipolar comparison is for negative s".into()));
    };
    let m = g.m_int().ok_or_else(|| Error::BadParams("exact mode needs integer m".into()))?;
    let n = f.n();
    let mmf = m_transform(&m_transform(f)?)?;
    let mq = q(m as i64);
    let lhs = inverse_power_integral(f, m)?;
    let bound = (&mq - q(n as i64)) / &mq * inverse_power_integral(&mmf, m)?;
    let scope = if n == 1 { Scope::Theorem } else { Scope::Conjecture };
    Ok(ProductReport::new(lhs, bound, "bipolar", scope, n, mq, g.s()))
}

/// The same comparison in measure form: `μ_m(C_1 f) >= ((m-n)/m) μ_m(Conv C_1 f)`.
pub fn bipolar_deficit_mu(f: &PLConvexFn, m: u32) -> Result<ProductReport> {
    let n = f.n();
    let body = perspective_body(f)?;
    let mq = q(m as i64);
    let lhs = mu_m_perspective(&body, m)?;
    let bound = (&mq - q(n as i64)) / &mq * mu_m(&body.hull(), m, n)?;
    let scope = if n == 1 { Scope::Theorem } else { Scope::Conjecture };
    Ok(ProductReport::new(lhs, bound, "bipolar (measure form)", scope, n, mq.clone(), -(Q::one() / mq)))
}

/// Volume product for any rational `m`, in floating point.
pub fn volume_product_f64(g: &SConcaveFn) -> Result<ApproxReport> {
    let n = g.n();
    let m = to_f64(g.m());
    let s = to_f64(&g.s());
    let lg = crate::transforms::ls_transform(g)?;
    let integral = |h: &SConcaveFn| -> Result<f64> {
        let m = to_f64(h.m());
        match h.base() {
            Base::Concave(f) => Ok(power_integral_f64(f, m)),
            Base::Convex(f) => inverse_power_integral_f64(f, m),
        }
    };
    let lhs = integral(g)? * integral(&lg)?;
    let (class_f, scope) = match g.base() {
        Base::Concave(_) => (false, if g.m_int().is_some() { Scope::Theorem } else { Scope::Conjecture }),
        Base::Convex(f) => {
            let cf = f.check_class_f().passes();
            let thm = n == 1 || (cf && g.m_int().is_some());
            (cf, if thm { Scope::Theorem } else { Scope::Conjecture })
        }
    };
    let bound = to_f64(&volume_product_bound(n, &g.s(), class_f));
    let context = if class_f { "volume product class F" } else { "volume product" };
    Ok(ApproxReport {
        lhs,
        bound,
        margin: lhs - bound,
        context: context.to_string(),
        scope,
        n,
        m,
        s,
        approximate: true,
    })
}

/// Sign-aware integral of `g` in floating point.
pub fn integral_of_g_f64(g: &SConcaveFn) -> Result<f64> {
    let m = g.m().to_f64().unwrap_or(f64::NAN);
    match (g.sign(), g.base()) {
        (Sign::Positive, Base::Concave(f)) => Ok(power_integral_f64(f, m)),
        (Sign::Negative, Base::Convex(f)) => inverse_power_integral_f64(f, m),
        _ => unreachable!("sign follows the base"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functions::named::{make_named, parse_named};

    fn concave(n: usize, s: &str) -> PLConcaveFn {
        match make_named(n, &parse_named(n, s).unwrap()).unwrap() {
            Base::Concave(f) => f,
            _ => panic!(),
        }
    }

    fn convex(n: usize, s: &str) -> PLConvexFn {
        match make_named(n, &parse_named(n, s).unwrap()).unwrap() {
            Base::Convex(f) => f,
            _ => panic!(),
        }
    }

    #[test]
    fn power_integrals_of_named() {
        for m in 0..6 {
            let mq = q(m as i64);
            assert_eq!(power_integral(&concave(2, "indicator"), m), q(4));
            assert_eq!(power_integral(&concave(2, "tent:l1"), m), q(4) / ((&mq + q(1)) * (&mq + q(2))));
            assert_eq!(power_integral(&concave(1, "tent"), m), q(2) / (&mq + q(1)));
        }
    }

    #[test]
    fn half_integrals_of_indicator() {
        for m in 0..6 {
            let (i, j) = half_integrals(&concave(1, "indicator"), m).unwrap();
            assert_eq!(i, q(m as i64 + 1));
            assert_eq!(j, q(1));
        }
    }

    #[test]
    fn inverse_power_integrals_of_named() {
        for m in 2..7u32 {
            let mq = q(m as i64);
            assert_eq!(inverse_power_integral(&convex(1, "const-plus-indicator:1"), m).unwrap(), q(2));
            assert_eq!(inverse_power_integral(&convex(1, "one-plus-norm:l1"), m).unwrap(), q(2) / (&mq - q(1)));
            if m > 2 {
                let v = inverse_power_integral(&convex(2, "max-one-norm"), m).unwrap();
                assert_eq!(v, q(4) * &mq / (&mq - q(2)));
            }
        }
        assert!(matches!(
            inverse_power_integral(&convex(2, "max-one-norm"), 2),
            Err(Error::DivergentIntegral(_))
        ));
    }

    #[test]
    fn quadrants_sum_to_total() {
        let f = Base::Convex(convex(2, "max-one-norm"));
        let qs = quadrant_integrals(&f, 4).unwrap();
        assert_eq!(qs[0], q(2));
        assert_eq!(qs.iter().cloned().sum::<Q>(), q(8));
        let g = Base::Concave(concave(2, "tent"));
        let qs = quadrant_integrals(&g, 2).unwrap();
        assert!(qs.iter().all(|v| v == &qs[0]));
    }

    #[test]
    fn measure_of_square_with_flat_weight() {
        // m = n + 1: weight (m/2)|t|^0
        assert_eq!(mu_m(&Polytope::cube(2, &q(1)).unwrap(), 2, 1).unwrap(), q(4));
    }

    #[test]
    fn bounds_are_consistent() {
        for m in 1..=10 {
            let mq = q(m);
            let s = Q::one() / &mq;
            assert_eq!(volume_product_bound(2, &s, false), &mq * &mq * p_bound(2, &mq));
            if m > 2 {
                assert_eq!(volume_product_bound(2, &-s.clone(), false), &mq * &mq * q_bound(2, &mq));
                assert_eq!(volume_product_bound(2, &-s, true), &mq * &mq * q_bound_class_f(2, &mq));
            }
        }
    }

    #[test]
    fn float_matches_exact() {
        let f = convex(2, "max-one-norm");
        let exact = to_f64(&inverse_power_integral(&f, 5).unwrap());
        assert!((inverse_power_integral_f64(&f, 5.0).unwrap() / exact - 1.0).abs() < 1e-12);
        let g = concave(2, "tent");
        let exact = to_f64(&power_integral(&g, 3));
        assert!((power_integral_f64(&g, 3.0) / exact - 1.0).abs() < 1e-12);
    }
}

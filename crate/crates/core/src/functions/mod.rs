//! Even piecewise-linear concave and convex functions and the s-concave
//! functions `f^m`, `f^{-m}` built on them.

pub mod concave;
pub mod convex;
pub mod json;
pub mod named;
pub mod random;

pub use concave::PLConcaveFn;
pub use convex::{ClassFCertificate, Ext, PLConvexFn, Witness};
pub use named::{make_named, NormKind};
pub use random::{random_fn, RandomKind};

use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::geometry::rational::*;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sign {
    Positive,
    Negative,
}

/// Either side of the s-concave family.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Base {
    Concave(PLConcaveFn),
    Convex(PLConvexFn),
}

impl Base {
    pub fn n(&self) -> usize {
        match self {
            Base::Concave(f) => f.n(),
            Base::Convex(f) => f.n(),
        }
    }

    pub fn apply_linear(&self, t: &[Vec<Q>]) -> Result<Self> {
        Ok(match self {
            Base::Concave(f) => Base::Concave(f.apply_linear(t)?),
            Base::Convex(f) => Base::Convex(f.apply_linear(t)?),
        })
    }
}

/// `g = f^m` (`s = 1/m`) for concave `f`, or `g = f^{-m}` (`s = -1/m`) for convex `f`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SConcaveFn {
    m: Q,
    base: Base,
}

impl SConcaveFn {
    pub fn new(base: Base, m: Q) -> Result<Self> {
        if !m.is_positive() {
            return Err(Error::BadParams("m must be positive".into()));
        }
        if let Base::Convex(f) = &base {
            if m <= q(f.n() as i64) {
                return Err(Error::BadParams(format!("m must exceed n = {}", f.n())));
            }
        }
        Ok(Self { m, base })
    }

    pub fn concave(f: PLConcaveFn, m: u32) -> Result<Self> {
        Self::new(Base::Concave(f), q(m as i64))
    }

    pub fn convex(f: PLConvexFn, m: u32) -> Result<Self> {
        Self::new(Base::Convex(f), q(m as i64))
    }

    pub fn sign(&self) -> Sign {
        match self.base {
            Base::Concave(_) => Sign::Positive,
            Base::Convex(_) => Sign::Negative,
        }
    }

    pub fn m(&self) -> &Q {
        &self.m
    }

    /// `m` as an integer, when it is one.
    pub fn m_int(&self) -> Option<u32> {
        if self.m.is_integer() {
            self.m.to_integer().to_u32()
        } else {
            None
        }
    }

    /// `s = ±1/m`.
    pub fn s(&self) -> Q {
        let s = Q::one() / &self.m;
        match self.sign() {
            Sign::Positive => s,
            Sign::Negative => -s,
        }
    }

    pub fn base(&self) -> &Base {
        &self.base
    }

    pub fn n(&self) -> usize {
        self.base.n()
    }

    /// Exact value; requires integer `m`.
    pub fn eval(&self, x: &[Q]) -> Result<Q> {
        let m = self.m_int().ok_or_else(|| Error::BadParams("exact evaluation needs integer m".into()))?;
        Ok(match &self.base {
            Base::Concave(f) => pow_q(&f.eval(x), m),
            Base::Convex(f) => match f.eval(x) {
                Ext::Finite(v) => Q::one() / pow_q(&v, m),
                Ext::Infinity => Q::zero(),
            },
        })
    }

    pub fn eval_f64(&self, x: &[f64]) -> f64 {
        let m = to_f64(&self.m);
        match &self.base {
            Base::Concave(f) => f.eval_f64(x).powf(m),
            Base::Convex(f) => f.eval_f64(x).powf(-m),
        }
    }

    pub fn apply_linear(&self, t: &[Vec<Q>]) -> Result<Self> {
        Self::new(self.base.apply_linear(t)?, self.m.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::simplex::Affine;

    #[test]
    fn inverse_power_of_one_plus_l1() {
        let f = make_named(2, &named::Named::OnePlusNorm(NormKind::L1)).unwrap();
        let g = SConcaveFn::new(f, q(3)).unwrap();
        assert_eq!(g.eval(&pt(&[1, 1])).unwrap(), qr(1, 27));
        assert_eq!(g.s(), qr(-1, 3));
        assert!(!g.m().is_zero());
    }

    #[test]
    fn convex_side_needs_m_above_n() {
        let f = PLConvexFn::new(1, vec![Affine::new(pt(&[1]), q(1)), Affine::new(pt(&[-1]), q(1))], None).unwrap();
        assert!(SConcaveFn::convex(f.clone(), 1).is_err());
        assert!(SConcaveFn::convex(f, 2).is_ok());
    }
}

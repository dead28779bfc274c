//! Even piecewise-linear convex functions `f = max_i (a_i · x + b_i)`,
//! optionally restricted to a symmetric polytope `D` (`+∞` outside).

use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::geometry::polytope::{HalfSpace, Polytope};
use crate::geometry::rational::*;
use crate::geometry::simplex::Affine;

/// A value in `(-∞, +∞]`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Ext {
    Finite(Q),
    Infinity,
}

impl Ext {
    pub fn finite(&self) -> Option<&Q> {
        match self {
            Ext::Finite(v) => Some(v),
            Ext::Infinity => None,
        }
    }
}

impl fmt::Display for Ext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ext::Finite(v) => write!(f, "{}", fmt_q(v)),
            Ext::Infinity => write!(f, "inf"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PLConvexFn {
    n: usize,
    pieces: Vec<Affine>,
    domain: Option<Polytope>,
}

/// Why a convex function fails membership in the class F, if it does.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Witness {
    /// A boundary point of the domain past which `f` is infinite.
    DomainBoundary(Point),
    /// A direction along which `f` stays bounded.
    BoundedRay(Point),
    /// A point where `f <= 0`.
    NonPositiveAt(Point),
    /// A point inside the region of an active piece with `b < 0`; along its
    /// ray `t ↦ f(tx)/t` increases near `t = 1`.
    IncreasingPerspective { piece: usize, at: Point },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassFCertificate {
    pub finite_everywhere: bool,
    pub coercive: bool,
    pub positive: bool,
    pub perspective_monotone: bool,
    pub witnesses: Vec<Witness>,
}

impl ClassFCertificate {
    pub fn passes(&self) -> bool {
        self.finite_everywhere && self.coercive && self.positive && self.perspective_monotone
    }
}

impl PLConvexFn {
    /// Builds the canonical representation. Requires `f(0) > 0` and
    /// coercivity; the domain, when present, must be a symmetric polytope.
    pub fn new(n: usize, pieces: Vec<Affine>, domain: Option<Polytope>) -> Result<Self> {
        if !(1..=2).contains(&n) {
            return Err(Error::InvalidInput(format!("dimension {n} not supported")));
        }
        if pieces.is_empty() || pieces.iter().any(|p| p.dim() != n) {
            return Err(Error::InvalidInput("pieces missing or of the wrong dimension".into()));
        }
        if let Some(d) = &domain {
            if d.dim() != n || !d.is_centrally_symmetric() {
                return Err(Error::InvalidInput("domain must be a symmetric polytope".into()));
            }
        }
        let origin = vec![Q::zero(); n];
        if !pieces.iter().map(|p| p.eval(&origin)).max().unwrap().is_positive() {
            return Err(Error::NotPositive);
        }
        if domain.is_none() {
            if let Some(w) = flat_direction(n, &pieces) {
                return Err(Error::NotCoercive(Some(fmt_point(&w))));
            }
        }
        let raw = Self { n, pieces, domain };
        let upper = Polytope::from_halfspaces(n + 1, &raw.perspective_halfspaces()).map_err(|e| match e {
            Error::Unbounded => Error::NotCoercive(None),
            e => e,
        })?;
        let mut pieces = Vec::new();
        for h in upper.halfspaces() {
            if h.offset.is_positive() {
                let s = Q::one() / &h.offset;
                pieces.push(Affine::new(scale(&h.normal[..n], &s), &h.normal[n] * &s));
            }
        }
        pieces.sort();
        let f = Self { n, pieces, domain: raw.domain };
        if !f.pieces.iter().all(|p| f.pieces.contains(&p.reflected())) {
            return Err(Error::InvalidInput("function is not even".into()));
        }
        Ok(f)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn pieces(&self) -> &[Affine] {
        &self.pieces
    }

    pub fn domain(&self) -> Option<&Polytope> {
        self.domain.as_ref()
    }

    /// Half-spaces of the closed perspective body
    /// `{(x, t) : t >= 0, t f(x/t) <= 1}`.
    pub fn perspective_halfspaces(&self) -> Vec<HalfSpace> {
        let n = self.n;
        let mut down = vec![Q::zero(); n];
        down.push(-Q::one());
        let mut hs = vec![HalfSpace::new(down, Q::zero())];
        for p in &self.pieces {
            let mut normal = p.coeffs.clone();
            normal.push(p.constant.clone());
            hs.push(HalfSpace::new(normal, Q::one()));
        }
        if let Some(d) = &self.domain {
            for h in d.halfspaces() {
                let mut normal = h.normal.clone();
                normal.push(-h.offset.clone());
                hs.push(HalfSpace::new(normal, Q::zero()));
            }
        }
        hs
    }

    pub fn eval(&self, x: &[Q]) -> Ext {
        if let Some(d) = &self.domain {
            if !d.contains(x) {
                return Ext::Infinity;
            }
        }
        Ext::Finite(self.pieces.iter().map(|p| p.eval(x)).max().expect("non-empty"))
    }

    pub fn eval_f64(&self, x: &[f64]) -> f64 {
        if let Some(d) = &self.domain {
            let inside = d.halfspaces().iter().all(|h| {
                h.normal.iter().zip(x).map(|(a, b)| to_f64(a) * b).sum::<f64>() <= to_f64(&h.offset) + 1e-12
            });
            if !inside {
                return f64::INFINITY;
            }
        }
        self.pieces.iter().map(|p| p.eval_f64(x)).fold(f64::NEG_INFINITY, f64::max)
    }

    /// Recession function `max_i a_i · x`.
    pub fn recession(&self, x: &[Q]) -> Q {
        self.pieces.iter().map(|p| dot(&p.coeffs, x)).max().expect("non-empty")
    }

    /// `f(0) = min f` for even convex `f`.
    pub fn min_value(&self) -> Q {
        self.pieces.iter().map(|p| p.constant.clone()).max().expect("non-empty")
    }

    pub fn check_class_f(&self) -> ClassFCertificate {
        let mut witnesses = Vec::new();
        let finite_everywhere = self.domain.is_none();
        if let Some(d) = &self.domain {
            witnesses.push(Witness::DomainBoundary(d.vertices()[0].clone()));
        }
        // construction already enforced both of these
        let coercive = true;
        let positive = self.min_value().is_positive();
        let mut perspective_monotone = finite_everywhere;
        for (i, p) in self.pieces.iter().enumerate() {
            if p.constant.is_negative() {
                perspective_monotone = false;
                witnesses.push(Witness::IncreasingPerspective { piece: i, at: self.interior_point_of(i) });
            }
        }
        ClassFCertificate { finite_everywhere, coercive, positive, perspective_monotone, witnesses }
    }

    /// A point where piece `i` is the unique maximum (and which lies in the
    /// domain, if any).
    pub fn interior_point_of(&self, i: usize) -> Point {
        let p = &self.pieces[i];
        let mut hs: Vec<HalfSpace> = self
            .pieces
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i)
            .map(|(_, o)| HalfSpace::new(sub(&o.coeffs, &p.coeffs), &p.constant - &o.constant))
            .collect();
        match &self.domain {
            Some(d) => hs.extend(d.halfspaces()),
            None => {
                let r = self.arrangement_radius();
                hs.extend(Polytope::cube(self.n, &r).expect("cube").halfspaces());
            }
        }
        let cell = Polytope::from_halfspaces(self.n, &hs).expect("irredundant piece has a full cell");
        let k = q(cell.vertices().len() as i64);
        let sum = cell.vertices().iter().fold(vec![Q::zero(); self.n], |acc, v| add(&acc, v));
        scale(&sum, &(Q::one() / k))
    }

    /// A box radius containing every vertex of the piece arrangement.
    pub fn arrangement_radius(&self) -> Q {
        let mut r = Q::one();
        let k = self.pieces.len();
        for i in 0..k {
            for j in i + 1..k {
                let d = sub(&self.pieces[i].coeffs, &self.pieces[j].coeffs);
                let c = &self.pieces[j].constant - &self.pieces[i].constant;
                if self.n == 1 {
                    if !d[0].is_zero() {
                        r = r.max((&c / &d[0]).abs());
                    }
                    continue;
                }
                for l in j + 1..k {
                    let e = sub(&self.pieces[i].coeffs, &self.pieces[l].coeffs);
                    let ce = &self.pieces[l].constant - &self.pieces[i].constant;
                    if let Some(x) = solve(&[d.clone(), e], &[c.clone(), ce]) {
                        for v in x {
                            r = r.max(v.abs());
                        }
                    }
                }
            }
        }
        q(2) * r + Q::one()
    }

    /// `f ∘ T`.
    pub fn apply_linear(&self, t: &[Vec<Q>]) -> Result<Self> {
        let inv = inverse(t)?;
        let tt = transpose(t);
        let pieces = self.pieces.iter().map(|p| Affine::new(mat_vec(&tt, &p.coeffs), p.constant.clone())).collect();
        let domain = match &self.domain {
            Some(d) => Some(d.map_linear(&inv)?),
            None => None,
        };
        Self::new(self.n, pieces, domain)
    }
}

/// A nonzero direction orthogonal to every slope, if the slopes do not span.
fn flat_direction(n: usize, pieces: &[Affine]) -> Option<Point> {
    let nonzero: Vec<&Point> = pieces.iter().map(|p| &p.coeffs).filter(|a| !is_zero_vec(a)).collect();
    if n == 1 {
        return if nonzero.is_empty() { Some(pt(&[1])) } else { None };
    }
    let Some(w) = nonzero.first() else {
        return Some(pt(&[1, 0]));
    };
    let perp = vec![-w[1].clone(), w[0].clone()];
    if nonzero.iter().all(|a| dot(a, &perp).is_zero()) {
        Some(perp)
    } else {
        None
    }
}

fn fmt_point(p: &[Q]) -> String {
    let parts: Vec<String> = p.iter().map(fmt_q).collect();
    format!("({})", parts.join(", "))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one_plus_abs() -> PLConvexFn {
        PLConvexFn::new(1, vec![Affine::new(pt(&[1]), q(1)), Affine::new(pt(&[-1]), q(1))], None).unwrap()
    }

    #[test]
    fn eval_and_domain() {
        let f = PLConvexFn::new(1, vec![Affine::constant(1, q(1))], Some(Polytope::cube(1, &q(1)).unwrap())).unwrap();
        assert_eq!(f.eval(&pt(&[0])), Ext::Finite(q(1)));
        assert_eq!(f.eval(&pt(&[2])), Ext::Infinity);
        assert!(!f.check_class_f().passes());
        assert!(!f.check_class_f().finite_everywhere);
    }

    #[test]
    fn redundant_pieces_are_dropped() {
        let f = PLConvexFn::new(
            1,
            vec![
                Affine::new(pt(&[1]), q(1)),
                Affine::new(pt(&[-1]), q(1)),
                Affine::constant(1, qr(1, 2)),
                Affine::new(pt(&[1]), q(0)),
                Affine::new(pt(&[-1]), q(0)),
            ],
            None,
        )
        .unwrap();
        assert_eq!(f, one_plus_abs());
    }

    #[test]
    fn pieces_outside_domain_are_dropped() {
        let f = PLConvexFn::new(
            1,
            vec![Affine::constant(1, q(1)), Affine::new(pt(&[1]), q(-5)), Affine::new(pt(&[-1]), q(-5))],
            Some(Polytope::cube(1, &q(2)).unwrap()),
        )
        .unwrap();
        assert_eq!(f.pieces(), &[Affine::constant(1, q(1))]);
    }

    #[test]
    fn norm_is_not_positive() {
        let r = PLConvexFn::new(1, vec![Affine::new(pt(&[1]), q(0)), Affine::new(pt(&[-1]), q(0))], None);
        assert_eq!(r, Err(Error::NotPositive));
    }

    #[test]
    fn constant_without_domain_is_not_coercive() {
        let r = PLConvexFn::new(2, vec![Affine::constant(2, q(1))], None);
        assert!(matches!(r, Err(Error::NotCoercive(_))));
        let strip = PLConvexFn::new(2, vec![Affine::new(pt(&[1, 0]), q(1)), Affine::new(pt(&[-1, 0]), q(1))], None);
        assert!(matches!(strip, Err(Error::NotCoercive(_))));
    }

    #[test]
    fn negative_intercept_breaks_monotonicity() {
        let f = PLConvexFn::new(
            1,
            vec![Affine::constant(1, q(1)), Affine::new(pt(&[2]), q(-1)), Affine::new(pt(&[-2]), q(-1))],
            None,
        )
        .unwrap();
        let c = f.check_class_f();
        assert!(c.finite_everywhere && c.coercive && c.positive);
        assert!(!c.perspective_monotone);
        match &c.witnesses[0] {
            Witness::IncreasingPerspective { piece, at } => {
                assert_eq!(f.eval(at), Ext::Finite(f.pieces()[*piece].eval(at)));
                assert!(f.pieces()[*piece].eval(at) > q(1));
            }
            w => panic!("unexpected witness {w:?}"),
        }
        assert!(one_plus_abs().check_class_f().passes());
    }
}

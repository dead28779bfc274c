//! Duality transforms realized by polarity of the hypograph body
//! `K(f) = {(x, t) : |t| <= f(x)}` and the perspective body
//! `C_1(f) = {(x, t) : |t| f(x/|t|) <= 1}`.

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::functions::{Base, Ext, PLConcaveFn, PLConvexFn, SConcaveFn};
use crate::geometry::polytope::{HalfSpace, Polytope};
use crate::geometry::rational::*;
use crate::geometry::simplex::Affine;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HypographBody {
    pub body: Polytope,
    pub source: PLConcaveFn,
}

pub fn hypograph(f: &PLConcaveFn) -> Result<HypographBody> {
    let body = Polytope::from_halfspaces(f.n() + 1, &f.hypograph_halfspaces()).map_err(|e| match e {
        Error::DegenerateInput(_) => Error::ZeroFunction,
        e => e,
    })?;
    Ok(HypographBody { body, source: f.clone() })
}

/// `L f(y) = inf_x (1 - <x, y>)_+ / f(x)`, read back from `K(f)°`.
pub fn l_transform(f: &PLConcaveFn) -> Result<PLConcaveFn> {
    let k = hypograph(f)?;
    let polar = k.body.polar().map_err(|e| match e {
        Error::OriginNotInterior => Error::OriginOnBoundary,
        e => e,
    })?;
    PLConcaveFn::from_hypograph(f.n(), &polar)
}

/// Vertices of the common refinement of the support and the piece regions.
pub fn subdivision_vertices(f: &PLConcaveFn) -> Vec<Point> {
    let mut v: Vec<Point> = f.cells().into_iter().flat_map(|(_, c)| c.vertices().to_vec()).collect();
    v.sort();
    v.dedup();
    v
}

/// Independent evaluation of `L f(y)` as a minimum over subdivision vertices.
pub fn l_vertex_formula(f: &PLConcaveFn, y: &[Q]) -> Q {
    let polar_support = f.support().polar().expect("support contains the origin");
    if !polar_support.contains(y) {
        return Q::zero();
    }
    subdivision_vertices(f)
        .iter()
        .filter_map(|v| {
            let fv = f.eval(v);
            fv.is_positive().then(|| (Q::one() - dot(v, y)) / fv)
        })
        .min()
        .expect("f(0) > 0")
        .max(Q::zero())
}

/// The closed body `C_1(f)`, kept as its upper half and reflected on demand.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PerspectiveBody {
    pub upper: Polytope,
    /// Whether `upper ∪ σ(upper)` is convex, `σ` the reflection in `t = 0`.
    pub convex: bool,
    n: usize,
}

impl PerspectiveBody {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn lower(&self) -> Polytope {
        self.upper.map_linear(&reflection(self.n + 1)).expect("reflection is invertible")
    }

    /// `Conv(C_1(f))`.
    pub fn hull(&self) -> Polytope {
        let mut pts = self.upper.vertices().to_vec();
        pts.extend(self.lower().vertices().iter().cloned());
        Polytope::hull(&pts).expect("full-dimensional")
    }

    /// Exact membership in `upper ∪ σ(upper)`.
    pub fn contains(&self, x: &[Q]) -> bool {
        let mut r = x.to_vec();
        r[self.n] = -r[self.n].clone();
        self.upper.contains(x) || self.upper.contains(&r)
    }
}

fn reflection(d: usize) -> Matrix {
    let mut m = identity(d);
    m[d - 1][d - 1] = -Q::one();
    m
}

pub fn perspective_body(f: &PLConvexFn) -> Result<PerspectiveBody> {
    let n = f.n();
    let upper = Polytope::from_halfspaces(n + 1, &f.perspective_halfspaces()).map_err(|e| match e {
        Error::Unbounded => Error::NotCoercive(None),
        e => e,
    })?;
    let mut body = PerspectiveBody { upper, convex: false, n };
    body.convex = body.hull().volume() == q(2) * body.upper.volume();
    Ok(body)
}

/// `M f(y) = sup_x (1 + <x, y>) / f(x)`, read back from `Conv(C_1(f))°`.
pub fn m_transform(f: &PLConvexFn) -> Result<PLConvexFn> {
    let n = f.n();
    let polar = perspective_body(f)?.hull().polar()?;
    let mut pieces: Vec<Affine> = polar
        .halfspaces()
        .into_iter()
        .map(|h| {
            let s = Q::one() / &h.offset;
            Affine::new(scale(&h.normal[..n], &s), (&h.normal[n] * &s).abs())
        })
        .collect();
    pieces.sort();
    pieces.dedup();
    PLConvexFn::new(n, pieces, None)
}

/// Vertices of the piece arrangement of `f` inside its domain (or every
/// bounded arrangement vertex when there is no domain), including `0`.
pub fn breakpoints(f: &PLConvexFn) -> Vec<Point> {
    let n = f.n();
    let (frame, radius) = match f.domain() {
        Some(d) => (d.halfspaces(), None),
        None => {
            let r = f.arrangement_radius();
            (Polytope::cube(n, &r).expect("cube").halfspaces(), Some(r))
        }
    };
    let mut out = vec![vec![Q::zero(); n]];
    for (i, p) in f.pieces().iter().enumerate() {
        let mut hs: Vec<HalfSpace> = f
            .pieces()
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i)
            .map(|(_, o)| HalfSpace::new(sub(&o.coeffs, &p.coeffs), &p.constant - &o.constant))
            .collect();
        hs.extend(frame.iter().cloned());
        if let Ok(cell) = Polytope::from_halfspaces(n, &hs) {
            for v in cell.vertices() {
                if radius.as_ref().map_or(true, |r| v.iter().all(|c| &c.abs() != r)) {
                    out.push(v.clone());
                }
            }
        }
    }
    out.sort();
    out.dedup();
    out
}

/// Directions of the unbounded edges of the piece arrangement, scaled to
/// `rec_f(u) = 1`; empty when the domain is bounded.
pub fn recession_directions(f: &PLConvexFn) -> Vec<Point> {
    if f.domain().is_some() {
        return Vec::new();
    }
    let hs: Vec<HalfSpace> = f.pieces().iter().map(|p| HalfSpace::new(p.coeffs.clone(), Q::one())).collect();
    Polytope::from_halfspaces(f.n(), &hs).expect("coercive").vertices().to_vec()
}

/// Independent evaluation of `M f(y)` from breakpoints and asymptotic directions.
pub fn m_vertex_formula(f: &PLConvexFn, y: &[Q]) -> Q {
    let at_points = breakpoints(f).into_iter().filter_map(|v| match f.eval(&v) {
        Ext::Finite(fv) => Some((Q::one() + dot(&v, y)) / fv),
        Ext::Infinity => None,
    });
    let at_infinity = recession_directions(f).into_iter().map(|u| dot(&u, y) / f.recession(&u));
    at_points.chain(at_infinity).max().expect("origin is a breakpoint")
}

/// `L_s g`: `(L f(·/m))^m` for `s > 0`, `(M f(·/m))^{-m}` for `s < 0`.
pub fn ls_transform(g: &SConcaveFn) -> Result<SConcaveFn> {
    let t = scalar_matrix(g.n(), &(Q::one() / g.m()));
    let base = match g.base() {
        Base::Concave(f) => Base::Concave(l_transform(f)?.apply_linear(&t)?),
        Base::Convex(f) => Base::Convex(m_transform(f)?.apply_linear(&t)?),
    };
    SConcaveFn::new(base, g.m().clone())
}

/// `L_s L_s g`.
pub fn bipolar(g: &SConcaveFn) -> Result<SConcaveFn> {
    ls_transform(&ls_transform(g)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functions::named::{make_named, parse_named, Named};

    fn named(n: usize, s: &str) -> Base {
        make_named(n, &parse_named(n, s).unwrap()).unwrap()
    }

    fn concave(n: usize, s: &str) -> PLConcaveFn {
        match named(n, s) {
            Base::Concave(f) => f,
            _ => panic!(),
        }
    }

    fn convex(n: usize, s: &str) -> PLConvexFn {
        match named(n, s) {
            Base::Convex(f) => f,
            _ => panic!(),
        }
    }

    #[test]
    fn hypograph_of_square_indicator_is_cube() {
        assert_eq!(hypograph(&concave(2, "indicator")).unwrap().body, Polytope::cube(3, &q(1)).unwrap());
        assert_eq!(hypograph(&concave(1, "tent")).unwrap().body, Polytope::cross_polytope(2, &q(1)).unwrap());
    }

    #[test]
    fn l_of_indicator_is_l1_tent() {
        assert_eq!(l_transform(&concave(2, "indicator")).unwrap(), concave(2, "tent:l1"));
        assert_eq!(l_transform(&concave(1, "tent")).unwrap(), concave(1, "indicator"));
    }

    #[test]
    fn perspective_bodies_of_named_functions() {
        let b = perspective_body(&convex(1, "const-plus-indicator:1")).unwrap();
        assert_eq!(b.upper, Polytope::hull(&[pt(&[0, 0]), pt(&[1, 1]), pt(&[-1, 1])]).unwrap());
        assert!(!b.convex);
        let b = perspective_body(&convex(1, "one-plus-norm:l1")).unwrap();
        assert!(b.convex);
        assert_eq!(b.hull(), Polytope::cross_polytope(2, &q(1)).unwrap());
        let b = perspective_body(&convex(1, "max-one-norm")).unwrap();
        assert_eq!(b.hull(), Polytope::cube(2, &q(1)).unwrap());
    }

    #[test]
    fn m_of_named_functions() {
        assert_eq!(m_transform(&convex(1, "const-plus-indicator:1")).unwrap(), convex(1, "one-plus-norm:l1"));
        assert_eq!(m_transform(&convex(2, "max-one-norm:inf")).unwrap(), convex(2, "one-plus-norm:l1"));
        assert_eq!(m_transform(&convex(1, "one-plus-norm:l1")).unwrap(), convex(1, "max-one-norm"));
    }

    #[test]
    fn vertex_formulas_agree_on_named() {
        let f = convex(2, "max-one-norm:inf");
        let mf = m_transform(&f).unwrap();
        for y in [pt(&[0, 0]), pt(&[3, -1]), vec![qr(1, 3), qr(2, 7)]] {
            assert_eq!(Ext::Finite(m_vertex_formula(&f, &y)), mf.eval(&y));
        }
        let g = concave(2, "indicator");
        let lg = l_transform(&g).unwrap();
        for y in [pt(&[0, 0]), vec![qr(1, 3), qr(-1, 5)], pt(&[2, 0])] {
            assert_eq!(l_vertex_formula(&g, &y), lg.eval(&y));
        }
    }

    #[test]
    fn ls_of_cube_indicator() {
        let g = SConcaveFn::new(named(2, "indicator"), q(3)).unwrap();
        let lg = ls_transform(&g).unwrap();
        let tent = make_named(2, &Named::Tent(Polytope::cross_polytope(2, &q(3)).unwrap())).unwrap();
        assert_eq!(lg.base(), &tent);
        assert_eq!(lg.eval(&pt(&[1, 1])).unwrap(), qr(1, 27));
        assert_eq!(bipolar(&g).unwrap(), g);
    }
}

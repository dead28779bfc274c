//! Even piecewise-linear concave functions `f = min_i (c_i · x + d_i)` on a
//! symmetric polytopal support, zero outside.

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::geometry::polytope::{HalfSpace, Polytope};
use crate::geometry::rational::*;
use crate::geometry::simplex::Affine;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PLConcaveFn {
    n: usize,
    support: Polytope,
    pieces: Vec<Affine>,
}

impl PLConcaveFn {
    /// Builds the canonical representation: irredundant sorted pieces and the
    /// support read back from the hypograph body. Requires `f >= 0` on the
    /// support.
    pub fn new(n: usize, support: Polytope, pieces: Vec<Affine>) -> Result<Self> {
        check_shape(n, &support, &pieces)?;
        if !support.is_centrally_symmetric() {
            return Err(Error::InvalidInput("support is not symmetric".into()));
        }
        for v in support.vertices() {
            if min_value(&pieces, v).is_negative() {
                return Err(Error::InvalidInput("function is negative on its support".into()));
            }
        }
        if !min_value(&pieces, &vec![Q::zero(); n]).is_positive() {
            return Err(Error::ZeroFunction);
        }
        let body = Polytope::from_halfspaces(n + 1, &hypograph_halfspaces(&support, &pieces))
            .map_err(|e| match e {
                Error::DegenerateInput(_) => Error::ZeroFunction,
                e => e,
            })?;
        let f = Self::from_hypograph(n, &body)?;
        if !f.is_even() {
            return Err(Error::InvalidInput("function is not even".into()));
        }
        Ok(f)
    }

    /// Like [`PLConcaveFn::new`] but first shrinks the support to the region
    /// where every piece is non-negative.
    pub fn new_clipped(n: usize, support: Polytope, pieces: Vec<Affine>) -> Result<Self> {
        check_shape(n, &support, &pieces)?;
        let extra: Vec<HalfSpace> =
            pieces.iter().map(|p| HalfSpace::new(neg(&p.coeffs), p.constant.clone())).collect();
        let support = support.clip(&extra).map_err(|e| match e {
            Error::DegenerateInput(_) => Error::ZeroFunction,
            e => e,
        })?;
        Self::new(n, support, pieces)
    }

    /// Reads `f` back from a body `{(x, t) : |t| <= f(x)}` in `R^{n+1}`.
    pub fn from_hypograph(n: usize, body: &Polytope) -> Result<Self> {
        if body.dim() != n + 1 {
            return Err(Error::InvalidInput("body has the wrong dimension".into()));
        }
        let support = body.project_prefix(n)?;
        let mut pieces = Vec::new();
        for h in body.halfspaces() {
            let nt = &h.normal[n];
            if nt.is_positive() {
                let coeffs = scale(&h.normal[..n], &(-Q::one() / nt));
                pieces.push(Affine::new(coeffs, &h.offset / nt));
            }
        }
        if pieces.is_empty() {
            return Err(Error::ZeroFunction);
        }
        pieces.sort();
        Ok(Self { n, support, pieces })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn support(&self) -> &Polytope {
        &self.support
    }

    pub fn pieces(&self) -> &[Affine] {
        &self.pieces
    }

    /// Half-spaces of `{(x, t) : x ∈ supp f, |t| <= f(x)}`.
    pub fn hypograph_halfspaces(&self) -> Vec<HalfSpace> {
        hypograph_halfspaces(&self.support, &self.pieces)
    }

    pub fn eval(&self, x: &[Q]) -> Q {
        if !self.support.contains(x) {
            return Q::zero();
        }
        min_value(&self.pieces, x)
    }

    pub fn eval_f64(&self, x: &[f64]) -> f64 {
        let inside = self.support.halfspaces().iter().all(|h| {
            h.normal.iter().zip(x).map(|(a, b)| to_f64(a) * b).sum::<f64>() <= to_f64(&h.offset) + 1e-12
        });
        if !inside {
            return 0.0;
        }
        self.pieces.iter().map(|p| p.eval_f64(x)).fold(f64::INFINITY, f64::min).max(0.0)
    }

    /// `f(0)`, the maximum of an even concave function.
    pub fn max_value(&self) -> Q {
        min_value(&self.pieces, &vec![Q::zero(); self.n])
    }

    pub fn is_even(&self) -> bool {
        self.support.is_centrally_symmetric() && self.pieces.iter().all(|p| self.pieces.contains(&p.reflected()))
    }

    /// Regions of the support on which piece `i` attains the minimum, paired
    /// with the piece index.
    pub fn cells(&self) -> Vec<(usize, Polytope)> {
        let mut out = Vec::new();
        for (i, p) in self.pieces.iter().enumerate() {
            let extra: Vec<HalfSpace> = self
                .pieces
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .map(|(_, o)| HalfSpace::new(sub(&p.coeffs, &o.coeffs), &o.constant - &p.constant))
                .collect();
            if let Ok(cell) = self.support.clip(&extra) {
                out.push((i, cell));
            }
        }
        out
    }

    /// `f ∘ T`.
    pub fn apply_linear(&self, t: &[Vec<Q>]) -> Result<Self> {
        let inv = inverse(t)?;
        let tt = transpose(t);
        let pieces = self.pieces.iter().map(|p| Affine::new(mat_vec(&tt, &p.coeffs), p.constant.clone())).collect();
        Self::new(self.n, self.support.map_linear(&inv)?, pieces)
    }
}

fn check_shape(n: usize, support: &Polytope, pieces: &[Affine]) -> Result<()> {
    if !(1..=2).contains(&n) {
        return Err(Error::InvalidInput(format!("dimension {n} not supported")));
    }
    if support.dim() != n || pieces.iter().any(|p| p.dim() != n) {
        return Err(Error::InvalidInput("dimension mismatch".into()));
    }
    if pieces.is_empty() {
        return Err(Error::InvalidInput("no pieces".into()));
    }
    Ok(())
}

fn min_value(pieces: &[Affine], x: &[Q]) -> Q {
    pieces.iter().map(|p| p.eval(x)).min().expect("pieces are non-empty")
}

fn hypograph_halfspaces(support: &Polytope, pieces: &[Affine]) -> Vec<HalfSpace> {
    let mut hs: Vec<HalfSpace> = support
        .halfspaces()
        .into_iter()
        .map(|h| {
            let mut normal = h.normal;
            normal.push(Q::zero());
            HalfSpace::new(normal, h.offset)
        })
        .collect();
    for p in pieces {
        for s in [Q::one(), -Q::one()] {
            let mut normal = neg(&p.coeffs);
            normal.push(s);
            hs.push(HalfSpace::new(normal, p.constant.clone()));
        }
    }
    hs
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square() -> Polytope {
        Polytope::cube(2, &q(1)).unwrap()
    }

    #[test]
    fn indicator_has_single_piece() {
        let f = PLConcaveFn::new(2, square(), vec![Affine::constant(2, q(1))]).unwrap();
        assert_eq!(f.pieces(), &[Affine::constant(2, q(1))]);
        assert_eq!(f.eval(&pt(&[0, 0])), q(1));
        assert_eq!(f.eval(&pt(&[2, 0])), q(0));
    }

    #[test]
    fn redundant_pieces_are_dropped() {
        let pieces = vec![
            Affine::constant(1, q(1)),
            Affine::constant(1, q(5)),
            Affine::new(pt(&[1]), q(10)),
            Affine::new(pt(&[-1]), q(10)),
        ];
        let f = PLConcaveFn::new(1, Polytope::cube(1, &q(1)).unwrap(), pieces).unwrap();
        assert_eq!(f.pieces(), &[Affine::constant(1, q(1))]);
    }

    #[test]
    fn clipping_shrinks_support() {
        let pieces = vec![Affine::new(pt(&[1]), q(1)), Affine::new(pt(&[-1]), q(1))];
        let f = PLConcaveFn::new_clipped(1, Polytope::cube(1, &q(3)).unwrap(), pieces).unwrap();
        assert_eq!(f.support(), &Polytope::cube(1, &q(1)).unwrap());
        assert_eq!(f.eval(&vec![qr(1, 2)]), qr(1, 2));
    }

    #[test]
    fn odd_function_is_rejected() {
        let pieces = vec![Affine::new(pt(&[1]), q(2)), Affine::new(pt(&[-1]), q(3))];
        assert!(PLConcaveFn::new(1, Polytope::cube(1, &q(1)).unwrap(), pieces).is_err());
    }

    #[test]
    fn zero_function_is_rejected() {
        assert_eq!(
            PLConcaveFn::new(2, square(), vec![Affine::constant(2, q(0))]),
            Err(Error::ZeroFunction)
        );
    }

    #[test]
    fn linear_map_scales_support() {
        let f = PLConcaveFn::new(2, square(), vec![Affine::constant(2, q(1))]).unwrap();
        let t = vec![pt(&[2, 0]), pt(&[0, 1])];
        let g = f.apply_linear(&t).unwrap();
        let expect = Polytope::hull(&[
            vec![qr(1, 2), q(1)],
            vec![qr(-1, 2), q(1)],
            vec![qr(1, 2), q(-1)],
            vec![qr(-1, 2), q(-1)],
        ])
        .unwrap();
        assert_eq!(g.support(), &expect);
    }

    #[test]
    fn cells_cover_support() {
        let sq = square();
        let pieces: Vec<Affine> = sq.halfspaces().into_iter().map(|h| Affine::new(neg(&h.normal), q(1))).collect();
        let tent = PLConcaveFn::new(2, sq.clone(), pieces).unwrap();
        let total: Q = tent.cells().iter().map(|(_, c)| c.volume()).sum();
        assert_eq!(total, sq.volume());
        assert_eq!(tent.cells().len(), 4);
    }
}

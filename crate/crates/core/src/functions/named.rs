//! Constructors for the standard extremal functions.

use num_traits::{One, Signed, Zero};

use super::{Base, PLConcaveFn, PLConvexFn};
use crate::error::{Error, Result};
use crate::geometry::polytope::Polytope;
use crate::geometry::rational::*;
use crate::geometry::simplex::Affine;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NormKind {
    LInf,
    L1,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Named {
    /// `1_P`.
    Indicator(Polytope),
    /// `(1 - ‖x‖_P)_+`.
    Tent(Polytope),
    /// `max(1, ‖x‖)`.
    MaxOneNorm(NormKind),
    /// `1 + ‖x‖`.
    OnePlusNorm(NormKind),
    /// `c + I_P`.
    ConstPlusIndicator(Q, Polytope),
}

/// Dual vectors whose maximum is the norm: `±e_i` for `ℓ∞`, sign vectors for `ℓ1`.
fn norm_slopes(n: usize, kind: NormKind) -> Vec<Point> {
    match kind {
        NormKind::LInf => Polytope::cross_polytope(n, &Q::one()).expect("cross-polytope").vertices().to_vec(),
        NormKind::L1 => Polytope::cube(n, &Q::one()).expect("cube").vertices().to_vec(),
    }
}

fn check_body(n: usize, p: &Polytope) -> Result<()> {
    if p.dim() != n || !p.is_centrally_symmetric() {
        return Err(Error::BadParams("body must be a symmetric polytope of dimension n".into()));
    }
    Ok(())
}

pub fn make_named(n: usize, name: &Named) -> Result<Base> {
    if !(1..=2).contains(&n) {
        return Err(Error::BadParams(format!("dimension {n} not supported")));
    }
    match name {
        Named::Indicator(p) => {
            check_body(n, p)?;
            Ok(Base::Concave(PLConcaveFn::new(n, p.clone(), vec![Affine::constant(n, Q::one())])?))
        }
        Named::Tent(p) => {
            check_body(n, p)?;
            let pieces = p.halfspaces().into_iter().map(|h| Affine::new(neg(&h.normal), Q::one())).collect();
            Ok(Base::Concave(PLConcaveFn::new(n, p.clone(), pieces)?))
        }
        Named::MaxOneNorm(kind) => {
            let mut pieces: Vec<Affine> =
                norm_slopes(n, *kind).into_iter().map(|a| Affine::new(a, Q::zero())).collect();
            pieces.push(Affine::constant(n, Q::one()));
            Ok(Base::Convex(PLConvexFn::new(n, pieces, None)?))
        }
        Named::OnePlusNorm(kind) => {
            let pieces = norm_slopes(n, *kind).into_iter().map(|a| Affine::new(a, Q::one())).collect();
            Ok(Base::Convex(PLConvexFn::new(n, pieces, None)?))
        }
        Named::ConstPlusIndicator(c, p) => {
            check_body(n, p)?;
            if !c.is_positive() {
                return Err(Error::BadParams("constant must be positive".into()));
            }
            Ok(Base::Convex(PLConvexFn::new(n, vec![Affine::constant(n, c.clone())], Some(p.clone()))?))
        }
    }
}

/// Parses `name[:arg]` as used on the command line. Bodies are cubes `[-a, a]^n`
/// unless the argument is `l1`, which selects the cross-polytope.
pub fn parse_named(n: usize, spec: &str) -> Result<Named> {
    let mut parts = spec.split(':');
    let name = parts.next().unwrap_or_default();
    let args: Vec<&str> = parts.collect();
    let body = |arg: Option<&&str>| -> Result<Polytope> {
        match arg {
            Some(&"l1") => Polytope::cross_polytope(n, &Q::one()),
            Some(a) => {
                let a = parse_q(a)?;
                if !a.is_positive() {
                    return Err(Error::BadParams("half-width must be positive".into()));
                }
                Polytope::cube(n, &a)
            }
            None => Polytope::cube(n, &Q::one()),
        }
    };
    let norm = |arg: Option<&&str>| -> Result<NormKind> {
        match arg {
            None | Some(&"inf") => Ok(NormKind::LInf),
            Some(&"1") | Some(&"l1") => Ok(NormKind::L1),
            Some(a) => Err(Error::BadParams(format!("unknown norm {a:?}"))),
        }
    };
    Ok(match name {
        "indicator" => Named::Indicator(body(args.first())?),
        "tent" => Named::Tent(body(args.first())?),
        "max-one-norm" => Named::MaxOneNorm(norm(args.first())?),
        "one-plus-norm" => Named::OnePlusNorm(norm(args.first())?),
        "const-plus-indicator" => {
            let c = args.first().map(|s| parse_q(s)).transpose()?.unwrap_or_else(Q::one);
            Named::ConstPlusIndicator(c, body(args.get(1))?)
        }
        other => return Err(Error::BadParams(format!("unknown function {other:?}"))),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functions::Ext;

    #[test]
    fn indicator_square() {
        let Base::Concave(f) = make_named(2, &Named::Indicator(Polytope::cube(2, &q(1)).unwrap())).unwrap() else {
            panic!()
        };
        assert_eq!(f.pieces(), &[Affine::constant(2, q(1))]);
    }

    #[test]
    fn one_plus_l1_in_one_dimension() {
        let Base::Convex(f) = make_named(1, &Named::OnePlusNorm(NormKind::L1)).unwrap() else { panic!() };
        assert_eq!(f.pieces(), &[Affine::new(pt(&[-1]), q(1)), Affine::new(pt(&[1]), q(1))]);
        assert!(f.domain().is_none());
    }

    #[test]
    fn max_one_inf_norm() {
        let Base::Convex(f) = make_named(2, &Named::MaxOneNorm(NormKind::LInf)).unwrap() else { panic!() };
        assert_eq!(f.eval(&pt(&[3, 0])), Ext::Finite(q(3)));
        assert_eq!(f.eval(&vec![qr(1, 2), qr(-1, 3)]), Ext::Finite(q(1)));
        assert_eq!(f.pieces().len(), 5);
        assert!(f.check_class_f().passes());
    }

    #[test]
    fn const_plus_indicator() {
        let Base::Convex(f) = make_named(1, &parse_named(1, "const-plus-indicator:1").unwrap()).unwrap() else {
            panic!()
        };
        assert_eq!(f.eval(&pt(&[1])), Ext::Finite(q(1)));
        assert_eq!(f.eval(&vec![qr(3, 2)]), Ext::Infinity);
        assert!(!f.check_class_f().finite_everywhere);
    }

    #[test]
    fn bad_names() {
        assert!(parse_named(2, "gaussian").is_err());
        assert!(parse_named(2, "indicator:-1").is_err());
        assert!(make_named(3, &Named::MaxOneNorm(NormKind::L1)).is_err());
    }
}

//! Seeded random corpora of even PL functions.

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Base, PLConcaveFn, PLConvexFn};
use crate::error::{Error, Result};
use crate::geometry::polytope::Polytope;
use crate::geometry::rational::*;
use crate::geometry::simplex::Affine;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RandomKind {
    Concave,
    ConvexCoercive,
    ClassF,
}

const MAX_TRIES: usize = 256;

fn small_q(rng: &mut ChaCha8Rng, lo: i64, hi: i64) -> Q {
    let den = rng.gen_range(1..=4i64);
    let num = rng.gen_range(lo * den..=hi * den);
    Q::new(BigInt::from(num), BigInt::from(den))
}

fn positive_q(rng: &mut ChaCha8Rng, hi: i64) -> Q {
    let den = rng.gen_range(1..=4i64);
    let num = rng.gen_range(1..=hi * den);
    Q::new(BigInt::from(num), BigInt::from(den))
}

/// Symmetric polygon `conv{±v_i}` (or segment `[-a, a]`).
fn random_body(rng: &mut ChaCha8Rng, n: usize) -> Result<Polytope> {
    if n == 1 {
        let a = positive_q(rng, 3);
        return Polytope::cube(1, &a);
    }
    let count = rng.gen_range(2..=4);
    let mut pts = Vec::new();
    for _ in 0..count {
        let v = vec![small_q(rng, -3, 3), small_q(rng, -3, 3)];
        pts.push(neg(&v));
        pts.push(v);
    }
    Polytope::hull(&pts)
}

fn symmetrize(pieces: Vec<Affine>) -> Vec<Affine> {
    pieces.into_iter().flat_map(|p| [p.reflected(), p]).collect()
}

fn try_once(rng: &mut ChaCha8Rng, kind: RandomKind, n: usize, k: usize) -> Result<Base> {
    match kind {
        RandomKind::Concave => {
            let support = random_body(rng, n)?;
            let pieces = (0..k)
                .map(|_| {
                    let c = (0..n).map(|_| small_q(rng, -2, 2)).collect();
                    Affine::new(c, positive_q(rng, 3))
                })
                .collect();
            Ok(Base::Concave(PLConcaveFn::new_clipped(n, support, symmetrize(pieces))?))
        }
        RandomKind::ConvexCoercive | RandomKind::ClassF => {
            let class_f = kind == RandomKind::ClassF;
            // a coercive even PL function needs gradients spanning R^n
            let mut pieces: Vec<Affine> = (0..k.max(n))
                .map(|_| {
                    let a = (0..n).map(|_| small_q(rng, -3, 3)).collect();
                    let b = if class_f { small_q(rng, 0, 3) } else { small_q(rng, -2, 3) };
                    Affine::new(a, b)
                })
                .collect();
            pieces.push(Affine::constant(n, positive_q(rng, 2)));
            let domain = if !class_f && rng.gen_bool(0.5) { Some(random_body(rng, n)?) } else { None };
            Ok(Base::Convex(PLConvexFn::new(n, symmetrize(pieces), domain)?))
        }
    }
}

/// Deterministic in `seed`. Degenerate draws are redrawn from the same stream.
/// Convex kinds use at least `n` gradient pairs.
pub fn random_fn(seed: u64, kind: RandomKind, n: usize, k: usize) -> Result<Base> {
    if k == 0 || !(1..=2).contains(&n) {
        return Err(Error::BadParams("need k >= 1 and n in {1, 2}".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut last = Error::BadParams("no draw".into());
    for _ in 0..MAX_TRIES {
        match try_once(&mut rng, kind, n, k) {
            Ok(f) => return Ok(f),
            Err(e) => last = e,
        }
    }
    Err(last)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic() {
        for kind in [RandomKind::Concave, RandomKind::ConvexCoercive, RandomKind::ClassF] {
            assert_eq!(random_fn(1, kind, 2, 3).unwrap(), random_fn(1, kind, 2, 3).unwrap());
        }
    }

    #[test]
    fn class_f_draws_pass_validator() {
        for seed in 0..40 {
            for n in [1, 2] {
                let Base::Convex(f) = random_fn(seed, RandomKind::ClassF, n, 3).unwrap() else { panic!() };
                assert!(f.check_class_f().passes(), "seed {seed}");
            }
        }
    }

    #[test]
    fn concave_draws_are_valid() {
        for seed in 0..40 {
            let Base::Concave(f) = random_fn(seed, RandomKind::Concave, 2, 3).unwrap() else { panic!() };
            assert!(f.is_even());
            assert!(f.max_value() > q(0));
        }
    }
}

//! Rational scalars and small dense vectors/matrices over them.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Exact rational scalar. Always kept in lowest terms with a positive denominator.
pub type Q = BigRational;

/// A point or vector with rational coordinates.
pub type Point = Vec<Q>;

/// Row-major square matrix with rational entries.
pub type Matrix = Vec<Vec<Q>>;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn qr(num: i64, den: i64) -> Q {
    Q::new(BigInt::from(num), BigInt::from(den))
}

pub fn pt(coords: &[i64]) -> Point {
    coords.iter().map(|&c| q(c)).collect()
}

pub fn to_f64(x: &Q) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

pub fn point_to_f64(p: &[Q]) -> Vec<f64> {
    p.iter().map(to_f64).collect()
}

/// Formats as `"p/q"`, always with an explicit denominator.
pub fn fmt_q(x: &Q) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

/// Parses `"p/q"`, `"p"` or a finite decimal such as `"-0.25"`.
pub fn parse_q(s: &str) -> Result<Q> {
    let s = s.trim().replace('\u{2212}', "-");
    let bad = || Error::InvalidInput(format!("not a rational: {s:?}"));
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(Q::new(n, d));
    }
    if let Some((int, frac)) = s.split_once('.') {
        let neg = int.starts_with('-');
        let int_abs = int.trim_start_matches(['-', '+']);
        let digits = format!("{}{}", if int_abs.is_empty() { "0" } else { int_abs }, frac);
        let n: BigInt = digits.parse().map_err(|_| bad())?;
        let d = num_traits::pow(BigInt::from(10), frac.len());
        let v = Q::new(n, d);
        return Ok(if neg { -v } else { v });
    }
    let n: BigInt = s.parse().map_err(|_| bad())?;
    Ok(Q::from_integer(n))
}

/// Rounds a float to the nearest multiple of `2^-bits`.
pub fn snap_f64(x: f64, bits: u32) -> Q {
    let scale = (1u64 << bits) as f64;
    let n = (x * scale).round() as i64;
    Q::new(BigInt::from(n), BigInt::from(1u64 << bits))
}

pub fn pow_q(x: &Q, e: u32) -> Q {
    num_traits::pow(x.clone(), e as usize)
}

pub fn dot(a: &[Q], b: &[Q]) -> Q {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn sub(a: &[Q], b: &[Q]) -> Point {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn add(a: &[Q], b: &[Q]) -> Point {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn scale(a: &[Q], s: &Q) -> Point {
    a.iter().map(|x| x * s).collect()
}

pub fn neg(a: &[Q]) -> Point {
    a.iter().map(|x| -x).collect()
}

pub fn is_zero_vec(a: &[Q]) -> bool {
    a.iter().all(Zero::is_zero)
}

pub fn cross3(a: &[Q], b: &[Q]) -> Point {
    vec![
        &a[1] * &b[2] - &a[2] * &b[1],
        &a[2] * &b[0] - &a[0] * &b[2],
        &a[0] * &b[1] - &a[1] * &b[0],
    ]
}

pub fn det(m: &[Vec<Q>]) -> Q {
    match m.len() {
        0 => Q::one(),
        1 => m[0][0].clone(),
        2 => &m[0][0] * &m[1][1] - &m[0][1] * &m[1][0],
        3 => dot(&m[0], &cross3(&m[1], &m[2])),
        n => {
            // Laplace expansion; only used for tiny matrices.
            let mut acc = Q::zero();
            for j in 0..n {
                let minor: Vec<Vec<Q>> = m[1..]
                    .iter()
                    .map(|row| {
                        row.iter()
                            .enumerate()
                            .filter(|(k, _)| *k != j)
                            .map(|(_, v)| v.clone())
                            .collect()
                    })
                    .collect();
                let term = &m[0][j] * det(&minor);
                if j % 2 == 0 {
                    acc += term;
                } else {
                    acc -= term;
                }
            }
            acc
        }
    }
}

/// Solves `A x = b` by Cramer's rule. Returns `None` when `A` is singular.
pub fn solve(a: &[Vec<Q>], b: &[Q]) -> Option<Point> {
    let d = det(a);
    if d.is_zero() {
        return None;
    }
    let n = a.len();
    let mut x = Vec::with_capacity(n);
    for j in 0..n {
        let mj: Vec<Vec<Q>> = a
            .iter()
            .zip(b)
            .map(|(row, bi)| {
                let mut r = row.clone();
                r[j] = bi.clone();
                r
            })
            .collect();
        x.push(det(&mj) / &d);
    }
    Some(x)
}

pub fn identity(n: usize) -> Matrix {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { Q::one() } else { Q::zero() }).collect())
        .collect()
}

pub fn transpose(m: &[Vec<Q>]) -> Matrix {
    let n = m.len();
    (0..n).map(|i| (0..n).map(|j| m[j][i].clone()).collect()).collect()
}

pub fn mat_vec(m: &[Vec<Q>], v: &[Q]) -> Point {
    m.iter().map(|row| dot(row, v)).collect()
}

pub fn mat_mul(a: &[Vec<Q>], b: &[Vec<Q>]) -> Matrix {
    let bt = transpose(b);
    a.iter().map(|row| bt.iter().map(|col| dot(row, col)).collect()).collect()
}

pub fn inverse(m: &[Vec<Q>]) -> Result<Matrix> {
    let n = m.len();
    let d = det(m);
    if d.is_zero() {
        return Err(Error::SingularMatrix);
    }
    let mut cols = Vec::with_capacity(n);
    for j in 0..n {
        let e: Point = (0..n).map(|i| if i == j { Q::one() } else { Q::zero() }).collect();
        cols.push(solve(m, &e).ok_or(Error::SingularMatrix)?);
    }
    Ok(transpose(&cols))
}

pub fn scalar_matrix(n: usize, s: &Q) -> Matrix {
    identity(n).into_iter().map(|row| scale(&row, s)).collect()
}

/// Divides `v` by the largest absolute coordinate so that equal directions compare equal.
pub fn normalize_direction(v: &[Q]) -> Point {
    let m = v.iter().map(|x| x.abs()).max().unwrap_or_else(Q::zero);
    if m.is_zero() {
        return v.to_vec();
    }
    scale(v, &(Q::one() / m))
}

pub fn factorial(k: u32) -> Q {
    (1..=k).fold(Q::one(), |acc, i| acc * q(i as i64))
}

pub fn sign(x: &Q) -> i32 {
    if x.is_positive() {
        1
    } else if x.is_negative() {
        -1
    } else {
        0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format() {
        assert_eq!(parse_q("3/6").unwrap(), qr(1, 2));
        assert_eq!(parse_q("-0.25").unwrap(), qr(-1, 4));
        assert_eq!(parse_q("−2").unwrap(), q(-2));
        assert_eq!(fmt_q(&q(3)), "3/1");
        assert_eq!(fmt_q(&qr(-4, 6)), "-2/3");
        assert!(parse_q("1/0").is_err());
        assert!(parse_q("abc").is_err());
    }

    #[test]
    fn inverse_roundtrip() {
        let m = vec![vec![q(2), q(1)], vec![q(1), q(3)]];
        let inv = inverse(&m).unwrap();
        assert_eq!(mat_mul(&m, &inv), identity(2));
        assert_eq!(inverse(&[vec![q(1), q(2)], vec![q(2), q(4)]]), Err(Error::SingularMatrix));
    }

    #[test]
    fn cramer_three_by_three() {
        let a = vec![pt(&[1, 2, 0]), pt(&[0, 1, 1]), pt(&[1, 0, 3])];
        let x = pt(&[1, -1, 2]);
        let b = mat_vec(&a, &x);
        assert_eq!(solve(&a, &b).unwrap(), x);
    }
}

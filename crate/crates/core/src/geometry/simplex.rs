//! Simplices and exact integration of powers of affine functionals over them.

use num_traits::{One, Signed, Zero};

use super::rational::*;
use crate::error::{Error, Result};

/// Affine functional `x ↦ coeffs · x + constant`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Affine {
    pub coeffs: Point,
    pub constant: Q,
}

impl Affine {
    pub fn new(coeffs: Point, constant: Q) -> Self {
        Self { coeffs, constant }
    }

    pub fn constant(dim: usize, c: Q) -> Self {
        Self::new(vec![Q::zero(); dim], c)
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    pub fn eval(&self, x: &[Q]) -> Q {
        dot(&self.coeffs, x) + &self.constant
    }

    pub fn eval_f64(&self, x: &[f64]) -> f64 {
        self.coeffs.iter().zip(x).map(|(c, v)| to_f64(c) * v).sum::<f64>() + to_f64(&self.constant)
    }

    /// `x ↦ self(-x)`.
    pub fn reflected(&self) -> Self {
        Self::new(neg(&self.coeffs), self.constant.clone())
    }
}

/// Non-degenerate simplex with `d + 1` vertices in `R^d`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Simplex {
    vertices: Vec<Point>,
}

impl Simplex {
    pub fn new(vertices: Vec<Point>) -> Self {
        debug_assert!(vertices.iter().all(|v| v.len() + 1 == vertices.len()));
        Self { vertices }
    }

    pub fn dim(&self) -> usize {
        self.vertices.len() - 1
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn volume(&self) -> Q {
        let d = self.dim();
        let rows: Vec<Point> = self.vertices[1..].iter().map(|v| sub(v, &self.vertices[0])).collect();
        det(&rows).abs() / factorial(d as u32)
    }
}

/// Complete homogeneous symmetric polynomial `h_p(values)`.
fn complete_homogeneous(values: &[Q], p: u32) -> Q {
    let p = p as usize;
    let mut h = vec![Q::zero(); p + 1];
    h[0] = Q::one();
    for x in values {
        for k in 1..=p {
            let prev = h[k - 1].clone();
            h[k] += x * prev;
        }
    }
    h.swap_remove(p)
}

/// Exact `∫_S ell(x)^p dx` by
/// `vol(S) · d! p! / (d + p)! · h_p(ell(v_0), …, ell(v_d))`.
pub fn integrate_affine_power(s: &Simplex, ell: &Affine, p: u32) -> Result<Q> {
    let values: Vec<Q> = s.vertices().iter().map(|v| ell.eval(v)).collect();
    if let Some(i) = values.iter().position(|v| v.is_negative()) {
        return Err(Error::NegativeOnSimplex(i));
    }
    Ok(integrate_power_of_values(&s.volume(), s.dim(), &values, p))
}

/// Same identity as [`integrate_affine_power`] but taking vertex values directly.
pub fn integrate_power_of_values(volume: &Q, d: usize, values: &[Q], p: u32) -> Q {
    let coef = factorial(d as u32) * factorial(p) / factorial(d as u32 + p);
    volume * coef * complete_homogeneous(values, p)
}

/// Floating-point version of the vertex-value identity, integer `p`.
pub fn integrate_power_of_values_f64(volume: f64, d: usize, values: &[f64], p: u32) -> f64 {
    let p = p as usize;
    let mut h = vec![0.0; p + 1];
    h[0] = 1.0;
    for &x in values {
        for k in 1..=p {
            h[k] += x * h[k - 1];
        }
    }
    let mut coef = 1.0;
    for k in 1..=p {
        coef *= k as f64 / (d + k) as f64;
    }
    // d! p! / (d+p)! = prod_{k=1..p} k / (d+k)
    volume * coef * h[p]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_interval_cubic() {
        let s = Simplex::new(vec![pt(&[0]), pt(&[1])]);
        let ell = Affine::new(pt(&[1]), q(0));
        assert_eq!(integrate_affine_power(&s, &ell, 3).unwrap(), qr(1, 4));
    }

    #[test]
    fn unit_triangle_x_squared() {
        let s = Simplex::new(vec![pt(&[0, 0]), pt(&[1, 0]), pt(&[0, 1])]);
        let ell = Affine::new(pt(&[1, 0]), q(0));
        assert_eq!(integrate_affine_power(&s, &ell, 2).unwrap(), qr(1, 12));
    }

    #[test]
    fn zero_power_is_volume() {
        let s = Simplex::new(vec![pt(&[0, 0, 0]), pt(&[2, 0, 0]), pt(&[0, 3, 0]), pt(&[0, 0, 1])]);
        let ell = Affine::new(pt(&[1, 1, 1]), q(1));
        assert_eq!(integrate_affine_power(&s, &ell, 0).unwrap(), q(1));
    }

    #[test]
    fn negative_vertex_value_is_rejected() {
        let s = Simplex::new(vec![pt(&[0]), pt(&[1])]);
        let ell = Affine::new(pt(&[-1]), qr(1, 2));
        assert_eq!(integrate_affine_power(&s, &ell, 2), Err(Error::NegativeOnSimplex(1)));
    }

    #[test]
    fn float_identity_matches_exact() {
        let vals = [qr(1, 3), q(2), qr(5, 7)];
        let exact = integrate_power_of_values(&qr(1, 2), 2, &vals, 5);
        let fl: Vec<f64> = vals.iter().map(to_f64).collect();
        let approx = integrate_power_of_values_f64(0.5, 2, &fl, 5);
        assert!((to_f64(&exact) - approx).abs() < 1e-13);
    }
}

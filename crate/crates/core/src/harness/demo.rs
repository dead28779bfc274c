//! The log-concave limit: for log-concave `f`, `f_m = (1 + log f / m)_+^m`
//! is `m`-concave, increases to `f`, and `∫ f_m ∫ L_{1/m} f_m` is bounded
//! below by `16 m² / ((m+1)(m+2))`. Everything here is floating point on a
//! square grid: integrals are Riemann sums and `L` is a discrete infimum
//! over grid nodes.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};

/// Samples on `{-half..=half}² · step`, row-major in the first coordinate.
#[derive(Clone, Debug, PartialEq)]
pub struct GridFn {
    pub step: f64,
    pub half: usize,
    pub values: Vec<f64>,
}

impl GridFn {
    pub fn sample(step: f64, half: usize, f: impl Fn([f64; 2]) -> f64) -> Self {
        let w = 2 * half + 1;
        let values = (0..w * w)
            .map(|k| {
                let (i, j) = (k / w, k % w);
                f([(i as f64 - half as f64) * step, (j as f64 - half as f64) * step])
            })
            .collect();
        Self { step, half, values }
    }

    /// `e^{-‖x‖²/2}`.
    pub fn gaussian(step: f64, half: usize) -> Self {
        Self::sample(step, half, |x| (-(x[0] * x[0] + x[1] * x[1]) / 2.0).exp())
    }

    fn width(&self) -> usize {
        2 * self.half + 1
    }

    fn point(&self, k: usize) -> [f64; 2] {
        let w = self.width();
        let h = self.half as f64;
        [((k / w) as f64 - h) * self.step, ((k % w) as f64 - h) * self.step]
    }

    fn at(&self, i: isize, j: isize) -> Option<f64> {
        let w = self.width() as isize;
        let h = self.half as isize;
        let (a, b) = (i + h, j + h);
        (a >= 0 && b >= 0 && a < w && b < w).then(|| self.values[(a * w + b) as usize])
    }

    fn cell(&self) -> f64 {
        self.step * self.step
    }

    fn validate(&self) -> Result<()> {
        if self.values.len() != self.width() * self.width() || !(self.step > 0.0) {
            return Err(Error::InvalidInput("grid shape does not match its samples".into()));
        }
        if self.values.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::InvalidInput("samples must be finite and non-negative".into()));
        }
        if !(self.at(0, 0).unwrap_or(0.0) > 0.0) {
            return Err(Error::InvalidInput("f(0) must be positive".into()));
        }
        let n = self.values.len();
        for k in 0..n {
            let (a, b) = (self.values[k], self.values[n - 1 - k]);
            if (a - b).abs() > 1e-12 * a.abs().max(b.abs()).max(1.0) {
                return Err(Error::InvalidInput("f must be even".into()));
            }
        }
        // second differences of log f along axes and diagonals
        let h = self.half as isize;
        for i in -h..=h {
            for j in -h..=h {
                let c = self.values[((i + h) * self.width() as isize + j + h) as usize];
                for (di, dj) in [(1, 0), (0, 1), (1, 1), (1, -1)] {
                    let (Some(a), Some(b)) = (self.at(i - di, j - dj), self.at(i + di, j + dj)) else { continue };
                    if a > 0.0 && b > 0.0 {
                        if c <= 0.0 || a.ln() + b.ln() - 2.0 * c.ln() > 1e-9 {
                            return Err(Error::GridTooCoarse(format!(
                                "the root of f_m is not concave on the grid near ({:.3}, {:.3})",
                                i as f64 * self.step,
                                j as f64 * self.step
                            )));
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DemoRow {
    pub m: u32,
    pub integral_fm: f64,
    pub integral_dual: f64,
    pub product: f64,
    /// `16 m² / ((m+1)(m+2))`.
    pub bound: f64,
    pub above_bound: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DemoTable {
    pub rows: Vec<DemoRow>,
    pub integral_f: f64,
    /// `∫ f°` with `f°(y) = inf_x e^{-<x,y>} / f(x)` on the grid.
    pub integral_polar: f64,
    pub limit_product: f64,
    /// `∫ f_m` non-decreasing in `m` up to `tolerance`.
    pub monotone: bool,
    pub final_gap: f64,
    pub tolerance: f64,
    pub step: f64,
    pub half_width: f64,
}

const TOLERANCE: f64 = 1e-3;

/// `∫ (inf_x num(x, y) / den(x))^p dy` over the grid, `den > 0` nodes only.
fn dual_integral(g: &GridFn, den: &[(usize, f64)], num: impl Fn([f64; 2], [f64; 2]) -> f64 + Sync, p: f64) -> f64 {
    let total: f64 = (0..g.values.len())
        .into_par_iter()
        .map(|k| {
            let y = g.point(k);
            let inf = den.iter().map(|&(i, d)| num(g.point(i), y) / d).fold(f64::INFINITY, f64::min);
            inf.max(0.0).powf(p)
        })
        .sum();
    total * g.cell()
}

pub fn log_concave_demo(f: &GridFn, ms: &[u32]) -> Result<DemoTable> {
    f.validate()?;
    if ms.iter().any(|m| *m == 0) {
        return Err(Error::BadParams("m must be positive".into()));
    }
    let integral_f: f64 = f.values.iter().sum::<f64>() * f.cell();
    let positive: Vec<(usize, f64)> = f.values.iter().enumerate().filter(|(_, v)| **v > 0.0).map(|(i, v)| (i, *v)).collect();
    let integral_polar = dual_integral(f, &positive, |x, y| (-(x[0] * y[0] + x[1] * y[1])).exp(), 1.0);
    let mut rows = Vec::new();
    for &m in ms {
        let mf = m as f64;
        let root: Vec<(usize, f64)> = positive
            .iter()
            .map(|&(i, v)| (i, (1.0 + v.ln() / mf).max(0.0)))
            .filter(|(_, r)| *r > 0.0)
            .collect();
        let integral_fm: f64 = root.iter().map(|(_, r)| r.powf(mf)).sum::<f64>() * f.cell();
        // L_{1/m} f_m (y) = (L φ(y/m))^m with φ = f_m^{1/m}
        let integral_dual = dual_integral(f, &root, |x, y| 1.0 - (x[0] * y[0] + x[1] * y[1]) / mf, mf);
        let product = integral_fm * integral_dual;
        let bound = 16.0 * mf * mf / ((mf + 1.0) * (mf + 2.0));
        rows.push(DemoRow { m, integral_fm, integral_dual, product, bound, above_bound: product >= bound });
    }
    let monotone = rows.windows(2).all(|w| w[1].integral_fm >= w[0].integral_fm - TOLERANCE)
        && rows.iter().all(|r| r.integral_fm <= integral_f + TOLERANCE);
    let final_gap = rows.last().map_or(f64::NAN, |r| integral_f - r.integral_fm);
    Ok(DemoTable {
        rows,
        integral_f,
        integral_polar,
        limit_product: integral_f * integral_polar,
        monotone,
        final_gap,
        tolerance: TOLERANCE,
        step: f.step,
        half_width: f.step * f.half as f64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn gaussian_products_exceed_bounds() {
        let g = GridFn::gaussian(0.25, 24);
        let t = log_concave_demo(&g, &[1, 4, 16, 64]).unwrap();
        assert!((t.integral_f - 2.0 * PI).abs() < 1e-3);
        assert!((t.limit_product - 4.0 * PI * PI).abs() < 0.05);
        assert!(t.monotone && t.rows.iter().all(|r| r.above_bound));
        assert!(t.limit_product >= 16.0);
    }

    #[test]
    fn square_indicator_is_fixed() {
        let g = GridFn::sample(0.05, 20, |_| 1.0);
        let t = log_concave_demo(&g, &[1, 2, 3]).unwrap();
        assert!(t.rows.iter().all(|r| (r.integral_fm - t.integral_f).abs() < 1e-12));
    }

    #[test]
    fn non_log_concave_grid_is_rejected() {
        let g = GridFn::sample(0.25, 8, |x| 1.0 + (x[0] * x[0] + x[1] * x[1]).sin().powi(2));
        assert!(matches!(log_concave_demo(&g, &[1]), Err(Error::GridTooCoarse(_))));
    }
}

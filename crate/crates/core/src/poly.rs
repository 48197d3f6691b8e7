//! Real-coefficient polynomials: evaluation and root finding.
//!
//! Coefficients are stored in ascending order, `c[0] + c[1] x + c[2] x^2 + ...`.
//! Roots come from the eigenvalues of the companion matrix and are then
//! polished by Newton iteration on the original polynomial.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Roots whose imaginary part is below `REAL_GUARD * (1 + |re|)` count as real.
pub const REAL_GUARD: f64 = 1e-9;

const POLISH_ITERS: usize = 60;

pub fn eval(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &ci| acc * x + ci)
}

pub fn eval_complex(c: &[f64], z: Complex64) -> Complex64 {
    c.iter()
        .rev()
        .fold(Complex64::new(0.0, 0.0), |acc, &ci| acc * z + ci)
}

pub fn derivative(c: &[f64]) -> Vec<f64> {
    c.iter()
        .enumerate()
        .skip(1)
        .map(|(k, &ck)| k as f64 * ck)
        .collect()
}

/// `|p(x)| / sum |c_k| |x|^k`, the backward-error style residual.
pub fn relative_residual(c: &[f64], x: f64) -> f64 {
    let scale: f64 = c
        .iter()
        .enumerate()
        .map(|(k, ck)| ck.abs() * x.abs().powi(k as i32))
        .sum();
    if scale == 0.0 {
        return 0.0;
    }
    eval(c, x).abs() / scale
}

fn trim(c: &[f64]) -> &[f64] {
    let mut n = c.len();
    while n > 0 && c[n - 1] == 0.0 {
        n -= 1;
    }
    &c[..n]
}

/// All complex roots, polished by Newton iteration.
pub fn roots(c: &[f64]) -> Result<Vec<Complex64>> {
    let c = trim(c);
    if c.is_empty() {
        return Err(Error::Domain("zero polynomial has no isolated roots".into()));
    }
    let deg = c.len() - 1;
    if deg == 0 {
        return Ok(Vec::new());
    }
    let lead = c[deg];
    let mut comp = DMatrix::<f64>::zeros(deg, deg);
    for i in 1..deg {
        comp[(i, i - 1)] = 1.0;
    }
    for i in 0..deg {
        comp[(i, deg - 1)] = -c[i] / lead;
    }
    let eig = comp.complex_eigenvalues();
    let dc = derivative(c);
    Ok(eig.iter().map(|&z0| polish(c, &dc, z0)).collect())
}

fn polish(c: &[f64], dc: &[f64], z0: Complex64) -> Complex64 {
    let mut z = z0;
    let mut best = z0;
    let mut best_res = eval_complex(c, z0).norm();
    for _ in 0..POLISH_ITERS {
        let p = eval_complex(c, z);
        let dp = eval_complex(dc, z);
        if dp.norm() == 0.0 {
            break;
        }
        let step = p / dp;
        z -= step;
        let res = eval_complex(c, z).norm();
        if res < best_res {
            best_res = res;
            best = z;
        }
        if step.norm() <= 4.0 * f64::EPSILON * z.norm().max(1e-300) {
            break;
        }
    }
    best
}

fn is_real(z: Complex64) -> bool {
    z.im.abs() < REAL_GUARD * (1.0 + z.re.abs())
}

/// Real roots in increasing order.
pub fn real_roots(c: &[f64]) -> Result<Vec<f64>> {
    let mut r: Vec<f64> = roots(c)?
        .into_iter()
        .filter(|&z| is_real(z))
        .map(|z| polish_real(c, z.re))
        .collect();
    r.sort_by(|a, b| a.total_cmp(b));
    Ok(r)
}

fn polish_real(c: &[f64], x0: f64) -> f64 {
    let dc = derivative(c);
    let mut x = x0;
    for _ in 0..POLISH_ITERS {
        let d = eval(&dc, x);
        if d == 0.0 {
            break;
        }
        let step = eval(c, x) / d;
        let next = x - step;
        if relative_residual(c, next) > relative_residual(c, x) {
            break;
        }
        x = next;
        if step.abs() <= 2.0 * f64::EPSILON * x.abs() {
            break;
        }
    }
    x
}

/// Smallest strictly positive real root.
pub fn smallest_positive_root(c: &[f64]) -> Result<f64> {
    real_roots(c)?
        .into_iter()
        .find(|&x| x > 0.0)
        .ok_or_else(|| Error::NoRoot("polynomial has no positive real root".into()))
}

/// Discriminant of `c0 + c1 x + c2 x^2 + c3 x^3 + c4 x^4`.
pub fn quartic_discriminant(c: &[f64; 5]) -> f64 {
    let (e, d, cc, b, a) = (c[0], c[1], c[2], c[3], c[4]);
    256.0 * a.powi(3) * e.powi(3) - 192.0 * a * a * b * d * e * e - 128.0 * a * a * cc * cc * e * e
        + 144.0 * a * a * cc * d * d * e
        - 27.0 * a * a * d.powi(4)
        + 144.0 * a * b * b * cc * e * e
        - 6.0 * a * b * b * d * d * e
        - 80.0 * a * b * cc * cc * d * e
        + 18.0 * a * b * cc * d.powi(3)
        + 16.0 * a * cc.powi(4) * e
        - 4.0 * a * cc.powi(3) * d * d
        - 27.0 * b.powi(4) * e * e
        + 18.0 * b.powi(3) * cc * d * e
        - 4.0 * b.powi(3) * d.powi(3)
        - 4.0 * b * b * cc.powi(3) * e
        + b * b * cc * cc * d * d
}

/// Discriminant of `c0 + c1 x + c2 x^2 + c3 x^3`.
pub fn cubic_discriminant(c: &[f64; 4]) -> f64 {
    let (d, cc, b, a) = (c[0], c[1], c[2], c[3]);
    18.0 * a * b * cc * d - 4.0 * b.powi(3) * d + b * b * cc * cc
        - 4.0 * a * cc.powi(3)
        - 27.0 * a * a * d * d
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roots_of_known_quartic() {
        // (x-1)(x-2)(x+3)(x-0.5)
        let c = [-3.0, 9.5, -7.0, -0.5, 1.0];
        let r = real_roots(&c).unwrap();
        let expect = [-3.0, 0.5, 1.0, 2.0];
        assert_eq!(r.len(), 4);
        for (a, b) in r.iter().zip(expect) {
            assert!((a - b).abs() < 1e-13, "{a} vs {b}");
        }
        assert_eq!(smallest_positive_root(&c).unwrap(), r[1]);
    }

    #[test]
    fn complex_pair_is_not_real() {
        // (x^2 + 1)(x - 2)
        let c = [-2.0, 1.0, -2.0, 1.0];
        let r = real_roots(&c).unwrap();
        assert_eq!(r.len(), 1);
        assert!((r[0] - 2.0).abs() < 1e-14);
    }

    #[test]
    fn no_positive_root_is_an_error() {
        let c = [2.0, 3.0, 1.0]; // roots -1, -2
        assert!(matches!(smallest_positive_root(&c), Err(Error::NoRoot(_))));
    }

    #[test]
    fn discriminant_signs() {
        // distinct real roots -> positive
        assert!(quartic_discriminant(&[-3.0, 9.5, -7.0, -0.5, 1.0]) > 0.0);
        // (x-1)^2 (x+1): zero
        assert!(cubic_discriminant(&[1.0, -1.0, -1.0, 1.0]).abs() < 1e-12);
        // x^3 + x: one real root, two complex
        assert!(cubic_discriminant(&[0.0, 1.0, 0.0, 1.0]) < 0.0);
    }
}

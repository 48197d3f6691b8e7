//! Gap probabilities of small Jacobi ensembles by direct quadrature.

use statrs::function::gamma::ln_gamma;

use crate::error::{domain, Error, Result};
use crate::quad::gauss_jacobi;

const NODES: usize = 40;

/// `ln J_{n,(a,b)}`, the log of `int_{(0,1)^n} prod x^a (1-x)^b prod |x_j - x_k|^2 dx`.
pub fn selberg_ln(n: usize, a: f64, b: f64) -> Result<f64> {
    if !(a > -1.0 && b > -1.0) {
        return domain(format!("Selberg integral needs a, b > -1, got ({a}, {b})"));
    }
    let nf = n as f64;
    Ok((0..n)
        .map(|j| {
            let j = j as f64;
            ln_gamma(a + 1.0 + j) + ln_gamma(b + 1.0 + j) + ln_gamma(j + 2.0)
                - ln_gamma(a + b + nf + j + 1.0)
        })
        .sum())
}

fn vandermonde_sq(x: &[f64]) -> f64 {
    let mut p = 1.0;
    for i in 0..x.len() {
        for j in i + 1..x.len() {
            p *= (x[i] - x[j]).powi(2);
        }
    }
    p
}

/// Unnormalised `int_{(0,s)^r} prod x^a (1-x)^b prod |x_j - x_k|^2 dx` by a
/// tensor Gauss-Jacobi rule carrying the `x^a` endpoint factor.
pub fn restricted_integral(r: usize, a: f64, b: f64, s: f64) -> Result<f64> {
    let rule = if s >= 1.0 {
        gauss_jacobi(NODES, b, a)?
    } else {
        gauss_jacobi(NODES, 0.0, a)?
    };
    let s = s.min(1.0);
    // x = s (1 + t) / 2, so x^a = (s/2)^a (1 + t)^a
    let scale = (s / 2.0).powf(a + 1.0);
    let nodes: Vec<f64> = rule.nodes.iter().map(|t| 0.5 * s * (1.0 + t)).collect();
    let weights: Vec<f64> = if s >= 1.0 {
        // (1 - x)^b = 2^{-b} (1 - t)^b is already in the weight
        rule.weights.iter().map(|w| w * scale * 0.5f64.powf(b)).collect()
    } else {
        rule.weights
            .iter()
            .zip(&nodes)
            .map(|(w, x)| w * scale * (1.0 - x).powf(b))
            .collect()
    };
    Ok(tensor_sum(r, &nodes, &weights, vandermonde_sq))
}

/// Sum of `f` over the `r`-fold tensor product of a one-dimensional rule.
pub(crate) fn tensor_sum(
    r: usize,
    nodes: &[f64],
    weights: &[f64],
    mut f: impl FnMut(&[f64]) -> f64,
) -> f64 {
    let m = nodes.len();
    let mut idx = vec![0usize; r];
    let mut x = vec![0.0; r];
    let mut total = 0.0;
    loop {
        let mut w = 1.0;
        for (k, &i) in idx.iter().enumerate() {
            x[k] = nodes[i];
            w *= weights[i];
        }
        total += w * f(&x);
        let mut k = 0;
        while k < r {
            idx[k] += 1;
            if idx[k] < m {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
        if k == r {
            break;
        }
    }
    total
}

/// `<f(t)>` over `JUE_{r,(a,b)}`, by a tensor Gauss-Jacobi rule that is exact
/// for polynomial `f` of degree below `2 * NODES - 2 r`.
pub fn jue_average(r: usize, a: f64, b: f64, f: impl Fn(&[f64]) -> f64) -> Result<f64> {
    if r == 0 {
        return Ok(1.0);
    }
    let rule = gauss_jacobi(NODES, b, a)?;
    let nodes: Vec<f64> = rule.nodes.iter().map(|t| 0.5 * (1.0 + t)).collect();
    let scale = 0.5f64.powf(a + b + 1.0);
    let weights: Vec<f64> = rule.weights.iter().map(|w| w * scale).collect();
    let num = tensor_sum(r, &nodes, &weights, |x| f(x) * vandermonde_sq(x));
    Ok(num / selberg_ln(r, a, b)?.exp())
}

/// `E(0, (s, 1); JUE_{r,(a,b)})`: probability that all `r` eigenvalues lie in `(0, s)`.
pub fn jue_gap_quadrature(r: usize, a: f64, b: f64, s: f64) -> Result<f64> {
    if r == 0 {
        return domain("ensemble size must be positive");
    }
    if r > 3 {
        return Err(Error::Unsupported(format!(
            "direct quadrature is limited to r <= 3, got {r}"
        )));
    }
    if !(s > 0.0 && s <= 1.0) {
        return domain(format!("gap endpoint must lie in (0, 1], got {s}"));
    }
    if s == 1.0 {
        return Ok(1.0);
    }
    Ok(restricted_integral(r, a, b, s)? / selberg_ln(r, a, b)?.exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::integrate;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn selberg_matches_quadrature() {
        for (n, a, b) in [(1, 0.0, 0.0), (2, 0.0, 1.0), (3, 1.5, 0.5), (2, -0.5, 2.0)] {
            let q = restricted_integral(n, a, b, 1.0).unwrap();
            let s = selberg_ln(n, a, b).unwrap().exp();
            assert!((q - s).abs() < 1e-12 * s, "{n} {a} {b}: {q} vs {s}");
        }
    }

    #[test]
    fn single_eigenvalue_is_beta_ratio() {
        let (a, b, s) = (0.7, 2.3, 0.4);
        let f = |x: f64| x.powf(a) * (1.0 - x).powf(b);
        let part = integrate(f, &[0.0, s], 1e-14, 1e-13).unwrap().value;
        let full = integrate(f, &[0.0, 1.0], 1e-14, 1e-13).unwrap().value;
        let e = jue_gap_quadrature(1, a, b, s).unwrap();
        assert!((e - part / full).abs() < 1e-10);
    }

    #[test]
    fn two_eigenvalues_against_sampling() {
        let (a, b, s) = (1.0, 2.0, 0.6);
        let e = jue_gap_quadrature(2, a, b, s).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 1_000_000;
        let (mut acc, mut hit) = (0usize, 0usize);
        // rejection sampling; the density is bounded by 1 on (0, 1)^2
        while acc < n {
            let (x, y): (f64, f64) = (rng.random(), rng.random());
            let f = (x * y).powf(a) * ((1.0 - x) * (1.0 - y)).powf(b) * (x - y).powi(2);
            if rng.random::<f64>() < f {
                acc += 1;
                if x < s && y < s {
                    hit += 1;
                }
            }
        }
        let p = hit as f64 / n as f64;
        let sigma = (e * (1.0 - e) / n as f64).sqrt();
        assert!((p - e).abs() < 3.0 * sigma, "{p} vs {e}");
    }

    #[test]
    fn limits_and_errors() {
        assert_eq!(jue_gap_quadrature(2, 1.0, 1.0, 1.0).unwrap(), 1.0);
        let near = jue_gap_quadrature(2, 1.0, 1.0, 1.0 - 1e-9).unwrap();
        assert!((near - 1.0).abs() < 1e-6);
        assert!(matches!(
            jue_gap_quadrature(4, 1.0, 1.0, 0.5),
            Err(Error::Unsupported(_))
        ));
        assert!(jue_gap_quadrature(2, 1.0, 1.0, 0.0).is_err());
    }
}

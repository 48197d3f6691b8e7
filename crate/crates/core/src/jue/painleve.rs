//! Hastings-McLeod solution of Painleve II and the soft-edge gap probability.
//!
//! The solution of `q'' = x q + 2 q^3` with `q ~ Ai(x)` as `x -> +inf` is found
//! by Chebyshev collocation on two subdomains. On `[T_MIN, 0]` the unknown is
//! `q`, pinned at the left end by its algebraic asymptotics. On `[0, X_MAX]`
//! the unknown is `y = q / Ai`, which keeps full relative precision where `q`
//! is exponentially small.

use std::sync::OnceLock;

use nalgebra::{DMatrix, DVector};

use crate::airy::{airy, AI0, AIP0};
use crate::error::{domain, Error, Result};
use crate::quad::gauss_legendre;

pub const T_MIN: f64 = -10.0;
pub const X_MAX: f64 = 8.0;
const NODES: usize = 80;
const QUAD_NODES: usize = 100;

/// Chebyshev-Lobatto points `cos(pi j / n)` and the first derivative matrix.
fn chebyshev(n: usize) -> (Vec<f64>, DMatrix<f64>) {
    let t: Vec<f64> = (0..=n)
        .map(|j| (std::f64::consts::PI * j as f64 / n as f64).cos())
        .collect();
    let c = |j: usize| {
        let e = if j == 0 || j == n { 2.0 } else { 1.0 };
        if j % 2 == 0 {
            e
        } else {
            -e
        }
    };
    let mut d = DMatrix::zeros(n + 1, n + 1);
    for i in 0..=n {
        for j in 0..=n {
            if i != j {
                d[(i, j)] = c(i) / c(j) / (t[i] - t[j]);
            }
        }
        let row: f64 = (0..=n).filter(|&j| j != i).map(|j| d[(i, j)]).sum();
        d[(i, i)] = -row;
    }
    (t, d)
}

/// Polynomial on the Chebyshev-Lobatto points of `[a, b]`.
#[derive(Debug, Clone)]
struct Cheb {
    a: f64,
    b: f64,
    t: Vec<f64>,
    values: Vec<f64>,
    slopes: Vec<f64>,
}

impl Cheb {
    fn local(&self, x: f64) -> f64 {
        (2.0 * x - self.a - self.b) / (self.b - self.a)
    }

    fn bary(&self, x: f64, f: &[f64]) -> f64 {
        let s = self.local(x);
        let n = self.t.len() - 1;
        let (mut num, mut den) = (0.0, 0.0);
        for j in 0..=n {
            let d = s - self.t[j];
            if d == 0.0 {
                return f[j];
            }
            let mut w = if j % 2 == 0 { 1.0 } else { -1.0 };
            if j == 0 || j == n {
                w *= 0.5;
            }
            num += w / d * f[j];
            den += w / d;
        }
        num / den
    }
}

/// Collocation solution of the Hastings-McLeod problem.
#[derive(Debug, Clone)]
pub struct HastingsMcLeod {
    left: Cheb,
    right: Cheb,
    pub newton_steps: usize,
    pub residual: f64,
}

/// Algebraic asymptotics of `q` as `x -> -inf`.
pub fn left_asymptotic(x: f64) -> f64 {
    let u = 1.0 / (x * x * x);
    let series = 1.0 + u / 8.0 - 73.0 / 128.0 * u * u + 10657.0 / 1024.0 * u.powi(3)
        - 13_912_277.0 / 32768.0 * u.powi(4);
    (-x / 2.0).sqrt() * series
}

impl HastingsMcLeod {
    pub fn solve() -> Result<Self> {
        Self::solve_with(NODES)
    }

    pub fn solve_with(n: usize) -> Result<Self> {
        if n < 8 {
            return domain("collocation needs at least 8 nodes per subdomain");
        }
        let (t, d1) = chebyshev(n);
        let d2 = &d1 * &d1;
        let hl = 2.0 / (0.0 - T_MIN);
        let hr = 2.0 / X_MAX;
        // node j sits at t[j]; t[0] = 1 is the right end of each subdomain
        let xl: Vec<f64> = t.iter().map(|s| T_MIN + (s + 1.0) / hl).collect();
        let xr: Vec<f64> = t.iter().map(|s| (s + 1.0) / hr).collect();
        let air: Vec<(f64, f64)> = xr.iter().map(|&x| airy(x)).collect();
        let m = n + 1;
        let size = 2 * m;

        let mut u = DVector::zeros(size);
        for j in 0..m {
            u[j] = (xl[j].min(0.0).abs() / 2.0 + AI0 * AI0).sqrt();
            u[m + j] = 1.0;
        }
        let q_left = left_asymptotic(T_MIN);

        let mut steps = 0;
        let mut res_norm = f64::INFINITY;
        for _ in 0..40 {
            steps += 1;
            let q = u.rows(0, m).clone_owned();
            let y = u.rows(m, m).clone_owned();
            let dq = &d1 * &q * hl;
            let dy = &d1 * &y * hr;
            let ddq = &d2 * &q * (hl * hl);
            let ddy = &d2 * &y * (hr * hr);
            let mut f = DVector::zeros(size);
            let mut jac = DMatrix::zeros(size, size);
            for j in 1..n {
                f[j] = ddq[j] - xl[j] * q[j] - 2.0 * q[j].powi(3);
                for k in 0..m {
                    jac[(j, k)] = d2[(j, k)] * hl * hl;
                }
                jac[(j, j)] -= xl[j] + 6.0 * q[j] * q[j];

                let (a, ap) = air[j];
                let r = ap / a;
                f[m + j] = ddy[j] + 2.0 * r * dy[j] - 2.0 * a * a * y[j].powi(3);
                for k in 0..m {
                    jac[(m + j, m + k)] = d2[(j, k)] * hr * hr + 2.0 * r * d1[(j, k)] * hr;
                }
                jac[(m + j, m + j)] -= 6.0 * a * a * y[j] * y[j];
            }
            // left end of [T_MIN, 0]
            f[n] = q[n] - q_left;
            jac[(n, n)] = 1.0;
            // right end of [0, X_MAX]
            f[m] = y[0] - 1.0;
            jac[(m, m)] = 1.0;
            // continuity of q and q' at the origin
            f[0] = q[0] - AI0 * y[n];
            jac[(0, 0)] = 1.0;
            jac[(0, m + n)] = -AI0;
            f[m + n] = dq[0] - AIP0 * y[n] - AI0 * dy[n];
            for k in 0..m {
                jac[(m + n, k)] = d1[(0, k)] * hl;
                jac[(m + n, m + k)] = -AI0 * d1[(n, k)] * hr;
            }
            jac[(m + n, m + n)] -= AIP0;

            res_norm = f.amax();
            let delta = jac
                .lu()
                .solve(&f)
                .ok_or_else(|| Error::Singular("collocation Jacobian".into()))?;
            u -= &delta;
            if delta.amax() < 1e-14 {
                break;
            }
        }
        if !(res_norm < 1e-8) {
            return Err(Error::Convergence {
                what: "Painleve II collocation".into(),
                achieved: res_norm,
            });
        }
        let q: Vec<f64> = u.rows(0, m).iter().copied().collect();
        let y: Vec<f64> = u.rows(m, m).iter().copied().collect();
        let slopes = |v: &[f64], h: f64| -> Vec<f64> {
            (&d1 * DVector::from_column_slice(v) * h).iter().copied().collect()
        };
        Ok(Self {
            left: Cheb {
                a: T_MIN,
                b: 0.0,
                t: t.clone(),
                slopes: slopes(&q, hl),
                values: q,
            },
            right: Cheb {
                a: 0.0,
                b: X_MAX,
                t,
                slopes: slopes(&y, hr),
                values: y,
            },
            newton_steps: steps,
            residual: res_norm,
        })
    }

    /// Shared solution, computed once.
    pub fn global() -> Result<&'static Self> {
        static CELL: OnceLock<std::result::Result<HastingsMcLeod, Error>> = OnceLock::new();
        CELL.get_or_init(Self::solve).as_ref().map_err(Clone::clone)
    }

    /// `q(x) / Ai(x)` for `x >= 0`; taken as 1 beyond `X_MAX`.
    pub fn ratio_to_airy(&self, x: f64) -> Result<f64> {
        if x < 0.0 {
            return domain(format!("ratio to Ai is only tabulated for x >= 0, got {x}"));
        }
        if x >= X_MAX {
            return Ok(1.0);
        }
        Ok(self.right.bary(x, &self.right.values))
    }

    pub fn q(&self, x: f64) -> Result<f64> {
        if x < T_MIN {
            return domain(format!("q is only solved for x >= {T_MIN}, got {x}"));
        }
        if x < 0.0 {
            return Ok(self.left.bary(x, &self.left.values));
        }
        Ok(airy(x).0 * self.ratio_to_airy(x)?)
    }

    pub fn q_prime(&self, x: f64) -> Result<f64> {
        if x < T_MIN {
            return domain(format!("q is only solved for x >= {T_MIN}, got {x}"));
        }
        if x < 0.0 {
            return Ok(self.left.bary(x, &self.left.slopes));
        }
        let (a, ap) = airy(x);
        if x >= X_MAX {
            return Ok(ap);
        }
        let y = self.right.bary(x, &self.right.values);
        let dy = self.right.bary(x, &self.right.slopes);
        Ok(ap * y + a * dy)
    }

    /// `int_t^inf (x - t) q(x)^2 dx`.
    pub fn tail_integral(&self, t: f64) -> Result<f64> {
        if t < T_MIN {
            return domain(format!("gap probability needs t >= {T_MIN}, got {t}"));
        }
        let rule = gauss_legendre(QUAD_NODES);
        let mut total = 0.0;
        if t < 0.0 {
            total += rule.on(t, 0.0).apply(|x| {
                let q = self.left.bary(x, &self.left.values);
                (x - t) * q * q
            });
        }
        let start = t.max(0.0);
        if start < X_MAX {
            total += rule.on(start, X_MAX).apply(|x| {
                let q = airy(x).0 * self.right.bary(x, &self.right.values);
                (x - t) * q * q
            });
        }
        // beyond X_MAX q = Ai to working precision
        let x0 = start.max(X_MAX);
        let (a, ap) = airy(x0);
        let int_ai2 = ap * ap - x0 * a * a;
        let int_x_ai2 = -(x0 * x0 * a * a - x0 * ap * ap + a * ap) / 3.0;
        Ok(total + int_x_ai2 - t * int_ai2)
    }
}

/// Soft-edge probability of no eigenvalue in `(t, inf)`.
pub fn painleve_gap(t: f64) -> Result<f64> {
    Ok((-HastingsMcLeod::global()?.tail_integral(t)?).exp())
}

/// `det(I - K_Airy)` on `L^2(t, inf)` by Nystrom discretisation with `m`
/// Gauss-Legendre nodes on `(t, max(t, 0) + 12)`.
pub fn airy_fredholm_gap(t: f64, m: usize) -> Result<f64> {
    if m == 0 || !t.is_finite() {
        return domain("Fredholm determinant needs m > 0 and finite t");
    }
    let rule = gauss_legendre(m).on(t, t.max(0.0) + 12.0);
    let vals: Vec<(f64, f64)> = rule.nodes.iter().map(|&x| airy(x)).collect();
    let mut a = DMatrix::identity(m, m);
    for i in 0..m {
        for j in 0..m {
            let (xi, xj) = (rule.nodes[i], rule.nodes[j]);
            let k = if i == j {
                vals[i].1 * vals[i].1 - xi * vals[i].0 * vals[i].0
            } else {
                (vals[i].0 * vals[j].1 - vals[i].1 * vals[j].0) / (xi - xj)
            };
            a[(i, j)] -= (rule.weights[i] * rule.weights[j]).sqrt() * k;
        }
    }
    Ok(a.lu().determinant())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn collocation_converges() {
        let s = HastingsMcLeod::global().unwrap();
        assert!(s.residual < 1e-8);
        // equation residual off the collocation grid
        for x in [-9.3, -4.1, -0.7, 0.3, 2.9, 6.6] {
            let h = 1e-3;
            let q = s.q(x).unwrap();
            let qpp = (s.q(x + h).unwrap() - 2.0 * q + s.q(x - h).unwrap()) / (h * h);
            assert!((qpp - x * q - 2.0 * q.powi(3)).abs() < 1e-5, "x = {x}");
            let dq = (s.q(x + h).unwrap() - s.q(x - h).unwrap()) / (2.0 * h);
            assert!((dq - s.q_prime(x).unwrap()).abs() < 1e-6);
        }
    }

    #[test]
    fn known_values() {
        let s = HastingsMcLeod::global().unwrap();
        // q(0) and q'(0) of the Hastings-McLeod solution
        assert!((s.q(0.0).unwrap() - 0.367_061_551_548_1).abs() < 1e-10);
        assert!((s.q_prime(0.0).unwrap() + 0.295_372_105_447_550_7).abs() < 1e-10);
    }

    #[test]
    fn agrees_with_fredholm() {
        for t in [-4.0, -2.0, -1.0, 0.0, 1.5, 4.0] {
            let p = painleve_gap(t).unwrap();
            let f = airy_fredholm_gap(t, 60).unwrap();
            assert!((p - f).abs() < 1e-10, "t = {t}: {p} vs {f}");
        }
    }

    #[test]
    fn gap_is_increasing_distribution() {
        let mut last = 0.0;
        for k in 0..=36 {
            let t = -10.0 + 0.5 * k as f64;
            let p = painleve_gap(t).unwrap();
            assert!(p > last && p <= 1.0);
            last = p;
        }
        assert!(painleve_gap(-11.0).is_err());
    }
}

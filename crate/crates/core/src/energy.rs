//! Leading-order electrostatic energies of the sphere gas.
//!
//! Constants are reported as `k = (4 / (beta N^2)) log K` with `beta = 2`, so
//! that `K_N = -k / 4` is the energy per `N^2`. In the pre-critical phase the
//! constant is assembled from three droplet integrals: `I_log`, the logarithmic
//! potential `W(Z)` at `Z = zeta(1)` and at `Z = w`, and the equilibrium
//! constant `C`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::conformal::{build_map, droplet_boundary, ConformalMap};
use crate::error::{domain, Error, Result};
use crate::geometry::ChargeConfig;
use crate::quad::{gauss_legendre, Cubature, Rect};

/// Richardson offsets used to approach `w_cri` from above.
const CRITICAL_OFFSETS: [f64; 2] = [2e-3, 1e-3];

fn xlogx(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x * x.ln()
    }
}

fn checked_ln(x: f64, what: &str) -> Result<f64> {
    if x > 0.0 && x.is_finite() {
        Ok(x.ln())
    } else {
        Err(Error::Singular(format!("log argument {what} = {x:e} is not positive")))
    }
}

/// Post-critical constant; independent of `w` and symmetric in the charges.
pub fn k_post(q0: f64, q1: f64) -> f64 {
    let t = 1.0 + q0 + q1;
    -(-t + 2.0 * t * (1.0 / t).ln()
        + (1.0 + q0).powi(2) * (1.0 + q0).ln()
        + (1.0 + q1).powi(2) * (1.0 + q1).ln()
        - q1 * xlogx(q1)
        - q0 * xlogx(q0))
}

/// Closed form for the critical limit of `k_pre` at equal charges, exactly as
/// it is usually quoted. It differs from `k_post(q, q)` by `4 q^2 log q`.
pub fn k_critical_equal_quoted(q0: f64) -> f64 {
    1.0 + 2.0 * q0 + 2.0 * (1.0 + 2.0 * q0) * (1.0 + 2.0 * q0).ln()
        - 2.0 * (1.0 + q0).powi(2) * (1.0 + q0).ln()
        - 2.0 * q0 * xlogx(q0)
}

/// Pre-critical energy integrals and constants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyBreakdown {
    #[serde(rename = "I_log")]
    pub i_log: f64,
    #[serde(rename = "W_zeta1")]
    pub w_zeta1: f64,
    #[serde(rename = "W_w")]
    pub w_w: f64,
    #[serde(rename = "C_const")]
    pub c_const: f64,
    #[serde(rename = "K_pre")]
    pub k_pre: f64,
    #[serde(rename = "K_post")]
    pub k_post: f64,
    /// `int int log|z - z'|^2 mu(z) mu(z') d^2z d^2z'` over the droplet.
    #[serde(rename = "D_double")]
    pub double_integral: f64,
}

impl EnergyBreakdown {
    fn assemble(cfg: &ChargeConfig, z1: f64, i_log: f64, w_zeta1: f64, w_w: f64, double: Option<f64>) -> Self {
        let (q0, q1, w) = (cfg.q0, cfg.q1, cfg.w);
        let t = cfg.total();
        let c_const = -t * (1.0 + z1 * z1).ln() + q1 * ((w - z1) * (w - z1)).ln() + w_zeta1;
        let k_pre = -c_const + t * i_log - q1 * w_w + 2.0 * q1 * (1.0 + q0) * (1.0 + w * w).ln();
        Self {
            i_log,
            w_zeta1,
            w_w,
            c_const,
            k_pre,
            k_post: k_post(q0, q1),
            double_integral: double.unwrap_or(c_const + t * i_log - q1 * w_w),
        }
    }

    /// Energy per `N^2`, `K_N = -k / 4`, in each phase.
    pub fn energies(&self) -> (f64, f64) {
        (-self.k_pre / 4.0, -self.k_post / 4.0)
    }
}

/// `int log(1 + |z|^2) mu(z) d^2z` over the droplet, in closed form.
pub fn integral_log_density(map: &ConformalMap) -> Result<f64> {
    let (q0, q1) = (map.q0, map.q1);
    let (a, b, v0) = (map.a, map.b, map.v0);
    let t = 1.0 + q0 + q1;
    let g = map.pole_weight();
    Ok(1.0 - q0 * checked_ln(1.0 + (1.0 + q1) / q0, "1 + (1 + Q1)/Q0")?
        + g * q1 * checked_ln((1.0 - v0 * v0) / (1.0 - a * v0), "(1 - v0^2)/(1 - a v0)")?
        + q0 * checked_ln(v0 / a, "v0/a")?
        - t * checked_ln((1.0 - v0 * b) / (1.0 - a * b), "(1 - v0 b)/(1 - a b)")?
        - q1 * checked_ln(map.c.abs() * (v0 - a), "|c| (v0 - a)")?)
}

/// Half the logarithmic potential, `W(Z) / 2`, at `Z = zeta(u_z)`.
pub fn w_potential(map: &ConformalMap, u_z: f64) -> Result<f64> {
    if !(u_z > 0.0 && u_z <= 1.0) {
        return domain(format!("u_Z must lie in (0, 1], got {u_z}"));
    }
    let (q0, q1) = (map.q0, map.q1);
    let g = map.pole_weight();
    Ok(-(q0 + 1.0) * checked_ln(1.0 - u_z * map.a, "1 - u a")?
        + q1 * g * checked_ln(1.0 - u_z * map.v0, "1 - u v0")?
        - q1 * checked_ln(1.0 - u_z / map.v1, "1 - u/v1")?
        + checked_ln(map.r / u_z, "R/u")?)
}

/// Closed-form energy breakdown of a pre-critical configuration.
pub fn k_pre(cfg: &ChargeConfig) -> Result<EnergyBreakdown> {
    let map = build_map(cfg)?;
    breakdown(&map)
}

pub fn breakdown(map: &ConformalMap) -> Result<EnergyBreakdown> {
    let cfg = map.config();
    let i_log = integral_log_density(map)?;
    let w_zeta1 = 2.0 * w_potential(map, 1.0)?;
    let w_w = 2.0 * w_potential(map, map.v0)?;
    Ok(EnergyBreakdown::assemble(&cfg, map.zeta_real(1.0), i_log, w_zeta1, w_w, None))
}

/// Leading-order constant in either phase.
pub fn k_constant(cfg: &ChargeConfig) -> Result<f64> {
    match build_map(cfg) {
        Ok(map) => Ok(breakdown(&map)?.k_pre),
        Err(Error::Phase { found: "post-critical", .. }) | Err(Error::Phase { found: "critical", .. }) => {
            Ok(k_post(cfg.q0, cfg.q1))
        }
        Err(e) => Err(e),
    }
}

/// `k_pre` extrapolated to `w -> w_cri+`.
///
/// The approach is cubic in the relative offset, so one Richardson step on two
/// offsets removes the leading term.
pub fn k_pre_critical_limit(q0: f64, q1: f64) -> Result<f64> {
    let wc = ChargeConfig::new(q0, q1, 1.0)?.w_cri();
    let [e1, e2] = CRITICAL_OFFSETS;
    let f1 = k_pre(&ChargeConfig::new(q0, q1, wc * (1.0 + e1))?)?.k_pre;
    let f2 = k_pre(&ChargeConfig::new(q0, q1, wc * (1.0 + e2))?)?.k_pre;
    let r = (e1 / e2).powi(3);
    Ok((r * f2 - f1) / (r - 1.0))
}

/// Large-`w` asymptote of `k_pre`: the two charges merge at the south pole,
/// leaving their mutual interaction and the single-charge constant.
pub fn k_pre_large_w(q0: f64, q1: f64, w: f64) -> f64 {
    2.0 * q0 * q1 * (w * w).ln() + k_post(q0 + q1, 0.0)
}

/// The large-`w` asymptote as commonly quoted. It falls short of
/// [`k_pre_large_w`] by `(1 + Q0 + Q1) log(1 + Q0 + Q1)`.
pub fn k_pre_large_w_quoted(q0: f64, q1: f64, w: f64) -> f64 {
    let s = q0 + q1;
    2.0 * q0 * q1 * (w * w).ln() + (s + 1.0) + s * (1.0 / s).ln() - (s + 1.0) * s * (1.0 + 1.0 / s).ln()
}

/// `I_log` for the limiting disk of radius `1/sqrt(Q0 + Q1)`.
pub fn i_log_large_w(q0: f64, q1: f64) -> f64 {
    let s = q0 + q1;
    1.0 - s * (1.0 + 1.0 / s).ln()
}

/// Equal-charge limits at the phase boundary, written in terms of
/// `w_s = sqrt(1 + 1/Q0)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriticalLimits {
    pub w_s: f64,
    pub i_log: f64,
    pub half_w_zeta1: f64,
    pub half_w_w: f64,
    pub log_one_plus_zeta1_sq: f64,
    pub log_w_minus_zeta1: f64,
    /// `k_pre` assembled from the limits above.
    pub k_assembled: f64,
    /// The commonly quoted simplified form, see [`k_critical_equal_quoted`].
    pub k_quoted: f64,
}

pub fn critical_limits_equal(q0: f64) -> Result<CriticalLimits> {
    if !(q0 > 0.0) {
        return domain(format!("Q0 must be positive, got {q0}"));
    }
    let ws = (1.0 + 1.0 / q0).sqrt();
    let s = ws * ws;
    let i_log = 1.0 + 2f64.ln() - (2.0 * q0 - 1.0) * (1.0 + 1.0 / (2.0 * q0)).ln() - (1.0 + 1.0 / q0).ln();
    let common = -q0 * (0.5 * (1.0 + 1.0 / s)).ln() + ws.ln();
    let half_w_zeta1 = -(q0 + 1.0) * ((3.0 * s - 1.0) / (s + 1.0)).ln() + common;
    let half_w_w = -(q0 + 1.0) * (2.0 * s / (1.0 + s)).ln() + common;
    let log_one_plus_zeta1_sq = ((1.0 + s).powi(3) / (3.0 * s - 1.0).powi(2)).ln();
    let log_w_minus_zeta1 = ((1.0 + s).powi(2) / (2.0 * ws * (3.0 * s - 1.0))).ln();
    let w = (s - 1.0) / (2.0 * ws);
    let t = 1.0 + 2.0 * q0;
    let k_assembled = t * log_one_plus_zeta1_sq - 2.0 * q0 * log_w_minus_zeta1 - 2.0 * half_w_zeta1
        + t * i_log
        - 2.0 * q0 * half_w_w
        + 2.0 * q0 * (1.0 + q0) * (1.0 + w * w).ln();
    Ok(CriticalLimits {
        w_s: ws,
        i_log,
        half_w_zeta1,
        half_w_w,
        log_one_plus_zeta1_sq,
        log_w_minus_zeta1,
        k_assembled,
        k_quoted: k_critical_equal_quoted(q0),
    })
}

/// One point of the energy curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyPoint {
    pub w: f64,
    pub phase: &'static str,
    pub k: f64,
}

pub fn energy_curve(q0: f64, q1: f64, ws: &[f64]) -> Result<Vec<EnergyPoint>> {
    ws.iter()
        .map(|&w| {
            let cfg = ChargeConfig::new(q0, q1, w)?;
            Ok(EnergyPoint {
                w,
                phase: cfg.phase().tag.name(),
                k: k_constant(&cfg)?,
            })
        })
        .collect()
}

/// Pullback of the droplet exterior to the unit disk: `mu(zeta(u)) |zeta'(u)|^2`.
fn pulled_density(map: &ConformalMap, u: Complex64) -> f64 {
    let t = 1.0 + map.q0 + map.q1;
    let z = map.zeta_unchecked(u);
    t * map.zeta_prime(u).norm_sqr() / (PI * (1.0 + z.norm_sqr()).powi(2))
}

/// Quadrature over the exterior of the droplet, computed on the unit disk in
/// polar coordinates. The density is symmetric under conjugation, so the
/// upper half disk is integrated against `f(z) + f(conj z)`; the radial split
/// at `v0` puts the preimage of `w` on a cell corner.
fn exterior_integral(map: &ConformalMap, cub: &Cubature, f: impl Fn(Complex64) -> f64) -> Result<f64> {
    let regions = [Rect::new(0.0, map.v0, 0.0, PI), Rect::new(map.v0, 1.0, 0.0, PI)];
    let est = cub.integrate(
        |rho, theta| {
            let u = Complex64::from_polar(rho, theta);
            let z = map.zeta_unchecked(u);
            (f(z) + f(z.conj())) * pulled_density(map, u) * rho
        },
        &regions,
    )?;
    Ok(est.value)
}

fn default_cubature() -> Cubature {
    Cubature::new(8, 1e-11, 1e-11)
}

/// `int log|Z - z|^2 mu(z) d^2z` over the droplet by quadrature.
pub fn potential_quadrature(map: &ConformalMap, z: Complex64) -> Result<f64> {
    let t = 1.0 + map.q0 + map.q1;
    let ext = exterior_integral(map, &default_cubature(), |s| (z - s).norm_sqr().ln())?;
    Ok(t * (1.0 + z.norm_sqr()).ln() - ext)
}

/// Droplet mass by quadrature; equals one.
pub fn droplet_mass(map: &ConformalMap) -> Result<f64> {
    let t = 1.0 + map.q0 + map.q1;
    Ok(t - exterior_integral(map, &default_cubature(), |_| 1.0)?)
}

/// Quadrature evaluation of every quantity in [`EnergyBreakdown`].
///
/// The droplet integrals are written as full-plane integrals, which are
/// elementary, minus integrals over the exterior pulled back to the unit disk.
pub fn energy_quadrature_oracle(cfg: &ChargeConfig, map: &ConformalMap) -> Result<EnergyBreakdown> {
    let t = cfg.total();
    let cub = default_cubature();
    let i_log = t - exterior_integral(map, &cub, |z| (1.0 + z.norm_sqr()).ln())?;
    let z1 = map.zeta_real(1.0);
    let w_zeta1 = potential_quadrature(map, Complex64::new(z1, 0.0))?;
    let w_w = potential_quadrature(map, Complex64::new(cfg.w, 0.0))?;
    let x = exterior_double_log(map, 64, 128)?;
    let double = t * i_log - t * (t - i_log) + x;
    Ok(EnergyBreakdown::assemble(cfg, z1, i_log, w_zeta1, w_w, Some(double)))
}

/// `int int log|z - z'|^2 mu mu'` over the exterior squared.
///
/// With `z = zeta(u)` the kernel factorises as
/// `log|u - u'|^2 + log|R (1 - a(u + u') + a b u u')|^2 - log|u u'|^2 -
/// log|1 - a u|^2 - log|1 - a u'|^2`. The first term is integrated through
/// its angular Fourier series, the rest by tensor quadrature.
pub fn exterior_double_log(map: &ConformalMap, nr: usize, nt: usize) -> Result<f64> {
    if nt % 2 != 0 || nr < 8 {
        return domain("double integral needs an even angular grid and at least 8 radial nodes");
    }
    let gl = gauss_legendre(nr);
    let angles: Vec<f64> = (0..nt).map(|j| 2.0 * PI * j as f64 / nt as f64).collect();
    let dth = 2.0 * PI / nt as f64;
    let radial = gl.on(0.0, 1.0);
    // samples of the pulled-back density on the tensor grid
    let grid: Vec<(Complex64, f64)> = radial
        .nodes
        .iter()
        .zip(&radial.weights)
        .flat_map(|(&rho, &wr)| {
            angles.iter().map(move |&th| {
                let u = Complex64::from_polar(rho, th);
                (u, wr * rho * dth)
            })
        })
        .map(|(u, wt)| (u, wt * pulled_density(map, u)))
        .collect();

    let ab = map.a * map.b;
    let mut smooth = 0.0;
    for &(u, m) in &grid {
        let mut inner = 0.0;
        for &(v, n) in &grid {
            inner += n * (1.0 - map.a * (u + v) + ab * u * v).norm_sqr().ln();
        }
        smooth += m * inner;
    }
    // log|u|^2 is singular at the origin: geometric panels towards rho = 0
    let panel = gauss_legendre(16);
    let mut mass = 0.0;
    let mut separable = 0.0;
    let mut hi = 1.0;
    for _ in 0..24 {
        let lo = if hi < 1e-12 { 0.0 } else { hi / 4.0 };
        let r = panel.on(lo, hi);
        for (&rho, &wr) in r.nodes.iter().zip(&r.weights) {
            for &th in &angles {
                let u = Complex64::from_polar(rho, th);
                let m = wr * rho * dth * pulled_density(map, u);
                mass += m;
                separable += m * (u.norm_sqr().ln() + (1.0 - map.a * u).norm_sqr().ln());
            }
        }
        if lo == 0.0 {
            break;
        }
        hi = lo;
    }
    smooth += mass * mass * (map.r * map.r).ln() - 2.0 * mass * separable;

    // log|u - u'|^2 through Fourier modes: for rho' < rho the kernel has
    // coefficients log rho^2 (k = 0) and -(rho'/rho)^|k| / |k| otherwise.
    let half = nt / 2;
    let modes = |rho: f64| -> Vec<f64> {
        let vals: Vec<f64> = angles
            .iter()
            .map(|&th| pulled_density(map, Complex64::from_polar(rho, th)))
            .collect();
        // conjugation symmetry makes the coefficients real
        (0..=half)
            .map(|k| {
                vals.iter()
                    .zip(&angles)
                    .map(|(v, th)| v * (k as f64 * th).cos())
                    .sum::<f64>()
                    / nt as f64
            })
            .collect()
    };
    let mut log_part = 0.0;
    for (&rho, &wr) in radial.nodes.iter().zip(&radial.weights) {
        let outer = modes(rho);
        let inner_rule = gl.on(0.0, rho);
        let mut acc = 0.0;
        for (&s, &ws) in inner_rule.nodes.iter().zip(&inner_rule.weights) {
            let inner = modes(s);
            let ratio = s / rho;
            let mut sum = outer[0] * inner[0] * (rho * rho).ln();
            let mut p = 1.0;
            for k in 1..=half {
                p *= ratio;
                let mult = if k == half { 1.0 } else { 2.0 };
                sum -= mult * outer[k] * inner[k] * p / k as f64;
            }
            acc += ws * s * sum;
        }
        log_part += wr * rho * acc;
    }
    // both orderings of (rho, rho'), and (2 pi)^2 from the angular integrals
    let log_part = 2.0 * (2.0 * PI).powi(2) * log_part;
    Ok(log_part + smooth)
}

/// Values of the equilibrium functional at random interior points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpotCheck {
    pub points: Vec<Complex64>,
    pub values: Vec<f64>,
    pub c_const: f64,
    /// `max |value - C|`.
    pub max_deviation: f64,
}

/// Evaluates `-T log(1 + |z|^2) + Q1 log|w - z|^2 + int log|z - z'|^2 mu'`
/// at `n` random points well inside the droplet.
pub fn equilibrium_spot_check(map: &ConformalMap, n: usize, seed: u64) -> Result<SpotCheck> {
    let boundary = droplet_boundary(map, 1024)?;
    let (x0, x1, y0, y1) = boundary.bounding_box();
    let margin = 0.02 * (x1 - x0).max(y1 - y0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points = Vec::with_capacity(n);
    let mut tries = 0;
    while points.len() < n {
        tries += 1;
        if tries > 1000 * n.max(1) {
            return Err(Error::Convergence {
                what: "interior point sampling".into(),
                achieved: points.len() as f64,
            });
        }
        let z = Complex64::new(rng.random_range(x0..x1), rng.random_range(y0..y1));
        let clear = boundary.points.iter().all(|p| (p - z).norm() > margin);
        if clear && boundary.contains(z) {
            points.push(z);
        }
    }
    let cfg = map.config();
    let c_const = breakdown(map)?.c_const;
    let values = points
        .iter()
        .map(|&z| {
            let u = potential_quadrature(map, z)?;
            Ok(-cfg.total() * (1.0 + z.norm_sqr()).ln()
                + cfg.q1 * (Complex64::new(cfg.w, 0.0) - z).norm_sqr().ln()
                + u)
        })
        .collect::<Result<Vec<f64>>>()?;
    let max_deviation = values.iter().map(|v| (v - c_const).abs()).fold(0.0, f64::max);
    Ok(SpotCheck {
        points,
        values,
        c_const,
        max_deviation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(q0: f64, q1: f64, w: f64) -> ChargeConfig {
        ChargeConfig::new(q0, q1, w).unwrap()
    }

    #[test]
    fn k_post_symmetry_and_equal_form() {
        assert!((k_post(4.0, 2.0) - k_post(2.0, 4.0)).abs() < 1e-15);
        for q in [0.5, 1.0, 2.0, 4.0] {
            let t: f64 = 1.0 + 2.0 * q;
            let direct = t + 2.0 * t * t.ln() - 2.0 * (1.0 + q).powi(2) * (1.0 + q).ln() + 2.0 * q * q * q.ln();
            assert!((k_post(q, q) - direct).abs() < 1e-12);
        }
    }

    #[test]
    fn quoted_critical_form_differs_by_sign_of_last_term() {
        for q in [2.0f64, 4.0] {
            let gap = k_critical_equal_quoted(q) - k_post(q, q);
            assert!((gap + 4.0 * q * q * q.ln()).abs() < 1e-10);
        }
        assert!((k_critical_equal_quoted(1.0) - k_post(1.0, 1.0)).abs() < 1e-12);
    }

    #[test]
    fn critical_limit_matches_post() {
        for (q0, q1) in [(4.0, 4.0), (4.0, 2.0), (2.0, 1.0), (0.5, 3.0)] {
            let lim = k_pre_critical_limit(q0, q1).unwrap();
            assert!((lim - k_post(q0, q1)).abs() < 1e-8, "{q0},{q1}: {lim} vs {}", k_post(q0, q1));
        }
    }

    #[test]
    fn assembled_critical_limits() {
        for q in [1.0, 2.0, 4.0] {
            let c = critical_limits_equal(q).unwrap();
            assert!((c.k_assembled - k_post(q, q)).abs() < 1e-12, "{q}: {}", c.k_assembled);
            let wc = cfg(q, q, 1.0).w_cri();
            let m = build_map(&cfg(q, q, wc * (1.0 + 1e-6))).unwrap();
            assert!((integral_log_density(&m).unwrap() - c.i_log).abs() < 1e-4);
            assert!((w_potential(&m, 1.0).unwrap() - c.half_w_zeta1).abs() < 1e-4);
            assert!((w_potential(&m, m.v0).unwrap() - c.half_w_w).abs() < 1e-4);
        }
    }

    #[test]
    fn large_w_limits() {
        let (q0, q1) = (4.0, 2.0);
        let w = 1e3;
        let e = k_pre(&cfg(q0, q1, w)).unwrap();
        assert!((e.i_log - i_log_large_w(q0, q1)).abs() < 1e-4);
        assert!((e.k_pre - k_pre_large_w(q0, q1, w)).abs() < 1e-4);
        let t: f64 = 1.0 + q0 + q1;
        let gap = k_pre_large_w(q0, q1, w) - k_pre_large_w_quoted(q0, q1, w);
        assert!((gap - t * t.ln()).abs() < 1e-10);
        let m = build_map(&cfg(q0, q1, w)).unwrap();
        let u = 0.5;
        let z = m.r / u;
        assert!((2.0 * w_potential(&m, u).unwrap() - (z * z).ln()).abs() < 1e-2);
    }

    #[test]
    fn pre_exceeds_post_and_energy_decreases() {
        for (q0, q1) in [(4.0, 4.0), (4.0, 2.0)] {
            let wc = cfg(q0, q1, 1.0).w_cri();
            let mut last = f64::INFINITY;
            for k in 1..40 {
                let w = wc * (1.0 + 0.05 * k as f64 * k as f64);
                let e = k_pre(&cfg(q0, q1, w)).unwrap();
                assert!(e.k_pre > e.k_post);
                let (kn, _) = e.energies();
                assert!(kn < last);
                last = kn;
            }
        }
    }

    #[test]
    fn w_potential_rejects_bad_u() {
        let m = build_map(&cfg(4.0, 2.0, 1.0)).unwrap();
        assert!(w_potential(&m, 0.0).is_err());
        assert!(w_potential(&m, 1.5).is_err());
    }

    #[test]
    fn quadrature_agrees_with_closed_forms() {
        let c = cfg(4.0, 2.0, 1.0);
        let m = build_map(&c).unwrap();
        let closed = breakdown(&m).unwrap();
        let quad = energy_quadrature_oracle(&c, &m).unwrap();
        let rel = |a: f64, b: f64| (a - b).abs() / b.abs();
        assert!(rel(quad.i_log, closed.i_log) < 1e-8);
        assert!(rel(quad.w_zeta1, closed.w_zeta1) < 1e-8);
        assert!(rel(quad.w_w, closed.w_w) < 1e-8);
        assert!(rel(quad.double_integral, closed.double_integral) < 1e-5, "{} vs {}", quad.double_integral, closed.double_integral);
        assert!((droplet_mass(&m).unwrap() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn equilibrium_is_constant_inside() {
        let m = build_map(&cfg(4.0, 2.0, 1.0)).unwrap();
        let s = equilibrium_spot_check(&m, 5, 7).unwrap();
        assert!(s.max_deviation < 1e-6, "{:?}", s.values);
    }
}

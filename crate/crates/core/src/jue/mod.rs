//! Jacobi unitary ensemble side of the duality.
//!
//! `JUE_{n,(a,b)}` has eigenvalue density proportional to
//! `prod x^a (1 - x)^b prod |x_j - x_k|^2` on `(0, 1)`. With `a = gamma1 n`,
//! `b = gamma2 n` the limiting density is the Wachter law on `(cJ, dJ)`.
//! Conditioning the largest eigenvalue to lie below a wall `zeta < dJ` moves
//! the support to `(L(zeta), zeta)` at a cost `n^2 (S(L, zeta) - S(cJ, dJ))`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::energy::{k_post, k_pre};
use crate::error::{domain, Error, Result};
use crate::geometry::ChargeConfig;
use crate::quad::gauss_jacobi;

pub mod gap;
pub mod painleve;

pub use gap::{jue_average, jue_gap_quadrature, selberg_ln};
pub use painleve::{airy_fredholm_gap, painleve_gap, HastingsMcLeod};

const NORMALISATION_NODES: usize = 64;

/// Exponent ratios of the ensemble dual to charges `(Q0, Q1)`.
pub fn gammas_from_charges(q0: f64, q1: f64) -> (f64, f64) {
    (q0 / q1 - 1.0, 1.0 / q1)
}

/// Wachter law parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WachterSpec {
    pub gamma1: f64,
    pub gamma2: f64,
    #[serde(rename = "cJ")]
    pub c: f64,
    #[serde(rename = "dJ")]
    pub d: f64,
}

pub fn wachter(gamma1: f64, gamma2: f64) -> Result<WachterSpec> {
    if !(gamma1 >= 0.0 && gamma2 > 0.0 && gamma1.is_finite() && gamma2.is_finite()) {
        return domain(format!(
            "Wachter law needs gamma1 >= 0 and gamma2 > 0, got ({gamma1}, {gamma2})"
        ));
    }
    let g = gamma1 + gamma2 + 2.0;
    let s = ((gamma1 + 1.0) * (gamma1 + gamma2 + 1.0)).sqrt();
    let t = (gamma2 + 1.0).sqrt();
    Ok(WachterSpec {
        gamma1,
        gamma2,
        c: ((s - t) / g).powi(2),
        d: ((s + t) / g).powi(2),
    })
}

impl WachterSpec {
    pub fn g(&self) -> f64 {
        self.gamma1 + self.gamma2 + 2.0
    }

    pub fn density(&self, x: f64) -> f64 {
        if x <= self.c || x >= self.d {
            return 0.0;
        }
        self.g() * ((x - self.c) * (self.d - x)).sqrt() / (2.0 * PI * x * (1.0 - x))
    }

    /// Total mass by Gauss-Jacobi quadrature with the square-root edges as weight.
    pub fn mass(&self) -> Result<f64> {
        let rule = gauss_jacobi(NORMALISATION_NODES, 0.5, 0.5)?;
        let h = 0.5 * (self.d - self.c);
        let mid = 0.5 * (self.d + self.c);
        Ok(rule.apply(|t| {
            let x = mid + h * t;
            self.g() * h * h / (2.0 * PI * x * (1.0 - x))
        }))
    }
}

/// Largest-eigenvalue constrained density.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConstrainedJue {
    pub zeta: f64,
    #[serde(rename = "B")]
    pub b_c: f64,
    #[serde(rename = "C")]
    pub c_c: f64,
    #[serde(rename = "Q")]
    pub q_c: f64,
    #[serde(rename = "R")]
    pub r_c: f64,
    pub z0: f64,
    #[serde(rename = "L")]
    pub l: f64,
    /// Coefficient `kappa` in the factor `(kappa - x)` of the density.
    pub kappa: f64,
    pub spec: WachterSpec,
}

/// Principal cube root.
fn cbrt_principal(z: Complex64) -> Complex64 {
    if z.norm() == 0.0 {
        return z;
    }
    Complex64::from_polar(z.norm().cbrt(), z.arg() / 3.0)
}

pub fn constrained_density(spec: &WachterSpec, zeta: f64) -> Result<ConstrainedJue> {
    if !(zeta > 0.0) {
        return domain(format!("hard wall must be positive, got {zeta}"));
    }
    let g = spec.g();
    let zeta = zeta.min(spec.d);
    let (g1, g2) = (spec.gamma1, spec.gamma2);
    let b = g1 * zeta.sqrt() / g;
    let c = g2 * (1.0 - zeta).sqrt() / g;
    let (b2, c2) = (b * b, c * c);
    let q = -(1.0 - b2 - c2).powi(2) / 9.0;
    let r = (b2.powi(3) - 3.0 * b2 * b2 * (1.0 - c2) + 3.0 * b2 * (1.0 + 16.0 * c2 + c2 * c2)
        - (1.0 - c2).powi(3))
        / 27.0;
    let disc = q.powi(3) + r * r;
    let roots = if disc >= 0.0 {
        (r + disc.sqrt()).cbrt() + (r - disc.sqrt()).cbrt()
    } else {
        let s = Complex64::new(0.0, (-disc).sqrt());
        let sum = cbrt_principal(r + s) + cbrt_principal(r - s);
        if sum.im.abs() > 1e-10 * sum.re.abs().max(1.0) {
            return Err(Error::Singular(format!("cube roots do not sum to a real number: {sum}")));
        }
        sum.re
    };
    let z0 = -(2.0 * c2 - b2 - 2.0) / 3.0 + roots;
    let (l, kappa) = if g1 == 0.0 {
        // L -> 0 like gamma1^2 while gamma1 sqrt(zeta / L) stays finite; the
        // limit of kappa follows from unit mass
        let s = (1.0 - zeta).sqrt();
        (0.0, 1.0 - s * (1.0 - 2.0 / g))
    } else if zeta >= spec.d {
        (spec.c, spec.d)
    } else {
        if !(z0 > 0.0) {
            return Err(Error::Singular(format!("z0 = {z0} is not positive")));
        }
        let inner = b2 - 2.0 * c2 + 2.0 - z0 - 2.0 / z0.sqrt() * b * (c2 + 1.0);
        if inner < 0.0 {
            return Err(Error::Singular(format!("negative radicand {inner} in L")));
        }
        let l = 0.25 * (b + z0.sqrt() - inner.sqrt()).powi(2);
        (l, g1 * (zeta / l).sqrt() / g)
    };
    Ok(ConstrainedJue {
        zeta,
        b_c: b,
        c_c: c,
        q_c: q,
        r_c: r,
        z0,
        l,
        kappa,
        spec: *spec,
    })
}

impl ConstrainedJue {
    pub fn density(&self, x: f64) -> f64 {
        if x <= self.l || x >= self.zeta {
            return 0.0;
        }
        let g = self.spec.g();
        g * ((x - self.l) / (self.zeta - x)).sqrt() * (self.kappa - x) / (2.0 * PI * x * (1.0 - x))
    }

    /// Total mass, exact by partial fractions of `(x - L)(kappa - x) / (x (1 - x))`
    /// against the arcsine weight of `(L, zeta)`.
    pub fn mass(&self) -> f64 {
        let g = self.spec.g();
        0.5 * g
            * (1.0
                - self.kappa * (self.l / self.zeta).sqrt()
                - (1.0 - self.kappa) * ((1.0 - self.l) / (1.0 - self.zeta)).sqrt())
    }
}

/// Rate function `S(x, y)`.
pub fn rate_function_s(spec: &WachterSpec, x: f64, y: f64) -> Result<f64> {
    if !(0.0 <= x && x < y && y < 1.0) {
        return domain(format!("S(x, y) needs 0 <= x < y < 1, got ({x}, {y})"));
    }
    let (g1, g2) = (spec.gamma1, spec.gamma2);
    let g = spec.g();
    let (sx, sy) = (x.sqrt(), y.sqrt());
    let (tx, ty) = ((1.0 - x).sqrt(), (1.0 - y).sqrt());
    let mut s = -g * (g1 * (0.5 * (sx + sy)).ln() + g2 * (0.5 * (tx + ty)).ln())
        + 0.25 * g2 * g2 * ((1.0 - x) * (1.0 - y)).ln()
        + g1 * g2 * (0.5 * (sx * ty + sy * tx)).ln()
        - (0.25 * (y - x)).ln();
    if g1 != 0.0 {
        s += 0.25 * g1 * g1 * (x * y).ln();
    }
    Ok(s)
}

/// `S(L(zeta), zeta) - S(cJ, dJ)`; zero for walls at or beyond `dJ`.
pub fn rate_difference(spec: &WachterSpec, zeta: f64) -> Result<f64> {
    if zeta >= spec.d {
        return Ok(0.0);
    }
    let c = constrained_density(spec, zeta)?;
    Ok(rate_function_s(spec, c.l, zeta)? - rate_function_s(spec, spec.c, spec.d)?)
}

/// Least-squares exponent `p` in `S(L, zeta) - S(cJ, dJ) ~ (dJ - zeta)^p`.
pub fn fit_rate_exponent(spec: &WachterSpec, deltas: &[f64]) -> Result<f64> {
    if deltas.len() < 2 {
        return domain("exponent fit needs at least two offsets");
    }
    let pts = deltas
        .iter()
        .map(|&d| Ok((d.ln(), rate_difference(spec, spec.d - d)?.ln())))
        .collect::<Result<Vec<(f64, f64)>>>()?;
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    Ok(sxy / sxx)
}

/// Both sides of the energy identity between the sphere gas and the
/// constrained Jacobi ensemble.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IdentityReport {
    pub w: f64,
    pub zeta: f64,
    /// `(2 / Q1^2) (K_N^post - K_N^pre)` from the sphere.
    pub sphere_side: f64,
    /// `S(L(zeta), zeta) - S(cJ, dJ)` from the Jacobi ensemble.
    pub jacobi_side: f64,
    pub residual: f64,
}

pub fn energy_identity_check(cfg: &ChargeConfig) -> Result<IdentityReport> {
    let e = k_pre(cfg)?;
    // K_N = -k / 4
    let sphere_side = 2.0 / (cfg.q1 * cfg.q1) * (e.k_pre - k_post(cfg.q0, cfg.q1)) / 4.0;
    let (g1, g2) = gammas_from_charges(cfg.q0, cfg.q1);
    let spec = wachter(g1, g2)?;
    let zeta = 1.0 / (1.0 + cfg.w * cfg.w);
    let jacobi_side = rate_difference(&spec, zeta)?;
    Ok(IdentityReport {
        w: cfg.w,
        zeta,
        sphere_side,
        jacobi_side,
        residual: (sphere_side - jacobi_side).abs() / jacobi_side.abs(),
    })
}

/// Soft-edge scaling constants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SoftEdgeScale {
    pub c_frak: f64,
    pub ct_frak: f64,
    pub s_frak: f64,
    pub st_frak: f64,
    pub alpha_scale: f64,
}

pub fn soft_edge_scale(q0: f64, q1: f64) -> Result<SoftEdgeScale> {
    if !(q1 > 0.0 && q0 >= q1) {
        return domain(format!("soft edge needs Q0 >= Q1 > 0, got ({q0}, {q1})"));
    }
    let (g1, g2) = gammas_from_charges(q0, q1);
    let g = g1 + g2 + 2.0;
    let c = ((g1 + 1.0) / g).sqrt();
    let ct = (1.0 / g).sqrt();
    let s = ((g2 + 1.0) / g).sqrt();
    let st = ((g1 + g2 + 1.0) / g).sqrt();
    let prod = c * s * ct * st;
    let den = ct * st * (c * c - s * s) + c * s * (ct * ct - st * st);
    let alpha_scale = (prod * g.sqrt() / den).abs().powf(4.0 / 3.0) / prod;
    Ok(SoftEdgeScale {
        c_frak: c,
        ct_frak: ct,
        s_frak: s,
        st_frak: st,
        alpha_scale,
    })
}

impl SoftEdgeScale {
    /// `w` at which `1/(1 + w^2) = dJ + s / (alpha N^{2/3})`.
    pub fn window_w(&self, spec: &WachterSpec, s: f64, n: f64) -> Result<f64> {
        let zeta = spec.d + s / (self.alpha_scale * n.powf(2.0 / 3.0));
        if !(zeta > 0.0 && zeta < 1.0) {
            return domain(format!("window position {zeta} leaves (0, 1)"));
        }
        Ok((1.0 / zeta - 1.0).sqrt())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::integrate;

    #[test]
    fn wachter_edges_and_mass() {
        let s = wachter(4.0, 2.0).unwrap();
        assert!((s.c - 0.273_532_788_563_762_5).abs() < 1e-14);
        assert!((s.d - 0.913_967_211_436_237_6).abs() < 1e-14);
        assert!((s.mass().unwrap() - 1.0).abs() < 1e-12);
        assert!(wachter(-0.5, 1.0).is_err());
    }

    #[test]
    fn edge_matches_critical_point() {
        for (q0, q1) in [(4.0, 2.0), (4.0, 4.0), (3.0, 0.5)] {
            let (g1, g2) = gammas_from_charges(q0, q1);
            let s = wachter(g1, g2).unwrap();
            let wc = crate::geometry::critical_w(q0, q1).unwrap();
            assert!((1.0 / (1.0 + wc * wc) - s.d).abs() < 1e-13);
        }
    }

    #[test]
    fn constrained_mass_and_edge() {
        let s = wachter(4.0, 2.0).unwrap();
        let c = constrained_density(&s, 0.75).unwrap();
        assert!((c.mass() - 1.0).abs() < 1e-12);
        assert!(c.l < s.c);
        assert!((c.l - 0.256_467_555_825_460_55).abs() < 1e-10);
        // independent adaptive quadrature
        let e = integrate(|x| c.density(x), &[c.l, 0.5, c.zeta], 1e-12, 1e-12).unwrap();
        assert!((e.value - 1.0).abs() < 1e-7);
        assert!(constrained_density(&s, 0.0).is_err());
    }

    #[test]
    fn wall_at_edge_is_unconstrained() {
        let s = wachter(4.0, 2.0).unwrap();
        let c = constrained_density(&s, s.d).unwrap();
        let c2 = constrained_density(&s, 0.99).unwrap();
        assert_eq!(c, c2);
        for k in 1..50 {
            let x = s.c + (s.d - s.c) * k as f64 / 50.0;
            assert!((c.density(x) - s.density(x)).abs() < 1e-10);
        }
        // the closed-form edge approaches cJ as the wall approaches dJ
        let near = constrained_density(&s, s.d - 1e-9).unwrap();
        assert!((near.l - s.c).abs() < 1e-6);
    }

    #[test]
    fn zero_gamma1_limit() {
        let s = wachter(0.0, 0.25).unwrap();
        let c = constrained_density(&s, 0.5).unwrap();
        assert!((c.mass() - 1.0).abs() < 1e-12);
        let e = integrate(|x| c.density(x), &[0.0, 0.25, 0.5], 1e-12, 1e-12).unwrap();
        assert!((e.value - 1.0).abs() < 1e-7);
        let near = constrained_density(&wachter(1e-3, 0.25).unwrap(), 0.5).unwrap();
        assert!((near.kappa - c.kappa).abs() < 1e-3);
    }

    #[test]
    fn rate_difference_behaviour() {
        let s = wachter(4.0, 2.0).unwrap();
        assert_eq!(rate_difference(&s, s.d).unwrap(), 0.0);
        let mut last = 0.0;
        for k in 1..20 {
            let v = rate_difference(&s, s.d - 0.03 * k as f64).unwrap();
            assert!(v > last);
            last = v;
        }
        assert!(rate_function_s(&s, 0.5, 0.4).is_err());
    }

    #[test]
    fn third_order_transition() {
        let s = wachter(4.0, 2.0).unwrap();
        let deltas: Vec<f64> = (0..8).map(|k| 2e-4 * 10f64.powf(k as f64 / 7.0)).collect();
        let p = fit_rate_exponent(&s, &deltas).unwrap();
        assert!((p - 3.0).abs() < 0.1, "{p}");
    }

    #[test]
    fn identity_holds() {
        for w in [0.2, 1.0, 5.0] {
            let r = energy_identity_check(&ChargeConfig::new(4.0, 2.0, w).unwrap()).unwrap();
            assert!(r.residual < 1e-8, "{r:?}");
        }
        let r = energy_identity_check(&ChargeConfig::new(4.0, 4.0, 1.0).unwrap()).unwrap();
        assert!(r.residual < 1e-8, "{r:?}");
    }

    #[test]
    fn soft_edge_constants() {
        let e = soft_edge_scale(4.0, 2.0).unwrap();
        assert!((e.ct_frak.powi(2) + e.st_frak.powi(2) - 1.0).abs() < 1e-14);
        assert!((e.c_frak.powi(2) + e.s_frak.powi(2) - 1.0).abs() < 1e-14);
        assert!(e.alpha_scale > 0.0);
        assert!(soft_edge_scale(1.0, 2.0).is_err());
        let spec = wachter(1.0, 0.5).unwrap();
        let w = e.window_w(&spec, 0.0, 100.0).unwrap();
        assert!((1.0 / (1.0 + w * w) - spec.d).abs() < 1e-14);
    }
}

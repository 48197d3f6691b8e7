//! Conformal maps describing the pre-critical droplet.
//!
//! With the charge `Q0 N` at the south pole the exterior of the droplet is the
//! image of the unit disk under
//!
//! ```text
//! zeta(u) = (R / u) (1 - b u) / (1 - a u),   a = R alpha,  b = beta / R,
//! ```
//!
//! where `alpha` is the smallest positive root of a quartic in `alpha`. For
//! equal charges placed symmetrically about the south pole the droplet is an
//! ellipse, which a rotation of the sphere carries onto the south-pole picture.

use std::f64::consts::PI;

use nalgebra::{Matrix4, Vector4};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::geometry::{ChargeConfig, SphericalCaps};
use crate::poly;

/// Relative distance to `w_cri` inside which the map is considered degenerate.
pub const NEAR_CRITICAL: f64 = 1e-8;
pub const DEFAULT_RESOLUTION: usize = 512;
pub const HAUSDORFF_RESOLUTION: usize = 2048;

/// Ascending coefficients of the quartic whose smallest positive root is `alpha`.
pub fn quartic_coefficients(q0: f64, q1: f64, w: f64) -> [f64; 5] {
    [
        w * q0,
        1.0 + 2.0 * q0 - (q0 + q1) * w * w,
        -3.0 * (1.0 + q0 + q1) * w,
        -1.0 - 2.0 * q1 + (2.0 + q0 + q1) * w * w,
        (1.0 + q1) * w,
    ]
}

/// Smallest positive root of the `alpha` quartic.
///
/// The root is meaningful for pre-critical configurations; for other `w` it is
/// still returned when it exists.
pub fn solve_alpha(cfg: &ChargeConfig) -> Result<f64> {
    let c = quartic_coefficients(cfg.q0, cfg.q1, cfg.w);
    poly::smallest_positive_root(&c)
}

/// First two terms of the large-`w` series of `alpha`.
pub fn alpha_large_w(q0: f64, q1: f64, w: f64) -> f64 {
    let s = q0 + q1;
    let c1 = q0 / s;
    let c3 = -q0 * q1 * (q0 - q1 + q0 * q0 + q0 * q1) / s.powi(4);
    c1 / w + c3 / w.powi(3)
}

fn require_precritical(cfg: &ChargeConfig) -> Result<()> {
    let w_cri = cfg.w_cri();
    let rel = (cfg.w - w_cri) / w_cri;
    if rel > NEAR_CRITICAL {
        return Ok(());
    }
    Err(Error::Phase {
        expected: "pre-critical",
        found: if rel.abs() <= NEAR_CRITICAL {
            "critical"
        } else {
            "post-critical"
        },
        w: cfg.w,
        w_cri,
    })
}

/// Parameters of the pre-critical droplet map.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConformalMap {
    #[serde(rename = "R")]
    pub r: f64,
    pub a: f64,
    pub b: f64,
    pub alpha: f64,
    pub beta: f64,
    pub v0: f64,
    pub v1: f64,
    pub c: f64,
    #[serde(rename = "A_aux")]
    pub a_aux: f64,
    #[serde(rename = "B_aux")]
    pub b_aux: f64,
    #[serde(rename = "Q0")]
    pub q0: f64,
    #[serde(rename = "Q1")]
    pub q1: f64,
    pub w: f64,
}

pub fn build_map(cfg: &ChargeConfig) -> Result<ConformalMap> {
    require_precritical(cfg)?;
    let (q0, q1, w) = (cfg.q0, cfg.q1, cfg.w);
    let alpha = solve_alpha(cfg)?;
    let beta = (1.0 + q1) / q0 * alpha;
    let a_aux = (1.0 + alpha * alpha) / (beta + w + (1.0 - beta * w) * alpha);
    let r2 = ((beta + w) * a_aux - 1.0) / (alpha * w * a_aux * a_aux);
    if !(r2 > 0.0 && a_aux > 0.0) {
        return Err(Error::Singular(format!(
            "map scale is not positive (R^2 = {r2:e}, A = {a_aux:e})"
        )));
    }
    let r = r2.sqrt();
    let v0 = r * a_aux;
    let a = r * alpha;
    let b = beta / r;
    let v1 = r / (a * w * v0);
    let b_aux = (beta + w - 1.0 / a_aux) / (alpha * w);
    let mut map = ConformalMap {
        r,
        a,
        b,
        alpha,
        beta,
        v0,
        v1,
        c: 0.0,
        a_aux,
        b_aux,
        q0,
        q1,
        w,
    };
    map.c = -(map.zeta_prime_real(v0) / w) * (1.0 + q0 + q1) / q1;
    if !(0.0 < a && a < v0 && v0 < b && v0 < 1.0 && v1 > 1.0) {
        return Err(Error::Singular(format!(
            "ordering 0 < a < v0 < b, v0 < 1 < v1 violated: a = {a}, v0 = {v0}, b = {b}, v1 = {v1}"
        )));
    }
    Ok(map)
}

impl ConformalMap {
    pub fn config(&self) -> ChargeConfig {
        ChargeConfig {
            q0: self.q0,
            q1: self.q1,
            w: self.w,
            swapped: false,
        }
    }

    /// `zeta(u)`; fails at `u = 0` and at the pole `u = 1/a`.
    pub fn zeta(&self, u: Complex64) -> Result<Complex64> {
        let den = u * (1.0 - self.a * u);
        if den.norm() < 1e-300 {
            return Err(Error::Singular(format!("zeta has a pole at u = {u}")));
        }
        Ok(self.zeta_unchecked(u))
    }

    pub fn zeta_unchecked(&self, u: Complex64) -> Complex64 {
        self.r * (1.0 - self.b * u) / (u * (1.0 - self.a * u))
    }

    pub fn zeta_prime(&self, u: Complex64) -> Complex64 {
        let d = u * (1.0 - self.a * u);
        -self.r * (1.0 - 2.0 * self.a * u + self.a * self.b * u * u) / (d * d)
    }

    pub fn zeta_real(&self, u: f64) -> f64 {
        self.r * (1.0 - self.b * u) / (u * (1.0 - self.a * u))
    }

    pub fn zeta_prime_real(&self, u: f64) -> f64 {
        let d = u * (1.0 - self.a * u);
        -self.r * (1.0 - 2.0 * self.a * u + self.a * self.b * u * u) / (d * d)
    }

    /// `w^2 zeta'(1/v0) / (v0^2 zeta'(v0))`, the weight of the `v0` pole.
    pub fn pole_weight(&self) -> f64 {
        let v0 = self.v0;
        self.w * self.w * self.zeta_prime_real(1.0 / v0) / (v0 * v0 * self.zeta_prime_real(v0))
    }

    /// Defects of the defining relations: `zeta(v0) - w`,
    /// `zeta(v0) zeta(1/v0) + 1`, and the two residue relations.
    pub fn defects(&self) -> [f64; 4] {
        let (q0, q1, w, v0) = (self.q0, self.q1, self.w, self.v0);
        let t = 1.0 + q0 + q1;
        let z0 = self.zeta_real(v0);
        let zi = self.zeta_real(1.0 / v0);
        let p = v0 * v0 * self.zeta_prime_real(v0);
        let residue = q1 / t - p / (p + w * w * self.zeta_prime_real(1.0 / v0));
        let normalisation = q0 / t - 1.0 / (1.0 + self.beta / self.alpha);
        [z0 - w, z0 * zi + 1.0, residue, normalisation]
    }

    /// Preimage `u` in the unit disk of an exterior point `z`.
    pub fn preimage(&self, z: Complex64) -> Result<Complex64> {
        // z u (1 - a u) = R (1 - b u)  =>  a z u^2 - (z + R b) u + R = 0
        let qa = self.a * z;
        let qb = -(z + self.r * self.b);
        let disc = (qb * qb - 4.0 * qa * self.r).sqrt();
        let roots = [(-qb + disc) / (2.0 * qa), (-qb - disc) / (2.0 * qa)];
        roots
            .into_iter()
            .filter(|u| u.norm() <= 1.0 + 1e-12)
            .min_by(|x, y| x.norm().total_cmp(&y.norm()))
            .ok_or_else(|| Error::Domain(format!("{z} lies inside the droplet")))
    }
}

/// Closed polygonal sample of a boundary curve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryCurve {
    pub points: Vec<Complex64>,
    pub closed: bool,
}

impl BoundaryCurve {
    pub fn from_fn(n: usize, f: impl Fn(f64) -> Complex64) -> Self {
        let points = (0..n)
            .map(|k| f(2.0 * PI * k as f64 / n as f64))
            .collect();
        Self {
            points,
            closed: true,
        }
    }

    pub fn circle(center: Complex64, radius: f64, n: usize) -> Self {
        Self::from_fn(n, |t| center + radius * Complex64::from_polar(1.0, t))
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Winding number of the closed polygon about `z`.
    pub fn winding_number(&self, z: Complex64) -> i32 {
        let n = self.points.len();
        let mut total = 0.0;
        for k in 0..n {
            let p = self.points[k] - z;
            let q = self.points[(k + 1) % n] - z;
            total += (q / p).arg();
        }
        (total / (2.0 * PI)).round() as i32
    }

    pub fn contains(&self, z: Complex64) -> bool {
        self.winding_number(z) != 0
    }

    /// Largest `|p_k - conj(p_{n-k})|`; zero for curves sampled from a real map
    /// starting at angle zero.
    pub fn conjugation_defect(&self) -> f64 {
        let n = self.points.len();
        (0..n)
            .map(|k| (self.points[k] - self.points[(n - k) % n].conj()).norm())
            .fold(0.0, f64::max)
    }

    /// Whether no two non-adjacent edges of the polygon intersect.
    ///
    /// Edges are sorted by their leftmost abscissa and swept left to right,
    /// testing each new edge only against the edges whose x-extent is still
    /// active.
    pub fn is_simple(&self) -> bool {
        let n = self.points.len();
        if n < 4 {
            return true;
        }
        let seg = |i: usize| (self.points[i], self.points[(i + 1) % n]);
        let mut order: Vec<usize> = (0..n).collect();
        let xmin = |i: usize| {
            let (p, q) = seg(i);
            p.re.min(q.re)
        };
        let xmax = |i: usize| {
            let (p, q) = seg(i);
            p.re.max(q.re)
        };
        order.sort_by(|&i, &j| xmin(i).total_cmp(&xmin(j)));
        let mut active: Vec<usize> = Vec::new();
        for &i in &order {
            let x = xmin(i);
            active.retain(|&j| xmax(j) >= x);
            for &j in &active {
                let adjacent = (i + 1) % n == j || (j + 1) % n == i;
                if !adjacent {
                    let (p1, p2) = seg(i);
                    let (p3, p4) = seg(j);
                    if segments_cross(p1, p2, p3, p4) {
                        return false;
                    }
                }
            }
            active.push(i);
        }
        true
    }

    /// Hausdorff distance between the two vertex sets.
    pub fn hausdorff(&self, other: &Self) -> f64 {
        let directed = |a: &Self, b: &Self| {
            a.points
                .iter()
                .map(|p| {
                    b.points
                        .iter()
                        .map(|q| (p - q).norm())
                        .fold(f64::INFINITY, f64::min)
                })
                .fold(0.0, f64::max)
        };
        directed(self, other).max(directed(other, self))
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("re,im\n");
        for p in &self.points {
            s.push_str(&format!("{:.17e},{:.17e}\n", p.re, p.im));
        }
        s
    }

    pub fn bounding_box(&self) -> (f64, f64, f64, f64) {
        self.points.iter().fold(
            (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY),
            |(x0, x1, y0, y1), p| (x0.min(p.re), x1.max(p.re), y0.min(p.im), y1.max(p.im)),
        )
    }
}

fn orient(a: Complex64, b: Complex64, c: Complex64) -> f64 {
    (b - a).re * (c - a).im - (b - a).im * (c - a).re
}

fn segments_cross(p1: Complex64, p2: Complex64, p3: Complex64, p4: Complex64) -> bool {
    let d1 = orient(p3, p4, p1);
    let d2 = orient(p3, p4, p2);
    let d3 = orient(p1, p2, p3);
    let d4 = orient(p1, p2, p4);
    ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
}

/// Image of `n` equispaced points of the unit circle.
pub fn droplet_boundary(map: &ConformalMap, n: usize) -> Result<BoundaryCurve> {
    if n < 16 {
        return domain(format!("boundary needs at least 16 points, got {n}"));
    }
    Ok(BoundaryCurve::from_fn(n, |t| {
        map.zeta_unchecked(Complex64::from_polar(1.0, t))
    }))
}

/// Droplet of a configuration in any phase.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "phase", rename_all = "kebab-case")]
pub enum Droplet {
    /// Exterior of the droplet is the image of the unit disk under `map`.
    PreCritical {
        map: ConformalMap,
        boundary: BoundaryCurve,
    },
    /// Caps touch: the droplet lies inside the circle of radius `1/alpha`,
    /// outside the cap about `w`.
    Critical {
        outer: BoundaryCurve,
        inner: BoundaryCurve,
    },
    /// Sphere minus two disjoint caps.
    PostCritical {
        outer: BoundaryCurve,
        inner: BoundaryCurve,
    },
}

impl Droplet {
    pub fn curves(&self) -> Vec<&BoundaryCurve> {
        match self {
            Droplet::PreCritical { boundary, .. } => vec![boundary],
            Droplet::Critical { outer, inner } | Droplet::PostCritical { outer, inner } => {
                vec![outer, inner]
            }
        }
    }

    pub fn contains(&self, z: Complex64) -> bool {
        match self {
            Droplet::PreCritical { boundary, .. } => boundary.contains(z),
            Droplet::Critical { outer, inner } | Droplet::PostCritical { outer, inner } => {
                outer.contains(z) && !inner.contains(z)
            }
        }
    }
}

/// Plane disk bounded by the image of the cap about `w`.
fn w_cap_circle(cfg: &ChargeConfig, n: usize) -> Result<BoundaryCurve> {
    let caps = SphericalCaps::new(cfg.q0, cfg.q1, cfg.w)?;
    let theta_w = 2.0 * cfg.w.atan();
    let lo = ((theta_w - caps.psi1) / 2.0).tan();
    let hi = ((theta_w + caps.psi1) / 2.0).tan();
    Ok(BoundaryCurve::circle(
        Complex64::new(0.5 * (lo + hi), 0.0),
        0.5 * (hi - lo),
        n,
    ))
}

pub fn droplet(cfg: &ChargeConfig, n: usize) -> Result<Droplet> {
    if n < 16 {
        return domain(format!("boundary needs at least 16 points, got {n}"));
    }
    let w_cri = cfg.w_cri();
    let rel = (cfg.w - w_cri) / w_cri;
    if rel > NEAR_CRITICAL {
        let map = build_map(cfg)?;
        let boundary = droplet_boundary(&map, n)?;
        return Ok(Droplet::PreCritical { map, boundary });
    }
    let inner = w_cap_circle(cfg, n)?;
    if rel.abs() <= NEAR_CRITICAL {
        // alpha beta = 1 at the boundary, so 1/alpha = sqrt((1 + Q1) / Q0)
        let radius = ((1.0 + cfg.q1) / cfg.q0).sqrt();
        let outer = BoundaryCurve::circle(Complex64::new(0.0, 0.0), radius, n);
        return Ok(Droplet::Critical { outer, inner });
    }
    let caps = SphericalCaps::new(cfg.q0, cfg.q1, cfg.w)?;
    let outer = BoundaryCurve::circle(Complex64::new(0.0, 0.0), caps.south_cap_plane_radius(), n);
    Ok(Droplet::PostCritical { outer, inner })
}

/// Ellipse droplet for equal charges at `w_s` and `-w_s`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SymmetricEllipse {
    #[serde(rename = "Q0")]
    pub q0: f64,
    pub w_s: f64,
    pub a1: f64,
    pub a2: f64,
    pub x: f64,
    pub u0: f64,
    pub c1: f64,
    pub c2: f64,
}

pub fn ellipse_build(q0: f64, w_s: f64) -> Result<SymmetricEllipse> {
    if !(w_s > 1.0 && q0 > 0.0) {
        return domain(format!("ellipse needs w_s > 1 and Q0 > 0, got ({q0}, {w_s})"));
    }
    let ws2 = w_s * w_s;
    if q0 * (ws2 - 1.0) <= 1.0 {
        return domain(format!(
            "Q0 = {q0} <= 1/(w_s^2 - 1) = {}: charges are post-critical",
            1.0 / (ws2 - 1.0)
        ));
    }
    let bq = 2.0 * (1.0 + q0 * (1.0 + ws2 * ws2)) / ((1.0 + 2.0 * q0) * ws2);
    // roots multiply to one; take the one inside (0, 1) in cancellation-free form
    let x = 2.0 / (bq + (bq * bq - 4.0).sqrt());
    let a2sq = (x * (1.0 + ws2 * ws2) - (1.0 + x * x) * ws2) / ((1.0 - x * x).powi(2) * ws2);
    if !(a2sq > 0.0) {
        return Err(Error::Singular(format!("a2^2 = {a2sq:e} is not positive")));
    }
    let a2 = a2sq.sqrt();
    let a1 = -x * a2;
    let u0 = (w_s * a1 + a2 / w_s) / (a1 * a1 - a2 * a2);
    Ok(SymmetricEllipse {
        q0,
        w_s,
        a1,
        a2,
        x,
        u0,
        c1: a2 - a1,
        c2: a2 + a1,
    })
}

impl SymmetricEllipse {
    pub fn zeta(&self, u: Complex64) -> Complex64 {
        self.a1 * u + self.a2 / u
    }

    pub fn zeta_prime(&self, u: Complex64) -> Complex64 {
        self.a1 - self.a2 / (u * u)
    }

    /// Semi-axes squared from the charge and position alone.
    pub fn semi_axes_closed_form(&self) -> (f64, f64) {
        let (q, s) = (self.q0, self.w_s * self.w_s);
        (
            (s + 1.0) / (2.0 * (s * q - q - 1.0)),
            (s - 1.0) / (2.0 * (s * q + q + 1.0)),
        )
    }

    /// Defect of the residue relation at `u0`.
    pub fn residue_defect(&self) -> f64 {
        let u0 = Complex64::new(self.u0, 0.0);
        let p = u0 * u0 * self.zeta_prime(u0);
        let ws2 = self.w_s * self.w_s;
        let rhs = p / (p + ws2 * self.zeta_prime(1.0 / u0));
        (self.q0 / (1.0 + 2.0 * self.q0) - rhs.re).abs()
    }

    fn h_direct(&self, u: Complex64) -> Complex64 {
        let z = self.zeta(u);
        let zi = self.zeta(1.0 / u);
        let k = self.q0 / (2.0 * self.q0 + 1.0);
        zi / (1.0 + z * zi) - k * (1.0 / (z + self.w_s) + 1.0 / (z - self.w_s))
    }

    /// Closed form for `-<z^2>` over the normalised droplet density, i.e. the
    /// excess of the vertical over the horizontal second moment.
    pub fn second_moment_closed_form(&self) -> f64 {
        let (q, w4) = (self.q0, self.w_s.powi(4));
        let s = w4 * q - q - 1.0;
        (s - (s * s - w4).sqrt()) / (self.w_s * self.w_s)
    }

    /// Moments `(1 + 2 Q0) m_k` of the normalised droplet density read off from
    /// the Laurent coefficients of the Stieltjes transform at infinity.
    pub fn moments(&self, kmax: usize) -> Result<Vec<f64>> {
        // H(z) = sum_k m_k z^{-k-1}; sample on a circle well outside the ellipse
        let rho = 4.0 * (self.c1.max(self.c2)).max(self.w_s);
        let n = 256;
        let mut out = Vec::with_capacity(kmax + 1);
        let samples: Vec<(Complex64, Complex64)> = (0..n)
            .map(|j| {
                let z = Complex64::from_polar(rho, 2.0 * PI * j as f64 / n as f64);
                stieltjes_at(self, z).map(|h| (z, h))
            })
            .collect::<Result<_>>()?;
        for k in 0..=kmax {
            let m: Complex64 = samples
                .iter()
                .map(|(z, h)| h * z.powu(k as u32 + 1))
                .sum::<Complex64>()
                / n as f64;
            out.push((1.0 + 2.0 * self.q0) * m.re);
        }
        Ok(out)
    }
}

/// `H_s(zeta_s(u))` for `|u| < 1`, continued analytically through the
/// removable points `+-u0`.
pub fn stieltjes_symmetric(e: &SymmetricEllipse, u: Complex64) -> Result<Complex64> {
    if u.norm() >= 1.0 {
        return domain(format!("stieltjes transform needs |u| < 1, got {u}"));
    }
    if u.norm() == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let guard = 1e-2 * e.u0.min(1.0 - e.u0);
    for centre in [e.u0, -e.u0] {
        let c = Complex64::new(centre, 0.0);
        if (u - c).norm() < guard {
            // Cauchy integral over a circle around the removable singularity
            let rho = 2.0 * guard;
            let n = 64;
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 0..n {
                let s = c + Complex64::from_polar(rho, 2.0 * PI * (j as f64 + 0.5) / n as f64);
                acc += e.h_direct(s) * (s - c) / (s - u);
            }
            return Ok(acc / n as f64);
        }
    }
    let h = e.h_direct(u);
    if !h.is_finite() {
        return Err(Error::Singular(format!("stieltjes transform at u = {u}")));
    }
    Ok(h)
}

/// Preimage in the unit disk of a point `z` outside the ellipse.
pub fn ellipse_preimage(e: &SymmetricEllipse, z: Complex64) -> Result<Complex64> {
    // a1 u^2 - z u + a2 = 0
    let disc = (z * z - 4.0 * e.a1 * e.a2).sqrt();
    [(z + disc) / (2.0 * e.a1), (z - disc) / (2.0 * e.a1)]
        .into_iter()
        .filter(|u| u.norm() < 1.0)
        .min_by(|x, y| x.norm().total_cmp(&y.norm()))
        .ok_or_else(|| Error::Domain(format!("{z} is inside the ellipse")))
}

/// Stieltjes transform of the ellipse droplet at an exterior point `z`.
pub fn stieltjes_at(e: &SymmetricEllipse, z: Complex64) -> Result<Complex64> {
    stieltjes_symmetric(e, ellipse_preimage(e, z)?)
}

/// Rotation taking `-w_s` to infinity and `1/w_s` to the origin.
pub fn eta(w_s: f64, z: Complex64) -> Result<Complex64> {
    let den = 1.0 + z / w_s;
    if den.norm() < 1e-300 {
        return Err(Error::PointAtInfinity);
    }
    Ok((z - 1.0 / w_s) / den)
}

pub fn rotate_to_southpole(e: &SymmetricEllipse, u: Complex64) -> Result<Complex64> {
    eta(e.w_s, e.zeta(u))
}

/// Hausdorff distance between two parametrised closed curves, refined by a
/// local minimisation over the parameter beyond the sampling resolution.
pub fn parametric_hausdorff(
    f: impl Fn(f64) -> Complex64,
    g: impl Fn(f64) -> Complex64,
    n: usize,
) -> f64 {
    let directed = |p: &dyn Fn(f64) -> Complex64, q: &dyn Fn(f64) -> Complex64| {
        let h = 2.0 * PI / n as f64;
        let qs: Vec<Complex64> = (0..n).map(|k| q(k as f64 * h)).collect();
        let mut worst: f64 = 0.0;
        for k in 0..n {
            let z = p(k as f64 * h);
            let (j, _) = qs
                .iter()
                .enumerate()
                .map(|(j, s)| (j, (s - z).norm()))
                .min_by(|x, y| x.1.total_cmp(&y.1))
                .expect("non-empty sampling");
            let d = golden_min(|t| (q(t) - z).norm(), (j as f64 - 1.0) * h, (j as f64 + 1.0) * h);
            worst = worst.max(d);
        }
        worst
    };
    directed(&f, &g).max(directed(&g, &f))
}

fn golden_min(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = hi - r * (hi - lo);
    let mut x2 = lo + r * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..80 {
        if f1 < f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - r * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + r * (hi - lo);
            f2 = f(x2);
        }
    }
    f1.min(f2)
}

/// Hausdorff distance between the rotated ellipse boundary and the south-pole
/// map boundary for equal charges `Q0 = Q1 = q` at `w`.
pub fn rotation_hausdorff(q: f64, w: f64, n: usize) -> Result<f64> {
    let cfg = ChargeConfig::new(q, q, w)?;
    let map = build_map(&cfg)?;
    let e = ellipse_build(q, crate::geometry::w_to_ws(w))?;
    Ok(parametric_hausdorff(
        |t| map.zeta_unchecked(Complex64::from_polar(1.0, t)),
        |t| {
            let z = e.zeta(Complex64::from_polar(1.0, t));
            (z - 1.0 / e.w_s) / (1.0 + z / e.w_s)
        },
        n,
    ))
}

/// Planar droplet map `f(z) = r z - kappa/(z - q) - kappa/q` for a point
/// charge `Q` at `a` in the Ginibre disk.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlanarMap {
    pub r: f64,
    pub q: f64,
    pub kappa: f64,
    pub a_pl: f64,
    #[serde(rename = "Q_pl")]
    pub q_pl: f64,
}

pub fn planar_sextic(q_charge: f64, a: f64) -> [f64; 7] {
    let a2 = a * a;
    [
        1.0 / (2.0 * a2 * a2),
        0.0,
        0.0,
        0.0,
        -(a2 + 4.0 * q_charge + 2.0) / (2.0 * a2),
        0.0,
        1.0,
    ]
}

pub fn planar_map(q_charge: f64, a_pl: f64) -> Result<PlanarMap> {
    let edge = (1.0 + q_charge).sqrt() - q_charge.sqrt();
    if !(q_charge > 0.0) || a_pl.abs() <= edge {
        return domain(format!(
            "planar charge Q = {q_charge} at a = {a_pl} is post-critical (|a| <= {edge})"
        ));
    }
    let a = a_pl.abs();
    let a2 = a * a;
    // cubic in s = q^2
    let cubic = [1.0 / (2.0 * a2 * a2), 0.0, -(a2 + 4.0 * q_charge + 2.0) / (2.0 * a2), 1.0];
    let mut best = None;
    for s in poly::real_roots(&cubic)? {
        if !(s > 0.0) {
            continue;
        }
        let q = s.sqrt();
        let kappa = (1.0 - s) * (1.0 - a2 * s) / (2.0 * a * q);
        if q < 1.0 && kappa > 0.0 {
            best = Some((q, kappa));
        }
    }
    let (q, kappa) = best.ok_or_else(|| Error::NoRoot("no sextic root with 0 < q < 1, kappa > 0".into()))?;
    Ok(PlanarMap {
        r: (1.0 + a2 * s_of(q)) / (2.0 * a * q),
        q,
        kappa,
        a_pl: a,
        q_pl: q_charge,
    })
}

fn s_of(q: f64) -> f64 {
    q * q
}

/// Ascending coefficients of the planar cubic in the rescaled `alpha`.
pub fn planar_cubic(q_charge: f64, w: f64) -> [f64; 4] {
    [
        2.0,
        -3.0 * w,
        -1.0 - 2.0 * q_charge + w * w,
        (1.0 + q_charge) * w,
    ]
}

/// Root of the planar cubic continuing the large-`w` branch `alpha ~ 1/w`.
pub fn planar_alpha(q_charge: f64, w: f64) -> Result<f64> {
    let roots = poly::real_roots(&planar_cubic(q_charge, w))?;
    roots
        .into_iter()
        .filter(|&x| x > 0.0 && w * x < 2.0)
        .filter(|&x| {
            let r2 = 1.0 / (w * x * (2.0 - w * x));
            r2.sqrt() * x < 1.0
        })
        .min_by(|x, y| x.total_cmp(y))
        .ok_or_else(|| Error::NoRoot(format!("planar cubic at Q = {q_charge}, w = {w}")))
}

/// `(q, r, kappa)` identified from the planar cubic root.
pub fn planar_from_cubic(q_charge: f64, w: f64) -> Result<PlanarMap> {
    let alpha = planar_alpha(q_charge, w)?;
    let r2 = 1.0 / (w * alpha * (2.0 - w * alpha));
    let r = r2.sqrt();
    Ok(PlanarMap {
        r,
        q: r * alpha,
        kappa: r * alpha * alpha * (1.0 + q_charge - r2),
        a_pl: w,
        q_pl: q_charge,
    })
}

impl PlanarMap {
    /// Defects of the relations for `r` and `kappa` and the sextic residual.
    pub fn defects(&self) -> [f64; 3] {
        let (a, q) = (self.a_pl, self.q);
        let aq = a * q;
        [
            self.r - (1.0 + aq * aq) / (2.0 * aq),
            self.kappa - (1.0 - q * q) * (1.0 - aq * aq) / (2.0 * aq),
            poly::eval(&planar_sextic(self.q_pl, a), q),
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalingRow {
    pub eps: f64,
    /// `eps * alpha_sphere`.
    pub alpha: f64,
    /// `beta_sphere / eps`.
    pub beta: f64,
    /// `(R_sphere / eps)^2`.
    pub r2: f64,
    pub err_alpha: f64,
    pub err_r2: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingReport {
    pub alpha_limit: f64,
    pub r2_limit: f64,
    pub rows: Vec<ScalingRow>,
    /// Observed convergence orders between successive `eps`.
    pub orders: Vec<f64>,
}

/// Rescaled sphere parameters with `Q0 = 1/eps^2`, `w -> eps w` against the
/// planar cubic.
pub fn scaling_limit_check(q_charge: f64, w: f64, eps_seq: &[f64]) -> Result<ScalingReport> {
    let alpha_limit = planar_alpha(q_charge, w)?;
    let r2_limit = 1.0 / (w * alpha_limit * (2.0 - w * alpha_limit));
    let mut rows = Vec::with_capacity(eps_seq.len());
    for &eps in eps_seq {
        let cfg = ChargeConfig::new(1.0 / (eps * eps), q_charge, eps * w)?;
        let map = build_map(&cfg)?;
        let alpha = eps * map.alpha;
        let r2 = (map.r / eps).powi(2);
        rows.push(ScalingRow {
            eps,
            alpha,
            beta: map.beta / eps,
            r2,
            err_alpha: (alpha - alpha_limit).abs(),
            err_r2: (r2 - r2_limit).abs(),
        });
    }
    let orders = rows
        .windows(2)
        .map(|p| (p[0].err_alpha / p[1].err_alpha).ln() / (p[0].eps / p[1].eps).ln())
        .collect();
    Ok(ScalingReport {
        alpha_limit,
        r2_limit,
        rows,
        orders,
    })
}

/// Root structure of the `alpha` quartic.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RootCensus {
    pub roots: Vec<Complex64>,
    pub max_imag: f64,
    pub all_real: bool,
    pub distinct: bool,
    pub n_positive: usize,
    pub n_negative: usize,
    pub min_gap: f64,
    pub discriminant: f64,
    /// Ascending coefficients of `h` in `Disc = C (1 + w^2)^3 h(w^2)`, scaled to
    /// unit leading coefficient.
    pub h: [f64; 4],
    /// Relative mismatch of the cubic fit at check points.
    pub h_fit_residual: f64,
    /// Zero for equal charges, where `h` is a perfect cube.
    pub h_discriminant: f64,
    pub h_has_positive_root: bool,
}

pub fn quartic_root_census(cfg: &ChargeConfig) -> Result<RootCensus> {
    let (q0, q1, w) = (cfg.q0, cfg.q1, cfg.w);
    let c = quartic_coefficients(q0, q1, w);
    let mut roots = poly::roots(&c)?;
    roots.sort_by(|x, y| x.re.total_cmp(&y.re));
    let max_imag = roots.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
    let all_real = roots
        .iter()
        .all(|z| z.im.abs() < 1e-10 * (1.0 + z.re.abs()));
    let min_gap = roots
        .windows(2)
        .map(|p| (p[1] - p[0]).norm())
        .fold(f64::INFINITY, f64::min);
    let scale = roots.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let n_positive = roots.iter().filter(|z| z.re > 0.0).count();
    let (h, h_fit_residual) = fit_h(q0, q1)?;
    let hd = poly::cubic_discriminant(&h);
    Ok(RootCensus {
        max_imag,
        all_real,
        distinct: min_gap > 1e-8 * scale.max(1.0),
        n_positive,
        n_negative: roots.len() - n_positive,
        min_gap,
        discriminant: poly::quartic_discriminant(&c),
        h,
        h_fit_residual,
        h_discriminant: hd,
        h_has_positive_root: poly::real_roots(&h)?.iter().any(|&x| x > 0.0),
        roots,
    })
}

fn fit_h(q0: f64, q1: f64) -> Result<([f64; 4], f64)> {
    let h_at = |x: f64| {
        let c = quartic_coefficients(q0, q1, x.sqrt());
        poly::quartic_discriminant(&c) / (1.0 + x).powi(3)
    };
    let xs: [f64; 4] = [0.5, 1.0, 1.5, 2.0];
    let m = Matrix4::from_fn(|i, j| xs[i].powi(j as i32));
    let rhs = Vector4::from_fn(|i, _| h_at(xs[i]));
    let sol = m
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::Singular("Vandermonde fit for h".into()))?;
    let lead = sol[3];
    if lead == 0.0 {
        return Err(Error::Singular("h has vanishing cubic coefficient".into()));
    }
    let h = [sol[0] / lead, sol[1] / lead, sol[2] / lead, 1.0];
    let mut resid: f64 = 0.0;
    for x in [0.25, 0.75, 3.0] {
        let fitted = poly::eval(&[sol[0], sol[1], sol[2], sol[3]], x);
        let exact = h_at(x);
        resid = resid.max((fitted - exact).abs() / exact.abs().max(1e-300));
    }
    Ok((h, resid))
}

//! Sphere/plane coordinates, spherical caps and phase classification.
//!
//! The sphere has radius `1/2` and is projected stereographically from the
//! south pole, `z = e^{i phi} tan(theta / 2)`. The charge `Q0 N` sits at the
//! south pole (the point at infinity of the plane) and the charge `Q1 N` at
//! the positive real point `w`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

/// Relative half-width of the band around `w_cri` reported as [`PhaseTag::Critical`].
pub const CRITICAL_BAND: f64 = 1e-10;

/// Two external charges `Q0 N` (south pole) and `Q1 N` (at `w > 0`).
///
/// Inputs with `Q0 < Q1` are swapped on construction so that the larger
/// charge always sits at the south pole; rotating the sphere maps one
/// placement onto the other with the same `w`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChargeConfig {
    pub q0: f64,
    pub q1: f64,
    pub w: f64,
    /// Set when the constructor exchanged the two charges.
    #[serde(default)]
    pub swapped: bool,
}

impl ChargeConfig {
    pub fn new(q0: f64, q1: f64, w: f64) -> Result<Self> {
        for (name, v) in [("Q0", q0), ("Q1", q1), ("w", w)] {
            if !(v.is_finite() && v > 0.0) {
                return domain(format!("{name} must be positive and finite, got {v}"));
            }
        }
        let swapped = q0 < q1;
        let (q0, q1) = if swapped { (q1, q0) } else { (q0, q1) };
        Ok(Self { q0, q1, w, swapped })
    }

    /// Total charge fraction `1 + Q0 + Q1` (the droplet density on the sphere is this over `pi`).
    pub fn total(&self) -> f64 {
        1.0 + self.q0 + self.q1
    }

    pub fn w_cri(&self) -> f64 {
        critical_w_unchecked(self.q0, self.q1)
    }

    pub fn phase(&self) -> Phase {
        classify_phase(self)
    }

    pub fn with_w(&self, w: f64) -> Result<Self> {
        Self::new(self.q0, self.q1, w)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PhaseTag {
    /// Caps disjoint: droplet is the sphere minus both caps.
    PostCritical,
    /// Caps overlap: droplet is described by the conformal map.
    PreCritical,
    /// Caps touch at a point, within [`CRITICAL_BAND`].
    Critical,
}

impl PhaseTag {
    pub fn name(self) -> &'static str {
        match self {
            PhaseTag::PostCritical => "post-critical",
            PhaseTag::PreCritical => "pre-critical",
            PhaseTag::Critical => "critical",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Phase {
    pub tag: PhaseTag,
    pub w_cri: f64,
}

/// A point of the sphere in Cayley-Klein form,
/// `u = cos(theta/2) e^{i phi/2}`, `v = -i sin(theta/2) e^{-i phi/2}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SphericalPoint {
    pub u: Complex64,
    pub v: Complex64,
}

impl SphericalPoint {
    pub fn from_angles(theta: f64, phi: f64) -> Self {
        let half = Complex64::from_polar(1.0, phi / 2.0);
        Self {
            u: half * (theta / 2.0).cos(),
            v: Complex64::new(0.0, -1.0) * half.conj() * (theta / 2.0).sin(),
        }
    }

    pub fn north_pole() -> Self {
        Self::from_angles(0.0, 0.0)
    }

    /// `(theta, phi)` with `theta` in `[0, pi]` and `phi` in `(-pi, pi]`.
    pub fn angles(&self) -> (f64, f64) {
        let theta = 2.0 * self.v.norm().atan2(self.u.norm());
        // u / |u| = e^{i phi/2}, i v / |v| = e^{-i phi/2}
        let phi = if self.u.norm() > self.v.norm() {
            2.0 * self.u.arg()
        } else {
            -2.0 * (Complex64::i() * self.v).arg()
        };
        (theta, wrap_angle(phi))
    }

    pub fn norm_sqr(&self) -> f64 {
        self.u.norm_sqr() + self.v.norm_sqr()
    }

    /// Chord length `|u' v - u v'|` on the sphere of radius 1/2.
    pub fn chord(&self, other: &Self) -> f64 {
        (other.u * self.v - self.u * other.v).norm()
    }
}

fn wrap_angle(phi: f64) -> f64 {
    let mut p = phi % (2.0 * PI);
    if p <= -PI {
        p += 2.0 * PI;
    } else if p > PI {
        p -= 2.0 * PI;
    }
    p
}

/// Stereographic image `z = e^{i phi} tan(theta/2)`.
pub fn project_to_plane(p: &SphericalPoint) -> Result<Complex64> {
    if p.u.norm() <= 1e-15 {
        return Err(Error::PointAtInfinity);
    }
    // i v / u = tan(theta/2) e^{-i phi}
    Ok((Complex64::i() * p.v / p.u).conj())
}

pub fn project_to_sphere(z: Complex64) -> SphericalPoint {
    SphericalPoint::from_angles(2.0 * z.norm().atan(), z.arg())
}

/// `w_s = w + sqrt(w^2 + 1)`: the image of the second charge when both
/// charges are rotated to symmetric positions `+w_s` and `-w_s`.
pub fn w_to_ws(w: f64) -> f64 {
    w + w.hypot(1.0)
}

/// Inverse of [`w_to_ws`]: `w = (w_s - 1/w_s) / 2`.
pub fn ws_to_w(ws: f64) -> f64 {
    0.5 * (ws - 1.0 / ws)
}

/// Boundary value of `w` between the post-critical (`w < w_cri`) and
/// pre-critical (`w > w_cri`) phases.
pub fn critical_w(q0: f64, q1: f64) -> Result<f64> {
    if !(q0 > 0.0 && q1 > 0.0 && q0.is_finite() && q1.is_finite()) {
        return domain(format!("charges must be positive, got Q0 = {q0}, Q1 = {q1}"));
    }
    Ok(critical_w_unchecked(q0, q1))
}

fn critical_w_unchecked(q0: f64, q1: f64) -> f64 {
    let s = 2.0 * q0 * q1 + q0 + q1 + 2.0 * (q0 * q1 * (1.0 + q0) * (1.0 + q1)).sqrt();
    s.powf(-0.5)
}

pub fn classify_phase(cfg: &ChargeConfig) -> Phase {
    let w_cri = cfg.w_cri();
    let tag = if (cfg.w - w_cri).abs() <= CRITICAL_BAND * w_cri.max(1.0) {
        PhaseTag::Critical
    } else if cfg.w > w_cri {
        PhaseTag::PreCritical
    } else {
        PhaseTag::PostCritical
    };
    Phase { tag, w_cri }
}

/// The two charge-free spherical caps, measured as angular radii on the sphere.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SphericalCaps {
    /// Angular radius of the cap about the south pole.
    pub psi0: f64,
    /// Angular radius of the cap about the image of `w`.
    pub psi1: f64,
    /// Angular distance between the two cap centres.
    pub separation: f64,
}

impl SphericalCaps {
    /// Caps of areas `pi Q_j / (Q0 + Q1 + 1)`; zero charges give degenerate caps.
    pub fn new(q0: f64, q1: f64, w: f64) -> Result<Self> {
        if !(q0 >= 0.0 && q1 >= 0.0 && w >= 0.0) || !(q0 + q1 + w).is_finite() {
            return domain(format!("caps need Q0, Q1, w >= 0, got ({q0}, {q1}, {w})"));
        }
        let total = 1.0 + q0 + q1;
        // a cap of angular radius psi on the sphere of radius 1/2 has area pi sin^2(psi/2)
        let radius = |q: f64| 2.0 * (q / total).sqrt().asin();
        Ok(Self {
            psi0: radius(q0),
            psi1: radius(q1),
            separation: PI - 2.0 * w.atan(),
        })
    }

    /// Whether the caps share a region of positive area.
    pub fn overlap(&self) -> bool {
        self.psi0 > 0.0 && self.psi1 > 0.0 && self.separation < self.psi0 + self.psi1
    }

    /// Stereographic radius of the boundary of the south-pole cap, `sqrt((Q1 + 1) / Q0)`.
    pub fn south_cap_plane_radius(&self) -> f64 {
        ((PI - self.psi0) / 2.0).tan()
    }
}

pub fn cap_overlap(cfg: &ChargeConfig) -> bool {
    SphericalCaps::new(cfg.q0, cfg.q1, cfg.w)
        .map(|c| c.overlap())
        .unwrap_or(false)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn projection_examples() {
        let z = project_to_plane(&SphericalPoint::north_pole()).unwrap();
        assert!(z.norm() < 1e-15);
        let z = project_to_plane(&SphericalPoint::from_angles(PI / 2.0, 0.0)).unwrap();
        assert!((z - 1.0).norm() < 1e-15);
        let theta_w = 2.0 * 2f64.atan();
        let z = project_to_plane(&SphericalPoint::from_angles(theta_w, 0.0)).unwrap();
        assert!((z - 2.0).norm() < 1e-14);
    }

    #[test]
    fn south_pole_is_at_infinity() {
        let p = SphericalPoint {
            u: Complex64::new(0.0, 0.0),
            v: Complex64::new(0.0, -1.0),
        };
        assert_eq!(project_to_plane(&p), Err(Error::PointAtInfinity));
    }

    #[test]
    fn ws_examples() {
        assert!((w_to_ws(2.0) - (2.0 + 5f64.sqrt())).abs() < 1e-15);
        assert!((w_to_ws(0.75) - 2.0).abs() < 1e-15);
        assert!((w_to_ws(1e-12) - 1.0).abs() < 1e-11);
        for w in [0.01, 0.3, 1.0, 7.0, 80.0] {
            assert!((ws_to_w(w_to_ws(w)) - w).abs() < 1e-14 * w.max(1.0));
        }
    }

    #[test]
    fn critical_values() {
        let equal = critical_w(4.0, 4.0).unwrap();
        assert!((equal - 0.1118).abs() < 5e-4);
        assert!((equal - 1.0 / (16.0f64 * 5.0).sqrt()).abs() < 1e-15);
        assert!((critical_w(4.0, 2.0).unwrap() - 0.1509).abs() < 5e-4);
        assert!(critical_w(0.0, 1.0).is_err());
        assert!(critical_w(1.0, -2.0).is_err());
    }

    #[test]
    fn classify_examples() {
        let p = |q0, q1, w| ChargeConfig::new(q0, q1, w).unwrap().phase().tag;
        assert_eq!(p(4.0, 4.0, 0.3), PhaseTag::PreCritical);
        assert_eq!(p(4.0, 2.0, 0.05), PhaseTag::PostCritical);
        assert_eq!(p(4.0, 4.0, 80.0), PhaseTag::PreCritical);
        let w_cri = critical_w(4.0, 2.0).unwrap();
        assert_eq!(p(4.0, 2.0, w_cri), PhaseTag::Critical);
    }

    #[test]
    fn smaller_charge_is_moved_off_the_south_pole() {
        let c = ChargeConfig::new(1.0, 3.0, 0.5).unwrap();
        assert_eq!((c.q0, c.q1, c.swapped), (3.0, 1.0, true));
        assert!(ChargeConfig::new(1.0, 1.0, 0.0).is_err());
        assert!(ChargeConfig::new(f64::NAN, 1.0, 1.0).is_err());
    }

    #[test]
    fn cap_examples() {
        // degenerate cap never overlaps
        assert!(!SphericalCaps::new(3.0, 0.0, 50.0).unwrap().overlap());
        let w_cri = critical_w(4.0, 2.0).unwrap();
        let cfg = |w| ChargeConfig::new(4.0, 2.0, w).unwrap();
        assert!(cap_overlap(&cfg(w_cri * (1.0 + 1e-6))));
        assert!(!cap_overlap(&cfg(w_cri * (1.0 - 1e-6))));
        // boundary of the south cap sits at r^2 = (Q1 + 1) / Q0
        let caps = SphericalCaps::new(4.0, 2.0, 1.0).unwrap();
        assert!((caps.south_cap_plane_radius().powi(2) - 3.0 / 4.0).abs() < 1e-14);
    }
}

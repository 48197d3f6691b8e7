//! Brute-force ground truth: Metropolis sampling of the gas, and small-N
//! evaluation of both sides of the duality between the sphere and the Jacobi
//! ensemble.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::conformal::Droplet;
use crate::error::{domain, Error, Result};
use crate::geometry::ChargeConfig;
use crate::jue::{jue_average, jue_gap_quadrature, selberg_ln};
use crate::quad::integrate;

const TARGET_ACCEPTANCE: f64 = 0.4;
const RESYNC_SWEEPS: usize = 1000;

/// One configuration of the gas in stereographic coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GasState {
    pub particles: Vec<Complex64>,
    /// Log of the Boltzmann weight with respect to plane Lebesgue measure.
    pub energy: f64,
    pub rng_seed: u64,
}

fn to_plane(p: &[f64; 3]) -> Complex64 {
    Complex64::new(p[0], p[1]) / (1.0 + p[2])
}

fn to_sphere(z: Complex64) -> [f64; 3] {
    let d = 1.0 + z.norm_sqr();
    [2.0 * z.re / d, 2.0 * z.im / d, (1.0 - z.norm_sqr()) / d]
}

/// Single-particle Metropolis sampler for
/// `prod |w - z_l|^{2r} (1 + |z_l|^2)^{-(K + r + N + 1)} prod |z_j - z_k|^2`
/// with `r = Q1 N`, `K = Q0 N`.
///
/// Moves perturb a point of the unit sphere by an isotropic Gaussian and
/// renormalise, which is a symmetric proposal with respect to area; the target
/// is therefore the plane weight times the area factor `(1 + |z|^2)^2`.
#[derive(Debug, Clone)]
pub struct Sampler {
    pub n: usize,
    pub r: f64,
    pub k: f64,
    pub w: f64,
    pub sigma: f64,
    pub seed: u64,
    points: Vec<[f64; 3]>,
    plane: Vec<Complex64>,
    energy: f64,
    rng: ChaCha8Rng,
    proposed: u64,
    accepted: u64,
}

impl Sampler {
    /// Charges may be zero here; [`ChargeConfig`] requires them positive.
    pub fn new(q0: f64, q1: f64, w: f64, n: usize, seed: u64) -> Result<Self> {
        if n < 10 {
            return domain(format!("sampler needs N >= 10, got {n}"));
        }
        if !(q0 >= 0.0 && q1 >= 0.0 && w.is_finite()) {
            return domain("charges must be nonnegative and w finite");
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let points: Vec<[f64; 3]> = (0..n)
            .map(|_| {
                // uniform on the northern hemisphere keeps clear of the south pole
                let z: f64 = rng.random_range(0.0..1.0);
                let phi: f64 = rng.random_range(0.0..2.0 * PI);
                let s = (1.0 - z * z).sqrt();
                [s * phi.cos(), s * phi.sin(), z]
            })
            .collect();
        let plane = points.iter().map(to_plane).collect();
        let mut s = Self {
            n,
            r: q1 * n as f64,
            k: q0 * n as f64,
            w,
            sigma: 0.5 / (n as f64).sqrt(),
            seed,
            points,
            plane,
            energy: 0.0,
            rng,
            proposed: 0,
            accepted: 0,
        };
        s.energy = s.recompute_energy();
        Ok(s)
    }

    pub fn from_config(cfg: &ChargeConfig, n: usize, seed: u64) -> Result<Self> {
        Self::new(cfg.q0, cfg.q1, cfg.w, n, seed)
    }

    fn exponent(&self) -> f64 {
        self.k + self.r + self.n as f64 + 1.0
    }

    fn one_body(&self, z: Complex64) -> f64 {
        let mut e = -self.exponent() * z.norm_sqr().ln_1p();
        if self.r != 0.0 {
            e += self.r * (Complex64::new(self.w, 0.0) - z).norm_sqr().ln();
        }
        e
    }

    pub fn recompute_energy(&self) -> f64 {
        let mut e: f64 = self.plane.iter().map(|&z| self.one_body(z)).sum();
        for j in 0..self.n {
            for k in j + 1..self.n {
                e += (self.plane[j] - self.plane[k]).norm_sqr().ln();
            }
        }
        e
    }

    /// Replace the running energy by a full recomputation.
    pub fn resync(&mut self) {
        self.energy = self.recompute_energy();
    }

    pub fn energy(&self) -> f64 {
        self.energy
    }

    pub fn acceptance_rate(&self) -> f64 {
        if self.proposed == 0 {
            return 0.0;
        }
        self.accepted as f64 / self.proposed as f64
    }

    pub fn reset_counters(&mut self) {
        self.proposed = 0;
        self.accepted = 0;
    }

    /// Change in the pair energy when particle `i` moves to `z`.
    fn pair_delta(&self, i: usize, z: Complex64) -> f64 {
        let old = self.plane[i];
        let mut total = 0.0;
        let mut prod = 1.0;
        for (k, &p) in self.plane.iter().enumerate() {
            if k == i {
                continue;
            }
            prod *= (z - p).norm_sqr() / (old - p).norm_sqr();
            if !(1e-100..=1e100).contains(&prod) {
                total += prod.ln();
                prod = 1.0;
            }
        }
        total + prod.ln()
    }

    /// Propose one move of particle `i`; returns whether it was accepted and
    /// the move's start and end points on the unit sphere.
    pub fn step(&mut self, i: usize) -> (bool, [f64; 3], [f64; 3]) {
        let p = self.points[i];
        let g: [f64; 3] = [
            self.rng.sample(StandardNormal),
            self.rng.sample(StandardNormal),
            self.rng.sample(StandardNormal),
        ];
        let mut q = [p[0] + self.sigma * g[0], p[1] + self.sigma * g[1], p[2] + self.sigma * g[2]];
        let norm = (q[0] * q[0] + q[1] * q[1] + q[2] * q[2]).sqrt();
        q.iter_mut().for_each(|c| *c /= norm);
        self.proposed += 1;
        let u: f64 = self.rng.random();
        if 1.0 + q[2] < 1e-12 {
            return (false, p, p);
        }
        let z = to_plane(&q);
        let old = self.plane[i];
        let d_one = self.one_body(z) - self.one_body(old);
        let d_e = d_one + self.pair_delta(i, z);
        let d_area = 2.0 * (z.norm_sqr().ln_1p() - old.norm_sqr().ln_1p());
        if (d_e + d_area).is_finite() && u.ln() < d_e + d_area {
            self.points[i] = q;
            self.plane[i] = z;
            self.energy += d_e;
            self.accepted += 1;
            (true, p, q)
        } else {
            (false, p, p)
        }
    }

    pub fn sweep(&mut self) {
        for i in 0..self.n {
            self.step(i);
        }
    }

    /// Burn in while adapting the proposal scale toward the target acceptance.
    pub fn tune(&mut self, sweeps: usize) {
        for _ in 0..sweeps {
            self.reset_counters();
            self.sweep();
            let a = self.acceptance_rate();
            self.sigma = (self.sigma * (a - TARGET_ACCEPTANCE).exp()).clamp(1e-4, 2.0);
        }
        self.reset_counters();
    }

    pub fn snapshot(&self) -> GasState {
        GasState {
            particles: self.plane.clone(),
            energy: self.energy,
            rng_seed: self.seed,
        }
    }
}

/// Run `sweeps` sweeps after a tuned burn-in of `sweeps / 10`, keeping one
/// snapshot every `N` sweeps.
pub fn metropolis_sample(
    cfg: &ChargeConfig,
    n: usize,
    sweeps: usize,
    seed: u64,
) -> Result<Vec<GasState>> {
    sample_with(cfg.q0, cfg.q1, cfg.w, n, sweeps, n, seed)
}

pub fn sample_with(
    q0: f64,
    q1: f64,
    w: f64,
    n: usize,
    sweeps: usize,
    thin: usize,
    seed: u64,
) -> Result<Vec<GasState>> {
    if sweeps == 0 || thin == 0 {
        return domain("sweep budget and thinning must be positive");
    }
    let mut s = Sampler::new(q0, q1, w, n, seed)?;
    s.tune((sweeps / 10).max(50));
    let mut out = Vec::with_capacity(sweeps / thin);
    for k in 1..=sweeps {
        s.sweep();
        if k % RESYNC_SWEEPS == 0 {
            s.resync();
        }
        if k % thin == 0 {
            out.push(s.snapshot());
        }
    }
    Ok(out)
}

/// Fraction of sampled particles lying outside the droplet.
pub fn fraction_outside(snaps: &[GasState], droplet: &Droplet) -> f64 {
    let (mut out, mut total) = (0usize, 0usize);
    for s in snaps {
        for &z in &s.particles {
            total += 1;
            if !droplet.contains(z) {
                out += 1;
            }
        }
    }
    out as f64 / total.max(1) as f64
}

/// Equal-area bin on the sphere of radius 1/2: a band of the height
/// coordinate times an arc of longitude.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SphereBin {
    pub z0: f64,
    pub z1: f64,
    pub phi0: f64,
    pub phi1: f64,
    pub count: usize,
    /// Particle density on the sphere of radius 1/2, normalised to unit total mass.
    pub density: f64,
}

/// Bin samples into `nz x nphi` equal-area cells on the sphere.
pub fn sphere_histogram(snaps: &[GasState], nz: usize, nphi: usize) -> Vec<SphereBin> {
    let mut counts = vec![0usize; nz * nphi];
    let mut total = 0usize;
    for s in snaps {
        for &z in &s.particles {
            let p = to_sphere(z);
            let iz = (((p[2] + 1.0) / 2.0 * nz as f64) as usize).min(nz - 1);
            let phi = p[1].atan2(p[0]).rem_euclid(2.0 * PI);
            let ip = ((phi / (2.0 * PI) * nphi as f64) as usize).min(nphi - 1);
            counts[iz * nphi + ip] += 1;
            total += 1;
        }
    }
    // the sphere of radius 1/2 has area pi
    let area = PI / (nz * nphi) as f64;
    (0..nz * nphi)
        .map(|b| {
            let (iz, ip) = (b / nphi, b % nphi);
            SphereBin {
                z0: -1.0 + 2.0 * iz as f64 / nz as f64,
                z1: -1.0 + 2.0 * (iz + 1) as f64 / nz as f64,
                phi0: 2.0 * PI * ip as f64 / nphi as f64,
                phi1: 2.0 * PI * (ip + 1) as f64 / nphi as f64,
                count: counts[b],
                density: counts[b] as f64 / (total.max(1) as f64 * area),
            }
        })
        .collect()
}

impl SphereBin {
    /// Whether a 5 x 5 grid of points of the cell, each widened by `margin`
    /// (chordal distance on the unit sphere), lies inside the droplet.
    pub fn inside(&self, droplet: &Droplet, margin: f64) -> bool {
        let curves = droplet.curves();
        let bdry: Vec<[f64; 3]> = curves
            .iter()
            .flat_map(|c| c.points.iter().map(|&z| to_sphere(z)))
            .collect();
        (0..5).all(|a| {
            (0..5).all(|b| {
                let h = self.z0 + (self.z1 - self.z0) * a as f64 / 4.0;
                let phi = self.phi0 + (self.phi1 - self.phi0) * b as f64 / 4.0;
                let s = (1.0 - h * h).max(0.0).sqrt();
                let p = [s * phi.cos(), s * phi.sin(), h];
                if 1.0 + h < 1e-12 || !droplet.contains(to_plane(&p)) {
                    return false;
                }
                bdry.iter().all(|q| {
                    let d2: f64 = (0..3).map(|i| (p[i] - q[i]).powi(2)).sum();
                    d2 > margin * margin
                })
            })
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Method {
    Quadrature,
    MonteCarlo,
}

/// Both sides of a duality check, as logarithms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DualityReport {
    pub lhs: f64,
    pub rhs: f64,
    /// `|exp(lhs - rhs) - 1|`.
    pub rel_err: f64,
    pub method: Method,
    pub error_estimate: f64,
}

impl DualityReport {
    fn new(lhs: f64, rhs: f64, error_estimate: f64) -> Self {
        Self {
            lhs,
            rhs,
            rel_err: (lhs - rhs).exp_m1().abs(),
            method: Method::Quadrature,
            error_estimate,
        }
    }
}

fn check_sizes(n: usize, r: usize, k: usize) -> Result<()> {
    if n == 0 || n > 3 || r > 3 {
        return Err(Error::Unsupported(format!(
            "direct duality check needs 1 <= N <= 3 and r <= 3, got N = {n}, r = {r}"
        )));
    }
    if k < r {
        return domain(format!("K - r must exceed -1, got K = {k}, r = {r}"));
    }
    Ok(())
}

/// Moment matrix `int z^j conj(z)^k f(z) (1 + |z|^2)^{-m} d^2 z` for
/// `f(z) = |w - z|^{2r}` with real `w`, and the accumulated error estimate.
fn moment_matrix(n: usize, r: usize, m: f64, w: f64, tol: f64) -> Result<(DMatrix<f64>, f64)> {
    // the angular integrand is a trigonometric polynomial of degree < n + r
    let nt = 2 * (n + r) + 2;
    let mut mat = DMatrix::zeros(n, n);
    let mut err = 0.0;
    for j in 0..n {
        for k in 0..n {
            if (j + k) % 2 == 1 && w == 0.0 {
                continue;
            }
            let d = j as f64 - k as f64;
            let angular = |rho: f64| -> f64 {
                (0..nt)
                    .map(|t| {
                        let th = 2.0 * PI * t as f64 / nt as f64;
                        (d * th).cos() * (w * w + rho * rho - 2.0 * w * rho * th.cos()).powi(r as i32)
                    })
                    .sum::<f64>()
                    * 2.0
                    * PI
                    / nt as f64
            };
            // rho^2 = x / (1 - x)
            let est = integrate(
                |x| {
                    if x >= 1.0 {
                        return 0.0;
                    }
                    let rho = (x / (1.0 - x)).sqrt();
                    0.5 * rho.powi((j + k) as i32) * (1.0 - x).powf(m - 2.0) * angular(rho)
                },
                &[0.0, 0.5, 1.0],
                0.0,
                tol,
            )?;
            mat[(j, k)] = est.value;
            err += est.error / est.value.abs().max(f64::MIN_POSITIVE);
        }
    }
    Ok((mat, err))
}

fn ln_det(m: DMatrix<f64>) -> Result<f64> {
    let d = m.lu().determinant();
    if !(d > 0.0) {
        return Err(Error::Singular(format!("moment determinant {d}")));
    }
    Ok(d.ln())
}

/// `ln <prod |w - z_l|^{2r}>` over the eigenvalues of `SrUE_{N,K+r}`, with
/// the `2N`-dimensional integral reduced to moment determinants.
pub fn sphere_average(n: usize, r: usize, k: usize, w: f64, tol: f64) -> Result<(f64, f64)> {
    let m = (k + r + n + 1) as f64;
    let (num, e1) = moment_matrix(n, r, m, w, tol)?;
    let (den, e2) = moment_matrix(n, 0, m, w, tol)?;
    Ok((ln_det(num)? - ln_det(den)?, e1 + e2))
}

/// `ln <prod (w^2 + t_l)^N>` over `JUE_{r,(0,K-r)}`.
pub fn jacobi_average(n: usize, r: usize, k: usize, w: f64) -> Result<f64> {
    let avg = jue_average(r, 0.0, (k - r) as f64, |t| {
        t.iter().map(|&x| (w * w + x).powi(n as i32)).product()
    })?;
    Ok(avg.ln())
}

/// Sphere side against Jacobi side of the duality for small sizes.
pub fn duality_check_small_n(n: usize, r: usize, k: usize, w: f64) -> Result<DualityReport> {
    duality_check_with(n, r, k, w, 1e-13)
}

pub fn duality_check_with(n: usize, r: usize, k: usize, w: f64, tol: f64) -> Result<DualityReport> {
    check_sizes(n, r, k)?;
    if r == 0 {
        return Ok(DualityReport::new(0.0, 0.0, 0.0));
    }
    let (lhs, err) = sphere_average(n, r, k, w, tol)?;
    let rhs = jacobi_average(n, r, k, w)?;
    Ok(DualityReport::new(lhs, rhs, err))
}

/// `ln (J_{r,(K-r,N)} / J_{r,(0,K-r)})`, the constant in front of the gap
/// probability after the change of variables `t -> (1 + w^2)(1 - t)`.
pub fn chain_constant_ln(n: usize, r: usize, k: usize) -> Result<f64> {
    let (a, b) = ((k - r) as f64, n as f64);
    Ok(selberg_ln(r, a, b)? - selberg_ln(r, 0.0, a)?)
}

/// `ln` of the plane normalisation `int prod (1 + |z_l|^2)^{-(K + N + 1)} |Delta|^2 d^2 z`.
pub fn sphere_partition_ln(n: usize, k: usize) -> f64 {
    use statrs::function::gamma::ln_gamma;
    let (nf, kf) = (n as f64, k as f64);
    ln_gamma(nf + 1.0)
        + nf * PI.ln()
        + (0..n)
            .map(|j| {
                let j = j as f64;
                ln_gamma(j + 1.0) + ln_gamma(kf + nf - j) - ln_gamma(kf + nf + 1.0)
            })
            .sum::<f64>()
}

/// `ln` of the constant `C` with
/// `Q_N(Q0, Q1, w) / Q_N(Q0, 0) = C E(0, (1/(1 + w^2), 1); JUE_{r,(K-r,N)})`.
pub fn rewrite_constant_ln(n: usize, r: usize, k: usize) -> Result<f64> {
    Ok(sphere_partition_ln(n, k + r) - sphere_partition_ln(n, k) + chain_constant_ln(n, r, k)?)
}

/// Jacobi side of the duality against its rewrite as a prefactor times a gap
/// probability of `JUE_{r,(K-r,N)}`.
pub fn gap_rewrite_check(n: usize, r: usize, k: usize, w: f64) -> Result<DualityReport> {
    check_sizes(n, r, k)?;
    if r == 0 {
        return Ok(DualityReport::new(0.0, 0.0, 0.0));
    }
    let lhs = jacobi_average(n, r, k, w)?;
    let s = 1.0 / (1.0 + w * w);
    let e = jue_gap_quadrature(r, (k - r) as f64, n as f64, s)?;
    let rhs = (r * (n + k)) as f64 * (1.0 + w * w).ln() + chain_constant_ln(n, r, k)? + e.ln();
    Ok(DualityReport::new(lhs, rhs, 0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conformal::droplet;
    use statrs::distribution::{ChiSquared, ContinuousCDF};

    #[test]
    fn energy_bookkeeping() {
        let mut s = Sampler::new(2.0, 1.0, 0.5, 20, 3).unwrap();
        s.tune(100);
        let mut acc = 0;
        while acc < 10_000 {
            for i in 0..s.n {
                if s.step(i).0 {
                    acc += 1;
                }
            }
        }
        let fresh = s.recompute_energy();
        assert!((fresh - s.energy()).abs() < 1e-8 * fresh.abs().max(1.0));
    }

    #[test]
    fn seeded_runs_repeat() {
        let cfg = ChargeConfig::new(1.0, 1.0, 0.5).unwrap();
        let a = metropolis_sample(&cfg, 12, 60, 9).unwrap();
        let b = metropolis_sample(&cfg, 12, 60, 9).unwrap();
        let c = metropolis_sample(&cfg, 12, 60, 10).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert!(metropolis_sample(&cfg, 12, 0, 9).is_err());
        assert!(metropolis_sample(&cfg, 5, 10, 9).is_err());
    }

    #[test]
    fn tuned_acceptance() {
        let mut s = Sampler::new(4.0, 4.0, 1.0, 50, 1).unwrap();
        s.tune(300);
        for _ in 0..100 {
            s.sweep();
        }
        let a = s.acceptance_rate();
        assert!((0.2..=0.6).contains(&a), "{a}");
    }

    #[test]
    fn pure_spherical_ensemble_is_uniform() {
        let snaps = sample_with(0.0, 0.0, 0.0, 30, 20_000, 30, 5).unwrap();
        let bins = sphere_histogram(&snaps, 4, 4);
        let total: usize = bins.iter().map(|b| b.count).sum();
        let expect = total as f64 / bins.len() as f64;
        let chi2: f64 = bins.iter().map(|b| (b.count as f64 - expect).powi(2) / expect).sum();
        // particles within a snapshot are counted as independent, which only
        // overstates the variance of a repulsive gas
        let p = 1.0 - ChiSquared::new((bins.len() - 1) as f64).unwrap().cdf(chi2);
        assert!(p > 0.01, "chi2 = {chi2}, p = {p}");
    }

    #[test]
    fn moves_are_reversible_between_bands() {
        let mut s = Sampler::new(1.0, 1.0, 1.0, 10, 21).unwrap();
        s.tune(200);
        let band = |p: [f64; 3]| (((p[2] + 1.0) * 1.5) as usize).min(2);
        let mut flux = [[0u64; 3]; 3];
        for _ in 0..100_000 {
            for i in 0..s.n {
                let (ok, a, b) = s.step(i);
                if ok {
                    flux[band(a)][band(b)] += 1;
                }
            }
        }
        for a in 0..3 {
            for b in a + 1..3 {
                let (f, g) = (flux[a][b] as f64, flux[b][a] as f64);
                assert!((f - g).abs() < 4.0 * (f + g).sqrt().max(1.0), "{a}->{b}: {f} vs {g}");
            }
        }
    }

    #[test]
    fn caps_are_empty_post_critical() {
        let cfg = ChargeConfig::new(1.0, 1.0, 0.2).unwrap();
        let d = droplet(&cfg, 512).unwrap();
        // the spill-over past the edge is a boundary layer of relative width N^{-1/2}
        let small = fraction_outside(&sample_with(1.0, 1.0, 0.2, 30, 3000, 10, 8).unwrap(), &d);
        let large = fraction_outside(&sample_with(1.0, 1.0, 0.2, 120, 1500, 10, 8).unwrap(), &d);
        assert!(large < 0.07 && large < 0.7 * small, "{small} {large}");
    }

    #[test]
    fn duality_trivial_and_one_dimensional() {
        let r = duality_check_small_n(2, 0, 3, 0.7).unwrap();
        assert_eq!((r.lhs, r.rhs), (0.0, 0.0));
        let r = duality_check_small_n(1, 1, 2, 0.0).unwrap();
        assert!(r.rel_err < 1e-8, "{r:?}");
        // N = 1, r = 1 at w = 0: <|z|^2> over (1 + |z|^2)^{-5} against <t> over JUE_{1,(0,1)}
        assert!((r.rhs - (1.0f64 / 3.0).ln()).abs() < 1e-13);
    }

    #[test]
    fn duality_holds_and_refines() {
        let r = duality_check_small_n(2, 2, 3, 0.7).unwrap();
        assert!(r.rel_err < 1e-8, "{r:?}");
        let coarse = duality_check_with(2, 2, 3, 0.7, 1e-4).unwrap();
        assert!(coarse.rel_err >= r.rel_err);
        assert!(matches!(duality_check_small_n(4, 1, 2, 0.5), Err(Error::Unsupported(_))));
        assert!(duality_check_small_n(2, 2, 1, 0.5).is_err());
    }

    #[test]
    fn rewrite_chain() {
        let r = gap_rewrite_check(2, 1, 2, 1.0).unwrap();
        assert!(r.rel_err < 1e-10, "{r:?}");
        // large w: gap probability tends to one
        let e = jue_gap_quadrature(1, 1.0, 2.0, 1.0 / (1.0 + 1e6)).unwrap();
        assert!(e < 1e-10);
        let e = jue_gap_quadrature(1, 1.0, 2.0, 1.0 / (1.0 + 1e-6)).unwrap();
        assert!((e - 1.0).abs() < 1e-10);
    }

    #[test]
    fn partition_ratio_constant() {
        let (n, r, k, w) = (2, 1, 2, 0.8);
        // Q_N ratio from the sphere side, using moment determinants for both normalisations
        let (avg, _) = sphere_average(n, r, k, w, 1e-13).unwrap();
        let z_num = ln_det(moment_matrix(n, 0, (k + r + n + 1) as f64, w, 1e-13).unwrap().0).unwrap();
        let z_den = ln_det(moment_matrix(n, 0, (k + n + 1) as f64, w, 1e-13).unwrap().0).unwrap();
        let ratio = -((r * (k + n)) as f64) * (1.0 + w * w).ln() + avg + z_num - z_den;
        let e = jue_gap_quadrature(r, (k - r) as f64, n as f64, 1.0 / (1.0 + w * w)).unwrap();
        let c = rewrite_constant_ln(n, r, k).unwrap();
        // N! from the determinant form is shared by numerator and denominator
        assert!((ratio - (c + e.ln())).abs() < 1e-9, "{ratio} vs {}", c + e.ln());
        assert!((sphere_partition_ln(n, k) - z_den - 2f64.ln()).abs() < 1e-10);
    }

    #[test]
    fn selberg_two_by_two() {
        // J_{2,(0,1)} by direct two-dimensional quadrature
        let v = integrate(
            |x| {
                integrate(|y| (1.0 - x) * (1.0 - y) * (x - y).powi(2), &[0.0, 1.0], 1e-15, 1e-14)
                    .unwrap()
                    .value
            },
            &[0.0, 1.0],
            1e-15,
            1e-14,
        )
        .unwrap()
        .value;
        assert!((v - selberg_ln(2, 0.0, 1.0).unwrap().exp()).abs() < 1e-13);
    }
}

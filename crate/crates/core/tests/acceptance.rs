//! Acceptance checks, one line per criterion.
//!
//! Failing criteria are reported but do not abort the run; the exit status is
//! nonzero only if a check could not be evaluated at all and
//! `ACCEPTANCE_STRICT` is set.

use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sphere_coulomb::conformal::{
    build_map, droplet, planar_from_cubic, scaling_limit_check, solve_alpha, BoundaryCurve,
    Droplet, HAUSDORFF_RESOLUTION,
};
use sphere_coulomb::energy::{
    breakdown, critical_limits_equal, energy_quadrature_oracle, k_post, k_pre_critical_limit,
};
use sphere_coulomb::Result;
use sphere_coulomb::geometry::{critical_w, ChargeConfig};
use sphere_coulomb::jue::{
    airy_fredholm_gap, constrained_density, energy_identity_check, fit_rate_exponent, painleve_gap,
    wachter, HastingsMcLeod,
};
use sphere_coulomb::oracle::{
    duality_check_small_n, fraction_outside, gap_rewrite_check, metropolis_sample,
    sphere_histogram,
};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Result<Outcome> {
    Ok(Outcome { pass, detail })
}

fn c1() -> Result<Outcome> {
    let a = critical_w(4.0, 4.0)?;
    let b = critical_w(4.0, 2.0)?;
    outcome(
        (a - 0.1118).abs() <= 0.005 && (b - 0.1509).abs() <= 0.005,
        format!("w_cri(4,4) = {a:.5}, w_cri(4,2) = {b:.5}"),
    )
}

fn c2() -> Result<Outcome> {
    let s = wachter(4.0, 2.0)?;
    let l = constrained_density(&s, 0.75)?.l;
    let edges = (s.c - 0.274).abs() <= 0.001 && (s.d - 0.914).abs() <= 0.001;
    let edge_l = (l - 0.247).abs() <= 0.001;
    outcome(
        edges && edge_l,
        format!(
            "cJ = {:.6}, dJ = {:.6} ({}), L(0.75) = {l:.6} vs 0.247 ({})",
            s.c,
            s.d,
            ok(edges),
            ok(edge_l)
        ),
    )
}

fn c3() -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let q: f64 = rng.random_range(0.1..10.0);
        let wc = critical_w(q, q)?;
        let w = wc * (1.0 + rng.random_range(0.01..50.0));
        let cfg = ChargeConfig::new(q, q, w)?;
        worst = worst.max((solve_alpha(&cfg)? - (-w + w.hypot(1.0))).abs());
    }
    outcome(worst < 1e-12, format!("max |alpha - explicit| = {worst:.2e} over 100 pairs"))
}

fn c4() -> Result<Outcome> {
    let cfg = ChargeConfig::new(4.0, 4.0, 80.0)?;
    let d = droplet(&cfg, HAUSDORFF_RESOLUTION)?;
    let Droplet::PreCritical { boundary, .. } = &d else {
        return outcome(false, "droplet at w = 80 is not pre-critical".into());
    };
    let circle = BoundaryCurve::circle(Complex64::new(0.0, 0.0), 1.0 / 8f64.sqrt(), HAUSDORFF_RESOLUTION);
    let h = boundary.hausdorff(&circle);
    outcome(h < 0.02, format!("Hausdorff distance to |z| = 1/sqrt(8): {h:.3e}"))
}

fn c5() -> Result<Outcome> {
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for q0 in [1.0, 2.0, 4.0] {
        for q1 in [0.5, 1.0, 3.0] {
            for f in [1.5, 3.0, 10.0] {
                let cfg = ChargeConfig::new(q0, q1, critical_w(q0, q1)? * f)?;
                let map = build_map(&cfg)?;
                let closed = breakdown(&map)?;
                let quad = energy_quadrature_oracle(&cfg, &map)?;
                for (a, b) in [
                    (closed.i_log, quad.i_log),
                    (closed.w_zeta1, quad.w_zeta1),
                    (closed.w_w, quad.w_w),
                ] {
                    worst = worst.max((a - b).abs() / a.abs());
                }
                count += 1;
            }
        }
    }
    outcome(
        worst < 1e-5,
        format!("max relative gap over {count} configurations: {worst:.2e}"),
    )
}

fn c6() -> Result<Outcome> {
    let mut extrap: f64 = 0.0;
    let mut printed: f64 = 0.0;
    let mut assembled: f64 = 0.0;
    for q in [1.0, 2.0, 4.0] {
        let post = -k_post(q, q) / 4.0;
        extrap = extrap.max((-k_pre_critical_limit(q, q)? / 4.0 - post).abs());
        let lim = critical_limits_equal(q)?;
        printed = printed.max((-lim.k_quoted / 4.0 - post).abs());
        assembled = assembled.max((-lim.k_assembled / 4.0 - post).abs());
    }
    outcome(
        extrap < 1e-6 && printed < 1e-12,
        format!(
            "extrapolated {extrap:.2e} ({}); printed closed form {printed:.2e} ({}); \
             closed form with corrected sign {assembled:.2e}",
            ok(extrap < 1e-6),
            ok(printed < 1e-12)
        ),
    )
}

fn c7() -> Result<Outcome> {
    let wc = critical_w(4.0, 2.0)?;
    let mut worst: f64 = 0.0;
    for j in 1..=50 {
        let w = wc * (10.0 / wc).powf(j as f64 / 51.0);
        worst = worst.max(energy_identity_check(&ChargeConfig::new(4.0, 2.0, w)?)?.residual);
    }
    outcome(worst < 1e-6, format!("max relative residual over 50 w: {worst:.2e}"))
}

fn c8() -> Result<Outcome> {
    let (mut dual, mut chain): (f64, f64) = (0.0, 0.0);
    for (n, r, k) in [(1, 1, 2), (2, 1, 2), (2, 2, 3)] {
        for w in [0.3, 0.7, 1.5] {
            dual = dual.max(duality_check_small_n(n, r, k, w)?.rel_err);
            chain = chain.max(gap_rewrite_check(n, r, k, w)?.rel_err);
        }
    }
    outcome(
        dual < 1e-4 && chain < 1e-8,
        format!("duality max rel err {dual:.2e}; gap rewrite chain {chain:.2e}"),
    )
}

fn c9() -> Result<Outcome> {
    let cfg = ChargeConfig::new(4.0, 4.0, 1.0)?;
    let d = droplet(&cfg, HAUSDORFF_RESOLUTION)?;
    let snaps = metropolis_sample(&cfg, 200, 1_000_000, 2024)?;
    let out = fraction_outside(&snaps, &d);
    let expected = cfg.total() / std::f64::consts::PI;
    let bins = sphere_histogram(&snaps, 24, 24);
    let interior: Vec<f64> = bins
        .iter()
        .filter(|b| b.inside(&d, 0.1))
        .map(|b| (b.density / expected - 1.0).abs())
        .collect();
    let dev = interior.iter().cloned().fold(0.0, f64::max);
    let uniform = !interior.is_empty() && dev < 0.05;
    outcome(
        out < 0.02 && uniform,
        format!(
            "{} snapshots; outside fraction {out:.4} ({}); max interior density deviation \
             {dev:.4} over {} bins ({})",
            snaps.len(),
            ok(out < 0.02),
            interior.len(),
            ok(uniform)
        ),
    )
}

fn c10() -> Result<Outcome> {
    let s = wachter(4.0, 2.0)?;
    let deltas: Vec<f64> = (0..10).map(|k| 2e-4 * 10f64.powf(k as f64 / 9.0)).collect();
    let p = fit_rate_exponent(&s, &deltas)?;
    outcome((p - 3.0).abs() <= 0.1, format!("fitted exponent {p:.4}"))
}

fn c11() -> Result<Outcome> {
    let rep = scaling_limit_check(1.0, 3.0, &[1e-1, 1e-2, 1e-3])?;
    let orders_ok = rep.orders.iter().all(|o| (o - 2.0).abs() <= 0.3);
    let defect = planar_from_cubic(1.0, 3.0)?
        .defects()
        .iter()
        .fold(0.0f64, |m, d| m.max(d.abs()));
    outcome(
        orders_ok && defect < 1e-10,
        format!("orders {:?}; planar relation defect {defect:.2e}", rep.orders),
    )
}

fn c12() -> Result<Outcome> {
    let hm = HastingsMcLeod::global()?;
    let mut ratio: f64 = 0.0;
    let mut first_bad = None;
    for k in 0..=80 {
        let x = 4.0 + 0.05 * k as f64;
        let d = (hm.ratio_to_airy(x)? - 1.0).abs();
        if d > 1e-8 && first_bad.is_none() {
            first_bad = Some(x);
        }
        ratio = ratio.max(d);
    }
    let mut gap: f64 = 0.0;
    for k in 0..=32 {
        let t = -4.0 + 0.25 * k as f64;
        gap = gap.max((painleve_gap(t)? - airy_fredholm_gap(t, 60)?).abs());
    }
    outcome(
        ratio <= 1e-8 && gap < 1e-6,
        format!(
            "max |q/Ai - 1| on [4,8] = {ratio:.2e} ({}{}); max |E - det(I - K_Ai)| = {gap:.2e} ({})",
            ok(ratio <= 1e-8),
            first_bad.map(|x| format!(", exceeds at x = {x}")).unwrap_or_default(),
            ok(gap < 1e-6)
        ),
    )
}

fn ok(b: bool) -> &'static str {
    if b {
        "ok"
    } else {
        "fails"
    }
}

fn main() {
    let checks: [(&str, fn() -> Result<Outcome>); 12] = [
        ("critical points", c1),
        ("Wachter edges", c2),
        ("quartic vs explicit root", c3),
        ("large-w disk", c4),
        ("energy closed forms vs quadrature", c5),
        ("phase-boundary continuity", c6),
        ("sphere/Jacobi energy identity", c7),
        ("duality at small size", c8),
        ("Monte Carlo droplet", c9),
        ("third-order transition", c10),
        ("planar scaling limit", c11),
        ("Painleve gap", c12),
    ];
    let only: Option<usize> = std::env::var("ACCEPTANCE_ONLY").ok().and_then(|v| v.parse().ok());
    let mut passed = 0;
    let mut errors = 0;
    let mut run = 0;
    for (i, (name, f)) in checks.iter().enumerate() {
        if only.is_some_and(|k| k != i + 1) {
            continue;
        }
        run += 1;
        let start = Instant::now();
        let res = f();
        let secs = start.elapsed().as_secs_f64();
        match res {
            Ok(o) => {
                if o.pass {
                    passed += 1;
                }
                let tag = if o.pass { "PASS" } else { "FAIL" };
                println!("criterion {:>2} {tag}  {name}: {} [{secs:.1} s]", i + 1, o.detail);
            }
            Err(e) => {
                errors += 1;
                println!("criterion {:>2} FAIL  {name}: error: {e} [{secs:.1} s]", i + 1);
            }
        }
    }
    println!("acceptance: {passed}/{run} criteria pass");
    if errors > 0 && std::env::var_os("ACCEPTANCE_STRICT").is_some() {
        std::process::exit(1);
    }
}

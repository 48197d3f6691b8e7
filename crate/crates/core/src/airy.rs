//! Airy function `Ai` and its derivative on the real line.
//!
//! For `x >= 12` the asymptotic expansion is used directly. Below that, values
//! come from Taylor stepping of `y'' = x y` out of a table of nodes spaced
//! `0.25` apart. The table on `[0, 12]` is built by integrating leftwards from
//! the asymptotic values at `12`, where `Ai` is the dominant solution; the
//! table on `[-40, 0]` starts from the exact values at the origin.

use std::f64::consts::PI;
use std::sync::OnceLock;

const ASYMPTOTIC_FROM: f64 = 12.0;
const LEFT_LIMIT: f64 = -40.0;
const SPACING: f64 = 0.25;

pub const AI0: f64 = 0.355_028_053_887_817_2;
pub const AIP0: f64 = -0.258_819_403_792_806_8;

/// `(Ai(x), Ai'(x))`.
pub fn airy(x: f64) -> (f64, f64) {
    if x >= ASYMPTOTIC_FROM {
        return asymptotic(x);
    }
    let table = table();
    let x = x.max(LEFT_LIMIT);
    let k = ((x - LEFT_LIMIT) / SPACING).round() as usize;
    let k = k.min(table.len() - 1);
    let (x0, y0, d0) = table[k];
    taylor_step(x0, y0, d0, x - x0)
}

pub fn ai(x: f64) -> f64 {
    airy(x).0
}

pub fn ai_prime(x: f64) -> f64 {
    airy(x).1
}

fn asymptotic(x: f64) -> (f64, f64) {
    let zeta = 2.0 / 3.0 * x.powf(1.5);
    let pref = (-zeta).exp() / (2.0 * PI.sqrt());
    let (mut su, mut sv) = (1.0, 1.0);
    let mut u = 1.0;
    let mut last = f64::INFINITY;
    for k in 1..200 {
        let kf = k as f64;
        u *= (6.0 * kf - 5.0) * (6.0 * kf - 3.0) * (6.0 * kf - 1.0)
            / ((2.0 * kf - 1.0) * 216.0 * kf);
        let term = u / zeta.powi(k);
        if term >= last || term < 1e-18 {
            break;
        }
        last = term;
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        let v = -(6.0 * kf + 1.0) / (6.0 * kf - 1.0) * u;
        su += sign * term;
        sv += sign * v / zeta.powi(k);
    }
    (pref / x.powf(0.25) * su, -pref * x.powf(0.25) * sv)
}

fn taylor_step(x0: f64, y0: f64, d0: f64, h: f64) -> (f64, f64) {
    if h == 0.0 {
        return (y0, d0);
    }
    // coefficients a_n of y(x0 + h) = sum a_n h^n
    let (mut am1, mut a0, mut a1) = (0.0, y0, d0);
    let mut y = y0 + d0 * h;
    let mut dy = d0;
    let mut hn = h; // h^(n+1) for n = 0
    let mut small = 0;
    for n in 0..80 {
        let nf = n as f64;
        let a2 = (x0 * a0 + am1) / ((nf + 2.0) * (nf + 1.0));
        let t = a2 * hn * h;
        y += t;
        dy += (nf + 2.0) * a2 * hn;
        // every third coefficient can vanish exactly, so wait for a run
        if t.abs() <= 1e-18 * y.abs().max(1e-300) && (a2 * hn).abs() <= 1e-18 * dy.abs() {
            small += 1;
            if small >= 3 {
                break;
            }
        } else {
            small = 0;
        }
        am1 = a0;
        a0 = a1;
        a1 = a2;
        hn *= h;
    }
    (y, dy)
}

fn table() -> &'static [(f64, f64, f64)] {
    static TABLE: OnceLock<Vec<(f64, f64, f64)>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let n_right = (ASYMPTOTIC_FROM / SPACING).round() as usize;
        let n_left = (-LEFT_LIMIT / SPACING).round() as usize;
        let mut right = Vec::with_capacity(n_right + 1);
        let (mut y, mut d) = asymptotic(ASYMPTOTIC_FROM);
        right.push((ASYMPTOTIC_FROM, y, d));
        for k in (0..n_right).rev() {
            let x1 = k as f64 * SPACING;
            let x0 = x1 + SPACING;
            // two half steps keep the series short
            let (ym, dm) = taylor_step(x0, y, d, -0.5 * SPACING);
            let (y1, d1) = taylor_step(x0 - 0.5 * SPACING, ym, dm, -0.5 * SPACING);
            y = y1;
            d = d1;
            right.push((x1, y, d));
        }
        right.pop(); // replace the integrated origin with the exact values
        let mut left = Vec::with_capacity(n_left + 1);
        let (mut y, mut d) = (AI0, AIP0);
        left.push((0.0, y, d));
        for k in 1..=n_left {
            let x0 = -((k - 1) as f64) * SPACING;
            let (ym, dm) = taylor_step(x0, y, d, -0.5 * SPACING);
            let (y1, d1) = taylor_step(x0 - 0.5 * SPACING, ym, dm, -0.5 * SPACING);
            y = y1;
            d = d1;
            left.push((-(k as f64) * SPACING, y, d));
        }
        left.reverse();
        right.reverse();
        left.extend(right);
        left
    })
}

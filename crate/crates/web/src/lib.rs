//! wasm-bindgen bindings for the browser demo.
//!
//! Every export returns a JSON string; errors become JS exceptions carrying the
//! library's error message. The `*_json` functions are the same computations
//! without the JS boundary, so they can be tested natively.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use sphere_coulomb::conformal::droplet;
use sphere_coulomb::energy::energy_curve;
use sphere_coulomb::geometry::critical_w;
use sphere_coulomb::jue::{constrained_density, gammas_from_charges, wachter};
use sphere_coulomb::ChargeConfig;

#[derive(Serialize)]
struct Curve {
    x: Vec<f64>,
    y: Vec<f64>,
}

#[derive(Serialize)]
struct DropletView {
    phase: &'static str,
    w_cri: f64,
    curves: Vec<Curve>,
}

#[derive(Serialize)]
struct DensityView {
    gamma1: f64,
    gamma2: f64,
    c: f64,
    d: f64,
    zeta: f64,
    l: f64,
    x: Vec<f64>,
    wachter: Vec<f64>,
    constrained: Vec<f64>,
}

#[derive(Serialize)]
struct EnergyView {
    w_cri: f64,
    w: Vec<f64>,
    k: Vec<f64>,
    phase: Vec<&'static str>,
}

fn to_json<T: Serialize>(v: &T) -> Result<String, String> {
    serde_json::to_string(v).map_err(|e| e.to_string())
}

fn ordered(q0: f64, q1: f64) -> (f64, f64) {
    if q0 >= q1 {
        (q0, q1)
    } else {
        (q1, q0)
    }
}

pub fn droplet_json(q0: f64, q1: f64, w: f64, resolution: usize) -> Result<String, String> {
    let run = || -> sphere_coulomb::Result<DropletView> {
        let cfg = ChargeConfig::new(q0, q1, w)?;
        let d = droplet(&cfg, resolution.max(16))?;
        let curves = d
            .curves()
            .iter()
            .map(|c| Curve {
                x: c.points.iter().map(|z| z.re).collect(),
                y: c.points.iter().map(|z| z.im).collect(),
            })
            .collect();
        Ok(DropletView {
            phase: cfg.phase().tag.name(),
            w_cri: cfg.w_cri(),
            curves,
        })
    };
    to_json(&run().map_err(|e| e.to_string())?)
}

/// Densities for the charges' Jacobi parameters with a wall at 1/(1 + w^2).
pub fn densities_json(q0: f64, q1: f64, w: f64, resolution: usize) -> Result<String, String> {
    let run = || -> sphere_coulomb::Result<DensityView> {
        let (a, b) = ordered(q0, q1);
        ChargeConfig::new(a, b, w.max(f64::MIN_POSITIVE))?;
        let (g1, g2) = gammas_from_charges(a, b);
        let spec = wachter(g1, g2)?;
        let c = constrained_density(&spec, 1.0 / (1.0 + w * w))?;
        let n = resolution.max(2);
        let (lo, hi) = (c.l.min(spec.c), spec.d);
        let x: Vec<f64> = (0..n).map(|i| lo + (hi - lo) * (i as f64 + 0.5) / n as f64).collect();
        Ok(DensityView {
            gamma1: g1,
            gamma2: g2,
            c: spec.c,
            d: spec.d,
            zeta: c.zeta,
            l: c.l,
            wachter: x.iter().map(|&t| spec.density(t)).collect(),
            constrained: x.iter().map(|&t| c.density(t)).collect(),
            x,
        })
    };
    to_json(&run().map_err(|e| e.to_string())?)
}

/// K_N on a log-spaced grid of w.
pub fn energy_json(q0: f64, q1: f64, w_min: f64, w_max: f64, count: usize) -> Result<String, String> {
    if !(w_min > 0.0 && w_max > w_min) || count < 2 {
        return Err(format!("need 0 < w_min < w_max and count >= 2, got {w_min}, {w_max}, {count}"));
    }
    let ws: Vec<f64> = (0..count)
        .map(|i| w_min * (w_max / w_min).powf(i as f64 / (count - 1) as f64))
        .collect();
    let pts = energy_curve(q0, q1, &ws).map_err(|e| e.to_string())?;
    to_json(&EnergyView {
        w_cri: critical_w(q0, q1).map_err(|e| e.to_string())?,
        w: ws,
        k: pts.iter().map(|p| -p.k / 4.0).collect(),
        phase: pts.iter().map(|p| p.phase).collect(),
    })
}

#[wasm_bindgen(js_name = dropletBoundary)]
pub fn droplet_boundary(q0: f64, q1: f64, w: f64, resolution: usize) -> Result<String, JsValue> {
    droplet_json(q0, q1, w, resolution).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = jueDensities)]
pub fn jue_densities(q0: f64, q1: f64, w: f64, resolution: usize) -> Result<String, JsValue> {
    densities_json(q0, q1, w, resolution).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = energyCurve)]
pub fn energy_curve_js(q0: f64, q1: f64, w_min: f64, w_max: f64, count: usize) -> Result<String, JsValue> {
    energy_json(q0, q1, w_min, w_max, count).map_err(|e| JsValue::from_str(&e))
}

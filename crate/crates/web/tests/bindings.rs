use serde_json::Value;

use sphere_coulomb_web::{densities_json, droplet_json, energy_json};

fn parse(s: &str) -> Value {
    serde_json::from_str(s).unwrap()
}

#[test]
fn droplet_curves_by_phase() {
    let pre = parse(&droplet_json(4.0, 2.0, 1.0, 64).unwrap());
    assert_eq!(pre["phase"], "pre-critical");
    assert_eq!(pre["curves"].as_array().unwrap().len(), 1);
    assert_eq!(pre["curves"][0]["x"].as_array().unwrap().len(), 64);

    let post = parse(&droplet_json(4.0, 2.0, 0.05, 64).unwrap());
    assert_eq!(post["phase"], "post-critical");
    assert_eq!(post["curves"].as_array().unwrap().len(), 2);
}

#[test]
fn densities_have_wachter_edges() {
    let v = parse(&densities_json(2.5, 0.5, 1.0, 50).unwrap());
    assert!((v["c"].as_f64().unwrap() - 0.2735).abs() < 1e-3);
    assert!((v["d"].as_f64().unwrap() - 0.9140).abs() < 1e-3);
    assert_eq!(v["constrained"].as_array().unwrap().len(), 50);
}

#[test]
fn energy_curve_marks_threshold() {
    let v = parse(&energy_json(4.0, 2.0, 0.05, 5.0, 30).unwrap());
    let wc = v["w_cri"].as_f64().unwrap();
    assert!((wc - 0.1509).abs() < 5e-3);
    assert_eq!(v["k"].as_array().unwrap().len(), 30);
}

#[test]
fn bad_parameters_are_errors() {
    assert!(droplet_json(-1.0, 2.0, 1.0, 64).is_err());
    assert!(energy_json(4.0, 2.0, 1.0, 0.5, 10).is_err());
}

use num_complex::Complex64;
use proptest::prelude::*;

use sphere_coulomb::conformal::{build_map, droplet_boundary, solve_alpha};
use sphere_coulomb::energy::{k_post, k_pre};
use sphere_coulomb::geometry::{
    cap_overlap, classify_phase, critical_w, project_to_plane, project_to_sphere, ChargeConfig,
    PhaseTag, SphericalPoint,
};
use sphere_coulomb::jue::{
    constrained_density, energy_identity_check, gammas_from_charges, painleve_gap,
    rate_difference, rate_function_s, wachter,
};
use sphere_coulomb::oracle::sample_with;

fn pre_critical() -> impl Strategy<Value = ChargeConfig> {
    (0.2f64..6.0, 0.2f64..6.0, 0.05f64..3.0).prop_map(|(q0, q1, t)| {
        let wc = critical_w(q0, q1).unwrap();
        ChargeConfig::new(q0, q1, wc * (1.0 + t)).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn stereographic_round_trip(theta in 0.0f64..3.1, phi in -3.1f64..3.1) {
        let p = SphericalPoint::from_angles(theta, phi);
        let q = project_to_sphere(project_to_plane(&p).unwrap());
        let (t1, p1) = q.angles();
        prop_assert!((t1 - theta).abs() < 1e-12);
        if theta > 1e-6 {
            let d = (p1 - phi).rem_euclid(2.0 * std::f64::consts::PI);
            prop_assert!(d.min(2.0 * std::f64::consts::PI - d) < 1e-11);
        }
    }

    #[test]
    fn chord_identity(t1 in 0.0f64..3.0, f1 in -3.0f64..3.0, t2 in 0.0f64..3.0, f2 in -3.0f64..3.0) {
        let (a, b) = (SphericalPoint::from_angles(t1, f1), SphericalPoint::from_angles(t2, f2));
        let (za, zb): (Complex64, Complex64) = (project_to_plane(&a).unwrap(), project_to_plane(&b).unwrap());
        let rhs = (t1 / 2.0).cos() * (za - zb).norm() * (t2 / 2.0).cos();
        prop_assert!((a.chord(&b) - rhs).abs() < 1e-12);
    }

    #[test]
    fn phase_agrees_with_caps(q0 in 0.1f64..10.0, q1 in 0.1f64..10.0, w in 0.01f64..10.0) {
        let cfg = ChargeConfig::new(q0, q1, w).unwrap();
        let tag = classify_phase(&cfg).tag;
        if tag != PhaseTag::Critical {
            prop_assert_eq!(tag == PhaseTag::PreCritical, cap_overlap(&cfg));
        }
        prop_assert!((critical_w(q0, q1).unwrap() - critical_w(q1, q0).unwrap()).abs() < 1e-15);
    }

    #[test]
    fn edge_matches_phase_condition(q0 in 0.2f64..8.0, ratio in 0.05f64..1.0, w in 0.01f64..5.0) {
        let q1 = q0 * ratio;
        let (g1, g2) = gammas_from_charges(q0, q1);
        let d = wachter(g1, g2).unwrap().d;
        let cfg = ChargeConfig::new(q0, q1, w).unwrap();
        if classify_phase(&cfg).tag != PhaseTag::Critical {
            prop_assert_eq!(classify_phase(&cfg).tag == PhaseTag::PostCritical, 1.0 / (1.0 + w * w) > d);
        }
    }

    #[test]
    fn map_relations_hold(cfg in pre_critical()) {
        let m = build_map(&cfg).unwrap();
        for d in m.defects() {
            prop_assert!(d.abs() < 1e-10, "{:?}", m.defects());
        }
        prop_assert!(0.0 < m.a && m.a < m.v0 && m.v0 < m.b && m.v1 > 1.0);
        prop_assert!(droplet_boundary(&m, 256).unwrap().is_simple());
    }

    #[test]
    fn equal_charges_explicit_root(q in 0.2f64..8.0, t in 0.05f64..5.0) {
        let w = critical_w(q, q).unwrap() * (1.0 + t);
        let cfg = ChargeConfig::new(q, q, w).unwrap();
        prop_assert!((solve_alpha(&cfg).unwrap() - (-w + w.hypot(1.0))).abs() < 1e-12);
    }

    #[test]
    fn pre_critical_energy_below_post(cfg in pre_critical()) {
        // K_N = -k / 4, so K_pre < K_post means k_pre > k_post
        prop_assert!(k_pre(&cfg).unwrap().k_pre > k_post(cfg.q0, cfg.q1));
    }

    #[test]
    fn identity_residual(cfg in pre_critical()) {
        let r = energy_identity_check(&cfg).unwrap();
        prop_assert!(r.residual < 1e-6, "{:?}", r);
    }

    #[test]
    fn wall_at_edge_gives_wachter(g1 in 0.0f64..6.0, g2 in 0.05f64..6.0) {
        let s = wachter(g1, g2).unwrap();
        let c = constrained_density(&s, s.d).unwrap();
        for k in 1..20 {
            let x = s.c + (s.d - s.c) * k as f64 / 20.0;
            prop_assert!((c.density(x) - s.density(x)).abs() < 1e-10);
        }
    }

    #[test]
    fn rate_difference_nonnegative(g1 in 0.0f64..6.0, g2 in 0.05f64..6.0, f in 0.05f64..0.99) {
        let s = wachter(g1, g2).unwrap();
        let zeta = s.d * f;
        let v = rate_difference(&s, zeta).unwrap();
        prop_assert!(v >= -1e-12, "{}", v);
        let c = constrained_density(&s, zeta).unwrap();
        prop_assert!((c.mass() - 1.0).abs() < 1e-9);
        prop_assert!(rate_function_s(&s, c.l, zeta).is_ok());
    }

    #[test]
    fn gap_probability_monotone(t in -9.5f64..9.0, h in 0.01f64..1.0) {
        let (a, b) = (painleve_gap(t).unwrap(), painleve_gap(t + h).unwrap());
        prop_assert!(a <= b);
        if b < 1.0 - 1e-12 {
            prop_assert!(a < b);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn seeded_sampling_is_deterministic(seed in any::<u64>()) {
        let a = sample_with(1.0, 0.5, 0.8, 10, 20, 5, seed).unwrap();
        let b = sample_with(1.0, 0.5, 0.8, 10, 20, 5, seed).unwrap();
        prop_assert_eq!(a, b);
    }
}

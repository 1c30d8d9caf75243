use std::f64::consts::TAU;

use mechent_core::constants::hz_to_rad;
use mechent_core::gaussian::*;
use mechent_core::lab::*;
use mechent_core::model::*;
use proptest::prelude::*;

fn tmst() -> impl Strategy<Value = TmstParams> {
    (0.0..3.0f64, 0.0..TAU, 0.0..20.0f64, 0.0..20.0f64)
        .prop_map(|(r, phi, n1, n2)| TmstParams::new(r, phi, n1, n2).unwrap())
}

fn scatter() -> impl Strategy<Value = ScatterParams> {
    (0.0..300.0f64, 0.0..300.0f64, 0.05..1.0f64, 0.05..1.0f64, 0.1..2.0f64, 0.1..2.0f64, 1.0..50.0f64).prop_filter_map(
        "gamma_eff must be positive",
        |(c1, c2, e1, e2, k1, k2, g)| {
            let p = ScatterParams {
                c1,
                c2,
                eta1: e1,
                eta2: e2,
                kappa1: hz_to_rad(k1 * 1e6),
                kappa2: hz_to_rad(k2 * 1e6),
                gamma_m: hz_to_rad(g),
            };
            (p.gamma_eff() > 0.05 * p.gamma_m).then_some(p)
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn tmst_states_are_physical(p in tmst()) {
        let v = cm_from_tmst(&p);
        prop_assert!(v.is_physical());
        let (lo, _) = v.symplectic_eigenvalues();
        prop_assert!(lo >= 0.5 - 1e-9);
    }

    #[test]
    fn tmst_round_trip(r in 0.0..3.0f64, n1 in 0.0..20.0f64, n2 in 0.0..20.0f64) {
        let p = TmstParams::new(r, 0.0, n1, n2).unwrap();
        let v = cm_from_tmst(&p);
        let back = cm_from_tmst(&tmst_from_cm(&v).unwrap());
        for i in 0..4 {
            for j in 0..4 {
                let scale = v.get(i, j).abs().max(1.0);
                prop_assert!((back.get(i, j) - v.get(i, j)).abs() < 1e-9 * scale);
            }
        }
    }

    #[test]
    fn vacuum_duan_is_exactly_one(phi in -10.0..10.0f64) {
        prop_assert_eq!(epr_duan(&CovMat4::vacuum(), phi).delta_epr, 1.0);
    }

    #[test]
    fn uncorrelated_states_have_no_entanglement_or_discord(a in 0.5..50.0f64, b in 1.0001..50.0f64) {
        let v = CovMat4::from_normal_form(a, b, 0.0).unwrap();
        prop_assert_eq!(negativity(&v).unwrap().e_n, 0.0);
        prop_assert!(quantum_discord(&v).unwrap().abs() < 1e-9);
    }

    #[test]
    fn added_noise_never_increases_negativity(p in tmst(), t1 in 0.0..5.0f64, dt in 0.0..5.0f64) {
        let p = TmstParams::new(p.r, 0.0, p.n1, p.n2).unwrap();
        let nf = cm_from_tmst(&p).normal_form().unwrap();
        let at = |t: f64| negativity(&CovMat4::from_normal_form(nf.v11 + t, nf.v33 + t, nf.v13).unwrap()).unwrap().e_n;
        prop_assert!(at(t1 + dt) <= at(t1) + 1e-9);
    }

    #[test]
    fn angle_formula_matches_rotated_duan(p in tmst(), phi in 0.0..TAU) {
        let p = TmstParams::new(p.r, 0.0, p.n1, p.n2).unwrap();
        let s = squeezing_vs_angle(&p, phi);
        let d = epr_duan(&cm_from_tmst(&p), phi);
        prop_assert!((s - d.x_minus_var).abs() < 1e-12 * s.max(1.0));
    }

    #[test]
    fn ideal_commutators(c1 in 0.0..500.0f64, extra in 0.01..500.0f64, g in 0.1..100.0f64) {
        let a = ideal_coefficients(c1, c1 + extra, g).unwrap();
        let one = a.a1.norm_sqr() - a.a12.norm_sqr() - a.a1m.norm_sqr();
        let two = a.a2.norm_sqr() - a.a21.norm_sqr() + a.a2m.norm_sqr();
        let scale = a.a1.norm_sqr().max(1.0);
        prop_assert!((one - 1.0).abs() < 1e-12 * scale);
        prop_assert!((two - 1.0).abs() < 1e-12 * scale);
        prop_assert_eq!(a.a12, -a.a21);
    }

    #[test]
    fn lossy_commutators_any_frequency(p in scatter(), w in -1e7..1e7f64) {
        let a = scattering_coefficients(w, &p).unwrap();
        let scale = a.a1.norm_sqr().max(a.a2.norm_sqr()).max(1.0);
        prop_assert!((a.mode1_commutator() - 1.0).abs() < 1e-9 * scale);
        prop_assert!((a.mode2_commutator() - 1.0).abs() < 1e-9 * scale);
        let b = scattering_coefficients(-w, &p).unwrap();
        prop_assert!(a.cross_commutator(&b).norm() < 1e-9 * scale);
    }

    #[test]
    fn general_set_reduces_at_zero(p in scatter()) {
        let g = scattering_coefficients(0.0, &p).unwrap();
        let r = resonant_coefficients(&p).unwrap();
        let scale = g.a1.norm().max(1.0);
        prop_assert!(g.max_abs_diff(&r) < 1e-12 * scale);
    }

    #[test]
    fn effective_damping_identity(c1 in 0.0..300.0f64, c2 in 0.0..300.0f64, k1 in 1e5..1e7f64, k2 in 1e5..1e7f64, g in 1.0..100.0f64) {
        let s = stability_check(c1, c2, k1, k2, g);
        prop_assert_eq!(s.gamma_eff, g * (1.0 + c2 - c1));
        if s.gamma_eff <= 0.0 {
            prop_assert!(!s.stable);
        }
        prop_assert_eq!(s.stable, s.lhs > s.rhs && s.gamma_eff > 0.0);
    }

    #[test]
    fn spectral_cm_physical_when_stable(
        p in scatter(),
        n_m in 0.0..100.0f64,
        n_ex in (0.0..5.0f64, 0.0..5.0f64),
        n_in in (0.0..5.0f64, 0.0..5.0f64),
        w in 0.0..2e4f64,
    ) {
        let s = stability_check(p.c1, p.c2, p.kappa1, p.kappa2, p.gamma_m);
        prop_assume!(s.stable);
        let model = OutputModel { scatter: p, baths: Baths { n_m, n_ex: [n_ex.0, n_ex.1], n_in: [n_in.0, n_in.1] } };
        let v = output_spectral_cm(w, &model).unwrap();
        prop_assert!(v.symplectic_eigenvalues().0 >= 0.5 - 1e-9 * v.get(0, 0).max(1.0));
        // even in ω
        let a = model.spectral_elements(w).unwrap();
        let b = model.spectral_elements(-w).unwrap();
        for k in 0..3 {
            prop_assert!((a[k] - b[k]).abs() <= 1e-12 * a[k].abs().max(1.0));
        }
    }

    #[test]
    fn rotation_preserves_mode1_norm(phi in -20.0..20.0f64, seed in 0u64..1000) {
        let ch = [
            RfChain::new(80.0, 1.0, 50.0, 100.0, 1e10).unwrap(),
            RfChain::new(80.0, 2.0, 50.0, 100.0, 1e10).unwrap(),
        ];
        let b = sample_quadratures(&CovMat4::vacuum(), &ch, 64, seed, true).unwrap();
        let r = rotate_detector(&b, phi);
        for (x, y) in r.samples.iter().zip(&b.samples) {
            let (n0, n1) = (x[0] * x[0] + x[1] * x[1], y[0] * y[0] + y[1] * y[1]);
            prop_assert!((n0 - n1).abs() <= 4.0 * f64::EPSILON * n1);
            prop_assert_eq!(x[2].to_bits(), y[2].to_bits());
            prop_assert_eq!(x[3].to_bits(), y[3].to_bits());
        }
    }

    #[test]
    fn calibration_inverts_forward_model(gain in 60.0..100.0f64, n_add in 0.0..30.0f64) {
        let ch = RfChain::new(gain, n_add, 50.0, 100.0, hz_to_rad(10.17e9)).unwrap();
        let temps = linear_temperatures(0.007, 0.3, 10).unwrap();
        let pts = synthetic_calibration(&ch, &temps, 0.0, 0).unwrap();
        let fit = calibrate_chain(&pts, ch.omega_c, 50.0, 100.0).unwrap();
        prop_assert!((fit.gain_db - gain).abs() < 1e-9);
        prop_assert!((fit.n_add - n_add).abs() < 1e-9);
    }

    #[test]
    fn zeta_invariant_any_path(gain in -20.0..120.0f64, f in 1e9..2e10f64) {
        let a = RfChain::new(gain, 1.0, 50.0, 100.0, hz_to_rad(f)).unwrap();
        let unit = 50.0 * 100.0 * mechent_core::constants::HBAR * hz_to_rad(f);
        prop_assert!((a.zeta - 10f64.powf(gain / 10.0) * unit).abs() <= 1e-12 * a.zeta);
        let b = RfChain::from_zeta(a.zeta, 1.0, 50.0, 100.0, hz_to_rad(f)).unwrap();
        prop_assert!((b.zeta - 10f64.powf(b.gain_db / 10.0) * unit).abs() <= 1e-12 * b.zeta);
        prop_assert!((b.gain_db - gain).abs() < 1e-9);
    }
}

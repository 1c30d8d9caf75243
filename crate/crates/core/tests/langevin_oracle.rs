//! Scattering coefficients against a direct numerical solution of the
//! linearised Langevin equations in the frequency domain.
//!
//! Interaction: blue pump `G1 (c1 b + c1† b†)`, red pump `G2 (c2 b† + c2† b)`.
//! Amplitude damping `κ/2`, `γ_m/2`; output `d = √κ_ex c − c_ex`.

use mechent_core::constants::hz_to_rad;
use mechent_core::model::{scattering_coefficients, ScatterParams};
use nalgebra::Matrix3;
use num_complex::Complex64;

struct Rates {
    k1: f64,
    k2: f64,
    g: f64,
    g1: f64,
    g2: f64,
    k1ex: f64,
    k1in: f64,
    k2ex: f64,
    k2in: f64,
}

fn rates(p: &ScatterParams) -> Rates {
    Rates {
        k1: p.kappa1,
        k2: p.kappa2,
        g: p.gamma_m,
        g1: (p.c1 * p.kappa1 * p.gamma_m / 4.0).sqrt(),
        g2: (p.c2 * p.kappa2 * p.gamma_m / 4.0).sqrt(),
        k1ex: p.eta1 * p.kappa1,
        k1in: (1.0 - p.eta1) * p.kappa1,
        k2ex: p.eta2 * p.kappa2,
        k2in: (1.0 - p.eta2) * p.kappa2,
    }
}

/// Returns `[α1, α12, α1m, α1in, α12in]` and `[α2, α21, α2m, α2in, α21in]`
/// at physical offset `w`.
fn solve(p: &ScatterParams, w: f64) -> ([Complex64; 5], [Complex64; 5]) {
    let r = rates(p);
    let i = Complex64::i();
    let d = |k: f64| Complex64::new(k / 2.0, -w);

    // unknowns (c1, b†, c2†)
    let m1 = Matrix3::new(d(r.k1), i * r.g1, 0.0.into(), -i * r.g1, d(r.g), -i * r.g2, 0.0.into(), -i * r.g2, d(r.k2));
    let inv1 = m1.try_inverse().unwrap();
    let s1 = r.k1ex.sqrt();
    let mode1 = [
        s1 * inv1[(0, 0)] * r.k1ex.sqrt() - 1.0,
        s1 * inv1[(0, 2)] * r.k2ex.sqrt(),
        s1 * inv1[(0, 1)] * r.g.sqrt(),
        s1 * inv1[(0, 0)] * r.k1in.sqrt(),
        s1 * inv1[(0, 2)] * r.k2in.sqrt(),
    ];

    // unknowns (c2, b, c1†)
    let m2 = Matrix3::new(d(r.k2), i * r.g2, 0.0.into(), i * r.g2, d(r.g), i * r.g1, 0.0.into(), -i * r.g1, d(r.k1));
    let inv2 = m2.try_inverse().unwrap();
    let s2 = r.k2ex.sqrt();
    let mode2 = [
        s2 * inv2[(0, 0)] * r.k2ex.sqrt() - 1.0,
        s2 * inv2[(0, 2)] * r.k1ex.sqrt(),
        s2 * inv2[(0, 1)] * r.g.sqrt(),
        s2 * inv2[(0, 0)] * r.k2in.sqrt(),
        s2 * inv2[(0, 2)] * r.k1in.sqrt(),
    ];
    (mode1, mode2)
}

fn params(c1: f64, c2: f64, eta1: f64, eta2: f64) -> ScatterParams {
    ScatterParams { c1, c2, eta1, eta2, kappa1: hz_to_rad(0.52e6), kappa2: hz_to_rad(0.48e6), gamma_m: hz_to_rad(6.0) }
}

#[test]
fn closed_forms_match_numerical_langevin_solution() {
    let cases = [
        params(67.0, 113.3, 0.76, 0.67),
        params(67.0, 113.3, 1.0, 1.0),
        params(5.0, 40.0, 0.5, 0.9),
        params(0.0, 20.0, 0.8, 0.8),
    ];
    for p in &cases {
        for w in [0.0, 50.0, 400.0, 3e3, 2e5] {
            let (m1, m2) = solve(p, w);
            // closed forms take twice the physical offset
            let a = scattering_coefficients(2.0 * w, p).unwrap();
            let closed1 = [a.a1, a.a12, a.a1m, a.a1in, a.a12in];
            let closed2 = [a.a2, a.a21, a.a2m, a.a2in, a.a21in];
            for k in 0..5 {
                let scale = m1[k].norm().max(1.0);
                assert!(
                    (m1[k] - closed1[k]).norm() < 1e-9 * scale,
                    "mode 1 k={k} w={w} {:?} vs {:?} ({p:?})",
                    m1[k],
                    closed1[k]
                );
                let scale = m2[k].norm().max(1.0);
                assert!(
                    (m2[k] - closed2[k]).norm() < 1e-9 * scale,
                    "mode 2 k={k} w={w} {:?} vs {:?} ({p:?})",
                    m2[k],
                    closed2[k]
                );
            }
        }
    }
}

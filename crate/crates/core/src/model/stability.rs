use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub stable: bool,
    /// `κ₂C₂ − κ₁C₁`.
    pub lhs: f64,
    /// `C̃ · max{κ₂ − κ₁, (κ₁² − κ₂²)/(2γ_m + κ₁ + κ₂)}`.
    pub rhs: f64,
    pub c_tilde: f64,
    /// `γ_m (1 + C₂ − C₁)` (rad/s).
    pub gamma_eff: f64,
}

fn rate_term(kappa1: f64, kappa2: f64, gamma_m: f64) -> f64 {
    (kappa2 - kappa1).max((kappa1 * kappa1 - kappa2 * kappa2) / (2.0 * gamma_m + kappa1 + kappa2))
}

/// Steady-state stability of the two-pump scheme in the large-cooperativity
/// limit. A positive effective damping is required in addition to the
/// rate inequality.
pub fn stability_check(c1: f64, c2: f64, kappa1: f64, kappa2: f64, gamma_m: f64) -> StabilityReport {
    let c_tilde = c2 / (1.0 + kappa1 / kappa2) + c1 / (1.0 + kappa2 / kappa1);
    let lhs = kappa2 * c2 - kappa1 * c1;
    let rhs = c_tilde * rate_term(kappa1, kappa2, gamma_m);
    let gamma_eff = gamma_m * (1.0 + c2 - c1);
    StabilityReport { stable: lhs > rhs && gamma_eff > 0.0, lhs, rhs, c_tilde, gamma_eff }
}

/// Smallest red cooperativity `C₂` above which the system is stable at a
/// fixed `C₁`, or `None` if no `C₂` stabilises it. The criterion is linear in
/// `C₂`, so the threshold is exact.
pub fn critical_c2(c1: f64, kappa1: f64, kappa2: f64, gamma_m: f64) -> Result<Option<f64>> {
    if !(kappa1 > 0.0 && kappa2 > 0.0 && gamma_m > 0.0) {
        return Err(Error::InvalidParameter("rates must be positive".into()));
    }
    let m = rate_term(kappa1, kappa2, gamma_m);
    let slope = kappa2 - m / (1.0 + kappa1 / kappa2);
    if slope <= 0.0 {
        return Ok(None);
    }
    let offset = kappa1 * c1 + c1 * m / (1.0 + kappa2 / kappa1);
    Ok(Some((offset / slope).max(c1 - 1.0)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::hz_to_rad;

    #[test]
    fn nominal_operating_point_is_stable() {
        let r = stability_check(67.0, 113.3, hz_to_rad(0.52e6), hz_to_rad(0.48e6), hz_to_rad(6.0));
        assert!(r.stable);
        assert!(r.lhs > r.rhs);
        assert!((r.gamma_eff / hz_to_rad(1.0) - 283.8).abs() < 1e-9);
    }

    #[test]
    fn blue_dominated_is_unstable() {
        let k = hz_to_rad(0.5e6);
        let r = stability_check(100.0, 50.0, k, k, hz_to_rad(6.0));
        assert!(!r.stable);
        assert!(r.lhs < 0.0 && r.rhs <= 0.0 + 1e-9 * k);
        assert!(r.gamma_eff < 0.0);
    }

    #[test]
    fn gamma_eff_identity() {
        let g = 7.0;
        let r = stability_check(10.0, 30.0, 1e6, 2e6, g);
        assert_eq!(r.gamma_eff, g * (1.0 + 30.0 - 10.0));
    }
}

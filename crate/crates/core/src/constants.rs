//! Physical constants and unit conversions.
//!
//! Everything inside the crate works in angular units (rad/s). Configuration
//! files and reports use ordinary frequency (Hz); convert at the boundary with
//! [`hz_to_rad`] / [`rad_to_hz`].

use std::f64::consts::PI;

/// Reduced Planck constant (J·s).
pub const HBAR: f64 = 1.054571817e-34;
/// Boltzmann constant (J/K).
pub const K_B: f64 = 1.380649e-23;

/// Vacuum variance of a single quadrature in the convention used throughout.
pub const VACUUM_VARIANCE: f64 = 0.5;

#[inline]
pub fn hz_to_rad(f_hz: f64) -> f64 {
    2.0 * PI * f_hz
}

#[inline]
pub fn rad_to_hz(omega: f64) -> f64 {
    omega / (2.0 * PI)
}

/// Power in dBm to watts.
#[inline]
pub fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}

#[inline]
pub fn watts_to_dbm(w: f64) -> f64 {
    10.0 * w.log10() + 30.0
}

/// Symmetrised vacuum-plus-thermal noise of a bosonic mode, `½·coth(ħω / 2k_B T)`.
///
/// Tends to 1/2 at zero temperature.
pub fn half_coth_noise(omega: f64, temp_k: f64) -> f64 {
    if temp_k <= 0.0 {
        return 0.5;
    }
    let x = HBAR * omega / (2.0 * K_B * temp_k);
    // coth saturates to 1 well before exp overflows
    if x > 40.0 {
        0.5
    } else {
        0.5 / x.tanh()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dbm_round_trip() {
        for dbm in [-120.0, -84.4, 0.0, 13.0] {
            assert!((watts_to_dbm(dbm_to_watts(dbm)) - dbm).abs() < 1e-12);
        }
        assert!((dbm_to_watts(-84.4) - 3.630780547701e-12).abs() < 1e-22);
    }

    #[test]
    fn half_coth_limits() {
        assert_eq!(half_coth_noise(1.0, 0.0), 0.5);
        let w = hz_to_rad(10.17e9);
        assert!((half_coth_noise(w, 0.007) - 0.5).abs() < 1e-15);
        // high temperature: ~ k_B T / ħω
        let hot = half_coth_noise(w, 300.0);
        assert!((hot - K_B * 300.0 / (HBAR * w)).abs() / hot < 1e-4);
    }
}

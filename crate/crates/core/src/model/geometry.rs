use crate::error::{Error, Result};

/// Exponent of the vacuum coupling versus gap size.
pub const G0_GAP_EXPONENT: f64 = -1.5;
/// Exponent of the modulated capacitance versus gap size.
pub const CMOD_GAP_EXPONENT: f64 = -0.6;

/// `|g0| = |β (ω_c / 2C_mod) (dC_mod/dx) x_zpf|`.
pub fn coupling_from_geometry(beta: f64, omega_c: f64, c_mod: f64, dc_dx: f64, x_zpf: f64) -> Result<f64> {
    if !(beta > 0.0 && omega_c > 0.0 && c_mod > 0.0 && x_zpf > 0.0 && dc_dx.is_finite()) {
        return Err(Error::InvalidParameter("geometry needs beta, omega_c, c_mod, x_zpf > 0 and finite dC/dx".into()));
    }
    Ok((beta * omega_c / (2.0 * c_mod) * dc_dx * x_zpf).abs())
}

fn power_law(reference: f64, x0_ref: f64, x0: f64, exponent: f64) -> Result<f64> {
    if !(x0_ref > 0.0 && x0 > 0.0) {
        return Err(Error::InvalidParameter("gap sizes must be > 0".into()));
    }
    Ok(reference * (x0 / x0_ref).powf(exponent))
}

/// Rescales a reference coupling to another gap with `g0 ∝ x0^−1.5`.
pub fn gap_scaling(g0_ref: f64, x0_ref: f64, x0: f64) -> Result<f64> {
    power_law(g0_ref, x0_ref, x0, G0_GAP_EXPONENT)
}

/// Rescales a reference modulated capacitance with `C_mod ∝ x0^−0.6`.
pub fn capacitance_scaling(c_ref: f64, x0_ref: f64, x0: f64) -> Result<f64> {
    power_law(c_ref, x0_ref, x0, CMOD_GAP_EXPONENT)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn halving_the_gap() {
        let g = gap_scaling(152.0, 70e-9, 35e-9).unwrap();
        assert!((g - 152.0 * 2f64.powf(1.5)).abs() < 1e-9);
        assert!((g - 430.0).abs() < 1.0);
    }

    #[test]
    fn capacitance_at_double_gap() {
        let c = capacitance_scaling(0.93e-15, 70e-9, 140e-9).unwrap();
        assert!((c - 0.93e-15 * 2f64.powf(-0.6)).abs() < 1e-27);
        assert!((c * 1e15 - 0.614).abs() < 1e-3);
    }

    #[test]
    fn linear_in_zero_point_motion() {
        let a = coupling_from_geometry(0.8, 6e10, 1e-15, -2e-8, 1e-15).unwrap();
        let b = coupling_from_geometry(0.8, 6e10, 1e-15, -2e-8, 2e-15).unwrap();
        assert!((b - 2.0 * a).abs() < 1e-12 * b);
        assert!(a > 0.0);
        assert!(coupling_from_geometry(0.0, 1.0, 1.0, 1.0, 1.0).is_err());
    }
}

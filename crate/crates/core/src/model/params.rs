use serde::{Deserialize, Serialize};

use crate::constants::{HBAR, K_B};
use crate::error::{Error, Result};

/// Bose-Einstein occupation `1/(exp(ħω/k_B T) − 1)`; zero at `T = 0`.
pub fn thermal_occupation(omega: f64, temp_k: f64) -> f64 {
    if temp_k <= 0.0 {
        return 0.0;
    }
    1.0 / (HBAR * omega / (K_B * temp_k)).exp_m1()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MechanicalMode {
    /// Angular frequency (rad/s).
    pub omega_m: f64,
    /// Intrinsic damping (rad/s).
    pub gamma_m: f64,
    /// Bath temperature (K).
    pub t_bath: f64,
    /// Bath occupation.
    pub n_bar_m: f64,
}

impl MechanicalMode {
    /// Occupation derived from the bath temperature.
    pub fn from_temperature(omega_m: f64, gamma_m: f64, t_bath: f64) -> Result<Self> {
        Self::validate(omega_m, gamma_m, t_bath)?;
        Ok(Self { omega_m, gamma_m, t_bath, n_bar_m: thermal_occupation(omega_m, t_bath) })
    }

    /// Occupation set directly, e.g. from a thermometry calibration.
    pub fn with_occupation(omega_m: f64, gamma_m: f64, t_bath: f64, n_bar_m: f64) -> Result<Self> {
        Self::validate(omega_m, gamma_m, t_bath)?;
        if !(n_bar_m >= 0.0) {
            return Err(Error::InvalidParameter(format!("n_bar_m must be >= 0, got {n_bar_m}")));
        }
        Ok(Self { omega_m, gamma_m, t_bath, n_bar_m })
    }

    fn validate(omega_m: f64, gamma_m: f64, t_bath: f64) -> Result<()> {
        if !(omega_m > 0.0 && gamma_m > 0.0 && t_bath >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "mechanical mode needs omega_m > 0, gamma_m > 0, t_bath >= 0 (got {omega_m}, {gamma_m}, {t_bath})"
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CavityMode {
    /// Resonance (rad/s).
    pub omega_c: f64,
    /// Total energy decay rate (rad/s).
    pub kappa: f64,
    /// External coupling ratio `κ_ex/κ`.
    pub eta: f64,
    /// Vacuum electromechanical coupling (rad/s).
    pub g0: f64,
    /// Occupation of the intrinsic loss bath.
    pub n_bar_in: f64,
    /// Occupation of the input port.
    pub n_bar_ex: f64,
}

impl CavityMode {
    pub fn new(omega_c: f64, kappa: f64, eta: f64, g0: f64) -> Result<Self> {
        let c = Self { omega_c, kappa, eta, g0, n_bar_in: 0.0, n_bar_ex: 0.0 };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.omega_c > 0.0 && self.kappa > 0.0 && self.eta > 0.0 && self.eta <= 1.0 && self.g0 >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "cavity needs omega_c > 0, kappa > 0, 0 < eta <= 1, g0 >= 0 (got {self:?})"
            )));
        }
        if !(self.n_bar_in >= 0.0 && self.n_bar_ex >= 0.0) {
            return Err(Error::InvalidParameter("cavity bath occupations must be >= 0".into()));
        }
        Ok(())
    }

    pub fn kappa_ex(&self) -> f64 {
        self.eta * self.kappa
    }

    pub fn kappa_in(&self) -> f64 {
        (1.0 - self.eta) * self.kappa
    }
}

/// Per-drive quantities derived from the pump power.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DriveState {
    /// Power at the device input (W).
    pub power_w: f64,
    /// Effective detuning `ω_c − ω_d` (rad/s); `−ω_m` for the blue pump.
    pub detuning: f64,
    /// Drive strength `E = √(P κ_ex / ħ ω_d)` (rad/s).
    pub e_amp: f64,
    /// Intracavity photon number.
    pub n_photons: f64,
    /// Enhanced coupling `G = g0 √n` (rad/s).
    pub g_eff: f64,
    /// Cooperativity `4G²/(κ γ_m)`.
    pub coop: f64,
}

/// Chains drive power → intracavity photons → enhanced coupling → cooperativity.
///
/// The photon number uses the total `κ²` in the Lorentzian denominator,
/// `n = E²/(κ² + Δ²)`; for sideband drives (`|Δ| = ω_m ≫ κ`) the choice of
/// `κ²` versus `κ²/4` changes `n` by well under a percent.
pub fn drive_to_cooperativity(
    power_w: f64,
    cavity: &CavityMode,
    mech: &MechanicalMode,
    drive_freq: f64,
) -> Result<DriveState> {
    if !(power_w >= 0.0) {
        return Err(Error::InvalidParameter(format!("drive power must be >= 0, got {power_w}")));
    }
    if !(drive_freq > 0.0) {
        return Err(Error::InvalidParameter(format!("drive frequency must be > 0, got {drive_freq}")));
    }
    cavity.validate()?;
    let detuning = cavity.omega_c - drive_freq;
    let e_amp = (power_w * cavity.kappa_ex() / (HBAR * drive_freq)).sqrt();
    let n_photons = e_amp * e_amp / (cavity.kappa * cavity.kappa + detuning * detuning);
    let g_eff = cavity.g0 * n_photons.sqrt();
    let coop = 4.0 * g_eff * g_eff / (cavity.kappa * mech.gamma_m);
    Ok(DriveState { power_w, detuning, e_amp, n_photons, g_eff, coop })
}

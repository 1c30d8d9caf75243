//! Flat `key = value` device configuration.
//!
//! Frequencies and rates are ordinary frequencies in Hz; they are converted
//! to rad/s when the operating point is built. Lines starting with `#` and
//! blank lines are ignored; unknown keys are rejected.
//!
//! | key | default | meaning |
//! |---|---|---|
//! | `omega_m_hz` | 2.81e6 | mechanical frequency |
//! | `gamma_m_hz` | 6 | mechanical damping |
//! | `t_bath_k` | 0.007 | mechanical bath temperature |
//! | `n_bar_m` | 60 | mechanical occupation, or `auto` for the Bose value at `t_bath_k` |
//! | `omega_c1_hz`, `omega_c2_hz` | 10.17e9, 12.13e9 | cavity resonances |
//! | `kappa1_hz`, `kappa2_hz` | 0.52e6, 0.48e6 | cavity decay rates |
//! | `eta1`, `eta2` | 0.76, 0.67 | external coupling ratios |
//! | `g01_hz`, `g02_hz` | 152, 170 | vacuum couplings |
//! | `n_ex1`, `n_ex2` | 0 | input-port occupations |
//! | `n_in1`, `n_in2` | 0 | intrinsic-bath occupations |
//! | `p_blue_dbm`, `p_red_dbm` | −87.1, −84.4 | pump powers at the device |
//! | `bandwidth_hz` | 100 | detection bandwidth |
//! | `filter` | rect | `rect` or `gaussian` |
//! | `pump_noise_a1`, `pump_noise_a2` | 0 | extra intrinsic occupation per pW of red pump power |
//! | `gain1_db`, `gain2_db` | 83.20, 79.99 | detection chain gains |
//! | `n_add1`, `n_add2` | 8.3, 11.5 | added noise quanta |
//! | `adc_ohm` | 50 | ADC input impedance |
//! | `t_in1_k`, `t_in2_k` | 0.007 | temperatures of the input-noise term used by the estimator |
//! | `cal_t_min_k`, `cal_t_max_k` | 0.007, 4 | calibration load temperature range |
//! | `cal_points` | 10 | number of calibration temperatures |
//! | `cal_rel_noise` | 0.01 | multiplicative noise on synthetic calibration data |

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::params::{drive_to_cooperativity, CavityMode, DriveState, MechanicalMode};
use super::scattering::ScatterParams;
use super::spectrum::{Baths, FilterKind, OutputModel};
use super::stability::{stability_check, StabilityReport};
use crate::constants::{dbm_to_watts, hz_to_rad};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeviceConfig {
    pub omega_m_hz: f64,
    pub gamma_m_hz: f64,
    pub t_bath_k: f64,
    /// `None` means derive from `t_bath_k`.
    pub n_bar_m: Option<f64>,
    pub omega_c_hz: [f64; 2],
    pub kappa_hz: [f64; 2],
    pub eta: [f64; 2],
    pub g0_hz: [f64; 2],
    pub n_ex: [f64; 2],
    pub n_in: [f64; 2],
    pub p_blue_dbm: f64,
    pub p_red_dbm: f64,
    pub bandwidth_hz: f64,
    pub filter: FilterKind,
    pub pump_noise_a: [f64; 2],
    pub gain_db: [f64; 2],
    pub n_add: [f64; 2],
    pub adc_ohm: f64,
    pub t_in_k: [f64; 2],
    pub cal_t_min_k: f64,
    pub cal_t_max_k: f64,
    pub cal_points: usize,
    pub cal_rel_noise: f64,
}

impl Default for DeviceConfig {
    fn default() -> Self {
        Self {
            omega_m_hz: 2.81e6,
            gamma_m_hz: 6.0,
            t_bath_k: 0.007,
            n_bar_m: Some(60.0),
            omega_c_hz: [10.17e9, 12.13e9],
            kappa_hz: [0.52e6, 0.48e6],
            eta: [0.76, 0.67],
            g0_hz: [152.0, 170.0],
            n_ex: [0.0, 0.0],
            n_in: [0.0, 0.0],
            p_blue_dbm: -87.1,
            p_red_dbm: -84.4,
            bandwidth_hz: 100.0,
            filter: FilterKind::Rect,
            pump_noise_a: [0.0, 0.0],
            gain_db: [83.20, 79.99],
            n_add: [8.3, 11.5],
            adc_ohm: 50.0,
            t_in_k: [0.007, 0.007],
            cal_t_min_k: 0.007,
            cal_t_max_k: 4.0,
            cal_points: 10,
            cal_rel_noise: 0.01,
        }
    }
}

fn parse_f64(key: &str, value: &str, line: usize) -> Result<f64> {
    let x: f64 = value.parse().map_err(|_| Error::Parse(format!("line {line}: {key} = {value:?} is not a number")))?;
    if !x.is_finite() {
        return Err(Error::Parse(format!("line {line}: {key} must be finite")));
    }
    Ok(x)
}

impl DeviceConfig {
    pub fn from_path(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    /// Parses config text, starting from the defaults.
    pub fn parse(text: &str) -> Result<Self> {
        let mut c = Self::default();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) =
                content.split_once('=').ok_or_else(|| Error::Parse(format!("line {line}: expected key = value")))?;
            c.set(key.trim(), value.trim(), line)?;
        }
        c.validate()?;
        Ok(c)
    }

    /// Sets one key; `line` is only used in error messages.
    pub fn set(&mut self, key: &str, value: &str, line: usize) -> Result<()> {
        let f = |v: &str| parse_f64(key, v, line);
        match key {
            "omega_m_hz" => self.omega_m_hz = f(value)?,
            "gamma_m_hz" => self.gamma_m_hz = f(value)?,
            "t_bath_k" => self.t_bath_k = f(value)?,
            "n_bar_m" => self.n_bar_m = if value.eq_ignore_ascii_case("auto") { None } else { Some(f(value)?) },
            "omega_c1_hz" => self.omega_c_hz[0] = f(value)?,
            "omega_c2_hz" => self.omega_c_hz[1] = f(value)?,
            "kappa1_hz" => self.kappa_hz[0] = f(value)?,
            "kappa2_hz" => self.kappa_hz[1] = f(value)?,
            "eta1" => self.eta[0] = f(value)?,
            "eta2" => self.eta[1] = f(value)?,
            "g01_hz" => self.g0_hz[0] = f(value)?,
            "g02_hz" => self.g0_hz[1] = f(value)?,
            "n_ex1" => self.n_ex[0] = f(value)?,
            "n_ex2" => self.n_ex[1] = f(value)?,
            "n_in1" => self.n_in[0] = f(value)?,
            "n_in2" => self.n_in[1] = f(value)?,
            "p_blue_dbm" => self.p_blue_dbm = f(value)?,
            "p_red_dbm" => self.p_red_dbm = f(value)?,
            "bandwidth_hz" => self.bandwidth_hz = f(value)?,
            "filter" => self.filter = FilterKind::parse(value)?,
            "pump_noise_a1" => self.pump_noise_a[0] = f(value)?,
            "pump_noise_a2" => self.pump_noise_a[1] = f(value)?,
            "gain1_db" => self.gain_db[0] = f(value)?,
            "gain2_db" => self.gain_db[1] = f(value)?,
            "n_add1" => self.n_add[0] = f(value)?,
            "n_add2" => self.n_add[1] = f(value)?,
            "adc_ohm" => self.adc_ohm = f(value)?,
            "t_in1_k" => self.t_in_k[0] = f(value)?,
            "t_in2_k" => self.t_in_k[1] = f(value)?,
            "cal_t_min_k" => self.cal_t_min_k = f(value)?,
            "cal_t_max_k" => self.cal_t_max_k = f(value)?,
            "cal_points" => {
                self.cal_points =
                    value.parse().map_err(|_| Error::Parse(format!("line {line}: cal_points must be an integer")))?
            }
            "cal_rel_noise" => self.cal_rel_noise = f(value)?,
            other => return Err(Error::Parse(format!("line {line}: unknown key {other:?}"))),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("omega_m_hz", self.omega_m_hz),
            ("gamma_m_hz", self.gamma_m_hz),
            ("omega_c1_hz", self.omega_c_hz[0]),
            ("omega_c2_hz", self.omega_c_hz[1]),
            ("kappa1_hz", self.kappa_hz[0]),
            ("kappa2_hz", self.kappa_hz[1]),
            ("bandwidth_hz", self.bandwidth_hz),
            ("adc_ohm", self.adc_ohm),
        ];
        for (k, v) in positive {
            if !(v > 0.0) {
                return Err(Error::InvalidParameter(format!("{k} must be > 0, got {v}")));
            }
        }
        let non_negative = [
            ("t_bath_k", self.t_bath_k),
            ("g01_hz", self.g0_hz[0]),
            ("g02_hz", self.g0_hz[1]),
            ("n_ex1", self.n_ex[0]),
            ("n_ex2", self.n_ex[1]),
            ("n_in1", self.n_in[0]),
            ("n_in2", self.n_in[1]),
            ("pump_noise_a1", self.pump_noise_a[0]),
            ("pump_noise_a2", self.pump_noise_a[1]),
            ("n_add1", self.n_add[0]),
            ("n_add2", self.n_add[1]),
            ("t_in1_k", self.t_in_k[0]),
            ("t_in2_k", self.t_in_k[1]),
            ("cal_rel_noise", self.cal_rel_noise),
            ("n_bar_m", self.n_bar_m.unwrap_or(0.0)),
        ];
        for (k, v) in non_negative {
            if !(v >= 0.0) {
                return Err(Error::InvalidParameter(format!("{k} must be >= 0, got {v}")));
            }
        }
        for (k, v) in [("eta1", self.eta[0]), ("eta2", self.eta[1])] {
            if !(v > 0.0 && v <= 1.0) {
                return Err(Error::InvalidParameter(format!("{k} must be in (0, 1], got {v}")));
            }
        }
        if !(self.cal_t_min_k > 0.0 && self.cal_t_max_k > self.cal_t_min_k) {
            return Err(Error::InvalidParameter("need 0 < cal_t_min_k < cal_t_max_k".into()));
        }
        Ok(())
    }

    pub fn mechanical_mode(&self) -> Result<MechanicalMode> {
        let (w, g) = (hz_to_rad(self.omega_m_hz), hz_to_rad(self.gamma_m_hz));
        match self.n_bar_m {
            Some(n) => MechanicalMode::with_occupation(w, g, self.t_bath_k, n),
            None => MechanicalMode::from_temperature(w, g, self.t_bath_k),
        }
    }

    pub fn cavity(&self, j: usize) -> Result<CavityMode> {
        let mut c = CavityMode::new(
            hz_to_rad(self.omega_c_hz[j]),
            hz_to_rad(self.kappa_hz[j]),
            self.eta[j],
            hz_to_rad(self.g0_hz[j]),
        )?;
        c.n_bar_ex = self.n_ex[j];
        c.n_bar_in = self.n_in[j];
        Ok(c)
    }

    /// Operating point at the configured pump powers.
    pub fn operating_point(&self) -> Result<OperatingPoint> {
        self.operating_point_at(self.p_red_dbm)
    }

    /// Operating point with the red pump set to `p_red_dbm`. Pump-induced
    /// noise adds `a_j · P_r[pW]` to each intrinsic-bath occupation.
    pub fn operating_point_at(&self, p_red_dbm: f64) -> Result<OperatingPoint> {
        self.validate()?;
        let mech = self.mechanical_mode()?;
        let cav = [self.cavity(0)?, self.cavity(1)?];
        let blue =
            drive_to_cooperativity(dbm_to_watts(self.p_blue_dbm), &cav[0], &mech, cav[0].omega_c + mech.omega_m)?;
        let red = drive_to_cooperativity(dbm_to_watts(p_red_dbm), &cav[1], &mech, cav[1].omega_c - mech.omega_m)?;
        let p_red_pw = dbm_to_watts(p_red_dbm) * 1e12;
        let n_in =
            [cav[0].n_bar_in + self.pump_noise_a[0] * p_red_pw, cav[1].n_bar_in + self.pump_noise_a[1] * p_red_pw];
        let scatter = ScatterParams {
            c1: blue.coop,
            c2: red.coop,
            eta1: cav[0].eta,
            eta2: cav[1].eta,
            kappa1: cav[0].kappa,
            kappa2: cav[1].kappa,
            gamma_m: mech.gamma_m,
        };
        let stability = stability_check(blue.coop, red.coop, cav[0].kappa, cav[1].kappa, mech.gamma_m);
        let model =
            OutputModel { scatter, baths: Baths { n_m: mech.n_bar_m, n_ex: [cav[0].n_bar_ex, cav[1].n_bar_ex], n_in } };
        Ok(OperatingPoint { mech, cavities: cav, blue, red, stability, model })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OperatingPoint {
    pub mech: MechanicalMode,
    pub cavities: [CavityMode; 2],
    pub blue: DriveState,
    pub red: DriveState,
    pub stability: StabilityReport,
    pub model: OutputModel,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_text_gives_defaults() {
        assert_eq!(DeviceConfig::parse("# nothing\n\n").unwrap(), DeviceConfig::default());
    }

    #[test]
    fn parses_keys_and_comments() {
        let c = DeviceConfig::parse("p_red_dbm = -80 # louder\nfilter=gaussian\nn_bar_m = auto\n").unwrap();
        assert_eq!(c.p_red_dbm, -80.0);
        assert_eq!(c.filter, FilterKind::Gaussian);
        assert_eq!(c.n_bar_m, None);
        let m = c.mechanical_mode().unwrap();
        assert!((m.n_bar_m - 51.4).abs() < 0.1);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(DeviceConfig::parse("nope = 1"), Err(Error::Parse(_))));
        assert!(matches!(DeviceConfig::parse("eta1 = x"), Err(Error::Parse(_))));
        assert!(matches!(DeviceConfig::parse("just text"), Err(Error::Parse(_))));
        assert!(matches!(DeviceConfig::parse("eta1 = 1.5"), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn default_operating_point() {
        let op = DeviceConfig::default().operating_point().unwrap();
        assert!((op.blue.coop - 67.0).abs() / 67.0 < 0.02);
        assert!((op.red.coop - 113.3).abs() / 113.3 < 0.02);
        assert!(op.stability.stable);
        assert_eq!(op.model.baths.n_m, 60.0);
    }

    #[test]
    fn pump_noise_scales_with_red_power() {
        let c = DeviceConfig { pump_noise_a: [0.5, 0.25], ..Default::default() };
        let op = c.operating_point_at(-90.0).unwrap();
        let pw = 1.0; // −90 dBm is 1 pW
        assert!((op.model.baths.n_in[0] - 0.5 * pw).abs() < 1e-12);
        assert!((op.model.baths.n_in[1] - 0.25 * pw).abs() < 1e-12);
    }
}

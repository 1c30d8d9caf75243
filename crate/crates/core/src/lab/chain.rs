use std::io::{Read, Write};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::constants::{half_coth_noise, HBAR};
use crate::error::{Error, Result};

/// Detection chain of one output channel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RfChain {
    /// Total system gain (dB).
    pub gain_db: f64,
    /// Added noise quanta referred to the device output.
    pub n_add: f64,
    /// ADC input impedance (Ω).
    pub r_ohm: f64,
    /// Measurement bandwidth (Hz).
    pub bandwidth_hz: f64,
    /// Carrier angular frequency (rad/s).
    pub omega_c: f64,
    /// `ζ = 10^(gain/10) R B ħω_c`: voltage variance per quantum.
    pub zeta: f64,
}

impl RfChain {
    pub fn new(gain_db: f64, n_add: f64, r_ohm: f64, bandwidth_hz: f64, omega_c: f64) -> Result<Self> {
        Self::check(n_add, r_ohm, bandwidth_hz, omega_c)?;
        if !gain_db.is_finite() {
            return Err(Error::InvalidParameter(format!("gain must be finite, got {gain_db}")));
        }
        let zeta = 10f64.powf(gain_db / 10.0) * Self::unit(r_ohm, bandwidth_hz, omega_c);
        Ok(Self { gain_db, n_add, r_ohm, bandwidth_hz, omega_c, zeta })
    }

    pub fn from_zeta(zeta: f64, n_add: f64, r_ohm: f64, bandwidth_hz: f64, omega_c: f64) -> Result<Self> {
        Self::check(n_add, r_ohm, bandwidth_hz, omega_c)?;
        if !(zeta > 0.0 && zeta.is_finite()) {
            return Err(Error::InvalidParameter(format!("zeta must be > 0, got {zeta}")));
        }
        let gain_db = 10.0 * (zeta / Self::unit(r_ohm, bandwidth_hz, omega_c)).log10();
        Ok(Self { gain_db, n_add, r_ohm, bandwidth_hz, omega_c, zeta })
    }

    fn unit(r_ohm: f64, bandwidth_hz: f64, omega_c: f64) -> f64 {
        r_ohm * bandwidth_hz * HBAR * omega_c
    }

    fn check(n_add: f64, r_ohm: f64, bandwidth_hz: f64, omega_c: f64) -> Result<()> {
        if !(n_add >= 0.0 && r_ohm > 0.0 && bandwidth_hz > 0.0 && omega_c > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "chain needs n_add >= 0 and positive R, B, omega_c (got {n_add}, {r_ohm}, {bandwidth_hz}, {omega_c})"
            )));
        }
        Ok(())
    }
}

/// Forward calibration model `N = ζ (½coth(ħω/2k_BT) + n_add)`.
pub fn noise_density(temp_k: f64, chain: &RfChain) -> f64 {
    chain.zeta * (half_coth_noise(chain.omega_c, temp_k) + chain.n_add)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CalibrationPoint {
    pub temp_k: f64,
    pub noise_v2hz: f64,
    /// Standard deviation over repeats; non-positive means unknown.
    pub sigma: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CalibrationFit {
    pub gain_db: f64,
    pub n_add: f64,
    pub zeta: f64,
    pub gain_db_se: f64,
    pub n_add_se: f64,
    pub zeta_se: f64,
    /// Points used in the fit.
    pub n_points: usize,
    /// Reduced chi-square (or residual variance for unweighted fits).
    pub chi2_red: f64,
}

impl CalibrationFit {
    pub fn chain(&self, r_ohm: f64, bandwidth_hz: f64, omega_c: f64) -> Result<RfChain> {
        RfChain::from_zeta(self.zeta, self.n_add.max(0.0), r_ohm, bandwidth_hz, omega_c)
    }
}

/// Straight-line fit `N = ζ x + ζ n_add` with `x = ½coth(ħω/2k_BT)`.
///
/// Points are weighted by `1/σ²` when every `σ > 0`, otherwise equally.
/// Standard errors come from the regression covariance scaled by the
/// reduced chi-square; gain and added noise follow by error propagation.
pub fn calibrate_chain(
    points: &[CalibrationPoint],
    omega_c: f64,
    r_ohm: f64,
    bandwidth_hz: f64,
) -> Result<CalibrationFit> {
    if points.len() < 3 {
        return Err(Error::InsufficientPoints { need: 3, got: points.len() });
    }
    for p in points {
        if !(p.temp_k > 0.0 && p.noise_v2hz > 0.0 && p.noise_v2hz.is_finite()) {
            return Err(Error::InvalidParameter(format!("bad calibration point {p:?}")));
        }
    }
    let xs: Vec<f64> = points.iter().map(|p| half_coth_noise(omega_c, p.temp_k)).collect();
    let (lo, hi) = xs.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)));
    if hi - lo <= 1e-12 {
        return Err(Error::DegenerateDesign);
    }
    let weighted = points.iter().all(|p| p.sigma > 0.0);
    let ws: Vec<f64> = points.iter().map(|p| if weighted { 1.0 / (p.sigma * p.sigma) } else { 1.0 }).collect();

    // centred normal equations for stability
    let sw: f64 = ws.iter().sum();
    let xbar = xs.iter().zip(&ws).map(|(x, w)| w * x).sum::<f64>() / sw;
    let ybar = points.iter().zip(&ws).map(|(p, w)| w * p.noise_v2hz).sum::<f64>() / sw;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for ((x, p), w) in xs.iter().zip(points).zip(&ws) {
        sxx += w * (x - xbar) * (x - xbar);
        sxy += w * (x - xbar) * (p.noise_v2hz - ybar);
    }
    let slope = sxy / sxx;
    let intercept = ybar - slope * xbar;
    if !(slope > 0.0) {
        return Err(Error::NumericallyIllConditioned(format!("fitted zeta = {slope:e} is not positive")));
    }

    let n = points.len();
    let chi2: f64 =
        xs.iter().zip(points).zip(&ws).map(|((x, p), w)| w * (p.noise_v2hz - intercept - slope * x).powi(2)).sum();
    let chi2_red = chi2 / (n - 2) as f64;
    let var_slope = chi2_red / sxx;
    let var_int = chi2_red * (1.0 / sw + xbar * xbar / sxx);
    let cov = -chi2_red * xbar / sxx;

    let zeta = slope;
    let n_add = intercept / slope;
    let unit = r_ohm * bandwidth_hz * HBAR * omega_c;
    let gain_db = 10.0 * (zeta / unit).log10();
    let gain_db_se = 10.0 / std::f64::consts::LN_10 * var_slope.sqrt() / zeta;
    // n_add = b/a: ∂/∂a = −b/a², ∂/∂b = 1/a
    let var_nadd = (intercept * intercept / zeta.powi(4)) * var_slope + var_int / (zeta * zeta)
        - 2.0 * intercept / zeta.powi(3) * cov;
    Ok(CalibrationFit {
        gain_db,
        n_add,
        zeta,
        gain_db_se,
        n_add_se: var_nadd.max(0.0).sqrt(),
        zeta_se: var_slope.sqrt(),
        n_points: n,
        chi2_red,
    })
}

/// `count` load temperatures evenly spaced over `[t_min, t_max]`.
pub fn linear_temperatures(t_min: f64, t_max: f64, count: usize) -> Result<Vec<f64>> {
    if count < 2 || !(t_min > 0.0 && t_max > t_min) {
        return Err(Error::InvalidParameter(format!(
            "need count >= 2 and 0 < t_min < t_max (got {count}, {t_min}, {t_max})"
        )));
    }
    Ok((0..count).map(|k| t_min + (t_max - t_min) * k as f64 / (count - 1) as f64).collect())
}

/// Synthetic calibration data: the forward model with multiplicative
/// Gaussian noise of relative size `rel_noise` (ChaCha8 seeded by `seed`).
pub fn synthetic_calibration(
    chain: &RfChain,
    temps: &[f64],
    rel_noise: f64,
    seed: u64,
) -> Result<Vec<CalibrationPoint>> {
    if !(rel_noise >= 0.0) {
        return Err(Error::InvalidParameter(format!("relative noise must be >= 0, got {rel_noise}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    temps
        .iter()
        .map(|&t| {
            if !(t > 0.0) {
                return Err(Error::InvalidParameter(format!("temperature must be > 0, got {t}")));
            }
            let truth = noise_density(t, chain);
            let z: f64 = StandardNormal.sample(&mut rng);
            Ok(CalibrationPoint { temp_k: t, noise_v2hz: truth * (1.0 + rel_noise * z), sigma: rel_noise * truth })
        })
        .collect()
}

pub fn write_calibration_csv<W: Write>(points: &[CalibrationPoint], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["temp_k", "noise_v2hz", "sigma"])?;
    for p in points {
        w.write_record([format!("{:.16e}", p.temp_k), format!("{:.16e}", p.noise_v2hz), format!("{:.16e}", p.sigma)])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_calibration_csv<R: Read>(input: R) -> Result<Vec<CalibrationPoint>> {
    let mut rdr = csv::ReaderBuilder::new().comment(Some(b'#')).trim(csv::Trim::All).from_reader(input);
    let mut out = Vec::new();
    for (k, rec) in rdr.records().enumerate() {
        let rec = rec?;
        if rec.len() != 3 {
            return Err(Error::Parse(format!("calibration row {}: expected 3 columns", k + 1)));
        }
        let num = |i: usize| {
            rec[i]
                .parse::<f64>()
                .map_err(|_| Error::Parse(format!("calibration row {}: bad number {:?}", k + 1, &rec[i])))
        };
        out.push(CalibrationPoint { temp_k: num(0)?, noise_v2hz: num(1)?, sigma: num(2)? });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::hz_to_rad;

    fn chain() -> RfChain {
        RfChain::new(83.20, 8.3, 50.0, 100.0, hz_to_rad(10.17e9)).unwrap()
    }

    #[test]
    fn zeta_invariant_both_paths() {
        let a = chain();
        let expected = 10f64.powf(8.32) * 50.0 * 100.0 * HBAR * hz_to_rad(10.17e9);
        assert!((a.zeta - expected).abs() < 1e-12 * expected);
        let b = RfChain::from_zeta(a.zeta, 8.3, 50.0, 100.0, a.omega_c).unwrap();
        assert!((b.gain_db - 83.20).abs() < 1e-12);
        assert!((b.zeta - a.zeta).abs() < 1e-12 * a.zeta);
    }

    #[test]
    fn cold_limit() {
        let c = chain();
        assert!((noise_density(1e-6, &c) - c.zeta * 8.8).abs() < 1e-12 * c.zeta);
    }

    #[test]
    fn noiseless_recovery() {
        let c = chain();
        let temps = linear_temperatures(0.007, 0.3, 10).unwrap();
        let pts = synthetic_calibration(&c, &temps, 0.0, 1).unwrap();
        let fit = calibrate_chain(&pts, c.omega_c, 50.0, 100.0).unwrap();
        assert!((fit.gain_db - 83.20).abs() < 1e-9);
        assert!((fit.n_add - 8.3).abs() < 1e-9);
    }

    #[test]
    fn wide_temperature_range_recovers_with_noise() {
        let c = chain();
        let temps = linear_temperatures(0.007, 4.0, 10).unwrap();
        let pts = synthetic_calibration(&c, &temps, 0.01, 3).unwrap();
        let fit = calibrate_chain(&pts, c.omega_c, 50.0, 100.0).unwrap();
        assert!((fit.gain_db - 83.20).abs() < 4.0 * fit.gain_db_se + 1e-12);
        assert!((fit.n_add - 8.3).abs() < 4.0 * fit.n_add_se + 1e-12);
        assert!(fit.gain_db_se < 0.1 && fit.n_add_se < 0.3, "{fit:?}");
    }

    #[test]
    fn design_errors() {
        let c = chain();
        let pts = synthetic_calibration(&c, &[0.01, 0.02], 0.0, 0).unwrap();
        assert!(matches!(calibrate_chain(&pts, c.omega_c, 50.0, 100.0), Err(Error::InsufficientPoints { .. })));
        // all deep in the quantum limit: coth term identical
        let pts = synthetic_calibration(&c, &[0.001, 0.002, 0.003], 0.0, 0).unwrap();
        assert!(matches!(calibrate_chain(&pts, c.omega_c, 50.0, 100.0), Err(Error::DegenerateDesign)));
    }

    #[test]
    fn csv_round_trip() {
        let c = chain();
        let pts = synthetic_calibration(&c, &[0.01, 0.1, 0.2], 0.01, 9).unwrap();
        let mut buf = Vec::new();
        write_calibration_csv(&pts, &mut buf).unwrap();
        assert_eq!(read_calibration_csv(buf.as_slice()).unwrap(), pts);
    }
}

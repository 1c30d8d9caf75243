use std::fmt::Write as _;
use std::fs::File;
use std::path::Path;

use mechent_core::constants::{hz_to_rad, rad_to_hz};
use mechent_core::error::Error;
use mechent_core::gaussian::{ebit_rate, entanglement_report, epr_duan, CovMat4, EntanglementReport};
use mechent_core::lab::{
    calibrate_chain, linear_temperatures, read_calibration_csv, synthetic_calibration, CalibrationFit,
    CalibrationPoint, RfChain,
};
use mechent_core::model::{filtered_output_cm, power_sweep, write_sweep_csv, DeviceConfig};
use serde::Serialize;

use crate::output::{emit, json_bytes};
use crate::{load_config, AngleArgs, CalibrateArgs, Cli, Failure, Format, MetricsArgs, Stage, SweepArgs};

/// Seeds of the synthetic calibration sweeps; shared with `experiment`.
pub fn calibration_seed(seed: u64, channel: usize) -> u64 {
    seed.wrapping_mul(4).wrapping_add(2 + channel as u64)
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct DeviceSummary {
    pub c1: f64,
    pub c2: f64,
    pub gamma_eff_hz: f64,
    pub stable: bool,
    pub ebit_rate: f64,
}

/// Filtered output state of the configured device, rejecting unstable points.
pub fn device_state(cfg: &DeviceConfig) -> Result<(CovMat4, DeviceSummary), Failure> {
    let op = cfg.operating_point().stage("model")?;
    if !op.stability.stable {
        return Err(Error::Unstable(format!(
            "C1 = {:.3}, C2 = {:.3}, gamma_eff/2pi = {:.3} Hz",
            op.blue.coop,
            op.red.coop,
            rad_to_hz(op.stability.gamma_eff)
        )))
        .stage("model");
    }
    let v = filtered_output_cm(&op.model, cfg.bandwidth_hz, cfg.filter).stage("model")?;
    let report = entanglement_report(&v).stage("metrics")?;
    let gamma_eff_hz = rad_to_hz(op.stability.gamma_eff);
    let summary = DeviceSummary {
        c1: op.blue.coop,
        c2: op.red.coop,
        gamma_eff_hz,
        stable: true,
        ebit_rate: ebit_rate(report.e_f, gamma_eff_hz).stage("metrics")?,
    };
    Ok((v, summary))
}

fn read_cm(path: &Path) -> Result<CovMat4, Failure> {
    let text = std::fs::read_to_string(path).stage("input")?;
    CovMat4::from_json(&text).stage("input")
}

fn cm_source(cli: &Cli, cm: Option<&Path>) -> Result<(CovMat4, Option<DeviceSummary>), Failure> {
    match cm {
        Some(p) => Ok((read_cm(p)?, None)),
        None => {
            let (v, s) = device_state(&load_config(cli)?)?;
            Ok((v, Some(s)))
        }
    }
}

#[derive(Serialize)]
struct MetricsOut {
    source: &'static str,
    #[serde(flatten)]
    report: EntanglementReport,
    cm: [[f64; 4]; 4],
    #[serde(skip_serializing_if = "Option::is_none")]
    device: Option<DeviceSummary>,
}

fn key_value_csv(value: &serde_json::Value) -> String {
    let mut out = String::from("key,value\n");
    if let serde_json::Value::Object(map) = value {
        for (k, v) in map {
            match v {
                serde_json::Value::Number(n) => {
                    let _ = writeln!(out, "{k},{:.16e}", n.as_f64().unwrap_or(f64::NAN));
                }
                serde_json::Value::Null => {
                    let _ = writeln!(out, "{k},");
                }
                serde_json::Value::Bool(b) => {
                    let _ = writeln!(out, "{k},{b}");
                }
                serde_json::Value::String(s) => {
                    let _ = writeln!(out, "{k},{s}");
                }
                _ => {}
            }
        }
    }
    out
}

pub fn metrics(cli: &Cli, args: &MetricsArgs) -> Result<(), Failure> {
    let (cm, device) = cm_source(cli, args.cm.as_deref())?;
    let report = entanglement_report(&cm).stage("metrics")?;
    let out = MetricsOut { source: if device.is_some() { "device" } else { "cm" }, report, cm: cm.as_array(), device };
    let bytes = match cli.format.unwrap_or(Format::Json) {
        Format::Json => json_bytes(&out)?,
        Format::Csv => {
            let mut flat = serde_json::to_value(&out.report).stage("output")?;
            if let (Some(d), serde_json::Value::Object(m)) = (&out.device, &mut flat) {
                if let serde_json::Value::Object(extra) = serde_json::to_value(d).stage("output")? {
                    m.extend(extra);
                }
            }
            key_value_csv(&flat).into_bytes()
        }
    };
    emit(cli.out.as_deref(), &bytes)
}

fn sweep_grid(args: &SweepArgs) -> Result<Vec<f64>, Failure> {
    if let Some(g) = &args.grid {
        return Ok(g.clone());
    }
    if !(args.step > 0.0 && args.to >= args.from) {
        return Err(Error::InvalidParameter(format!(
            "need --step > 0 and --to >= --from (got {}, {}, {})",
            args.step, args.from, args.to
        )))
        .stage("sweep");
    }
    let n = ((args.to - args.from) / args.step + 1e-9).floor() as usize;
    Ok((0..=n).map(|k| args.from + k as f64 * args.step).collect())
}

pub fn sweep(cli: &Cli, args: &SweepArgs) -> Result<(), Failure> {
    let cfg = load_config(cli)?;
    let grid = sweep_grid(args)?;
    let rows = power_sweep(&cfg, &grid).stage("sweep")?;
    if rows.iter().all(|r| r.error.as_deref().is_some_and(|e| e != "unstable")) {
        return Err(Error::NumericallyIllConditioned(format!(
            "every sweep row failed; first: {}",
            rows[0].error.as_deref().unwrap_or_default()
        )))
        .stage("sweep");
    }
    let bytes = match cli.format.unwrap_or(Format::Csv) {
        Format::Json => json_bytes(&rows)?,
        Format::Csv => {
            let mut buf = Vec::new();
            write_sweep_csv(&rows, &mut buf).stage("output")?;
            buf
        }
    };
    emit(cli.out.as_deref(), &bytes)
}

#[derive(Serialize)]
struct AngleRow {
    phi: f64,
    x_minus_var: f64,
    p_plus_var: f64,
    delta_epr: f64,
}

pub fn angle(cli: &Cli, args: &AngleArgs) -> Result<(), Failure> {
    if args.n_angles == 0 {
        return Err(Error::InvalidParameter("--n-angles must be >= 1".into())).stage("angle");
    }
    let (cm, _) = cm_source(cli, args.cm.as_deref())?;
    let rows: Vec<AngleRow> = (0..args.n_angles)
        .map(|k| {
            let phi = std::f64::consts::TAU * k as f64 / args.n_angles as f64;
            let d = epr_duan(&cm, phi);
            AngleRow { phi, x_minus_var: d.x_minus_var, p_plus_var: d.p_plus_var, delta_epr: d.delta_epr }
        })
        .collect();
    let bytes = match cli.format.unwrap_or(Format::Csv) {
        Format::Json => json_bytes(&rows)?,
        Format::Csv => {
            let mut s = String::from(
                "# phi: mode-1 detector angle (rad); x_minus_var, p_plus_var: EPR variances (vacuum 1/2); delta_epr: their sum\n\
                 phi,x_minus_var,p_plus_var,delta_epr\n",
            );
            for r in &rows {
                let _ = writeln!(s, "{:.16e},{:.16e},{:.16e},{:.16e}", r.phi, r.x_minus_var, r.p_plus_var, r.delta_epr);
            }
            s.into_bytes()
        }
    };
    emit(cli.out.as_deref(), &bytes)
}

#[derive(Debug, Clone, Serialize)]
pub struct ChannelCalibration {
    pub channel: usize,
    pub fit: CalibrationFit,
    /// Chain parameters the synthetic data was generated from.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub truth: Option<RfChain>,
    pub points: Vec<CalibrationPoint>,
}

/// Nominal chain of channel `j` (0-based) from the configuration.
pub fn config_chain(cfg: &DeviceConfig, j: usize) -> Result<RfChain, Failure> {
    RfChain::new(cfg.gain_db[j], cfg.n_add[j], cfg.adc_ohm, cfg.bandwidth_hz, hz_to_rad(cfg.omega_c_hz[j]))
        .stage("config")
}

/// Synthetic load sweep of channel `j` fitted back to a chain.
pub fn synthetic_channel(cfg: &DeviceConfig, j: usize, seed: u64) -> Result<ChannelCalibration, Failure> {
    let truth = config_chain(cfg, j)?;
    let temps = linear_temperatures(cfg.cal_t_min_k, cfg.cal_t_max_k, cfg.cal_points).stage("calibration")?;
    let points =
        synthetic_calibration(&truth, &temps, cfg.cal_rel_noise, calibration_seed(seed, j)).stage("calibration")?;
    let fit = calibrate_chain(&points, truth.omega_c, cfg.adc_ohm, cfg.bandwidth_hz).stage("calibration")?;
    Ok(ChannelCalibration { channel: j + 1, fit, truth: Some(truth), points })
}

pub fn calibration_csv(channels: &[ChannelCalibration]) -> String {
    let mut s = String::from("channel,gain_db,gain_db_se,n_add,n_add_se,zeta,zeta_se,n_points,chi2_red\n");
    for c in channels {
        let f = &c.fit;
        let _ = writeln!(
            s,
            "{},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{},{:.16e}",
            c.channel, f.gain_db, f.gain_db_se, f.n_add, f.n_add_se, f.zeta, f.zeta_se, f.n_points, f.chi2_red
        );
    }
    s
}

pub fn calibrate(cli: &Cli, args: &CalibrateArgs) -> Result<(), Failure> {
    let cfg = load_config(cli)?;
    let channels = match &args.input {
        Some(path) => {
            let j = args.channel as usize - 1;
            let points = read_calibration_csv(File::open(path).stage("input")?).stage("input")?;
            let omega = hz_to_rad(cfg.omega_c_hz[j]);
            let fit = calibrate_chain(&points, omega, cfg.adc_ohm, cfg.bandwidth_hz).stage("calibration")?;
            vec![ChannelCalibration { channel: j + 1, fit, truth: None, points }]
        }
        None => vec![synthetic_channel(&cfg, 0, cli.seed)?, synthetic_channel(&cfg, 1, cli.seed)?],
    };
    let bytes = match cli.format.unwrap_or(Format::Json) {
        Format::Json => json_bytes(&channels)?,
        Format::Csv => calibration_csv(&channels).into_bytes(),
    };
    emit(cli.out.as_deref(), &bytes)
}

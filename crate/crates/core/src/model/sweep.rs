use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::DeviceConfig;
use super::spectrum::filtered_output_cm;
use crate::error::{Error, Result};
use crate::gaussian::entanglement_report;

/// One grid point of a red-pump power sweep. Metrics are `None` where the
/// operating point is unstable or a stage failed (see `error`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub p_red_dbm: f64,
    pub c1: f64,
    pub c2: f64,
    pub c_diff: f64,
    pub stable: bool,
    pub delta_epr: Option<f64>,
    pub e_n: Option<f64>,
    pub discord: Option<f64>,
    pub error: Option<String>,
}

/// Evaluates the filtered output state at every red-pump power in
/// `p_red_grid` (dBm, strictly monotone) with the blue pump fixed.
pub fn power_sweep(config: &DeviceConfig, p_red_grid: &[f64]) -> Result<Vec<SweepRow>> {
    if p_red_grid.is_empty() {
        return Err(Error::EmptyRange("empty power grid".into()));
    }
    if p_red_grid.iter().any(|p| !p.is_finite()) {
        return Err(Error::InvalidParameter("power grid contains non-finite values".into()));
    }
    let increasing = p_red_grid.windows(2).all(|w| w[1] > w[0]);
    let decreasing = p_red_grid.windows(2).all(|w| w[1] < w[0]);
    if !(increasing || decreasing) {
        return Err(Error::InvalidParameter("power grid must be strictly monotone".into()));
    }
    config.validate()?;
    Ok(p_red_grid.par_iter().map(|&p| sweep_point(config, p)).collect())
}

fn sweep_point(config: &DeviceConfig, p_red_dbm: f64) -> SweepRow {
    let mut row = SweepRow {
        p_red_dbm,
        c1: f64::NAN,
        c2: f64::NAN,
        c_diff: f64::NAN,
        stable: false,
        delta_epr: None,
        e_n: None,
        discord: None,
        error: None,
    };
    let op = match config.operating_point_at(p_red_dbm) {
        Ok(op) => op,
        Err(e) => {
            row.error = Some(e.to_string());
            return row;
        }
    };
    row.c1 = op.blue.coop;
    row.c2 = op.red.coop;
    row.c_diff = op.red.coop - op.blue.coop;
    row.stable = op.stability.stable;
    if !row.stable {
        row.error = Some("unstable".into());
        return row;
    }
    match filtered_output_cm(&op.model, config.bandwidth_hz, config.filter).and_then(|v| entanglement_report(&v)) {
        Ok(r) => {
            row.delta_epr = Some(r.delta_epr);
            row.e_n = Some(r.e_n);
            row.discord = r.discord;
        }
        Err(e) => row.error = Some(e.to_string()),
    }
    row
}

pub const SWEEP_COLUMNS: [&str; 9] =
    ["p_red_dbm", "c1", "c2", "c2_minus_c1", "stable", "delta_epr", "e_n", "discord", "error"];

fn fmt_opt(x: Option<f64>) -> String {
    x.map(|v| format!("{v:.16e}")).unwrap_or_default()
}

/// Writes the sweep as CSV: one `#` comment line describing the columns,
/// a header row, then one row per grid point. Floats carry 17 significant
/// digits; missing metrics are empty fields.
pub fn write_sweep_csv<W: Write>(rows: &[SweepRow], out: W) -> Result<()> {
    let mut out = out;
    writeln!(
        out,
        "# red pump power (dBm), cooperativities, Duan parameter, log-negativity (bits), discord (bits); metrics empty where unstable"
    )?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SWEEP_COLUMNS)?;
    for r in rows {
        w.write_record([
            format!("{:.16e}", r.p_red_dbm),
            format!("{:.16e}", r.c1),
            format!("{:.16e}", r.c2),
            format!("{:.16e}", r.c_diff),
            r.stable.to_string(),
            fmt_opt(r.delta_epr),
            fmt_opt(r.e_n),
            fmt_opt(r.discord),
            r.error.clone().unwrap_or_default(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Reads CSV written by [`write_sweep_csv`].
pub fn read_sweep_csv<R: std::io::Read>(input: R) -> Result<Vec<SweepRow>> {
    let mut rdr = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(input);
    let num = |s: &str| -> Result<f64> { s.parse::<f64>().map_err(|_| Error::Parse(format!("bad number {s:?}"))) };
    let opt = |s: &str| -> Result<Option<f64>> {
        if s.is_empty() {
            Ok(None)
        } else {
            num(s).map(Some)
        }
    };
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        if rec.len() != SWEEP_COLUMNS.len() {
            return Err(Error::Parse(format!("expected {} columns, got {}", SWEEP_COLUMNS.len(), rec.len())));
        }
        rows.push(SweepRow {
            p_red_dbm: num(&rec[0])?,
            c1: num(&rec[1])?,
            c2: num(&rec[2])?,
            c_diff: num(&rec[3])?,
            stable: rec[4].parse().map_err(|_| Error::Parse(format!("bad bool {:?}", &rec[4])))?,
            delta_epr: opt(&rec[5])?,
            e_n: opt(&rec[6])?,
            discord: opt(&rec[7])?,
            error: if rec[8].is_empty() { None } else { Some(rec[8].to_string()) },
        });
    }
    Ok(rows)
}

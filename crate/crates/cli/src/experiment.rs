//! `experiment`: model → true CM → calibration → sampling → estimation →
//! metrics → histograms, with a manifest of inputs, seeds and output hashes.
//!
//! Batches are drawn through the configured (true) chains, exported to
//! voltages and converted back to quadratures with the fitted chains, so
//! calibration error propagates into the estimate.

use std::collections::BTreeMap;
use std::path::Path;

use mechent_core::constants::hz_to_rad;
use mechent_core::gaussian::{entanglement_report, epr_duan_optimal, CovMat4, EntanglementReport, Quadrature};
use mechent_core::lab::{
    difference_histogram, estimate_cm, from_voltages, sample_quadratures, to_voltages, write_batch, write_batch_csv,
    write_calibration_csv, write_voltages_csv, CmEstimate, DuanEstimate, QuadratureBatch,
};
use mechent_core::model::DeviceConfig;
use serde::Serialize;

use crate::commands::{calibration_csv, device_state, synthetic_channel, DeviceSummary};
use crate::output::{json_bytes, sha256_hex, ArtifactDir};
use crate::{load_config, Cli, ExperimentArgs, Failure, Stage};

const PAIRS: [(Quadrature, Quadrature); 4] = [
    (Quadrature::X1, Quadrature::X2),
    (Quadrature::P1, Quadrature::P2),
    (Quadrature::X1, Quadrature::P2),
    (Quadrature::P1, Quadrature::X2),
];

#[derive(Serialize)]
struct Seeds {
    master: u64,
    on: u64,
    off: u64,
    calibration: [u64; 2],
}

#[derive(Serialize)]
struct Manifest<'a> {
    tool: &'static str,
    version: &'static str,
    command: &'static str,
    seeds: Seeds,
    n_on: usize,
    n_off: usize,
    bins: usize,
    config: &'a DeviceConfig,
    #[serde(skip_serializing_if = "Option::is_none")]
    config_sha256: Option<String>,
    outputs: &'a BTreeMap<String, String>,
}

#[derive(Serialize)]
struct Metrics {
    device: DeviceSummary,
    model: EntanglementReport,
    /// Metrics of the estimate projected to normal form.
    estimate: EntanglementReport,
    /// Duan quantities of the raw estimate at its own optimal angle.
    estimate_duan: DuanEstimate,
    delta_epr_error_se: f64,
}

#[derive(Serialize)]
struct EstimateOut<'a> {
    #[serde(flatten)]
    estimate: &'a CmEstimate,
    normal_form: [[f64; 4]; 4],
    optimal_angle: f64,
}

fn batch_bytes(b: &QuadratureBatch) -> Result<Vec<u8>, Failure> {
    let mut buf = Vec::with_capacity(22 + 32 * b.n());
    write_batch(b, &mut buf).stage("output")?;
    Ok(buf)
}

pub fn run(cli: &Cli, args: &ExperimentArgs) -> Result<(), Failure> {
    let cfg = load_config(cli)?;
    let config_sha256 = match &cli.config {
        Some(p) => Some(sha256_hex(&std::fs::read(p).stage("config")?)),
        None => None,
    };
    let root = cli.out.clone().unwrap_or_else(|| "experiment".into());
    let mut dir = ArtifactDir::create(&root)?;

    let (truth, device) = device_state(&cfg)?;
    dir.write("true_cm.json", truth.to_json().stage("output")?.as_bytes())?;

    let cal = [synthetic_channel(&cfg, 0, cli.seed)?, synthetic_channel(&cfg, 1, cli.seed)?];
    for c in &cal {
        let mut buf = Vec::new();
        write_calibration_csv(&c.points, &mut buf).stage("output")?;
        dir.write(&format!("calibration{}.csv", c.channel), &buf)?;
    }
    dir.write("calibration.json", &json_bytes(&cal)?)?;
    dir.write("calibration_fit.csv", calibration_csv(&cal).as_bytes())?;
    let true_chains = [cal[0].truth.unwrap(), cal[1].truth.unwrap()];
    let fitted_chain =
        |j: usize| cal[j].fit.chain(cfg.adc_ohm, cfg.bandwidth_hz, hz_to_rad(cfg.omega_c_hz[j])).stage("calibration");
    let fitted = [fitted_chain(0)?, fitted_chain(1)?];

    let seeds = Seeds {
        master: cli.seed,
        on: cli.seed.wrapping_mul(4),
        off: cli.seed.wrapping_mul(4).wrapping_add(1),
        calibration: [0, 1].map(|j| crate::commands::calibration_seed(cli.seed, j)),
    };
    let draw = |n, seed, on| -> Result<QuadratureBatch, Failure> {
        let raw = sample_quadratures(&truth, &true_chains, n, seed, on).stage("sampling")?;
        Ok(from_voltages(&to_voltages(&raw, &true_chains), &fitted, on, seed))
    };
    let on = draw(args.n_on, seeds.on, true)?;
    let off = draw(args.n_off, seeds.off, false)?;

    let omegas = [hz_to_rad(cfg.omega_c_hz[0]), hz_to_rad(cfg.omega_c_hz[1])];
    let est = estimate_cm(&on, &off, cfg.t_in_k, omegas).stage("estimation")?;
    let (nf, _) = est.normal_form_cm().stage("estimation")?;
    let phi = CovMat4::symmetrized(est.v).stage("estimation")?.optimal_detector_angle();

    let model = entanglement_report(&truth).stage("metrics")?;
    let estimate = entanglement_report(&nf).stage("metrics")?;
    let estimate_duan = est.duan(phi).stage("metrics")?;
    let (true_duan, _) = epr_duan_optimal(&truth);
    let metrics = Metrics {
        device,
        model,
        estimate,
        delta_epr_error_se: (estimate_duan.delta_epr - true_duan.delta_epr) / estimate_duan.delta_epr_se,
        estimate_duan,
    };

    for pair in PAIRS {
        let h = difference_histogram(&on, &off, pair, args.bins, None).stage("histogram")?;
        let name = format!("hist_{}{}", pair.0.label(), pair.1.label());
        let mut buf = Vec::new();
        h.write_csv(&mut buf).stage("output")?;
        dir.write(&format!("{name}.csv"), &buf)?;
        dir.write(&format!("{name}.json"), &json_bytes(&h.meta())?)?;
    }

    dir.write("batch_on.bin", &batch_bytes(&on)?)?;
    dir.write("batch_off.bin", &batch_bytes(&off)?)?;
    if args.csv_batches {
        for (tag, b) in [("on", &on), ("off", &off)] {
            let mut q = Vec::new();
            write_batch_csv(b, &mut q).stage("output")?;
            dir.write(&format!("batch_{tag}.csv"), &q)?;
            let mut v = Vec::new();
            write_voltages_csv(b, &fitted, &mut v).stage("output")?;
            dir.write(&format!("voltages_{tag}.csv"), &v)?;
        }
    }
    let est_out = EstimateOut { estimate: &est, normal_form: nf.as_array(), optimal_angle: phi };
    dir.write("estimate.json", &json_bytes(&est_out)?)?;
    dir.write("metrics.json", &json_bytes(&metrics)?)?;

    let manifest = Manifest {
        tool: "mechent",
        version: env!("CARGO_PKG_VERSION"),
        command: "experiment",
        seeds,
        n_on: args.n_on,
        n_off: args.n_off,
        bins: args.bins,
        config: &cfg,
        config_sha256,
        outputs: &dir.hashes,
    };
    std::fs::write(root.join("manifest.json"), json_bytes(&manifest)?).stage("output")?;
    report_summary(&root, &metrics);
    Ok(())
}

fn report_summary(root: &Path, m: &Metrics) {
    eprintln!(
        "experiment written to {}: delta_epr model {:.4}, estimate {:.4} +- {:.4} ({:+.2} SE)",
        root.display(),
        m.model.delta_epr,
        m.estimate_duan.delta_epr,
        m.estimate_duan.delta_epr_se,
        m.delta_epr_error_se
    );
}

//! Seeded Gaussian quadrature sampling and the batch file formats.
//!
//! Samples are drawn in chunks of [`CHUNK`]; chunk `k` uses
//! `ChaCha8Rng::seed_from_u64(seed)` switched to stream `k`, so the output is
//! independent of thread count and scheduling.

use std::io::{Read, Write};

use nalgebra::Matrix4;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::chain::RfChain;
use crate::constants::VACUUM_VARIANCE;
use crate::error::{Error, Result};
use crate::gaussian::CovMat4;

pub const CHUNK: usize = 8192;
pub const BATCH_MAGIC: &[u8; 5] = b"EMSQ1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadratureBatch {
    /// Rows of `(X1, P1, X2, P2)`.
    pub samples: Vec<[f64; 4]>,
    pub pumps_on: bool,
    pub seed: u64,
}

impl QuadratureBatch {
    pub fn n(&self) -> usize {
        self.samples.len()
    }
}

/// Covariance seen at the digitiser: the device state plus phase-insensitive
/// added noise when the pumps are on, thermal `n_add + ½` when they are off.
pub fn detected_covariance(true_cm: &CovMat4, chains: &[RfChain; 2], pumps_on: bool) -> [[f64; 4]; 4] {
    let add = [chains[0].n_add, chains[0].n_add, chains[1].n_add, chains[1].n_add];
    let mut v = if pumps_on { true_cm.as_array() } else { [[0.0; 4]; 4] };
    for i in 0..4 {
        v[i][i] += add[i] + if pumps_on { 0.0 } else { VACUUM_VARIANCE };
    }
    v
}

pub fn sample_quadratures(
    true_cm: &CovMat4,
    chains: &[RfChain; 2],
    n: usize,
    seed: u64,
    pumps_on: bool,
) -> Result<QuadratureBatch> {
    if n < 2 {
        return Err(Error::InsufficientSamples { need: 2, got: n });
    }
    let v = detected_covariance(true_cm, chains, pumps_on);
    let l = Matrix4::from_fn(|i, j| v[i][j]).cholesky().ok_or(Error::CholeskyFailure)?.l();
    let mut samples = vec![[0.0f64; 4]; n];
    samples.par_chunks_mut(CHUNK).enumerate().for_each(|(k, chunk)| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(k as u64);
        for s in chunk.iter_mut() {
            let z: [f64; 4] = std::array::from_fn(|_| StandardNormal.sample(&mut rng));
            for i in 0..4 {
                let mut acc = 0.0;
                for j in 0..=i {
                    acc += l[(i, j)] * z[j];
                }
                s[i] = acc;
            }
        }
    });
    Ok(QuadratureBatch { samples, pumps_on, seed })
}

/// Rotates the mode-1 detector phase: `X1' = cos φ X1 + sin φ P1`,
/// `P1' = −sin φ X1 + cos φ P1`. Mode 2 is copied unchanged.
pub fn rotate_detector(batch: &QuadratureBatch, phi: f64) -> QuadratureBatch {
    let (s, c) = phi.sin_cos();
    let samples = batch.samples.iter().map(|q| [c * q[0] + s * q[1], -s * q[0] + c * q[1], q[2], q[3]]).collect();
    QuadratureBatch { samples, pumps_on: batch.pumps_on, seed: batch.seed }
}

/// Voltage-domain rows `(I1, Q1, I2, Q2) = (X, P)·√ζ` per channel.
pub fn to_voltages(batch: &QuadratureBatch, chains: &[RfChain; 2]) -> Vec<[f64; 4]> {
    let (a, b) = (chains[0].zeta.sqrt(), chains[1].zeta.sqrt());
    batch.samples.iter().map(|q| [q[0] * a, q[1] * a, q[2] * b, q[3] * b]).collect()
}

/// Inverse of [`to_voltages`] under a possibly different (e.g. fitted) chain.
pub fn from_voltages(rows: &[[f64; 4]], chains: &[RfChain; 2], pumps_on: bool, seed: u64) -> QuadratureBatch {
    let (a, b) = (chains[0].zeta.sqrt().recip(), chains[1].zeta.sqrt().recip());
    let samples = rows.iter().map(|v| [v[0] * a, v[1] * a, v[2] * b, v[3] * b]).collect();
    QuadratureBatch { samples, pumps_on, seed }
}

/// Binary batch: magic `EMSQ1`, `n` (u64 LE), `pumps_on` (u8), `seed`
/// (u64 LE), then `n × 4` f64 LE.
pub fn write_batch<W: Write>(batch: &QuadratureBatch, mut out: W) -> Result<()> {
    out.write_all(BATCH_MAGIC)?;
    out.write_all(&(batch.n() as u64).to_le_bytes())?;
    out.write_all(&[batch.pumps_on as u8])?;
    out.write_all(&batch.seed.to_le_bytes())?;
    let mut buf = Vec::with_capacity(batch.n() * 32);
    for s in &batch.samples {
        for x in s {
            buf.extend_from_slice(&x.to_le_bytes());
        }
    }
    out.write_all(&buf)?;
    Ok(())
}

pub fn read_batch<R: Read>(mut input: R) -> Result<QuadratureBatch> {
    let mut magic = [0u8; 5];
    input.read_exact(&mut magic)?;
    if &magic != BATCH_MAGIC {
        return Err(Error::Parse("not a quadrature batch file (bad magic)".into()));
    }
    let mut u64buf = [0u8; 8];
    input.read_exact(&mut u64buf)?;
    let n = u64::from_le_bytes(u64buf) as usize;
    let mut flag = [0u8; 1];
    input.read_exact(&mut flag)?;
    let pumps_on = match flag[0] {
        0 => false,
        1 => true,
        other => return Err(Error::Parse(format!("bad pumps_on flag {other}"))),
    };
    input.read_exact(&mut u64buf)?;
    let seed = u64::from_le_bytes(u64buf);
    let mut raw = Vec::new();
    input.read_to_end(&mut raw)?;
    if raw.len() != n * 32 {
        return Err(Error::Parse(format!("batch payload has {} bytes, expected {}", raw.len(), n * 32)));
    }
    let samples = raw
        .chunks_exact(32)
        .map(|row| std::array::from_fn(|i| f64::from_le_bytes(row[8 * i..8 * i + 8].try_into().unwrap())))
        .collect();
    Ok(QuadratureBatch { samples, pumps_on, seed })
}

fn write_rows_csv<W: Write>(header: [&str; 4], rows: &[[f64; 4]], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header)?;
    for r in rows {
        w.write_record(r.iter().map(|x| format!("{x:.16e}")))?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_batch_csv<W: Write>(batch: &QuadratureBatch, out: W) -> Result<()> {
    write_rows_csv(["X1", "P1", "X2", "P2"], &batch.samples, out)
}

pub fn write_voltages_csv<W: Write>(batch: &QuadratureBatch, chains: &[RfChain; 2], out: W) -> Result<()> {
    write_rows_csv(["I1", "Q1", "I2", "Q2"], &to_voltages(batch, chains), out)
}

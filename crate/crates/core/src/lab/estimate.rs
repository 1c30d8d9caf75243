use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::sampling::{QuadratureBatch, CHUNK};
use crate::constants::half_coth_noise;
use crate::error::{Error, Result};
use crate::gaussian::{squeezing_db, CovMat4, NormalForm};

/// Minimum batch size accepted by the estimator.
pub const MIN_SAMPLES: usize = 100;

/// Raw second moments `⟨u_i u_j⟩` of a zero-mean batch.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BatchMoments {
    pub m: [[f64; 4]; 4],
    pub n: usize,
}

impl BatchMoments {
    /// Chunk sums are computed in parallel and added in chunk order, so the
    /// result does not depend on scheduling.
    pub fn from_batch(batch: &QuadratureBatch) -> Self {
        let partial: Vec<[[f64; 4]; 4]> = batch
            .samples
            .par_chunks(CHUNK)
            .map(|chunk| {
                let mut s = [[0.0; 4]; 4];
                for q in chunk {
                    for i in 0..4 {
                        for j in i..4 {
                            s[i][j] += q[i] * q[j];
                        }
                    }
                }
                s
            })
            .collect();
        let mut m = [[0.0; 4]; 4];
        for s in &partial {
            for i in 0..4 {
                for j in i..4 {
                    m[i][j] += s[i][j];
                }
            }
        }
        let n = batch.n();
        for i in 0..4 {
            for j in i..4 {
                m[i][j] /= n as f64;
                m[j][i] = m[i][j];
            }
        }
        Self { m, n }
    }

    fn quad(&self, c: &[f64; 4]) -> f64 {
        let mut acc = 0.0;
        for i in 0..4 {
            for j in 0..4 {
                acc += c[i] * c[j] * self.m[i][j];
            }
        }
        acc
    }
}

/// Estimated covariance matrix with per-element standard errors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CmEstimate {
    /// Symmetric estimate; not guaranteed to be physical for small samples.
    pub v: [[f64; 4]; 4],
    pub se: [[f64; 4]; 4],
    pub n_on: usize,
    pub n_off: usize,
    /// `½coth(ħω_i/2k_BT_i)` added back per channel.
    pub input_noise: [f64; 2],
    #[serde(skip)]
    on: Option<BatchMoments>,
    #[serde(skip)]
    off: Option<BatchMoments>,
}

impl CmEstimate {
    /// The estimate as a validated covariance matrix.
    pub fn cm(&self) -> Result<CovMat4> {
        CovMat4::new(self.v)
    }

    /// Nearest normal form (after rotating mode 1 to the optimal angle),
    /// validated.
    pub fn normal_form_cm(&self) -> Result<(CovMat4, f64)> {
        let raw = CovMat4::symmetrized(self.v)?;
        let (NormalForm { v11, v33, v13 }, phi) = raw.project_normal_form();
        Ok((CovMat4::from_normal_form(v11, v33, v13)?, phi))
    }

    /// Variance of the combination `u = Σ c_i q_i` after on/off subtraction,
    /// with its standard error. Off-batch quadratures are independent, so
    /// only their diagonal moments enter.
    pub fn combination_variance(&self, c: &[f64; 4]) -> Result<(f64, f64)> {
        let (on, off) = match (&self.on, &self.off) {
            (Some(a), Some(b)) => (a, b),
            _ => return Err(Error::InvalidParameter("estimate carries no batch moments".into())),
        };
        let noise = [self.input_noise[0], self.input_noise[0], self.input_noise[1], self.input_noise[1]];
        let m_on = on.quad(c);
        let mut value = m_on;
        let mut var_off = 0.0;
        for i in 0..4 {
            let c2 = c[i] * c[i];
            value += c2 * (noise[i] - off.m[i][i]);
            var_off += c2 * c2 * off.m[i][i].powi(2) * 2.0 / (off.n as f64 - 1.0);
        }
        let var_on = m_on * m_on * 2.0 / (on.n as f64 - 1.0);
        Ok((value, (var_on + var_off).sqrt()))
    }

    /// Duan quantities at detector angle `phi`, computed from the batch
    /// moments, with standard errors.
    pub fn duan(&self, phi: f64) -> Result<DuanEstimate> {
        let (s, c) = phi.sin_cos();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let (x, x_se) = self.combination_variance(&[c * h, s * h, -h, 0.0])?;
        let (p, p_se) = self.combination_variance(&[-s * h, c * h, 0.0, h])?;
        Ok(DuanEstimate {
            phi,
            x_minus_var: x,
            x_minus_se: x_se,
            p_plus_var: p,
            p_plus_se: p_se,
            delta_epr: x + p,
            delta_epr_se: (x_se * x_se + p_se * p_se).sqrt(),
            squeezing_db_x: squeezing_db(x),
            squeezing_db_p: squeezing_db(p),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DuanEstimate {
    pub phi: f64,
    pub x_minus_var: f64,
    pub x_minus_se: f64,
    pub p_plus_var: f64,
    pub p_plus_se: f64,
    pub delta_epr: f64,
    pub delta_epr_se: f64,
    pub squeezing_db_x: f64,
    pub squeezing_db_p: f64,
}

/// On/off covariance estimator.
///
/// `V_ii = ⟨u_i²⟩_on − ⟨u_i²⟩_off + ½coth(ħω_i/2k_BT_i)`, off-diagonals are the
/// symmetrised on-moments. Standard errors use the Gaussian moment variance
/// `(V_ii V_jj + V_ij²)/(n − 1)`, i.e. `var·√(2/(n−1))` on the diagonal.
pub fn estimate_cm(
    on: &QuadratureBatch,
    off: &QuadratureBatch,
    temps: [f64; 2],
    omegas: [f64; 2],
) -> Result<CmEstimate> {
    if !on.pumps_on || off.pumps_on {
        return Err(Error::BatchMismatch(format!(
            "expected an on batch and an off batch, got pumps_on = ({}, {})",
            on.pumps_on, off.pumps_on
        )));
    }
    for b in [on, off] {
        if b.n() < MIN_SAMPLES {
            return Err(Error::InsufficientSamples { need: MIN_SAMPLES, got: b.n() });
        }
    }
    let mon = BatchMoments::from_batch(on);
    let moff = BatchMoments::from_batch(off);
    let input_noise = [half_coth_noise(omegas[0], temps[0]), half_coth_noise(omegas[1], temps[1])];
    let (non, noff) = (mon.n as f64, moff.n as f64);
    let mut v = [[0.0; 4]; 4];
    let mut se = [[0.0; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            if i == j {
                v[i][i] = mon.m[i][i] - moff.m[i][i] + input_noise[i / 2];
                se[i][i] = (2.0 * mon.m[i][i].powi(2) / (non - 1.0) + 2.0 * moff.m[i][i].powi(2) / (noff - 1.0)).sqrt();
            } else {
                v[i][j] = mon.m[i][j];
                se[i][j] = ((mon.m[i][i] * mon.m[j][j] + mon.m[i][j].powi(2)) / (non - 1.0)).sqrt();
            }
        }
    }
    Ok(CmEstimate { v, se, n_on: mon.n, n_off: moff.n, input_noise, on: Some(mon), off: Some(moff) })
}

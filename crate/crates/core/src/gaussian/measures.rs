//! Separability and correlation measures of two-mode Gaussian states.
//!
//! All logarithms are base 2, so entanglement and discord come out in bits.

use serde::{Deserialize, Serialize};

use super::covmat::{CovMat4, NormalForm, PHYS_TOL};
use crate::constants::VACUUM_VARIANCE;
use crate::error::{Error, Result};

/// Variances of the EPR operators `X₋ = (X1(φ) − X2)/√2` and
/// `P₊ = (P1(φ) + P2)/√2` at one detector angle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EprDuan {
    pub x_minus_var: f64,
    pub p_plus_var: f64,
    pub delta_epr: f64,
    pub squeezing_db_x: f64,
    pub squeezing_db_p: f64,
}

/// Variance relative to vacuum in dB (negative means squeezed).
pub fn squeezing_db(var: f64) -> f64 {
    10.0 * (var / VACUUM_VARIANCE).log10()
}

/// Duan criterion after rotating the mode-1 detector by `phi`.
pub fn epr_duan(v: &CovMat4, phi: f64) -> EprDuan {
    let r = v.rotate_mode1(phi);
    let x_minus_var = (r.get(0, 0) + r.get(2, 2) - 2.0 * r.get(0, 2)) / 2.0;
    let p_plus_var = (r.get(1, 1) + r.get(3, 3) + 2.0 * r.get(1, 3)) / 2.0;
    EprDuan {
        x_minus_var,
        p_plus_var,
        delta_epr: x_minus_var + p_plus_var,
        squeezing_db_x: squeezing_db(x_minus_var),
        squeezing_db_p: squeezing_db(p_plus_var),
    }
}

/// Duan criterion at the detector angle that minimises `Δ_EPR`.
pub fn epr_duan_optimal(v: &CovMat4) -> (EprDuan, f64) {
    let phi = v.optimal_detector_angle();
    (epr_duan(v, phi), phi)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Negativity {
    /// Smallest symplectic eigenvalue of the partially transposed matrix.
    pub zeta_minus: f64,
    /// Logarithmic negativity (bits).
    pub e_n: f64,
}

fn clamp_radicand(x: f64, what: &str) -> Result<f64> {
    if x >= 0.0 {
        Ok(x)
    } else if x > -PHYS_TOL {
        Ok(0.0)
    } else {
        Err(Error::NumericallyIllConditioned(format!("{what} radicand = {x:e}")))
    }
}

fn pt_zeta_minus(nf: &NormalForm) -> Result<f64> {
    let (a, b, c) = (nf.v11, nf.v33, nf.v13);
    let outer = (a * a - b * b).powi(2) + 4.0 * c * c * (a + b).powi(2);
    let inner = a * a + b * b + 2.0 * c * c - outer.sqrt();
    Ok(std::f64::consts::FRAC_1_SQRT_2 * clamp_radicand(inner, "partial-transpose")?.sqrt())
}

/// Logarithmic negativity `E_N = max(0, −log₂ 2ζ⁻)` of a normal-form matrix.
pub fn negativity(v: &CovMat4) -> Result<Negativity> {
    let nf = v.normal_form()?;
    let zeta_minus = pt_zeta_minus(&nf)?;
    let e_n = if 2.0 * zeta_minus >= 1.0 { 0.0 } else { -(2.0 * zeta_minus).log2() };
    Ok(Negativity { zeta_minus, e_n })
}

/// Symplectic eigenvalues `(ν₋, ν₊)` of a normal-form matrix, closed form.
pub fn normal_form_symplectic(nf: &NormalForm) -> Result<(f64, f64)> {
    let (a, b, c) = (nf.v11, nf.v33, nf.v13);
    let base = a * a + b * b - 2.0 * c * c;
    let disc = clamp_radicand((a * a - b * b).powi(2) - 4.0 * c * c * (a - b).powi(2), "nu")?.sqrt();
    let lo = clamp_radicand(base - disc, "nu_minus")?;
    let hi = clamp_radicand(base + disc, "nu_plus")?;
    Ok((std::f64::consts::FRAC_1_SQRT_2 * lo.sqrt(), std::f64::consts::FRAC_1_SQRT_2 * hi.sqrt()))
}

/// Entropic function for vacuum noise 1/2:
/// `h(x) = (x+½)log₂(x+½) − (x−½)log₂(x−½)`, zero at and below the vacuum level.
pub fn entropy_h(x: f64) -> f64 {
    if x <= VACUUM_VARIANCE + 1e-12 {
        return 0.0;
    }
    let p = x + 0.5;
    let m = x - 0.5;
    p * p.log2() - m * m.log2()
}

/// Gaussian quantum discord `D(2|1)` of a normal-form matrix.
///
/// Uses `b = V33`, `τ = V13²/(V33² − 1)`, `η = V11 − V33 V13²/(V33² − 1)`, so
/// `D = h(b) − h(ν₋) − h(ν₊) + h(τ + η)`. The expression has a pole at
/// `V33 = 1`; matrices with `V33² ≤ 1` are rejected.
pub fn quantum_discord(v: &CovMat4) -> Result<f64> {
    let nf = v.normal_form()?;
    let b = nf.v33;
    let denom = b * b - 1.0;
    if denom <= 1e-12 {
        return Err(Error::DegenerateState(format!("discord formula requires V33^2 > 1 (V33 = {b})")));
    }
    let c2 = nf.v13 * nf.v13;
    let tau = c2 / denom;
    let eta = nf.v11 - b * c2 / denom;
    let (nu_minus, nu_plus) = normal_form_symplectic(&nf)?;
    Ok(entropy_h(b) - entropy_h(nu_minus) - entropy_h(nu_plus) + entropy_h(tau + eta))
}

/// Entropy of formation (ebits) from the logarithmic negativity.
pub fn entropy_of_formation(e_n: f64) -> Result<f64> {
    if !(e_n >= 0.0) {
        return Err(Error::InvalidParameter(format!("E_N must be >= 0, got {e_n}")));
    }
    let theta = (-e_n).exp2();
    let (inv, root) = (theta.sqrt().recip(), theta.sqrt());
    let sigma_plus = (inv + root).powi(2) / 4.0;
    let sigma_minus = (inv - root).powi(2) / 4.0;
    let xlogx = |s: f64| if s > 0.0 { s * s.log2() } else { 0.0 };
    Ok(xlogx(sigma_plus) - xlogx(sigma_minus))
}

/// Entangled bits per second for a source of bandwidth `bandwidth_hz`.
pub fn ebit_rate(e_f: f64, bandwidth_hz: f64) -> Result<f64> {
    if !(bandwidth_hz > 0.0) {
        return Err(Error::InvalidParameter(format!("bandwidth must be > 0, got {bandwidth_hz}")));
    }
    Ok(e_f * bandwidth_hz)
}

/// Summary of all state-level metrics.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct EntanglementReport {
    pub delta_epr: f64,
    pub x_minus_var: f64,
    pub p_plus_var: f64,
    pub squeezing_db_x: f64,
    pub squeezing_db_p: f64,
    /// Detector angle (rad) at which the Duan quantities were evaluated.
    pub optimal_angle: f64,
    pub zeta_minus: f64,
    pub e_n: f64,
    /// `None` when the discord expression is singular for this state.
    pub discord: Option<f64>,
    pub e_f: f64,
    pub nu_minus: f64,
    pub nu_plus: f64,
}

/// Computes every metric for a physical normal-form matrix.
pub fn entanglement_report(v: &CovMat4) -> Result<EntanglementReport> {
    v.check_physical()?;
    let nf = v.normal_form()?;
    let (duan, optimal_angle) = epr_duan_optimal(v);
    let neg = negativity(v)?;
    let discord = if nf.v13 == 0.0 {
        Some(0.0)
    } else {
        match quantum_discord(v) {
            Ok(d) => Some(d),
            Err(Error::DegenerateState(_)) => None,
            Err(e) => return Err(e),
        }
    };
    let (nu_minus, nu_plus) = normal_form_symplectic(&nf)?;
    Ok(EntanglementReport {
        delta_epr: duan.delta_epr,
        x_minus_var: duan.x_minus_var,
        p_plus_var: duan.p_plus_var,
        squeezing_db_x: duan.squeezing_db_x,
        squeezing_db_p: duan.squeezing_db_p,
        optimal_angle,
        zeta_minus: neg.zeta_minus,
        e_n: neg.e_n,
        discord,
        e_f: entropy_of_formation(neg.e_n)?,
        nu_minus,
        nu_plus,
    })
}

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use super::covmat::{CovMat4, PHYS_TOL};
use crate::error::{Error, Result};

/// Two-mode squeezed thermal state parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TmstParams {
    /// Squeezing parameter, `r ≥ 0`.
    pub r: f64,
    /// Squeezing angle in `[0, 2π)`.
    pub phi: f64,
    /// Effective thermal input of mode 1.
    pub n1: f64,
    /// Effective thermal input of mode 2.
    pub n2: f64,
}

impl TmstParams {
    pub fn new(r: f64, phi: f64, n1: f64, n2: f64) -> Result<Self> {
        if !(r.is_finite() && phi.is_finite() && n1.is_finite() && n2.is_finite()) {
            return Err(Error::InvalidParameter("non-finite TMST parameter".into()));
        }
        if r < 0.0 || n1 < 0.0 || n2 < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "TMST parameters must be non-negative (r={r}, n1={n1}, n2={n2})"
            )));
        }
        Ok(Self { r, phi: phi.rem_euclid(TAU), n1, n2 })
    }

    fn total(&self) -> f64 {
        1.0 + self.n1 + self.n2
    }
}

/// Normal-form covariance matrix of a two-mode squeezed thermal state.
pub fn cm_from_tmst(p: &TmstParams) -> CovMat4 {
    let n = p.total();
    let (s2, c2) = ((2.0 * p.r).sinh(), (2.0 * p.r).cosh());
    let v11 = (n * c2 + (p.n1 - p.n2)) / 2.0;
    let v33 = (n * c2 - (p.n1 - p.n2)) / 2.0;
    let v13 = n * s2 * p.phi.cos() / 2.0;
    // symmetric and physical for every valid parameter set
    CovMat4::symmetrized(CovMat4::normal_form_array(v11, v33, v13)).expect("finite entries")
}

/// Inverts [`cm_from_tmst`] for a normal-form matrix.
///
/// `(r, φ)` are not jointly identifiable from the normal form, so the sign of
/// `V13` is folded into `φ ∈ {0, π}` and `r` is taken from `|V13|`.
pub fn tmst_from_cm(v: &CovMat4) -> Result<TmstParams> {
    let nf = v.normal_form()?;
    let sum = nf.v11 + nf.v33;
    let corr = 2.0 * nf.v13.abs();
    let radicand = sum * sum - corr * corr;
    if radicand <= 0.0 {
        return Err(Error::Unphysical(format!("(V11 + V33)^2 - 4 V13^2 = {radicand:e} is not positive")));
    }
    let total = radicand.sqrt();
    let r = 0.5 * (corr / sum).atanh();
    let diff = nf.v11 - nf.v33;
    let n1 = 0.5 * (total - 1.0 + diff);
    let n2 = 0.5 * (total - 1.0 - diff);
    if n1 < -PHYS_TOL || n2 < -PHYS_TOL {
        return Err(Error::Unphysical(format!("implied thermal inputs n1={n1}, n2={n2}")));
    }
    let phi = if nf.v13 < 0.0 { PI } else { 0.0 };
    TmstParams::new(r, phi, n1.max(0.0), n2.max(0.0))
}

/// `⟨X₋²(φ)⟩` of a TMST seen at detector angle `φ`:
/// `(1+n1+n2)(cosh 2r − sinh 2r cos φ)/2`. The state's own `phi` is ignored.
pub fn squeezing_vs_angle(p: &TmstParams, phi: f64) -> f64 {
    p.total() * ((2.0 * p.r).cosh() - (2.0 * p.r).sinh() * phi.cos()) / 2.0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vacuum_and_thermal() {
        let v = cm_from_tmst(&TmstParams::new(0.0, 0.0, 0.0, 0.0).unwrap());
        assert_eq!(v, CovMat4::vacuum());
        let t = cm_from_tmst(&TmstParams::new(0.0, 0.0, 2.0, 0.0).unwrap());
        assert_eq!((t.get(0, 0), t.get(2, 2), t.get(0, 2)), (2.5, 0.5, 0.0));
    }

    #[test]
    fn tmst_parameters_reproduce_measured_cm() {
        let v = cm_from_tmst(&TmstParams::new(1.19, 0.0, 1.43, 2.49).unwrap());
        for (got, measured) in [(v.get(0, 0), 12.83), (v.get(2, 2), 13.89), (v.get(0, 2), 13.13)] {
            assert!((got - measured).abs() / measured < 0.005, "{got} vs {measured}");
        }
        assert!((v.get(0, 0) - 12.87).abs() < 0.01);
        assert!((v.get(2, 2) - 13.93).abs() < 0.01);
        assert!((v.get(0, 2) - 13.18).abs() < 0.01);
        assert_eq!(v.get(1, 3), -v.get(0, 2));
    }

    #[test]
    fn inversion_of_vacuum() {
        let p = tmst_from_cm(&CovMat4::vacuum()).unwrap();
        assert!(p.r.abs() < 1e-15 && p.n1.abs() < 1e-15 && p.n2.abs() < 1e-15);
    }

    #[test]
    fn inversion_round_trip() {
        let p = TmstParams::new(0.7, 0.0, 0.3, 1.1).unwrap();
        let q = tmst_from_cm(&cm_from_tmst(&p)).unwrap();
        assert!((q.r - 0.7).abs() < 1e-9);
        assert!((q.n1 - 0.3).abs() < 1e-9);
        assert!((q.n2 - 1.1).abs() < 1e-9);
    }

    #[test]
    fn negative_correlation_folds_into_angle() {
        let p = TmstParams::new(0.5, PI, 0.2, 0.1).unwrap();
        let v = cm_from_tmst(&p);
        assert!(v.get(0, 2) < 0.0);
        let q = tmst_from_cm(&v).unwrap();
        assert_eq!(q.phi, PI);
        let back = cm_from_tmst(&q);
        for i in 0..4 {
            for j in 0..4 {
                assert!((back.get(i, j) - v.get(i, j)).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn rejects_non_normal_form() {
        let v = cm_from_tmst(&TmstParams::new(0.5, 0.0, 0.2, 0.1).unwrap()).rotate_mode1(0.2);
        assert!(matches!(tmst_from_cm(&v), Err(Error::NotNormalForm(_))));
    }

    #[test]
    fn squeezing_examples() {
        let p = TmstParams::new(1.19, 0.0, 1.43, 2.49).unwrap();
        assert!((squeezing_vs_angle(&p, 0.0) - 0.228).abs() < 5e-4);
        let q = TmstParams::new(0.8, 0.0, 0.0, 0.0).unwrap();
        assert!((squeezing_vs_angle(&q, PI / 2.0) - (1.6f64).cosh() / 2.0).abs() < 1e-14);
        let one = TmstParams::new(1.0, 0.0, 0.0, 0.0).unwrap();
        assert!((squeezing_vs_angle(&one, 0.0) - (-2.0f64).exp() / 2.0).abs() < 1e-15);
        assert!((squeezing_vs_angle(&one, 0.0) - 0.0677).abs() < 1e-4);
    }

    #[test]
    fn rejects_negative_parameters() {
        assert!(TmstParams::new(-0.1, 0.0, 0.0, 0.0).is_err());
        assert!(TmstParams::new(0.1, 0.0, -1.0, 0.0).is_err());
        assert!((TmstParams::new(0.1, -0.5, 0.0, 0.0).unwrap().phi - (TAU - 0.5)).abs() < 1e-15);
    }
}

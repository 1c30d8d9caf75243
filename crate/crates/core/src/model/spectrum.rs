//! Output-field covariance: spectral density and filtered matrix.
//!
//! The quadratures of the filtered outputs pair a component at `+ω` with its
//! partner at `−ω`. Writing `K(ω) = Σ_k α1k(ω) α2k(−ω) (2n_k + 1)` over the
//! five input channels, the spectral density of the covariance matrix is
//!
//! ```text
//! V11(ω) = ½ Σ_k |α1k|² (2n_k + 1)      V33(ω) = ½ Σ_k |α2k|² (2n_k + 1)
//! V13(ω) = −V24(ω) = ½ Re K(ω)
//! ```
//!
//! `|α(−ω)| = |α(ω)|` and `K(−ω) = K(ω)*`, so every element is real and even
//! in `ω`. Coefficients are evaluated at `2ω` because of the amplitude
//! damping convention documented in [`super::scattering`].

use serde::{Deserialize, Serialize};

use super::scattering::{scattering_coefficients, ScatterCoeffs, ScatterParams};
use super::stability::stability_check;
use crate::error::{Error, Result};
use crate::gaussian::CovMat4;
use crate::quadrature::AdaptiveSimpson;

/// Bath occupations of the five input channels.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Baths {
    /// Mechanical bath.
    pub n_m: f64,
    /// Input ports of cavities 1 and 2.
    pub n_ex: [f64; 2],
    /// Intrinsic loss baths of cavities 1 and 2.
    pub n_in: [f64; 2],
}

impl Baths {
    fn validate(&self) -> Result<()> {
        let all = [self.n_m, self.n_ex[0], self.n_ex[1], self.n_in[0], self.n_in[1]];
        if all.iter().any(|n| !(*n >= 0.0)) {
            return Err(Error::InvalidParameter(format!("bath occupations must be >= 0: {self:?}")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OutputModel {
    pub scatter: ScatterParams,
    pub baths: Baths,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FilterKind {
    /// Ideal bandpass of full width `B`.
    #[default]
    Rect,
    /// Gaussian with equivalent noise bandwidth `B`.
    Gaussian,
}

impl FilterKind {
    pub fn parse(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "rect" | "rectangle" => Ok(FilterKind::Rect),
            "gauss" | "gaussian" => Ok(FilterKind::Gaussian),
            other => Err(Error::Parse(format!("unknown filter kind {other:?}"))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            FilterKind::Rect => "rect",
            FilterKind::Gaussian => "gaussian",
        }
    }
}

impl OutputModel {
    fn validate(&self) -> Result<()> {
        self.scatter.validate()?;
        self.baths.validate()?;
        let p = &self.scatter;
        let s = stability_check(p.c1, p.c2, p.kappa1, p.kappa2, p.gamma_m);
        if !s.stable {
            return Err(Error::Unstable(format!(
                "C1 = {}, C2 = {}: lhs {:.6e} <= rhs {:.6e} or gamma_eff {:.6e} <= 0",
                p.c1, p.c2, s.lhs, s.rhs, s.gamma_eff
            )));
        }
        Ok(())
    }

    /// `(V11, V33, V13)` spectral densities at physical offset `omega` (rad/s).
    pub fn spectral_elements(&self, omega: f64) -> Result<[f64; 3]> {
        let plus = scattering_coefficients(2.0 * omega, &self.scatter)?;
        let minus = scattering_coefficients(-2.0 * omega, &self.scatter)?;
        Ok(self.combine(&plus, &minus))
    }

    fn combine(&self, plus: &ScatterCoeffs, minus: &ScatterCoeffs) -> [f64; 3] {
        let b = &self.baths;
        let w = |n: f64| 2.0 * n + 1.0;
        let v11 = plus.a1.norm_sqr() * w(b.n_ex[0])
            + plus.a12.norm_sqr() * w(b.n_ex[1])
            + plus.a1m.norm_sqr() * w(b.n_m)
            + plus.a1in.norm_sqr() * w(b.n_in[0])
            + plus.a12in.norm_sqr() * w(b.n_in[1]);
        let v33 = plus.a2.norm_sqr() * w(b.n_ex[1])
            + plus.a21.norm_sqr() * w(b.n_ex[0])
            + plus.a2m.norm_sqr() * w(b.n_m)
            + plus.a2in.norm_sqr() * w(b.n_in[1])
            + plus.a21in.norm_sqr() * w(b.n_in[0]);
        let k = plus.a1 * minus.a21 * w(b.n_ex[0])
            + plus.a12 * minus.a2 * w(b.n_ex[1])
            + plus.a1m * minus.a2m * w(b.n_m)
            + plus.a1in * minus.a21in * w(b.n_in[0])
            + plus.a12in * minus.a2in * w(b.n_in[1]);
        [0.5 * v11, 0.5 * v33, 0.5 * k.re]
    }
}

/// Covariance-matrix spectral density at physical offset `omega` (rad/s).
pub fn output_spectral_cm(omega: f64, model: &OutputModel) -> Result<CovMat4> {
    model.validate()?;
    let [v11, v33, v13] = model.spectral_elements(omega)?;
    CovMat4::from_normal_form(v11, v33, v13)
}

/// Filtered output covariance matrix for a detection bandwidth `bandwidth_hz`.
///
/// The filter weight `|f(ω)|²` has unit integral. The rectangle spans
/// `|ω| ≤ πB`; the Gaussian has `σ = √(2π) B` so that its equivalent noise
/// bandwidth is also `2πB` rad/s, and is integrated out to `8σ`.
pub fn filtered_output_cm(model: &OutputModel, bandwidth_hz: f64, filter: FilterKind) -> Result<CovMat4> {
    filtered_output_cm_with(model, bandwidth_hz, filter, &AdaptiveSimpson::default())
}

pub fn filtered_output_cm_with(
    model: &OutputModel,
    bandwidth_hz: f64,
    filter: FilterKind,
    integrator: &AdaptiveSimpson,
) -> Result<CovMat4> {
    if !(bandwidth_hz > 0.0 && bandwidth_hz.is_finite()) {
        return Err(Error::InvalidParameter(format!("bandwidth must be > 0, got {bandwidth_hz}")));
    }
    model.validate()?;
    let half_width = std::f64::consts::PI * bandwidth_hz;
    // even integrand: integrate the positive half and double
    let [v11, v33, v13] = match filter {
        FilterKind::Rect => {
            let weight = 1.0 / (2.0 * half_width);
            let half = integrator.integrate(|w| model.spectral_elements(w), 0.0, half_width)?;
            half.map(|x| 2.0 * weight * x)
        }
        FilterKind::Gaussian => {
            let sigma = (2.0 * std::f64::consts::PI).sqrt() * bandwidth_hz;
            let norm = 1.0 / ((2.0 * std::f64::consts::PI).sqrt() * sigma);
            let half = integrator.integrate(
                |w| {
                    let g = norm * (-0.5 * (w / sigma).powi(2)).exp();
                    Ok(model.spectral_elements(w)?.map(|x| g * x))
                },
                0.0,
                8.0 * sigma,
            )?;
            half.map(|x| 2.0 * x)
        }
    };
    CovMat4::from_normal_form(v11, v33, v13)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::hz_to_rad;
    use crate::gaussian::{entanglement_report, epr_duan_optimal};

    fn nominal_model() -> OutputModel {
        OutputModel {
            scatter: ScatterParams {
                c1: 67.0,
                c2: 113.3,
                eta1: 0.76,
                eta2: 0.67,
                kappa1: hz_to_rad(0.52e6),
                kappa2: hz_to_rad(0.48e6),
                gamma_m: hz_to_rad(6.0),
            },
            baths: Baths { n_m: 60.0, ..Default::default() },
        }
    }

    #[test]
    fn ideal_resonant_output_has_vacuum_eigenvalue() {
        let mut m = nominal_model();
        m.scatter.eta1 = 1.0;
        m.scatter.eta2 = 1.0;
        m.baths = Baths::default();
        let v = output_spectral_cm(0.0, &m).unwrap();
        let (lo, hi) = v.symplectic_eigenvalues();
        assert!((lo - 0.5).abs() < 1e-9, "{lo}");
        // the other eigenvalue belongs to the unobserved mechanical output
        // port; pseudo-unitarity of the scattering matrix fixes it
        let a = scattering_coefficients(0.0, &m.scatter).unwrap();
        let port = a.a1.norm_sqr() - a.a21.norm_sqr() - 0.5;
        assert!((hi - port).abs() < 1e-9, "{hi} vs {port}");
        // off resonance the ±ω average is mixed but physical
        for w in [300.0, 2e3] {
            assert!(output_spectral_cm(w, &m).unwrap().symplectic_eigenvalues().0 >= 0.5 - 1e-9);
        }
    }

    #[test]
    fn no_blue_pump_no_correlations() {
        let mut m = nominal_model();
        m.scatter.c1 = 0.0;
        let v = output_spectral_cm(0.0, &m).unwrap();
        assert_eq!(v.get(0, 2), 0.0);
        assert_eq!(entanglement_report(&v).unwrap().e_n, 0.0);
    }

    #[test]
    fn nominal_point_term_by_term() {
        let m = nominal_model();
        let v = output_spectral_cm(0.0, &m).unwrap();
        // independent summation from the real-valued resonant closed forms
        let (c1, c2, e1, e2, n) = (67.0f64, 113.3f64, 0.76f64, 0.67f64, 60.0f64);
        let k = 2.0 / (1.0 + c2 - c1);
        let a1 = -1.0 + k * e1 * (1.0 + c2);
        let a12 = k * (e1 * e2 * c1 * c2).sqrt();
        let a1m = k * (e1 * c1).sqrt();
        let a1in = k * (e1 * (1.0 - e1)).sqrt() * (1.0 + c2);
        let a12in = k * (e1 * (1.0 - e2) * c1 * c2).sqrt();
        let v11 = 0.5 * (a1 * a1 + a12 * a12 + a1m * a1m * (2.0 * n + 1.0) + a1in * a1in + a12in * a12in);
        assert!((v.get(0, 0) - v11).abs() < 1e-10 * v11, "{} vs {v11}", v.get(0, 0));
        assert!((v.get(0, 0) - 16.368).abs() < 1e-3);
        assert!(v.get(0, 2) < 0.0);
        assert!(epr_duan_optimal(&v).0.delta_epr < 1.0);
    }

    #[test]
    fn density_is_even() {
        let m = nominal_model();
        for w in [10.0, 500.0, 4000.0] {
            let a = m.spectral_elements(w).unwrap();
            let b = m.spectral_elements(-w).unwrap();
            for k in 0..3 {
                assert!((a[k] - b[k]).abs() < 1e-12 * a[k].abs().max(1.0));
            }
        }
    }

    #[test]
    fn narrow_filter_matches_line_centre() {
        let m = nominal_model();
        let center = output_spectral_cm(0.0, &m).unwrap();
        let b = m.scatter.gamma_eff() / (2.0 * std::f64::consts::PI) / 1000.0;
        for kind in [FilterKind::Rect, FilterKind::Gaussian] {
            let f = filtered_output_cm(&m, b, kind).unwrap();
            for (i, j) in [(0, 0), (2, 2), (0, 2)] {
                assert!((f.get(i, j) - center.get(i, j)).abs() < 1e-3 * center.get(i, j).abs());
            }
        }
    }

    #[test]
    fn filtering_cannot_beat_line_centre() {
        let m = nominal_model();
        let center = epr_duan_optimal(&output_spectral_cm(0.0, &m).unwrap()).0.delta_epr;
        let f = filtered_output_cm(&m, 100.0, FilterKind::Rect).unwrap();
        let r = entanglement_report(&f).unwrap();
        assert!(r.delta_epr >= center - 1e-9);
        assert!(r.delta_epr < 1.0 && r.e_n > 0.0);
    }

    #[test]
    fn unstable_model_rejected() {
        let mut m = nominal_model();
        m.scatter.c2 = 10.0;
        assert!(matches!(output_spectral_cm(0.0, &m), Err(Error::Unstable(_))));
        assert!(matches!(filtered_output_cm(&m, 100.0, FilterKind::Rect), Err(Error::Unstable(_))));
    }

    #[test]
    fn filter_kind_parse() {
        assert_eq!(FilterKind::parse("Gaussian").unwrap(), FilterKind::Gaussian);
        assert_eq!(FilterKind::parse("rect").unwrap(), FilterKind::Rect);
        assert!(FilterKind::parse("box").is_err());
    }
}

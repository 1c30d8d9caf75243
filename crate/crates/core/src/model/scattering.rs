//! Input-output scattering coefficients of the two-cavity device.
//!
//! The output fields are
//!
//! ```text
//! d1(ω) = α1 c1ex + α12 c2ex† + α1m b_in† + α1in c1in + α12in c2in†
//! d2(ω) = α2 c2ex + α21 c1ex† + α2m b_in  + α2in c2in + α21in c1in†
//! ```
//!
//! with `ω̃_j = 1 − iω/κ_j`, `ω̃_b = 1 − iω/γ_m` and the common denominator
//! `ω̃1 C2 + ω̃2 (ω̃1 ω̃b − C1)`. Because the cavities and the resonator are
//! damped at `κ/2` and `γ_m/2` in amplitude, `ω` here is twice the physical
//! sideband offset; [`super::spectrum`] handles that conversion.
//!
//! `α1m` carries the sign obtained from the equations of motion of the
//! down-conversion plus beam-splitter interaction (`c1 b` and `c2 b†`
//! terms). With it the ideal lossless output at zero temperature is a pure
//! two-mode squeezed vacuum and `[d1, d2] = 0`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Device parameters entering the scattering problem. Rates in rad/s.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScatterParams {
    pub c1: f64,
    pub c2: f64,
    pub eta1: f64,
    pub eta2: f64,
    pub kappa1: f64,
    pub kappa2: f64,
    pub gamma_m: f64,
}

impl ScatterParams {
    pub fn validate(&self) -> Result<()> {
        let ok = self.c1 >= 0.0
            && self.c2 >= 0.0
            && self.eta1 > 0.0
            && self.eta1 <= 1.0
            && self.eta2 > 0.0
            && self.eta2 <= 1.0
            && self.kappa1 > 0.0
            && self.kappa2 > 0.0
            && self.gamma_m > 0.0;
        if !ok {
            return Err(Error::InvalidParameter(format!("invalid scattering parameters {self:?}")));
        }
        Ok(())
    }

    pub fn gamma_eff(&self) -> f64 {
        self.gamma_m * (1.0 + self.c2 - self.c1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScatterCoeffs {
    pub omega: f64,
    pub a1: Complex64,
    pub a12: Complex64,
    pub a1m: Complex64,
    pub a1in: Complex64,
    pub a12in: Complex64,
    pub a2: Complex64,
    pub a21: Complex64,
    pub a2m: Complex64,
    pub a2in: Complex64,
    pub a21in: Complex64,
}

const DEN_MIN: f64 = 1e-12;

/// Coefficients at frequency `omega` (see module docs for the convention).
pub fn scattering_coefficients(omega: f64, p: &ScatterParams) -> Result<ScatterCoeffs> {
    p.validate()?;
    let i = Complex64::i();
    let w1 = 1.0 - i * (omega / p.kappa1);
    let w2 = 1.0 - i * (omega / p.kappa2);
    let wb = 1.0 - i * (omega / p.gamma_m);
    let den = w1 * p.c2 + w2 * (w1 * wb - p.c1);
    if den.norm() < DEN_MIN {
        return Err(Error::DenominatorSingular { omega });
    }
    let inv = den.inv();
    let (e1, e2) = (p.eta1, p.eta2);
    let cc = (p.c1 * p.c2).sqrt();
    let n1 = w2 * wb + p.c2;
    let n2 = w1 * wb - p.c1;
    Ok(ScatterCoeffs {
        omega,
        a1: -1.0 + 2.0 * e1 * n1 * inv,
        a12: 2.0 * (e1 * e2).sqrt() * cc * inv,
        a1m: -2.0 * i * (e1 * p.c1).sqrt() * w2 * inv,
        a1in: 2.0 * (e1 * (1.0 - e1)).sqrt() * n1 * inv,
        a12in: 2.0 * (e1 * (1.0 - e2)).sqrt() * cc * inv,
        a2: -1.0 + 2.0 * e2 * n2 * inv,
        a21: -2.0 * (e1 * e2).sqrt() * cc * inv,
        a2m: -2.0 * i * (e2 * p.c2).sqrt() * w1 * inv,
        a2in: 2.0 * (e2 * (1.0 - e2)).sqrt() * n2 * inv,
        a21in: -2.0 * (e2 * (1.0 - e1)).sqrt() * cc * inv,
    })
}

/// Simplified coefficients at `ω ≈ 0`, written with `γ_eff`.
pub fn resonant_coefficients(p: &ScatterParams) -> Result<ScatterCoeffs> {
    p.validate()?;
    let g_eff = p.gamma_eff();
    if g_eff.abs() < DEN_MIN * p.gamma_m {
        return Err(Error::DenominatorSingular { omega: 0.0 });
    }
    let i = Complex64::i();
    let k = Complex64::from(2.0 * p.gamma_m / g_eff);
    let (e1, e2) = (p.eta1, p.eta2);
    let cc = (p.c1 * p.c2).sqrt();
    Ok(ScatterCoeffs {
        omega: 0.0,
        a1: -1.0 + k * e1 * (1.0 + p.c2),
        a12: k * (e1 * e2).sqrt() * cc,
        a1m: -i * k * (e1 * p.c1).sqrt(),
        a1in: k * (e1 * (1.0 - e1)).sqrt() * (1.0 + p.c2),
        a12in: k * (e1 * (1.0 - e2)).sqrt() * cc,
        a2: -1.0 + k * e2 * (1.0 - p.c1),
        a21: -k * (e1 * e2).sqrt() * cc,
        a2m: -i * k * (e2 * p.c2).sqrt(),
        a2in: k * (e2 * (1.0 - e2)).sqrt() * (1.0 - p.c1),
        a21in: -k * (e2 * (1.0 - e1)).sqrt() * cc,
    })
}

/// Lossless (`η = 1`) resonant coefficients: `α1, α2, α12 = −α21, α1m, α2m`.
pub fn ideal_coefficients(c1: f64, c2: f64, gamma_m: f64) -> Result<ScatterCoeffs> {
    resonant_coefficients(&ScatterParams { c1, c2, eta1: 1.0, eta2: 1.0, kappa1: 1.0, kappa2: 1.0, gamma_m })
}

impl ScatterCoeffs {
    /// `[d1, d1†]`: `|α1|² + |α1in|² − |α12|² − |α12in|² − |α1m|²`.
    pub fn mode1_commutator(&self) -> f64 {
        self.a1.norm_sqr() + self.a1in.norm_sqr() - self.a12.norm_sqr() - self.a12in.norm_sqr() - self.a1m.norm_sqr()
    }

    /// `[d2, d2†]`: `|α2|² + |α2in|² − |α21|² − |α21in|² + |α2m|²`.
    pub fn mode2_commutator(&self) -> f64 {
        self.a2.norm_sqr() + self.a2in.norm_sqr() - self.a21.norm_sqr() - self.a21in.norm_sqr() + self.a2m.norm_sqr()
    }

    /// `[d1(ω), d2(ω')]` coefficient given the mode-2 coefficients at `ω'`.
    pub fn cross_commutator(&self, other: &ScatterCoeffs) -> Complex64 {
        self.a1 * other.a21 - self.a12 * other.a2 - self.a1m * other.a2m + self.a1in * other.a21in
            - self.a12in * other.a2in
    }

    /// Largest elementwise modulus difference to `other`.
    pub fn max_abs_diff(&self, other: &ScatterCoeffs) -> f64 {
        self.as_array().iter().zip(other.as_array().iter()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    /// Coefficients in the order `α1, α12, α1m, α1in, α12in, α2, α21, α2m, α2in, α21in`.
    pub fn as_array(&self) -> [Complex64; 10] {
        [self.a1, self.a12, self.a1m, self.a1in, self.a12in, self.a2, self.a21, self.a2m, self.a2in, self.a21in]
    }
}

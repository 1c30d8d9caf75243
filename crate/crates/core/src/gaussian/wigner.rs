use std::f64::consts::PI;

use nalgebra::{Matrix4, SymmetricEigen, Vector4};
use rayon::prelude::*;

use super::covmat::{CovMat4, Quadrature};
use crate::error::{Error, Result};
use crate::quadrature::gauss_legendre;

const MIN_DET: f64 = 1e-300;

/// Precomputed Gaussian Wigner function `W(ψ) = exp(−ψ·V⁻¹·ψ/2) / ((2π)²√det V)`.
#[derive(Debug, Clone)]
pub struct Wigner {
    inverse: Matrix4<f64>,
    prefactor: f64,
}

impl Wigner {
    pub fn new(v: &CovMat4) -> Result<Self> {
        let m = v.to_matrix();
        let det = m.determinant();
        if !(det >= MIN_DET) {
            return Err(Error::SingularCovariance(det));
        }
        let inverse = m.try_inverse().ok_or(Error::SingularCovariance(det))?;
        Ok(Self { inverse, prefactor: 1.0 / (4.0 * PI * PI * det.sqrt()) })
    }

    #[inline]
    pub fn eval(&self, psi: &[f64; 4]) -> f64 {
        let p = Vector4::from_column_slice(psi);
        self.prefactor * (-0.5 * p.dot(&(self.inverse * p))).exp()
    }

    /// Value at the phase-space origin.
    pub fn peak(&self) -> f64 {
        self.prefactor
    }
}

/// Wigner quasiprobability of the state `v` at `psi = (X1, P1, X2, P2)`.
pub fn wigner_density(v: &CovMat4, psi: &[f64; 4]) -> Result<f64> {
    Ok(Wigner::new(v)?.eval(psi))
}

/// Covariance of the two quadratures in `keep`; for a Gaussian this is the
/// covariance of the marginal after integrating out the other two.
pub fn marginal_cm(v: &CovMat4, keep: (Quadrature, Quadrature)) -> Result<[[f64; 2]; 2]> {
    let (a, b) = keep;
    if a == b {
        return Err(Error::InvalidParameter(format!("marginal pair repeats {}", a.label())));
    }
    Ok([[v.elem(a, a), v.elem(a, b)], [v.elem(b, a), v.elem(b, b)]])
}

/// Integrates the Wigner function over a box of `±half_width` standard
/// deviations along each principal axis of `v`, with an `nodes`-point
/// Gauss-Legendre rule per axis. A rotation has unit Jacobian, so the result
/// is the plain phase-space integral of `W` over that box.
pub fn wigner_normalization(v: &CovMat4, nodes: usize, half_width: f64) -> Result<f64> {
    let w = Wigner::new(v)?;
    let eig = SymmetricEigen::new(v.to_matrix());
    let mut axes = [[0.0f64; 4]; 4];
    let mut jac = 1.0;
    for k in 0..4 {
        let lambda = eig.eigenvalues[k];
        if !(lambda > 0.0) {
            return Err(Error::SingularCovariance(lambda));
        }
        let len = half_width * lambda.sqrt();
        jac *= len;
        for i in 0..4 {
            axes[k][i] = eig.eigenvectors[(i, k)] * len;
        }
    }
    let (x, wts) = gauss_legendre(nodes);
    let total: f64 = (0..nodes)
        .into_par_iter()
        .map(|a| {
            let mut acc = 0.0;
            for b in 0..nodes {
                for c in 0..nodes {
                    for d in 0..nodes {
                        let t = [x[a], x[b], x[c], x[d]];
                        let mut psi = [0.0; 4];
                        for (k, tk) in t.iter().enumerate() {
                            for i in 0..4 {
                                psi[i] += tk * axes[k][i];
                            }
                        }
                        acc += wts[b] * wts[c] * wts[d] * w.eval(&psi);
                    }
                }
            }
            wts[a] * acc
        })
        .sum();
    Ok(total * jac)
}

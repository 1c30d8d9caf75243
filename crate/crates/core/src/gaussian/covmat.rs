use nalgebra::Matrix4;
use serde::{Deserialize, Serialize};

use crate::constants::VACUUM_VARIANCE;
use crate::error::{Error, Result};

/// Absolute tolerance for physicality and normal-form checks.
pub const PHYS_TOL: f64 = 1e-9;

/// Quadrature index in the ordering `(X1, P1, X2, P2)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Quadrature {
    X1 = 0,
    P1 = 1,
    X2 = 2,
    P2 = 3,
}

impl Quadrature {
    pub const ALL: [Quadrature; 4] = [Quadrature::X1, Quadrature::P1, Quadrature::X2, Quadrature::P2];

    #[inline]
    pub fn index(self) -> usize {
        self as usize
    }

    pub fn label(self) -> &'static str {
        match self {
            Quadrature::X1 => "X1",
            Quadrature::P1 => "P1",
            Quadrature::X2 => "X2",
            Quadrature::P2 => "P2",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "X1" => Ok(Quadrature::X1),
            "P1" => Ok(Quadrature::P1),
            "X2" => Ok(Quadrature::X2),
            "P2" => Ok(Quadrature::P2),
            other => Err(Error::Parse(format!("unknown quadrature {other:?}"))),
        }
    }
}

/// Symmetric 4×4 covariance matrix of two bosonic modes, ordered
/// `(X1, P1, X2, P2)`, with vacuum variance 1/2.
///
/// Instances built through [`CovMat4::new`] are exactly symmetric and satisfy
/// the uncertainty relation `V + iΩ/2 ≥ 0` to within [`PHYS_TOL`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CovMat4 {
    v: [[f64; 4]; 4],
}

/// Elements of a normal-form matrix: `V11 = V22`, `V33 = V44`, `V13 = -V24`,
/// all other off-diagonals zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormalForm {
    pub v11: f64,
    pub v33: f64,
    pub v13: f64,
}

impl CovMat4 {
    /// Validated constructor. Symmetry must hold to 1e-12 relative; the stored
    /// matrix is then symmetrised exactly.
    pub fn new(v: [[f64; 4]; 4]) -> Result<Self> {
        let m = Self::symmetrized(v)?;
        m.check_physical()?;
        Ok(m)
    }

    /// Symmetrises without the physicality check. Used for raw estimates and
    /// noisy intermediate matrices.
    pub fn symmetrized(mut v: [[f64; 4]; 4]) -> Result<Self> {
        let scale = v.iter().flatten().fold(1.0f64, |acc, x| acc.max(x.abs()));
        for i in 0..4 {
            for j in 0..4 {
                if !v[i][j].is_finite() {
                    return Err(Error::InvalidParameter(format!("non-finite element v[{i}][{j}]")));
                }
            }
        }
        for i in 0..4 {
            for j in (i + 1)..4 {
                let diff = (v[i][j] - v[j][i]).abs();
                if diff > 1e-12 * scale {
                    return Err(Error::NotSymmetric { i, j, diff });
                }
                let avg = 0.5 * (v[i][j] + v[j][i]);
                v[i][j] = avg;
                v[j][i] = avg;
            }
        }
        Ok(Self { v })
    }

    pub fn vacuum() -> Self {
        Self::diagonal([VACUUM_VARIANCE; 4])
    }

    pub(crate) fn diagonal(d: [f64; 4]) -> Self {
        let mut v = [[0.0; 4]; 4];
        for i in 0..4 {
            v[i][i] = d[i];
        }
        Self { v }
    }

    /// Builds the normal-form matrix from `(V11, V33, V13)`.
    pub fn from_normal_form(v11: f64, v33: f64, v13: f64) -> Result<Self> {
        Self::new(Self::normal_form_array(v11, v33, v13))
    }

    pub(crate) fn normal_form_array(v11: f64, v33: f64, v13: f64) -> [[f64; 4]; 4] {
        [[v11, 0.0, v13, 0.0], [0.0, v11, 0.0, -v13], [v13, 0.0, v33, 0.0], [0.0, -v13, 0.0, v33]]
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.v[i][j]
    }

    #[inline]
    pub fn elem(&self, a: Quadrature, b: Quadrature) -> f64 {
        self.v[a.index()][b.index()]
    }

    pub fn as_array(&self) -> [[f64; 4]; 4] {
        self.v
    }

    pub fn to_matrix(&self) -> Matrix4<f64> {
        Matrix4::from_fn(|i, j| self.v[i][j])
    }

    pub fn determinant(&self) -> f64 {
        self.to_matrix().determinant()
    }

    /// Adds `d[i]` to each diagonal element (e.g. phase-insensitive added noise).
    pub fn add_diagonal(&self, d: [f64; 4]) -> Result<Self> {
        let mut v = self.v;
        for i in 0..4 {
            v[i][i] += d[i];
        }
        Self::new(v)
    }

    fn block_dets(&self) -> (f64, f64, f64) {
        let v = &self.v;
        let det_a = v[0][0] * v[1][1] - v[0][1] * v[1][0];
        let det_b = v[2][2] * v[3][3] - v[2][3] * v[3][2];
        let det_c = v[0][2] * v[1][3] - v[0][3] * v[1][2];
        (det_a, det_b, det_c)
    }

    fn eigen_pair(delta: f64, det: f64) -> (f64, f64) {
        let disc = (delta * delta - 4.0 * det).max(0.0).sqrt();
        let lo = (0.5 * (delta - disc)).max(0.0).sqrt();
        let hi = (0.5 * (delta + disc)).max(0.0).sqrt();
        (lo, hi)
    }

    /// Symplectic eigenvalues `(ν₋, ν₊)` from the local symplectic invariants.
    /// Valid for any two-mode covariance matrix, normal form or not.
    pub fn symplectic_eigenvalues(&self) -> (f64, f64) {
        let (a, b, c) = self.block_dets();
        Self::eigen_pair(a + b + 2.0 * c, self.determinant())
    }

    /// Symplectic eigenvalues of the partially transposed matrix.
    pub fn pt_symplectic_eigenvalues(&self) -> (f64, f64) {
        let (a, b, c) = self.block_dets();
        Self::eigen_pair(a + b - 2.0 * c, self.determinant())
    }

    pub fn is_physical(&self) -> bool {
        self.check_physical().is_ok()
    }

    pub fn check_physical(&self) -> Result<()> {
        for i in 0..4 {
            if self.v[i][i] < VACUUM_VARIANCE - PHYS_TOL {
                return Err(Error::Unphysical(format!("diagonal element {i} = {} below vacuum level", self.v[i][i])));
            }
        }
        if self.to_matrix().cholesky().is_none() {
            return Err(Error::Unphysical("matrix is not positive definite".into()));
        }
        let (nu_minus, _) = self.symplectic_eigenvalues();
        if nu_minus < VACUUM_VARIANCE - PHYS_TOL {
            return Err(Error::Unphysical(format!("smallest symplectic eigenvalue {nu_minus} < 1/2")));
        }
        Ok(())
    }

    /// Returns the normal-form elements if the matrix has the normal-form
    /// pattern to within `PHYS_TOL` (scaled by the largest diagonal element).
    pub fn normal_form(&self) -> Result<NormalForm> {
        let v = &self.v;
        let tol = PHYS_TOL * v[0][0].abs().max(v[2][2].abs()).max(1.0);
        let checks = [
            ("V12", v[0][1]),
            ("V14", v[0][3]),
            ("V23", v[1][2]),
            ("V34", v[2][3]),
            ("V11-V22", v[0][0] - v[1][1]),
            ("V33-V44", v[2][2] - v[3][3]),
            ("V13+V24", v[0][2] + v[1][3]),
        ];
        for (name, val) in checks {
            if val.abs() > tol {
                return Err(Error::NotNormalForm(format!("{name} = {val:e}")));
            }
        }
        Ok(NormalForm {
            v11: 0.5 * (v[0][0] + v[1][1]),
            v33: 0.5 * (v[2][2] + v[3][3]),
            v13: 0.5 * (v[0][2] - v[1][3]),
        })
    }

    /// Rotates the detector phase of mode 1 by `phi`:
    /// `(X1, P1) → (cos φ X1 + sin φ P1, −sin φ X1 + cos φ P1)`.
    pub fn rotate_mode1(&self, phi: f64) -> Self {
        let (s, c) = phi.sin_cos();
        let (s2, c2) = (2.0 * phi).sin_cos();
        let o = &self.v;
        let mut v = *o;
        // double-angle form keeps an isotropic block exactly isotropic
        let mean = 0.5 * (o[0][0] + o[1][1]);
        let half_diff = 0.5 * (o[0][0] - o[1][1]);
        v[0][0] = mean + c2 * half_diff + s2 * o[0][1];
        v[1][1] = mean - c2 * half_diff - s2 * o[0][1];
        v[0][1] = c2 * o[0][1] - s2 * half_diff;
        v[1][0] = v[0][1];
        for j in 2..4 {
            v[0][j] = c * o[0][j] + s * o[1][j];
            v[1][j] = -s * o[0][j] + c * o[1][j];
            v[j][0] = v[0][j];
            v[j][1] = v[1][j];
        }
        Self { v }
    }

    /// Detector angle that minimises `⟨X₋²⟩ + ⟨P₊²⟩`, in `[0, 2π)`.
    pub fn optimal_detector_angle(&self) -> f64 {
        let v = &self.v;
        // V13' - V24' = cos φ (V13 - V24) + sin φ (V23 + V14)
        let phi = (v[1][2] + v[0][3]).atan2(v[0][2] - v[1][3]);
        phi.rem_euclid(std::f64::consts::TAU)
    }

    /// Approximates a general matrix by a normal form: rotates mode 1 to the
    /// optimal detector angle and averages the X/P entries of each block.
    /// Exact for matrices that are already a rotated normal form.
    pub fn project_normal_form(&self) -> (NormalForm, f64) {
        let phi = self.optimal_detector_angle();
        let r = self.rotate_mode1(phi);
        let v = &r.v;
        (
            NormalForm {
                v11: 0.5 * (v[0][0] + v[1][1]),
                v33: 0.5 * (v[2][2] + v[3][3]),
                v13: 0.5 * (v[0][2] - v[1][3]),
            },
            phi,
        )
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&CovMatFile { v: self.v, convention: CONVENTION_HALF.to_string() })?)
    }

    /// Parses the JSON file format and validates the result.
    pub fn from_json(s: &str) -> Result<Self> {
        let f: CovMatFile = serde_json::from_str(s)?;
        if f.convention != CONVENTION_HALF {
            return Err(Error::UnsupportedConvention(f.convention));
        }
        Self::new(f.v)
    }
}

pub const CONVENTION_HALF: &str = "half";

/// On-disk JSON representation: `{"v": [[...]], "convention": "half"}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CovMatFile {
    pub v: [[f64; 4]; 4],
    pub convention: String,
}

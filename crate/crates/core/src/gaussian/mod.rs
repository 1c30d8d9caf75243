//! Covariance-level mathematics of two-mode Gaussian states.

mod covmat;
mod measures;
mod tmst;
mod wigner;

pub use covmat::{CovMat4, CovMatFile, NormalForm, Quadrature, CONVENTION_HALF, PHYS_TOL};
pub use measures::{
    ebit_rate, entanglement_report, entropy_h, entropy_of_formation, epr_duan, epr_duan_optimal, negativity,
    normal_form_symplectic, quantum_discord, squeezing_db, EntanglementReport, EprDuan, Negativity,
};
pub use tmst::{cm_from_tmst, squeezing_vs_angle, tmst_from_cm, TmstParams};
pub use wigner::{marginal_cm, wigner_density, wigner_normalization, Wigner};

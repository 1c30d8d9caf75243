//! Physics of the three-mode device: drives, stability, input-output
//! scattering and the filtered output-field covariance matrix.
//!
//! Rates and frequencies are angular (rad/s) throughout; the flat config file
//! uses Hz and is converted on ingestion.

mod config;
mod geometry;
mod params;
mod scattering;
mod spectrum;
mod stability;
mod sweep;

pub use config::{DeviceConfig, OperatingPoint};
pub use geometry::{capacitance_scaling, coupling_from_geometry, gap_scaling};
pub use params::{drive_to_cooperativity, thermal_occupation, CavityMode, DriveState, MechanicalMode};
pub use scattering::{
    ideal_coefficients, resonant_coefficients, scattering_coefficients, ScatterCoeffs, ScatterParams,
};
pub use spectrum::{filtered_output_cm, filtered_output_cm_with, output_spectral_cm, Baths, FilterKind, OutputModel};
pub use stability::{critical_c2, stability_check, StabilityReport};
pub use sweep::{power_sweep, read_sweep_csv, write_sweep_csv, SweepRow, SWEEP_COLUMNS};

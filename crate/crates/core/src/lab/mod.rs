//! Synthetic detection chain: amplifier gain and noise, calibration against
//! thermal loads, seeded quadrature sampling, on/off covariance estimation
//! and quadrature histograms.
//!
//! Quadratures are unitless (`X = I/√ζ`); voltages appear only through the
//! explicit export functions.

mod chain;
mod estimate;
mod histogram;
mod sampling;

pub use chain::{
    calibrate_chain, linear_temperatures, noise_density, read_calibration_csv, synthetic_calibration,
    write_calibration_csv, CalibrationFit, CalibrationPoint, RfChain,
};
pub use estimate::{estimate_cm, BatchMoments, CmEstimate, DuanEstimate, MIN_SAMPLES};
pub use histogram::{difference_histogram, DiffHistogram, HistogramMeta, DEFAULT_BINS, DEFAULT_RANGE_SIGMAS};
pub use sampling::{
    detected_covariance, from_voltages, read_batch, rotate_detector, sample_quadratures, to_voltages, write_batch,
    write_batch_csv, write_voltages_csv, QuadratureBatch, BATCH_MAGIC, CHUNK,
};

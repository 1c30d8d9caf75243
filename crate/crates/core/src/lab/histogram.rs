use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::sampling::{QuadratureBatch, CHUNK};
use crate::error::{Error, Result};
use crate::gaussian::Quadrature;

pub const DEFAULT_BINS: usize = 64;
pub const DEFAULT_RANGE_SIGMAS: f64 = 6.0;

/// Difference of normalised two-variable histograms, `on/n_on − off/n_off`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiffHistogram {
    pub pair: (Quadrature, Quadrature),
    pub bins: usize,
    /// `bins + 1` edges along the first quadrature (rows).
    pub edges_a: Vec<f64>,
    /// `bins + 1` edges along the second quadrature (columns).
    pub edges_b: Vec<f64>,
    /// Row-major `bins × bins` grid.
    pub values: Vec<f64>,
    pub n_on: usize,
    pub n_off: usize,
}

/// Metadata written next to the CSV grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistogramMeta {
    pub pair: [String; 2],
    pub bins: usize,
    pub edges_a: Vec<f64>,
    pub edges_b: Vec<f64>,
    pub n_on: usize,
    pub n_off: usize,
}

impl DiffHistogram {
    pub fn at(&self, row: usize, col: usize) -> f64 {
        self.values[row * self.bins + col]
    }

    pub fn bin_centres_a(&self) -> Vec<f64> {
        self.edges_a.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect()
    }

    pub fn bin_centres_b(&self) -> Vec<f64> {
        self.edges_b.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect()
    }

    pub fn meta(&self) -> HistogramMeta {
        HistogramMeta {
            pair: [self.pair.0.label().to_string(), self.pair.1.label().to_string()],
            bins: self.bins,
            edges_a: self.edges_a.clone(),
            edges_b: self.edges_b.clone(),
            n_on: self.n_on,
            n_off: self.n_off,
        }
    }

    /// One CSV line per row of the grid, 17 significant digits.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        for row in self.values.chunks(self.bins) {
            let line: Vec<String> = row.iter().map(|x| format!("{x:.16e}")).collect();
            writeln!(out, "{}", line.join(","))?;
        }
        Ok(())
    }
}

fn edges(half_width: f64, bins: usize) -> Vec<f64> {
    (0..=bins).map(|k| -half_width + 2.0 * half_width * k as f64 / bins as f64).collect()
}

fn counts(batch: &QuadratureBatch, ia: usize, ib: usize, ha: f64, hb: f64, bins: usize) -> Vec<u64> {
    let scale_a = bins as f64 / (2.0 * ha);
    let scale_b = bins as f64 / (2.0 * hb);
    let partial: Vec<Vec<u64>> = batch
        .samples
        .par_chunks(CHUNK)
        .map(|chunk| {
            let mut grid = vec![0u64; bins * bins];
            for q in chunk {
                let (a, b) = ((q[ia] + ha) * scale_a, (q[ib] + hb) * scale_b);
                if a >= 0.0 && b >= 0.0 && a < bins as f64 && b < bins as f64 {
                    grid[a as usize * bins + b as usize] += 1;
                }
            }
            grid
        })
        .collect();
    let mut grid = vec![0u64; bins * bins];
    for g in partial {
        for (t, c) in grid.iter_mut().zip(g) {
            *t += c;
        }
    }
    grid
}

/// Builds the on-minus-off histogram for the quadrature `pair`.
///
/// `half_range` gives the half-widths `(a, b)` of the square-binned window;
/// by default it is [`DEFAULT_RANGE_SIGMAS`] standard deviations of the on
/// batch along each axis.
pub fn difference_histogram(
    on: &QuadratureBatch,
    off: &QuadratureBatch,
    pair: (Quadrature, Quadrature),
    bins: usize,
    half_range: Option<(f64, f64)>,
) -> Result<DiffHistogram> {
    if bins == 0 {
        return Err(Error::EmptyRange("zero bins".into()));
    }
    if pair.0 == pair.1 {
        return Err(Error::InvalidParameter(format!("histogram pair repeats {}", pair.0.label())));
    }
    if on.n() == 0 || off.n() == 0 {
        return Err(Error::InsufficientSamples { need: 1, got: on.n().min(off.n()) });
    }
    let (ia, ib) = (pair.0.index(), pair.1.index());
    let (ha, hb) = match half_range {
        Some(r) => r,
        None => {
            let rms = |i: usize| (on.samples.iter().map(|q| q[i] * q[i]).sum::<f64>() / on.n() as f64).sqrt();
            (DEFAULT_RANGE_SIGMAS * rms(ia), DEFAULT_RANGE_SIGMAS * rms(ib))
        }
    };
    if !(ha > 0.0 && hb > 0.0 && ha.is_finite() && hb.is_finite()) {
        return Err(Error::EmptyRange(format!("histogram half-widths ({ha}, {hb})")));
    }
    let c_on = counts(on, ia, ib, ha, hb, bins);
    let c_off = counts(off, ia, ib, ha, hb, bins);
    let (non, noff) = (on.n() as f64, off.n() as f64);
    let values = c_on.iter().zip(&c_off).map(|(&a, &b)| a as f64 / non - b as f64 / noff).collect();
    Ok(DiffHistogram {
        pair,
        bins,
        edges_a: edges(ha, bins),
        edges_b: edges(hb, bins),
        values,
        n_on: on.n(),
        n_off: off.n(),
    })
}

//! Accuracy metrics against the Reference baseline: pure-state fidelity and
//! amplitude mean squared error, both accumulated at Reference precision
//! after widening.

use std::io::{self, Write};

use num_complex::Complex64;
use thiserror::Error;

use crate::numerics::NumberFormat;
use crate::qstate::StateVector;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MetricsError {
    #[error("state length mismatch: {a} vs {b} amplitudes")]
    LengthMismatch { a: usize, b: usize },
}

/// |<a|b>|^2. Both states are widened to Reference precision first; the
/// overlap accumulates in index order.
pub fn fidelity(a: &StateVector, b: &StateVector) -> Result<f64, MetricsError> {
    if a.len() != b.len() {
        return Err(MetricsError::LengthMismatch { a: a.len(), b: b.len() });
    }
    let mut overlap = Complex64::new(0.0, 0.0);
    for (x, y) in a.amps().iter().zip(b.amps()) {
        overlap += x.to_complex64().conj() * y.to_complex64();
    }
    Ok(overlap.norm_sqr())
}

/// Mean over j of |a_j - b_j|^2.
pub fn mse(a: &StateVector, b: &StateVector) -> Result<f64, MetricsError> {
    if a.len() != b.len() {
        return Err(MetricsError::LengthMismatch { a: a.len(), b: b.len() });
    }
    let sum: f64 = a
        .amps()
        .iter()
        .zip(b.amps())
        .map(|(x, y)| (x.to_complex64() - y.to_complex64()).norm_sqr())
        .sum();
    Ok(sum / a.len() as f64)
}

/// One accuracy row: a task's state at some format compared against the
/// Reference run of the same program.
#[derive(Clone, Debug)]
pub struct AccuracyReport {
    pub task: String,
    pub n: u32,
    pub format: NumberFormat,
    pub fidelity: f64,
    pub mse: f64,
}

impl AccuracyReport {
    pub fn from_states(
        task: &str,
        format: NumberFormat,
        state: &StateVector,
        reference: &StateVector,
    ) -> Result<Self, MetricsError> {
        Ok(AccuracyReport {
            task: task.to_string(),
            n: state.n(),
            format,
            fidelity: fidelity(state, reference)?,
            mse: mse(state, reference)?,
        })
    }

    pub fn csv_header() -> &'static str {
        "task,n,format,fidelity,mse"
    }

    pub fn write_csv_row<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(
            out,
            "{},{},{},{:.16e},{:.16e}",
            self.task, self.n, self.format, self.fidelity, self.mse
        )
    }
}

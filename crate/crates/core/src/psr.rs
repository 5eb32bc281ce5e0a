//! Quantum differentiable programming on the ZXZ ansatz: the index-weighted
//! cost function, two-term parameter-shift gradients, and plain gradient
//! descent.
//!
//! Circuit executions happen at the session format; the cost accumulation,
//! gradient subtraction and parameter updates happen at Reference precision,
//! mirroring the host-side software around the accelerator.

use std::io::{self, Write};

use rayon::prelude::*;
use thiserror::Error;

use crate::circuits::{build_zxz, CircuitError};
use crate::gates::GateError;
use crate::kernel::{run_program, KernelError};
use crate::numerics::{NumberFormat, Rounding};
use crate::qstate::StateVector;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PsrError {
    #[error("parameter index {j} out of range for {params} parameters")]
    ParameterOutOfRange { j: usize, params: usize },
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error(transparent)]
    Kernel(#[from] KernelError),
}

impl From<GateError> for PsrError {
    fn from(e: GateError) -> Self {
        PsrError::Circuit(CircuitError::Gate(e))
    }
}

/// The constant multiplying the two-term difference. `Half` is the exact
/// gradient for e^{-i theta P / 2} rotations and is validated against finite
/// differences; `InvSqrt2` is the alternate 1/sqrt(2) scaling, off by a
/// constant factor sqrt(2).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum ShiftScale {
    #[default]
    Half,
    InvSqrt2,
}

impl ShiftScale {
    pub fn factor(self) -> f64 {
        match self {
            ShiftScale::Half => 0.5,
            ShiftScale::InvSqrt2 => std::f64::consts::FRAC_1_SQRT_2,
        }
    }
}

/// C = sum_j j * |alpha_j|^2, accumulated at Reference precision from
/// whatever format the state is stored in.
pub fn cost(state: &StateVector) -> f64 {
    state
        .amps()
        .iter()
        .enumerate()
        .map(|(j, amp)| j as f64 * amp.prob())
        .sum()
}

/// One ansatz execution at the given format; the state the cost is read from.
pub fn run_ansatz(
    n: u32,
    thetas: &[f64],
    format: NumberFormat,
    rounding: Rounding,
) -> Result<StateVector, PsrError> {
    let program = build_zxz(n, thetas)?.lower(format, rounding)?;
    Ok(run_program(&program, format, rounding)?)
}

/// Two-term parameter-shift derivative of the cost with respect to parameter
/// `j`: factor * [C(theta + pi/2 e_j) - C(theta - pi/2 e_j)], each cost from
/// one full emulator run at `format`.
pub fn grad_psr(
    n: u32,
    thetas: &[f64],
    j: usize,
    format: NumberFormat,
    rounding: Rounding,
    scale: ShiftScale,
) -> Result<f64, PsrError> {
    if j >= thetas.len() {
        return Err(PsrError::ParameterOutOfRange { j, params: thetas.len() });
    }
    let shift = std::f64::consts::FRAC_PI_2;
    let mut plus = thetas.to_vec();
    let mut minus = thetas.to_vec();
    plus[j] += shift;
    minus[j] -= shift;
    let c_plus = cost(&run_ansatz(n, &plus, format, rounding)?);
    let c_minus = cost(&run_ansatz(n, &minus, format, rounding)?);
    Ok(scale.factor() * (c_plus - c_minus))
}

/// One gradient-descent iteration as recorded in the history. `thetas` and
/// `cost` are the values after the update.
#[derive(Clone, Debug, PartialEq)]
pub struct IterationRecord {
    pub iteration: usize,
    pub cost: f64,
    pub thetas: Vec<f64>,
}

/// Result of a gradient-descent run.
#[derive(Clone, Debug)]
pub struct Optimizer {
    pub thetas: Vec<f64>,
    pub gamma: f64,
    pub iterations: usize,
    pub history: Vec<IterationRecord>,
    /// Emulator sessions executed: 2 * 3n per iteration for the shifts plus
    /// one cost evaluation per iteration.
    pub sessions_run: usize,
}

/// Plain gradient descent on the 3n ansatz parameters. The 2m shifted
/// evaluations of an iteration run concurrently but reduce in parameter
/// order, so histories are deterministic.
pub fn optimize(
    n: u32,
    theta0: &[f64],
    gamma: f64,
    iterations: usize,
    format: NumberFormat,
    rounding: Rounding,
    scale: ShiftScale,
) -> Result<Optimizer, PsrError> {
    let mut thetas = theta0.to_vec();
    if thetas.len() != 3 * n as usize {
        return Err(PsrError::Circuit(CircuitError::WrongParameterCount {
            expected: 3 * n as usize,
            got: thetas.len(),
        }));
    }
    let mut history = Vec::with_capacity(iterations);
    let mut sessions_run = 0;
    for iteration in 1..=iterations {
        let grads = (0..thetas.len())
            .into_par_iter()
            .map(|j| grad_psr(n, &thetas, j, format, rounding, scale))
            .collect::<Result<Vec<f64>, PsrError>>()?;
        sessions_run += 2 * thetas.len();
        for (theta, grad) in thetas.iter_mut().zip(&grads) {
            *theta -= gamma * grad;
        }
        let c = cost(&run_ansatz(n, &thetas, format, rounding)?);
        sessions_run += 1;
        history.push(IterationRecord { iteration, cost: c, thetas: thetas.clone() });
    }
    Ok(Optimizer {
        thetas,
        gamma,
        iterations,
        history,
        sessions_run,
    })
}

/// Optimization trace: CSV `iter,cost,theta_0..theta_{3n-1}`.
pub fn write_trace_csv<W: Write>(mut out: W, optimizer: &Optimizer) -> io::Result<()> {
    let params = optimizer.thetas.len();
    write!(out, "iter,cost")?;
    for j in 0..params {
        write!(out, ",theta_{j}")?;
    }
    writeln!(out)?;
    for record in &optimizer.history {
        write!(out, "{},{:.16e}", record.iteration, record.cost)?;
        for theta in &record.thetas {
            write!(out, ",{theta}")?;
        }
        writeln!(out)?;
    }
    Ok(())
}

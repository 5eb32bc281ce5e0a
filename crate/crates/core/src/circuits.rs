//! Benchmark circuit builders: the quantum Fourier transform, seeded random
//! circuits, and the ZXZ variational ansatz.
//!
//! All builders produce format-free [`Circuit`]s out of the basic gate set
//! only, so the gate counts below are exactly the instruction counts after
//! lowering.

use std::f64::consts::{PI, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::gates::{Circuit, Gate, GateError};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CircuitError {
    #[error("qubit count must be at least 1")]
    ZeroQubits,
    #[error("depth must be at least 1")]
    ZeroDepth,
    #[error("parameter vector must have length 3n = {expected}, got {got}")]
    WrongParameterCount { expected: usize, got: usize },
    #[error(transparent)]
    Gate(#[from] GateError),
}

/// Quantum Fourier transform on `n` qubits, transpiled to the basic set:
/// `n` Hadamards, each controlled phase CP(pi/2^k) expanded to
/// Rz(theta/2) on the control, Rz(theta/2) on the target, CX, Rz(-theta/2)
/// on the target, CX, and the final reversal as floor(n/2) swaps of 3 CX
/// each. Totals: n H, n(n-1) + 3*floor(n/2) CX, (3/2)n(n-1) Rz.
pub fn build_qft(n: u32) -> Result<Circuit, CircuitError> {
    if n < 1 {
        return Err(CircuitError::ZeroQubits);
    }
    let mut circuit = Circuit::new(n);
    for j in 0..n as u8 {
        circuit.push(Gate::H { target: j })?;
        for k in 1..(n as u8 - j) {
            let theta = PI / (1u64 << k) as f64;
            let control = j + k;
            circuit.push(Gate::Rz { target: control, theta: theta / 2.0 })?;
            circuit.push(Gate::Rz { target: j, theta: theta / 2.0 })?;
            circuit.push(Gate::Cx { control, target: j })?;
            circuit.push(Gate::Rz { target: j, theta: -theta / 2.0 })?;
            circuit.push(Gate::Cx { control, target: j })?;
        }
    }
    for j in 0..(n / 2) as u8 {
        let k = (n - 1) as u8 - j;
        circuit.push(Gate::Cx { control: j, target: k })?;
        circuit.push(Gate::Cx { control: k, target: j })?;
        circuit.push(Gate::Cx { control: j, target: k })?;
    }
    Ok(circuit)
}

/// Random circuit of exactly `n * depth` gates drawn uniformly from the pool
/// {H, S, CX, Rx, Ry, Rz} (CX excluded when `n == 1`).
///
/// Generation is frozen for reproducibility: the PRNG is ChaCha8 seeded via
/// `seed_from_u64(seed)`, and each gate draws, in order, its kind, its
/// qubit(s) (for CX the control, then the target among the remaining
/// qubits), and finally a rotation angle uniform in [0, 2*pi).
pub fn build_rqc(n: u32, depth: u32, seed: u64) -> Result<Circuit, CircuitError> {
    if n < 1 {
        return Err(CircuitError::ZeroQubits);
    }
    if depth < 1 {
        return Err(CircuitError::ZeroDepth);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut circuit = Circuit::new(n);
    let pool = if n == 1 { 5 } else { 6 };
    for _ in 0..n * depth {
        // Pool order with CX last, so the 1-qubit pool is a prefix.
        let kind = rng.gen_range(0..pool);
        let gate = match kind {
            0 => Gate::H { target: rng.gen_range(0..n) as u8 },
            1 => Gate::S { target: rng.gen_range(0..n) as u8 },
            2 => Gate::Rx { target: rng.gen_range(0..n) as u8, theta: rng.gen::<f64>() * TAU },
            3 => Gate::Ry { target: rng.gen_range(0..n) as u8, theta: rng.gen::<f64>() * TAU },
            4 => Gate::Rz { target: rng.gen_range(0..n) as u8, theta: rng.gen::<f64>() * TAU },
            _ => {
                let control = rng.gen_range(0..n) as u8;
                let mut target = rng.gen_range(0..n - 1) as u8;
                if target >= control {
                    target += 1;
                }
                Gate::Cx { control, target }
            }
        };
        circuit.push(gate)?;
    }
    Ok(circuit)
}

/// The ZXZ ansatz: per qubit q, Rz(thetas[3q]), Rx(thetas[3q+1]),
/// Rz(thetas[3q+2]); 2n Rz and n Rx gates in total.
pub fn build_zxz(n: u32, thetas: &[f64]) -> Result<Circuit, CircuitError> {
    if n < 1 {
        return Err(CircuitError::ZeroQubits);
    }
    if thetas.len() != 3 * n as usize {
        return Err(CircuitError::WrongParameterCount {
            expected: 3 * n as usize,
            got: thetas.len(),
        });
    }
    let mut circuit = Circuit::new(n);
    for q in 0..n as u8 {
        let base = 3 * q as usize;
        circuit.push(Gate::Rz { target: q, theta: thetas[base] })?;
        circuit.push(Gate::Rx { target: q, theta: thetas[base + 1] })?;
        circuit.push(Gate::Rz { target: q, theta: thetas[base + 2] })?;
    }
    Ok(circuit)
}

/// Deterministic parameter draw for the ansatz: 3n angles uniform in
/// [0, 2*pi) from ChaCha8 seeded with `seed`.
pub fn random_thetas(n: u32, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..3 * n).map(|_| rng.gen::<f64>() * TAU).collect()
}

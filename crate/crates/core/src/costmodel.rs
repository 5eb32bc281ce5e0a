//! Cycle-accurate prediction of hardware execution time, normalized gate
//! speed and power-delay product.
//!
//! A gate costs `period_ns * cycles(opcode) * 2^n`: the gate unit streams
//! all 2^n amplitudes through its pipeline, whose depth depends on the gate
//! type and number width. Derived gates were lowered before prediction, so
//! they cost exactly their basic-gate equivalent. Host/accelerator transfer
//! time is not modeled.

use std::io::{self, Write};

use thiserror::Error;

use crate::gates::{Opcode, Program};
use crate::numerics::NumberFormat;

/// Accelerator power draw observed while running, in watts.
pub const DEFAULT_WATTS: f64 = 0.81;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CostError {
    #[error("normalized gate speed is undefined for an empty program")]
    EmptyProgram,
    #[error("no built-in timing profile for format {0}")]
    NoProfile(NumberFormat),
}

/// Per-format gate timing: clock period and pipeline cycles per gate type.
#[derive(Clone, Debug, PartialEq)]
pub struct TimingProfile {
    pub format: NumberFormat,
    pub period_ns: f64,
    cycles: [u64; 6],
}

impl TimingProfile {
    pub fn new(format: NumberFormat, period_ns: f64, cycles: [u64; 6]) -> Self {
        TimingProfile { format, period_ns, cycles }
    }

    /// The synthesized hardware's numbers. Floating-point pipelines are
    /// deeper (two-stage adders), so FP gates take more cycles; the
    /// Reference format has no hardware profile.
    pub fn built_in(format: NumberFormat) -> Option<TimingProfile> {
        // cycles indexed by opcode: [H, S, CX, Rx, Ry, Rz]
        const FP_CYCLES: [u64; 6] = [6, 4, 4, 6, 6, 8];
        const FX_CYCLES: [u64; 6] = [4, 2, 2, 4, 4, 4];
        let (period_ns, cycles) = match format {
            NumberFormat::Fp16 => (6.66, FP_CYCLES),
            NumberFormat::Fp32 => (7.35, FP_CYCLES),
            NumberFormat::Fx16 => (7.35, FX_CYCLES),
            NumberFormat::Fx24 => (8.00, FX_CYCLES),
            NumberFormat::Fx32 => (9.35, FX_CYCLES),
            NumberFormat::Reference => return None,
        };
        Some(TimingProfile { format, period_ns, cycles })
    }

    pub fn cycles_for(&self, opcode: Opcode) -> u64 {
        self.cycles[opcode as usize]
    }
}

/// Constant power model; the measured draw does not vary with qubit count.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PowerProfile {
    pub watts: f64,
}

impl Default for PowerProfile {
    fn default() -> Self {
        PowerProfile { watts: DEFAULT_WATTS }
    }
}

/// Predicted cost of one program at one format.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CostReport {
    pub gates: usize,
    pub qubits: u32,
    /// Pipeline cycles summed over gates (per amplitude pass).
    pub total_cycles: u64,
    pub time_s: f64,
    /// time / (gates * 2^n); 0 when the program is empty.
    pub ngs: f64,
    pub pdp_joules: f64,
}

impl CostReport {
    pub fn csv_header() -> &'static str {
        "task,n,format,gates,cycles,time_s,ngs,pdp_j"
    }

    pub fn write_csv_row<W: Write>(&self, mut out: W, task: &str, format: NumberFormat) -> io::Result<()> {
        writeln!(
            out,
            "{task},{},{format},{},{},{:.6e},{:.6e},{:.6e}",
            self.qubits, self.gates, self.total_cycles, self.time_s, self.ngs, self.pdp_joules
        )
    }
}

/// Predict execution time for the program: every gate streams 2^n amplitudes
/// at one pipeline pass of `cycles(opcode)` cycles each.
pub fn predict(program: &Program, timing: &TimingProfile, power: &PowerProfile) -> CostReport {
    let total_cycles: u64 = program
        .instructions()
        .iter()
        .map(|ins| timing.cycles_for(ins.opcode))
        .sum();
    let amplitudes = (1u64 << program.n()) as f64;
    let time_s = timing.period_ns * 1e-9 * amplitudes * total_cycles as f64;
    let gates = program.len();
    CostReport {
        gates,
        qubits: program.n(),
        total_cycles,
        time_s,
        ngs: if gates == 0 { 0.0 } else { time_s / (gates as f64 * amplitudes) },
        pdp_joules: pdp(time_s, power),
    }
}

/// Normalized gate speed: execution time / (#gates * 2^n). Lower is better.
pub fn ngs(time_s: f64, gates: usize, n: u32) -> Result<f64, CostError> {
    if gates == 0 {
        return Err(CostError::EmptyProgram);
    }
    Ok(time_s / (gates as f64 * (1u64 << n) as f64))
}

/// Power-delay product in joules.
pub fn pdp(time_s: f64, power: &PowerProfile) -> f64 {
    power.watts * time_s
}

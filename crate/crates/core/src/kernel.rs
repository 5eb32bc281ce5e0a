//! The transition-function engine: single-qubit and CX amplitude updates,
//! and the program-counter loop that alternates the ping/pong buffers.
//!
//! Qubit indices are most-significant-first: qubit `w` of basis index `i`
//! is integer bit `n - 1 - w`, and the stride between the two amplitudes a
//! gate on `w` couples is `cut = 2^(n - w - 1)`. The update walks source
//! indices in ascending order and accumulates into the destination with the
//! format's rounded primitives, so every (program, format) pair produces
//! bit-identical output on every run and platform.

use thiserror::Error;

use crate::gates::{Instruction, Opcode, Program};
use crate::numerics::{cadd, cmul, NumberFormat, Rounding};
use crate::qstate::{PingPong, QstateError, StateVector};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum KernelError {
    #[error("qubit {qubit} out of range for {n} qubits")]
    QubitOutOfRange { qubit: u8, n: u32 },
    #[error("CX control equals target (qubit {0})")]
    ControlEqualsTarget(u8),
    #[error("source and destination differ in size or format")]
    BufferMismatch,
    #[error("instruction {0} is a CX; use the permutation path")]
    NotSingleQubit(usize),
    #[error(transparent)]
    State(#[from] QstateError),
}

/// Apply a non-CX instruction: for each source index `i`, the coefficient
/// block [[a, b], [c, d]] routes `a`/`d` to the same index and `b`/`c` to
/// the partner index across `cut`. The destination must be all-zero.
pub fn apply_single(
    ins: &Instruction,
    src: &StateVector,
    dst: &mut StateVector,
    rounding: Rounding,
) -> Result<(), KernelError> {
    if ins.opcode == Opcode::Cx {
        return Err(KernelError::NotSingleQubit(ins.opcode as usize));
    }
    let n = src.n();
    if src.len() != dst.len() || src.format() != dst.format() {
        return Err(KernelError::BufferMismatch);
    }
    if ins.w0 as u32 >= n {
        return Err(KernelError::QubitOutOfRange { qubit: ins.w0, n });
    }
    debug_assert!(dst.is_all_zero(), "destination buffer not cleared");

    let m = ins.coeffs();
    let (a, b, c, d) = (m[0][0], m[0][1], m[1][0], m[1][1]);
    let shift = n - 1 - ins.w0 as u32;
    let cut = 1usize << shift;
    let src = src.amps();
    let dst = dst.amps_mut();
    for i in 0..src.len() {
        let x = src[i];
        if (i >> shift) & 1 == 0 {
            dst[i] = cadd(dst[i], cmul(a, x, rounding), rounding);
            dst[i + cut] = cadd(dst[i + cut], cmul(b, x, rounding), rounding);
        } else {
            dst[i] = cadd(dst[i], cmul(d, x, rounding), rounding);
            dst[i - cut] = cadd(dst[i - cut], cmul(c, x, rounding), rounding);
        }
    }
    Ok(())
}

/// Apply a CX instruction (`w0` control, `w1` target): a pure permutation of
/// amplitudes, so no rounding occurs in any format. The destination must be
/// all-zero.
pub fn apply_cx(
    ins: &Instruction,
    src: &StateVector,
    dst: &mut StateVector,
) -> Result<(), KernelError> {
    let n = src.n();
    if src.len() != dst.len() || src.format() != dst.format() {
        return Err(KernelError::BufferMismatch);
    }
    for qubit in [ins.w0, ins.w1] {
        if qubit as u32 >= n {
            return Err(KernelError::QubitOutOfRange { qubit, n });
        }
    }
    if ins.w0 == ins.w1 {
        return Err(KernelError::ControlEqualsTarget(ins.w0));
    }
    debug_assert!(dst.is_all_zero(), "destination buffer not cleared");

    let control_shift = n - 1 - ins.w0 as u32;
    let target_shift = n - 1 - ins.w1 as u32;
    let cut = 1usize << target_shift;
    let src = src.amps();
    let dst = dst.amps_mut();
    for i in 0..src.len() {
        if (i >> control_shift) & 1 == 1 {
            if (i >> target_shift) & 1 == 1 {
                dst[i - cut] = src[i];
            } else {
                dst[i + cut] = src[i];
            }
        } else {
            dst[i] = src[i];
        }
    }
    Ok(())
}

/// One emulator session: a program, the buffer pair, and the program counter.
#[derive(Debug)]
pub struct Session {
    program: Program,
    buffers: PingPong,
    rounding: Rounding,
    pc: usize,
}

impl Session {
    /// Initialize the buffers to |0...0> at `format` and load the program.
    pub fn new(program: Program, format: NumberFormat, rounding: Rounding) -> Result<Self, KernelError> {
        let buffers = PingPong::init(program.n(), format)?;
        Ok(Session { program, buffers, rounding, pc: 0 })
    }

    /// As [`new`](Self::new), optionally lifting the format's qubit cap.
    pub fn with_cap_override(
        program: Program,
        format: NumberFormat,
        rounding: Rounding,
        lift_cap: bool,
    ) -> Result<Self, KernelError> {
        let buffers = PingPong::init_with_cap(program.n(), format, lift_cap)?;
        Ok(Session { program, buffers, rounding, pc: 0 })
    }

    /// Run the program starting from a prepared state instead of |0...0>.
    pub fn from_state(program: Program, state: StateVector, rounding: Rounding) -> Result<Self, KernelError> {
        if state.n() != program.n() {
            return Err(KernelError::BufferMismatch);
        }
        Ok(Session {
            program,
            buffers: PingPong::from_state(state),
            rounding,
            pc: 0,
        })
    }

    pub fn pc(&self) -> usize {
        self.pc
    }

    pub fn is_done(&self) -> bool {
        self.pc == self.program.len()
    }

    pub fn buffers(&self) -> &PingPong {
        &self.buffers
    }

    /// Execute the instruction at the program counter, then swap buffers and
    /// clear the old source. Returns false once the program is exhausted.
    pub fn step(&mut self) -> Result<bool, KernelError> {
        if self.is_done() {
            return Ok(false);
        }
        let ins = self.program.instructions()[self.pc];
        let (src, dst) = self.buffers.split_mut();
        match ins.opcode {
            Opcode::Cx => apply_cx(&ins, src, dst)?,
            _ => apply_single(&ins, src, dst, self.rounding)?,
        }
        self.buffers.swap_and_clear();
        self.pc += 1;
        Ok(true)
    }

    /// Run to completion and return the final state: it sits in Pong after an
    /// odd number of gates and in Ping after an even number. An empty program
    /// returns the initial state unchanged.
    pub fn run(mut self) -> Result<StateVector, KernelError> {
        while self.step()? {}
        Ok(self.buffers.into_active())
    }
}

/// One-shot convenience: initialize at `format`, run, return the final state.
pub fn run_program(
    program: &Program,
    format: NumberFormat,
    rounding: Rounding,
) -> Result<StateVector, KernelError> {
    Session::new(program.clone(), format, rounding)?.run()
}

/// [`run_program`] with the qubit cap optionally lifted.
pub fn run_program_with_cap(
    program: &Program,
    format: NumberFormat,
    rounding: Rounding,
    lift_cap: bool,
) -> Result<StateVector, KernelError> {
    Session::with_cap_override(program.clone(), format, rounding, lift_cap)?.run()
}

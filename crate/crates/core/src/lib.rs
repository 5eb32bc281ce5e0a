//! Software emulator for a wave-function quantum accelerator.
//!
//! The emulator executes quantum circuit programs exactly the way the
//! hardware does: amplitudes live in one of five numeric formats (FP16,
//! FP32, FX16, FX24, FX32), every arithmetic primitive is rounded to that
//! format, gates stream through a ping/pong buffer pair, and rotation
//! parameters arrive pre-quantized in a 2048-entry context memory. A
//! Reference (f64) format provides the accuracy baseline, and a
//! cycle-accurate timing model predicts the hardware's execution time,
//! normalized gate speed and power-delay product.
//!
//! Modules, bottom up:
//!
//! - [`numerics`]: the format emulation (quantize, rounded mul/add/sub).
//! - [`qstate`]: state vectors and the ping/pong buffer pair.
//! - [`gates`]: gate set, lowering, the instruction word and its codec.
//! - [`kernel`]: the amplitude-update loops and the session loop.
//! - [`circuits`]: QFT, random-circuit and ZXZ-ansatz builders.
//! - [`psr`]: cost function, parameter-shift gradients, gradient descent.
//! - [`metrics`]: fidelity and MSE against the Reference run.
//! - [`costmodel`]: cycle-accurate time/NGS/PDP prediction.
//! - [`circuit_file`]: the textual circuit format.

pub mod circuit_file;
pub mod circuits;
pub mod costmodel;
pub mod gates;
pub mod kernel;
pub mod metrics;
pub mod numerics;
pub mod psr;
pub mod qstate;

pub use gates::{Circuit, Gate, Instruction, Opcode, Program};
pub use kernel::{run_program, Session};
pub use numerics::{ComplexScalar, NumberFormat, Rounding, Scalar};
pub use qstate::{PingPong, StateVector};

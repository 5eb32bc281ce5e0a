//! Gate definitions, parameter precomputation, and the context-memory
//! instruction word.
//!
//! The hardware executes six basic gates (H, S, CX, Rx, Ry, Rz). Derived
//! gates lower onto them: T -> Rz(pi/4), X -> Rx(pi), Y -> Ry(pi),
//! Z -> Rz(pi). Rotation parameters are stored pre-halved and pre-evaluated:
//! an instruction carries sin(theta/2) and cos(theta/2) already quantized to
//! the session format, never theta itself. The context memory holds at most
//! [`Program::MAX_GATES`] instructions.

use thiserror::Error;

use crate::numerics::{self, ComplexScalar, NumberFormat, NumericsError, Rounding, Scalar};

/// Context-memory depth: the longest instruction sequence one session runs.
pub const MAX_GATES: usize = 2048;

/// Fixed length of one encoded instruction record.
pub const RECORD_BYTES: usize = 20;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GateError {
    #[error("qubit {qubit} out of range for {n} qubits")]
    QubitOutOfRange { qubit: u8, n: u32 },
    #[error("control equals target (qubit {0})")]
    ControlEqualsTarget(u8),
    #[error("context memory overflow: programs are limited to {MAX_GATES} gates")]
    ContextOverflow,
    #[error("invalid opcode {0} (expected 0..=5)")]
    BadOpcode(u8),
    #[error("truncated instruction record: got {0} bytes, need {RECORD_BYTES}")]
    TruncatedRecord(usize),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

/// A user-level gate. `T`, `X`, `Y` and `Z` are aliases that lower onto the
/// basic rotation gates.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Gate {
    H { target: u8 },
    S { target: u8 },
    Cx { control: u8, target: u8 },
    Rx { target: u8, theta: f64 },
    Ry { target: u8, theta: f64 },
    Rz { target: u8, theta: f64 },
    T { target: u8 },
    X { target: u8 },
    Y { target: u8 },
    Z { target: u8 },
}

impl Gate {
    pub fn validate(&self, n: u32) -> Result<(), GateError> {
        let check = |qubit: u8| {
            if (qubit as u32) < n {
                Ok(())
            } else {
                Err(GateError::QubitOutOfRange { qubit, n })
            }
        };
        match *self {
            Gate::Cx { control, target } => {
                check(control)?;
                check(target)?;
                if control == target {
                    return Err(GateError::ControlEqualsTarget(control));
                }
                Ok(())
            }
            Gate::H { target }
            | Gate::S { target }
            | Gate::T { target }
            | Gate::X { target }
            | Gate::Y { target }
            | Gate::Z { target } => check(target),
            Gate::Rx { target, .. } | Gate::Ry { target, .. } | Gate::Rz { target, .. } => {
                check(target)
            }
        }
    }

    /// Lower to one context-memory instruction, quantizing any rotation
    /// parameters to `format`. Derived gates become their equivalent basic
    /// rotation (up to global phase) with exact half-angle constants: a
    /// half turn stores (sin, cos) = (1, 0) rather than sin/cos of the
    /// nearest representable pi.
    pub fn lower(&self, format: NumberFormat, rounding: Rounding) -> Result<Instruction, GateError> {
        use std::f64::consts::FRAC_PI_8;
        let rotation = |opcode, target, theta: f64| {
            Instruction::rotation(opcode, target, theta, format, rounding)
        };
        let half_turn = |opcode, target| {
            Instruction::from_half_angle(opcode, target, 1.0, 0.0, format, rounding)
        };
        match *self {
            Gate::H { target } => {
                let h = format.quantize_with(std::f64::consts::FRAC_1_SQRT_2, rounding)?;
                Ok(Instruction {
                    opcode: Opcode::H,
                    w0: target,
                    w1: 0,
                    sin_half: h,
                    cos_half: h,
                })
            }
            Gate::S { target } => Ok(Instruction {
                opcode: Opcode::S,
                w0: target,
                w1: 0,
                sin_half: format.zero(),
                cos_half: format.zero(),
            }),
            Gate::Cx { control, target } => Ok(Instruction {
                opcode: Opcode::Cx,
                w0: control,
                w1: target,
                sin_half: format.zero(),
                cos_half: format.zero(),
            }),
            Gate::Rx { target, theta } => rotation(Opcode::Rx, target, theta),
            Gate::Ry { target, theta } => rotation(Opcode::Ry, target, theta),
            Gate::Rz { target, theta } => rotation(Opcode::Rz, target, theta),
            Gate::T { target } => Instruction::from_half_angle(
                Opcode::Rz,
                target,
                FRAC_PI_8.sin(),
                FRAC_PI_8.cos(),
                format,
                rounding,
            ),
            Gate::X { target } => half_turn(Opcode::Rx, target),
            Gate::Y { target } => half_turn(Opcode::Ry, target),
            Gate::Z { target } => half_turn(Opcode::Rz, target),
        }
    }
}

/// 3-bit basic-gate opcode, frozen in the binary context format.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[repr(u8)]
pub enum Opcode {
    H = 0,
    S = 1,
    Cx = 2,
    Rx = 3,
    Ry = 4,
    Rz = 5,
}

impl Opcode {
    pub const ALL: [Opcode; 6] = [
        Opcode::H,
        Opcode::S,
        Opcode::Cx,
        Opcode::Rx,
        Opcode::Ry,
        Opcode::Rz,
    ];

    pub fn from_u8(code: u8) -> Result<Opcode, GateError> {
        match code {
            0 => Ok(Opcode::H),
            1 => Ok(Opcode::S),
            2 => Ok(Opcode::Cx),
            3 => Ok(Opcode::Rx),
            4 => Ok(Opcode::Ry),
            5 => Ok(Opcode::Rz),
            bad => Err(GateError::BadOpcode(bad)),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Opcode::H => "H",
            Opcode::S => "S",
            Opcode::Cx => "CX",
            Opcode::Rx => "RX",
            Opcode::Ry => "RY",
            Opcode::Rz => "RZ",
        }
    }
}

/// One context-memory word: opcode, qubit fields and the pre-quantized
/// half-angle pair. For `Cx`, `w0` is the control and `w1` the target; for
/// everything else `w0` is the target and `w1` is unused.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Instruction {
    pub opcode: Opcode,
    pub w0: u8,
    pub w1: u8,
    pub sin_half: Scalar,
    pub cos_half: Scalar,
}

impl Instruction {
    fn rotation(
        opcode: Opcode,
        target: u8,
        theta: f64,
        format: NumberFormat,
        rounding: Rounding,
    ) -> Result<Instruction, GateError> {
        let half = theta / 2.0;
        Instruction::from_half_angle(opcode, target, half.sin(), half.cos(), format, rounding)
    }

    fn from_half_angle(
        opcode: Opcode,
        target: u8,
        sin_half: f64,
        cos_half: f64,
        format: NumberFormat,
        rounding: Rounding,
    ) -> Result<Instruction, GateError> {
        Ok(Instruction {
            opcode,
            w0: target,
            w1: 0,
            sin_half: format.quantize_with(sin_half, rounding)?,
            cos_half: format.quantize_with(cos_half, rounding)?,
        })
    }

    pub fn format(&self) -> NumberFormat {
        self.sin_half.format()
    }

    /// The 2x2 coefficient matrix [[a, b], [c, d]] the gate unit feeds the
    /// amplitude-update loop, built from the stored (already quantized)
    /// parameters. `Cx` has no coefficients; it takes the permutation path.
    pub fn coeffs(&self) -> [[ComplexScalar; 2]; 2] {
        let format = self.format();
        let zero = ComplexScalar::zero(format);
        let one = ComplexScalar::new(format.one(), format.zero());
        let s = self.sin_half;
        let c = self.cos_half;
        let real = |x: Scalar| ComplexScalar::new(x, format.zero());
        let imag = |x: Scalar| ComplexScalar::new(format.zero(), x);
        match self.opcode {
            Opcode::H => {
                let h = real(s);
                [[h, h], [h, real(numerics::neg(s))]]
            }
            Opcode::S => [[one, zero], [zero, imag(format.one())]],
            Opcode::Rx => {
                let off = imag(numerics::neg(s));
                [[real(c), off], [off, real(c)]]
            }
            Opcode::Ry => [
                [real(c), real(numerics::neg(s))],
                [real(s), real(c)],
            ],
            Opcode::Rz => [
                [ComplexScalar::new(c, numerics::neg(s)), zero],
                [zero, ComplexScalar::new(c, s)],
            ],
            Opcode::Cx => panic!("CX is a permutation and has no coefficient matrix"),
        }
    }

    /// Fixed 20-byte little-endian record: opcode, w0, w1, reserved, then
    /// sin(theta/2) and cos(theta/2) widened to Reference precision.
    pub fn encode(&self) -> [u8; RECORD_BYTES] {
        let mut rec = [0u8; RECORD_BYTES];
        rec[0] = self.opcode as u8;
        rec[1] = self.w0;
        rec[2] = self.w1;
        rec[4..12].copy_from_slice(&self.sin_half.to_f64().to_le_bytes());
        rec[12..20].copy_from_slice(&self.cos_half.to_f64().to_le_bytes());
        rec
    }

    /// Decode one record, re-quantizing the stored Reference-width
    /// parameters to `format`.
    pub fn decode(
        record: &[u8],
        format: NumberFormat,
        rounding: Rounding,
    ) -> Result<Instruction, GateError> {
        if record.len() < RECORD_BYTES {
            return Err(GateError::TruncatedRecord(record.len()));
        }
        let opcode = Opcode::from_u8(record[0])?;
        let sin = f64::from_le_bytes(record[4..12].try_into().unwrap());
        let cos = f64::from_le_bytes(record[12..20].try_into().unwrap());
        Ok(Instruction {
            opcode,
            w0: record[1],
            w1: record[2],
            sin_half: format.quantize_with(sin, rounding)?,
            cos_half: format.quantize_with(cos, rounding)?,
        })
    }

    fn validate(&self, n: u32) -> Result<(), GateError> {
        let check = |qubit: u8| {
            if (qubit as u32) < n {
                Ok(())
            } else {
                Err(GateError::QubitOutOfRange { qubit, n })
            }
        };
        check(self.w0)?;
        if self.opcode == Opcode::Cx {
            check(self.w1)?;
            if self.w0 == self.w1 {
                return Err(GateError::ControlEqualsTarget(self.w0));
            }
        }
        Ok(())
    }
}

/// A format-free gate list: what circuit files and benchmark builders
/// produce. Quantization to a session format happens when the circuit is
/// lowered into a [`Program`].
#[derive(Clone, Debug, PartialEq)]
pub struct Circuit {
    n: u32,
    gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(n: u32) -> Self {
        Circuit { n, gates: Vec::new() }
    }

    pub fn push(&mut self, gate: Gate) -> Result<(), GateError> {
        gate.validate(self.n)?;
        if self.gates.len() == MAX_GATES {
            return Err(GateError::ContextOverflow);
        }
        self.gates.push(gate);
        Ok(())
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    /// Quantize every gate to `format`, producing an executable program.
    pub fn lower(&self, format: NumberFormat, rounding: Rounding) -> Result<Program, GateError> {
        let mut program = Program::new(self.n);
        for gate in &self.gates {
            program.push(gate.lower(format, rounding)?)?;
        }
        Ok(program)
    }
}

/// An ordered instruction sequence for one emulator session, at most
/// [`MAX_GATES`] long.
#[derive(Clone, Debug, PartialEq)]
pub struct Program {
    n: u32,
    instrs: Vec<Instruction>,
}

impl Program {
    pub const MAX_GATES: usize = MAX_GATES;

    pub fn new(n: u32) -> Self {
        Program { n, instrs: Vec::new() }
    }

    pub fn push(&mut self, ins: Instruction) -> Result<(), GateError> {
        ins.validate(self.n)?;
        if self.instrs.len() == MAX_GATES {
            return Err(GateError::ContextOverflow);
        }
        self.instrs.push(ins);
        Ok(())
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn len(&self) -> usize {
        self.instrs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instrs.is_empty()
    }

    pub fn instructions(&self) -> &[Instruction] {
        &self.instrs
    }

    /// Concatenated instruction records (the binary context image).
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.instrs.len() * RECORD_BYTES);
        for ins in &self.instrs {
            out.extend_from_slice(&ins.encode());
        }
        out
    }

    /// Parse a binary context image produced by [`to_bytes`](Self::to_bytes),
    /// re-quantizing parameters to `format`.
    pub fn from_bytes(
        n: u32,
        format: NumberFormat,
        rounding: Rounding,
        bytes: &[u8],
    ) -> Result<Program, GateError> {
        if bytes.len() % RECORD_BYTES != 0 {
            return Err(GateError::TruncatedRecord(bytes.len() % RECORD_BYTES));
        }
        let mut program = Program::new(n);
        for record in bytes.chunks(RECORD_BYTES) {
            program.push(Instruction::decode(record, format, rounding)?)?;
        }
        Ok(program)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_8, PI};

    const RNE: Rounding = Rounding::NearestEven;
    const REF: NumberFormat = NumberFormat::Reference;

    #[test]
    fn lower_t_becomes_rz_quarter_pi() {
        let ins = Gate::T { target: 2 }.lower(REF, RNE).unwrap();
        assert_eq!(ins.opcode, Opcode::Rz);
        assert_eq!(ins.w0, 2);
        assert_eq!(ins.sin_half.to_f64(), FRAC_PI_8.sin());
        assert_eq!(ins.cos_half.to_f64(), FRAC_PI_8.cos());
    }

    #[test]
    fn lower_x_is_half_turn_rx() {
        for format in NumberFormat::ALL {
            let ins = Gate::X { target: 0 }.lower(format, RNE).unwrap();
            assert_eq!(ins.opcode, Opcode::Rx);
            assert_eq!(ins.sin_half.to_f64(), 1.0, "{format}");
            assert_eq!(ins.cos_half.to_f64(), 0.0, "{format}");
        }
        // A user-specified Rx(pi) goes through sin/cos of the rounded angle.
        let rx = Gate::Rx { target: 0, theta: std::f64::consts::PI }
            .lower(REF, RNE)
            .unwrap();
        assert_eq!(rx.sin_half.to_f64(), 1.0);
        assert!(rx.cos_half.to_f64().abs() < 1e-15);
    }

    #[test]
    fn lower_h_stores_quantized_inv_sqrt2() {
        let ins = Gate::H { target: 1 }.lower(NumberFormat::Fx16, RNE).unwrap();
        assert_eq!(ins.opcode as u8, 0);
        assert_eq!(ins.sin_half.bits(), 11585);
        assert_eq!(ins.cos_half.to_f64(), 11585.0 / 16384.0);
    }

    #[test]
    fn cx_lowering_orders_control_then_target() {
        let ins = Gate::Cx { control: 3, target: 1 }.lower(REF, RNE).unwrap();
        assert_eq!(ins.opcode, Opcode::Cx);
        assert_eq!(ins.w0, 3);
        assert_eq!(ins.w1, 1);
    }

    #[test]
    fn coeffs_s_is_exact_in_all_formats() {
        for format in NumberFormat::ALL {
            let m = Gate::S { target: 0 }.lower(format, RNE).unwrap().coeffs();
            assert_eq!(m[0][0].re.to_f64(), 1.0);
            assert!(m[0][1].is_zero() && m[1][0].is_zero());
            assert_eq!(m[1][1].re.to_f64(), 0.0);
            assert_eq!(m[1][1].im.to_f64(), 1.0);
        }
    }

    #[test]
    fn coeffs_rz_zero_is_identity() {
        let m = Gate::Rz { target: 0, theta: 0.0 }
            .lower(NumberFormat::Fx24, RNE)
            .unwrap()
            .coeffs();
        assert_eq!(m[0][0].re.to_f64(), 1.0);
        assert!(m[0][0].im.is_zero());
        assert_eq!(m[1][1].re.to_f64(), 1.0);
        assert!(m[1][1].im.is_zero());
    }

    #[test]
    fn coeffs_h_fp32_is_nearest_inv_sqrt2() {
        let m = Gate::H { target: 0 }
            .lower(NumberFormat::Fp32, RNE)
            .unwrap()
            .coeffs();
        let h = FRAC_1_SQRT_2 as f32;
        assert_eq!(m[0][0].re.to_f64(), h as f64);
        assert_eq!(m[0][1].re.to_f64(), h as f64);
        assert_eq!(m[1][0].re.to_f64(), h as f64);
        assert_eq!(m[1][1].re.to_f64(), -(h as f64));
    }

    #[test]
    fn coeffs_are_unitary_at_reference() {
        let gates = [
            Gate::H { target: 0 },
            Gate::S { target: 0 },
            Gate::Rx { target: 0, theta: 1.234 },
            Gate::Ry { target: 0, theta: -0.777 },
            Gate::Rz { target: 0, theta: 2.5 },
            Gate::T { target: 0 },
            Gate::X { target: 0 },
            Gate::Y { target: 0 },
            Gate::Z { target: 0 },
        ];
        for gate in gates {
            let m = gate.lower(REF, RNE).unwrap().coeffs();
            let c = |z: ComplexScalar| z.to_complex64();
            // rows of U * U^dagger
            let e00 = c(m[0][0]) * c(m[0][0]).conj() + c(m[0][1]) * c(m[0][1]).conj();
            let e01 = c(m[0][0]) * c(m[1][0]).conj() + c(m[0][1]) * c(m[1][1]).conj();
            let e11 = c(m[1][0]) * c(m[1][0]).conj() + c(m[1][1]) * c(m[1][1]).conj();
            assert!((e00.re - 1.0).abs() < 1e-15, "{gate:?}");
            assert!(e00.im.abs() < 1e-15);
            assert!(e01.norm() < 1e-15, "{gate:?}");
            assert!((e11.re - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn encode_layout_is_frozen() {
        let ins = Gate::H { target: 0 }.lower(REF, RNE).unwrap();
        let rec = ins.encode();
        assert_eq!(&rec[0..4], &[0, 0, 0, 0]);
        assert_eq!(&rec[4..12], &FRAC_1_SQRT_2.to_le_bytes());
        assert_eq!(&rec[12..20], &FRAC_1_SQRT_2.to_le_bytes());
    }

    #[test]
    fn decode_encode_roundtrip() {
        let ins = Gate::Rz { target: 3, theta: 1.0 }
            .lower(NumberFormat::Fx32, RNE)
            .unwrap();
        let back = Instruction::decode(&ins.encode(), NumberFormat::Fx32, RNE).unwrap();
        assert_eq!(back, ins);
    }

    #[test]
    fn decode_rejects_bad_records() {
        let ins = Gate::S { target: 1 }.lower(REF, RNE).unwrap();
        let mut rec = ins.encode();
        rec[0] = 6;
        assert_eq!(
            Instruction::decode(&rec, REF, RNE).unwrap_err(),
            GateError::BadOpcode(6)
        );
        assert_eq!(
            Instruction::decode(&rec[..7], REF, RNE).unwrap_err(),
            GateError::TruncatedRecord(7)
        );
    }

    #[test]
    fn program_rejects_context_overflow() {
        let mut program = Program::new(1);
        let ins = Gate::H { target: 0 }.lower(REF, RNE).unwrap();
        for _ in 0..MAX_GATES {
            program.push(ins).unwrap();
        }
        assert_eq!(program.push(ins).unwrap_err(), GateError::ContextOverflow);
    }

    #[test]
    fn program_validates_qubits() {
        let mut program = Program::new(2);
        let bad = Gate::H { target: 5 }.lower(REF, RNE).unwrap();
        assert_eq!(
            program.push(bad).unwrap_err(),
            GateError::QubitOutOfRange { qubit: 5, n: 2 }
        );
        let clash = Instruction {
            opcode: Opcode::Cx,
            w0: 1,
            w1: 1,
            sin_half: REF.zero(),
            cos_half: REF.zero(),
        };
        assert_eq!(
            program.push(clash).unwrap_err(),
            GateError::ControlEqualsTarget(1)
        );
    }

    #[test]
    fn lowering_nan_theta_to_fixed_point_fails() {
        let gate = Gate::Rx { target: 0, theta: f64::NAN };
        assert!(matches!(
            gate.lower(NumberFormat::Fx16, RNE),
            Err(GateError::Numerics(_))
        ));
    }

    #[test]
    fn derived_gates_match_their_reference_matrices_up_to_phase() {
        use num_complex::Complex64;
        use rand::{Rng, SeedableRng};
        let i = Complex64::i();
        // (gate, textbook matrix), column-major action new = M * old
        let cases: [(Gate, [[Complex64; 2]; 2]); 4] = [
            (
                Gate::T { target: 0 },
                [
                    [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
                    [Complex64::new(0.0, 0.0), (i * PI / 4.0).exp()],
                ],
            ),
            (
                Gate::X { target: 0 },
                [
                    [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
                    [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
                ],
            ),
            (
                Gate::Y { target: 0 },
                [[Complex64::new(0.0, 0.0), -i], [i, Complex64::new(0.0, 0.0)]],
            ),
            (
                Gate::Z { target: 0 },
                [
                    [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
                    [Complex64::new(0.0, 0.0), Complex64::new(-1.0, 0.0)],
                ],
            ),
        ];
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for (gate, reference) in cases {
            let ins = gate.lower(REF, RNE).unwrap();
            let m = ins.coeffs();
            let a = m[0][0].to_complex64();
            let b = m[0][1].to_complex64();
            let c = m[1][0].to_complex64();
            let d = m[1][1].to_complex64();
            for _ in 0..100 {
                let v = [
                    Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5),
                    Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5),
                ];
                // The amplitude-update loop routes b to the upper target slot
                // and c to the lower one, i.e. it applies the transpose of
                // the stored coefficient block.
                let got = [a * v[0] + c * v[1], b * v[0] + d * v[1]];
                let want = [
                    reference[0][0] * v[0] + reference[0][1] * v[1],
                    reference[1][0] * v[0] + reference[1][1] * v[1],
                ];
                let overlap = got[0].conj() * want[0] + got[1].conj() * want[1];
                let phase = overlap / overlap.norm();
                for k in 0..2 {
                    assert!((want[k] - phase * got[k]).norm() <= 1e-12, "{gate:?}");
                }
            }
        }
    }
}

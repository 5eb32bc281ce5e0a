//! The textual circuit format: a `qubits N` header, then one gate per line.
//!
//! ```text
//! # 2-qubit Bell pair
//! qubits 2
//! H 0
//! CX 0 1
//! ```
//!
//! Gate lines are `H q`, `S q`, `T q`, `X q`, `Y q`, `Z q`, `CX qc qt` and
//! `RX q theta` / `RY q theta` / `RZ q theta` with theta in decimal radians
//! at full Reference precision. `#` starts a comment. Printing a parsed
//! circuit canonicalizes whitespace only; angles round-trip exactly because
//! they are printed in shortest-roundtrip form.

use std::fmt::Write as _;

use thiserror::Error;

use crate::gates::{Circuit, Gate, GateError};

#[derive(Debug, Error, PartialEq)]
pub enum ParseError {
    #[error("line {line}: expected `qubits N` header before any gate")]
    MissingHeader { line: usize },
    #[error("line {line}: invalid qubit count `{text}`")]
    BadQubitCount { line: usize, text: String },
    #[error("line {line}: unknown gate `{name}`")]
    UnknownGate { line: usize, name: String },
    #[error("line {line}: {gate} takes {expected} operand(s), got {got}")]
    WrongOperandCount { line: usize, gate: String, expected: usize, got: usize },
    #[error("line {line}: invalid qubit index `{text}`")]
    BadQubit { line: usize, text: String },
    #[error("line {line}: invalid angle `{text}`")]
    BadAngle { line: usize, text: String },
    #[error("line {line}: {source}")]
    Gate { line: usize, source: GateError },
}

/// Parse circuit text. Errors carry 1-based line numbers.
pub fn parse(text: &str) -> Result<Circuit, ParseError> {
    let mut circuit: Option<Circuit> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let mut tokens = content.split_whitespace();
        let head = tokens.next().expect("non-empty line");
        let rest: Vec<&str> = tokens.collect();
        if circuit.is_none() {
            if !head.eq_ignore_ascii_case("qubits") {
                return Err(ParseError::MissingHeader { line });
            }
            let text = rest.join(" ");
            let n: u32 = rest
                .first()
                .filter(|_| rest.len() == 1)
                .and_then(|t| t.parse().ok())
                .filter(|&n| n >= 1)
                .ok_or(ParseError::BadQubitCount { line, text })?;
            circuit = Some(Circuit::new(n));
            continue;
        }
        let circuit = circuit.as_mut().expect("header parsed");
        let gate = parse_gate(head, &rest, line)?;
        circuit
            .push(gate)
            .map_err(|source| ParseError::Gate { line, source })?;
    }
    circuit.ok_or(ParseError::MissingHeader { line: 1 })
}

fn parse_gate(name: &str, operands: &[&str], line: usize) -> Result<Gate, ParseError> {
    let expect = |count: usize| {
        if operands.len() == count {
            Ok(())
        } else {
            Err(ParseError::WrongOperandCount {
                line,
                gate: name.to_ascii_uppercase(),
                expected: count,
                got: operands.len(),
            })
        }
    };
    let qubit = |text: &str| {
        text.parse::<u8>()
            .map_err(|_| ParseError::BadQubit { line, text: text.to_string() })
    };
    let angle = |text: &str| {
        text.parse::<f64>()
            .ok()
            .filter(|t| t.is_finite())
            .ok_or(ParseError::BadAngle { line, text: text.to_string() })
    };
    match name.to_ascii_uppercase().as_str() {
        "H" => expect(1).and_then(|_| Ok(Gate::H { target: qubit(operands[0])? })),
        "S" => expect(1).and_then(|_| Ok(Gate::S { target: qubit(operands[0])? })),
        "T" => expect(1).and_then(|_| Ok(Gate::T { target: qubit(operands[0])? })),
        "X" => expect(1).and_then(|_| Ok(Gate::X { target: qubit(operands[0])? })),
        "Y" => expect(1).and_then(|_| Ok(Gate::Y { target: qubit(operands[0])? })),
        "Z" => expect(1).and_then(|_| Ok(Gate::Z { target: qubit(operands[0])? })),
        "CX" => expect(2).and_then(|_| {
            Ok(Gate::Cx { control: qubit(operands[0])?, target: qubit(operands[1])? })
        }),
        "RX" => expect(2).and_then(|_| {
            Ok(Gate::Rx { target: qubit(operands[0])?, theta: angle(operands[1])? })
        }),
        "RY" => expect(2).and_then(|_| {
            Ok(Gate::Ry { target: qubit(operands[0])?, theta: angle(operands[1])? })
        }),
        "RZ" => expect(2).and_then(|_| {
            Ok(Gate::Rz { target: qubit(operands[0])?, theta: angle(operands[1])? })
        }),
        _ => Err(ParseError::UnknownGate { line, name: name.to_string() }),
    }
}

/// Canonical text for a circuit; `parse(print(c)) == c`.
pub fn print(circuit: &Circuit) -> String {
    let mut out = String::new();
    writeln!(out, "qubits {}", circuit.n()).unwrap();
    for gate in circuit.gates() {
        match *gate {
            Gate::H { target } => writeln!(out, "H {target}"),
            Gate::S { target } => writeln!(out, "S {target}"),
            Gate::T { target } => writeln!(out, "T {target}"),
            Gate::X { target } => writeln!(out, "X {target}"),
            Gate::Y { target } => writeln!(out, "Y {target}"),
            Gate::Z { target } => writeln!(out, "Z {target}"),
            Gate::Cx { control, target } => writeln!(out, "CX {control} {target}"),
            Gate::Rx { target, theta } => writeln!(out, "RX {target} {theta}"),
            Gate::Ry { target, theta } => writeln!(out, "RY {target} {theta}"),
            Gate::Rz { target, theta } => writeln!(out, "RZ {target} {theta}"),
        }
        .unwrap();
    }
    out
}

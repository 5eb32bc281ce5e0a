//! Amplitude storage: the 2^n state vector and the ping/pong buffer pair
//! the session loop alternates between.
//!
//! Amplitude `j` of a vector is the coefficient of basis state |j>, with
//! qubit 0 the most significant bit of the index. The hardware clears the
//! buffer it just read from after every gate, so the inactive buffer of a
//! [`PingPong`] is always all-zero between gates.

use std::io::{self, Write};

use num_complex::Complex64;
use thiserror::Error;

use crate::numerics::{ComplexScalar, NumberFormat};

/// Hard ceiling on qubit count regardless of cap overrides; 2^30 amplitudes
/// is already far beyond what the host can allocate twice.
pub const ABSOLUTE_QUBIT_LIMIT: u32 = 30;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum QstateError {
    #[error("qubit count must be at least 1")]
    ZeroQubits,
    #[error("qubit cap exceeded: n = {n} but {format} supports up to {cap} (pass the cap override to lift)")]
    QubitCapExceeded { n: u32, format: NumberFormat, cap: u32 },
    #[error("qubit count {0} exceeds the absolute limit of {ABSOLUTE_QUBIT_LIMIT}")]
    AboveAbsoluteLimit(u32),
}

/// 2^n complex amplitudes in a single format.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    n: u32,
    format: NumberFormat,
    amps: Vec<ComplexScalar>,
}

impl StateVector {
    /// All-zero vector (not a valid quantum state; the cleared buffer).
    pub fn zero(n: u32, format: NumberFormat) -> Self {
        StateVector {
            n,
            format,
            amps: vec![ComplexScalar::zero(format); 1usize << n],
        }
    }

    /// |0...0>: amplitude 0 is one, the rest zero. Exact in every format.
    pub fn ground(n: u32, format: NumberFormat) -> Self {
        let mut s = StateVector::zero(n, format);
        s.amps[0] = ComplexScalar::new(format.one(), format.zero());
        s
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn format(&self) -> NumberFormat {
        self.format
    }

    pub fn len(&self) -> usize {
        self.amps.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn amp(&self, j: usize) -> ComplexScalar {
        self.amps[j]
    }

    pub fn amps(&self) -> &[ComplexScalar] {
        &self.amps
    }

    pub fn amps_mut(&mut self) -> &mut [ComplexScalar] {
        &mut self.amps
    }

    /// Sum of |amp|^2 accumulated at Reference precision regardless of the
    /// stored format.
    pub fn norm_sq(&self) -> f64 {
        self.amps.iter().map(|a| a.prob()).sum()
    }

    /// Widen every amplitude to a host-precision complex number.
    pub fn to_reference(&self) -> Vec<Complex64> {
        self.amps.iter().map(|a| a.to_complex64()).collect()
    }

    pub fn fill_zero(&mut self) {
        self.amps.fill(ComplexScalar::zero(self.format));
    }

    /// True when every amplitude is bit-exactly zero.
    pub fn is_all_zero(&self) -> bool {
        self.amps.iter().all(|a| a.is_zero())
    }

    /// Amplitude dump: CSV lines `index,re,im,prob` widened to Reference
    /// precision, 17 significant digits.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "index,re,im,prob")?;
        for (j, a) in self.amps.iter().enumerate() {
            let z = a.to_complex64();
            writeln!(out, "{j},{:.16e},{:.16e},{:.16e}", z.re, z.im, a.prob())?;
        }
        Ok(())
    }
}

/// Which buffer currently holds the amplitudes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Buffer {
    Ping,
    Pong,
}

impl Buffer {
    pub fn other(self) -> Buffer {
        match self {
            Buffer::Ping => Buffer::Pong,
            Buffer::Pong => Buffer::Ping,
        }
    }
}

/// The double-buffered amplitude memory. One buffer holds the current state,
/// the other is zeroed and receives the next state.
#[derive(Clone, Debug)]
pub struct PingPong {
    ping: StateVector,
    pong: StateVector,
    active: Buffer,
}

impl PingPong {
    /// Session start: ping holds |0...0>, pong is cleared, ping is active.
    /// `n` must respect the format's qubit cap (18 for 16-bit formats, 17
    /// otherwise) unless `lift_cap` is set.
    pub fn init_with_cap(n: u32, format: NumberFormat, lift_cap: bool) -> Result<Self, QstateError> {
        if n < 1 {
            return Err(QstateError::ZeroQubits);
        }
        if n > ABSOLUTE_QUBIT_LIMIT {
            return Err(QstateError::AboveAbsoluteLimit(n));
        }
        let cap = format.qubit_cap();
        if n > cap && !lift_cap {
            return Err(QstateError::QubitCapExceeded { n, format, cap });
        }
        Ok(PingPong {
            ping: StateVector::ground(n, format),
            pong: StateVector::zero(n, format),
            active: Buffer::Ping,
        })
    }

    /// [`init_with_cap`](Self::init_with_cap) with the hardware caps enforced.
    pub fn init(n: u32, format: NumberFormat) -> Result<Self, QstateError> {
        Self::init_with_cap(n, format, false)
    }

    /// Start from an arbitrary prepared state instead of |0...0>.
    pub fn from_state(state: StateVector) -> Self {
        let pong = StateVector::zero(state.n, state.format);
        PingPong {
            ping: state,
            pong,
            active: Buffer::Ping,
        }
    }

    pub fn n(&self) -> u32 {
        self.ping.n
    }

    pub fn format(&self) -> NumberFormat {
        self.ping.format
    }

    pub fn active(&self) -> Buffer {
        self.active
    }

    pub fn active_state(&self) -> &StateVector {
        match self.active {
            Buffer::Ping => &self.ping,
            Buffer::Pong => &self.pong,
        }
    }

    pub fn inactive_state(&self) -> &StateVector {
        match self.active {
            Buffer::Ping => &self.pong,
            Buffer::Pong => &self.ping,
        }
    }

    /// Borrow (source, destination) for one gate: the active buffer read-only
    /// and the inactive buffer mutably.
    pub fn split_mut(&mut self) -> (&StateVector, &mut StateVector) {
        match self.active {
            Buffer::Ping => (&self.ping, &mut self.pong),
            Buffer::Pong => (&self.pong, &mut self.ping),
        }
    }

    /// After a gate: the destination becomes active and the old source is
    /// cleared, mirroring the hardware's clear step.
    pub fn swap_and_clear(&mut self) {
        match self.active {
            Buffer::Ping => self.ping.fill_zero(),
            Buffer::Pong => self.pong.fill_zero(),
        }
        self.active = self.active.other();
    }

    /// Flip the active designation without touching amplitudes.
    pub fn swap(&mut self) {
        self.active = self.active.other();
    }

    /// Consume the pair, returning the state the active buffer holds.
    pub fn into_active(self) -> StateVector {
        match self.active {
            Buffer::Ping => self.ping,
            Buffer::Pong => self.pong,
        }
    }
}

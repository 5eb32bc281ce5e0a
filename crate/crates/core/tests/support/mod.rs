//! Shared oracles for the integration suites, independent of the library's
//! execution path: a dense full-matrix circuit simulator built from tensor
//! products, an integer-arithmetic fixed-point quantizer, and random circuit
//! generation helpers.

#![allow(dead_code)]

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qwave_core::gates::{Circuit, Gate, Instruction, Opcode, Program};

/// Dense row-major square matrix over Complex64.
#[derive(Clone, Debug)]
pub struct Matrix {
    pub dim: usize,
    pub data: Vec<Complex64>,
}

impl Matrix {
    pub fn zeros(dim: usize) -> Matrix {
        Matrix { dim, data: vec![Complex64::new(0.0, 0.0); dim * dim] }
    }

    pub fn eye(dim: usize) -> Matrix {
        let mut m = Matrix::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_rows(rows: [[Complex64; 2]; 2]) -> Matrix {
        Matrix {
            dim: 2,
            data: vec![rows[0][0], rows[0][1], rows[1][0], rows[1][1]],
        }
    }

    pub fn at(&self, r: usize, c: usize) -> Complex64 {
        self.data[r * self.dim + c]
    }

    pub fn kron(&self, other: &Matrix) -> Matrix {
        let dim = self.dim * other.dim;
        let mut out = Matrix::zeros(dim);
        for ar in 0..self.dim {
            for ac in 0..self.dim {
                let a = self.at(ar, ac);
                for br in 0..other.dim {
                    for bc in 0..other.dim {
                        out.data[(ar * other.dim + br) * dim + (ac * other.dim + bc)] =
                            a * other.at(br, bc);
                    }
                }
            }
        }
        out
    }

    pub fn matmul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.dim, other.dim);
        let dim = self.dim;
        let mut out = Matrix::zeros(dim);
        for r in 0..dim {
            for k in 0..dim {
                let a = self.at(r, k);
                for c in 0..dim {
                    out.data[r * dim + c] += a * other.at(k, c);
                }
            }
        }
        out
    }

    pub fn add(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.dim, other.dim);
        Matrix {
            dim: self.dim,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn matvec(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(self.dim, v.len());
        (0..self.dim)
            .map(|r| (0..self.dim).map(|c| self.at(r, c) * v[c]).sum())
            .collect()
    }
}

/// Embed a single-qubit operator at MSB-first position `pos` of an n-qubit
/// register: I(2^pos) (x) op (x) I(2^(n-pos-1)).
pub fn embed(op: &Matrix, pos: u32, n: u32) -> Matrix {
    Matrix::eye(1 << pos)
        .kron(op)
        .kron(&Matrix::eye(1 << (n - pos - 1)))
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// The effective single-qubit action of the amplitude-update loop for a
/// non-CX instruction, as a matrix acting by new = E * old. The loop routes
/// the b coefficient from the bit-0 source to the bit-1 slot and c the other
/// way, so E is the transpose of the stored [[a, b], [c, d]] block.
pub fn effective_single(ins: &Instruction) -> Matrix {
    let s = ins.sin_half.to_f64();
    let co = ins.cos_half.to_f64();
    let rows = match ins.opcode {
        Opcode::H => [[c(s, 0.0), c(s, 0.0)], [c(s, 0.0), c(-s, 0.0)]],
        Opcode::S => [[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(0.0, 1.0)]],
        Opcode::Rx => [[c(co, 0.0), c(0.0, -s)], [c(0.0, -s), c(co, 0.0)]],
        Opcode::Ry => [[c(co, 0.0), c(s, 0.0)], [c(-s, 0.0), c(co, 0.0)]],
        Opcode::Rz => [[c(co, -s), c(0.0, 0.0)], [c(0.0, 0.0), c(co, s)]],
        Opcode::Cx => panic!("CX has no single-qubit action"),
    };
    Matrix::from_rows(rows)
}

/// Full 2^n x 2^n unitary of one instruction via tensor products. CX is
/// assembled from the control projectors: P0@c (x) I + P1@c (x) X@t.
pub fn full_unitary(ins: &Instruction, n: u32) -> Matrix {
    if ins.opcode == Opcode::Cx {
        let p0 = Matrix::from_rows([
            [c(1.0, 0.0), c(0.0, 0.0)],
            [c(0.0, 0.0), c(0.0, 0.0)],
        ]);
        let p1 = Matrix::from_rows([
            [c(0.0, 0.0), c(0.0, 0.0)],
            [c(0.0, 0.0), c(1.0, 0.0)],
        ]);
        let x = Matrix::from_rows([
            [c(0.0, 0.0), c(1.0, 0.0)],
            [c(1.0, 0.0), c(0.0, 0.0)],
        ]);
        let hold = embed(&p0, ins.w0 as u32, n);
        let act = embed(&p1, ins.w0 as u32, n).matmul(&embed(&x, ins.w1 as u32, n));
        hold.add(&act)
    } else {
        embed(&effective_single(ins), ins.w0 as u32, n)
    }
}

/// Matrix-multiplication reference simulator: build each instruction's full
/// unitary and multiply it into the state, starting from |0...0>.
pub fn run_full_matrix(program: &Program) -> Vec<Complex64> {
    let mut state = vec![Complex64::new(0.0, 0.0); 1 << program.n()];
    state[0] = Complex64::new(1.0, 0.0);
    for ins in program.instructions() {
        state = full_unitary(ins, program.n()).matvec(&state);
    }
    state
}

pub fn max_amp_error(a: &[Complex64], b: &[Complex64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Largest component difference after removing the global phase between the
/// two states.
pub fn phase_removed_error(got: &[Complex64], want: &[Complex64]) -> f64 {
    let overlap: Complex64 = got.iter().zip(want).map(|(g, w)| g.conj() * w).sum();
    let phase = if overlap.norm() == 0.0 {
        Complex64::new(1.0, 0.0)
    } else {
        overlap / overlap.norm()
    };
    got.iter()
        .zip(want)
        .map(|(g, w)| (w - phase * g).norm())
        .fold(0.0, f64::max)
}

/// Random circuit over the full user gate set (including the derived
/// T/X/Y/Z aliases), `gates` long.
pub fn random_circuit(n: u32, gates: usize, rng: &mut ChaCha8Rng) -> Circuit {
    let mut circuit = Circuit::new(n);
    for _ in 0..gates {
        let target = rng.gen_range(0..n) as u8;
        let theta = rng.gen::<f64>() * std::f64::consts::TAU;
        let kind = if n == 1 { rng.gen_range(0..9) } else { rng.gen_range(0..10) };
        let gate = match kind {
            0 => Gate::H { target },
            1 => Gate::S { target },
            2 => Gate::T { target },
            3 => Gate::X { target },
            4 => Gate::Y { target },
            5 => Gate::Z { target },
            6 => Gate::Rx { target, theta },
            7 => Gate::Ry { target, theta },
            8 => Gate::Rz { target, theta },
            _ => {
                let mut other = rng.gen_range(0..n - 1) as u8;
                if other >= target {
                    other += 1;
                }
                Gate::Cx { control: target, target: other }
            }
        };
        circuit.push(gate).unwrap();
    }
    circuit
}

/// Random normalized Reference-format state.
pub fn random_state(n: u32, rng: &mut ChaCha8Rng) -> Vec<Complex64> {
    let mut v: Vec<Complex64> = (0..1usize << n)
        .map(|_| Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
        .collect();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    for z in &mut v {
        *z /= norm;
    }
    v
}

/// Fixed-point round-to-nearest-even quantizer built purely on integer
/// arithmetic over the f64 bit decomposition, for checking the library's
/// float-path quantizer.
pub fn fx_quantize_oracle(x: f64, fraction_bits: u32, total_bits: u32) -> i64 {
    assert!(!x.is_nan());
    let max = (1i64 << (total_bits - 1)) - 1;
    let min = -max - 1;
    if x.is_infinite() {
        return if x > 0.0 { max } else { min };
    }
    if x == 0.0 {
        return 0;
    }
    let bits = x.abs().to_bits();
    let exp_field = (bits >> 52) & 0x7ff;
    // value = mantissa * 2^shift, exactly
    let (mantissa, shift) = if exp_field == 0 {
        (bits & ((1u64 << 52) - 1), -1074i64)
    } else {
        ((bits & ((1u64 << 52) - 1)) | (1u64 << 52), exp_field as i64 - 1075)
    };
    let scaled_shift = shift + fraction_bits as i64; // target = mantissa * 2^scaled_shift
    let magnitude: i128 = if scaled_shift >= 0 {
        if scaled_shift > 40 {
            // far beyond the representable range; saturate below
            i128::from(max) + 1
        } else {
            (mantissa as i128) << scaled_shift
        }
    } else {
        let k = (-scaled_shift) as u32;
        if k >= 128 {
            0
        } else {
            let m = mantissa as i128;
            let floor = m >> k;
            let rem = m - (floor << k);
            let half = 1i128 << (k - 1);
            if rem > half || (rem == half && floor & 1 == 1) {
                floor + 1
            } else {
                floor
            }
        }
    };
    let signed = if x < 0.0 { -magnitude } else { magnitude };
    signed.clamp(min as i128, max as i128) as i64
}

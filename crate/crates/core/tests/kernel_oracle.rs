//! Cross-checks of the amplitude-update kernel against the dense
//! matrix-multiplication simulator in `support`, plus the integer-arithmetic
//! quantizer oracle.

mod support;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qwave_core::circuits::build_qft;
use qwave_core::gates::Gate;
use qwave_core::kernel::{run_program, Session};
use qwave_core::numerics::{ComplexScalar, NumberFormat, Rounding};
use qwave_core::qstate::StateVector;

const RNE: Rounding = Rounding::NearestEven;
const REF: NumberFormat = NumberFormat::Reference;

#[test]
fn kernel_matches_full_matrix_simulator_on_random_circuits() {
    let mut rng = ChaCha8Rng::seed_from_u64(31_415);
    let mut worst: f64 = 0.0;
    for trial in 0..60 {
        let n = rng.gen_range(1..=5u32);
        let gates = rng.gen_range(1..=30usize);
        let circuit = support::random_circuit(n, gates, &mut rng);
        let program = circuit.lower(REF, RNE).unwrap();
        let kernel = run_program(&program, REF, RNE).unwrap().to_reference();
        let matrix = support::run_full_matrix(&program);
        let err = support::max_amp_error(&kernel, &matrix);
        assert!(err <= 1e-12, "trial {trial}: n = {n}, {gates} gates, err {err}");
        worst = worst.max(err);
    }
    assert!(worst <= 1e-12);
}

#[test]
fn kernel_matches_oracle_from_random_initial_states() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for _ in 0..20 {
        let n = rng.gen_range(2..=4u32);
        let init = support::random_state(n, &mut rng);
        let circuit = support::random_circuit(n, 12, &mut rng);
        let program = circuit.lower(REF, RNE).unwrap();

        let mut state = StateVector::zero(n, REF);
        for (amp, z) in state.amps_mut().iter_mut().zip(&init) {
            *amp = ComplexScalar::new(
                REF.quantize(z.re).unwrap(),
                REF.quantize(z.im).unwrap(),
            );
        }
        let kernel = Session::from_state(program.clone(), state, RNE)
            .unwrap()
            .run()
            .unwrap()
            .to_reference();

        let mut matrix = init.clone();
        for ins in program.instructions() {
            matrix = support::full_unitary(ins, n).matvec(&matrix);
        }
        assert!(support::max_amp_error(&kernel, &matrix) <= 1e-12);
    }
}

#[test]
fn derived_gates_act_like_their_reference_matrices_on_states() {
    // T, X, Y, Z lower onto rotations that differ from the textbook matrices
    // by a global phase only; compare full kernel runs against the textbook
    // action with the phase removed.
    let i = Complex64::i();
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let cases: Vec<(Gate, [[Complex64; 2]; 2])> = vec![
        (Gate::T { target: 1 }, [[one, zero], [zero, (i * std::f64::consts::FRAC_PI_4).exp()]]),
        (Gate::X { target: 1 }, [[zero, one], [one, zero]]),
        (Gate::Y { target: 1 }, [[zero, -i], [i, zero]]),
        (Gate::Z { target: 1 }, [[one, zero], [zero, -one]]),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let n = 3u32;
    for (gate, textbook) in cases {
        let mut circuit = qwave_core::gates::Circuit::new(n);
        circuit.push(gate).unwrap();
        let program = circuit.lower(REF, RNE).unwrap();
        let matrix = support::embed(&support::Matrix::from_rows(textbook), 1, n);
        for _ in 0..100 {
            let init = support::random_state(n, &mut rng);
            let mut state = StateVector::zero(n, REF);
            for (amp, z) in state.amps_mut().iter_mut().zip(&init) {
                *amp = ComplexScalar::new(
                    REF.quantize(z.re).unwrap(),
                    REF.quantize(z.im).unwrap(),
                );
            }
            let got = Session::from_state(program.clone(), state, RNE)
                .unwrap()
                .run()
                .unwrap()
                .to_reference();
            let want = matrix.matvec(&init);
            let err = support::phase_removed_error(&got, &want);
            assert!(err <= 1e-12, "{gate:?}: {err}");
        }
    }
}

#[test]
fn norm_is_preserved_at_reference_through_deep_circuits() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for n in [2u32, 6, 10] {
        let circuit = support::random_circuit(n, 600, &mut rng);
        let program = circuit.lower(REF, RNE).unwrap();
        let out = run_program(&program, REF, RNE).unwrap();
        assert!((out.norm_sq() - 1.0).abs() <= 1e-10, "n = {n}");
    }
}

#[test]
fn qft_output_matches_full_matrix_simulator() {
    for n in 1..=6u32 {
        let program = build_qft(n).unwrap().lower(REF, RNE).unwrap();
        let kernel = run_program(&program, REF, RNE).unwrap().to_reference();
        let matrix = support::run_full_matrix(&program);
        assert!(support::max_amp_error(&kernel, &matrix) <= 1e-12, "n = {n}");
    }
}

#[test]
fn quantizer_agrees_with_integer_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let formats = [
        (NumberFormat::Fx16, 14u32, 16u32),
        (NumberFormat::Fx24, 22, 24),
        (NumberFormat::Fx32, 30, 32),
    ];
    for _ in 0..50_000 {
        let x = (rng.gen::<f64>() - 0.5) * 4.4;
        for (format, fraction, total) in formats {
            let got = format.quantize(x).unwrap();
            let want = support::fx_quantize_oracle(x, fraction, total);
            let raw = got.bits() as i64;
            let signed = (raw << (64 - total)) >> (64 - total);
            assert_eq!(signed, want, "{format}: {x}");
        }
    }
    // denormal and tie-heavy inputs
    for x in [
        6.103515625e-5,
        6.1035156250001e-5,
        -1.52587890625e-5,
        0.999999999999,
        -2.0,
        1.99999999,
        f64::MIN_POSITIVE,
        5e-324,
        f64::INFINITY,
        f64::NEG_INFINITY,
    ] {
        for (format, fraction, total) in formats {
            let got = format.quantize(x).unwrap().bits() as i64;
            let signed = (got << (64 - total)) >> (64 - total);
            assert_eq!(signed, support::fx_quantize_oracle(x, fraction, total), "{format}: {x}");
        }
    }
}

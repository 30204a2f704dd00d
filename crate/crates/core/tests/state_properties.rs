//! Property checks for the density-matrix engine on seeded random states.

use approx::assert_abs_diff_eq;
use ionrep_core::linalg::hermitian_eigenvalues;
use ionrep_core::random::{random_density_matrix, seeded};
use ionrep_core::state::{GateSpec, MeasurementBasis, QuantumState};

fn assert_valid(state: &QuantumState, label: &str) {
    assert!(state.hermiticity_residual() < 1e-10, "{label}: lost Hermiticity");
    assert_abs_diff_eq!(state.trace(), 1.0, epsilon = 1e-10);
}

fn max_deviation(a: &QuantumState, b: &QuantumState) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..a.dim() {
        for j in 0..a.dim() {
            worst = worst.max((a.element(i, j) - b.element(i, j)).norm());
        }
    }
    worst
}

#[test]
fn operations_preserve_trace_and_hermiticity() {
    let mut rng = seeded(42);
    for n in [1usize, 2, 3] {
        for _ in 0..5 {
            let state = random_density_matrix(n, &mut rng);
            assert_valid(&state, "construction");
            let gates: Vec<GateSpec> = if n >= 2 {
                vec![GateSpec::h(0), GateSpec::s(n - 1), GateSpec::cnot(0, n - 1), GateSpec::cz(0, 1)]
            } else {
                vec![GateSpec::h(0), GateSpec::s(0), GateSpec::y(0)]
            };
            let mut current = state;
            for gate in &gates {
                current = current.apply_unitary(gate).unwrap();
                assert_valid(&current, "after gate");
            }
        }
    }
}

#[test]
fn unitaries_preserve_spectrum() {
    let mut rng = seeded(43);
    for _ in 0..5 {
        let state = random_density_matrix(3, &mut rng);
        let before = hermitian_eigenvalues(state.dim(), state.matrix());
        let after_state = state
            .apply_unitary(&GateSpec::h(1))
            .unwrap()
            .apply_unitary(&GateSpec::cnot(2, 0))
            .unwrap()
            .apply_unitary(&GateSpec::s(2))
            .unwrap();
        let after = hermitian_eigenvalues(after_state.dim(), after_state.matrix());
        for (x, y) in before.iter().zip(after.iter()) {
            assert_abs_diff_eq!(x, y, epsilon = 1e-9);
        }
    }
}

#[test]
fn measurement_branches_sum_to_one() {
    let mut rng = seeded(44);
    for n in [1usize, 2, 4] {
        let state = random_density_matrix(n, &mut rng);
        for qubit in 0..n {
            for basis in [MeasurementBasis::Z, MeasurementBasis::X] {
                let [plus, minus] = state.measure(qubit, basis).unwrap();
                assert_abs_diff_eq!(plus.probability + minus.probability, 1.0, epsilon = 1e-10);
            }
        }
    }
}

#[test]
fn partial_trace_commutes_with_unitaries_on_kept_qubits() {
    let mut rng = seeded(45);
    for _ in 0..5 {
        let state = random_density_matrix(4, &mut rng);
        // Unitary acting only on kept qubits {0, 2}.
        let keep = [0usize, 2];
        let gate_full = GateSpec::cnot(0, 2);
        let traced_then_gated = state
            .partial_trace(&keep)
            .unwrap()
            .apply_unitary(&GateSpec::cnot(0, 1))
            .unwrap();
        let gated_then_traced = state.apply_unitary(&gate_full).unwrap().partial_trace(&keep).unwrap();
        assert!(max_deviation(&traced_then_gated, &gated_then_traced) < 1e-10);
    }
}

#[test]
fn sampling_layer_agrees_with_enumeration() {
    let mut rng = seeded(46);
    let state = random_density_matrix(2, &mut rng);
    let [plus, _] = state.measure(0, MeasurementBasis::Z).unwrap();
    // A draw below the plus-probability must reproduce the plus branch.
    let (outcome, prob, post) = state.sample_measurement(0, MeasurementBasis::Z, plus.probability / 2.0).unwrap();
    assert_eq!(outcome, ionrep_core::state::Sign::Plus);
    assert_abs_diff_eq!(prob, plus.probability, epsilon = 1e-12);
    assert!(max_deviation(&post, &plus.post_state.unwrap()) < 1e-12);
}

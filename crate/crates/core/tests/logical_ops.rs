//! Verification of the logical Clifford generators against their targets and
//! of the purification round against the closed-form recurrence map.
//!
//! Gate verification works at the density-matrix level, which is exactly
//! "equal up to a global phase": a compiled circuit is applied to encoded
//! inputs spanning the logical operator space and compared against the bare
//! logical gate acting on the unencoded inputs.

use approx::assert_abs_diff_eq;
use ionrep_core::channels::{bell_diagonal_state, bell_populations, NoiseModel};
use ionrep_core::protocol::{
    dfs_decode, dfs_encode, elementary_link, logical_clifford, purification_round, remap_circuit,
    BellKind, LogicalGate, PurificationLevel,
};
use ionrep_core::random::{random_density_matrix, seeded, uniform};
use ionrep_core::state::{GateSpec, QuantumState};

const IDEAL: fn() -> NoiseModel = NoiseModel::ideal;

fn encode_one(state: &QuantumState) -> QuantumState {
    dfs_encode(state, 0, &IDEAL()).unwrap()
}

fn decode_one(state: &QuantumState) -> QuantumState {
    dfs_decode(state, (0, 1), &IDEAL()).unwrap()
}

/// Weight outside the two-ion codespace per logical qubit (pairs listed as
/// (data, ancilla) index pairs).
fn leakage(state: &QuantumState, pairs: &[(usize, usize)]) -> f64 {
    let dim = state.dim();
    let mut leak = 0.0;
    for i in 0..dim {
        let mut inside = true;
        for &(d, a) in pairs {
            let bd = (i >> (state.num_qubits() - 1 - d)) & 1;
            let ba = (i >> (state.num_qubits() - 1 - a)) & 1;
            if bd == ba {
                inside = false;
            }
        }
        if !inside {
            leak += state.element(i, i).re;
        }
    }
    leak
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

fn one_qubit_basis() -> Vec<QuantumState> {
    use num_complex::Complex64 as C;
    let h = core::f64::consts::FRAC_1_SQRT_2;
    vec![
        QuantumState::basis_state(1, 0).unwrap(),
        QuantumState::basis_state(1, 1).unwrap(),
        QuantumState::from_pure(&[C::new(h, 0.0), C::new(h, 0.0)]).unwrap(),
        QuantumState::from_pure(&[C::new(h, 0.0), C::new(0.0, h)]).unwrap(),
    ]
}

#[test]
fn single_qubit_generators_match_their_logical_targets() {
    for (gate, bare) in [(LogicalGate::S, GateSpec::s(0)), (LogicalGate::H, GateSpec::h(0))] {
        let circuit = logical_clifford(gate);
        for input in one_qubit_basis() {
            let encoded = encode_one(&input);
            let compiled = encoded.apply_circuit(&circuit).unwrap();
            // Codespace is preserved.
            assert!(leakage(&compiled, &[(0, 1)]) <= 1e-10, "{gate:?} leaks");
            // Restriction equals the logical gate.
            let expected = encode_one(&input.apply_unitary(&bare).unwrap());
            let dev = max_deviation(&compiled, &expected);
            assert!(dev <= 1e-10, "{gate:?}: deviation {dev:.2e}");
            // Round trip through decoding agrees too.
            let dev2 = max_deviation(&decode_one(&compiled), &input.apply_unitary(&bare).unwrap());
            assert!(dev2 <= 1e-10);
        }
    }
}

#[test]
fn controlled_phase_generator_matches_logical_cz() {
    let circuit = logical_clifford(LogicalGate::Cz);
    // Two encoded logical qubits live on physical (0,1) and (2,3); the
    // canonical circuit already targets that layout.
    let basis = one_qubit_basis();
    for a in &basis {
        for b in &basis {
            let input = a.tensor(b).unwrap();
            let encoded = {
                let first = dfs_encode(&input, 0, &IDEAL()).unwrap();
                let second = dfs_encode(&first, 1, &IDEAL()).unwrap();
                second.swap_qubits(1, 2).unwrap()
            };
            let compiled = encoded.apply_circuit(&circuit).unwrap();
            assert!(leakage(&compiled, &[(0, 1), (2, 3)]) <= 1e-10);
            let gated = input.apply_unitary(&GateSpec::cz(0, 1)).unwrap();
            let expected = {
                let first = dfs_encode(&gated, 0, &IDEAL()).unwrap();
                let second = dfs_encode(&first, 1, &IDEAL()).unwrap();
                second.swap_qubits(1, 2).unwrap()
            };
            let dev = max_deviation(&compiled, &expected);
            assert!(dev <= 1e-10, "CZ deviation {dev:.2e}");
        }
    }
}

#[test]
fn remapped_circuits_act_on_the_right_wires() {
    let circuit = remap_circuit(&logical_clifford(LogicalGate::S), &[2, 3]);
    assert!(circuit.iter().all(|g| g.targets.iter().all(|&t| t >= 2)));
}

/// Closed-form recurrence map on Bell-diagonal populations (φ+, φ-, ψ+, ψ-),
/// derived by tracking amplitude/phase error bits through the bilateral
/// x-rotations, the transversal CNOTs, and the coincidence post-selection.
fn recurrence_map(p: [f64; 4], q: [f64; 4]) -> (f64, [f64; 4]) {
    // Bit labels (amplitude, phase): φ+=(0,0), φ-=(0,1), ψ+=(1,0), ψ-=(1,1);
    // the rotations swap φ- and ψ-.
    let rot = |v: [f64; 4]| [v[0], v[3], v[2], v[1]];
    let pr = rot(p);
    let qr = rot(q);
    let at = |v: [f64; 4], a: usize, b: usize| match (a, b) {
        (0, 0) => v[0],
        (0, 1) => v[1],
        (1, 0) => v[2],
        _ => v[3],
    };
    let mut out = [0.0f64; 4];
    let mut norm = 0.0;
    for a in 0..2 {
        for b1 in 0..2 {
            for b2 in 0..2 {
                let w = at(pr, a, b1) * at(qr, a, b2);
                norm += w;
                let slot = match (a, b1 ^ b2) {
                    (0, 0) => 0,
                    (0, 1) => 1,
                    (1, 0) => 2,
                    _ => 3,
                };
                out[slot] += w;
            }
        }
    }
    for o in &mut out {
        *o /= norm;
    }
    (norm, out)
}

#[test]
fn physical_round_matches_recurrence_map_on_random_inputs() {
    let mut rng = seeded(77);
    for _ in 0..10 {
        let mut p = [0.0f64; 4];
        let mut q = [0.0f64; 4];
        let mut ps = 0.0;
        let mut qs = 0.0;
        for k in 0..4 {
            p[k] = uniform(&mut rng) + 0.01;
            q[k] = uniform(&mut rng) + 0.01;
            ps += p[k];
            qs += q[k];
        }
        for k in 0..4 {
            p[k] /= ps;
            q[k] /= qs;
        }
        let pair_a = bell_diagonal_state(&p);
        let pair_b = bell_diagonal_state(&q);
        let (success, kept) =
            purification_round(&pair_a, &pair_b, &IDEAL(), PurificationLevel::Physical).unwrap();
        let (expected_success, expected_pops) = recurrence_map(p, q);
        assert_abs_diff_eq!(success, expected_success, epsilon = 1e-10);
        let pops = bell_populations(&kept).unwrap();
        for k in 0..4 {
            assert_abs_diff_eq!(pops[k], expected_pops[k], epsilon = 1e-10);
        }
    }
}

#[test]
fn purification_strictly_improves_werner_pairs_above_half() {
    for f in [0.55, 0.65, 0.75, 0.85, 0.95] {
        let pair = elementary_link(f).unwrap();
        let (_, kept) = purification_round(&pair, &pair, &IDEAL(), PurificationLevel::Physical).unwrap();
        let out = bell_populations(&kept).unwrap()[0];
        assert!(out > f, "F={f}: purified to {out}");
    }
}

#[test]
fn logical_round_reproduces_the_physical_map() {
    let encode_pair = |pair: &QuantumState| {
        let first = dfs_encode(pair, 0, &IDEAL()).unwrap();
        let second = dfs_encode(&first, 1, &IDEAL()).unwrap();
        second.swap_qubits(1, 2).unwrap()
    };
    for f in [0.7, 0.85, 0.95] {
        let pair = elementary_link(f).unwrap();
        let logical_pair = encode_pair(&pair);
        let (ps, kept_physical) =
            purification_round(&pair, &pair, &IDEAL(), PurificationLevel::Physical).unwrap();
        let (ls, kept_logical) =
            purification_round(&logical_pair, &logical_pair, &IDEAL(), PurificationLevel::Logical).unwrap();
        assert_abs_diff_eq!(ps, ls, epsilon = 1e-10);
        for kind in BellKind::ALL {
            let physical = kept_physical.fidelity(&kind.state_vector()).unwrap();
            let logical = kept_logical.fidelity(&kind.logical_state_vector()).unwrap();
            assert_abs_diff_eq!(physical, logical, epsilon = 1e-10);
        }
    }
}

#[test]
fn noisy_logical_round_purifies_at_improved_gate_noise() {
    // The generator-compiled round spends well over a hundred physical gates,
    // so at the demonstrated 0.5%/0.1% noise one round loses more than it
    // gains; at the projected 0.1%/0.01% level it purifies.
    let noise = NoiseModel::improved();
    let encode_pair = |pair: &QuantumState| {
        let first = dfs_encode(pair, 0, &noise).unwrap();
        let second = dfs_encode(&first, 1, &noise).unwrap();
        second.swap_qubits(1, 2).unwrap()
    };
    let pair = elementary_link(0.8).unwrap();
    let logical_pair = encode_pair(&pair);
    let before = logical_pair.fidelity(&BellKind::PhiPlus.logical_state_vector()).unwrap();
    let (success, kept) =
        purification_round(&logical_pair, &logical_pair, &noise, PurificationLevel::Logical).unwrap();
    let after = kept.fidelity(&BellKind::PhiPlus.logical_state_vector()).unwrap();
    assert!(success > 0.5);
    assert!((kept.trace() - 1.0).abs() < 1e-10);
    assert!(after > before, "improved-noise round should purify F=0.8 pairs: {before} -> {after}");
}

#[test]
fn random_two_qubit_states_survive_encode_decode() {
    let mut rng = seeded(78);
    let state = random_density_matrix(2, &mut rng);
    let enc = dfs_encode(&state, 0, &IDEAL()).unwrap();
    let enc = dfs_encode(&enc, 1, &IDEAL()).unwrap();
    let enc = enc.swap_qubits(1, 2).unwrap();
    let dec_half = dfs_decode(&enc, (0, 1), &IDEAL()).unwrap();
    let dec = dfs_decode(&dec_half, (1, 2), &IDEAL()).unwrap();
    assert!(max_deviation(&dec, &state) <= 1e-10);
}

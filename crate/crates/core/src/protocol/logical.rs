//! DFS encoding and decoding, logical Clifford generators, logical
//! computational-basis measurement, and one round of recurrence
//! entanglement purification.
//!
//! The code is the two-ion subspace |0_L⟩ = |01⟩, |1_L⟩ = |10⟩, invariant
//! under collective dephasing. Encoding prepares an ancilla in |1⟩
//! (noiselessly — the single noisy CNOT carries the encoding error) and
//! applies CNOT(data → ancilla); decoding is the inverse CNOT followed by
//! tracing out the ancilla without post-selection.

use alloc::vec;
use alloc::vec::Vec;

use crate::channels::{noisy_gate, readout_noise, NoiseModel};
use crate::error::{validation, Result};
use crate::state::{GateSpec, MeasurementBasis, QuantumState};

/// Appends an ancilla in |1⟩ and applies a noisy CNOT from `data_qubit` onto
/// it. The logical qubit is the (data, ancilla) pair, with the ancilla at
/// the new highest register index.
pub fn dfs_encode(state: &QuantumState, data_qubit: usize, noise: &NoiseModel) -> Result<QuantumState> {
    if data_qubit >= state.num_qubits() {
        return Err(validation("data qubit out of range"));
    }
    let ancilla = QuantumState::basis_state(1, 1)?;
    let widened = state.tensor(&ancilla)?;
    let target = widened.num_qubits() - 1;
    noisy_gate(&widened, &GateSpec::cnot(data_qubit, target), noise)
}

/// Inverse of the encoding circuit: a noisy CNOT(data → ancilla) followed by
/// tracing out the ancilla. The register shrinks by one qubit; indices above
/// the ancilla shift down.
pub fn dfs_decode(
    state: &QuantumState,
    logical_pair: (usize, usize),
    noise: &NoiseModel,
) -> Result<QuantumState> {
    let (data, ancilla) = logical_pair;
    if data >= state.num_qubits() || ancilla >= state.num_qubits() || data == ancilla {
        return Err(validation("invalid logical pair"));
    }
    let undone = noisy_gate(state, &GateSpec::cnot(data, ancilla), noise)?;
    let keep: Vec<usize> = (0..state.num_qubits()).filter(|&q| q != ancilla).collect();
    undone.partial_trace(&keep)
}

/// Encodes both halves of a two-qubit pair, returning the four-qubit state
/// ordered (data₁, ancilla₁, data₂, ancilla₂).
pub fn dfs_encode_pair(pair: &QuantumState, noise: &NoiseModel) -> Result<QuantumState> {
    if pair.num_qubits() != 2 {
        return Err(validation("expected a two-qubit pair"));
    }
    let once = dfs_encode(pair, 0, noise)?; // (d1, d2, a1)
    let twice = dfs_encode(&once, 1, noise)?; // (d1, d2, a1, a2)
    twice.swap_qubits(1, 2) // (d1, a1, d2, a2)
}

/// Logical single- and two-qubit Clifford generators.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LogicalGate {
    S,
    H,
    Cz,
}

/// Physical circuit of a logical Clifford generator on the canonical layout:
/// the first logical qubit on physical wires (0, 1) = (data, ancilla), the
/// second — for `Cz` — on wires (2, 3). Gates are listed in application
/// order.
///
/// The Hadamard construction is
/// `[(H·S·H·Z) ⊗ (H·S·H)] · CNOT(0→1) · [(H·S·X) ⊗ X]`, which acts as
/// logical H on the codespace up to a global phase.
pub fn logical_clifford(gate: LogicalGate) -> Vec<GateSpec> {
    match gate {
        LogicalGate::S => vec![GateSpec::s(0)],
        LogicalGate::H => vec![
            // Rightmost factor first: (H·S·X) on the data wire, X on the ancilla.
            GateSpec::x(0),
            GateSpec::s(0),
            GateSpec::h(0),
            GateSpec::x(1),
            GateSpec::cnot(0, 1),
            // Leftmost factor: (H·S·H·Z) on the data wire, (H·S·H) on the ancilla.
            GateSpec::z(0),
            GateSpec::h(0),
            GateSpec::s(0),
            GateSpec::h(0),
            GateSpec::h(1),
            GateSpec::s(1),
            GateSpec::h(1),
        ],
        LogicalGate::Cz => vec![GateSpec::cz(0, 2)],
    }
}

/// Re-targets a canonical-layout circuit onto arbitrary register positions:
/// `layout[k]` is the register index playing canonical wire `k`.
pub fn remap_circuit(circuit: &[GateSpec], layout: &[usize]) -> Vec<GateSpec> {
    circuit
        .iter()
        .map(|g| GateSpec {
            kind: g.kind,
            targets: g.targets.iter().map(|&t| layout[t]).collect(),
        })
        .collect()
}

/// One branch of a logical computational-basis measurement.
#[derive(Debug, Clone)]
pub struct LogicalBranch {
    pub outcome: u8,
    pub probability: f64,
    pub post_state: Option<QuantumState>,
}

/// Logical Z measurement: measuring the data ion in the computational basis
/// distinguishes |0_L⟩ = |01⟩ (data reads 0) from |1_L⟩ = |10⟩. The register
/// keeps its size.
pub fn logical_measure_z(state: &QuantumState, logical_pair: (usize, usize)) -> Result<[LogicalBranch; 2]> {
    let (data, ancilla) = logical_pair;
    if data >= state.num_qubits() || ancilla >= state.num_qubits() || data == ancilla {
        return Err(validation("invalid logical pair"));
    }
    let [plus, minus] = state.measure(data, MeasurementBasis::Z)?;
    Ok([
        LogicalBranch { outcome: 0, probability: plus.probability, post_state: plus.post_state },
        LogicalBranch { outcome: 1, probability: minus.probability, post_state: minus.post_state },
    ])
}

/// Encoding level of a purification round.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PurificationLevel {
    Physical,
    Logical,
}

/// One round of the two-pair recurrence protocol.
///
/// `pair_a` is kept, `pair_b` is consumed. Both ends rotate their qubits
/// (the kept side by the π/2 X-rotation H·S·H, the other side by its
/// inverse H·S³·H), apply local CNOTs from the kept pair onto the consumed
/// pair, and measure the consumed pair in the computational basis, keeping
/// coinciding outcomes. At the logical level every step is compiled through
/// the logical Clifford generators and [`logical_measure_z`].
///
/// Returns the success probability and the renormalized kept pair.
pub fn purification_round(
    pair_a: &QuantumState,
    pair_b: &QuantumState,
    noise: &NoiseModel,
    level: PurificationLevel,
) -> Result<(f64, QuantumState)> {
    match level {
        PurificationLevel::Physical => purify_physical(pair_a, pair_b, noise),
        PurificationLevel::Logical => purify_logical(pair_a, pair_b, noise),
    }
}

// H·S·H is the π/2 rotation about X up to a global phase; H·S³·H its inverse.
fn rotation_circuit(wire: usize, inverse: bool) -> Vec<GateSpec> {
    if inverse {
        vec![GateSpec::h(wire), GateSpec::s(wire), GateSpec::s(wire), GateSpec::s(wire), GateSpec::h(wire)]
    } else {
        vec![GateSpec::h(wire), GateSpec::s(wire), GateSpec::h(wire)]
    }
}

fn purify_physical(
    pair_a: &QuantumState,
    pair_b: &QuantumState,
    noise: &NoiseModel,
) -> Result<(f64, QuantumState)> {
    if pair_a.num_qubits() != 2 || pair_b.num_qubits() != 2 {
        return Err(validation("physical purification expects two-qubit pairs"));
    }
    // Register (A1, B1, A2, B2): one station holds qubits 0 and 2, the other
    // 1 and 3.
    let mut state = pair_a.tensor(pair_b)?;
    let mut circuit = Vec::new();
    circuit.extend(rotation_circuit(0, false));
    circuit.extend(rotation_circuit(2, false));
    circuit.extend(rotation_circuit(1, true));
    circuit.extend(rotation_circuit(3, true));
    circuit.push(GateSpec::cnot(0, 2));
    circuit.push(GateSpec::cnot(1, 3));
    for gate in &circuit {
        state = noisy_gate(&state, gate, noise)?;
    }
    state = readout_noise(&state, &[2, 3], noise)?;

    let mut success = 0.0;
    let mut acc = vec![num_complex::Complex64::new(0.0, 0.0); 16];
    for pattern in [0b00usize, 0b11] {
        let (prob, post) = state.project_and_remove(&[2, 3], pattern);
        success += prob;
        if let Some(post) = post {
            for (a, &b) in acc.iter_mut().zip(post.matrix()) {
                *a += prob * b;
            }
        }
    }
    finish_mixture(2, acc, success)
}

fn purify_logical(
    pair_a: &QuantumState,
    pair_b: &QuantumState,
    noise: &NoiseModel,
) -> Result<(f64, QuantumState)> {
    if pair_a.num_qubits() != 4 || pair_b.num_qubits() != 4 {
        return Err(validation("logical purification expects four-qubit encoded pairs"));
    }
    // Register: kept pair on physical (0..4) as (A-data, A-anc, B-data,
    // B-anc), consumed pair on (4..8).
    let mut state = pair_a.tensor(pair_b)?;
    let a1 = [0, 1];
    let b1 = [2, 3];
    let a2 = [4, 5];
    let b2 = [6, 7];

    let mut circuit: Vec<GateSpec> = Vec::new();
    let logical_rotation = |pair: [usize; 2], inverse: bool, circuit: &mut Vec<GateSpec>| {
        let h = logical_clifford(LogicalGate::H);
        let s = logical_clifford(LogicalGate::S);
        circuit.extend(remap_circuit(&h, &pair));
        let reps = if inverse { 3 } else { 1 };
        for _ in 0..reps {
            circuit.extend(remap_circuit(&s, &pair));
        }
        circuit.extend(remap_circuit(&h, &pair));
    };
    logical_rotation(a1, false, &mut circuit);
    logical_rotation(a2, false, &mut circuit);
    logical_rotation(b1, true, &mut circuit);
    logical_rotation(b2, true, &mut circuit);
    // Logical CNOT(control → target) = H_L(target) · CZ_L · H_L(target).
    let logical_cnot = |control: [usize; 2], target: [usize; 2], circuit: &mut Vec<GateSpec>| {
        let h = logical_clifford(LogicalGate::H);
        let cz = logical_clifford(LogicalGate::Cz);
        circuit.extend(remap_circuit(&h, &target));
        circuit.extend(remap_circuit(&cz, &[control[0], control[1], target[0], target[1]]));
        circuit.extend(remap_circuit(&h, &target));
    };
    logical_cnot(a1, a2, &mut circuit);
    logical_cnot(b1, b2, &mut circuit);

    for gate in &circuit {
        state = noisy_gate(&state, gate, noise)?;
    }
    state = readout_noise(&state, &[4, 6], noise)?;

    // Logical Z on both consumed logical qubits; keep coinciding outcomes and
    // trace the consumed ions out entirely.
    let mut success = 0.0;
    let mut acc = vec![num_complex::Complex64::new(0.0, 0.0); 16 * 16];
    for pattern in [0b00usize, 0b11] {
        // Measured data ions are register qubits 4 and 6.
        let (prob, post) = state.project_and_remove(&[4, 6], pattern);
        success += prob;
        if let Some(post) = post {
            // post is six qubits: kept pair (0..4) plus the two consumed
            // ancilla ions now at positions 4, 5.
            let reduced = post.partial_trace(&[0, 1, 2, 3])?;
            for (a, &b) in acc.iter_mut().zip(reduced.matrix()) {
                *a += prob * b;
            }
        }
    }
    finish_mixture(4, acc, success)
}

fn finish_mixture(
    num_qubits: usize,
    mut acc: Vec<num_complex::Complex64>,
    success: f64,
) -> Result<(f64, QuantumState)> {
    if success <= 1e-12 {
        return Err(crate::error::SimError::DegenerateState);
    }
    let inv = 1.0 / success;
    for e in &mut acc {
        *e *= inv;
    }
    Ok((success, QuantumState::from_parts(num_qubits, acc)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::bell_populations;
    use crate::protocol::{elementary_link, BellKind};
    use crate::state::FRAC_1_SQRT_2;
    use approx::assert_abs_diff_eq;
    use num_complex::Complex64;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn encode_superposition() {
        let h = FRAC_1_SQRT_2;
        let psi = QuantumState::from_pure(&[c(h, 0.0), c(h, 0.0)]).unwrap();
        let enc = dfs_encode(&psi, 0, &NoiseModel::ideal()).unwrap();
        // α|01⟩ + β|10⟩.
        let reference = [c(0.0, 0.0), c(h, 0.0), c(h, 0.0), c(0.0, 0.0)];
        assert_abs_diff_eq!(enc.fidelity(&reference).unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn encode_bell_pair_gives_logical_bell_pair() {
        let link = elementary_link(1.0).unwrap();
        let enc = dfs_encode_pair(&link, &NoiseModel::ideal()).unwrap();
        let f = enc.fidelity(&BellKind::PhiPlus.logical_state_vector()).unwrap();
        assert_abs_diff_eq!(f, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn noisy_encode_leaks_outside_codespace() {
        let zero = QuantumState::basis_state(1, 0).unwrap();
        let noise = NoiseModel::baseline();
        let enc = dfs_encode(&zero, 0, &noise).unwrap();
        // Codespace weight = populations of |01⟩ and |10⟩; the leak equals
        // the X/Y share of the ancilla's depolarizing channel, (1-p)/2,
        // here evaluated by direct matrix arithmetic.
        let leak = enc.element(0b00, 0b00).re + enc.element(0b11, 0b11).re;
        assert_abs_diff_eq!(leak, (1.0 - noise.p_g2) / 2.0, epsilon = 1e-12);
    }

    #[test]
    fn decode_inverts_encode() {
        let amps = [c(0.6, 0.0), c(0.0, 0.8)];
        let psi = QuantumState::from_pure(&amps).unwrap();
        let enc = dfs_encode(&psi, 0, &NoiseModel::ideal()).unwrap();
        let dec = dfs_decode(&enc, (0, 1), &NoiseModel::ideal()).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert_abs_diff_eq!(dec.element(i, j).re, psi.element(i, j).re, epsilon = 1e-12);
                assert_abs_diff_eq!(dec.element(i, j).im, psi.element(i, j).im, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn decode_logical_bell_pair() {
        let link = elementary_link(1.0).unwrap();
        let enc = dfs_encode_pair(&link, &NoiseModel::ideal()).unwrap();
        let half = dfs_decode(&enc, (0, 1), &NoiseModel::ideal()).unwrap();
        let full = dfs_decode(&half, (1, 2), &NoiseModel::ideal()).unwrap();
        assert_abs_diff_eq!(
            full.fidelity(&BellKind::PhiPlus.state_vector()).unwrap(),
            1.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn noisy_decode_of_perfect_logical_pair_loses_fidelity() {
        let link = elementary_link(1.0).unwrap();
        let enc = dfs_encode_pair(&link, &NoiseModel::ideal()).unwrap();
        let noise = NoiseModel::baseline();
        let half = dfs_decode(&enc, (0, 1), &noise).unwrap();
        let full = dfs_decode(&half, (1, 2), &noise).unwrap();
        let f = full.fidelity(&BellKind::PhiPlus.state_vector()).unwrap();
        assert!(f < 1.0);
        assert!(f > 0.98, "two noisy CNOTs should cost well under 2%: {f}");
    }

    #[test]
    fn logical_measure_z_examples() {
        let zero_l = QuantumState::basis_state(2, 0b01).unwrap();
        let [b0, b1] = logical_measure_z(&zero_l, (0, 1)).unwrap();
        assert_abs_diff_eq!(b0.probability, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(b1.probability, 0.0, epsilon = 1e-12);

        let one_l = QuantumState::basis_state(2, 0b10).unwrap();
        let [b0, b1] = logical_measure_z(&one_l, (0, 1)).unwrap();
        assert_abs_diff_eq!(b0.probability, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(b1.probability, 1.0, epsilon = 1e-12);

        let h = FRAC_1_SQRT_2;
        let plus_l = QuantumState::from_pure(&[c(0.0, 0.0), c(h, 0.0), c(h, 0.0), c(0.0, 0.0)]).unwrap();
        let [b0, b1] = logical_measure_z(&plus_l, (0, 1)).unwrap();
        assert_abs_diff_eq!(b0.probability, 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(b1.probability, 0.5, epsilon = 1e-12);
    }

    #[test]
    fn purification_keeps_perfect_pairs_perfect() {
        let bell = elementary_link(1.0).unwrap();
        let (p, out) = purification_round(&bell, &bell, &NoiseModel::ideal(), PurificationLevel::Physical).unwrap();
        assert_abs_diff_eq!(p, 1.0, epsilon = 1e-10);
        assert_abs_diff_eq!(
            out.fidelity(&BellKind::PhiPlus.state_vector()).unwrap(),
            1.0,
            epsilon = 1e-10
        );
    }

    #[test]
    fn purification_raises_werner_fidelity() {
        let pair = elementary_link(0.85).unwrap();
        let (p, out) = purification_round(&pair, &pair, &NoiseModel::ideal(), PurificationLevel::Physical).unwrap();
        let pops = bell_populations(&out).unwrap();
        // Recurrence map on Werner inputs: N = (F+ε)² + (2ε)², F' = (F²+ε²)/N.
        let f = 0.85;
        let eps = (1.0 - f) / 3.0;
        let n = (f + eps) * (f + eps) + 4.0 * eps * eps;
        assert_abs_diff_eq!(p, n, epsilon = 1e-10);
        assert_abs_diff_eq!(pops[0], (f * f + eps * eps) / n, epsilon = 1e-10);
        assert!(pops[0] > f);
    }
}

//! Physical and logical Bell measurements with branch enumeration.
//!
//! A Bell measurement never samples: it returns every outcome branch with
//! its probability, the identified Bell projection, the Pauli-frame
//! correction for the surviving pair, and the conditional state on the
//! unmeasured qubits. The chain layer mixes branches exactly.
//!
//! Logical measurements act on two co-trapped DFS qubits. With circuit wires
//! numbered 1..4 — (1, 3) the data/ancilla ions of the pair reaching back
//! toward the left end of the chain, (2, 4) the data/ancilla ions of the new
//! link — version 1 runs CNOT(3→2) and CNOT(1→4), measures wires 1 and 3 in
//! X and 2 and 4 in Z, and accepts only the eight outcome patterns that can
//! occur for in-codespace inputs (an error-detection step). Version 2 runs
//! the single gate CNOT(3→4), measures wires 1, 2, 3 in X and wire 4 in Z,
//! and classifies all sixteen patterns deterministically.

use alloc::vec::Vec;

use crate::channels::{noisy_gate, readout_noise, NoiseModel};
use crate::error::{validation, Result};
use crate::protocol::BellKind;
use crate::state::{GateSpec, QuantumState, Sign};

/// Pauli correction applied to one end of the surviving pair (logical
/// Paulis when the pair is DFS-encoded).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PauliFrame {
    Identity,
    X,
    Z,
    XZ,
}

impl BellKind {
    /// Correction that maps this projection back onto φ+.
    pub fn correction(self) -> PauliFrame {
        match self {
            BellKind::PhiPlus => PauliFrame::Identity,
            BellKind::PhiMinus => PauliFrame::Z,
            BellKind::PsiPlus => PauliFrame::X,
            BellKind::PsiMinus => PauliFrame::XZ,
        }
    }
}

/// Outcome record of one measurement branch.
#[derive(Debug, Clone, PartialEq)]
pub struct SwapResult {
    /// Wire outcomes in circuit order (wires 1..4 for logical measurements,
    /// the two co-located qubits for physical ones).
    pub outcomes: Vec<Sign>,
    /// Identified Bell projection; `None` for discarded version-1 patterns.
    pub projected_bell: Option<BellKind>,
    pub correction: PauliFrame,
    pub accepted: bool,
    pub branch_probability: f64,
}

/// A branch together with the conditional state on the surviving qubits
/// (measured qubits are projected out and removed). `None` when the branch
/// probability is below 1e-12.
#[derive(Debug, Clone)]
pub struct SwapBranch {
    pub result: SwapResult,
    pub post_state: Option<QuantumState>,
}

/// Register positions of the four circuit wires of a logical Bell
/// measurement.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BsmQubitMap {
    /// Wire 1: data ion of the left-reaching logical pair.
    pub left_data: usize,
    /// Wire 2: data ion of the right-reaching logical pair.
    pub right_data: usize,
    /// Wire 3: ancilla ion of the left-reaching logical pair.
    pub left_ancilla: usize,
    /// Wire 4: ancilla ion of the right-reaching logical pair.
    pub right_ancilla: usize,
}

impl BsmQubitMap {
    fn wires(&self) -> [usize; 4] {
        [self.left_data, self.right_data, self.left_ancilla, self.right_ancilla]
    }

    fn validate(&self, num_qubits: usize) -> Result<()> {
        let w = self.wires();
        for (i, &a) in w.iter().enumerate() {
            if a >= num_qubits {
                return Err(validation("qubit map index out of range"));
            }
            for &b in &w[i + 1..] {
                if a == b {
                    return Err(validation("qubit map indices must be distinct"));
                }
            }
        }
        Ok(())
    }
}

/// Outcome table for version 1 (error-detecting) logical Bell measurements:
/// accepted patterns on wires (1, 2, 3, 4) with bit 1 ↔ the "-" outcome.
/// Patterns not listed are discards.
pub const LOGICAL_BSM_V1_TABLE: [([u8; 4], BellKind); 8] = [
    ([0, 1, 0, 1], BellKind::PhiPlus),
    ([1, 1, 1, 1], BellKind::PhiPlus),
    ([0, 1, 1, 1], BellKind::PhiMinus),
    ([1, 1, 0, 1], BellKind::PhiMinus),
    ([0, 0, 0, 0], BellKind::PsiPlus),
    ([1, 0, 1, 0], BellKind::PsiPlus),
    ([0, 0, 1, 0], BellKind::PsiMinus),
    ([1, 0, 0, 0], BellKind::PsiMinus),
];

/// Outcome table for version 2 (deterministic) logical Bell measurements:
/// all sixteen patterns on wires (1, 2, 3, 4) classify. Wire 4 separates φ
/// from ψ; the parity of "-" outcomes on wires 1..3 fixes the sign.
pub const LOGICAL_BSM_V2_TABLE: [([u8; 4], BellKind); 16] = [
    ([0, 0, 0, 0], BellKind::PhiPlus),
    ([0, 1, 1, 0], BellKind::PhiPlus),
    ([1, 0, 1, 0], BellKind::PhiPlus),
    ([1, 1, 0, 0], BellKind::PhiPlus),
    ([0, 0, 1, 0], BellKind::PhiMinus),
    ([0, 1, 0, 0], BellKind::PhiMinus),
    ([1, 0, 0, 0], BellKind::PhiMinus),
    ([1, 1, 1, 0], BellKind::PhiMinus),
    ([0, 0, 0, 1], BellKind::PsiPlus),
    ([0, 1, 1, 1], BellKind::PsiPlus),
    ([1, 0, 1, 1], BellKind::PsiPlus),
    ([1, 1, 0, 1], BellKind::PsiPlus),
    ([0, 0, 1, 1], BellKind::PsiMinus),
    ([0, 1, 0, 1], BellKind::PsiMinus),
    ([1, 0, 0, 1], BellKind::PsiMinus),
    ([1, 1, 1, 1], BellKind::PsiMinus),
];

fn classify(table: &[([u8; 4], BellKind)], pattern: [u8; 4]) -> Option<BellKind> {
    table.iter().find(|(p, _)| *p == pattern).map(|&(_, kind)| kind)
}

/// Shared branch-enumeration core. `circuit` is applied with per-gate noise,
/// `x_wires` are rotated into the computational basis with ideal Hadamards
/// (measurement itself carries no noise), and all 2^wires patterns are
/// enumerated.
fn enumerate_branches(
    state: &QuantumState,
    circuit: &[GateSpec],
    wires: &[usize],
    x_wires: &[usize],
    noise: &NoiseModel,
    classify_pattern: impl Fn(&[u8]) -> (Option<BellKind>, bool),
) -> Result<Vec<SwapBranch>> {
    let mut work = state.clone();
    for gate in circuit {
        work = noisy_gate(&work, gate, noise)?;
    }
    for &q in x_wires {
        work = work.apply_unitary(&GateSpec::h(q))?;
    }
    work = readout_noise(&work, wires, noise)?;

    // project_and_remove wants measured qubits sorted by register position.
    let mut order: Vec<usize> = (0..wires.len()).collect();
    order.sort_by_key(|&k| wires[k]);
    let sorted: Vec<usize> = order.iter().map(|&k| wires[k]).collect();

    let count = 1usize << wires.len();
    let mut branches = Vec::with_capacity(count);
    for pattern in 0..count {
        // Bit k of `pattern` is the outcome of wire k; rearrange into the
        // register-sorted bit layout used by project_and_remove.
        let bit_of_wire = |k: usize| (pattern >> (wires.len() - 1 - k)) & 1;
        let mut sorted_pattern = 0usize;
        for (pos, &k) in order.iter().enumerate() {
            sorted_pattern |= bit_of_wire(k) << (wires.len() - 1 - pos);
        }
        let (prob, post) = work.project_and_remove(&sorted, sorted_pattern);
        let bits: Vec<u8> = (0..wires.len()).map(|k| bit_of_wire(k) as u8).collect();
        let (projected, accepted) = classify_pattern(&bits);
        branches.push(SwapBranch {
            result: SwapResult {
                outcomes: bits.iter().map(|&b| Sign::from_bit(b as usize)).collect(),
                projected_bell: projected,
                correction: projected.map_or(PauliFrame::Identity, BellKind::correction),
                accepted,
                branch_probability: prob,
            },
            post_state: post,
        });
    }
    Ok(branches)
}

/// Version-1 logical Bell measurement on an eight-qubit register.
pub fn logical_bsm_v1(
    state: &QuantumState,
    map: &BsmQubitMap,
    noise: &NoiseModel,
) -> Result<Vec<SwapBranch>> {
    if state.num_qubits() != 8 {
        return Err(validation("logical Bell measurement expects an 8-qubit register"));
    }
    map.validate(state.num_qubits())?;
    let circuit = [
        GateSpec::cnot(map.left_ancilla, map.right_data),
        GateSpec::cnot(map.left_data, map.right_ancilla),
    ];
    enumerate_branches(
        state,
        &circuit,
        &map.wires(),
        &[map.left_data, map.left_ancilla],
        noise,
        |bits| {
            let kind = classify(&LOGICAL_BSM_V1_TABLE, [bits[0], bits[1], bits[2], bits[3]]);
            (kind, kind.is_some())
        },
    )
}

/// Version-2 logical Bell measurement on an eight-qubit register.
pub fn logical_bsm_v2(
    state: &QuantumState,
    map: &BsmQubitMap,
    noise: &NoiseModel,
) -> Result<Vec<SwapBranch>> {
    if state.num_qubits() != 8 {
        return Err(validation("logical Bell measurement expects an 8-qubit register"));
    }
    map.validate(state.num_qubits())?;
    let circuit = [GateSpec::cnot(map.left_ancilla, map.right_ancilla)];
    enumerate_branches(
        state,
        &circuit,
        &map.wires(),
        &[map.left_data, map.right_data, map.left_ancilla],
        noise,
        |bits| {
            let kind = classify(&LOGICAL_BSM_V2_TABLE, [bits[0], bits[1], bits[2], bits[3]]);
            debug_assert!(kind.is_some(), "version-2 table covers all patterns");
            (kind, true)
        },
    )
}

/// Deterministic physical Bell measurement on two co-located qubits of a
/// four-qubit register: noisy CNOT(a→b), noisy H(a), then Z measurements on
/// both. Outcomes (a, b) map to (+,+) φ+, (-,+) φ-, (+,-) ψ+, (-,-) ψ-.
pub fn physical_bsm(
    state: &QuantumState,
    co_located: (usize, usize),
    noise: &NoiseModel,
) -> Result<Vec<SwapBranch>> {
    if state.num_qubits() != 4 {
        return Err(validation("physical Bell measurement expects a 4-qubit register"));
    }
    let (a, b) = co_located;
    if a == b || a >= 4 || b >= 4 {
        return Err(validation("co-located qubits must be two distinct register indices"));
    }
    let circuit = [GateSpec::cnot(a, b), GateSpec::h(a)];
    enumerate_branches(state, &circuit, &[a, b], &[], noise, |bits| {
        let kind = match (bits[0], bits[1]) {
            (0, 0) => BellKind::PhiPlus,
            (1, 0) => BellKind::PhiMinus,
            (0, 1) => BellKind::PsiPlus,
            _ => BellKind::PsiMinus,
        };
        (Some(kind), true)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::bell_populations;
    use crate::protocol::{elementary_link, logical::dfs_encode_pair};
    use crate::state::MAX_QUBITS;
    use approx::assert_abs_diff_eq;

    /// Two perfect logical Bell pairs arranged [left pair | right pair], each
    /// as (far data, far ancilla, near data, near ancilla).
    fn two_logical_pairs() -> QuantumState {
        let link = elementary_link(1.0).unwrap();
        let enc = dfs_encode_pair(&link, &NoiseModel::ideal()).unwrap();
        enc.tensor(&enc).unwrap()
    }

    fn node_map() -> BsmQubitMap {
        // Shared node holds qubits 2,3 (left pair near half) and 4,5 (right
        // pair near half).
        BsmQubitMap { left_data: 2, right_data: 4, left_ancilla: 3, right_ancilla: 5 }
    }

    #[test]
    fn v1_ideal_input_has_no_unlisted_outcomes() {
        let state = two_logical_pairs();
        let branches = logical_bsm_v1(&state, &node_map(), &NoiseModel::ideal()).unwrap();
        assert_eq!(branches.len(), 16);
        let rejected: f64 = branches
            .iter()
            .filter(|b| !b.result.accepted)
            .map(|b| b.result.branch_probability)
            .sum();
        assert_abs_diff_eq!(rejected, 0.0, epsilon = 1e-12);
        let total: f64 = branches.iter().map(|b| b.result.branch_probability).sum();
        assert_abs_diff_eq!(total, 1.0, epsilon = 1e-10);
        for b in branches.iter().filter(|b| b.result.accepted) {
            assert_abs_diff_eq!(b.result.branch_probability, 0.125, epsilon = 1e-10);
        }
    }

    #[test]
    fn v1_first_table_row_projects_phi_plus() {
        let state = two_logical_pairs();
        let branches = logical_bsm_v1(&state, &node_map(), &NoiseModel::ideal()).unwrap();
        // Pattern (+,-,+,-) = bits 0101.
        let branch = branches
            .iter()
            .find(|b| b.result.outcomes.iter().map(|s| s.bit()).collect::<Vec<_>>() == vec![0, 1, 0, 1])
            .unwrap();
        assert_eq!(branch.result.projected_bell, Some(BellKind::PhiPlus));
        let post = branch.post_state.as_ref().unwrap();
        let f = post.fidelity(&BellKind::PhiPlus.logical_state_vector()).unwrap();
        assert_abs_diff_eq!(f, 1.0, epsilon = 1e-10);
    }

    #[test]
    fn v1_noisy_input_accepts_less_than_everything() {
        let state = two_logical_pairs();
        let noise = NoiseModel::baseline();
        let branches = logical_bsm_v1(&state, &node_map(), &noise).unwrap();
        let accepted: f64 = branches
            .iter()
            .filter(|b| b.result.accepted)
            .map(|b| b.result.branch_probability)
            .sum();
        assert!(accepted < 1.0, "gate noise must leak probability into discards");
        assert!(accepted > 0.95);
    }

    #[test]
    fn v2_all_patterns_accepted() {
        let state = two_logical_pairs();
        let branches = logical_bsm_v2(&state, &node_map(), &NoiseModel::baseline()).unwrap();
        assert!(branches.iter().all(|b| b.result.accepted));
        let total: f64 = branches.iter().map(|b| b.result.branch_probability).sum();
        assert_abs_diff_eq!(total, 1.0, epsilon = 1e-10);
    }

    #[test]
    fn v2_reference_rows() {
        let state = two_logical_pairs();
        let branches = logical_bsm_v2(&state, &node_map(), &NoiseModel::ideal()).unwrap();
        let by_bits = |bits: [usize; 4]| {
            branches
                .iter()
                .find(|b| b.result.outcomes.iter().map(|s| s.bit()).collect::<Vec<_>>() == bits.to_vec())
                .unwrap()
        };
        assert_eq!(by_bits([0, 0, 0, 0]).result.projected_bell, Some(BellKind::PhiPlus));
        assert_eq!(by_bits([0, 0, 0, 1]).result.projected_bell, Some(BellKind::PsiPlus));
    }

    #[test]
    fn physical_swap_of_perfect_pairs_recovers_phi_plus() {
        let bell = elementary_link(1.0).unwrap();
        let state = bell.tensor(&bell).unwrap();
        let branches = physical_bsm(&state, (1, 2), &NoiseModel::ideal()).unwrap();
        for branch in &branches {
            assert_abs_diff_eq!(branch.result.branch_probability, 0.25, epsilon = 1e-10);
            let post = branch.post_state.as_ref().unwrap();
            // The surviving pair lands in the same Bell state as projected.
            let expected = branch.result.projected_bell.unwrap().state_vector();
            assert_abs_diff_eq!(post.fidelity(&expected).unwrap(), 1.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn physical_swap_werner_composition() {
        let f = 0.9;
        let link = elementary_link(f).unwrap();
        let state = link.tensor(&link).unwrap();
        let branches = physical_bsm(&state, (1, 2), &NoiseModel::ideal()).unwrap();
        // Mix corrected branches and compare the φ+ population against the
        // closed-form Bell-diagonal swap map F² + (1-F)²/3.
        let mut pop = 0.0;
        for branch in &branches {
            let post = branch.post_state.as_ref().unwrap();
            let corrected =
                super::super::chain::apply_physical_correction(post, 1, branch.result.correction).unwrap();
            pop += branch.result.branch_probability * bell_populations(&corrected).unwrap()[0];
        }
        let expected = f * f + (1.0 - f) * (1.0 - f) / 3.0;
        assert_abs_diff_eq!(pop, expected, epsilon = 1e-10);
    }

    #[test]
    fn physical_swap_fidelity_monotone_in_gate_noise() {
        let link = elementary_link(0.97).unwrap();
        let state = link.tensor(&link).unwrap();
        let mut last = 1.0;
        for p_g2 in [1.0, 0.995, 0.99] {
            let noise = NoiseModel { p_g1: 1.0, p_g2, tau: 0.01, ideal: p_g2 == 1.0 };
            let branches = physical_bsm(&state, (1, 2), &noise).unwrap();
            let mut pop = 0.0;
            for branch in &branches {
                let post = branch.post_state.as_ref().unwrap();
                let corrected =
                    super::super::chain::apply_physical_correction(post, 1, branch.result.correction)
                        .unwrap();
                pop += branch.result.branch_probability * bell_populations(&corrected).unwrap()[0];
            }
            assert!(pop <= last + 1e-12, "fidelity must not increase with more noise");
            last = pop;
        }
    }

    #[test]
    fn bsm_rejects_wrong_register_size() {
        let bell = elementary_link(1.0).unwrap();
        assert!(physical_bsm(&bell, (0, 1), &NoiseModel::ideal()).is_err());
        let four = bell.tensor(&bell).unwrap();
        assert!(logical_bsm_v1(&four, &node_map(), &NoiseModel::ideal()).is_err());
        assert!(four.num_qubits() <= MAX_QUBITS);
    }
}

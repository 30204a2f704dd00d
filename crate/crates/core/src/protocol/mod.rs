//! The repeater protocol layer.
//!
//! Elementary links are heralded ion-ion Bell pairs in isotropic (Werner)
//! form. Chains are composed pairwise: the current long-range pair is joined
//! with the next elementary link by a Bell measurement on the co-located
//! qubits, optionally at the logical level with both qubits of a pair encoded
//! in the two-ion decoherence-free subspace |0_L⟩ = |01⟩, |1_L⟩ = |10⟩.
//!
//! Submodules:
//! - [`bsm`]: physical and logical Bell measurements with their outcome
//!   tables and Pauli-frame corrections,
//! - [`chain`]: end-to-end chain composition,
//! - [`logical`]: DFS encoding/decoding, logical Clifford generators, logical
//!   computational-basis measurement and one recurrence-purification round.

pub mod bsm;
pub mod chain;
pub mod logical;

use alloc::vec::Vec;
use num_complex::Complex64;

use crate::error::{validation, Result};
use crate::state::{QuantumState, FRAC_1_SQRT_2};

pub use bsm::{
    logical_bsm_v1, logical_bsm_v2, physical_bsm, BsmQubitMap, PauliFrame, SwapBranch, SwapResult,
    LOGICAL_BSM_V1_TABLE, LOGICAL_BSM_V2_TABLE,
};
pub use chain::{
    apply_logical_correction, apply_physical_correction, resolve_storage_time, simulate_chain,
    simulate_chain_with_order, ChainConfig, ChainResult, ComposeOrder, Encoding, StoragePolicy,
    SwapVersion,
};
pub use logical::{
    dfs_decode, dfs_encode, logical_clifford, logical_measure_z, purification_round, remap_circuit,
    LogicalBranch, LogicalGate, PurificationLevel,
};

/// The four Bell states. The enum order (φ+, φ-, ψ+, ψ-) is the population
/// order used everywhere.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum BellKind {
    PhiPlus,
    PhiMinus,
    PsiPlus,
    PsiMinus,
}

impl BellKind {
    pub const ALL: [BellKind; 4] = [BellKind::PhiPlus, BellKind::PhiMinus, BellKind::PsiPlus, BellKind::PsiMinus];

    /// Amplitudes on a two-qubit register.
    pub fn state_vector(self) -> [Complex64; 4] {
        let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
        let z = Complex64::new(0.0, 0.0);
        match self {
            BellKind::PhiPlus => [h, z, z, h],
            BellKind::PhiMinus => [h, z, z, -h],
            BellKind::PsiPlus => [z, h, h, z],
            BellKind::PsiMinus => [z, h, -h, z],
        }
    }

    /// Amplitudes of the DFS-encoded Bell state on four physical qubits
    /// ordered (data₁, ancilla₁, data₂, ancilla₂).
    pub fn logical_state_vector(self) -> [Complex64; 16] {
        let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
        let z = Complex64::new(0.0, 0.0);
        let mut v = [z; 16];
        // Physical images of |0_L⟩⊗|0_L⟩ .. |1_L⟩⊗|1_L⟩: 0101, 0110, 1001, 1010.
        let (a, b, sign) = match self {
            BellKind::PhiPlus => (0b0101, 0b1010, 1.0),
            BellKind::PhiMinus => (0b0101, 0b1010, -1.0),
            BellKind::PsiPlus => (0b0110, 0b1001, 1.0),
            BellKind::PsiMinus => (0b0110, 0b1001, -1.0),
        };
        v[a] = h;
        v[b] = sign * h;
        v
    }
}

/// The Werner (isotropic) two-qubit link state
/// F·|φ+⟩⟨φ+| + (1-F)/3·(|φ-⟩⟨φ-| + |ψ+⟩⟨ψ+| + |ψ-⟩⟨ψ-|).
pub fn elementary_link(fidelity: f64) -> Result<QuantumState> {
    if !(0.25..=1.0).contains(&fidelity) {
        return Err(validation("link fidelity must lie in [1/4, 1]"));
    }
    let rest = (1.0 - fidelity) / 3.0;
    Ok(crate::channels::bell_diagonal_state(&[fidelity, rest, rest, rest]))
}

/// Maximal CHSH value of a Werner state of fidelity F: S = 2√2·(4F-1)/3.
///
/// S crosses the classical bound 2 at F ≈ 0.7803, the fidelity floor for a
/// Bell-inequality violation.
pub fn chsh_value(fidelity: f64) -> Result<f64> {
    if !(0.25..=1.0).contains(&fidelity) {
        return Err(validation("fidelity must lie in [1/4, 1]"));
    }
    Ok(2.0 * libm::sqrt(2.0) * (4.0 * fidelity - 1.0) / 3.0)
}

/// DFS-encoded Bell pair as a pure reference, used by tests and the chain
/// pipeline for ideal-case checks.
pub fn logical_bell_reference(kind: BellKind) -> Vec<Complex64> {
    kind.logical_state_vector().to_vec()
}

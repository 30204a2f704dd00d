//! Noise channels and twirling maps.
//!
//! Gate noise follows the standard model of local depolarizing noise (LDN)
//! applied to every qubit a gate touches, followed by the ideal unitary.
//! Collective dephasing — the dominant memory error in an ion trap, where all
//! co-trapped ions pick up the same random Z rotation — is evaluated in
//! closed form: averaging `exp(-iθ ΣZ)` conjugation over a Gaussian θ of
//! width σ multiplies the matrix element between basis strings `a` and `b`
//! by `exp(-σ²(m_a - m_b)²/2)`, with `m_s` the sum of Z eigenvalues of the
//! string within a trap group. The numerical-quadrature route survives only
//! as a test oracle.

use alloc::format;
use alloc::vec::Vec;
use num_complex::Complex64;

use crate::error::{validation, Result, SimError};
use crate::protocol::BellKind;
use crate::state::{GateSpec, QuantumState};

/// Gate-noise and memory parameters.
///
/// `p_g1`/`p_g2` are the single-/two-qubit LDN retention parameters (noise
/// level is `1 - p_g`), `tau` the coherence time in seconds, and `ideal`
/// short-circuits all noise.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct NoiseModel {
    pub p_g1: f64,
    pub p_g2: f64,
    pub tau: f64,
    pub ideal: bool,
}

impl NoiseModel {
    /// State-of-the-art trap parameters: 0.1% single-qubit noise, 0.5%
    /// two-qubit noise, 10 ms coherence time.
    pub fn baseline() -> Self {
        NoiseModel { p_g1: 0.999, p_g2: 0.995, tau: 0.010, ideal: false }
    }

    /// Projected parameters: 0.01% / 0.1% gate noise.
    pub fn improved() -> Self {
        NoiseModel { p_g1: 0.9999, p_g2: 0.999, tau: 0.010, ideal: false }
    }

    /// All noise off.
    pub fn ideal() -> Self {
        NoiseModel { p_g1: 1.0, p_g2: 1.0, tau: 0.010, ideal: true }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.p_g1) || !(0.0..=1.0).contains(&self.p_g2) {
            return Err(validation("gate-noise parameters must lie in [0, 1]"));
        }
        if !(self.tau > 0.0) {
            return Err(validation("coherence time must be positive"));
        }
        Ok(())
    }
}

/// Trap layout and dephasing strength σ = T/τ for one application of
/// collective dephasing. Groups are disjoint sets of co-trapped qubits.
#[derive(Debug, Clone)]
pub struct DephasingContext {
    trap_groups: Vec<Vec<usize>>,
    sigma: f64,
}

impl DephasingContext {
    pub fn new(trap_groups: Vec<Vec<usize>>, sigma: f64) -> Result<Self> {
        if !(sigma >= 0.0) || !sigma.is_finite() {
            return Err(validation("sigma must be finite and non-negative"));
        }
        let mut seen = 0usize;
        for group in &trap_groups {
            for &q in group {
                if q >= 64 {
                    return Err(validation("qubit index out of range"));
                }
                if seen & (1 << q) != 0 {
                    return Err(validation(format!("trap groups overlap on qubit {q}")));
                }
                seen |= 1 << q;
            }
        }
        Ok(DephasingContext { trap_groups, sigma })
    }

    pub fn trap_groups(&self) -> &[Vec<usize>] {
        &self.trap_groups
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }
}

/// Local depolarizing noise on one qubit:
/// ρ → p_g·ρ + (1-p_g)/4·(ρ + XρX + YρY + ZρZ).
pub fn local_depolarizing(state: &QuantumState, qubit: usize, p_g: f64) -> Result<QuantumState> {
    if !(0.0..=1.0).contains(&p_g) {
        return Err(validation("depolarizing parameter must lie in [0, 1]"));
    }
    if qubit >= state.num_qubits() {
        return Err(validation(format!("qubit {qubit} out of range")));
    }
    if p_g == 1.0 {
        return Ok(state.clone());
    }
    let mut x = state.clone();
    x.conjugate_x(qubit);
    let mut y = state.clone();
    y.conjugate_y(qubit);
    let mut z = state.clone();
    z.conjugate_z(qubit);

    let dim = state.dim();
    let keep = p_g + (1.0 - p_g) / 4.0;
    let mix = (1.0 - p_g) / 4.0;
    let mut mat = Vec::with_capacity(dim * dim);
    for idx in 0..dim * dim {
        mat.push(
            keep * state.matrix()[idx] + mix * (x.matrix()[idx] + y.matrix()[idx] + z.matrix()[idx]),
        );
    }
    Ok(QuantumState::from_parts(state.num_qubits(), mat))
}

/// A noisy gate: LDN with the arity-matched parameter on every involved
/// qubit, then the ideal unitary.
pub fn noisy_gate(state: &QuantumState, gate: &GateSpec, noise: &NoiseModel) -> Result<QuantumState> {
    noise.validate()?;
    if noise.ideal {
        return state.apply_unitary(gate);
    }
    let p_g = match gate.kind.arity() {
        1 => noise.p_g1,
        _ => noise.p_g2,
    };
    let mut current = state.clone();
    for &q in &gate.targets {
        current = local_depolarizing(&current, q, p_g)?;
    }
    current.apply_unitary(gate)
}

/// Applies a circuit with per-gate noise.
pub fn noisy_circuit(state: &QuantumState, gates: &[GateSpec], noise: &NoiseModel) -> Result<QuantumState> {
    let mut current = state.clone();
    for gate in gates {
        current = noisy_gate(&current, gate, noise)?;
    }
    Ok(current)
}

/// Readout noise on each listed qubit: LDN with parameter p_g1², i.e. two
/// single-qubit-noise applications per measured ion (the basis-mapping pulse
/// and the detection itself). Identity under an ideal noise model.
pub fn readout_noise(state: &QuantumState, qubits: &[usize], noise: &NoiseModel) -> Result<QuantumState> {
    noise.validate()?;
    if noise.ideal {
        return Ok(state.clone());
    }
    let p = noise.p_g1 * noise.p_g1;
    let mut current = state.clone();
    for &q in qubits {
        current = local_depolarizing(&current, q, p)?;
    }
    Ok(current)
}

/// Collective dephasing, applied independently per trap group.
///
/// Matrix element (a, b) is damped by `exp(-σ²/2 · Σ_g (m_a^g - m_b^g)²)`
/// where `m_s^g` is the group's Z-eigenvalue sum for basis string `s`.
pub fn collective_dephasing(state: &QuantumState, ctx: &DephasingContext) -> Result<QuantumState> {
    for group in ctx.trap_groups() {
        for &q in group {
            if q >= state.num_qubits() {
                return Err(validation(format!("trap group qubit {q} out of range")));
            }
        }
    }
    if ctx.sigma() == 0.0 || ctx.trap_groups().iter().all(|g| g.is_empty()) {
        return Ok(state.clone());
    }
    let dim = state.dim();
    // Per-group Z-eigenvalue sums for every basis index.
    let m_tables: Vec<Vec<i32>> = ctx
        .trap_groups()
        .iter()
        .map(|group| {
            (0..dim)
                .map(|idx| {
                    group
                        .iter()
                        .map(|&q| if idx & state.mask(q) == 0 { 1i32 } else { -1i32 })
                        .sum()
                })
                .collect()
        })
        .collect();
    let half_sigma_sq = 0.5 * ctx.sigma() * ctx.sigma();
    let mut mat = Vec::with_capacity(dim * dim);
    for i in 0..dim {
        for j in 0..dim {
            let mut exponent = 0.0f64;
            for table in &m_tables {
                let dm = (table[i] - table[j]) as f64;
                exponent += dm * dm;
            }
            let factor = libm::exp(-half_sigma_sq * exponent);
            mat.push(factor * state.matrix()[i * dim + j]);
        }
    }
    Ok(QuantumState::from_parts(state.num_qubits(), mat))
}

/// Bell-basis populations (φ+, φ-, ψ+, ψ-) of a two-qubit state.
pub fn bell_populations(state: &QuantumState) -> Result<[f64; 4]> {
    if state.num_qubits() != 2 {
        return Err(SimError::DimensionMismatch { expected: 4, actual: state.dim() });
    }
    let mut pops = [0.0f64; 4];
    for (k, kind) in BellKind::ALL.iter().enumerate() {
        pops[k] = state.fidelity(&kind.state_vector())?;
    }
    Ok(pops)
}

/// Projects a two-qubit state onto its Bell-diagonal part: the four Bell
/// populations are kept, every off-diagonal element in the Bell basis is
/// dropped. This is the deterministic average of random bilateral Pauli
/// twirling.
pub fn bell_twirl(state: &QuantumState) -> Result<QuantumState> {
    let pops = bell_populations(state)?;
    Ok(bell_diagonal_state(&pops))
}

/// Builds the Bell-diagonal state with the given populations (needs not be
/// normalized beyond roundoff; trace is preserved as-is).
pub fn bell_diagonal_state(populations: &[f64; 4]) -> QuantumState {
    let mut mat = alloc::vec![Complex64::new(0.0, 0.0); 16];
    for (k, kind) in BellKind::ALL.iter().enumerate() {
        let v = kind.state_vector();
        for i in 0..4 {
            for j in 0..4 {
                mat[i * 4 + j] += populations[k] * v[i] * v[j].conj();
            }
        }
    }
    QuantumState::from_parts(2, mat)
}

/// Bell-twirls and equalizes the three non-φ+ populations, producing the
/// standard isotropic (Werner) form with F = ⟨φ+|ρ|φ+⟩ unchanged.
pub fn werner_enforce(state: &QuantumState) -> Result<QuantumState> {
    let pops = bell_populations(state)?;
    let rest = (pops[1] + pops[2] + pops[3]) / 3.0;
    Ok(bell_diagonal_state(&[pops[0], rest, rest, rest]))
}

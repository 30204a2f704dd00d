//! Seeded generation of random states, used by the oracle suites and tests.

use alloc::vec::Vec;
use num_complex::Complex64;
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::state::QuantumState;

/// Deterministic stream cipher RNG from a 64-bit seed.
pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform f64 in [0, 1) from the top 53 bits of a u64 draw.
pub fn uniform(rng: &mut impl RngCore) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / 9007199254740992.0)
}

fn standard_normal(rng: &mut impl RngCore) -> f64 {
    // Box-Muller; the log argument is kept away from zero.
    let u1 = uniform(rng).max(1e-18);
    let u2 = uniform(rng);
    libm::sqrt(-2.0 * libm::log(u1)) * libm::cos(2.0 * core::f64::consts::PI * u2)
}

/// Haar-ish random pure state: normalized complex Gaussian amplitudes.
pub fn random_pure_state(num_qubits: usize, rng: &mut impl RngCore) -> Vec<Complex64> {
    let dim = 1usize << num_qubits;
    let mut amps: Vec<Complex64> = (0..dim)
        .map(|_| Complex64::new(standard_normal(rng), standard_normal(rng)))
        .collect();
    let norm: f64 = libm::sqrt(amps.iter().map(|a| a.norm_sqr()).sum());
    for a in &mut amps {
        *a /= norm;
    }
    amps
}

/// Random full-support density matrix: a weighted mixture of a few random
/// pure states.
pub fn random_density_matrix(num_qubits: usize, rng: &mut impl RngCore) -> QuantumState {
    let components = 3;
    let mut weights: Vec<f64> = (0..components).map(|_| uniform(rng) + 0.05).collect();
    let total: f64 = weights.iter().sum();
    for w in &mut weights {
        *w /= total;
    }
    let dim = 1usize << num_qubits;
    let mut mat = alloc::vec![Complex64::new(0.0, 0.0); dim * dim];
    for &w in &weights {
        let amps = random_pure_state(num_qubits, rng);
        for i in 0..dim {
            for j in 0..dim {
                mat[i * dim + j] += w * amps[i] * amps[j].conj();
            }
        }
    }
    QuantumState::from_matrix(num_qubits, mat).expect("mixture of pure states is a valid state")
}

//! Dense density-matrix engine for registers of up to eight qubits.
//!
//! States are immutable values: every operation returns a new
//! [`QuantumState`]. The register convention is fixed globally — qubit 0 is
//! the most significant bit of the computational-basis index, so for a
//! two-qubit register the basis order is |00⟩, |01⟩, |10⟩, |11⟩ with qubit 0
//! written first.
//!
//! Measurement is branch-enumerating by design: [`QuantumState::measure`]
//! returns both outcomes with their probabilities and conditional states, and
//! the protocol layer mixes branches exactly instead of sampling. A thin
//! sampling wrapper is provided for callers that do want a random draw.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;

use crate::error::{validation, Result, SimError};
use crate::linalg;

/// Hard cap on register size; chains are composed pairwise so nothing larger
/// is ever needed.
pub const MAX_QUBITS: usize = 8;

const HERMITICITY_TOL: f64 = 1e-10;
const TRACE_TOL: f64 = 1e-10;
const EIGENVALUE_FLOOR: f64 = -1e-9;
const BRANCH_PROB_FLOOR: f64 = 1e-12;

/// Named single- and two-qubit gates. `S = diag(1, i)` and
/// `CZ = diag(1, 1, 1, -1)` in the computational basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GateKind {
    X,
    Y,
    Z,
    H,
    S,
    Cnot,
    Cz,
}

impl GateKind {
    /// Number of qubits the gate acts on.
    pub fn arity(self) -> usize {
        match self {
            GateKind::Cnot | GateKind::Cz => 2,
            _ => 1,
        }
    }
}

/// A gate applied to specific register positions (control first for
/// two-qubit gates).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GateSpec {
    pub kind: GateKind,
    pub targets: Vec<usize>,
}

impl GateSpec {
    pub fn new(kind: GateKind, targets: Vec<usize>) -> Result<Self> {
        if targets.len() != kind.arity() {
            return Err(validation(format!(
                "{:?} takes {} target(s), got {}",
                kind,
                kind.arity(),
                targets.len()
            )));
        }
        if kind.arity() == 2 && targets[0] == targets[1] {
            return Err(validation("two-qubit gate targets must be distinct"));
        }
        Ok(GateSpec { kind, targets })
    }

    pub fn x(q: usize) -> Self {
        GateSpec { kind: GateKind::X, targets: vec![q] }
    }
    pub fn y(q: usize) -> Self {
        GateSpec { kind: GateKind::Y, targets: vec![q] }
    }
    pub fn z(q: usize) -> Self {
        GateSpec { kind: GateKind::Z, targets: vec![q] }
    }
    pub fn h(q: usize) -> Self {
        GateSpec { kind: GateKind::H, targets: vec![q] }
    }
    pub fn s(q: usize) -> Self {
        GateSpec { kind: GateKind::S, targets: vec![q] }
    }
    pub fn cnot(control: usize, target: usize) -> Self {
        GateSpec { kind: GateKind::Cnot, targets: vec![control, target] }
    }
    pub fn cz(a: usize, b: usize) -> Self {
        GateSpec { kind: GateKind::Cz, targets: vec![a, b] }
    }
}

/// Measurement basis for single-qubit projective measurements.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeasurementBasis {
    Z,
    X,
}

/// A ±1 measurement outcome. `Plus` is the +1 eigenvalue (|0⟩ for Z, |+⟩ for
/// X).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> i8 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    /// Bit encoding used for outcome patterns: `Plus` ↔ 0, `Minus` ↔ 1.
    pub fn bit(self) -> usize {
        match self {
            Sign::Plus => 0,
            Sign::Minus => 1,
        }
    }

    pub fn from_bit(bit: usize) -> Self {
        if bit & 1 == 0 {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }
}

/// One branch of a projective measurement. `post_state` is `None` when the
/// branch probability is below 1e-12 and no conditional state exists.
#[derive(Debug, Clone)]
pub struct MeasurementBranch {
    pub outcome: Sign,
    pub probability: f64,
    pub post_state: Option<QuantumState>,
}

/// A density matrix over an ordered register of 1..=8 qubits.
///
/// Invariants (enforced at construction, preserved by every operation):
/// Hermitian and unit-trace to 1e-10, positive semidefinite up to -1e-9 of
/// roundoff (tiny negative eigenvalues are clamped by [`QuantumState::from_matrix`],
/// never silently mid-pipeline).
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumState {
    num_qubits: usize,
    dim: usize,
    mat: Vec<Complex64>,
}

impl QuantumState {
    /// Rank-1 density matrix of a normalized amplitude vector.
    pub fn from_pure(amplitudes: &[Complex64]) -> Result<Self> {
        let dim = amplitudes.len();
        let num_qubits = qubits_for_dim(dim)?;
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(validation(format!("amplitude vector has squared norm {norm}, expected 1")));
        }
        let mut mat = vec![Complex64::new(0.0, 0.0); dim * dim];
        for i in 0..dim {
            for j in 0..dim {
                mat[i * dim + j] = amplitudes[i] * amplitudes[j].conj();
            }
        }
        Ok(QuantumState { num_qubits, dim, mat })
    }

    /// Validating constructor for an explicit matrix.
    ///
    /// Checks Hermiticity and trace to 1e-10 and positive semidefiniteness;
    /// eigenvalues in `[-1e-9, 0)` are clamped to zero (with renormalization),
    /// anything more negative is rejected as a bug in the caller.
    pub fn from_matrix(num_qubits: usize, mat: Vec<Complex64>) -> Result<Self> {
        if num_qubits == 0 || num_qubits > MAX_QUBITS {
            return Err(SimError::Capacity { requested: num_qubits, max: MAX_QUBITS });
        }
        let dim = 1usize << num_qubits;
        if mat.len() != dim * dim {
            return Err(SimError::DimensionMismatch { expected: dim * dim, actual: mat.len() });
        }
        let mut herm = 0.0f64;
        for i in 0..dim {
            for j in 0..dim {
                let d = (mat[i * dim + j] - mat[j * dim + i].conj()).norm();
                if d > herm {
                    herm = d;
                }
            }
        }
        if herm > HERMITICITY_TOL {
            return Err(validation(format!("matrix is not Hermitian (residual {herm:.3e})")));
        }
        let trace: f64 = (0..dim).map(|i| mat[i * dim + i].re).sum();
        if (trace - 1.0).abs() > TRACE_TOL {
            return Err(validation(format!("matrix trace is {trace}, expected 1")));
        }
        let eigen = linalg::hermitian_eigen(dim, &mat);
        let min = eigen.values.iter().cloned().fold(f64::INFINITY, f64::min);
        if min < EIGENVALUE_FLOOR {
            return Err(validation(format!("matrix is not positive semidefinite (min eigenvalue {min:.3e})")));
        }
        if min < 0.0 {
            let clamped: Vec<f64> = eigen.values.iter().map(|&v| v.max(0.0)).collect();
            let total: f64 = clamped.iter().sum();
            let renorm: Vec<f64> = clamped.iter().map(|v| v / total).collect();
            let mat = linalg::reconstruct(dim, &eigen, &renorm);
            return Ok(QuantumState { num_qubits, dim, mat });
        }
        Ok(QuantumState { num_qubits, dim, mat })
    }

    /// |index⟩⟨index| on an `num_qubits` register.
    pub fn basis_state(num_qubits: usize, index: usize) -> Result<Self> {
        if num_qubits == 0 || num_qubits > MAX_QUBITS {
            return Err(SimError::Capacity { requested: num_qubits, max: MAX_QUBITS });
        }
        let dim = 1usize << num_qubits;
        if index >= dim {
            return Err(validation(format!("basis index {index} out of range for {num_qubits} qubits")));
        }
        let mut mat = vec![Complex64::new(0.0, 0.0); dim * dim];
        mat[index * dim + index] = Complex64::new(1.0, 0.0);
        Ok(QuantumState { num_qubits, dim, mat })
    }

    /// Internal constructor for matrices that are valid by construction.
    pub(crate) fn from_parts(num_qubits: usize, mat: Vec<Complex64>) -> Self {
        debug_assert_eq!(mat.len(), (1usize << num_qubits) * (1usize << num_qubits));
        let state = QuantumState { num_qubits, dim: 1 << num_qubits, mat };
        debug_assert!(state.hermiticity_residual() < 1e-8, "non-Hermitian intermediate");
        debug_assert!((state.trace() - 1.0).abs() < 1e-8, "trace drift");
        state
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Row-major matrix data.
    pub fn matrix(&self) -> &[Complex64] {
        &self.mat
    }

    pub fn element(&self, row: usize, col: usize) -> Complex64 {
        self.mat[row * self.dim + col]
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.mat[i * self.dim + i].re).sum()
    }

    /// Max elementwise deviation from Hermiticity.
    pub fn hermiticity_residual(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.dim {
            for j in 0..self.dim {
                let d = (self.mat[i * self.dim + j] - self.mat[j * self.dim + i].conj()).norm();
                if d > worst {
                    worst = d;
                }
            }
        }
        worst
    }

    /// Bit mask selecting `qubit` inside a basis index.
    #[inline]
    pub(crate) fn mask(&self, qubit: usize) -> usize {
        1 << (self.num_qubits - 1 - qubit)
    }

    fn check_qubit(&self, qubit: usize) -> Result<()> {
        if qubit >= self.num_qubits {
            return Err(validation(format!(
                "qubit {qubit} out of range for a {}-qubit register",
                self.num_qubits
            )));
        }
        Ok(())
    }

    /// Kronecker product; `self`'s qubits occupy the lower (most significant)
    /// indices of the combined register.
    pub fn tensor(&self, other: &QuantumState) -> Result<QuantumState> {
        let total = self.num_qubits + other.num_qubits;
        if total > MAX_QUBITS {
            return Err(SimError::Capacity { requested: total, max: MAX_QUBITS });
        }
        let dim = self.dim * other.dim;
        let mut mat = vec![Complex64::new(0.0, 0.0); dim * dim];
        for ia in 0..self.dim {
            for ja in 0..self.dim {
                let a = self.mat[ia * self.dim + ja];
                if a.norm_sqr() == 0.0 {
                    continue;
                }
                for ib in 0..other.dim {
                    let row = ia * other.dim + ib;
                    for jb in 0..other.dim {
                        let col = ja * other.dim + jb;
                        mat[row * dim + col] = a * other.mat[ib * other.dim + jb];
                    }
                }
            }
        }
        Ok(QuantumState { num_qubits: total, dim, mat })
    }

    /// ρ → UρU† with the named gate embedded on its targets.
    pub fn apply_unitary(&self, gate: &GateSpec) -> Result<QuantumState> {
        for &t in &gate.targets {
            self.check_qubit(t)?;
        }
        if gate.kind.arity() == 2 && gate.targets[0] == gate.targets[1] {
            return Err(validation("two-qubit gate targets must be distinct"));
        }
        let mut out = self.clone();
        match gate.kind {
            GateKind::X => out.conjugate_x(gate.targets[0]),
            GateKind::Y => out.conjugate_y(gate.targets[0]),
            GateKind::Z => out.conjugate_z(gate.targets[0]),
            GateKind::H => {
                let h = FRAC_1_SQRT_2;
                let u = [
                    [Complex64::new(h, 0.0), Complex64::new(h, 0.0)],
                    [Complex64::new(h, 0.0), Complex64::new(-h, 0.0)],
                ];
                out.conjugate_one_qubit(gate.targets[0], &u);
            }
            GateKind::S => {
                let u = [
                    [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
                    [Complex64::new(0.0, 0.0), Complex64::new(0.0, 1.0)],
                ];
                out.conjugate_one_qubit(gate.targets[0], &u);
            }
            GateKind::Cnot => out.conjugate_cnot(gate.targets[0], gate.targets[1]),
            GateKind::Cz => out.conjugate_cz(gate.targets[0], gate.targets[1]),
        }
        Ok(out)
    }

    /// Applies a circuit gate by gate (all ideal).
    pub fn apply_circuit(&self, gates: &[GateSpec]) -> Result<QuantumState> {
        let mut state = self.clone();
        for gate in gates {
            state = state.apply_unitary(gate)?;
        }
        Ok(state)
    }

    pub(crate) fn conjugate_one_qubit(&mut self, qubit: usize, u: &[[Complex64; 2]; 2]) {
        let dim = self.dim;
        let mask = self.mask(qubit);
        // Left-multiply by U on the target qubit's row pairs.
        for i0 in 0..dim {
            if i0 & mask != 0 {
                continue;
            }
            let i1 = i0 | mask;
            for j in 0..dim {
                let a = self.mat[i0 * dim + j];
                let b = self.mat[i1 * dim + j];
                self.mat[i0 * dim + j] = u[0][0] * a + u[0][1] * b;
                self.mat[i1 * dim + j] = u[1][0] * a + u[1][1] * b;
            }
        }
        // Right-multiply by U†.
        for i in 0..dim {
            for j0 in 0..dim {
                if j0 & mask != 0 {
                    continue;
                }
                let j1 = j0 | mask;
                let a = self.mat[i * dim + j0];
                let b = self.mat[i * dim + j1];
                self.mat[i * dim + j0] = a * u[0][0].conj() + b * u[0][1].conj();
                self.mat[i * dim + j1] = a * u[1][0].conj() + b * u[1][1].conj();
            }
        }
    }

    pub(crate) fn conjugate_x(&mut self, qubit: usize) {
        let dim = self.dim;
        let mask = self.mask(qubit);
        let src = core::mem::take(&mut self.mat);
        let mut out = vec![Complex64::new(0.0, 0.0); dim * dim];
        for i in 0..dim {
            for j in 0..dim {
                out[i * dim + j] = src[(i ^ mask) * dim + (j ^ mask)];
            }
        }
        self.mat = out;
    }

    pub(crate) fn conjugate_y(&mut self, qubit: usize) {
        let dim = self.dim;
        let mask = self.mask(qubit);
        let src = core::mem::take(&mut self.mat);
        let mut out = vec![Complex64::new(0.0, 0.0); dim * dim];
        for i in 0..dim {
            let bi = (i & mask) != 0;
            for j in 0..dim {
                let bj = (j & mask) != 0;
                let sign = if bi == bj { 1.0 } else { -1.0 };
                out[i * dim + j] = sign * src[(i ^ mask) * dim + (j ^ mask)];
            }
        }
        self.mat = out;
    }

    pub(crate) fn conjugate_z(&mut self, qubit: usize) {
        let dim = self.dim;
        let mask = self.mask(qubit);
        for i in 0..dim {
            let bi = (i & mask) != 0;
            for j in 0..dim {
                let bj = (j & mask) != 0;
                if bi != bj {
                    self.mat[i * dim + j] = -self.mat[i * dim + j];
                }
            }
        }
    }

    fn conjugate_cnot(&mut self, control: usize, target: usize) {
        let dim = self.dim;
        let cm = self.mask(control);
        let tm = self.mask(target);
        let perm = |i: usize| if i & cm != 0 { i ^ tm } else { i };
        let src = core::mem::take(&mut self.mat);
        let mut out = vec![Complex64::new(0.0, 0.0); dim * dim];
        for i in 0..dim {
            let pi = perm(i);
            for j in 0..dim {
                out[i * dim + j] = src[pi * dim + perm(j)];
            }
        }
        self.mat = out;
    }

    fn conjugate_cz(&mut self, a: usize, b: usize) {
        let dim = self.dim;
        let am = self.mask(a);
        let bm = self.mask(b);
        let neg = |i: usize| (i & am != 0) && (i & bm != 0);
        for i in 0..dim {
            for j in 0..dim {
                if neg(i) != neg(j) {
                    self.mat[i * dim + j] = -self.mat[i * dim + j];
                }
            }
        }
    }

    /// Relabels two register positions.
    pub fn swap_qubits(&self, a: usize, b: usize) -> Result<QuantumState> {
        self.check_qubit(a)?;
        self.check_qubit(b)?;
        if a == b {
            return Ok(self.clone());
        }
        let dim = self.dim;
        let am = self.mask(a);
        let bm = self.mask(b);
        let perm = |i: usize| {
            let ba = (i & am != 0) as usize;
            let bb = (i & bm != 0) as usize;
            if ba == bb {
                i
            } else {
                i ^ am ^ bm
            }
        };
        let mut mat = vec![Complex64::new(0.0, 0.0); dim * dim];
        for i in 0..dim {
            let pi = perm(i);
            for j in 0..dim {
                mat[i * dim + j] = self.mat[pi * dim + perm(j)];
            }
        }
        Ok(QuantumState { num_qubits: self.num_qubits, dim, mat })
    }

    /// Projective single-qubit measurement, both branches.
    ///
    /// The returned branch probabilities sum to one; a branch with
    /// probability below 1e-12 carries no conditional state. The register
    /// keeps its size — the measured qubit is collapsed, not removed.
    pub fn measure(&self, qubit: usize, basis: MeasurementBasis) -> Result<[MeasurementBranch; 2]> {
        self.check_qubit(qubit)?;
        let work = match basis {
            MeasurementBasis::Z => self.clone(),
            MeasurementBasis::X => self.apply_unitary(&GateSpec::h(qubit))?,
        };
        let mask = work.mask(qubit);
        let mut probs = [0.0f64; 2];
        for i in 0..work.dim {
            probs[((i & mask) != 0) as usize] += work.mat[i * work.dim + i].re;
        }
        if probs[0] <= BRANCH_PROB_FLOOR && probs[1] <= BRANCH_PROB_FLOOR {
            return Err(SimError::DegenerateState);
        }
        let mut branches: Vec<MeasurementBranch> = Vec::with_capacity(2);
        for bit in 0..2usize {
            let prob = probs[bit];
            let post = if prob > BRANCH_PROB_FLOOR {
                let mut collapsed = work.clone();
                collapsed.project_qubit(qubit, bit, prob);
                let back = match basis {
                    MeasurementBasis::Z => collapsed,
                    MeasurementBasis::X => collapsed.apply_unitary(&GateSpec::h(qubit))?,
                };
                Some(back)
            } else {
                None
            };
            branches.push(MeasurementBranch { outcome: Sign::from_bit(bit), probability: prob, post_state: post });
        }
        let minus = branches.pop().expect("two branches");
        let plus = branches.pop().expect("two branches");
        Ok([plus, minus])
    }

    /// Sampling wrapper over [`measure`](Self::measure): selects a branch from
    /// a uniform draw `u ∈ [0, 1)`.
    pub fn sample_measurement(
        &self,
        qubit: usize,
        basis: MeasurementBasis,
        u: f64,
    ) -> Result<(Sign, f64, QuantumState)> {
        let [plus, minus] = self.measure(qubit, basis)?;
        let pick = if u < plus.probability { plus } else { minus };
        match pick.post_state {
            Some(state) => Ok((pick.outcome, pick.probability, state)),
            None => Err(SimError::DegenerateState),
        }
    }

    /// Zeroes the rows/columns where `qubit` differs from `bit` and rescales
    /// by the branch probability.
    fn project_qubit(&mut self, qubit: usize, bit: usize, prob: f64) {
        let dim = self.dim;
        let mask = self.mask(qubit);
        let inv = 1.0 / prob;
        for i in 0..dim {
            let keep_i = (((i & mask) != 0) as usize) == bit;
            for j in 0..dim {
                let keep_j = (((j & mask) != 0) as usize) == bit;
                let e = &mut self.mat[i * dim + j];
                if keep_i && keep_j {
                    *e *= inv;
                } else {
                    *e = Complex64::new(0.0, 0.0);
                }
            }
        }
    }

    /// Reduced state over `keep` (non-empty, strictly increasing indices);
    /// ordering among kept qubits is preserved.
    pub fn partial_trace(&self, keep: &[usize]) -> Result<QuantumState> {
        if keep.is_empty() {
            return Err(validation("partial_trace requires a non-empty keep list"));
        }
        for w in keep.windows(2) {
            if w[0] >= w[1] {
                return Err(validation("keep list must be sorted and distinct"));
            }
        }
        for &q in keep {
            self.check_qubit(q)?;
        }
        if keep.len() == self.num_qubits {
            return Ok(self.clone());
        }
        let traced: Vec<usize> = (0..self.num_qubits).filter(|q| !keep.contains(q)).collect();
        let (kept_expand, traced_expand) = self.expansion_tables(keep, &traced);
        let rdim = 1usize << keep.len();
        let mut mat = vec![Complex64::new(0.0, 0.0); rdim * rdim];
        for (a, &ea) in kept_expand.iter().enumerate() {
            for (b, &eb) in kept_expand.iter().enumerate() {
                let mut acc = Complex64::new(0.0, 0.0);
                for &et in &traced_expand {
                    acc += self.mat[(ea | et) * self.dim + (eb | et)];
                }
                mat[a * rdim + b] = acc;
            }
        }
        Ok(QuantumState { num_qubits: keep.len(), dim: rdim, mat })
    }

    fn expansion_tables(&self, keep: &[usize], traced: &[usize]) -> (Vec<usize>, Vec<usize>) {
        let expand = |qubits: &[usize]| -> Vec<usize> {
            let count = 1usize << qubits.len();
            let mut table = Vec::with_capacity(count);
            for pattern in 0..count {
                let mut idx = 0usize;
                for (pos, &q) in qubits.iter().enumerate() {
                    if pattern >> (qubits.len() - 1 - pos) & 1 == 1 {
                        idx |= self.mask(q);
                    }
                }
                table.push(idx);
            }
            table
        };
        (expand(keep), expand(traced))
    }

    /// Projects `measured` qubits (strictly increasing) onto the
    /// computational-basis `pattern` (bit k of `pattern`, counted from the
    /// most significant measured qubit, fixes qubit `measured[k]`) and traces
    /// them out.
    ///
    /// Returns the branch probability and, when it exceeds 1e-12, the
    /// normalized conditional state on the remaining qubits.
    pub(crate) fn project_and_remove(
        &self,
        measured: &[usize],
        pattern: usize,
    ) -> (f64, Option<QuantumState>) {
        debug_assert!(!measured.is_empty() && measured.len() < self.num_qubits);
        debug_assert!(measured.windows(2).all(|w| w[0] < w[1]));
        let kept: Vec<usize> = (0..self.num_qubits).filter(|q| !measured.contains(q)).collect();
        let (kept_expand, measured_expand) = self.expansion_tables(&kept, measured);
        let fixed = measured_expand[pattern];
        let rdim = 1usize << kept.len();
        let mut mat = vec![Complex64::new(0.0, 0.0); rdim * rdim];
        let mut prob = 0.0f64;
        for (a, &ea) in kept_expand.iter().enumerate() {
            for (b, &eb) in kept_expand.iter().enumerate() {
                let e = self.mat[(ea | fixed) * self.dim + (eb | fixed)];
                mat[a * rdim + b] = e;
                if a == b {
                    prob += e.re;
                }
            }
        }
        if prob <= BRANCH_PROB_FLOOR {
            return (prob.max(0.0), None);
        }
        let inv = 1.0 / prob;
        for e in &mut mat {
            *e *= inv;
        }
        (prob, Some(QuantumState { num_qubits: kept.len(), dim: rdim, mat }))
    }

    /// ⟨φ|ρ|φ⟩ against a pure reference given as amplitudes.
    pub fn fidelity(&self, reference: &[Complex64]) -> Result<f64> {
        if reference.len() != self.dim {
            return Err(SimError::DimensionMismatch { expected: self.dim, actual: reference.len() });
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..self.dim {
            let mut row = Complex64::new(0.0, 0.0);
            for j in 0..self.dim {
                row += self.mat[i * self.dim + j] * reference[j];
            }
            acc += reference[i].conj() * row;
        }
        debug_assert!(acc.im.abs() < 1e-9, "fidelity should be real");
        Ok(acc.re)
    }
}

pub(crate) const FRAC_1_SQRT_2: f64 = core::f64::consts::FRAC_1_SQRT_2;

fn qubits_for_dim(dim: usize) -> Result<usize> {
    if dim < 2 || !dim.is_power_of_two() {
        return Err(validation(format!("dimension {dim} is not a power of two ≥ 2")));
    }
    let n = dim.trailing_zeros() as usize;
    if n > MAX_QUBITS {
        return Err(SimError::Capacity { requested: n, max: MAX_QUBITS });
    }
    Ok(n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn bell_phi_plus() -> QuantumState {
        let h = FRAC_1_SQRT_2;
        QuantumState::from_pure(&[c(h, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(h, 0.0)]).unwrap()
    }

    #[test]
    fn from_pure_basis_state() {
        let s = QuantumState::from_pure(&[c(1.0, 0.0), c(0.0, 0.0)]).unwrap();
        assert_abs_diff_eq!(s.element(0, 0).re, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(s.element(1, 1).re, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn from_pure_plus_state_all_entries_half() {
        let h = FRAC_1_SQRT_2;
        let s = QuantumState::from_pure(&[c(h, 0.0), c(h, 0.0)]).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert_abs_diff_eq!(s.element(i, j).re, 0.5, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn from_pure_bell_corners() {
        let s = bell_phi_plus();
        for (i, j) in [(0, 0), (0, 3), (3, 0), (3, 3)] {
            assert_abs_diff_eq!(s.element(i, j).re, 0.5, epsilon = 1e-12);
        }
        assert_abs_diff_eq!(s.element(1, 1).re, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn from_pure_rejects_unnormalized() {
        let err = QuantumState::from_pure(&[c(1.0, 0.0), c(1.0, 0.0)]);
        assert!(matches!(err, Err(SimError::Validation(_))));
    }

    #[test]
    fn tensor_orders_first_operand_most_significant() {
        let zero = QuantumState::basis_state(1, 0).unwrap();
        let one = QuantumState::basis_state(1, 1).unwrap();
        let combined = zero.tensor(&one).unwrap();
        // |01⟩ is basis index 1.
        assert_abs_diff_eq!(combined.element(1, 1).re, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(combined.trace(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn tensor_respects_capacity() {
        let a = QuantumState::basis_state(5, 0).unwrap();
        let b = QuantumState::basis_state(4, 0).unwrap();
        assert!(matches!(a.tensor(&b), Err(SimError::Capacity { .. })));
    }

    #[test]
    fn tensor_of_two_bell_pairs_has_unit_fidelity() {
        let bell = bell_phi_plus();
        let two = bell.tensor(&bell).unwrap();
        let h = 0.5;
        // |φ+⟩⊗|φ+⟩ amplitudes: 1/2 on |0000⟩, |0011⟩, |1100⟩, |1111⟩.
        let mut reference = vec![c(0.0, 0.0); 16];
        reference[0b0000] = c(h, 0.0);
        reference[0b0011] = c(h, 0.0);
        reference[0b1100] = c(h, 0.0);
        reference[0b1111] = c(h, 0.0);
        assert_abs_diff_eq!(two.fidelity(&reference).unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn x_gate_flips_basis_state() {
        let s = QuantumState::basis_state(1, 0).unwrap();
        let flipped = s.apply_unitary(&GateSpec::x(0)).unwrap();
        assert_abs_diff_eq!(flipped.element(1, 1).re, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn cnot_on_10_gives_11() {
        let s = QuantumState::basis_state(2, 0b10).unwrap();
        let out = s.apply_unitary(&GateSpec::cnot(0, 1)).unwrap();
        assert_abs_diff_eq!(out.element(0b11, 0b11).re, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn hadamard_is_an_involution() {
        let s = bell_phi_plus();
        let round = s
            .apply_unitary(&GateSpec::h(1))
            .unwrap()
            .apply_unitary(&GateSpec::h(1))
            .unwrap();
        for i in 0..4 {
            for j in 0..4 {
                assert_abs_diff_eq!(round.element(i, j).re, s.element(i, j).re, epsilon = 1e-12);
                assert_abs_diff_eq!(round.element(i, j).im, s.element(i, j).im, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn s_gate_phases_one_component() {
        let h = FRAC_1_SQRT_2;
        let plus = QuantumState::from_pure(&[c(h, 0.0), c(h, 0.0)]).unwrap();
        let out = plus.apply_unitary(&GateSpec::s(0)).unwrap();
        // ρ01 = ⟨0|ρ|1⟩ picks up conj(i) = -i.
        assert_abs_diff_eq!(out.element(0, 1).im, -0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(out.element(1, 0).im, 0.5, epsilon = 1e-12);
    }

    #[test]
    fn gate_rejects_out_of_range_target() {
        let s = QuantumState::basis_state(1, 0).unwrap();
        assert!(s.apply_unitary(&GateSpec::x(1)).is_err());
    }

    #[test]
    fn measure_z_on_basis_state_is_deterministic() {
        let s = QuantumState::basis_state(1, 0).unwrap();
        let [plus, minus] = s.measure(0, MeasurementBasis::Z).unwrap();
        assert_eq!(plus.outcome, Sign::Plus);
        assert_abs_diff_eq!(plus.probability, 1.0, epsilon = 1e-12);
        assert!(minus.post_state.is_none());
        let post = plus.post_state.unwrap();
        assert_abs_diff_eq!(post.element(0, 0).re, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn measure_x_on_plus_state_is_deterministic() {
        let h = FRAC_1_SQRT_2;
        let plus = QuantumState::from_pure(&[c(h, 0.0), c(h, 0.0)]).unwrap();
        let [p, m] = plus.measure(0, MeasurementBasis::X).unwrap();
        assert_abs_diff_eq!(p.probability, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(m.probability, 0.0, epsilon = 1e-12);
        let post = p.post_state.unwrap();
        assert_abs_diff_eq!(post.element(0, 1).re, 0.5, epsilon = 1e-12);
    }

    #[test]
    fn measure_half_of_bell_pair() {
        let s = bell_phi_plus();
        let [p, m] = s.measure(0, MeasurementBasis::Z).unwrap();
        assert_abs_diff_eq!(p.probability, 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(m.probability, 0.5, epsilon = 1e-12);
        let post0 = p.post_state.unwrap();
        let post1 = m.post_state.unwrap();
        assert_abs_diff_eq!(post0.element(0b00, 0b00).re, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(post1.element(0b11, 0b11).re, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn partial_trace_of_bell_half_is_maximally_mixed() {
        let s = bell_phi_plus();
        let reduced = s.partial_trace(&[0]).unwrap();
        assert_abs_diff_eq!(reduced.element(0, 0).re, 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(reduced.element(1, 1).re, 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(reduced.element(0, 1).norm(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn partial_trace_keep_all_is_identity() {
        let s = bell_phi_plus();
        let same = s.partial_trace(&[0, 1]).unwrap();
        assert_eq!(same, s);
    }

    #[test]
    fn partial_trace_recovers_tensor_factor() {
        let h = FRAC_1_SQRT_2;
        let a = QuantumState::from_pure(&[c(h, 0.0), c(0.0, h)]).unwrap();
        let b = QuantumState::basis_state(2, 0b10).unwrap();
        let joint = a.tensor(&b).unwrap();
        let back = joint.partial_trace(&[0]).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert_abs_diff_eq!(back.element(i, j).re, a.element(i, j).re, epsilon = 1e-12);
                assert_abs_diff_eq!(back.element(i, j).im, a.element(i, j).im, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn partial_trace_rejects_empty_keep() {
        let s = bell_phi_plus();
        assert!(s.partial_trace(&[]).is_err());
    }

    #[test]
    fn fidelity_of_maximally_mixed_two_qubits() {
        let dim = 4;
        let mut mat = vec![c(0.0, 0.0); dim * dim];
        for i in 0..dim {
            mat[i * dim + i] = c(0.25, 0.0);
        }
        let s = QuantumState::from_matrix(2, mat).unwrap();
        let h = FRAC_1_SQRT_2;
        let bell = [c(h, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(h, 0.0)];
        assert_abs_diff_eq!(s.fidelity(&bell).unwrap(), 0.25, epsilon = 1e-12);
    }

    #[test]
    fn fidelity_dimension_mismatch() {
        let s = bell_phi_plus();
        assert!(matches!(
            s.fidelity(&[c(1.0, 0.0), c(0.0, 0.0)]),
            Err(SimError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn from_matrix_clamps_tiny_negative_eigenvalue() {
        // diag(1 + 5e-10, -5e-10): within the clamp band.
        let mat = vec![c(1.0 + 5e-10, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-5e-10, 0.0)];
        let s = QuantumState::from_matrix(1, mat).unwrap();
        assert!(s.element(1, 1).re >= 0.0);
        assert_abs_diff_eq!(s.trace(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn from_matrix_rejects_large_negativity() {
        let mat = vec![c(1.01, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-0.01, 0.0)];
        assert!(QuantumState::from_matrix(1, mat).is_err());
    }

    #[test]
    fn swap_qubits_relabels() {
        let s = QuantumState::basis_state(2, 0b01).unwrap();
        let swapped = s.swap_qubits(0, 1).unwrap();
        assert_abs_diff_eq!(swapped.element(0b10, 0b10).re, 1.0, epsilon = 1e-15);
    }
}

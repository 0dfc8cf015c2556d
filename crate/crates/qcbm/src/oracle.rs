//! Dense-matrix reference implementations used to cross-check the in-place
//! statevector kernels. Only compiled for tests and for downstream test
//! suites that enable the `oracle` feature. Everything here is deliberately
//! naive: build the full 2^n × 2^n operator and multiply.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub fn zero_state_vector(n_qubits: usize) -> DVector<Complex64> {
    let mut v = DVector::from_element(1 << n_qubits, Complex64::ZERO);
    v[0] = Complex64::ONE;
    v
}

fn identity(dim: usize) -> DMatrix<Complex64> {
    DMatrix::identity(dim, dim)
}

fn pauli_x() -> DMatrix<Complex64> {
    DMatrix::from_row_slice(
        2,
        2,
        &[
            Complex64::ZERO,
            Complex64::ONE,
            Complex64::ONE,
            Complex64::ZERO,
        ],
    )
}

fn rx_gate(theta: f64) -> DMatrix<Complex64> {
    let c = Complex64::new((0.5 * theta).cos(), 0.0);
    let ns = Complex64::new(0.0, -(0.5 * theta).sin());
    DMatrix::from_row_slice(2, 2, &[c, ns, ns, c])
}

fn rz_gate(theta: f64) -> DMatrix<Complex64> {
    let p0 = Complex64::from_polar(1.0, -0.5 * theta);
    DMatrix::from_row_slice(2, 2, &[p0, Complex64::ZERO, Complex64::ZERO, p0.conj()])
}

/// Embed a 2×2 gate on `qubit` into the full space. Qubit 0 is the least
/// significant index bit, so it sits rightmost in the Kronecker chain.
fn embed_single(n_qubits: usize, qubit: usize, gate: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    identity(1 << (n_qubits - 1 - qubit))
        .kronecker(gate)
        .kronecker(&identity(1 << qubit))
}

pub fn rx_full(n_qubits: usize, qubit: usize, theta: f64) -> DMatrix<Complex64> {
    embed_single(n_qubits, qubit, &rx_gate(theta))
}

pub fn rz_full(n_qubits: usize, qubit: usize, theta: f64) -> DMatrix<Complex64> {
    embed_single(n_qubits, qubit, &rz_gate(theta))
}

/// cos(θ/2)·I − i·sin(θ/2)·X_a·X_b, built from full-space Pauli factors.
pub fn rxx_full(n_qubits: usize, qubit_a: usize, qubit_b: usize, theta: f64) -> DMatrix<Complex64> {
    let dim = 1 << n_qubits;
    let xx = embed_single(n_qubits, qubit_a, &pauli_x())
        * embed_single(n_qubits, qubit_b, &pauli_x());
    let c = Complex64::new((0.5 * theta).cos(), 0.0);
    let ns = Complex64::new(0.0, -(0.5 * theta).sin());
    identity(dim) * c + xx * ns
}

pub fn apply_matrix(op: &DMatrix<Complex64>, state: &DVector<Complex64>) -> DVector<Complex64> {
    op * state
}

//! Dense statevector simulation for the three gate kinds the ansatz uses.
//!
//! Gate conventions:
//!   R_X(θ)  = cos(θ/2)·I − i·sin(θ/2)·X
//!   R_Z(θ)  = diag(e^{−iθ/2}, e^{+iθ/2})
//!   R_XX(θ) = cos(θ/2)·I − i·sin(θ/2)·(X⊗X)
//!
//! Kernels update amplitudes in place with stride patterns; no gate matrix
//! is ever materialized outside the test oracle.

use num_complex::Complex64;
use rand::Rng;

use crate::bitstring::Bitstring;
use crate::error::{Error, Result};

/// Memory cap: 2^20 amplitudes is 16 MiB per state.
pub const MAX_QUBITS: usize = 20;

#[derive(Clone, Debug)]
pub struct StateVector {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

/// One butterfly of cos(θ/2)·I − i·sin(θ/2)·X on an amplitude pair.
#[inline(always)]
fn rotate_pair(c: f64, s: f64, a: &mut Complex64, b: &mut Complex64) {
    let (x, y) = (*a, *b);
    *a = Complex64::new(c * x.re + s * y.im, c * x.im - s * y.re);
    *b = Complex64::new(c * y.re + s * x.im, c * y.im - s * x.re);
}

impl StateVector {
    /// |00⋯0⟩ on `n_qubits` qubits.
    pub fn zero_state(n_qubits: usize) -> Result<Self> {
        if n_qubits == 0 || n_qubits > MAX_QUBITS {
            return Err(Error::QubitCountOutOfRange(n_qubits));
        }
        let mut amps = vec![Complex64::ZERO; 1 << n_qubits];
        amps[0] = Complex64::ONE;
        Ok(Self { n_qubits, amps })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    fn check_qubit(&self, qubit: usize) -> Result<()> {
        if qubit >= self.n_qubits {
            return Err(Error::QubitIndexOutOfRange {
                index: qubit,
                n_qubits: self.n_qubits,
            });
        }
        Ok(())
    }

    pub fn apply_rx(&mut self, qubit: usize, theta: f64) -> Result<()> {
        self.check_qubit(qubit)?;
        let (s, c) = (0.5 * theta).sin_cos();
        let step = 1usize << qubit;
        for block in self.amps.chunks_exact_mut(2 * step) {
            let (zeros, ones) = block.split_at_mut(step);
            for (a, b) in zeros.iter_mut().zip(ones.iter_mut()) {
                rotate_pair(c, s, a, b);
            }
        }
        Ok(())
    }

    pub fn apply_rz(&mut self, qubit: usize, theta: f64) -> Result<()> {
        self.check_qubit(qubit)?;
        let phase0 = Complex64::from_polar(1.0, -0.5 * theta);
        let phase1 = phase0.conj();
        let step = 1usize << qubit;
        for block in self.amps.chunks_exact_mut(2 * step) {
            let (zeros, ones) = block.split_at_mut(step);
            for a in zeros {
                *a *= phase0;
            }
            for b in ones {
                *b *= phase1;
            }
        }
        Ok(())
    }

    /// X⊗X flips both target bits, so the rotation mixes amplitude pairs
    /// that differ in exactly those two bits: |..0..0..⟩ ↔ |..1..1..⟩ and
    /// |..0..1..⟩ ↔ |..1..0..⟩.
    pub fn apply_rxx(&mut self, qubit_a: usize, qubit_b: usize, theta: f64) -> Result<()> {
        self.check_qubit(qubit_a)?;
        self.check_qubit(qubit_b)?;
        if qubit_a == qubit_b {
            return Err(Error::IdenticalQubits(qubit_a));
        }
        let (s, c) = (0.5 * theta).sin_cos();
        let hi = 1usize << qubit_a.max(qubit_b);
        let lo = 1usize << qubit_a.min(qubit_b);
        for block in self.amps.chunks_exact_mut(2 * hi) {
            let (hi0, hi1) = block.split_at_mut(hi);
            for (sub0, sub1) in hi0
                .chunks_exact_mut(2 * lo)
                .zip(hi1.chunks_exact_mut(2 * lo))
            {
                let (z00, z01) = sub0.split_at_mut(lo);
                let (z10, z11) = sub1.split_at_mut(lo);
                for (a, b) in z00.iter_mut().zip(z11.iter_mut()) {
                    rotate_pair(c, s, a, b);
                }
                for (a, b) in z01.iter_mut().zip(z10.iter_mut()) {
                    rotate_pair(c, s, a, b);
                }
            }
        }
        Ok(())
    }

    /// Born probabilities, indexed by basis index.
    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    /// `count` i.i.d. draws from the Born distribution via inverse-CDF
    /// lookup. Deterministic for a given rng state.
    pub fn sample<R: Rng + ?Sized>(&self, count: usize, rng: &mut R) -> Vec<Bitstring> {
        let mut cumulative = Vec::with_capacity(self.amps.len());
        let mut acc = 0.0;
        for a in &self.amps {
            acc += a.norm_sqr();
            cumulative.push(acc);
        }
        let top = cumulative.len() - 1;
        (0..count)
            .map(|_| {
                let r: f64 = rng.random::<f64>() * acc;
                let idx = cumulative.partition_point(|&c| c <= r).min(top);
                Bitstring::from_index_unchecked(idx, self.n_qubits)
            })
            .collect()
    }
}

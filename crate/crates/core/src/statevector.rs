//! Dense statevector storage and matrix-free operator application.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::pauli::PauliSum;

/// Dense amplitudes over `2^n` basis states; qubit `q` is bit `q` of the index.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

/// Largest dense register.
pub const MAX_DENSE_QUBITS: usize = 30;

impl StateVector {
    pub fn zeros(n_qubits: usize) -> Self {
        assert!(n_qubits <= MAX_DENSE_QUBITS, "{n_qubits} qubits is too large for a dense state");
        StateVector { n_qubits, amps: vec![Complex64::default(); 1 << n_qubits] }
    }

    pub fn from_amplitudes(n_qubits: usize, amps: Vec<Complex64>) -> Result<Self> {
        if amps.len() != 1usize << n_qubits {
            return Err(Error::Invalid(format!(
                "{} amplitudes for a {n_qubits}-qubit register",
                amps.len()
            )));
        }
        Ok(StateVector { n_qubits, amps })
    }

    pub fn from_real(n_qubits: usize, amps: &[f64]) -> Result<Self> {
        Self::from_amplitudes(n_qubits, amps.iter().map(|&a| Complex64::new(a, 0.0)).collect())
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

    pub fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amps
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &StateVector) -> Complex64 {
        debug_assert_eq!(self.n_qubits, other.n_qubits);
        self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn normalize(&mut self) {
        let n = self.norm();
        if n > 0.0 {
            for a in &mut self.amps {
                *a /= n;
            }
        }
    }

    pub fn scale(&mut self, factor: Complex64) {
        for a in &mut self.amps {
            *a *= factor;
        }
    }

    /// `self += factor * other`.
    pub fn axpy(&mut self, factor: Complex64, other: &StateVector) {
        for (a, b) in self.amps.iter_mut().zip(&other.amps) {
            *a += factor * b;
        }
    }

    pub fn distance(&self, other: &StateVector) -> f64 {
        self.amps.iter().zip(&other.amps).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_imag(&self) -> f64 {
        self.amps.iter().map(|a| a.im.abs()).fold(0.0, f64::max)
    }

    /// Spin-resolved particle numbers of the support, `None` if the support
    /// mixes sectors. Even qubits are spin up, odd qubits spin down.
    pub fn sector(&self, tol: f64) -> Option<(usize, usize)> {
        let up_mask = even_bits(self.n_qubits);
        let mut found = None;
        for (b, a) in self.amps.iter().enumerate() {
            if a.norm() <= tol {
                continue;
            }
            let b = b as u64;
            let s = ((b & up_mask).count_ones() as usize, (b & !up_mask).count_ones() as usize);
            match found {
                None => found = Some(s),
                Some(prev) if prev != s => return None,
                _ => {}
            }
        }
        found
    }
}

pub(crate) fn even_bits(n_qubits: usize) -> u64 {
    (0..n_qubits).step_by(2).fold(0u64, |m, q| m | (1 << q))
}

/// Computational basis state with the given qubits set to 1 (occupied).
pub fn basis_state(occupied: &[usize], n_qubits: usize) -> Result<StateVector> {
    let mut index = 0u64;
    for &q in occupied {
        if q >= n_qubits {
            return Err(Error::IndexOutOfRange { index: q, n_qubits });
        }
        index |= 1 << q;
    }
    let mut psi = StateVector::zeros(n_qubits);
    psi.amps[index as usize] = Complex64::new(1.0, 0.0);
    Ok(psi)
}

/// Something that acts linearly on statevectors.
pub trait Observable: Sync {
    fn n_qubits(&self) -> usize;

    fn apply(&self, psi: &StateVector) -> StateVector;

    /// `Re <psi|O|psi>`; callers guarantee Hermiticity.
    fn expectation_value(&self, psi: &StateVector) -> f64 {
        psi.inner(&self.apply(psi)).re
    }
}

impl Observable for PauliSum {
    fn n_qubits(&self) -> usize {
        PauliSum::n_qubits(self)
    }

    fn apply(&self, psi: &StateVector) -> StateVector {
        apply_pauli_sum(self, psi).expect("register mismatch")
    }
}

/// `h|psi>`, matrix-free.
pub fn apply_pauli_sum(h: &PauliSum, psi: &StateVector) -> Result<StateVector> {
    if h.n_qubits() != psi.n_qubits {
        return Err(Error::RegisterMismatch { expected: h.n_qubits(), actual: psi.n_qubits });
    }
    let mut out = StateVector::zeros(psi.n_qubits);
    for term in h.terms() {
        let coeff = term.coeff * crate::pauli::i_pow(term.key.y_count() as i64);
        let (x, z) = (term.key.x, term.key.z);
        for (b, a) in psi.amps.iter().enumerate() {
            if *a == Complex64::default() {
                continue;
            }
            let b = b as u64;
            let v = if (b & z).count_ones() & 1 == 1 { -coeff * a } else { coeff * a };
            out.amps[(b ^ x) as usize] += v;
        }
    }
    Ok(out)
}

/// Tolerance on the discarded imaginary part of an expectation value.
pub const EXPECTATION_IMAG_TOL: f64 = 1e-10;

/// `<psi|h|psi>` for a Hermitian `h`.
pub fn expectation(h: &PauliSum, psi: &StateVector) -> Result<f64> {
    if !h.is_hermitian() {
        return Err(Error::NotHermitian("expectation of a non-Hermitian Pauli sum".into()));
    }
    let v = psi.inner(&apply_pauli_sum(h, psi)?);
    if v.im.abs() > EXPECTATION_IMAG_TOL * v.norm().max(1.0) {
        return Err(Error::NotHermitian(format!("imaginary expectation part {:.3e}", v.im)));
    }
    Ok(v.re)
}

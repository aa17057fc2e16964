//! Second-quantized operator products and their Jordan-Wigner images.
//!
//! Occupation convention: basis bit `1` means occupied, so
//! `n_q = (I - Z_q) / 2` and `c†_q = ½ (X_q - i Y_q) Π_{p<q} Z_p`.

use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::pauli::{Letter, PauliKey, PauliString, PauliSum};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Action {
    Create,
    Annihilate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Ladder {
    pub qubit: usize,
    pub action: Action,
}

impl Ladder {
    pub fn create(qubit: usize) -> Self {
        Ladder { qubit, action: Action::Create }
    }

    pub fn annihilate(qubit: usize) -> Self {
        Ladder { qubit, action: Action::Annihilate }
    }

    fn dagger(self) -> Self {
        let action = match self.action {
            Action::Create => Action::Annihilate,
            Action::Annihilate => Action::Create,
        };
        Ladder { action, ..self }
    }
}

/// Coefficient times an ordered product of ladder operators (leftmost
/// factor acts last).
#[derive(Debug, Clone, PartialEq)]
pub struct LadderTerm {
    pub coeff: Complex64,
    pub factors: Vec<Ladder>,
}

impl LadderTerm {
    pub fn new(coeff: Complex64, factors: Vec<Ladder>) -> Self {
        LadderTerm { coeff, factors }
    }

    pub fn real(coeff: f64, factors: Vec<Ladder>) -> Self {
        Self::new(Complex64::new(coeff, 0.0), factors)
    }

    /// `c†_p c_q`.
    pub fn excitation(p: usize, q: usize) -> Self {
        Self::real(1.0, vec![Ladder::create(p), Ladder::annihilate(q)])
    }

    pub fn number(q: usize) -> Self {
        Self::excitation(q, q)
    }

    /// `c†_a c†_b c_c c_d`.
    pub fn quartic(a: usize, b: usize, c: usize, d: usize) -> Self {
        Self::real(
            1.0,
            vec![Ladder::create(a), Ladder::create(b), Ladder::annihilate(c), Ladder::annihilate(d)],
        )
    }

    /// Hermitian conjugate: reversed order, actions flipped, coefficient conjugated.
    pub fn dagger(&self) -> Self {
        LadderTerm {
            coeff: self.coeff.conj(),
            factors: self.factors.iter().rev().map(|f| f.dagger()).collect(),
        }
    }

    /// A product vanishes identically when the same ladder operator appears
    /// twice with no opposite action on that orbital in between
    /// (`c_q c_q = 0`, `c†_q c†_q = 0`).
    pub fn is_trivially_zero(&self) -> bool {
        if self.coeff == Complex64::new(0.0, 0.0) {
            return true;
        }
        self.factors.iter().enumerate().any(|(i, f)| {
            self.factors[i + 1..]
                .iter()
                .find(|g| g.qubit == f.qubit)
                .is_some_and(|g| g.action == f.action)
        })
    }

    pub fn max_qubit(&self) -> Option<usize> {
        self.factors.iter().map(|f| f.qubit).max()
    }
}

impl fmt::Display for LadderTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.coeff)?;
        for l in &self.factors {
            match l.action {
                Action::Create => write!(f, " c+{}", l.qubit)?,
                Action::Annihilate => write!(f, " c{}", l.qubit)?,
            }
        }
        Ok(())
    }
}

fn ladder_image(l: Ladder, n_qubits: usize) -> PauliSum {
    let chain = PauliKey { x: 0, z: (1u64 << l.qubit) - 1 };
    let x = PauliKey::single(l.qubit, Letter::X);
    let y = PauliKey::single(l.qubit, Letter::Y);
    let y_coeff = match l.action {
        Action::Create => Complex64::new(0.0, -0.5),
        Action::Annihilate => Complex64::new(0.0, 0.5),
    };
    PauliSum::from_strings(
        n_qubits,
        [
            PauliString { coeff: Complex64::new(0.5, 0.0), key: PauliKey { x: x.x, z: x.z | chain.z } },
            PauliString { coeff: y_coeff, key: PauliKey { x: y.x, z: y.z | chain.z } },
        ],
    )
}

/// Jordan-Wigner image of a ladder product, canonicalized.
pub fn jordan_wigner(term: &LadderTerm, n_qubits: usize) -> Result<PauliSum> {
    if n_qubits > 64 {
        return Err(Error::Invalid(format!("{n_qubits} qubits exceeds the 64-qubit Pauli limit")));
    }
    if let Some(q) = term.factors.iter().map(|f| f.qubit).find(|&q| q >= n_qubits) {
        return Err(Error::IndexOutOfRange { index: q, n_qubits });
    }
    if term.is_trivially_zero() {
        return Ok(PauliSum::zero(n_qubits));
    }
    let mut out = PauliSum::identity(n_qubits).scale(term.coeff);
    for &f in &term.factors {
        out = &out * &ladder_image(f, n_qubits);
    }
    Ok(out)
}

/// Jordan-Wigner image of a sum of ladder products.
pub fn jordan_wigner_sum<'a>(
    terms: impl IntoIterator<Item = &'a LadderTerm>,
    n_qubits: usize,
) -> Result<PauliSum> {
    let mut out = PauliSum::zero(n_qubits);
    for t in terms {
        out = &out + &jordan_wigner(t, n_qubits)?;
    }
    Ok(out)
}

/// Action of a ladder product on a computational basis state. Returns the
/// signed image, or `None` when the state is annihilated.
#[inline]
pub fn apply_to_basis(factors: &[Ladder], mut b: u64) -> Option<(f64, u64)> {
    let mut sign = 1.0;
    for f in factors.iter().rev() {
        let bit = 1u64 << f.qubit;
        let occupied = b & bit != 0;
        match (f.action, occupied) {
            (Action::Create, false) | (Action::Annihilate, true) => {
                if (b & (bit - 1)).count_ones() & 1 == 1 {
                    sign = -sign;
                }
                b ^= bit;
            }
            _ => return None,
        }
    }
    Some((sign, b))
}

//! Exact, matrix-free gate kernels.
//!
//! Every generator used here splits the Hilbert space into invariant
//! two-dimensional blocks `{s, s'}` plus a kernel on which it vanishes, so
//! each exponential is evaluated in closed form as a rotation on those
//! blocks. No Trotterization is involved.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fermion::{apply_to_basis, jordan_wigner, jordan_wigner_sum, Action, Ladder, LadderTerm};
use crate::pauli::PauliSum;
use crate::statevector::StateVector;

/// Iterates `fixed | r` for every subset `r` of `free`.
#[inline]
fn for_each_block(n_qubits: usize, pinned: u64, fixed: u64, mut f: impl FnMut(u64)) {
    let all = if n_qubits == 64 { u64::MAX } else { (1u64 << n_qubits) - 1 };
    let free = all & !pinned;
    let mut r = 0u64;
    loop {
        f(fixed | r);
        r = r.wrapping_sub(free) & free;
        if r == 0 {
            break;
        }
    }
}

/// Block structure of a ladder product that flips exactly the `pinned`
/// bits. Its sign on a source state `s` is `base_sign` times the parity of
/// `s & parity_mask`, since the pinned bits are the same on every source.
#[derive(Debug, Clone, Copy, PartialEq)]
struct BlockMap {
    n_qubits: usize,
    pinned: u64,
    /// Pinned bits set on every source state.
    source: u64,
    parity_mask: u64,
    base_sign: f64,
}

impl BlockMap {
    fn new(factors: &[Ladder], n_qubits: usize, pinned: u64, source: u64) -> Self {
        let (base_sign, _) = apply_to_basis(factors, source).expect("source state is active");
        let below = factors.iter().fold(0u64, |m, f| m ^ ((1u64 << f.qubit) - 1));
        BlockMap { n_qubits, pinned, source, parity_mask: below & !pinned, base_sign }
    }

    /// Calls `f(s, s', sign)` for every source `s` with image `sign |s'>`.
    #[inline]
    fn for_each_pair(&self, mut f: impl FnMut(usize, usize, f64)) {
        for_each_block(self.n_qubits, self.pinned, self.source, |s| {
            let sign = if (s & self.parity_mask).count_ones() & 1 == 1 { -self.base_sign } else { self.base_sign };
            f(s as usize, (s ^ self.pinned) as usize, sign);
        });
    }
}

/// Anti-Hermitian, real generator `A = O - O†` with
/// `O = c†_a c†_b c_c c_d` on four distinct qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct PoolGenerator {
    pub qubits: [usize; 4],
    n_qubits: usize,
    factors: [Ladder; 4],
    blocks: BlockMap,
}

impl PoolGenerator {
    /// Validates the quartic term `c†_a c†_b c_c c_d` (coefficient ignored).
    pub fn new(term: &LadderTerm, n_qubits: usize) -> Result<Self> {
        let shape = [Action::Create, Action::Create, Action::Annihilate, Action::Annihilate];
        if term.factors.len() != 4 || term.factors.iter().zip(shape).any(|(f, a)| f.action != a) {
            return Err(Error::Invalid(format!("'{term}' is not of the form c+a c+b c_c c_d")));
        }
        let q = [term.factors[0].qubit, term.factors[1].qubit, term.factors[2].qubit, term.factors[3].qubit];
        if let Some(&bad) = q.iter().find(|&&x| x >= n_qubits) {
            return Err(Error::IndexOutOfRange { index: bad, n_qubits });
        }
        let pinned = q.iter().fold(0u64, |m, &x| m | (1 << x));
        if pinned.count_ones() != 4 {
            return Err(Error::RepeatedOrbitals(q));
        }
        let factors = [term.factors[0], term.factors[1], term.factors[2], term.factors[3]];
        // O acts on states with c, d set and a, b empty
        let blocks = BlockMap::new(&factors, n_qubits, pinned, (1 << q[2]) | (1 << q[3]));
        Ok(PoolGenerator { qubits: q, n_qubits, factors, blocks })
    }

    pub fn from_qubits(a: usize, b: usize, c: usize, d: usize, n_qubits: usize) -> Result<Self> {
        Self::new(&LadderTerm::quartic(a, b, c, d), n_qubits)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn term(&self) -> LadderTerm {
        LadderTerm::real(1.0, self.factors.to_vec())
    }

    /// Jordan-Wigner image of `O - O†`.
    pub fn pauli_image(&self) -> PauliSum {
        let o = self.term();
        let plus = jordan_wigner(&o, self.n_qubits).expect("validated on construction");
        let minus = jordan_wigner(&o.dagger(), self.n_qubits).expect("validated on construction");
        &plus - &minus
    }

    /// Calls `f(s, s', sign)` for every block with `O|s> = sign |s'>`.
    #[inline]
    fn for_each_pair(&self, f: impl FnMut(usize, usize, f64)) {
        self.blocks.for_each_pair(f);
    }

    /// `A|psi>`.
    pub fn apply(&self, psi: &StateVector) -> StateVector {
        let mut out = StateVector::zeros(psi.n_qubits());
        let a = psi.amplitudes();
        let o = out.amplitudes_mut();
        self.for_each_pair(|s, t, sign| {
            o[t] += a[s] * sign;
            o[s] -= a[t] * sign;
        });
        out
    }

    /// `<phi|A|psi>` without materialising `A|psi>`.
    pub fn matrix_element(&self, phi: &StateVector, psi: &StateVector) -> Complex64 {
        let a = psi.amplitudes();
        let p = phi.amplitudes();
        let mut acc = Complex64::default();
        self.for_each_pair(|s, t, sign| {
            acc += (p[t].conj() * a[s] - p[s].conj() * a[t]) * sign;
        });
        acc
    }

    /// Number of basis states on which `A` acts non-trivially, halved.
    pub fn block_count(&self) -> usize {
        1 << (self.n_qubits - 4)
    }

    /// In-place `exp(θA)|psi>`, i.e. the closed form
    /// `psi + sinθ A psi + (1 - cosθ) A² psi` evaluated block by block
    /// (`A² = -(OO† + O†O)` is minus the projector onto the blocks).
    pub fn apply_unitary(&self, theta: f64, psi: &mut StateVector) {
        if theta == 0.0 {
            return;
        }
        let (sn, cs) = theta.sin_cos();
        let a = psi.amplitudes_mut();
        self.for_each_pair(|s, t, sign| {
            let (x, y) = (a[s], a[t]);
            a[s] = x * cs - y * (sign * sn);
            a[t] = y * cs + x * (sign * sn);
        });
    }
}

/// `exp(θ(O - O†))|psi>` for a quartic `O`.
pub fn apply_pool_unitary(o: &LadderTerm, theta: f64, psi: &StateVector) -> Result<StateVector> {
    let gen = PoolGenerator::new(o, psi.n_qubits())?;
    let mut out = psi.clone();
    gen.apply_unitary(theta, &mut out);
    Ok(out)
}

/// Hopping generator `h = c†_p c_q + c†_q c_p` (`h³ = h`).
#[derive(Debug, Clone, PartialEq)]
pub struct HoppingGenerator {
    pub p: usize,
    pub q: usize,
    n_qubits: usize,
    blocks: BlockMap,
}

/// Tolerance of the `h³ = h` construction check.
pub const HOPPING_CHECK_TOL: f64 = 1e-10;

impl HoppingGenerator {
    /// Builds from the two terms `c†_p c_q` and `c†_q c_p`, verifying
    /// `h³ = h` on the Jordan-Wigner image.
    pub fn new(terms: &[LadderTerm; 2], n_qubits: usize) -> Result<Self> {
        let image = jordan_wigner_sum(terms.iter(), n_qubits)?;
        let cube = &(&image * &image) * &image;
        let residual = (&cube - &image).max_abs_coefficient();
        if image.is_empty() || residual > HOPPING_CHECK_TOL {
            return Err(Error::NotHoppingGenerator(if image.is_empty() { 1.0 } else { residual }));
        }
        let first = &terms[0];
        let shape_ok = first.factors.len() == 2
            && first.factors[0].action == Action::Create
            && first.factors[1].action == Action::Annihilate
            && first.factors[0].qubit != first.factors[1].qubit
            && first.coeff == Complex64::new(1.0, 0.0)
            && terms[1] == first.dagger();
        if !shape_ok {
            return Err(Error::NotHoppingGenerator(residual.max(HOPPING_CHECK_TOL * 10.0)));
        }
        let (p, q) = (first.factors[0].qubit, first.factors[1].qubit);
        // s has p occupied and q empty; c†_q c_p maps it to s'
        let factors = [Ladder::create(q), Ladder::annihilate(p)];
        let blocks = BlockMap::new(&factors, n_qubits, (1 << p) | (1 << q), 1 << p);
        Ok(HoppingGenerator { p, q, n_qubits, blocks })
    }

    pub fn between(p: usize, q: usize, n_qubits: usize) -> Result<Self> {
        let t = LadderTerm::excitation(p, q);
        let d = t.dagger();
        Self::new(&[t, d], n_qubits)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn pauli_image(&self) -> PauliSum {
        let t = LadderTerm::excitation(self.p, self.q);
        jordan_wigner_sum([&t, &t.dagger()], self.n_qubits).expect("validated on construction")
    }

    #[inline]
    fn for_each_pair(&self, f: impl FnMut(usize, usize, f64)) {
        self.blocks.for_each_pair(f);
    }

    /// `h|psi>`.
    pub fn apply(&self, psi: &StateVector) -> StateVector {
        let mut out = StateVector::zeros(psi.n_qubits());
        let a = psi.amplitudes();
        let o = out.amplitudes_mut();
        self.for_each_pair(|s, t, sign| {
            o[t] += a[s] * sign;
            o[s] += a[t] * sign;
        });
        out
    }

    /// `<phi|h|psi>`.
    pub fn matrix_element(&self, phi: &StateVector, psi: &StateVector) -> Complex64 {
        let a = psi.amplitudes();
        let p = phi.amplitudes();
        let mut acc = Complex64::default();
        self.for_each_pair(|s, t, sign| {
            acc += (p[t].conj() * a[s] + p[s].conj() * a[t]) * sign;
        });
        acc
    }

    /// In-place `exp(-iθh)|psi> = psi - i sinθ h psi + (cosθ - 1) h² psi`.
    pub fn apply_unitary(&self, theta: f64, psi: &mut StateVector) {
        if theta == 0.0 {
            return;
        }
        let (sn, cs) = theta.sin_cos();
        let a = psi.amplitudes_mut();
        self.for_each_pair(|s, t, sign| {
            let (x, y) = (a[s], a[t]);
            let k = Complex64::new(0.0, -sn * sign);
            a[s] = x * cs + y * k;
            a[t] = y * cs + x * k;
        });
    }
}

/// `exp(-iθh)|psi>` for `h = c†_p c_q + c†_q c_p` given as its two terms.
pub fn apply_hopping_unitary(h: &[LadderTerm; 2], theta: f64, psi: &StateVector) -> Result<StateVector> {
    let gen = HoppingGenerator::new(h, psi.n_qubits())?;
    let mut out = psi.clone();
    gen.apply_unitary(theta, &mut out);
    Ok(out)
}

/// Operator diagonal in the computational basis, stored as its diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalGenerator {
    n_qubits: usize,
    values: Vec<f64>,
    /// Distinct diagonal values and, per basis state, its index into them,
    /// so a phase gate evaluates one exponential per level.
    levels: Vec<f64>,
    level_of: Vec<u32>,
}

impl DiagonalGenerator {
    pub fn new(d: &PauliSum) -> Result<Self> {
        if !d.is_diagonal() {
            return Err(Error::NotDiagonal);
        }
        if !d.is_hermitian() {
            return Err(Error::NotHermitian("diagonal phase generator".into()));
        }
        let n = d.n_qubits();
        let mut values = vec![0.0; 1 << n];
        for term in d.terms() {
            let z = term.key.z;
            let c = term.coeff.re;
            for (b, v) in values.iter_mut().enumerate() {
                if (b as u64 & z).count_ones() & 1 == 1 {
                    *v -= c;
                } else {
                    *v += c;
                }
            }
        }
        let mut index = std::collections::HashMap::new();
        let mut levels = Vec::new();
        let level_of = values
            .iter()
            .map(|v| {
                *index.entry(v.to_bits()).or_insert_with(|| {
                    levels.push(*v);
                    levels.len() as u32 - 1
                })
            })
            .collect();
        Ok(DiagonalGenerator { n_qubits: n, values, levels, level_of })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn apply(&self, psi: &StateVector) -> StateVector {
        let amps = psi.amplitudes().iter().zip(&self.values).map(|(a, v)| a * v).collect();
        StateVector::from_amplitudes(psi.n_qubits(), amps).expect("same register")
    }

    pub fn matrix_element(&self, phi: &StateVector, psi: &StateVector) -> Complex64 {
        phi.amplitudes()
            .iter()
            .zip(psi.amplitudes())
            .zip(&self.values)
            .map(|((p, a), v)| p.conj() * a * v)
            .sum()
    }

    /// In-place `exp(-iθd)|psi>`, one amplitude-wise pass.
    pub fn apply_unitary(&self, theta: f64, psi: &mut StateVector) {
        if theta == 0.0 {
            return;
        }
        let phases: Vec<Complex64> = self.levels.iter().map(|v| Complex64::from_polar(1.0, -theta * v)).collect();
        for (a, &l) in psi.amplitudes_mut().iter_mut().zip(&self.level_of) {
            *a *= phases[l as usize];
        }
    }
}

/// `exp(-iθd)|psi>` for diagonal `d`.
pub fn apply_diagonal_phase(d: &PauliSum, theta: f64, psi: &StateVector) -> Result<StateVector> {
    if d.n_qubits() != psi.n_qubits() {
        return Err(Error::RegisterMismatch { expected: d.n_qubits(), actual: psi.n_qubits() });
    }
    let gen = DiagonalGenerator::new(d)?;
    let mut out = psi.clone();
    gen.apply_unitary(theta, &mut out);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::statevector::{apply_pauli_sum, basis_state};
    use nalgebra::DMatrix;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_state(n: usize, rng: &mut ChaCha8Rng, real: bool) -> StateVector {
        let amps: Vec<Complex64> = (0..1 << n)
            .map(|_| {
                let im = if real { 0.0 } else { rng.random_range(-1.0..1.0) };
                Complex64::new(rng.random_range(-1.0..1.0), im)
            })
            .collect();
        let mut s = StateVector::from_amplitudes(n, amps).unwrap();
        s.normalize();
        s
    }

    fn expm(m: &DMatrix<Complex64>) -> DMatrix<Complex64> {
        m.clone().exp()
    }

    fn dense_apply(m: &DMatrix<Complex64>, psi: &StateVector) -> Vec<Complex64> {
        let v = nalgebra::DVector::from_column_slice(psi.amplitudes());
        (m * v).iter().copied().collect()
    }

    #[test]
    fn block_signs_match_ladder_action() {
        let n = 7;
        for q in [[0, 1, 2, 3], [6, 0, 4, 2], [1, 5, 6, 3], [3, 2, 1, 0]] {
            let gen = PoolGenerator::from_qubits(q[0], q[1], q[2], q[3], n).unwrap();
            let mut seen = 0;
            gen.for_each_pair(|s, t, sign| {
                assert_eq!(apply_to_basis(&gen.factors, s as u64), Some((sign, t as u64)));
                seen += 1;
            });
            assert_eq!(seen, gen.block_count());
        }
        for (p, q) in [(0, 6), (5, 1), (2, 3)] {
            let hop = HoppingGenerator::between(p, q, n).unwrap();
            let factors = [Ladder::create(q), Ladder::annihilate(p)];
            hop.for_each_pair(|s, t, sign| {
                assert_eq!(apply_to_basis(&factors, s as u64), Some((sign, t as u64)));
            });
        }
    }

    #[test]
    fn pool_unitary_matches_expm() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let gen = PoolGenerator::from_qubits(4, 1, 3, 0, 6).unwrap();
        let a = gen.pauli_image().to_dense();
        for theta in [0.3, 1.2, -2.0] {
            let psi = random_state(6, &mut rng, false);
            let mut out = psi.clone();
            gen.apply_unitary(theta, &mut out);
            let want = dense_apply(&expm(&(&a * Complex64::new(theta, 0.0))), &psi);
            let err: f64 =
                out.amplitudes().iter().zip(&want).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
            assert!(err < 1e-10, "theta={theta}: {err}");
        }
    }

    #[test]
    fn pool_unitary_is_the_closed_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let gen = PoolGenerator::from_qubits(0, 5, 3, 2, 6).unwrap();
        let psi = random_state(6, &mut rng, false);
        let theta: f64 = 0.77;
        let a1 = gen.apply(&psi);
        let a2 = gen.apply(&a1);
        let mut closed = psi.clone();
        closed.axpy(Complex64::new(theta.sin(), 0.0), &a1);
        closed.axpy(Complex64::new(1.0 - theta.cos(), 0.0), &a2);
        let mut out = psi.clone();
        gen.apply_unitary(theta, &mut out);
        assert!(out.distance(&closed) < 1e-13);
    }

    #[test]
    fn pool_generator_matches_pauli_image() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let gen = PoolGenerator::from_qubits(2, 7, 1, 4, 8).unwrap();
        let psi = random_state(8, &mut rng, false);
        let phi = random_state(8, &mut rng, false);
        let direct = gen.apply(&psi);
        let via_pauli = apply_pauli_sum(&gen.pauli_image(), &psi).unwrap();
        assert!(direct.distance(&via_pauli) < 1e-13);
        let me = gen.matrix_element(&phi, &psi);
        assert!((me - phi.inner(&direct)).norm() < 1e-13);
    }

    #[test]
    fn pool_unitary_identity_cases() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let o = LadderTerm::quartic(0, 3, 1, 2);
        let psi = random_state(4, &mut rng, false);
        assert_eq!(apply_pool_unitary(&o, 0.0, &psi).unwrap(), psi);
        // |1000> (qubit 3 only): O and O† both annihilate it
        let idle = basis_state(&[3], 4).unwrap();
        for theta in [0.4, 2.5] {
            assert!(apply_pool_unitary(&o, theta, &idle).unwrap().distance(&idle) < 1e-15);
        }
    }

    #[test]
    fn pool_generator_rejects_bad_terms() {
        assert!(matches!(
            PoolGenerator::from_qubits(1, 1, 2, 3, 4),
            Err(Error::RepeatedOrbitals(_))
        ));
        assert!(PoolGenerator::new(&LadderTerm::excitation(0, 1), 4).is_err());
        assert!(PoolGenerator::from_qubits(0, 1, 2, 9, 4).is_err());
    }

    #[test]
    fn pool_rotation_is_orthogonal_and_real() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let gen = PoolGenerator::from_qubits(0, 3, 5, 6, 7).unwrap();
        let psi = random_state(7, &mut rng, true);
        let phi = random_state(7, &mut rng, true);
        let before = psi.inner(&phi);
        let (mut u_psi, mut u_phi) = (psi.clone(), phi.clone());
        gen.apply_unitary(0.9, &mut u_psi);
        gen.apply_unitary(0.9, &mut u_phi);
        assert!((u_psi.inner(&u_phi) - before).norm() < 1e-12);
        assert_eq!(u_psi.max_imag(), 0.0);
        assert!((u_psi.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn hopping_unitary_matches_expm() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let gen = HoppingGenerator::between(1, 4, 6).unwrap();
        let h = gen.pauli_image().to_dense();
        for theta in [0.3, 1.2] {
            let psi = random_state(6, &mut rng, false);
            let mut out = psi.clone();
            gen.apply_unitary(theta, &mut out);
            let want = dense_apply(&expm(&(&h * Complex64::new(0.0, -theta))), &psi);
            let err: f64 =
                out.amplitudes().iter().zip(&want).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
            assert!(err < 1e-10);
        }
        let psi = random_state(6, &mut rng, false);
        let mut full_turn = psi.clone();
        gen.apply_unitary(2.0 * std::f64::consts::PI, &mut full_turn);
        assert!(full_turn.distance(&psi) < 1e-10);
        let direct = gen.apply(&psi);
        assert!(direct.distance(&apply_pauli_sum(&gen.pauli_image(), &psi).unwrap()) < 1e-13);
    }

    #[test]
    fn hopping_generator_checks_its_shape() {
        let not_hop = [LadderTerm::quartic(0, 1, 2, 3), LadderTerm::quartic(0, 1, 2, 3).dagger()];
        assert!(matches!(HoppingGenerator::new(&not_hop, 4), Err(Error::NotHoppingGenerator(_))));
        let scaled = [
            LadderTerm::real(2.0, LadderTerm::excitation(0, 1).factors),
            LadderTerm::real(2.0, LadderTerm::excitation(1, 0).factors),
        ];
        assert!(HoppingGenerator::new(&scaled, 2).is_err());
        let t = LadderTerm::excitation(0, 2);
        assert!(apply_hopping_unitary(&[t.clone(), t.dagger()], 0.0, &basis_state(&[0], 3).unwrap()).is_ok());
    }

    #[test]
    fn diagonal_phase() {
        let d = PauliSum::from_strings(2, ["0.25".parse().unwrap(), "-0.25 Z0".parse().unwrap(), "-0.25 Z1".parse().unwrap(), "0.25 Z0 Z1".parse().unwrap()]);
        let gen = DiagonalGenerator::new(&d).unwrap();
        assert_eq!(gen.values(), &[0.0, 0.0, 0.0, 1.0]);
        let psi = basis_state(&[0, 1], 2).unwrap();
        let out = apply_diagonal_phase(&d, 0.5, &psi).unwrap();
        assert!((out.amplitudes()[3] - Complex64::from_polar(1.0, -0.5)).norm() < 1e-15);
        let x = PauliSum::from_strings(2, ["1 X0".parse().unwrap()]);
        assert!(matches!(DiagonalGenerator::new(&x), Err(Error::NotDiagonal)));
    }
}

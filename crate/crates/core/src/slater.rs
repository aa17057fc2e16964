//! Slater-determinant preparation in a site register.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::statevector::StateVector;

/// Unitarity tolerance for the orbital matrix.
pub const UNITARY_TOL: f64 = 1e-10;

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if current.len() == k {
            out.push(current.clone());
            return;
        }
        for i in start..n {
            if n - i < k - current.len() {
                break;
            }
            current.push(i);
            rec(i + 1, n, k, current, out);
            current.pop();
        }
    }
    rec(0, n, k, &mut current, &mut out);
    out
}

fn minor_determinant(w: &DMatrix<Complex64>, rows: &[usize], cols: &[usize]) -> Complex64 {
    if rows.is_empty() {
        return Complex64::new(1.0, 0.0);
    }
    DMatrix::from_fn(rows.len(), cols.len(), |i, j| w[(rows[i], cols[j])]).determinant()
}

/// Sign from reordering `(up creators ascending, down creators ascending)`
/// into ascending qubit order with `qubit = 2 * site + spin`.
fn interleave_sign(up: &[usize], down: &[usize]) -> f64 {
    let swaps: usize = up.iter().map(|&i| down.iter().filter(|&&j| j < i).count()).sum();
    if swaps.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// Slater determinant `Π_{m∈occ_up} b†_{m↑} Π_{m∈occ_down} b†_{m↓} |0>` with
/// `b†_m = Σ_i W[i, m] c†_i`, on the `2 * n_sites` qubit register.
///
/// The global sign is fixed so that `W = I` gives the plain basis state.
pub fn slater_statevector(
    w: &DMatrix<Complex64>,
    occ_up: &[usize],
    occ_down: &[usize],
) -> Result<StateVector> {
    let n = w.nrows();
    if w.ncols() != n {
        return Err(Error::Invalid("orbital matrix must be square".into()));
    }
    let deviation = (w.adjoint() * w - DMatrix::<Complex64>::identity(n, n)).norm();
    if deviation > UNITARY_TOL {
        return Err(Error::NotUnitary(deviation));
    }
    for &m in occ_up.iter().chain(occ_down) {
        if m >= n {
            return Err(Error::IndexOutOfRange { index: m, n_qubits: n });
        }
    }
    let ups = combinations(n, occ_up.len());
    let downs = combinations(n, occ_down.len());
    let det_up: Vec<Complex64> = ups.iter().map(|r| minor_determinant(w, r, occ_up)).collect();
    let det_down: Vec<Complex64> = downs.iter().map(|r| minor_determinant(w, r, occ_down)).collect();
    let global = interleave_sign(occ_up, occ_down);

    let mut psi = StateVector::zeros(2 * n);
    let amps = psi.amplitudes_mut();
    for (su, du) in ups.iter().zip(&det_up) {
        if du.norm() < 1e-15 {
            continue;
        }
        let up_bits = su.iter().fold(0usize, |b, &i| b | 1 << (2 * i));
        for (sd, dd) in downs.iter().zip(&det_down) {
            let bits = sd.iter().fold(up_bits, |b, &j| b | 1 << (2 * j + 1));
            amps[bits] = du * dd * (interleave_sign(su, sd) * global);
        }
    }
    Ok(psi)
}

/// Real-orbital convenience wrapper.
pub fn slater_statevector_real(w: &DMatrix<f64>, occ_up: &[usize], occ_down: &[usize]) -> Result<StateVector> {
    slater_statevector(&w.map(|v| Complex64::new(v, 0.0)), occ_up, occ_down)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fermion::{jordan_wigner, LadderTerm};
    use crate::pauli::PauliSum;
    use crate::statevector::{basis_state, expectation};

    #[test]
    fn identity_gives_basis_state() {
        let w = DMatrix::<Complex64>::identity(3, 3);
        let psi = slater_statevector(&w, &[0, 2], &[1]).unwrap();
        assert_eq!(psi, basis_state(&[0, 3, 4], 6).unwrap());
        let psi = slater_statevector(&w, &[2], &[0, 1]).unwrap();
        assert_eq!(psi, basis_state(&[1, 3, 4], 6).unwrap());
    }

    #[test]
    fn rejects_non_unitary() {
        let w = DMatrix::<Complex64>::identity(2, 2) * Complex64::new(2.0, 0.0);
        assert!(matches!(slater_statevector(&w, &[0], &[0]), Err(Error::NotUnitary(_))));
    }

    #[test]
    fn one_body_density_matches_orbitals() {
        // <n_{i,up}> = Σ_{m∈occ} |W[i,m]|²
        let theta: f64 = 0.4;
        let (c, s) = (theta.cos(), theta.sin());
        let w = DMatrix::from_row_slice(3, 3, &[c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0])
            .map(|v| Complex64::new(v, 0.0));
        let psi = slater_statevector(&w, &[0], &[0, 2]).unwrap();
        assert!((psi.norm() - 1.0).abs() < 1e-12);
        for site in 0..3 {
            let n = jordan_wigner(&LadderTerm::number(2 * site), 6).unwrap();
            let want = w[(site, 0)].norm_sqr();
            assert!((expectation(&n, &psi).unwrap() - want).abs() < 1e-12);
        }
        // hopping between two sites for spin up: <c†0 c1 + c†1 c0> = 2 W00 W10
        let t = LadderTerm::excitation(0, 2);
        let hop: PauliSum = jordan_wigner(&t, 6).unwrap() + jordan_wigner(&t.dagger(), 6).unwrap();
        assert!((expectation(&hop, &psi).unwrap() - 2.0 * c * s).abs() < 1e-12);
    }
}

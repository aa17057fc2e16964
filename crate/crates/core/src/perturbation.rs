//! Rayleigh-Schrödinger perturbation oracle through second order.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::exact::DENSE_LIMIT;
use crate::pauli::PauliSum;
use crate::sector::SectorOperator;
use crate::statevector::StateVector;

/// Residual allowed in `h0 φ0 = E0 φ0`.
pub const EIGEN_RESIDUAL_TOL: f64 = 1e-8;
/// Levels closer than this to `E0` make the reference degenerate.
pub const GAP_TOL: f64 = 1e-8;

/// `(E0, E1, E2)` for `h0 + h1` around the eigenstate `phi0` of `h0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RsEnergies {
    pub e0: f64,
    pub e1: f64,
    pub e2: f64,
}

impl RsEnergies {
    pub fn total(&self) -> f64 {
        self.e0 + self.e1 + self.e2
    }
}

/// Second-order Rayleigh-Schrödinger energies. The unperturbed eigenbasis
/// is the computational basis when `h0` is diagonal and a dense sector
/// eigendecomposition otherwise.
pub fn rs_perturbation(h0: &PauliSum, h1: &PauliSum, phi0: &StateVector) -> Result<RsEnergies> {
    let (n_up, n_down) = phi0
        .sector(1e-12)
        .ok_or_else(|| Error::Invalid("reference state mixes particle-number sectors".into()))?;
    if phi0.max_imag() > 1e-12 {
        return Err(Error::Invalid("reference state must be real".into()));
    }
    let op0 = SectorOperator::from_pauli(h0, n_up, n_down)?;
    let op1 = SectorOperator::from_pauli(h1, n_up, n_down)?;
    let sector = op0.sector().clone();
    let mut phi: Vec<f64> = sector.compress(phi0).iter().map(|c: &Complex64| c.re).collect();
    let norm = phi.iter().map(|x| x * x).sum::<f64>().sqrt();
    phi.iter_mut().for_each(|x| *x /= norm);

    let dim = sector.dim();
    let mut h0phi = vec![0.0; dim];
    op0.matvec(&phi, &mut h0phi);
    let e0: f64 = phi.iter().zip(&h0phi).map(|(a, b)| a * b).sum();
    let residual = h0phi.iter().zip(&phi).map(|(a, b)| (a - e0 * b).powi(2)).sum::<f64>().sqrt();
    if residual > EIGEN_RESIDUAL_TOL {
        return Err(Error::NotEigenstate(residual));
    }
    let mut h1phi = vec![0.0; dim];
    op1.matvec(&phi, &mut h1phi);
    let e1: f64 = phi.iter().zip(&h1phi).map(|(a, b)| a * b).sum();

    let e2 = if op0.is_diagonal() {
        let diag = op0.diagonal();
        let reference = phi
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
            .map(|(i, _)| i)
            .unwrap_or(0);
        let mut e2 = 0.0;
        for (m, &em) in diag.iter().enumerate() {
            if m == reference {
                continue;
            }
            let gap = e0 - em;
            if gap.abs() <= GAP_TOL {
                return Err(Error::DegenerateReference(gap.abs()));
            }
            e2 += h1phi[m].powi(2) / gap;
        }
        e2
    } else {
        if dim > DENSE_LIMIT {
            return Err(Error::Invalid(format!(
                "non-diagonal h0 needs a dense sector solve; dimension {dim} exceeds {DENSE_LIMIT}"
            )));
        }
        let eig = nalgebra::SymmetricEigen::new(op0.to_dense());
        let overlaps: Vec<f64> = (0..dim)
            .map(|m| eig.eigenvectors.column(m).iter().zip(&phi).map(|(a, b)| a * b).sum())
            .collect();
        let reference =
            (0..dim).max_by(|&a, &b| overlaps[a].abs().total_cmp(&overlaps[b].abs())).unwrap_or(0);
        let mut e2 = 0.0;
        for m in 0..dim {
            if m == reference {
                continue;
            }
            let gap = e0 - eig.eigenvalues[m];
            if gap.abs() <= GAP_TOL {
                return Err(Error::DegenerateReference(gap.abs()));
            }
            let element: f64 = eig.eigenvectors.column(m).iter().zip(&h1phi).map(|(a, b)| a * b).sum();
            e2 += element.powi(2) / gap;
        }
        e2
    };
    Ok(RsEnergies { e0, e1, e2 })
}

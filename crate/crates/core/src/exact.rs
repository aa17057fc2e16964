//! Sector-restricted exact diagonalization, ground spaces and fidelities.

use std::path::Path;
use std::sync::Arc;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pauli::PauliSum;
use crate::sector::{Sector, SectorOperator};
use crate::statevector::StateVector;

/// Sectors up to this dimension are diagonalized densely.
pub const DENSE_LIMIT: usize = 2000;
/// Eigenvalues closer than this to the lowest one belong to the ground space.
pub const DEGENERACY_TOL: f64 = 1e-8;
/// Residual norm at which a Ritz pair counts as converged.
pub const RESIDUAL_TOL: f64 = 1e-9;

const MAX_EXPANSIONS: usize = 5000;
const START_SEED: u64 = 0x5eed_1234;

/// Lowest eigenpairs of a sector operator, ascending. Vectors are sector
/// vectors of unit norm.
#[derive(Debug, Clone)]
pub struct Eigenpairs {
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<f64>>,
}

/// The `how_many` lowest eigenpairs of `op`.
pub fn sector_eigenpairs(op: &SectorOperator, how_many: usize) -> Result<Eigenpairs> {
    let dim = op.dim();
    let k = how_many.min(dim);
    if k == 0 {
        return Ok(Eigenpairs { values: Vec::new(), vectors: Vec::new() });
    }
    if dim <= DENSE_LIMIT {
        return Ok(dense_lowest(op.to_dense(), k));
    }
    block_krylov(dim, k, |x, y| op.matvec(x, y))
}

/// Lowest `how_many` eigenpairs of `h` inside the `(n_up, n_down)` sector.
pub fn sector_diagonalize(h: &PauliSum, n_up: usize, n_down: usize, how_many: usize) -> Result<Eigenpairs> {
    sector_eigenpairs(&SectorOperator::from_pauli(h, n_up, n_down)?, how_many)
}

/// Complete sector spectrum by a dense solve.
pub fn full_spectrum(op: &SectorOperator) -> Vec<f64> {
    let mut v: Vec<f64> = SymmetricEigen::new(op.to_dense()).eigenvalues.iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}

fn dense_lowest(m: DMatrix<f64>, k: usize) -> Eigenpairs {
    let eig = SymmetricEigen::new(m);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    order.truncate(k);
    Eigenpairs {
        values: order.iter().map(|&i| eig.eigenvalues[i]).collect(),
        vectors: order.iter().map(|&i| eig.eigenvectors.column(i).iter().copied().collect()).collect(),
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Orthogonalizes `v` against `basis` twice (classical Gram-Schmidt with
/// reorthogonalization) and returns the remaining norm.
fn orthogonalize(v: &mut [f64], basis: &[Vec<f64>]) -> f64 {
    for _ in 0..2 {
        for b in basis {
            let c = dot(b, v);
            v.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
        }
    }
    norm(v)
}

/// `Σ_j y[j] * vs[j]`.
fn combine(vs: &[Vec<f64>], y: impl Iterator<Item = f64>, dim: usize) -> Vec<f64> {
    let mut out = vec![0.0; dim];
    for (v, c) in vs.iter().zip(y) {
        out.iter_mut().zip(v).for_each(|(o, x)| *o += c * x);
    }
    out
}

/// Block Krylov eigensolver with thick restarts: the search space grows by
/// the residual block of the lowest Ritz pairs, which spans the same space
/// as one block-Lanczos step, and is compressed back onto the best Ritz
/// vectors when full. Every new direction is fully reorthogonalized.
fn block_krylov<F: Fn(&[f64], &mut [f64])>(dim: usize, k: usize, matvec: F) -> Result<Eigenpairs> {
    let block = (k + 2).max(8).min(dim);
    let max_space = (6 * block).max(48).min(dim);
    let keep = (max_space / 2).max(block).min(max_space);

    let mut rng = ChaCha8Rng::seed_from_u64(START_SEED);
    let mut v: Vec<Vec<f64>> = Vec::new();
    let mut av: Vec<Vec<f64>> = Vec::new();
    let mut t = DMatrix::<f64>::zeros(0, 0);

    let push = |x: Vec<f64>, v: &mut Vec<Vec<f64>>, av: &mut Vec<Vec<f64>>, t: &mut DMatrix<f64>| {
        let mut y = vec![0.0; dim];
        matvec(&x, &mut y);
        let n = v.len();
        let mut grown = DMatrix::zeros(n + 1, n + 1);
        grown.view_mut((0, 0), (n, n)).copy_from(t);
        for (i, vi) in v.iter().enumerate() {
            let e = dot(vi, &y);
            grown[(i, n)] = e;
            grown[(n, i)] = e;
        }
        grown[(n, n)] = dot(&x, &y);
        *t = grown;
        v.push(x);
        av.push(y);
    };

    for _ in 0..block {
        let mut x: Vec<f64> = (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect();
        let n = orthogonalize(&mut x, &v);
        x.iter_mut().for_each(|e| *e /= n);
        push(x, &mut v, &mut av, &mut t);
    }

    let mut worst = f64::INFINITY;
    for _ in 0..MAX_EXPANSIONS {
        let eig = SymmetricEigen::new(t.clone());
        let mut order: Vec<usize> = (0..v.len()).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let ritz = |i: usize| {
            let y = eig.eigenvectors.column(order[i]);
            (eig.eigenvalues[order[i]], combine(&v, y.iter().copied(), dim), combine(&av, y.iter().copied(), dim))
        };
        let lowest: Vec<(f64, Vec<f64>, Vec<f64>)> = (0..block.min(v.len())).map(ritz).collect();
        let residuals: Vec<Vec<f64>> =
            lowest.iter().map(|(th, x, ax)| ax.iter().zip(x).map(|(a, b)| a - th * b).collect()).collect();
        worst = residuals[..k].iter().map(|r| norm(r)).fold(0.0, f64::max);
        if worst <= RESIDUAL_TOL || v.len() == dim {
            return Ok(Eigenpairs {
                values: lowest[..k].iter().map(|p| p.0).collect(),
                vectors: lowest.into_iter().take(k).map(|p| p.1).collect(),
            });
        }
        if v.len() + block > max_space {
            let kept: Vec<(f64, Vec<f64>, Vec<f64>)> = (0..keep).map(ritz).collect();
            v.clear();
            av.clear();
            t = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(keep, kept.iter().map(|p| p.0)));
            for (_, x, ax) in kept {
                v.push(x);
                av.push(ax);
            }
        }
        let mut added = 0;
        for mut r in residuals {
            let before = norm(&r);
            if before <= RESIDUAL_TOL * 1e-3 {
                continue;
            }
            let after = orthogonalize(&mut r, &v);
            if after <= 1e-10 * before {
                continue;
            }
            r.iter_mut().for_each(|e| *e /= after);
            push(r, &mut v, &mut av, &mut t);
            added += 1;
        }
        if added == 0 {
            // residuals already in the space; refresh with random directions
            let mut x: Vec<f64> = (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect();
            let n = orthogonalize(&mut x, &v);
            if n <= 1e-12 {
                break;
            }
            x.iter_mut().for_each(|e| *e /= n);
            push(x, &mut v, &mut av, &mut t);
        }
    }
    Err(Error::NoConvergence { iterations: MAX_EXPANSIONS, residual: worst })
}

/// Exact ground energy with an orthonormal basis of the ground eigenspace,
/// stored as sector vectors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundSpace {
    pub n_qubits: usize,
    pub n_up: usize,
    pub n_down: usize,
    pub energy: f64,
    pub degeneracy_tol: f64,
    /// Sector bitstrings indexing the vector entries.
    pub states: Vec<u64>,
    pub vectors: Vec<Vec<f64>>,
}

/// Format tag written into exported ground spaces.
pub const GROUND_SPACE_FORMAT: &str = "hubbard-groundspace/1";

#[derive(Serialize, Deserialize)]
struct GroundSpaceFile {
    format: String,
    degeneracy: usize,
    #[serde(flatten)]
    space: GroundSpace,
}

impl GroundSpace {
    pub fn from_operator(op: &SectorOperator) -> Result<Self> {
        let mut how_many = 6;
        loop {
            let pairs = sector_eigenpairs(op, how_many)?;
            let e0 = pairs.values[0];
            let deg = pairs.values.iter().filter(|&&e| e - e0 <= DEGENERACY_TOL).count();
            if deg < pairs.values.len() || pairs.values.len() == op.dim() {
                let sector: &Arc<Sector> = op.sector();
                return Ok(GroundSpace {
                    n_qubits: sector.n_qubits(),
                    n_up: sector.n_up(),
                    n_down: sector.n_down(),
                    energy: e0,
                    degeneracy_tol: DEGENERACY_TOL,
                    states: sector.states().to_vec(),
                    vectors: pairs.vectors.into_iter().take(deg).collect(),
                });
            }
            how_many *= 2;
        }
    }

    pub fn compute(h: &PauliSum, n_up: usize, n_down: usize) -> Result<Self> {
        Self::from_operator(&SectorOperator::from_pauli(h, n_up, n_down)?)
    }

    pub fn degeneracy(&self) -> usize {
        self.vectors.len()
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    /// Ground basis vector `i` on the full register.
    pub fn state(&self, i: usize) -> StateVector {
        let mut psi = StateVector::zeros(self.n_qubits);
        let amps = psi.amplitudes_mut();
        for (&b, &x) in self.states.iter().zip(&self.vectors[i]) {
            amps[b as usize] = Complex64::new(x, 0.0);
        }
        psi
    }

    /// `Σ_i |<psi|Ψ_i>|²`.
    pub fn fidelity(&self, psi: &StateVector) -> Result<f64> {
        if psi.n_qubits() != self.n_qubits {
            return Err(Error::RegisterMismatch { expected: self.n_qubits, actual: psi.n_qubits() });
        }
        let amps = psi.amplitudes();
        Ok(self
            .vectors
            .iter()
            .map(|v| {
                let overlap: Complex64 =
                    self.states.iter().zip(v).map(|(&b, &x)| amps[b as usize].conj() * x).sum();
                overlap.norm_sqr()
            })
            .sum())
    }

    pub fn to_json(&self) -> Result<String> {
        let file = GroundSpaceFile {
            format: GROUND_SPACE_FORMAT.into(),
            degeneracy: self.degeneracy(),
            space: self.clone(),
        };
        Ok(serde_json::to_string(&file)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: GroundSpaceFile = serde_json::from_str(text)?;
        if file.format != GROUND_SPACE_FORMAT {
            return Err(Error::ArtifactMismatch(format!("unknown ground-space format {:?}", file.format)));
        }
        let gs = file.space;
        if file.degeneracy != gs.vectors.len() || gs.vectors.iter().any(|v| v.len() != gs.states.len()) {
            return Err(Error::ArtifactMismatch("ground-space vector layout is inconsistent".into()));
        }
        Ok(gs)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

/// Ground-space fidelity of `psi`.
pub fn fidelity(psi: &StateVector, gs: &GroundSpace) -> Result<f64> {
    gs.fidelity(psi)
}

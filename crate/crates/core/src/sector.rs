//! Fixed-(n_up, n_down) bitstring sectors and sparse operators restricted
//! to them.

use std::collections::BTreeMap;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::pauli::{i_pow, PauliSum};
use crate::statevector::{even_bits, Observable, StateVector};

/// Matrix elements below this magnitude are treated as structural zeros.
pub const ELEMENT_TOL: f64 = 1e-13;
/// Largest imaginary part tolerated in a sector matrix element.
pub const IMAG_TOL: f64 = 1e-12;

const ABSENT: u32 = u32::MAX;

/// Bitstrings with `n_up` even bits and `n_down` odd bits set, ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sector {
    n_qubits: usize,
    n_up: usize,
    n_down: usize,
    states: Vec<u64>,
    lookup: Vec<u32>,
}

impl Sector {
    pub fn new(n_qubits: usize, n_up: usize, n_down: usize) -> Result<Self> {
        if !n_qubits.is_multiple_of(2) || n_qubits > 24 {
            return Err(Error::Invalid(format!("unsupported register size {n_qubits}")));
        }
        let orbitals = n_qubits / 2;
        for count in [n_up, n_down] {
            if count > orbitals {
                return Err(Error::CountOutOfRange { count, modes: orbitals });
            }
        }
        let up_mask = even_bits(n_qubits);
        let mut states = Vec::new();
        let mut lookup = vec![ABSENT; 1 << n_qubits];
        for b in 0..(1u64 << n_qubits) {
            if (b & up_mask).count_ones() as usize == n_up && (b & !up_mask).count_ones() as usize == n_down {
                lookup[b as usize] = states.len() as u32;
                states.push(b);
            }
        }
        Ok(Sector { n_qubits, n_up, n_down, states, lookup })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn n_up(&self) -> usize {
        self.n_up
    }

    pub fn n_down(&self) -> usize {
        self.n_down
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn states(&self) -> &[u64] {
        &self.states
    }

    /// Position of a bitstring in the sector, if it belongs to it.
    pub fn index_of(&self, state: u64) -> Option<usize> {
        match self.lookup.get(state as usize) {
            Some(&i) if i != ABSENT => Some(i as usize),
            _ => None,
        }
    }

    /// Gathers the sector amplitudes of a full-register state.
    pub fn compress(&self, psi: &StateVector) -> Vec<Complex64> {
        self.states.iter().map(|&b| psi.amplitudes()[b as usize]).collect()
    }

    /// Scatters real sector amplitudes into a full-register state.
    pub fn expand_real(&self, v: &[f64]) -> StateVector {
        let mut psi = StateVector::zeros(self.n_qubits);
        let amps = psi.amplitudes_mut();
        for (&b, &x) in self.states.iter().zip(v) {
            amps[b as usize] = Complex64::new(x, 0.0);
        }
        psi
    }
}

/// Real symmetric operator restricted to one sector, in CSR form over
/// sector positions.
#[derive(Debug, Clone)]
pub struct SectorOperator {
    sector: Arc<Sector>,
    row_ptr: Vec<usize>,
    cols: Vec<u32>,
    vals: Vec<f64>,
}

impl SectorOperator {
    /// Builds the sector block of `h`, checking that `h` does not couple the
    /// sector to anything outside it and that every element is real.
    pub fn new(h: &PauliSum, sector: Arc<Sector>) -> Result<Self> {
        if h.n_qubits() != sector.n_qubits() {
            return Err(Error::RegisterMismatch { expected: sector.n_qubits(), actual: h.n_qubits() });
        }
        // H|c> = Σ coeff i^{n_y} (-1)^{|c & z|} |c ^ x>, grouped by flip mask
        let mut groups: BTreeMap<u64, Vec<(u64, Complex64)>> = BTreeMap::new();
        for term in h.terms() {
            let c = term.coeff * i_pow(term.key.y_count() as i64);
            groups.entry(term.key.x).or_default().push((term.key.z, c));
        }
        let groups: Vec<(u64, Vec<(u64, Complex64)>)> = groups.into_iter().collect();
        let rows: Vec<Result<Vec<(u32, f64)>>> = sector
            .states()
            .par_iter()
            .map(|&row| {
                let mut out = Vec::new();
                for (x, zs) in &groups {
                    let col = row ^ x;
                    let mut v = Complex64::default();
                    for &(z, c) in zs {
                        if (col & z).count_ones() & 1 == 1 {
                            v -= c;
                        } else {
                            v += c;
                        }
                    }
                    if v.norm() < ELEMENT_TOL {
                        continue;
                    }
                    let Some(j) = sector.index_of(col) else {
                        return Err(Error::SectorViolation { n_up: sector.n_up(), n_down: sector.n_down() });
                    };
                    if v.im.abs() > IMAG_TOL {
                        return Err(Error::ComplexMatrix);
                    }
                    out.push((j as u32, v.re));
                }
                out.sort_by_key(|e| e.0);
                Ok(out)
            })
            .collect();
        let mut row_ptr = Vec::with_capacity(sector.dim() + 1);
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        row_ptr.push(0);
        for r in rows {
            for (j, v) in r? {
                cols.push(j);
                vals.push(v);
            }
            row_ptr.push(cols.len());
        }
        Ok(SectorOperator { sector, row_ptr, cols, vals })
    }

    pub fn from_pauli(h: &PauliSum, n_up: usize, n_down: usize) -> Result<Self> {
        Self::new(h, Arc::new(Sector::new(h.n_qubits(), n_up, n_down)?))
    }

    pub fn sector(&self) -> &Arc<Sector> {
        &self.sector
    }

    pub fn dim(&self) -> usize {
        self.sector.dim()
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    /// `y = H x` on sector vectors.
    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        y.par_iter_mut().enumerate().for_each(|(r, out)| {
            let lo = self.row_ptr[r];
            let hi = self.row_ptr[r + 1];
            *out = self.cols[lo..hi].iter().zip(&self.vals[lo..hi]).map(|(&j, &v)| v * x[j as usize]).sum();
        });
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim())
            .map(|r| {
                let (lo, hi) = (self.row_ptr[r], self.row_ptr[r + 1]);
                self.cols[lo..hi]
                    .iter()
                    .zip(&self.vals[lo..hi])
                    .find(|(&j, _)| j as usize == r)
                    .map_or(0.0, |(_, &v)| v)
            })
            .collect()
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.dim()).all(|r| self.cols[self.row_ptr[r]..self.row_ptr[r + 1]].iter().all(|&j| j as usize == r))
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let n = self.dim();
        let mut m = DMatrix::zeros(n, n);
        for r in 0..n {
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                m[(r, self.cols[k] as usize)] = self.vals[k];
            }
        }
        m
    }
}

/// Acts on the sector part of a full-register state; amplitudes outside the
/// sector are dropped.
impl Observable for SectorOperator {
    fn n_qubits(&self) -> usize {
        self.sector.n_qubits()
    }

    fn apply(&self, psi: &StateVector) -> StateVector {
        let states = self.sector.states();
        let amps = psi.amplitudes();
        let values: Vec<Complex64> = (0..self.dim())
            .into_par_iter()
            .map(|r| {
                let (lo, hi) = (self.row_ptr[r], self.row_ptr[r + 1]);
                self.cols[lo..hi]
                    .iter()
                    .zip(&self.vals[lo..hi])
                    .map(|(&j, &v)| amps[states[j as usize] as usize] * v)
                    .sum()
            })
            .collect();
        let mut out = StateVector::zeros(psi.n_qubits());
        let o = out.amplitudes_mut();
        for (&b, v) in states.iter().zip(values) {
            o[b as usize] = v;
        }
        out
    }
}

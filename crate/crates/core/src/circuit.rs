//! Parameterised ansatz circuits and their adjoint-method gradients.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::gates::{DiagonalGenerator, HoppingGenerator, PoolGenerator};
use crate::statevector::{Observable, StateVector};

#[derive(Debug, Clone)]
pub enum GateKind {
    /// `exp(θ (O - O†))`, real orthogonal.
    PoolRotation(Arc<PoolGenerator>),
    /// `exp(-iθ h)` for a single hopping pair.
    HoppingRotation(Arc<HoppingGenerator>),
    /// `exp(-iθ d)` for a diagonal operator.
    DiagonalPhase(Arc<DiagonalGenerator>),
}

impl GateKind {
    fn apply(&self, angle: f64, psi: &mut StateVector) {
        match self {
            GateKind::PoolRotation(g) => g.apply_unitary(angle, psi),
            GateKind::HoppingRotation(g) => g.apply_unitary(angle, psi),
            GateKind::DiagonalPhase(g) => g.apply_unitary(angle, psi),
        }
    }

    /// `d<H>/dangle = 2 Re <lambda| G' |psi>` with `dU/dangle = G' U`.
    fn derivative(&self, lambda: &StateVector, psi: &StateVector) -> f64 {
        match self {
            GateKind::PoolRotation(g) => 2.0 * g.matrix_element(lambda, psi).re,
            GateKind::HoppingRotation(g) => 2.0 * g.matrix_element(lambda, psi).im,
            GateKind::DiagonalPhase(g) => 2.0 * g.matrix_element(lambda, psi).im,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            GateKind::PoolRotation(_) => "pool",
            GateKind::HoppingRotation(_) => "hopping",
            GateKind::DiagonalPhase(_) => "diagonal",
        }
    }
}

/// One gate; its angle is `scale * params[param]`.
#[derive(Debug, Clone)]
pub struct Gate {
    pub kind: GateKind,
    pub param: usize,
    pub scale: f64,
}

/// Ordered gates applied to a fixed initial state. Several gates may share
/// one parameter.
#[derive(Debug, Clone)]
pub struct AnsatzCircuit {
    initial: StateVector,
    gates: Vec<Gate>,
    n_params: usize,
}

impl AnsatzCircuit {
    pub fn new(initial: StateVector) -> Self {
        AnsatzCircuit { initial, gates: Vec::new(), n_params: 0 }
    }

    pub fn initial(&self) -> &StateVector {
        &self.initial
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn n_params(&self) -> usize {
        self.n_params
    }

    pub fn n_qubits(&self) -> usize {
        self.initial.n_qubits()
    }

    /// Reserves a fresh parameter slot.
    pub fn new_param(&mut self) -> usize {
        self.n_params += 1;
        self.n_params - 1
    }

    pub fn push(&mut self, kind: GateKind, param: usize, scale: f64) -> Result<()> {
        let n = match &kind {
            GateKind::PoolRotation(g) => g.n_qubits(),
            GateKind::HoppingRotation(g) => g.n_qubits(),
            GateKind::DiagonalPhase(g) => g.n_qubits(),
        };
        if n != self.n_qubits() {
            return Err(Error::RegisterMismatch { expected: self.n_qubits(), actual: n });
        }
        if param >= self.n_params {
            return Err(Error::Invalid(format!("parameter slot {param} not allocated")));
        }
        if !scale.is_finite() {
            return Err(Error::Invalid("gate scale must be finite".into()));
        }
        self.gates.push(Gate { kind, param, scale });
        Ok(())
    }

    /// Appends a pool rotation with its own fresh parameter.
    pub fn push_pool(&mut self, gen: Arc<PoolGenerator>) -> Result<usize> {
        let p = self.new_param();
        self.push(GateKind::PoolRotation(gen), p, 1.0)?;
        Ok(p)
    }

    fn check_params(&self, params: &[f64]) -> Result<()> {
        if params.len() != self.n_params {
            return Err(Error::Invalid(format!(
                "{} parameters for a circuit with {}",
                params.len(),
                self.n_params
            )));
        }
        if params.iter().any(|p| !p.is_finite()) {
            return Err(Error::Invalid("non-finite circuit parameter".into()));
        }
        Ok(())
    }

    /// Final state for the given parameters.
    pub fn prepare(&self, params: &[f64]) -> Result<StateVector> {
        self.check_params(params)?;
        let mut psi = self.initial.clone();
        for g in &self.gates {
            g.kind.apply(g.scale * params[g.param], &mut psi);
        }
        Ok(psi)
    }

    pub fn energy(&self, params: &[f64], h: &dyn Observable) -> Result<f64> {
        let psi = self.prepare(params)?;
        Ok(h.expectation_value(&psi))
    }

    /// Energy, gradient and final state via one forward and one reverse
    /// sweep (adjoint differentiation).
    pub fn energy_and_gradient(
        &self,
        params: &[f64],
        h: &dyn Observable,
    ) -> Result<(f64, Vec<f64>, StateVector)> {
        let final_state = self.prepare(params)?;
        let mut lambda = h.apply(&final_state);
        let energy = final_state.inner(&lambda).re;
        let mut grad = vec![0.0; self.n_params];
        let mut psi = final_state.clone();
        for g in self.gates.iter().rev() {
            let angle = g.scale * params[g.param];
            grad[g.param] += g.scale * g.kind.derivative(&lambda, &psi);
            g.kind.apply(-angle, &mut psi);
            g.kind.apply(-angle, &mut lambda);
        }
        Ok((energy, grad, final_state))
    }
}

/// Exact `d<h>/dθ_i` for every parameter of the circuit.
pub fn circuit_gradient(c: &AnsatzCircuit, params: &[f64], h: &dyn Observable) -> Result<Vec<f64>> {
    Ok(c.energy_and_gradient(params, h)?.1)
}

/// `<psi|[h, A]|psi> = 2 Re <h psi|A psi>` given `h_psi = h|psi>`.
pub fn commutator_expectation(gen: &PoolGenerator, psi: &StateVector, h_psi: &StateVector) -> f64 {
    2.0 * gen.matrix_element(h_psi, psi).re
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::{PauliString, PauliSum};
    use num_complex::Complex64;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_hermitian(n: usize, terms: usize, rng: &mut ChaCha8Rng) -> PauliSum {
        let strings = (0..terms).map(|_| {
            let mask = (1u64 << n) - 1;
            let key = crate::pauli::PauliKey { x: rng.random::<u64>() & mask, z: rng.random::<u64>() & mask };
            PauliString { coeff: Complex64::new(rng.random_range(-1.0..1.0), 0.0), key }
        });
        PauliSum::from_strings(n, strings)
    }

    #[test]
    fn zero_parameter_circuit_is_initial_state() {
        let psi = crate::statevector::basis_state(&[0, 1], 6).unwrap();
        let mut c = AnsatzCircuit::new(psi.clone());
        c.push_pool(Arc::new(PoolGenerator::from_qubits(2, 3, 1, 0, 6).unwrap())).unwrap();
        assert_eq!(c.prepare(&[0.0]).unwrap(), psi);
        assert!(c.prepare(&[0.0, 1.0]).is_err());
        assert!(c.prepare(&[f64::NAN]).is_err());
    }

    #[test]
    fn adjoint_matches_finite_differences_small() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let n = 6;
        let h = random_hermitian(n, 25, &mut rng);
        let psi = crate::statevector::basis_state(&[0, 1, 2], n).unwrap();
        let mut c = AnsatzCircuit::new(psi);
        c.push_pool(Arc::new(PoolGenerator::from_qubits(4, 5, 1, 0, n).unwrap())).unwrap();
        let p = c.new_param();
        c.push(GateKind::HoppingRotation(Arc::new(HoppingGenerator::between(2, 3, n).unwrap())), p, 1.0)
            .unwrap();
        c.push(GateKind::HoppingRotation(Arc::new(HoppingGenerator::between(0, 5, n).unwrap())), p, 0.5)
            .unwrap();
        let d = PauliSum::from_strings(n, ["0.7 Z0 Z3".parse().unwrap(), "-0.2 Z4".parse().unwrap()]);
        let q = c.new_param();
        c.push(GateKind::DiagonalPhase(Arc::new(DiagonalGenerator::new(&d).unwrap())), q, 1.0).unwrap();
        c.push_pool(Arc::new(PoolGenerator::from_qubits(2, 3, 5, 4, n).unwrap())).unwrap();
        let params: Vec<f64> = (0..c.n_params()).map(|_| rng.random_range(-1.0..1.0)).collect();
        let (_, grad, _) = c.energy_and_gradient(&params, &h).unwrap();
        for i in 0..params.len() {
            let step = 1e-5;
            let mut plus = params.clone();
            plus[i] += step;
            let mut minus = params.clone();
            minus[i] -= step;
            let fd = (c.energy(&plus, &h).unwrap() - c.energy(&minus, &h).unwrap()) / (2.0 * step);
            assert!((fd - grad[i]).abs() < 1e-8, "param {i}: {fd} vs {}", grad[i]);
        }
    }
}

//! Deterministic ADAM with a windowed energy-convergence test.

use serde::{Deserialize, Serialize};

use crate::circuit::AnsatzCircuit;
use crate::error::{Error, Result};
use crate::statevector::{Observable, StateVector};

/// Gradients at or below this magnitude count as exactly stationary.
pub const STATIONARY_TOL: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdamConfig {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    /// Energy change below which a step counts towards convergence.
    pub tol: f64,
    /// Consecutive sub-tolerance steps required.
    pub window: usize,
    pub max_steps: usize,
}

impl Default for AdamConfig {
    fn default() -> Self {
        AdamConfig { lr: 1e-2, beta1: 0.9, beta2: 0.999, epsilon: 1e-8, tol: 1e-2, window: 10, max_steps: 2000 }
    }
}

impl AdamConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [("lr", self.lr), ("epsilon", self.epsilon), ("tol", self.tol)];
        if let Some((name, v)) = positive.iter().find(|(_, v)| !(v.is_finite() && *v > 0.0)) {
            return Err(Error::Invalid(format!("{name} must be positive and finite, got {v}")));
        }
        for (name, b) in [("beta1", self.beta1), ("beta2", self.beta2)] {
            if !(0.0..1.0).contains(&b) {
                return Err(Error::Invalid(format!("{name} must lie in [0, 1), got {b}")));
            }
        }
        if self.window == 0 {
            return Err(Error::Invalid("convergence window must be at least 1".into()));
        }
        Ok(())
    }
}

/// Moment estimates and step counter of one ADAM run.
#[derive(Debug, Clone)]
pub struct Adam {
    config: AdamConfig,
    m: Vec<f64>,
    v: Vec<f64>,
    t: i32,
}

impl Adam {
    pub fn new(config: AdamConfig, n_params: usize) -> Self {
        Adam { config, m: vec![0.0; n_params], v: vec![0.0; n_params], t: 0 }
    }

    pub fn config(&self) -> &AdamConfig {
        &self.config
    }

    /// Appends zero moments for newly added parameters; existing moments and
    /// the step counter are kept.
    pub fn grow(&mut self, n_params: usize) {
        self.m.resize(n_params, 0.0);
        self.v.resize(n_params, 0.0);
    }

    /// One bias-corrected update of `params` against `grad`.
    pub fn step(&mut self, params: &mut [f64], grad: &[f64]) {
        let c = &self.config;
        self.t += 1;
        let b1t = 1.0 - c.beta1.powi(self.t);
        let b2t = 1.0 - c.beta2.powi(self.t);
        for i in 0..params.len() {
            self.m[i] = c.beta1 * self.m[i] + (1.0 - c.beta1) * grad[i];
            self.v[i] = c.beta2 * self.v[i] + (1.0 - c.beta2) * grad[i] * grad[i];
            let m_hat = self.m[i] / b1t;
            let v_hat = self.v[i] / b2t;
            params[i] -= c.lr * m_hat / (v_hat.sqrt() + c.epsilon);
        }
    }
}

/// Result of one optimization. `params`, `energy` and `final_state` belong
/// to the lowest-energy point evaluated, so a run never ends above its
/// starting energy.
#[derive(Debug, Clone)]
pub struct AdamOutcome {
    pub params: Vec<f64>,
    pub energy: f64,
    /// Energy at every evaluated point; entry 0 is the starting point.
    pub energies: Vec<f64>,
    /// Number of parameter updates taken.
    pub steps: usize,
    pub converged: bool,
    pub final_state: StateVector,
}

/// Minimizes `<h>` over the circuit parameters starting from `params`.
///
/// `observe(step, energy, state)` sees every evaluated point, starting with
/// step 0. The run stops once `window` consecutive steps each change the
/// energy by less than `tol` at an energy no higher than the starting one,
/// when the gradient vanishes, or after `max_steps` updates (reported as not
/// converged).
pub fn adam_optimize(
    circuit: &AnsatzCircuit,
    h: &dyn Observable,
    params: Vec<f64>,
    config: &AdamConfig,
    observe: impl FnMut(usize, f64, &StateVector) -> Result<()>,
) -> Result<AdamOutcome> {
    let mut adam = Adam::new(*config, params.len());
    adam_optimize_with(circuit, h, params, &mut adam, observe)
}

/// As [`adam_optimize`], continuing from existing optimizer state.
pub fn adam_optimize_with(
    circuit: &AnsatzCircuit,
    h: &dyn Observable,
    params: Vec<f64>,
    adam: &mut Adam,
    mut observe: impl FnMut(usize, f64, &StateVector) -> Result<()>,
) -> Result<AdamOutcome> {
    let config = *adam.config();
    config.validate()?;
    let mut params = params;
    adam.grow(params.len());
    let mut energies: Vec<f64> = Vec::new();
    let mut quiet = 0usize;
    let mut step = 0usize;
    let mut best: Option<(f64, Vec<f64>, StateVector)> = None;
    loop {
        let (energy, grad, state) = circuit.energy_and_gradient(&params, h)?;
        if !energy.is_finite() || grad.iter().any(|g| !g.is_finite()) {
            return Err(Error::NonFiniteEnergy { step });
        }
        observe(step, energy, &state)?;
        if let Some(&prev) = energies.last() {
            quiet = if (energy - prev).abs() < config.tol { quiet + 1 } else { 0 };
        }
        energies.push(energy);
        let stationary = grad.iter().all(|g| g.abs() <= STATIONARY_TOL);
        // a plateau above the starting energy is an ADAM transient, not an optimum
        let settled = quiet >= config.window && energy <= energies[0];
        let converged = stationary || settled;
        let done = converged || step >= config.max_steps;
        if best.as_ref().is_none_or(|b| energy < b.0) {
            best = Some((energy, params.clone(), state));
        }
        if done {
            let (energy, params, final_state) = best.expect("at least one evaluation");
            return Ok(AdamOutcome { params, energy, energies, steps: step, converged, final_state });
        }
        adam.step(&mut params, &grad);
        step += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_step_has_size_lr() {
        let config = AdamConfig::default();
        let mut adam = Adam::new(config, 3);
        let mut p = vec![0.0; 3];
        adam.step(&mut p, &[2.5, -0.01, 1e-3]);
        for (x, sign) in p.iter().zip([-1.0, 1.0, -1.0]) {
            assert!((x - sign * config.lr).abs() < 1e-6 * config.lr.max(1.0));
        }
    }

    #[test]
    fn zero_gradient_leaves_parameters() {
        let mut adam = Adam::new(AdamConfig::default(), 2);
        let mut p = vec![0.3, -0.2];
        adam.step(&mut p, &[0.0, 0.0]);
        assert_eq!(p, vec![0.3, -0.2]);
    }

    #[test]
    fn invalid_configs() {
        for c in [
            AdamConfig { lr: 0.0, ..Default::default() },
            AdamConfig { beta2: 1.0, ..Default::default() },
            AdamConfig { window: 0, ..Default::default() },
        ] {
            assert!(c.validate().is_err());
        }
    }
}

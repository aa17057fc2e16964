//! Hamiltonian-variational baseline: layers of half on-site phase, vertical
//! and horizontal hopping matchings, and another half on-site phase.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::adam::{adam_optimize, AdamConfig};
use crate::circuit::{AnsatzCircuit, GateKind};
use crate::error::{Error, Result};
use crate::exact::GroundSpace;
use crate::gates::{DiagonalGenerator, HoppingGenerator};
use crate::hamiltonian::{build_real, double_occupancy};
use crate::lattice::{fermi_sea, real_orbitals, FermiSea, GridSpec, SpinOrbital};
use crate::pauli::PauliSum;
use crate::sector::SectorOperator;
use crate::slater::slater_statevector_real;
use crate::statevector::StateVector;
use crate::vipsa::StepRecord;

/// Gradients at or below this size leave ADAM stuck at its start.
pub const STALL_TOL: f64 = 1e-12;

/// Splits `edges` into vertex-disjoint sets, assigning each edge in order
/// to the first set it fits.
pub fn greedy_matchings(edges: &[(usize, usize)]) -> Vec<Vec<(usize, usize)>> {
    let mut matchings: Vec<Vec<(usize, usize)>> = Vec::new();
    for &(a, b) in edges {
        let free = |m: &Vec<(usize, usize)>| m.iter().all(|&(c, d)| a != c && a != d && b != c && b != d);
        match matchings.iter_mut().find(|m| free(m)) {
            Some(m) => m.push((a, b)),
            None => matchings.push(vec![(a, b)]),
        }
    }
    matchings
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HvaLayout {
    pub layers: usize,
    pub horizontal: Vec<Vec<(usize, usize)>>,
    pub vertical: Vec<Vec<(usize, usize)>>,
}

impl HvaLayout {
    pub fn new(grid: &GridSpec, layers: usize) -> Self {
        HvaLayout {
            layers,
            horizontal: greedy_matchings(&grid.horizontal_edges()),
            vertical: greedy_matchings(&grid.vertical_edges()),
        }
    }

    /// One on-site parameter plus one per matching.
    pub fn params_per_layer(&self) -> usize {
        1 + self.horizontal.len() + self.vertical.len()
    }

    pub fn n_params(&self) -> usize {
        self.layers * self.params_per_layer()
    }
}

/// Circuit over `initial` following `layout`. Per layer the gates are
/// `exp(-i θ_U/2 D)`, then every vertical matching, then every horizontal
/// matching, then `exp(-i θ_U/2 D)` again, with `D = Σ n_up n_down`.
pub fn build_hva(grid: &GridSpec, layout: &HvaLayout, initial: StateVector) -> Result<AnsatzCircuit> {
    let n = grid.n_qubits();
    if initial.n_qubits() != n {
        return Err(Error::RegisterMismatch { expected: n, actual: initial.n_qubits() });
    }
    let onsite = Arc::new(DiagonalGenerator::new(&double_occupancy(grid.n_sites())?)?);
    let hop_gates = |m: &[(usize, usize)]| -> Result<Vec<Arc<HoppingGenerator>>> {
        let mut out = Vec::new();
        for &(i, j) in m {
            for (p, q) in [
                (SpinOrbital::up(i), SpinOrbital::up(j)),
                (SpinOrbital::down(i), SpinOrbital::down(j)),
            ] {
                out.push(Arc::new(HoppingGenerator::between(p.qubit(), q.qubit(), n)?));
            }
        }
        Ok(out)
    };
    let vertical: Vec<_> = layout.vertical.iter().map(|m| hop_gates(m)).collect::<Result<_>>()?;
    let horizontal: Vec<_> = layout.horizontal.iter().map(|m| hop_gates(m)).collect::<Result<_>>()?;

    let mut c = AnsatzCircuit::new(initial);
    for _ in 0..layout.layers {
        let theta_u = c.new_param();
        c.push(GateKind::DiagonalPhase(onsite.clone()), theta_u, 0.5)?;
        for group in vertical.iter().chain(&horizontal) {
            let p = c.new_param();
            for g in group {
                c.push(GateKind::HoppingRotation(g.clone()), p, 1.0)?;
            }
        }
        c.push(GateKind::DiagonalPhase(onsite.clone()), theta_u, 0.5)?;
    }
    Ok(c)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HvaConfig {
    pub layers: usize,
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub adam_epsilon: f64,
    pub tol: f64,
    pub convergence_window: usize,
    pub max_steps: usize,
    /// Half-width of the uniform kick applied when the all-zero start is
    /// exactly stationary.
    pub jitter: f64,
    pub seed: u64,
}

impl Default for HvaConfig {
    fn default() -> Self {
        HvaConfig {
            layers: 10,
            lr: 1e-2,
            beta1: 0.9,
            beta2: 0.999,
            adam_epsilon: 1e-8,
            tol: 1e-8,
            convergence_window: 10,
            max_steps: 2000,
            jitter: 1e-3,
            seed: 7,
        }
    }
}

impl HvaConfig {
    pub fn adam(&self) -> AdamConfig {
        AdamConfig {
            lr: self.lr,
            beta1: self.beta1,
            beta2: self.beta2,
            epsilon: self.adam_epsilon,
            tol: self.tol,
            window: self.convergence_window,
            max_steps: self.max_steps,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.layers == 0 {
            return Err(Error::Invalid("HVA needs at least one layer".into()));
        }
        if !(self.jitter.is_finite() && self.jitter >= 0.0) {
            return Err(Error::Invalid(format!("jitter must be non-negative, got {}", self.jitter)));
        }
        self.adam().validate()
    }
}

#[derive(Debug, Clone)]
pub struct HvaProblem {
    pub grid: GridSpec,
    pub sea: FermiSea,
    /// Real Slater determinant in the site register.
    pub initial: StateVector,
    pub hamiltonian: PauliSum,
    pub operator: SectorOperator,
}

impl HvaProblem {
    pub fn new(grid: &GridSpec, n_up: usize, n_down: usize) -> Result<Self> {
        Self::with_sea(grid, fermi_sea(grid, n_up, n_down)?)
    }

    /// Starts from the real orbitals of a specific Fermi-sea occupation.
    pub fn with_sea(grid: &GridSpec, sea: FermiSea) -> Result<Self> {
        let initial = slater_statevector_real(&real_orbitals(grid), &sea.occupied_up, &sea.occupied_down)?;
        let hamiltonian = build_real(grid)?;
        let operator = SectorOperator::from_pauli(&hamiltonian, sea.occupied_up.len(), sea.occupied_down.len())?;
        Ok(HvaProblem { grid: *grid, sea, initial, hamiltonian, operator })
    }

    pub fn ground_space(&self) -> Result<GroundSpace> {
        GroundSpace::from_operator(&self.operator)
    }

    pub fn circuit(&self, layers: usize) -> Result<AnsatzCircuit> {
        build_hva(&self.grid, &HvaLayout::new(&self.grid, layers), self.initial.clone())
    }
}

#[derive(Debug, Clone)]
pub struct HvaRun {
    pub layout: HvaLayout,
    pub steps: Vec<StepRecord>,
    /// Largest gradient component at the all-zero start.
    pub initial_max_gradient: f64,
    /// Whether the stationary start was perturbed.
    pub jittered: bool,
    pub params: Vec<f64>,
    pub energy: f64,
    pub final_state: StateVector,
    pub converged: bool,
}

impl HvaRun {
    pub fn final_fidelity(&self) -> Option<f64> {
        self.steps.last().and_then(|s| s.fidelity)
    }
}

/// Optimizes all layer parameters from zero. Step 0 is always the all-zero
/// point. Because that point is exactly stationary for a real Slater start,
/// the parameters are then kicked by a seeded uniform jitter before ADAM
/// takes over; the kicked point is recorded as step 1.
pub fn hva_run(
    problem: &HvaProblem,
    config: &HvaConfig,
    ground: Option<&GroundSpace>,
    mut observe: impl FnMut(usize, f64, &StateVector) -> Result<()>,
) -> Result<HvaRun> {
    config.validate()?;
    let layout = HvaLayout::new(&problem.grid, config.layers);
    let circuit = build_hva(&problem.grid, &layout, problem.initial.clone())?;
    let h = &problem.operator;
    let fidelity_of = |psi: &StateVector| ground.map(|g| g.fidelity(psi)).transpose();

    let mut params = vec![0.0; circuit.n_params()];
    let (e0, grad0, psi0) = circuit.energy_and_gradient(&params, h)?;
    let initial_max_gradient = grad0.iter().fold(0.0f64, |m, g| m.max(g.abs()));
    let mut steps = vec![StepRecord { step: 0, epoch: 0, energy: e0, fidelity: fidelity_of(&psi0)? }];
    observe(0, e0, &psi0)?;

    let jittered = initial_max_gradient <= STALL_TOL && config.jitter > 0.0;
    let offset = usize::from(jittered);
    if jittered {
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        params.iter_mut().for_each(|p| *p = rng.random_range(-config.jitter..=config.jitter));
    }
    let outcome = adam_optimize(&circuit, h, params, &config.adam(), |step, e, psi| {
        if step == 0 && !jittered {
            return Ok(());
        }
        steps.push(StepRecord { step: step + offset, epoch: 0, energy: e, fidelity: fidelity_of(psi)? });
        observe(step + offset, e, psi)
    })?;
    Ok(HvaRun {
        layout,
        steps,
        initial_max_gradient,
        jittered,
        params: outcome.params,
        energy: outcome.energy,
        final_state: outcome.final_state,
        converged: outcome.converged,
    })
}

//! The adaptive interaction-picture ansatz: pool construction, gradient
//! screening, selection, epoch loop and the first-order parameter oracle.

use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::adam::{adam_optimize_with, Adam, AdamConfig};
use crate::circuit::{commutator_expectation, AnsatzCircuit};
use crate::error::{Error, Result};
use crate::exact::GroundSpace;
use crate::gates::PoolGenerator;
use crate::hamiltonian::{build_kspace, interaction_table, InteractionQuadruple, KSpaceHamiltonian};
use crate::lattice::{enumerate_modes, fermi_sea, FermiSea, GridSpec};
use crate::pauli::PauliSum;
use crate::sector::SectorOperator;
use crate::statevector::{basis_state, Observable, StateVector};

/// Energy denominators at or below this magnitude are divergent.
pub const EPS_TOL: f64 = 1e-9;

/// One pool element `A = O - O†` built from an interaction quadruple.
#[derive(Debug, Clone)]
pub struct PoolOperator {
    pub quadruple: InteractionQuadruple,
    pub generator: Arc<PoolGenerator>,
    pub label: String,
}

impl PoolOperator {
    pub fn eps(&self) -> f64 {
        self.quadruple.eps
    }

    pub fn v(&self) -> f64 {
        self.quadruple.v
    }

    pub fn pauli_image(&self) -> PauliSum {
        self.generator.pauli_image()
    }
}

/// How the ordered interaction table splits up during pool construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PoolCensus {
    /// Ordered quadruples with nonzero coupling.
    pub ordered_nonzero: usize,
    /// `a = d, b = c`: `O` is Hermitian and `A` vanishes.
    pub diagonal: usize,
    /// Off-diagonal quadruples with `ε = 0`.
    pub zero_eps: usize,
    /// Remaining quadruples that reuse an orbital (`a = d` or `b = c`).
    pub repeated: usize,
    /// One operator per conjugate pair of what is left.
    pub pool_size: usize,
}

#[derive(Debug, Clone)]
pub struct Pool {
    pub operators: Vec<PoolOperator>,
    pub census: PoolCensus,
}

impl Pool {
    pub fn len(&self) -> usize {
        self.operators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.operators.is_empty()
    }
}

/// Pool from an interaction table on an `n_qubits` mode register. Each
/// conjugate pair `{A, -A}` is kept once, as the quadruple that precedes its
/// conjugate lexicographically.
pub fn build_pool_from_table(table: &[InteractionQuadruple], n_qubits: usize) -> Result<Pool> {
    let mut census =
        PoolCensus { ordered_nonzero: table.len(), diagonal: 0, zero_eps: 0, repeated: 0, pool_size: 0 };
    let mut operators = Vec::new();
    for q in table {
        if q.is_diagonal() {
            census.diagonal += 1;
        } else if q.eps.abs() <= EPS_TOL {
            census.zero_eps += 1;
        } else if q.a == q.d || q.b == q.c {
            census.repeated += 1;
        } else if (q.a, q.b, q.c, q.d) < (q.d, q.c, q.b, q.a) {
            let generator = Arc::new(PoolGenerator::new(&q.ladder_term(), n_qubits)?);
            operators.push(PoolOperator { quadruple: *q, generator, label: q.label() });
        }
    }
    census.pool_size = operators.len();
    Ok(Pool { operators, census })
}

pub fn build_pool(grid: &GridSpec) -> Result<Pool> {
    grid.validate()?;
    build_pool_from_table(&interaction_table(grid), grid.n_qubits())
}

/// `g_i = <psi|[h, A_i]|psi>` for every pool operator.
pub fn pool_gradients(psi: &StateVector, h: &dyn Observable, pool: &[PoolOperator]) -> Vec<f64> {
    let h_psi = h.apply(psi);
    pool.par_iter().map(|p| commutator_expectation(&p.generator, psi, &h_psi)).collect()
}

/// Indices with `|g_i| >= r max|g|`, by descending magnitude and then by
/// index. Empty when every gradient is zero.
pub fn select(gradients: &[f64], r: f64) -> Vec<usize> {
    let max = gradients.iter().fold(0.0f64, |m, g| m.max(g.abs()));
    if max == 0.0 {
        return Vec::new();
    }
    let mut chosen: Vec<usize> = (0..gradients.len()).filter(|&i| gradients[i].abs() >= r * max).collect();
    chosen.sort_by(|&a, &b| gradients[b].abs().total_cmp(&gradients[a].abs()).then(a.cmp(&b)));
    chosen
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VipsaConfig {
    /// Selection ratio.
    pub r: f64,
    /// Terminal pool-gradient tolerance.
    pub eps1: f64,
    /// Per-step energy change that counts towards epoch convergence.
    pub eps2: f64,
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub adam_epsilon: f64,
    pub max_epochs: usize,
    pub max_inner_steps: usize,
    pub convergence_window: usize,
    /// Carry ADAM moments over from one epoch to the next.
    pub warm_start: bool,
}

impl Default for VipsaConfig {
    fn default() -> Self {
        VipsaConfig {
            r: 0.1,
            eps1: 1e-2,
            eps2: 1e-2,
            lr: 1e-2,
            beta1: 0.9,
            beta2: 0.999,
            adam_epsilon: 1e-8,
            max_epochs: 30,
            max_inner_steps: 2000,
            convergence_window: 10,
            warm_start: true,
        }
    }
}

impl VipsaConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.r > 0.0 && self.r <= 1.0) {
            return Err(Error::Invalid(format!("selection ratio r must lie in (0, 1], got {}", self.r)));
        }
        if !(self.eps1.is_finite() && self.eps1 > 0.0) {
            return Err(Error::Invalid(format!("eps1 must be positive, got {}", self.eps1)));
        }
        self.adam().validate()
    }

    pub fn adam(&self) -> AdamConfig {
        AdamConfig {
            lr: self.lr,
            beta1: self.beta1,
            beta2: self.beta2,
            epsilon: self.adam_epsilon,
            tol: self.eps2,
            window: self.convergence_window,
            max_steps: self.max_inner_steps,
        }
    }
}

/// Summary of one epoch: the gradient screen at its start, the operators
/// it appended and the optimum it reached.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochRecord {
    pub epoch: usize,
    pub max_gradient: f64,
    pub selected: Vec<String>,
    pub n_params: usize,
    pub inner_steps: usize,
    pub inner_converged: bool,
    pub energy: f64,
    pub fidelity: Option<f64>,
}

/// One evaluated optimizer point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub step: usize,
    pub epoch: usize,
    pub energy: f64,
    pub fidelity: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    /// Largest pool gradient fell below `eps1`.
    GradientTolerance,
    /// Nothing passed the selection threshold.
    EmptySelection,
    MaxEpochs,
}

/// Everything a VIPSA run needs besides its configuration.
#[derive(Debug, Clone)]
pub struct VipsaProblem {
    pub grid: GridSpec,
    pub sea: FermiSea,
    /// Fermi-sea basis state in the mode register.
    pub initial: StateVector,
    pub hamiltonian: KSpaceHamiltonian,
    /// Sector block of the full mode-space Hamiltonian.
    pub operator: SectorOperator,
    pub pool: Pool,
}

impl VipsaProblem {
    pub fn new(grid: &GridSpec, n_up: usize, n_down: usize) -> Result<Self> {
        Self::with_sea(grid, fermi_sea(grid, n_up, n_down)?)
    }

    /// Uses a specific Fermi-sea occupation (e.g. another member of a
    /// degenerate shell).
    pub fn with_sea(grid: &GridSpec, sea: FermiSea) -> Result<Self> {
        let modes = enumerate_modes(grid);
        let initial = basis_state(&sea.occupied_qubits(&modes), grid.n_qubits())?;
        let hamiltonian = build_kspace(grid)?;
        let operator =
            SectorOperator::from_pauli(&hamiltonian.total, sea.occupied_up.len(), sea.occupied_down.len())?;
        let pool = build_pool_from_table(&hamiltonian.quadruples, grid.n_qubits())?;
        Ok(VipsaProblem { grid: *grid, sea, initial, hamiltonian, operator, pool })
    }

    pub fn n_up(&self) -> usize {
        self.sea.occupied_up.len()
    }

    pub fn n_down(&self) -> usize {
        self.sea.occupied_down.len()
    }

    /// Exact ground space of the mode-space Hamiltonian in this sector.
    pub fn ground_space(&self) -> Result<GroundSpace> {
        GroundSpace::from_operator(&self.operator)
    }
}

#[derive(Debug, Clone)]
pub struct VipsaRun {
    pub epochs: Vec<EpochRecord>,
    pub steps: Vec<StepRecord>,
    pub circuit: AnsatzCircuit,
    pub params: Vec<f64>,
    pub final_state: StateVector,
    pub termination: Termination,
}

impl VipsaRun {
    pub fn final_energy(&self) -> f64 {
        self.epochs.last().map_or(f64::NAN, |e| e.energy)
    }

    pub fn final_fidelity(&self) -> Option<f64> {
        self.epochs.last().and_then(|e| e.fidelity)
    }

    /// Ended through a tolerance rather than by running out of epochs, and
    /// the last inner optimization converged.
    pub fn converged(&self) -> bool {
        self.termination != Termination::MaxEpochs && self.epochs.iter().all(|e| e.inner_converged)
    }
}

/// Runs the adaptive loop. `observe(epoch, step, energy, state)` sees every
/// state the optimizer evaluates, with a global step counter.
pub fn vipsa_run(
    problem: &VipsaProblem,
    config: &VipsaConfig,
    ground: Option<&GroundSpace>,
    mut observe: impl FnMut(usize, usize, f64, &StateVector) -> Result<()>,
) -> Result<VipsaRun> {
    config.validate()?;
    let mut adam = Adam::new(config.adam(), 0);
    let h = &problem.operator;
    let fidelity_of = |psi: &StateVector| ground.map(|g| g.fidelity(psi)).transpose();

    let mut circuit = AnsatzCircuit::new(problem.initial.clone());
    let mut params: Vec<f64> = Vec::new();
    let mut state = problem.initial.clone();
    let mut energy = h.expectation_value(&state);
    if !energy.is_finite() {
        return Err(Error::NonFiniteEnergy { step: 0 });
    }
    let mut epochs = Vec::new();
    let mut global = 0usize;
    let mut steps = vec![StepRecord { step: 0, epoch: 0, energy, fidelity: fidelity_of(&state)? }];
    observe(0, 0, energy, &state)?;

    for epoch in 0.. {
        let grads = pool_gradients(&state, h, &problem.pool.operators);
        let max_gradient = grads.iter().fold(0.0f64, |m, g| m.max(g.abs()));
        let stop = if max_gradient < config.eps1 {
            Some(Termination::GradientTolerance)
        } else if epoch >= config.max_epochs {
            Some(Termination::MaxEpochs)
        } else {
            None
        };
        let chosen = if stop.is_none() { select(&grads, config.r) } else { Vec::new() };
        let stop = stop.or(chosen.is_empty().then_some(Termination::EmptySelection));
        if let Some(termination) = stop {
            if termination != Termination::MaxEpochs || epochs.is_empty() {
                epochs.push(EpochRecord {
                    epoch,
                    max_gradient,
                    selected: Vec::new(),
                    n_params: params.len(),
                    inner_steps: 0,
                    inner_converged: true,
                    energy,
                    fidelity: fidelity_of(&state)?,
                });
            }
            return Ok(VipsaRun { epochs, steps, circuit, params, final_state: state, termination });
        }

        let mut selected = Vec::with_capacity(chosen.len());
        for &i in &chosen {
            let op = &problem.pool.operators[i];
            circuit.push_pool(op.generator.clone())?;
            params.push(0.0);
            selected.push(op.label.clone());
        }
        let base = global;
        if !config.warm_start {
            adam = Adam::new(config.adam(), 0);
        }
        let outcome = adam_optimize_with(&circuit, h, params.clone(), &mut adam, |inner, e, psi| {
            if inner == 0 {
                return Ok(());
            }
            let f = fidelity_of(psi)?;
            steps.push(StepRecord { step: base + inner, epoch, energy: e, fidelity: f });
            observe(epoch, base + inner, e, psi)
        })?;
        global += outcome.steps;
        params = outcome.params;
        state = outcome.final_state;
        energy = outcome.energy;
        epochs.push(EpochRecord {
            epoch,
            max_gradient,
            selected,
            n_params: params.len(),
            inner_steps: outcome.steps,
            inner_converged: outcome.converged,
            energy,
            fidelity: fidelity_of(&state)?,
        });
    }
    unreachable!("the epoch loop only exits by returning")
}

/// First-order weak-coupling assignment and the two states it is compared
/// with.
#[derive(Debug, Clone)]
pub struct FirstOrder {
    /// `(label, θ)` with `sin θ = -V/ε`, in canonical pool order.
    pub thetas: Vec<(String, f64)>,
    /// `normalize(φ0 - Σ (V/ε) A φ0)`.
    pub reference: StateVector,
    /// The rotations `exp(θ A)` applied to `φ0` one after another.
    pub sequential: StateVector,
}

pub fn first_order_oracle(pool: &[PoolOperator], phi0: &StateVector) -> Result<FirstOrder> {
    let mut thetas = Vec::with_capacity(pool.len());
    let mut reference = phi0.clone();
    for op in pool {
        let ratio = op.v() / op.eps();
        if ratio.abs() > 1.0 {
            return Err(Error::WeakCouplingViolated { label: op.label.clone(), ratio: ratio.abs() });
        }
        thetas.push((op.label.clone(), (-ratio).asin()));
        reference.axpy(Complex64::new(-ratio, 0.0), &op.generator.apply(phi0));
    }
    reference.normalize();
    let mut sequential = phi0.clone();
    for (op, (_, theta)) in pool.iter().zip(&thetas) {
        op.generator.apply_unitary(*theta, &mut sequential);
    }
    Ok(FirstOrder { thetas, reference, sequential })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn select_threshold_and_order() {
        assert_eq!(select(&[1.0, 0.5, 0.09], 0.1), vec![0, 1]);
        assert_eq!(select(&[0.2, -0.9, 0.9, 0.0], 0.1), vec![1, 2, 0]);
        assert!(select(&[0.0, 0.0], 0.1).is_empty());
        assert_eq!(select(&[0.3, 0.1], 1.0), vec![0]);
    }

    #[test]
    fn pool_sizes() {
        for ((nx, ny), want) in [((2, 2), 13), ((2, 3), 63), ((2, 4), 130)] {
            let pool = build_pool(&GridSpec::new(nx, ny, 1.0, 1.0).unwrap()).unwrap();
            assert_eq!(pool.len(), want, "{nx}x{ny}");
            assert!(pool.operators.iter().all(|p| p.eps().abs() > EPS_TOL));
        }
    }

    #[test]
    fn zero_coupling_stops_immediately() {
        let grid = GridSpec::new(2, 2, 1.0, 0.0).unwrap();
        let problem = VipsaProblem::new(&grid, 2, 2).unwrap();
        assert!(problem.pool.is_empty());
        let run = vipsa_run(&problem, &VipsaConfig::default(), None, |_, _, _, _| Ok(())).unwrap();
        assert_eq!(run.epochs.len(), 1);
        assert_eq!(run.epochs[0].max_gradient, 0.0);
        assert!((run.final_energy() + 4.0).abs() < 1e-12);
        assert!(run.converged());
    }

    #[test]
    fn first_order_at_zero_coupling() {
        let grid = GridSpec::new(2, 4, 1.0, 0.0).unwrap();
        let problem = VipsaProblem::new(&grid, 4, 4).unwrap();
        let fo = first_order_oracle(&problem.pool.operators, &problem.initial).unwrap();
        assert_eq!(fo.reference, problem.initial);
        assert!(fo.thetas.iter().all(|t| t.1 == 0.0));
    }
}

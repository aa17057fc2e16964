//! Real-space and mode-space Hubbard Hamiltonians, interaction tables and
//! total-spin operators.

use crate::error::Result;
use crate::fermion::{jordan_wigner, jordan_wigner_sum, Ladder, LadderTerm};
use crate::lattice::{enumerate_modes, AxisMode, Boundary, GridSpec, Mode, SpinOrbital};
use crate::pauli::PauliSum;

/// Interaction coefficients below this magnitude are omitted.
pub const COUPLING_TOL: f64 = 1e-12;

/// One term `V c†_{a↑} c†_{b↓} c_{c↓} c_{d↑}` of the mode-space
/// interaction. Mode labels are register positions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InteractionQuadruple {
    pub a: usize,
    pub b: usize,
    pub c: usize,
    pub d: usize,
    pub v: f64,
    /// `ε_a + ε_b - ε_c - ε_d`.
    pub eps: f64,
}

impl InteractionQuadruple {
    /// Qubits of the four ladder operators, in `(a↑, b↓, c↓, d↑)` order.
    pub fn qubits(&self) -> [usize; 4] {
        [
            SpinOrbital::up(self.a).qubit(),
            SpinOrbital::down(self.b).qubit(),
            SpinOrbital::down(self.c).qubit(),
            SpinOrbital::up(self.d).qubit(),
        ]
    }

    /// `c†_{a↑} c†_{b↓} c_{c↓} c_{d↑}` with unit coefficient.
    pub fn ladder_term(&self) -> LadderTerm {
        let [a, b, c, d] = self.qubits();
        LadderTerm::quartic(a, b, c, d)
    }

    /// The Hermitian-conjugate quadruple `(d, c, b, a)`.
    pub fn conjugate(&self) -> Self {
        InteractionQuadruple { a: self.d, b: self.c, c: self.b, d: self.a, v: self.v, eps: -self.eps }
    }

    pub fn is_diagonal(&self) -> bool {
        self.a == self.d && self.b == self.c
    }

    pub fn label(&self) -> String {
        format!("{:02}.{:02}.{:02}.{:02}", self.a, self.b, self.c, self.d)
    }
}

/// Per-axis overlap `Σ_x φ*_a φ*_b φ_c φ_d`. On periodic axes this is the
/// momentum-conservation delta divided by the axis length.
pub fn axis_overlap(len: usize, bc: Boundary, m: [usize; 4]) -> f64 {
    match bc {
        Boundary::Periodic => {
            if (m[2] + m[3] + 2 * len - m[0] - m[1]).is_multiple_of(len) {
                1.0 / len as f64
            } else {
                0.0
            }
        }
        Boundary::Open => {
            let modes = m.map(|mi| AxisMode::new(len, bc, mi));
            (0..len).map(|x| modes.iter().map(|am| am.amplitude(x).re).product::<f64>()).sum()
        }
    }
}

/// Mode-space Hubbard Hamiltonian with its interaction table.
#[derive(Debug, Clone)]
pub struct KSpaceHamiltonian {
    pub grid: GridSpec,
    /// `Σ ε_k n_kσ`.
    pub kinetic: PauliSum,
    /// `Σ V c† c† c c` over the quadruple table.
    pub interaction: PauliSum,
    pub total: PauliSum,
    /// Every quadruple with `|V| > COUPLING_TOL`, in lexicographic order.
    pub quadruples: Vec<InteractionQuadruple>,
}

/// Interaction table `V(a,b,c,d) = U Σ_i φ*_a(i) φ*_b(i) φ_c(i) φ_d(i)`,
/// factorized per axis.
pub fn interaction_table(grid: &GridSpec) -> Vec<InteractionQuadruple> {
    let modes = modes_by_position(grid);
    let n = grid.n_sites();
    let mut out = Vec::new();
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for d in 0..n {
                    let m = [&modes[a], &modes[b], &modes[c], &modes[d]];
                    let fx = axis_overlap(grid.nx, grid.bc_x, m.map(|q| q.mx()));
                    if fx.abs() < COUPLING_TOL {
                        continue;
                    }
                    let fy = axis_overlap(grid.ny, grid.bc_y, m.map(|q| q.my()));
                    let v = grid.u * fx * fy;
                    if v.abs() < COUPLING_TOL {
                        continue;
                    }
                    let eps = m[0].energy + m[1].energy - m[2].energy - m[3].energy;
                    out.push(InteractionQuadruple { a, b, c, d, v, eps });
                }
            }
        }
    }
    out
}

/// Modes indexed by register position rather than energy order.
pub fn modes_by_position(grid: &GridSpec) -> Vec<Mode> {
    let mut modes = enumerate_modes(grid);
    modes.sort_by_key(Mode::position);
    modes
}

pub fn build_kspace(grid: &GridSpec) -> Result<KSpaceHamiltonian> {
    grid.validate()?;
    let n_qubits = grid.n_qubits();
    let mut kinetic_terms = Vec::new();
    for mode in modes_by_position(grid) {
        for orb in [SpinOrbital::up(mode.position()), SpinOrbital::down(mode.position())] {
            kinetic_terms.push(LadderTerm::real(mode.energy, LadderTerm::number(orb.qubit()).factors));
        }
    }
    let kinetic = jordan_wigner_sum(&kinetic_terms, n_qubits)?;
    let quadruples = interaction_table(grid);
    let mut interaction = PauliSum::zero(n_qubits);
    for q in &quadruples {
        let term = q.ladder_term();
        interaction = &interaction + &jordan_wigner(&LadderTerm::real(q.v, term.factors), n_qubits)?;
    }
    let total = &kinetic + &interaction;
    Ok(KSpaceHamiltonian { grid: *grid, kinetic, interaction, total, quadruples })
}

/// Real-space hopping `-t Σ_<ij>σ (c†_iσ c_jσ + h.c.)`.
pub fn real_hopping(grid: &GridSpec) -> Result<PauliSum> {
    let mut terms = Vec::new();
    for (i, j) in grid.edges() {
        for (oi, oj) in [
            (SpinOrbital::up(i), SpinOrbital::up(j)),
            (SpinOrbital::down(i), SpinOrbital::down(j)),
        ] {
            let t = LadderTerm::real(-grid.t, LadderTerm::excitation(oi.qubit(), oj.qubit()).factors);
            terms.push(t.dagger());
            terms.push(t);
        }
    }
    jordan_wigner_sum(&terms, grid.n_qubits())
}

/// `Σ_i n_{i↑} n_{i↓}` on a register of `n_sites` positions.
pub fn double_occupancy(n_sites: usize) -> Result<PauliSum> {
    let terms: Vec<LadderTerm> = (0..n_sites)
        .map(|i| {
            let (u, d) = (SpinOrbital::up(i).qubit(), SpinOrbital::down(i).qubit());
            LadderTerm::real(
                1.0,
                vec![Ladder::create(u), Ladder::annihilate(u), Ladder::create(d), Ladder::annihilate(d)],
            )
        })
        .collect();
    jordan_wigner_sum(&terms, 2 * n_sites)
}

/// Real-space Hubbard Hamiltonian.
pub fn build_real(grid: &GridSpec) -> Result<PauliSum> {
    grid.validate()?;
    Ok(&real_hopping(grid)? + &double_occupancy(grid.n_sites())?.scale_real(grid.u))
}

/// Both representations of one Hamiltonian.
#[derive(Debug, Clone)]
pub struct HamiltonianPair {
    pub real_space: PauliSum,
    pub k_space: KSpaceHamiltonian,
}

pub fn build_pair(grid: &GridSpec) -> Result<HamiltonianPair> {
    Ok(HamiltonianPair { real_space: build_real(grid)?, k_space: build_kspace(grid)? })
}

/// Total `S_z` and `S²` on `n_sites` spatial orbitals. Both are invariant
/// under a common unitary change of orbitals, so they serve the site and
/// the mode register alike.
pub fn spin_operators(n_sites: usize) -> Result<(PauliSum, PauliSum)> {
    let n_qubits = 2 * n_sites;
    let mut sz_terms = Vec::new();
    for i in 0..n_sites {
        sz_terms.push(LadderTerm::real(0.5, LadderTerm::number(SpinOrbital::up(i).qubit()).factors));
        sz_terms.push(LadderTerm::real(-0.5, LadderTerm::number(SpinOrbital::down(i).qubit()).factors));
    }
    let sz = jordan_wigner_sum(&sz_terms, n_qubits)?;
    let raise_terms: Vec<LadderTerm> = (0..n_sites)
        .map(|i| LadderTerm::excitation(SpinOrbital::up(i).qubit(), SpinOrbital::down(i).qubit()))
        .collect();
    let raise = jordan_wigner_sum(&raise_terms, n_qubits)?;
    let lower = raise.conjugate();
    // S² = ½(S+S- + S-S+) + Sz²
    let s2 = &(&(&raise * &lower) + &(&lower * &raise)).scale_real(0.5) + &(&sz * &sz);
    Ok((sz, s2))
}

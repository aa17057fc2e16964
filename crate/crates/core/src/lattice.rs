//! Rectangular Hubbard lattices: geometry, single-particle modes and the
//! spin-orbital to qubit bijection.
//!
//! Every axis carries its own boundary condition. Periodic axes use plane
//! waves with `k = 2πm/L`; open axes use standing waves with
//! `k = π(m+1)/(L+1)`. Both give the per-axis energy `-2t cos k`, so the
//! same dispersion law covers every boundary combination and the mode
//! energies reproduce the real-space hopping spectrum exactly.

use std::f64::consts::PI;
use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported lattice: 15 sites, 30 qubits.
pub const MAX_SITES: usize = 15;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Boundary {
    Open,
    Periodic,
}

impl Boundary {
    /// Length-2 axes are open, longer axes periodic.
    pub fn default_for(len: usize) -> Self {
        if len > 2 {
            Boundary::Periodic
        } else {
            Boundary::Open
        }
    }

    pub fn tag(self) -> &'static str {
        match self {
            Boundary::Open => "open",
            Boundary::Periodic => "periodic",
        }
    }
}

impl std::str::FromStr for Boundary {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "open" | "obc" => Ok(Boundary::Open),
            "periodic" | "pbc" => Ok(Boundary::Periodic),
            other => Err(Error::Parse(format!("unknown boundary condition '{other}'"))),
        }
    }
}

/// Lattice geometry plus the Hubbard couplings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub nx: usize,
    pub ny: usize,
    pub bc_x: Boundary,
    pub bc_y: Boundary,
    pub t: f64,
    pub u: f64,
}

impl GridSpec {
    /// Grid with the default boundary rule applied to both axes.
    pub fn new(nx: usize, ny: usize, t: f64, u: f64) -> Result<Self> {
        Self::with_boundaries(nx, ny, Boundary::default_for(nx), Boundary::default_for(ny), t, u)
    }

    pub fn with_boundaries(
        nx: usize,
        ny: usize,
        bc_x: Boundary,
        bc_y: Boundary,
        t: f64,
        u: f64,
    ) -> Result<Self> {
        let grid = GridSpec { nx, ny, bc_x, bc_y, t, u };
        grid.validate()?;
        Ok(grid)
    }

    pub fn validate(&self) -> Result<()> {
        if self.nx < 2 || self.ny < 2 {
            return Err(Error::InvalidGrid(format!(
                "both axes need at least 2 sites, got {}x{}",
                self.nx, self.ny
            )));
        }
        if self.nx * self.ny > MAX_SITES {
            return Err(Error::InvalidGrid(format!(
                "{}x{} exceeds the {MAX_SITES}-site limit",
                self.nx, self.ny
            )));
        }
        if !self.t.is_finite() || !self.u.is_finite() {
            return Err(Error::InvalidGrid("t and U must be finite".into()));
        }
        Ok(())
    }

    /// Same geometry, different interaction strength.
    pub fn with_u(&self, u: f64) -> Self {
        GridSpec { u, ..*self }
    }

    pub fn n_sites(&self) -> usize {
        self.nx * self.ny
    }

    pub fn n_qubits(&self) -> usize {
        2 * self.n_sites()
    }

    pub fn site(&self, x: usize, y: usize) -> usize {
        x + self.nx * y
    }

    /// Nearest-neighbour bonds along x, ordered by (y, x). A periodic
    /// length-2 axis contributes its single bond once.
    pub fn horizontal_edges(&self) -> Vec<(usize, usize)> {
        let mut edges = Vec::new();
        for y in 0..self.ny {
            for (a, b) in axis_bonds(self.nx, self.bc_x) {
                edges.push((self.site(a, y), self.site(b, y)));
            }
        }
        edges
    }

    /// Nearest-neighbour bonds along y, ordered by (x, y).
    pub fn vertical_edges(&self) -> Vec<(usize, usize)> {
        let mut edges = Vec::new();
        for x in 0..self.nx {
            for (a, b) in axis_bonds(self.ny, self.bc_y) {
                edges.push((self.site(x, a), self.site(x, b)));
            }
        }
        edges
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut edges = self.horizontal_edges();
        edges.extend(self.vertical_edges());
        edges
    }

    /// Real-space single-particle hopping matrix `-t Σ (|i><j| + |j><i|)`.
    pub fn hopping_matrix(&self) -> DMatrix<f64> {
        let n = self.n_sites();
        let mut h = DMatrix::zeros(n, n);
        for (i, j) in self.edges() {
            h[(i, j)] -= self.t;
            h[(j, i)] -= self.t;
        }
        h
    }

    /// Short human-readable tag, e.g. `2x4-op` (open x, periodic y).
    pub fn shape_tag(&self) -> String {
        let c = |b: Boundary| match b {
            Boundary::Open => 'o',
            Boundary::Periodic => 'p',
        };
        format!("{}x{}-{}{}", self.nx, self.ny, c(self.bc_x), c(self.bc_y))
    }
}

impl fmt::Display for GridSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}x{} ({}/{}) t={} U={}",
            self.nx,
            self.ny,
            self.bc_x.tag(),
            self.bc_y.tag(),
            self.t,
            self.u
        )
    }
}

fn axis_bonds(len: usize, bc: Boundary) -> Vec<(usize, usize)> {
    let mut bonds: Vec<(usize, usize)> = (0..len - 1).map(|i| (i, i + 1)).collect();
    if bc == Boundary::Periodic && len > 2 {
        bonds.push((len - 1, 0));
    }
    bonds
}

/// One single-particle mode along a single axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxisMode {
    pub axis_len: usize,
    pub bc: Boundary,
    pub m: usize,
    pub k: f64,
}

impl AxisMode {
    pub fn new(axis_len: usize, bc: Boundary, m: usize) -> Self {
        let k = match bc {
            Boundary::Periodic => 2.0 * PI * m as f64 / axis_len as f64,
            Boundary::Open => PI * (m + 1) as f64 / (axis_len + 1) as f64,
        };
        AxisMode { axis_len, bc, m, k }
    }

    /// Per-axis energy contribution `-2t cos k`. A periodic length-2 axis
    /// has a single bond, which halves the bandwidth.
    pub fn energy(&self, t: f64) -> f64 {
        if self.bc == Boundary::Periodic && self.axis_len == 2 {
            -t * self.k.cos()
        } else {
            -2.0 * t * self.k.cos()
        }
    }

    /// Normalised amplitude of the mode on axis coordinate `x`.
    pub fn amplitude(&self, x: usize) -> Complex64 {
        match self.bc {
            Boundary::Periodic => {
                Complex64::from_polar(1.0 / (self.axis_len as f64).sqrt(), self.k * x as f64)
            }
            Boundary::Open => Complex64::new(self.standing_wave(x), 0.0),
        }
    }

    /// Real orbital spanning the same energy level: cosine/sine pairs
    /// replace `±k` plane waves on periodic axes.
    pub fn real_amplitude(&self, x: usize) -> f64 {
        match self.bc {
            Boundary::Open => self.standing_wave(x),
            Boundary::Periodic => {
                let l = self.axis_len as f64;
                let phase = self.k * x as f64;
                if self.m == 0 || 2 * self.m == self.axis_len {
                    phase.cos() / l.sqrt()
                } else if 2 * self.m < self.axis_len {
                    (2.0 / l).sqrt() * phase.cos()
                } else {
                    (2.0 / l).sqrt() * phase.sin()
                }
            }
        }
    }

    fn standing_wave(&self, x: usize) -> f64 {
        let norm = (2.0 / (self.axis_len + 1) as f64).sqrt();
        norm * (self.k * (x + 1) as f64).sin()
    }
}

/// A two-dimensional single-particle mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mode {
    pub x: AxisMode,
    pub y: AxisMode,
    pub energy: f64,
}

impl Mode {
    pub fn mx(&self) -> usize {
        self.x.m
    }

    pub fn my(&self) -> usize {
        self.y.m
    }

    /// Register position `mx + nx * my`; the mode counterpart of a site index.
    pub fn position(&self) -> usize {
        self.x.m + self.x.axis_len * self.y.m
    }

    pub fn amplitude(&self, site_x: usize, site_y: usize) -> Complex64 {
        self.x.amplitude(site_x) * self.y.amplitude(site_y)
    }

    pub fn real_amplitude(&self, site_x: usize, site_y: usize) -> f64 {
        self.x.real_amplitude(site_x) * self.y.real_amplitude(site_y)
    }
}

fn energy_key(e: f64) -> i64 {
    (e * 1e8).round() as i64
}

/// All `nx * ny` modes, ascending in energy with ties broken by `(my, mx)`.
pub fn enumerate_modes(grid: &GridSpec) -> Vec<Mode> {
    let mut modes = Vec::with_capacity(grid.n_sites());
    for my in 0..grid.ny {
        for mx in 0..grid.nx {
            let x = AxisMode::new(grid.nx, grid.bc_x, mx);
            let y = AxisMode::new(grid.ny, grid.bc_y, my);
            let energy = x.energy(grid.t) + y.energy(grid.t);
            modes.push(Mode { x, y, energy });
        }
    }
    modes.sort_by_key(|m| (energy_key(m.energy), m.my(), m.mx()));
    modes
}

/// Mode functions as columns of a site-by-mode matrix, columns indexed by
/// register position (`mx + nx * my`). Unitary.
pub fn mode_matrix(grid: &GridSpec) -> DMatrix<Complex64> {
    let n = grid.n_sites();
    let mut w = DMatrix::zeros(n, n);
    for mode in enumerate_modes(grid) {
        for y in 0..grid.ny {
            for x in 0..grid.nx {
                w[(grid.site(x, y), mode.position())] = mode.amplitude(x, y);
            }
        }
    }
    w
}

/// Real orthonormal orbitals, one per entry of the sorted mode list (column
/// `i` belongs to `enumerate_modes(grid)[i]`).
pub fn real_orbitals(grid: &GridSpec) -> DMatrix<f64> {
    let modes = enumerate_modes(grid);
    let n = grid.n_sites();
    let mut w = DMatrix::zeros(n, n);
    for (col, mode) in modes.iter().enumerate() {
        for y in 0..grid.ny {
            for x in 0..grid.nx {
                w[(grid.site(x, y), col)] = mode.real_amplitude(x, y);
            }
        }
    }
    w
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Spin {
    Up,
    Down,
}

impl Spin {
    pub fn bit(self) -> usize {
        match self {
            Spin::Up => 0,
            Spin::Down => 1,
        }
    }
}

/// A spin orbital addressed by register position (site or mode position).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SpinOrbital {
    pub position: usize,
    pub spin: Spin,
}

impl SpinOrbital {
    pub fn up(position: usize) -> Self {
        SpinOrbital { position, spin: Spin::Up }
    }

    pub fn down(position: usize) -> Self {
        SpinOrbital { position, spin: Spin::Down }
    }

    pub fn qubit(&self) -> usize {
        2 * self.position + self.spin.bit()
    }
}

/// `qubit = 2 * (mx + nx * my) + spin_bit`.
pub fn qubit_index(mode: &Mode, spin: Spin) -> usize {
    SpinOrbital { position: mode.position(), spin }.qubit()
}

/// Non-interacting ground-state occupation.
#[derive(Debug, Clone, PartialEq)]
pub struct FermiSea {
    /// Indices into the sorted mode list.
    pub occupied_up: Vec<usize>,
    pub occupied_down: Vec<usize>,
    pub degeneracy: usize,
    pub energy: f64,
}

impl FermiSea {
    /// Occupied qubits in the mode register.
    pub fn occupied_qubits(&self, modes: &[Mode]) -> Vec<usize> {
        let mut qubits: Vec<usize> = self
            .occupied_up
            .iter()
            .map(|&i| qubit_index(&modes[i], Spin::Up))
            .chain(self.occupied_down.iter().map(|&i| qubit_index(&modes[i], Spin::Down)))
            .collect();
        qubits.sort_unstable();
        qubits
    }
}

/// Lowest-energy occupation; Fermi-level ties are filled in mode-list order.
pub fn fermi_sea(grid: &GridSpec, n_up: usize, n_down: usize) -> Result<FermiSea> {
    let modes = enumerate_modes(grid);
    let n = modes.len();
    for count in [n_up, n_down] {
        if count > n {
            return Err(Error::CountOutOfRange { count, modes: n });
        }
    }
    let occupied_up: Vec<usize> = (0..n_up).collect();
    let occupied_down: Vec<usize> = (0..n_down).collect();
    let degeneracy = shell_degeneracy(&modes, n_up) * shell_degeneracy(&modes, n_down);
    let energy = occupied_up.iter().chain(&occupied_down).map(|&i| modes[i].energy).sum();
    Ok(FermiSea { occupied_up, occupied_down, degeneracy, energy })
}

/// Fermi sea with an explicit choice inside the degenerate Fermi shell. The
/// choice must still be a lowest-energy occupation.
pub fn fermi_sea_with_choice(
    grid: &GridSpec,
    occupied_up: Vec<usize>,
    occupied_down: Vec<usize>,
) -> Result<FermiSea> {
    let reference = fermi_sea(grid, occupied_up.len(), occupied_down.len())?;
    let modes = enumerate_modes(grid);
    let check = |occ: &[usize]| -> Result<f64> {
        let mut seen = vec![false; modes.len()];
        let mut e = 0.0;
        for &i in occ {
            if i >= modes.len() || seen[i] {
                return Err(Error::Invalid(format!("bad occupied mode list {occ:?}")));
            }
            seen[i] = true;
            e += modes[i].energy;
        }
        Ok(e)
    };
    let energy = check(&occupied_up)? + check(&occupied_down)?;
    if (energy - reference.energy).abs() > 1e-9 {
        return Err(Error::Invalid(format!(
            "occupation energy {energy} is not the Fermi-sea energy {}",
            reference.energy
        )));
    }
    let mut occupied_up = occupied_up;
    let mut occupied_down = occupied_down;
    occupied_up.sort_unstable();
    occupied_down.sort_unstable();
    Ok(FermiSea { occupied_up, occupied_down, ..reference })
}

fn shell_degeneracy(modes: &[Mode], count: usize) -> usize {
    if count == 0 || count == modes.len() {
        return 1;
    }
    let fermi = energy_key(modes[count - 1].energy);
    let shell = modes.iter().filter(|m| energy_key(m.energy) == fermi).count();
    let filled = modes[..count].iter().filter(|m| energy_key(m.energy) == fermi).count();
    binomial(shell, filled)
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

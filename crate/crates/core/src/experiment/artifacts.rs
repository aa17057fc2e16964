//! On-disk run artifacts: step and epoch tables, the run manifest and the
//! ground-space cache.

use std::fs;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::config::Ansatz;
use crate::error::{Error, Result};
use crate::exact::GroundSpace;
use crate::lattice::GridSpec;
use crate::vipsa::{EpochRecord, StepRecord};

pub const MANIFEST_FORMAT: &str = "hubbard-run/1";
pub const STEPS_FILE: &str = "steps.csv";
pub const EPOCHS_FILE: &str = "epochs.csv";
pub const MANIFEST_FILE: &str = "manifest.json";

/// One row of `epochs.csv`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochRow {
    pub epoch: usize,
    pub max_gradient: f64,
    pub n_selected: usize,
    pub n_params: usize,
    pub inner_steps: usize,
    pub energy: f64,
    pub fidelity: Option<f64>,
}

impl From<&EpochRecord> for EpochRow {
    fn from(r: &EpochRecord) -> Self {
        EpochRow {
            epoch: r.epoch,
            max_gradient: r.max_gradient,
            n_selected: r.selected.len(),
            n_params: r.n_params,
            inner_steps: r.inner_steps,
            energy: r.energy,
            fidelity: r.fidelity,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RunStatus {
    Converged,
    /// Ran out of epochs or optimizer steps.
    Exhausted,
}

impl RunStatus {
    pub fn exit_code(self) -> i32 {
        match self {
            RunStatus::Converged => 0,
            RunStatus::Exhausted => 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub format: String,
    pub ansatz: Ansatz,
    pub grid: GridSpec,
    pub n_up: usize,
    pub n_down: usize,
    pub occupied_up: Vec<usize>,
    pub occupied_down: Vec<usize>,
    /// Echo of the optimizer configuration actually used.
    pub config: serde_json::Value,
    pub status: RunStatus,
    /// VIPSA termination reason; absent for HVA.
    pub termination: Option<String>,
    pub ground_energy: f64,
    pub ground_degeneracy: usize,
    pub final_energy: f64,
    pub final_fidelity: Option<f64>,
    pub n_params: usize,
    pub step_rows: usize,
    pub epoch_rows: usize,
    /// HVA only: largest gradient at the all-zero start.
    pub initial_max_gradient: Option<f64>,
    pub ground_space_key: String,
}

impl Manifest {
    pub fn load(dir: &Path) -> Result<Self> {
        let manifest: Manifest = serde_json::from_str(&fs::read_to_string(dir.join(MANIFEST_FILE))?)?;
        if manifest.format != MANIFEST_FORMAT {
            return Err(Error::Parse(format!("unsupported manifest format {:?}", manifest.format)));
        }
        Ok(manifest)
    }

    pub fn save(&self, dir: &Path) -> Result<()> {
        fs::write(dir.join(MANIFEST_FILE), serde_json::to_string_pretty(self)? + "\n")?;
        Ok(())
    }
}

pub fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>> {
    let mut r = csv::Reader::from_path(path)?;
    r.deserialize().map(|row| row.map_err(Error::from)).collect()
}

pub fn read_steps(dir: &Path) -> Result<Vec<StepRecord>> {
    read_csv(&dir.join(STEPS_FILE))
}

pub fn read_epochs(dir: &Path) -> Result<Vec<EpochRow>> {
    read_csv(&dir.join(EPOCHS_FILE))
}

/// Which Hamiltonian a ground space belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Basis {
    /// Momentum-mode register.
    Modes,
    /// Real-space site register.
    Sites,
}

impl Basis {
    pub fn tag(self) -> &'static str {
        match self {
            Basis::Modes => "modes",
            Basis::Sites => "sites",
        }
    }
}

/// Hex SHA-256 over the grid shape, boundaries, couplings, sector and basis.
pub fn ground_space_key(grid: &GridSpec, n_up: usize, n_down: usize, basis: Basis) -> String {
    let canonical = format!(
        "{}x{}|{}|{}|t={:?}|u={:?}|up={n_up}|down={n_down}|{}",
        grid.nx,
        grid.ny,
        grid.bc_x.tag(),
        grid.bc_y.tag(),
        grid.t,
        grid.u,
        basis.tag()
    );
    Sha256::digest(canonical.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
}

/// File-backed cache of ground spaces keyed by [`ground_space_key`].
#[derive(Debug, Clone)]
pub struct GroundCache {
    dir: Option<PathBuf>,
}

impl GroundCache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        GroundCache { dir: Some(dir.into()) }
    }

    /// A cache that always recomputes.
    pub fn disabled() -> Self {
        GroundCache { dir: None }
    }

    pub fn path(&self, key: &str) -> Option<PathBuf> {
        self.dir.as_ref().map(|d| d.join(format!("{key}.json")))
    }

    /// Returns the cached space or computes and stores it. An unreadable
    /// cache file counts as a miss and is overwritten.
    pub fn get_or_compute(
        &self,
        key: &str,
        compute: impl FnOnce() -> Result<GroundSpace>,
    ) -> Result<GroundSpace> {
        let Some(path) = self.path(key) else {
            return compute();
        };
        if let Ok(gs) = GroundSpace::load(&path) {
            return Ok(gs);
        }
        let gs = compute()?;
        fs::create_dir_all(path.parent().expect("cache file has a parent"))?;
        gs.save(&path)?;
        Ok(gs)
    }
}

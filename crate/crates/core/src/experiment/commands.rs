//! The four user-facing operations: run, ed, compare and pool-info. Each
//! returns structured results; printing is left to the caller except for
//! the progress lines `cmd_run` writes to `log`.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::artifacts::{
    ground_space_key, read_steps, write_csv, Basis, EpochRow, GroundCache, Manifest, RunStatus, EPOCHS_FILE,
    MANIFEST_FORMAT, STEPS_FILE,
};
use super::config::{Ansatz, ExperimentConfig};
use crate::error::{Error, Result};
use crate::exact::GroundSpace;
use crate::hamiltonian::build_pair;
use crate::hva::{hva_run, HvaProblem};
use crate::lattice::{fermi_sea, fermi_sea_with_choice, GridSpec};
use crate::sector::SectorOperator;
use crate::vipsa::{build_pool, vipsa_run, PoolCensus, VipsaProblem};

/// Runs the configured experiment and writes `steps.csv`, `epochs.csv` and
/// `manifest.json` into `config.output_dir`.
pub fn cmd_run(config: &ExperimentConfig, log: &mut dyn Write) -> Result<Manifest> {
    config.validate()?;
    let grid = &config.grid;
    let sea = match (&config.occupied_up, &config.occupied_down) {
        (None, None) => fermi_sea(grid, config.n_up, config.n_down)?,
        (up, down) => {
            let default = fermi_sea(grid, config.n_up, config.n_down)?;
            fermi_sea_with_choice(
                grid,
                up.clone().unwrap_or(default.occupied_up),
                down.clone().unwrap_or(default.occupied_down),
            )?
        }
    };
    let cache = if config.cache { GroundCache::new(&config.cache_dir) } else { GroundCache::disabled() };
    let dir = &config.output_dir;
    writeln!(log, "{} {} on {grid}, sector ({}, {})", config.ansatz.tag(), grid.shape_tag(), config.n_up, config.n_down)?;

    let manifest = match config.ansatz {
        Ansatz::Vipsa => {
            let problem = VipsaProblem::with_sea(grid, sea.clone())?;
            let key = ground_space_key(grid, config.n_up, config.n_down, Basis::Modes);
            let ground = cache.get_or_compute(&key, || problem.ground_space())?;
            writeln!(log, "ground energy {:.10} (degeneracy {}), pool {}", ground.energy, ground.degeneracy(), problem.pool.len())?;
            let run = vipsa_run(&problem, &config.vipsa, Some(&ground), |_, _, _, _| Ok(()))?;
            for e in &run.epochs {
                writeln!(
                    log,
                    "epoch {:>3}  max|g| {:.3e}  +{:<3} params {:<4} E {:.8}  F {}",
                    e.epoch,
                    e.max_gradient,
                    e.selected.len(),
                    e.n_params,
                    e.energy,
                    e.fidelity.map_or("-".into(), |f| format!("{f:.6}"))
                )?;
            }
            let epochs: Vec<EpochRow> = run.epochs.iter().map(EpochRow::from).collect();
            fs::create_dir_all(dir)?;
            write_csv(&dir.join(STEPS_FILE), &run.steps)?;
            write_csv(&dir.join(EPOCHS_FILE), &epochs)?;
            Manifest {
                format: MANIFEST_FORMAT.into(),
                ansatz: Ansatz::Vipsa,
                grid: *grid,
                n_up: config.n_up,
                n_down: config.n_down,
                occupied_up: sea.occupied_up.clone(),
                occupied_down: sea.occupied_down.clone(),
                config: serde_json::to_value(config.vipsa)?,
                status: if run.converged() { RunStatus::Converged } else { RunStatus::Exhausted },
                termination: Some(serde_json::to_value(run.termination)?.as_str().unwrap_or_default().into()),
                ground_energy: ground.energy,
                ground_degeneracy: ground.degeneracy(),
                final_energy: run.final_energy(),
                final_fidelity: run.final_fidelity(),
                n_params: run.params.len(),
                step_rows: run.steps.len(),
                epoch_rows: epochs.len(),
                initial_max_gradient: None,
                ground_space_key: key,
            }
        }
        Ansatz::Hva => {
            let problem = HvaProblem::with_sea(grid, sea.clone())?;
            let key = ground_space_key(grid, config.n_up, config.n_down, Basis::Sites);
            let ground = cache.get_or_compute(&key, || problem.ground_space())?;
            writeln!(log, "ground energy {:.10} (degeneracy {})", ground.energy, ground.degeneracy())?;
            let run = hva_run(&problem, &config.hva, Some(&ground), |_, _, _| Ok(()))?;
            let final_fidelity = ground.fidelity(&run.final_state).ok();
            writeln!(
                log,
                "{} params, start gradient {:.3e}{}, {} steps, E {:.8}  F {}",
                run.params.len(),
                run.initial_max_gradient,
                if run.jittered { " (jittered)" } else { "" },
                run.steps.len() - 1,
                run.energy,
                final_fidelity.map_or("-".into(), |f| format!("{f:.6}"))
            )?;
            // the whole fixed circuit is a single epoch in the shared schema
            let epochs = [EpochRow {
                epoch: 0,
                max_gradient: run.initial_max_gradient,
                n_selected: run.params.len(),
                n_params: run.params.len(),
                inner_steps: run.steps.last().map_or(0, |s| s.step),
                energy: run.energy,
                fidelity: final_fidelity,
            }];
            fs::create_dir_all(dir)?;
            write_csv(&dir.join(STEPS_FILE), &run.steps)?;
            write_csv(&dir.join(EPOCHS_FILE), &epochs)?;
            Manifest {
                format: MANIFEST_FORMAT.into(),
                ansatz: Ansatz::Hva,
                grid: *grid,
                n_up: config.n_up,
                n_down: config.n_down,
                occupied_up: sea.occupied_up.clone(),
                occupied_down: sea.occupied_down.clone(),
                config: serde_json::to_value(config.hva)?,
                status: if run.converged { RunStatus::Converged } else { RunStatus::Exhausted },
                termination: None,
                ground_energy: ground.energy,
                ground_degeneracy: ground.degeneracy(),
                final_energy: run.energy,
                final_fidelity,
                n_params: run.params.len(),
                step_rows: run.steps.len(),
                epoch_rows: epochs.len(),
                initial_max_gradient: Some(run.initial_max_gradient),
                ground_space_key: key,
            }
        }
    };
    manifest.save(dir)?;
    writeln!(log, "{:?}: wrote {}", manifest.status, dir.display())?;
    Ok(manifest)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdBasis {
    Real,
    KSpace,
    /// Both, reporting their difference.
    Both,
}

impl std::str::FromStr for EdBasis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "real" => Ok(EdBasis::Real),
            "kspace" | "k" => Ok(EdBasis::KSpace),
            "both" => Ok(EdBasis::Both),
            other => Err(Error::Parse(format!("unknown basis {other:?} (real | kspace | both)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdRow {
    pub u: f64,
    pub energy: f64,
    pub degeneracy: usize,
    /// Real-space minus k-space ground energy when both were computed.
    pub basis_difference: Option<f64>,
    pub fermi_sea_energy: f64,
    pub fermi_sea_degeneracy: usize,
}

/// Ground energy and degeneracy for each coupling in `us`.
pub fn cmd_ed(grid: &GridSpec, us: &[f64], n_up: usize, n_down: usize, basis: EdBasis) -> Result<Vec<EdRow>> {
    let mut rows = Vec::with_capacity(us.len());
    for &u in us {
        let g = grid.with_u(u);
        g.validate()?;
        let sea = fermi_sea(&g, n_up, n_down)?;
        let pair = build_pair(&g)?;
        let solve = |h| -> Result<GroundSpace> { GroundSpace::from_operator(&SectorOperator::from_pauli(h, n_up, n_down)?) };
        let (gs, difference) = match basis {
            EdBasis::Real => (solve(&pair.real_space)?, None),
            EdBasis::KSpace => (solve(&pair.k_space.total)?, None),
            EdBasis::Both => {
                let k = solve(&pair.k_space.total)?;
                let r = solve(&pair.real_space)?;
                let d = r.energy - k.energy;
                (k, Some(d))
            }
        };
        rows.push(EdRow {
            u,
            energy: gs.energy,
            degeneracy: gs.degeneracy(),
            basis_difference: difference,
            fermi_sea_energy: sea.energy,
            fermi_sea_degeneracy: sea.degeneracy,
        });
    }
    Ok(rows)
}

/// Per-run summary inside a comparison.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparedRun {
    pub name: String,
    pub ansatz: Ansatz,
    pub ground_energy: f64,
    pub final_energy: f64,
    pub final_gap: f64,
    pub step_rows: usize,
    /// First step with `E - E_ground <= tol`.
    pub steps_to_tol: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub tol: f64,
    pub runs: Vec<ComparedRun>,
    /// Header of the merged step table.
    pub columns: Vec<String>,
    /// `step` followed by energy and fidelity per run; `None` past a run's end.
    pub rows: Vec<(usize, Vec<Option<f64>>)>,
}

impl Comparison {
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(&self.columns)?;
        for (step, values) in &self.rows {
            let mut record = vec![step.to_string()];
            record.extend(values.iter().map(|v| v.map_or(String::new(), |x| x.to_string())));
            w.write_record(&record)?;
        }
        w.flush()?;
        Ok(())
    }
}

fn run_name(dir: &Path) -> String {
    dir.file_name().map_or_else(|| dir.display().to_string(), |n| n.to_string_lossy().into_owned())
}

/// Merges the step tables of several runs on the same problem.
pub fn cmd_compare(dirs: &[PathBuf], tol: f64) -> Result<Comparison> {
    if dirs.is_empty() {
        return Err(Error::Invalid("compare needs at least one run directory".into()));
    }
    if !(tol.is_finite() && tol > 0.0) {
        return Err(Error::Invalid(format!("tolerance must be positive, got {tol}")));
    }
    let mut runs = Vec::new();
    let mut tables = Vec::new();
    let mut columns = vec!["step".to_string()];
    let mut reference: Option<(PathBuf, Manifest)> = None;
    let mut names = BTreeMap::<String, usize>::new();
    for dir in dirs {
        let manifest = Manifest::load(dir)?;
        if let Some((first, m)) = &reference {
            if m.grid != manifest.grid || (m.n_up, m.n_down) != (manifest.n_up, manifest.n_down) {
                return Err(Error::ArtifactMismatch(format!(
                    "{} is {} in sector ({}, {}) but {} is {} in sector ({}, {})",
                    dir.display(),
                    manifest.grid,
                    manifest.n_up,
                    manifest.n_down,
                    first.display(),
                    m.grid,
                    m.n_up,
                    m.n_down
                )));
            }
        } else {
            reference = Some((dir.clone(), manifest.clone()));
        }
        let steps = read_steps(dir)?;
        if steps.len() != manifest.step_rows {
            return Err(Error::ArtifactMismatch(format!(
                "{} lists {} step rows but its manifest says {}",
                dir.display(),
                steps.len(),
                manifest.step_rows
            )));
        }
        let mut name = run_name(dir);
        let seen = names.entry(name.clone()).or_insert(0);
        *seen += 1;
        if *seen > 1 {
            name = format!("{name}#{seen}");
        }
        let steps_to_tol = steps.iter().find(|s| s.energy - manifest.ground_energy <= tol).map(|s| s.step);
        columns.push(format!("{name}:energy"));
        columns.push(format!("{name}:fidelity"));
        runs.push(ComparedRun {
            name,
            ansatz: manifest.ansatz,
            ground_energy: manifest.ground_energy,
            final_energy: manifest.final_energy,
            final_gap: manifest.final_energy - manifest.ground_energy,
            step_rows: steps.len(),
            steps_to_tol,
        });
        tables.push(steps.into_iter().map(|s| (s.step, (s.energy, s.fidelity))).collect::<BTreeMap<_, _>>());
    }
    let all_steps: std::collections::BTreeSet<usize> = tables.iter().flat_map(|t| t.keys().copied()).collect();
    let rows = all_steps
        .into_iter()
        .map(|step| {
            let values = tables
                .iter()
                .flat_map(|t| match t.get(&step) {
                    Some(&(e, f)) => [Some(e), f],
                    None => [None, None],
                })
                .collect();
            (step, values)
        })
        .collect();
    Ok(Comparison { tol, runs, columns, rows })
}

pub fn cmd_pool_info(grid: &GridSpec) -> Result<PoolCensus> {
    Ok(build_pool(grid)?.census)
}

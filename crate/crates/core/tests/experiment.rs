use std::fs;
use std::io;
use std::path::Path;

use hubbard_vipsa::experiment::artifacts::{read_epochs, read_steps, EPOCHS_FILE, MANIFEST_FILE, STEPS_FILE};
use hubbard_vipsa::experiment::{
    cmd_compare, cmd_ed, cmd_pool_info, cmd_run, Ansatz, EdBasis, ExperimentConfig, GroundCache, Manifest, RunStatus,
};
use hubbard_vipsa::exact::GroundSpace;
use hubbard_vipsa::lattice::{fermi_sea, GridSpec};
use hubbard_vipsa::Error;

fn config(dir: &Path, body: &str) -> ExperimentConfig {
    let text = format!("{body}\noutput_dir = {}\n", dir.display());
    ExperimentConfig::parse(&text).unwrap()
}

fn run(dir: &Path, body: &str) -> Manifest {
    cmd_run(&config(dir, body), &mut io::sink()).unwrap()
}

#[test]
fn vipsa_2x2_run_writes_consistent_artifacts() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("v");
    let m = run(&out, "nx = 2\nny = 2\nu = 4");
    assert_eq!(m.status, RunStatus::Converged);
    assert_eq!(m.ansatz, Ansatz::Vipsa);
    assert!((m.ground_energy + 2.10274848).abs() < 1e-7);
    for f in [STEPS_FILE, EPOCHS_FILE, MANIFEST_FILE] {
        assert!(out.join(f).is_file(), "{f} missing");
    }

    let steps = read_steps(&out).unwrap();
    let epochs = read_epochs(&out).unwrap();
    assert_eq!(steps.len(), m.step_rows);
    assert_eq!(epochs.len(), m.epoch_rows);
    let last = epochs.last().unwrap();
    assert!(last.fidelity.unwrap() >= 0.99);
    assert_eq!(last.n_params, m.n_params);
    assert_eq!(Manifest::load(&out).unwrap(), m);
    // step indices run without gaps
    assert!(steps.iter().enumerate().all(|(i, s)| s.step == i));
}

#[test]
fn rerun_is_byte_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let body = "nx = 2\nny = 2\nu = 2\nmax_epochs = 4";
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    run(&a, body);
    run(&b, body);
    for f in [STEPS_FILE, EPOCHS_FILE] {
        assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap(), "{f} differs");
    }
}

#[test]
fn zero_coupling_stops_at_the_fermi_sea() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("u0");
    let m = run(&out, "nx = 2\nny = 2\nu = 0");
    assert_eq!(m.status, RunStatus::Converged);
    assert_eq!(m.step_rows, 1);
    assert_eq!(m.n_params, 0);
    let sea = fermi_sea(&m.grid, 2, 2).unwrap();
    assert!((m.final_energy - sea.energy).abs() < 1e-12);
}

#[test]
fn invalid_config_writes_nothing() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("bad");
    let text = format!("nx = 2\nny = 2\nu = 4\nlr = -1\noutput_dir = {}\n", out.display());
    assert!(matches!(ExperimentConfig::parse(&text), Err(Error::Config { .. })));

    // validation inside cmd_run catches values mutated after parsing
    let mut c = config(&out, "nx = 2\nny = 2\nu = 4");
    c.occupied_up = Some(vec![0]);
    assert!(cmd_run(&c, &mut io::sink()).is_err());
    assert!(!out.exists());
}

#[test]
fn config_errors_report_lines() {
    let err = ExperimentConfig::parse("nx = 2\nny = 2\n\nu = four\n").unwrap_err();
    assert!(matches!(err, Error::Config { line: 4, .. }), "{err}");
    let err = ExperimentConfig::parse("nx = 2\nny = 2\nu = 4\nNX = 3\n").unwrap_err();
    assert!(matches!(err, Error::Config { line: 4, .. }), "{err}");
    let err = ExperimentConfig::parse("nx = 2\nny = 2\n").unwrap_err();
    assert!(matches!(err, Error::Config { .. }), "{err}");
    let err = ExperimentConfig::parse("nx = 2\nny = 2\nu = 4\nansatz = qaoa\n").unwrap_err();
    assert!(matches!(err, Error::Config { line: 4, .. }), "{err}");
}

#[test]
fn cache_is_reused() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("c");
    let m = run(&out, "nx = 2\nny = 2\nu = 6\nmax_epochs = 1");
    let cache = GroundCache::new(tmp.path().join("cache"));
    let path = cache.path(&m.ground_space_key).unwrap();
    assert!(path.is_file());

    let hit = cache.get_or_compute(&m.ground_space_key, || panic!("cache miss")).unwrap();
    assert_eq!(hit.energy, m.ground_energy);

    // a corrupt entry is recomputed and replaced
    fs::write(&path, "not json").unwrap();
    let gs = cache
        .get_or_compute(&m.ground_space_key, || GroundSpace::load(&out.join("missing.json")).or(Ok(hit.clone())))
        .unwrap();
    assert_eq!(gs.energy, hit.energy);
    assert!(GroundSpace::load(&path).is_ok());
}

#[test]
fn hva_run_has_one_epoch_row() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("h");
    let m = run(&out, "nx = 2\nny = 2\nu = 4\nansatz = hva\nmax_steps = 40");
    assert_eq!(m.ansatz, Ansatz::Hva);
    assert_eq!(m.status, RunStatus::Exhausted);
    assert_eq!(m.status.exit_code(), 2);
    assert_eq!(m.epoch_rows, 1);
    // zero point, jittered point, then one row per update
    assert_eq!(m.step_rows, 42);
    assert_eq!(m.n_params, 30);
    assert!(m.initial_max_gradient.is_some());
    assert_eq!(read_steps(&out).unwrap().len(), 42);
}

#[test]
fn compare_single_run_passes_through() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("only");
    let m = run(&out, "nx = 2\nny = 2\nu = 4");
    let c = cmd_compare(std::slice::from_ref(&out), 0.1).unwrap();
    assert_eq!(c.columns, ["step", "only:energy", "only:fidelity"]);
    assert_eq!(c.rows.len(), m.step_rows);
    let steps = read_steps(&out).unwrap();
    for ((step, values), s) in c.rows.iter().zip(&steps) {
        assert_eq!(*step, s.step);
        assert_eq!(values[0], Some(s.energy));
        assert_eq!(values[1], s.fidelity);
    }
    assert!((c.runs[0].final_gap - (m.final_energy - m.ground_energy)).abs() < 1e-15);
}

#[test]
fn compare_rejects_mismatched_runs() {
    let tmp = tempfile::tempdir().unwrap();
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    run(&a, "nx = 2\nny = 2\nu = 4\nmax_epochs = 1");
    run(&b, "nx = 2\nny = 3\nu = 4\nmax_epochs = 0");
    assert!(matches!(cmd_compare(&[a.clone(), b], 0.1), Err(Error::ArtifactMismatch(_))));

    // a truncated steps table no longer matches its manifest
    let text = fs::read_to_string(a.join(STEPS_FILE)).unwrap();
    let kept: Vec<&str> = text.lines().take(2).collect();
    fs::write(a.join(STEPS_FILE), kept.join("\n") + "\n").unwrap();
    assert!(matches!(cmd_compare(&[a], 0.1), Err(Error::ArtifactMismatch(_))));
}

#[test]
fn vipsa_reaches_tolerance_before_hva_on_2x4() {
    let tmp = tempfile::tempdir().unwrap();
    let (v, h) = (tmp.path().join("vipsa"), tmp.path().join("hva"));
    run(&v, "nx = 2\nny = 4\nu = 2\nmax_epochs = 1");
    // ADAM is deterministic, so a capped HVA run is a prefix of the full trajectory
    run(&h, "nx = 2\nny = 4\nu = 2\nansatz = hva\nmax_steps = 60");
    let c = cmd_compare(&[v, h], 0.1).unwrap();
    let vs = c.runs[0].steps_to_tol.expect("vipsa reaches 0.1");
    let hs = c.runs[1].steps_to_tol.expect("hva reaches 0.1");
    assert!(vs < hs, "vipsa {vs} vs hva {hs}");
    assert_eq!(c.columns.len(), 5);
}

#[test]
fn ed_bases_agree_and_zero_coupling_is_the_sea() {
    let grid = GridSpec::new(2, 3, 1.0, 0.0).unwrap();
    let rows = cmd_ed(&grid, &[0.0, 4.0], 3, 3, EdBasis::Both).unwrap();
    let sea = fermi_sea(&grid, 3, 3).unwrap();
    assert!((rows[0].energy - sea.energy).abs() < 1e-9);
    assert_eq!(rows[0].fermi_sea_energy, sea.energy);
    for r in &rows {
        assert!(r.basis_difference.unwrap() < 1e-9);
    }
    let real = cmd_ed(&grid, &[4.0], 3, 3, EdBasis::Real).unwrap();
    assert!(real[0].basis_difference.is_none());
    assert!((real[0].energy - rows[1].energy).abs() < 1e-9);
}

#[test]
fn ed_golden_values() {
    let grid = GridSpec::new(2, 2, 1.0, 0.0).unwrap();
    let rows = cmd_ed(&grid, &[2.0, 4.0, 6.0], 2, 2, EdBasis::KSpace).unwrap();
    for (r, e) in rows.iter().zip([-2.82842712, -2.10274848, -1.63460305]) {
        assert!((r.energy - e).abs() < 1e-7, "U = {}: {}", r.u, r.energy);
    }
    let grid = GridSpec::new(3, 3, 1.0, 0.0).unwrap();
    let rows = cmd_ed(&grid, &[6.0], 5, 4, EdBasis::KSpace).unwrap();
    assert!((rows[0].energy + 5.56230884).abs() < 1e-7);
    assert_eq!(rows[0].degeneracy, 4);
    assert_eq!(rows[0].fermi_sea_degeneracy, 4);
}

#[test]
fn pool_census_matches_known_counts() {
    for ((nx, ny), counts) in [
        ((2, 2), [64, 16, 22, 0, 13]),
        ((2, 3), [216, 36, 54, 0, 63]),
        ((2, 4), [512, 64, 188, 0, 130]),
        ((3, 3), [729, 81, 184, 0, 232]),
    ] {
        let c = cmd_pool_info(&GridSpec::new(nx, ny, 1.0, 1.0).unwrap()).unwrap();
        assert_eq!([c.ordered_nonzero, c.diagonal, c.zero_eps, c.repeated, c.pool_size], counts, "{nx}x{ny}");
    }
}

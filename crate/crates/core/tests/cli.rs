use std::fs;
use std::process::{Command, Output};

fn vipsa(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vipsa")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn run_exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("u0.cfg");
    fs::write(&cfg, "nx = 2\nny = 2\nu = 0\n").unwrap();
    let out = tmp.path().join("u0");
    let o = vipsa(&["run", cfg.to_str().unwrap(), "-o", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(out.join("manifest.json").is_file());

    fs::write(&cfg, "nx = 2\nny = 2\nu = 4\nmax_epochs = 1\n").unwrap();
    let o = vipsa(&["run", cfg.to_str().unwrap(), "-o", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));

    fs::write(&cfg, "nx = 2\nny = 2\nu = 4\ntypo = 1\n").unwrap();
    let bad = tmp.path().join("bad");
    let o = vipsa(&["run", cfg.to_str().unwrap(), "-o", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 4"));
    assert!(!bad.exists());
}

#[test]
fn ed_writes_csv() {
    let tmp = tempfile::tempdir().unwrap();
    let o = vipsa(&["ed", "--nx", "2", "--ny", "2", "-u", "0,4", "--basis", "both", "-o", tmp.path().to_str().unwrap()]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("-2.1027484"));
    let csv = fs::read_to_string(tmp.path().join("ed.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "u,energy,degeneracy,basis_difference,fermi_sea_energy,fermi_sea_degeneracy"
    );
    assert_eq!(lines.count(), 2);
}

#[test]
fn pool_info_prints_census() {
    let o = vipsa(&["pool-info", "2x2,2x4"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let row = |tag: &str| text.lines().find(|l| l.starts_with(tag)).unwrap().split_whitespace().last().unwrap().to_string();
    assert_eq!(row("2x2"), "13");
    assert_eq!(row("2x4"), "130");
    assert_eq!(vipsa(&["pool-info", "2by2"]).status.code(), Some(1));
}

#[test]
fn compare_writes_merged_table() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("a.cfg");
    fs::write(&cfg, "nx = 2\nny = 2\nu = 2\n").unwrap();
    let run = tmp.path().join("run");
    assert!(vipsa(&["run", cfg.to_str().unwrap(), "-o", run.to_str().unwrap()]).status.success());
    let o = vipsa(&["compare", run.to_str().unwrap(), run.to_str().unwrap(), "-o", tmp.path().to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(tmp.path().join("compare.csv")).unwrap();
    assert_eq!(csv.lines().next().unwrap(), "step,run:energy,run:fidelity,run#2:energy,run#2:fidelity");

    let missing = tmp.path().join("nope");
    assert_eq!(vipsa(&["compare", missing.to_str().unwrap()]).status.code(), Some(1));
}

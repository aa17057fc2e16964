//! Config-driven runs of both ansatze written to disk, then merged into one
//! comparison table, as the `vipsa run` and `vipsa compare` commands do.

use std::path::PathBuf;

use hubbard_vipsa::experiment::{cmd_compare, cmd_run, ExperimentConfig};
use hubbard_vipsa::Result;

fn main() -> Result<()> {
    let root = std::env::temp_dir().join("vipsa-compare-example");
    let mut dirs: Vec<PathBuf> = Vec::new();
    for ansatz in ["vipsa", "hva"] {
        let dir = root.join(ansatz);
        let text = format!("nx = 2\nny = 2\nu = 4\nansatz = {ansatz}\noutput_dir = {}\n", dir.display());
        let config = ExperimentConfig::parse(&text)?;
        let manifest = cmd_run(&config, &mut std::io::sink())?;
        println!("{ansatz:>5}: {:?}, final error {:.2e}, {} step rows", manifest.status, manifest.final_energy - manifest.ground_energy, manifest.step_rows);
        dirs.push(dir);
    }

    let cmp = cmd_compare(&dirs, 0.1)?;
    for r in &cmp.runs {
        let hit = r.steps_to_tol.map_or("never".to_string(), |s| s.to_string());
        println!("{:>5} reaches error <= {} at step {hit}", r.name, cmp.tol);
    }
    let out = root.join("compare.csv");
    cmp.write_csv(&out)?;
    println!("merged table ({} rows, columns {:?}) in {}", cmp.rows.len(), cmp.columns, out.display());
    Ok(())
}

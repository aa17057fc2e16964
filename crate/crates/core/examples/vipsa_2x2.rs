//! Full adaptive run on the 2x2 grid, epoch by epoch, against exact
//! diagonalization.
//!
//! Usage: cargo run --release --example vipsa_2x2 [U]

use hubbard_vipsa::lattice::GridSpec;
use hubbard_vipsa::vipsa::{vipsa_run, VipsaConfig, VipsaProblem};
use hubbard_vipsa::Result;

fn main() -> Result<()> {
    let u = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(4.0);
    let grid = GridSpec::new(2, 2, 1.0, u)?;
    let problem = VipsaProblem::new(&grid, 2, 2)?;
    let ground = problem.ground_space()?;
    println!("{grid}: pool of {}, exact E0 = {:.10}", problem.pool.len(), ground.energy);

    let run = vipsa_run(&problem, &VipsaConfig::default(), Some(&ground), |_, _, _, _| Ok(()))?;
    println!("{:>5} {:>10} {:>5} {:>7} {:>6} {:>14} {:>10} {:>9}", "epoch", "max|g|", "added", "params", "steps", "energy", "error", "fidelity");
    for e in &run.epochs {
        println!(
            "{:>5} {:>10.3e} {:>5} {:>7} {:>6} {:>14.10} {:>10.2e} {:>9.6}",
            e.epoch,
            e.max_gradient,
            e.selected.len(),
            e.n_params,
            e.inner_steps,
            e.energy,
            e.energy - ground.energy,
            e.fidelity.unwrap_or(f64::NAN)
        );
    }
    println!("stopped: {:?} after {} optimizer steps", run.termination, run.steps.len() - 1);
    Ok(())
}

//! Hamiltonian-variational baseline. The all-zero start is exactly
//! stationary, so the run begins with a small seeded kick.
//!
//! Usage: cargo run --release --example hva_baseline [nx ny U]

use hubbard_vipsa::hva::{hva_run, HvaConfig, HvaLayout, HvaProblem};
use hubbard_vipsa::lattice::GridSpec;
use hubbard_vipsa::Result;

fn main() -> Result<()> {
    let args: Vec<f64> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let (nx, ny, u) = match args[..] {
        [nx, ny, u] => (nx as usize, ny as usize, u),
        _ => (2, 2, 4.0),
    };
    let grid = GridSpec::new(nx, ny, 1.0, u)?;
    let n = grid.n_sites();
    let problem = HvaProblem::new(&grid, n.div_ceil(2), n / 2)?;
    let ground = problem.ground_space()?;
    let config = HvaConfig::default();
    let layout = HvaLayout::new(&grid, config.layers);
    println!(
        "{grid}: {} vertical + {} horizontal matchings, {} parameters per layer, {} in total",
        layout.vertical.len(),
        layout.horizontal.len(),
        layout.params_per_layer(),
        layout.n_params()
    );

    let run = hva_run(&problem, &config, Some(&ground), |_, _, _| Ok(()))?;
    println!("largest gradient at zero parameters: {:e} (kicked: {})", run.initial_max_gradient, run.jittered);
    for s in run.steps.iter().filter(|s| s.step % 50 == 0) {
        println!("  step {:>5}  E {:>14.10}  error {:>9.2e}  F {:.6}", s.step, s.energy, s.energy - ground.energy, s.fidelity.unwrap_or(f64::NAN));
    }
    println!(
        "best E {:.10} (error {:.2e}) after {} steps, converged: {}",
        run.energy,
        run.energy - ground.energy,
        run.steps.last().map_or(0, |s| s.step),
        run.converged
    );
    Ok(())
}

//! Exact diagonalization in a fixed (n_up, n_down) sector, in both the
//! site and the momentum-mode register, plus the ground-space artifact.
//!
//! Usage: cargo run --release --example exact_ground_state [nx ny U]

use hubbard_vipsa::exact::{sector_eigenpairs, GroundSpace};
use hubbard_vipsa::hamiltonian::build_pair;
use hubbard_vipsa::lattice::GridSpec;
use hubbard_vipsa::sector::SectorOperator;
use hubbard_vipsa::Result;

fn main() -> Result<()> {
    let args: Vec<f64> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let (nx, ny, u) = match args[..] {
        [nx, ny, u] => (nx as usize, ny as usize, u),
        _ => (2, 4, 2.0),
    };
    let grid = GridSpec::new(nx, ny, 1.0, u)?;
    let n = grid.n_sites();
    let (up, down) = (n.div_ceil(2), n / 2);
    let pair = build_pair(&grid)?;

    let real = SectorOperator::from_pauli(&pair.real_space, up, down)?;
    let modes = SectorOperator::from_pauli(&pair.k_space.total, up, down)?;
    println!("{grid}: sector ({up}, {down}), dimension {}", real.sector().dim());
    println!("  nonzeros: site register {}, mode register {}", real.nnz(), modes.nnz());

    let er = sector_eigenpairs(&real, 6)?.values;
    let ek = sector_eigenpairs(&modes, 6)?.values;
    println!("  {:>3} {:>16} {:>16}", "i", "sites", "modes");
    for (i, (a, b)) in er.iter().zip(&ek).enumerate() {
        println!("  {i:>3} {a:>16.10} {b:>16.10}");
    }

    let gs = GroundSpace::from_operator(&modes)?;
    println!("  ground energy {:.10}, degeneracy {}", gs.energy, gs.degeneracy());

    let path = std::env::temp_dir().join(format!("groundspace-{}.json", grid.shape_tag()));
    gs.save(&path)?;
    let back = GroundSpace::load(&path)?;
    println!("  saved to {} and reloaded (fidelity of vector 0: {:.12})", path.display(), back.fidelity(&gs.state(0))?);
    Ok(())
}

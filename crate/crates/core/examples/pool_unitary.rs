//! The interaction pool of a grid and the closed-form pool rotation.

use hubbard_vipsa::lattice::{enumerate_modes, fermi_sea, GridSpec};
use hubbard_vipsa::statevector::basis_state;
use hubbard_vipsa::vipsa::build_pool;
use hubbard_vipsa::Result;

fn main() -> Result<()> {
    let grid = GridSpec::new(2, 4, 1.0, 2.0)?;
    let pool = build_pool(&grid)?;
    let c = &pool.census;
    println!("{grid}");
    println!(
        "  {} ordered quadruples: {} diagonal, {} with zero energy denominator, {} with repeated orbitals",
        c.ordered_nonzero, c.diagonal, c.zero_eps, c.repeated
    );
    println!("  pool keeps one of each conjugate pair: {} operators", c.pool_size);

    let modes = enumerate_modes(&grid);
    let sea = fermi_sea(&grid, 4, 4)?;
    let phi = basis_state(&sea.occupied_qubits(&modes), grid.n_qubits())?;

    // exp(θA) mixes |s> with O|s> only; the Fermi sea is either rotated into
    // one excited determinant or left alone
    println!("\n  {:<12} {:>9} {:>9} {:>12} {:>12}", "label", "V", "eps", "<phi|U|phi>", "max |Im|");
    for op in pool.operators.iter().take(8) {
        let mut psi = phi.clone();
        op.generator.apply_unitary(0.4, &mut psi);
        let stay = phi.inner(&psi).re;
        println!("  {:<12} {:>9.5} {:>9.4} {:>12.6} {:>12.1e}", op.label, op.v(), op.eps(), stay, psi.max_imag());
    }
    println!("\n  cos(0.4) = {:.6}", 0.4f64.cos());
    Ok(())
}

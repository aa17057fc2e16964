//! Single-particle modes and Fermi seas of the supported grids.

use hubbard_vipsa::lattice::{enumerate_modes, fermi_sea, GridSpec};
use hubbard_vipsa::Result;

fn main() -> Result<()> {
    for (nx, ny) in [(2, 2), (2, 3), (2, 4), (3, 3)] {
        let grid = GridSpec::new(nx, ny, 1.0, 0.0)?;
        let n = grid.n_sites();
        let (up, down) = (n.div_ceil(2), n / 2);
        let modes = enumerate_modes(&grid);
        let sea = fermi_sea(&grid, up, down)?;
        println!("{grid}, ({up}, {down}) electrons");
        for (i, m) in modes.iter().enumerate() {
            let mark = match (sea.occupied_up.contains(&i), sea.occupied_down.contains(&i)) {
                (true, true) => "up+down",
                (true, false) => "up",
                (false, true) => "down",
                _ => "",
            };
            println!("  mode {i}: (mx {}, my {})  e = {:+.4}  {mark}", m.mx(), m.my(), m.energy);
        }
        println!("  sea energy {:.6}, degeneracy {}\n", sea.energy, sea.degeneracy);
    }
    Ok(())
}

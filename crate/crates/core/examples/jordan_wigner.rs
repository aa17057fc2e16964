//! Jordan-Wigner images of the ladder terms the toolkit is built from.
//!
//! Qubit `2*i + s` holds spin `s` (0 = up) of orbital `i`, and `n = (I - Z)/2`.

use hubbard_vipsa::fermion::{jordan_wigner, jordan_wigner_sum, LadderTerm};
use hubbard_vipsa::gates::PoolGenerator;
use hubbard_vipsa::Result;

fn main() -> Result<()> {
    let n = 6;

    let hop = [LadderTerm::excitation(0, 4), LadderTerm::excitation(4, 0)];
    println!("c+0 c4 + c+4 c0  ->  {}", jordan_wigner_sum(&hop, n)?);

    println!("n3                ->  {}", jordan_wigner(&LadderTerm::number(3), n)?);

    let onsite = LadderTerm::real(1.0, vec![
        hubbard_vipsa::fermion::Ladder::create(0),
        hubbard_vipsa::fermion::Ladder::annihilate(0),
        hubbard_vipsa::fermion::Ladder::create(1),
        hubbard_vipsa::fermion::Ladder::annihilate(1),
    ]);
    println!("n0 n1             ->  {}", jordan_wigner(&onsite, n)?);

    // a pool generator O - O+ maps to eight mutually commuting strings
    let gen = PoolGenerator::from_qubits(0, 3, 5, 2, n)?;
    let image = gen.pauli_image();
    println!("\nA = O - O+ for O = c+0 c+3 c5 c2 ({} strings):", image.len());
    for s in image.terms() {
        println!("  {s}");
    }
    Ok(())
}

//! Where on the unit sphere a fiber is stretched, for the `C` and the
//! logarithmic invariants, and where the two criteria disagree.

use hencky::kinematics::InvariantFamily;
use hencky::lab::{sphere_map, transition_zone, DEFAULT_SPHERE_EIGENVALUES};

fn main() -> hencky::error::Result<()> {
    let ev = DEFAULT_SPHERE_EIGENVALUES;
    for (family, i) in [(InvariantFamily::C, 1), (InvariantFamily::C, 2), (InvariantFamily::H, 1)] {
        let g = sphere_map(ev, family, i, 36, 72)?;
        let n = g.signs.iter().flatten().count();
        let pos = g.signs.iter().flatten().filter(|&&s| s > 0).count();
        println!("{family:?} i={i}: {pos}/{n} directions in tension");
    }
    let zone = transition_zone(ev, 36, 72)?;
    println!("{} directions where the C and H switches disagree", zone.len());
    for (theta, phi) in zone.iter().take(5) {
        println!("  theta {theta:6.1}  phi {phi:6.1}");
    }
    Ok(())
}

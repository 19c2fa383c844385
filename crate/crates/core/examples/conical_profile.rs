//! Worst-cone density profile of planar Lebesgue measure, compared with the
//! explicit constant from the constants chain.

use conelab::constructions::lebesgue;
use conelab::density::{constants_chain, density_profile};
use conelab::geometry::{build_direction_net, build_subspace_net, Point};

fn main() -> conelab::Result<()> {
    let alpha = 0.5;
    let consts = constants_chain(2, 1, 1.5, alpha)?;
    let tree = lebesgue(2, 2)?;
    let dirs = build_direction_net(2, alpha)?;
    let planes = build_subspace_net(2, 1, alpha)?;
    let x = Point::new(vec![0.3, 0.6])?;
    let prof = density_profile(&tree, &x, alpha, 0.5, 6, &dirs, &planes, 0.05, 6)?;
    for (r, m) in prof.radii.iter().zip(&prof.ratios) {
        println!("r = {r:<9} worst ratio in [{:.4}, {:.4}]", m.lo, m.hi);
    }
    println!("frequency above 0.05: {:.2}", prof.frequency(0.05, 6));
    println!(
        "ln c = {:.3e}; exceeded: {}",
        consts.ln_c,
        consts.exceeds_c(prof.running_sup[5])
    );
    Ok(())
}

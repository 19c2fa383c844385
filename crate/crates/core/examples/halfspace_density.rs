//! Mass outside almost half-spaces for planar Lebesgue measure and a segment
//! measure, bracketed by the net minima at α/2 and α.

use conelab::constructions::{lebesgue, x_axis_segment};
use conelab::density::halfspace_deficiency;
use conelab::geometry::{build_direction_net, Point};

fn main() -> conelab::Result<()> {
    let alpha = 0.5;
    let net = build_direction_net(2, alpha)?;
    println!("direction net: {} directions", net.len());
    for (name, tree, x) in [
        ("lebesgue", lebesgue(2, 2)?, Point::new(vec![0.41, 0.53])?),
        ("segment", x_axis_segment(), Point::new(vec![0.37, 0.0])?),
    ] {
        for j in 2..=4 {
            let r = 0.5f64.powi(j);
            let (lo, hi) = halfspace_deficiency(&tree, &x, r, alpha, &net, 10)?.bracket();
            println!("{name:>9} r = {r:<7} infimum in [{lo:.4}, {hi:.4}]");
        }
    }
    Ok(())
}

//! Membership in the three cone families, on a few hand-picked points.

use conelab::geometry::{
    in_almost_halfspace, in_one_sided_cone, in_plane_cone, Point, Subspace, UnitVector,
};

fn main() -> conelab::Result<()> {
    let x = Point::origin(2);
    let east = UnitVector::axis(2, 0);
    let horizontal = Subspace::line(&east);
    let probes = [[1.0, 0.0], [1.0, 1.0], [0.0, 1.0], [-1.0, 0.2]];

    println!(
        "{:>12} {:>10} {:>10} {:>10}",
        "y", "H(0.5)", "X+(0.5)", "X(0.5)"
    );
    for c in probes {
        let y = Point::new(c.to_vec())?;
        println!(
            "{:>12} {:>10} {:>10} {:>10}",
            format!("{c:?}"),
            in_almost_halfspace(&x, &east, 0.5, &y)?,
            in_one_sided_cone(&x, &east, 0.5, &y)?,
            in_plane_cone(&x, &horizontal, 0.5, &y)?,
        );
    }
    Ok(())
}

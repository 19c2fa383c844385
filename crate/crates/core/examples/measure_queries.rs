//! Certified ball and cone masses on a binomial cascade and on planar Lebesgue
//! measure, at growing depth budgets.

use conelab::constructions::{binomial_measure, lebesgue, BinomialSpec};
use conelab::geometry::{Point, Subspace, UnitVector};
use conelab::measure::{AxisBox, RegionQuery};

fn main() -> conelab::Result<()> {
    let cascade = binomial_measure(BinomialSpec::default())?;
    let x = Point::new(vec![0.3])?;
    for depth in [2, 6, 12] {
        let m = cascade.region_measure(
            &RegionQuery::ball(x.clone(), 0.1),
            cascade.level_for_radius(0.1) + depth,
        )?;
        println!(
            "cascade  B(0.3, 0.1) depth +{depth:<2}: [{:.10}, {:.10}]",
            m.lo, m.hi
        );
    }
    println!(
        "cascade  [0, 1/2): {:?}",
        cascade.box_measure(&AxisBox::new(&[0.0], &[0.5])?, 4)?
    );

    let plane = lebesgue(2, 2)?;
    let c = Point::new(vec![0.5, 0.5])?;
    let line = Subspace::line(&UnitVector::axis(2, 0));
    for depth in [4, 8] {
        let q = RegionQuery::ball(c.clone(), 0.25).with_plane_cone(line.clone(), 0.5);
        let m = plane.region_measure(&q, plane.level_for_radius(0.25) + depth)?;
        // exact: the double sector of half-angle asin(0.5) = π/6 covers a third of the disk
        println!(
            "lebesgue X(c, 0.25, horizontal, 0.5) depth +{depth}: [{:.6}, {:.6}] (exact {:.6})",
            m.lo,
            m.hi,
            std::f64::consts::PI * 0.0625 / 3.0
        );
    }
    let pts = cascade.sample_points(5, 30, 42);
    println!(
        "sampled cascade points: {:?}",
        pts.iter().map(|p| p.as_slice()[0]).collect::<Vec<_>>()
    );
    Ok(())
}

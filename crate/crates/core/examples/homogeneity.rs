//! Average homogeneity of binomial cascades and the entropy dimension bound
//! it implies.

use conelab::constructions::{binomial_measure, BinomialSpec, QSchedule};
use conelab::homogeneity::{dimension_bound, hom_estimate};

fn main() -> conelab::Result<()> {
    println!("{:>6} {:>10} {:>12}", "q", "hom", "dim bound");
    for q in [0.125, 0.25, 0.375, 0.45] {
        let tree = binomial_measure(BinomialSpec {
            q: QSchedule::Constant(q),
        })?;
        let est = hom_estimate(&tree, 1, 14)?;
        let bound = dimension_bound(2, 1, 1, est.limsup_proxy / 2.0)?;
        println!("{q:>6} {:>10.6} {bound:>12.6}", est.limsup_proxy);
    }
    Ok(())
}

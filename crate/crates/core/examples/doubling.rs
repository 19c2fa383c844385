//! Frequency of doubling scales along μ-typical points of the slowly
//! degenerating binomial cascade.

use conelab::constructions::{binomial_measure, BinomialSpec};
use conelab::homogeneity::{doubling_constant, doubling_frequency};

fn main() -> conelab::Result<()> {
    let tree = binomial_measure(BinomialSpec::default())?;
    for p in [0.5, 0.9] {
        let c = doubling_constant(1, 2, p)?;
        let freqs: Vec<f64> = tree
            .sample_points(8, 48, 3)
            .iter()
            .map(|x| doubling_frequency(&tree, x, 0.5, 2, c, 30, 6).map(|s| s.frequency))
            .collect::<conelab::Result<_>>()?;
        println!("p = {p}: c = {c:.3e}, frequencies {freqs:.3?}");
    }
    Ok(())
}

//! Best six-interval constants around a cascade point, scale by scale.

use conelab::cli::canned::six_interval_decay;

fn main() -> conelab::Result<()> {
    let seed = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(7);
    let rep = six_interval_decay(20, seed)?;
    println!("x = {:.8}", rep.x[0]);
    for (j, c) in rep.levels.iter().zip(&rep.constants) {
        println!("r = 2^-{j:<2} constant {c:.4e}");
    }
    println!(
        "non-increasing: {}, halved: {}",
        rep.non_increasing, rep.halved
    );
    Ok(())
}

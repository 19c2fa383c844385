//! Rows of rotated balls: sibling separation near the top of a branch and
//! cone hit counts around the row normal further down.

use conelab::cli::canned::rotating_cone_decay;
use conelab::constructions::{random_branch, rotating_radius, sibling_separation_check};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> conelab::Result<()> {
    println!("R_2 = {}, R_3 = {}", rotating_radius(2), rotating_radius(3));
    let path = random_branch(9, &mut ChaCha8Rng::seed_from_u64(7));
    for rec in sibling_separation_check(&path, 6)? {
        println!(
            "n = {} nearest outsider {:.3e} >= {:.3e}: {}",
            rec.n, rec.min_dist, rec.bound, rec.holds
        );
    }
    let rep = rotating_cone_decay(64, 7)?;
    for r in rep.records.iter().step_by(8) {
        println!(
            "n = {:<3} hits {:<2} of {:<5} ratio bound {:.4}",
            r.n, r.hits, r.fan, r.ratio_bound
        );
    }
    println!(
        "hits <= {} from n = {}; halved: {}",
        rep.hit_bound, rep.n0, rep.halved
    );
    Ok(())
}

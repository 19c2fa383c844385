//! Direction and subspace nets: sizes, and the covering guarantee checked on
//! random elements.

use conelab::geometry::{build_direction_net, build_subspace_net, Subspace, UnitVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> conelab::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for (n, alpha) in [(2, 0.5), (3, 0.5), (3, 0.3)] {
        let dirs = build_direction_net(n, alpha)?;
        let uncovered = (0..10_000)
            .filter(|_| {
                dirs.covering_index(&UnitVector::random(n, &mut rng))
                    .is_none()
            })
            .count();
        println!(
            "R^{n}, alpha {alpha}: {} directions (beta {:.4}), {uncovered} of 10000 uncovered",
            dirs.len(),
            dirs.beta
        );
    }
    for (n, m) in [(2, 1), (3, 1), (3, 2)] {
        let net = build_subspace_net(n, m, 0.5)?;
        let mut worst = 0.0f64;
        for _ in 0..2000 {
            worst = worst.max(net.nearest(&Subspace::random(n, m, &mut rng))?.1);
        }
        println!(
            "G({n}, {}): {} planes, worst distance {worst:.4} (< 0.25)",
            n - m,
            net.len()
        );
    }
    Ok(())
}

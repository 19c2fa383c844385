//! Searching for point sets with no cone triple, and checking that a found
//! set really has none.

use conelab::configurations::{compute_t, find_cone_triple, search_counterexample_set};

fn main() -> conelab::Result<()> {
    for (n, alpha, size) in [
        (1, 0.5, 3),
        (2, 1.0, 3),
        (2, 0.1, 3),
        (2, 0.1, 5),
        (3, 0.1, 6),
    ] {
        match search_counterexample_set(n, alpha, size, 2000, 9)? {
            Some(pts) => println!(
                "R^{n}, alpha {alpha}: {size} points without a triple (recheck: {})",
                find_cone_triple(&pts, alpha)?.is_none()
            ),
            None => println!("R^{n}, alpha {alpha}: every trial of {size} points had a triple"),
        }
    }
    for alpha in [0.3, 0.6, 1.0] {
        println!("t({alpha}) = {:.6}", compute_t(alpha)?.t);
    }
    Ok(())
}

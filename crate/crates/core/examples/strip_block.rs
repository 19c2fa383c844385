//! The strip/block measure: schedule constants, straight-line exclusion and
//! horizontal-cone ratios under the schedule `I_j = j + 1`.

use conelab::cli::canned::strip_cone_decay;
use conelab::constructions::{
    schedule_constants, verify_curve_exclusion, Schedule, StripBlockSpec,
};

fn main() -> conelab::Result<()> {
    for i in 2..=5 {
        let c = schedule_constants(i)?;
        println!("I = {i}: C = {:.6}, N = {:e}", c.c_i, c.n_i);
    }
    let spec = StripBlockSpec {
        schedule: Schedule::Increasing,
    };
    for level in 1..=3 {
        let rep = verify_curve_exclusion(&spec, level, 2000, 1)?;
        println!(
            "level {level} (I = {}): {} steep and {} flat violations, at most {} strips per flat line",
            rep.i_next, rep.vertical_violations, rep.horizontal_violations, rep.max_strips_hit
        );
    }
    let rep = strip_cone_decay(6, 20, 7)?;
    for r in &rep.records {
        println!(
            "level {} max ratio {:.2e} <= {:.3}",
            r.level, r.max_hi, r.bound_next
        );
    }
    Ok(())
}

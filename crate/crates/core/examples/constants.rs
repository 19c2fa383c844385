//! The full constants chain for planar measures of dimension above one.

use conelab::density::constants_chain;

fn main() -> conelab::Result<()> {
    let rep = constants_chain(2, 1, 1.5, 0.5)?;
    println!(
        "t = {:.4}, q = {}, K_dir = {}, K_sub = {}",
        rep.t, rep.q, rep.k_dir, rep.k_sub
    );
    println!(
        "M = {:.4e}, k = {:.4e}, eta = {:.4e}, p = {:.4e}",
        rep.big_m, rep.k, rep.eta, rep.p
    );
    println!("ln c = {:.4e}", rep.ln_c);
    for (name, ok) in &rep.checks {
        println!("  {name}: {ok}");
    }
    Ok(())
}

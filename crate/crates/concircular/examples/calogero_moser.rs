//! Separation of the three-particle Calogero-Moser system: the KBD solution
//! space and the separation tree.
//!
//! `cargo run --release --example calogero_moser`

use concircular::bekm::{bekm_separate, calogero_moser, solve_kbd, SeparationOptions, SolveOptions};
use concircular::linalg::Space;
use concircular::number::fmt_q;

fn main() -> concircular::error::Result<()> {
    let e3 = Space::euclidean(3);
    let v = calogero_moser(3, None, None)?;
    println!("V = {}", v.render());
    let sol = solve_kbd(&v, &e3, &SolveOptions::default())?;
    println!("KBD solution space: dimension {} ({} modulo the metric)", sol.dim(), sol.basis_modulo_metric().len());
    for p in sol.basis_modulo_metric() {
        println!("  w = [{}], m = {}", p.w.iter().map(fmt_q).collect::<Vec<_>>().join(", "), fmt_q(&p.m));
    }
    let tree = bekm_separate(&v, &e3, &SeparationOptions::default())?;
    print!("{}", tree.report());
    println!("families: {}", tree.families().join(", "));
    Ok(())
}

//! Diagonal self-adjoint operators converging to a Jordan block: the defect
//! shrinks with the parameter.
//!
//! `cargo run --example jordan_limit`

use concircular::linalg::jordan_limit_sequence;
use concircular::number::{q_to_f64, qf, Q};

fn main() -> concircular::error::Result<()> {
    let lam = qf(3, 2);
    for n in [2, 3] {
        for eps in [1, -1] {
            for e in [2u32, 6, 10] {
                let t = Q::new(1.into(), (1u64 << e).into());
                let d = jordan_limit_sequence(n, &lam, eps, &t)?.defect(&lam, eps);
                println!("n = {n}, eps = {eps:+}, t = 2^-{e}: defect {:.3e}", q_to_f64(&d));
            }
        }
    }
    Ok(())
}

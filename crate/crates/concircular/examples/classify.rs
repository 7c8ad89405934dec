//! Metric-Jordan form of a self-adjoint operator and the canonical form of
//! a concircular tensor moved by an isometry and a translation.
//!
//! `cargo run --example classify`

use concircular::ct::{canonicalize, ConcircularTensor};
use concircular::linalg::{metric_jordan_form, Space};
use concircular::matrix::QMat;
use concircular::number::{fmt_q, q, qf};

fn main() -> concircular::error::Result<()> {
    // A null Jordan block in Minkowski 3-space: A = 2I + N with N² = 0.
    let m3 = Space::minkowski(3);
    let a = QMat::from_rows(vec![vec![q(3), q(-1), q(0)], vec![q(1), q(1), q(0)], vec![q(0), q(0), q(2)]]);
    let form = metric_jordan_form(&m3, &a)?;
    println!("metric-Jordan blocks of A in M3:");
    for b in &form.blocks {
        println!("  {b}");
    }

    // A central tensor in E3, reflected and shifted.
    let e3 = Space::euclidean(3);
    let l = ConcircularTensor::central(e3.clone(), QMat::diag(&[q(0), q(1), q(3)]))?;
    let t = e3.reflection(&[q(1), q(1), q(0)])?;
    let moved = l.transformed(&t, &[qf(1, 2), q(-1), q(2)])?;
    let c = canonicalize(&moved)?;
    println!("\nvariant {} index {:?} sign {:?}", c.variant.label(), c.index_k, c.sign_eps);
    println!("translation back to canonical form: [{}]", c.translation.iter().map(fmt_q).collect::<Vec<_>>().join(", "));
    println!("iso form:");
    for b in &c.iso_form.blocks {
        println!("  {b}");
    }
    Ok(())
}

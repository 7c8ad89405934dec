//! Characteristic polynomials of canonical concircular tensors from the
//! closed formulas, checked against the determinant expansion, and the
//! constant eigenfunctions of a reducible tensor.
//!
//! `cargo run --example charpoly`

use concircular::charpoly::{charpoly_axial, charpoly_bruteforce, charpoly_central_ct, constant_eigenfunctions};
use concircular::ct::ConcircularTensor;
use concircular::linalg::Space;
use concircular::matrix::QMat;
use concircular::number::q;

fn main() -> concircular::error::Result<()> {
    let names = ["x1", "x2", "x3"];
    let e3 = Space::euclidean(3);

    let ellipsoidal = ConcircularTensor::central(e3.clone(), QMat::diag(&[q(0), q(1), q(3)]))?;
    let p = charpoly_central_ct(&ellipsoidal)?;
    println!("central:  {}", p.render(&names));
    assert_eq!(p, charpoly_bruteforce(&ellipsoidal)?);

    let paraboloidal = ConcircularTensor::axial(e3.clone(), QMat::diag(&[q(0), q(1), q(2)]), vec![q(1), q(0), q(0)])?;
    let p = charpoly_axial(&paraboloidal)?;
    println!("axial:    {}", p.render(&names));
    assert_eq!(p, charpoly_bruteforce(&paraboloidal)?);

    // A repeated eigenvalue of A gives a constant eigenfunction.
    let oblate = ConcircularTensor::central(e3, QMat::diag(&[q(0), q(1), q(1)]))?;
    for c in constant_eigenfunctions(&oblate)? {
        println!("constant eigenvalue {} with multiplicity {}", c.lambda, c.multiplicity);
    }
    Ok(())
}

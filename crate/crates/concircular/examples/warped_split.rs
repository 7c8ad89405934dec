//! Warped-product decomposition of a reducible tensor: cylindrical
//! coordinates about an axis of E3, checked at random points.
//!
//! `cargo run --example warped_split`

use concircular::ct::ConcircularTensor;
use concircular::linalg::Space;
use concircular::matrix::QMat;
use concircular::number::{fmt_q, q};
use concircular::warped::{split_reducible, warped_metric_identity_any_scale, OriginalTensor};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> concircular::error::Result<()> {
    let l = ConcircularTensor::central(Space::euclidean(3), QMat::diag(&[q(1), q(0), q(0)]))?;
    let split = split_reducible(&l, &[q(3), q(1), q(0)])?;
    let wpd = &split.wpd;
    println!("geodesic factor spanned by {:?}", wpd.v0().iter().map(|v| v.iter().map(fmt_q).collect::<Vec<_>>()).collect::<Vec<_>>());
    for (f, (lam, _)) in wpd.factors().iter().zip(&split.constant_eigs) {
        println!("spherical factor: axis {:?}, constant eigenvalue {}", f.axis.iter().map(fmt_q).collect::<Vec<_>>(), fmt_q(lam));
    }
    for c in wpd.image_conditions() {
        println!("image: {c}");
    }

    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut points = Vec::new();
    for _ in 0..10 {
        let pt = wpd.sample_point(&mut rng, 200).expect("sample point");
        split.verify_at(&OriginalTensor::Flat(&l), &pt)?;
        points.push(pt);
    }
    let report = warped_metric_identity_any_scale(wpd, 0, &points)?;
    println!("tensor identity verified at {} points; metric identity holds: {}", points.len(), report.holds);
    Ok(())
}

//! The elliptic and parabolic charts of the Euclidean plane: points from
//! canonical coordinates, eigenvalue verification and the closed-form
//! metric against the Jacobian pullback.
//!
//! `cargo run --example charts`

use concircular::coords::{Branch, Chart, IctData};
use concircular::ct::ConcircularTensor;
use concircular::linalg::Space;
use concircular::matrix::QMat;
use concircular::number::{fmt_q, q, qf, Q};

fn show(name: &str, chart: &Chart, u: &[Q]) -> concircular::error::Result<()> {
    let x = chart.forward(u, &Branch::Positive)?;
    chart.verify(u, &x)?;
    let g = chart.metric(u)?;
    let pull = chart.pullback_metric(u, &Branch::Positive)?;
    println!("{name}: u = [{}]", u.iter().map(fmt_q).collect::<Vec<_>>().join(", "));
    println!("  x = {:?}", x.to_f64());
    println!("  closed-form metric [{}]", g.iter().map(fmt_q).collect::<Vec<_>>().join(", "));
    println!("  pullback diagonal  [{:.12}, {:.12}]", pull[0][0], pull[1][1]);
    for c in chart.domain_constraints() {
        println!("  domain: {c}");
    }
    Ok(())
}

fn main() -> concircular::error::Result<()> {
    let e2 = Space::euclidean(2);
    let elliptic = ConcircularTensor::central(e2.clone(), QMat::diag(&[q(0), q(1)]))?;
    show("elliptic", &Chart::new(IctData::central(&elliptic)?), &[qf(1, 4), q(3)])?;
    let parabolic = ConcircularTensor::axial(e2, QMat::zeros(2, 2), vec![q(1), q(0)])?;
    show("parabolic", &Chart::new(IctData::axial(&parabolic)?), &[q(-1), q(2)])?;
    Ok(())
}

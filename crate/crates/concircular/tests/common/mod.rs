//! Builders shared by the integration tests.
#![allow(dead_code)]

use concircular::ct::{ConcircularTensor, SphericalCT};
use concircular::linalg::{lower_jordan, skew_identity, Space};
use concircular::matrix::QMat;
use concircular::number::{q, qf, Q};
use num_traits::{One, Zero};

/// Canonical block: `(size, λ, metric)` where metric is `g_ii` for size one
/// and `ε` (metric `ε S_k`) for larger blocks.
pub type Block = (usize, Q, Q);

/// Block-diagonal metric and lower Jordan parameter matrix.
pub fn canonical_parts(blocks: &[Block]) -> (Space, QMat) {
    let mut g = QMat::zeros(0, 0);
    let mut a = QMat::zeros(0, 0);
    for (k, lam, met) in blocks {
        let gb = if *k == 1 { QMat::diag(std::slice::from_ref(met)) } else { skew_identity(*k).scale(met) };
        g = g.direct_sum(&gb);
        a = a.direct_sum(&lower_jordan(lam, *k));
    }
    (Space::new(g).expect("nondegenerate"), a)
}

pub fn central(blocks: &[Block]) -> ConcircularTensor {
    let (sp, a) = canonical_parts(blocks);
    ConcircularTensor::central(sp, a).unwrap()
}

/// Axial tensor with leading nilpotent block of size `k` and sign `eps`.
pub fn axial(k: usize, eps: i64, rest: &[Block]) -> ConcircularTensor {
    let mut blocks = vec![(k, Q::zero(), q(eps))];
    blocks.extend_from_slice(rest);
    let (sp, a) = canonical_parts(&blocks);
    let n = sp.dim();
    let mut w = vec![Q::zero(); n];
    w[0] = Q::one();
    ConcircularTensor::axial(sp, a, w).unwrap()
}

pub fn spherical(kappa: Q, blocks: &[Block]) -> SphericalCT {
    let (sp, a) = canonical_parts(blocks);
    SphericalCT::new(sp, kappa, a).unwrap()
}

/// Diagonal blocks from small integer seeds.
pub fn diag_blocks(lams: &[i64], signs: &[bool]) -> Vec<Block> {
    lams.iter()
        .zip(signs)
        .map(|(&l, &s)| (1, qf(l, 2), if s { q(1) } else { q(-1) }))
        .collect()
}

pub fn rq(v: i64) -> Q {
    qf(v, 3)
}

//! Metric-Jordan form checks against operators with a known block structure.

use concircular::linalg::{
    complex_to_real_basis, jordan_limit_sequence, lex_less, lower_jordan, metric_jordan_form, skew_identity,
    ComplexRational, MJBlock, Space,
};
use concircular::matrix::{qvec, QMat};
use concircular::number::{q, qf, Surd, Q};
use proptest::prelude::*;

/// Planted block: real `(lambda, k, eps)` or a complex pair `a ± bi` of size 1.
#[derive(Clone, Debug)]
enum Planted {
    Real(i64, usize, i32),
    Pair(i64, i64),
}

/// Builds `(g, A)` in block coordinates together with the expected blocks.
fn assemble(blocks: &[Planted]) -> (QMat, QMat, Vec<MJBlock>) {
    let mut g = QMat::zeros(0, 0);
    let mut a = QMat::zeros(0, 0);
    let mut expected = Vec::new();
    for b in blocks {
        match *b {
            Planted::Real(l, k, e) => {
                g = g.direct_sum(&skew_identity(k).scale(&q(e as i64)));
                a = a.direct_sum(&lower_jordan(&q(l), k));
                expected.push(MJBlock { lambda: Surd::int(l), k, eps: e });
            }
            Planted::Pair(re, im) => {
                g = g.direct_sum(&QMat::diag(&[q(1), q(-1)]));
                a = a.direct_sum(&QMat::from_i64(&[&[re, -im], &[im, re]]));
                let lam = Surd::int(re) + Surd::i().scale(&q(im));
                expected.push(MJBlock { lambda: lam.clone(), k: 1, eps: 1 });
                expected.push(MJBlock { lambda: lam.conj(), k: 1, eps: 1 });
            }
        }
    }
    expected.sort_by(|x, y| x.canonical_cmp(y));
    (g, a, expected)
}

/// Conjugates `(g, A)` by an invertible `P`: `A' = P A P^-1`, `g' = P^-T g P^-1`.
fn conjugate(g: &QMat, a: &QMat, p: &QMat) -> (QMat, QMat) {
    let pinv = p.inverse().expect("invertible");
    (&(&pinv.transpose() * g) * &pinv, &(p * a) * &pinv)
}

fn unimodular(n: usize, seed: &[i64]) -> QMat {
    // Product of elementary shears, hence always invertible.
    let mut p = QMat::identity(n);
    for (idx, s) in seed.iter().enumerate() {
        let i = idx % n;
        let j = (idx * 7 + 3) % n;
        if i != j {
            let mut e = QMat::identity(n);
            e[(i, j)] = qf(*s, 1 + (idx as i64 % 3));
            p = &p * &e;
        }
    }
    p
}

/// Power sums `tr(A^j)` computed by plain matrix powers.
fn trace_powers(a: &QMat) -> Vec<Q> {
    (1..=a.nrows()).map(|j| a.pow(j).trace()).collect()
}

#[test]
fn scalar_product_examples() {
    let m = Space::minkowski(2);
    assert_eq!(m.scalar_product(&qvec(&[1, 0]), &qvec(&[1, 0])).unwrap(), q(-1));
    let e = Space::euclidean(2);
    assert_eq!(e.scalar_product(&qvec(&[3, 4]), &qvec(&[3, 4])).unwrap(), q(25));
    let s = Space::new(skew_identity(2)).unwrap();
    assert_eq!(s.scalar_product(&qvec(&[1, 0]), &qvec(&[0, 1])).unwrap(), q(1));
    assert!(e.scalar_product(&qvec(&[1]), &qvec(&[1, 2])).is_err());
}

#[test]
fn self_adjoint_examples() {
    let e = Space::euclidean(2);
    assert!(e.is_self_adjoint(&QMat::from_i64(&[&[1, 2], &[2, 5]])).unwrap());
    let m = Space::minkowski(2);
    assert!(!m.is_self_adjoint(&QMat::from_i64(&[&[0, 1], &[1, 0]])).unwrap());
    let s = Space::new(skew_identity(2)).unwrap();
    assert!(s.is_self_adjoint(&lower_jordan(&q(0), 2)).unwrap());
}

#[test]
fn lex_order_examples() {
    let c = |a: i64, b: i64| ComplexRational::new(q(a), q(b));
    assert!(lex_less(&c(0, 0), &c(1, 0)));
    assert!(lex_less(&c(5, -1), &c(0, 0)));
    assert!(!lex_less(&c(2, 3), &c(2, 3)));
}

#[test]
fn lex_order_is_strict_total_on_grid() {
    let pts: Vec<ComplexRational> = (-2..=2)
        .flat_map(|a| (-2..=2).map(move |b| ComplexRational::new(qf(a, 2), qf(b, 3))))
        .collect();
    for x in &pts {
        assert!(!lex_less(x, x));
        for y in &pts {
            let count = [lex_less(x, y), lex_less(y, x), x == y].iter().filter(|b| **b).count();
            assert_eq!(count, 1);
            for z in &pts {
                if lex_less(x, y) && lex_less(y, z) {
                    assert!(lex_less(x, z));
                }
            }
        }
    }
}

#[test]
fn diagonal_example() {
    let sp = Space::euclidean(3);
    let f = metric_jordan_form(&sp, &QMat::diag(&[q(2), q(2), q(5)])).unwrap();
    let b = |l: i64| MJBlock { lambda: Surd::int(l), k: 1, eps: 1 };
    assert_eq!(f.blocks, vec![b(2), b(2), b(5)]);
}

#[test]
fn complex_pair_example() {
    let sp = Space::minkowski(2);
    let f = metric_jordan_form(&sp, &QMat::from_i64(&[&[0, -1], &[1, 0]])).unwrap();
    assert_eq!(f.blocks.len(), 2);
    assert_eq!(f.blocks[0].lambda, -Surd::i());
    assert_eq!(f.blocks[1].lambda, Surd::i());
    assert!(f.blocks.iter().all(|b| b.eps == 1 && b.k == 1));
}

#[test]
fn non_self_adjoint_rejected() {
    let sp = Space::minkowski(2);
    assert!(metric_jordan_form(&sp, &QMat::from_i64(&[&[0, 1], &[1, 0]])).is_err());
}

#[test]
fn real_quadratic_spectrum() {
    let sp = Space::euclidean(2);
    let a = QMat::from_i64(&[&[1, 1], &[1, 0]]);
    let f = metric_jordan_form(&sp, &a).unwrap();
    f.verify(&sp, &a).unwrap();
    assert_eq!(f.blocks[0].lambda, Surd::quad(qf(1, 2), qf(-1, 2), 5));
    assert_eq!(f.blocks[1].lambda, Surd::quad(qf(1, 2), qf(1, 2), 5));
}

#[test]
fn complex_to_real_single_pair() {
    let sp = Space::minkowski(2);
    let a = QMat::from_i64(&[&[1, -2], &[2, 1]]);
    let f = metric_jordan_form(&sp, &a).unwrap();
    let r = complex_to_real_basis(&f).unwrap();
    for x in r.basis.entries() {
        assert!(x.is_real());
    }
    // Real block: alpha on the diagonal and +-beta off it.
    assert_eq!(r.operator[(0, 0)], Surd::int(1));
    assert_eq!(r.operator[(1, 1)], Surd::int(1));
    assert_eq!(r.operator[(0, 1)].clone() + r.operator[(1, 0)].clone(), Surd::zero());
    assert_eq!(r.operator[(1, 0)].clone() * r.operator[(1, 0)].clone(), Surd::int(4));
}

#[test]
fn complex_to_real_pair_of_size_two() {
    // Complex block of size 2 realized as a real 4x4 operator.
    let mut a = QMat::zeros(4, 4);
    // (s1, t1, s2, t2) with A s1 = s1 + 2 t1 + s2, A t1 = t1 - 2 s1 + t2.
    let acols = [[1, 2, 1, 0], [-2, 1, 0, 1], [0, 0, 1, 2], [0, 0, -2, 1]];
    for (j, c) in acols.iter().enumerate() {
        for i in 0..4 {
            a[(i, j)] = q(c[i]);
        }
    }
    let g = skew_identity(2).direct_sum(&skew_identity(2).scale(&q(-1)));
    // Reorder g to the interleaved (s1, t1, s2, t2) layout.
    let perm = [0usize, 2, 1, 3];
    let mut gi = QMat::zeros(4, 4);
    for i in 0..4 {
        for j in 0..4 {
            gi[(i, j)] = g[(perm[i], perm[j])].clone();
        }
    }
    let sp = Space::new(gi).unwrap();
    assert!(sp.is_self_adjoint(&a).unwrap());
    let f = metric_jordan_form(&sp, &a).unwrap();
    assert_eq!(f.blocks.iter().map(|b| b.k).collect::<Vec<_>>(), vec![2, 2]);
    let r = complex_to_real_basis(&f).unwrap();
    assert!(r.basis.entries().iter().all(Surd::is_real));
    assert!(r.operator.entries().iter().all(Surd::is_real));
    assert!(r.gram.entries().iter().all(Surd::is_real));
}

#[test]
fn complex_to_real_identity_on_real_forms() {
    let sp = Space::euclidean(3);
    let a = QMat::diag(&[q(0), q(1), q(3)]);
    let f = metric_jordan_form(&sp, &a).unwrap();
    let r = complex_to_real_basis(&f).unwrap();
    assert_eq!(r.basis, f.basis);
}

#[test]
fn jordan_limit_examples() {
    let one = jordan_limit_sequence(1, &q(4), -1, &qf(1, 3)).unwrap();
    assert_eq!(one.operator, QMat::diag(&[q(4)]));
    assert_eq!(one.metric, QMat::diag(&[q(-1)]));
    assert_eq!(one.transform, QMat::identity(1));
    let two = jordan_limit_sequence(2, &q(2), 1, &qf(1, 10)).unwrap();
    assert!((&two.conjugated_operator() - &lower_jordan(&q(2), 2)).max_abs() <= qf(1, 10));
    let three = jordan_limit_sequence(3, &q(-1), -1, &qf(1, 100)).unwrap();
    assert!((&three.conjugated_metric() - &skew_identity(3).scale(&q(-1))).max_abs() <= qf(3, 100));
    assert!(jordan_limit_sequence(4, &q(0), 1, &qf(1, 2)).is_err());
}

#[test]
fn jordan_limit_defect_decreases() {
    for n in 1..=3 {
        for &eps in &[1, -1] {
            let mut prev: Option<Q> = None;
            for e in 1..=10 {
                let t = Q::new(1.into(), num_bigint::BigInt::from(1u64 << e));
                let d = jordan_limit_sequence(n, &qf(3, 2), eps, &t).unwrap().defect(&qf(3, 2), eps);
                if let Some(p) = &prev {
                    assert!(&d <= p);
                }
                prev = Some(d);
            }
            assert!(prev.unwrap() < qf(1, 256));
        }
    }
}

fn planted_strategy() -> impl Strategy<Value = Vec<Planted>> {
    let real = (-2i64..=2, 1usize..=3, prop_oneof![Just(1), Just(-1)]).prop_map(|(l, k, e)| Planted::Real(l, k, e));
    let pair = (-1i64..=1, 1i64..=2).prop_map(|(a, b)| Planted::Pair(a, b));
    prop::collection::vec(prop_oneof![3 => real, 1 => pair], 1..=3).prop_filter("dimension at most 6", |bs| {
        bs.iter().map(|b| match b {
            Planted::Real(_, k, _) => *k,
            Planted::Pair(..) => 2,
        }).sum::<usize>() <= 6
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn recovers_planted_blocks(blocks in planted_strategy(), seed in prop::collection::vec(-3i64..=3, 4..10)) {
        let (g0, a0, expected) = assemble(&blocks);
        let n = g0.nrows();
        let p = unimodular(n, &seed);
        let (g, a) = conjugate(&g0, &a0, &p);
        let sp = Space::new(g).unwrap();
        prop_assert!(sp.is_self_adjoint(&a).unwrap());
        let f = metric_jordan_form(&sp, &a).unwrap();
        f.verify(&sp, &a).unwrap();
        prop_assert_eq!(&f.blocks, &expected);

        // Spectrum agrees with power sums of the input matrix.
        for (j, tr) in trace_powers(&a).iter().enumerate() {
            let mut sum = Surd::zero();
            for b in &f.blocks {
                let mut pw = Surd::one();
                for _ in 0..=j {
                    pw = pw * b.lambda.clone();
                }
                sum = sum + pw.scale(&q(b.k as i64));
            }
            prop_assert_eq!(sum, Surd::from_q(tr.clone()));
        }
    }

    #[test]
    fn blocks_invariant_under_isometry(blocks in planted_strategy(), seed in prop::collection::vec(-3i64..=3, 4..10), axes in prop::collection::vec(prop::collection::vec(-2i64..=2, 6), 1..3)) {
        let (g0, a0, _) = assemble(&blocks);
        let n = g0.nrows();
        let (g, a) = conjugate(&g0, &a0, &unimodular(n, &seed));
        let sp = Space::new(g).unwrap();
        let mut t = QMat::identity(n);
        for ax in &axes {
            let u: Vec<Q> = ax.iter().take(n).map(|&x| q(x)).collect();
            if let Ok(r) = sp.reflection(&u) {
                t = &t * &r;
            }
        }
        prop_assert!(sp.is_isometry(&t));
        let tinv = t.inverse().unwrap();
        let b = &(&tinv * &a) * &t;
        let f1 = metric_jordan_form(&sp, &a).unwrap();
        let f2 = metric_jordan_form(&sp, &b).unwrap();
        prop_assert_eq!(f1.blocks, f2.blocks);
    }
}

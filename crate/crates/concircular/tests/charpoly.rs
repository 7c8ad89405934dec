//! Characteristic polynomials: closed forms against the determinant oracle.

mod common;

use common::{axial, central, diag_blocks, spherical, Block};
use concircular::charpoly::{
    axial_complement_charpoly, charpoly_axial, charpoly_bruteforce, charpoly_central, charpoly_central_ct,
    charpoly_spherical, constant_eigenfunctions, constant_eigenfunctions_spherical, eigenfunctions_at,
    radial_residuals, t_identity_residual, DEFAULT_ROOT_TOL,
};
use concircular::ct::{ConcircularTensor, SphericalCT};
use concircular::error::Error;
use concircular::linalg::{lower_jordan, Space};
use concircular::matrix::QMat;
use concircular::number::{q, qf, q_to_f64, Surd, Q};
use concircular::poly::MultiPoly;
use num_traits::Zero;
use proptest::prelude::*;

fn x(n: usize, i: usize) -> MultiPoly {
    MultiPoly::var(n, i)
}

#[test]
fn diagonal_formula_two_dimensions() {
    // p = (z-λ1)(z-λ2) - x1²(z-λ2) - x2²(z-λ1)
    let l = central(&diag_blocks(&[0, 2], &[true, true]));
    let p = charpoly_central_ct(&l).unwrap();
    let (x1, x2) = (x(2, 0).pow(2), x(2, 1).pow(2));
    assert_eq!(p.coeff(2), MultiPoly::constant(2, q(1)));
    assert_eq!(p.coeff(1), MultiPoly::constant(2, q(-1)) - x1.clone() - x2.clone());
    assert_eq!(p.coeff(0), x1);
}

#[test]
fn jordan_two_block() {
    // g = εS_2, A = J_2(0): p = z² - ε(2 x1 x2 z + x1²)
    for eps in [1, -1] {
        let l = central(&[(2, Q::zero(), q(eps))]);
        let p = charpoly_central_ct(&l).unwrap();
        let e = q(eps);
        assert_eq!(p.coeff(1), (&x(2, 0) * &x(2, 1)).scale(&(q(-2) * &e)));
        assert_eq!(p.coeff(0), x(2, 0).pow(2).scale(&(-e)));
        assert_eq!(p, charpoly_bruteforce(&l).unwrap());
    }
}

#[test]
fn axial_k1_two_dimensions() {
    // p = (z - λ2)(z - 2εx1) - ε x2²
    for eps in [1i64, -1] {
        let l = axial(1, eps, &[(1, q(3), q(1))]);
        let p = charpoly_axial(&l).unwrap();
        let e = q(eps);
        let z = x(3, 2);
        let expect = (&(z.clone() - MultiPoly::constant(3, q(3))) * &(z - x(3, 0).scale(&(q(2) * &e))))
            - x(3, 1).pow(2).scale(&e);
        assert_eq!(p.bivariate(), expect);
        assert_eq!(p, charpoly_bruteforce(&l).unwrap());
    }
}

#[test]
fn axial_sign_flip_is_a_reflection() {
    // With k = 1, replacing ε by -ε and x1 by -x1 keeps p up to the sign of
    // the complement term; check through the oracle on both signs.
    let lp = axial(1, 1, &[]);
    let lm = axial(1, -1, &[]);
    let pp = charpoly_axial(&lp).unwrap();
    let pm = charpoly_axial(&lm).unwrap();
    let flip = vec![-x(2, 0), x(2, 1)];
    assert_eq!(pp.bivariate().compose(&flip), pm.bivariate());
}

#[test]
fn metric_gives_power_and_trivial_sphere() {
    let l = ConcircularTensor::metric(Space::euclidean(4));
    let p = charpoly_bruteforce(&l).unwrap();
    assert_eq!(p.at_z(&q(1)), MultiPoly::zero(4));
    assert_eq!(p.constant_root_multiplicity(&q(1)), 4);
    // A = cI on a sphere: r² p = r² (z - c)^{n-1}.
    let s = spherical(q(1), &diag_blocks(&[4, 4, 4], &[true, true, true]));
    let p = charpoly_spherical(&s).unwrap();
    assert_eq!(p, charpoly_bruteforce(&s).unwrap());
    let r2 = p.divisor().unwrap().clone();
    let e = (MultiPoly::var(4, 3) - MultiPoly::constant(4, q(2))).pow(2);
    assert_eq!(p.bivariate(), &e * &r2.extend_vars(4));
}

#[test]
fn sphere_example_degree_one() {
    // E²(κ) with A = diag(0,1), g = diag(κ,κ): the root u gives x² = κ·κ·u·r²-normalized.
    let kappa = q(1);
    let s = spherical(kappa.clone(), &[(1, q(0), kappa.clone()), (1, q(1), kappa.clone())]);
    let p = charpoly_spherical(&s).unwrap();
    assert_eq!(p.degree(), Some(1));
    assert_eq!(p, charpoly_bruteforce(&s).unwrap());
    // On the unit circle at (3/5, 4/5) the root is u = (x¹)² / ... evaluate.
    let roots = eigenfunctions_at(&p, &[qf(3, 5), qf(4, 5)], DEFAULT_ROOT_TOL).unwrap();
    assert_eq!(roots.len(), 1);
    assert!((roots[0].value.re - 9.0 / 25.0).abs() < 1e-10);
}

#[test]
fn elliptic_interlacing_and_axis_singularity() {
    let l = central(&diag_blocks(&[0, 2], &[true, true]));
    let p = charpoly_central_ct(&l).unwrap();
    let r = eigenfunctions_at(&p, &[qf(1, 2), qf(1, 2)], DEFAULT_ROOT_TOL).unwrap();
    assert_eq!(r.len(), 2);
    assert!(0.0 < r[0].value.re && r[0].value.re < 1.0 && 1.0 < r[1].value.re);
    // On the axis x² = 0 one root is exactly λ2 = 1.
    let r = eigenfunctions_at(&p, &[qf(1, 2), q(0)], DEFAULT_ROOT_TOL).unwrap();
    let hit = r.iter().filter_map(|x| x.interval.clone()).any(|(a, b)| a <= q(1) && q(1) <= b);
    assert!(hit);
}

#[test]
fn roots_match_dense_eigenvalues() {
    let l = central(&diag_blocks(&[-1, 1, 3], &[true, true, true]));
    let p = charpoly_central_ct(&l).unwrap();
    let pt = [qf(1, 3), qf(-2, 5), qf(3, 7)];
    let r = eigenfunctions_at(&p, &pt, DEFAULT_ROOT_TOL).unwrap();
    let m = l.at(&pt);
    let dense = nalgebra::DMatrix::from_fn(3, 3, |i, j| q_to_f64(&m[(i, j)]));
    let mut ev: Vec<f64> = dense.symmetric_eigenvalues().iter().cloned().collect();
    ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
    for (a, b) in r.iter().zip(&ev) {
        assert!((a.value.re - b).abs() < 1e-9);
    }
}

#[test]
fn constant_eigenfunction_examples() {
    let l = central(&diag_blocks(&[0, 2, 2], &[true, true, true]));
    let c = constant_eigenfunctions(&l).unwrap();
    assert_eq!(c.len(), 1);
    assert_eq!(c[0].lambda, Surd::from_q(q(1)));
    assert_eq!(c[0].multiplicity, 1);
    let l = central(&diag_blocks(&[0, 2, 4], &[true, true, true]));
    assert!(constant_eigenfunctions(&l).unwrap().is_empty());
    let l = central(&[(2, Q::zero(), q(1)), (2, Q::zero(), q(1))]);
    assert!(matches!(constant_eigenfunctions(&l), Err(Error::NotOrthogonal(_))));
}

#[test]
fn size_cap_is_enforced() {
    let l = ConcircularTensor::metric(Space::euclidean(7));
    assert!(matches!(charpoly_bruteforce(&l), Err(Error::Unsupported(_))));
}

#[test]
fn non_canonical_input_rejected() {
    let sp = Space::euclidean(2);
    let a = QMat::from_i64(&[&[1, 1], &[1, 1]]);
    assert!(charpoly_central(&sp, &a).is_err());
    let l = ConcircularTensor::axial(sp, QMat::zeros(2, 2), vec![q(1), q(1)]).unwrap();
    assert!(charpoly_axial(&l).is_err());
}

#[test]
fn jordan_block_has_no_constant_roots() {
    for k in 2..=3 {
        for eps in [1, -1] {
            let l = central(&[(k, qf(1, 2), q(eps)), (1, q(3), q(1))]);
            let p = charpoly_central_ct(&l).unwrap();
            assert_eq!(p.constant_root_content().degree(), Some(0));
        }
    }
}

#[test]
fn t_identity_for_all_small_shapes() {
    for shape in shapes_up_to_three() {
        let l = central(&shape);
        let p = charpoly_central_ct(&l).unwrap();
        let b = l.a().charpoly();
        assert!(t_identity_residual(l.space(), &p, &b, 1).unwrap().is_zero(), "central {shape:?}");
    }
    for k in 1..=3 {
        for eps in [1i64, -1] {
            let l = axial(k, eps, &diag_blocks(&[1, 3], &[true, eps > 0]));
            let p = charpoly_axial(&l).unwrap();
            let b = axial_complement_charpoly(&l).unwrap();
            assert!(t_identity_residual(l.space(), &p, &b, eps as i32).unwrap().is_zero(), "axial k={k} eps={eps}");
        }
    }
}

fn shapes_up_to_three() -> Vec<Vec<Block>> {
    let mut out = vec![diag_blocks(&[0, 1, 5], &[true, false, true])];
    for k in 2..=3 {
        for eps in [1, -1] {
            out.push(vec![(k, qf(1, 2), q(eps))]);
            out.push(vec![(k, qf(1, 2), q(eps)), (1, q(2), q(-1))]);
        }
    }
    out
}

fn block_strategy(max_jordan: usize) -> impl Strategy<Value = Vec<Block>> {
    (
        0..=max_jordan,
        prop::bool::ANY,
        -4i64..4,
        prop::collection::vec((-6i64..6, prop::bool::ANY), 0..4),
    )
        .prop_map(|(k, e, lam, diag)| {
            let mut blocks = Vec::new();
            if k >= 2 {
                blocks.push((k, qf(lam, 2), if e { q(1) } else { q(-1) }));
            }
            for (l, s) in diag {
                blocks.push((1, qf(l, 3), if s { q(1) } else { qf(-3, 2) }));
            }
            if blocks.is_empty() {
                blocks.push((1, q(1), q(1)));
            }
            blocks
        })
        .prop_filter("dimension at most five", |b| b.iter().map(|x| x.0).sum::<usize>() <= 5)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn central_formula_equals_oracle(blocks in block_strategy(3)) {
        let l = central(&blocks);
        prop_assert_eq!(charpoly_central_ct(&l).unwrap(), charpoly_bruteforce(&l).unwrap());
    }

    #[test]
    fn axial_formula_equals_oracle(k in 1usize..=3, e in prop::bool::ANY, rest in prop::collection::vec((-6i64..6, prop::bool::ANY), 0..3)) {
        let eps = if e { 1 } else { -1 };
        let rest: Vec<Block> = rest.into_iter().map(|(l, s)| (1, qf(l, 2), if s { q(1) } else { q(-1) })).collect();
        let l = axial(k, eps, &rest);
        prop_assert_eq!(charpoly_axial(&l).unwrap(), charpoly_bruteforce(&l).unwrap());
    }

    #[test]
    fn spherical_formula_equals_oracle(blocks in block_strategy(3), kp in 1i64..4) {
        let s = spherical(q(kp), &blocks);
        let p = charpoly_spherical(&s).unwrap();
        prop_assert_eq!(&p, &charpoly_bruteforce(&s).unwrap());
        for r in radial_residuals(&p) {
            prop_assert!(r.is_zero());
        }
    }

    #[test]
    fn constant_eigenfunctions_match_content(lams in prop::collection::vec(-2i64..2, 2..5), signs in prop::collection::vec(prop::bool::ANY, 5)) {
        let blocks = diag_blocks(&lams, &signs[..lams.len()]);
        let l = central(&blocks);
        let c = constant_eigenfunctions(&l).unwrap();
        let p = charpoly_bruteforce(&l).unwrap();
        let mut uniq: Vec<i64> = lams.clone();
        uniq.sort();
        uniq.dedup();
        for v in uniq {
            let lam = qf(v, 2);
            let mult = p.constant_root_multiplicity(&lam);
            let got = c.iter().find(|e| e.lambda == Surd::from_q(lam.clone())).map(|e| e.multiplicity).unwrap_or(0);
            prop_assert_eq!(mult, got);
        }
    }
}

#[test]
fn spherical_constants_and_triviality() {
    let s = spherical(q(1), &diag_blocks(&[0, 2, 2], &[true, true, true]));
    let c = constant_eigenfunctions_spherical(&s).unwrap();
    assert_eq!(c.len(), 1);
    assert_eq!(charpoly_spherical(&s).unwrap().constant_root_multiplicity(&q(1)), 1);
    let t = SphericalCT::new(Space::euclidean(3), q(1), QMat::identity(3)).unwrap();
    assert!(matches!(constant_eigenfunctions_spherical(&t), Err(Error::Trivial)));
    let _ = lower_jordan(&q(0), 1);
}

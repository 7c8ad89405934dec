use concircular::bekm::kbd::{kbd_operator, residual_symbolic, residual_vanishes};
use concircular::bekm::potential::{calogero_moser_direction, numeric_gradient};
use concircular::bekm::*;
use concircular::charpoly::constant_eigenfunctions;
use concircular::ct::{iso_equivalent, ConcircularTensor};
use concircular::error::Error;
use concircular::linalg::Space;
use concircular::matrix::{outer, vscale, QMat};
use concircular::number::{q, q_to_f64, qf, Q};
use concircular::poly::MultiPoly;
use num_traits::{One, Zero};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn ones(n: usize) -> Vec<Q> {
    vec![Q::one(); n]
}

fn inv_square(n: usize, a: &[Q]) -> Potential {
    Potential::linear_product(n, Q::one(), &[(a.to_vec(), -2)]).unwrap()
}

fn dot(a: &[Q], b: &[Q]) -> Q {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn random_point(rng: &mut ChaCha8Rng, n: usize) -> Vec<Q> {
    (0..n).map(|_| qf(rng.gen_range(-9..=9), rng.gen_range(1..=4))).collect()
}

/// `d⊙d` as flat parameters: `A = d d♭`, `w = 0`, `m = 0`.
fn dd_params(d: &[Q]) -> CtParams {
    let n = d.len();
    CtParams { a: outer(d, d), w: vec![Q::zero(); n], m: Q::zero() }
}

/// `2 d⊙r`: `A = 0`, `w = d`, `m = 0`.
fn dr_params(d: &[Q]) -> CtParams {
    let n = d.len();
    CtParams { a: QMat::zeros(n, n), w: d.to_vec(), m: Q::zero() }
}

/// `r⊙r`: `m = 1`.
fn rr_params(n: usize) -> CtParams {
    CtParams { a: QMat::zeros(n, n), w: vec![Q::zero(); n], m: Q::one() }
}

fn metric_params(n: usize) -> CtParams {
    CtParams { a: QMat::identity(n), w: vec![Q::zero(); n], m: Q::zero() }
}

/// Rational orthogonal matrix from a skew matrix by the Cayley transform.
fn cayley(s: &QMat) -> QMat {
    let n = s.nrows();
    let i = QMat::identity(n);
    &(&i - s) * &(&i + s).inverse().unwrap()
}

fn skew3(a: i64, b: i64, c: i64) -> QMat {
    QMat::from_rows(vec![
        vec![q(0), qf(a, 3), qf(b, 3)],
        vec![qf(-a, 3), q(0), qf(c, 3)],
        vec![qf(-b, 3), qf(-c, 3), q(0)],
    ])
}

// ---------------------------------------------------------------- derivatives

#[test]
fn power_rule_first_derivatives() {
    let a = vec![q(1), q(2), q(-1)];
    let v = inv_square(3, &a);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..10 {
        let x = random_point(&mut rng, 3);
        let s = dot(&x, &a);
        if s.is_zero() {
            continue;
        }
        for i in 0..3 {
            let expect = q(-2) * &a[i] / (s.clone() * &s * &s);
            assert_eq!(v.partial(i).eval(&x).unwrap(), expect);
        }
    }
}

#[test]
fn polynomial_hessian_is_constant() {
    let a = vec![q(2), q(-1), qf(1, 2)];
    let v = Potential::linear_product(3, Q::one(), &[(a.clone(), 2)]).unwrap();
    let h = v.derivatives().hessian;
    let x = vec![q(5), qf(1, 3), q(-7)];
    for i in 0..3 {
        for j in 0..3 {
            assert_eq!(h[i][j].eval(&x).unwrap(), q(2) * &a[i] * &a[j]);
        }
    }
}

#[test]
fn calogero_moser_partials_match_finite_differences() {
    let v = calogero_moser(3, None, None).unwrap();
    let grad = v.derivatives().gradient;
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..20 {
        let x = random_point(&mut rng, 3);
        let Ok(_) = v.eval(&x) else { continue };
        let fd = numeric_gradient(&v, &x, 1e-5);
        for i in 0..3 {
            let exact = q_to_f64(&grad[i].eval(&x).unwrap());
            assert!((exact - fd[i]).abs() <= 1e-8 * exact.abs().max(1.0), "{exact} vs {}", fd[i]);
        }
    }
}

#[test]
fn pole_is_a_domain_error() {
    let v = inv_square(2, &[q(1), q(-1)]);
    assert!(matches!(v.eval(&[q(3), q(3)]), Err(Error::Domain(_))));
}

#[test]
fn calogero_moser_shapes() {
    let v2 = calogero_moser(2, None, None).unwrap();
    assert_eq!(v2, inv_square(2, &[q(1), q(-1)]));
    assert_eq!(calogero_moser(3, None, None).unwrap().terms().len(), 3);
    let masses = [q(1), q(2), q(3)];
    assert_eq!(calogero_moser_direction(3, Some(&masses)), vec![q(1), qf(1, 2), qf(1, 3)]);
    assert!(calogero_moser(1, None, None).is_err());
}

// ---------------------------------------------------------------- residuals

/// Finite-difference oracle for the residual `∂_i α_j − ∂_j α_i` with
/// `α = K dV` evaluated in floating point.
fn residual_oracle(sp: &Space, p: &CtParams, v: &Potential, x: &[Q]) -> Vec<Vec<f64>> {
    let n = x.len();
    let k = kbd_operator(sp, p);
    let alpha = |y: &[f64]| -> Vec<f64> {
        let yq: Vec<Q> = y.iter().map(|t| concircular::number::q_from_f64(*t, 1 << 40)).collect();
        let g = numeric_gradient(v, &yq, 1e-4);
        (0..n).map(|j| (0..n).map(|kk| k[kk][j].eval_f64(y) * g[kk]).sum()).collect()
    };
    let xf: Vec<f64> = x.iter().map(q_to_f64).collect();
    let h = 1e-3;
    let mut d = vec![vec![0.0; n]; n];
    for i in 0..n {
        let mut xp = xf.clone();
        let mut xm = xf.clone();
        xp[i] += h;
        xm[i] -= h;
        let (ap, am) = (alpha(&xp), alpha(&xm));
        for j in 0..n {
            d[i][j] = (ap[j] - am[j]) / (2.0 * h);
        }
    }
    (0..n).map(|i| (0..n).map(|j| d[i][j] - d[j][i]).collect()).collect()
}

#[test]
fn residual_matches_finite_difference_oracle() {
    let sp = Space::euclidean(3);
    let v = inv_square(3, &[q(1), q(2), q(0)]).add(&inv_square(3, &[q(0), q(1), q(-1)])).unwrap();
    let p = CtParams { a: QMat::diag(&[q(1), q(-2), q(3)]), w: vec![q(1), q(0), q(2)], m: q(1) };
    let x = vec![qf(3, 2), qf(1, 3), q(2)];
    let exact = kbd_residual(&sp, &p, &v, &x).unwrap();
    let fd = residual_oracle(&sp, &p, &v, &x);
    for i in 0..3 {
        for j in 0..3 {
            let a = q_to_f64(&exact[(i, j)]);
            assert!((a - fd[i][j]).abs() <= 1e-3 * a.abs().max(1.0), "{a} vs {}", fd[i][j]);
        }
    }
}

#[test]
fn metric_solves_every_kbd_equation() {
    let sp = Space::minkowski(3);
    let v = inv_square(3, &[q(1), q(2), q(0)]).add(&Potential::polynomial(MultiPoly::var(3, 0).pow(3))).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..5 {
        let x = random_point(&mut rng, 3);
        if let Ok(r) = kbd_residual(&sp, &metric_params(3), &v, &x) {
            assert!(r.is_zero());
        }
    }
    assert!(residual_vanishes(&kbd_operator(&sp, &metric_params(3)), &v).unwrap());
}

#[test]
fn constant_potential_solves_for_every_tensor() {
    let sp = Space::euclidean(3);
    let v = Potential::constant(3, qf(7, 2));
    let p = CtParams { a: QMat::from_rows(vec![vec![q(1), q(2), q(0)], vec![q(2), q(0), q(5)], vec![q(0), q(5), q(-1)]]), w: vec![q(1), q(-3), q(2)], m: q(4) };
    assert!(kbd_residual(&sp, &p, &v, &[q(1), q(2), q(3)]).unwrap().is_zero());
    assert!(residual_vanishes(&kbd_operator(&sp, &p), &v).unwrap());
}

#[test]
fn calogero_moser_solution_has_vanishing_residual() {
    let sp = Space::euclidean(3);
    let v = calogero_moser(3, None, None).unwrap();
    let d = ones(3);
    let mut l = dd_params(&d);
    l.a = &l.a + &QMat::identity(3).scale(&q(2));
    l.w = vscale(&d, &q(3));
    l.m = q(-1);
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut checked = 0;
    while checked < 10 {
        let x = random_point(&mut rng, 3);
        if let Ok(r) = kbd_residual(&sp, &l, &v, &x) {
            assert!(r.is_zero());
            checked += 1;
        }
    }
}

fn small_params(n: usize) -> impl Strategy<Value = CtParams> {
    (
        proptest::collection::vec(-3i64..=3, n * n),
        proptest::collection::vec(-3i64..=3, n),
        -3i64..=3,
    )
        .prop_map(move |(a, w, m)| {
            let mut s = QMat::zeros(n, n);
            for i in 0..n {
                for j in 0..n {
                    s[(i, j)] = q(a[i * n + j] + a[j * n + i]);
                }
            }
            CtParams { a: s, w: w.into_iter().map(q).collect(), m: q(m) }
        })
}

fn combine(a: &Q, p1: &CtParams, b: &Q, p2: &CtParams) -> CtParams {
    CtParams {
        a: &p1.a.scale(a) + &p2.a.scale(b),
        w: p1.w.iter().zip(&p2.w).map(|(x, y)| x * a + y * b).collect(),
        m: p1.m.clone() * a + p2.m.clone() * b,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn residual_is_linear_in_the_tensor(p1 in small_params(3), p2 in small_params(3), a in -4i64..=4, b in -4i64..=4) {
        let sp = Space::euclidean(3);
        let v = calogero_moser(3, None, None).unwrap();
        let x = vec![qf(1, 2), q(2), qf(-5, 3)];
        let (a, b) = (q(a), q(b));
        let lhs = kbd_residual(&sp, &combine(&a, &p1, &b, &p2), &v, &x).unwrap();
        let r1 = kbd_residual(&sp, &p1, &v, &x).unwrap();
        let r2 = kbd_residual(&sp, &p2, &v, &x).unwrap();
        prop_assert_eq!(lhs, &r1.scale(&a) + &r2.scale(&b));
    }

    #[test]
    fn eigenvector_orthogonal_to_w_gives_inverse_square_solution(
        s in (-4i64..=4, -4i64..=4, -4i64..=4),
        lambdas in proptest::collection::vec(-5i64..=5, 3),
        wcoef in proptest::collection::vec(-3i64..=3, 3),
        m in -2i64..=2,
        slot in 0usize..3,
    ) {
        let sp = Space::euclidean(3);
        let t = cayley(&skew3(s.0, s.1, s.2));
        let d = QMat::diag(&lambdas.iter().map(|&x| q(x)).collect::<Vec<_>>());
        let a_mat = &(&t * &d) * &t.transpose();
        let mut w_frame: Vec<Q> = wcoef.into_iter().map(q).collect();
        w_frame[slot] = Q::zero();
        let p = CtParams { a: a_mat, w: t.mul_vec(&w_frame), m: q(m) };
        let a = t.col(slot);
        let v = inv_square(3, &a);
        prop_assert!(residual_vanishes(&kbd_operator(&sp, &p), &v).unwrap());
    }
}

// ---------------------------------------------------------------- flat solve

/// Whether two solution spaces have the same span.
fn same_span(a: &KbdSolutionSpace, b: &KbdSolutionSpace) -> bool {
    a.dim() == b.dim() && a.basis.iter().all(|p| b.contains(p)) && b.basis.iter().all(|p| a.contains(p))
}

#[test]
fn calogero_moser_three_solution_space() {
    let sp = Space::euclidean(3);
    let v = calogero_moser(3, None, None).unwrap();
    let sol = solve_kbd(&v, &sp, &SolveOptions::default()).unwrap();
    assert_eq!(sol.dim(), 4);
    assert_eq!(sol.basis_modulo_metric().len(), 3);
    let d = ones(3);
    for p in [metric_params(3), dd_params(&d), dr_params(&d), rr_params(3)] {
        assert!(sol.contains(&p));
    }
    assert!(sol.samples >= sol.layout().len() + 5);
    for p in &sol.basis {
        assert!(residual_vanishes(&kbd_operator(&sp, p), &v).unwrap());
    }
}

#[test]
fn sampled_solution_agrees_with_coefficient_matching() {
    for n in [2usize, 3] {
        let sp = Space::euclidean(n);
        let v = calogero_moser(n, None, None).unwrap();
        let sampled = solve_kbd(&v, &sp, &SolveOptions::default()).unwrap();
        let brute = solve_kbd_by_coefficients(&v, &sp, false).unwrap();
        assert!(same_span(&sampled, &brute), "n = {n}");
    }
}

#[test]
fn seeds_do_not_change_the_solution_space() {
    let sp = Space::euclidean(3);
    let v = calogero_moser(3, None, None).unwrap();
    let a = solve_kbd(&v, &sp, &SolveOptions::default()).unwrap();
    let b = solve_kbd(&v, &sp, &SolveOptions { seed: 99, ..SolveOptions::default() }).unwrap();
    assert!(same_span(&a, &b));
}

#[test]
fn orthonormal_frame_potential_is_multi_separable() {
    let sp = Space::euclidean(3);
    let t = cayley(&skew3(1, -2, 1));
    let ks = [q(1), q(2), qf(1, 3)];
    let mut v = Potential::zero(3);
    for i in 0..3 {
        v = v.add(&inv_square(3, &t.col(i)).scale(&ks[i])).unwrap();
    }
    let sol = solve_kbd(&v, &sp, &SolveOptions::default()).unwrap();
    for lambdas in [[0, 1, 2], [3, -1, 5], [1, 1, 4], [2, 2, 2]] {
        let d = QMat::diag(&lambdas.map(q));
        let a = &(&t * &d) * &t.transpose();
        let central = CtParams { a, w: vec![Q::zero(); 3], m: q(1) };
        assert!(sol.contains(&central), "{lambdas:?}");
    }
}

#[test]
fn zero_potential_admits_every_concircular_tensor() {
    for n in [2usize, 3] {
        for sp in [Space::euclidean(n), Space::minkowski(n)] {
            let sol = solve_kbd(&Potential::zero(n), &sp, &SolveOptions::default()).unwrap();
            assert_eq!(sol.dim(), (n + 1) * (n + 2) / 2);
        }
    }
}

#[test]
fn generic_potential_admits_only_the_metric() {
    let sp = Space::euclidean(2);
    let x = MultiPoly::var(2, 0);
    let y = MultiPoly::var(2, 1);
    let v = Potential::polynomial(x.pow(3) + y.pow(4) + &x * &y);
    let sol = solve_kbd(&v, &sp, &SolveOptions::default()).unwrap();
    assert_eq!(sol.dim(), 1);
    let tree = bekm_separate(&v, &sp, &SeparationOptions::default()).unwrap();
    assert!(tree.is_empty());
    assert!(tree.report().contains("no solutions beyond the metric"));
}

#[test]
fn solution_space_is_isometry_covariant() {
    let sp = Space::euclidean(3);
    let v = calogero_moser(3, None, None).unwrap();
    let t = cayley(&skew3(2, 1, -1));
    let c = vec![q(1), qf(-1, 2), q(3)];
    // V'(y) = V(Tᵀ(y − c)).
    let tt = t.transpose();
    let subs: Vec<MultiPoly> = (0..3)
        .map(|i| {
            let row = tt.row(i);
            MultiPoly::affine(&row, &-dot(&row, &c))
        })
        .collect();
    let v2 = v.compose(&subs).unwrap();
    let s1 = solve_kbd(&v, &sp, &SolveOptions::default()).unwrap();
    let s2 = solve_kbd(&v2, &sp, &SolveOptions::default()).unwrap();
    assert_eq!(s1.dim(), s2.dim());
    for p in &s1.basis {
        let l = p.to_ct(&sp).unwrap();
        let pushed = l.transformed(&t, &c).unwrap();
        assert!(s2.contains(&CtParams::of(&pushed)));
        assert!(iso_equivalent(&l, &pushed).unwrap());
    }
}

// ---------------------------------------------------------------- spherical

/// Euler operator oracle: for `α = K_s dV`, returns
/// `Σ_j x_j ∂_j α_i + α_i`, the components of the Lie derivative of `α`
/// along the dilatational field.
fn lie_derivative_along_r(k: &[Vec<MultiPoly>], v: &Potential) -> Vec<Potential> {
    let n = v.nvars();
    let grad = v.derivatives().gradient;
    (0..n)
        .map(|i| {
            let mut alpha = Potential::zero(n);
            for kk in 0..n {
                alpha = alpha.add(&grad[kk].mul_poly(&k[kk][i])).unwrap();
            }
            let mut out = alpha.clone();
            for j in 0..n {
                out = out.add(&alpha.partial(j).mul_poly(&MultiPoly::var(n, j))).unwrap();
            }
            out
        })
        .collect()
}

#[test]
fn spherical_operator_is_dilatation_invariant() {
    let sp = Space::euclidean(3);
    let v = calogero_moser(3, None, None).unwrap();
    let a = QMat::from_rows(vec![vec![q(1), q(2), q(0)], vec![q(2), q(-1), q(3)], vec![q(0), q(3), q(2)]]);
    for flag in [false, true] {
        let k = spherical_kbd_operator(&sp, &a, flag);
        for comp in lie_derivative_along_r(&k, &v) {
            assert!(comp.numerator().is_zero());
        }
    }
}

#[test]
fn identity_operator_is_trivial() {
    let sp = Space::euclidean(3);
    let v = calogero_moser(3, None, None).unwrap();
    assert!(residual_vanishes(&spherical_kbd_operator(&sp, &QMat::identity(3), false), &v).unwrap());
    let k = spherical_kbd_operator(&sp, &QMat::identity(3), false);
    // K_s(I) = r² G − r r♭ annihilates r.
    let x = [q(1), q(2), q(-1)];
    for i in 0..3 {
        let s: Q = (0..3).map(|j| k[i][j].eval(&x) * &x[j]).sum();
        assert!(s.is_zero());
    }
}

#[test]
fn spherical_calogero_moser_space() {
    let sp = Space::euclidean(3);
    let v = calogero_moser(3, None, None).unwrap();
    let sol = solve_spherical_kbd(&v, &sp, &SolveOptions::default()).unwrap();
    assert_eq!(sol.dim(), 2);
    let d = ones(3);
    assert!(sol.contains(&CtParams { a: QMat::identity(3), w: vec![Q::zero(); 3], m: Q::zero() }));
    assert!(sol.contains(&dd_params(&d)));
    let brute = solve_kbd_by_coefficients(&v, &sp, true).unwrap();
    assert!(same_span(&sol, &brute));
    assert!(residual_vanishes(&spherical_kbd_operator(&sp, &outer(&d, &d), true), &v).unwrap());
}

#[test]
fn spherical_zero_potential_admits_every_matrix() {
    let sp = Space::euclidean(3);
    let sol = solve_spherical_kbd(&Potential::zero(3), &sp, &SolveOptions::default()).unwrap();
    assert_eq!(sol.dim(), 6);
}

#[test]
fn spherical_precondition_is_checked() {
    let sp = Space::euclidean(2);
    let v = Potential::polynomial(MultiPoly::var(2, 0).pow(3));
    assert!(matches!(solve_spherical_kbd(&v, &sp, &SolveOptions::default()), Err(Error::Precondition(_))));
}

#[test]
fn lifting_potentials() {
    let sp = Space::euclidean(3);
    let kappa = qf(1, 4);
    let x = [q(1), q(2), q(-2)];
    let r2 = q(9);

    let c = Potential::constant(3, q(5));
    let lifted = lift_potential(&c, &sp, &kappa).unwrap();
    assert_eq!(lifted.eval(&x).unwrap(), q(5) / (kappa.clone() * &r2));

    let a = vec![q(1), q(0), q(1)];
    let vt = inv_square(3, &a).mul(&Potential::quadratic_power(&sp, 1, Q::one())).unwrap();
    let lifted = lift_potential(&vt, &sp, &kappa).unwrap();
    let expect = inv_square(3, &a).scale(&(Q::one() / &kappa));
    assert_eq!(lifted.eval(&x).unwrap(), expect.eval(&x).unwrap());
    assert_eq!(lifted.homogeneous_degree(), Some(-2));
    assert!(residual_vanishes(&kbd_operator(&sp, &rr_params(3)), &lifted).unwrap());

    assert!(lift_potential(&inv_square(3, &a), &sp, &kappa).is_err());
}

#[test]
fn symbolic_residual_of_general_tensor_is_nonzero_for_calogero_moser() {
    let sp = Space::euclidean(3);
    let v = calogero_moser(3, None, None).unwrap();
    let p = CtParams { a: QMat::diag(&[q(1), q(2), q(3)]), w: vec![Q::zero(); 3], m: q(1) };
    let res = residual_symbolic(&kbd_operator(&sp, &p), &v).unwrap();
    assert!(res.iter().any(|r| !r.numerator().is_zero()));
}

// ---------------------------------------------------------------- trees

fn check_tree_invariants(tree: &SeparationTree, v: &Potential) {
    let sp = &tree.space;
    for b in &tree.branches {
        match (&b.representative, &tree.kappa) {
            (Representative::Flat(p), None) => {
                assert!(residual_vanishes(&kbd_operator(sp, p), v).unwrap(), "{}", b.class.label());
            }
            (Representative::Spherical(a), Some(_)) => {
                assert!(residual_vanishes(&spherical_kbd_operator(sp, a, true), v).unwrap());
            }
            _ => panic!("representative does not match the problem"),
        }
        let factors = match &b.node {
            SeparationNode::Split { split, factors, .. } => {
                if split.restricted.dim() > 1 && split.restricted_spherical.is_none() {
                    assert!(constant_eigenfunctions(&split.restricted).unwrap().is_empty());
                }
                factors
            }
            SeparationNode::Product { factors, .. } => factors,
            SeparationNode::Leaf { .. } => continue,
            SeparationNode::Unresolved { reason } => panic!("unresolved branch {}: {reason}", b.class.label()),
        };
        for f in factors {
            assert!(f.note.is_none(), "{:?}", f.note);
            if let (Some(child), Some(pot)) = (&f.child, &f.potential) {
                assert!(child.space.dim() < sp.dim() || child.kappa.is_some());
                check_tree_invariants(child, pot);
            }
        }
    }
}

fn calogero_moser_tree(masses: Option<&[Q]>) -> (SeparationTree, Potential) {
    let sp = Space::euclidean(3);
    let v = calogero_moser(3, masses, None).unwrap();
    (bekm_separate(&v, &sp, &SeparationOptions::default()).unwrap(), v)
}

#[test]
fn calogero_moser_tree_has_four_cases() {
    let (tree, v) = calogero_moser_tree(None);
    check_tree_invariants(&tree, &v);
    assert_eq!(tree.families(), vec!["axial[2]", "cartesian[1,2]", "central[1,2]", "central[3]"]);
    // Both orderings of the elliptic case (c of either sign) occur.
    assert!(tree.branch("central[1,2]").is_some() && tree.branch("central[2,1]").is_some());

    // Spherical case: one sphere factor whose problem is solved by d⊙d.
    let sph = tree.branch("central[3]").unwrap();
    let SeparationNode::Split { factors, .. } = &sph.node else { panic!("expected a split") };
    assert_eq!(factors.len(), 1);
    let child = factors[0].child.as_ref().unwrap();
    assert!(child.kappa.is_some());
    assert_eq!(child.solution_dim, 2);
    assert_eq!(child.families(), vec!["spherical[1,2]"]);
    assert_eq!(sph.coordinates, vec!["spherical"]);

    // Cartesian case: product with a plane factor separated in polar coordinates.
    let cart = tree.branch("cartesian[1,2]").unwrap();
    let SeparationNode::Product { factors, .. } = &cart.node else { panic!("expected a product") };
    let plane = factors.iter().find(|f| f.dim == 2).unwrap();
    assert_eq!(plane.child.as_ref().unwrap().coordinate_names(), vec!["polar"]);
    assert_eq!(cart.coordinates, vec!["polar cylindrical"]);

    assert_eq!(tree.branch("axial[2]").unwrap().coordinates, vec!["parabolic rotational"]);
}

#[test]
fn weighted_calogero_moser_tree_has_the_same_shape() {
    let masses = [q(1), q(2), q(3)];
    let (tree, v) = calogero_moser_tree(Some(&masses));
    check_tree_invariants(&tree, &v);
    let (plain, _) = calogero_moser_tree(None);
    let labels = |t: &SeparationTree| t.branches.iter().map(|b| (b.class.label(), b.coordinates.clone())).collect::<Vec<_>>();
    assert_eq!(labels(&tree), labels(&plain));
    let d = calogero_moser_direction(3, Some(&masses));
    assert_eq!(d, vec![q(1), qf(1, 2), qf(1, 3)]);
    let sol = solve_kbd(&v, &tree.space, &SolveOptions::default()).unwrap();
    for p in [dd_params(&d), dr_params(&d), rr_params(3)] {
        assert!(sol.contains(&p));
    }
}

#[test]
fn free_motion_in_the_plane_has_four_webs() {
    let sp = Space::euclidean(2);
    let v = Potential::zero(2);
    let tree = bekm_separate(&v, &sp, &SeparationOptions::default()).unwrap();
    check_tree_invariants(&tree, &v);
    let mut names = tree.coordinate_names();
    names.sort();
    assert_eq!(names, vec!["cartesian", "elliptic", "parabolic", "polar"]);
}

#[test]
fn dimension_cap_is_enforced() {
    let sp = Space::euclidean(5);
    let opts = SeparationOptions { max_dim: 4, ..SeparationOptions::default() };
    assert!(matches!(bekm_separate(&Potential::zero(5), &sp, &opts), Err(Error::Unsupported(_))));
}

#[test]
fn spherical_tree_of_calogero_moser() {
    let sp = Space::euclidean(3);
    let v = calogero_moser(3, None, None).unwrap();
    let tree = bekm_separate_spherical(&v, &sp, &q(1), &[q(1), q(0), q(0)], &SeparationOptions::default()).unwrap();
    check_tree_invariants(&tree, &v);
    assert_eq!(tree.coordinate_names(), vec!["spherical"]);
    assert!(bekm_separate_spherical(&v, &sp, &q(1), &[q(1), q(1), q(0)], &SeparationOptions::default()).is_err());
}

#[test]
fn classes_of_flat_tensors() {
    let sp = Space::euclidean(3);
    let l = ConcircularTensor::central(sp.clone(), QMat::diag(&[q(0), q(1), q(1)])).unwrap();
    assert_eq!(flat_class(&l).unwrap().label(), "central[1,2]");
    assert_eq!(flat_class(&l.scaled(&q(-1))).unwrap().label(), "central[1,2]");
    let l = ConcircularTensor::central(sp.clone(), QMat::diag(&[q(2), q(1), q(1)])).unwrap();
    assert_eq!(flat_class(&l).unwrap().label(), "central[2,1]");
    let l = ConcircularTensor::constant(sp, QMat::diag(&[q(2), q(1), q(1)])).unwrap();
    assert_eq!(flat_class(&l).unwrap().label(), "cartesian[1,2]");
}

//! Canonical forms and equivalence of concircular tensors.

use concircular::ct::{
    canonicalize, canonicalize_spherical, detect_degenerate_null_axial, geo_equivalent, index_and_sign,
    iso_equivalent, omega_invariants, spherical_geo_equivalent, spherical_iso_equivalent, ConcircularTensor,
    DegenerateReport, IndexSign, SphericalCT, Variant,
};
use concircular::error::Error;
use concircular::linalg::{lower_jordan, skew_identity, MJBlock, Space};
use concircular::matrix::{dot, outer, qvec, QMat};
use concircular::number::{q, qf, Surd, Q};
use num_traits::Zero;
use proptest::prelude::*;

fn sym_from(n: usize, vals: &[i64]) -> QMat {
    let mut s = QMat::zeros(n, n);
    let mut idx = 0;
    for i in 0..n {
        for j in i..n {
            let v = q(vals[idx % vals.len()]);
            s[(i, j)] = v.clone();
            s[(j, i)] = v;
            idx += 1;
        }
    }
    s
}

/// A self-adjoint operator `g^{-1} S` for a symmetric `S`.
fn self_adjoint(sp: &Space, vals: &[i64]) -> QMat {
    let s = sym_from(sp.dim(), vals);
    &sp.metric().inverse().unwrap() * &s
}

/// Product of metric reflections along the non-null axes among `axes`.
fn isometry(sp: &Space, axes: &[Vec<i64>]) -> QMat {
    let mut t = QMat::identity(sp.dim());
    for ax in axes {
        let u: Vec<Q> = ax.iter().take(sp.dim()).map(|&x| q(x)).collect();
        if let Ok(r) = sp.reflection(&u) {
            t = &t * &r;
        }
    }
    t
}

fn vecq(v: &[i64], n: usize) -> Vec<Q> {
    v.iter().take(n).map(|&x| qf(x, 2)).collect()
}

#[test]
fn omega_examples() {
    let sp = Space::euclidean(3);
    let l = ConcircularTensor::central(sp.clone(), QMat::diag(&[q(0), q(1), q(2)])).unwrap();
    assert_eq!(omega_invariants(&l, 3), vec![q(1), q(0), q(0), q(0)]);

    // The Calogero-Moser family c d⊙d + 2w d⊙r + m r⊗r has ω_0 = m and ω_1 = w².
    let d = vec![qf(1, 3), qf(1, 3), qf(1, 3)];
    let dd = outer(&d, &d);
    let (c, w, m) = (q(2), qf(3, 2), q(5));
    let l = ConcircularTensor::new(sp.clone(), dd.scale(&(q(2) * c)), d.iter().map(|x| x * &w).collect(), m.clone())
        .unwrap();
    let om = omega_invariants(&l, 2);
    assert_eq!(om[0], m);
    assert_eq!(om[1], w.clone() * w * dot(&d, &d));
}

#[test]
fn index_examples() {
    let sp = Space::euclidean(2);
    let l = ConcircularTensor::new(sp, QMat::zeros(2, 2), qvec(&[1, 0]), q(2)).unwrap();
    assert_eq!(index_and_sign(&l), IndexSign::NonDegenerate { k: 0, eps: 1 });
    let m = Space::minkowski(2);
    let l = ConcircularTensor::axial(m.clone(), QMat::zeros(2, 2), vec![q(2), q(1)]).unwrap();
    assert_eq!(index_and_sign(&l), IndexSign::NonDegenerate { k: 1, eps: -1 });
    let l = ConcircularTensor::constant(m, QMat::identity(2)).unwrap();
    assert_eq!(index_and_sign(&l), IndexSign::Degenerate);
}

#[test]
fn central_translation_examples() {
    let sp = Space::euclidean(3);
    let w = qvec(&[1, -2, 3]);
    let l0 = ConcircularTensor::central(sp.clone(), QMat::diag(&[q(0), q(1), q(2)])).unwrap();
    let l = l0.translated(&w.iter().map(|x| -x.clone()).collect::<Vec<_>>());
    assert_eq!(l.w(), &w[..]);
    let c = canonicalize(&l).unwrap();
    assert_eq!(c.variant, Variant::Central);
    assert_eq!(c.translation, w);
    assert!(c.canonical.w().iter().all(Zero::is_zero));
    assert_eq!(c.canonical.m(), &q(1));

    let base = ConcircularTensor::central(sp.clone(), QMat::diag(&[q(0), q(1), q(1)])).unwrap();
    let v0 = vec![qf(1, 2), q(3), qf(-5, 7)];
    let moved = base.translated(&v0);
    let c2 = canonicalize(&moved).unwrap();
    assert_eq!(c2.variant, Variant::Central);
    assert_eq!(c2.translation, v0.iter().map(|x| -x.clone()).collect::<Vec<_>>());
    assert_eq!(c2.iso_form.blocks, canonicalize(&base).unwrap().iso_form.blocks);
    assert_eq!(c2.canonical, base);
}

#[test]
fn axial_translation_example() {
    // m = 0, w a unit spacelike vector annihilated by A.
    let sp = Space::euclidean(3);
    let a = QMat::diag(&[q(0), q(1), q(2)]);
    let w = qvec(&[1, 0, 0]);
    let l = ConcircularTensor::axial(sp, a, w.clone()).unwrap();
    let c = canonicalize(&l).unwrap();
    assert_eq!(c.variant, Variant::AxialNonNull);
    assert_eq!(c.sign_eps, Some(1));
    // v = -ω_2 w / 2 with ω_2 = <w, A w> = 0 here.
    assert_eq!(c.translation, vec![q(0); 3]);
    let moved = l.translated(&qvec(&[2, 1, -1]));
    let c = canonicalize(&moved).unwrap();
    assert_eq!(c.translation, qvec(&[-2, -1, 1]));
    let om = omega_invariants(&moved, 2);
    // Substituting the printed translation formula.
    let aw = moved.a().mul_vec(moved.w());
    let expected: Vec<Q> = aw.iter().zip(moved.w()).map(|(x, y)| (x - y * &om[2] / q(2)) / &om[1]).collect();
    assert_eq!(c.translation, expected);
    assert_eq!(c.canonical.a().mul_vec(c.canonical.w()), vec![q(0); 3]);
}

#[test]
fn unsupported_signature() {
    let sp = Space::diagonal(&[q(-1), q(-1), q(1)]).unwrap();
    let l = ConcircularTensor::central(sp, QMat::zeros(3, 3)).unwrap();
    assert!(matches!(canonicalize(&l), Err(Error::Unsupported(_))));
}

#[test]
fn degenerate_examples() {
    // Lorentzian plane, w lightlike eigenvector of A.
    let sp = Space::minkowski(2);
    // A = 2 I + u⊗u♭ with u = (1, 1) null, so A u = 2 u.
    let a = QMat::from_i64(&[&[1, 1], &[-1, 3]]);
    assert!(sp.is_self_adjoint(&a).unwrap());
    let l = ConcircularTensor::axial(sp.clone(), a, qvec(&[1, 1])).unwrap();
    assert_eq!(index_and_sign(&l), IndexSign::Degenerate);
    assert_eq!(detect_degenerate_null_axial(&l).unwrap(), DegenerateReport::NotOrthogonal { cycle_dim: 1 });
    assert_eq!(canonicalize(&l).unwrap().variant, Variant::DegenerateNullAxial);
    let c = ConcircularTensor::constant(sp, QMat::identity(2)).unwrap();
    assert!(matches!(detect_degenerate_null_axial(&c), Err(Error::Precondition(_))));
    let e = ConcircularTensor::axial(Space::euclidean(2), QMat::zeros(2, 2), qvec(&[1, 0])).unwrap();
    assert!(detect_degenerate_null_axial(&e).is_err());
}

#[test]
fn iso_examples() {
    let e2 = Space::euclidean(2);
    let c = |d: &[i64]| ConcircularTensor::central(e2.clone(), QMat::diag(&d.iter().map(|&x| q(x)).collect::<Vec<_>>())).unwrap();
    assert!(!iso_equivalent(&c(&[0, 1]), &c(&[0, 2])).unwrap());
    assert!(!geo_equivalent(&c(&[0, 1]), &c(&[0, 2])).unwrap());
    let e3 = Space::euclidean(3);
    let c3 = |d: &[i64]| ConcircularTensor::central(e3.clone(), QMat::diag(&d.iter().map(|&x| q(x)).collect::<Vec<_>>())).unwrap();
    assert!(!iso_equivalent(&c3(&[0, 1, 1]), &c3(&[0, 0, 1])).unwrap());
}

#[test]
fn geo_examples() {
    let e2 = Space::euclidean(2);
    let l = ConcircularTensor::new(e2.clone(), QMat::diag(&[q(0), q(1)]), qvec(&[1, 2]), q(1)).unwrap();
    let l2 = l.scaled(&q(3)).shifted(&q(2));
    assert!(geo_equivalent(&l, &l2).unwrap());
    assert!(!iso_equivalent(&l, &l2).unwrap());
    // Elliptic versus parabolic in the plane.
    let ell = ConcircularTensor::central(e2.clone(), QMat::diag(&[q(0), q(1)])).unwrap();
    let par = ConcircularTensor::axial(e2.clone(), QMat::diag(&[q(0), q(0)]), qvec(&[1, 0])).unwrap();
    assert!(!geo_equivalent(&ell, &par).unwrap());
    // A central tensor with a double eigenvalue (polar) is not elliptic.
    let polar = ConcircularTensor::central(e2, QMat::diag(&[q(0), q(0)])).unwrap();
    assert!(!geo_equivalent(&ell, &polar).unwrap());
}

#[test]
fn spherical_examples() {
    let e3 = Space::euclidean(3);
    let s = SphericalCT::new(e3.clone(), q(1), QMat::diag(&[q(0), q(1), q(2)])).unwrap();
    let c = canonicalize_spherical(&s).unwrap();
    assert_eq!(c.geo.blocks, c.iso.blocks);
    let s = SphericalCT::new(e3.clone(), q(1), QMat::diag(&[q(5), q(7), q(9)])).unwrap();
    let c = canonicalize_spherical(&s).unwrap();
    let b = |l: i64| MJBlock { lambda: Surd::int(l), k: 1, eps: 1 };
    assert_eq!(c.geo.blocks, vec![b(0), b(1), b(2)]);
    assert_eq!(c.geo.scale.clone() * Surd::int(5) + c.geo.shift.clone(), Surd::zero());

    let trivial = SphericalCT::new(e3, q(1), QMat::identity(3).scale(&q(4))).unwrap();
    assert!(matches!(canonicalize_spherical(&trivial), Err(Error::Trivial)));

    // Hyperbolic space: A and -A are geometrically but not isometrically equivalent.
    let m3 = Space::minkowski(3);
    let a1 = QMat::diag(&[q(0), q(1), q(2)]);
    let s1 = SphericalCT::new(m3.clone(), q(-1), a1.clone()).unwrap();
    let s2 = SphericalCT::new(m3, q(-1), a1.scale(&q(-1))).unwrap();
    assert!(spherical_geo_equivalent(&s1, &s2).unwrap());
    assert!(!spherical_iso_equivalent(&s1, &s2).unwrap());
}

#[test]
fn ct_parameter_space_dimension() {
    // The (A, w, m) parametrization is injective: evaluations of a basis of
    // parameters at sample points are linearly independent.
    for n in 1..=4usize {
        let sp = Space::minkowski(n);
        let ginv = sp.metric().inverse().unwrap();
        let mut basis = Vec::new();
        for i in 0..n {
            for j in i..n {
                let mut s = QMat::zeros(n, n);
                s[(i, j)] = q(1);
                s[(j, i)] = q(1);
                basis.push(ConcircularTensor::constant(sp.clone(), &ginv * &s).unwrap());
            }
        }
        for i in 0..n {
            let mut w = vec![q(0); n];
            w[i] = q(1);
            basis.push(ConcircularTensor::axial(sp.clone(), QMat::zeros(n, n), w).unwrap());
        }
        basis.push(ConcircularTensor::new(sp.clone(), QMat::zeros(n, n), vec![q(0); n], q(1)).unwrap());
        let points: Vec<Vec<Q>> = (0..6).map(|p| (0..n).map(|i| q(((p * 7 + i * 3) % 5) as i64 - 2)).collect()).collect();
        let rows: Vec<Vec<Q>> = basis
            .iter()
            .map(|l| points.iter().flat_map(|p| l.at(p).entries().to_vec()).collect())
            .collect();
        assert_eq!(QMat::from_rows(rows).rank(), (n + 1) * (n + 2) / 2);
    }
}

/// General-position null axial tensor of index 2 or 3 in Minkowski space.
fn null_axial(n: usize, k: usize, vals: &[i64], ab: (i64, i64), u: &[i64]) -> Option<ConcircularTensor> {
    let sp = Space::minkowski(n);
    let (a, b) = ab;
    if a == 0 && b == 0 {
        return None;
    }
    // Null vector (a²+b², a²-b², 2ab, 0...) for the metric diag(-1, 1, ...).
    let mut w = vec![q(a * a + b * b), q(a * a - b * b), q(2 * a * b)];
    w.resize(n, q(0));
    let mut amat = self_adjoint(&sp, vals);
    if k == 3 {
        let uu: Vec<Q> = u.iter().take(n).map(|&x| q(x)).collect();
        let uw = sp.ip(&uu, &w);
        if uw.is_zero() {
            return None;
        }
        let om2 = sp.ip(&w, &amat.mul_vec(&w));
        let t = -om2 / (uw.clone() * uw);
        amat = &amat + &outer(&uu, &sp.flat(&uu)).scale(&t);
    }
    let l = ConcircularTensor::axial(sp, amat, w).ok()?;
    match index_and_sign(&l) {
        IndexSign::NonDegenerate { k: kk, .. } if kk == k => Some(l),
        _ => None,
    }
}

#[test]
fn null_axial_general_position_canonicalizes() {
    let mut hits = [0usize; 4];
    for seed in 0..60i64 {
        let vals: Vec<i64> = (0..10).map(|i| ((seed * 31 + i * 17) % 7) - 3).collect();
        let u: Vec<i64> = (0..4).map(|i| ((seed * 13 + i * 5) % 5) - 2).collect();
        for n in [3usize, 4] {
            for k in [2usize, 3] {
                let Some(l) = null_axial(n, k, &vals, (1 + seed % 3, seed % 4 - 1), &u) else { continue };
                let c = canonicalize(&l).expect("null axial canonicalization");
                assert_eq!(c.variant, Variant::AxialNull);
                assert_eq!(c.index_k, Some(k));
                // Recanonicalizing the canonical tensor is the identity.
                let c2 = canonicalize(&c.canonical).unwrap();
                assert!(c2.translation.iter().all(Zero::is_zero));
                assert_eq!(c2.iso_form.blocks, c.iso_form.blocks);
                hits[k] += 1;
            }
        }
    }
    assert!(hits[2] > 10 && hits[3] > 10, "{hits:?}");
}

#[test]
fn minkowski_null_axial_canonical_models() {
    // w = e1 in a skew-normal frame with A e1 = e2 (k = 2) or a 3-cycle (k = 3).
    for k in [2usize, 3] {
        let g = skew_identity(k).direct_sum(&QMat::identity(1));
        let sp = Space::new(g).unwrap();
        assert_eq!(sp.nu(), 1);
        let a = lower_jordan(&q(0), k).direct_sum(&QMat::diag(&[q(5)]));
        let mut w = vec![q(0); k + 1];
        w[0] = q(1);
        let l = ConcircularTensor::axial(sp, a, w).unwrap();
        let c = canonicalize(&l).unwrap();
        assert_eq!(c.index_k, Some(k));
        assert_eq!(c.sign_eps, Some(1));
        assert!(c.translation.iter().all(Zero::is_zero));
        assert_eq!(c.iso_form.blocks, vec![MJBlock { lambda: Surd::int(5), k: 1, eps: 1 }]);
    }
}

fn canonical_strategy() -> impl Strategy<Value = (usize, usize, usize, Vec<i64>)> {
    // (dimension, signature, variant selector, parameters)
    (2usize..=3, 0usize..=1, 0usize..3, prop::collection::vec(-3i64..=3, 12))
}

/// Self-adjoint operator with rational spectrum: diagonal values, and in
/// Minkowski space optionally a complex pair or a null Jordan block on the
/// `(t, x)` plane, conjugated by a rational isometry.
fn rational_spectrum(sp: &Space, vals: &[i64]) -> QMat {
    let n = sp.dim();
    let mut a = QMat::diag(&vals.iter().take(n).map(|&x| q(x)).collect::<Vec<_>>());
    if sp.nu() == 1 {
        match vals[n].rem_euclid(3) {
            1 => {
                let (re, im) = (q(vals[0]), q(1 + vals[1].abs()));
                a[(0, 0)] = re.clone();
                a[(1, 1)] = re;
                a[(0, 1)] = -im.clone();
                a[(1, 0)] = im;
            }
            2 => {
                // λ I + c u⊗u♭ with u = (1, 1) null.
                let c = q(if vals[1] >= 0 { 1 } else { -1 });
                let lam = q(vals[0]);
                a[(0, 0)] = lam.clone() - c.clone();
                a[(1, 1)] = lam + c.clone();
                a[(0, 1)] = c.clone();
                a[(1, 0)] = -c;
            }
            _ => {}
        }
    }
    let axes: Vec<Vec<i64>> = vec![vals[8..11].to_vec(), vals[9..12].to_vec()];
    let t = isometry(sp, &axes);
    &(&t * &a) * &t.inverse().unwrap()
}

fn build_canonical(n: usize, nu: usize, sel: usize, vals: &[i64]) -> Option<ConcircularTensor> {
    let sp = if nu == 0 { Space::euclidean(n) } else { Space::minkowski(n) };
    match sel {
        0 => ConcircularTensor::central(sp.clone(), rational_spectrum(&sp, vals)).ok(),
        1 => {
            // Axial canonical: A w = 0 with w = c e_j non-null and A diagonal
            // (or a Minkowski block) on the complement.
            let j = vals[7].unsigned_abs() as usize % n;
            let c = if vals[6] == 0 { 1 } else { vals[6] };
            let mut w = vec![q(0); n];
            w[j] = q(c);
            let mut d: Vec<Q> = vals.iter().take(n).map(|&x| q(x)).collect();
            d[j] = q(0);
            ConcircularTensor::axial(sp, QMat::diag(&d), w).ok()
        }
        _ => ConcircularTensor::constant(sp.clone(), rational_spectrum(&sp, vals)).ok(),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn roundtrip_under_isometry(
        (n, nu, sel, vals) in canonical_strategy(),
        axes in prop::collection::vec(prop::collection::vec(-2i64..=2, 3), 0..3),
        shift in prop::collection::vec(-4i64..=4, 3),
    ) {
        let Some(l) = build_canonical(n, nu, sel, &vals) else { return Ok(()); };
        let base = canonicalize(&l).unwrap();
        let t = isometry(l.space(), &axes);
        let c = vecq(&shift, n);
        let moved = l.transformed(&t, &c).unwrap();
        let got = canonicalize(&moved).unwrap();
        prop_assert_eq!(got.variant, base.variant);
        prop_assert_eq!(got.index_k, base.index_k);
        prop_assert_eq!(got.sign_eps, base.sign_eps);
        prop_assert_eq!(&got.iso_form.blocks, &base.iso_form.blocks);
        prop_assert_eq!(omega_invariants(&moved, n)[got.index_k.unwrap_or(0)].clone(), omega_invariants(&l, n)[base.index_k.unwrap_or(0)].clone());
        if base.variant != Variant::Cartesian {
            // The reported translation undoes the shift.
            let neg: Vec<Q> = c.iter().map(|x| -x.clone()).collect();
            prop_assert_eq!(&got.translation, &neg);
        }
        prop_assert!(iso_equivalent(&l, &moved).unwrap());
        // Idempotence on the canonical representative.
        let again = canonicalize(&got.canonical).unwrap();
        prop_assert_eq!(&again.canonical, &got.canonical);
    }

    #[test]
    fn geo_allows_scale_and_shift((n, nu, sel, vals) in canonical_strategy(), a in prop_oneof![-3i64..=-1, 1i64..=3], b in -3i64..=3) {
        let Some(l) = build_canonical(n, nu, sel, &vals) else { return Ok(()); };
        let l2 = l.scaled(&qf(a, 2)).shifted(&q(b));
        prop_assert!(geo_equivalent(&l, &l2).unwrap());
        prop_assert!(geo_equivalent(&l2, &l).unwrap());
        prop_assert!(iso_equivalent(&l, &l).unwrap());
    }
}

mod common;

use common::{axial, canonical_parts, central, spherical, Block};
use concircular::charpoly::isolate_roots;
use concircular::coords::{
    axial_chart, canonical_metric, central_diag_chart, central_jordan_chart, eigenform_at, minkowski_2d_domains,
    spherical_chart, symbolic_squares, Branch, Chart, EigenChain, IctData, MinkowskiDomains, MinkowskiRegion,
    Reparam,
};
use concircular::ct::ConcircularTensor;
use concircular::error::Error;
use concircular::number::{q, q_to_f64, qf, Q};
use concircular::poly::MultiPoly;
use concircular::trig::{TrigKind, TrigParam, TrigRing};
use num_traits::Zero;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn d1(l: i64, g: i64) -> Block {
    (1, q(l), q(g))
}

fn rand_in(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> Q {
    let k = rng.gen_range(1..1000);
    let lo = Q::from_float(lo).unwrap();
    let hi = Q::from_float(hi).unwrap();
    lo.clone() + (hi - lo) * qf(k, 1000)
}

/// Relative deviation between a numerical pullback and the closed form.
fn metric_defect(pull: &[Vec<f64>], closed: &[Q]) -> f64 {
    let scale = closed.iter().map(|g| q_to_f64(g).abs()).fold(0.0, f64::max);
    let mut worst: f64 = 0.0;
    for i in 0..closed.len() {
        for j in 0..closed.len() {
            let expect = if i == j { q_to_f64(&closed[i]) } else { 0.0 };
            worst = worst.max((pull[i][j] - expect).abs() / scale);
        }
    }
    worst
}

#[test]
fn elliptic_example_point() {
    let data = IctData::central(&central(&[d1(0, 1), d1(1, 1)])).unwrap();
    let u = vec![qf(1, 4), q(4)];
    let x = central_diag_chart(&data, &u, &Branch::Positive).unwrap();
    assert_eq!(x.squares(), vec![q(1), qf(9, 4)]);
    assert_eq!(x.to_rational().unwrap(), vec![q(1), qf(3, 2)]);
    Chart::new(data.clone()).verify(&u, &x).unwrap();
    assert_eq!(canonical_metric(&data, &u).unwrap()[0], q(5));
    assert_eq!(x.all_branches().len(), 4);
    for b in x.all_branches() {
        Chart::new(data.clone()).verify(&u, &b).unwrap();
    }
}

#[test]
fn axis_point_and_domain_errors() {
    let data = IctData::central(&central(&[d1(0, 1), d1(1, 1)])).unwrap();
    let x = central_diag_chart(&data, &[q(0), q(3)], &Branch::Positive).unwrap();
    assert!(x.squares()[0].is_zero());
    let err = central_diag_chart(&data, &[q(2), q(3)], &Branch::Positive).unwrap_err();
    match err {
        Error::Domain(msg) => assert!(msg.contains("0 < u^1 < 1 < u^2"), "{msg}"),
        e => panic!("unexpected {e}"),
    }
    assert!(matches!(central_diag_chart(&data, &[q(2), q(2)], &Branch::Positive), Err(Error::Domain(_))));
}

#[test]
fn elliptic_table_row_symbolic() {
    // u¹ = cos²φ, u² = cosh²η with λ = (0, 1).
    let data = IctData::central(&central(&[d1(0, 1), d1(1, 1)])).unwrap();
    let sq = symbolic_squares(&data).unwrap();
    let phi = TrigParam { even: 0, odd: 1, kind: TrigKind::Circular };
    let eta = TrigParam { even: 2, odd: 3, kind: TrigKind::Hyperbolic };
    let ring = TrigRing::new(4, vec![phi, eta]);
    let subs = vec![Reparam::Cos2.symbolic(&ring, &phi), Reparam::Cosh2.symbolic(&ring, &eta)];
    let x = &ring.var(0) * &ring.var(2);
    let y = &ring.var(1) * &ring.var(3);
    assert!(ring.equal(&sq[0].compose(&subs), &x.pow(2)));
    assert!(ring.equal(&sq[1].compose(&subs), &y.pow(2)));
}

#[test]
fn parabolic_table_row_symbolic() {
    let l = axial(1, 1, &[d1(0, 1)]);
    let data = IctData::axial(&l).unwrap();
    let sq = symbolic_squares(&data).unwrap();
    // u = (−ν², μ²) with (μ, ν) in slots (0, 1).
    let mu = MultiPoly::var(2, 0);
    let nu = MultiPoly::var(2, 1);
    let subs = vec![-nu.pow(2), mu.pow(2)];
    assert_eq!(sq[0].compose(&subs), (mu.pow(2) - nu.pow(2)).scale(&qf(1, 2)));
    assert_eq!(sq[1].compose(&subs), (&mu * &nu).pow(2));
    let x = axial_chart(&data, &[q(-1), q(4)], &Branch::Positive).unwrap();
    assert_eq!(x.to_rational().unwrap(), vec![qf(3, 2), q(2)]);
    let axis = axial_chart(&data, &[q(-1), q(0)], &Branch::Positive).unwrap();
    assert!(axis.squares()[1].is_zero());
}

#[test]
fn prolate_metric_symbolic() {
    // Elliptic chart (a = 1) rotated about its focal axis:
    // ψ = cosφ coshη d + sinφ sinhη (cosθ e + sinθ f).
    let data = IctData::central(&central(&[d1(0, 1), d1(1, 1)])).unwrap();
    let sq = symbolic_squares(&data).unwrap();
    let phi = TrigParam { even: 0, odd: 1, kind: TrigKind::Circular };
    let eta = TrigParam { even: 2, odd: 3, kind: TrigKind::Hyperbolic };
    let th = TrigParam { even: 4, odd: 5, kind: TrigKind::Circular };
    let ring = TrigRing::new(6, vec![phi, eta, th]);
    let v = |i| ring.var(i);
    let subs = vec![v(0).pow(2), v(2).pow(2)];
    let x = &v(0) * &v(2);
    let rho = &v(1) * &v(3);
    assert!(ring.equal(&sq[0].compose(&subs), &x.pow(2)));
    assert!(ring.equal(&sq[1].compose(&subs), &rho.pow(2)));
    let psi = [x, &rho * &v(4), &rho * &v(5)];
    let params = [phi, eta, th];
    let jac: Vec<Vec<MultiPoly>> = params.iter().map(|p| psi.iter().map(|c| ring.derive(c, p)).collect()).collect();
    let ip = |a: &Vec<MultiPoly>, b: &Vec<MultiPoly>| {
        a.iter().zip(b).fold(MultiPoly::zero(6), |acc, (s, t)| acc + s * t)
    };
    let conformal = v(3).pow(2) + v(1).pow(2);
    let rot = (&v(1) * &v(3)).pow(2);
    let expected = [[conformal.clone(), MultiPoly::zero(6), MultiPoly::zero(6)],
        [MultiPoly::zero(6), conformal, MultiPoly::zero(6)],
        [MultiPoly::zero(6), MultiPoly::zero(6), rot]];
    for i in 0..3 {
        for j in 0..3 {
            assert!(ring.equal(&ip(&jac[i], &jac[j]), &expected[i][j]), "entry ({i},{j})");
        }
    }
}

#[test]
fn circle_cases_symbolic() {
    let prm = TrigParam { even: 0, odd: 1, kind: TrigKind::Circular };
    let hyp = TrigParam { even: 0, odd: 1, kind: TrigKind::Hyperbolic };
    // (kappa, metric signs, reparameterization, expected (x, y)).
    let cases: Vec<(i64, [i64; 2], Reparam, TrigParam, [usize; 2])> = vec![
        (1, [1, 1], Reparam::Cos2, prm, [0, 1]),
        (1, [1, -1], Reparam::Cosh2, hyp, [0, 1]),
        (-1, [1, -1], Reparam::NegSinh2, hyp, [1, 0]),
    ];
    for (kappa, g, rep, p, slots) in cases {
        let s = spherical(q(kappa), &[d1(0, g[0]), d1(1, g[1])]);
        let data = IctData::spherical(&s).unwrap();
        let sq = symbolic_squares(&data).unwrap();
        let ring = TrigRing::new(2, vec![p]);
        let subs = vec![rep.symbolic(&ring, &p)];
        for (i, &slot) in slots.iter().enumerate() {
            assert!(ring.equal(&sq[i].compose(&subs), &ring.var(slot).pow(2)), "{rep:?} coordinate {i}");
        }
        assert_eq!(rep.kind(), p.kind);
    }
}

#[test]
fn sphere_constraint_exact() {
    let s = spherical(q(1), &[d1(0, 1), d1(1, 1), d1(2, 1)]);
    let data = IctData::spherical(&s).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..20 {
        let u = vec![rand_in(&mut rng, 0.0, 1.0), rand_in(&mut rng, 1.0, 2.0)];
        let x = spherical_chart(&data, &u, &Branch::Positive).unwrap();
        assert_eq!(x.squares().into_iter().fold(Q::zero(), |a, b| a + b), q(1));
        Chart::new(data.clone()).verify(&u, &x).unwrap();
        assert!(canonical_metric(&data, &u).unwrap().iter().all(|g| *g > Q::zero()));
    }
}

#[test]
fn jordan_charts_roundtrip() {
    for eps in [1, -1] {
        let data = IctData::central(&central(&[(2, q(0), q(eps))])).unwrap();
        // (x¹)² = −ε u¹u² must be positive.
        let u = vec![q(-eps), q(2)];
        let x = central_jordan_chart(&data, &u, &Branch::Positive).unwrap();
        Chart::new(data.clone()).verify(&u, &x).unwrap();
        assert!(x.to_f64()[0] > 0.0);
        let bad = vec![q(eps), q(2)];
        assert!(central_jordan_chart(&data, &bad, &Branch::Positive).is_err());
        assert!(matches!(central_jordan_chart(&data, &[q(0), q(2)], &Branch::Positive), Err(Error::Domain(m)) if m.contains("chart-singular")));
        let data3 = IctData::central(&central(&[(2, q(0), q(eps)), d1(3, 1)])).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut ok = 0;
        for _ in 0..200 {
            let u: Vec<Q> = (0..3).map(|_| rand_in(&mut rng, -5.0, 5.0)).collect();
            if let Ok(x) = central_jordan_chart(&data3, &u, &Branch::Positive) {
                Chart::new(data3.clone()).verify(&u, &x).unwrap();
                ok += 1;
            }
        }
        assert!(ok > 10, "only {ok} domain points");
    }
    let data = IctData::central(&central(&[(3, q(1), q(1))])).unwrap();
    let u = vec![q(-1), q(0), q(2)];
    let x = central_jordan_chart(&data, &u, &Branch::Positive).unwrap();
    Chart::new(data).verify(&u, &x).unwrap();
}

#[test]
fn axial_chart_three_dimensions() {
    let data = IctData::axial(&axial(1, 1, &[d1(1, 1), d1(2, 1)])).unwrap();
    let u = vec![qf(1, 2), qf(3, 2), q(3)];
    let x = axial_chart(&data, &u, &Branch::Positive).unwrap();
    Chart::new(data.clone()).verify(&u, &x).unwrap();
    assert!(axial_chart(&data, &[q(2), qf(3, 2), q(3)], &Branch::Positive).is_err());
}

#[test]
fn kind_mismatch_rejected() {
    let data = IctData::central(&central(&[d1(0, 1), d1(1, 1)])).unwrap();
    assert!(matches!(axial_chart(&data, &[q(1), q(2)], &Branch::Positive), Err(Error::Precondition(_))));
    assert!(matches!(central_jordan_chart(&data, &[q(1), q(2)], &Branch::Positive), Err(Error::Precondition(_))));
    assert!(IctData::central(&central(&[d1(1, 1), d1(1, 1)])).is_err());
}

/// Chart families with domain samplers.
fn families() -> Vec<(&'static str, IctData, Box<dyn Fn(&mut ChaCha8Rng) -> Vec<Q>>)> {
    vec![
        (
            "central E3",
            IctData::central(&central(&[d1(0, 1), d1(1, 1), d1(3, 1)])).unwrap(),
            Box::new(|r| vec![rand_in(r, 0.0, 1.0), rand_in(r, 1.0, 3.0), rand_in(r, 3.0, 6.0)]),
        ),
        (
            "central Jordan E2_1",
            IctData::central(&central(&[(2, q(0), q(1))])).unwrap(),
            Box::new(|r| vec![rand_in(r, -3.0, 0.0), rand_in(r, 0.0, 3.0)]),
        ),
        (
            "central Jordan E3_1",
            IctData::central(&central(&[(2, q(0), q(1)), d1(2, 1)])).unwrap(),
            Box::new(|r| vec![rand_in(r, -3.0, 0.0), rand_in(r, 0.0, 2.0), rand_in(r, 2.0, 5.0)]),
        ),
        (
            "axial E3",
            IctData::axial(&axial(1, 1, &[d1(1, 1), d1(2, 1)])).unwrap(),
            Box::new(|r| vec![rand_in(r, -2.0, 1.0), rand_in(r, 1.0, 2.0), rand_in(r, 2.0, 5.0)]),
        ),
        (
            "spherical S2",
            IctData::spherical(&spherical(q(1), &[d1(0, 1), d1(1, 1), d1(2, 1)])).unwrap(),
            Box::new(|r| vec![rand_in(r, 0.0, 1.0), rand_in(r, 1.0, 2.0)]),
        ),
    ]
}

#[test]
fn metric_matches_jacobian_pullback() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for (name, data, sample) in families() {
        let chart = Chart::new(data.clone());
        let mut tested = 0;
        for _ in 0..400 {
            if tested == 20 {
                break;
            }
            let u = sample(&mut rng);
            let Ok(x) = chart.forward(&u, &Branch::Positive) else { continue };
            chart.verify(&u, &x).unwrap();
            let pull = chart.pullback_metric(&u, &Branch::Positive).unwrap();
            let closed = canonical_metric(&data, &u).unwrap();
            let defect = metric_defect(&pull, &closed);
            assert!(defect < 1e-8, "{name}: defect {defect} at {u:?}");
            tested += 1;
        }
        assert_eq!(tested, 20, "{name}: not enough domain points");
    }
}

fn lmat_f64(l: &ConcircularTensor, x: &[Q]) -> Vec<Vec<f64>> {
    let m = l.at(x);
    (0..x.len()).map(|i| (0..x.len()).map(|j| q_to_f64(&m[(i, j)])).collect()).collect()
}

#[test]
fn eigenforms_are_orthogonal_eigencovectors() {
    let l = central(&[d1(0, 1), d1(1, 1)]);
    let data = IctData::central(&l).unwrap();
    let x = vec![qf(1, 3), qf(2, 5)];
    let roots = isolate_roots(&data.charpoly().eval_at(&x).unwrap(), 1e-13).unwrap();
    let lm = lmat_f64(&l, &x);
    let forms: Vec<Vec<f64>> = roots.iter().map(|r| eigenform_at(data.charpoly(), &x, r.value.re).unwrap()).collect();
    for (r, du) in roots.iter().zip(&forms) {
        // (du ∘ L)_j = Σ_i du_i L_ij.
        for j in 0..2 {
            let v: f64 = (0..2).map(|i| du[i] * lm[i][j]).sum();
            assert!((v - r.value.re * du[j]).abs() < 1e-10);
        }
    }
    let ip = |a: &[f64], b: &[f64]| a[0] * b[0] + a[1] * b[1];
    assert!(ip(&forms[0], &forms[1]).abs() < 1e-10);
    // g^{ii} = 1/g_ii with g_ii from the closed form.
    let u: Vec<f64> = roots.iter().map(|r| r.value.re).collect();
    for i in 0..2 {
        let j = 1 - i;
        let gii = 0.25 * (u[i] - u[j]) / (u[i] * (u[i] - 1.0));
        assert!((ip(&forms[i], &forms[i]) * gii - 1.0).abs() < 1e-9);
    }
    // Double root at an axis point with u¹ = u² is rejected.
    let l2 = central(&[d1(0, 1), d1(0, 1)]);
    let cp = concircular::charpoly::charpoly_central(l2.space(), l2.a()).unwrap();
    assert!(eigenform_at(&cp, &[q(0), q(0)], 0.0).is_err());
}

#[test]
fn minkowski_region_table() {
    let (sp, a) = canonical_parts(&[d1(1, -1), d1(0, 1)]);
    let l = ConcircularTensor::central(sp, a).unwrap();
    let dom = minkowski_2d_domains(&l).unwrap();
    assert_eq!(dom.e2, q(1));
    // y = (2, −2): t = 0, x = −2.
    assert_eq!(dom.locate(&q(0), &q(-2)), Some(MinkowskiRegion::North));
    assert_eq!(dom.entry(MinkowskiRegion::North).chain, EigenChain::Above);
    assert_eq!(dom.locate(&qf(1, 2), &qf(-1, 2)), None);
    let data = IctData::central(&l).unwrap();
    let mut counts = std::collections::HashMap::new();
    for i in -40..=40 {
        for j in -40..=40 {
            let (t, x) = (qf(i, 10) + qf(1, 97), qf(j, 10) + qf(1, 89));
            let Some(region) = dom.locate(&t, &x) else { continue };
            let p = data.charpoly().eval_at(&[t.clone(), x.clone()]).unwrap();
            let roots = isolate_roots(&p, 1e-13).unwrap();
            assert!(roots.iter().all(|r| r.value.im.abs() < 1e-9));
            let mut u: Vec<f64> = roots.iter().map(|r| r.value.re).collect();
            u.sort_by(f64::total_cmp);
            let chain = dom.entry(region).chain;
            assert!(chain.holds(u[0], u[1], 1.0, 0.0, true), "{region:?} at ({t}, {x}): {u:?}");
            *counts.entry(region).or_insert(0) += 1;
        }
    }
    assert_eq!(counts.len(), 5);
    let (y1, y2) = MinkowskiDomains::null_coords(&q(3), &q(1));
    assert_eq!((y1, y2), (q(2), q(4)));
    let (sp, a) = canonical_parts(&[d1(0, -1), d1(1, 1)]);
    assert!(matches!(
        minkowski_2d_domains(&ConcircularTensor::central(sp, a).unwrap()),
        Err(Error::Unsupported(_))
    ));
}

#[test]
fn euclidean_interleaving_scan() {
    let l = central(&[d1(0, 1), d1(1, 1), d1(3, 1)]);
    let data = IctData::central(&l).unwrap();
    let lam = [0.0, 1.0, 3.0, f64::INFINITY];
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..100 {
        let x: Vec<Q> = (0..3).map(|_| rand_in(&mut rng, -3.0, 3.0)).collect();
        let roots = isolate_roots(&data.charpoly().eval_at(&x).unwrap(), 1e-13).unwrap();
        let mut u: Vec<f64> = roots.iter().map(|r| r.value.re).collect();
        u.sort_by(f64::total_cmp);
        for i in 0..3 {
            assert!(lam[i] < u[i] && u[i] < lam[i + 1], "{u:?}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]
    #[test]
    fn chart_roundtrip(seed in any::<u64>(), family in 0usize..5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let fams = families();
        let (_, data, sample) = &fams[family];
        let u = sample(&mut rng);
        let chart = Chart::new(data.clone());
        if let Ok(x) = chart.forward(&u, &Branch::Positive) {
            for b in x.all_branches() {
                prop_assert!(chart.verify(&u, &b).is_ok());
            }
        }
    }
}

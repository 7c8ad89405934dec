//! Warped-product decompositions of flat spaces and hyperquadrics, and
//! the splitting of reducible concircular tensors.
//!
//! A decomposition is determined by a base point `p̄`, pairwise orthogonal
//! subspaces `V_0 ⊥ V_1 ⊥ … ⊥ V_k` and axes `a_i ∈ V_0` with
//! `<a_i, p̄> = 1`. It maps `(p_0, f_1, …, f_k)` to
//! `ψ = p_0 + Σ_i <a_i, p_0> δ_i(f_i)`, where a fiber point is
//!
//! * non-null axis (`κ_i = a_i² ≠ 0`): `f ∈ span{a_i} ⊕ V_i` with
//!   `f² = 1/κ_i`, and `δ(f) = f − a_i/κ_i`;
//! * null axis: `f ∈ V_i`, and `δ(f) = f − ½ f² a_i`.
//!
//! The fiber through `p̄` is `a_i/κ_i` (non-null) or `0` (null).

use num_traits::{One, Signed, Zero};
use rand::Rng;

use crate::charpoly::repeated_real_eigenspaces;
use crate::ct::{ConcircularTensor, SphericalCT};
use crate::error::{Error, Result};
use crate::linalg::Space;
use crate::matrix::{vadd, vis_zero, vscale, vsub, Mat, QMat};
use crate::number::{fmt_q, Q};

/// Type of a warping axis.
#[derive(Clone, Debug, PartialEq)]
pub enum AxisKind {
    /// `κ = a² ≠ 0`.
    NonNull {
        /// `κ = a²`.
        kappa: Q,
    },
    /// Lightlike axis with its auxiliary lightlike `b ∈ V_0`, `<a,b> = 1`.
    Null {
        /// Auxiliary vector.
        b: Vec<Q>,
    },
}

/// One spherical factor.
#[derive(Clone, Debug, PartialEq)]
pub struct SphericalFactor {
    /// Basis of `V_i`.
    pub basis: Vec<Vec<Q>>,
    /// Axis `a_i`.
    pub axis: Vec<Q>,
    /// Axis type.
    pub kind: AxisKind,
}

impl SphericalFactor {
    /// Basis of the linear span containing the fiber: `span{a} ⊕ V_i` for
    /// non-null axes and `V_i` for null axes.
    pub fn fiber_span(&self) -> Vec<Vec<Q>> {
        match self.kind {
            AxisKind::NonNull { .. } => {
                let mut b = vec![self.axis.clone()];
                b.extend(self.basis.iter().cloned());
                b
            }
            AxisKind::Null { .. } => self.basis.clone(),
        }
    }

    /// Fiber coordinate of the base point.
    pub fn base_fiber(&self) -> Vec<Q> {
        match &self.kind {
            AxisKind::NonNull { kappa } => vscale(&self.axis, &(Q::one() / kappa)),
            AxisKind::Null { .. } => vec![Q::zero(); self.axis.len()],
        }
    }
}

/// A point of the warped product: geodesic-factor point and fibers.
#[derive(Clone, Debug, PartialEq)]
pub struct WpdPoint {
    /// Point of `N_0 ⊂ V_0` (ambient coordinates).
    pub p0: Vec<Q>,
    /// Fiber of each spherical factor (ambient coordinates).
    pub fibers: Vec<Vec<Q>>,
}

/// Warped-product decomposition in canonical form.
#[derive(Clone, Debug, PartialEq)]
pub struct WarpedProductDecomposition {
    space: Space,
    base: Vec<Q>,
    v0: Vec<Vec<Q>>,
    factors: Vec<SphericalFactor>,
    sphere: Option<Q>,
}

fn in_span(basis: &[Vec<Q>], v: &[Q]) -> bool {
    if vis_zero(v) {
        return true;
    }
    if basis.is_empty() {
        return false;
    }
    let n = v.len();
    let m = Mat::from_cols(basis, n);
    m.solve(v).is_some()
}

/// Vectors of `span(basis)` orthogonal to every vector of `vs`.
pub fn orthogonal_within(sp: &Space, basis: &[Vec<Q>], vs: &[Vec<Q>]) -> Vec<Vec<Q>> {
    if vs.is_empty() {
        return basis.to_vec();
    }
    if basis.is_empty() {
        return vec![];
    }
    let rows: Vec<Vec<Q>> = vs.iter().map(|v| basis.iter().map(|b| sp.ip(v, b)).collect()).collect();
    QMat::from_rows(rows)
        .nullspace()
        .into_iter()
        .map(|c| {
            basis
                .iter()
                .zip(&c)
                .fold(vec![Q::zero(); sp.dim()], |acc, (b, ci)| vadd(&acc, &vscale(b, ci)))
        })
        .collect()
}

/// Orthogonal projection onto a nondegenerate span.
pub fn project(sp: &Space, basis: &[Vec<Q>], x: &[Q]) -> Result<Vec<Q>> {
    if basis.is_empty() {
        return Ok(vec![Q::zero(); x.len()]);
    }
    let gram = sp.gram(basis);
    let rhs: Vec<Q> = basis.iter().map(|b| sp.ip(b, x)).collect();
    let c = gram.solve(&rhs).ok_or_else(|| Error::InvalidMetric("degenerate subspace".into()))?;
    Ok(basis.iter().zip(&c).fold(vec![Q::zero(); x.len()], |acc, (b, ci)| vadd(&acc, &vscale(b, ci))))
}

fn check_nondegenerate(sp: &Space, basis: &[Vec<Q>], what: &str) -> Result<()> {
    if basis.is_empty() {
        return Ok(());
    }
    if sp.gram(basis).det().is_zero() {
        return Err(Error::InvalidMetric(format!("{what} is degenerate or its basis is dependent")));
    }
    Ok(())
}

impl WarpedProductDecomposition {
    /// Validated multiply warped decomposition of `span(V_0 ⊕ … ⊕ V_k)`.
    pub fn new(space: Space, base: Vec<Q>, v0: Vec<Vec<Q>>, factors: Vec<SphericalFactor>) -> Result<Self> {
        let n = space.dim();
        space.check_len(base.len())?;
        check_nondegenerate(&space, &v0, "V_0")?;
        for (i, f) in factors.iter().enumerate() {
            check_nondegenerate(&space, &f.basis, &format!("V_{}", i + 1))?;
            if f.basis.is_empty() {
                return Err(Error::Precondition(format!("V_{} is trivial", i + 1)));
            }
        }
        let mut all: Vec<&Vec<Q>> = v0.iter().collect();
        let mut owner: Vec<usize> = vec![0; v0.len()];
        for (i, f) in factors.iter().enumerate() {
            all.extend(f.basis.iter());
            owner.extend(std::iter::repeat_n(i + 1, f.basis.len()));
        }
        for x in 0..all.len() {
            for y in x + 1..all.len() {
                if owner[x] != owner[y] && !space.ip(all[x], all[y]).is_zero() {
                    return Err(Error::Precondition(format!(
                        "V_{} and V_{} are not orthogonal",
                        owner[x], owner[y]
                    )));
                }
            }
        }
        if all.len() > n {
            return Err(Error::Precondition("subspaces exceed the ambient dimension".into()));
        }
        if !in_span(&v0, &base) {
            return Err(Error::Precondition("base point must lie in V_0".into()));
        }
        for (i, f) in factors.iter().enumerate() {
            let a = &f.axis;
            space.check_len(a.len())?;
            if vis_zero(a) || !in_span(&v0, a) {
                return Err(Error::Precondition(format!("axis a_{} must be a nonzero vector of V_0", i + 1)));
            }
            if !space.ip(a, &base).is_one() {
                return Err(Error::Precondition(format!("canonical form needs <a_{}, p̄> = 1", i + 1)));
            }
            for (j, g) in factors.iter().enumerate().skip(i + 1) {
                if !space.ip(a, &g.axis).is_zero() {
                    return Err(Error::Precondition(format!("axes a_{} and a_{} are not orthogonal", i + 1, j + 1)));
                }
            }
            let k = space.norm2(a);
            match &f.kind {
                AxisKind::NonNull { kappa } => {
                    if *kappa != k || k.is_zero() {
                        return Err(Error::Precondition(format!("κ_{} must equal a_{}² ≠ 0", i + 1, i + 1)));
                    }
                }
                AxisKind::Null { b } => {
                    if !k.is_zero() {
                        return Err(Error::Precondition(format!("a_{} is not lightlike", i + 1)));
                    }
                    if !in_span(&v0, b) || !space.norm2(b).is_zero() || !space.ip(a, b).is_one() {
                        return Err(Error::Precondition(format!(
                            "b_{} must be lightlike in V_0 with <a, b> = 1",
                            i + 1
                        )));
                    }
                }
            }
        }
        Ok(WarpedProductDecomposition { space, base, v0, factors, sphere: None })
    }

    /// Ambient space.
    pub fn space(&self) -> &Space {
        &self.space
    }

    /// Base point `p̄`.
    pub fn base(&self) -> &[Q] {
        &self.base
    }

    /// Basis of `V_0`.
    pub fn v0(&self) -> &[Vec<Q>] {
        &self.v0
    }

    /// Spherical factors.
    pub fn factors(&self) -> &[SphericalFactor] {
        &self.factors
    }

    /// Curvature `κ` when the decomposition is restricted to `p² = 1/κ`.
    pub fn sphere_kappa(&self) -> Option<&Q> {
        self.sphere.as_ref()
    }

    /// Warping functions `ρ_i(p_0) = <a_i, p_0>`.
    pub fn warping(&self, p0: &[Q]) -> Vec<Q> {
        self.factors.iter().map(|f| self.space.ip(&f.axis, p0)).collect()
    }

    /// The base point as a product point.
    pub fn base_point(&self) -> WpdPoint {
        WpdPoint { p0: self.base.clone(), fibers: self.factors.iter().map(|f| f.base_fiber()).collect() }
    }

    fn delta(&self, f: &SphericalFactor, fiber: &[Q]) -> Vec<Q> {
        match &f.kind {
            AxisKind::NonNull { kappa } => vsub(fiber, &vscale(&f.axis, &(Q::one() / kappa))),
            AxisKind::Null { .. } => {
                let h = self.space.norm2(fiber) / Q::from_integer(2.into());
                vsub(fiber, &vscale(&f.axis, &h))
            }
        }
    }

    fn ddelta(&self, f: &SphericalFactor, fiber: &[Q], v: &[Q]) -> Vec<Q> {
        match &f.kind {
            AxisKind::NonNull { .. } => v.to_vec(),
            AxisKind::Null { .. } => vsub(v, &vscale(&f.axis, &self.space.ip(fiber, v))),
        }
    }

    /// Checks that `pt` lies in the product manifold.
    pub fn check_point(&self, pt: &WpdPoint) -> Result<()> {
        self.space.check_len(pt.p0.len())?;
        if pt.fibers.len() != self.factors.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} fibers for {} factors",
                pt.fibers.len(),
                self.factors.len()
            )));
        }
        if !in_span(&self.v0, &pt.p0) {
            return Err(Error::Domain("p_0 is not in V_0".into()));
        }
        for (i, rho) in self.warping(&pt.p0).iter().enumerate() {
            if !rho.is_positive() {
                return Err(Error::Domain(format!("<a_{}, p_0> = {} is not positive", i + 1, fmt_q(rho))));
            }
        }
        if let Some(k) = &self.sphere {
            if self.space.norm2(&pt.p0) != Q::one() / k {
                return Err(Error::Domain("p_0 is not on the hyperquadric p² = 1/κ".into()));
            }
        }
        for (i, (f, fib)) in self.factors.iter().zip(&pt.fibers).enumerate() {
            if !in_span(&f.fiber_span(), fib) {
                return Err(Error::Domain(format!("fiber {} is outside its span", i + 1)));
            }
            if let AxisKind::NonNull { kappa } = &f.kind {
                if self.space.norm2(fib) != Q::one() / kappa {
                    return Err(Error::Domain(format!("fiber {} is not on its sphere", i + 1)));
                }
            }
        }
        Ok(())
    }

    /// `ψ(p_0, f_1, …, f_k)`.
    pub fn eval(&self, pt: &WpdPoint) -> Result<Vec<Q>> {
        self.check_point(pt)?;
        let rho = self.warping(&pt.p0);
        let mut out = pt.p0.clone();
        for ((f, fib), r) in self.factors.iter().zip(&pt.fibers).zip(&rho) {
            out = vadd(&out, &vscale(&self.delta(f, fib), r));
        }
        Ok(out)
    }

    /// Differential of `ψ` at `pt` applied to the tangent `(v_0, v_1, …)`.
    pub fn pushforward(&self, pt: &WpdPoint, v0: &[Q], vs: &[Vec<Q>]) -> Result<Vec<Q>> {
        self.check_point(pt)?;
        if vs.len() != self.factors.len() {
            return Err(Error::DimensionMismatch("one tangent per factor is required".into()));
        }
        let rho = self.warping(&pt.p0);
        let mut out = v0.to_vec();
        for (i, f) in self.factors.iter().enumerate() {
            let d_rho = self.space.ip(&f.axis, v0);
            out = vadd(&out, &vscale(&self.delta(f, &pt.fibers[i]), &d_rho));
            out = vadd(&out, &vscale(&self.ddelta(f, &pt.fibers[i], &vs[i]), &rho[i]));
        }
        Ok(out)
    }

    /// Warped metric `<u_0, v_0> + Σ ρ_i² g_i(u_i, v_i)` on tangents.
    pub fn warped_inner(&self, pt: &WpdPoint, u: (&[Q], &[Vec<Q>]), v: (&[Q], &[Vec<Q>])) -> Q {
        let rho = self.warping(&pt.p0);
        let mut s = self.space.ip(u.0, v.0);
        for (i, f) in self.factors.iter().enumerate() {
            let du = self.ddelta(f, &pt.fibers[i], &u.1[i]);
            let dv = self.ddelta(f, &pt.fibers[i], &v.1[i]);
            s += rho[i].clone() * &rho[i] * self.space.ip(&du, &dv);
        }
        s
    }

    /// Basis of the tangent space of the geodesic factor at `p_0`.
    pub fn base_tangents(&self, p0: &[Q]) -> Vec<Vec<Q>> {
        match self.sphere {
            Some(_) => orthogonal_within(&self.space, &self.v0, &[p0.to_vec()]),
            None => self.v0.clone(),
        }
    }

    /// Basis of the tangent space of fiber `i` at `fiber`.
    pub fn fiber_tangents(&self, i: usize, fiber: &[Q]) -> Vec<Vec<Q>> {
        let f = &self.factors[i];
        match f.kind {
            AxisKind::NonNull { .. } => orthogonal_within(&self.space, &f.fiber_span(), &[fiber.to_vec()]),
            AxisKind::Null { .. } => f.basis.clone(),
        }
    }

    /// Random rational product point near the base point, drawn with small
    /// integer directions; `None` if no valid point is found in `attempts`.
    pub fn sample_point<R: Rng>(&self, rng: &mut R, attempts: usize) -> Option<WpdPoint> {
        let n = self.space.dim();
        let combo = |rng: &mut R, basis: &[Vec<Q>]| -> Vec<Q> {
            basis.iter().fold(vec![Q::zero(); n], |acc, b| {
                let c = Q::new(rng.gen_range(-4i64..=4).into(), rng.gen_range(1i64..=4).into());
                vadd(&acc, &vscale(b, &c))
            })
        };
        for _ in 0..attempts {
            let d = combo(rng, &self.v0);
            let p0 = match self.sphere {
                Some(_) => match quadric_point(&self.space, &self.base, &d) {
                    Some(p) => p,
                    None => continue,
                },
                None => vadd(&self.base, &vscale(&d, &Q::new(1.into(), 4.into()))),
            };
            let mut fibers = Vec::with_capacity(self.factors.len());
            for f in &self.factors {
                let d = combo(rng, &f.fiber_span());
                let fib = match f.kind {
                    AxisKind::NonNull { .. } => quadric_point(&self.space, &f.base_fiber(), &d),
                    AxisKind::Null { .. } => Some(d),
                };
                match fib {
                    Some(x) => fibers.push(x),
                    None => break,
                }
            }
            if fibers.len() != self.factors.len() {
                continue;
            }
            let pt = WpdPoint { p0, fibers };
            if self.check_point(&pt).is_ok() {
                return Some(pt);
            }
        }
        None
    }

    /// Inequalities cutting out the image of `ψ` (and of `N_0`).
    pub fn image_conditions(&self) -> Vec<String> {
        let mut out: Vec<String> = (0..self.factors.len()).map(|i| format!("<a_{}, p_0> > 0", i + 1)).collect();
        for (i, f) in self.factors.iter().enumerate() {
            match &f.kind {
                AxisKind::NonNull { kappa } => out.push(format!(
                    "sign (P_{} p)² = {} where P_{} projects onto span(a_{}, V_{})",
                    i + 1,
                    if kappa.is_positive() { "+1" } else { "-1" },
                    i + 1,
                    i + 1,
                    i + 1
                )),
                AxisKind::Null { .. } => out.push(format!("<a_{}, p> > 0", i + 1)),
            }
        }
        if let Some(k) = &self.sphere {
            out.push(format!("p² = {}", fmt_q(&(Q::one() / k))));
        }
        out
    }

    /// Whether an ambient point satisfies the image conditions.
    pub fn in_image(&self, x: &[Q]) -> Result<bool> {
        for f in &self.factors {
            let ok = match &f.kind {
                AxisKind::NonNull { kappa } => {
                    let p = project(&self.space, &f.fiber_span(), x)?;
                    let s = self.space.norm2(&p);
                    !s.is_zero() && s.is_positive() == kappa.is_positive()
                }
                AxisKind::Null { .. } => self.space.ip(&f.axis, x).is_positive(),
            };
            if !ok {
                return Ok(false);
            }
        }
        Ok(match &self.sphere {
            Some(k) => self.space.norm2(x) == Q::one() / k,
            None => true,
        })
    }
}

/// Second intersection of the line `p + s d` with the quadric
/// `<x, x> = <p, p>`; `None` when `d` is null or tangent.
pub fn quadric_point(sp: &Space, p: &[Q], d: &[Q]) -> Option<Vec<Q>> {
    let dd = sp.norm2(d);
    let pd = sp.ip(p, d);
    if dd.is_zero() || pd.is_zero() {
        return None;
    }
    let s = -(pd * Q::from_integer(2.into())) / dd;
    Some(vadd(p, &vscale(d, &s)))
}

/// Single-factor decomposition determined by `(p̄; V_0 ⊥ V_1; a)`; for a
/// lightlike axis the auxiliary `b` defaults to `p̄ − (p̄²/2) a`.
pub fn standard_wpd(
    sp: &Space,
    v0: Vec<Vec<Q>>,
    v1: Vec<Vec<Q>>,
    a: Vec<Q>,
    base: Vec<Q>,
    b: Option<Vec<Q>>,
) -> Result<WarpedProductDecomposition> {
    if v0.len() + v1.len() != sp.dim() {
        return Err(Error::Precondition("V_0 and V_1 must span the space".into()));
    }
    let kappa = sp.norm2(&a);
    let kind = if kappa.is_zero() {
        let b = b.unwrap_or_else(|| {
            let h = sp.norm2(&base) / Q::from_integer(2.into());
            vsub(&base, &vscale(&a, &h))
        });
        AxisKind::Null { b }
    } else {
        AxisKind::NonNull { kappa }
    };
    WarpedProductDecomposition::new(sp.clone(), base, v0, vec![SphericalFactor { basis: v1, axis: a, kind }])
}

/// The subspace `W_0` of a factor: `V_0 ∩ a^⊥` or `V_0 ∩ {a, b}^⊥`.
fn w0_of(sp: &Space, v0: &[Vec<Q>], f: &SphericalFactor) -> Vec<Vec<Q>> {
    match &f.kind {
        AxisKind::NonNull { .. } => orthogonal_within(sp, v0, std::slice::from_ref(&f.axis)),
        AxisKind::Null { b } => orthogonal_within(sp, v0, &[f.axis.clone(), b.clone()]),
    }
}

/// Composes an outer decomposition with an inner decomposition of its
/// `V_0`. Requires that the inner `W̃_0` contain `V_0 ∩ W_0^⊥` of every
/// outer factor.
pub fn compose_wpd(
    outer: &WarpedProductDecomposition,
    inner: &WarpedProductDecomposition,
) -> Result<WarpedProductDecomposition> {
    let sp = &outer.space;
    if inner.space != outer.space || inner.base != outer.base {
        return Err(Error::Precondition("inner decomposition must share the ambient space and base point".into()));
    }
    if inner.factors.is_empty() {
        return Ok(outer.clone());
    }
    let mut inner_span = inner.v0.clone();
    for f in &inner.factors {
        inner_span.extend(f.basis.iter().cloned());
    }
    let same_span = inner_span.len() == outer.v0.len()
        && outer.v0.iter().all(|v| in_span(&inner_span, v))
        && inner_span.iter().all(|v| in_span(&outer.v0, v));
    if !same_span {
        return Err(Error::Precondition("inner decomposition must decompose the outer V_0".into()));
    }
    for g in &inner.factors {
        let w0_inner = w0_of(sp, &inner.v0, g);
        for f in &outer.factors {
            let w0_outer = w0_of(sp, &outer.v0, f);
            let normal = orthogonal_within(sp, &outer.v0, &w0_outer);
            if !normal.iter().all(|v| in_span(&w0_inner, v)) {
                return Err(Error::Precondition("compatibility V_0 ∩ W_0^⊥ ⊂ W̃_0 violated".into()));
            }
        }
    }
    let mut factors = outer.factors.clone();
    factors.extend(inner.factors.iter().cloned());
    let mut out = WarpedProductDecomposition::new(sp.clone(), outer.base.clone(), inner.v0.clone(), factors)?;
    out.sphere = outer.sphere.clone().or_else(|| inner.sphere.clone());
    Ok(out)
}

/// Restriction to the hyperquadric `p² = 1/κ` through the base point.
pub fn restrict_wpd_to_sphere(wpd: &WarpedProductDecomposition, kappa: &Q) -> Result<WarpedProductDecomposition> {
    let b2 = wpd.space.norm2(&wpd.base);
    if b2.is_zero() {
        return Err(Error::Precondition("base point is null: p̄² = 0".into()));
    }
    if kappa.is_zero() || b2 != Q::one() / kappa {
        return Err(Error::Precondition(format!("p̄² = {} differs from 1/κ", fmt_q(&b2))));
    }
    let mut out = wpd.clone();
    out.sphere = Some(kappa.clone());
    Ok(out)
}

/// Whether `L̃ = A + w⊙r + m r⊙r` on `N_0` extends along an axis `a`:
/// `a` is an eigenvector of `A` orthogonal to `w`.
pub fn check_extension(ltilde: &ConcircularTensor, a: &[Q]) -> bool {
    let sp = ltilde.space();
    if a.len() != sp.dim() || vis_zero(a) {
        return false;
    }
    let aa = ltilde.a().mul_vec(a);
    // A a ∈ span{a}: all 2x2 minors of (a, Aa) vanish.
    let parallel = (0..a.len()).all(|i| (0..a.len()).all(|j| (a[i].clone() * &aa[j] - a[j].clone() * &aa[i]).is_zero()));
    parallel && sp.ip(a, ltilde.w()).is_zero()
}

/// Report of the pushforward metric identity for a non-null factor.
#[derive(Clone, Debug, PartialEq)]
pub struct MetricIdentityReport {
    /// Number of points checked.
    pub points: usize,
    /// Whether every check was exact.
    pub holds: bool,
}

fn contravariant(sp: &Space, basis: &[Vec<Q>], push: impl Fn(&[Q]) -> Vec<Q>) -> Result<QMat> {
    let n = sp.dim();
    let gram = sp.gram(basis);
    let ginv = gram.inverse().ok_or_else(|| Error::InvalidMetric("degenerate tangent space".into()))?;
    let imgs: Vec<Vec<Q>> = basis.iter().map(|b| push(b)).collect();
    let mut m = QMat::zeros(n, n);
    for j in 0..basis.len() {
        for k in 0..basis.len() {
            let c = &ginv[(j, k)];
            if c.is_zero() {
                continue;
            }
            for r in 0..n {
                for s in 0..n {
                    m[(r, s)] += c.clone() * &imgs[j][r] * &imgs[k][s];
                }
            }
        }
    }
    Ok(m)
}

/// Verifies `ψ_* G̃ = κ₁ r̃² (G₁ − r̃⊗r̃/r̃²)` for the non-null factor
/// `factor` at the given product points, where `G̃` is the fiber metric,
/// `G₁` the metric of `span{a} ⊕ V_1` and `r̃` the projection of `ψ` onto
/// it. The axis must be a unit vector, `κ₁ = ±1`.
pub fn warped_metric_identity(
    wpd: &WarpedProductDecomposition,
    factor: usize,
    points: &[WpdPoint],
) -> Result<MetricIdentityReport> {
    metric_identity_impl(wpd, factor, points, true)
}

/// The same identity for an axis of any length. Fibers lie on
/// `q² = 1/κ₁`, so both sides scale together and no unit condition is
/// needed; this is the form that applies to the axes `a = π/π²` chosen by
/// [`split_reducible`].
pub fn warped_metric_identity_any_scale(
    wpd: &WarpedProductDecomposition,
    factor: usize,
    points: &[WpdPoint],
) -> Result<MetricIdentityReport> {
    metric_identity_impl(wpd, factor, points, false)
}

fn metric_identity_impl(
    wpd: &WarpedProductDecomposition,
    factor: usize,
    points: &[WpdPoint],
    require_unit: bool,
) -> Result<MetricIdentityReport> {
    let f = wpd
        .factors
        .get(factor)
        .ok_or_else(|| Error::DimensionMismatch(format!("no factor {}", factor + 1)))?;
    let kappa = match &f.kind {
        AxisKind::NonNull { kappa } => kappa.clone(),
        AxisKind::Null { .. } => return Err(Error::Unsupported("null axis: the identity does not apply".into())),
    };
    if require_unit && !(kappa.is_one() || (-kappa.clone()).is_one()) {
        return Err(Error::Precondition("the identity needs a unit axis, κ₁ = ±1".into()));
    }
    let sp = &wpd.space;
    let span = f.fiber_span();
    let mut holds = true;
    for pt in points {
        let x = wpd.eval(pt)?;
        let tangents = wpd.fiber_tangents(factor, &pt.fibers[factor]);
        let k = wpd.factors.len();
        let lhs = contravariant(sp, &tangents, |v| {
            let mut vs = vec![vec![Q::zero(); sp.dim()]; k];
            vs[factor] = v.to_vec();
            wpd.pushforward(pt, &vec![Q::zero(); sp.dim()], &vs).expect("point validated")
        })?;
        let g1 = contravariant(sp, &span, |v| v.to_vec())?;
        let rt = project(sp, &span, &x)?;
        let rt2 = sp.norm2(&rt);
        if rt2.is_zero() {
            return Err(Error::Domain("r̃ is null at this point".into()));
        }
        let n = sp.dim();
        let mut rhs = QMat::zeros(n, n);
        for r in 0..n {
            for s in 0..n {
                rhs[(r, s)] = kappa.clone() * (rt2.clone() * &g1[(r, s)] - rt[r].clone() * &rt[s]);
            }
        }
        holds &= lhs == rhs;
    }
    Ok(MetricIdentityReport { points: points.len(), holds })
}

/// Result of splitting a reducible tensor along a warped product.
#[derive(Clone, Debug, PartialEq)]
pub struct ReducibleSplit {
    /// The decomposition.
    pub wpd: WarpedProductDecomposition,
    /// Restricted tensor on the geodesic factor, in the basis `wpd.v0()`.
    pub restricted: ConcircularTensor,
    /// Restricted spherical tensor (spherical splits only), in the same
    /// basis.
    pub restricted_spherical: Option<SphericalCT>,
    /// Constant eigenvalue `λ_i` of each spherical factor, with its index.
    pub constant_eigs: Vec<(Q, usize)>,
}

fn krylov(a: &QMat, w: &[Q]) -> Vec<Vec<Q>> {
    let n = w.len();
    let mut out: Vec<Vec<Q>> = Vec::new();
    let mut v = w.to_vec();
    while !vis_zero(&v) && out.len() < n {
        let mut trial = out.clone();
        trial.push(v.clone());
        if Mat::from_cols(&trial, n).rank() < trial.len() {
            break;
        }
        out = trial;
        v = a.mul_vec(&v);
    }
    out
}

fn coords_in(basis: &[Vec<Q>], v: &[Q]) -> Result<Vec<Q>> {
    Mat::from_cols(basis, v.len())
        .solve(v)
        .ok_or_else(|| Error::Internal("vector is not in the expected span".into()))
}

/// Splits a reducible flat tensor in canonical form (central with `m = 1`,
/// `w = 0`, or axial with `m = 0`) along the warped product through `p̄`.
pub fn split_reducible(l: &ConcircularTensor, base: &[Q]) -> Result<ReducibleSplit> {
    let sp = l.space();
    let n = sp.dim();
    sp.check_len(base.len())?;
    if !l.m().is_zero() && (!l.m().is_one() || !vis_zero(l.w())) {
        return Err(Error::Precondition("central tensors must be translated to m = 1, w = 0 first".into()));
    }
    let a = l.a();
    let d = krylov(a, l.w());
    check_nondegenerate(sp, &d, "cycle subspace D")?;
    let dperp = sp.orthogonal_complement(&d);
    let (_, ac) = crate::ct::restrict_operator(sp, a, &dperp)?;
    let repeated = repeated_real_eigenspaces(&ac)?;
    if repeated.is_empty() {
        return Err(Error::NotReducible("A_c has no multidimensional real eigenspace".into()));
    }
    let mut factors = Vec::new();
    let mut constant_eigs = Vec::new();
    for (idx, ev) in repeated.iter().enumerate() {
        let lam = ev
            .lambda
            .as_rational()
            .ok_or_else(|| Error::Unsupported("irrational repeated eigenvalue".into()))?;
        let shifted = a - &QMat::identity(n).scale(&lam);
        let ker = shifted.nullspace();
        let w = orthogonal_within(sp, &ker, &d);
        let gram = sp.gram(&w);
        let axis = if !gram.det().is_zero() {
            let pi = project(sp, &w, base)?;
            let pi2 = sp.norm2(&pi);
            if pi2.is_zero() {
                return Err(Error::Domain(format!(
                    "base point is not generic: its projection onto the λ = {} eigenspace is null",
                    fmt_q(&lam)
                )));
            }
            vscale(&pi, &(Q::one() / pi2))
        } else {
            let rad = orthogonal_within(sp, &w, &w);
            if rad.len() != 1 {
                return Err(Error::NotOrthogonal("eigenspace radical is not one-dimensional".into()));
            }
            let t = sp.ip(&rad[0], base);
            if t.is_zero() {
                return Err(Error::Domain(format!(
                    "base point is not generic: orthogonal to the lightlike λ = {} eigenvector",
                    fmt_q(&lam)
                )));
            }
            vscale(&rad[0], &(Q::one() / t))
        };
        let vi = orthogonal_within(sp, &w, &[base.to_vec()]);
        let kappa = sp.norm2(&axis);
        factors.push((vi, axis, kappa));
        constant_eigs.push((lam, idx + 1));
    }
    let mut all_v: Vec<Vec<Q>> = Vec::new();
    for (vi, _, _) in &factors {
        all_v.extend(vi.iter().cloned());
    }
    let v0 = sp.orthogonal_complement(&all_v);
    let factors: Vec<SphericalFactor> = factors
        .into_iter()
        .map(|(basis, axis, kappa)| {
            let kind = if kappa.is_zero() {
                let h = sp.norm2(base) / Q::from_integer(2.into());
                AxisKind::Null { b: vsub(base, &vscale(&axis, &h)) }
            } else {
                AxisKind::NonNull { kappa }
            };
            SphericalFactor { basis, axis, kind }
        })
        .collect();
    let wpd = WarpedProductDecomposition::new(sp.clone(), base.to_vec(), v0.clone(), factors)?;
    let (sub, at) = crate::ct::restrict_operator(sp, a, &v0)?;
    let wt = coords_in(&v0, l.w())?;
    let restricted = ConcircularTensor::new(sub, at, wt, l.m().clone())?;
    Ok(ReducibleSplit { wpd, restricted, restricted_spherical: None, constant_eigs })
}

/// Splits a reducible spherical tensor along the restriction of the split
/// of its associated central tensor; `p̄` must lie on the hyperquadric.
pub fn split_reducible_spherical(s: &SphericalCT, base: &[Q]) -> Result<ReducibleSplit> {
    if s.is_trivial() {
        return Err(Error::Trivial);
    }
    let flat = split_reducible(&s.associated_central(), base)?;
    let wpd = restrict_wpd_to_sphere(&flat.wpd, s.kappa())?;
    let (sub, at) = crate::ct::restrict_operator(s.space(), s.a(), wpd.v0())?;
    let restricted_spherical = Some(SphericalCT::new(sub, s.kappa().clone(), at)?);
    Ok(ReducibleSplit { wpd, restricted: flat.restricted, restricted_spherical, constant_eigs: flat.constant_eigs })
}

impl ReducibleSplit {
    /// Exact check at `pt` that the original tensor is the pushforward of
    /// the restricted tensor plus `Σ λ_i G_i`: `L dψ(v_0) = dψ(L̃ v_0)` on
    /// base tangents and `L dψ(v_i) = λ_i dψ(v_i)` on fiber tangents.
    pub fn verify_at(&self, original: &OriginalTensor<'_>, pt: &WpdPoint) -> Result<()> {
        let wpd = &self.wpd;
        let sp = wpd.space();
        let n = sp.dim();
        let k = wpd.factors().len();
        let x = wpd.eval(pt)?;
        let lx = match original {
            OriginalTensor::Flat(l) => l.at(&x),
            OriginalTensor::Spherical(s) => s.at(&x),
        };
        let c0 = coords_in(wpd.v0(), &pt.p0)?;
        let lt = match (&self.restricted_spherical, original) {
            (Some(s), OriginalTensor::Spherical(_)) => s.at(&c0),
            _ => self.restricted.at(&c0),
        };
        let zero_fibers = vec![vec![Q::zero(); n]; k];
        for v in wpd.base_tangents(&pt.p0) {
            let cv = coords_in(wpd.v0(), &v)?;
            let ltv_c = lt.mul_vec(&cv);
            let ltv = wpd
                .v0()
                .iter()
                .zip(&ltv_c)
                .fold(vec![Q::zero(); n], |acc, (b, c)| vadd(&acc, &vscale(b, c)));
            let lhs = lx.mul_vec(&wpd.pushforward(pt, &v, &zero_fibers)?);
            let rhs = wpd.pushforward(pt, &ltv, &zero_fibers)?;
            if lhs != rhs {
                return Err(Error::Verification("base tangent is not mapped by the restricted tensor".into()));
            }
        }
        for (i, (lam, _)) in self.constant_eigs.iter().enumerate() {
            for t in wpd.fiber_tangents(i, &pt.fibers[i]) {
                let mut vs = zero_fibers.clone();
                vs[i] = t;
                let img = wpd.pushforward(pt, &vec![Q::zero(); n], &vs)?;
                if lx.mul_vec(&img) != vscale(&img, lam) {
                    return Err(Error::Verification(format!("fiber {} is not an eigenspace for {}", i + 1, fmt_q(lam))));
                }
            }
        }
        Ok(())
    }
}

/// The tensor a split was computed from.
#[derive(Clone, Copy, Debug)]
pub enum OriginalTensor<'a> {
    /// Flat tensor.
    Flat(&'a ConcircularTensor),
    /// Spherical tensor.
    Spherical(&'a SphericalCT),
}

//! Concircular tensors in flat space and on central hyperquadrics:
//! invariants, canonical forms and equivalence tests.
//!
//! A flat concircular tensor is stored as `(A, w, m)` and evaluates at the
//! position `r` to the endomorphism
//! `L(r) v = A v + <r,v> w + <w,v> r + m <r,v> r`.

use std::cmp::Ordering;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::linalg::{metric_jordan_form, MJBlock, MetricJordanForm, Space};
use crate::matrix::{outer, vis_zero, vscale, vsub, Mat, QMat};
use crate::number::{q, q_sign, Surd, Q};

/// Flat concircular tensor `L = A + w⊙r + m r⊗r` (see module docs).
#[derive(Clone, Debug, PartialEq)]
pub struct ConcircularTensor {
    space: Space,
    a: QMat,
    w: Vec<Q>,
    m: Q,
}

impl ConcircularTensor {
    /// Validates dimensions and self-adjointness of `a`.
    pub fn new(space: Space, a: QMat, w: Vec<Q>, m: Q) -> Result<Self> {
        space.check_square(&a)?;
        space.check_len(w.len())?;
        if !space.is_self_adjoint(&a)? {
            return Err(Error::NotSelfAdjoint);
        }
        Ok(ConcircularTensor { space, a, w, m })
    }

    /// Central tensor `A + r⊗r`.
    pub fn central(space: Space, a: QMat) -> Result<Self> {
        let n = space.dim();
        Self::new(space, a, vec![Q::zero(); n], Q::one())
    }

    /// Axial tensor `A + w⊙r`.
    pub fn axial(space: Space, a: QMat, w: Vec<Q>) -> Result<Self> {
        Self::new(space, a, w, Q::zero())
    }

    /// Constant (Cartesian-type) tensor `A`.
    pub fn constant(space: Space, a: QMat) -> Result<Self> {
        let n = space.dim();
        Self::new(space, a, vec![Q::zero(); n], Q::zero())
    }

    /// The metric itself.
    pub fn metric(space: Space) -> Self {
        let n = space.dim();
        ConcircularTensor { space, a: QMat::identity(n), w: vec![Q::zero(); n], m: Q::zero() }
    }

    /// Ambient space.
    pub fn space(&self) -> &Space {
        &self.space
    }

    /// Parameter matrix `A`.
    pub fn a(&self) -> &QMat {
        &self.a
    }

    /// Linear coefficient vector `w`.
    pub fn w(&self) -> &[Q] {
        &self.w
    }

    /// Quadratic coefficient `m`.
    pub fn m(&self) -> &Q {
        &self.m
    }

    /// Dimension.
    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    /// Endomorphism `L(r)` at a rational point.
    pub fn at(&self, r: &[Q]) -> QMat {
        let gr = self.space.flat(r);
        let gw = self.space.flat(&self.w);
        let mut l = self.a.clone();
        l = &l + &outer(&self.w, &gr);
        l = &l + &outer(r, &gw);
        if !self.m.is_zero() {
            l = &l + &outer(r, &gr).scale(&self.m);
        }
        l
    }

    /// Pushforward by the translation `x ↦ x + v`, i.e. `L'(y) = L(y - v)`.
    pub fn translated(&self, v: &[Q]) -> Self {
        let gv = self.space.flat(v);
        let gw = self.space.flat(&self.w);
        let mut a = &self.a - &outer(&self.w, &gv);
        a = &a - &outer(v, &gw);
        a = &a + &outer(v, &gv).scale(&self.m);
        let w = vsub(&self.w, &vscale(v, &self.m));
        ConcircularTensor { space: self.space.clone(), a, w, m: self.m.clone() }
    }

    /// Pushforward by the isometry `x ↦ T x` (`T` must preserve the metric).
    pub fn rotated(&self, t: &QMat) -> Result<Self> {
        if !self.space.is_isometry(t) {
            return Err(Error::Precondition("map is not an isometry".into()));
        }
        let tinv = t.inverse().expect("isometries are invertible");
        Ok(ConcircularTensor {
            space: self.space.clone(),
            a: &(t * &self.a) * &tinv,
            w: t.mul_vec(&self.w),
            m: self.m.clone(),
        })
    }

    /// Pushforward by the isometry `x ↦ T x + c`.
    pub fn transformed(&self, t: &QMat, c: &[Q]) -> Result<Self> {
        Ok(self.rotated(t)?.translated(c))
    }

    /// `a L`.
    pub fn scaled(&self, a: &Q) -> Self {
        ConcircularTensor {
            space: self.space.clone(),
            a: self.a.scale(a),
            w: vscale(&self.w, a),
            m: self.m.clone() * a.clone(),
        }
    }

    /// `L + b G`.
    pub fn shifted(&self, b: &Q) -> Self {
        let mut a = self.a.clone();
        for i in 0..self.dim() {
            a[(i, i)] = a[(i, i)].clone() + b.clone();
        }
        ConcircularTensor { space: self.space.clone(), a, w: self.w.clone(), m: self.m.clone() }
    }

    /// `self + other` (same space).
    pub fn plus(&self, other: &Self) -> Self {
        ConcircularTensor {
            space: self.space.clone(),
            a: &self.a + &other.a,
            w: self.w.iter().zip(&other.w).map(|(x, y)| x + y).collect(),
            m: &self.m + &other.m,
        }
    }
}

/// Invariants `ω_0 = m` and `ω_k = <w, A^{k-1} w>` for `k = 1..=upto`.
pub fn omega_invariants(l: &ConcircularTensor, upto: usize) -> Vec<Q> {
    let mut out = vec![l.m.clone()];
    let mut p = l.w.clone();
    for _ in 1..=upto {
        out.push(l.space.ip(&l.w, &p));
        p = l.a.mul_vec(&p);
    }
    out
}

/// Index and sign of a concircular tensor.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IndexSign {
    /// Least `k` with `ω_k ≠ 0` and the associated sign.
    NonDegenerate {
        /// Index.
        k: usize,
        /// Sign.
        eps: i32,
    },
    /// Every `ω_k` vanishes.
    Degenerate,
}

/// Least `k` with `ω_k ≠ 0`; sign is `+1` for even `k` and `sgn ω_k` for odd.
pub fn index_and_sign(l: &ConcircularTensor) -> IndexSign {
    let om = omega_invariants(l, l.dim());
    match om.iter().position(|x| !x.is_zero()) {
        Some(k) => {
            let eps = if k % 2 == 0 { 1 } else { q_sign(&om[k]) };
            IndexSign::NonDegenerate { k, eps }
        }
        None => IndexSign::Degenerate,
    }
}

/// Case of the canonical-form theorem.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Variant {
    /// `m ≠ 0`: `A + r⊗r` after translation and scaling.
    Central,
    /// Index 1: non-null axial.
    AxialNonNull,
    /// Index 2 or 3: null axial.
    AxialNull,
    /// `m = 0`, `w = 0`.
    Cartesian,
    /// All invariants vanish but `w ≠ 0`.
    DegenerateNullAxial,
}

impl Variant {
    /// Stable lowercase label.
    pub fn label(&self) -> &'static str {
        match self {
            Variant::Central => "central",
            Variant::AxialNonNull => "axial_non_null",
            Variant::AxialNull => "axial_null",
            Variant::Cartesian => "cartesian",
            Variant::DegenerateNullAxial => "degenerate_null_axial",
        }
    }

    /// Inverse of [`Variant::label`].
    pub fn from_label(s: &str) -> Option<Self> {
        [
            Variant::Central,
            Variant::AxialNonNull,
            Variant::AxialNull,
            Variant::Cartesian,
            Variant::DegenerateNullAxial,
        ]
        .into_iter()
        .find(|v| v.label() == s)
    }
}

/// Result of canonicalizing a flat concircular tensor.
#[derive(Clone, Debug, PartialEq)]
pub struct CTClassification {
    /// Case.
    pub variant: Variant,
    /// Index (absent for Cartesian and degenerate tensors).
    pub index_k: Option<usize>,
    /// Sign (absent for Cartesian and degenerate tensors).
    pub sign_eps: Option<i32>,
    /// Canonical representative: `scale * (input pushed forward by x ↦ x + v)`.
    pub canonical: ConcircularTensor,
    /// Translation `v`.
    pub translation: Vec<Q>,
    /// Scale `a`.
    pub scale: Q,
    /// Leading invariant `ω_k` of the input (`m` for central tensors).
    pub leading: Q,
    /// Basis of the cycle subspace `D = span{w, A'w, ..., A'^{k-1} w}`.
    pub cycle: Vec<Vec<Q>>,
    /// Metric-Jordan form of the translated (unscaled) parameter matrix
    /// restricted to the orthogonal complement of `D`.
    pub iso_form: MetricJordanForm,
}

impl CTClassification {
    /// Restricted parameter matrix `A_c = A'|_{D⊥}` of the translated tensor
    /// with the complement basis.
    pub fn complement(&self) -> Result<(Space, QMat, Vec<Vec<Q>>)> {
        let unscaled = self.canonical.scaled(&(Q::one() / self.scale.clone()));
        let basis = self.canonical.space.orthogonal_complement(&self.cycle);
        let (sub, a) = restrict_operator(&self.canonical.space, unscaled.a(), &basis)?;
        Ok((sub, a, basis))
    }
}

/// Restriction of a self-adjoint operator to an invariant subspace spanned by
/// `basis`, expressed in that basis together with the induced metric.
pub fn restrict_operator(sp: &Space, a: &QMat, basis: &[Vec<Q>]) -> Result<(Space, QMat)> {
    let n = sp.dim();
    let k = basis.len();
    let sub = sp.subspace(basis)?;
    let bmat = Mat::from_cols(basis, n);
    let mut x = QMat::zeros(k, k);
    for (j, b) in basis.iter().enumerate() {
        let img = a.mul_vec(b);
        let coef = bmat
            .solve(&img)
            .ok_or_else(|| Error::Precondition("subspace is not invariant".into()))?;
        for i in 0..k {
            x[(i, j)] = coef[i].clone();
        }
    }
    Ok((sub, x))
}

fn empty_form() -> MetricJordanForm {
    MetricJordanForm { blocks: vec![], basis: Mat::zeros(0, 0), gram_scale: vec![] }
}

fn form_of(sp: &Space, a: &QMat, basis: &[Vec<Q>]) -> Result<MetricJordanForm> {
    if basis.is_empty() {
        return Ok(empty_form());
    }
    let (sub, x) = restrict_operator(sp, a, basis)?;
    metric_jordan_form(&sub, &x)
}

/// Translation coefficients `c_1..c_{k+1}` for index `k ≤ 3`; `omega[j]` is
/// `ω_j` of the input.
fn translation_coefficients(k: usize, om: &[Q]) -> Vec<Q> {
    let w = |j: usize| om[j].clone();
    let mut c = vec![Q::zero(); k + 2];
    c[k + 1] = Q::one();
    if k >= 1 {
        c[k] = -w(k + 1) / (q(2) * w(k));
    }
    if k >= 2 {
        c[k - 1] = (q(-8) * w(k) * w(k + 2) + q(6) * w(k + 1) * w(k + 1)) / (q(16) * w(k) * w(k));
    }
    if k >= 3 {
        c[k - 2] = (q(-8) * w(k) * w(k) * w(k + 3) + q(12) * w(k) * w(k + 1) * w(k + 2)
            - q(5) * w(k + 1) * w(k + 1) * w(k + 1))
            / (q(16) * w(k) * w(k) * w(k));
    }
    c
}

/// Canonical form of a flat concircular tensor (Euclidean or Lorentzian).
pub fn canonicalize(l: &ConcircularTensor) -> Result<CTClassification> {
    let sp = &l.space;
    let n = sp.dim();
    if sp.nu() > 1 {
        return Err(Error::Unsupported(format!("canonicalization needs signature 0 or 1, got {}", sp.nu())));
    }
    match index_and_sign(l) {
        IndexSign::NonDegenerate { k: 0, .. } => {
            let v = vscale(&l.w, &(Q::one() / l.m.clone()));
            let translated = l.translated(&v);
            let iso_form = metric_jordan_form(sp, translated.a())?;
            let scale = Q::one() / l.m.clone();
            Ok(CTClassification {
                variant: Variant::Central,
                index_k: Some(0),
                sign_eps: Some(1),
                canonical: translated.scaled(&scale),
                translation: v,
                scale,
                leading: l.m.clone(),
                cycle: vec![],
                iso_form,
            })
        }
        IndexSign::NonDegenerate { k, eps } => {
            if k > 3 {
                return Err(Error::Internal(format!("axial index {k} exceeds 3 in signature {}", sp.nu())));
            }
            let om = omega_invariants(l, 2 * k + 1);
            let c = translation_coefficients(k, &om);
            let mut v = vec![Q::zero(); n];
            let mut p = l.w.clone();
            for ci in c.iter().skip(1) {
                if !ci.is_zero() {
                    v = v.iter().zip(&p).map(|(x, y)| x + ci * y).collect();
                }
                p = l.a.mul_vec(&p);
            }
            let v = vscale(&v, &(Q::one() / om[k].clone()));
            let translated = l.translated(&v);
            let mut cycle = vec![translated.w.clone()];
            for _ in 1..k {
                let last = cycle.last().expect("nonempty");
                cycle.push(translated.a.mul_vec(last));
            }
            check_axial_canonical(&translated, &cycle, &om[k])?;
            let complement = sp.orthogonal_complement(&cycle);
            let iso_form = form_of(sp, translated.a(), &complement)?;
            Ok(CTClassification {
                variant: if k == 1 { Variant::AxialNonNull } else { Variant::AxialNull },
                index_k: Some(k),
                sign_eps: Some(eps),
                canonical: translated,
                translation: v,
                scale: Q::one(),
                leading: om[k].clone(),
                cycle,
                iso_form,
            })
        }
        IndexSign::Degenerate if vis_zero(&l.w) => {
            let iso_form = metric_jordan_form(sp, &l.a)?;
            Ok(CTClassification {
                variant: Variant::Cartesian,
                index_k: None,
                sign_eps: None,
                canonical: l.clone(),
                translation: vec![Q::zero(); n],
                scale: Q::one(),
                leading: Q::zero(),
                cycle: vec![],
                iso_form,
            })
        }
        IndexSign::Degenerate => Ok(CTClassification {
            variant: Variant::DegenerateNullAxial,
            index_k: None,
            sign_eps: None,
            canonical: l.clone(),
            translation: vec![Q::zero(); n],
            scale: Q::one(),
            leading: Q::zero(),
            cycle: vec![],
            iso_form: empty_form(),
        }),
    }
}

/// Checks `A'^k w = 0` and `<A'^i w, A'^j w> = ω_k δ_{i+j,k-1}`.
fn check_axial_canonical(t: &ConcircularTensor, cycle: &[Vec<Q>], leading: &Q) -> Result<()> {
    let k = cycle.len();
    let last = t.a.mul_vec(&cycle[k - 1]);
    if !vis_zero(&last) {
        return Err(Error::Internal("translated axial tensor does not annihilate its cycle".into()));
    }
    for i in 0..k {
        for j in 0..k {
            let want = if i + j == k - 1 { leading.clone() } else { Q::zero() };
            if t.space.ip(&cycle[i], &cycle[j]) != want {
                return Err(Error::Internal("translated axial cycle is not skew-normal".into()));
            }
        }
    }
    Ok(())
}

/// Outcome of inspecting a degenerate tensor.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DegenerateReport {
    /// The cycle of `w` is a single null eigenvector: never orthogonal.
    NotOrthogonal {
        /// Dimension of `span{A^j w}`.
        cycle_dim: usize,
    },
    /// Longer null cycles are outside the supported scope.
    Unsupported {
        /// Dimension of `span{A^j w}`.
        cycle_dim: usize,
    },
}

/// Inspects a tensor with vanishing invariants and `w ≠ 0`.
pub fn detect_degenerate_null_axial(l: &ConcircularTensor) -> Result<DegenerateReport> {
    if vis_zero(&l.w) {
        return Err(Error::Precondition("w = 0: tensor is Cartesian, not degenerate null axial".into()));
    }
    if index_and_sign(l) != IndexSign::Degenerate {
        return Err(Error::Precondition("tensor is non-degenerate".into()));
    }
    if l.space.nu() == 0 {
        return Err(Error::Internal("nonzero w with vanishing norm in Euclidean signature".into()));
    }
    let mut span = vec![l.w.clone()];
    loop {
        let next = l.a.mul_vec(span.last().expect("nonempty"));
        let mut trial = span.clone();
        trial.push(next);
        if QMat::from_rows(trial.clone()).rank() == span.len() {
            break;
        }
        span = trial;
    }
    let cycle_dim = span.len();
    Ok(if cycle_dim == 1 {
        DegenerateReport::NotOrthogonal { cycle_dim }
    } else {
        DegenerateReport::Unsupported { cycle_dim }
    })
}

fn require_nondegenerate(c: &CTClassification) -> Result<()> {
    if c.variant == Variant::DegenerateNullAxial {
        return Err(Error::Precondition("degenerate tensor has no canonical form".into()));
    }
    Ok(())
}

/// Isometric equivalence: same case, index, sign, leading invariant and
/// restricted metric-Jordan form.
pub fn iso_equivalent(l1: &ConcircularTensor, l2: &ConcircularTensor) -> Result<bool> {
    if l1.space != l2.space {
        return Err(Error::Precondition("tensors live in different spaces".into()));
    }
    let c1 = canonicalize(l1)?;
    let c2 = canonicalize(l2)?;
    require_nondegenerate(&c1)?;
    require_nondegenerate(&c2)?;
    Ok(c1.variant == c2.variant
        && c1.index_k == c2.index_k
        && c1.sign_eps == c2.sign_eps
        && c1.leading == c2.leading
        && c1.iso_form.blocks == c2.iso_form.blocks)
}

/// Blocks of `a J + b` for the blocks `J` of a form, in canonical order.
pub fn affine_blocks(blocks: &[MJBlock], a: &Surd, b: &Surd) -> Vec<MJBlock> {
    let sa = a.sign();
    let mut out: Vec<MJBlock> = blocks
        .iter()
        .map(|blk| {
            let lambda = a.clone() * blk.lambda.clone() + b.clone();
            let eps = if lambda.is_real() {
                if sa < 0 && blk.k % 2 == 0 {
                    -blk.eps
                } else {
                    blk.eps
                }
            } else {
                1
            };
            MJBlock { lambda, k: blk.k, eps }
        })
        .collect();
    out.sort_by(|x, y| x.canonical_cmp(y));
    out
}

/// Candidate affine maps `λ ↦ aλ + b` sending the spectrum of `from` onto the
/// spectrum of `to`, determined by two distinct eigenvalues.
fn affine_candidates(from: &[MJBlock], to: &[MJBlock]) -> Vec<(Surd, Surd)> {
    let distinct = |bs: &[MJBlock]| {
        let mut v: Vec<Surd> = Vec::new();
        for b in bs {
            if !v.contains(&b.lambda) {
                v.push(b.lambda.clone());
            }
        }
        v
    };
    let e1 = distinct(from);
    let e2 = distinct(to);
    let mut out = Vec::new();
    if e1.len() < 2 || e1.len() != e2.len() {
        return out;
    }
    let d1 = e1[1].clone() - e1[0].clone();
    let dinv = d1.try_inv().expect("distinct eigenvalues");
    for i in 0..e2.len() {
        for j in 0..e2.len() {
            if i == j {
                continue;
            }
            let a = (e2[j].clone() - e2[i].clone()) * dinv.clone();
            if !a.is_real() || a.is_zero() {
                continue;
            }
            let b = e2[i].clone() - a.clone() * e1[0].clone();
            out.push((a, b));
        }
    }
    out
}

/// Geometric equivalence: `L2 = a T L1 + b G` for some `a ≠ 0`, `b` and an
/// isometry `T`. Decided exactly over the algebraic numbers.
pub fn geo_equivalent(l1: &ConcircularTensor, l2: &ConcircularTensor) -> Result<bool> {
    if l1.space != l2.space {
        return Err(Error::Precondition("tensors live in different spaces".into()));
    }
    let c1 = canonicalize(l1)?;
    let c2 = canonicalize(l2)?;
    require_nondegenerate(&c1)?;
    require_nondegenerate(&c2)?;
    if c1.variant != c2.variant || c1.index_k != c2.index_k {
        return Ok(false);
    }
    let b1 = &c1.iso_form.blocks;
    let b2 = &c2.iso_form.blocks;
    let k = c1.index_k.unwrap_or(0);
    // Scale constraint from the leading invariant: a^{k+1} = ratio.
    let ratio = match c1.variant {
        Variant::Cartesian => None,
        _ => Some(c2.leading.clone() / c1.leading.clone()),
    };
    let scale_ok = |a: &Surd| -> bool {
        match &ratio {
            None => true,
            Some(r) => {
                let mut p = Surd::one();
                for _ in 0..=k {
                    p = p * a.clone();
                }
                p == Surd::from_q(r.clone())
            }
        }
    };
    let leading_sign_ok = |s: i32| -> bool {
        match &ratio {
            None => true,
            Some(r) => {
                let rs = q_sign(r);
                if (k + 1) % 2 == 0 {
                    rs > 0
                } else {
                    rs == s
                }
            }
        }
    };
    let cands = affine_candidates(b1, b2);
    if !cands.is_empty() {
        return Ok(cands.iter().any(|(a, b)| scale_ok(a) && affine_blocks(b1, a, b) == *b2));
    }
    // At most one distinct eigenvalue on each side: only the sign of a and
    // the shift matter, and the magnitude of a is free apart from the scale
    // constraint.
    let e1 = b1.first().map(|b| b.lambda.clone());
    let e2 = b2.first().map(|b| b.lambda.clone());
    if b1.iter().any(|b| Some(&b.lambda) != e1.as_ref()) || b2.iter().any(|b| Some(&b.lambda) != e2.as_ref()) {
        return Ok(false);
    }
    for s in [1, -1] {
        if !leading_sign_ok(s) {
            continue;
        }
        if c1.variant == Variant::Central && q_sign(ratio.as_ref().expect("central ratio")) != s {
            continue;
        }
        let a = Surd::int(s as i64);
        let shift = match (&e1, &e2) {
            (Some(x), Some(y)) => y.clone() - a.clone() * x.clone(),
            _ => Surd::zero(),
        };
        if affine_blocks(b1, &a, &shift) == *b2 {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Concircular tensor `L = R A R*` on the hyperquadric `<p,p> = 1/κ`.
#[derive(Clone, Debug, PartialEq)]
pub struct SphericalCT {
    space: Space,
    kappa: Q,
    a: QMat,
}

impl SphericalCT {
    /// Validates `κ ≠ 0` and self-adjointness.
    pub fn new(space: Space, kappa: Q, a: QMat) -> Result<Self> {
        if kappa.is_zero() {
            return Err(Error::Precondition("curvature must be nonzero".into()));
        }
        space.check_square(&a)?;
        if !space.is_self_adjoint(&a)? {
            return Err(Error::NotSelfAdjoint);
        }
        Ok(SphericalCT { space, kappa, a })
    }

    /// Ambient space.
    pub fn space(&self) -> &Space {
        &self.space
    }

    /// Curvature.
    pub fn kappa(&self) -> &Q {
        &self.kappa
    }

    /// Parameter matrix.
    pub fn a(&self) -> &QMat {
        &self.a
    }

    /// Ambient dimension.
    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    /// Associated central tensor `A + r⊗r`.
    pub fn associated_central(&self) -> ConcircularTensor {
        ConcircularTensor::central(self.space.clone(), self.a.clone()).expect("validated parameters")
    }

    /// True when `A` is a multiple of the identity.
    pub fn is_trivial(&self) -> bool {
        let c = self.a[(0, 0)].clone();
        self.a == QMat::identity(self.dim()).scale(&c)
    }

    /// `L(p)` at a sphere point: `R A R*` with `R` the tangential projector.
    pub fn at(&self, p: &[Q]) -> QMat {
        let n = self.dim();
        let r2 = self.space.norm2(p);
        let gp = self.space.flat(p);
        let mut proj = QMat::identity(n);
        proj = &proj - &outer(p, &gp).scale(&(Q::one() / r2));
        &(&proj * &self.a) * &proj
    }
}

/// Geometric normal form of a spherical parameter matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct GeoNormalForm {
    /// Blocks of `a A + b` in canonical order.
    pub blocks: Vec<MJBlock>,
    /// Scale `a` (sign and inverse minimal gap).
    pub scale: Surd,
    /// Shift `b`.
    pub shift: Surd,
    /// The normalization with the opposite sign, when distinct.
    pub alternate: Option<Vec<MJBlock>>,
}

/// Iso- and geo-canonical data of a spherical concircular tensor.
#[derive(Clone, Debug, PartialEq)]
pub struct SphericalCanonical {
    /// Metric-Jordan form of `A`.
    pub iso: MetricJordanForm,
    /// Geometric normal form.
    pub geo: GeoNormalForm,
}

fn cmp_block_lists(x: &[MJBlock], y: &[MJBlock]) -> Ordering {
    for (a, b) in x.iter().zip(y) {
        let c = a.canonical_cmp(b);
        if c != Ordering::Equal {
            return c;
        }
    }
    x.len().cmp(&y.len())
}

/// Modulus of an algebraic number, when it can be represented.
fn modulus(z: &Surd) -> Option<Surd> {
    if z.is_real() {
        return Some(if z.sign() < 0 { -z.clone() } else { z.clone() });
    }
    let m2 = (z.clone() * z.conj()).as_rational()?;
    Surd::sqrt_q(&m2)
}

/// Normalizes the spectrum of `blocks` to minimal gap 1 with the
/// lex-smallest eigenvalue having zero real part, for both signs.
pub fn geo_normalize(blocks: &[MJBlock]) -> Result<GeoNormalForm> {
    let mut distinct: Vec<Surd> = Vec::new();
    for b in blocks {
        if !distinct.contains(&b.lambda) {
            distinct.push(b.lambda.clone());
        }
    }
    let gap = if distinct.len() >= 2 {
        let mut best: Option<Surd> = None;
        for i in 0..distinct.len() {
            for j in (i + 1)..distinct.len() {
                let d = modulus(&(distinct[i].clone() - distinct[j].clone()))
                    .ok_or_else(|| Error::Unsupported("eigenvalue gap is not representable".into()))?;
                if best.as_ref().is_none_or(|b| d.cmp_real(b) == Ordering::Less) {
                    best = Some(d);
                }
            }
        }
        best.expect("at least one pair")
    } else {
        Surd::one()
    };
    let inv = gap.try_inv().expect("nonzero gap");
    let mut results = Vec::new();
    for s in [1i64, -1] {
        let a = inv.clone() * Surd::int(s);
        let scaled = affine_blocks(blocks, &a, &Surd::zero());
        let shift = scaled.first().map_or(Surd::zero(), |b| -b.lambda.re());
        let out = affine_blocks(blocks, &a, &shift);
        results.push((out, a, shift));
    }
    results.sort_by(|x, y| cmp_block_lists(&x.0, &y.0));
    let (blocks0, a0, b0) = results.remove(0);
    let alt = results.remove(0).0;
    Ok(GeoNormalForm {
        alternate: if alt != blocks0 { Some(alt) } else { None },
        blocks: blocks0,
        scale: a0,
        shift: b0,
    })
}

/// Iso- and geo-canonical forms of a spherical concircular tensor.
pub fn canonicalize_spherical(s: &SphericalCT) -> Result<SphericalCanonical> {
    if s.dim() < 3 {
        return Err(Error::Precondition("hyperquadrics need ambient dimension at least 3".into()));
    }
    if s.is_trivial() {
        return Err(Error::Trivial);
    }
    let iso = metric_jordan_form(&s.space, &s.a)?;
    let geo = geo_normalize(&iso.blocks)?;
    Ok(SphericalCanonical { iso, geo })
}

/// Spherical isometric equivalence (same metric-Jordan blocks of `A`).
pub fn spherical_iso_equivalent(s1: &SphericalCT, s2: &SphericalCT) -> Result<bool> {
    Ok(canonicalize_spherical(s1)?.iso.blocks == canonicalize_spherical(s2)?.iso.blocks)
}

/// Spherical geometric equivalence (same geo normal form).
pub fn spherical_geo_equivalent(s1: &SphericalCT, s2: &SphericalCT) -> Result<bool> {
    Ok(canonicalize_spherical(s1)?.geo.blocks == canonicalize_spherical(s2)?.geo.blocks)
}

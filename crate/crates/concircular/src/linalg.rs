//! Scalar-product spaces and the metric-Jordan canonical form of
//! self-adjoint operators.
//!
//! Vectors and matrices are exact. Eigenvalues are elements of [`Surd`], so
//! rational, Gaussian-rational and real-quadratic spectra are all covered.

use std::cmp::Ordering;
use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::matrix::{dot, unit, Mat, QMat};
use crate::number::{q, q_sign, Scalar, Surd, Q};
use crate::poly::exact_roots;

/// A flat pseudo-Euclidean space: `R^n` with a nondegenerate symmetric
/// rational metric `g`.
#[derive(Clone, Debug, PartialEq)]
pub struct Space {
    g: QMat,
    nu: usize,
}

impl Space {
    /// Validates `g` and computes its signature.
    pub fn new(g: QMat) -> Result<Self> {
        if !g.is_square() || g.nrows() == 0 {
            return Err(Error::InvalidMetric("metric must be a nonempty square matrix".into()));
        }
        if !g.is_symmetric() {
            return Err(Error::InvalidMetric("metric is not symmetric".into()));
        }
        let nu = negative_index(&g).ok_or_else(|| Error::InvalidMetric("metric is singular".into()))?;
        Ok(Space { g, nu })
    }

    /// Like [`Space::new`] but also checks a declared signature.
    pub fn with_signature(g: QMat, nu: usize) -> Result<Self> {
        let sp = Self::new(g)?;
        if sp.nu != nu {
            return Err(Error::InvalidMetric(format!(
                "declared signature {nu} differs from computed signature {}",
                sp.nu
            )));
        }
        Ok(sp)
    }

    /// Diagonal metric.
    pub fn diagonal(d: &[Q]) -> Result<Self> {
        Self::new(QMat::diag(d))
    }

    /// Euclidean space `E^n`.
    pub fn euclidean(n: usize) -> Self {
        Self::new(QMat::identity(n)).expect("identity is a metric")
    }

    /// Minkowski space with the first coordinate timelike.
    pub fn minkowski(n: usize) -> Self {
        let mut d = vec![q(1); n];
        d[0] = q(-1);
        Self::diagonal(&d).expect("diagonal metric")
    }

    /// Dimension.
    pub fn dim(&self) -> usize {
        self.g.nrows()
    }

    /// Number of negative squares of the metric.
    pub fn nu(&self) -> usize {
        self.nu
    }

    /// Covariant metric matrix.
    pub fn metric(&self) -> &QMat {
        &self.g
    }

    /// `x^T g y` over the rationals.
    pub fn scalar_product(&self, x: &[Q], y: &[Q]) -> Result<Q> {
        self.check_len(x.len())?;
        self.check_len(y.len())?;
        Ok(dot(x, &self.g.mul_vec(y)))
    }

    /// Squared norm `<x,x>`.
    pub fn norm2(&self, x: &[Q]) -> Q {
        dot(x, &self.g.mul_vec(x))
    }

    /// `<x,y>`, panicking on size mismatch (internal use).
    pub fn ip(&self, x: &[Q], y: &[Q]) -> Q {
        dot(x, &self.g.mul_vec(y))
    }

    /// Bilinear `x^T g y` over any exact scalar field.
    pub fn ip_in<T: Scalar>(&self, x: &[T], y: &[T]) -> T {
        assert_eq!(x.len(), self.dim());
        assert_eq!(y.len(), self.dim());
        let mut acc = T::zero_elem();
        for i in 0..self.dim() {
            if x[i].is_zero_elem() {
                continue;
            }
            for j in 0..self.dim() {
                let gij = &self.g[(i, j)];
                if gij.is_zero() || y[j].is_zero_elem() {
                    continue;
                }
                acc = acc + x[i].clone() * T::embed(gij) * y[j].clone();
            }
        }
        acc
    }

    /// Lowers an index: `x ↦ g x`.
    pub fn flat(&self, x: &[Q]) -> Vec<Q> {
        self.g.mul_vec(x)
    }

    /// Self-adjointness test `gA = A^T g`.
    pub fn is_self_adjoint(&self, a: &QMat) -> Result<bool> {
        self.check_square(a)?;
        Ok(&self.g * a == &a.transpose() * &self.g)
    }

    /// Adjoint `g^{-1} A^T g`.
    pub fn adjoint(&self, a: &QMat) -> QMat {
        let ginv = self.g.inverse().expect("metric is invertible");
        &(&ginv * &a.transpose()) * &self.g
    }

    /// True when `T^T g T = g`.
    pub fn is_isometry(&self, t: &QMat) -> bool {
        t.is_square() && t.nrows() == self.dim() && &(&t.transpose() * &self.g) * t == self.g
    }

    /// Metric reflection in the hyperplane orthogonal to a non-null `u`.
    pub fn reflection(&self, u: &[Q]) -> Result<QMat> {
        self.check_len(u.len())?;
        let uu = self.norm2(u);
        if uu.is_zero() {
            return Err(Error::Precondition("reflection axis is null".into()));
        }
        let gu = self.flat(u);
        let mut r = QMat::identity(self.dim());
        for i in 0..self.dim() {
            for j in 0..self.dim() {
                r[(i, j)] = r[(i, j)].clone() - q(2) * u[i].clone() * gu[j].clone() / uu.clone();
            }
        }
        Ok(r)
    }

    /// Orthogonal complement of the span of `vs` (a basis).
    pub fn orthogonal_complement(&self, vs: &[Vec<Q>]) -> Vec<Vec<Q>> {
        if vs.is_empty() {
            return (0..self.dim()).map(|i| unit(self.dim(), i)).collect();
        }
        let rows: Vec<Vec<Q>> = vs.iter().map(|v| self.flat(v)).collect();
        QMat::from_rows(rows).nullspace()
    }

    /// Restriction of the metric to the span of the given basis.
    pub fn gram(&self, basis: &[Vec<Q>]) -> QMat {
        let k = basis.len();
        let mut m = QMat::zeros(k, k);
        for i in 0..k {
            for j in 0..k {
                m[(i, j)] = self.ip(&basis[i], &basis[j]);
            }
        }
        m
    }

    /// Subspace metric as a new space, when nondegenerate.
    pub fn subspace(&self, basis: &[Vec<Q>]) -> Result<Space> {
        Space::new(self.gram(basis))
    }

    pub(crate) fn check_len(&self, n: usize) -> Result<()> {
        if n != self.dim() {
            return Err(Error::DimensionMismatch(format!("expected length {}, got {n}", self.dim())));
        }
        Ok(())
    }

    pub(crate) fn check_square(&self, a: &QMat) -> Result<()> {
        if a.nrows() != self.dim() || a.ncols() != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "expected {}x{} matrix, got {}x{}",
                self.dim(),
                self.dim(),
                a.nrows(),
                a.ncols()
            )));
        }
        Ok(())
    }
}

/// Number of negative squares of a symmetric matrix, or `None` if singular.
///
/// Uses exact congruence diagonalization.
pub fn negative_index(g: &QMat) -> Option<usize> {
    let n = g.nrows();
    let mut m = g.clone();
    let mut neg = 0;
    for i in 0..n {
        if m[(i, i)].is_zero() {
            // Bring a nonzero diagonal entry to position i, or create one.
            if let Some(j) = (i + 1..n).find(|&j| !m[(j, j)].is_zero()) {
                swap_sym(&mut m, i, j);
            } else {
                let j = (i + 1..n).find(|&j| !m[(i, j)].is_zero())?;
                // Row/column j is added to i, giving 2 m_ij on the diagonal.
                for c in 0..n {
                    let v = m[(j, c)].clone();
                    m[(i, c)] = m[(i, c)].clone() + v;
                }
                for r in 0..n {
                    let v = m[(r, j)].clone();
                    m[(r, i)] = m[(r, i)].clone() + v;
                }
            }
        }
        let p = m[(i, i)].clone();
        if p < Q::zero() {
            neg += 1;
        }
        for r in i + 1..n {
            if m[(r, i)].is_zero() {
                continue;
            }
            let f = m[(r, i)].clone() / p.clone();
            for c in i..n {
                let v = m[(i, c)].clone();
                m[(r, c)] = m[(r, c)].clone() - f.clone() * v;
            }
            for rr in i..n {
                let v = m[(rr, i)].clone();
                m[(rr, r)] = m[(rr, r)].clone() - f.clone() * v;
            }
        }
    }
    Some(neg)
}

fn swap_sym(m: &mut QMat, i: usize, j: usize) {
    let n = m.nrows();
    for c in 0..n {
        let t = m[(i, c)].clone();
        m[(i, c)] = m[(j, c)].clone();
        m[(j, c)] = t;
    }
    for r in 0..n {
        let t = m[(r, i)].clone();
        m[(r, i)] = m[(r, j)].clone();
        m[(r, j)] = t;
    }
}

/// Skew-diagonal matrix `S_k` with ones on the antidiagonal.
pub fn skew_identity(k: usize) -> QMat {
    let mut m = QMat::zeros(k, k);
    for i in 0..k {
        m[(i, k - 1 - i)] = q(1);
    }
    m
}

/// Lower Jordan block: `lambda` on the diagonal and ones just below it.
pub fn lower_jordan<T: Scalar>(lambda: &T, k: usize) -> Mat<T> {
    let mut m = Mat::zeros(k, k);
    for i in 0..k {
        m[(i, i)] = lambda.clone();
        if i + 1 < k {
            m[(i + 1, i)] = T::one_elem();
        }
    }
    m
}

/// Exact complex rational number.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ComplexRational {
    /// Real part.
    pub re: Q,
    /// Imaginary part.
    pub im: Q,
}

impl ComplexRational {
    /// Builds `re + i im`.
    pub fn new(re: Q, im: Q) -> Self {
        ComplexRational { re, im }
    }

    /// Real number embedded.
    pub fn real(re: Q) -> Self {
        ComplexRational { re, im: Q::zero() }
    }

    /// As an algebraic number.
    pub fn to_surd(&self) -> Surd {
        Surd::from_q(self.re.clone()) + Surd::i().scale(&self.im)
    }

    /// Recovers `a + bi` from an algebraic number with rational parts.
    pub fn from_surd(s: &Surd) -> Option<Self> {
        let re = s.re().as_rational()?;
        let im = (s.im()).as_rational()?;
        Some(ComplexRational { re, im })
    }

    /// Lexicographic order with the imaginary part compared first.
    pub fn lex_less(&self, other: &Self) -> bool {
        self.lex_cmp(other) == Ordering::Less
    }

    /// Total order underlying [`ComplexRational::lex_less`].
    pub fn lex_cmp(&self, other: &Self) -> Ordering {
        self.im.cmp(&other.im).then_with(|| self.re.cmp(&other.re))
    }
}

impl fmt::Display for ComplexRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_surd().render())
    }
}

/// Free-function form of [`ComplexRational::lex_less`].
pub fn lex_less(a: &ComplexRational, b: &ComplexRational) -> bool {
    a.lex_less(b)
}

/// One block `J_{eps,k}(lambda)` of a metric-Jordan form.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MJBlock {
    /// Eigenvalue.
    pub lambda: Surd,
    /// Block size.
    pub k: usize,
    /// Sign; always `+1` for non-real eigenvalues.
    pub eps: i32,
}

impl MJBlock {
    /// Eigenvalue as a complex rational when it has rational parts.
    pub fn lambda_complex(&self) -> Option<ComplexRational> {
        ComplexRational::from_surd(&self.lambda)
    }

    /// Canonical ordering: eigenvalue, then size descending, then sign
    /// descending.
    pub fn canonical_cmp(&self, other: &Self) -> Ordering {
        self.lambda
            .lex_cmp(&other.lambda)
            .then_with(|| other.k.cmp(&self.k))
            .then_with(|| other.eps.cmp(&self.eps))
    }
}

impl fmt::Display for MJBlock {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = if self.eps > 0 { "+" } else { "-" };
        write!(f, "J[{s}{}]({})", self.k, self.lambda.render())
    }
}

/// Metric-Jordan canonical form of a self-adjoint operator.
///
/// `basis` has one column per basis vector. Block `b` of size `k` owns `k`
/// consecutive columns `v_1..v_k` with `A v_j = lambda v_j + v_{j+1}` and Gram
/// matrix `gram_scale[b] * S_k`. The scale equals `eps` whenever it can be
/// normalized in the number field; otherwise it is a field element whose sign
/// (for real eigenvalues) is `eps`.
#[derive(Clone, Debug, PartialEq)]
pub struct MetricJordanForm {
    /// Blocks in canonical order.
    pub blocks: Vec<MJBlock>,
    /// Canonical basis columns.
    pub basis: Mat<Surd>,
    /// Gram scale per block.
    pub gram_scale: Vec<Surd>,
}

impl MetricJordanForm {
    /// Dimension.
    pub fn dim(&self) -> usize {
        self.basis.nrows()
    }

    /// The operator in the canonical basis.
    pub fn jordan_matrix(&self) -> Mat<Surd> {
        let mut m = Mat::zeros(self.dim(), self.dim());
        let mut off = 0;
        for b in &self.blocks {
            let j = lower_jordan(&b.lambda, b.k);
            for r in 0..b.k {
                for c in 0..b.k {
                    m[(off + r, off + c)] = j[(r, c)].clone();
                }
            }
            off += b.k;
        }
        m
    }

    /// The metric in the canonical basis.
    pub fn gram_matrix(&self) -> Mat<Surd> {
        let mut m = Mat::zeros(self.dim(), self.dim());
        let mut off = 0;
        for (b, s) in self.blocks.iter().zip(&self.gram_scale) {
            for r in 0..b.k {
                m[(off + r, off + b.k - 1 - r)] = s.clone();
            }
            off += b.k;
        }
        m
    }

    /// Column range owned by each block.
    pub fn block_offsets(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.blocks.len());
        let mut off = 0;
        for b in &self.blocks {
            out.push(off);
            off += b.k;
        }
        out
    }

    /// Exact check of both defining identities against `(sp, a)`.
    pub fn verify(&self, sp: &Space, a: &QMat) -> Result<()> {
        let b = &self.basis;
        let asurd = a.to_surd();
        if &asurd * b != b * &self.jordan_matrix() {
            return Err(Error::Verification("A * basis != basis * J".into()));
        }
        let g = sp.metric().to_surd();
        if &(&b.transpose() * &g) * b != self.gram_matrix() {
            return Err(Error::Verification("basis^T g basis is not the block metric".into()));
        }
        if b.inverse().is_none() {
            return Err(Error::Verification("basis is singular".into()));
        }
        Ok(())
    }

    /// True when every eigenvalue is real.
    pub fn is_real(&self) -> bool {
        self.blocks.iter().all(|b| b.lambda.is_real())
    }

    /// Distinct eigenvalues in canonical order.
    pub fn eigenvalues(&self) -> Vec<Surd> {
        let mut out: Vec<Surd> = Vec::new();
        for b in &self.blocks {
            if !out.contains(&b.lambda) {
                out.push(b.lambda.clone());
            }
        }
        out
    }

    /// Same blocks as another form (the isometry invariant).
    pub fn same_blocks(&self, other: &Self) -> bool {
        self.blocks == other.blocks
    }

    /// Short human-readable description.
    pub fn describe(&self) -> String {
        self.blocks.iter().map(|b| b.to_string()).collect::<Vec<_>>().join(" + ")
    }
}

/// Computes the metric-Jordan canonical form of a self-adjoint `a`.
pub fn metric_jordan_form(sp: &Space, a: &QMat) -> Result<MetricJordanForm> {
    if !sp.is_self_adjoint(a)? {
        return Err(Error::NotSelfAdjoint);
    }
    let n = sp.dim();
    let roots = exact_roots(&a.charpoly())?;
    let asurd = a.to_surd();
    let mut pieces: Vec<(MJBlock, Vec<Vec<Surd>>, Surd)> = Vec::new();
    for root in roots {
        let lambda = root.value;
        let im_sign = lambda.im().sign();
        if im_sign < 0 {
            continue;
        }
        let nmat = &asurd - &Mat::<Surd>::identity(n).scale(&lambda);
        let space = nmat.pow(root.multiplicity).nullspace();
        if space.len() != root.multiplicity {
            return Err(Error::Internal("generalized eigenspace has wrong dimension".into()));
        }
        let mut found = Vec::new();
        decompose_eigenspace(sp, &nmat, space, &mut found)?;
        for (cols, gamma) in found {
            let k = cols.len();
            let (cols, scale) = normalize_chain(cols, gamma, im_sign > 0);
            let eps = if im_sign > 0 { 1 } else { scale.sign() };
            if im_sign > 0 {
                let conj_cols: Vec<Vec<Surd>> = cols.iter().map(|c| c.iter().map(Surd::conj).collect()).collect();
                pieces.push((MJBlock { lambda: lambda.conj(), k, eps: 1 }, conj_cols, scale.conj()));
            }
            pieces.push((MJBlock { lambda: lambda.clone(), k, eps }, cols, scale));
        }
    }
    pieces.sort_by(|x, y| x.0.canonical_cmp(&y.0));
    let mut blocks = Vec::new();
    let mut columns = Vec::new();
    let mut gram_scale = Vec::new();
    for (b, cols, s) in pieces {
        blocks.push(b);
        columns.extend(cols);
        gram_scale.push(s);
    }
    let form = MetricJordanForm { blocks, basis: Mat::from_cols(&columns, n), gram_scale };
    form.verify(sp, a)?;
    Ok(form)
}

/// Splits an `N`-invariant nondegenerate subspace into skew-normal chains.
///
/// Each output entry is a chain `v, Nv, ..., N^{k-1} v` with Gram matrix
/// `gamma * S_k`.
fn decompose_eigenspace(
    sp: &Space,
    nmat: &Mat<Surd>,
    subspace: Vec<Vec<Surd>>,
    out: &mut Vec<(Vec<Vec<Surd>>, Surd)>,
) -> Result<()> {
    if subspace.is_empty() {
        return Ok(());
    }
    // Nilpotency index of N on the subspace.
    let mut k = 0;
    let mut images = subspace.clone();
    while images.iter().any(|v| !v.iter().all(Surd::is_zero)) {
        images = images.iter().map(|v| nmat.mul_vec(v)).collect();
        k += 1;
        if k > subspace.len() {
            return Err(Error::Internal("operator is not nilpotent on its eigenspace".into()));
        }
    }
    let top = nmat.pow(k - 1);
    let beta = |x: &[Surd], y: &[Surd]| sp.ip_in(x, &top.mul_vec(y));
    let mut start = None;
    'search: for i in 0..subspace.len() {
        if !beta(&subspace[i], &subspace[i]).is_zero() {
            start = Some(subspace[i].clone());
            break;
        }
        for j in 0..i {
            let s: Vec<Surd> = subspace[i].iter().zip(&subspace[j]).map(|(a, b)| a.clone() + b.clone()).collect();
            if !beta(&s, &s).is_zero() {
                start = Some(s);
                break 'search;
            }
        }
    }
    let v = start.ok_or_else(|| Error::Internal("degenerate generalized eigenspace".into()))?;

    // Moments mu_s = <v, N^s v> and the correcting polynomial p(N).
    let mut powers = vec![v.clone()];
    for _ in 1..k {
        let last = powers.last().expect("nonempty");
        powers.push(nmat.mul_vec(last));
    }
    let mu: Vec<Surd> = powers.iter().map(|p| sp.ip_in(&v, p)).collect();
    let gamma = mu[k - 1].clone();
    let ginv = gamma.try_inv().expect("nonzero moment");
    // h(t) = sum_j (mu_{k-1-j} / gamma) t^j, with h(0) = 1.
    let h: Vec<Surd> = (0..k).map(|j| mu[k - 1 - j].clone() * ginv.clone()).collect();
    let p = series_inverse_sqrt(&h);
    let mut vp = vec![Surd::zero(); sp.dim()];
    for (j, c) in p.iter().enumerate() {
        if !c.is_zero() {
            for (x, y) in vp.iter_mut().zip(&powers[j]) {
                *x = x.clone() + c.clone() * y.clone();
            }
        }
    }
    let mut chain = vec![vp];
    for _ in 1..k {
        let last = chain.last().expect("nonempty");
        chain.push(nmat.mul_vec(last));
    }

    // Complement inside the subspace.
    let mut pairing = Mat::<Surd>::zeros(k, subspace.len());
    for (r, b) in chain.iter().enumerate() {
        for (c, u) in subspace.iter().enumerate() {
            pairing[(r, c)] = sp.ip_in(b, u);
        }
    }
    let rest: Vec<Vec<Surd>> = pairing
        .nullspace()
        .into_iter()
        .map(|coef| {
            let mut w = vec![Surd::zero(); sp.dim()];
            for (c, u) in coef.iter().zip(&subspace) {
                if !c.is_zero() {
                    for (x, y) in w.iter_mut().zip(u) {
                        *x = x.clone() + c.clone() * y.clone();
                    }
                }
            }
            w
        })
        .collect();
    out.push((chain, gamma));
    decompose_eigenspace(sp, nmat, rest, out)
}

/// Coefficients of `h(t)^{-1/2}` modulo `t^k`, assuming `h(0) = 1`.
fn series_inverse_sqrt(h: &[Surd]) -> Vec<Surd> {
    let k = h.len();
    // h = 1 + e; (1+e)^{-1/2} = sum_m binom(-1/2, m) e^m.
    let e: Vec<Surd> = (0..k).map(|j| if j == 0 { Surd::zero() } else { h[j].clone() }).collect();
    let mut result = vec![Surd::zero(); k];
    result[0] = Surd::one();
    let mut power = vec![Surd::zero(); k];
    power[0] = Surd::one();
    let mut binom = Q::one();
    for m in 1..k {
        power = truncated_mul(&power, &e, k);
        binom = binom * (Q::from_integer((-1).into()) / q(2) - q(m as i64 - 1)) / q(m as i64);
        for j in 0..k {
            result[j] = result[j].clone() + power[j].scale(&binom);
        }
    }
    result
}

fn truncated_mul(a: &[Surd], b: &[Surd], k: usize) -> Vec<Surd> {
    let mut out = vec![Surd::zero(); k];
    for i in 0..k {
        if a[i].is_zero() {
            continue;
        }
        for j in 0..(k - i) {
            if !b[j].is_zero() {
                out[i + j] = out[i + j].clone() + a[i].clone() * b[j].clone();
            }
        }
    }
    out
}

/// Rescales a chain so the Gram scale becomes a unit when its square root
/// lies in the field. Returns the chain and the resulting scale.
fn normalize_chain(cols: Vec<Vec<Surd>>, gamma: Surd, complex: bool) -> (Vec<Vec<Surd>>, Surd) {
    let Some(gq) = gamma.as_rational() else {
        return (cols, gamma);
    };
    let abs = gq.abs();
    let root = Surd::sqrt_q(&abs).expect("nonnegative rational has a radical");
    let (divisor, scale) = if complex && q_sign(&gq) < 0 {
        // sqrt(gamma) = i sqrt(|gamma|) brings the scale to +1.
        (root * Surd::i(), Surd::one())
    } else {
        (root, Surd::int(q_sign(&gq) as i64))
    };
    let inv = divisor.try_inv().expect("nonzero");
    let cols = cols.into_iter().map(|c| c.into_iter().map(|x| x * inv.clone()).collect()).collect();
    (cols, scale)
}

/// Real normal form obtained from a metric-Jordan form by replacing each
/// conjugate pair of chains `v, conj(v)` with `s = (v + conj v)/sqrt 2` and
/// `t = i(v - conj v)/sqrt 2`, interleaved per chain slot.
#[derive(Clone, Debug, PartialEq)]
pub struct RealJordanForm {
    /// Real basis columns (entries may involve square roots).
    pub basis: Mat<Surd>,
    /// The operator in that basis.
    pub operator: Mat<Surd>,
    /// The metric in that basis.
    pub gram: Mat<Surd>,
}

/// Builds the real change of basis for a metric-Jordan form.
pub fn complex_to_real_basis(form: &MetricJordanForm) -> Result<RealJordanForm> {
    let offsets = form.block_offsets();
    let mut used = vec![false; form.blocks.len()];
    let mut cols: Vec<Vec<Surd>> = Vec::new();
    let sqrt2_inv = Surd::sqrt2().try_inv().expect("nonzero");
    for (bi, b) in form.blocks.iter().enumerate() {
        let im = b.lambda.im().sign();
        if im == 0 {
            for j in 0..b.k {
                cols.push(form.basis.col(offsets[bi] + j));
            }
            used[bi] = true;
            continue;
        }
        if im < 0 {
            continue;
        }
        let own: Vec<Vec<Surd>> = (0..b.k).map(|j| form.basis.col(offsets[bi] + j)).collect();
        let partner = form.blocks.iter().enumerate().position(|(ci, c)| {
            !used[ci]
                && c.k == b.k
                && c.lambda == b.lambda.conj()
                && (0..b.k).all(|j| form.basis.col(offsets[ci] + j) == own[j].iter().map(Surd::conj).collect::<Vec<_>>())
        });
        let Some(ci) = partner else {
            return Err(Error::Precondition(format!("unpaired complex block {b}")));
        };
        used[ci] = true;
        used[bi] = true;
        for v in &own {
            let s: Vec<Surd> = v.iter().map(|x| (x.clone() + x.conj()) * sqrt2_inv.clone()).collect();
            let t: Vec<Surd> = v.iter().map(|x| Surd::i() * (x.clone() - x.conj()) * sqrt2_inv.clone()).collect();
            cols.push(s);
            cols.push(t);
        }
    }
    if used.iter().any(|u| !u) {
        return Err(Error::Precondition("unpaired complex block".into()));
    }
    let n = form.dim();
    let basis = Mat::from_cols(&cols, n);
    let inv = basis.inverse().ok_or_else(|| Error::Internal("real basis is singular".into()))?;
    let orig_inv = form.basis.inverse().ok_or_else(|| Error::Internal("basis is singular".into()))?;
    // Operator and metric in the original coordinates, recovered from the form.
    let a = &(&form.basis * &form.jordan_matrix()) * &orig_inv;
    let g = &(&orig_inv.transpose() * &form.gram_matrix()) * &orig_inv;
    let operator = &(&inv * &a) * &basis;
    let gram = &(&basis.transpose() * &g) * &basis;
    Ok(RealJordanForm { basis, operator, gram })
}

/// Diagonal approximants converging to a single Jordan block.
#[derive(Clone, Debug, PartialEq)]
pub struct JordanLimit {
    /// Diagonal operator with distinct eigenvalues.
    pub operator: QMat,
    /// Diagonal metric.
    pub metric: QMat,
    /// Change of basis whose conjugation converges to the Jordan block.
    pub transform: QMat,
}

impl JordanLimit {
    /// `Lambda^{-1} A Lambda`.
    pub fn conjugated_operator(&self) -> QMat {
        let inv = self.transform.inverse().expect("invertible transform");
        &(&inv * &self.operator) * &self.transform
    }

    /// `Lambda^T g Lambda`.
    pub fn conjugated_metric(&self) -> QMat {
        &(&self.transform.transpose() * &self.metric) * &self.transform
    }

    /// Max-norm distance of the conjugated pair from `(J_n^T(lambda), eps S_n)`.
    pub fn defect(&self, lambda: &Q, eps: i32) -> Q {
        let n = self.operator.nrows();
        let dj = (&self.conjugated_operator() - &lower_jordan(lambda, n)).max_abs();
        let ds = (&self.conjugated_metric() - &skew_identity(n).scale(&q(eps as i64))).max_abs();
        dj.max(ds)
    }
}

/// Diagonal operators and metrics with eigenvalue spacing `t` whose
/// conjugates tend to a Jordan block of size `n` as `t -> 0`.
pub fn jordan_limit_sequence(n: usize, lambda1: &Q, eps: i32, t: &Q) -> Result<JordanLimit> {
    if n == 0 || n > 3 {
        return Err(Error::Unsupported(format!("Jordan limit only for sizes 1..=3, got {n}")));
    }
    if t.is_zero() {
        return Err(Error::Precondition("spacing parameter must be nonzero".into()));
    }
    if eps != 1 && eps != -1 {
        return Err(Error::Precondition("sign must be +1 or -1".into()));
    }
    let s = |j: i64| t.clone() * q(j);
    let mut a = QMat::zeros(n, n);
    let mut g = QMat::zeros(n, n);
    let mut lam = QMat::zeros(n, n);
    for i in 1..=n as i64 {
        let r = (i - 1) as usize;
        a[(r, r)] = lambda1.clone() + s(i - 1);
        let mut den = Q::one();
        for k in 1..=n as i64 {
            if k != i {
                den *= s(i - 1) - s(k - 1);
            }
        }
        g[(r, r)] = q(eps as i64) / den;
        for j in 1..=n as i64 {
            let mut prod = Q::one();
            for l in 2..=j {
                prod *= s(i - 1) - s(l - 2);
            }
            lam[(r, (j - 1) as usize)] = prod;
        }
    }
    Ok(JordanLimit { operator: a, metric: g, transform: lam })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::number::qf;

    #[test]
    fn signature_of_skew_metric() {
        assert_eq!(negative_index(&skew_identity(2)), Some(1));
        assert_eq!(negative_index(&skew_identity(3)), Some(1));
        assert_eq!(negative_index(&QMat::zeros(2, 2)), None);
    }

    #[test]
    fn series_inverse_sqrt_squares_back() {
        let h = vec![Surd::one(), Surd::int(3), Surd::from_q(qf(1, 2))];
        let p = series_inverse_sqrt(&h);
        let p2 = truncated_mul(&p, &p, 3);
        let prod = truncated_mul(&p2, &h, 3);
        assert_eq!(prod, vec![Surd::one(), Surd::zero(), Surd::zero()]);
    }

    #[test]
    fn jordan_block_sign() {
        let sp = Space::new(skew_identity(2)).unwrap();
        let a = lower_jordan(&q(3), 2);
        let f = metric_jordan_form(&sp, &a).unwrap();
        assert_eq!(f.blocks, vec![MJBlock { lambda: Surd::int(3), k: 2, eps: 1 }]);
    }
}

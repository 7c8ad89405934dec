//! Characteristic polynomials of concircular tensors as exact polynomials in
//! the Cartesian coordinates, together with eigenfunction evaluation and the
//! detection of constant eigenfunctions.
//!
//! Flat tensors use `p(z) = det(zI - L)`. Tensors on a hyperquadric use
//! `r² p(z)` with `p(z) = det(zR - L + r⊗r♭/r²)`, so the coefficients stay
//! polynomial and the divisor `r²` is kept alongside.

use std::collections::HashMap;

use num_complex::Complex64;
use num_traits::{One, Zero};

use crate::ct::{canonicalize, ConcircularTensor, SphericalCT, Variant};
use crate::error::{Error, Result};
use crate::matrix::{Mat, QMat};
use crate::number::{q, Surd, Q};
use crate::poly::{exact_roots, MultiPoly, UPoly};
use crate::linalg::Space;

/// Which determinant a [`CharPoly`] represents.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Convention {
    /// `det(zI - L)` on flat space.
    Flat,
    /// `r² det(zR - L + r⊗r♭/r²)` on a hyperquadric.
    Spherical,
}

impl Convention {
    /// Stable label used in JSON.
    pub fn label(&self) -> &'static str {
        match self {
            Convention::Flat => "flat",
            Convention::Spherical => "spherical",
        }
    }
}

/// Polynomial `Σ_l c_l z^l` with each `c_l` a polynomial in `x¹…xⁿ`.
#[derive(Clone, Debug, PartialEq)]
pub struct CharPoly {
    nvars: usize,
    coeffs: Vec<MultiPoly>,
    convention: Convention,
    divisor: Option<MultiPoly>,
}

impl CharPoly {
    /// Builds from a polynomial in `n + 1` variables whose last variable is
    /// `z`.
    pub fn from_bivariate(p: &MultiPoly, convention: Convention, divisor: Option<MultiPoly>) -> Self {
        let n = p.nvars() - 1;
        let coeffs = p.split_by_var(n);
        CharPoly { nvars: n, coeffs, convention, divisor }
    }

    /// The polynomial in `n + 1` variables with `z` last.
    pub fn bivariate(&self) -> MultiPoly {
        let n = self.nvars;
        let mut out = MultiPoly::zero(n + 1);
        let z = MultiPoly::var(n + 1, n);
        let mut zl = MultiPoly::constant(n + 1, Q::one());
        for c in &self.coeffs {
            out = out + &c.extend_vars(n + 1) * &zl;
            zl = &zl * &z;
        }
        out
    }

    /// Number of Cartesian variables.
    pub fn nvars(&self) -> usize {
        self.nvars
    }

    /// Degree in `z` (`None` for the zero polynomial).
    pub fn degree(&self) -> Option<usize> {
        if self.coeffs.is_empty() {
            None
        } else {
            Some(self.coeffs.len() - 1)
        }
    }

    /// Coefficients `c_0..c_d`.
    pub fn coeffs(&self) -> &[MultiPoly] {
        &self.coeffs
    }

    /// Coefficient of `z^l` (zero past the degree).
    pub fn coeff(&self, l: usize) -> MultiPoly {
        self.coeffs.get(l).cloned().unwrap_or_else(|| MultiPoly::zero(self.nvars))
    }

    /// Convention flag.
    pub fn convention(&self) -> Convention {
        self.convention
    }

    /// The divisor `r²` of the spherical convention.
    pub fn divisor(&self) -> Option<&MultiPoly> {
        self.divisor.as_ref()
    }

    /// `p(λ)` as a polynomial in the coordinates.
    pub fn at_z(&self, lambda: &Q) -> MultiPoly {
        let mut acc = MultiPoly::zero(self.nvars);
        for c in self.coeffs.iter().rev() {
            acc = acc.scale(lambda) + c.clone();
        }
        acc
    }

    /// `dp/dz`.
    pub fn deriv_z(&self) -> CharPoly {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(l, c)| c.scale(&q(l as i64)))
            .collect();
        CharPoly { nvars: self.nvars, coeffs, convention: self.convention, divisor: self.divisor.clone() }
    }

    /// Univariate polynomial in `z` at a rational point, divided by the
    /// recorded divisor in the spherical convention.
    pub fn eval_at(&self, x: &[Q]) -> Result<UPoly> {
        if x.len() != self.nvars {
            return Err(Error::DimensionMismatch(format!("point of length {} for {} variables", x.len(), self.nvars)));
        }
        let mut c: Vec<Q> = self.coeffs.iter().map(|c| c.eval(x)).collect();
        if let Some(d) = &self.divisor {
            let dv = d.eval(x);
            if dv.is_zero() {
                return Err(Error::Domain("point lies on the null cone r² = 0".into()));
            }
            c = c.into_iter().map(|v| v / &dv).collect();
        }
        Ok(UPoly::new(c))
    }

    /// Monic gcd over all coordinate monomials of the `z`-polynomials
    /// multiplying them. Its roots are the values `λ` with `p(λ) ≡ 0`.
    pub fn constant_root_content(&self) -> UPoly {
        let mut by_mono: HashMap<Vec<u32>, Vec<Q>> = HashMap::new();
        let d = self.coeffs.len();
        for (l, c) in self.coeffs.iter().enumerate() {
            for (e, v) in c.terms() {
                by_mono.entry(e.clone()).or_insert_with(|| vec![Q::zero(); d])[l] = v.clone();
            }
        }
        let mut g = UPoly::zero();
        let mut keys: Vec<_> = by_mono.keys().cloned().collect();
        keys.sort();
        for k in keys {
            g = g.gcd(&UPoly::new(by_mono[&k].clone()));
            if g.degree() == Some(0) {
                break;
            }
        }
        if g.is_zero() {
            g
        } else {
            g.monic()
        }
    }

    /// Largest `j` such that `(z - λ)^j` divides `p` identically in the
    /// coordinates.
    pub fn constant_root_multiplicity(&self, lambda: &Q) -> usize {
        let mut p = self.clone();
        let mut j = 0;
        while !p.coeffs.is_empty() && p.at_z(lambda).is_zero() {
            j += 1;
            p = p.deriv_z();
        }
        j
    }

    /// Human readable rendering with `z` as the spectral variable.
    pub fn render(&self, names: &[&str]) -> String {
        let mut parts = Vec::new();
        for (l, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let zs = match l {
                0 => String::new(),
                1 => "z".to_string(),
                _ => format!("z^{l}"),
            };
            let cs = c.render(names);
            if zs.is_empty() {
                parts.push(format!("({cs})"));
            } else if cs == "1" {
                parts.push(zs);
            } else {
                parts.push(format!("({cs})*{zs}"));
            }
        }
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join(" + ")
        }
    }
}

/// Borrowed flat or spherical tensor.
#[derive(Clone, Copy, Debug)]
pub enum TensorRef<'a> {
    /// Flat tensor.
    Flat(&'a ConcircularTensor),
    /// Tensor on a hyperquadric.
    Spherical(&'a SphericalCT),
}

impl<'a> From<&'a ConcircularTensor> for TensorRef<'a> {
    fn from(l: &'a ConcircularTensor) -> Self {
        TensorRef::Flat(l)
    }
}

impl<'a> From<&'a SphericalCT> for TensorRef<'a> {
    fn from(s: &'a SphericalCT) -> Self {
        TensorRef::Spherical(s)
    }
}

/// Largest dimension accepted by [`charpoly_bruteforce`].
pub const BRUTEFORCE_MAX_DIM: usize = 6;

fn position_vars(n: usize, nv: usize) -> Vec<MultiPoly> {
    (0..n).map(|i| MultiPoly::var(nv, i)).collect()
}

fn lower(g: &QMat, v: &[MultiPoly], nv: usize) -> Vec<MultiPoly> {
    let n = v.len();
    (0..n)
        .map(|i| {
            let mut acc = MultiPoly::zero(nv);
            for j in 0..n {
                if !g[(i, j)].is_zero() {
                    acc = acc + v[j].scale(&g[(i, j)]);
                }
            }
            acc
        })
        .collect()
}

fn apply(a: &QMat, v: &[MultiPoly], nv: usize) -> Vec<MultiPoly> {
    lower(a, v, nv)
}

fn const_vec(v: &[Q], nv: usize) -> Vec<MultiPoly> {
    v.iter().map(|c| MultiPoly::constant(nv, c.clone())).collect()
}

fn pairing(a: &[MultiPoly], b: &[MultiPoly], nv: usize) -> MultiPoly {
    a.iter().zip(b).fold(MultiPoly::zero(nv), |acc, (x, y)| acc + x * y)
}

/// Determinant by cofactor expansion along rows, memoized over column
/// subsets.
fn det_laplace(m: &[Vec<MultiPoly>], nv: usize) -> MultiPoly {
    let n = m.len();
    if n == 0 {
        return MultiPoly::constant(nv, Q::one());
    }
    let mut level: HashMap<u32, MultiPoly> = HashMap::new();
    level.insert(0, MultiPoly::constant(nv, Q::one()));
    for (row, entries) in m.iter().enumerate() {
        let mut next: HashMap<u32, MultiPoly> = HashMap::new();
        for (&mask, minor) in &level {
            if minor.is_zero() {
                continue;
            }
            for (j, entry) in entries.iter().enumerate() {
                if mask & (1 << j) != 0 || entry.is_zero() {
                    continue;
                }
                // Sign of placing column j after the already used columns
                // of rows 0..row in the permutation.
                let above = (mask >> (j + 1)).count_ones();
                let term = entry * minor;
                let term = if above % 2 == 1 { -term } else { term };
                let slot = next.entry(mask | (1 << j)).or_insert_with(|| MultiPoly::zero(nv));
                *slot = std::mem::replace(slot, MultiPoly::zero(nv)) + term;
            }
        }
        level = next;
        let _ = row;
    }
    level.remove(&((1u32 << n) - 1)).unwrap_or_else(|| MultiPoly::zero(nv))
}

fn check_size(n: usize) -> Result<()> {
    if n > BRUTEFORCE_MAX_DIM {
        return Err(Error::Unsupported(format!(
            "brute-force determinant limited to dimension {BRUTEFORCE_MAX_DIM}, got {n}"
        )));
    }
    Ok(())
}

/// Characteristic polynomial by direct symbolic expansion of the determinant.
pub fn charpoly_bruteforce<'a>(t: impl Into<TensorRef<'a>>) -> Result<CharPoly> {
    match t.into() {
        TensorRef::Flat(l) => bruteforce_flat(l),
        TensorRef::Spherical(s) => bruteforce_spherical(s),
    }
}

fn bruteforce_flat(l: &ConcircularTensor) -> Result<CharPoly> {
    let n = l.dim();
    check_size(n)?;
    let nv = n + 1;
    let g = l.space().metric();
    let r = position_vars(n, nv);
    let gr = lower(g, &r, nv);
    let w = const_vec(l.w(), nv);
    let gw = lower(g, &w, nv);
    let z = MultiPoly::var(nv, n);
    let mut mat = vec![vec![MultiPoly::zero(nv); n]; n];
    for i in 0..n {
        for j in 0..n {
            let mut e = MultiPoly::constant(nv, -l.a()[(i, j)].clone());
            e = e - &w[i] * &gr[j] - &r[i] * &gw[j] - (&r[i] * &gr[j]).scale(l.m());
            if i == j {
                e = e + z.clone();
            }
            mat[i][j] = e;
        }
    }
    Ok(CharPoly::from_bivariate(&det_laplace(&mat, nv), Convention::Flat, None))
}

fn bruteforce_spherical(s: &SphericalCT) -> Result<CharPoly> {
    let n = s.dim();
    check_size(n)?;
    let nv = n + 1;
    let g = s.space().metric();
    let r = position_vars(n, nv);
    let gr = lower(g, &r, nv);
    let ar = apply(s.a(), &r, nv);
    let gar = lower(g, &ar, nv);
    let r2 = pairing(&r, &gr, nv);
    let sr = pairing(&gr, &ar, nv);
    let z = MultiPoly::var(nv, n);
    // r² (zR - RAR + r⊗r♭/r²) = P - (s/r²) r⊗r♭ with P polynomial.
    let mut p = vec![vec![MultiPoly::zero(nv); n]; n];
    for i in 0..n {
        for j in 0..n {
            let delta = if i == j { r2.clone() } else { MultiPoly::zero(nv) };
            let proj = delta.clone() - &r[i] * &gr[j];
            let e = &z * &proj - r2.scale(&s.a()[(i, j)]) + &r[i] * &gar[j] + &ar[i] * &gr[j] + &r[i] * &gr[j];
            p[i][j] = e;
        }
    }
    // Columns of the rank-one part are multiples of r, so multilinearity
    // in the columns keeps at most one of them.
    let mut num = &r2 * &det_laplace(&p, nv);
    let mut rank_one = MultiPoly::zero(nv);
    for j in 0..n {
        if gr[j].is_zero() {
            continue;
        }
        let mut pj = p.clone();
        for (i, row) in pj.iter_mut().enumerate() {
            row[j] = r[i].clone();
        }
        rank_one = rank_one + &gr[j] * &det_laplace(&pj, nv);
    }
    num = num - &sr * &rank_one;
    for _ in 0..n {
        num = num
            .div_exact(&r2)
            .ok_or_else(|| Error::Internal("projected determinant not divisible by r²".into()))?;
    }
    let divisor = r2.split_by_var(n).into_iter().next().unwrap_or_else(|| MultiPoly::zero(n));
    Ok(CharPoly::from_bivariate(&num, Convention::Spherical, Some(divisor)))
}

/// One block of a canonical parameter matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct LayoutBlock {
    /// First coordinate index of the block.
    pub offset: usize,
    /// Block size (1 for a diagonal entry).
    pub size: usize,
    /// Eigenvalue.
    pub lambda: Q,
    /// Metric data: `g_ii` for a diagonal entry, `ε` with metric `ε S_k`
    /// for a Jordan block.
    pub metric: Q,
}

/// Block structure of a canonical parameter matrix on coordinates
/// `start..n`: diagonal entries and lower Jordan blocks `A e_i = λ e_i +
/// e_{i+1}` with skew-diagonal metric.
#[derive(Clone, Debug, PartialEq)]
pub struct Layout {
    /// Blocks in coordinate order.
    pub blocks: Vec<LayoutBlock>,
}

/// Detects a canonical block layout of `(g, A)` on the coordinates
/// `start..n`.
pub fn detect_layout(sp: &Space, a: &QMat, start: usize) -> Result<Layout> {
    let g = sp.metric();
    let n = sp.dim();
    let mut blocks = Vec::new();
    let mut i = start;
    while i < n {
        let size = if !g[(i, i)].is_zero() {
            1
        } else {
            (i + 1..n)
                .find(|&j| !g[(i, j)].is_zero())
                .map(|j| j - i + 1)
                .ok_or_else(|| Error::Unsupported("metric is not block skew-diagonal".into()))?
        };
        let lambda = a[(i, i)].clone();
        let metric = if size == 1 { g[(i, i)].clone() } else { g[(i, i + size - 1)].clone() };
        if size > 1 && !(metric == Q::one() || metric == -Q::one()) {
            return Err(Error::Unsupported("Jordan block metric must be ±S_k".into()));
        }
        for r in i..i + size {
            for c in 0..n {
                let inside = c >= i && c < i + size;
                let g_expect = if !inside {
                    Q::zero()
                } else if (r - i) + (c - i) == size - 1 {
                    metric.clone()
                } else {
                    Q::zero()
                };
                let a_expect = if !inside {
                    Q::zero()
                } else if r == c {
                    lambda.clone()
                } else if r == c + 1 {
                    Q::one()
                } else {
                    Q::zero()
                };
                if g[(r, c)] != g_expect || a[(r, c)] != a_expect {
                    return Err(Error::Unsupported(format!(
                        "parameter matrix is not in canonical block form at ({r}, {c})"
                    )));
                }
            }
        }
        blocks.push(LayoutBlock { offset: i, size, lambda, metric });
        i += size;
    }
    Ok(Layout { blocks })
}

fn upoly_in(p: &UPoly, nv: usize, zi: usize) -> MultiPoly {
    let z = MultiPoly::var(nv, zi);
    let mut acc = MultiPoly::zero(nv);
    for c in p.coeffs().iter().rev() {
        acc = &acc * &z + MultiPoly::constant(nv, c.clone());
    }
    acc
}

/// `(p_u, B_u)` for the diagonal part of a layout.
fn diagonal_part(blocks: &[&LayoutBlock], nv: usize, zi: usize) -> (MultiPoly, MultiPoly) {
    let mut b = UPoly::constant(Q::one());
    for blk in blocks {
        b = b * UPoly::linear_root(&blk.lambda);
    }
    let nd = blocks.len();
    let a: Vec<Q> = (0..=nd).map(|l| b.coeff(l)).collect();
    // <r, A^j r> restricted to the diagonal part.
    let moments: Vec<MultiPoly> = (0..nd)
        .map(|j| {
            blocks.iter().fold(MultiPoly::zero(nv), |acc, blk| {
                let x = MultiPoly::var(nv, blk.offset);
                let mut c = blk.metric.clone();
                for _ in 0..j {
                    c *= &blk.lambda;
                }
                acc + (&x * &x).scale(&c)
            })
        })
        .collect();
    let z = MultiPoly::var(nv, zi);
    let mut p = MultiPoly::zero(nv);
    let mut zl = MultiPoly::constant(nv, Q::one());
    for l in 0..=nd {
        let mut c = MultiPoly::constant(nv, a[l].clone());
        for j in 0..nd.saturating_sub(l) {
            c = c - moments[j].scale(&a[j + 1 + l]);
        }
        p = p + &c * &zl;
        zl = &zl * &z;
    }
    (p, upoly_in(&b, nv, zi))
}

/// `(p_u, B_u)` for a central Jordan block.
fn jordan_part(blk: &LayoutBlock, nv: usize, zi: usize) -> (MultiPoly, MultiPoly) {
    let k = blk.size;
    let y = MultiPoly::var(nv, zi) - MultiPoly::constant(nv, blk.lambda.clone());
    let x = |i: usize| MultiPoly::var(nv, blk.offset + i - 1);
    let mut sum = MultiPoly::zero(nv);
    let mut yl = MultiPoly::constant(nv, Q::one());
    for l in 0..k {
        let mut inner = MultiPoly::zero(nv);
        for i in 1..=l + 1 {
            inner = inner + &x(i) * &x(l + 2 - i);
        }
        sum = sum + &inner * &yl;
        yl = &yl * &y;
    }
    let bu = y.pow(k as u32);
    (bu.clone() - sum.scale(&blk.metric), bu)
}

/// Combines invariant pieces with `p = p_u B_v + B_u (p_v - B_v)`.
fn combine(parts: Vec<(MultiPoly, MultiPoly)>, nv: usize) -> (MultiPoly, MultiPoly) {
    let mut p = MultiPoly::constant(nv, Q::one());
    let mut b = MultiPoly::constant(nv, Q::one());
    for (pu, bu) in parts {
        let np = &pu * &b + &bu * &(p - b.clone());
        b = &bu * &b;
        p = np;
    }
    (p, b)
}

fn central_pieces(layout: &Layout, nv: usize, zi: usize) -> (MultiPoly, MultiPoly) {
    let diag: Vec<&LayoutBlock> = layout.blocks.iter().filter(|b| b.size == 1).collect();
    let mut parts = Vec::new();
    if !diag.is_empty() {
        parts.push(diagonal_part(&diag, nv, zi));
    }
    for blk in layout.blocks.iter().filter(|b| b.size > 1) {
        parts.push(jordan_part(blk, nv, zi));
    }
    combine(parts, nv)
}

/// Characteristic polynomial of the central tensor `A + r⊗r` with `A` in
/// canonical block form (diagonal entries and lower Jordan blocks).
pub fn charpoly_central(sp: &Space, a: &QMat) -> Result<CharPoly> {
    let n = sp.dim();
    sp.check_square(a)?;
    let layout = detect_layout(sp, a, 0)?;
    let (p, _) = central_pieces(&layout, n + 1, n);
    Ok(CharPoly::from_bivariate(&p, Convention::Flat, None))
}

/// Characteristic polynomial of a canonical central tensor.
pub fn charpoly_central_ct(l: &ConcircularTensor) -> Result<CharPoly> {
    if !l.m().is_one() || l.w().iter().any(|c| !c.is_zero()) {
        return Err(Error::Precondition("central canonical form needs w = 0 and m = 1".into()));
    }
    charpoly_central(l.space(), l.a())
}

/// Axial canonical data: the size `k` of the leading block and its sign.
pub(crate) fn axial_block(l: &ConcircularTensor) -> Result<(usize, Q)> {
    let sp = l.space();
    let g = sp.metric();
    let n = sp.dim();
    let noncanonical = |msg: &str| Error::Precondition(format!("axial canonical form: {msg}"));
    if !l.m().is_zero() {
        return Err(noncanonical("m must vanish"));
    }
    if l.w()[0] != Q::one() || l.w()[1..].iter().any(|c| !c.is_zero()) {
        return Err(noncanonical("w must be the first basis vector"));
    }
    let k = (0..n).find(|&j| !g[(0, j)].is_zero()).map(|j| j + 1).ok_or_else(|| noncanonical("degenerate metric"))?;
    let eps = g[(0, k - 1)].clone();
    if !(eps == Q::one() || eps == -Q::one()) {
        return Err(noncanonical("leading block metric must be ±S_k"));
    }
    for r in 0..k {
        for c in 0..n {
            let inside = c < k;
            let g_expect = if inside && r + c == k - 1 { eps.clone() } else { Q::zero() };
            let a_expect = if inside && r == c + 1 { Q::one() } else { Q::zero() };
            if g[(r, c)] != g_expect || l.a()[(r, c)] != a_expect {
                return Err(noncanonical("leading block must be a nilpotent lower Jordan block"));
            }
        }
    }
    Ok((k, eps))
}

/// Characteristic polynomial of the irreducible axial block
/// `A_d = J_k(0)`, `g = ε S_k`, `w = e_1`.
fn axial_block_poly(k: usize, eps: &Q, nv: usize, zi: usize) -> MultiPoly {
    let x = |i: usize| MultiPoly::var(nv, i - 1);
    let z = MultiPoly::var(nv, zi);
    let zp = |e: usize| z.pow(e as u32);
    let mut p = zp(k);
    for l in 2..=k {
        let mut inner = MultiPoly::zero(nv);
        for i in 1..l {
            inner = inner + &x(k + 1 + i - l) * &x(k + 1 - i);
        }
        p = p + &inner * &zp(k - l);
    }
    let mut lin = MultiPoly::zero(nv);
    for i in 1..=k {
        lin = lin + &x(k - i + 1) * &zp(k - i);
    }
    p - lin.scale(&(q(2) * eps))
}

/// Characteristic polynomial of a canonical axial tensor
/// `A + e_1⊙r` with `A = J_k(0) ⊕ A_c` and `A_c` in canonical block form.
pub fn charpoly_axial(l: &ConcircularTensor) -> Result<CharPoly> {
    let (k, eps) = axial_block(l)?;
    let n = l.dim();
    let nv = n + 1;
    let layout = detect_layout(l.space(), l.a(), k)?;
    let pd = axial_block_poly(k, &eps, nv, n);
    let (pc, b) = central_pieces(&layout, nv, n);
    let p = &pd * &b + (pc - b).scale(&eps);
    Ok(CharPoly::from_bivariate(&p, Convention::Flat, None))
}

/// Characteristic polynomial `B(z) - p_c(z)` of a spherical tensor whose
/// parameter matrix is in canonical block form; the divisor `r²` is stored.
pub fn charpoly_spherical(s: &SphericalCT) -> Result<CharPoly> {
    let n = s.dim();
    let nv = n + 1;
    let layout = detect_layout(s.space(), s.a(), 0)?;
    let (pc, b) = central_pieces(&layout, nv, n);
    let p = b - pc;
    let g = s.space().metric();
    let r = position_vars(n, n);
    let r2 = pairing(&r, &lower(g, &r, n), n);
    Ok(CharPoly::from_bivariate(&p, Convention::Spherical, Some(r2)))
}

/// `B(z) = det(zI - A_c)` for a canonical axial tensor, where `A_c` is the
/// parameter matrix on the complement of the leading block.
pub fn axial_complement_charpoly(l: &ConcircularTensor) -> Result<UPoly> {
    let (k, _) = axial_block(l)?;
    let idx: Vec<usize> = (k..l.dim()).collect();
    Ok(l.a().select(&idx, &idx).charpoly())
}

/// Residual `<dp, dp> - 4ε (p_z B - p B_z)` of the identity
/// `<dT, dT> = 4ε dT/dz` for `T = p/B`, as a polynomial in `(x, z)`.
pub fn t_identity_residual(sp: &Space, p: &CharPoly, b: &UPoly, eps: i32) -> Result<MultiPoly> {
    let n = sp.dim();
    let nv = n + 1;
    let ginv = sp
        .metric()
        .inverse()
        .ok_or_else(|| Error::InvalidMetric("singular metric".into()))?;
    let pb = p.bivariate();
    let grads: Vec<MultiPoly> = (0..n).map(|i| pb.deriv(i)).collect();
    let mut norm = MultiPoly::zero(nv);
    for i in 0..n {
        for j in 0..n {
            if !ginv[(i, j)].is_zero() {
                norm = norm + (&grads[i] * &grads[j]).scale(&ginv[(i, j)]);
            }
        }
    }
    let bz = upoly_in(b, nv, n);
    let rhs = &pb.deriv(n) * &bz - &pb * &bz.deriv(n);
    Ok(norm - rhs.scale(&q(4 * eps as i64)))
}

/// Residuals `E(c_l) r² - c_l E(r²)` with `E` the Euler field; all vanish
/// exactly when every coefficient of `p = (r² p)/r²` is invariant along the
/// dilatation field.
pub fn radial_residuals(p: &CharPoly) -> Vec<MultiPoly> {
    let n = p.nvars();
    match p.divisor() {
        None => p.coeffs().iter().map(|c| c.euler(n)).collect(),
        Some(d) => p
            .coeffs()
            .iter()
            .map(|c| &c.euler(n) * d - c * &d.euler(n))
            .collect(),
    }
}

/// Default tolerance for root isolation.
pub const DEFAULT_ROOT_TOL: f64 = 1e-12;

/// An isolated eigenfunction value at a point.
#[derive(Clone, Debug, PartialEq)]
pub struct RootApprox {
    /// Approximate value.
    pub value: Complex64,
    /// Isolating rational interval for real roots (width below the
    /// tolerance).
    pub interval: Option<(Q, Q)>,
    /// Exact multiplicity.
    pub multiplicity: usize,
    /// True when another distinct root lies within the tolerance.
    pub clustered: bool,
}

fn tol_q(tol: f64) -> Result<Q> {
    if !(tol > 0.0) || tol < 1e-100 {
        return Err(Error::Precision(format!("tolerance {tol} is not in (1e-100, ∞)")));
    }
    let k = (-tol.log2()).ceil().max(1.0) as usize;
    Ok(Q::new(num_bigint::BigInt::one(), num_bigint::BigInt::one() << k))
}

/// Roots of a univariate polynomial, real ones isolated exactly by Sturm
/// sequences and refined below `tol`, complex ones by the Aberth iteration.
pub fn isolate_roots(p: &UPoly, tol: f64) -> Result<Vec<RootApprox>> {
    let t = tol_q(tol)?;
    let mut out: Vec<RootApprox> = Vec::new();
    for (f, mult) in p.squarefree() {
        let real = f.real_roots(&t);
        let nreal = real.len();
        for ((lo, hi), _) in real {
            let mid = crate::number::q_to_f64(&((&lo + &hi) / q(2)));
            out.push(RootApprox {
                value: Complex64::new(mid, 0.0),
                interval: Some((lo, hi)),
                multiplicity: mult,
                clustered: false,
            });
        }
        let deg = f.degree().unwrap_or(0);
        if deg > nreal {
            let mut cr = f.complex_roots();
            cr.sort_by(|a, b| b.im.abs().partial_cmp(&a.im.abs()).unwrap_or(std::cmp::Ordering::Equal));
            for z in cr.into_iter().take(deg - nreal) {
                out.push(RootApprox { value: z, interval: None, multiplicity: mult, clustered: false });
            }
        }
    }
    out.sort_by(|a, b| {
        (a.value.im != 0.0, a.value.re, a.value.im)
            .partial_cmp(&(b.value.im != 0.0, b.value.re, b.value.im))
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let vals: Vec<Complex64> = out.iter().map(|r| r.value).collect();
    for (i, r) in out.iter_mut().enumerate() {
        r.clustered = vals.iter().enumerate().any(|(j, v)| j != i && (v - r.value).norm() < tol);
    }
    Ok(out)
}

/// Eigenfunction values of `L` at a rational point `x`.
pub fn eigenfunctions_at(p: &CharPoly, x: &[Q], tol: f64) -> Result<Vec<RootApprox>> {
    let up = p.eval_at(x)?;
    if up.is_zero() {
        return Err(Error::Domain("characteristic polynomial vanishes identically at this point".into()));
    }
    isolate_roots(&up, tol)
}

/// Constant eigenfunction `λ` with the multiplicity of its eigenspace.
#[derive(Clone, Debug, PartialEq)]
pub struct ConstantEigenvalue {
    /// Eigenvalue of the parameter matrix.
    pub lambda: Surd,
    /// Dimension of the constant eigenspace of `L`.
    pub multiplicity: usize,
}

/// Real repeated eigenvalues of `a` with eigenspace dimension `m ≥ 2`,
/// reported with multiplicity `m - 1`.
pub fn repeated_real_eigenspaces(a: &QMat) -> Result<Vec<ConstantEigenvalue>> {
    let n = a.nrows();
    if n == 0 {
        return Ok(vec![]);
    }
    let b = a.charpoly();
    let repeated = b.gcd(&b.derivative());
    if repeated.degree().unwrap_or(0) == 0 {
        return Ok(vec![]);
    }
    let mut out = Vec::new();
    for root in exact_roots(&repeated)? {
        if !root.value.is_real() {
            continue;
        }
        let lam = root.value.clone();
        let s = a.to_surd();
        let shift: Mat<Surd> = &s - &Mat::<Surd>::identity(n).scale(&lam);
        let r1 = shift.rank();
        let r2 = (&shift * &shift).rank();
        if r1 - r2 > 1 {
            return Err(Error::NotOrthogonal(format!(
                "eigenvalue {} has several proper generalized eigenvectors",
                lam.render()
            )));
        }
        let m = n - r1;
        if m >= 2 {
            out.push(ConstantEigenvalue { lambda: lam, multiplicity: m - 1 });
        }
    }
    out.sort_by(|a, b| a.lambda.cmp_real(&b.lambda));
    Ok(out)
}

/// Constant eigenfunctions of a flat non-degenerate tensor.
pub fn constant_eigenfunctions(l: &ConcircularTensor) -> Result<Vec<ConstantEigenvalue>> {
    if !l.m().is_zero() {
        // Central: the translation by w/m needs no signature restriction.
        let v: Vec<Q> = l.w().iter().map(|c| c / l.m()).collect();
        return repeated_real_eigenspaces(l.translated(&v).a());
    }
    let cls = canonicalize(l)?;
    match cls.variant {
        Variant::Central | Variant::AxialNonNull | Variant::AxialNull => {
            let (_, ac, _) = cls.complement()?;
            repeated_real_eigenspaces(&ac)
        }
        other => Err(Error::Unsupported(format!(
            "constant eigenfunctions need a non-degenerate tensor, got {}",
            other.label()
        ))),
    }
}

/// Constant eigenfunctions of a spherical tensor.
pub fn constant_eigenfunctions_spherical(s: &SphericalCT) -> Result<Vec<ConstantEigenvalue>> {
    if s.is_trivial() {
        return Err(Error::Trivial);
    }
    repeated_real_eigenspaces(s.a())
}

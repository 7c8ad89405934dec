//! Canonical coordinate charts of irreducible concircular tensors.
//!
//! A chart maps the eigenfunction values `u = (u¹, …)` to Cartesian points
//! `x` at which the characteristic polynomial factors as `Π (z − u^i)`.
//! Every chart has the uniform shape
//!
//! * diagonal coordinates: `(x^i)² = σ p(λ_i) / (g_ii B′(λ_i))`,
//! * Jordan block coordinates: `Σ_{i=1}^{l+1} x^i x^{l+2−i} = σ ε T_l`
//!   where `T_l` is the `l`-th Taylor coefficient of `p / (B/B_J)` at the
//!   block eigenvalue,
//! * the axial coordinate `x¹ = (ε/2)(Σ u − tr A_c)`,
//!
//! with `p = Π (z − u^i)`, `B` the characteristic polynomial of the
//! (complement) parameter matrix and `σ = −1` (central), `−ε` (axial) or
//! `1/κ` (spherical). The diagonal metric is `g_ii = −(σ/4) p′(u^i)/B(u^i)`.

use std::cmp::Ordering;

use num_traits::{One, Signed, Zero};

use crate::charpoly::{
    axial_block, charpoly_axial, charpoly_central, charpoly_spherical, detect_layout, CharPoly, LayoutBlock,
};
use crate::ct::{ConcircularTensor, SphericalCT};
use crate::error::{Error, Result};
use crate::linalg::Space;
use crate::number::{fmt_q, q, q_from_f64, q_to_f64, Q};
use crate::poly::{MultiPoly, UPoly};

/// Family of an irreducible concircular tensor.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IctKind {
    /// `A + r⊗r` on flat space.
    Central,
    /// Non-null axial `A + e_1⊙r` with index one.
    Axial,
    /// `R A R*` on a hyperquadric.
    Spherical,
}

impl IctKind {
    /// Stable lowercase label.
    pub fn label(&self) -> &'static str {
        match self {
            IctKind::Central => "central",
            IctKind::Axial => "axial",
            IctKind::Spherical => "spherical",
        }
    }
}

/// Canonical data of an irreducible concircular tensor in block form.
#[derive(Clone, Debug, PartialEq)]
pub struct IctData {
    kind: IctKind,
    space: Space,
    sign_eps: i32,
    kappa: Option<Q>,
    blocks: Vec<LayoutBlock>,
    charpoly: CharPoly,
    b: UPoly,
}

fn check_distinct(blocks: &[LayoutBlock]) -> Result<()> {
    for (i, a) in blocks.iter().enumerate() {
        for b in &blocks[i + 1..] {
            if a.lambda == b.lambda {
                return Err(Error::Precondition(format!(
                    "eigenvalue {} is repeated, so the tensor has a constant eigenfunction",
                    fmt_q(&a.lambda)
                )));
            }
        }
    }
    Ok(())
}

fn block_poly(blocks: &[LayoutBlock]) -> UPoly {
    blocks.iter().fold(UPoly::constant(Q::one()), |acc, b| {
        let mut f = acc;
        for _ in 0..b.size {
            f = f * UPoly::linear_root(&b.lambda);
        }
        f
    })
}

impl IctData {
    /// Central tensor `A + r⊗r` with `A` in canonical block form and
    /// pairwise distinct block eigenvalues.
    pub fn central(l: &ConcircularTensor) -> Result<Self> {
        if !l.m().is_one() || l.w().iter().any(|c| !c.is_zero()) {
            return Err(Error::Precondition("central canonical form needs w = 0 and m = 1".into()));
        }
        let layout = detect_layout(l.space(), l.a(), 0)?;
        check_distinct(&layout.blocks)?;
        let charpoly = charpoly_central(l.space(), l.a())?;
        Ok(IctData {
            kind: IctKind::Central,
            space: l.space().clone(),
            sign_eps: 1,
            kappa: None,
            b: block_poly(&layout.blocks),
            blocks: layout.blocks,
            charpoly,
        })
    }

    /// Non-null axial tensor with `w = e_1`, `m = 0`, leading block of size
    /// one and complement in canonical block form.
    pub fn axial(l: &ConcircularTensor) -> Result<Self> {
        let (k, eps) = axial_block(l)?;
        if k != 1 {
            return Err(Error::Unsupported(format!("axial charts need index 1, got {k}")));
        }
        let layout = detect_layout(l.space(), l.a(), 1)?;
        check_distinct(&layout.blocks)?;
        let charpoly = charpoly_axial(l)?;
        Ok(IctData {
            kind: IctKind::Axial,
            space: l.space().clone(),
            sign_eps: if eps.is_positive() { 1 } else { -1 },
            kappa: None,
            b: block_poly(&layout.blocks),
            blocks: layout.blocks,
            charpoly,
        })
    }

    /// Spherical tensor with `A` in canonical block form and pairwise
    /// distinct block eigenvalues.
    pub fn spherical(s: &SphericalCT) -> Result<Self> {
        if s.is_trivial() {
            return Err(Error::Trivial);
        }
        let layout = detect_layout(s.space(), s.a(), 0)?;
        check_distinct(&layout.blocks)?;
        let charpoly = charpoly_spherical(s)?;
        Ok(IctData {
            kind: IctKind::Spherical,
            space: s.space().clone(),
            sign_eps: 1,
            kappa: Some(s.kappa().clone()),
            b: block_poly(&layout.blocks),
            blocks: layout.blocks,
            charpoly,
        })
    }

    /// Family.
    pub fn kind(&self) -> IctKind {
        self.kind
    }

    /// Ambient space.
    pub fn space(&self) -> &Space {
        &self.space
    }

    /// Sign `ε` of the tensor (1 for central and spherical).
    pub fn sign_eps(&self) -> i32 {
        self.sign_eps
    }

    /// Curvature (spherical only).
    pub fn kappa(&self) -> Option<&Q> {
        self.kappa.as_ref()
    }

    /// Blocks of the parameter matrix (of `A_c` for axial tensors).
    pub fn blocks(&self) -> &[LayoutBlock] {
        &self.blocks
    }

    /// Diagonal eigenvalues `λ_i` with their metric entries `g_ii`.
    pub fn diagonal(&self) -> Vec<(Q, Q)> {
        self.blocks.iter().filter(|b| b.size == 1).map(|b| (b.lambda.clone(), b.metric.clone())).collect()
    }

    /// Jordan-block descriptors `(k, λ, ε₀)`.
    pub fn jordan(&self) -> Vec<(usize, Q, Q)> {
        self.blocks
            .iter()
            .filter(|b| b.size > 1)
            .map(|b| (b.size, b.lambda.clone(), b.metric.clone()))
            .collect()
    }

    /// Characteristic polynomial.
    pub fn charpoly(&self) -> &CharPoly {
        &self.charpoly
    }

    /// `B(z)`, the characteristic polynomial of the (complement) parameter
    /// matrix.
    pub fn b(&self) -> &UPoly {
        &self.b
    }

    /// Number of canonical coordinates.
    pub fn num_coords(&self) -> usize {
        match self.kind {
            IctKind::Spherical => self.space.dim() - 1,
            _ => self.space.dim(),
        }
    }

    /// The factor `σ` of the uniform chart formulas.
    fn sigma(&self) -> Q {
        match self.kind {
            IctKind::Central => -Q::one(),
            IctKind::Axial => q(-self.sign_eps as i64),
            IctKind::Spherical => Q::one() / self.kappa.clone().expect("spherical data has a curvature"),
        }
    }

    fn is_definite(&self) -> bool {
        self.space.nu() == 0 && self.blocks.iter().all(|b| b.size == 1)
    }
}

/// One Cartesian coordinate `coeff · √(radicand of its group)`.
#[derive(Clone, Debug, PartialEq)]
pub struct SqrtCoord {
    /// Rational factor.
    pub coeff: Q,
    /// Index of the radical group.
    pub group: usize,
}

/// A chart value: coordinates are rational multiples of square roots of
/// nonnegative rationals. Coordinates sharing a radical form a sign group
/// that flips together.
#[derive(Clone, Debug, PartialEq)]
pub struct ChartPoint {
    /// Coordinates in Cartesian order.
    pub coords: Vec<SqrtCoord>,
    /// Radicand of every group.
    pub radicands: Vec<Q>,
    /// Whether the group carries a free sign.
    pub flippable: Vec<bool>,
}

impl ChartPoint {
    /// Floating-point coordinates.
    pub fn to_f64(&self) -> Vec<f64> {
        self.coords
            .iter()
            .map(|c| q_to_f64(&c.coeff) * q_to_f64(&self.radicands[c.group]).sqrt())
            .collect()
    }

    /// Exact squares `(x^i)²`.
    pub fn squares(&self) -> Vec<Q> {
        self.coords.iter().map(|c| c.coeff.clone() * &c.coeff * &self.radicands[c.group]).collect()
    }

    /// Rational coordinates when every radicand of a nonzero coordinate is
    /// a perfect square.
    pub fn to_rational(&self) -> Option<Vec<Q>> {
        self.coords
            .iter()
            .map(|c| {
                if c.coeff.is_zero() {
                    Some(Q::zero())
                } else {
                    crate::number::q_sqrt_exact(&self.radicands[c.group]).map(|s| s * &c.coeff)
                }
            })
            .collect()
    }

    /// Exact value of a polynomial in the coordinates, provided every
    /// monomial pairs up the radicals of each group.
    pub fn eval(&self, p: &MultiPoly) -> Result<Q> {
        let mut acc = Q::zero();
        for (e, c) in p.terms() {
            let mut val = c.clone();
            let mut per_group = vec![0u32; self.radicands.len()];
            for (i, &k) in e.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                let sc = &self.coords[i];
                val *= num_traits::pow(sc.coeff.clone(), k as usize);
                per_group[sc.group] += k;
            }
            if val.is_zero() {
                continue;
            }
            for (g, &k) in per_group.iter().enumerate() {
                if k % 2 == 1 && !self.radicands[g].is_one() {
                    return Err(Error::Internal("monomial with an unpaired radical".into()));
                }
                val *= num_traits::pow(self.radicands[g].clone(), (k / 2) as usize);
            }
            acc += val;
        }
        Ok(acc)
    }

    /// Number of free sign groups.
    pub fn sign_groups(&self) -> usize {
        self.flippable.iter().filter(|&&f| f).count()
    }

    /// The point with the free sign groups flipped according to `signs`.
    pub fn with_signs(&self, signs: &[bool]) -> Result<ChartPoint> {
        if signs.len() != self.sign_groups() {
            return Err(Error::DimensionMismatch(format!(
                "{} signs for {} sign groups",
                signs.len(),
                self.sign_groups()
            )));
        }
        let mut flip = vec![false; self.radicands.len()];
        let mut it = signs.iter();
        for (g, &f) in self.flippable.iter().enumerate() {
            if f {
                flip[g] = *it.next().expect("length checked");
            }
        }
        let mut out = self.clone();
        for c in &mut out.coords {
            if flip[c.group] {
                c.coeff = -c.coeff.clone();
            }
        }
        Ok(out)
    }

    /// All sign branches (`2^groups` points, the positive one first).
    pub fn all_branches(&self) -> Vec<ChartPoint> {
        let g = self.sign_groups();
        (0..1usize << g)
            .map(|mask| {
                let signs: Vec<bool> = (0..g).map(|i| mask >> i & 1 == 1).collect();
                self.with_signs(&signs).expect("length matches")
            })
            .collect()
    }
}

/// Sign branch selection.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub enum Branch {
    /// Every free sign positive.
    #[default]
    Positive,
    /// Flip flags per free sign group, in coordinate order.
    Signs(Vec<bool>),
}

/// `p(y + c)`.
fn taylor_shift(p: &UPoly, c: &Q) -> UPoly {
    let lin = UPoly::new(vec![c.clone(), Q::one()]);
    let mut acc = UPoly::zero();
    for co in p.coeffs().iter().rev() {
        acc = acc * lin.clone() + UPoly::constant(co.clone());
    }
    acc
}

/// Taylor coefficients `0..order` of `num/den` at `c`, with `den(c) ≠ 0`.
fn taylor_quotient(num: &UPoly, den: &UPoly, c: &Q, order: usize) -> Vec<Q> {
    let p = taylor_shift(num, c);
    let d = taylor_shift(den, c);
    let d0 = d.coeff(0);
    let mut t: Vec<Q> = Vec::with_capacity(order);
    for l in 0..order {
        let mut v = p.coeff(l);
        for j in 1..=l {
            v -= d.coeff(j) * &t[l - j];
        }
        t.push(v / &d0);
    }
    t
}

fn roots_poly(u: &[Q]) -> UPoly {
    u.iter().fold(UPoly::constant(Q::one()), |acc, r| acc * UPoly::linear_root(r))
}

fn check_u(data: &IctData, u: &[Q]) -> Result<()> {
    if u.len() != data.num_coords() {
        return Err(Error::DimensionMismatch(format!(
            "{} canonical coordinates for a chart with {}",
            u.len(),
            data.num_coords()
        )));
    }
    for i in 0..u.len() {
        for j in i + 1..u.len() {
            if u[i] == u[j] {
                return Err(Error::Domain(format!("u^{} = u^{} is not an ICT point", i + 1, j + 1)));
            }
        }
    }
    Ok(())
}

/// A canonical coordinate chart.
#[derive(Clone, Debug, PartialEq)]
pub struct Chart {
    data: IctData,
}

impl Chart {
    /// Chart of the given canonical data.
    pub fn new(data: IctData) -> Self {
        Chart { data }
    }

    /// Canonical data.
    pub fn data(&self) -> &IctData {
        &self.data
    }

    /// Number of canonical coordinates.
    pub fn num_coords(&self) -> usize {
        self.data.num_coords()
    }

    /// Domain constraints on `u` as readable inequalities.
    pub fn domain_constraints(&self) -> Vec<String> {
        let d = &self.data;
        let mut out = vec!["u^i pairwise distinct".to_string()];
        if d.is_definite() {
            out.push(interleaving_chain(d));
        }
        for (i, b) in d.blocks.iter().enumerate() {
            if b.size == 1 {
                out.push(format!("σ p(λ) / (g B′(λ)) ≥ 0 at λ = {} (block {})", fmt_q(&b.lambda), i + 1));
            } else {
                out.push(format!("σ ε T_0 > 0 for the Jordan block at λ = {} (block {})", fmt_q(&b.lambda), i + 1));
            }
        }
        out
    }

    /// Forward map `u ↦ x` on the selected sign branch.
    pub fn forward(&self, u: &[Q], branch: &Branch) -> Result<ChartPoint> {
        let d = &self.data;
        check_u(d, u)?;
        let n = d.space.dim();
        let p = roots_poly(u);
        let sigma = d.sigma();
        let bprime = d.b.derivative();
        let mut coords = vec![SqrtCoord { coeff: Q::zero(), group: 0 }; n];
        let mut radicands = Vec::new();
        let mut flippable = Vec::new();
        if d.kind == IctKind::Axial {
            let su = u.iter().fold(Q::zero(), |a, x| a + x);
            let tr = d.blocks.iter().fold(Q::zero(), |a, b| a + q(b.size as i64) * &b.lambda);
            coords[0] = SqrtCoord { coeff: q(d.sign_eps as i64) * (su - tr) / q(2), group: 0 };
            radicands.push(Q::one());
            flippable.push(false);
        }
        for (bi, blk) in d.blocks.iter().enumerate() {
            let g = radicands.len();
            if blk.size == 1 {
                let val = sigma.clone() * p.eval(&blk.lambda) / (blk.metric.clone() * bprime.eval(&blk.lambda));
                if val.is_negative() {
                    return Err(self.domain_error(bi, &val));
                }
                radicands.push(val);
                flippable.push(true);
                coords[blk.offset] = SqrtCoord { coeff: Q::one(), group: g };
            } else {
                let k = blk.size;
                let mut bj = UPoly::constant(Q::one());
                for _ in 0..k {
                    bj = bj * UPoly::linear_root(&blk.lambda);
                }
                let (rest, _) = d.b.div_rem(&bj);
                let t = taylor_quotient(&p, &rest, &blk.lambda, k);
                let s: Vec<Q> = t.iter().map(|v| sigma.clone() * &blk.metric * v).collect();
                let r = s[0].clone();
                if r.is_negative() {
                    return Err(self.domain_error(bi, &r));
                }
                if r.is_zero() {
                    return Err(Error::Domain(format!(
                        "chart-singular: x^1 = 0 in the Jordan block at λ = {}",
                        fmt_q(&blk.lambda)
                    )));
                }
                let mut qv = vec![Q::one()];
                for l in 1..k {
                    let mut acc = s[l].clone();
                    for i in 2..=l {
                        acc -= r.clone() * &qv[i - 1] * &qv[l + 1 - i];
                    }
                    qv.push(acc / (q(2) * &r));
                }
                for (j, c) in qv.into_iter().enumerate() {
                    coords[blk.offset + j] = SqrtCoord { coeff: c, group: g };
                }
                radicands.push(r);
                flippable.push(true);
            }
        }
        let point = ChartPoint { coords, radicands, flippable };
        match branch {
            Branch::Positive => Ok(point),
            Branch::Signs(s) => point.with_signs(s),
        }
    }

    fn domain_error(&self, block: usize, val: &Q) -> Error {
        let d = &self.data;
        let lam = fmt_q(&d.blocks[block].lambda);
        let hint = if d.is_definite() { format!("; violated chain {}", interleaving_chain(d)) } else { String::new() };
        Error::Domain(format!("squared coordinate {} < 0 at λ = {lam}{hint}", fmt_q(val)))
    }

    /// Exact diagonal metric `g(∂_{u^i}, ∂_{u^i})`.
    pub fn metric(&self, u: &[Q]) -> Result<Vec<Q>> {
        let d = &self.data;
        check_u(d, u)?;
        let p = roots_poly(u);
        let dp = p.derivative();
        let factor = -d.sigma() / q(4);
        u.iter()
            .enumerate()
            .map(|(i, ui)| {
                let bv = d.b.eval(ui);
                if bv.is_zero() {
                    return Err(Error::Domain(format!("u^{} coincides with an eigenvalue of A", i + 1)));
                }
                Ok(factor.clone() * dp.eval(ui) / bv)
            })
            .collect()
    }

    /// Certificate of the chart invariant: the characteristic polynomial
    /// at `x` (divided by `r²` for spherical tensors) is `Π (z − u^i)`.
    pub fn verify(&self, u: &[Q], x: &ChartPoint) -> Result<()> {
        let d = &self.data;
        let cp = &d.charpoly;
        let mut coeffs: Vec<Q> = cp.coeffs().iter().map(|c| x.eval(c)).collect::<Result<_>>()?;
        if let Some(div) = cp.divisor() {
            let dv = x.eval(div)?;
            let expect = Q::one() / d.kappa.clone().expect("spherical data has a curvature");
            if dv != expect {
                return Err(Error::Verification(format!(
                    "point is off the hyperquadric: r² = {} ≠ {}",
                    fmt_q(&dv),
                    fmt_q(&expect)
                )));
            }
            coeffs = coeffs.into_iter().map(|c| c / &dv).collect();
        }
        if UPoly::new(coeffs) != roots_poly(u) {
            return Err(Error::Verification("characteristic polynomial does not factor as Π (z − u^i)".into()));
        }
        Ok(())
    }

    /// Pullback `J(u)ᵀ g J(u)` with `J` the numerical Jacobian of the chart
    /// (fourth-order central differences at a step scaled to the distance
    /// from the nearest singular value).
    pub fn pullback_metric(&self, u: &[Q], branch: &Branch) -> Result<Vec<Vec<f64>>> {
        let d = &self.data;
        let nu = u.len();
        let n = d.space.dim();
        let mut singular: Vec<f64> = d.blocks.iter().map(|b| q_to_f64(&b.lambda)).collect();
        singular.extend(u.iter().map(q_to_f64));
        let mut jac = vec![vec![0.0f64; nu]; n];
        for j in 0..nu {
            let uj = q_to_f64(&u[j]);
            let dist = singular
                .iter()
                .filter(|s| (**s - uj).abs() > 0.0)
                .map(|s| (s - uj).abs())
                .fold(f64::INFINITY, f64::min)
                .min(1.0 + uj.abs());
            let h = q_from_f64(dist / 512.0, 1 << 40);
            if h.is_zero() {
                return Err(Error::Precision("finite-difference step underflow".into()));
            }
            let at = |c: i64| -> Result<Vec<f64>> {
                let mut v = u.to_vec();
                v[j] = v[j].clone() + h.clone() * q(c);
                Ok(self.forward(&v, branch)?.to_f64())
            };
            let (p2, p1, m1, m2) = (at(2)?, at(1)?, at(-1)?, at(-2)?);
            let hf = q_to_f64(&h);
            for i in 0..n {
                jac[i][j] = (-p2[i] + 8.0 * p1[i] - 8.0 * m1[i] + m2[i]) / (12.0 * hf);
            }
        }
        let g = d.space.metric();
        let gf: Vec<Vec<f64>> = (0..n).map(|r| (0..n).map(|c| q_to_f64(&g[(r, c)])).collect()).collect();
        let mut out = vec![vec![0.0; nu]; nu];
        for a in 0..nu {
            for b in 0..nu {
                let mut s = 0.0;
                for r in 0..n {
                    for c in 0..n {
                        s += jac[r][a] * gf[r][c] * jac[c][b];
                    }
                }
                out[a][b] = s;
            }
        }
        Ok(out)
    }
}

fn interleaving_chain(d: &IctData) -> String {
    let mut lams: Vec<Q> = d.blocks.iter().map(|b| b.lambda.clone()).collect();
    lams.sort();
    let nu = d.num_coords();
    let mut parts = Vec::new();
    match d.kind {
        IctKind::Axial => {
            // u^1 < λ_2 < u^2 < … < λ_n < u^n for ε = 1 (mirrored for ε = −1).
            for i in 0..nu {
                parts.push(format!("u^{}", i + 1));
                if i < lams.len() {
                    parts.push(fmt_q(&lams[i]));
                }
            }
        }
        _ => {
            for (i, l) in lams.iter().enumerate() {
                parts.push(fmt_q(l));
                if i < nu {
                    parts.push(format!("u^{}", i + 1));
                }
            }
        }
    }
    parts.join(" < ")
}

fn require(data: &IctData, kind: IctKind, jordan: Option<bool>) -> Result<()> {
    if data.kind != kind {
        return Err(Error::Precondition(format!("expected {} data, got {}", kind.label(), data.kind.label())));
    }
    let has_jordan = data.blocks.iter().any(|b| b.size > 1);
    match jordan {
        Some(true) if !has_jordan => Err(Error::Precondition("no Jordan block present".into())),
        Some(true) if data.blocks.iter().any(|b| b.size > 3) => {
            Err(Error::Unsupported("Jordan blocks of size above 3".into()))
        }
        Some(false) if has_jordan => Err(Error::Precondition("parameter matrix has a Jordan block".into())),
        _ => Ok(()),
    }
}

/// Chart of a central tensor with diagonal parameter matrix.
pub fn central_diag_chart(data: &IctData, u: &[Q], branch: &Branch) -> Result<ChartPoint> {
    require(data, IctKind::Central, Some(false))?;
    Chart::new(data.clone()).forward(u, branch)
}

/// Chart of a central tensor whose parameter matrix has Jordan blocks of
/// size at most three; `x¹ > 0` in each block on the positive branch.
pub fn central_jordan_chart(data: &IctData, u: &[Q], branch: &Branch) -> Result<ChartPoint> {
    require(data, IctKind::Central, Some(true))?;
    Chart::new(data.clone()).forward(u, branch)
}

/// Chart of a non-null axial tensor.
pub fn axial_chart(data: &IctData, u: &[Q], branch: &Branch) -> Result<ChartPoint> {
    require(data, IctKind::Axial, None)?;
    Chart::new(data.clone()).forward(u, branch)
}

/// Chart of a spherical tensor on `<x, x> = 1/κ`.
pub fn spherical_chart(data: &IctData, u: &[Q], branch: &Branch) -> Result<ChartPoint> {
    require(data, IctKind::Spherical, None)?;
    Chart::new(data.clone()).forward(u, branch)
}

/// Diagonal metric in canonical coordinates.
pub fn canonical_metric(data: &IctData, u: &[Q]) -> Result<Vec<Q>> {
    if data.blocks.iter().any(|b| b.size > 3) {
        return Err(Error::Unsupported("closed-form metric needs Jordan blocks of size at most 3".into()));
    }
    Chart::new(data.clone()).metric(u)
}

/// Reparameterizations of a single canonical coordinate by a circular or
/// hyperbolic function.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Reparam {
    /// `u = cos² t`.
    Cos2,
    /// `u = cosh² t`.
    Cosh2,
    /// `u = −sinh² t`.
    NegSinh2,
}

impl Reparam {
    /// `u(t)`.
    pub fn u_of(&self, t: f64) -> f64 {
        match self {
            Reparam::Cos2 => t.cos().powi(2),
            Reparam::Cosh2 => t.cosh().powi(2),
            Reparam::NegSinh2 => -t.sinh().powi(2),
        }
    }

    /// Function kind of the parameter.
    pub fn kind(&self) -> crate::trig::TrigKind {
        match self {
            Reparam::Cos2 => crate::trig::TrigKind::Circular,
            _ => crate::trig::TrigKind::Hyperbolic,
        }
    }

    /// `u` as a polynomial in the parameter's function symbols.
    pub fn symbolic(&self, ring: &crate::trig::TrigRing, prm: &crate::trig::TrigParam) -> MultiPoly {
        match self {
            Reparam::Cos2 | Reparam::Cosh2 => ring.var(prm.even).pow(2),
            Reparam::NegSinh2 => -ring.var(prm.odd).pow(2),
        }
    }
}

/// Squared diagonal coordinates `(x^i)²` as polynomials in `u` (diagonal
/// parameter matrices) together with the axial coordinate when present.
/// The result has one polynomial per Cartesian coordinate: the square for
/// diagonal slots and `x¹` itself for the axial slot.
pub fn symbolic_squares(data: &IctData) -> Result<Vec<MultiPoly>> {
    if data.blocks.iter().any(|b| b.size > 1) {
        return Err(Error::Unsupported("symbolic squares need a diagonal parameter matrix".into()));
    }
    let nu = data.num_coords();
    let n = data.space.dim();
    let sigma = data.sigma();
    let bprime = data.b.derivative();
    let mut out = vec![MultiPoly::zero(nu); n];
    if data.kind == IctKind::Axial {
        let tr = data.blocks.iter().fold(Q::zero(), |a, b| a + &b.lambda);
        let mut s = MultiPoly::constant(nu, -tr);
        for i in 0..nu {
            s = s + MultiPoly::var(nu, i);
        }
        out[0] = s.scale(&(q(data.sign_eps as i64) / q(2)));
    }
    for blk in &data.blocks {
        // p(λ) = Π_j (λ − u^j)
        let mut pl = MultiPoly::constant(nu, Q::one());
        for j in 0..nu {
            pl = &pl * &(MultiPoly::constant(nu, blk.lambda.clone()) - MultiPoly::var(nu, j));
        }
        let c = sigma.clone() / (blk.metric.clone() * bprime.eval(&blk.lambda));
        out[blk.offset] = pl.scale(&c);
    }
    Ok(out)
}

/// Eigenform `du = −(dp)|_{z=u} / p′(u)` of a simple root `u` of the
/// characteristic polynomial at `x`.
pub fn eigenform_at(p: &CharPoly, x: &[Q], u: f64) -> Result<Vec<f64>> {
    let n = p.nvars();
    if x.len() != n {
        return Err(Error::DimensionMismatch(format!("point of length {} for {} variables", x.len(), n)));
    }
    let xf: Vec<f64> = x.iter().map(q_to_f64).collect();
    let horner = |cs: &[f64]| cs.iter().rev().fold(0.0, |acc, c| acc * u + c);
    let vals: Vec<f64> = p.coeffs().iter().map(|c| c.eval_f64(&xf)).collect();
    let dz: Vec<f64> = vals.iter().enumerate().skip(1).map(|(l, c)| l as f64 * c).collect();
    let pz = horner(&dz);
    let scale = vals.iter().enumerate().map(|(l, c)| c.abs() * u.abs().powi(l as i32)).sum::<f64>().max(1.0);
    if pz.abs() <= 1e-9 * scale {
        return Err(Error::Domain("eigenfunction value is a multiple root".into()));
    }
    Ok((0..n)
        .map(|j| {
            let dj: Vec<f64> = p.coeffs().iter().map(|c| c.deriv(j).eval_f64(&xf)).collect();
            -horner(&dj) / pz
        })
        .collect())
}

/// Regions of a central tensor on `E²₁` separated by lightlike lines.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum MinkowskiRegion {
    /// `y¹ > e`, `y² < −e`.
    North,
    /// `y¹ > e`, `y² > e`.
    East,
    /// `y¹ < −e`, `y² > e`.
    South,
    /// `y¹ < −e`, `y² < −e`.
    West,
    /// `|y¹| < e`, `|y²| < e`.
    Center,
}

impl MinkowskiRegion {
    /// One-letter label.
    pub fn label(&self) -> &'static str {
        match self {
            MinkowskiRegion::North => "N",
            MinkowskiRegion::East => "E",
            MinkowskiRegion::South => "S",
            MinkowskiRegion::West => "W",
            MinkowskiRegion::Center => "C",
        }
    }
}

/// Order of the eigenfunction values relative to `λ₂ < λ₁`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum EigenChain {
    /// `u¹ < u² < λ₂ < λ₁`.
    Below,
    /// `λ₂ < λ₁ < u¹ < u²`.
    Above,
    /// `λ₂ < u¹ < u² < λ₁`.
    Between,
}

impl EigenChain {
    /// Readable chain.
    pub fn describe(&self) -> &'static str {
        match self {
            EigenChain::Below => "u1 < u2 < lambda2 < lambda1",
            EigenChain::Above => "lambda2 < lambda1 < u1 < u2",
            EigenChain::Between => "lambda2 < u1 < u2 < lambda1",
        }
    }

    /// Whether sorted values `u1 ≤ u2` satisfy the chain; `strict = false`
    /// admits equality with an eigenvalue (transition lines).
    pub fn holds(&self, u1: f64, u2: f64, l1: f64, l2: f64, strict: bool) -> bool {
        let lt = |a: f64, b: f64| if strict { a < b } else { a <= b };
        match self {
            EigenChain::Below => lt(u1, u2) && lt(u2, l2),
            EigenChain::Above => lt(l1, u1) && lt(u1, u2),
            EigenChain::Between => lt(l2, u1) && lt(u1, u2) && lt(u2, l1),
        }
    }
}

/// One row of the region table.
#[derive(Clone, Debug, PartialEq)]
pub struct RegionEntry {
    /// Region.
    pub region: MinkowskiRegion,
    /// Inequalities on the null coordinates.
    pub constraint: &'static str,
    /// Eigenvalue chain valid in the region.
    pub chain: EigenChain,
}

/// Region table of a central tensor `A + r⊗r` on `E²₁` with
/// `g = diag(−1, 1)` in coordinates `(t, x)` and `A = diag(λ₁, λ₂)`.
/// Null coordinates are `y¹ = t − x`, `y² = t + x`, with threshold
/// `e = √(λ₁ − λ₂)`.
#[derive(Clone, Debug, PartialEq)]
pub struct MinkowskiDomains {
    /// Timelike eigenvalue `λ₁`.
    pub lambda1: Q,
    /// Spacelike eigenvalue `λ₂`.
    pub lambda2: Q,
    /// `e² = λ₁ − λ₂`.
    pub e2: Q,
    /// The five regions.
    pub regions: Vec<RegionEntry>,
}

impl MinkowskiDomains {
    /// Null coordinates of `(t, x)`.
    pub fn null_coords(t: &Q, x: &Q) -> (Q, Q) {
        (t.clone() - x, t.clone() + x)
    }

    /// Region containing `(t, x)`; `None` on the separating lines and in
    /// the parts where the eigenvalues are complex.
    pub fn locate(&self, t: &Q, x: &Q) -> Option<MinkowskiRegion> {
        let (y1, y2) = Self::null_coords(t, x);
        let side = |y: &Q| -> Option<Ordering> {
            match (y.clone() * y).cmp(&self.e2) {
                Ordering::Equal => None,
                Ordering::Less => Some(Ordering::Equal),
                Ordering::Greater => Some(if y.is_positive() { Ordering::Greater } else { Ordering::Less }),
            }
        };
        use Ordering::*;
        match (side(&y1)?, side(&y2)?) {
            (Greater, Less) => Some(MinkowskiRegion::North),
            (Greater, Greater) => Some(MinkowskiRegion::East),
            (Less, Greater) => Some(MinkowskiRegion::South),
            (Less, Less) => Some(MinkowskiRegion::West),
            (Equal, Equal) => Some(MinkowskiRegion::Center),
            _ => None,
        }
    }

    /// Table entry of a region.
    pub fn entry(&self, r: MinkowskiRegion) -> &RegionEntry {
        self.regions.iter().find(|e| e.region == r).expect("all five regions are tabulated")
    }
}

/// Region table of a canonical central tensor on `E²₁`.
pub fn minkowski_2d_domains(l: &ConcircularTensor) -> Result<MinkowskiDomains> {
    let sp = l.space();
    if sp.dim() != 2 || sp.nu() != 1 {
        return Err(Error::Unsupported("region tables exist only for E²₁".into()));
    }
    if !l.m().is_one() || l.w().iter().any(|c| !c.is_zero()) {
        return Err(Error::Precondition("central canonical form needs w = 0 and m = 1".into()));
    }
    let g = sp.metric();
    let a = l.a();
    if g[(0, 0)] != q(-1) || g[(1, 1)] != q(1) || !g[(0, 1)].is_zero() {
        return Err(Error::Precondition("metric must be diag(−1, 1) in (t, x)".into()));
    }
    if !a[(0, 1)].is_zero() || !a[(1, 0)].is_zero() {
        return Err(Error::Unsupported(
            "no Benenti region table: parameter matrix is not diagonal (complex or repeated spectrum)".into(),
        ));
    }
    let (l1, l2) = (a[(0, 0)].clone(), a[(1, 1)].clone());
    if l1 <= l2 {
        return Err(Error::Unsupported("no Benenti region table: the table needs λ₁ > λ₂".into()));
    }
    let row = |region, constraint, chain| RegionEntry { region, constraint, chain };
    Ok(MinkowskiDomains {
        e2: l1.clone() - &l2,
        lambda1: l1,
        lambda2: l2,
        regions: vec![
            row(MinkowskiRegion::North, "y1 > e, y2 < -e", EigenChain::Above),
            row(MinkowskiRegion::East, "y1 > e, y2 > e", EigenChain::Below),
            row(MinkowskiRegion::South, "y1 < -e, y2 > e", EigenChain::Above),
            row(MinkowskiRegion::West, "y1 < -e, y2 < -e", EigenChain::Below),
            row(MinkowskiRegion::Center, "|y1| < e, |y2| < e", EigenChain::Between),
        ],
    })
}

/// Convenience wrapper for flat tensors: picks the central or axial data.
pub fn ict_data(l: &ConcircularTensor) -> Result<IctData> {
    if l.m().is_zero() {
        IctData::axial(l)
    } else {
        IctData::central(l)
    }
}

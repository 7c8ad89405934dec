//! Potentials given as finite sums of polynomial multiples of products of
//! integer powers of polynomial factors.
//!
//! `V(x) = Σ_t P_t(x) Π_j f_j(x)^{e_{t,j}}` with a shared table of factors
//! `f_j` and integer exponents. Inverse-square terms `<x, a>^{-2}` use a
//! linear factor, and `1/r²` uses the quadratic factor `<x, x>`. The
//! representation is closed under differentiation, affine substitution
//! and multiplication by polynomials.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Space;
use crate::matrix::QMat;
use crate::number::{q, q_to_f64, Q};
use crate::poly::MultiPoly;

/// One term `P(x) Π f_j^{e_j}`.
#[derive(Clone, Debug, PartialEq)]
pub struct PotentialTerm {
    /// Polynomial multiplier.
    pub poly: MultiPoly,
    /// Exponent of each shared factor.
    pub exps: Vec<i32>,
}

/// Potential on `R^n`, in Cartesian coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct Potential {
    nvars: usize,
    factors: Vec<MultiPoly>,
    terms: Vec<PotentialTerm>,
}

/// Exact partial derivatives up to second order.
#[derive(Clone, Debug, PartialEq)]
pub struct PotentialDerivatives {
    /// `∂_i V`.
    pub gradient: Vec<Potential>,
    /// `∂_i ∂_j V`, symmetric.
    pub hessian: Vec<Vec<Potential>>,
}

impl Potential {
    /// The zero potential.
    pub fn zero(nvars: usize) -> Self {
        Potential { nvars, factors: vec![], terms: vec![] }
    }

    /// Polynomial potential.
    pub fn polynomial(p: MultiPoly) -> Self {
        let mut out = Potential { nvars: p.nvars(), factors: vec![], terms: vec![PotentialTerm { poly: p, exps: vec![] }] };
        out.simplify();
        out
    }

    /// Constant potential.
    pub fn constant(nvars: usize, c: Q) -> Self {
        Self::polynomial(MultiPoly::constant(nvars, c))
    }

    /// `c Π <x, a_j>^{e_j}` with the coordinate pairing `<x, a> = Σ x_i a_i`.
    pub fn linear_product(nvars: usize, c: Q, factors: &[(Vec<Q>, i32)]) -> Result<Self> {
        let mut out = Potential { nvars, factors: vec![], terms: vec![] };
        let mut exps = Vec::new();
        for (a, e) in factors {
            if a.len() != nvars {
                return Err(Error::DimensionMismatch(format!("factor of length {} in {nvars} variables", a.len())));
            }
            if a.iter().all(Zero::is_zero) {
                return Err(Error::Precondition("factor vectors must be nonzero".into()));
            }
            let idx = out.factor_index(MultiPoly::affine(a, &Q::zero()));
            if exps.len() <= idx {
                exps.resize(idx + 1, 0);
            }
            exps[idx] += *e;
        }
        exps.resize(out.factors.len(), 0);
        out.terms.push(PotentialTerm { poly: MultiPoly::constant(nvars, c), exps });
        out.simplify();
        Ok(out)
    }

    /// `c f^e` for a single polynomial factor.
    pub fn power(f: MultiPoly, e: i32, c: Q) -> Self {
        let nvars = f.nvars();
        let mut out = Potential { nvars, factors: vec![f], terms: vec![] };
        out.terms.push(PotentialTerm { poly: MultiPoly::constant(nvars, c), exps: vec![e] });
        out.simplify();
        out
    }

    /// `(g(x, x))^e` for the metric of `sp`.
    pub fn quadratic_power(sp: &Space, e: i32, c: Q) -> Self {
        Self::power(quadratic_form(sp.metric()), e, c)
    }

    /// Number of variables.
    pub fn nvars(&self) -> usize {
        self.nvars
    }

    /// Factor table.
    pub fn factors(&self) -> &[MultiPoly] {
        &self.factors
    }

    /// Terms.
    pub fn terms(&self) -> &[PotentialTerm] {
        &self.terms
    }

    /// True when no terms remain after simplification. A potential can
    /// vanish identically without being reported as zero here; use
    /// [`Potential::numerator`] for an exact test.
    pub fn is_trivially_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn factor_index(&mut self, f: MultiPoly) -> usize {
        if let Some(i) = self.factors.iter().position(|g| *g == f) {
            return i;
        }
        self.factors.push(f);
        for t in &mut self.terms {
            t.exps.push(0);
        }
        self.factors.len() - 1
    }

    /// Merges terms with equal exponents, drops zero terms and unused
    /// factors, and absorbs nonnegative powers of constant factors.
    fn simplify(&mut self) {
        let mut merged: BTreeMap<Vec<i32>, MultiPoly> = BTreeMap::new();
        for t in self.terms.drain(..) {
            let mut poly = t.poly;
            let mut exps = t.exps;
            for (j, e) in exps.iter_mut().enumerate() {
                if let Some(c) = constant_value(&self.factors[j]) {
                    if *e != 0 && !c.is_zero() {
                        let k = if *e > 0 { pow_q(&c, *e as u32) } else { Q::one() / pow_q(&c, (-*e) as u32) };
                        poly = poly.scale(&k);
                        *e = 0;
                    }
                }
            }
            let slot = merged.entry(exps).or_insert_with(|| MultiPoly::zero(self.nvars));
            *slot = slot.clone() + poly;
        }
        let used: Vec<bool> = (0..self.factors.len())
            .map(|j| merged.iter().any(|(e, p)| !p.is_zero() && e[j] != 0))
            .collect();
        let keep: Vec<usize> = (0..self.factors.len()).filter(|&j| used[j]).collect();
        self.factors = keep.iter().map(|&j| self.factors[j].clone()).collect();
        self.terms = merged
            .into_iter()
            .filter(|(_, p)| !p.is_zero())
            .map(|(e, p)| PotentialTerm { poly: p, exps: keep.iter().map(|&j| e[j]).collect() })
            .collect();
    }

    fn check_nvars(&self, other: &Potential) -> Result<()> {
        if self.nvars != other.nvars {
            return Err(Error::DimensionMismatch(format!("{} vs {} variables", self.nvars, other.nvars)));
        }
        Ok(())
    }

    /// Sum of two potentials.
    pub fn add(&self, other: &Potential) -> Result<Potential> {
        self.check_nvars(other)?;
        let mut out = self.clone();
        for t in &other.terms {
            let mut exps = vec![0; out.factors.len()];
            for (j, e) in t.exps.iter().enumerate() {
                if *e == 0 {
                    continue;
                }
                let idx = out.factor_index(other.factors[j].clone());
                if exps.len() <= idx {
                    exps.resize(idx + 1, 0);
                }
                exps[idx] += *e;
            }
            exps.resize(out.factors.len(), 0);
            out.terms.push(PotentialTerm { poly: t.poly.clone(), exps });
        }
        out.simplify();
        Ok(out)
    }

    /// Product of two potentials.
    pub fn mul(&self, other: &Potential) -> Result<Potential> {
        self.check_nvars(other)?;
        let mut out = Potential { nvars: self.nvars, factors: self.factors.clone(), terms: vec![] };
        let map: Vec<usize> = other.factors.iter().map(|f| out.factor_index(f.clone())).collect();
        let nf = out.factors.len();
        for s in &self.terms {
            for t in &other.terms {
                let mut exps = s.exps.clone();
                exps.resize(nf, 0);
                for (j, e) in t.exps.iter().enumerate() {
                    exps[map[j]] += *e;
                }
                out.terms.push(PotentialTerm { poly: &s.poly * &t.poly, exps });
            }
        }
        out.simplify();
        Ok(out)
    }

    /// Multiplication by a polynomial.
    pub fn mul_poly(&self, p: &MultiPoly) -> Potential {
        let mut out = self.clone();
        for t in &mut out.terms {
            t.poly = &t.poly * p;
        }
        out.simplify();
        out
    }

    /// Multiplication by a rational constant.
    pub fn scale(&self, c: &Q) -> Potential {
        self.mul_poly(&MultiPoly::constant(self.nvars, c.clone()))
    }

    /// Exact partial derivative `∂V/∂x_i`.
    pub fn partial(&self, i: usize) -> Potential {
        let mut out = Potential { nvars: self.nvars, factors: self.factors.clone(), terms: vec![] };
        let dfs: Vec<MultiPoly> = self.factors.iter().map(|f| f.deriv(i)).collect();
        for t in &self.terms {
            let dp = t.poly.deriv(i);
            if !dp.is_zero() {
                out.terms.push(PotentialTerm { poly: dp, exps: t.exps.clone() });
            }
            for (j, e) in t.exps.iter().enumerate() {
                if *e == 0 || dfs[j].is_zero() {
                    continue;
                }
                let mut exps = t.exps.clone();
                exps[j] -= 1;
                let poly = (&t.poly * &dfs[j]).scale(&q(*e as i64));
                out.terms.push(PotentialTerm { poly, exps });
            }
        }
        out.simplify();
        out
    }

    /// Exact first and second partial derivatives.
    pub fn derivatives(&self) -> PotentialDerivatives {
        let gradient: Vec<Potential> = (0..self.nvars).map(|i| self.partial(i)).collect();
        let hessian = gradient.iter().map(|g| (0..self.nvars).map(|j| g.partial(j)).collect()).collect();
        PotentialDerivatives { gradient, hessian }
    }

    /// Exact value; a pole gives a Domain error.
    pub fn eval(&self, x: &[Q]) -> Result<Q> {
        if x.len() != self.nvars {
            return Err(Error::DimensionMismatch(format!("point of length {} for {} variables", x.len(), self.nvars)));
        }
        let fv: Vec<Q> = self.factors.iter().map(|f| f.eval(x)).collect();
        let mut s = Q::zero();
        for t in &self.terms {
            let mut v = t.poly.eval(x);
            if v.is_zero() {
                continue;
            }
            for (j, e) in t.exps.iter().enumerate() {
                if *e == 0 {
                    continue;
                }
                if fv[j].is_zero() {
                    if *e < 0 {
                        return Err(Error::Domain("pole of the potential".into()));
                    }
                    v = Q::zero();
                    break;
                }
                v *= if *e > 0 { pow_q(&fv[j], *e as u32) } else { Q::one() / pow_q(&fv[j], (-*e) as u32) };
            }
            s += v;
        }
        Ok(s)
    }

    /// Floating-point value.
    pub fn eval_f64(&self, x: &[f64]) -> f64 {
        let fv: Vec<f64> = self.factors.iter().map(|f| f.eval_f64(x)).collect();
        self.terms
            .iter()
            .map(|t| t.exps.iter().enumerate().fold(t.poly.eval_f64(x), |acc, (j, e)| acc * fv[j].powi(*e)))
            .sum()
    }

    /// Substitutes polynomials for the variables: `V(s_1(y), …, s_n(y))`.
    pub fn compose(&self, subs: &[MultiPoly]) -> Result<Potential> {
        if subs.len() != self.nvars {
            return Err(Error::DimensionMismatch(format!("{} substitutions for {} variables", subs.len(), self.nvars)));
        }
        let target = subs.first().map_or(0, |s| s.nvars());
        let mut out = Potential {
            nvars: target,
            factors: self.factors.iter().map(|f| f.compose(subs)).collect(),
            terms: self
                .terms
                .iter()
                .map(|t| PotentialTerm { poly: t.poly.compose(subs), exps: t.exps.clone() })
                .collect(),
        };
        // Identical factors may appear after substitution.
        let mut dedup = Potential { nvars: target, factors: vec![], terms: vec![] };
        let map: Vec<usize> = out.factors.clone().into_iter().map(|f| dedup.factor_index(f)).collect();
        let nf = dedup.factors.len();
        for t in out.terms.drain(..) {
            let mut exps = vec![0; nf];
            for (j, e) in t.exps.iter().enumerate() {
                exps[map[j]] += *e;
            }
            dedup.terms.push(PotentialTerm { poly: t.poly, exps });
        }
        for f in &dedup.factors {
            if f.is_zero() {
                return Err(Error::Domain("a factor vanishes identically on the image".into()));
            }
        }
        dedup.simplify();
        Ok(dedup)
    }

    /// `V(x − v)`: the pushforward under the translation `x ↦ x + v`.
    pub fn translated(&self, v: &[Q]) -> Result<Potential> {
        let n = self.nvars;
        let subs: Vec<MultiPoly> = (0..n)
            .map(|i| MultiPoly::var(n, i) - MultiPoly::constant(n, v.get(i).cloned().unwrap_or_default()))
            .collect();
        self.compose(&subs)
    }

    /// Restriction to the affine subspace `x = origin + Σ y_j basis_j`.
    pub fn restricted(&self, origin: &[Q], basis: &[Vec<Q>]) -> Result<Potential> {
        let k = basis.len();
        let subs: Vec<MultiPoly> = (0..self.nvars)
            .map(|i| {
                let coeffs: Vec<Q> = basis.iter().map(|b| b[i].clone()).collect();
                MultiPoly::affine(&coeffs, &origin[i])
            })
            .collect();
        if k == 0 {
            return Err(Error::Precondition("restriction to a point".into()));
        }
        self.compose(&subs)
    }

    /// Total degree when every factor and multiplier is homogeneous and
    /// all terms share one degree; `None` otherwise. The zero potential
    /// reports degree zero.
    pub fn homogeneous_degree(&self) -> Option<i64> {
        let mut fdeg = Vec::with_capacity(self.factors.len());
        for f in &self.factors {
            fdeg.push(homogeneous_poly_degree(f)? as i64);
        }
        let mut deg: Option<i64> = None;
        for t in &self.terms {
            let d = homogeneous_poly_degree(&t.poly)? as i64
                + t.exps.iter().zip(&fdeg).map(|(e, d)| *e as i64 * d).sum::<i64>();
            match deg {
                None => deg = Some(d),
                Some(d0) if d0 != d => return None,
                _ => {}
            }
        }
        Some(deg.unwrap_or(0))
    }

    /// Numerator after clearing all negative powers: `V Π f_j^{-min_j}`.
    /// The potential is identically zero exactly when this polynomial is.
    pub fn numerator(&self) -> MultiPoly {
        let nf = self.factors.len();
        let mins: Vec<i32> =
            (0..nf).map(|j| self.terms.iter().map(|t| t.exps[j]).min().unwrap_or(0).min(0)).collect();
        let mut pows: Vec<Vec<MultiPoly>> = self.factors.iter().map(|f| vec![MultiPoly::constant(self.nvars, Q::one()), f.clone()]).collect();
        let mut out = MultiPoly::zero(self.nvars);
        for t in &self.terms {
            let mut p = t.poly.clone();
            for j in 0..nf {
                let k = (t.exps[j] - mins[j]) as usize;
                while pows[j].len() <= k {
                    let next = pows[j].last().unwrap() * &self.factors[j];
                    pows[j].push(next);
                }
                if k > 0 {
                    p = &p * &pows[j][k];
                }
            }
            out = out + p;
        }
        out
    }

    /// Human-readable rendering.
    pub fn render(&self) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let names: Vec<String> = (0..self.nvars).map(|i| format!("x{}", i + 1)).collect();
        let names: Vec<&str> = names.iter().map(String::as_str).collect();
        self.terms
            .iter()
            .map(|t| {
                let mut s = format!("({})", t.poly.render(&names));
                for (j, e) in t.exps.iter().enumerate() {
                    if *e != 0 {
                        s.push_str(&format!("*({})^{}", self.factors[j].render(&names), e));
                    }
                }
                s
            })
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

fn homogeneous_poly_degree(p: &MultiPoly) -> Option<u32> {
    let mut deg = None;
    for (e, _) in p.terms() {
        let d: u32 = e.iter().sum();
        match deg {
            None => deg = Some(d),
            Some(d0) if d0 != d => return None,
            _ => {}
        }
    }
    Some(deg.unwrap_or(0))
}

fn constant_value(p: &MultiPoly) -> Option<Q> {
    match p.total_degree() {
        None => Some(Q::zero()),
        Some(0) => Some(p.coeff(&vec![0; p.nvars()])),
        _ => None,
    }
}

fn pow_q(x: &Q, k: u32) -> Q {
    (0..k).fold(Q::one(), |acc, _| acc * x)
}

/// Quadratic form `x^T g x` as a polynomial.
pub fn quadratic_form(g: &QMat) -> MultiPoly {
    let n = g.nrows();
    let mut out = MultiPoly::zero(n);
    for i in 0..n {
        for j in 0..n {
            if !g[(i, j)].is_zero() {
                out = out + (&MultiPoly::var(n, i) * &MultiPoly::var(n, j)).scale(&g[(i, j)]);
            }
        }
    }
    out
}

/// Calogero-Moser potential with `ω = 0`:
/// `Σ_{i<j} g_ij / (m_i x_i − m_j x_j)²`, with unit masses and couplings
/// by default.
pub fn calogero_moser(n: usize, masses: Option<&[Q]>, couplings: Option<&[Q]>) -> Result<Potential> {
    if n < 2 {
        return Err(Error::Precondition("Calogero-Moser needs n ≥ 2".into()));
    }
    let ones = vec![Q::one(); n];
    let m = masses.unwrap_or(&ones);
    if m.len() != n || m.iter().any(Zero::is_zero) {
        return Err(Error::Precondition("one nonzero mass per particle is required".into()));
    }
    let npairs = n * (n - 1) / 2;
    let unit = vec![Q::one(); npairs];
    let g = couplings.unwrap_or(&unit);
    if g.len() != npairs {
        return Err(Error::DimensionMismatch(format!("{} couplings for {npairs} pairs", g.len())));
    }
    let mut v = Potential::zero(n);
    let mut idx = 0;
    for i in 0..n {
        for j in i + 1..n {
            let mut a = vec![Q::zero(); n];
            a[i] = m[i].clone();
            a[j] = -m[j].clone();
            v = v.add(&Potential::linear_product(n, g[idx].clone(), &[(a, -2)])?)?;
            idx += 1;
        }
    }
    Ok(v)
}

/// The translation-invariant direction `Σ e_i / m_i` of the (weighted)
/// Calogero-Moser potential, before normalization by `1/√M`.
pub fn calogero_moser_direction(n: usize, masses: Option<&[Q]>) -> Vec<Q> {
    match masses {
        Some(m) => m.iter().map(|mi| Q::one() / mi).collect(),
        None => vec![Q::one(); n],
    }
}

/// The normalization constant `M = Σ 1/m_i²`.
pub fn calogero_moser_m(masses: &[Q]) -> Q {
    masses.iter().map(|mi| Q::one() / (mi.clone() * mi)).sum()
}

/// Serializable form of a potential on `R^n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PotentialSpec {
    /// Number of variables.
    pub dim: usize,
    /// Terms.
    pub terms: Vec<PotentialTermSpec>,
}

/// Serializable term `coeff Π <x, a>^e · (g(x, x))^q`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PotentialTermSpec {
    /// Rational coefficient as `"p/q"`.
    pub coeff: String,
    /// Linear factors.
    #[serde(default)]
    pub factors: Vec<LinearFactorSpec>,
    /// Exponent of the metric quadratic form `g(x, x)`.
    #[serde(default)]
    pub radial_exponent: i32,
}

/// Serializable linear factor `<x, a>^exponent`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearFactorSpec {
    /// Vector `a` as rational strings.
    pub a: Vec<String>,
    /// Integer exponent, possibly negative.
    pub exponent: i32,
}

impl PotentialSpec {
    /// Builds the potential; `sp` supplies the metric for radial factors.
    pub fn build(&self, sp: &Space) -> Result<Potential> {
        if sp.dim() != self.dim {
            return Err(Error::DimensionMismatch(format!("potential in {} variables, space of dimension {}", self.dim, sp.dim())));
        }
        let mut v = Potential::zero(self.dim);
        for t in &self.terms {
            let c = parse_rational(&t.coeff)?;
            let mut fs = Vec::new();
            for f in &t.factors {
                let a = f
                    .a
                    .iter()
                    .map(|s| parse_rational(s))
                    .collect::<Result<Vec<Q>>>()?;
                fs.push((a, f.exponent));
            }
            let mut term = Potential::linear_product(self.dim, c, &fs)?;
            if t.radial_exponent != 0 {
                term = term.mul(&Potential::quadratic_power(sp, t.radial_exponent, Q::one()))?;
            }
            v = v.add(&term)?;
        }
        Ok(v)
    }
}

fn parse_rational(s: &str) -> Result<Q> {
    crate::number::parse_q(s).ok_or_else(|| Error::Schema(format!("invalid rational {s:?}")))
}

/// Central finite-difference gradient, for checks against exact partials.
pub fn numeric_gradient(v: &Potential, x: &[Q], h: f64) -> Vec<f64> {
    let xf: Vec<f64> = x.iter().map(q_to_f64).collect();
    (0..xf.len())
        .map(|i| {
            let mut p = xf.clone();
            let mut m = xf.clone();
            p[i] += h;
            m[i] -= h;
            (v.eval_f64(&p) - v.eval_f64(&m)) / (2.0 * h)
        })
        .collect()
}

//! Univariate polynomials over the rationals and sparse multivariate
//! polynomials.
//!
//! [`UPoly`] carries the exact eigenvalue machinery (square-free
//! decomposition, rational and quadratic factor extraction, Sturm based real
//! root isolation). [`MultiPoly`] stores characteristic polynomial
//! coefficients and cleared-denominator residuals as exponent-vector maps.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::number::{fmt_q, q, q_to_f64, squarefree_split, Q, Surd};

/// Dense univariate polynomial with rational coefficients, lowest degree
/// first. The zero polynomial has no coefficients.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct UPoly {
    coeffs: Vec<Q>,
}

impl fmt::Debug for UPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render("z"))
    }
}

impl UPoly {
    /// Builds a polynomial from coefficients, lowest degree first.
    pub fn new(mut coeffs: Vec<Q>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        UPoly { coeffs }
    }

    /// The zero polynomial.
    pub fn zero() -> Self {
        UPoly { coeffs: vec![] }
    }

    /// A constant polynomial.
    pub fn constant(c: Q) -> Self {
        Self::new(vec![c])
    }

    /// The monomial `z`.
    pub fn z() -> Self {
        Self::new(vec![Q::zero(), Q::one()])
    }

    /// `z - r`.
    pub fn linear_root(r: &Q) -> Self {
        Self::new(vec![-r.clone(), Q::one()])
    }

    /// Coefficients, lowest degree first.
    pub fn coeffs(&self) -> &[Q] {
        &self.coeffs
    }

    /// Coefficient of `z^i` (zero beyond the degree).
    pub fn coeff(&self, i: usize) -> Q {
        self.coeffs.get(i).cloned().unwrap_or_else(Q::zero)
    }

    /// Degree, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        if self.coeffs.is_empty() {
            None
        } else {
            Some(self.coeffs.len() - 1)
        }
    }

    /// True for the zero polynomial.
    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Leading coefficient (zero for the zero polynomial).
    pub fn lead(&self) -> Q {
        self.coeffs.last().cloned().unwrap_or_else(Q::zero)
    }

    /// Multiplies every coefficient by `c`.
    pub fn scale(&self, c: &Q) -> Self {
        Self::new(self.coeffs.iter().map(|x| x * c).collect())
    }

    /// Monic associate (zero stays zero).
    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let l = self.lead();
        self.scale(&(Q::one() / l))
    }

    /// Formal derivative.
    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * q(i as i64))
                .collect(),
        )
    }

    /// Exact evaluation.
    pub fn eval(&self, x: &Q) -> Q {
        let mut acc = Q::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    /// Evaluation at an algebraic point.
    pub fn eval_surd(&self, x: &Surd) -> Surd {
        let mut acc = Surd::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x.clone() + Surd::from_q(c.clone());
        }
        acc
    }

    /// Floating point evaluation at a complex point.
    pub fn eval_c64(&self, x: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for c in self.coeffs.iter().rev() {
            acc = acc * x + q_to_f64(c);
        }
        acc
    }

    /// Euclidean division, `self = quot * d + rem`.
    pub fn div_rem(&self, d: &UPoly) -> (UPoly, UPoly) {
        assert!(!d.is_zero(), "division by the zero polynomial");
        let dd = d.degree().unwrap();
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return (UPoly::zero(), self.clone());
        }
        let mut quot = vec![Q::zero(); rem.len() - dd];
        let lead = d.lead();
        for i in (dd..rem.len()).rev() {
            let c = &rem[i] / &lead;
            if c.is_zero() {
                continue;
            }
            for (j, dc) in d.coeffs.iter().enumerate() {
                rem[i - dd + j] -= &c * dc;
            }
            quot[i - dd] = c;
        }
        rem.truncate(dd);
        (UPoly::new(quot), UPoly::new(rem))
    }

    /// Monic greatest common divisor.
    pub fn gcd(&self, other: &UPoly) -> UPoly {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Exact quotient; panics when the division is not exact.
    pub fn exact_div(&self, d: &UPoly) -> UPoly {
        let (qq, r) = self.div_rem(d);
        assert!(r.is_zero(), "inexact polynomial division");
        qq
    }

    /// Integer multiple with coprime integer coefficients and positive leading
    /// coefficient.
    pub fn primitive_integer(&self) -> Vec<BigInt> {
        if self.is_zero() {
            return vec![];
        }
        let l = crate::number::lcm_denoms(self.coeffs.iter());
        let ints: Vec<BigInt> = self
            .coeffs
            .iter()
            .map(|c| (c * Q::from_integer(l.clone())).to_integer())
            .collect();
        let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
        let sign = if ints.last().unwrap().is_negative() { -1 } else { 1 };
        ints.iter().map(|x| x / &g * sign).collect()
    }

    /// Yun square-free decomposition of the monic associate:
    /// `self = lead * prod f_i^i`. Returns `(f_i, i)` for nonconstant factors.
    pub fn squarefree(&self) -> Vec<(UPoly, usize)> {
        let mut out = Vec::new();
        if self.degree().unwrap_or(0) == 0 {
            return out;
        }
        let f = self.monic();
        let fp = f.derivative();
        let a = f.gcd(&fp);
        let mut b = f.exact_div(&a);
        let mut c = fp.exact_div(&a);
        let mut d = c - b.derivative();
        let mut i = 1;
        loop {
            let g = b.gcd(&d);
            if g.degree().unwrap_or(0) > 0 {
                out.push((g.clone(), i));
            }
            b = b.exact_div(&g);
            if b.degree().unwrap_or(0) == 0 {
                break;
            }
            c = d.exact_div(&g);
            d = c - b.derivative();
            i += 1;
        }
        out
    }

    /// Numerical complex roots by the Aberth iteration.
    pub fn complex_roots(&self) -> Vec<Complex64> {
        let deg = match self.degree() {
            None | Some(0) => return vec![],
            Some(d) => d,
        };
        let m = self.monic();
        let c: Vec<f64> = m.coeffs.iter().map(q_to_f64).collect();
        if deg == 1 {
            return vec![Complex64::new(-c[0], 0.0)];
        }
        let bound = 1.0
            + c[..deg]
                .iter()
                .fold(0.0f64, |acc, x| acc.max(x.abs()));
        let mut z: Vec<Complex64> = (0..deg)
            .map(|k| {
                let theta = 2.0 * std::f64::consts::PI * (k as f64) / (deg as f64) + 0.4;
                Complex64::from_polar(0.5 * bound, theta)
            })
            .collect();
        let dm = m.derivative();
        for _ in 0..500 {
            let mut max_step: f64 = 0.0;
            for i in 0..deg {
                let pz = m.eval_c64(z[i]);
                let dz = dm.eval_c64(z[i]);
                if pz.norm() == 0.0 {
                    continue;
                }
                let ratio = pz / dz;
                let mut s = Complex64::new(0.0, 0.0);
                for j in 0..deg {
                    if j != i {
                        let diff = z[i] - z[j];
                        if diff.norm() > 0.0 {
                            s += Complex64::new(1.0, 0.0) / diff;
                        }
                    }
                }
                let step = ratio / (Complex64::new(1.0, 0.0) - ratio * s);
                if step.is_finite() {
                    z[i] -= step;
                    max_step = max_step.max(step.norm() / (1.0 + z[i].norm()));
                }
            }
            if max_step < 1e-16 {
                break;
            }
        }
        z
    }

    /// Sturm sequence of a square-free polynomial.
    fn sturm_chain(&self) -> Vec<UPoly> {
        let mut chain = vec![self.clone(), self.derivative()];
        loop {
            let n = chain.len();
            if chain[n - 1].is_zero() {
                chain.pop();
                break;
            }
            let (_, r) = chain[n - 2].div_rem(&chain[n - 1]);
            if r.is_zero() {
                break;
            }
            chain.push(-r);
        }
        chain
    }

    fn sign_changes(chain: &[UPoly], x: &Q) -> usize {
        let mut last = 0i32;
        let mut count = 0;
        for p in chain {
            let v = p.eval(x);
            let s = if v.is_zero() {
                0
            } else if v.is_positive() {
                1
            } else {
                -1
            };
            if s != 0 {
                if last != 0 && s != last {
                    count += 1;
                }
                last = s;
            }
        }
        count
    }

    /// Cauchy bound on the modulus of the roots.
    pub fn root_bound(&self) -> Q {
        let m = self.monic();
        let d = m.degree().unwrap_or(0);
        let mut b = Q::zero();
        for c in &m.coeffs[..d] {
            if c.abs() > b {
                b = c.abs();
            }
        }
        b + Q::one()
    }

    /// Isolates and refines the real roots of a polynomial.
    ///
    /// Returns `(interval, multiplicity)` with each interval of width at most
    /// `tol`. Multiplicities are exact, from the square-free decomposition.
    pub fn real_roots(&self, tol: &Q) -> Vec<((Q, Q), usize)> {
        let mut out = Vec::new();
        for (f, mult) in self.squarefree() {
            for iv in f.isolate_squarefree(tol) {
                out.push((iv, mult));
            }
        }
        out.sort_by(|a, b| a.0 .0.cmp(&b.0 .0));
        out
    }

    fn isolate_squarefree(&self, tol: &Q) -> Vec<(Q, Q)> {
        let chain = self.sturm_chain();
        let bound = self.root_bound();
        let mut stack = vec![(-bound.clone(), bound)];
        let mut isolated = Vec::new();
        while let Some((a, b)) = stack.pop() {
            let count = Self::sign_changes(&chain, &a) - Self::sign_changes(&chain, &b);
            if count == 0 {
                continue;
            }
            if count == 1 {
                isolated.push((a, b));
                continue;
            }
            // Split at a point that is not itself a root so every interval
            // endpoint stays off the zero set.
            let deg = self.degree().unwrap_or(1) as i64;
            let mut mid = (&a + &b) / q(2);
            let mut j = 1;
            while self.eval(&mid).is_zero() {
                mid = &a + (&b - &a) * Q::new(BigInt::from(j), BigInt::from(deg + 2));
                j += 1;
            }
            stack.push((a, mid.clone()));
            stack.push((mid, b));
        }
        let mut refined = Vec::new();
        for (mut a, mut b) in isolated {
            if a == b {
                refined.push((a, b));
                continue;
            }
            // (a, b] contains exactly one root; bisect on sign.
            let mut fa = self.eval(&a);
            if fa.is_zero() {
                refined.push((a.clone(), a));
                continue;
            }
            while &b - &a > *tol {
                let mid = (&a + &b) / q(2);
                let fm = self.eval(&mid);
                if fm.is_zero() {
                    a = mid.clone();
                    b = mid;
                    break;
                }
                if fm.is_positive() == fa.is_positive() {
                    a = mid;
                    fa = fm;
                } else {
                    b = mid;
                }
            }
            refined.push((a, b));
        }
        refined.sort_by(|x, y| x.0.cmp(&y.0));
        refined
    }

    /// Human readable rendering in the variable `var`.
    pub fn render(&self, var: &str) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut parts = Vec::new();
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let mono = match i {
                0 => String::new(),
                1 => var.to_string(),
                _ => format!("{}^{}", var, i),
            };
            if mono.is_empty() {
                parts.push(fmt_q(c));
            } else if c.is_one() {
                parts.push(mono);
            } else if (-c.clone()).is_one() {
                parts.push(format!("-{}", mono));
            } else {
                parts.push(format!("{}*{}", fmt_q(c), mono));
            }
        }
        parts.join(" + ").replace("+ -", "- ")
    }
}

impl Add for UPoly {
    type Output = UPoly;
    fn add(self, rhs: UPoly) -> UPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        UPoly::new((0..n).map(|i| self.coeff(i) + rhs.coeff(i)).collect())
    }
}

impl Sub for UPoly {
    type Output = UPoly;
    fn sub(self, rhs: UPoly) -> UPoly {
        self + (-rhs)
    }
}

impl Neg for UPoly {
    type Output = UPoly;
    fn neg(self) -> UPoly {
        UPoly::new(self.coeffs.into_iter().map(|c| -c).collect())
    }
}

impl Mul for UPoly {
    type Output = UPoly;
    fn mul(self, rhs: UPoly) -> UPoly {
        if self.is_zero() || rhs.is_zero() {
            return UPoly::zero();
        }
        let mut out = vec![Q::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        UPoly::new(out)
    }
}

/// Exact root of a rational polynomial together with its multiplicity.
#[derive(Clone, Debug, PartialEq)]
pub struct ExactRoot {
    /// The root, an element of `Q` or of a quadratic field.
    pub value: Surd,
    /// Algebraic multiplicity.
    pub multiplicity: usize,
}

/// Failure to express every root of a polynomial in a quadratic field.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("irreducible factor of degree {degree} has no rational or quadratic roots: {factor}")]
pub struct HigherDegreeFactor {
    /// Degree of the offending factor.
    pub degree: usize,
    /// Rendering of the factor.
    pub factor: String,
}

fn divisors(n: &BigInt) -> Option<Vec<BigInt>> {
    let n = n.abs();
    if n.is_zero() {
        return None;
    }
    let limit = BigInt::from(1u64 << 24);
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = BigInt::one();
    while &d * &d <= n {
        if d > limit {
            return None;
        }
        if (&n % &d).is_zero() {
            small.push(d.clone());
            let other = &n / &d;
            if other != d {
                large.push(other);
            }
        }
        d += 1;
    }
    large.reverse();
    small.extend(large);
    Some(small)
}

/// Finds all roots of `p` exactly, requiring every irreducible factor over the
/// rationals to have degree at most two.
pub fn exact_roots(p: &UPoly) -> Result<Vec<ExactRoot>, HigherDegreeFactor> {
    let mut out = Vec::new();
    for (factor, mult) in p.squarefree() {
        let mut rest = factor.clone();
        // Rational roots: p/q with q dividing the leading coefficient.
        let approx = rest.complex_roots();
        let ints = rest.primitive_integer();
        let lc = ints.last().cloned().unwrap_or_else(BigInt::one);
        let dens = divisors(&lc).unwrap_or_else(|| vec![BigInt::one()]);
        for z in &approx {
            if z.im.abs() > 1e-6 * (1.0 + z.re.abs()) {
                continue;
            }
            for d in &dens {
                let df = d.to_f64().unwrap_or(1.0);
                let num = (z.re * df).round();
                if !num.is_finite() {
                    continue;
                }
                let cand = Q::new(BigInt::from(num as i128), d.clone());
                if rest.degree().unwrap_or(0) >= 1 && rest.eval(&cand).is_zero() {
                    rest = rest.exact_div(&UPoly::linear_root(&cand));
                    out.push(ExactRoot {
                        value: Surd::from_q(cand),
                        multiplicity: mult,
                    });
                    break;
                }
            }
        }
        // Quadratic factors over the integers.
        while rest.degree().unwrap_or(0) > 2 {
            let approx = rest.complex_roots();
            let ints = rest.primitive_integer();
            let lc = ints.last().cloned().unwrap();
            let dens = divisors(&lc).unwrap_or_else(|| vec![BigInt::one()]);
            let mut found = None;
            'search: for i in 0..approx.len() {
                for j in (i + 1)..approx.len() {
                    let s = approx[i] + approx[j];
                    let pr = approx[i] * approx[j];
                    if s.im.abs() > 1e-6 * (1.0 + s.re.abs()) || pr.im.abs() > 1e-6 * (1.0 + pr.re.abs()) {
                        continue;
                    }
                    for d in &dens {
                        let df = d.to_f64().unwrap_or(1.0);
                        let c1 = (-s.re * df).round();
                        let c0 = (pr.re * df).round();
                        let cand = UPoly::new(vec![
                            Q::from_integer(BigInt::from(c0 as i128)),
                            Q::from_integer(BigInt::from(c1 as i128)),
                            Q::from_integer(d.clone()),
                        ]);
                        let (_, r) = rest.div_rem(&cand);
                        if r.is_zero() {
                            found = Some(cand);
                            break 'search;
                        }
                    }
                }
            }
            match found {
                Some(fq) => {
                    out.extend(quadratic_roots(&fq, mult)?);
                    rest = rest.exact_div(&fq);
                }
                None => {
                    return Err(HigherDegreeFactor {
                        degree: rest.degree().unwrap(),
                        factor: rest.render("z"),
                    })
                }
            }
        }
        match rest.degree().unwrap_or(0) {
            0 => {}
            1 => {
                let r = -rest.coeff(0) / rest.coeff(1);
                out.push(ExactRoot {
                    value: Surd::from_q(r),
                    multiplicity: mult,
                });
            }
            2 => out.extend(quadratic_roots(&rest, mult)?),
            _ => unreachable!(),
        }
    }
    Ok(out)
}

fn quadratic_roots(f: &UPoly, mult: usize) -> Result<Vec<ExactRoot>, HigherDegreeFactor> {
    let a = f.coeff(2);
    let b = f.coeff(1);
    let c = f.coeff(0);
    let disc = &b * &b - q(4) * &a * &c;
    let two_a = q(2) * &a;
    let make_err = || HigherDegreeFactor {
        degree: 2,
        factor: f.render("z"),
    };
    let nd = disc.numer() * disc.denom();
    let (s, d) = squarefree_split(&nd).ok_or_else(make_err)?;
    let d = d.to_i64().ok_or_else(make_err)?;
    let s = Q::new(s, disc.denom().clone());
    let re = -&b / &two_a;
    let im = s / &two_a;
    if d == 1 {
        return Ok(vec![
            ExactRoot { value: Surd::from_q(&re - &im), multiplicity: mult },
            ExactRoot { value: Surd::from_q(&re + &im), multiplicity: mult },
        ]);
    }
    Ok(vec![
        ExactRoot { value: Surd::quad(re.clone(), -im.clone(), d), multiplicity: mult },
        ExactRoot { value: Surd::quad(re, im, d), multiplicity: mult },
    ])
}

/// Exponent vector of a monomial.
pub type Monomial = Vec<u32>;

/// Sparse multivariate polynomial with rational coefficients in a fixed
/// number of variables.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct MultiPoly {
    nvars: usize,
    terms: BTreeMap<Monomial, Q>,
}

impl fmt::Debug for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render(&[]))
    }
}

impl MultiPoly {
    /// The zero polynomial in `nvars` variables.
    pub fn zero(nvars: usize) -> Self {
        MultiPoly { nvars, terms: BTreeMap::new() }
    }

    /// A constant.
    pub fn constant(nvars: usize, c: Q) -> Self {
        let mut p = Self::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(vec![0; nvars], c);
        }
        p
    }

    /// The variable with index `i`.
    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        let mut p = Self::zero(nvars);
        p.terms.insert(e, Q::one());
        p
    }

    /// A single term `c * x^e`.
    pub fn monomial(nvars: usize, e: Monomial, c: Q) -> Self {
        assert_eq!(e.len(), nvars);
        let mut p = Self::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(e, c);
        }
        p
    }

    /// Linear form `sum a_i x_i + c`.
    pub fn affine(a: &[Q], c: &Q) -> Self {
        let n = a.len();
        let mut p = Self::constant(n, c.clone());
        for (i, ai) in a.iter().enumerate() {
            p = p + Self::var(n, i).scale(ai);
        }
        p
    }

    /// Number of variables.
    pub fn nvars(&self) -> usize {
        self.nvars
    }

    /// True for the zero polynomial.
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in canonical order.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Q)> {
        self.terms.iter()
    }

    /// Number of nonzero terms.
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    /// True when there are no terms.
    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Coefficient of a monomial.
    pub fn coeff(&self, e: &[u32]) -> Q {
        self.terms.get(e).cloned().unwrap_or_else(Q::zero)
    }

    /// Total degree, `None` for zero.
    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    /// Degree in one variable.
    pub fn degree_in(&self, v: usize) -> u32 {
        self.terms.keys().map(|e| e[v]).max().unwrap_or(0)
    }

    fn add_term(&mut self, e: Monomial, c: Q) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(e.clone()).or_insert_with(Q::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&e);
        }
    }

    /// Multiplies by a rational.
    pub fn scale(&self, c: &Q) -> Self {
        if c.is_zero() {
            return Self::zero(self.nvars);
        }
        MultiPoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, v)| (e.clone(), v * c)).collect(),
        }
    }

    /// Partial derivative in variable `v`.
    pub fn deriv(&self, v: usize) -> Self {
        let mut out = Self::zero(self.nvars);
        for (e, c) in &self.terms {
            if e[v] > 0 {
                let mut e2 = e.clone();
                e2[v] -= 1;
                out.add_term(e2, c * q(e[v] as i64));
            }
        }
        out
    }

    /// Integer power.
    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::constant(self.nvars, Q::one());
        for _ in 0..k {
            acc = acc * self.clone();
        }
        acc
    }

    /// Exact evaluation at a rational point.
    pub fn eval(&self, x: &[Q]) -> Q {
        assert_eq!(x.len(), self.nvars);
        let mut acc = Q::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (xi, &k) in x.iter().zip(e) {
                for _ in 0..k {
                    t *= xi;
                }
            }
            acc += t;
        }
        acc
    }

    /// Exact evaluation at an algebraic point.
    pub fn eval_surd(&self, x: &[Surd]) -> Surd {
        assert_eq!(x.len(), self.nvars);
        let mut acc = Surd::zero();
        for (e, c) in &self.terms {
            let mut t = Surd::from_q(c.clone());
            for (xi, &k) in x.iter().zip(e) {
                for _ in 0..k {
                    t = t * xi.clone();
                }
            }
            acc = acc + t;
        }
        acc
    }

    /// Floating point evaluation.
    pub fn eval_f64(&self, x: &[f64]) -> f64 {
        let mut acc = 0.0;
        for (e, c) in &self.terms {
            let mut t = q_to_f64(c);
            for (xi, &k) in x.iter().zip(e) {
                t *= xi.powi(k as i32);
            }
            acc += t;
        }
        acc
    }

    /// Splits by powers of variable `v`: returns `c_k` (with `v` removed from
    /// the variable list) such that `self = sum_k c_k v^k`.
    pub fn split_by_var(&self, v: usize) -> Vec<MultiPoly> {
        let deg = self.degree_in(v) as usize;
        let mut out = vec![MultiPoly::zero(self.nvars - 1); deg + 1];
        for (e, c) in &self.terms {
            let mut e2 = e.clone();
            let k = e2.remove(v) as usize;
            out[k].add_term(e2, c.clone());
        }
        if self.is_zero() {
            out.clear();
        }
        out
    }

    /// Adds trailing variables so that the polynomial lives in `nvars`
    /// variables.
    pub fn extend_vars(&self, nvars: usize) -> Self {
        assert!(nvars >= self.nvars);
        MultiPoly {
            nvars,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| {
                    let mut e2 = e.clone();
                    e2.resize(nvars, 0);
                    (e2, c.clone())
                })
                .collect(),
        }
    }

    /// Substitutes polynomials for every variable.
    pub fn compose(&self, subs: &[MultiPoly]) -> Self {
        assert_eq!(subs.len(), self.nvars);
        let target = subs.first().map(|s| s.nvars).unwrap_or(0);
        let mut out = MultiPoly::zero(target);
        let mut cache: Vec<Vec<MultiPoly>> = subs
            .iter()
            .map(|s| vec![MultiPoly::constant(target, Q::one()), s.clone()])
            .collect();
        for (e, c) in &self.terms {
            let mut t = MultiPoly::constant(target, c.clone());
            for (i, &k) in e.iter().enumerate() {
                while cache[i].len() <= k as usize {
                    let next = cache[i].last().unwrap().clone() * subs[i].clone();
                    cache[i].push(next);
                }
                t = t * cache[i][k as usize].clone();
            }
            out = out + t;
        }
        out
    }

    /// Directional derivative along the Euler field `sum x_i d/dx_i` for the
    /// first `nx` variables.
    pub fn euler(&self, nx: usize) -> Self {
        let mut out = Self::zero(self.nvars);
        for (e, c) in &self.terms {
            let deg: u32 = e[..nx].iter().sum();
            out.add_term(e.clone(), c * q(deg as i64));
        }
        out
    }

    /// Multiplies by a common denominator so all coefficients are integers
    /// with gcd one and the leading term positive.
    pub fn primitive(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let l = crate::number::lcm_denoms(self.terms.values());
        let ints: Vec<BigInt> = self
            .terms
            .values()
            .map(|c| (c * Q::from_integer(l.clone())).to_integer())
            .collect();
        let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
        let sign = if self.terms.values().next_back().unwrap().is_negative() {
            -Q::one()
        } else {
            Q::one()
        };
        self.scale(&(Q::from_integer(l) / Q::from_integer(g) * sign))
    }

    /// Rendering with the given variable names (defaults `x1, x2, ...`).
    pub fn render(&self, names: &[&str]) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let name = |i: usize| -> String {
            names
                .get(i)
                .map(|s| s.to_string())
                .unwrap_or_else(|| format!("x{}", i + 1))
        };
        let mut parts = Vec::new();
        for (e, c) in self.terms.iter().rev() {
            let mono: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &k)| k > 0)
                .map(|(i, &k)| {
                    if k == 1 {
                        name(i)
                    } else {
                        format!("{}^{}", name(i), k)
                    }
                })
                .collect();
            let mono = mono.join("*");
            if mono.is_empty() {
                parts.push(fmt_q(c));
            } else if c.is_one() {
                parts.push(mono);
            } else if (-c.clone()).is_one() {
                parts.push(format!("-{}", mono));
            } else {
                parts.push(format!("{}*{}", fmt_q(c), mono));
            }
        }
        parts.join(" + ").replace("+ -", "- ")
    }

    /// Exact quotient `self / d`, or `None` when `d` does not divide `self`.
    ///
    /// Uses the lexicographic order of exponent vectors, which is a monomial
    /// order, so a single divisor already forms a Gröbner basis.
    pub fn div_exact(&self, d: &MultiPoly) -> Option<MultiPoly> {
        assert_eq!(self.nvars, d.nvars, "variable count mismatch");
        let (ld, cd) = d.terms.iter().next_back()?;
        let mut rem = self.clone();
        let mut quot = MultiPoly::zero(self.nvars);
        while let Some((lr, cr)) = rem.terms.iter().next_back() {
            if lr.iter().zip(ld).any(|(a, b)| a < b) {
                return None;
            }
            let e: Monomial = lr.iter().zip(ld).map(|(a, b)| a - b).collect();
            let t = MultiPoly::monomial(self.nvars, e, cr / cd);
            rem = rem - &t * d;
            quot = quot + t;
        }
        Some(quot)
    }

    /// Evaluates variable `v` at `c`, keeping the variable slot (now absent).
    pub fn subst_const(&self, v: usize, c: &Q) -> Self {
        let mut out = Self::zero(self.nvars);
        for (e, coef) in &self.terms {
            let mut e2 = e.clone();
            let k = e2[v];
            e2[v] = 0;
            let mut t = coef.clone();
            for _ in 0..k {
                t *= c;
            }
            out.add_term(e2, t);
        }
        out
    }

    /// Monomials with coefficients as `(exponents, "p/q")` pairs.
    pub fn to_pairs(&self) -> Vec<(Vec<u32>, String)> {
        self.terms.iter().map(|(e, c)| (e.clone(), fmt_q(c))).collect()
    }

    /// Inverse of [`MultiPoly::to_pairs`].
    pub fn from_pairs(nvars: usize, pairs: &[(Vec<u32>, Q)]) -> Self {
        let mut p = Self::zero(nvars);
        for (e, c) in pairs {
            p.add_term(e.clone(), c.clone());
        }
        p
    }
}

impl Add for MultiPoly {
    type Output = MultiPoly;
    fn add(mut self, rhs: MultiPoly) -> MultiPoly {
        assert_eq!(self.nvars, rhs.nvars, "variable count mismatch");
        for (e, c) in rhs.terms {
            self.add_term(e, c);
        }
        self
    }
}

impl Sub for MultiPoly {
    type Output = MultiPoly;
    fn sub(self, rhs: MultiPoly) -> MultiPoly {
        self + (-rhs)
    }
}

impl Neg for MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        MultiPoly {
            nvars: self.nvars,
            terms: self.terms.into_iter().map(|(e, c)| (e, -c)).collect(),
        }
    }
}

impl Mul for MultiPoly {
    type Output = MultiPoly;
    fn mul(self, rhs: MultiPoly) -> MultiPoly {
        assert_eq!(self.nvars, rhs.nvars, "variable count mismatch");
        let mut out = MultiPoly::zero(self.nvars);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                let e: Monomial = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.add_term(e, ca * cb);
            }
        }
        out
    }
}

impl<'a> Mul<&'a MultiPoly> for &'a MultiPoly {
    type Output = MultiPoly;
    fn mul(self, rhs: &MultiPoly) -> MultiPoly {
        self.clone() * rhs.clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::number::qf;

    fn up(c: &[i64]) -> UPoly {
        UPoly::new(c.iter().map(|&x| q(x)).collect())
    }

    #[test]
    fn division_and_gcd() {
        let a = up(&[-1, 0, 1]); // z^2 - 1
        let b = up(&[1, 1]); // z + 1
        let (qq, r) = a.div_rem(&b);
        assert_eq!(qq, up(&[-1, 1]));
        assert!(r.is_zero());
        assert_eq!(a.gcd(&up(&[1, 2, 1])), up(&[1, 1]));
    }

    #[test]
    fn yun_decomposition() {
        // (z-1)^2 (z+2)^3 z
        let p = up(&[-1, 1]) * up(&[-1, 1]) * up(&[2, 1]).clone() * up(&[2, 1]) * up(&[2, 1]) * up(&[0, 1]);
        let sf = p.squarefree();
        let mut degs: Vec<(usize, usize)> = sf.iter().map(|(f, m)| (f.degree().unwrap(), *m)).collect();
        degs.sort();
        assert_eq!(degs, vec![(1, 1), (1, 2), (1, 3)]);
    }

    #[test]
    fn exact_rational_and_quadratic_roots() {
        // (3z - 1)(z^2 + 1)(z^2 - 2)
        let p = up(&[-1, 3]) * up(&[1, 0, 1]) * up(&[-2, 0, 1]);
        let roots = exact_roots(&p).unwrap();
        assert_eq!(roots.len(), 5);
        assert!(roots.iter().any(|r| r.value == Surd::from_q(qf(1, 3))));
        assert!(roots.iter().any(|r| r.value == Surd::i()));
        assert!(roots.iter().any(|r| r.value == -Surd::sqrt2()));
    }

    #[test]
    fn cubic_irreducible_rejected() {
        let p = up(&[-2, 0, 0, 1]);
        assert!(exact_roots(&p).is_err());
    }

    #[test]
    fn sturm_isolation() {
        // (z - 1/4)(z - 4)(z + 1)
        let p = up(&[-1, 4]) * up(&[-4, 1]) * up(&[1, 1]);
        let roots = p.real_roots(&qf(1, 1 << 30));
        assert_eq!(roots.len(), 3);
        let mids: Vec<f64> = roots.iter().map(|((a, b), _)| q_to_f64(&((a + b) / q(2)))).collect();
        assert!((mids[0] + 1.0).abs() < 1e-8);
        assert!((mids[1] - 0.25).abs() < 1e-8);
        assert!((mids[2] - 4.0).abs() < 1e-8);
    }

    #[test]
    fn multipoly_basics() {
        let x = MultiPoly::var(2, 0);
        let y = MultiPoly::var(2, 1);
        let p = (x.clone() + y.clone()) * (x.clone() - y.clone());
        assert_eq!(p, x.clone() * x.clone() - y.clone() * y.clone());
        assert_eq!(p.deriv(0), x.scale(&q(2)));
        assert_eq!(p.eval(&[q(3), q(2)]), q(5));
        let parts = p.split_by_var(1);
        assert_eq!(parts.len(), 3);
        assert_eq!(parts[2], MultiPoly::constant(1, q(-1)));
        assert_eq!(p.euler(2), p.scale(&q(2)));
    }
}

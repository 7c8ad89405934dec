//! Exact scalars: rationals and elements of multi-quadratic extensions of the
//! rationals.
//!
//! Every eigenvalue this crate handles lives in `Q(sqrt d)` for a squarefree
//! integer `d`. Change-of-basis matrices between complex and real canonical
//! frames also pick up `sqrt 2`. A [`Surd`] is a finite sum of rational
//! multiples of square roots of squarefree integers; negative radicands stand
//! for `i*sqrt|d|`. Sums, products and inverses stay inside the
//! representation.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Exact rational number.
pub type Q = BigRational;

/// Rational from an integer.
pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

/// Rational `p / d`.
pub fn qf(p: i64, d: i64) -> Q {
    Q::new(BigInt::from(p), BigInt::from(d))
}

/// Parses `"p/q"`, `"p"` or a decimal literal such as `"-0.25"` into a rational.
pub fn parse_q(s: &str) -> Option<Q> {
    let s = s.trim();
    if let Some((a, b)) = s.split_once('/') {
        let n: BigInt = a.trim().parse().ok()?;
        let d: BigInt = b.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(Q::new(n, d));
    }
    if let Some((ip, fp)) = s.split_once('.') {
        let neg = ip.starts_with('-');
        let ipn: BigInt = if ip == "-" || ip.is_empty() {
            BigInt::zero()
        } else {
            ip.parse().ok()?
        };
        if !fp.chars().all(|c| c.is_ascii_digit()) {
            return None;
        }
        let fpn: BigInt = if fp.is_empty() {
            BigInt::zero()
        } else {
            fp.parse().ok()?
        };
        let den = num_traits::pow(BigInt::from(10), fp.len());
        let frac = Q::new(fpn, den);
        let ip_q = Q::from_integer(ipn);
        return Some(if neg { ip_q - frac } else { ip_q + frac });
    }
    let n: BigInt = s.parse().ok()?;
    Some(Q::from_integer(n))
}

/// Formats a rational as `"p/q"`, or `"p"` for integers.
pub fn fmt_q(x: &Q) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Lossy conversion to `f64`.
pub fn q_to_f64(x: &Q) -> f64 {
    x.to_f64().unwrap_or_else(|| {
        let n = x.numer().to_f64().unwrap_or(f64::NAN);
        let d = x.denom().to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

/// Best rational approximation with bounded denominator.
pub fn q_from_f64(x: f64, max_den: i64) -> Q {
    if !x.is_finite() {
        return Q::zero();
    }
    let (mut h0, mut h1) = (0i128, 1i128);
    let (mut k0, mut k1) = (1i128, 0i128);
    let mut v = x;
    for _ in 0..64 {
        let a = v.floor();
        let ai = a as i128;
        let h2 = ai * h1 + h0;
        let k2 = ai * k1 + k0;
        if k2 > max_den as i128 {
            break;
        }
        h0 = h1;
        h1 = h2;
        k0 = k1;
        k1 = k2;
        let frac = v - a;
        if frac.abs() < 1e-15 {
            break;
        }
        v = 1.0 / frac;
    }
    if k1 == 0 {
        return Q::zero();
    }
    Q::new(BigInt::from(h1), BigInt::from(k1))
}

/// Sign of a rational as -1, 0 or 1.
pub fn q_sign(x: &Q) -> i32 {
    if x.is_zero() {
        0
    } else if x.is_positive() {
        1
    } else {
        -1
    }
}

/// Exact square root of a nonnegative rational when it is a perfect square.
pub fn q_sqrt_exact(x: &Q) -> Option<Q> {
    if x.is_negative() {
        return None;
    }
    let n = x.numer().sqrt();
    let d = x.denom().sqrt();
    if &(&n * &n) == x.numer() && &(&d * &d) == x.denom() {
        Some(Q::new(n, d))
    } else {
        None
    }
}

/// Writes `n = s^2 * f` with `f` squarefree (sign carried by `f`).
/// Returns `None` when `|n|` is too large for trial division.
pub fn squarefree_split(n: &BigInt) -> Option<(BigInt, BigInt)> {
    if n.is_zero() {
        return Some((BigInt::zero(), BigInt::zero()));
    }
    let sign = if n.is_negative() { -1 } else { 1 };
    let mut m = n.abs();
    let limit = BigInt::from(1u64 << 40);
    if m > &limit * &limit {
        return None;
    }
    let mut s = BigInt::one();
    let mut f = BigInt::one();
    let mut p = BigInt::from(2);
    while &p * &p <= m {
        let mut e = 0u32;
        while (&m % &p).is_zero() {
            m /= &p;
            e += 1;
        }
        for _ in 0..e / 2 {
            s *= &p;
        }
        if e % 2 == 1 {
            f *= &p;
        }
        p += 1;
    }
    f *= m;
    Some((s, f * sign))
}

/// Element of a multi-quadratic extension of the rationals.
///
/// Keys are squarefree radicands (`1` is the rational unit, negative keys are
/// imaginary). The map never stores zero coefficients.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Surd {
    terms: BTreeMap<i64, Q>,
}

impl Surd {
    /// The zero element.
    pub fn zero() -> Self {
        Surd { terms: BTreeMap::new() }
    }

    /// The unit element.
    pub fn one() -> Self {
        Self::from_q(Q::one())
    }

    /// Embeds a rational.
    pub fn from_q(x: Q) -> Self {
        let mut terms = BTreeMap::new();
        if !x.is_zero() {
            terms.insert(1, x);
        }
        Surd { terms }
    }

    /// Embeds an integer.
    pub fn int(n: i64) -> Self {
        Self::from_q(q(n))
    }

    /// `c * sqrt(d)` for a squarefree `d` (negative `d` is imaginary).
    pub fn radical(c: Q, d: i64) -> Self {
        assert!(d != 0, "radicand must be nonzero");
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(d, c);
        }
        Surd { terms }
    }

    /// `a + b sqrt(d)`.
    pub fn quad(a: Q, b: Q, d: i64) -> Self {
        Self::from_q(a) + Self::radical(b, d)
    }

    /// The imaginary unit.
    pub fn i() -> Self {
        Self::radical(Q::one(), -1)
    }

    /// `sqrt 2`.
    pub fn sqrt2() -> Self {
        Self::radical(Q::one(), 2)
    }

    /// Square root of a rational, exact when the radicand's squarefree part is
    /// small enough to factor.
    pub fn sqrt_q(x: &Q) -> Option<Self> {
        if x.is_zero() {
            return Some(Self::zero());
        }
        // sqrt(n/d) = sqrt(n d) / d
        let nd = x.numer() * x.denom();
        let (s, f) = squarefree_split(&nd)?;
        let c = Q::new(s, x.denom().clone());
        let f: i64 = f.to_i64()?;
        Some(if f == 1 { Self::from_q(c) } else { Self::radical(c, f) })
    }

    /// True for the zero element.
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// True when the element is rational.
    pub fn is_rational(&self) -> bool {
        self.terms.keys().all(|&k| k == 1)
    }

    /// The rational value, if the element is rational.
    pub fn as_rational(&self) -> Option<Q> {
        if self.is_rational() {
            Some(self.rational_part())
        } else {
            None
        }
    }

    /// Coefficient of the rational unit.
    pub fn rational_part(&self) -> Q {
        self.terms.get(&1).cloned().unwrap_or_else(Q::zero)
    }

    /// Coefficient of `sqrt(d)`.
    pub fn coeff(&self, d: i64) -> Q {
        self.terms.get(&d).cloned().unwrap_or_else(Q::zero)
    }

    /// Iterator over `(radicand, coefficient)` pairs.
    pub fn terms(&self) -> impl Iterator<Item = (i64, &Q)> {
        self.terms.iter().map(|(k, v)| (*k, v))
    }

    /// Radicands other than `1` that occur.
    pub fn radicands(&self) -> Vec<i64> {
        self.terms.keys().copied().filter(|&k| k != 1).collect()
    }

    /// True when no imaginary radicand occurs.
    pub fn is_real(&self) -> bool {
        self.terms.keys().all(|&k| k > 0)
    }

    /// Complex conjugate (flips the sign of imaginary radicands).
    pub fn conj(&self) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|(&k, v)| (k, if k < 0 { -v.clone() } else { v.clone() }))
            .collect();
        Surd { terms }
    }

    /// Real part.
    pub fn re(&self) -> Self {
        let terms = self
            .terms
            .iter()
            .filter(|(&k, _)| k > 0)
            .map(|(&k, v)| (k, v.clone()))
            .collect();
        Surd { terms }
    }

    /// Imaginary part as a real element.
    pub fn im(&self) -> Self {
        let mut out = Surd::zero();
        for (&k, v) in &self.terms {
            if k < 0 {
                let key = -k;
                out = out
                    + if key == 1 {
                        Surd::from_q(v.clone())
                    } else {
                        Surd::radical(v.clone(), key)
                    };
            }
        }
        out
    }

    /// Multiplies by a rational.
    pub fn scale(&self, c: &Q) -> Self {
        if c.is_zero() {
            return Surd::zero();
        }
        let terms = self.terms.iter().map(|(&k, v)| (k, v * c)).collect();
        Surd { terms }
    }

    fn add_term(terms: &mut BTreeMap<i64, Q>, k: i64, v: Q) {
        if v.is_zero() {
            return;
        }
        let e = terms.entry(k).or_insert_with(Q::zero);
        *e += v;
        if e.is_zero() {
            terms.remove(&k);
        }
    }

    fn mul_radicals(a: i64, b: i64) -> (Q, i64) {
        if a == 1 {
            return (Q::one(), b);
        }
        if b == 1 {
            return (Q::one(), a);
        }
        let g = num_integer::gcd(a.unsigned_abs(), b.unsigned_abs()) as i128;
        let key = (a as i128) * (b as i128) / (g * g);
        let mut c = Q::from_integer(BigInt::from(g));
        if a < 0 && b < 0 {
            c = -c;
        }
        (c, key as i64)
    }

    /// Multiplicative inverse, computed by repeatedly multiplying with a Galois
    /// conjugate until the norm is rational.
    pub fn try_inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        if self.is_rational() {
            return Some(Surd::from_q(Q::one() / self.rational_part()));
        }
        let generator = self.galois_generator();
        let conj = self.galois_flip(generator);
        let norm = self.clone() * conj.clone();
        let inv_norm = norm.try_inv()?;
        Some(conj * inv_norm)
    }

    /// A generator occurring in the element: a prime dividing some radicand,
    /// or `-1` for the imaginary unit.
    fn galois_generator(&self) -> i64 {
        for &k in self.terms.keys() {
            let m = k.unsigned_abs();
            if m > 1 {
                let mut p = 2u64;
                while p * p <= m {
                    if m % p == 0 {
                        return p as i64;
                    }
                    p += 1;
                }
                return m as i64;
            }
        }
        -1
    }

    /// Automorphism negating the square root of `generator`.
    fn galois_flip(&self, generator: i64) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|(&k, v)| {
                let flips = if generator == -1 {
                    k < 0
                } else {
                    k.unsigned_abs() % (generator as u64) == 0
                };
                (k, if flips { -v.clone() } else { v.clone() })
            })
            .collect();
        Surd { terms }
    }

    /// Floating point complex approximation.
    pub fn to_c64(&self) -> num_complex::Complex64 {
        let mut re = 0.0;
        let mut im = 0.0;
        for (&k, v) in &self.terms {
            let c = q_to_f64(v);
            if k > 0 {
                re += c * (k as f64).sqrt();
            } else {
                im += c * ((-k) as f64).sqrt();
            }
        }
        num_complex::Complex64::new(re, im)
    }

    /// Floating point approximation of the real part.
    pub fn to_f64(&self) -> f64 {
        self.to_c64().re
    }

    /// Exact sign of a real element, decided by interval refinement.
    pub fn sign(&self) -> i32 {
        assert!(self.is_real(), "sign of a non-real element");
        if self.is_zero() {
            return 0;
        }
        if self.is_rational() {
            return q_sign(&self.rational_part());
        }
        let mut bits = 16u32;
        loop {
            let (lo, hi) = self.interval(bits);
            if lo.is_positive() {
                return 1;
            }
            if hi.is_negative() {
                return -1;
            }
            bits *= 2;
            assert!(bits < 1 << 16, "sign refinement did not terminate");
        }
    }

    /// Rational enclosure of a real element using `bits` of precision in each
    /// square root.
    fn interval(&self, bits: u32) -> (Q, Q) {
        let mut lo = Q::zero();
        let mut hi = Q::zero();
        let scale = BigInt::one() << bits;
        for (&k, c) in &self.terms {
            if k == 1 {
                lo += c;
                hi += c;
                continue;
            }
            let big = BigInt::from(k) * &scale * &scale;
            let f = big.sqrt();
            let r_lo = Q::new(f.clone(), scale.clone());
            let r_hi = Q::new(f + 1, scale.clone());
            if c.is_positive() {
                lo += c * &r_lo;
                hi += c * &r_hi;
            } else {
                lo += c * &r_hi;
                hi += c * &r_lo;
            }
        }
        (lo, hi)
    }

    /// Exact comparison of two real elements.
    pub fn cmp_real(&self, other: &Surd) -> Ordering {
        match (self.clone() - other.clone()).sign() {
            -1 => Ordering::Less,
            0 => Ordering::Equal,
            _ => Ordering::Greater,
        }
    }

    /// Lexicographic order on complex values: imaginary part first, then real
    /// part.
    pub fn lex_cmp(&self, other: &Surd) -> Ordering {
        self.im()
            .cmp_real(&other.im())
            .then_with(|| self.re().cmp_real(&other.re()))
    }

    /// Human readable rendering such as `1/2+3/2*sqrt(5)` or `2-i`.
    pub fn render(&self) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (&k, c) in &self.terms {
            let neg = c.is_negative();
            let mag = c.abs();
            let unit = match k {
                1 => String::new(),
                -1 => "i".to_string(),
                k if k < 0 => format!("i*sqrt({})", -k),
                k => format!("sqrt({})", k),
            };
            let body = if k == 1 {
                fmt_q(&mag)
            } else if mag.is_one() {
                unit
            } else {
                format!("{}*{}", fmt_q(&mag), unit)
            };
            if out.is_empty() {
                if neg {
                    out.push('-');
                }
            } else {
                out.push(if neg { '-' } else { '+' });
            }
            out.push_str(&body);
        }
        out
    }

    /// Parses the output of [`Surd::render`].
    pub fn parse(s: &str) -> Option<Surd> {
        let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if s.is_empty() {
            return None;
        }
        let mut out = Surd::zero();
        let mut chunks = Vec::new();
        let mut cur = String::new();
        for (idx, ch) in s.chars().enumerate() {
            if (ch == '+' || ch == '-') && idx > 0 && !cur.ends_with('(') {
                chunks.push(cur.clone());
                cur.clear();
            }
            cur.push(ch);
        }
        chunks.push(cur);
        for chunk in chunks {
            let (neg, body) = match chunk.strip_prefix('-') {
                Some(b) => (true, b.to_string()),
                None => (false, chunk.trim_start_matches('+').to_string()),
            };
            let (coef, unit) = match body.split_once('*') {
                Some((c, u)) => (parse_q(c)?, u.to_string()),
                None => {
                    if body.starts_with('i') || body.starts_with("sqrt") {
                        (Q::one(), body.clone())
                    } else {
                        (parse_q(&body)?, String::new())
                    }
                }
            };
            let coef = if neg { -coef } else { coef };
            let term = if unit.is_empty() {
                Surd::from_q(coef)
            } else if unit == "i" {
                Surd::radical(coef, -1)
            } else if let Some(inner) = unit.strip_prefix("i*sqrt(") {
                let d: i64 = inner.strip_suffix(')')?.parse().ok()?;
                Surd::radical(coef, -d)
            } else {
                let inner = unit.strip_prefix("sqrt(")?;
                let d: i64 = inner.strip_suffix(')')?.parse().ok()?;
                Surd::radical(coef, d)
            };
            out = out + term;
        }
        Some(out)
    }
}

impl fmt::Debug for Surd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render())
    }
}

impl fmt::Display for Surd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render())
    }
}

impl Add for Surd {
    type Output = Surd;
    fn add(mut self, rhs: Surd) -> Surd {
        for (k, v) in rhs.terms {
            Surd::add_term(&mut self.terms, k, v);
        }
        self
    }
}

impl Sub for Surd {
    type Output = Surd;
    fn sub(self, rhs: Surd) -> Surd {
        self + (-rhs)
    }
}

impl Neg for Surd {
    type Output = Surd;
    fn neg(self) -> Surd {
        let terms = self.terms.into_iter().map(|(k, v)| (k, -v)).collect();
        Surd { terms }
    }
}

impl Mul for Surd {
    type Output = Surd;
    fn mul(self, rhs: Surd) -> Surd {
        let mut terms = BTreeMap::new();
        for (&a, va) in &self.terms {
            for (&b, vb) in &rhs.terms {
                let (c, k) = Surd::mul_radicals(a, b);
                Surd::add_term(&mut terms, k, va * vb * c);
            }
        }
        Surd { terms }
    }
}

impl Div for Surd {
    type Output = Surd;
    fn div(self, rhs: Surd) -> Surd {
        self * rhs.try_inv().expect("division by zero or unsupported field")
    }
}

impl From<Q> for Surd {
    fn from(x: Q) -> Self {
        Surd::from_q(x)
    }
}

/// Field operations needed by the generic matrix routines.
pub trait Scalar:
    Clone
    + PartialEq
    + fmt::Debug
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    /// Additive identity.
    fn zero_elem() -> Self;
    /// Multiplicative identity.
    fn one_elem() -> Self;
    /// Zero test.
    fn is_zero_elem(&self) -> bool;
    /// Inverse of a nonzero element.
    fn inv_elem(&self) -> Self;
    /// Embedding of the rationals.
    fn embed(x: &Q) -> Self;
}

impl Scalar for Q {
    fn zero_elem() -> Self {
        Q::zero()
    }
    fn one_elem() -> Self {
        Q::one()
    }
    fn is_zero_elem(&self) -> bool {
        self.is_zero()
    }
    fn inv_elem(&self) -> Self {
        self.recip()
    }
    fn embed(x: &Q) -> Self {
        x.clone()
    }
}

impl Scalar for Surd {
    fn zero_elem() -> Self {
        Surd::zero()
    }
    fn one_elem() -> Self {
        Surd::one()
    }
    fn is_zero_elem(&self) -> bool {
        self.is_zero()
    }
    fn inv_elem(&self) -> Self {
        self.try_inv().expect("inverse of zero")
    }
    fn embed(x: &Q) -> Self {
        Surd::from_q(x.clone())
    }
}

/// Integer type alias re-exported for callers that build rationals by hand.
pub type Int = BigInt;

/// Least common multiple of denominators, used to clear fractions.
pub fn lcm_denoms<'a, I: IntoIterator<Item = &'a Q>>(it: I) -> BigInt {
    it.into_iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()))
}

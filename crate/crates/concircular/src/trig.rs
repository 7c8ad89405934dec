//! Polynomials in circular and hyperbolic function symbols.
//!
//! A parameter `φ` is represented by a pair of polynomial variables
//! `(c, s)` standing for `(cos φ, sin φ)` with `c² + s² = 1`, or for
//! `(cosh η, sinh η)` with `c² - s² = 1`. Reduction replaces `s²` so that
//! every class has a unique representative with `s`-degree at most one.

use num_traits::One;

use crate::number::Q;
use crate::poly::MultiPoly;

/// Kind of a trigonometric parameter.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TrigKind {
    /// `cos² + sin² = 1`.
    Circular,
    /// `cosh² - sinh² = 1`.
    Hyperbolic,
}

/// A parameter with its two variable slots.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TrigParam {
    /// Slot of the even function (cos or cosh).
    pub even: usize,
    /// Slot of the odd function (sin or sinh).
    pub odd: usize,
    /// Relation type.
    pub kind: TrigKind,
}

/// Ring of polynomials in several trigonometric parameters plus free
/// variables.
#[derive(Clone, Debug)]
pub struct TrigRing {
    nvars: usize,
    params: Vec<TrigParam>,
}

impl TrigRing {
    /// Ring with `nvars` slots, some of which are paired into parameters.
    pub fn new(nvars: usize, params: Vec<TrigParam>) -> Self {
        TrigRing { nvars, params }
    }

    /// Number of variable slots.
    pub fn nvars(&self) -> usize {
        self.nvars
    }

    /// Variable in slot `i`.
    pub fn var(&self, i: usize) -> MultiPoly {
        MultiPoly::var(self.nvars, i)
    }

    /// Constant.
    pub fn constant(&self, c: Q) -> MultiPoly {
        MultiPoly::constant(self.nvars, c)
    }

    /// Normal form modulo the Pythagorean relations.
    pub fn reduce(&self, p: &MultiPoly) -> MultiPoly {
        let mut cur = p.clone();
        for prm in &self.params {
            // s² ↦ 1 - c² (circular) or c² - 1 (hyperbolic).
            let c2 = self.var(prm.even).pow(2);
            let one = self.constant(Q::one());
            let s2 = match prm.kind {
                TrigKind::Circular => one - c2,
                TrigKind::Hyperbolic => c2 - one,
            };
            let mut out = MultiPoly::zero(self.nvars);
            for (e, coef) in cur.terms() {
                let k = e[prm.odd];
                let mut e2 = e.clone();
                e2[prm.odd] = k % 2;
                let mono = MultiPoly::monomial(self.nvars, e2, coef.clone());
                out = out + &mono * &s2.pow(k / 2);
            }
            cur = out;
        }
        cur
    }

    /// True when `a - b` reduces to zero.
    pub fn equal(&self, a: &MultiPoly, b: &MultiPoly) -> bool {
        self.reduce(&(a.clone() - b.clone())).is_zero()
    }

    /// Derivative with respect to the parameter `prm`.
    pub fn derive(&self, p: &MultiPoly, prm: &TrigParam) -> MultiPoly {
        // d cos = -sin, d sin = cos; d cosh = sinh, d sinh = cosh.
        let dc = match prm.kind {
            TrigKind::Circular => -self.var(prm.odd),
            TrigKind::Hyperbolic => self.var(prm.odd),
        };
        let ds = self.var(prm.even);
        &p.deriv(prm.even) * &dc + &p.deriv(prm.odd) * &ds
    }

    /// Derivative with respect to a free variable slot.
    pub fn derive_free(&self, p: &MultiPoly, slot: usize) -> MultiPoly {
        p.deriv(slot)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::number::q;

    #[test]
    fn pythagorean_reduction() {
        let prm = TrigParam { even: 0, odd: 1, kind: TrigKind::Circular };
        let ring = TrigRing::new(2, vec![prm]);
        let (c, s) = (ring.var(0), ring.var(1));
        assert!(ring.equal(&(c.pow(2) + s.pow(2)), &ring.constant(q(1))));
        // d/dφ (sin φ cos φ) = cos² - sin².
        let d = ring.derive(&(&s * &c), &prm);
        assert!(ring.equal(&d, &(c.pow(2) - s.pow(2))));
    }

    #[test]
    fn hyperbolic_reduction() {
        let prm = TrigParam { even: 0, odd: 1, kind: TrigKind::Hyperbolic };
        let ring = TrigRing::new(2, vec![prm]);
        let (c, s) = (ring.var(0), ring.var(1));
        assert!(ring.equal(&(c.pow(2) - s.pow(2)), &ring.constant(q(1))));
        assert!(ring.equal(&ring.derive(&c.pow(2), &prm), &(&c * &s).scale(&q(2))));
    }
}

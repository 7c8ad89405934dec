//! KBD and spherical KBD equations and their exact solution spaces.
//!
//! For an endomorphism field `K(x)` with polynomial entries the equation is
//! `d(K dV) = 0`; in Cartesian coordinates the 1-form `K dV` has components
//! `Σ_k K^k_j ∂_k V` and the residual is the 2-form
//! `∂_i (K dV)_j − ∂_j (K dV)_i`.

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::potential::{Potential, PotentialDerivatives};
use crate::ct::ConcircularTensor;
use crate::error::{Error, Result};
use crate::linalg::Space;
use crate::matrix::QMat;
use crate::number::{fmt_q, Q};
use crate::poly::MultiPoly;

/// Square matrix of polynomials in the Cartesian coordinates.
pub type PolyMat = Vec<Vec<MultiPoly>>;

/// Parameters `(A, w, m)` of a flat tensor; spherical tensors use `A` only.
#[derive(Clone, Debug, PartialEq)]
pub struct CtParams {
    /// Parameter matrix.
    pub a: QMat,
    /// Vector parameter.
    pub w: Vec<Q>,
    /// Scalar parameter.
    pub m: Q,
}

impl CtParams {
    /// Parameters of a tensor.
    pub fn of(l: &ConcircularTensor) -> Self {
        CtParams { a: l.a().clone(), w: l.w().to_vec(), m: l.m().clone() }
    }

    /// The tensor in `sp`.
    pub fn to_ct(&self, sp: &Space) -> Result<ConcircularTensor> {
        ConcircularTensor::new(sp.clone(), self.a.clone(), self.w.clone(), self.m.clone())
    }
}

/// Layout of the parameter coordinates: the upper triangle of `S = gA`,
/// then `w`, then `m` (flat only).
#[derive(Clone, Debug, PartialEq)]
pub struct ParamLayout {
    space: Space,
    spherical: bool,
}

impl ParamLayout {
    /// Flat layout with `(n+1)(n+2)/2` coordinates.
    pub fn flat(space: &Space) -> Self {
        ParamLayout { space: space.clone(), spherical: false }
    }

    /// Spherical layout with `n(n+1)/2` coordinates.
    pub fn spherical(space: &Space) -> Self {
        ParamLayout { space: space.clone(), spherical: true }
    }

    /// Number of coordinates.
    pub fn len(&self) -> usize {
        let n = self.space.dim();
        let sym = n * (n + 1) / 2;
        if self.spherical {
            sym
        } else {
            sym + n + 1
        }
    }

    /// True for the zero-dimensional layout.
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Parameters from coordinates.
    pub fn params(&self, c: &[Q]) -> CtParams {
        let n = self.space.dim();
        let mut s = QMat::zeros(n, n);
        let mut idx = 0;
        for i in 0..n {
            for j in i..n {
                s[(i, j)] = c[idx].clone();
                s[(j, i)] = c[idx].clone();
                idx += 1;
            }
        }
        let ginv = self.space.metric().inverse().expect("nondegenerate metric");
        let a = &ginv * &s;
        if self.spherical {
            return CtParams { a, w: vec![Q::zero(); n], m: Q::zero() };
        }
        let w = c[idx..idx + n].to_vec();
        CtParams { a, w, m: c[idx + n].clone() }
    }

    /// Coordinates of parameters.
    pub fn coords(&self, p: &CtParams) -> Vec<Q> {
        let n = self.space.dim();
        let s = self.space.metric() * &p.a;
        let mut out = Vec::with_capacity(self.len());
        for i in 0..n {
            for j in i..n {
                out.push(s[(i, j)].clone());
            }
        }
        if !self.spherical {
            out.extend(p.w.iter().cloned());
            out.push(p.m.clone());
        }
        out
    }

    /// Coordinates of the metric `A = I`.
    pub fn metric_coords(&self) -> Vec<Q> {
        let n = self.space.dim();
        self.coords(&CtParams { a: QMat::identity(n), w: vec![Q::zero(); n], m: Q::zero() })
    }
}

fn lin(v: &[Q]) -> MultiPoly {
    MultiPoly::affine(v, &Q::zero())
}

fn constant_mat(a: &QMat) -> PolyMat {
    let n = a.nrows();
    (0..n).map(|i| (0..n).map(|j| MultiPoly::constant(n, a[(i, j)].clone())).collect()).collect()
}

/// `L(x)` as a polynomial endomorphism field.
pub fn ct_field(sp: &Space, p: &CtParams) -> PolyMat {
    let n = sp.dim();
    let g = sp.metric();
    let x: Vec<MultiPoly> = (0..n).map(|i| MultiPoly::var(n, i)).collect();
    // x♭ and w♭ as row forms.
    let xflat: Vec<MultiPoly> = (0..n).map(|j| lin(&g.row(j))).collect();
    let gw = g.mul_vec(&p.w);
    let mut out = constant_mat(&p.a);
    for i in 0..n {
        for j in 0..n {
            let mut e = out[i][j].clone();
            if !p.w[i].is_zero() {
                e = e + xflat[j].scale(&p.w[i]);
            }
            if !gw[j].is_zero() {
                e = e + x[i].scale(&gw[j]);
            }
            if !p.m.is_zero() {
                e = e + (&x[i] * &xflat[j]).scale(&p.m);
            }
            out[i][j] = e;
        }
    }
    out
}

fn trace(m: &PolyMat) -> MultiPoly {
    let n = m.len();
    (0..n).fold(MultiPoly::zero(n), |acc, i| acc + m[i][i].clone())
}

/// KBD operator `K_e = tr(L) I − L` as an endomorphism field.
pub fn kbd_operator(sp: &Space, p: &CtParams) -> PolyMat {
    let l = ct_field(sp, p);
    let t = trace(&l);
    let n = sp.dim();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let d = if i == j { t.clone() } else { MultiPoly::zero(n) };
                    d - l[i][j].clone()
                })
                .collect()
        })
        .collect()
}

/// Lifted spherical KBD operator
/// `K_s = tr(A) r² R − <r, A r> G − r² A + (A r) ⊗ r♭ + r ⊗ (A r)♭`
/// as an endomorphism field, with `r² R = r² I − r ⊗ r♭`; the first term
/// is included when `with_metric_term` is set.
pub fn spherical_kbd_operator(sp: &Space, a: &QMat, with_metric_term: bool) -> PolyMat {
    let n = sp.dim();
    let g = sp.metric();
    let x: Vec<MultiPoly> = (0..n).map(|i| MultiPoly::var(n, i)).collect();
    let xflat: Vec<MultiPoly> = (0..n).map(|j| lin(&g.row(j))).collect();
    let ax: Vec<MultiPoly> = (0..n).map(|i| lin(&a.row(i))).collect();
    let ga = g * a;
    let axflat: Vec<MultiPoly> = (0..n).map(|j| lin(&ga.row(j))).collect();
    let r2 = (0..n).fold(MultiPoly::zero(n), |acc, i| acc + &x[i] * &xflat[i]);
    let rar = (0..n).fold(MultiPoly::zero(n), |acc, i| acc + &xflat[i] * &ax[i]);
    let tr = a.trace();
    let mut out: PolyMat = vec![vec![MultiPoly::zero(n); n]; n];
    for i in 0..n {
        for j in 0..n {
            let mut e = (&ax[i] * &xflat[j]) + (&x[i] * &axflat[j]);
            e = e - r2.scale(&a[(i, j)]);
            if i == j {
                e = e - rar.clone();
            }
            if with_metric_term && !tr.is_zero() {
                let mut rr = (&x[i] * &xflat[j]).scale(&-Q::one());
                if i == j {
                    rr = rr + r2.clone();
                }
                e = e + rr.scale(&tr);
            }
            out[i][j] = e;
        }
    }
    out
}

/// Exact derivatives of `V` evaluated at a point.
struct PointDerivs {
    grad: Vec<Q>,
    hess: Vec<Vec<Q>>,
}

fn eval_derivs(d: &PotentialDerivatives, x: &[Q]) -> Result<PointDerivs> {
    let grad = d.gradient.iter().map(|g| g.eval(x)).collect::<Result<Vec<_>>>()?;
    let hess = d
        .hessian
        .iter()
        .map(|row| row.iter().map(|h| h.eval(x)).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    Ok(PointDerivs { grad, hess })
}

fn residual_at(k: &PolyMat, dv: &PointDerivs, x: &[Q]) -> QMat {
    let n = k.len();
    let kv: Vec<Vec<Q>> = k.iter().map(|row| row.iter().map(|e| e.eval(x)).collect()).collect();
    // (K dV)_j = Σ_k K[k][j] V_k and its partial derivative along i.
    let dform = |i: usize, j: usize| -> Q {
        let mut s = Q::zero();
        for kk in 0..n {
            let dk = k[kk][j].deriv(i).eval(x);
            s += dk * &dv.grad[kk] + kv[kk][j].clone() * &dv.hess[kk][i];
        }
        s
    };
    let mut out = QMat::zeros(n, n);
    for i in 0..n {
        for j in i + 1..n {
            let r = dform(i, j) - dform(j, i);
            out[(i, j)] = r.clone();
            out[(j, i)] = -r;
        }
    }
    out
}

/// Residual components `(i < j)` of `d(K dV)` as potentials.
pub fn residual_symbolic(k: &PolyMat, v: &Potential) -> Result<Vec<Potential>> {
    let n = k.len();
    let d = v.derivatives();
    let dform = |i: usize, j: usize| -> Result<Potential> {
        let mut s = Potential::zero(n);
        for kk in 0..n {
            let dk = k[kk][j].deriv(i);
            if !dk.is_zero() {
                s = s.add(&d.gradient[kk].mul_poly(&dk))?;
            }
            if !k[kk][j].is_zero() {
                s = s.add(&d.hessian[kk][i].mul_poly(&k[kk][j]))?;
            }
        }
        Ok(s)
    };
    let mut out = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            out.push(dform(i, j)?.add(&dform(j, i)?.scale(&-Q::one()))?);
        }
    }
    Ok(out)
}

/// The KBD residual `d(K_e dV)` at `x` for the flat tensor `p`.
pub fn kbd_residual(sp: &Space, p: &CtParams, v: &Potential, x: &[Q]) -> Result<QMat> {
    sp.check_len(x.len())?;
    let dv = eval_derivs(&v.derivatives(), x)?;
    Ok(residual_at(&kbd_operator(sp, p), &dv, x))
}

/// The spherical KBD residual `d(K_s dV)` at `x`.
pub fn spherical_kbd_residual(sp: &Space, a: &QMat, v: &Potential, x: &[Q], with_metric_term: bool) -> Result<QMat> {
    sp.check_len(x.len())?;
    let dv = eval_derivs(&v.derivatives(), x)?;
    Ok(residual_at(&spherical_kbd_operator(sp, a, with_metric_term), &dv, x))
}

/// Whether `d(K dV)` vanishes identically, by clearing denominators.
pub fn residual_vanishes(k: &PolyMat, v: &Potential) -> Result<bool> {
    Ok(residual_symbolic(k, v)?.iter().all(|r| r.numerator().is_zero()))
}

/// Options for the sampled solvers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolveOptions {
    /// Seed of the sample-point generator.
    pub seed: u64,
    /// Extra points beyond the parameter count.
    pub extra_points: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { seed: 0, extra_points: 5 }
    }
}

/// Exact solution space of a (spherical) KBD equation.
#[derive(Clone, Debug, PartialEq)]
pub struct KbdSolutionSpace {
    /// Ambient space.
    pub space: Space,
    /// Whether the solutions are spherical parameter matrices.
    pub spherical: bool,
    /// Verified basis.
    pub basis: Vec<CtParams>,
    /// Number of sample points used.
    pub samples: usize,
}

impl KbdSolutionSpace {
    /// Dimension.
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Coordinate layout.
    pub fn layout(&self) -> ParamLayout {
        if self.spherical {
            ParamLayout::spherical(&self.space)
        } else {
            ParamLayout::flat(&self.space)
        }
    }

    /// Whether `p` lies in the span.
    pub fn contains(&self, p: &CtParams) -> bool {
        let lay = self.layout();
        let mut rows: Vec<Vec<Q>> = self.basis.iter().map(|b| lay.coords(b)).collect();
        let r0 = if rows.is_empty() { 0 } else { QMat::from_rows(rows.clone()).rank() };
        rows.push(lay.coords(p));
        QMat::from_rows(rows).rank() == r0
    }

    /// Basis of a complement of the metric inside the span, reduced so
    /// that each element has a zero first diagonal coordinate and then
    /// put in reduced row echelon form.
    pub fn basis_modulo_metric(&self) -> Vec<CtParams> {
        let lay = self.layout();
        let g = lay.metric_coords();
        let pivot = g.iter().position(|c| !c.is_zero()).expect("metric has a nonzero coordinate");
        let rows: Vec<Vec<Q>> = self
            .basis
            .iter()
            .map(|b| {
                let c = lay.coords(b);
                let f = c[pivot].clone() / &g[pivot];
                c.iter().zip(&g).map(|(x, y)| x.clone() - f.clone() * y).collect()
            })
            .collect();
        if rows.is_empty() {
            return vec![];
        }
        let (r, piv) = QMat::from_rows(rows).rref();
        (0..piv.len()).map(|i| lay.params(&r.row(i))).collect()
    }
}

/// Deterministic sample point with small-height rational coordinates
/// avoiding poles of `V` and its derivatives.
fn sample_point(rng: &mut ChaCha8Rng, n: usize, d: &PotentialDerivatives) -> Option<(Vec<Q>, PointDerivs)> {
    for _ in 0..1000 {
        let x: Vec<Q> = (0..n)
            .map(|_| Q::new(rng.gen_range(-7i64..=7).into(), rng.gen_range(1i64..=4).into()))
            .collect();
        if let Ok(dv) = eval_derivs(d, &x) {
            return Some((x, dv));
        }
    }
    None
}

fn solve_generic(
    layout: &ParamLayout,
    v: &Potential,
    operator: &dyn Fn(&CtParams) -> PolyMat,
    opts: &SolveOptions,
) -> Result<(Vec<CtParams>, usize)> {
    let sp = &layout.space;
    let n = sp.dim();
    if v.nvars() != n {
        return Err(Error::DimensionMismatch(format!("potential in {} variables, space of dimension {n}", v.nvars())));
    }
    let np = layout.len();
    let ops: Vec<PolyMat> = (0..np)
        .map(|i| {
            let mut c = vec![Q::zero(); np];
            c[i] = Q::one();
            operator(&layout.params(&c))
        })
        .collect();
    let d = v.derivatives();
    for attempt in 0..2u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed.wrapping_add(attempt.wrapping_mul(0x9E37_79B9)));
        let mut rows: Vec<Vec<Q>> = Vec::new();
        let mut used = 0;
        let mut add_points = |count: usize, rows: &mut Vec<Vec<Q>>, used: &mut usize| -> Result<()> {
            for _ in 0..count {
                let (x, dv) = sample_point(&mut rng, n, &d)
                    .ok_or_else(|| Error::Domain("no pole-free sample point found".into()))?;
                let res: Vec<QMat> = ops.iter().map(|k| residual_at(k, &dv, &x)).collect();
                for i in 0..n {
                    for j in i + 1..n {
                        rows.push(res.iter().map(|r| r[(i, j)].clone()).collect());
                    }
                }
                *used += 1;
            }
            Ok(())
        };
        let rank_of = |rows: &Vec<Vec<Q>>| if rows.is_empty() { 0 } else { QMat::from_rows(rows.clone()).rank() };
        add_points(np + opts.extra_points * (attempt as usize + 1), &mut rows, &mut used)?;
        let mut rank = rank_of(&rows);
        // Add points in batches of five until the rank stabilizes.
        while rank < np {
            add_points(5, &mut rows, &mut used)?;
            let r = rank_of(&rows);
            if r == rank {
                break;
            }
            rank = r;
        }
        let null = if rows.is_empty() {
            (0..np)
                .map(|i| {
                    let mut c = vec![Q::zero(); np];
                    c[i] = Q::one();
                    c
                })
                .collect()
        } else {
            QMat::from_rows(rows).nullspace()
        };
        let basis: Vec<CtParams> = null.iter().map(|c| layout.params(c)).collect();
        let mut ok = true;
        for b in &basis {
            if !residual_vanishes(&operator(b), v)? {
                ok = false;
                break;
            }
        }
        if ok {
            return Ok((basis, used));
        }
    }
    Err(Error::Verification("sampling produced a spurious KBD solution twice".into()))
}

/// Exact solution space of the KBD equation `d(K_e dV) = 0` over all
/// flat concircular tensors of `sp`.
pub fn solve_kbd(v: &Potential, sp: &Space, opts: &SolveOptions) -> Result<KbdSolutionSpace> {
    let layout = ParamLayout::flat(sp);
    let (basis, samples) = solve_generic(&layout, v, &|p| kbd_operator(sp, p), opts)?;
    Ok(KbdSolutionSpace { space: sp.clone(), spherical: false, basis, samples })
}

/// Exact solution space of the spherical KBD equation over all parameter
/// matrices `A`. `V` must satisfy the KBD equation with `r ⊙ r`.
pub fn solve_spherical_kbd(v: &Potential, sp: &Space, opts: &SolveOptions) -> Result<KbdSolutionSpace> {
    let n = sp.dim();
    let radial = CtParams { a: QMat::zeros(n, n), w: vec![Q::zero(); n], m: Q::one() };
    if !residual_vanishes(&kbd_operator(sp, &radial), v)? {
        let d = v.derivatives();
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        let k = kbd_operator(sp, &radial);
        for _ in 0..100 {
            if let Some((x, dv)) = sample_point(&mut rng, n, &d) {
                let r = residual_at(&k, &dv, &x);
                if !r.is_zero() {
                    let pt: Vec<String> = x.iter().map(fmt_q).collect();
                    return Err(Error::Precondition(format!(
                        "V does not satisfy the KBD equation with r⊙r; residual nonzero at ({})",
                        pt.join(", ")
                    )));
                }
            }
        }
        return Err(Error::Precondition("V does not satisfy the KBD equation with r⊙r".into()));
    }
    let layout = ParamLayout::spherical(sp);
    let (basis, samples) = solve_generic(&layout, v, &|p| spherical_kbd_operator(sp, &p.a, true), opts)?;
    Ok(KbdSolutionSpace { space: sp.clone(), spherical: true, basis, samples })
}

/// Solution space by full coefficient matching of the cleared residual
/// numerators, without sampling.
pub fn solve_kbd_by_coefficients(v: &Potential, sp: &Space, spherical: bool) -> Result<KbdSolutionSpace> {
    let layout = if spherical { ParamLayout::spherical(sp) } else { ParamLayout::flat(sp) };
    let np = layout.len();
    let n = sp.dim();
    let mut per_param: Vec<Vec<Potential>> = Vec::with_capacity(np);
    for i in 0..np {
        let mut c = vec![Q::zero(); np];
        c[i] = Q::one();
        let p = layout.params(&c);
        let k = if spherical { spherical_kbd_operator(sp, &p.a, true) } else { kbd_operator(sp, &p) };
        per_param.push(residual_symbolic(&k, v)?);
    }
    // Bring every component onto a common denominator by tagging each
    // parameter with an extra variable and clearing once.
    let ncomp = n * (n - 1) / 2;
    let mut rows: Vec<Vec<Q>> = Vec::new();
    for comp in 0..ncomp {
        let tagged_vars = n + np;
        let mut total = Potential::zero(tagged_vars);
        for (i, res) in per_param.iter().enumerate() {
            let subs: Vec<MultiPoly> = (0..n).map(|j| MultiPoly::var(tagged_vars, j)).collect();
            let lifted = res[comp].compose(&subs)?;
            total = total.add(&lifted.mul_poly(&MultiPoly::var(tagged_vars, n + i)))?;
        }
        let num = total.numerator();
        let mut by_mono: std::collections::BTreeMap<Vec<u32>, Vec<Q>> = std::collections::BTreeMap::new();
        for (e, c) in num.terms() {
            let key = e[..n].to_vec();
            let slot = by_mono.entry(key).or_insert_with(|| vec![Q::zero(); np]);
            let which = (0..np).find(|&i| e[n + i] == 1).expect("linear in the parameters");
            slot[which] += c;
        }
        rows.extend(by_mono.into_values());
    }
    let null = if rows.is_empty() {
        (0..np)
            .map(|i| {
                let mut c = vec![Q::zero(); np];
                c[i] = Q::one();
                c
            })
            .collect()
    } else {
        QMat::from_rows(rows).nullspace()
    };
    Ok(KbdSolutionSpace { space: sp.clone(), spherical, basis: null.iter().map(|c| layout.params(c)).collect(), samples: 0 })
}

/// Lift of an `r`-invariant (degree-zero) potential from the hyperquadric
/// `<x, x> = 1/κ` to the ambient space: `V = Ṽ / (κ r²)`.
pub fn lift_potential(vt: &Potential, sp: &Space, kappa: &Q) -> Result<Potential> {
    if kappa.is_zero() {
        return Err(Error::Precondition("κ must be nonzero".into()));
    }
    match vt.homogeneous_degree() {
        Some(0) => {}
        _ => return Err(Error::Precondition("the potential is not r-invariant (homogeneous of degree 0)".into())),
    }
    vt.mul(&Potential::quadratic_power(sp, -1, Q::one() / kappa))
}

/// Degree-zero extension of a homogeneous potential of even degree `d`
/// restricted to `<x, x> = 1/κ`: `V (κ r²)^{-d/2}`.
pub fn degree_zero_extension(v: &Potential, sp: &Space, kappa: &Q) -> Result<Potential> {
    let d = v
        .homogeneous_degree()
        .ok_or_else(|| Error::Unsupported("restriction of a non-homogeneous potential to a sphere".into()))?;
    if d % 2 != 0 {
        return Err(Error::Unsupported("odd-degree homogeneous potential on a sphere".into()));
    }
    let k = kappa.clone();
    let e = (-d / 2) as i32;
    let scale = if e >= 0 {
        (0..e).fold(Q::one(), |acc, _| acc * &k)
    } else {
        Q::one() / (0..-e).fold(Q::one(), |acc, _| acc * &k)
    };
    v.mul(&Potential::quadratic_power(sp, e, scale))
}

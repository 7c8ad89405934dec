//! Recursive separation: solve the KBD equation, pick one representative
//! per geometric class of solutions, split reducible representatives along
//! warped products and recurse on the spherical factors.

use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::kbd::{degree_zero_extension, lift_potential, solve_kbd, solve_spherical_kbd, CtParams, KbdSolutionSpace, SolveOptions};
use super::potential::Potential;
use crate::charpoly::constant_eigenfunctions;
use crate::ct::{canonicalize, ConcircularTensor, SphericalCT, Variant};
use crate::error::{Error, Result};
use crate::linalg::{metric_jordan_form, MetricJordanForm, Space};
use crate::matrix::{vadd, vscale, vsub, QMat};
use crate::number::{fmt_q, Q};
use crate::poly::MultiPoly;
use crate::warped::{quadric_point, split_reducible, split_reducible_spherical, AxisKind, ReducibleSplit};

/// Options of the recursion.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeparationOptions {
    /// Seed for sample points and base points.
    pub seed: u64,
    /// Largest ambient dimension accepted.
    pub max_dim: usize,
    /// Largest number of nonzero coefficients in a class representative.
    pub max_support: usize,
}

impl Default for SeparationOptions {
    fn default() -> Self {
        SeparationOptions { seed: 0, max_dim: 4, max_support: 3 }
    }
}

/// Representative tensor of a class.
#[derive(Clone, Debug, PartialEq)]
pub enum Representative {
    /// Flat tensor parameters.
    Flat(CtParams),
    /// Spherical parameter matrix.
    Spherical(QMat),
}

/// Geometric class of a KBD solution: variant and eigenvalue pattern.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ClassKey {
    /// Variant label (`central`, `axial`, `cartesian`, `spherical`).
    pub variant: String,
    /// Sorted multiplicities of the distinct eigenvalues of `A_c` (or of
    /// `A` for Cartesian and spherical tensors); Jordan blocks appear as
    /// `J<k>`.
    pub pattern: Vec<String>,
}

impl ClassKey {
    /// Compact label such as `central[1,2]`.
    pub fn label(&self) -> String {
        format!("{}[{}]", self.variant, self.pattern.join(","))
    }

    /// Label with the pattern sorted, which identifies classes that differ
    /// only in the order of their eigenvalues (such as the oblate and
    /// prolate spheroidal webs).
    pub fn family(&self) -> String {
        let mut p = self.pattern.clone();
        p.sort();
        format!("{}[{}]", self.variant, p.join(","))
    }

    /// Whether the restricted operator is a multiple of the identity.
    pub fn is_scalar(&self) -> bool {
        self.pattern.len() == 1 && !self.pattern[0].starts_with('J')
    }
}

/// A spherical or flat factor problem of a split.
#[derive(Clone, Debug, PartialEq)]
pub struct FactorProblem {
    /// Dimension of the factor manifold.
    pub dim: usize,
    /// Whether the warping axis is lightlike (flat fiber).
    pub null_axis: bool,
    /// Basis of the linear span containing the factor.
    pub span: Vec<Vec<Q>>,
    /// Potential of the factor problem in the coordinates of `span`.
    pub potential: Option<Potential>,
    /// Child tree; absent for one-dimensional factors.
    pub child: Option<Box<SeparationTree>>,
    /// Reason the factor was not analysed further.
    pub note: Option<String>,
}

/// Node of a separation tree.
#[derive(Clone, Debug, PartialEq)]
pub enum SeparationNode {
    /// The representative is irreducible: its eigenfunctions are
    /// separable coordinates.
    Leaf {
        /// Chart family.
        chart: String,
        /// Dimension.
        dim: usize,
    },
    /// Warped-product splitting of a reducible representative.
    Split {
        /// Chart family of the irreducible tensor on the geodesic factor.
        geodesic_chart: String,
        /// Dimension of the geodesic factor.
        geodesic_dim: usize,
        /// Constant eigenvalues of the spherical factors.
        constant_eigs: Vec<Q>,
        /// Translation into canonical position.
        translation: Vec<Q>,
        /// The decomposition data.
        split: Box<ReducibleSplit>,
        /// One problem per spherical factor.
        factors: Vec<FactorProblem>,
    },
    /// Cartesian product along the eigenspaces of a constant tensor.
    Product {
        /// Eigenvalue of each factor.
        eigenvalues: Vec<Q>,
        /// One problem per eigenspace.
        factors: Vec<FactorProblem>,
    },
    /// The class could not be analysed.
    Unresolved {
        /// Reason.
        reason: String,
    },
}

/// One geometric class of KBD solutions with its analysis.
#[derive(Clone, Debug, PartialEq)]
pub struct SeparationBranch {
    /// Class.
    pub class: ClassKey,
    /// Representative.
    pub representative: Representative,
    /// Node.
    pub node: SeparationNode,
    /// Names of the separable coordinate systems in this branch.
    pub coordinates: Vec<String>,
}

/// Output of the recursion for one (flat or spherical) problem.
#[derive(Clone, Debug, PartialEq)]
pub struct SeparationTree {
    /// Ambient space of the problem.
    pub space: Space,
    /// `Some(κ)` for a problem on `<x, x> = 1/κ`.
    pub kappa: Option<Q>,
    /// Dimension of the KBD solution space (including the metric).
    pub solution_dim: usize,
    /// Verified basis of the solution space modulo the metric.
    pub solutions: Vec<CtParams>,
    /// Branches in class order.
    pub branches: Vec<SeparationBranch>,
}

impl SeparationTree {
    /// Whether only the metric solves the KBD equation.
    pub fn is_empty(&self) -> bool {
        self.branches.is_empty()
    }

    /// Branch with a given class label.
    pub fn branch(&self, label: &str) -> Option<&SeparationBranch> {
        self.branches.iter().find(|b| b.class.label() == label)
    }

    /// Distinct class families, in branch order.
    pub fn families(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        for b in &self.branches {
            let f = b.class.family();
            if !out.contains(&f) {
                out.push(f);
            }
        }
        out
    }

    /// All coordinate-system names, in branch order.
    pub fn coordinate_names(&self) -> Vec<String> {
        self.branches.iter().flat_map(|b| b.coordinates.iter().cloned()).collect()
    }
}

/// Eigenvalue pattern of a metric-Jordan form. With `order = Some(sign)`
/// the real eigenvalues are listed by increasing `sign * λ`; otherwise the
/// pattern is sorted. Non-real eigenvalues carry a `c` suffix.
fn pattern_of(form: &MetricJordanForm, order: Option<i32>) -> (Vec<String>, bool) {
    let mut groups: Vec<(crate::number::Surd, usize, usize)> = Vec::new();
    for b in &form.blocks {
        match groups.iter_mut().find(|g| g.0 == b.lambda) {
            Some(g) => {
                g.1 += b.k;
                g.2 = g.2.max(b.k);
            }
            None => groups.push((b.lambda.clone(), b.k, b.k)),
        }
    }
    let rational = groups.iter().all(|g| g.0.is_rational());
    if let Some(sign) = order {
        groups.sort_by(|a, b| match (a.0.is_real(), b.0.is_real()) {
            (true, true) => a.0.scale(&Q::from_integer(sign.into())).cmp_real(&b.0.scale(&Q::from_integer(sign.into()))),
            (x, y) => y.cmp(&x),
        });
    }
    let mut out: Vec<String> = groups
        .into_iter()
        .map(|(l, tot, maxk)| {
            let c = if l.is_real() { "" } else { "c" };
            if maxk > 1 {
                format!("J{maxk}:{tot}{c}")
            } else {
                format!("{tot}{c}")
            }
        })
        .collect();
    if order.is_none() {
        out.sort();
    }
    (out, rational)
}

fn flat_class_info(l: &ConcircularTensor) -> Result<(ClassKey, bool)> {
    let cls = canonicalize(l)?;
    let variant = match cls.variant {
        Variant::Central => "central".to_string(),
        Variant::AxialNonNull => "axial".to_string(),
        Variant::AxialNull => format!("axial-null{}", cls.index_k.unwrap_or(0)),
        Variant::Cartesian => "cartesian".to_string(),
        Variant::DegenerateNullAxial => return Err(Error::Unsupported("degenerate null-axial tensor".into())),
    };
    let (pattern, rational) = if cls.variant == Variant::Cartesian {
        pattern_of(&metric_jordan_form(l.space(), l.a())?, None)
    } else {
        let (sub, a, _) = cls.complement()?;
        if sub.dim() == 0 {
            (vec![], true)
        } else {
            let order = (cls.variant == Variant::Central).then(|| if cls.scale.is_negative() { -1 } else { 1 });
            pattern_of(&metric_jordan_form(&sub, &a)?, order)
        }
    };
    Ok((ClassKey { variant, pattern }, rational))
}

/// Class of a flat tensor.
pub fn flat_class(l: &ConcircularTensor) -> Result<ClassKey> {
    flat_class_info(l).map(|c| c.0)
}

fn spherical_class_info(s: &SphericalCT) -> Result<(ClassKey, bool)> {
    let (pattern, rational) = pattern_of(&metric_jordan_form(s.space(), s.a())?, None);
    Ok((ClassKey { variant: "spherical".into(), pattern }, rational))
}

/// Class of a spherical tensor.
pub fn spherical_class(s: &SphericalCT) -> Result<ClassKey> {
    spherical_class_info(s).map(|c| c.0)
}

/// Coefficient vectors in a deterministic order: support size, then
/// height, then lexicographic, with values `1, -1, 2, -2`.
fn candidate_coefficients(s: usize, max_support: usize) -> Vec<Vec<i64>> {
    let vals = [1i64, -1, 2, -2];
    let mut out = Vec::new();
    for support in 1..=max_support.min(s) {
        let mut combos = Vec::new();
        subsets(s, support, 0, &mut vec![], &mut combos);
        let mut level = Vec::new();
        for set in combos {
            let mut idx = vec![0usize; support];
            loop {
                let mut c = vec![0i64; s];
                for (p, &i) in set.iter().enumerate() {
                    c[i] = vals[idx[p]];
                }
                level.push(c);
                let mut p = 0;
                while p < support {
                    idx[p] += 1;
                    if idx[p] < vals.len() {
                        break;
                    }
                    idx[p] = 0;
                    p += 1;
                }
                if p == support {
                    break;
                }
            }
        }
        level.sort_by_key(|c| c.iter().map(|x| x.abs()).sum::<i64>());
        out.extend(level);
    }
    out
}

fn subsets(n: usize, k: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if cur.len() == k {
        out.push(cur.clone());
        return;
    }
    for i in start..n {
        cur.push(i);
        subsets(n, k, i + 1, cur, out);
        cur.pop();
    }
}

fn combine(basis: &[CtParams], c: &[i64]) -> CtParams {
    let n = basis[0].w.len();
    let mut out = CtParams { a: QMat::zeros(n, n), w: vec![Q::zero(); n], m: Q::zero() };
    for (b, &ci) in basis.iter().zip(c) {
        if ci == 0 {
            continue;
        }
        let k = Q::from_integer(ci.into());
        out.a = &out.a + &b.a.scale(&k);
        out.w = vadd(&out.w, &vscale(&b.w, &k));
        out.m += b.m.clone() * &k;
    }
    out
}

/// One representative per class, in class order.
fn class_representatives<F>(basis: &[CtParams], max_support: usize, classify: F) -> Vec<(ClassKey, CtParams)>
where
    F: Fn(&CtParams) -> Option<(ClassKey, bool)>,
{
    let mut found: Vec<(ClassKey, CtParams, bool)> = Vec::new();
    if basis.is_empty() {
        return vec![];
    }
    for c in candidate_coefficients(basis.len(), max_support) {
        let p = combine(basis, &c);
        if let Some((key, rational)) = classify(&p) {
            match found.iter_mut().find(|(k, _, _)| *k == key) {
                None => found.push((key, p, rational)),
                Some(slot) if rational && !slot.2 => *slot = (key, p, rational),
                Some(_) => {}
            }
        }
    }
    found.sort_by(|a, b| a.0.cmp(&b.0));
    found.into_iter().map(|(k, p, _)| (k, p)).collect()
}

fn random_vector(rng: &mut ChaCha8Rng, n: usize) -> Vec<Q> {
    (0..n).map(|_| Q::new(rng.gen_range(-5i64..=5).into(), rng.gen_range(1i64..=3).into())).collect()
}

fn flat_chart_name(key: &ClassKey, dim: usize) -> String {
    match (key.variant.as_str(), dim) {
        (_, 0) => "point".into(),
        (_, 1) => "line".into(),
        ("central", 2) if key.is_scalar() => "polar".into(),
        ("central", 2) => "elliptic".into(),
        ("axial", 2) => "parabolic".into(),
        ("cartesian", _) if key.pattern.iter().all(|p| p == "1") => "cartesian".into(),
        ("central", 3) if key.pattern.len() == 3 => "ellipsoidal".into(),
        ("central", 3) if key.pattern == ["2", "1"] => "prolate spheroidal".into(),
        ("central", 3) if key.pattern == ["1", "2"] => "oblate spheroidal".into(),
        ("central", 3) => "spherical".into(),
        ("axial", 3) if key.pattern.len() == 2 => "paraboloidal".into(),
        ("axial", 3) => "parabolic rotational".into(),
        ("central", _) => format!("generalized elliptic ({dim}D)"),
        ("axial", _) => format!("generalized parabolic ({dim}D)"),
        (v, _) => format!("{v} ({dim}D)"),
    }
}

fn spherical_chart_name(key: &ClassKey, dim: usize) -> String {
    match dim {
        0 => "point".into(),
        1 => "angle".into(),
        2 if key.pattern.len() == 3 => "sphero-conical".into(),
        2 => "spherical".into(),
        _ => format!("spherical elliptic ({dim}D)"),
    }
}

fn try_split<F>(rng: &mut ChaCha8Rng, mut base: F, attempt: impl Fn(&[Q]) -> Result<ReducibleSplit>) -> Result<ReducibleSplit>
where
    F: FnMut(&mut ChaCha8Rng) -> Option<Vec<Q>>,
{
    let mut last = Error::Domain("no generic base point found".into());
    for _ in 0..40 {
        let Some(p) = base(rng) else { continue };
        match attempt(&p) {
            Ok(s) => return Ok(s),
            Err(e @ Error::Domain(_)) => last = e,
            Err(e) => return Err(e),
        }
    }
    Err(last)
}

/// Factor problem for factor `i` of a split: the potential restricted to
/// the fiber through the base point.
fn factor_problem(
    split: &ReducibleSplit,
    i: usize,
    v: &Potential,
    opts: &SeparationOptions,
    depth: usize,
) -> FactorProblem {
    let wpd = &split.wpd;
    let sp = wpd.space();
    let n = sp.dim();
    let f = &wpd.factors()[i];
    let dim = f.basis.len();
    let null_axis = matches!(f.kind, AxisKind::Null { .. });
    let span = f.fiber_span();
    let mut out = FactorProblem { dim, null_axis, span: span.clone(), potential: None, child: None, note: None };
    if dim <= 1 {
        return out;
    }
    let base = wpd.base().to_vec();
    let result: Result<(Potential, SeparationTree)> = (|| match &f.kind {
        AxisKind::NonNull { kappa } => {
            let origin = vsub(&base, &vscale(&f.axis, &(Q::one() / kappa)));
            let sub = sp.subspace(&span)?;
            let vu = v.restricted(&origin, &span)?;
            let vt = degree_zero_extension(&vu, &sub, kappa)?;
            let vl = lift_potential(&vt, &sub, kappa)?;
            let mut hint = vec![Q::zero(); span.len()];
            hint[0] = Q::one() / kappa;
            let child = separate_spherical_with(&vl, &sub, kappa, &hint, opts, depth + 1)?;
            Ok((vl, child))
        }
        AxisKind::Null { .. } => {
            // Fiber embedding p ↦ p̄ + p − ½ p² a with p = Σ y_j v_j.
            let k = f.basis.len();
            let sub = sp.subspace(&f.basis)?;
            let ys: Vec<MultiPoly> = (0..k).map(|j| MultiPoly::var(k, j)).collect();
            let mut p2 = MultiPoly::zero(k);
            for a in 0..k {
                for b in 0..k {
                    let g = sub.metric()[(a, b)].clone();
                    if !g.is_zero() {
                        p2 = p2 + (&ys[a] * &ys[b]).scale(&g);
                    }
                }
            }
            let half = Q::new(1.into(), 2.into());
            let subs: Vec<MultiPoly> = (0..n)
                .map(|c| {
                    let coeffs: Vec<Q> = f.basis.iter().map(|b| b[c].clone()).collect();
                    MultiPoly::affine(&coeffs, &base[c]) - p2.scale(&(half.clone() * &f.axis[c]))
                })
                .collect();
            let vf = v.compose(&subs)?;
            let child = separate_flat_with(&vf, &sub, opts, depth + 1)?;
            Ok((vf, child))
        }
    })();
    match result {
        Ok((p, child)) => {
            out.potential = Some(p);
            out.child = Some(Box::new(child));
        }
        Err(e) => out.note = Some(e.to_string()),
    }
    out
}

fn combine_names(prefix: &str, factors: &[FactorProblem]) -> Vec<String> {
    let mut names = vec![prefix.to_string()];
    for f in factors {
        let Some(child) = &f.child else { continue };
        let child_names = child.coordinate_names();
        if child_names.is_empty() {
            continue;
        }
        names = names
            .iter()
            .flat_map(|n| child_names.iter().map(move |c| format!("{n} × {c}")))
            .collect();
    }
    names
}

/// Names of the flat webs built from a radial coordinate and a web on the
/// sphere factor.
fn radial_names(factors: &[FactorProblem]) -> Option<Vec<String>> {
    let [f] = factors else { return None };
    let child = f.child.as_ref()?;
    let names: Vec<String> = child
        .coordinate_names()
        .into_iter()
        .map(|c| match c.as_str() {
            "sphero-conical" => "conical".to_string(),
            "spherical" => "spherical".to_string(),
            other => format!("radial × {other}"),
        })
        .collect();
    (!names.is_empty()).then_some(names)
}

/// Separation tree of `V` in the flat space `sp`.
pub fn bekm_separate(v: &Potential, sp: &Space, opts: &SeparationOptions) -> Result<SeparationTree> {
    separate_flat_with(v, sp, opts, 0)
}

fn separate_flat_with(v: &Potential, sp: &Space, opts: &SeparationOptions, depth: usize) -> Result<SeparationTree> {
    let n = sp.dim();
    if n > opts.max_dim {
        return Err(Error::Unsupported(format!("dimension {n} exceeds the cap {}", opts.max_dim)));
    }
    if depth > opts.max_dim {
        return Err(Error::Internal("recursion did not terminate".into()));
    }
    let sol = solve_kbd(v, sp, &SolveOptions { seed: opts.seed, ..SolveOptions::default() })?;
    let basis = sol.basis_modulo_metric();
    let reps = class_representatives(&basis, opts.max_support, |p| {
        let l = p.to_ct(sp).ok()?;
        flat_class_info(&l).ok()
    });
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0x5eed);
    let mut branches = Vec::new();
    for (key, p) in reps {
        let l = p.to_ct(sp)?;
        let (node, coordinates) = flat_branch(&key, &l, v, sp, opts, depth, &mut rng);
        branches.push(SeparationBranch { class: key, representative: Representative::Flat(p), node, coordinates });
    }
    Ok(finish_tree(sp, None, &sol, basis, branches))
}

fn finish_tree(
    sp: &Space,
    kappa: Option<Q>,
    sol: &KbdSolutionSpace,
    basis: Vec<CtParams>,
    branches: Vec<SeparationBranch>,
) -> SeparationTree {
    SeparationTree { space: sp.clone(), kappa, solution_dim: sol.dim(), solutions: basis, branches }
}

fn flat_branch(
    key: &ClassKey,
    l: &ConcircularTensor,
    v: &Potential,
    sp: &Space,
    opts: &SeparationOptions,
    depth: usize,
    rng: &mut ChaCha8Rng,
) -> (SeparationNode, Vec<String>) {
    let n = sp.dim();
    if key.variant == "cartesian" {
        return product_branch(l, v, sp, opts, depth);
    }
    let cls = match canonicalize(l) {
        Ok(c) => c,
        Err(e) => return (SeparationNode::Unresolved { reason: e.to_string() }, vec![]),
    };
    let vt = match v.translated(&cls.translation) {
        Ok(x) => x,
        Err(e) => return (SeparationNode::Unresolved { reason: e.to_string() }, vec![]),
    };
    let canonical = cls.canonical.clone();
    let split = try_split(rng, |r| Some(random_vector(r, n)), |p| split_reducible(&canonical, p));
    match split {
        Err(Error::NotReducible(_)) => {
            let chart = flat_chart_name(key, n);
            (SeparationNode::Leaf { chart: chart.clone(), dim: n }, vec![chart])
        }
        Err(e) => (SeparationNode::Unresolved { reason: e.to_string() }, vec![]),
        Ok(split) => {
            let gdim = split.restricted.dim();
            let gkey = flat_class(&split.restricted).ok();
            let geodesic_chart = gkey.as_ref().map_or("line".to_string(), |k| flat_chart_name(k, gdim));
            if let Ok(c) = constant_eigenfunctions(&split.restricted) {
                debug_assert!(c.is_empty() || gdim <= 1);
            }
            let factors: Vec<FactorProblem> =
                (0..split.wpd.factors().len()).map(|i| factor_problem(&split, i, &vt, opts, depth)).collect();
            let prefix = flat_chart_name(key, n);
            let coordinates = if key.variant == "central" && key.is_scalar() {
                radial_names(&factors).unwrap_or_else(|| vec![prefix])
            } else {
                combine_names(&prefix, &factors)
            };
            (
                SeparationNode::Split {
                    geodesic_chart,
                    geodesic_dim: gdim,
                    constant_eigs: split.constant_eigs.iter().map(|(l, _)| l.clone()).collect(),
                    translation: cls.translation.clone(),
                    split: Box::new(split),
                    factors,
                },
                coordinates,
            )
        }
    }
}

fn product_branch(
    l: &ConcircularTensor,
    v: &Potential,
    sp: &Space,
    opts: &SeparationOptions,
    depth: usize,
) -> (SeparationNode, Vec<String>) {
    let n = sp.dim();
    let roots = match crate::poly::exact_roots(&l.a().charpoly()) {
        Ok(r) => r,
        Err(_) => return (SeparationNode::Unresolved { reason: "eigenvalues of higher degree".into() }, vec![]),
    };
    let mut eigenvalues = Vec::new();
    let mut factors = Vec::new();
    for r in roots {
        let Some(lam) = r.value.as_rational() else {
            return (SeparationNode::Unresolved { reason: "irrational eigenvalue".into() }, vec![]);
        };
        let ker = (l.a() - &QMat::identity(n).scale(&lam)).nullspace();
        if ker.len() != r.multiplicity {
            return (SeparationNode::Unresolved { reason: "constant tensor is not diagonalizable".into() }, vec![]);
        }
        let dim = ker.len();
        let mut fp = FactorProblem { dim, null_axis: false, span: ker.clone(), potential: None, child: None, note: None };
        if dim >= 2 {
            let res: Result<(Potential, SeparationTree)> = (|| {
                let sub = sp.subspace(&ker)?;
                let vr = v.restricted(&vec![Q::zero(); n], &ker)?;
                let child = separate_flat_with(&vr, &sub, opts, depth + 1)?;
                Ok((vr, child))
            })();
            match res {
                Ok((p, c)) => {
                    fp.potential = Some(p);
                    fp.child = Some(Box::new(c));
                }
                Err(e) => fp.note = Some(e.to_string()),
            }
        }
        eigenvalues.push(lam);
        factors.push(fp);
    }
    let names = if factors.iter().all(|f| f.dim == 1) {
        vec!["cartesian".to_string()]
    } else {
        let mut names = vec![String::new()];
        for f in &factors {
            let child_names: Vec<String> = match &f.child {
                Some(c) => c.coordinate_names().into_iter().filter(|x| x != "cartesian").collect(),
                None => vec![],
            };
            if child_names.is_empty() {
                continue;
            }
            names = names
                .iter()
                .flat_map(|p| {
                    child_names.iter().map(move |c| if p.is_empty() { format!("{c} cylindrical") } else { format!("{p} × {c}") })
                })
                .collect();
        }
        names.retain(|s| !s.is_empty());
        names
    };
    (SeparationNode::Product { eigenvalues, factors }, names)
}

/// Separation tree of `V` on the hyperquadric `<x, x> = 1/κ` of `sp`, with
/// `V` given as an `r`-invariant lift (homogeneous of degree −2).
pub fn bekm_separate_spherical(
    v: &Potential,
    sp: &Space,
    kappa: &Q,
    point: &[Q],
    opts: &SeparationOptions,
) -> Result<SeparationTree> {
    separate_spherical_with(v, sp, kappa, point, opts, 0)
}

fn separate_spherical_with(
    v: &Potential,
    sp: &Space,
    kappa: &Q,
    point: &[Q],
    opts: &SeparationOptions,
    depth: usize,
) -> Result<SeparationTree> {
    let n = sp.dim();
    if n > opts.max_dim + 1 {
        return Err(Error::Unsupported(format!("dimension {n} exceeds the cap")));
    }
    if sp.norm2(point) != Q::one() / kappa {
        return Err(Error::Precondition(format!("point is not on <x, x> = {}", fmt_q(&(Q::one() / kappa)))));
    }
    let sol = solve_spherical_kbd(v, sp, &SolveOptions { seed: opts.seed, ..SolveOptions::default() })?;
    let basis = sol.basis_modulo_metric();
    let reps = class_representatives(&basis, opts.max_support, |p| {
        let s = SphericalCT::new(sp.clone(), kappa.clone(), p.a.clone()).ok()?;
        if s.is_trivial() {
            return None;
        }
        spherical_class_info(&s).ok()
    });
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0xface);
    let mut branches = Vec::new();
    for (key, p) in reps {
        let s = SphericalCT::new(sp.clone(), kappa.clone(), p.a.clone())?;
        let split = try_split(
            &mut rng,
            |r| quadric_point(sp, point, &random_vector(r, n)),
            |b| split_reducible_spherical(&s, b),
        );
        let (node, coordinates) = match split {
            Err(Error::NotReducible(_)) => {
                let chart = spherical_chart_name(&key, n - 1);
                (SeparationNode::Leaf { chart: chart.clone(), dim: n - 1 }, vec![chart])
            }
            Err(e) => (SeparationNode::Unresolved { reason: e.to_string() }, vec![]),
            Ok(split) => {
                let gdim = split.wpd.v0().len().saturating_sub(1);
                let factors: Vec<FactorProblem> =
                    (0..split.wpd.factors().len()).map(|i| factor_problem(&split, i, v, opts, depth)).collect();
                let prefix = spherical_chart_name(&key, n - 1);
                let coordinates = combine_names(&prefix, &factors);
                (
                    SeparationNode::Split {
                        geodesic_chart: spherical_chart_name(&key, gdim),
                        geodesic_dim: gdim,
                        constant_eigs: split.constant_eigs.iter().map(|(l, _)| l.clone()).collect(),
                        translation: vec![Q::zero(); n],
                        split: Box::new(split),
                        factors,
                    },
                    coordinates,
                )
            }
        };
        branches.push(SeparationBranch { class: key, representative: Representative::Spherical(p.a), node, coordinates });
    }
    Ok(finish_tree(sp, Some(kappa.clone()), &sol, basis, branches))
}

impl SeparationTree {
    /// Human-readable multi-line report.
    pub fn report(&self) -> String {
        let mut out = String::new();
        self.report_into(&mut out, 0);
        out
    }

    fn report_into(&self, out: &mut String, indent: usize) {
        let pad = "  ".repeat(indent);
        let where_ = match &self.kappa {
            Some(k) => format!("hyperquadric <x,x> = {} in dimension {}", fmt_q(&(Q::one() / k)), self.space.dim()),
            None => format!("flat space of dimension {} (index {})", self.space.dim(), self.space.nu()),
        };
        out.push_str(&format!(
            "{pad}{where_}: KBD solution space of dimension {} ({} modulo the metric)\n",
            self.solution_dim,
            self.solutions.len()
        ));
        if self.branches.is_empty() {
            out.push_str(&format!("{pad}  no solutions beyond the metric: not separable by concircular tensors at this level\n"));
        }
        for b in &self.branches {
            out.push_str(&format!("{pad}- class {}: {}\n", b.class.label(), b.coordinates.join("; ")));
            match &b.node {
                SeparationNode::Leaf { chart, dim } => out.push_str(&format!("{pad}    leaf: {chart} chart ({dim}D)\n")),
                SeparationNode::Split { geodesic_chart, geodesic_dim, constant_eigs, factors, .. } => {
                    let eigs: Vec<String> = constant_eigs.iter().map(fmt_q).collect();
                    out.push_str(&format!(
                        "{pad}    warped split: geodesic factor {geodesic_chart} ({geodesic_dim}D), constant eigenvalues [{}]\n",
                        eigs.join(", ")
                    ));
                    for (i, f) in factors.iter().enumerate() {
                        report_factor(out, &pad, i, f, indent);
                    }
                }
                SeparationNode::Product { eigenvalues, factors } => {
                    let eigs: Vec<String> = eigenvalues.iter().map(fmt_q).collect();
                    out.push_str(&format!("{pad}    product split along eigenvalues [{}]\n", eigs.join(", ")));
                    for (i, f) in factors.iter().enumerate() {
                        report_factor(out, &pad, i, f, indent);
                    }
                }
                SeparationNode::Unresolved { reason } => out.push_str(&format!("{pad}    unresolved: {reason}\n")),
            }
        }
    }
}

fn report_factor(out: &mut String, pad: &str, i: usize, f: &FactorProblem, indent: usize) {
    let kind = if f.null_axis { "flat (null axis)" } else { "factor" };
    out.push_str(&format!("{pad}    {kind} {} of dimension {}\n", i + 1, f.dim));
    if let Some(note) = &f.note {
        out.push_str(&format!("{pad}      note: {note}\n"));
    }
    if let Some(c) = &f.child {
        c.report_into(out, indent + 3);
    }
}

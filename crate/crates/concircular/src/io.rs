//! JSON input schemas, output documents and the job runner behind
//! the `concircular` binary.
//!
//! Rationals are written as `"p/q"` strings and matrices row-major. Every
//! output document derives `Deserialize`, so emitted JSON parses back into
//! an equal value.

use std::fmt::Write as _;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::bekm::potential::PotentialTermSpec;
use crate::bekm::{
    bekm_separate, bekm_separate_spherical, calogero_moser, flat_class, spherical_class, CtParams, FactorProblem,
    PotentialSpec, Representative, SeparationNode, SeparationOptions, SeparationTree,
};
use crate::charpoly::{
    charpoly_axial, charpoly_bruteforce, charpoly_central_ct, charpoly_spherical, constant_eigenfunctions,
    constant_eigenfunctions_spherical, CharPoly, ConstantEigenvalue,
};
use crate::coords::{ict_data, Branch, Chart, IctData};
use crate::ct::{canonicalize, ConcircularTensor, SphericalCT, Variant};
use crate::enumerate::{enumerate_classes, enumerate_webs_e3, EnumeratedTensor, StructureSpec};
use crate::error::{Error, Result};
use crate::linalg::{metric_jordan_form, MetricJordanForm, Space};
use crate::matrix::QMat;
use crate::number::{fmt_q, parse_q, Q};
use crate::selftest;
use crate::warped::{split_reducible, split_reducible_spherical, AxisKind, ReducibleSplit};

// ------------------------------------------------------------------ scalars

/// Parses a rational string.
pub fn rat(s: &str) -> Result<Q> {
    parse_q(s).ok_or_else(|| Error::Schema(format!("invalid rational {s:?}")))
}

/// Parses a rational vector.
pub fn rat_vec(v: &[String]) -> Result<Vec<Q>> {
    v.iter().map(|s| rat(s)).collect()
}

/// Parses a comma-separated rational list such as `"1/2, 3"`.
pub fn rat_list(s: &str) -> Result<Vec<Q>> {
    s.split(',').filter(|t| !t.trim().is_empty()).map(rat).collect()
}

/// Parses a square row-major rational matrix.
pub fn rat_mat(rows: &[Vec<String>]) -> Result<QMat> {
    let n = rows.len();
    if rows.iter().any(|r| r.len() != n) {
        return Err(Error::Schema("matrix must be square".into()));
    }
    Ok(QMat::from_rows(rows.iter().map(|r| rat_vec(r)).collect::<Result<_>>()?))
}

fn vec_out(v: &[Q]) -> Vec<String> {
    v.iter().map(fmt_q).collect()
}

fn mat_out(m: &QMat) -> Vec<Vec<String>> {
    (0..m.nrows()).map(|i| vec_out(&m.row(i))).collect()
}

// ------------------------------------------------------------------ inputs

/// Ambient space.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SpaceSpec {
    /// `E^n`.
    Euclidean {
        /// Dimension.
        dim: usize,
    },
    /// `E^n_1` with the first coordinate timelike.
    Minkowski {
        /// Dimension.
        dim: usize,
    },
    /// Explicit symmetric metric.
    Metric {
        /// Row-major Gram matrix.
        g: Vec<Vec<String>>,
    },
}

impl SpaceSpec {
    /// Builds the space.
    pub fn build(&self) -> Result<Space> {
        match self {
            SpaceSpec::Euclidean { dim } => Ok(Space::euclidean(*dim)),
            SpaceSpec::Minkowski { dim } => Ok(Space::minkowski(*dim)),
            SpaceSpec::Metric { g } => Space::new(rat_mat(g)?),
        }
    }
}

/// Concircular tensor in flat space or on a hyperquadric.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum CtSpec {
    /// `L = A + w⊙r + m r⊗r`.
    Flat {
        /// Parameter matrix.
        a: Vec<Vec<String>>,
        /// Vector parameter, zero by default.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        w: Option<Vec<String>>,
        /// Scalar parameter, zero by default.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        m: Option<String>,
    },
    /// Tensor induced by `A` on `<x, x> = 1/κ`.
    Spherical {
        /// Curvature.
        kappa: String,
        /// Parameter matrix.
        a: Vec<Vec<String>>,
    },
}

/// A tensor file: the tensor and, optionally, its space.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CtDocument {
    /// Ambient space; `--space` takes precedence.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub space: Option<SpaceSpec>,
    /// The tensor.
    #[serde(flatten)]
    pub tensor: CtSpec,
}

/// A parsed tensor.
#[derive(Clone, Debug, PartialEq)]
pub enum Tensor {
    /// Flat-space tensor.
    Flat(ConcircularTensor),
    /// Tensor on a hyperquadric.
    Spherical(SphericalCT),
}

impl CtDocument {
    /// Builds the tensor in `space`, or in the embedded space, or in the
    /// Euclidean space of matching dimension.
    pub fn build(&self, space: Option<&Space>) -> Result<Tensor> {
        let a = match &self.tensor {
            CtSpec::Flat { a, .. } | CtSpec::Spherical { a, .. } => rat_mat(a)?,
        };
        let sp = match (space, &self.space) {
            (Some(s), _) => s.clone(),
            (None, Some(s)) => s.build()?,
            (None, None) => Space::euclidean(a.nrows()),
        };
        match &self.tensor {
            CtSpec::Flat { w, m, .. } => {
                let w = match w {
                    Some(w) => rat_vec(w)?,
                    None => vec![Q::zero(); a.nrows()],
                };
                let m = m.as_deref().map(rat).transpose()?.unwrap_or_else(Q::zero);
                Ok(Tensor::Flat(ConcircularTensor::new(sp, a, w, m)?))
            }
            CtSpec::Spherical { kappa, .. } => Ok(Tensor::Spherical(SphericalCT::new(sp, rat(kappa)?, a)?)),
        }
    }
}

/// Calogero-Moser potential parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CalogeroMoserSpec {
    /// Number of particles.
    pub n: usize,
    /// Masses, all one by default.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub masses: Option<Vec<String>>,
    /// Pair couplings, all one by default.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub couplings: Option<Vec<String>>,
}

/// A potential file: either `{"calogero_moser": {...}}` or
/// `{"dim": n, "terms": [...]}`, with an optional space and an optional
/// hyperquadric (`kappa` and a base `point` on it).
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PotentialDocument {
    /// Ambient space; `--space` takes precedence.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub space: Option<SpaceSpec>,
    /// Calogero-Moser system.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub calogero_moser: Option<CalogeroMoserSpec>,
    /// Number of variables of an explicit potential.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    /// Terms of an explicit potential.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub terms: Option<Vec<PotentialTermSpec>>,
    /// Curvature of the hyperquadric for a spherical problem.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappa: Option<String>,
    /// Base point on the hyperquadric.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub point: Option<Vec<String>>,
}

/// A parsed separation problem.
#[derive(Clone, Debug)]
pub struct SeparationProblem {
    /// Potential.
    pub potential: crate::bekm::Potential,
    /// Ambient space.
    pub space: Space,
    /// Hyperquadric curvature and base point.
    pub sphere: Option<(Q, Vec<Q>)>,
}

impl PotentialDocument {
    /// Builds the potential and its space.
    pub fn build(&self, space: Option<&Space>) -> Result<SeparationProblem> {
        let dim = match (&self.calogero_moser, self.dim) {
            (Some(cm), None) => cm.n,
            (None, Some(d)) => d,
            _ => return Err(Error::Schema("give exactly one of \"calogero_moser\" and \"dim\"/\"terms\"".into())),
        };
        let sp = match (space, &self.space) {
            (Some(s), _) => s.clone(),
            (None, Some(s)) => s.build()?,
            (None, None) => Space::euclidean(dim),
        };
        let potential = match &self.calogero_moser {
            Some(cm) => {
                let masses = cm.masses.as_deref().map(rat_vec).transpose()?;
                let couplings = cm.couplings.as_deref().map(rat_vec).transpose()?;
                calogero_moser(cm.n, masses.as_deref(), couplings.as_deref())?
            }
            None => PotentialSpec { dim, terms: self.terms.clone().unwrap_or_default() }.build(&sp)?,
        };
        let sphere = match (&self.kappa, &self.point) {
            (Some(k), Some(p)) => Some((rat(k)?, rat_vec(p)?)),
            (None, None) => None,
            _ => return Err(Error::Schema("\"kappa\" and \"point\" go together".into())),
        };
        Ok(SeparationProblem { potential, space: sp, sphere })
    }
}

/// Enumeration input: a structure spec or a named catalogue.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum EnumerateInput {
    /// `{"catalogue": "e3"}`.
    Catalogue {
        /// Catalogue name.
        catalogue: String,
    },
    /// A structure spec.
    Spec(StructureSpec),
}

// ------------------------------------------------------------------ outputs

/// Flat tensor parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlatParamsOut {
    /// Parameter matrix.
    pub a: Vec<Vec<String>>,
    /// Vector parameter.
    pub w: Vec<String>,
    /// Scalar parameter.
    pub m: String,
}

impl FlatParamsOut {
    fn of(a: &QMat, w: &[Q], m: &Q) -> Self {
        FlatParamsOut { a: mat_out(a), w: vec_out(w), m: fmt_q(m) }
    }
}

/// One metric-Jordan block.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlockOut {
    /// Eigenvalue, exact.
    pub lambda: String,
    /// Block size.
    pub size: usize,
    /// Sign.
    pub eps: i32,
}

fn blocks_out(f: &MetricJordanForm) -> Vec<BlockOut> {
    f.blocks.iter().map(|b| BlockOut { lambda: b.lambda.to_string(), size: b.k, eps: b.eps }).collect()
}

/// Result of `classify`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassifyOutput {
    /// `flat` or `spherical`.
    pub setting: String,
    /// Variant label (flat tensors).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub variant: Option<String>,
    /// Index `k`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub index_k: Option<usize>,
    /// Sign `ε`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sign_eps: Option<i32>,
    /// Translation `v` moving the tensor to canonical form.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub translation: Option<Vec<String>>,
    /// Scale of the canonical form.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scale: Option<String>,
    /// Leading invariant.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub leading: Option<String>,
    /// Canonical representative.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub canonical: Option<FlatParamsOut>,
    /// Metric-Jordan blocks of the complement (flat) or of `A` (spherical).
    pub iso_form: Vec<BlockOut>,
    /// Geometric class label.
    pub class: String,
}

/// Classifies a tensor.
pub fn classify(t: &Tensor) -> Result<ClassifyOutput> {
    match t {
        Tensor::Flat(l) => {
            let c = canonicalize(l)?;
            let class = if c.variant == Variant::DegenerateNullAxial { "degenerate".to_string() } else { flat_class(l)?.label() };
            Ok(ClassifyOutput {
                setting: "flat".into(),
                variant: Some(c.variant.label().into()),
                index_k: c.index_k,
                sign_eps: c.sign_eps,
                translation: Some(vec_out(&c.translation)),
                scale: Some(fmt_q(&c.scale)),
                leading: Some(fmt_q(&c.leading)),
                canonical: Some(FlatParamsOut::of(c.canonical.a(), c.canonical.w(), c.canonical.m())),
                iso_form: blocks_out(&c.iso_form),
                class,
            })
        }
        Tensor::Spherical(s) => Ok(ClassifyOutput {
            setting: "spherical".into(),
            variant: None,
            index_k: None,
            sign_eps: None,
            translation: None,
            scale: None,
            leading: None,
            canonical: None,
            iso_form: blocks_out(&metric_jordan_form(s.space(), s.a())?),
            class: spherical_class(s)?.label(),
        }),
    }
}

/// Constant eigenvalue with its multiplicity.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstantEigOut {
    /// Eigenvalue.
    pub lambda: String,
    /// Multiplicity as a root of the characteristic polynomial.
    pub multiplicity: usize,
}

/// Result of `charpoly`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CharpolyOutput {
    /// Variable names, spectral variable last.
    pub variables: Vec<String>,
    /// `det(z I − L)` of the canonical form.
    pub charpoly: String,
    /// Whether the closed formula equals the determinant expansion.
    pub matches_determinant: bool,
    /// Constant eigenfunctions.
    pub constant_eigenvalues: Vec<ConstantEigOut>,
}

fn var_names(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("x{i}")).collect()
}

fn charpoly_report(p: &CharPoly, oracle: &CharPoly, consts: Vec<ConstantEigenvalue>, n: usize) -> CharpolyOutput {
    let names = var_names(n);
    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
    let mut variables = names.clone();
    variables.push("z".into());
    CharpolyOutput {
        variables,
        charpoly: p.render(&refs),
        matches_determinant: p == oracle,
        constant_eigenvalues: consts
            .into_iter()
            .map(|c| ConstantEigOut { lambda: c.lambda.to_string(), multiplicity: c.multiplicity })
            .collect(),
    }
}

/// Characteristic polynomial of the canonical form.
pub fn charpoly(t: &Tensor) -> Result<CharpolyOutput> {
    match t {
        Tensor::Flat(l) => {
            let c = canonicalize(l)?;
            let can = &c.canonical;
            let oracle = charpoly_bruteforce(can)?;
            let p = match c.variant {
                Variant::Central => charpoly_central_ct(can)?,
                Variant::AxialNonNull | Variant::AxialNull => charpoly_axial(can)?,
                _ => oracle.clone(),
            };
            Ok(charpoly_report(&p, &oracle, constant_eigenfunctions(can)?, l.dim()))
        }
        Tensor::Spherical(s) => {
            let p = charpoly_spherical(s)?;
            let oracle = charpoly_bruteforce(s)?;
            Ok(charpoly_report(&p, &oracle, constant_eigenfunctions_spherical(s)?, s.dim()))
        }
    }
}

fn chart_data(t: &Tensor) -> Result<(IctData, Option<Vec<String>>)> {
    match t {
        Tensor::Flat(l) => {
            let c = canonicalize(l)?;
            if !matches!(c.variant, Variant::Central | Variant::AxialNonNull) {
                return Err(Error::Unsupported(format!("no chart for the {} variant", c.variant.label())));
            }
            Ok((ict_data(&c.canonical)?, Some(vec_out(&c.translation))))
        }
        Tensor::Spherical(s) => Ok((IctData::spherical(s)?, None)),
    }
}

/// Result of `chart`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChartOutput {
    /// Chart family.
    pub family: String,
    /// Translation to canonical form (flat tensors).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub translation: Option<Vec<String>>,
    /// Domain conditions on the canonical coordinates.
    pub domain: Vec<String>,
    /// Canonical coordinates.
    pub u: Vec<String>,
    /// Exact `(x^i)²` of the positive branch.
    pub x_squared: Vec<String>,
    /// Floating-point point of the positive branch.
    pub x: Vec<f64>,
    /// Whether the eigenvalues at `x` are exactly `u`.
    pub verified: bool,
    /// Diagonal metric `g(∂_u, ∂_u)`, exact.
    pub metric: Vec<String>,
}

/// Evaluates the chart of `t` at `u`.
pub fn chart(t: &Tensor, u: &[Q]) -> Result<ChartOutput> {
    let (data, translation) = chart_data(t)?;
    let family = data.kind().label().to_string();
    let ch = Chart::new(data);
    let x = ch.forward(u, &Branch::Positive)?;
    let verified = ch.verify(u, &x).is_ok();
    Ok(ChartOutput {
        family,
        translation,
        domain: ch.domain_constraints(),
        u: vec_out(u),
        x_squared: vec_out(&x.squares()),
        x: x.to_f64(),
        verified,
        metric: vec_out(&ch.metric(u)?),
    })
}

/// Result of `metric`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricOutput {
    /// Canonical coordinates.
    pub u: Vec<String>,
    /// Closed-form diagonal metric, exact.
    pub closed_form: Vec<String>,
    /// Jacobian pullback of the ambient metric.
    pub pullback: Vec<Vec<f64>>,
    /// Largest entry of the difference, relative to the largest diagonal
    /// entry.
    pub relative_defect: f64,
}

/// Closed-form metric at `u` against the numerical pullback.
pub fn metric(t: &Tensor, u: &[Q]) -> Result<MetricOutput> {
    let (data, _) = chart_data(t)?;
    let ch = Chart::new(data);
    let closed = ch.metric(u)?;
    let pull = ch.pullback_metric(u, &Branch::Positive)?;
    let cf: Vec<f64> = closed.iter().map(crate::number::q_to_f64).collect();
    let scale = cf.iter().fold(0.0f64, |m, g| m.max(g.abs()));
    let mut defect = 0.0f64;
    for (i, row) in pull.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            let e = if i == j { cf[i] } else { 0.0 };
            defect = defect.max((v - e).abs() / scale);
        }
    }
    Ok(MetricOutput { u: vec_out(u), closed_form: vec_out(&closed), pullback: pull, relative_defect: defect })
}

/// One spherical factor of a decomposition.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FactorOut {
    /// Basis of `V_i`.
    pub basis: Vec<Vec<String>>,
    /// Axis `a_i`.
    pub axis: Vec<String>,
    /// `non_null` or `null`.
    pub kind: String,
    /// `κ_i = a_i²` for non-null axes.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kappa: Option<String>,
    /// Auxiliary lightlike vector for null axes.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b: Option<Vec<String>>,
    /// Constant eigenvalue of `L` on the factor.
    pub constant_eigenvalue: String,
}

/// Result of `warp`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WarpOutput {
    /// Base point `p̄`.
    pub base: Vec<String>,
    /// Basis of `V_0`.
    pub v0: Vec<Vec<String>>,
    /// Curvature of the ambient hyperquadric.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sphere_kappa: Option<String>,
    /// Spherical factors.
    pub factors: Vec<FactorOut>,
    /// The map `ψ`.
    pub psi: String,
    /// Inequalities cutting out the image.
    pub image: Vec<String>,
    /// Restricted tensor on the geodesic factor, in the basis `v0`.
    pub restricted: FlatParamsOut,
}

fn psi_formula(split: &ReducibleSplit) -> String {
    let mut s = "ψ(p_0, p_1, …) = p_0".to_string();
    for (i, f) in split.wpd.factors().iter().enumerate() {
        let j = i + 1;
        match f.kind {
            AxisKind::NonNull { .. } => {
                let _ = write!(s, " + <a_{j}, p_0> (p_{j} − a_{j}/κ_{j})");
            }
            AxisKind::Null { .. } => {
                let _ = write!(s, " + <a_{j}, p_0> (p_{j} − ½<p_{j}, p_{j}> a_{j})");
            }
        }
    }
    s
}

/// Warped-product decomposition of a reducible tensor at `base`.
pub fn warp(t: &Tensor, base: &[Q]) -> Result<WarpOutput> {
    let split = match t {
        Tensor::Flat(l) => split_reducible(l, base)?,
        Tensor::Spherical(s) => split_reducible_spherical(s, base)?,
    };
    let wpd = &split.wpd;
    let factors = wpd
        .factors()
        .iter()
        .zip(&split.constant_eigs)
        .map(|(f, (lam, _))| {
            let (kind, kappa, b) = match &f.kind {
                AxisKind::NonNull { kappa } => ("non_null", Some(fmt_q(kappa)), None),
                AxisKind::Null { b } => ("null", None, Some(vec_out(b))),
            };
            FactorOut {
                basis: f.basis.iter().map(|v| vec_out(v)).collect(),
                axis: vec_out(&f.axis),
                kind: kind.into(),
                kappa,
                b,
                constant_eigenvalue: fmt_q(lam),
            }
        })
        .collect();
    let r = &split.restricted;
    Ok(WarpOutput {
        base: vec_out(wpd.base()),
        v0: wpd.v0().iter().map(|v| vec_out(v)).collect(),
        sphere_kappa: wpd.sphere_kappa().map(fmt_q),
        factors,
        psi: psi_formula(&split),
        image: wpd.image_conditions(),
        restricted: FlatParamsOut::of(r.a(), r.w(), r.m()),
    })
}

/// A separation tree as JSON.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TreeOut {
    /// Ambient metric.
    pub metric: Vec<Vec<String>>,
    /// Hyperquadric curvature.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kappa: Option<String>,
    /// Dimension of the KBD solution space including the metric.
    pub solution_dim: usize,
    /// Basis of the solutions modulo the metric.
    pub solutions: Vec<FlatParamsOut>,
    /// Branches.
    pub branches: Vec<BranchOut>,
}

/// One branch of a separation tree.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BranchOut {
    /// Class label.
    pub class: String,
    /// Representative solution: flat parameters.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub representative: Option<FlatParamsOut>,
    /// Representative solution: spherical parameter matrix.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub representative_matrix: Option<Vec<Vec<String>>>,
    /// Coordinate systems of the branch.
    pub coordinates: Vec<String>,
    /// Node.
    pub node: NodeOut,
}

/// A node of a separation tree.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "node", rename_all = "snake_case")]
pub enum NodeOut {
    /// Irreducible tensor.
    Leaf {
        /// Chart family.
        chart: String,
        /// Dimension.
        dim: usize,
    },
    /// Warped-product split.
    Split {
        /// Chart of the geodesic factor.
        geodesic_chart: String,
        /// Dimension of the geodesic factor.
        geodesic_dim: usize,
        /// Constant eigenvalues.
        constant_eigenvalues: Vec<String>,
        /// Factor problems.
        factors: Vec<FactorProblemOut>,
    },
    /// Product along eigenspaces of a constant tensor.
    Product {
        /// Eigenvalues.
        eigenvalues: Vec<String>,
        /// Factor problems.
        factors: Vec<FactorProblemOut>,
    },
    /// Not resolved.
    Unresolved {
        /// Reason.
        reason: String,
    },
}

/// A factor problem.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FactorProblemOut {
    /// Dimension.
    pub dim: usize,
    /// Lightlike warping axis.
    pub null_axis: bool,
    /// Basis of the span containing the factor.
    pub span: Vec<Vec<String>>,
    /// Restricted potential.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub potential: Option<String>,
    /// Child tree.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub child: Option<Box<TreeOut>>,
    /// Note.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

fn params_out(p: &CtParams) -> FlatParamsOut {
    FlatParamsOut::of(&p.a, &p.w, &p.m)
}

fn factor_out(f: &FactorProblem) -> FactorProblemOut {
    FactorProblemOut {
        dim: f.dim,
        null_axis: f.null_axis,
        span: f.span.iter().map(|v| vec_out(v)).collect(),
        potential: f.potential.as_ref().map(|p| p.render()),
        child: f.child.as_ref().map(|c| Box::new(tree_out(c))),
        note: f.note.clone(),
    }
}

/// Converts a separation tree to its JSON form.
pub fn tree_out(t: &SeparationTree) -> TreeOut {
    TreeOut {
        metric: mat_out(t.space.metric()),
        kappa: t.kappa.as_ref().map(fmt_q),
        solution_dim: t.solution_dim,
        solutions: t.solutions.iter().map(params_out).collect(),
        branches: t
            .branches
            .iter()
            .map(|b| {
                let (representative, representative_matrix) = match &b.representative {
                    Representative::Flat(p) => (Some(params_out(p)), None),
                    Representative::Spherical(a) => (None, Some(mat_out(a))),
                };
                let node = match &b.node {
                    SeparationNode::Leaf { chart, dim } => NodeOut::Leaf { chart: chart.clone(), dim: *dim },
                    SeparationNode::Split { geodesic_chart, geodesic_dim, constant_eigs, factors, .. } => NodeOut::Split {
                        geodesic_chart: geodesic_chart.clone(),
                        geodesic_dim: *geodesic_dim,
                        constant_eigenvalues: vec_out(constant_eigs),
                        factors: factors.iter().map(factor_out).collect(),
                    },
                    SeparationNode::Product { eigenvalues, factors } => NodeOut::Product {
                        eigenvalues: vec_out(eigenvalues),
                        factors: factors.iter().map(factor_out).collect(),
                    },
                    SeparationNode::Unresolved { reason } => NodeOut::Unresolved { reason: reason.clone() },
                };
                BranchOut { class: b.class.label(), representative, representative_matrix, coordinates: b.coordinates.clone(), node }
            })
            .collect(),
    }
}

/// Result of `separate`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeparateOutput {
    /// Rendered potential.
    pub potential: String,
    /// Class families (labels with sorted patterns).
    pub families: Vec<String>,
    /// The tree.
    pub tree: TreeOut,
    /// Human-readable report.
    pub report: String,
}

/// Runs the separation algorithm.
pub fn separate(p: &SeparationProblem, seed: u64) -> Result<SeparateOutput> {
    let opts = SeparationOptions { seed, ..SeparationOptions::default() };
    let tree = match &p.sphere {
        None => bekm_separate(&p.potential, &p.space, &opts)?,
        Some((k, pt)) => bekm_separate_spherical(&p.potential, &p.space, k, pt, &opts)?,
    };
    Ok(SeparateOutput { potential: p.potential.render(), families: tree.families(), tree: tree_out(&tree), report: tree.report() })
}

/// One enumerated class.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassOut {
    /// Label of the eigenvalue assignment or web.
    pub label: String,
    /// Class of the inducing tensor (catalogue entries).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tensor_class: Option<String>,
    /// Ambient metric of the representative.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub metric: Option<Vec<Vec<String>>>,
    /// Representative parameter matrix.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a: Option<Vec<Vec<String>>>,
    /// Curvature for spherical representatives.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kappa: Option<String>,
}

/// Result of `enumerate`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnumerateOutput {
    /// Number of classes.
    pub count: usize,
    /// Classes with representatives.
    pub classes: Vec<ClassOut>,
}

fn class_out(label: String, t: &EnumeratedTensor) -> ClassOut {
    match t {
        EnumeratedTensor::Flat(l) => {
            ClassOut { label, tensor_class: None, metric: Some(mat_out(l.space().metric())), a: Some(mat_out(l.a())), kappa: None }
        }
        EnumeratedTensor::Spherical(s) => ClassOut {
            label,
            tensor_class: None,
            metric: Some(mat_out(s.space().metric())),
            a: Some(mat_out(s.a())),
            kappa: Some(fmt_q(s.kappa())),
        },
    }
}

/// Enumerates classes.
pub fn enumerate(input: &EnumerateInput) -> Result<EnumerateOutput> {
    let classes: Vec<ClassOut> = match input {
        EnumerateInput::Catalogue { catalogue } if catalogue == "e3" => enumerate_webs_e3()?
            .into_iter()
            .map(|w| ClassOut { label: w.label, tensor_class: Some(w.tensor_class), metric: None, a: None, kappa: None })
            .collect(),
        EnumerateInput::Catalogue { catalogue } => return Err(Error::Schema(format!("unknown catalogue {catalogue:?}"))),
        EnumerateInput::Spec(spec) => enumerate_classes(spec)?.iter().map(|c| class_out(c.assignment.clone(), &c.tensor)).collect(),
    };
    Ok(EnumerateOutput { count: classes.len(), classes })
}

/// One criterion verdict.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriterionOut {
    /// Criterion number.
    pub id: u8,
    /// Title.
    pub title: String,
    /// Verdict.
    pub passed: bool,
    /// Detail.
    pub detail: String,
}

/// Result of `selftest`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SelftestOutput {
    /// Whether every criterion passed.
    pub passed: bool,
    /// Verdicts.
    pub criteria: Vec<CriterionOut>,
}

/// Runs the acceptance checks. Timings are left out so that output is
/// deterministic.
pub fn run_selftest(seed: u64) -> SelftestOutput {
    let criteria: Vec<CriterionOut> = selftest::run_all(seed)
        .into_iter()
        .map(|r| CriterionOut { id: r.id, title: r.title.into(), passed: r.passed, detail: r.detail })
        .collect();
    SelftestOutput { passed: criteria.iter().all(|c| c.passed), criteria }
}

// ------------------------------------------------------------------ errors

/// Process exit code for an error: 2 schema, 3 domain, 4 unsupported
/// scope, 1 otherwise.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Schema(_) => 2,
        Error::Domain(_)
        | Error::Precondition(_)
        | Error::DimensionMismatch(_)
        | Error::InvalidMetric(_)
        | Error::NotSelfAdjoint
        | Error::NotOrthogonal(_)
        | Error::NotReducible(_)
        | Error::Trivial => 3,
        Error::Unsupported(_) => 4,
        Error::Verification(_) | Error::Precision(_) | Error::Internal(_) => 1,
    }
}

/// Machine-readable error code.
pub fn error_code(e: &Error) -> &'static str {
    match e {
        Error::Schema(_) => "schema",
        Error::Domain(_) => "domain",
        Error::Precondition(_) => "precondition",
        Error::DimensionMismatch(_) => "dimension_mismatch",
        Error::InvalidMetric(_) => "invalid_metric",
        Error::NotSelfAdjoint => "not_self_adjoint",
        Error::NotOrthogonal(_) => "not_orthogonal",
        Error::NotReducible(_) => "not_reducible",
        Error::Trivial => "trivial",
        Error::Unsupported(_) => "unsupported",
        Error::Verification(_) => "verification",
        Error::Precision(_) => "precision",
        Error::Internal(_) => "internal",
    }
}

/// Error document written to standard error.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErrorOutput {
    /// Machine-readable code.
    pub code: String,
    /// Exit status.
    pub exit: i32,
    /// Message.
    pub message: String,
}

impl From<&Error> for ErrorOutput {
    fn from(e: &Error) -> Self {
        ErrorOutput { code: error_code(e).into(), exit: exit_code(e), message: e.to_string() }
    }
}

/// Parses JSON into `T`, mapping failures to schema errors.
pub fn from_json<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Schema(e.to_string()))
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("output documents serialize");
    s.push('\n');
    s
}

// ------------------------------------------------------------------ jobs

/// Subcommand of a job.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Command {
    /// Canonical form and class of a tensor.
    Classify,
    /// Characteristic polynomial of the canonical form.
    Charpoly,
    /// Chart at canonical coordinates.
    Chart,
    /// Metric in canonical coordinates.
    Metric,
    /// Warped-product decomposition at a base point.
    Warp,
    /// Separation tree of a potential.
    Separate,
    /// Class enumeration.
    Enumerate,
    /// Acceptance checks.
    Selftest,
}

/// Output format.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Format {
    /// Pretty JSON.
    #[default]
    Json,
    /// Human-readable report.
    Text,
}

/// One invocation: a command, its inputs and a seed.
#[derive(Clone, Debug, PartialEq)]
pub struct Job {
    /// Command.
    pub command: Command,
    /// Space file.
    pub space: Option<String>,
    /// Tensor file.
    pub ct: Option<String>,
    /// Potential file.
    pub potential: Option<String>,
    /// Enumeration spec file.
    pub spec: Option<String>,
    /// Canonical coordinates for `chart` and `metric`.
    pub u: Option<String>,
    /// Base point for `warp`.
    pub base: Option<String>,
    /// Seed of every random choice.
    pub seed: u64,
}

impl Job {
    /// A job with no inputs and seed 0.
    pub fn new(command: Command) -> Self {
        Job { command, space: None, ct: None, potential: None, spec: None, u: None, base: None, seed: 0 }
    }
}

/// Both renderings of a job result.
#[derive(Clone, Debug, PartialEq)]
pub struct Artifact {
    /// JSON document.
    pub json: String,
    /// Human-readable report.
    pub text: String,
    /// Whether the job's own verdict is positive (false when a selftest
    /// criterion fails).
    pub ok: bool,
}

impl Artifact {
    /// The rendering for `format`.
    pub fn render(&self, format: Format) -> &str {
        match format {
            Format::Json => &self.json,
            Format::Text => &self.text,
        }
    }
}

fn read(path: &Option<String>, what: &str) -> Result<String> {
    let p = path.as_ref().ok_or_else(|| Error::Schema(format!("--{what} is required")))?;
    std::fs::read_to_string(p).map_err(|e| Error::Schema(format!("cannot read {p}: {e}")))
}

fn text_of(v: &serde_json::Value, indent: usize, out: &mut String) {
    let pad = "  ".repeat(indent);
    match v {
        serde_json::Value::Object(map) => {
            for (k, x) in map {
                if !is_flat(x) {
                    let _ = writeln!(out, "{pad}{k}:");
                    text_of(x, indent + 1, out);
                } else {
                    let _ = writeln!(out, "{pad}{k}: {}", scalar_text(x));
                }
            }
        }
        serde_json::Value::Array(items) => {
            for x in items {
                if !is_flat(x) {
                    let _ = writeln!(out, "{pad}-");
                    text_of(x, indent + 1, out);
                } else {
                    let _ = writeln!(out, "{pad}- {}", scalar_text(x));
                }
            }
        }
        _ => {
            let _ = writeln!(out, "{pad}{}", scalar_text(v));
        }
    }
}

/// Scalars and arrays of scalars print on one line.
fn is_flat(v: &serde_json::Value) -> bool {
    match v {
        serde_json::Value::Object(_) => false,
        serde_json::Value::Array(a) => a.iter().all(|e| !e.is_object() && !e.is_array()),
        _ => true,
    }
}

fn scalar_text(v: &serde_json::Value) -> String {
    match v {
        serde_json::Value::String(s) => s.clone(),
        serde_json::Value::Array(a) => format!("[{}]", a.iter().map(scalar_text).collect::<Vec<_>>().join(", ")),
        other => other.to_string(),
    }
}

fn generic<T: Serialize>(value: &T) -> Artifact {
    let json = to_json(value);
    let mut text = String::new();
    text_of(&serde_json::to_value(value).expect("serializable"), 0, &mut text);
    Artifact { json, text, ok: true }
}

/// Runs a job. Equal jobs give byte-identical artifacts.
pub fn run(job: &Job) -> Result<Artifact> {
    let space = job.space.as_ref().map(|_| read(&job.space, "space").and_then(|s| from_json::<SpaceSpec>(&s)?.build())).transpose()?;
    let tensor = || -> Result<Tensor> { from_json::<CtDocument>(&read(&job.ct, "ct")?)?.build(space.as_ref()) };
    let coords = |v: &Option<String>, what: &str| -> Result<Vec<Q>> {
        rat_list(v.as_deref().ok_or_else(|| Error::Schema(format!("--{what} is required")))?)
    };
    match job.command {
        Command::Classify => Ok(generic(&classify(&tensor()?)?)),
        Command::Charpoly => Ok(generic(&charpoly(&tensor()?)?)),
        Command::Chart => Ok(generic(&chart(&tensor()?, &coords(&job.u, "u")?)?)),
        Command::Metric => Ok(generic(&metric(&tensor()?, &coords(&job.u, "u")?)?)),
        Command::Warp => Ok(generic(&warp(&tensor()?, &coords(&job.base, "base")?)?)),
        Command::Separate => {
            let problem = from_json::<PotentialDocument>(&read(&job.potential, "potential")?)?.build(space.as_ref())?;
            let out = separate(&problem, job.seed)?;
            let text = format!("V = {}\n{}", out.potential, out.report);
            Ok(Artifact { json: to_json(&out), text, ok: true })
        }
        Command::Enumerate => {
            let out = enumerate(&from_json::<EnumerateInput>(&read(&job.spec, "spec")?)?)?;
            let mut text = format!("{} classes\n", out.count);
            for c in &out.classes {
                let _ = writeln!(text, "- {}{}", c.label, c.tensor_class.as_ref().map(|t| format!(" ({t})")).unwrap_or_default());
            }
            Ok(Artifact { json: to_json(&out), text, ok: true })
        }
        Command::Selftest => {
            let out = run_selftest(job.seed);
            let mut text = String::new();
            for c in &out.criteria {
                let _ = writeln!(text, "{} [{}] {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.id, c.title, c.detail);
            }
            Ok(Artifact { json: to_json(&out), text, ok: out.passed })
        }
    }
}

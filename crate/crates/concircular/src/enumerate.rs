//! Enumeration of geometrically inequivalent concircular tensors from an
//! eigenvalue-structure specification.
//!
//! A specification lists the eigenvalue slots (multiplicity, Jordan block
//! sizes, real or complex). Every ordering of the slots on the eigenvalues
//! `0, 1, 2, …` and every sign assignment compatible with the requested
//! index is instantiated, and the candidates are quotiented by geometric
//! equivalence.

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::bekm::{bekm_separate, Potential, SeparationOptions};
use crate::ct::{geo_equivalent, spherical_geo_equivalent, ConcircularTensor, SphericalCT};
use crate::error::{Error, Result};
use crate::linalg::Space;
use crate::matrix::QMat;
use crate::number::{q, qf, Q};

/// Ambient manifold of a specification.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Ambient {
    /// Pseudo-Euclidean space.
    Flat,
    /// Central hyperquadric `<p, p> = 1/κ` with `κ = kappa_sign`.
    Spherical {
        /// Sign of the curvature (`1` or `-1`).
        kappa_sign: i32,
    },
}

/// Variant of the flat tensors to enumerate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VariantFilter {
    /// `L = A + r⊙r`.
    Central,
    /// `L = A + 2 w⊙r` with `<w, w> = eps`; the slots describe `A` on `w⊥`.
    Axial {
        /// Sign of `<w, w>`; both signs when absent.
        eps: Option<i32>,
    },
    /// `L = A`.
    Cartesian,
}

/// One eigenvalue of a specification.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EigenSlot {
    /// Algebraic multiplicity (for a complex slot, of each of `λ` and `λ̄`).
    pub multiplicity: usize,
    /// Whether the slot is a non-real conjugate pair.
    #[serde(default)]
    pub complex: bool,
    /// Jordan block sizes; all ones when empty.
    #[serde(default)]
    pub jordan: Vec<usize>,
    /// Fixed signs of the Jordan blocks; free when absent.
    #[serde(default)]
    pub eps: Option<Vec<i32>>,
}

impl EigenSlot {
    /// Semisimple real eigenvalue of the given multiplicity.
    pub fn real(multiplicity: usize) -> Self {
        EigenSlot { multiplicity, complex: false, jordan: vec![], eps: None }
    }

    /// Single Jordan block of size `k`, with an optional fixed sign.
    pub fn jordan(k: usize, eps: Option<i32>) -> Self {
        EigenSlot { multiplicity: k, complex: false, jordan: vec![k], eps: eps.map(|e| vec![e]) }
    }

    /// Simple non-real conjugate pair.
    pub fn complex_pair() -> Self {
        EigenSlot { multiplicity: 1, complex: true, jordan: vec![], eps: None }
    }

    fn blocks(&self) -> Vec<usize> {
        if self.jordan.is_empty() {
            vec![1; self.multiplicity]
        } else {
            self.jordan.clone()
        }
    }

    fn dim(&self) -> usize {
        if self.complex {
            2 * self.multiplicity
        } else {
            self.multiplicity
        }
    }
}

/// Eigenvalue-structure specification.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StructureSpec {
    /// Ambient manifold.
    pub ambient: Ambient,
    /// Index of the ambient metric (0 or 1).
    pub nu: usize,
    /// Variant of flat tensors; ignored for hyperquadrics.
    #[serde(default = "default_variant")]
    pub variant: VariantFilter,
    /// Eigenvalue slots.
    pub pattern: Vec<EigenSlot>,
}

fn default_variant() -> VariantFilter {
    VariantFilter::Central
}

impl StructureSpec {
    /// Flat central tensors with the given slots.
    pub fn central(nu: usize, pattern: Vec<EigenSlot>) -> Self {
        StructureSpec { ambient: Ambient::Flat, nu, variant: VariantFilter::Central, pattern }
    }

    /// Spherical tensors on `<p, p> = 1/κ`, `κ = kappa_sign`.
    pub fn spherical(kappa_sign: i32, nu: usize, pattern: Vec<EigenSlot>) -> Self {
        StructureSpec { ambient: Ambient::Spherical { kappa_sign }, nu, variant: VariantFilter::Central, pattern }
    }

    /// `n` simple real eigenvalues.
    pub fn simple(n: usize) -> Vec<EigenSlot> {
        vec![EigenSlot::real(1); n]
    }

    /// One double eigenvalue and `n - 2` simple ones.
    pub fn one_double(n: usize) -> Vec<EigenSlot> {
        let mut p = vec![EigenSlot::real(2)];
        p.extend(vec![EigenSlot::real(1); n - 2]);
        p
    }

    /// Ambient dimension.
    pub fn ambient_dim(&self) -> usize {
        let extra = matches!((&self.ambient, self.variant), (Ambient::Flat, VariantFilter::Axial { .. })) as usize;
        self.pattern.iter().map(EigenSlot::dim).sum::<usize>() + extra
    }

    /// Checks that the specification is well formed.
    pub fn validate(&self) -> Result<()> {
        if self.pattern.is_empty() {
            return Err(Error::Schema("empty eigenvalue pattern".into()));
        }
        if self.nu > 1 {
            return Err(Error::Unsupported(format!("index {} (only 0 and 1 are supported)", self.nu)));
        }
        for s in &self.pattern {
            if s.multiplicity == 0 {
                return Err(Error::Schema("zero multiplicity".into()));
            }
            if !s.jordan.is_empty() && (s.jordan.iter().sum::<usize>() != s.multiplicity || s.jordan.contains(&0)) {
                return Err(Error::Schema("Jordan block sizes must be positive and sum to the multiplicity".into()));
            }
            if s.complex && s.blocks().iter().any(|&k| k > 1) {
                return Err(Error::Unsupported("Jordan blocks for complex eigenvalues".into()));
            }
            if let Some(e) = &s.eps {
                if e.len() != s.blocks().len() || e.iter().any(|x| x.abs() != 1) {
                    return Err(Error::Schema("one sign of ±1 per Jordan block".into()));
                }
            }
        }
        match &self.ambient {
            Ambient::Spherical { kappa_sign } => {
                if kappa_sign.abs() != 1 {
                    return Err(Error::Schema("kappa_sign must be ±1".into()));
                }
                if self.ambient_dim() < 3 {
                    return Err(Error::Precondition("hyperquadrics need ambient dimension at least 3".into()));
                }
                if *kappa_sign < 0 && self.nu == 0 {
                    return Err(Error::Precondition("<p, p> < 0 is empty in Euclidean space".into()));
                }
            }
            Ambient::Flat => {
                if let VariantFilter::Axial { eps: Some(e) } = self.variant {
                    if e.abs() != 1 {
                        return Err(Error::Schema("axial eps must be ±1".into()));
                    }
                }
            }
        }
        Ok(())
    }
}

/// An enumerated tensor.
#[derive(Clone, Debug, PartialEq)]
pub enum EnumeratedTensor {
    /// Flat concircular tensor.
    Flat(ConcircularTensor),
    /// Spherical concircular tensor.
    Spherical(SphericalCT),
}

impl EnumeratedTensor {
    /// Parameter matrix `A`.
    pub fn a(&self) -> &QMat {
        match self {
            EnumeratedTensor::Flat(l) => l.a(),
            EnumeratedTensor::Spherical(s) => s.a(),
        }
    }

    /// Ambient space.
    pub fn space(&self) -> &Space {
        match self {
            EnumeratedTensor::Flat(l) => l.space(),
            EnumeratedTensor::Spherical(s) => s.space(),
        }
    }

    /// Geometric equivalence with another enumerated tensor.
    pub fn geo_equivalent(&self, other: &EnumeratedTensor) -> Result<bool> {
        match (self, other) {
            (EnumeratedTensor::Flat(a), EnumeratedTensor::Flat(b)) => geo_equivalent(a, b),
            (EnumeratedTensor::Spherical(a), EnumeratedTensor::Spherical(b)) => spherical_geo_equivalent(a, b),
            _ => Ok(false),
        }
    }
}

/// A candidate or class representative with a description of its slot
/// assignment.
#[derive(Clone, Debug, PartialEq)]
pub struct ClassRepresentative {
    /// Eigenvalue order and signs, e.g. `0:(+) < 1:J2(-) < 2:(+,+)`.
    pub assignment: String,
    /// The tensor.
    pub tensor: EnumeratedTensor,
}

/// Distinct orderings of the slots, compared by value.
fn orderings(slots: &[EigenSlot]) -> Vec<Vec<EigenSlot>> {
    fn rec(rest: &mut Vec<EigenSlot>, cur: &mut Vec<EigenSlot>, out: &mut Vec<Vec<EigenSlot>>) {
        if rest.is_empty() {
            out.push(cur.clone());
            return;
        }
        let mut tried: Vec<EigenSlot> = Vec::new();
        for i in 0..rest.len() {
            if tried.contains(&rest[i]) {
                continue;
            }
            tried.push(rest[i].clone());
            let s = rest.remove(i);
            cur.push(s.clone());
            rec(rest, cur, out);
            cur.pop();
            rest.insert(i, s);
        }
    }
    let mut out = Vec::new();
    rec(&mut slots.to_vec(), &mut vec![], &mut out);
    out
}

/// Number of negative directions of `ε S_k`.
fn negatives(k: usize, eps: i32) -> usize {
    k / 2 + usize::from(k % 2 == 1 && eps < 0)
}

/// Block of the operator and the change of basis to an orthonormal frame.
struct Block {
    a: QMat,
    /// Columns: orthonormal basis vectors in block coordinates.
    p: QMat,
    /// Signs `<p_j, p_j>`.
    signs: Vec<i32>,
}

fn jordan_block(k: usize, lambda: &Q, eps: i32) -> Block {
    let mut a = QMat::zeros(k, k);
    for i in 0..k {
        a[(i, i)] = lambda.clone();
        if i + 1 < k {
            a[(i, i + 1)] = Q::one();
        }
    }
    // Metric ε S_k: pairs (i, k-1-i) give e_i ± ½ e_j with signs ±ε.
    let mut p = QMat::zeros(k, k);
    let mut signs = vec![0; k];
    let mut col = 0;
    for i in 0..k / 2 {
        let j = k - 1 - i;
        for (s, c) in [(1, qf(1, 2)), (-1, qf(-1, 2))] {
            p[(i, col)] = Q::one();
            p[(j, col)] = c;
            signs[col] = s * eps;
            col += 1;
        }
    }
    if k % 2 == 1 {
        p[(k / 2, col)] = Q::one();
        signs[col] = eps;
    }
    Block { a, p, signs }
}

fn complex_block(re: &Q, im: &Q) -> Block {
    // Metric diag(1, -1); g A is symmetric.
    let a = QMat::from_rows(vec![vec![re.clone(), im.clone()], vec![-im.clone(), re.clone()]]);
    Block { a, p: QMat::identity(2), signs: vec![1, -1] }
}

/// Assembles blocks into `A` on the standard space of matching index, with
/// the timelike direction (if any) first.
fn assemble(blocks: &[Block]) -> Result<(Space, QMat)> {
    let n: usize = blocks.iter().map(|b| b.signs.len()).sum();
    let mut a = QMat::zeros(n, n);
    let mut p = QMat::zeros(n, n);
    let mut signs = Vec::with_capacity(n);
    let mut off = 0;
    for b in blocks {
        let k = b.signs.len();
        for i in 0..k {
            for j in 0..k {
                a[(off + i, off + j)] = b.a[(i, j)].clone();
                p[(off + i, off + j)] = b.p[(i, j)].clone();
            }
        }
        signs.extend(b.signs.iter().copied());
        off += k;
    }
    // Order the frame: negative directions first.
    let mut order: Vec<usize> = (0..n).filter(|&i| signs[i] < 0).collect();
    order.extend((0..n).filter(|&i| signs[i] > 0));
    let cols: Vec<Vec<Q>> = order.iter().map(|&j| p.col(j)).collect();
    let frame = QMat::from_cols(&cols, n);
    let inv = frame.inverse().ok_or_else(|| Error::Internal("singular frame".into()))?;
    let a_std = &(&inv * &a) * &frame;
    let nu = signs.iter().filter(|&&s| s < 0).count();
    let space = match nu {
        0 => Space::euclidean(n),
        1 => Space::minkowski(n),
        _ => return Err(Error::Unsupported(format!("index {nu}"))),
    };
    Ok((space, a_std))
}

fn sign_char(e: i32) -> char {
    if e > 0 {
        '+'
    } else {
        '-'
    }
}

/// All slot and sign assignments compatible with the specification, before
/// quotienting.
pub fn enumerate_assignments(spec: &StructureSpec) -> Result<Vec<ClassRepresentative>> {
    spec.validate()?;
    let axial_eps: Vec<Option<i32>> = match (&spec.ambient, spec.variant) {
        (Ambient::Flat, VariantFilter::Axial { eps: Some(e) }) => vec![Some(e)],
        (Ambient::Flat, VariantFilter::Axial { eps: None }) => vec![Some(1), Some(-1)],
        _ => vec![None],
    };
    let mut out = Vec::new();
    for ordering in orderings(&spec.pattern) {
        // Sign choices per Jordan block of every real slot.
        let mut choices: Vec<Vec<i32>> = vec![vec![]];
        for slot in &ordering {
            if slot.complex {
                continue;
            }
            let nb = slot.blocks().len();
            let options: Vec<Vec<i32>> = match &slot.eps {
                Some(e) => vec![e.clone()],
                None => (0..1usize << nb).map(|m| (0..nb).map(|b| if m >> b & 1 == 1 { -1 } else { 1 }).collect()).collect(),
            };
            choices = choices
                .into_iter()
                .flat_map(|c| options.iter().map(move |o| [c.clone(), o.clone()].concat()))
                .collect();
        }
        for signs in &choices {
            for weps in &axial_eps {
                if let Some(rep) = instantiate(spec, &ordering, signs, *weps)? {
                    out.push(rep);
                }
            }
        }
    }
    Ok(out)
}

/// Builds one candidate, or `None` when the signs do not match the index.
fn instantiate(
    spec: &StructureSpec,
    ordering: &[EigenSlot],
    signs: &[i32],
    axial_eps: Option<i32>,
) -> Result<Option<ClassRepresentative>> {
    let mut blocks = Vec::new();
    let mut neg = 0usize;
    let mut desc = Vec::new();
    let mut si = 0;
    if let Some(e) = axial_eps {
        let mut b = jordan_block(1, &Q::zero(), e);
        b.a = QMat::zeros(1, 1);
        neg += usize::from(e < 0);
        blocks.push(b);
        desc.push(format!("w({})", sign_char(e)));
    }
    for (pos, slot) in ordering.iter().enumerate() {
        let lambda = q(pos as i64);
        if slot.complex {
            for _ in 0..slot.multiplicity {
                blocks.push(complex_block(&lambda, &Q::one()));
                neg += 1;
            }
            desc.push(format!("{pos}±i"));
            continue;
        }
        let mut parts = Vec::new();
        for &k in &slot.blocks() {
            let e = signs[si];
            si += 1;
            neg += negatives(k, e);
            blocks.push(jordan_block(k, &lambda, e));
            parts.push(if k > 1 { format!("J{k}{}", sign_char(e)) } else { sign_char(e).to_string() });
        }
        desc.push(format!("{pos}:({})", parts.join(",")));
    }
    if neg != spec.nu {
        return Ok(None);
    }
    let (space, a) = assemble(&blocks)?;
    let tensor = match (&spec.ambient, spec.variant) {
        (Ambient::Spherical { kappa_sign }, _) => EnumeratedTensor::Spherical(SphericalCT::new(space, q(*kappa_sign as i64), a)?),
        (Ambient::Flat, VariantFilter::Central) => EnumeratedTensor::Flat(ConcircularTensor::central(space, a)?),
        (Ambient::Flat, VariantFilter::Cartesian) => EnumeratedTensor::Flat(ConcircularTensor::constant(space, a)?),
        (Ambient::Flat, VariantFilter::Axial { .. }) => {
            // The w line is the first block; find its image in the frame.
            let n = space.dim();
            let e = axial_eps.expect("axial sign");
            let idx = if e < 0 { 0 } else { spec.nu };
            let mut w = vec![Q::zero(); n];
            w[idx] = Q::one();
            EnumeratedTensor::Flat(ConcircularTensor::axial(space, a, w)?)
        }
    };
    Ok(Some(ClassRepresentative { assignment: desc.join(" < "), tensor }))
}

/// One representative per geometric equivalence class.
pub fn enumerate_classes(spec: &StructureSpec) -> Result<Vec<ClassRepresentative>> {
    let mut classes: Vec<ClassRepresentative> = Vec::new();
    for cand in enumerate_assignments(spec)? {
        let mut new = true;
        for c in &classes {
            if c.tensor.geo_equivalent(&cand.tensor)? {
                new = false;
                break;
            }
        }
        if new {
            classes.push(cand);
        }
    }
    if classes.is_empty() {
        return Err(Error::Precondition("no assignment is compatible with the requested index".into()));
    }
    Ok(classes)
}

/// Number of geometric equivalence classes.
pub fn count_classes(spec: &StructureSpec) -> Result<usize> {
    enumerate_classes(spec).map(|c| c.len())
}

/// A class of separable webs in Euclidean 3-space.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WebClass {
    /// Name of the coordinate system.
    pub label: String,
    /// Class of the concircular tensor that induces it.
    pub tensor_class: String,
}

/// Catalogue of the isometrically inequivalent orthogonal separable webs of
/// Euclidean 3-space, obtained from the separation tree of free motion.
pub fn enumerate_webs_e3() -> Result<Vec<WebClass>> {
    let tree = bekm_separate(&Potential::zero(3), &Space::euclidean(3), &SeparationOptions::default())?;
    Ok(tree
        .branches
        .iter()
        .flat_map(|b| b.coordinates.iter().map(move |c| WebClass { label: c.clone(), tensor_class: b.class.label() }))
        .collect())
}

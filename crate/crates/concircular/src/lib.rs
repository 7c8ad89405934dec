//! Concircular tensors on pseudo-Euclidean spaces and their central
//! hyperquadrics, the orthogonal separable coordinates they induce, and an
//! algorithm deciding orthogonal separability of natural Hamiltonians.
//!
//! All arithmetic is exact over the rationals (with quadratic surds where
//! eigenvalues need them). Floating point appears only in chart evaluation
//! and numerical cross-checks.
//!
//! | module | contents |
//! |---|---|
//! | [`linalg`] | scalar-product spaces, metric-Jordan canonical form, Jordan limits |
//! | [`ct`] | concircular tensors, canonical forms, equivalence tests |
//! | [`charpoly`] | characteristic polynomials by closed formula and by determinant |
//! | [`coords`] | charts from canonical coordinates, closed-form metrics |
//! | [`warped`] | warped-product decompositions of reducible tensors |
//! | [`bekm`] | KBD equation, solution spaces, separation trees |
//! | [`enumerate`] | inequivalent classes for eigenvalue structures |
//! | [`io`] | JSON schemas and the job runner of the `concircular` binary |
//! | [`selftest`] | the acceptance checks |
//!
//! ```
//! use concircular::ct::{canonicalize, ConcircularTensor, Variant};
//! use concircular::linalg::Space;
//! use concircular::matrix::QMat;
//! use concircular::number::q;
//!
//! let l = ConcircularTensor::central(Space::euclidean(2), QMat::diag(&[q(0), q(1)])).unwrap();
//! let moved = l.translated(&[q(1), q(2)]);
//! let c = canonicalize(&moved).unwrap();
//! assert_eq!(c.variant, Variant::Central);
//! ```

pub mod error;
pub mod linalg;
pub mod matrix;
pub mod number;
pub mod poly;
pub mod ct;
pub mod charpoly;
pub mod coords;
pub mod warped;
pub mod bekm;
pub mod trig;
pub mod enumerate;
pub mod selftest;
pub mod io;

//! Separation of natural Hamiltonians along concircular tensors: the KBD
//! equations, their exact solution spaces, and the recursive construction
//! of separation trees.

pub mod kbd;
pub mod potential;

pub use kbd::{
    kbd_operator, kbd_residual, lift_potential, solve_kbd, solve_kbd_by_coefficients, solve_spherical_kbd,
    spherical_kbd_operator, spherical_kbd_residual, CtParams, KbdSolutionSpace, ParamLayout, SolveOptions,
};
pub use potential::{calogero_moser, calogero_moser_direction, Potential, PotentialDerivatives, PotentialSpec};
pub mod tree;
pub use tree::{
    bekm_separate, bekm_separate_spherical, flat_class, spherical_class, ClassKey, FactorProblem, Representative,
    SeparationBranch, SeparationNode, SeparationOptions, SeparationTree,
};

//! Spectral solution and verification of steady one-dimensional two-sided
//! fractional diffusion equations on `(0, 1)`.
//!
//! Two operators are covered, both built from the two-sided fractional
//! integral `I_r^{2-alpha} = r D^{-(2-alpha)} + (1 - r) D^{-(2-alpha)*}`:
//!
//! * RLC (flux form): `-D I_r^{2-alpha} D u = f`
//! * RL (random-walk form): `-D^2 I_r^{2-alpha} u = f`
//!
//! Both act diagonally on weighted shifted Jacobi polynomials, which gives a
//! closed-form spectral solver ([`solver`]). The [`operators`] module evaluates
//! the same operators directly by Gauss-Jacobi quadrature and serves as an
//! independent oracle for every closed form used by the solver.
//!
//! Modules, bottom up:
//!
//! * [`special`]: gamma quotients, reciprocal gamma, `sin(pi x)`
//! * [`jacobi`]: shifted Jacobi polynomials, norms, endpoint values, derivatives
//! * [`quadrature`]: Gauss-Jacobi rules on `[0, 1]`
//! * [`params`]: `(alpha, r) -> (beta, c**)` and the eigenvalue ladders
//! * [`operators`]: fractional integrals, fluxes and operators by quadrature
//! * [`solver`]: boundary value problems and well-posedness classification
//! * [`diagnostics`]: decay fits, shift checks, residual certificates, divergence probe
//! * [`verify`]: the identity suite used by the `verify` command
//! * [`cli`]: configuration and the batch commands behind the `fracspec` binary

pub mod cli;
pub mod diagnostics;
pub mod error;
pub mod jacobi;
pub mod operators;
pub mod params;
pub mod quadrature;
pub mod solver;
pub mod special;
pub mod verify;

pub use error::{Error, Result};
pub use jacobi::{JacobiBasis, JacobiSeries};
pub use operators::{DiffMode, Model, OracleConfig, OracleFunction, PolyFactor, WeightedPoly};
pub use params::{FractionalModelParams, Ladder};
pub use quadrature::{cached_rule, gauss_jacobi_rule, QuadratureRule};
pub use solver::{
    solve, BoundaryCondition, RhsSpec, SolveOptions, SpectralSolution, WellPosedness,
    WellPosednessReport,
};

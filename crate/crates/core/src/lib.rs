//! Dense real-symmetric eigensolver built on plane rotations parameterized by
//! a square-root variable `x` (entries `sqrt(x + 1/2)`, `sqrt(1/2 - x)`)
//! instead of the classical Givens angle, with the classical method kept as a
//! baseline for comparison.
//!
//! The solver runs cyclic sweeps over all off-diagonal pivots, accumulates the
//! eigenvector matrix, and records the off-diagonal norm after every rotation
//! so convergence behaviour can be traced and checked against the quadratic
//! decrease expected once the iterates are close to diagonal.

pub mod io;
pub mod matrix;
pub mod oracle;
pub mod rotation;
pub mod solver;

pub use matrix::{
    EigenDecomposition, Matrix, MatrixError, PivotBlock, RotationMethod, SolverConfig,
    SymmetricMatrix, DEFAULT_SYM_TOL,
};
pub use rotation::{PlaneRotation, RootInterval, RotationError, RotationParams};
pub use solver::{ConvergenceEstimate, SolveOutcome, SolverError, SweepReport};

//! Quadratic programs over boxes and probability simplices, approximate
//! KKT verification in exact rational or floating-point arithmetic, and
//! bridges between simplex QPs and equilibrium problems on bimatrix games.
//!
//! The crate is organised as small, pure building blocks:
//!
//! - [`numerics`] — the scalar abstraction (exact rationals or `f64`),
//!   dense vectors and matrices, Euclidean projections, QP gradients.
//! - [`qp`] — box- and simplex-constrained QP instances and their
//!   approximate-KKT verifiers with per-coordinate residual reports.
//! - [`games`] — bimatrix games, approximate Nash and well-supported Nash
//!   verification, and the profile conversions between them.
//! - [`reductions`] — certified reductions between the problem classes,
//!   including the penalty construction that embeds a box QP into a
//!   simplex QP, together with its invariant audit.
//! - [`solvers`] — projected-gradient and Frank–Wolfe solvers over `f64`
//!   with verifier-driven stopping and exact re-verification of snapped
//!   rational points.
//! - [`generators`] — seeded, byte-reproducible instance generators.
//! - [`oracle`] — brute-force equilibrium enumeration for small games,
//!   used to produce reference inputs for tests and bridges.
//!
//! Verification defaults to exact rational arithmetic; solvers run in
//! floating point and hand converged points back to the rational
//! verifiers. Nothing in the crate mutates shared state: instances,
//! points, and reports are plain values.

pub mod error;
pub mod games;
pub mod generators;
pub mod numerics;
pub mod oracle;
pub mod pipeline;
pub mod qp;
pub mod reductions;
pub mod solvers;

pub use error::{Error, Result};
pub use numerics::{Matrix, Rational, Scalar, SymMatrix, Vector};

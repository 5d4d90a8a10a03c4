//! Scalar carriers and small dense linear algebra.
//!
//! Everything downstream is generic over [`Scalar`], which is implemented
//! by exact [`Rational`] numbers (the verification carrier) and by `f64`
//! (the solver carrier). The module also provides the two Euclidean
//! projections used throughout — onto the unit box and onto a scaled
//! probability simplex — and the shared quadratic-program gradient.

mod linalg;
mod scalar;

pub use linalg::{
    half_quadratic, project_box, project_simplex, qp_gradient, solve_linear, Matrix, SymMatrix,
    Vector,
};
pub use scalar::{
    exact_rational, nearby_rational, snap_point_exact, snap_point_nearby, Rational, Scalar,
    DEFAULT_SNAP_DENOMINATOR,
};

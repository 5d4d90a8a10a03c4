//! Quadratic programs over the unit box and over scaled probability
//! simplices, with approximate KKT verification for both geometries.
//!
//! Both problems minimize `f(x) = ½ xᵀA x + bᵀx` with symmetric `A`; the
//! gradient is `g(x) = A x + b`. A feasible point is an ε-KKT point when
//! every coordinate's gradient entry respects the face the coordinate
//! sits on:
//!
//! * box `[0,1]ⁿ`: `g_i ≥ −ε` at `x_i = 0`, `|g_i| ≤ ε` strictly inside,
//!   `g_i ≤ ε` at `x_i = 1`;
//! * simplex `{x ≥ 0, Σx = s}`: there is one dual value `u` with
//!   `|g_i − u| ≤ ε` on the support and `g_i ≥ u − ε` off it.
//!
//! The simplex verifier needs no search over `u`: a feasible dual exists
//! exactly when the interval `[max_supp g − ε, min_all g + ε]` is
//! nonempty, and the reported residuals are measured against its
//! midpoint.

use crate::error::{Error, Result};
use crate::numerics::{
    half_quadratic, project_box, project_simplex, qp_gradient, Matrix, Scalar, SymMatrix, Vector,
};

/// Minimize `½ xᵀA x + bᵀx` over the unit box `[0,1]ⁿ`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoxQp<S> {
    a: SymMatrix<S>,
    b: Vector<S>,
}

impl<S: Scalar> BoxQp<S> {
    pub fn new(a: SymMatrix<S>, b: Vector<S>) -> Result<Self> {
        if a.dim() == 0 {
            return Err(Error::DimensionMismatch {
                expected: 1,
                found: 0,
            });
        }
        if b.len() != a.dim() {
            return Err(Error::DimensionMismatch {
                expected: a.dim(),
                found: b.len(),
            });
        }
        Ok(BoxQp { a, b })
    }

    pub fn n(&self) -> usize {
        self.a.dim()
    }

    pub fn a(&self) -> &SymMatrix<S> {
        &self.a
    }

    pub fn b(&self) -> &Vector<S> {
        &self.b
    }

    /// `g(x) = A x + b`.
    pub fn gradient(&self, x: &Vector<S>) -> Result<Vector<S>> {
        qp_gradient(&self.a, &self.b, x)
    }

    /// `f(x) = ½ xᵀA x + bᵀx`.
    pub fn objective(&self, x: &Vector<S>) -> Result<S> {
        half_quadratic(&self.a, &self.b, x)
    }

    pub fn to_f64(&self) -> BoxQp<f64> {
        BoxQp {
            a: self.a.to_f64(),
            b: self.b.to_f64(),
        }
    }
}

/// Minimize `½ xᵀA x + bᵀx` over the scaled simplex `{x ≥ 0, Σx = s}`.
#[derive(Debug, Clone, PartialEq)]
pub struct SimplexQp<S> {
    a: SymMatrix<S>,
    b: Vector<S>,
    scale: S,
}

impl<S: Scalar> SimplexQp<S> {
    pub fn new(a: SymMatrix<S>, b: Vector<S>, scale: S) -> Result<Self> {
        if a.dim() == 0 {
            return Err(Error::DimensionMismatch {
                expected: 1,
                found: 0,
            });
        }
        if b.len() != a.dim() {
            return Err(Error::DimensionMismatch {
                expected: a.dim(),
                found: b.len(),
            });
        }
        if scale <= S::zero() {
            return Err(Error::NonPositiveScale);
        }
        Ok(SimplexQp { a, b, scale })
    }

    pub fn n(&self) -> usize {
        self.a.dim()
    }

    pub fn a(&self) -> &SymMatrix<S> {
        &self.a
    }

    pub fn b(&self) -> &Vector<S> {
        &self.b
    }

    pub fn scale(&self) -> &S {
        &self.scale
    }

    /// `g(x) = A x + b`.
    pub fn gradient(&self, x: &Vector<S>) -> Result<Vector<S>> {
        qp_gradient(&self.a, &self.b, x)
    }

    /// `f(x) = ½ xᵀA x + bᵀx`.
    pub fn objective(&self, x: &Vector<S>) -> Result<S> {
        half_quadratic(&self.a, &self.b, x)
    }

    pub fn to_f64(&self) -> SimplexQp<f64> {
        SimplexQp {
            a: self.a.to_f64(),
            b: self.b.to_f64(),
            scale: self.scale.to_f64(),
        }
    }
}

/// Outcome of a KKT verification: the verdict at `tolerance`, one signed
/// residual per coordinate (zero when the coordinate's condition holds,
/// otherwise the signed distance past the violated bound), and — for the
/// simplex geometry — the feasible dual interval `[u_lo, u_hi]` plus its
/// midpoint as `dual_value` when the interval is nonempty.
#[derive(Debug, Clone, PartialEq)]
pub struct KktReport<S> {
    pub verdict: bool,
    pub residuals: Vector<S>,
    pub dual_interval: Option<(S, S)>,
    pub dual_value: Option<S>,
    pub tolerance: S,
}

impl<S: Scalar> KktReport<S> {
    /// Largest absolute residual, for diagnostics.
    pub fn worst_residual(&self) -> S {
        self.residuals.max_abs()
    }
}

/// Per-coordinate feasibility slack: zero on the exact carrier, a tiny
/// allowance for accumulated rounding on the float carrier.
fn coordinate_slack<S: Scalar>() -> S {
    if S::EXACT {
        S::zero()
    } else {
        S::from_ratio(1, 1_000_000_000_000)
    }
}

fn ensure_tolerance<S: Scalar>(eps: &S) -> Result<()> {
    if !(*eps >= S::zero()) {
        return Err(Error::InvalidTolerance(format!(
            "tolerance {eps} must be nonnegative"
        )));
    }
    Ok(())
}

/// Check box feasibility (strict on the exact carrier, tiny slack on the
/// float carrier) and clamp the point onto the box.
pub(crate) fn prepare_box_point<S: Scalar>(x: &Vector<S>, n: usize) -> Result<Vector<S>> {
    if x.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: x.len(),
        });
    }
    let slack = coordinate_slack::<S>();
    let lo = S::zero() - slack.clone();
    let hi = S::one() + slack;
    for (i, v) in x.iter().enumerate() {
        if *v < lo || *v > hi {
            return Err(Error::Infeasible(format!(
                "coordinate {i} = {v} lies outside [0, 1]"
            )));
        }
    }
    Ok(project_box(x))
}

/// Check simplex feasibility (exact sum on the exact carrier; on the
/// float carrier `|Σx − s| ≤ 1e−9·s` and `x_i ≥ −1e−12`) and re-project
/// onto the simplex so downstream support tests see a feasible point.
pub(crate) fn prepare_simplex_point<S: Scalar>(
    x: &Vector<S>,
    n: usize,
    s: &S,
) -> Result<Vector<S>> {
    if x.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: x.len(),
        });
    }
    let lo = S::zero() - coordinate_slack::<S>();
    for (i, v) in x.iter().enumerate() {
        if *v < lo {
            return Err(Error::Infeasible(format!("coordinate {i} = {v} is negative")));
        }
    }
    let sum = x.sum();
    let sum_slack = if S::EXACT {
        S::zero()
    } else {
        s.clone() * S::from_ratio(1, 1_000_000_000)
    };
    if (sum.clone() - s.clone()).abs() > sum_slack {
        return Err(Error::Infeasible(format!(
            "coordinates sum to {sum}, expected {s}"
        )));
    }
    let projected = project_simplex(x, s)?;
    if projected.support().is_empty() {
        return Err(Error::Infeasible("point has empty support".into()));
    }
    Ok(projected)
}

/// Signed distance of `value` past the band `[lo, hi]` (either bound
/// optional): zero inside, negative below `lo`, positive above `hi`.
fn band_residual<S: Scalar>(value: S, lo: Option<&S>, hi: Option<&S>) -> S {
    if let Some(lo) = lo {
        if value < *lo {
            return value - lo.clone();
        }
    }
    if let Some(hi) = hi {
        if value > *hi {
            return value - hi.clone();
        }
    }
    S::zero()
}

/// Verify the ε-KKT conditions of `qp` at `x` over the unit box.
///
/// The verdict is true iff every coordinate satisfies its face condition:
/// `g_i ≥ −ε` where `x_i = 0`, `|g_i| ≤ ε` where `0 < x_i < 1`, and
/// `g_i ≤ ε` where `x_i = 1`.
pub fn verify_box_kkt<S: Scalar>(qp: &BoxQp<S>, x: &Vector<S>, eps: &S) -> Result<KktReport<S>> {
    ensure_tolerance(eps)?;
    let x = prepare_box_point(x, qp.n())?;
    let g = qp.gradient(&x)?;
    let neg_eps = S::zero() - eps.clone();
    let residuals = Vector::from_fn(qp.n(), |i| {
        let gi = g[i].clone();
        if x[i].is_zero() {
            band_residual(gi, Some(&neg_eps), None)
        } else if x[i] == S::one() {
            band_residual(gi, None, Some(eps))
        } else {
            band_residual(gi, Some(&neg_eps), Some(eps))
        }
    });
    let verdict = residuals.iter().all(|r| r.is_zero());
    Ok(KktReport {
        verdict,
        residuals,
        dual_interval: None,
        dual_value: None,
        tolerance: eps.clone(),
    })
}

/// Verify the ε-KKT conditions of `qp` at `x` over the scaled simplex.
///
/// A dual value `u` certifying the point must satisfy `u ≥ g_i − ε` for
/// every supported coordinate and `u ≤ g_i + ε` for every coordinate, so
/// the feasible duals form the interval
/// `[max_{x_i>0} g_i − ε, min_i g_i + ε]`. The verdict is true iff that
/// interval is nonempty; residuals are measured against its midpoint,
/// which lies inside the interval whenever one exists, so the verdict is
/// equivalent to all residuals vanishing.
pub fn verify_simplex_kkt<S: Scalar>(
    qp: &SimplexQp<S>,
    x: &Vector<S>,
    eps: &S,
) -> Result<KktReport<S>> {
    ensure_tolerance(eps)?;
    let x = prepare_simplex_point(x, qp.n(), qp.scale())?;
    let g = qp.gradient(&x)?;

    let mut max_supp: Option<S> = None;
    let mut min_all: Option<S> = None;
    for (i, gi) in g.iter().enumerate() {
        if min_all.as_ref().is_none_or(|m| gi < m) {
            min_all = Some(gi.clone());
        }
        if x[i] > S::zero() && max_supp.as_ref().is_none_or(|m| gi > m) {
            max_supp = Some(gi.clone());
        }
    }
    let u_lo = max_supp.expect("support is nonempty after projection") - eps.clone();
    let u_hi = min_all.expect("dimension is at least one") + eps.clone();
    let verdict = u_lo <= u_hi;

    let u_star = (u_lo.clone() + u_hi.clone()) / S::from_int(2);
    let neg_eps = S::zero() - eps.clone();
    let residuals = Vector::from_fn(qp.n(), |i| {
        let shifted = g[i].clone() - u_star.clone();
        if x[i] > S::zero() {
            band_residual(shifted, Some(&neg_eps), Some(eps))
        } else {
            band_residual(shifted, Some(&neg_eps), None)
        }
    });
    Ok(KktReport {
        verdict,
        residuals,
        dual_interval: Some((u_lo, u_hi)),
        dual_value: verdict.then_some(u_star),
        tolerance: eps.clone(),
    })
}

/// Replace a square matrix by its symmetric part `(M + Mᵀ)/2`, which
/// leaves `½ xᵀM x` unchanged for every `x`.
pub fn symmetrize<S: Scalar>(m: &Matrix<S>) -> Result<SymMatrix<S>> {
    if !m.is_square() {
        return Err(Error::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    let half = S::from_ratio(1, 2);
    let n = m.rows();
    let mut rows = Vec::with_capacity(n);
    for i in 0..n {
        let mut row = Vec::with_capacity(n);
        for j in 0..n {
            row.push((m.get(i, j).clone() + m.get(j, i).clone()) * half.clone());
        }
        rows.push(row);
    }
    SymMatrix::from_rows(rows)
}

/// Fold the linear term into the quadratic one: on the simplex `Σx = s`,
/// `bᵀx` equals `xᵀ(b𝟙ᵀ + 𝟙bᵀ)x / (2s)`, so the program with
/// `A' = A + (b𝟙ᵀ + 𝟙bᵀ)/s` and `b' = 0` has the same objective at every
/// feasible point. The new gradient differs from the old by the
/// coordinate-uniform shift `bᵀx/s`, so ε-KKT verdicts are identical for
/// every feasible `x` and every ε.
pub fn homogenize<S: Scalar>(qp: &SimplexQp<S>) -> SimplexQp<S> {
    let n = qp.n();
    let s = qp.scale();
    let mut rows = Vec::with_capacity(n);
    for i in 0..n {
        let mut row = Vec::with_capacity(n);
        for j in 0..n {
            let fold = (qp.b()[i].clone() + qp.b()[j].clone()) / s.clone();
            row.push(qp.a().get(i, j).clone() + fold);
        }
        rows.push(row);
    }
    let a = SymMatrix::from_rows(rows).expect("folding preserves symmetry");
    SimplexQp {
        a,
        b: Vector::zeros(n),
        scale: s.clone(),
    }
}

/// Change of variables between a scaled simplex and the unit simplex,
/// produced by [`normalize_scale`].
///
/// Writing `s` for the original scale, the canonical program has
/// `a'_ij = a_ij s²` and `b'_i = b_i s`, and the maps below carry points
/// and tolerances across: `g'(x/s) = s·g(x)`, so `x` is ε-KKT for the
/// scaled program iff `x/s` is (s·ε)-KKT for the canonical one.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaleMap<S> {
    scale: S,
}

impl<S: Scalar> ScaleMap<S> {
    pub fn scale(&self) -> &S {
        &self.scale
    }

    /// `x ↦ x/s`, onto the unit simplex.
    pub fn to_canonical_point(&self, x: &Vector<S>) -> Vector<S> {
        x.map(|v| v.clone() / self.scale.clone())
    }

    /// `x' ↦ s·x'`, back onto the scaled simplex.
    pub fn from_canonical_point(&self, x: &Vector<S>) -> Vector<S> {
        x.map(|v| v.clone() * self.scale.clone())
    }

    /// `ε ↦ s·ε`: the tolerance at which the canonical image of an ε-KKT
    /// point verifies.
    pub fn to_canonical_tolerance(&self, eps: &S) -> S {
        eps.clone() * self.scale.clone()
    }

    /// `ε' ↦ ε'/s`, inverse of [`ScaleMap::to_canonical_tolerance`].
    pub fn from_canonical_tolerance(&self, eps: &S) -> S {
        eps.clone() / self.scale.clone()
    }
}

/// Rewrite a scaled-simplex program in canonical form (scale 1) together
/// with the point/tolerance maps relating the two.
pub fn normalize_scale<S: Scalar>(qp: &SimplexQp<S>) -> (SimplexQp<S>, ScaleMap<S>) {
    let s = qp.scale().clone();
    let s2 = s.clone() * s.clone();
    let a = qp
        .a()
        .map(|v| v.clone() * s2.clone())
        .expect("uniform scaling preserves symmetry");
    let b = qp.b().map(|v| v.clone() * s.clone());
    (
        SimplexQp {
            a,
            b,
            scale: S::one(),
        },
        ScaleMap { scale: s },
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::Rational;
    use num_traits::{One, Zero};
    use proptest::prelude::*;

    fn rat(p: i64, q: i64) -> Rational {
        Rational::from_ratio(p, q)
    }

    fn rvec(entries: &[(i64, i64)]) -> Vector<Rational> {
        Vector::new(entries.iter().map(|&(p, q)| rat(p, q)).collect())
    }

    fn rmat(rows: &[&[(i64, i64)]]) -> SymMatrix<Rational> {
        SymMatrix::from_rows(
            rows.iter()
                .map(|row| row.iter().map(|&(p, q)| rat(p, q)).collect())
                .collect(),
        )
        .unwrap()
    }

    fn box_qp(a: &[&[(i64, i64)]], b: &[(i64, i64)]) -> BoxQp<Rational> {
        BoxQp::new(rmat(a), rvec(b)).unwrap()
    }

    fn simplex_qp(a: &[&[(i64, i64)]], b: &[(i64, i64)], s: (i64, i64)) -> SimplexQp<Rational> {
        SimplexQp::new(rmat(a), rvec(b), rat(s.0, s.1)).unwrap()
    }

    #[test]
    fn box_kkt_accepts_boundary_minimum() {
        let qp = box_qp(&[&[(0, 1)]], &[(-1, 1)]);
        let report = verify_box_kkt(&qp, &rvec(&[(1, 1)]), &Rational::zero()).unwrap();
        assert!(report.verdict);
        assert!(report.residuals.iter().all(|r| r.is_zero()));
        assert_eq!(report.dual_interval, None);
        assert_eq!(report.dual_value, None);
    }

    #[test]
    fn box_kkt_rejects_interior_gradient() {
        // Interior point with gradient -1 at tolerance 1/2: the residual is
        // the signed overshoot past the lower bound, -1 - (-1/2) = -1/2.
        let qp = box_qp(&[&[(0, 1)]], &[(-1, 1)]);
        let report = verify_box_kkt(&qp, &rvec(&[(1, 2)]), &rat(1, 2)).unwrap();
        assert!(!report.verdict);
        assert_eq!(report.residuals, rvec(&[(-1, 2)]));
        assert_eq!(report.worst_residual(), rat(1, 2));
    }

    #[test]
    fn box_kkt_accepts_interior_stationary_point() {
        let qp = box_qp(&[&[(1, 1), (0, 1)], &[(0, 1), (1, 1)]], &[(-1, 2), (-1, 2)]);
        let report = verify_box_kkt(&qp, &rvec(&[(1, 2), (1, 2)]), &Rational::zero()).unwrap();
        assert!(report.verdict);
    }

    #[test]
    fn box_kkt_rejects_infeasible_points() {
        let qp = box_qp(&[&[(0, 1)]], &[(-1, 1)]);
        assert!(matches!(
            verify_box_kkt(&qp, &rvec(&[(3, 2)]), &Rational::zero()),
            Err(Error::Infeasible(_))
        ));
        assert!(matches!(
            verify_box_kkt(&qp, &rvec(&[(-1, 10)]), &Rational::zero()),
            Err(Error::Infeasible(_))
        ));
        assert!(matches!(
            verify_box_kkt(&qp, &rvec(&[(1, 2), (1, 2)]), &Rational::zero()),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn negative_tolerance_is_rejected() {
        let qp = box_qp(&[&[(0, 1)]], &[(0, 1)]);
        assert!(matches!(
            verify_box_kkt(&qp, &rvec(&[(0, 1)]), &rat(-1, 10)),
            Err(Error::InvalidTolerance(_))
        ));
        let sqp = simplex_qp(&[&[(0, 1)]], &[(0, 1)], (1, 1));
        assert!(matches!(
            verify_simplex_kkt(&sqp, &rvec(&[(1, 1)]), &rat(-1, 10)),
            Err(Error::InvalidTolerance(_))
        ));
    }

    #[test]
    fn simplex_kkt_interior_point_with_uniform_gradient() {
        // A = -2I, b = 0: at (1/2, 1/2) the gradient is (-1, -1), so the
        // dual interval collapses to the point -1.
        let qp = simplex_qp(&[&[(-2, 1), (0, 1)], &[(0, 1), (-2, 1)]], &[(0, 1), (0, 1)], (1, 1));
        let report = verify_simplex_kkt(&qp, &rvec(&[(1, 2), (1, 2)]), &Rational::zero()).unwrap();
        assert!(report.verdict);
        assert_eq!(report.dual_value, Some(rat(-1, 1)));
        assert_eq!(report.dual_interval, Some((rat(-1, 1), rat(-1, 1))));
    }

    #[test]
    fn simplex_kkt_vertex_with_slack_off_support() {
        // Same program at the vertex (1, 0): the supported gradient is -2
        // and the unsupported one is 0 ≥ u, so u = -2 certifies the point.
        let qp = simplex_qp(&[&[(-2, 1), (0, 1)], &[(0, 1), (-2, 1)]], &[(0, 1), (0, 1)], (1, 1));
        let report = verify_simplex_kkt(&qp, &rvec(&[(1, 1), (0, 1)]), &Rational::zero()).unwrap();
        assert!(report.verdict);
        assert_eq!(report.dual_value, Some(rat(-2, 1)));
    }

    #[test]
    fn simplex_kkt_rejects_blocked_vertex() {
        // A = [[0,-2],[-2,0]] at (1, 0), ε = 1/2: the support demands
        // u ∈ [-1/2, 1/2] while the zero coordinate demands u ≤ -3/2.
        let qp = simplex_qp(&[&[(0, 1), (-2, 1)], &[(-2, 1), (0, 1)]], &[(0, 1), (0, 1)], (1, 1));
        let report = verify_simplex_kkt(&qp, &rvec(&[(1, 1), (0, 1)]), &rat(1, 2)).unwrap();
        assert!(!report.verdict);
        assert_eq!(report.dual_interval, Some((rat(-1, 2), rat(-3, 2))));
        assert_eq!(report.dual_value, None);
        // Residuals against the midpoint u = -1: support overshoots by 1/2,
        // the zero coordinate undershoots by 1/2.
        assert_eq!(report.residuals, rvec(&[(1, 2), (-1, 2)]));
    }

    #[test]
    fn simplex_kkt_rejects_infeasible_points() {
        let qp = simplex_qp(&[&[(0, 1), (0, 1)], &[(0, 1), (0, 1)]], &[(0, 1), (0, 1)], (1, 1));
        // Exact carrier: the sum must match exactly.
        assert!(matches!(
            verify_simplex_kkt(&qp, &rvec(&[(1, 2), (1, 3)]), &Rational::zero()),
            Err(Error::Infeasible(_))
        ));
        assert!(matches!(
            verify_simplex_kkt(&qp, &rvec(&[(3, 2), (-1, 2)]), &Rational::zero()),
            Err(Error::Infeasible(_))
        ));
    }

    #[test]
    fn float_path_accepts_solver_style_near_feasibility() {
        // Slightly off the simplex (sum error 1e-10 ≤ 1e-9·s): accepted and
        // re-projected before verification.
        let a = SymMatrix::from_rows(vec![vec![-2.0, 0.0], vec![0.0, -2.0]]).unwrap();
        let qp = SimplexQp::new(a, Vector::zeros(2), 1.0).unwrap();
        let x = Vector::new(vec![0.50000000005, 0.49999999985]);
        let report = verify_simplex_kkt(&qp, &x, &0.01).unwrap();
        assert!(report.verdict);
        // Far off the simplex: rejected.
        let bad = Vector::new(vec![0.51, 0.51]);
        assert!(matches!(
            verify_simplex_kkt(&qp, &bad, &0.01),
            Err(Error::Infeasible(_))
        ));
    }

    #[test]
    fn symmetrize_averages_off_diagonal_pairs() {
        let m = Matrix::from_rows(vec![vec![0.0, 2.0], vec![0.0, 0.0]]).unwrap();
        let sym = symmetrize(&m).unwrap();
        assert_eq!(sym.row(0), &[0.0, 1.0]);
        assert_eq!(sym.row(1), &[1.0, 0.0]);

        let m = Matrix::from_rows(vec![vec![1.0, 4.0], vec![2.0, 3.0]]).unwrap();
        let sym = symmetrize(&m).unwrap();
        assert_eq!(sym.row(0), &[1.0, 3.0]);
        assert_eq!(sym.row(1), &[3.0, 3.0]);

        // Symmetric input is a fixed point.
        let m = Matrix::from_rows(vec![vec![1.0, 5.0], vec![5.0, 2.0]]).unwrap();
        assert_eq!(symmetrize(&m).unwrap().as_matrix(), &m);

        let tall = Matrix::from_rows(vec![vec![1.0], vec![2.0]]).unwrap();
        assert!(matches!(symmetrize(&tall), Err(Error::NotSquare { .. })));
    }

    #[test]
    fn homogenize_folds_linear_term() {
        // A = [[0]], b = [1], s = 1 → A' = [[2]], b' = 0.
        let qp = simplex_qp(&[&[(0, 1)]], &[(1, 1)], (1, 1));
        let h = homogenize(&qp);
        assert_eq!(h.a().get(0, 0), &rat(2, 1));
        assert!(h.b()[0].is_zero());

        // Zero linear term: identity.
        let qp = simplex_qp(&[&[(3, 1)]], &[(0, 1)], (1, 1));
        assert_eq!(homogenize(&qp), qp);

        // A = 0 (2×2), b = (1, 0) → A' = [[2,1],[1,0]].
        let qp = simplex_qp(&[&[(0, 1), (0, 1)], &[(0, 1), (0, 1)]], &[(1, 1), (0, 1)], (1, 1));
        let h = homogenize(&qp);
        assert_eq!(h.a().row(0), &[rat(2, 1), rat(1, 1)]);
        assert_eq!(h.a().row(1), &[rat(1, 1), rat(0, 1)]);
    }

    #[test]
    fn homogenize_preserves_objective_and_verdicts() {
        let qp = simplex_qp(
            &[&[(1, 2), (-1, 3)], &[(-1, 3), (2, 1)]],
            &[(1, 1), (-1, 2)],
            (1, 1),
        );
        let h = homogenize(&qp);
        for x in [
            rvec(&[(1, 1), (0, 1)]),
            rvec(&[(0, 1), (1, 1)]),
            rvec(&[(1, 2), (1, 2)]),
            rvec(&[(1, 4), (3, 4)]),
            rvec(&[(2, 3), (1, 3)]),
        ] {
            assert_eq!(qp.objective(&x).unwrap(), h.objective(&x).unwrap());
            for eps in [Rational::zero(), rat(1, 1000), rat(1, 10)] {
                let before = verify_simplex_kkt(&qp, &x, &eps).unwrap().verdict;
                let after = verify_simplex_kkt(&h, &x, &eps).unwrap().verdict;
                assert_eq!(before, after, "verdict changed at {x:?}, eps {eps}");
            }
        }
    }

    #[test]
    fn normalize_scale_rewrites_and_maps_points() {
        // s = 1: already canonical.
        let qp = simplex_qp(&[&[(1, 1)]], &[(1, 1)], (1, 1));
        let (canonical, map) = normalize_scale(&qp);
        assert_eq!(canonical, qp);
        assert_eq!(map.scale(), &Rational::one());

        // s = 2, A = [[1]], b = [1] → A' = [[4]], b' = [2], x = 2 ↦ 1.
        let qp = simplex_qp(&[&[(1, 1)]], &[(1, 1)], (2, 1));
        let (canonical, map) = normalize_scale(&qp);
        assert_eq!(canonical.a().get(0, 0), &rat(4, 1));
        assert_eq!(canonical.b()[0], rat(2, 1));
        assert_eq!(canonical.scale(), &Rational::one());
        let x = rvec(&[(2, 1)]);
        let x1 = map.to_canonical_point(&x);
        assert_eq!(x1, rvec(&[(1, 1)]));
        assert_eq!(map.from_canonical_point(&x1), x);
    }

    #[test]
    fn normalize_scale_tolerance_relation() {
        // At x = (3/2, 1/2) the gradient is (5/2, 0), so the scaled program
        // is ε-KKT exactly for ε ≥ 5/4 and its canonical image exactly for
        // ε' ≥ 5/2 — the map multiplies tolerances by s = 2.
        let qp = simplex_qp(&[&[(1, 1), (0, 1)], &[(0, 1), (2, 1)]], &[(1, 1), (-1, 1)], (2, 1));
        let (canonical, map) = normalize_scale(&qp);
        let x = rvec(&[(3, 2), (1, 2)]);
        let x1 = map.to_canonical_point(&x);
        for (eps, expected) in [
            (rat(5, 4), true),
            (rat(124, 100), false),
            (rat(2, 1), true),
        ] {
            let scaled = verify_simplex_kkt(&qp, &x, &eps).unwrap().verdict;
            assert_eq!(scaled, expected, "scaled verdict at {eps}");
            let canonical_eps = map.to_canonical_tolerance(&eps);
            let mapped = verify_simplex_kkt(&canonical, &x1, &canonical_eps)
                .unwrap()
                .verdict;
            assert_eq!(mapped, expected, "canonical verdict at {canonical_eps}");
            assert_eq!(map.from_canonical_tolerance(&canonical_eps), eps);
        }
    }

    /// Random small rational programs for the property tests below.
    fn arb_entries(n: usize) -> impl Strategy<Value = Vec<Vec<Rational>>> {
        proptest::collection::vec(
            proptest::collection::vec((-8i64..=8, 1i64..=4).prop_map(|(p, q)| rat(p, q)), n),
            n,
        )
    }

    fn symmetric_from(entries: Vec<Vec<Rational>>) -> SymMatrix<Rational> {
        let m = Matrix::from_rows(entries).unwrap();
        symmetrize(&m).unwrap()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn box_verdict_is_monotone_in_eps(
            n in 1usize..4,
            seed_entries in arb_entries(3),
            raw_x in proptest::collection::vec(0i64..=4, 3),
            eps_num in 0i64..6,
            bump in 1i64..4,
        ) {
            let a = symmetric_from(seed_entries[..n].iter().map(|r| r[..n].to_vec()).collect());
            let b = Vector::from_fn(n, |i| rat(i as i64 - 1, 2));
            let qp = BoxQp::new(a, b).unwrap();
            let x = Vector::from_fn(n, |i| rat(raw_x[i], 4));
            let eps = rat(eps_num, 10);
            let wider = eps.clone() + rat(bump, 10);
            let at_eps = verify_box_kkt(&qp, &x, &eps).unwrap().verdict;
            let at_wider = verify_box_kkt(&qp, &x, &wider).unwrap().verdict;
            prop_assert!(!at_eps || at_wider);
        }

        #[test]
        fn simplex_verdict_matches_residuals_and_is_monotone(
            n in 1usize..5,
            entries in arb_entries(4),
            raw_x in proptest::collection::vec(0i64..=5, 4),
            eps_num in 0i64..6,
            bump in 1i64..4,
        ) {
            let a = symmetric_from(entries[..n].iter().map(|r| r[..n].to_vec()).collect());
            let b = Vector::from_fn(n, |i| rat(1 - i as i64, 3));
            let qp = SimplexQp::new(a, b, Rational::one()).unwrap();
            let raw = Vector::from_fn(n, |i| rat(raw_x[i], 5));
            let x = project_simplex(&raw, &Rational::one()).unwrap();
            let eps = rat(eps_num, 10);
            let report = verify_simplex_kkt(&qp, &x, &eps).unwrap();
            // Verdict ⟺ the dual interval is nonempty ⟺ all residuals vanish.
            let (lo, hi) = report.dual_interval.clone().unwrap();
            prop_assert_eq!(report.verdict, lo <= hi);
            prop_assert_eq!(report.verdict, report.residuals.iter().all(|r| r.is_zero()));
            if report.verdict {
                let wider = eps.clone() + rat(bump, 10);
                prop_assert!(verify_simplex_kkt(&qp, &x, &wider).unwrap().verdict);
            }
        }
    }
}

//! Instance-to-instance transformations.
//!
//! * Symmetric matrices and common-payoff games exchange roles through
//!   [`game_to_simplex_qp`] and [`simplex_qp_to_game`]: symmetric
//!   well-supported equilibria `(x, x)` of the game `(A, A)` are exactly
//!   the ε-KKT points of minimizing `−xᵀAx` over the simplex.
//! * [`box_to_simplex`] embeds a box-constrained program into a simplex
//!   program over `2n+1` coordinates `(x₁..xₙ, y₁..yₙ, z)` by adding the
//!   penalty `(M/2δ)Σ(x_i + y_i − 1)²`, which acts as a soft `x_i ≤ 1`
//!   constraint; [`pull_back`] clamps the `x`-block of a δ-KKT point of
//!   the constructed program into an ε-KKT point of the original.
//! * [`audit_theorem_invariants`] checks the structural facts that make
//!   the pull-back sound at any δ-KKT point of the construction: pair
//!   sums below 2, positive slack coordinate, near-zero dual, bounded
//!   face slacks, and bounded overshoot.

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::games::BimatrixGame;
use crate::numerics::{exact_rational, Matrix, Rational, Scalar, SymMatrix, Vector};
use crate::qp::{prepare_box_point, prepare_simplex_point, BoxQp, KktReport, SimplexQp};

/// Parameters of one [`box_to_simplex`] run: everything needed to pull a
/// point of the constructed program back and to audit its invariants.
///
/// The constructed program's coordinates are laid out as the `x`-block
/// `0..n`, the `y`-block `n..2n`, and the slack coordinate `z` at `2n`;
/// the simplex scale is `2n` and `delta = eps / (4 + 4nM)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReductionCertificate<S> {
    n: usize,
    big_m: S,
    delta: S,
    eps: S,
    scale: S,
}

impl<S: Scalar> ReductionCertificate<S> {
    /// Assemble a certificate from raw fields (for deserialization);
    /// [`ReductionCertificate::validate`] checks internal consistency.
    pub fn from_parts(n: usize, big_m: S, delta: S, eps: S, scale: S) -> Self {
        ReductionCertificate {
            n,
            big_m,
            delta,
            eps,
            scale,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn big_m(&self) -> &S {
        &self.big_m
    }

    pub fn delta(&self) -> &S {
        &self.delta
    }

    pub fn eps(&self) -> &S {
        &self.eps
    }

    pub fn scale(&self) -> &S {
        &self.scale
    }

    /// Dimension of the constructed program, `2n + 1`.
    pub fn dim(&self) -> usize {
        2 * self.n + 1
    }

    pub fn x_index(&self, i: usize) -> usize {
        i
    }

    pub fn y_index(&self, i: usize) -> usize {
        self.n + i
    }

    pub fn z_index(&self) -> usize {
        2 * self.n
    }

    /// Penalty weight `M/δ` appearing in the constructed quadratic.
    pub fn penalty_weight(&self) -> S {
        self.big_m.clone() / self.delta.clone()
    }

    /// Internal consistency: `M ≥ 1`, `ε > 0`, `δ = ε/(4 + 4nM)`, and
    /// scale `2n`.
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidParams("certificate has dimension 0".into()));
        }
        if !(self.big_m >= S::one()) {
            return Err(Error::InvalidParams(format!(
                "certificate bound M = {} is below 1",
                self.big_m
            )));
        }
        if !(self.eps > S::zero()) {
            return Err(Error::InvalidParams(format!(
                "certificate tolerance {} is not positive",
                self.eps
            )));
        }
        let expected_delta = derive_delta(self.n, &self.big_m, &self.eps);
        if self.delta != expected_delta {
            return Err(Error::InvalidParams(format!(
                "certificate delta = {} differs from eps/(4 + 4nM) = {}",
                self.delta, expected_delta
            )));
        }
        if self.scale != S::from_int(2 * self.n as i64) {
            return Err(Error::InvalidParams(format!(
                "certificate scale = {} differs from 2n = {}",
                self.scale,
                2 * self.n
            )));
        }
        Ok(())
    }

    /// Consistency against the program the certificate claims to reduce:
    /// dimensions match and `M` dominates every row mass
    /// `|b_i| + Σ_j |a_ij|`.
    pub fn validate_for(&self, qp: &BoxQp<S>) -> Result<()> {
        self.validate()?;
        if qp.n() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: qp.n(),
            });
        }
        for i in 0..self.n {
            if row_mass(qp, i) > self.big_m {
                return Err(Error::InvalidParams(format!(
                    "certificate bound M = {} is below the row mass of row {i}",
                    self.big_m
                )));
            }
        }
        Ok(())
    }
}

fn row_mass<S: Scalar>(qp: &BoxQp<S>, i: usize) -> S {
    let mut mass = qp.b()[i].abs();
    for j in 0..qp.n() {
        mass = mass + qp.a().get(i, j).abs();
    }
    mass
}

fn derive_delta<S: Scalar>(n: usize, big_m: &S, eps: &S) -> S {
    let four = S::from_int(4);
    eps.clone() / (four.clone() + four * S::from_int(n as i64) * big_m.clone())
}

/// Turn a symmetric matrix into the simplex program minimizing `−xᵀAx`:
/// quadratic matrix `−2A`, zero linear term, unit scale. The symmetric
/// well-supported equilibria `(x, x)` of the common-payoff game `(A, A)`
/// at tolerance ε are exactly the ε-KKT points of the output.
pub fn game_to_simplex_qp<S: Scalar>(a: &Matrix<S>) -> Result<SimplexQp<S>> {
    let sym = SymMatrix::new(a.clone())?;
    let neg_two = S::from_int(-2);
    let q = sym
        .map(|v| v.clone() * neg_two.clone())
        .expect("negation preserves symmetry");
    let n = q.dim();
    SimplexQp::new(q, Vector::zeros(n), S::one())
}

/// Affine rescaling `v ↦ (v − offset)/span` recorded by
/// [`simplex_qp_to_game`]; the positive `span` divides every payoff gap,
/// so tolerances divide by it too.
#[derive(Debug, Clone, PartialEq)]
pub struct PayoffMap<S> {
    offset: S,
    span: S,
}

impl<S: Scalar> PayoffMap<S> {
    pub fn offset(&self) -> &S {
        &self.offset
    }

    pub fn span(&self) -> &S {
        &self.span
    }

    /// Map a matrix value into payoff space.
    pub fn map_value(&self, v: &S) -> S {
        (v.clone() - self.offset.clone()) / self.span.clone()
    }

    /// A KKT tolerance ε for the program corresponds to the equilibrium
    /// tolerance ε/span for the game.
    pub fn map_tolerance(&self, eps: &S) -> S {
        eps.clone() / self.span.clone()
    }

    /// Inverse of [`PayoffMap::map_tolerance`].
    pub fn unmap_tolerance(&self, eps: &S) -> S {
        eps.clone() * self.span.clone()
    }
}

/// Turn a simplex program with zero linear term and unit scale into a
/// common-payoff symmetric game: set `Ā = −Q/2`, shift and scale its
/// entries affinely onto `[0,1]`, and record the map. The shift moves
/// every payoff column uniformly and the positive scale divides every
/// payoff gap, so ε-KKT points of the program are exactly the
/// (ε/span)-well-supported symmetric equilibria of the game.
pub fn simplex_qp_to_game<S: Scalar>(
    qp: &SimplexQp<S>,
) -> Result<(BimatrixGame<S>, PayoffMap<S>)> {
    if qp.b().iter().any(|v| !v.is_zero()) {
        return Err(Error::Hypothesis(
            "the linear term must be zero; fold it into the quadratic first".into(),
        ));
    }
    if *qp.scale() != S::one() {
        return Err(Error::Hypothesis(
            "the scale must be 1; normalize the program first".into(),
        ));
    }
    let n = qp.n();
    let neg_half = S::from_ratio(-1, 2);
    let bar = qp
        .a()
        .map(|v| v.clone() * neg_half.clone())
        .expect("halving preserves symmetry");

    let mut lo = bar.get(0, 0).clone();
    let mut hi = lo.clone();
    for i in 0..n {
        for j in 0..n {
            let v = bar.get(i, j);
            if *v < lo {
                lo = v.clone();
            }
            if *v > hi {
                hi = v.clone();
            }
        }
    }
    let span = if lo == hi {
        S::one()
    } else {
        hi - lo.clone()
    };
    let map = PayoffMap {
        offset: lo,
        span,
    };
    let payoffs = bar.as_matrix().map(|v| map.map_value(v));
    let game = BimatrixGame::common_payoff(payoffs)?;
    Ok((game, map))
}

/// Embed a box program into a simplex program over `(x, y, z)` with scale
/// `2n`: the objective keeps the original quadratic and linear terms on
/// the `x`-block and adds the penalty `(M/2δ)Σ(x_i + y_i − 1)²`, whose
/// constant part `nM/(2δ)` is dropped (it shifts no gradient). Here
/// `M = max(1, max_i(|b_i| + Σ_j |a_ij|))` bounds every gradient entry on
/// the box and `δ = ε/(4 + 4nM)` is the tolerance at which the
/// constructed program must be solved so that [`pull_back`] yields an
/// ε-KKT point of the input.
pub fn box_to_simplex<S: Scalar>(
    qp: &BoxQp<S>,
    eps: &S,
) -> Result<(SimplexQp<S>, ReductionCertificate<S>)> {
    if !(*eps > S::zero()) {
        return Err(Error::InvalidTolerance(format!(
            "tolerance {eps} must be positive"
        )));
    }
    let n = qp.n();
    let mut big_m = S::one();
    for i in 0..n {
        let mass = row_mass(qp, i);
        if mass > big_m {
            big_m = mass;
        }
    }
    let delta = derive_delta(n, &big_m, eps);
    let weight = big_m.clone() / delta.clone();

    let dim = 2 * n + 1;
    let mut q = Matrix::zeros(dim, dim);
    for i in 0..n {
        for j in 0..n {
            *q.get_mut(i, j) = qp.a().get(i, j).clone();
        }
        *q.get_mut(i, i) = qp.a().get(i, i).clone() + weight.clone();
        *q.get_mut(i, n + i) = weight.clone();
        *q.get_mut(n + i, i) = weight.clone();
        *q.get_mut(n + i, n + i) = weight.clone();
    }
    let b = Vector::from_fn(dim, |k| {
        if k < n {
            qp.b()[k].clone() - weight.clone()
        } else if k < 2 * n {
            S::zero() - weight.clone()
        } else {
            S::zero()
        }
    });
    let scale = S::from_int(2 * n as i64);
    let constructed = SimplexQp::new(
        SymMatrix::new(q).expect("penalty encoding is symmetric"),
        b,
        scale.clone(),
    )?;
    let cert = ReductionCertificate {
        n,
        big_m,
        delta,
        eps: eps.clone(),
        scale,
    };
    Ok((constructed, cert))
}

/// Clamp the `x`-block of a feasible point of the constructed program
/// onto the box: `x'_i = min(1, x_i)`. At a δ-KKT point of the
/// construction the result is an ε-KKT point of the original program.
pub fn pull_back<S: Scalar>(
    cert: &ReductionCertificate<S>,
    point: &Vector<S>,
) -> Result<Vector<S>> {
    let prepared = prepare_simplex_point(point, cert.dim(), &cert.scale)?;
    Ok(Vector::from_fn(cert.n, |i| {
        let v = prepared[i].clone();
        if v > S::one() {
            S::one()
        } else {
            v
        }
    }))
}

/// The natural lift of a box point into the constructed program:
/// `y_i = 1 − x_i` and `z = n`, which lands exactly on the simplex with
/// every penalty term zero. Used as a solver warm start.
pub fn lift_box_point<S: Scalar>(
    cert: &ReductionCertificate<S>,
    x: &Vector<S>,
) -> Result<Vector<S>> {
    let x = prepare_box_point(x, cert.n)?;
    Ok(Vector::from_fn(cert.dim(), |k| {
        if k < cert.n {
            x[k].clone()
        } else if k < 2 * cert.n {
            S::one() - x[k - cert.n].clone()
        } else {
            S::from_int(cert.n as i64)
        }
    }))
}

/// Outcome of [`audit_theorem_invariants`]: the five structural checks
/// that hold at every genuine δ-KKT point of a constructed program, with
/// human-readable details for any failure.
#[derive(Debug, Clone, PartialEq)]
pub struct TheoremAudit {
    /// `x_i + y_i < 2` for every pair.
    pub pair_sums_below_two: bool,
    /// The slack coordinate satisfies `z > 0`.
    pub z_positive: bool,
    /// The reported dual lies in `[−δ, δ]`.
    pub dual_near_zero: bool,
    /// The three face conditions of the recovered box gradient hold at
    /// slack `4δ` (and `2δ` on the upper face).
    pub face_slacks_hold: bool,
    /// Every `x_i ≤ 1 + 4δ`.
    pub overshoot_bounded: bool,
    /// One line per failed check.
    pub details: Vec<String>,
}

impl TheoremAudit {
    pub fn all_pass(&self) -> bool {
        self.pair_sums_below_two
            && self.z_positive
            && self.dual_near_zero
            && self.face_slacks_hold
            && self.overshoot_bounded
    }
}

/// Audit the structural invariants of a δ-KKT point of the constructed
/// program. `report` must be a passing verification of `point` against
/// `constructed` at tolerance `δ`; the box gradient of the original
/// program is recovered from the constructed gradient as
/// `∇q_i = g_{x_i} − g_{y_i}`, so the original instance is not needed.
///
/// Check failures are reported in the result, not raised as errors; only
/// structural mismatches (dimensions, a non-passing report) error out.
pub fn audit_theorem_invariants<S: Scalar>(
    cert: &ReductionCertificate<S>,
    constructed: &SimplexQp<S>,
    point: &Vector<S>,
    report: &KktReport<S>,
) -> Result<TheoremAudit> {
    cert.validate()?;
    if constructed.n() != cert.dim() {
        return Err(Error::DimensionMismatch {
            expected: cert.dim(),
            found: constructed.n(),
        });
    }
    if !report.verdict {
        return Err(Error::Hypothesis(
            "audit requires a passing verification report".into(),
        ));
    }
    if report.tolerance != *cert.delta() {
        return Err(Error::Hypothesis(format!(
            "report tolerance {} differs from the certificate delta {}",
            report.tolerance,
            cert.delta()
        )));
    }
    let point = prepare_simplex_point(point, cert.dim(), &cert.scale)?;
    let g = constructed.gradient(&point)?;

    let mut audit = TheoremAudit {
        pair_sums_below_two: true,
        z_positive: true,
        dual_near_zero: true,
        face_slacks_hold: true,
        overshoot_bounded: true,
        details: Vec::new(),
    };
    let two = S::from_int(2);
    let delta = cert.delta().clone();
    let two_delta = two.clone() * delta.clone();
    let four_delta = S::from_int(4) * delta.clone();
    let weight = cert.penalty_weight();

    for i in 0..cert.n {
        let xi = point[cert.x_index(i)].clone();
        let yi = point[cert.y_index(i)].clone();
        if !(xi.clone() + yi.clone() < two) {
            audit.pair_sums_below_two = false;
            audit
                .details
                .push(format!("pair {i}: x + y = {} is not below 2", xi + yi));
        }
    }

    let z = point[cert.z_index()].clone();
    if !(z > S::zero()) {
        audit.z_positive = false;
        audit.details.push(format!("slack coordinate z = {z} is not positive"));
    }

    match &report.dual_value {
        Some(u) => {
            if u.abs() > delta {
                audit.dual_near_zero = false;
                audit
                    .details
                    .push(format!("dual u = {u} lies outside [-{delta}, {delta}]"));
            }
        }
        None => {
            audit.dual_near_zero = false;
            audit.details.push("report carries no dual value".into());
        }
    }

    for i in 0..cert.n {
        let xi = point[cert.x_index(i)].clone();
        let box_grad = g[cert.x_index(i)].clone() - g[cert.y_index(i)].clone();
        if xi.is_zero() {
            if box_grad < S::zero() - four_delta.clone() {
                audit.face_slacks_hold = false;
                audit.details.push(format!(
                    "coordinate {i} at 0: recovered gradient {box_grad} is below -4delta"
                ));
            }
        } else if xi < S::one() {
            if box_grad.abs() > four_delta {
                audit.face_slacks_hold = false;
                audit.details.push(format!(
                    "coordinate {i} interior: |recovered gradient| = {} exceeds 4delta",
                    box_grad.abs()
                ));
            }
        } else {
            let pushed = box_grad + weight.clone() * (xi.clone() - S::one());
            if pushed > two_delta {
                audit.face_slacks_hold = false;
                audit.details.push(format!(
                    "coordinate {i} at the upper face: slack {pushed} exceeds 2delta"
                ));
            }
        }
        if xi > S::one() + four_delta.clone() {
            audit.overshoot_bounded = false;
            audit
                .details
                .push(format!("coordinate {i} overshoots: x = {xi} exceeds 1 + 4delta"));
        }
    }

    Ok(audit)
}

/// Snap a float point of a constructed program to exact rationals using
/// the reduction's structure: the `x`-block embeds exactly (floats are
/// dyadic rationals), `y_i := max(0, 1 − x_i)` zeroes every penalty
/// gradient entry exactly, and `z` absorbs the remaining mass so the
/// result lies exactly on the simplex. Fails only if no mass is left for
/// `z`, which cannot happen near a genuine solution (`z ≈ n` there).
pub fn snap_reduced_point(
    cert: &ReductionCertificate<Rational>,
    point: &[f64],
) -> Result<Vector<Rational>> {
    if point.len() != cert.dim() {
        return Err(Error::DimensionMismatch {
            expected: cert.dim(),
            found: point.len(),
        });
    }
    let n = cert.n;
    let mut out = vec![Rational::zero(); cert.dim()];
    let mut mass = Rational::zero();
    for i in 0..n {
        let xi = exact_rational(point[i].max(0.0))?;
        let yi = if xi < Rational::one() {
            Rational::one() - xi.clone()
        } else {
            Rational::zero()
        };
        mass = mass + xi.clone() + yi.clone();
        out[i] = xi;
        out[n + i] = yi;
    }
    let z = Rational::from_int(2 * n as i64) - mass;
    if !(z > Rational::zero()) {
        return Err(Error::Infeasible(
            "snapped point leaves no mass for the slack coordinate".into(),
        ));
    }
    out[2 * n] = z;
    Ok(Vector::new(out))
}

/// Predict the support pattern of the constructed program's stationary
/// point from an approximate solution of the *original box program*:
/// box coordinate near 0 → only `y_i` carries mass; near 1 with a
/// negative box gradient → only `x_i` (the stationary point overshoots
/// to `1 + |∇q_i|/K` with `y_i = 0`); anything else → both. The slack
/// coordinate is always supported. Feeding this pattern to an exact
/// support solve recovers the true stationary point without ever
/// running a solver on the stiff constructed program.
pub fn structured_support(
    cert: &ReductionCertificate<Rational>,
    box_point: &[f64],
    box_gradient: &[f64],
    face_tol: f64,
) -> Result<Vec<usize>> {
    if box_point.len() != cert.n || box_gradient.len() != cert.n {
        return Err(Error::DimensionMismatch {
            expected: cert.n,
            found: box_point.len().max(box_gradient.len()),
        });
    }
    let n = cert.n;
    let mut support = Vec::with_capacity(2 * n + 1);
    for (i, &x) in box_point.iter().enumerate() {
        if x > face_tol {
            support.push(i);
        }
    }
    for (i, (&x, &g)) in box_point.iter().zip(box_gradient).enumerate() {
        let overshoots = x >= 1.0 - face_tol && g < 0.0;
        if !overshoots {
            support.push(n + i);
        }
    }
    support.push(2 * n);
    Ok(support)
}

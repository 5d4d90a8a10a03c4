//! Local solvers that compute approximate KKT points in float
//! arithmetic, plus the exact-certification step that snaps a float
//! solution to rationals and re-verifies it.
//!
//! Projected gradient descent over the box and the simplex shares one
//! driver: iterate `x ← Π(x − t·g(x))`, check the verifier every
//! `check_every` steps, and restart from random feasible points when an
//! attempt exhausts its budget. The step is either the fixed `1/L` (with
//! `L` an upper bound on the gradient's Lipschitz constant, guaranteeing
//! a monotone objective) or a spectral trial step safeguarded by an
//! Armijo backtracking line search (also monotone, usually far faster on
//! stiff instances). Frank–Wolfe is the simplex alternative: move toward
//! the best vertex with an exact quadratic line search. Its gap appears
//! in the trace for diagnostics but never decides convergence — a small
//! gap is a mass-weighted average condition and does not imply the
//! per-coordinate support conditions the verifier demands.
//!
//! Convergence always means "the verifier passed at the target ε";
//! [`certify_simplex`] and [`certify_box`] then lift the float point to
//! exact rationals (trying a support-pattern polish that solves the KKT
//! system exactly, the bit-exact dyadic embedding, and a
//! continued-fraction rounding in turn) and re-verify exactly.

use num_traits::{One, Zero};
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::error::{Error, Result};
use crate::numerics::{
    project_box, project_simplex, snap_point_exact, snap_point_nearby, solve_linear, Matrix,
    Rational, Scalar, Vector, DEFAULT_SNAP_DENOMINATOR,
};
use crate::qp::{
    prepare_box_point, prepare_simplex_point, verify_box_kkt, verify_simplex_kkt, BoxQp,
    KktReport, SimplexQp,
};

/// Step-size policy for projected gradient descent.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepRule {
    /// Constant step `1/L`: monotone whenever `L` bounds the gradient's
    /// Lipschitz constant.
    Fixed,
    /// Spectral (Barzilai–Borwein) trial step, halved until an Armijo
    /// sufficient-decrease test passes. Monotone by construction and much
    /// faster when the quadratic mixes very stiff and very soft
    /// directions.
    Backtracking,
}

/// Tuning for one solver run. `max_iters` is the per-attempt budget; a
/// run makes `1 + restarts` attempts, the first from `start` (or the
/// geometric center), the rest from seeded random feasible points.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverParams {
    pub eps: f64,
    pub step_rule: StepRule,
    /// Upper bound for the gradient's Lipschitz constant; when absent,
    /// `1 + max_i Σ_j |a_ij|` is used.
    pub l_estimate: Option<f64>,
    pub max_iters: u64,
    pub check_every: u64,
    pub restarts: u32,
    pub rng_seed: u64,
    pub start: Option<Vector<f64>>,
    pub record_trace: bool,
}

impl SolverParams {
    pub fn new(eps: f64) -> Self {
        SolverParams {
            eps,
            step_rule: StepRule::Fixed,
            l_estimate: None,
            max_iters: 1_000_000,
            check_every: 100,
            restarts: 10,
            rng_seed: 0,
            start: None,
            record_trace: false,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.eps > 0.0) || !self.eps.is_finite() {
            return Err(Error::InvalidParams(format!(
                "target tolerance {} must be positive and finite",
                self.eps
            )));
        }
        if self.max_iters == 0 {
            return Err(Error::InvalidParams("max_iters must be at least 1".into()));
        }
        if self.check_every == 0 {
            return Err(Error::InvalidParams("check_every must be at least 1".into()));
        }
        if let Some(l) = self.l_estimate {
            if !(l > 0.0) || !l.is_finite() {
                return Err(Error::InvalidParams(format!(
                    "Lipschitz estimate {l} must be positive and finite"
                )));
            }
        }
        Ok(())
    }
}

/// One sampled point of a solver trace.
#[derive(Debug, Clone, PartialEq)]
pub struct TracePoint {
    /// Total gradient steps taken before this sample, across attempts.
    pub iteration: u64,
    pub objective: f64,
    pub worst_residual: f64,
    /// Frank–Wolfe gap `⟨g, x − v⟩`; absent for the gradient solvers.
    pub fw_gap: Option<f64>,
}

/// Outcome of a solver run. `converged` is exactly `report.verdict` at
/// the target tolerance; `iterations` counts gradient steps summed over
/// all attempts.
#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult {
    pub point: Vector<f64>,
    pub report: KktReport<f64>,
    pub iterations: u64,
    pub converged: bool,
    pub trace: Option<Vec<TracePoint>>,
}

/// Default Lipschitz bound: `1 + max_i Σ_j |a_ij|`, an upper bound on the
/// quadratic matrix's spectral norm with a unit margin.
pub fn default_l_estimate(a: &crate::numerics::SymMatrix<f64>) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..a.dim() {
        let row: f64 = a.row(i).iter().map(|v| v.abs()).sum();
        if row > worst {
            worst = row;
        }
    }
    1.0 + worst
}

/// Uniform draw from (0, 1], cross-platform deterministic.
fn next_unit_open(rng: &mut ChaCha8Rng) -> f64 {
    (((rng.next_u64() >> 11) + 1) as f64) * (1.0 / (1u64 << 53) as f64)
}

/// The two feasible geometries, presented to the shared descent driver.
trait DescentSpace {
    fn gradient(&self, x: &Vector<f64>) -> Vector<f64>;
    fn objective(&self, x: &Vector<f64>) -> f64;
    /// `dᵀ A d` for the quadratic matrix; used to evaluate objective
    /// differences without cancellation against large constant terms.
    fn quad_form(&self, d: &Vector<f64>) -> f64;
    fn project(&self, v: &Vector<f64>) -> Vector<f64>;
    fn verify(&self, x: &Vector<f64>, eps: f64) -> Result<KktReport<f64>>;
    fn center(&self) -> Vector<f64>;
    fn random_start(&self, rng: &mut ChaCha8Rng) -> Vector<f64>;
    fn prepare_start(&self, start: &Vector<f64>) -> Result<Vector<f64>>;
}

struct BoxSpace<'a>(&'a BoxQp<f64>);

impl DescentSpace for BoxSpace<'_> {
    fn gradient(&self, x: &Vector<f64>) -> Vector<f64> {
        self.0.gradient(x).expect("dimensions fixed by the driver")
    }
    fn objective(&self, x: &Vector<f64>) -> f64 {
        self.0.objective(x).expect("dimensions fixed by the driver")
    }
    fn quad_form(&self, d: &Vector<f64>) -> f64 {
        self.0.a().matvec(d).dot(d)
    }
    fn project(&self, v: &Vector<f64>) -> Vector<f64> {
        project_box(v)
    }
    fn verify(&self, x: &Vector<f64>, eps: f64) -> Result<KktReport<f64>> {
        verify_box_kkt(self.0, x, &eps)
    }
    fn center(&self) -> Vector<f64> {
        Vector::new(vec![0.5; self.0.n()])
    }
    fn random_start(&self, rng: &mut ChaCha8Rng) -> Vector<f64> {
        Vector::from_fn(self.0.n(), |_| next_unit_open(rng))
    }
    fn prepare_start(&self, start: &Vector<f64>) -> Result<Vector<f64>> {
        prepare_box_point(start, self.0.n())
    }
}

struct SimplexSpace<'a>(&'a SimplexQp<f64>);

impl SimplexSpace<'_> {
    fn scale(&self) -> f64 {
        *self.0.scale()
    }
}

impl DescentSpace for SimplexSpace<'_> {
    fn gradient(&self, x: &Vector<f64>) -> Vector<f64> {
        self.0.gradient(x).expect("dimensions fixed by the driver")
    }
    fn objective(&self, x: &Vector<f64>) -> f64 {
        self.0.objective(x).expect("dimensions fixed by the driver")
    }
    fn quad_form(&self, d: &Vector<f64>) -> f64 {
        self.0.a().matvec(d).dot(d)
    }
    fn project(&self, v: &Vector<f64>) -> Vector<f64> {
        project_simplex(v, &self.scale()).expect("scale is positive by construction")
    }
    fn verify(&self, x: &Vector<f64>, eps: f64) -> Result<KktReport<f64>> {
        verify_simplex_kkt(self.0, x, &eps)
    }
    fn center(&self) -> Vector<f64> {
        let share = self.scale() / self.0.n() as f64;
        Vector::new(vec![share; self.0.n()])
    }
    fn random_start(&self, rng: &mut ChaCha8Rng) -> Vector<f64> {
        // Dirichlet(1, …, 1) scaled onto the simplex: normalized unit
        // exponentials.
        let n = self.0.n();
        let raw = Vector::from_fn(n, |_| -next_unit_open(rng).ln());
        let total = raw.sum();
        if total > 0.0 {
            let s = self.scale();
            raw.map(|e| e / total * s)
        } else {
            self.center()
        }
    }
    fn prepare_start(&self, start: &Vector<f64>) -> Result<Vector<f64>> {
        prepare_simplex_point(start, self.0.n(), self.0.scale())
    }
}

/// Armijo sufficient-decrease coefficient.
const ARMIJO_SIGMA: f64 = 1e-4;
/// Spectral trial-step clamp, as multiples of `1/L`.
const SPECTRAL_MIN: f64 = 1e-2;
const SPECTRAL_MAX: f64 = 1e8;

/// One projected step from `x` along `-g`, honoring the step rule.
/// Returns the new point; monotone under both rules.
fn projected_step(
    space: &impl DescentSpace,
    x: &Vector<f64>,
    g: &Vector<f64>,
    l: f64,
    rule: StepRule,
    prev: &Option<(Vector<f64>, Vector<f64>)>,
) -> Vector<f64> {
    match rule {
        StepRule::Fixed => space.project(&x.add_scaled(&(-1.0 / l), g)),
        StepRule::Backtracking => {
            let mut t = match prev {
                Some((px, pg)) => {
                    let s = x.sub(px);
                    let y = g.sub(pg);
                    let sy = s.dot(&y);
                    if sy > 0.0 {
                        (s.dot(&s) / sy).clamp(SPECTRAL_MIN / l, SPECTRAL_MAX / l)
                    } else {
                        1.0 / l
                    }
                }
                None => 1.0 / l,
            };
            for _ in 0..60 {
                let candidate = space.project(&x.add_scaled(&(-t), g));
                let d = candidate.sub(x);
                let slope = g.dot(&d);
                // Exact objective difference for a quadratic: ⟨g,d⟩ +
                // ½dᵀAd. Evaluating the difference this way keeps all
                // terms at the step's scale; computing f(x+d) − f(x)
                // directly would cancel two large near-equal numbers and
                // drown δ²-sized improvements in rounding noise on stiff
                // penalty programs.
                let decrease = slope + 0.5 * space.quad_form(&d);
                if decrease <= ARMIJO_SIGMA * slope {
                    return candidate;
                }
                t *= 0.5;
            }
            // The Armijo test provably passes once t ≤ 1/L; this fallback
            // only guards against pathological float behavior.
            space.project(&x.add_scaled(&(-1.0 / l), g))
        }
    }
}

fn run_projected_descent(
    space: &impl DescentSpace,
    l: f64,
    params: &SolverParams,
) -> Result<SolveResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(params.rng_seed);
    let mut trace = params.record_trace.then(Vec::new);
    let mut total_steps = 0u64;
    let mut last: Option<(Vector<f64>, KktReport<f64>)> = None;

    for attempt in 0..=u64::from(params.restarts) {
        let mut x = if attempt == 0 {
            match &params.start {
                Some(s) => space.prepare_start(s)?,
                None => space.center(),
            }
        } else {
            space.random_start(&mut rng)
        };
        let mut prev: Option<(Vector<f64>, Vector<f64>)> = None;

        let mut iter = 0u64;
        loop {
            if iter % params.check_every == 0 || iter == params.max_iters {
                let report = space.verify(&x, params.eps)?;
                if let Some(t) = trace.as_mut() {
                    t.push(TracePoint {
                        iteration: total_steps,
                        objective: space.objective(&x),
                        worst_residual: report.worst_residual(),
                        fw_gap: None,
                    });
                }
                if report.verdict {
                    return Ok(SolveResult {
                        point: x,
                        report,
                        iterations: total_steps,
                        converged: true,
                        trace,
                    });
                }
                last = Some((x.clone(), report));
            }
            if iter == params.max_iters {
                break;
            }
            let g = space.gradient(&x);
            let next = projected_step(space, &x, &g, l, params.step_rule, &prev);
            prev = Some((x, g));
            x = next;
            iter += 1;
            total_steps += 1;
        }
    }

    let (point, report) = last.expect("every attempt verifies at least once");
    Ok(SolveResult {
        point,
        report,
        iterations: total_steps,
        converged: false,
        trace,
    })
}

/// Projected gradient descent over the box. Stops as soon as the box
/// verifier passes at `params.eps`; under the fixed rule with `L` at
/// least the gradient's Lipschitz constant, the objective never
/// increases.
pub fn pgd_box(qp: &BoxQp<f64>, params: &SolverParams) -> Result<SolveResult> {
    params.validate()?;
    let l = params.l_estimate.unwrap_or_else(|| default_l_estimate(qp.a()));
    run_projected_descent(&BoxSpace(qp), l, params)
}

/// Projected gradient descent over the scaled simplex; same contract as
/// [`pgd_box`] with the simplex projection and verifier.
pub fn pgd_simplex(qp: &SimplexQp<f64>, params: &SolverParams) -> Result<SolveResult> {
    params.validate()?;
    let l = params.l_estimate.unwrap_or_else(|| default_l_estimate(qp.a()));
    run_projected_descent(&SimplexSpace(qp), l, params)
}

/// Frank–Wolfe (conditional gradient) over the scaled simplex: move
/// toward the scaled vertex minimizing the gradient entry (ties to the
/// lowest index), with an exact line search on the quadratic and the
/// classic `2/(k+2)` fallback. `params.step_rule` is ignored.
pub fn frank_wolfe(qp: &SimplexQp<f64>, params: &SolverParams) -> Result<SolveResult> {
    params.validate()?;
    let space = SimplexSpace(qp);
    let s = *qp.scale();
    let mut rng = ChaCha8Rng::seed_from_u64(params.rng_seed);
    let mut trace = params.record_trace.then(Vec::new);
    let mut total_steps = 0u64;
    let mut last: Option<(Vector<f64>, KktReport<f64>)> = None;

    for attempt in 0..=u64::from(params.restarts) {
        let mut x = if attempt == 0 {
            match &params.start {
                Some(start) => space.prepare_start(start)?,
                None => space.center(),
            }
        } else {
            space.random_start(&mut rng)
        };

        let mut iter = 0u64;
        loop {
            let g = space.gradient(&x);
            // Best vertex: s·e_i for the smallest gradient entry.
            let mut best = 0usize;
            for i in 1..x.len() {
                if g[i] < g[best] {
                    best = i;
                }
            }
            let direction = Vector::from_fn(x.len(), |i| {
                let target = if i == best { s } else { 0.0 };
                target - x[i]
            });
            let gap = -g.dot(&direction);

            if iter % params.check_every == 0 || iter == params.max_iters {
                let report = space.verify(&x, params.eps)?;
                if let Some(t) = trace.as_mut() {
                    t.push(TracePoint {
                        iteration: total_steps,
                        objective: space.objective(&x),
                        worst_residual: report.worst_residual(),
                        fw_gap: Some(gap),
                    });
                }
                if report.verdict {
                    return Ok(SolveResult {
                        point: x,
                        report,
                        iterations: total_steps,
                        converged: true,
                        trace,
                    });
                }
                last = Some((x.clone(), report));
            }
            if iter == params.max_iters {
                break;
            }

            let curvature = direction.dot(&qp.a().matvec(&direction));
            let t = if curvature > 0.0 {
                (gap / curvature).clamp(0.0, 1.0)
            } else if -gap + 0.5 * curvature < 0.0 {
                // Concave along the segment and the far end strictly
                // better: jump to the vertex. Equality must fall through
                // to the diminishing step — accepting it lets the iterate
                // ping-pong between equal-objective vertices forever.
                1.0
            } else {
                2.0 / (iter as f64 + 2.0)
            };
            x = space.project(&x.add_scaled(&t, &direction));
            iter += 1;
            total_steps += 1;
        }
    }

    let (point, report) = last.expect("every attempt verifies at least once");
    Ok(SolveResult {
        point,
        report,
        iterations: total_steps,
        converged: false,
        trace,
    })
}

/// Solve the exact KKT system on the support of `point`: gradient equal
/// to a common dual on the support, zero elsewhere, coordinates summing
/// to the scale. Returns the exact solution when the system is solvable
/// with nonnegative coordinates, `None` otherwise.
pub fn polish_simplex_kkt(
    qp: &SimplexQp<Rational>,
    point: &Vector<Rational>,
) -> Option<Vector<Rational>> {
    polish_simplex_on_support(qp, &point.support())
}

/// [`polish_simplex_kkt`] with an explicit support pattern, for callers
/// that know the pattern from structure rather than from a point.
pub fn polish_simplex_on_support(
    qp: &SimplexQp<Rational>,
    support: &[usize],
) -> Option<Vector<Rational>> {
    if support.is_empty() || support.iter().any(|&i| i >= qp.n()) {
        return None;
    }
    let k = support.len();
    // Unknowns: the supported coordinates, then the dual u.
    let mut rows = Vec::with_capacity(k + 1);
    for &i in support {
        let mut row = Vec::with_capacity(k + 1);
        for &j in support {
            row.push(qp.a().get(i, j).clone());
        }
        row.push(Rational::from_int(-1));
        rows.push(row);
    }
    let mut mass_row = vec![Rational::one(); k];
    mass_row.push(Rational::zero());
    rows.push(mass_row);

    let system = Matrix::from_rows(rows).expect("rows built with equal length");
    let mut rhs: Vec<Rational> = support
        .iter()
        .map(|&i| Rational::zero() - qp.b()[i].clone())
        .collect();
    rhs.push(qp.scale().clone());

    let solution = solve_linear(&system, &Vector::new(rhs))?;
    let mut out = vec![Rational::zero(); qp.n()];
    for (slot, &i) in support.iter().enumerate() {
        let v = solution[slot].clone();
        if v < Rational::zero() {
            return None;
        }
        out[i] = v;
    }
    Some(Vector::new(out))
}

/// Snap a float simplex point to exact rationals and verify it exactly
/// at `eps`. Candidates, in order: the exact KKT polish on the point's
/// support (also on the support with dust below `scale/10⁶` removed), the
/// bit-exact dyadic embedding, and a continued-fraction rounding at
/// denominator bound 10⁹ — each re-projected onto the simplex and run
/// through the exact verifier. The first passing candidate is returned;
/// if none passes, the candidate with the smallest worst residual is
/// returned with its failing report.
pub fn certify_simplex(
    qp: &SimplexQp<Rational>,
    point: &Vector<f64>,
    eps: &Rational,
) -> Result<(Vector<Rational>, KktReport<Rational>)> {
    let float_scale = qp.scale().to_f64();
    let nonneg = point.map(|v| v.max(0.0));
    let cleaned = project_simplex(&nonneg, &float_scale)?;
    let embedded = snap_point_exact(cleaned.as_slice())?;
    let exact = project_simplex(&embedded, qp.scale())?;

    let mut candidates: Vec<Vector<Rational>> = Vec::new();
    if let Some(p) = polish_simplex_kkt(qp, &exact) {
        candidates.push(p);
    }
    let dust = qp.scale().clone() * Rational::from_ratio(1, 1_000_000);
    let solid: Vec<usize> = exact
        .iter()
        .enumerate()
        .filter(|(_, v)| **v > dust)
        .map(|(i, _)| i)
        .collect();
    if solid.len() != exact.support().len() {
        if let Some(p) = polish_simplex_on_support(qp, &solid) {
            candidates.push(p);
        }
    }
    candidates.push(exact);
    let nearby = snap_point_nearby(cleaned.as_slice(), DEFAULT_SNAP_DENOMINATOR)?;
    candidates.push(project_simplex(&nearby, qp.scale())?);

    let mut best: Option<(Vector<Rational>, KktReport<Rational>)> = None;
    for candidate in candidates {
        let report = verify_simplex_kkt(qp, &candidate, eps)?;
        if report.verdict {
            return Ok((candidate, report));
        }
        if best
            .as_ref()
            .is_none_or(|(_, r)| report.worst_residual() < r.worst_residual())
        {
            best = Some((candidate, report));
        }
    }
    Ok(best.expect("candidate list is never empty"))
}

/// Snap a float box point to exact rationals and verify it exactly at
/// `eps`: the bit-exact dyadic embedding first, then a continued-fraction
/// rounding at denominator bound 10⁹, both clamped onto the box.
pub fn certify_box(
    qp: &BoxQp<Rational>,
    point: &Vector<f64>,
    eps: &Rational,
) -> Result<(Vector<Rational>, KktReport<Rational>)> {
    let clamped = point.map(|v| v.clamp(0.0, 1.0));
    let exact = project_box(&snap_point_exact(clamped.as_slice())?);
    let nearby = project_box(&snap_point_nearby(clamped.as_slice(), DEFAULT_SNAP_DENOMINATOR)?);

    let mut best: Option<(Vector<Rational>, KktReport<Rational>)> = None;
    for candidate in [exact, nearby] {
        let report = verify_box_kkt(qp, &candidate, eps)?;
        if report.verdict {
            return Ok((candidate, report));
        }
        if best
            .as_ref()
            .is_none_or(|(_, r)| report.worst_residual() < r.worst_residual())
        {
            best = Some((candidate, report));
        }
    }
    Ok(best.expect("candidate list is never empty"))
}

//! Two-player normal-form games with payoffs in `[0,1]`: approximate
//! Nash and well-supported Nash verification, a thresholding conversion
//! from near-equilibria to well-supported ones, and the bridge between
//! symmetric-game equilibria and imitation-game equilibria.
//!
//! Conventions: the row player picks `i` and receives `a_ij`, the column
//! player picks `j` and receives `b_ij`. Against a column strategy `y`
//! the row player's pure payoffs are `A y`; against a row strategy `x`
//! the column player's are `Bᵀ x`. In an ε-Nash equilibrium neither
//! player can gain more than ε by deviating (pure deviations suffice by
//! linearity); in an ε-well-supported equilibrium every strategy played
//! with positive probability is within ε of that player's best pure
//! response — a strictly stronger demand.

use crate::error::{Error, Result};
use crate::numerics::{Matrix, Scalar, Vector};
use crate::qp::prepare_simplex_point;

/// A bimatrix game `(A, B)` with all payoffs in `[0,1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct BimatrixGame<S> {
    a: Matrix<S>,
    b: Matrix<S>,
}

impl<S: Scalar> BimatrixGame<S> {
    pub fn new(a: Matrix<S>, b: Matrix<S>) -> Result<Self> {
        if a.rows() == 0 || a.cols() == 0 {
            return Err(Error::DimensionMismatch {
                expected: 1,
                found: 0,
            });
        }
        if b.rows() != a.rows() || b.cols() != a.cols() {
            return Err(Error::DimensionMismatch {
                expected: a.rows() * a.cols(),
                found: b.rows() * b.cols(),
            });
        }
        for m in [&a, &b] {
            for i in 0..m.rows() {
                for j in 0..m.cols() {
                    let v = m.get(i, j);
                    if !(*v >= S::zero() && *v <= S::one()) {
                        return Err(Error::PayoffOutOfRange { i, j });
                    }
                }
            }
        }
        Ok(BimatrixGame { a, b })
    }

    /// Common-payoff game `(A, A)`.
    pub fn common_payoff(a: Matrix<S>) -> Result<Self> {
        let b = a.clone();
        BimatrixGame::new(a, b)
    }

    /// Symmetric game `(A, Aᵀ)`; `A` must be square.
    pub fn symmetric(a: Matrix<S>) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::NotSquare {
                rows: a.rows(),
                cols: a.cols(),
            });
        }
        let b = a.transpose();
        BimatrixGame::new(a, b)
    }

    /// Imitation game `(A, I)`: the column player is paid for matching
    /// the row player's pure strategy. `A` must be square.
    pub fn imitation(a: Matrix<S>) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::NotSquare {
                rows: a.rows(),
                cols: a.cols(),
            });
        }
        let b = Matrix::identity(a.rows());
        BimatrixGame::new(a, b)
    }

    /// Number of row-player pure strategies.
    pub fn n(&self) -> usize {
        self.a.rows()
    }

    /// Number of column-player pure strategies.
    pub fn m(&self) -> usize {
        self.a.cols()
    }

    pub fn a(&self) -> &Matrix<S> {
        &self.a
    }

    pub fn b(&self) -> &Matrix<S> {
        &self.b
    }

    /// Row player's pure payoffs `A y` against column strategy `y`.
    pub fn row_payoffs(&self, y: &Vector<S>) -> Result<Vector<S>> {
        if y.len() != self.m() {
            return Err(Error::DimensionMismatch {
                expected: self.m(),
                found: y.len(),
            });
        }
        Ok(self.a.matvec(y))
    }

    /// Column player's pure payoffs `Bᵀ x` against row strategy `x`.
    pub fn col_payoffs(&self, x: &Vector<S>) -> Result<Vector<S>> {
        if x.len() != self.n() {
            return Err(Error::DimensionMismatch {
                expected: self.n(),
                found: x.len(),
            });
        }
        Ok(self.b.tr_matvec(x))
    }

    /// The game as seen with the player labels exchanged: `(Bᵀ, Aᵀ)`.
    pub fn swap_players(&self) -> BimatrixGame<S> {
        BimatrixGame {
            a: self.b.transpose(),
            b: self.a.transpose(),
        }
    }
}

/// A pair of mixed strategies, validated (and on the float carrier
/// re-projected) to be probability vectors at construction.
#[derive(Debug, Clone, PartialEq)]
pub struct MixedProfile<S> {
    x: Vector<S>,
    y: Vector<S>,
}

impl<S: Scalar> MixedProfile<S> {
    pub fn new(x: Vector<S>, y: Vector<S>) -> Result<Self> {
        let nx = x.len();
        let ny = y.len();
        let x = prepare_simplex_point(&x, nx, &S::one())
            .map_err(|e| Error::NotAProbability(format!("row strategy: {e}")))?;
        let y = prepare_simplex_point(&y, ny, &S::one())
            .map_err(|e| Error::NotAProbability(format!("column strategy: {e}")))?;
        Ok(MixedProfile { x, y })
    }

    /// Profile `(y, y)` for games where both players share a strategy.
    pub fn symmetric(y: Vector<S>) -> Result<Self> {
        MixedProfile::new(y.clone(), y)
    }

    pub fn x(&self) -> &Vector<S> {
        &self.x
    }

    pub fn y(&self) -> &Vector<S> {
        &self.y
    }

    /// Exact equality of the two strategies.
    pub fn is_symmetric(&self) -> bool {
        self.x == self.y
    }
}

/// Exact structural classification of a game.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GameClass {
    /// `B = Aᵀ`: swapping player labels changes nothing.
    pub symmetric: bool,
    /// `B = A`: both players receive identical payoffs.
    pub common_payoff: bool,
    /// `B = I`: the column player is paid for imitating the row player.
    pub imitation: bool,
}

/// Classify a game by exact entry comparison.
pub fn classify<S: Scalar>(g: &BimatrixGame<S>) -> GameClass {
    let square = g.n() == g.m();
    let symmetric = square
        && (0..g.n()).all(|i| (0..g.m()).all(|j| g.b().get(i, j) == g.a().get(j, i)));
    let common_payoff = g.a() == g.b();
    let imitation = square
        && (0..g.n()).all(|i| {
            (0..g.m()).all(|j| {
                let expected = if i == j { S::one() } else { S::zero() };
                *g.b().get(i, j) == expected
            })
        });
    GameClass {
        symmetric,
        common_payoff,
        imitation,
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

fn max_entry<S: Scalar>(v: &Vector<S>) -> S {
    let mut best = v[0].clone();
    for val in v.iter().skip(1) {
        if *val > best {
            best = val.clone();
        }
    }
    best
}

/// True iff every supported strategy's payoff is within `eps` of the best
/// pure payoff.
fn supported_within<S: Scalar>(weights: &Vector<S>, payoffs: &Vector<S>, eps: &S) -> bool {
    let floor = max_entry(payoffs) - eps.clone();
    weights
        .iter()
        .zip(payoffs.iter())
        .all(|(w, p)| !(*w > S::zero()) || *p >= floor)
}

/// Verify that `p` is an ε-Nash equilibrium of `g`: neither player gains
/// more than `eps` by deviating to any pure strategy.
pub fn verify_nash<S: Scalar>(g: &BimatrixGame<S>, p: &MixedProfile<S>, eps: &S) -> Result<bool> {
    ensure_tolerance(eps)?;
    let row = g.row_payoffs(p.y())?;
    let col = g.col_payoffs(p.x())?;
    let row_value = p.x().dot(&row);
    let col_value = p.y().dot(&col);
    Ok(row_value >= max_entry(&row) - eps.clone()
        && col_value >= max_entry(&col) - eps.clone())
}

/// Verify that `p` is an ε-well-supported Nash equilibrium of `g`: every
/// strategy played with positive probability is within `eps` of the best
/// pure response.
pub fn verify_wsne<S: Scalar>(g: &BimatrixGame<S>, p: &MixedProfile<S>, eps: &S) -> Result<bool> {
    ensure_tolerance(eps)?;
    let row = g.row_payoffs(p.y())?;
    let col = g.col_payoffs(p.x())?;
    Ok(supported_within(p.x(), &row, eps) && supported_within(p.y(), &col, eps))
}

/// Zero out the weights whose payoff lags the best by more than `tau`,
/// then renormalize.
fn drop_lagging<S: Scalar>(
    weights: &Vector<S>,
    payoffs: &Vector<S>,
    tau: &S,
) -> Result<Vector<S>> {
    let floor = max_entry(payoffs) - tau.clone();
    let kept = Vector::from_fn(weights.len(), |i| {
        if payoffs[i] >= floor {
            weights[i].clone()
        } else {
            S::zero()
        }
    });
    let mass = kept.sum();
    if !(mass > S::zero()) {
        // Unreachable when the caller has checked the near-equilibrium
        // hypothesis: the played value is within ε²/8 of the best payoff,
        // so not every supported strategy can lag by more than ε/2.
        return Err(Error::Postcondition(
            "thresholding removed all probability mass".into(),
        ));
    }
    Ok(kept.map(|w| w.clone() / mass.clone()))
}

/// Convert an (ε²/8)-Nash equilibrium into an ε-well-supported one by
/// dropping, for each player, the strategies whose payoff lags that
/// player's best pure response by more than ε/2, and renormalizing.
///
/// The input is verified to be an (ε²/8)-equilibrium and the output is
/// re-verified at ε. When the game and the input profile are symmetric
/// both players' computations coincide, so the output is symmetric too.
pub fn nash_to_wsne<S: Scalar>(
    g: &BimatrixGame<S>,
    p: &MixedProfile<S>,
    eps: &S,
) -> Result<MixedProfile<S>> {
    if !(*eps > S::zero() && *eps <= S::one()) {
        return Err(Error::InvalidTolerance(format!(
            "tolerance {eps} must lie in (0, 1]"
        )));
    }
    let gate = eps.clone() * eps.clone() / S::from_int(8);
    if !verify_nash(g, p, &gate)? {
        return Err(Error::Hypothesis(format!(
            "profile is not a {gate}-approximate equilibrium"
        )));
    }
    let row = g.row_payoffs(p.y())?;
    let col = g.col_payoffs(p.x())?;
    let tau = eps.clone() / S::from_int(2);
    let x = drop_lagging(p.x(), &row, &tau)?;
    let y = drop_lagging(p.y(), &col, &tau)?;
    let out = MixedProfile::new(x, y)?;
    if !verify_wsne(g, &out, eps)? {
        return Err(Error::Postcondition(
            "thresholded profile fails the well-supported check".into(),
        ));
    }
    Ok(out)
}

/// From a symmetric well-supported equilibrium `(y, y)` of `(A, Aᵀ)` to a
/// well-supported equilibrium `(x, y)` of the imitation game `(A, I)`,
/// with `x` uniform on the support of `y`.
///
/// Every supported row strategy keeps its payoff guarantee because the
/// support only shrinks, and the column player's payoffs under `(A, I)`
/// are `x` itself, constant on the support — so the output verifies at
/// the same ε, for any ε ≥ 0.
pub fn imitation_forward<S: Scalar>(
    a: &Matrix<S>,
    y: &Vector<S>,
    eps: &S,
) -> Result<MixedProfile<S>> {
    ensure_tolerance(eps)?;
    let symmetric = BimatrixGame::symmetric(a.clone())?;
    let yy = MixedProfile::symmetric(y.clone())?;
    if !verify_wsne(&symmetric, &yy, eps)? {
        return Err(Error::Hypothesis(format!(
            "(y, y) is not an {eps}-well-supported equilibrium of the symmetric game"
        )));
    }
    let y = yy.y().clone();
    let support = y.support();
    let share = S::one() / S::from_int(support.len() as i64);
    let x = Vector::from_fn(y.len(), |i| {
        if y[i] > S::zero() {
            share.clone()
        } else {
            S::zero()
        }
    });
    let imitation = BimatrixGame::imitation(a.clone())?;
    let out = MixedProfile::new(x, y)?;
    if !verify_wsne(&imitation, &out, eps)? {
        return Err(Error::Postcondition(
            "uniform-support profile fails the imitation-game check".into(),
        ));
    }
    Ok(out)
}

/// From a well-supported equilibrium `(x, y)` of the imitation game
/// `(A, I)` back to a symmetric well-supported equilibrium `(y, y)` of
/// `(A, Aᵀ)`. Requires `ε < 1/n`: the column player's payoffs are `x`,
/// whose maximum is at least `1/n`, so every supported column strategy
/// has `x_j ≥ 1/n − ε > 0` — the support of `y` is contained in the
/// support of `x`, where the row conditions already hold.
pub fn imitation_backward<S: Scalar>(
    a: &Matrix<S>,
    p: &MixedProfile<S>,
    eps: &S,
) -> Result<Vector<S>> {
    ensure_tolerance(eps)?;
    let n = a.rows();
    if !(eps.clone() * S::from_int(n as i64) < S::one()) {
        return Err(Error::Hypothesis(format!(
            "tolerance {eps} must be below 1/{n} for the support argument"
        )));
    }
    let imitation = BimatrixGame::imitation(a.clone())?;
    if !verify_wsne(&imitation, p, eps)? {
        return Err(Error::Hypothesis(format!(
            "profile is not an {eps}-well-supported equilibrium of the imitation game"
        )));
    }
    let y = p.y().clone();
    let symmetric = BimatrixGame::symmetric(a.clone())?;
    let yy = MixedProfile::symmetric(y.clone())?;
    if !verify_wsne(&symmetric, &yy, eps)? {
        return Err(Error::Postcondition(
            "recovered strategy fails the symmetric-game check".into(),
        ));
    }
    Ok(y)
}

//! Seeded random instance generation for tests, benchmarks, and the
//! command-line `gen` command.
//!
//! Everything here is deterministic given the seed, across platforms and
//! dependency upgrades: the only randomness primitive used from the RNG
//! is `next_u64`, and all sampling on top of it (bounded integers by
//! rejection, grid rationals, simplex lattice points) is hand-rolled so
//! no library distribution change can silently alter the stream.
//!
//! All generated data live on coarse rational grids (denominator 100 for
//! matrix entries, 1000 for points), so instances are exactly
//! representable both as rationals and as floats-of-rationals, and the
//! same seed produces structurally identical instances for every scalar
//! type.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::error::{Error, Result};
use crate::games::BimatrixGame;
use crate::numerics::{Matrix, Scalar, SymMatrix, Vector};
use crate::qp::{BoxQp, SimplexQp};

/// The stream cipher RNG used everywhere; small state, fast, and stable
/// output for a given seed.
pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform draw from the inclusive range [lo, hi] by rejection sampling.
///
/// # Panics
/// Panics if `lo > hi`.
pub fn uniform_i64(rng: &mut ChaCha8Rng, lo: i64, hi: i64) -> i64 {
    assert!(lo <= hi, "empty range [{lo}, {hi}]");
    let span = (hi - lo) as u64 + 1;
    let limit = u64::MAX - u64::MAX % span;
    loop {
        let draw = rng.next_u64();
        if draw < limit {
            return lo + (draw % span) as i64;
        }
    }
}

/// A grid rational k/denom with k uniform over [lo_num, hi_num].
fn grid_value<S: Scalar>(rng: &mut ChaCha8Rng, lo_num: i64, hi_num: i64, denom: i64) -> S {
    S::from_ratio(uniform_i64(rng, lo_num, hi_num), denom)
}

/// Symmetric n×n matrix with entries k/100, k uniform in [lo, hi]:
/// the upper triangle is drawn and mirrored.
fn symmetric_grid_matrix<S: Scalar>(
    rng: &mut ChaCha8Rng,
    n: usize,
    lo: i64,
    hi: i64,
) -> SymMatrix<S> {
    let mut m = Matrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let v: S = grid_value(rng, lo, hi, 100);
            *m.get_mut(i, j) = v.clone();
            *m.get_mut(j, i) = v;
        }
    }
    SymMatrix::new(m).expect("mirrored entries are symmetric")
}

fn grid_matrix<S: Scalar>(
    rng: &mut ChaCha8Rng,
    rows: usize,
    cols: usize,
    lo: i64,
    hi: i64,
) -> Matrix<S> {
    let mut m = Matrix::zeros(rows, cols);
    for i in 0..rows {
        for j in 0..cols {
            *m.get_mut(i, j) = grid_value(rng, lo, hi, 100);
        }
    }
    m
}

/// Random box QP: symmetric matrix and linear term with entries k/100
/// uniform in [−2, 2].
pub fn box_qp<S: Scalar>(rng: &mut ChaCha8Rng, n: usize) -> Result<BoxQp<S>> {
    if n == 0 {
        return Err(Error::InvalidParams("instance needs n ≥ 1".into()));
    }
    let a = symmetric_grid_matrix(rng, n, -200, 200);
    let b = Vector::from_fn(n, |_| grid_value(rng, -200, 200, 100));
    BoxQp::new(a, b)
}

/// Random simplex QP: entries as in [`box_qp`], scale k/10 uniform in
/// (0, 4].
pub fn simplex_qp<S: Scalar>(rng: &mut ChaCha8Rng, n: usize) -> Result<SimplexQp<S>> {
    if n == 0 {
        return Err(Error::InvalidParams("instance needs n ≥ 1".into()));
    }
    let a = symmetric_grid_matrix(rng, n, -200, 200);
    let b = Vector::from_fn(n, |_| grid_value(rng, -200, 200, 100));
    let scale = grid_value(rng, 1, 40, 10);
    SimplexQp::new(a, b, scale)
}

/// Structural families of generated games.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GameShape {
    /// Independent payoff matrices.
    General,
    /// Column payoffs are the transpose of row payoffs (requires square).
    Symmetric,
    /// Both players receive the row player's payoff.
    CommonPayoff,
    /// Common payoff from a symmetric matrix (requires square); these are
    /// exactly the games whose payoff matrix can seed a simplex QP.
    SymmetricCommonPayoff,
    /// Column player's matrix is the identity (requires square).
    Imitation,
}

impl GameShape {
    fn needs_square(self) -> bool {
        !matches!(self, GameShape::General | GameShape::CommonPayoff)
    }
}

/// Random bimatrix game with entries k/100 uniform in [0, 1] and the
/// requested structure. Shapes other than `General` and `CommonPayoff`
/// require n = m.
pub fn game<S: Scalar>(
    rng: &mut ChaCha8Rng,
    n: usize,
    m: usize,
    shape: GameShape,
) -> Result<BimatrixGame<S>> {
    if n == 0 || m == 0 {
        return Err(Error::InvalidParams("games need n, m ≥ 1".into()));
    }
    if shape.needs_square() && n != m {
        return Err(Error::InvalidParams(format!(
            "{shape:?} games must be square, got {n}×{m}"
        )));
    }
    match shape {
        GameShape::General => {
            let a = grid_matrix(rng, n, m, 0, 100);
            let b = grid_matrix(rng, n, m, 0, 100);
            BimatrixGame::new(a, b)
        }
        GameShape::Symmetric => BimatrixGame::symmetric(grid_matrix(rng, n, n, 0, 100)),
        GameShape::CommonPayoff => BimatrixGame::common_payoff(grid_matrix(rng, n, m, 0, 100)),
        GameShape::SymmetricCommonPayoff => {
            let a = symmetric_grid_matrix::<S>(rng, n, 0, 100);
            BimatrixGame::common_payoff(a.as_matrix().clone())
        }
        GameShape::Imitation => BimatrixGame::imitation(grid_matrix(rng, n, n, 0, 100)),
    }
}

/// Uniform lattice point on the scaled simplex: n−1 sorted cuts on
/// [0, 1000] split the interval into n nonnegative integer gaps summing
/// to 1000, each mapped to `gap/1000 · scale`. Boundary points (zero
/// coordinates) occur naturally.
pub fn simplex_point<S: Scalar>(rng: &mut ChaCha8Rng, n: usize, scale: &S) -> Vector<S> {
    assert!(n >= 1, "points need n ≥ 1");
    let mut cuts: Vec<i64> = (0..n - 1).map(|_| uniform_i64(rng, 0, 1000)).collect();
    cuts.sort_unstable();
    cuts.insert(0, 0);
    cuts.push(1000);
    Vector::from_fn(n, |i| {
        S::from_ratio(cuts[i + 1] - cuts[i], 1000) * scale.clone()
    })
}

/// Uniform lattice point in the unit box: coordinates k/1000, k uniform
/// in [0, 1000].
pub fn box_point<S: Scalar>(rng: &mut ChaCha8Rng, n: usize) -> Vector<S> {
    Vector::from_fn(n, |_| grid_value(rng, 0, 1000, 1000))
}

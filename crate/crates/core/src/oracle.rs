//! Brute-force equilibrium enumeration for small games, in exact
//! rational arithmetic.
//!
//! This is the independent reference the tests compare everything else
//! against, so it deliberately shares no logic with the verifiers or
//! solvers: for every candidate support it solves the indifference
//! equations exactly and checks the best-response inequalities directly
//! from the payoff matrices. Cost grows exponentially in the matrix
//! size; intended for n ≤ 8 or so.

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::numerics::{solve_linear, Matrix, Rational, Scalar, Vector};

/// All exact symmetric Nash equilibria y — profiles (y, y) of the
/// symmetric game (A, Aᵀ) — found by enumerating candidate supports in
/// ascending bitmask order. For each support S the indifference system
/// `(Ay)_i = v on S, Σy = 1, y = 0 off S` is solved exactly; solutions
/// with nonnegative weights whose off-support payoffs do not exceed v
/// are equilibria. Supports with singular indifference systems are
/// skipped, so degenerate games may yield a subset of their equilibrium
/// continuum; every returned profile is exact.
pub fn symmetric_equilibria(a: &Matrix<Rational>) -> Result<Vec<Vector<Rational>>> {
    if !a.is_square() || a.rows() == 0 {
        return Err(Error::NotSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    let n = a.rows();
    if n > 20 {
        return Err(Error::InvalidParams(format!(
            "support enumeration over {n} strategies is not practical"
        )));
    }

    let mut found: Vec<Vector<Rational>> = Vec::new();
    for mask in 1u32..(1 << n) {
        let support: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
        let Some(y) = mixture_over(a, &support) else {
            continue;
        };
        let payoffs = a.matvec(&y);
        let value = payoffs[support[0]].clone();
        let best = payoffs
            .iter()
            .enumerate()
            .all(|(i, p)| support.contains(&i) || *p <= value);
        if best && !found.contains(&y) {
            found.push(y);
        }
    }
    Ok(found)
}

/// All exact Nash equilibria (x, y) of the bimatrix game (A, B) on
/// equal-size support pairs, enumerated in ascending (row mask, column
/// mask) order. Degenerate games can have equilibria on unequal-size
/// supports; those are not enumerated (they do not occur for generic
/// payoffs).
pub fn equilibria(
    a: &Matrix<Rational>,
    b: &Matrix<Rational>,
) -> Result<Vec<(Vector<Rational>, Vector<Rational>)>> {
    if a.rows() != b.rows() || a.cols() != b.cols() {
        return Err(Error::DimensionMismatch {
            expected: a.rows() * a.cols(),
            found: b.rows() * b.cols(),
        });
    }
    if a.rows() == 0 || a.cols() == 0 {
        return Err(Error::InvalidParams("games need n, m ≥ 1".into()));
    }
    let (n, m) = (a.rows(), a.cols());
    if n > 12 || m > 12 {
        return Err(Error::InvalidParams(format!(
            "support enumeration over a {n}×{m} game is not practical"
        )));
    }
    let bt = b.transpose();

    let mut found = Vec::new();
    for row_mask in 1u32..(1 << n) {
        let rows: Vec<usize> = (0..n).filter(|i| row_mask & (1 << i) != 0).collect();
        for col_mask in 1u32..(1 << m) {
            let cols: Vec<usize> = (0..m).filter(|j| col_mask & (1 << j) != 0).collect();
            if rows.len() != cols.len() {
                continue;
            }
            // y makes the row player indifferent across `rows`; x makes
            // the column player indifferent across `cols`.
            let Some(y) = mixture_on(a, &rows, &cols) else {
                continue;
            };
            let Some(x) = mixture_on(&bt, &cols, &rows) else {
                continue;
            };
            let row_payoffs = a.matvec(&y);
            let col_payoffs = bt.matvec(&x);
            let v = row_payoffs[rows[0]].clone();
            let w = col_payoffs[cols[0]].clone();
            let row_best = row_payoffs
                .iter()
                .enumerate()
                .all(|(i, p)| rows.contains(&i) || *p <= v);
            let col_best = col_payoffs
                .iter()
                .enumerate()
                .all(|(j, p)| cols.contains(&j) || *p <= w);
            if row_best && col_best && !found.contains(&(x.clone(), y.clone())) {
                found.push((x, y));
            }
        }
    }
    Ok(found)
}

/// Exact solution of the symmetric-support indifference system: weights
/// on `support` summing to 1 with `(Ay)_i` equal across the support.
/// `None` when the system is singular or a weight is negative.
fn mixture_over(a: &Matrix<Rational>, support: &[usize]) -> Option<Vector<Rational>> {
    mixture_on(a, support, support)
}

/// Weights y on `cols` summing to 1 making `(Ay)_i` constant over
/// `rows`; requires |rows| = |cols|. Unknowns are the |cols| weights and
/// the common payoff v.
fn mixture_on(
    a: &Matrix<Rational>,
    rows: &[usize],
    cols: &[usize],
) -> Option<Vector<Rational>> {
    let k = cols.len();
    debug_assert_eq!(rows.len(), k);
    let mut system = Vec::with_capacity(k + 1);
    for &i in rows {
        let mut row = Vec::with_capacity(k + 1);
        for &j in cols {
            row.push(a.get(i, j).clone());
        }
        row.push(Rational::from_int(-1));
        system.push(row);
    }
    let mut mass = vec![Rational::one(); k];
    mass.push(Rational::zero());
    system.push(mass);

    let mut rhs = vec![Rational::zero(); k];
    rhs.push(Rational::one());

    let solution = solve_linear(
        &Matrix::from_rows(system).expect("rows built with equal length"),
        &Vector::new(rhs),
    )?;
    let mut y = vec![Rational::zero(); a.cols()];
    for (slot, &j) in cols.iter().enumerate() {
        let w = solution[slot].clone();
        if w < Rational::zero() {
            return None;
        }
        y[j] = w;
    }
    Some(Vector::new(y))
}

//! Dense vectors and matrices at desk scale, Euclidean projections onto
//! the unit box and scaled probability simplices, and the shared
//! quadratic-program gradient `g(x) = A x + b`.
//!
//! Dimensions here are tiny (tens of coordinates), so everything is plain
//! row-major storage and O(n²) loops; no BLAS, no sparsity.

use std::cmp::Ordering;
use std::ops::Index;

use super::scalar::Scalar;
use crate::error::{Error, Result};

/// A dense column vector.
#[derive(Debug, Clone, PartialEq)]
pub struct Vector<S>(Vec<S>);

impl<S: Scalar> Vector<S> {
    pub fn new(entries: Vec<S>) -> Self {
        Vector(entries)
    }

    pub fn zeros(n: usize) -> Self {
        Vector(vec![S::zero(); n])
    }

    pub fn from_fn(n: usize, f: impl FnMut(usize) -> S) -> Self {
        Vector((0..n).map(f).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, S> {
        self.0.iter()
    }

    pub fn as_slice(&self) -> &[S] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<S> {
        self.0
    }

    pub fn map(&self, f: impl FnMut(&S) -> S) -> Vector<S> {
        Vector(self.0.iter().map(f).collect())
    }

    pub fn sum(&self) -> S {
        self.0.iter().fold(S::zero(), |acc, v| acc + v.clone())
    }

    /// Inner product. Panics on mismatched lengths (an internal invariant;
    /// public entry points validate dimensions first).
    pub fn dot(&self, other: &Vector<S>) -> S {
        assert_eq!(self.len(), other.len(), "dot of mismatched lengths");
        self.0
            .iter()
            .zip(other.iter())
            .fold(S::zero(), |acc, (a, b)| acc + a.clone() * b.clone())
    }

    /// `self + t * other`, used by solver line searches.
    pub fn add_scaled(&self, t: &S, other: &Vector<S>) -> Vector<S> {
        assert_eq!(self.len(), other.len(), "add_scaled of mismatched lengths");
        Vector(
            self.0
                .iter()
                .zip(other.iter())
                .map(|(a, b)| a.clone() + t.clone() * b.clone())
                .collect(),
        )
    }

    pub fn sub(&self, other: &Vector<S>) -> Vector<S> {
        assert_eq!(self.len(), other.len(), "sub of mismatched lengths");
        Vector(
            self.0
                .iter()
                .zip(other.iter())
                .map(|(a, b)| a.clone() - b.clone())
                .collect(),
        )
    }

    /// Largest absolute entry (zero for the empty vector).
    pub fn max_abs(&self) -> S {
        self.0.iter().fold(S::zero(), |acc, v| {
            let a = v.abs();
            if a > acc {
                a
            } else {
                acc
            }
        })
    }

    /// Indices of strictly positive coordinates.
    pub fn support(&self) -> Vec<usize> {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, v)| **v > S::zero())
            .map(|(i, _)| i)
            .collect()
    }

    pub fn to_f64(&self) -> Vector<f64> {
        Vector(self.0.iter().map(Scalar::to_f64).collect())
    }
}

impl<S> Index<usize> for Vector<S> {
    type Output = S;
    fn index(&self, i: usize) -> &S {
        &self.0[i]
    }
}

impl<'a, S> IntoIterator for &'a Vector<S> {
    type Item = &'a S;
    type IntoIter = std::slice::Iter<'a, S>;
    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

/// A dense rectangular matrix in row-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<S> {
    rows: usize,
    cols: usize,
    data: Vec<S>,
}

impl<S: Scalar> Matrix<S> {
    pub fn new(rows: usize, cols: usize, data: Vec<S>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                found: data.len(),
            });
        }
        Ok(Matrix { rows, cols, data })
    }

    /// Build from a list of equally long rows.
    pub fn from_rows(rows: Vec<Vec<S>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            if row.len() != c {
                return Err(Error::DimensionMismatch {
                    expected: c,
                    found: row.len(),
                });
            }
            data.extend(row);
        }
        Matrix::new(r, c, data)
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![S::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            *m.get_mut(i, i) = S::one();
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &S {
        &self.data[i * self.cols + j]
    }

    pub fn get_mut(&mut self, i: usize, j: usize) -> &mut S {
        &mut self.data[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[S] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> Matrix<S> {
        let mut out = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                *out.get_mut(j, i) = self.get(i, j).clone();
            }
        }
        out
    }

    /// `A x`.
    pub fn matvec(&self, x: &Vector<S>) -> Vector<S> {
        assert_eq!(self.cols, x.len(), "matvec of mismatched dimensions");
        Vector::from_fn(self.rows, |i| {
            self.row(i)
                .iter()
                .zip(x.iter())
                .fold(S::zero(), |acc, (a, v)| acc + a.clone() * v.clone())
        })
    }

    /// `Aᵀ x`, i.e. the vector of column inner products.
    pub fn tr_matvec(&self, x: &Vector<S>) -> Vector<S> {
        assert_eq!(self.rows, x.len(), "tr_matvec of mismatched dimensions");
        Vector::from_fn(self.cols, |j| {
            (0..self.rows).fold(S::zero(), |acc, i| {
                acc + self.get(i, j).clone() * x[i].clone()
            })
        })
    }

    pub fn map(&self, f: impl FnMut(&S) -> S) -> Matrix<S> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn to_f64(&self) -> Matrix<f64> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(Scalar::to_f64).collect(),
        }
    }
}

/// A square matrix checked to be symmetric at construction.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix<S>(Matrix<S>);

impl<S: Scalar> SymMatrix<S> {
    pub fn new(m: Matrix<S>) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::NotSquare {
                rows: m.rows(),
                cols: m.cols(),
            });
        }
        for i in 0..m.rows() {
            for j in (i + 1)..m.cols() {
                if m.get(i, j) != m.get(j, i) {
                    return Err(Error::NotSymmetric { i, j });
                }
            }
        }
        Ok(SymMatrix(m))
    }

    pub fn from_rows(rows: Vec<Vec<S>>) -> Result<Self> {
        SymMatrix::new(Matrix::from_rows(rows)?)
    }

    /// Dimension of the (square) matrix.
    pub fn dim(&self) -> usize {
        self.0.rows()
    }

    pub fn get(&self, i: usize, j: usize) -> &S {
        self.0.get(i, j)
    }

    pub fn row(&self, i: usize) -> &[S] {
        self.0.row(i)
    }

    pub fn matvec(&self, x: &Vector<S>) -> Vector<S> {
        self.0.matvec(x)
    }

    pub fn as_matrix(&self) -> &Matrix<S> {
        &self.0
    }

    pub fn map(&self, f: impl FnMut(&S) -> S) -> Result<SymMatrix<S>> {
        SymMatrix::new(self.0.map(f))
    }

    pub fn to_f64(&self) -> SymMatrix<f64> {
        SymMatrix(self.0.to_f64())
    }
}

/// Project onto the unit box `[0,1]ⁿ` (coordinate-wise clamp).
pub fn project_box<S: Scalar>(v: &Vector<S>) -> Vector<S> {
    v.map(|x| {
        if *x < S::zero() {
            S::zero()
        } else if *x > S::one() {
            S::one()
        } else {
            x.clone()
        }
    })
}

/// Euclidean projection onto the scaled simplex `{x ≥ 0, Σx = s}` by the
/// sort-and-threshold rule: sort coordinates in decreasing order (ties
/// broken by coordinate index), find the longest prefix whose running
/// threshold stays below its last member, subtract the threshold, clamp
/// at zero. Exact under rationals; O(n log n).
pub fn project_simplex<S: Scalar>(v: &Vector<S>, s: &S) -> Result<Vector<S>> {
    if *s <= S::zero() {
        return Err(Error::NonPositiveScale);
    }
    let n = v.len();
    if n == 0 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            found: 0,
        });
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        v[j].partial_cmp(&v[i])
            .unwrap_or(Ordering::Equal)
            .then(i.cmp(&j))
    });

    let mut prefix = S::zero();
    let mut tau = S::zero();
    for (r, &i) in order.iter().enumerate() {
        prefix = prefix + v[i].clone();
        let candidate = (prefix.clone() - s.clone()) / S::from_int(r as i64 + 1);
        if v[i] > candidate {
            tau = candidate;
        } else {
            break;
        }
    }
    Ok(v.map(|x| {
        let shifted = x.clone() - tau.clone();
        if shifted > S::zero() {
            shifted
        } else {
            S::zero()
        }
    }))
}

/// Gradient of `f(x) = ½ xᵀA x + bᵀx`, namely `A x + b`.
pub fn qp_gradient<S: Scalar>(a: &SymMatrix<S>, b: &Vector<S>, x: &Vector<S>) -> Result<Vector<S>> {
    if b.len() != a.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: b.len(),
        });
    }
    if x.len() != a.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: x.len(),
        });
    }
    let mut out = a.matvec(x).into_vec();
    for (o, bi) in out.iter_mut().zip(b.iter()) {
        *o = o.clone() + bi.clone();
    }
    Ok(Vector::new(out))
}

/// Objective value `½ xᵀA x + bᵀx` of the shared quadratic form.
pub fn half_quadratic<S: Scalar>(a: &SymMatrix<S>, b: &Vector<S>, x: &Vector<S>) -> Result<S> {
    if b.len() != a.dim() || x.len() != a.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: if b.len() != a.dim() { b.len() } else { x.len() },
        });
    }
    let ax = a.matvec(x);
    Ok(x.dot(&ax) * S::from_ratio(1, 2) + b.dot(x))
}

/// Solve the square linear system `A t = rhs` by Gaussian elimination with
/// largest-pivot selection. Returns `None` when the system is (numerically)
/// singular. Exact under rationals.
pub fn solve_linear<S: Scalar>(a: &Matrix<S>, rhs: &Vector<S>) -> Option<Vector<S>> {
    assert!(a.is_square(), "solve_linear needs a square system");
    assert_eq!(a.rows(), rhs.len(), "solve_linear dimension mismatch");
    let n = a.rows();
    let mut m = a.clone();
    let mut v: Vec<S> = rhs.as_slice().to_vec();

    for col in 0..n {
        // Largest pivot in the column: numerically sensible for floats,
        // a plain nonzero pick for rationals.
        let pivot = (col..n).max_by(|&i, &j| {
            m.get(i, col)
                .abs()
                .partial_cmp(&m.get(j, col).abs())
                .unwrap_or(Ordering::Equal)
        })?;
        if m.get(pivot, col).is_zero() {
            return None;
        }
        if pivot != col {
            for j in 0..n {
                let a = m.get(pivot, j).clone();
                let b = m.get(col, j).clone();
                *m.get_mut(pivot, j) = b;
                *m.get_mut(col, j) = a;
            }
            v.swap(pivot, col);
        }
        let diag = m.get(col, col).clone();
        for i in (col + 1)..n {
            let factor = m.get(i, col).clone() / diag.clone();
            if factor.is_zero() {
                continue;
            }
            for j in col..n {
                let delta = factor.clone() * m.get(col, j).clone();
                *m.get_mut(i, j) = m.get(i, j).clone() - delta;
            }
            v[i] = v[i].clone() - factor * v[col].clone();
        }
    }

    // Back substitution.
    let mut out = vec![S::zero(); n];
    for i in (0..n).rev() {
        let mut acc = v[i].clone();
        for j in (i + 1)..n {
            acc = acc - m.get(i, j).clone() * out[j].clone();
        }
        out[i] = acc / m.get(i, i).clone();
    }
    Some(Vector::new(out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::Rational;
    use num_traits::{One, Zero};
    use proptest::prelude::*;

    fn rvec(entries: &[(i64, i64)]) -> Vector<Rational> {
        Vector::new(
            entries
                .iter()
                .map(|&(p, q)| Rational::from_ratio(p, q))
                .collect(),
        )
    }

    fn fvec(entries: &[f64]) -> Vector<f64> {
        Vector::new(entries.to_vec())
    }

    /// Brute-force simplex projection for tiny n: enumerate every subset of
    /// coordinates forced to zero, shift the rest uniformly, keep the
    /// feasible candidate closest to `v`. Independent of the
    /// sort-and-threshold implementation.
    fn brute_force_simplex(v: &Vector<Rational>, s: &Rational) -> Vector<Rational> {
        let n = v.len();
        let mut best: Option<(Rational, Vector<Rational>)> = None;
        for mask in 0usize..(1 << n) {
            let free: Vec<usize> = (0..n).filter(|i| mask & (1 << i) == 0).collect();
            if free.is_empty() {
                continue;
            }
            let k = Rational::from_int(free.len() as i64);
            let sum_free = free
                .iter()
                .fold(Rational::zero(), |acc, &i| acc + v[i].clone());
            let shift = (sum_free - s.clone()) / k;
            let mut candidate = vec![Rational::zero(); n];
            let mut feasible = true;
            for &i in &free {
                let value = v[i].clone() - shift.clone();
                if value < Rational::zero() {
                    feasible = false;
                    break;
                }
                candidate[i] = value;
            }
            if !feasible {
                continue;
            }
            let candidate = Vector::new(candidate);
            let dist = candidate
                .sub(v)
                .iter()
                .fold(Rational::zero(), |acc, d| acc + d.clone() * d.clone());
            if best.as_ref().is_none_or(|(b, _)| dist < *b) {
                best = Some((dist, candidate));
            }
        }
        best.expect("simplex projection always exists").1
    }

    #[test]
    fn box_projection_clamps() {
        assert_eq!(
            project_box(&fvec(&[0.5, 0.5])).as_slice(),
            &[0.5, 0.5]
        );
        assert_eq!(
            project_box(&fvec(&[1.3, -0.2])).as_slice(),
            &[1.0, 0.0]
        );
        assert_eq!(
            project_box(&fvec(&[0.0, 2.0, 0.7])).as_slice(),
            &[0.0, 1.0, 0.7]
        );
    }

    #[test]
    fn simplex_projection_fixed_points_and_thresholds() {
        let one = Rational::one();
        // Already feasible: unchanged.
        let p = project_simplex(&rvec(&[(1, 2), (1, 2)]), &one).unwrap();
        assert_eq!(p, rvec(&[(1, 2), (1, 2)]));
        // (2,0) at s=1 lands on the vertex (1,0).
        let p = project_simplex(&rvec(&[(2, 1), (0, 1)]), &one).unwrap();
        assert_eq!(p, rvec(&[(1, 1), (0, 1)]));
        // (0.6,0.6) shifts by τ = 0.1 to (0.5,0.5).
        let p = project_simplex(&rvec(&[(3, 5), (3, 5)]), &one).unwrap();
        assert_eq!(p, rvec(&[(1, 2), (1, 2)]));
    }

    #[test]
    fn simplex_projection_matches_brute_force() {
        let s = Rational::one();
        let grid = [-2i64, -1, 0, 1, 2, 3];
        for &a in &grid {
            for &b in &grid {
                for &c in &grid {
                    let v = rvec(&[(a, 2), (b, 3), (c, 1)]);
                    let fast = project_simplex(&v, &s).unwrap();
                    let brute = brute_force_simplex(&v, &s);
                    assert_eq!(fast, brute, "disagree on {v:?}");
                }
            }
        }
    }

    #[test]
    fn simplex_projection_rejects_bad_scale() {
        assert!(matches!(
            project_simplex(&fvec(&[0.5]), &0.0),
            Err(Error::NonPositiveScale)
        ));
        assert!(matches!(
            project_simplex(&fvec(&[0.5]), &-1.0),
            Err(Error::NonPositiveScale)
        ));
    }

    #[test]
    fn gradient_examples() {
        // A = [[0]], b = [-1]: constant gradient -1.
        let a = SymMatrix::from_rows(vec![vec![Rational::zero()]]).unwrap();
        let b = rvec(&[(-1, 1)]);
        let g = qp_gradient(&a, &b, &rvec(&[(1, 1)])).unwrap();
        assert_eq!(g, rvec(&[(-1, 1)]));

        // Identity quadratic, zero linear: gradient equals the point.
        let a = SymMatrix::new(Matrix::identity(2)).unwrap();
        let b = rvec(&[(0, 1), (0, 1)]);
        let x = rvec(&[(1, 3), (2, 3)]);
        assert_eq!(qp_gradient(&a, &b, &x).unwrap(), x);

        // Off-diagonal coupling swaps coordinates.
        let a = SymMatrix::from_rows(vec![
            vec![Rational::zero(), Rational::one()],
            vec![Rational::one(), Rational::zero()],
        ])
        .unwrap();
        let g = qp_gradient(&a, &rvec(&[(0, 1), (0, 1)]), &rvec(&[(1, 1), (0, 1)])).unwrap();
        assert_eq!(g, rvec(&[(0, 1), (1, 1)]));
    }

    #[test]
    fn gradient_dimension_errors() {
        let a = SymMatrix::new(Matrix::identity(2)).unwrap();
        let short = rvec(&[(0, 1)]);
        let full = rvec(&[(0, 1), (0, 1)]);
        assert!(qp_gradient(&a, &short, &full).is_err());
        assert!(qp_gradient(&a, &full, &short).is_err());
    }

    #[test]
    fn symmetry_is_checked() {
        let m = Matrix::from_rows(vec![
            vec![1.0, 2.0],
            vec![3.0, 4.0],
        ])
        .unwrap();
        assert!(matches!(
            SymMatrix::new(m),
            Err(Error::NotSymmetric { i: 0, j: 1 })
        ));
        let tall = Matrix::from_rows(vec![vec![1.0], vec![2.0]]).unwrap();
        assert!(matches!(SymMatrix::new(tall), Err(Error::NotSquare { .. })));
    }

    #[test]
    fn solve_linear_small_systems() {
        // 2x2 rational system with a fraction answer.
        let a = Matrix::from_rows(vec![
            vec![Rational::from_int(2), Rational::from_int(1)],
            vec![Rational::from_int(1), Rational::from_int(3)],
        ])
        .unwrap();
        let rhs = rvec(&[(1, 1), (2, 1)]);
        let t = solve_linear(&a, &rhs).unwrap();
        assert_eq!(t, rvec(&[(1, 5), (3, 5)]));
        // Singular system yields None.
        let singular = Matrix::from_rows(vec![
            vec![Rational::one(), Rational::one()],
            vec![Rational::one(), Rational::one()],
        ])
        .unwrap();
        assert!(solve_linear(&singular, &rhs).is_none());
    }

    proptest! {
        #[test]
        fn simplex_projection_is_idempotent_and_feasible(
            entries in proptest::collection::vec((-40i64..40, 1i64..8), 1..7),
            s_num in 1i64..5,
        ) {
            let v = Vector::new(entries.iter().map(|&(p, q)| Rational::from_ratio(p, q)).collect());
            let s = Rational::from_int(s_num);
            let p = project_simplex(&v, &s).unwrap();
            prop_assert!(p.iter().all(|x| *x >= Rational::zero()));
            prop_assert_eq!(p.sum(), s.clone());
            let again = project_simplex(&p, &s).unwrap();
            prop_assert_eq!(again, p);
        }

        #[test]
        fn float_simplex_projection_sums_within_tolerance(
            entries in proptest::collection::vec(-10.0f64..10.0, 1..12),
            s in 0.5f64..4.0,
        ) {
            let v = Vector::new(entries);
            let p = project_simplex(&v, &s).unwrap();
            prop_assert!(p.iter().all(|x| *x >= 0.0));
            prop_assert!((p.sum() - s).abs() <= 1e-10);
        }

        #[test]
        fn box_projection_is_idempotent(entries in proptest::collection::vec(-3.0f64..4.0, 1..10)) {
            let v = Vector::new(entries);
            let p = project_box(&v);
            prop_assert_eq!(project_box(&p), p);
        }
    }
}

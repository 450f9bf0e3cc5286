//! Exact dense linear algebra over arbitrary-precision rationals.
//!
//! Every dimension this crate reports is a rank decision, so nothing here
//! ever touches floating point. Matrices are dense and row-major; the
//! elimination skips zero entries, which keeps the sparse systems produced
//! by the prolongation and ansatz solvers cheap.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

/// The scalar used everywhere: a reduced fraction of big integers.
pub type Rational = BigRational;

/// Shorthand for the rational `n / d`.
///
/// # Panics
///
/// Panics if `d == 0`.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Shorthand for the integer `n` as a rational.
pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinalgError {
    #[error("ambient dimension mismatch: {left} vs {right}")]
    AmbientMismatch { left: usize, right: usize },
    #[error("vector of length {got} does not fit ambient dimension {expected}")]
    LengthMismatch { expected: usize, got: usize },
}

#[derive(Clone, PartialEq, Eq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![Rational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Rational::one();
        }
        m
    }

    /// Builds a matrix from explicit rows. All rows must have `cols` entries.
    pub fn from_rows(cols: usize, rows: Vec<Vec<Rational>>) -> Self {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * cols);
        for row in rows {
            assert_eq!(row.len(), cols, "ragged row");
            data.extend(row);
        }
        Matrix {
            rows: n,
            cols,
            data,
        }
    }

    /// Integer convenience constructor, mostly for tests and presets.
    pub fn from_ints(rows: &[&[i64]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        Self::from_rows(
            cols,
            rows.iter()
                .map(|r| r.iter().map(|&v| int(v)).collect())
                .collect(),
        )
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn mul_vec(&self, v: &[Rational]) -> Vec<Rational> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .filter(|(a, b)| !a.is_zero() && !b.is_zero())
                    .fold(Rational::zero(), |acc, (a, b)| acc + a * b)
            })
            .collect()
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows);
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] += a * b;
                    }
                }
            }
        }
        out
    }

    /// Reduced row-echelon form by Gauss-Jordan elimination, choosing the
    /// leftmost available pivot column and the topmost nonzero row.
    pub fn rref(&self) -> Rref {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !m[(i, c)].is_zero()) else {
                continue;
            };
            m.swap_rows(p, r);
            let inv = m[(r, c)].recip();
            let mut pivot_row = Vec::new();
            for j in c..m.cols {
                let e = &mut m[(r, j)];
                if !e.is_zero() {
                    *e *= &inv;
                    pivot_row.push((j, e.clone()));
                }
            }
            for i in 0..m.rows {
                if i == r || m[(i, c)].is_zero() {
                    continue;
                }
                let f = m[(i, c)].clone();
                for (j, v) in &pivot_row {
                    let e = &mut m[(i, *j)];
                    *e -= &f * v;
                }
            }
            pivots.push(c);
            r += 1;
        }
        Rref {
            rank: pivots.len(),
            matrix: m,
            pivots,
        }
    }

    pub fn rank(&self) -> usize {
        self.rref().rank
    }

    /// The exact kernel `{v : M v = 0}` in canonical form.
    pub fn nullspace(&self) -> Subspace {
        let Rref {
            matrix: r, pivots, ..
        } = self.rref();
        let mut is_pivot = vec![false; self.cols];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        let vectors = (0..self.cols)
            .filter(|&f| !is_pivot[f])
            .map(|f| {
                let mut v = vec![Rational::zero(); self.cols];
                v[f] = Rational::one();
                for (i, &p) in pivots.iter().enumerate() {
                    v[p] = -r[(i, f)].clone();
                }
                v
            })
            .collect();
        Subspace::span(self.cols, vectors)
    }

    /// One solution of `M x = b`, or `None` when the system is inconsistent.
    /// Free variables are set to zero.
    pub fn solve(&self, b: &[Rational]) -> Option<Vec<Rational>> {
        assert_eq!(b.len(), self.rows);
        let mut aug = Matrix::zeros(self.rows, self.cols + 1);
        for i in 0..self.rows {
            for j in 0..self.cols {
                aug[(i, j)] = self[(i, j)].clone();
            }
            aug[(i, self.cols)] = b[i].clone();
        }
        let Rref {
            matrix: r, pivots, ..
        } = aug.rref();
        if pivots.last() == Some(&self.cols) {
            return None;
        }
        let mut x = vec![Rational::zero(); self.cols];
        for (i, &p) in pivots.iter().enumerate() {
            x[p] = r[(i, self.cols)].clone();
        }
        Some(x)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }
}

impl std::ops::Index<(usize, usize)> for Matrix {
    type Output = Rational;
    fn index(&self, (i, j): (usize, usize)) -> &Rational {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Rational {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(|v| v.to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

/// Result of [`Matrix::rref`].
#[derive(Debug, Clone)]
pub struct Rref {
    pub matrix: Matrix,
    pub rank: usize,
    pub pivots: Vec<usize>,
}

/// A linear subspace of `Q^n`, stored by its reduced row-echelon basis.
///
/// The basis is canonical: two subspaces are equal exactly when their
/// bases are equal entrywise.
#[derive(Clone, PartialEq, Eq)]
pub struct Subspace {
    ambient_dim: usize,
    basis: Vec<Vec<Rational>>,
    pivots: Vec<usize>,
}

impl Subspace {
    pub fn zero(ambient_dim: usize) -> Self {
        Subspace {
            ambient_dim,
            basis: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn full(ambient_dim: usize) -> Self {
        Self::span(
            ambient_dim,
            (0..ambient_dim).map(|i| unit(ambient_dim, i)).collect(),
        )
    }

    /// The span of arbitrary (possibly dependent) vectors.
    pub fn span(ambient_dim: usize, vectors: Vec<Vec<Rational>>) -> Self {
        if vectors.is_empty() {
            return Self::zero(ambient_dim);
        }
        let Rref {
            matrix, pivots, ..
        } = Matrix::from_rows(ambient_dim, vectors).rref();
        let basis = (0..pivots.len()).map(|i| matrix.row(i).to_vec()).collect();
        Subspace {
            ambient_dim,
            basis,
            pivots,
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn is_zero(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn basis(&self) -> &[Vec<Rational>] {
        &self.basis
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// Coordinates of `v` in the canonical basis, or `None` if `v` is not in
    /// the subspace. Because the basis is reduced, the candidate coordinates
    /// are simply the entries of `v` at the pivot positions.
    pub fn coordinates(&self, v: &[Rational]) -> Option<Vec<Rational>> {
        if v.len() != self.ambient_dim {
            return None;
        }
        let coords: Vec<Rational> = self.pivots.iter().map(|&p| v[p].clone()).collect();
        (self.combine(&coords) == v).then_some(coords)
    }

    pub fn contains(&self, v: &[Rational]) -> bool {
        self.coordinates(v).is_some()
    }

    /// `Σ coords[i] · basis[i]`.
    pub fn combine(&self, coords: &[Rational]) -> Vec<Rational> {
        assert_eq!(coords.len(), self.dim());
        let mut out = vec![Rational::zero(); self.ambient_dim];
        for (c, b) in coords.iter().zip(&self.basis) {
            if c.is_zero() {
                continue;
            }
            for (o, e) in out.iter_mut().zip(b) {
                if !e.is_zero() {
                    *o += c * e;
                }
            }
        }
        out
    }

    pub fn contains_subspace(&self, other: &Subspace) -> Result<bool, LinalgError> {
        self.check_ambient(other)?;
        Ok(other.basis.iter().all(|v| self.contains(v)))
    }

    pub fn sum(&self, other: &Subspace) -> Result<Subspace, LinalgError> {
        self.check_ambient(other)?;
        let vectors = self.basis.iter().chain(&other.basis).cloned().collect();
        Ok(Subspace::span(self.ambient_dim, vectors))
    }

    /// Intersection with the kernel of a set of linear functionals.
    pub fn restrict(&self, functionals: &[Vec<Rational>]) -> Result<Subspace, LinalgError> {
        for f in functionals {
            if f.len() != self.ambient_dim {
                return Err(LinalgError::LengthMismatch {
                    expected: self.ambient_dim,
                    got: f.len(),
                });
            }
        }
        if functionals.is_empty() {
            return Ok(self.clone());
        }
        // Solve for coefficients c with F · (Σ c_i b_i) = 0.
        let rows = functionals
            .iter()
            .map(|f| self.basis.iter().map(|b| dot(f, b)).collect())
            .collect();
        let kernel = Matrix::from_rows(self.dim(), rows).nullspace();
        let vectors = kernel.basis.iter().map(|c| self.combine(c)).collect();
        Ok(Subspace::span(self.ambient_dim, vectors))
    }

    fn check_ambient(&self, other: &Subspace) -> Result<(), LinalgError> {
        if self.ambient_dim != other.ambient_dim {
            return Err(LinalgError::AmbientMismatch {
                left: self.ambient_dim,
                right: other.ambient_dim,
            });
        }
        Ok(())
    }
}

impl fmt::Debug for Subspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Subspace(dim {} in Q^{}) [", self.dim(), self.ambient_dim)?;
        for b in &self.basis {
            let row: Vec<String> = b.iter().map(|v| v.to_string()).collect();
            write!(f, " ({})", row.join(", "))?;
        }
        write!(f, " ]")
    }
}

/// True iff `a` and `b` are the same subspace.
pub fn span_equal(a: &Subspace, b: &Subspace) -> Result<bool, LinalgError> {
    a.check_ambient(b)?;
    Ok(a.basis == b.basis)
}

pub fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter()
        .zip(b)
        .filter(|(x, y)| !x.is_zero() && !y.is_zero())
        .fold(Rational::zero(), |acc, (x, y)| acc + x * y)
}

pub fn unit(n: usize, i: usize) -> Vec<Rational> {
    let mut v = vec![Rational::zero(); n];
    v[i] = Rational::one();
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ints(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|&x| int(x)).collect()
    }

    #[test]
    fn rref_identity() {
        let r = Matrix::identity(3).rref();
        assert_eq!(r.matrix, Matrix::identity(3));
        assert_eq!(r.rank, 3);
        assert_eq!(r.pivots, vec![0, 1, 2]);
    }

    #[test]
    fn rref_zero() {
        let r = Matrix::zeros(2, 2).rref();
        assert!(r.matrix.is_zero());
        assert_eq!(r.rank, 0);
        assert!(r.pivots.is_empty());
    }

    #[test]
    fn rref_proportional_rows() {
        let r = Matrix::from_ints(&[&[1, 2], &[2, 4]]).rref();
        assert_eq!(r.matrix, Matrix::from_ints(&[&[1, 2], &[0, 0]]));
        assert_eq!(r.rank, 1);
    }

    #[test]
    fn nullspace_examples() {
        assert!(Matrix::identity(4).nullspace().is_zero());
        assert_eq!(Matrix::zeros(2, 3).nullspace(), Subspace::full(3));

        let k = Matrix::from_ints(&[&[1, 1, 0]]).nullspace();
        assert_eq!(k.dim(), 2);
        assert!(k.contains(&ints(&[1, -1, 0])));
        assert!(k.contains(&ints(&[0, 0, 1])));
    }

    #[test]
    fn span_equal_examples() {
        let a = Subspace::span(2, vec![ints(&[1, 0])]);
        let b = Subspace::span(2, vec![ints(&[2, 0])]);
        let c = Subspace::span(2, vec![ints(&[0, 1])]);
        let d = Subspace::span(2, vec![ints(&[1, 1]), ints(&[1, -1])]);
        assert!(span_equal(&a, &b).unwrap());
        assert!(!span_equal(&a, &c).unwrap());
        assert!(span_equal(&d, &Subspace::full(2)).unwrap());
        assert_eq!(
            span_equal(&a, &Subspace::full(3)),
            Err(LinalgError::AmbientMismatch { left: 2, right: 3 })
        );
    }

    #[test]
    fn solve_consistent_and_inconsistent() {
        let m = Matrix::from_ints(&[&[1, 1], &[1, -1]]);
        assert_eq!(m.solve(&ints(&[2, 0])), Some(ints(&[1, 1])));
        let singular = Matrix::from_ints(&[&[1, 1], &[2, 2]]);
        assert_eq!(singular.solve(&ints(&[1, 3])), None);
    }

    #[test]
    fn restrict_intersects_with_kernel() {
        let plane = Subspace::span(3, vec![ints(&[1, 0, 0]), ints(&[0, 1, 0])]);
        let line = plane.restrict(&[ints(&[1, -1, 5])]).unwrap();
        assert_eq!(line, Subspace::span(3, vec![ints(&[1, 1, 0])]));
    }

    #[test]
    fn rational_arithmetic_is_exact() {
        // a/b + c/d checked against cross multiplication.
        let (a, b, c, d) = (3, 14, -5, 21);
        let sum = rat(a, b) + rat(c, d);
        assert_eq!(sum, rat(a * d + c * b, b * d));
        assert_eq!(sum, rat(-1, 42));
        assert_eq!(rat(0, 7), Rational::zero());
        assert_eq!(*rat(2, -4).denom(), BigInt::from(2));
    }

    fn small_matrix() -> impl Strategy<Value = Matrix> {
        (1usize..5, 1usize..6).prop_flat_map(|(r, c)| {
            proptest::collection::vec(-3i64..4, r * c).prop_map(move |v| {
                Matrix::from_rows(
                    c,
                    v.chunks(c).map(|row| row.iter().map(|&x| int(x)).collect()).collect(),
                )
            })
        })
    }

    proptest! {
        #[test]
        fn rref_is_idempotent(m in small_matrix()) {
            let once = m.rref().matrix;
            prop_assert_eq!(once.rref().matrix, once);
        }

        #[test]
        fn rank_nullity(m in small_matrix()) {
            let k = m.nullspace();
            prop_assert_eq!(m.rank() + k.dim(), m.cols());
            for v in k.basis() {
                prop_assert!(m.mul_vec(v).iter().all(Zero::is_zero));
            }
        }

        #[test]
        fn rational_sum_matches_cross_multiplication(
            a in -50i64..50, b in 1i64..30, c in -50i64..50, d in 1i64..30
        ) {
            prop_assert_eq!(rat(a, b) + rat(c, d), rat(a * d + c * b, b * d));
        }
    }
}

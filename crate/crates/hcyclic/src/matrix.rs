//! Dense complex matrices, vectors, and the special constructions the rest of
//! the crate is built from: roots of unity, circulants, cycle matrices,
//! Hadamard products, direct sums, and Jordan blocks.

use std::f64::consts::PI;
use std::fmt;
use std::ops::{Index, IndexMut};

use num_complex::Complex64;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MatrixError {
    #[error("expected {rows}x{cols} = {} entries, got {got}", rows * cols)]
    EntryCountMismatch { rows: usize, cols: usize, got: usize },
    #[error("matrix dimensions must be positive, got {rows}x{cols}")]
    EmptyDimensions { rows: usize, cols: usize },
    #[error("dimension mismatch: {left_rows}x{left_cols} vs {right_rows}x{right_cols}")]
    DimensionMismatch {
        left_rows: usize,
        left_cols: usize,
        right_rows: usize,
        right_cols: usize,
    },
    #[error("operation requires a square matrix, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("direct sum block {index} is not square ({rows}x{cols})")]
    NonSquareBlock { index: usize, rows: usize, cols: usize },
    #[error("direct sum requires at least one block")]
    NoBlocks,
    #[error("cycle matrix K_n is only defined for n >= 2, got {n}")]
    CycleTooSmall { n: usize },
    #[error("roots of unity require h >= 2, got {h}")]
    OrderTooSmall { h: usize },
    #[error("rotation index k = {k} out of range 0..{h}")]
    RotationIndexOutOfRange { k: usize, h: usize },
    #[error("vector length mismatch: expected {expected}, got {got}")]
    VectorLengthMismatch { expected: usize, got: usize },
}

/// Dense complex column vector.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexVector {
    entries: Vec<Complex64>,
}

impl ComplexVector {
    pub fn new(entries: Vec<Complex64>) -> Self {
        Self { entries }
    }

    pub fn zeros(dim: usize) -> Self {
        Self { entries: vec![Complex64::ZERO; dim] }
    }

    pub fn from_real(values: &[f64]) -> Self {
        Self { entries: values.iter().map(|&v| Complex64::new(v, 0.0)).collect() }
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn entries_mut(&mut self) -> &mut [Complex64] {
        &mut self.entries
    }

    pub fn into_entries(self) -> Vec<Complex64> {
        self.entries
    }

    /// Max entry modulus.
    pub fn inf_norm(&self) -> f64 {
        self.entries.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn one_norm(&self) -> f64 {
        self.entries.iter().map(|z| z.norm()).sum()
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self { entries: self.entries.iter().map(|&z| factor * z).collect() }
    }

    pub fn sub(&self, other: &Self) -> Result<Self, MatrixError> {
        if self.dim() != other.dim() {
            return Err(MatrixError::VectorLengthMismatch { expected: self.dim(), got: other.dim() });
        }
        Ok(Self {
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(&a, &b)| a - b)
                .collect(),
        })
    }

    /// Unconjugated dot product y^T x.
    pub fn dot(&self, other: &Self) -> Result<Complex64, MatrixError> {
        if self.dim() != other.dim() {
            return Err(MatrixError::VectorLengthMismatch { expected: self.dim(), got: other.dim() });
        }
        Ok(self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(&a, &b)| a * b)
            .sum())
    }
}

impl Index<usize> for ComplexVector {
    type Output = Complex64;
    fn index(&self, i: usize) -> &Complex64 {
        &self.entries[i]
    }
}

impl IndexMut<usize> for ComplexVector {
    fn index_mut(&mut self, i: usize) -> &mut Complex64 {
        &mut self.entries[i]
    }
}

/// Dense row-major complex matrix. The universal carrier for every operation
/// in this crate.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Complex64>,
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                let z = self[(i, j)];
                write!(f, "{:+.4}{:+.4}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl ComplexMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<Complex64>) -> Result<Self, MatrixError> {
        if rows == 0 || cols == 0 {
            return Err(MatrixError::EmptyDimensions { rows, cols });
        }
        if entries.len() != rows * cols {
            return Err(MatrixError::EntryCountMismatch { rows, cols, got: entries.len() });
        }
        Ok(Self { rows, cols, entries })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, entries: vec![Complex64::ZERO; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::ONE;
        }
        m
    }

    pub fn from_real(rows: usize, cols: usize, values: &[f64]) -> Result<Self, MatrixError> {
        Self::new(
            rows,
            cols,
            values.iter().map(|&v| Complex64::new(v, 0.0)).collect(),
        )
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                entries.push(f(i, j));
            }
        }
        Self { rows, cols, entries }
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

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn require_square(&self) -> Result<usize, MatrixError> {
        if !self.is_square() {
            return Err(MatrixError::NotSquare { rows: self.rows, cols: self.cols });
        }
        Ok(self.rows)
    }

    pub fn same_shape(&self, other: &Self) -> Result<(), MatrixError> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(MatrixError::DimensionMismatch {
                left_rows: self.rows,
                left_cols: self.cols,
                right_rows: other.rows,
                right_cols: other.cols,
            });
        }
        Ok(())
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Induced infinity norm (max absolute row sum).
    pub fn inf_norm(&self) -> f64 {
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self[(i, j)].norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|&z| factor * z).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self, MatrixError> {
        self.same_shape(other)?;
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(&a, &b)| a + b)
                .collect(),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self, MatrixError> {
        self.same_shape(other)?;
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(&a, &b)| a - b)
                .collect(),
        })
    }

    pub fn mul(&self, other: &Self) -> Result<Self, MatrixError> {
        if self.cols != other.rows {
            return Err(MatrixError::DimensionMismatch {
                left_rows: self.rows,
                left_cols: self.cols,
                right_rows: other.rows,
                right_cols: other.cols,
            });
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let aik = self[(i, k)];
                if aik == Complex64::ZERO {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += aik * other[(k, j)];
                }
            }
        }
        Ok(out)
    }

    /// Matrix-vector product A x.
    pub fn apply(&self, x: &ComplexVector) -> Result<ComplexVector, MatrixError> {
        if self.cols != x.dim() {
            return Err(MatrixError::VectorLengthMismatch { expected: self.cols, got: x.dim() });
        }
        let mut out = ComplexVector::zeros(self.rows);
        for i in 0..self.rows {
            let mut acc = Complex64::ZERO;
            for j in 0..self.cols {
                acc += self[(i, j)] * x[j];
            }
            out[i] = acc;
        }
        Ok(out)
    }

    /// Row-vector product y^T A, returned as a vector of length `cols`.
    pub fn apply_left(&self, y: &ComplexVector) -> Result<ComplexVector, MatrixError> {
        if self.rows != y.dim() {
            return Err(MatrixError::VectorLengthMismatch { expected: self.rows, got: y.dim() });
        }
        let mut out = ComplexVector::zeros(self.cols);
        for j in 0..self.cols {
            let mut acc = Complex64::ZERO;
            for i in 0..self.rows {
                acc += y[i] * self[(i, j)];
            }
            out[j] = acc;
        }
        Ok(out)
    }

    pub fn column(&self, j: usize) -> ComplexVector {
        ComplexVector::new((0..self.rows).map(|i| self[(i, j)]).collect())
    }

    pub fn row(&self, i: usize) -> ComplexVector {
        ComplexVector::new((0..self.cols).map(|j| self[(i, j)]).collect())
    }

    pub fn set_column(&mut self, j: usize, v: &ComplexVector) {
        assert_eq!(v.dim(), self.rows);
        for i in 0..self.rows {
            self[(i, j)] = v[i];
        }
    }

    /// Submatrix A[rows | cols] with the given (0-based) index selections.
    pub fn submatrix(&self, row_idx: &[usize], col_idx: &[usize]) -> Self {
        Self::from_fn(row_idx.len(), col_idx.len(), |i, j| self[(row_idx[i], col_idx[j])])
    }

    /// Symmetric permutation P^T A P described by `order`, where `order[p]`
    /// is the original index that lands at position `p`.
    pub fn permute_symmetric(&self, order: &[usize]) -> Result<Self, MatrixError> {
        let n = self.require_square()?;
        assert_eq!(order.len(), n, "permutation length must equal matrix dimension");
        Ok(Self::from_fn(n, n, |i, j| self[(order[i], order[j])]))
    }

    /// True iff all entries are within `tol` of the other matrix's entries.
    pub fn entrywise_close(&self, other: &Self, tol: f64) -> bool {
        self.rows == other.rows && self.cols == other.cols && self.max_entry_diff(other) <= tol
    }

    /// Largest modulus of the entrywise difference; panics on shape mismatch.
    pub fn max_entry_diff(&self, other: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(&a, &b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Max imaginary-part modulus, useful for real-input checks.
    pub fn max_imag(&self) -> f64 {
        self.entries.iter().map(|z| z.im.abs()).fold(0.0, f64::max)
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.entries[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.entries[i * self.cols + j]
    }
}

/// The h-th roots of unity: omega = exp(2*pi*i/h) and its powers.
///
/// Powers are evaluated on the exact unit-circle grid, so `omega_pow`
/// stays accurate for any integer exponent.
#[derive(Debug, Clone)]
pub struct RootsOfUnity {
    h: usize,
    powers: Vec<Complex64>,
}

impl RootsOfUnity {
    pub fn new(h: usize) -> Result<Self, MatrixError> {
        if h < 2 {
            return Err(MatrixError::OrderTooSmall { h });
        }
        let powers = (0..h)
            .map(|k| {
                let theta = 2.0 * PI * (k as f64) / (h as f64);
                Complex64::new(theta.cos(), theta.sin())
            })
            .collect();
        Ok(Self { h, powers })
    }

    pub fn order(&self) -> usize {
        self.h
    }

    pub fn omega(&self) -> Complex64 {
        self.powers[1]
    }

    /// omega^e for any integer exponent, reduced mod h. omega^0 is exactly 1.
    pub fn omega_pow(&self, e: i64) -> Complex64 {
        self.powers[e.rem_euclid(self.h as i64) as usize]
    }

    pub fn powers(&self) -> &[Complex64] {
        &self.powers
    }
}

/// Entrywise (Hadamard) product.
pub fn hadamard(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix, MatrixError> {
    a.same_shape(b)?;
    Ok(ComplexMatrix {
        rows: a.rows,
        cols: a.cols,
        entries: a
            .entries
            .iter()
            .zip(&b.entries)
            .map(|(&x, &y)| x * y)
            .collect(),
    })
}

/// Circulant of c: first row is c, each later row is the previous row
/// cyclically shifted right by one, so row 2 begins with c_n.
pub fn circulant(c: &ComplexVector) -> ComplexMatrix {
    let n = c.dim();
    // entry (i, j) = c_{(j - i) mod n}, 0-based
    ComplexMatrix::from_fn(n, n, |i, j| c[(j + n - i) % n])
}

/// The basic cycle matrix K_n = circ(0, 1, 0, ..., 0): ones on the
/// superdiagonal and in the bottom-left corner. Defined for n >= 2.
pub fn cycle_matrix(n: usize) -> Result<ComplexMatrix, MatrixError> {
    if n < 2 {
        return Err(MatrixError::CycleTooSmall { n });
    }
    let mut c = ComplexVector::zeros(n);
    c[1] = Complex64::ONE;
    Ok(circulant(&c))
}

/// Block-diagonal assembly of square blocks.
pub fn direct_sum(blocks: &[ComplexMatrix]) -> Result<ComplexMatrix, MatrixError> {
    if blocks.is_empty() {
        return Err(MatrixError::NoBlocks);
    }
    for (index, b) in blocks.iter().enumerate() {
        if !b.is_square() {
            return Err(MatrixError::NonSquareBlock { index, rows: b.rows, cols: b.cols });
        }
    }
    let n: usize = blocks.iter().map(|b| b.rows).sum();
    let mut out = ComplexMatrix::zeros(n, n);
    let mut offset = 0;
    for b in blocks {
        for i in 0..b.rows {
            for j in 0..b.cols {
                out[(offset + i, offset + j)] = b[(i, j)];
            }
        }
        offset += b.rows;
    }
    Ok(out)
}

/// The r x r Jordan block J_r(lambda).
pub fn jordan_block(lambda: Complex64, r: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(r, r, |i, j| {
        if i == j {
            lambda
        } else if j == i + 1 {
            Complex64::ONE
        } else {
            Complex64::ZERO
        }
    })
}

/// J(lambda*nu_h, r): the rh x rh direct sum of J_r(lambda*omega^k) for
/// k = 0..h-1.
pub fn orbit_jordan_form(lambda: Complex64, r: usize, h: usize) -> Result<ComplexMatrix, MatrixError> {
    let roots = RootsOfUnity::new(h)?;
    let blocks: Vec<ComplexMatrix> = (0..h)
        .map(|k| jordan_block(lambda * roots.omega_pow(k as i64), r))
        .collect();
    direct_sum(&blocks)
}

/// C_k = circ(omega^k, 1, (omega^k)^{h-1}, ..., (omega^k)^2); entry (i, j)
/// is (omega^k)^{(i - j + 1) mod h}. C_0 is the all-ones matrix and the C_k
/// sum to h * K_h.
pub fn circulant_rotation_matrix(k: usize, h: usize) -> Result<ComplexMatrix, MatrixError> {
    let roots = RootsOfUnity::new(h)?;
    if k >= h {
        return Err(MatrixError::RotationIndexOutOfRange { k, h });
    }
    Ok(ComplexMatrix::from_fn(h, h, |i, j| {
        roots.omega_pow((k as i64) * (i as i64 - j as i64 + 1))
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn entry_count_is_validated() {
        let err = ComplexMatrix::new(2, 2, vec![Complex64::ZERO; 3]).unwrap_err();
        assert!(matches!(err, MatrixError::EntryCountMismatch { .. }));
    }

    #[test]
    fn hadamard_identity_and_zero() {
        let a = ComplexMatrix::from_real(2, 2, &[1.0, 2.0, 3.0, 4.0]).unwrap();
        let ones = ComplexMatrix::from_fn(2, 2, |_, _| Complex64::ONE);
        assert_eq!(hadamard(&a, &ones).unwrap(), a);
        let zero = ComplexMatrix::zeros(2, 2);
        assert_eq!(hadamard(&a, &zero).unwrap(), zero);
    }

    #[test]
    fn hadamard_rejects_shape_mismatch() {
        let a = ComplexMatrix::zeros(2, 2);
        let b = ComplexMatrix::zeros(2, 3);
        assert!(matches!(hadamard(&a, &b), Err(MatrixError::DimensionMismatch { .. })));
    }

    #[test]
    fn circulant_matches_row_shift_convention() {
        // circ(0,1,0) = K_3
        let k3 = circulant(&ComplexVector::from_real(&[0.0, 1.0, 0.0]));
        let expected = ComplexMatrix::from_real(3, 3, &[0., 1., 0., 0., 0., 1., 1., 0., 0.]).unwrap();
        assert_eq!(k3, expected);
        assert_eq!(cycle_matrix(3).unwrap(), expected);

        // Row 2 of circ(c) begins with c_n.
        let m = circulant(&ComplexVector::from_real(&[1.0, 2.0, 3.0]));
        assert_eq!(m[(1, 0)], c(3.0, 0.0));
        assert_eq!(m[(1, 1)], c(1.0, 0.0));
    }

    #[test]
    fn circulant_of_scalar() {
        let m = circulant(&ComplexVector::from_real(&[5.0]));
        assert_eq!(m[(0, 0)], c(5.0, 0.0));
        assert_eq!(m.rows(), 1);
    }

    #[test]
    fn cycle_matrix_requires_n_at_least_two() {
        assert!(matches!(cycle_matrix(1), Err(MatrixError::CycleTooSmall { n: 1 })));
        assert!(matches!(cycle_matrix(0), Err(MatrixError::CycleTooSmall { n: 0 })));
    }

    #[test]
    fn cycle_matrix_cubed_is_identity() {
        let k3 = cycle_matrix(3).unwrap();
        let k3_cubed = k3.mul(&k3).unwrap().mul(&k3).unwrap();
        assert!(k3_cubed.entrywise_close(&ComplexMatrix::identity(3), 0.0));
    }

    #[test]
    fn hadamard_k3_idempotent() {
        let k3 = cycle_matrix(3).unwrap();
        assert_eq!(hadamard(&k3, &k3).unwrap(), k3);
    }

    #[test]
    fn direct_sum_of_identities() {
        let sum = direct_sum(&[ComplexMatrix::identity(2), ComplexMatrix::identity(3)]).unwrap();
        assert_eq!(sum, ComplexMatrix::identity(5));
        let single = direct_sum(&[ComplexMatrix::from_real(1, 1, &[7.0]).unwrap()]).unwrap();
        assert_eq!(single[(0, 0)], c(7.0, 0.0));
    }

    #[test]
    fn direct_sum_rejects_non_square_blocks() {
        let err = direct_sum(&[ComplexMatrix::zeros(2, 3)]).unwrap_err();
        assert!(matches!(err, MatrixError::NonSquareBlock { index: 0, .. }));
    }

    #[test]
    fn jordan_block_shape() {
        let j1 = jordan_block(c(2.0, -1.0), 1);
        assert_eq!(j1[(0, 0)], c(2.0, -1.0));

        let j2 = jordan_block(Complex64::ZERO, 2);
        assert_eq!(j2[(0, 1)], Complex64::ONE);
        assert_eq!(j2[(1, 0)], Complex64::ZERO);

        // J_3(2) has rank(J - 2I) = 2: geometric multiplicity 1.
        let j3 = jordan_block(c(2.0, 0.0), 3);
        for i in 0..3 {
            assert_eq!(j3[(i, i)], c(2.0, 0.0));
        }
    }

    #[test]
    fn roots_of_unity_invariants() {
        for h in 2..=8 {
            let roots = RootsOfUnity::new(h).unwrap();
            assert_eq!(roots.omega_pow(0), Complex64::ONE);
            for k in 0..h {
                assert!((roots.omega_pow(k as i64).norm() - 1.0).abs() <= 1e-14);
            }
            let wh = roots.omega().powu(h as u32);
            assert!((wh - Complex64::ONE).norm() <= 1e-14 * h as f64);
            // vanishing power sums for ell = 1..h-1
            for ell in 1..h {
                let s: Complex64 = (0..h).map(|k| roots.omega_pow((k * ell) as i64)).sum();
                assert!(s.norm() <= 1e-12, "h={h} ell={ell} sum={s}");
            }
        }
        assert!(matches!(RootsOfUnity::new(1), Err(MatrixError::OrderTooSmall { h: 1 })));
    }

    #[test]
    fn orbit_jordan_form_diagonal_case() {
        // lambda=1, r=1, h=3 -> diag(1, w, w^2)
        let roots = RootsOfUnity::new(3).unwrap();
        let j = orbit_jordan_form(Complex64::ONE, 1, 3).unwrap();
        assert_eq!(j.rows(), 3);
        for k in 0..3 {
            assert!((j[(k, k)] - roots.omega_pow(k as i64)).norm() <= 1e-15);
        }

        // lambda=0, r=1, h=2 -> zero matrix
        let z = orbit_jordan_form(Complex64::ZERO, 1, 2).unwrap();
        assert!(z.entrywise_close(&ComplexMatrix::zeros(2, 2), 0.0));

        // lambda=2, r=2, h=2 -> J_2(2) (+) J_2(-2)
        let j = orbit_jordan_form(c(2.0, 0.0), 2, 2).unwrap();
        assert_eq!(j.rows(), 4);
        assert!((j[(0, 0)] - c(2.0, 0.0)).norm() <= 1e-15);
        assert!((j[(2, 2)] - c(-2.0, 0.0)).norm() <= 1e-14);
        assert_eq!(j[(0, 1)], Complex64::ONE);
        assert_eq!(j[(2, 3)], Complex64::ONE);
        assert_eq!(j[(1, 2)], Complex64::ZERO);
    }

    #[test]
    fn rotation_circulant_c0_is_all_ones() {
        let c0 = circulant_rotation_matrix(0, 3).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(c0[(i, j)], Complex64::ONE);
            }
        }
    }

    #[test]
    fn rotation_circulant_matches_display() {
        // C_1 for h=3 is circ(w, 1, w^2)
        let roots = RootsOfUnity::new(3).unwrap();
        let c1 = circulant_rotation_matrix(1, 3).unwrap();
        let first_row = ComplexVector::new(vec![roots.omega_pow(1), Complex64::ONE, roots.omega_pow(2)]);
        let expected = circulant(&first_row);
        assert!(c1.entrywise_close(&expected, 1e-15));
    }

    #[test]
    fn rotation_circulants_sum_to_h_times_cycle() {
        for h in 2..=8 {
            let mut sum = ComplexMatrix::zeros(h, h);
            for k in 0..h {
                sum = sum.add(&circulant_rotation_matrix(k, h).unwrap()).unwrap();
            }
            let target = cycle_matrix(h).unwrap().scale(Complex64::new(h as f64, 0.0));
            assert!(sum.entrywise_close(&target, 1e-12), "h={h}");
        }
    }

    #[test]
    fn rotation_circulant_range_check() {
        assert!(matches!(
            circulant_rotation_matrix(3, 3),
            Err(MatrixError::RotationIndexOutOfRange { k: 3, h: 3 })
        ));
    }

    #[test]
    fn permute_symmetric_reorders() {
        let a = ComplexMatrix::from_real(3, 3, &[1., 2., 3., 4., 5., 6., 7., 8., 9.]).unwrap();
        let p = a.permute_symmetric(&[2, 0, 1]).unwrap();
        assert_eq!(p[(0, 0)], c(9.0, 0.0));
        assert_eq!(p[(0, 1)], c(7.0, 0.0));
        assert_eq!(p[(1, 2)], c(2.0, 0.0));
    }
}

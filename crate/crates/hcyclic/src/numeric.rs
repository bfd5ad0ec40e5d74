//! Dense numerical kernels: eigenvalues, singular value decompositions,
//! nullspaces, and linear solves. These back the spectral routines and are
//! kept behind the crate's own matrix types.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::matrix::{ComplexMatrix, ComplexVector};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum NumericError {
    #[error("operation requires a square matrix, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("eigenvalue iteration failed to converge")]
    EigenNonConvergence,
    #[error("singular value decomposition failed to converge")]
    SvdNonConvergence,
    #[error("matrix is numerically singular")]
    Singular,
    #[error(
        "rank decision ambiguous: singular value {value:.3e} lies inside the \
         threshold band ({lower:.3e}, {upper:.3e})"
    )]
    RankDecisionAmbiguous { value: f64, lower: f64, upper: f64 },
}

pub(crate) fn to_na(m: &ComplexMatrix) -> DMatrix<Complex64> {
    DMatrix::from_fn(m.rows(), m.cols(), |i, j| m[(i, j)])
}

pub(crate) fn from_na(m: &DMatrix<Complex64>) -> ComplexMatrix {
    ComplexMatrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

/// Raw (unclustered) eigenvalues from the complex Schur form.
pub fn eigenvalues(a: &ComplexMatrix) -> Result<Vec<Complex64>, NumericError> {
    let n = a
        .require_square()
        .map_err(|_| NumericError::NotSquare { rows: a.rows(), cols: a.cols() })?;
    if n == 1 {
        return Ok(vec![a[(0, 0)]]);
    }
    let schur = nalgebra::linalg::Schur::try_new(to_na(a), f64::EPSILON, 0)
        .ok_or(NumericError::EigenNonConvergence)?;
    let t = schur.unpack().1;
    Ok((0..n).map(|i| t[(i, i)]).collect())
}

/// Matrix inverse via LU with partial pivoting.
pub fn inverse(a: &ComplexMatrix) -> Result<ComplexMatrix, NumericError> {
    a.require_square()
        .map_err(|_| NumericError::NotSquare { rows: a.rows(), cols: a.cols() })?;
    to_na(a)
        .try_inverse()
        .map(|inv| from_na(&inv))
        .ok_or(NumericError::Singular)
}

/// Singular value decomposition A = U diag(s) V^H.
pub struct Svd {
    pub singular_values: Vec<f64>,
    /// Columns are right singular vectors (this is V, not V^H).
    pub right_vectors: ComplexMatrix,
}

pub fn svd(a: &ComplexMatrix) -> Result<Svd, NumericError> {
    let na = to_na(a);
    let svd = nalgebra::linalg::SVD::try_new(na, false, true, f64::EPSILON, 0)
        .ok_or(NumericError::SvdNonConvergence)?;
    let v_t = svd.v_t.as_ref().expect("requested right singular vectors");
    let singular_values: Vec<f64> = svd.singular_values.iter().copied().collect();
    let v = ComplexMatrix::from_fn(v_t.ncols(), v_t.nrows(), |i, j| v_t[(j, i)].conj());
    Ok(Svd { singular_values, right_vectors: v })
}

/// Orthonormal basis of the numerical nullspace of `a`, with singular values
/// classified against `threshold`. A singular value falling inside the
/// ambiguity band `(threshold / band, threshold * band)` is reported as an
/// error instead of silently deciding the rank.
pub fn nullspace(
    a: &ComplexMatrix,
    threshold: f64,
    band: f64,
) -> Result<Vec<ComplexVector>, NumericError> {
    let decomposition = svd(a)?;
    let mut basis = Vec::new();
    for (idx, &sigma) in decomposition.singular_values.iter().enumerate() {
        if sigma > threshold / band && sigma < threshold * band {
            return Err(NumericError::RankDecisionAmbiguous {
                value: sigma,
                lower: threshold / band,
                upper: threshold * band,
            });
        }
        if sigma <= threshold {
            basis.push(decomposition.right_vectors.column(idx));
        }
    }
    Ok(basis)
}

/// Solves A x = b via LU.
pub fn solve(a: &ComplexMatrix, b: &ComplexVector) -> Result<ComplexVector, NumericError> {
    let n = a
        .require_square()
        .map_err(|_| NumericError::NotSquare { rows: a.rows(), cols: a.cols() })?;
    assert_eq!(b.dim(), n, "right-hand side length must match");
    let lu = to_na(a).lu();
    let rhs = nalgebra::DVector::from_fn(n, |i, _| b[i]);
    lu.solve(&rhs)
        .map(|x| ComplexVector::new(x.iter().copied().collect()))
        .ok_or(NumericError::Singular)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::cycle_matrix;

    #[test]
    fn eigenvalues_of_cycle_matrix_are_roots_of_unity() {
        let k4 = cycle_matrix(4).unwrap();
        let mut eigs = eigenvalues(&k4).unwrap();
        eigs.sort_by(|a, b| a.arg().partial_cmp(&b.arg()).unwrap());
        let expected = [
            Complex64::new(-1.0, 0.0),
            Complex64::new(0.0, -1.0),
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 1.0),
        ];
        for e in expected {
            assert!(
                eigs.iter().any(|&g| (g - e).norm() < 1e-10),
                "missing eigenvalue {e}"
            );
        }
    }

    #[test]
    fn inverse_round_trip() {
        let a = ComplexMatrix::from_real(2, 2, &[2.0, 1.0, 1.0, 1.0]).unwrap();
        let inv = inverse(&a).unwrap();
        let prod = a.mul(&inv).unwrap();
        assert!(prod.entrywise_close(&ComplexMatrix::identity(2), 1e-14));
    }

    #[test]
    fn singular_matrix_rejected() {
        let a = ComplexMatrix::from_real(2, 2, &[1.0, 2.0, 2.0, 4.0]).unwrap();
        assert!(matches!(inverse(&a), Err(NumericError::Singular)));
    }

    #[test]
    fn nullspace_of_rank_one() {
        let a = ComplexMatrix::from_real(2, 2, &[1.0, 1.0, 1.0, 1.0]).unwrap();
        let ns = nullspace(&a, 1e-10 * 2.0, 1e3).unwrap();
        assert_eq!(ns.len(), 1);
        // A v = 0
        let av = a.apply(&ns[0]).unwrap();
        assert!(av.inf_norm() < 1e-12);
    }

    #[test]
    fn ambiguous_rank_detected() {
        // singular values 1 and 1e-9 with threshold 1e-10: 1e-9 falls inside
        // the band (1e-13, 1e-7)
        let a = ComplexMatrix::from_real(2, 2, &[1.0, 0.0, 0.0, 1e-9]).unwrap();
        assert!(matches!(
            nullspace(&a, 1e-10, 1e3),
            Err(NumericError::RankDecisionAmbiguous { .. })
        ));
    }

    #[test]
    fn solve_matches_inverse() {
        let a = ComplexMatrix::from_real(3, 3, &[4., 1., 0., 1., 3., 1., 0., 1., 2.]).unwrap();
        let b = ComplexVector::from_real(&[1.0, 2.0, 3.0]);
        let x = solve(&a, &b).unwrap();
        let ax = a.apply(&x).unwrap();
        assert!(ax.sub(&b).unwrap().inf_norm() < 1e-12);
    }
}

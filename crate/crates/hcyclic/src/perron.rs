//! Checks and constructions specific to nonnegative irreducible matrices:
//! Perron data by shifted power iteration, peripheral spectrum rotation
//! checks, and the nonnegative Perron component.

use num_complex::Complex64;

use crate::graph::{build_digraph, index_of_imprimitivity, is_strongly_connected, CyclicStructure, GraphError};
use crate::matrix::{ComplexMatrix, ComplexVector, MatrixError, RootsOfUnity};
use crate::numeric::{self, NumericError};
use crate::spectral::{ComponentMatrix, SpectralError};

/// Relative tolerance for the rho = 1 precondition of `perron_component`.
const RHO_UNIT_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PerronError {
    #[error("matrix has complex entries beyond tolerance (max imaginary part {max_imag:.3e})")]
    ComplexEntries { max_imag: f64 },
    #[error("matrix is not nonnegative irreducible")]
    NotNonnegativeIrreducible,
    #[error("power iteration failed to converge within {iterations} iterations (residual {residual:.3e})")]
    ConvergenceFailure { iterations: usize, residual: f64 },
    #[error("spectral radius is numerically zero")]
    ZeroSpectralRadius,
    #[error("Perron vector has a nonpositive entry after normalization")]
    NonPositiveVector,
    #[error("perron_component requires rho = 1: got rho = {rho}; scale the matrix by 1/rho first")]
    SpectralRadiusNotOne { rho: f64 },
    #[error("cyclic structure has h = {h}, need h >= 2")]
    NotImprimitive { h: usize },
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Numeric(#[from] NumericError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
}

/// Perron data of a nonnegative irreducible matrix: spectral radius, the
/// positive right and left Perron vectors (normalized to ||x||_1 = 1 and
/// y^T x = 1), and the cyclic index.
#[derive(Debug, Clone)]
pub struct PerronData {
    pub spectral_radius: f64,
    pub right: ComplexVector,
    pub left: ComplexVector,
    pub cyclic_index: usize,
}

/// True iff the matrix is (entrywise) nonnegative within `zero_tol` and its
/// digraph is strongly connected. Entries with imaginary parts beyond
/// `zero_tol` are an error, not a false.
pub fn is_nonnegative_irreducible(
    a: &ComplexMatrix,
    zero_tol: f64,
) -> Result<bool, PerronError> {
    a.require_square()?;
    let max_imag = a.max_imag();
    if max_imag > zero_tol {
        return Err(PerronError::ComplexEntries { max_imag });
    }
    for i in 0..a.rows() {
        for j in 0..a.cols() {
            if a[(i, j)].re < -zero_tol {
                return Ok(false);
            }
        }
    }
    let g = build_digraph(a, zero_tol)?;
    Ok(is_strongly_connected(&g))
}

fn real_entries(a: &ComplexMatrix) -> Vec<f64> {
    a.entries().iter().map(|z| z.re).collect()
}

fn mat_vec(entries: &[f64], n: usize, x: &[f64], out: &mut [f64]) {
    for i in 0..n {
        let row = &entries[i * n..(i + 1) * n];
        out[i] = row.iter().zip(x).map(|(&a, &b)| a * b).sum();
    }
}

/// Collatz-Wielandt bounds of a positive iterate: (min, max) of (Ax)_i/x_i.
fn collatz_wielandt(ax: &[f64], x: &[f64]) -> (f64, f64) {
    let mut low = f64::INFINITY;
    let mut high = f64::NEG_INFINITY;
    for (&num, &den) in ax.iter().zip(x) {
        if den > 0.0 {
            let q = num / den;
            low = low.min(q);
            high = high.max(q);
        }
    }
    (low, high)
}

/// Power iteration on A + s I with s = ||A||_inf, whose unique dominant
/// eigenvalue is rho + s even when A is imprimitive. Returns the iterate
/// and the Collatz-Wielandt estimate of rho.
fn shifted_power_iteration(
    entries: &[f64],
    n: usize,
    shift: f64,
    transpose: bool,
) -> Result<(Vec<f64>, f64), PerronError> {
    let a: Vec<f64> = if transpose {
        let mut t = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                t[j * n + i] = entries[i * n + j];
            }
        }
        t
    } else {
        entries.to_vec()
    };
    let mut x = vec![1.0 / n as f64; n];
    let mut bx = vec![0.0; n];
    let max_iterations = 200 * n + 5_000;
    let mut rho_estimate = 0.0;
    let mut converged = false;
    for iteration in 0..max_iterations {
        mat_vec(&a, n, &x, &mut bx);
        for (bi, &xi) in bx.iter_mut().zip(&x) {
            *bi += shift * xi;
        }
        let (low, high) = collatz_wielandt(&bx, &x);
        rho_estimate = 0.5 * (low + high) - shift;
        let scale = bx.iter().map(|v| v.abs()).sum::<f64>();
        if scale == 0.0 {
            return Err(PerronError::ZeroSpectralRadius);
        }
        for (xi, &bi) in x.iter_mut().zip(&bx) {
            *xi = bi / scale;
        }
        if high - low <= 1e-13 * high.abs().max(1.0) && iteration > 2 {
            converged = true;
            break;
        }
    }
    if !converged {
        // close enough for the inverse-iteration polish below as long as the
        // bounds bracket something sensible
        mat_vec(&a, n, &x, &mut bx);
        for (bi, &xi) in bx.iter_mut().zip(&x) {
            *bi += shift * xi;
        }
        let (low, high) = collatz_wielandt(&bx, &x);
        rho_estimate = 0.5 * (low + high) - shift;
        if !(high - low <= 1e-3 * high.abs().max(1.0)) {
            return Err(PerronError::ConvergenceFailure {
                iterations: max_iterations,
                residual: high - low,
            });
        }
    }
    Ok((x, rho_estimate))
}

/// A few steps of inverse iteration with a shift just outside rho, which
/// sharpens the power-iteration direction to machine precision.
fn inverse_iteration_polish(
    a: &ComplexMatrix,
    seed: &[f64],
    rho: f64,
    transpose: bool,
) -> Result<Vec<f64>, PerronError> {
    let n = a.rows();
    let offset = 1e-6 * a.inf_norm().max(1.0) + 1e-12;
    let shift = Complex64::new(rho + offset, 0.0);
    let work = if transpose { a.transpose() } else { a.clone() };
    let shifted = work.sub(&ComplexMatrix::identity(n).scale(shift))?;
    let mut x = ComplexVector::from_real(seed);
    for _ in 0..3 {
        let solved = match numeric::solve(&shifted, &x) {
            Ok(v) => v,
            // exactly singular shift: nudge and retry once
            Err(_) => {
                let shifted2 = work.sub(
                    &ComplexMatrix::identity(n).scale(shift + Complex64::new(offset, 0.0)),
                )?;
                numeric::solve(&shifted2, &x)?
            }
        };
        let norm = solved.one_norm();
        if norm == 0.0 {
            return Err(PerronError::ZeroSpectralRadius);
        }
        x = solved.scale(Complex64::new(1.0 / norm, 0.0));
    }
    // orient positively
    let sum: f64 = x.entries().iter().map(|z| z.re).sum();
    let sign = if sum < 0.0 { -1.0 } else { 1.0 };
    Ok(x.entries().iter().map(|z| sign * z.re).collect())
}

/// Computes the Perron data of a nonnegative irreducible matrix by power
/// iteration on A + ||A||_inf I with a Rayleigh-quotient refinement.
/// `tol` is the relative residual tolerance for ||Ax - rho x||_inf.
pub fn perron_data(a: &ComplexMatrix, tol: f64) -> Result<PerronData, PerronError> {
    let n = a.require_square()?;
    let zero_tol = crate::graph::default_zero_tol(a);
    if !is_nonnegative_irreducible(a, zero_tol)? {
        return Err(PerronError::NotNonnegativeIrreducible);
    }
    let g = build_digraph(a, zero_tol)?;
    let cyclic_index = match index_of_imprimitivity(&g) {
        Ok(h) => h,
        // a single vertex without a loop is the zero matrix: rho = 0
        Err(GraphError::AperiodicUndefined) => return Err(PerronError::ZeroSpectralRadius),
        Err(e) => return Err(e.into()),
    };

    let entries = real_entries(a);
    let shift = a.inf_norm();
    let (x_raw, rho_raw) = shifted_power_iteration(&entries, n, shift, false)?;
    if rho_raw <= 1e-14 * shift.max(1.0) {
        return Err(PerronError::ZeroSpectralRadius);
    }
    let (y_raw, _) = shifted_power_iteration(&entries, n, shift, true)?;

    let x_polished = inverse_iteration_polish(a, &x_raw, rho_raw, false)?;
    let y_polished = inverse_iteration_polish(a, &y_raw, rho_raw, true)?;

    // Rayleigh refinement: rho = y^T A x / y^T x
    let x_vec = ComplexVector::from_real(&x_polished);
    let y_vec = ComplexVector::from_real(&y_polished);
    let ax = a.apply(&x_vec)?;
    let ytx = y_vec.dot(&x_vec)?;
    let ytax = y_vec.dot(&ax)?;
    let rho = (ytax / ytx).re;
    if rho <= 0.0 {
        return Err(PerronError::ZeroSpectralRadius);
    }

    // normalize ||x||_1 = 1 and y^T x = 1
    let x_sum: f64 = x_polished.iter().sum();
    if x_sum == 0.0 {
        return Err(PerronError::NonPositiveVector);
    }
    let x: Vec<f64> = x_polished.iter().map(|v| v / x_sum).collect();
    let yx: f64 = y_polished.iter().zip(&x).map(|(&a, &b)| a * b).sum();
    if yx == 0.0 {
        return Err(PerronError::NonPositiveVector);
    }
    let y: Vec<f64> = y_polished.iter().map(|v| v / yx).collect();

    if x.iter().any(|&v| v <= 0.0) || y.iter().any(|&v| v <= 0.0) {
        return Err(PerronError::NonPositiveVector);
    }

    let right = ComplexVector::from_real(&x);
    let left = ComplexVector::from_real(&y);

    // enforce the residual contract
    let tol_abs = tol * a.inf_norm().max(1e-300);
    let right_residual = a
        .apply(&right)?
        .sub(&right.scale(Complex64::new(rho, 0.0)))?
        .inf_norm();
    let left_residual = a
        .apply_left(&left)?
        .sub(&left.scale(Complex64::new(rho, 0.0)))?
        .inf_norm();
    let residual = right_residual.max(left_residual);
    if residual > tol_abs {
        return Err(PerronError::ConvergenceFailure { iterations: 0, residual });
    }

    Ok(PerronData { spectral_radius: rho, right, left, cyclic_index })
}

/// Multiset match between two complex collections: greedy nearest pairing,
/// reporting the largest matched distance (infinite on count mismatch).
fn multiset_match_residual(from: &[Complex64], to: &[Complex64]) -> f64 {
    if from.len() != to.len() {
        return f64::INFINITY;
    }
    let mut used = vec![false; to.len()];
    let mut worst: f64 = 0.0;
    for &f in from {
        let mut best: Option<(usize, f64)> = None;
        for (idx, &t) in to.iter().enumerate() {
            if used[idx] {
                continue;
            }
            let d = (f - t).norm();
            if best.is_none() || d < best.expect("set").1 {
                best = Some((idx, d));
            }
        }
        match best {
            Some((idx, d)) => {
                used[idx] = true;
                worst = worst.max(d);
            }
            None => return f64::INFINITY,
        }
    }
    worst
}

/// Report for the peripheral-spectrum and rotation-invariance checks.
#[derive(Debug, Clone, serde::Serialize)]
pub struct PeripheralReport {
    pub spectral_radius: f64,
    pub h: usize,
    /// Eigenvalues of maximal modulus (within tolerance).
    pub peripheral_count: usize,
    /// Largest distance when matching the peripheral multiset to
    /// {rho omega^k : k in 0..h}.
    pub peripheral_residual: f64,
    /// Largest distance when matching omega * spectrum to the spectrum.
    pub rotation_residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// Checks that the peripheral spectrum is exactly {rho omega^k} and that the
/// whole spectrum is invariant under multiplication by omega, both as
/// multisets within `tol * ||A||_inf`.
pub fn check_peripheral_rotation(
    a: &ComplexMatrix,
    h: usize,
    tol: f64,
) -> Result<PeripheralReport, PerronError> {
    a.require_square()?;
    let spectrum = numeric::eigenvalues(a)?;
    let rho = spectrum.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let tol_abs = tol * a.inf_norm().max(1e-300);

    let peripheral: Vec<Complex64> = spectrum
        .iter()
        .copied()
        .filter(|z| z.norm() >= rho - tol_abs)
        .collect();

    let (peripheral_residual, rotation_residual) = if h == 1 {
        // primitive case: peripheral spectrum is {rho}; rotation by omega is
        // the identity rotation
        let targets = vec![Complex64::new(rho, 0.0)];
        (multiset_match_residual(&peripheral, &targets), 0.0)
    } else {
        let roots = RootsOfUnity::new(h)?;
        let targets: Vec<Complex64> = (0..h)
            .map(|k| Complex64::new(rho, 0.0) * roots.omega_pow(k as i64))
            .collect();
        let rotated: Vec<Complex64> = spectrum.iter().map(|&z| z * roots.omega()).collect();
        (
            multiset_match_residual(&peripheral, &targets),
            multiset_match_residual(&rotated, &spectrum),
        )
    };

    let pass = peripheral_residual <= tol_abs && rotation_residual <= tol_abs;
    Ok(PeripheralReport {
        spectral_radius: rho,
        h,
        peripheral_count: peripheral.len(),
        peripheral_residual,
        rotation_residual,
        tolerance: tol_abs,
        pass,
    })
}

/// The nonnegative Perron component h * [cyclic blocks x_ell y_{ell+1}^T]
/// for a matrix scaled so rho = 1 (callers divide by rho first).
pub fn perron_component(
    a: &ComplexMatrix,
    pd: &PerronData,
    structure: &CyclicStructure,
) -> Result<ComponentMatrix, PerronError> {
    let n = a.require_square()?;
    if (pd.spectral_radius - 1.0).abs() > RHO_UNIT_TOL {
        return Err(PerronError::SpectralRadiusNotOne { rho: pd.spectral_radius });
    }
    let h = structure.h;
    if h < 2 {
        return Err(PerronError::NotImprimitive { h });
    }
    let partition = &structure.partition;
    if partition.total_len() != n {
        return Err(PerronError::Spectral(SpectralError::PartitionDimensionMismatch {
            partition: partition.total_len(),
            dim: n,
        }));
    }
    if !partition.is_consecutive() {
        return Err(PerronError::Spectral(SpectralError::PartitionNotConsecutive));
    }

    let h_scalar = h as f64;
    let mut blocks = Vec::with_capacity(h);
    for ell in 0..h {
        let rows = partition.class(ell);
        let cols = partition.class((ell + 1) % h);
        let mut block = ComplexMatrix::zeros(rows.len(), cols.len());
        for (bi, &i) in rows.iter().enumerate() {
            for (bj, &j) in cols.iter().enumerate() {
                block[(bi, bj)] = Complex64::new(h_scalar * pd.right[i].re * pd.left[j].re, 0.0);
            }
        }
        blocks.push(block);
    }
    let mut matrix = ComplexMatrix::zeros(n, n);
    for ell in 0..h {
        let rows = partition.class(ell);
        let cols = partition.class((ell + 1) % h);
        for (bi, &i) in rows.iter().enumerate() {
            for (bj, &j) in cols.iter().enumerate() {
                matrix[(i, j)] = blocks[ell][(bi, bj)];
            }
        }
    }
    Ok(ComponentMatrix {
        base_eigenvalue: Complex64::ONE,
        matrix,
        blocks,
        off_pattern_residual: 0.0,
        // Perron vectors are strictly positive
        eigenvectors_strictly_nonzero: Some(true),
        warnings: Vec::new(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::circulant;

    #[test]
    fn nonnegative_irreducible_checks() {
        let upper = ComplexMatrix::from_real(2, 2, &[1.0, 1.0, 0.0, 1.0]).unwrap();
        assert!(!is_nonnegative_irreducible(&upper, 0.0).unwrap());

        let negative = ComplexMatrix::from_real(2, 2, &[0.0, 1.0, -0.5, 0.0]).unwrap();
        assert!(!is_nonnegative_irreducible(&negative, 0.0).unwrap());

        let complex_entry =
            ComplexMatrix::new(1, 1, vec![Complex64::new(1.0, 0.5)]).unwrap();
        assert!(matches!(
            is_nonnegative_irreducible(&complex_entry, 1e-12),
            Err(PerronError::ComplexEntries { .. })
        ));
    }

    #[test]
    fn perron_of_scalar() {
        let a = ComplexMatrix::from_real(1, 1, &[3.5]).unwrap();
        let pd = perron_data(&a, 1e-10).unwrap();
        assert!((pd.spectral_radius - 3.5).abs() < 1e-12);
        assert!((pd.right[0].re - 1.0).abs() < 1e-12);
        assert_eq!(pd.cyclic_index, 1);
    }

    #[test]
    fn perron_of_scaled_cycle() {
        // circ(0, 2, 0): row sums 2, so rho = 2
        let a = circulant(&ComplexVector::from_real(&[0.0, 2.0, 0.0]));
        let pd = perron_data(&a, 1e-10).unwrap();
        assert!((pd.spectral_radius - 2.0).abs() < 1e-10);
        assert_eq!(pd.cyclic_index, 3);
        for i in 0..3 {
            assert!((pd.right[i].re - 1.0 / 3.0).abs() < 1e-10);
        }
    }

    #[test]
    fn peripheral_of_primitive_all_ones() {
        let ones = ComplexMatrix::from_fn(2, 2, |_, _| Complex64::ONE);
        let report = check_peripheral_rotation(&ones, 1, 1e-8).unwrap();
        assert!(report.pass);
        assert_eq!(report.peripheral_count, 1);
        assert!((report.spectral_radius - 2.0).abs() < 1e-10);
    }

    #[test]
    fn peripheral_of_k4() {
        let k4 = crate::matrix::cycle_matrix(4).unwrap();
        let report = check_peripheral_rotation(&k4, 4, 1e-8).unwrap();
        assert!(report.pass, "{report:?}");
        assert_eq!(report.peripheral_count, 4);
    }

    #[test]
    fn perron_component_requires_unit_rho() {
        let a = circulant(&ComplexVector::from_real(&[0.0, 2.0, 0.0]));
        let pd = perron_data(&a, 1e-10).unwrap();
        let structure = match crate::graph::detect_cyclic_structure(&a, 0.0).unwrap() {
            crate::graph::CyclicDetection::Cyclic(s) => s,
            _ => panic!("3-cyclic"),
        };
        assert!(matches!(
            perron_component(&a, &pd, &structure),
            Err(PerronError::SpectralRadiusNotOne { .. })
        ));
    }
}

//! Jordan chains of h-cyclic matrices and their rotation across the
//! eigenvalue orbit {lambda * omega^k}.
//!
//! Given a right (left) Jordan chain of a matrix in consecutive h-cyclic
//! block form, scaling block ell of chain vector j by (omega^k)^{alpha(ell, j)}
//! (respectively (omega^k)^{alpha(j, ell)}) yields a right (left) Jordan
//! chain for lambda * omega^k. `verify_chain` checks the defining relations
//! directly, so every rotation can be validated against the source matrix.

use num_complex::Complex64;

use crate::graph::OrderedPartition;
use crate::matrix::{ComplexMatrix, ComplexVector, MatrixError, RootsOfUnity};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ChainError {
    #[error("alpha index requires h >= 2, got {h}")]
    OrderTooSmall { h: usize },
    #[error("a Jordan chain needs at least one vector")]
    EmptyChain,
    #[error("chain vectors must share one dimension: found {first} and {other}")]
    MixedDimensions { first: usize, other: usize },
    #[error("rotation index k = {k} out of range 0..{h}")]
    RotationIndexOutOfRange { k: usize, h: usize },
    #[error("chain dimension {dim} does not match partition total {expected}")]
    DimensionMismatch { dim: usize, expected: usize },
    #[error("rotation requires a consecutive partition; apply consecutive_permutation first")]
    PartitionNotConsecutive,
    #[error("partition must have at least 2 classes, got {h}")]
    PartitionTooSmall { h: usize },
    #[error("chain dimension {dim} does not match matrix dimension {expected}")]
    MatrixDimensionMismatch { dim: usize, expected: usize },
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error("expected a {expected:?} chain, got a {got:?} chain")]
    WrongSide { expected: ChainSide, got: ChainSide },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChainSide {
    Right,
    Left,
}

/// A Jordan chain for `eigenvalue`.
///
/// Right chains x_1..x_r satisfy A x_1 = lambda x_1 and
/// A x_j = x_{j-1} + lambda x_j for j = 2..r. Left chains y_1..y_r satisfy
/// y_r^T A = lambda y_r^T and y_j^T A = lambda y_j^T + y_{j+1}^T for
/// j = 1..r-1, matching the rows of Z^{-1} read top to bottom.
#[derive(Debug, Clone, PartialEq)]
pub struct JordanChain {
    side: ChainSide,
    eigenvalue: Complex64,
    vectors: Vec<ComplexVector>,
}

impl JordanChain {
    pub fn new(
        side: ChainSide,
        eigenvalue: Complex64,
        vectors: Vec<ComplexVector>,
    ) -> Result<Self, ChainError> {
        let first = vectors.first().ok_or(ChainError::EmptyChain)?.dim();
        for v in &vectors {
            if v.dim() != first {
                return Err(ChainError::MixedDimensions { first, other: v.dim() });
            }
        }
        Ok(Self { side, eigenvalue, vectors })
    }

    pub fn side(&self) -> ChainSide {
        self.side
    }

    pub fn eigenvalue(&self) -> Complex64 {
        self.eigenvalue
    }

    pub fn vectors(&self) -> &[ComplexVector] {
        &self.vectors
    }

    /// Chain length r.
    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        false // a chain always has at least one vector
    }

    pub fn dim(&self) -> usize {
        self.vectors[0].dim()
    }

    pub fn max_vector_norm(&self) -> f64 {
        self.vectors.iter().map(ComplexVector::inf_norm).fold(0.0, f64::max)
    }
}

/// alpha(i, j) = (i - j) mod h with the nonnegative representative, defined
/// for all integers.
pub fn alpha(i: i64, j: i64, h: usize) -> Result<usize, ChainError> {
    if h < 2 {
        return Err(ChainError::OrderTooSmall { h });
    }
    Ok((i - j).rem_euclid(h as i64) as usize)
}

fn block_ranges(p: &OrderedPartition) -> Vec<std::ops::Range<usize>> {
    let mut ranges = Vec::with_capacity(p.class_count());
    let mut start = 0;
    for class in p.classes() {
        ranges.push(start..start + class.len());
        start += class.len();
    }
    ranges
}

fn check_rotation_args(
    chain: &JordanChain,
    k: usize,
    p: &OrderedPartition,
) -> Result<usize, ChainError> {
    let h = p.class_count();
    if h < 2 {
        return Err(ChainError::PartitionTooSmall { h });
    }
    if k >= h {
        return Err(ChainError::RotationIndexOutOfRange { k, h });
    }
    if chain.dim() != p.total_len() {
        return Err(ChainError::DimensionMismatch { dim: chain.dim(), expected: p.total_len() });
    }
    if !p.is_consecutive() {
        return Err(ChainError::PartitionNotConsecutive);
    }
    Ok(h)
}

/// Rotates a right Jordan chain to the chain for lambda * omega^k: block ell
/// of chain vector j is scaled by (omega^k)^{alpha(ell, j)}. Block and chain
/// indices are the paper's 1-based ones; k = 0 returns the chain unchanged.
pub fn rotate_right_chain(
    chain: &JordanChain,
    k: usize,
    p: &OrderedPartition,
) -> Result<JordanChain, ChainError> {
    if chain.side() != ChainSide::Right {
        return Err(ChainError::WrongSide { expected: ChainSide::Right, got: chain.side() });
    }
    rotate_chain_impl(chain, k, p, false)
}

/// Rotates a left Jordan chain to the chain for lambda * omega^k: block ell
/// of chain vector j is scaled by (omega^k)^{alpha(j, ell)} (the transposed
/// index order of the right case).
pub fn rotate_left_chain(
    chain: &JordanChain,
    k: usize,
    p: &OrderedPartition,
) -> Result<JordanChain, ChainError> {
    if chain.side() != ChainSide::Left {
        return Err(ChainError::WrongSide { expected: ChainSide::Left, got: chain.side() });
    }
    rotate_chain_impl(chain, k, p, true)
}

/// Side-dispatching rotation.
pub fn rotate_chain(
    chain: &JordanChain,
    k: usize,
    p: &OrderedPartition,
) -> Result<JordanChain, ChainError> {
    match chain.side() {
        ChainSide::Right => rotate_right_chain(chain, k, p),
        ChainSide::Left => rotate_left_chain(chain, k, p),
    }
}

fn rotate_chain_impl(
    chain: &JordanChain,
    k: usize,
    p: &OrderedPartition,
    transpose_alpha: bool,
) -> Result<JordanChain, ChainError> {
    let h = check_rotation_args(chain, k, p)?;
    if k == 0 {
        return Ok(chain.clone());
    }
    let roots = RootsOfUnity::new(h)?;
    let ranges = block_ranges(p);
    let mut vectors = Vec::with_capacity(chain.len());
    for (pos, v) in chain.vectors().iter().enumerate() {
        let j = (pos + 1) as i64; // 1-based chain position
        let mut out = v.clone();
        for (block, range) in ranges.iter().enumerate() {
            let ell = (block + 1) as i64; // 1-based block index
            let exponent = if transpose_alpha { j - ell } else { ell - j };
            // (omega^k)^alpha depends only on the exponent mod h
            let factor = roots.omega_pow(k as i64 * exponent);
            for idx in range.clone() {
                out.entries_mut()[idx] *= factor;
            }
        }
        vectors.push(out);
    }
    JordanChain::new(chain.side(), chain.eigenvalue() * roots.omega_pow(k as i64), vectors)
}

/// Residuals of the defining chain relations, one per link.
#[derive(Debug, Clone, serde::Serialize)]
pub struct ChainResidualReport {
    /// Max-norm residual per link; entry 0 is the eigenvector relation.
    pub residuals: Vec<f64>,
    /// Threshold the residuals were compared against.
    pub tolerance: f64,
    pub pass: bool,
}

impl ChainResidualReport {
    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().copied().fold(0.0, f64::max)
    }
}

/// Default chain tolerance: `rel_tol` scaled by the matrix norm and the
/// largest chain vector norm, with a floor for zero input.
pub fn chain_tolerance(a: &ComplexMatrix, chain: &JordanChain, rel_tol: f64) -> f64 {
    rel_tol * a.inf_norm().max(1e-300) * chain.max_vector_norm().max(1e-300)
}

/// Checks the chain relations against A and reports per-link residuals.
///
/// Right chains: ||A x_1 - lambda x_1||_inf, then
/// ||A x_j - x_{j-1} - lambda x_j||_inf. Left chains use the mirrored
/// relations with y_r as the eigenvector.
pub fn verify_chain(
    a: &ComplexMatrix,
    chain: &JordanChain,
    tol: f64,
) -> Result<ChainResidualReport, ChainError> {
    let n = a.require_square()?;
    if chain.dim() != n {
        return Err(ChainError::MatrixDimensionMismatch { dim: chain.dim(), expected: n });
    }
    let lambda = chain.eigenvalue();
    let r = chain.len();
    let mut residuals = vec![0.0; r];
    match chain.side() {
        ChainSide::Right => {
            for j in 0..r {
                let x_j = &chain.vectors()[j];
                let mut resid = a.apply(x_j)?.sub(&x_j.scale(lambda))?;
                if j > 0 {
                    resid = resid.sub(&chain.vectors()[j - 1])?;
                }
                residuals[j] = resid.inf_norm();
            }
        }
        ChainSide::Left => {
            for j in 0..r {
                let y_j = &chain.vectors()[j];
                let mut resid = a.apply_left(y_j)?.sub(&y_j.scale(lambda))?;
                if j + 1 < r {
                    resid = resid.sub(&chain.vectors()[j + 1])?;
                }
                residuals[j] = resid.inf_norm();
            }
        }
    }
    let pass = residuals.iter().all(|&x| x <= tol);
    Ok(ChainResidualReport { residuals, tolerance: tol, pass })
}

/// A base eigenvalue together with the h chains of its rotation orbit.
/// Depending on provenance only one side may be populated: `rotate_all`
/// fills the side of its input; orbit bases built from a full (Z, Z^{-1})
/// pair carry both.
#[derive(Debug, Clone)]
pub struct SpectralOrbit {
    pub base_eigenvalue: Complex64,
    pub chain_length: usize,
    pub h: usize,
    /// Right chains for k = 0..h-1 (empty if not populated).
    pub right_chains: Vec<JordanChain>,
    /// Left chains for k = 0..h-1 (empty if not populated).
    pub left_chains: Vec<JordanChain>,
}

impl SpectralOrbit {
    pub fn base_right(&self) -> Option<&JordanChain> {
        self.right_chains.first()
    }

    pub fn base_left(&self) -> Option<&JordanChain> {
        self.left_chains.first()
    }
}

/// Rotates a verified chain through every k = 0..h-1, producing the full
/// orbit for its side.
pub fn rotate_all(chain: &JordanChain, p: &OrderedPartition) -> Result<SpectralOrbit, ChainError> {
    let h = check_rotation_args(chain, 0, p)?;
    let mut rotated = Vec::with_capacity(h);
    for k in 0..h {
        rotated.push(rotate_chain(chain, k, p)?);
    }
    let (right_chains, left_chains) = match chain.side() {
        ChainSide::Right => (rotated, Vec::new()),
        ChainSide::Left => (Vec::new(), rotated),
    };
    Ok(SpectralOrbit {
        base_eigenvalue: chain.eigenvalue(),
        chain_length: chain.len(),
        h,
        right_chains,
        left_chains,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn alpha_basic_values() {
        assert_eq!(alpha(1, 1, 3).unwrap(), 0);
        assert_eq!(alpha(2, 1, 3).unwrap(), 1);
        // (-1) mod 3 = 2
        assert_eq!(alpha(1, 2, 3).unwrap(), 2);
        assert!(matches!(alpha(0, 0, 1), Err(ChainError::OrderTooSmall { h: 1 })));
    }

    #[test]
    fn alpha_identities_exhaustive() {
        for h in 2..=8usize {
            let hi = h as i64;
            for i in -2 * hi..=2 * hi {
                for j in -2 * hi..=2 * hi {
                    let a = alpha(i, j, h).unwrap();
                    // shift invariance
                    assert_eq!(a, alpha(i + 1, j + 1, h).unwrap());
                    // increment identities
                    let inc = (a + 1) % h;
                    assert_eq!(alpha(i + 1, j, h).unwrap(), inc);
                    assert_eq!(alpha(i, j - 1, h).unwrap(), inc);
                    // splitting through any intermediate index
                    for ell in -2 * hi..=2 * hi {
                        let split =
                            (alpha(i, ell, h).unwrap() + alpha(ell, j, h).unwrap()) % h;
                        assert_eq!(a, split, "i={i} j={j} ell={ell} h={h}");
                    }
                }
            }
        }
    }

    #[test]
    fn identity_chain_has_zero_residual() {
        let a = ComplexMatrix::identity(3);
        let e1 = ComplexVector::from_real(&[1.0, 0.0, 0.0]);
        let chain = JordanChain::new(ChainSide::Right, Complex64::ONE, vec![e1]).unwrap();
        let report = verify_chain(&a, &chain, 1e-12).unwrap();
        assert_eq!(report.residuals, vec![0.0]);
        assert!(report.pass);
    }

    #[test]
    fn corrupted_chain_fails_verification() {
        let a = ComplexMatrix::identity(3);
        let bad = ComplexVector::from_real(&[1.0, 0.5, 0.0]);
        let chain = JordanChain::new(ChainSide::Right, c(2.0, 0.0), vec![bad]).unwrap();
        let report = verify_chain(&a, &chain, 1e-9).unwrap();
        assert!(!report.pass);
        assert!(report.max_residual() > 1e-9);
    }

    #[test]
    fn rotation_k0_is_identity() {
        let p = OrderedPartition::new(vec![vec![0], vec![1]]).unwrap();
        let chain = JordanChain::new(
            ChainSide::Right,
            c(1.5, -0.5),
            vec![ComplexVector::new(vec![c(0.1, 0.2), c(-0.3, 0.4)])],
        )
        .unwrap();
        let rotated = rotate_right_chain(&chain, 0, &p).unwrap();
        assert_eq!(rotated, chain);
    }

    #[test]
    fn rotation_sign_flip_for_h2() {
        // h=2: omega = -1, so k=1 flips signs on alternating blocks.
        let p = OrderedPartition::new(vec![vec![0, 1], vec![2, 3]]).unwrap();
        let chain = JordanChain::new(
            ChainSide::Right,
            c(2.0, 0.0),
            vec![ComplexVector::from_real(&[1.0, 2.0, 3.0, 4.0])],
        )
        .unwrap();
        let rotated = rotate_right_chain(&chain, 1, &p).unwrap();
        // alpha(1,1)=0 -> block 1 unchanged; alpha(2,1)=1 -> block 2 negated
        let v = &rotated.vectors()[0];
        assert!((v[0] - c(1.0, 0.0)).norm() < 1e-14);
        assert!((v[1] - c(2.0, 0.0)).norm() < 1e-14);
        assert!((v[2] - c(-3.0, 0.0)).norm() < 1e-14);
        assert!((v[3] - c(-4.0, 0.0)).norm() < 1e-14);
        assert!((rotated.eigenvalue() - c(-2.0, 0.0)).norm() < 1e-14);

        // left rotation uses alpha(j, ell): block 1 gets alpha(1,1)=0,
        // block 2 gets alpha(1,2)=1 -> same sign pattern for r=1.
        let left = JordanChain::new(
            ChainSide::Left,
            c(2.0, 0.0),
            vec![ComplexVector::from_real(&[1.0, 1.0, 1.0, 1.0])],
        )
        .unwrap();
        let lrot = rotate_left_chain(&left, 1, &p).unwrap();
        let w = &lrot.vectors()[0];
        assert!((w[0] - c(1.0, 0.0)).norm() < 1e-14);
        assert!((w[2] - c(-1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn rotation_rejects_bad_arguments() {
        let p = OrderedPartition::new(vec![vec![0], vec![1]]).unwrap();
        let chain = JordanChain::new(
            ChainSide::Right,
            Complex64::ONE,
            vec![ComplexVector::from_real(&[1.0, 1.0])],
        )
        .unwrap();
        assert!(matches!(
            rotate_right_chain(&chain, 2, &p),
            Err(ChainError::RotationIndexOutOfRange { k: 2, h: 2 })
        ));

        let scattered = OrderedPartition::new(vec![vec![1], vec![0]]).unwrap();
        assert!(matches!(
            rotate_right_chain(&chain, 1, &scattered),
            Err(ChainError::PartitionNotConsecutive)
        ));

        let short = JordanChain::new(
            ChainSide::Right,
            Complex64::ONE,
            vec![ComplexVector::from_real(&[1.0])],
        )
        .unwrap();
        assert!(matches!(
            rotate_right_chain(&short, 1, &p),
            Err(ChainError::DimensionMismatch { .. })
        ));

        let left = JordanChain::new(
            ChainSide::Left,
            Complex64::ONE,
            vec![ComplexVector::from_real(&[1.0, 1.0])],
        )
        .unwrap();
        assert!(matches!(
            rotate_right_chain(&left, 1, &p),
            Err(ChainError::WrongSide { .. })
        ));
    }

    #[test]
    fn rotate_all_produces_full_orbit() {
        let p = OrderedPartition::new(vec![vec![0], vec![1], vec![2]]).unwrap();
        let chain = JordanChain::new(
            ChainSide::Right,
            c(0.5, 0.0),
            vec![ComplexVector::from_real(&[1.0, 1.0, 1.0])],
        )
        .unwrap();
        let orbit = rotate_all(&chain, &p).unwrap();
        assert_eq!(orbit.h, 3);
        assert_eq!(orbit.right_chains.len(), 3);
        assert!(orbit.left_chains.is_empty());
        let roots = RootsOfUnity::new(3).unwrap();
        for (k, rc) in orbit.right_chains.iter().enumerate() {
            let expect = c(0.5, 0.0) * roots.omega_pow(k as i64);
            assert!((rc.eigenvalue() - expect).norm() < 1e-14);
        }
    }

    #[test]
    fn rotation_composition_matches_sum_of_indices() {
        // rotating by k then k' equals rotating by (k + k') mod h
        let p = OrderedPartition::new(vec![vec![0, 1], vec![2, 3], vec![4, 5]]).unwrap();
        let chain = JordanChain::new(
            ChainSide::Right,
            c(1.0, 0.25),
            vec![
                ComplexVector::new(vec![
                    c(0.3, 0.1),
                    c(-0.2, 0.7),
                    c(0.9, -0.4),
                    c(0.5, 0.5),
                    c(-0.6, 0.0),
                    c(0.0, -0.8),
                ]),
                ComplexVector::new(vec![
                    c(0.1, 0.0),
                    c(0.2, 0.1),
                    c(0.3, 0.2),
                    c(0.4, 0.3),
                    c(0.5, 0.4),
                    c(0.6, 0.5),
                ]),
            ],
        )
        .unwrap();
        for k1 in 0..3 {
            for k2 in 0..3 {
                let composed = rotate_right_chain(
                    &rotate_right_chain(&chain, k1, &p).unwrap(),
                    k2,
                    &p,
                )
                .unwrap();
                let direct = rotate_right_chain(&chain, (k1 + k2) % 3, &p).unwrap();
                for (a, b) in composed.vectors().iter().zip(direct.vectors()) {
                    for i in 0..a.dim() {
                        assert!((a[i] - b[i]).norm() <= 1e-12, "k1={k1} k2={k2}");
                    }
                }
            }
        }
    }
}

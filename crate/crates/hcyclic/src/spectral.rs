//! Eigenstructure of small dense matrices organized into rotation orbits,
//! and the commuting spectral component matrices built by two independent
//! routes: the similarity formula Z diag(0,..,J_orbit,..,0) Z^{-1} and the
//! direct block formula from the base chains.

use num_complex::Complex64;

use crate::chain::{
    rotate_all, verify_chain, ChainError, ChainSide, JordanChain, SpectralOrbit,
};
use crate::graph::{
    cyclic_characteristic_matrix, detect_cyclic_structure, digraph_contained_in, CyclicDetection,
    CyclicStructure, GraphError, OrderedPartition,
};
use crate::matrix::{
    direct_sum, jordan_block, orbit_jordan_form, ComplexMatrix, ComplexVector, MatrixError,
    RootsOfUnity,
};
use crate::numeric::{self, NumericError};

/// Relative singular-value threshold for rank decisions in the nullspace
/// ladder.
pub const DEFAULT_RANK_TOL: f64 = 1e-10;
/// Width of the ambiguity band around the rank threshold; singular values
/// inside `(threshold, threshold*BAND)` abort instead of guessing.
pub const DEFAULT_RANK_BAND: f64 = 1e3;
/// Default relative tolerance for orbit pairing and eigenvalue clustering.
pub const DEFAULT_ORBIT_TOL: f64 = 1e-8;
/// Default relative tolerance for chain residuals.
pub const DEFAULT_CHAIN_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SpectralError {
    #[error(transparent)]
    Numeric(#[from] NumericError),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error(transparent)]
    Chain(#[from] ChainError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("lambda = {lambda} is not within {tolerance:.3e} of the spectrum (closest distance {closest:.3e})")]
    EigenvalueNotInSpectrum { lambda: Complex64, closest: f64, tolerance: f64 },
    #[error("recovered chain residual {residual:.3e} exceeds {tolerance:.3e}; eigenstructure too ill-conditioned")]
    ChainResidualTooLarge { residual: f64, tolerance: f64 },
    #[error("orbit pairing failure: eigenvalue {expected} (for base {base}, k = {k}) is missing from the computed spectrum")]
    OrbitMemberMissing { base: Complex64, k: usize, expected: Complex64 },
    #[error("orbit pairing failure: eigenvalue {value} has multiplicity {got} but the orbit of {base} requires {expected}")]
    OrbitMultiplicityMismatch { base: Complex64, value: Complex64, expected: usize, got: usize },
    #[error("orbit chains cover dimension {covered} but the matrix has dimension {expected}")]
    DimensionCountMismatch { covered: usize, expected: usize },
    #[error("basis matrix Z is numerically singular")]
    BasisSingular,
    #[error("basis residual ||AZ - ZJ|| = {residual:.3e} exceeds {tolerance:.3e}")]
    BasisResidualTooLarge { residual: f64, tolerance: f64 },
    #[error("orbit index {index} out of range for {count} orbits")]
    OrbitIndexOutOfRange { index: usize, count: usize },
    #[error("orbit does not carry {side:?} base chains")]
    MissingChains { side: ChainSide },
    #[error("inconsistent chain lengths between right ({right}) and left ({left}) base chains")]
    InconsistentChainLengths { right: usize, left: usize },
    #[error("partition must be consecutive for component assembly")]
    PartitionNotConsecutive,
    #[error("partition total {partition} does not match dimension {dim}")]
    PartitionDimensionMismatch { partition: usize, dim: usize },
}

/// Eigenvalues with algebraic multiplicities, obtained by clustering the raw
/// spectrum within `tol * ||A||_inf`. Clusters are ordered by decreasing
/// modulus, then increasing argument.
pub fn eigendecompose(
    a: &ComplexMatrix,
    tol: f64,
) -> Result<Vec<(Complex64, usize)>, SpectralError> {
    let raw = numeric::eigenvalues(a)?;
    let tol_abs = tol * a.inf_norm();
    Ok(cluster_eigenvalues(&raw, tol_abs))
}

fn normalized_arg(z: Complex64) -> f64 {
    let mut theta = z.arg();
    if theta < 0.0 {
        theta += 2.0 * std::f64::consts::PI;
    }
    // treat a hair under 2*pi as zero so near-positive-real values sort first
    if (theta - 2.0 * std::f64::consts::PI).abs() < 1e-12 {
        theta = 0.0;
    }
    theta
}

fn cluster_eigenvalues(raw: &[Complex64], tol_abs: f64) -> Vec<(Complex64, usize)> {
    let mut values: Vec<Complex64> = raw.to_vec();
    values.sort_by(|a, b| {
        (a.re, a.im)
            .partial_cmp(&(b.re, b.im))
            .expect("eigenvalues are finite")
    });
    // single-linkage clustering; n is small so the quadratic scan is fine
    let mut clusters: Vec<Vec<Complex64>> = Vec::new();
    for value in values {
        let mut joined = false;
        for cluster in clusters.iter_mut() {
            if cluster.iter().any(|&c| (c - value).norm() <= tol_abs) {
                cluster.push(value);
                joined = true;
                break;
            }
        }
        if !joined {
            clusters.push(vec![value]);
        }
    }
    let mut result: Vec<(Complex64, usize)> = clusters
        .into_iter()
        .map(|cluster| {
            let mean = cluster.iter().sum::<Complex64>() / cluster.len() as f64;
            (mean, cluster.len())
        })
        .collect();
    result.sort_by(|a, b| {
        (-a.0.norm(), normalized_arg(a.0))
            .partial_cmp(&(-b.0.norm(), normalized_arg(b.0)))
            .expect("finite")
    });
    result
}

/// Scales a chain so the leading vector has unit Euclidean norm and its
/// largest-modulus entry is positive real, pinning the per-chain gauge.
fn normalize_chain_gauge(vectors: &mut [ComplexVector]) {
    let lead = &vectors[0];
    let mut best = 0;
    let mut best_norm = 0.0;
    for i in 0..lead.dim() {
        let m = lead[i].norm();
        if m > best_norm {
            best_norm = m;
            best = i;
        }
    }
    if best_norm == 0.0 {
        return;
    }
    let norm2 = lead.entries().iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let phase = lead[best] / lead[best].norm();
    let factor = (phase * norm2).inv();
    for v in vectors.iter_mut() {
        for e in v.entries_mut() {
            *e *= factor;
        }
    }
}

/// A maximal set of independent right Jordan chains for `lambda`, computed
/// from the nullspace ladder of (A - lambda I)^k with singular-value rank
/// decisions at `tol * sigma_max`. Ambiguous rank decisions abort rather
/// than guess.
pub fn jordan_chains_for(
    a: &ComplexMatrix,
    lambda: Complex64,
    tol: f64,
) -> Result<Vec<JordanChain>, SpectralError> {
    let n = a.require_square().map_err(SpectralError::Matrix)?;
    let raw = numeric::eigenvalues(a)?;
    let closest = raw.iter().map(|&e| (e - lambda).norm()).fold(f64::INFINITY, f64::min);
    // defective eigenvalues scatter the computed spectrum by ~eps^(1/r), so
    // the membership test needs generous slack
    let spectrum_tol = 1e-5 * a.inf_norm().max(1.0);
    if closest > spectrum_tol {
        return Err(SpectralError::EigenvalueNotInSpectrum {
            lambda,
            closest,
            tolerance: spectrum_tol,
        });
    }

    let shifted = a.sub(&ComplexMatrix::identity(n).scale(lambda))?;

    // nullspace ladder: bases[k-1] spans null((A - lambda I)^k)
    let mut bases: Vec<Vec<ComplexVector>> = Vec::new();
    let mut power = shifted.clone();
    loop {
        let decomposition = numeric::svd(&power)?;
        let sigma_max = decomposition.singular_values.first().copied().unwrap_or(0.0);
        let threshold = tol * sigma_max;
        let mut basis = Vec::new();
        for (idx, &sigma) in decomposition.singular_values.iter().enumerate() {
            if sigma > threshold && sigma < threshold * DEFAULT_RANK_BAND {
                return Err(SpectralError::Numeric(NumericError::RankDecisionAmbiguous {
                    value: sigma,
                    lower: threshold,
                    upper: threshold * DEFAULT_RANK_BAND,
                }));
            }
            if sigma <= threshold {
                basis.push(decomposition.right_vectors.column(idx));
            }
        }
        let previous = bases.last().map_or(0, Vec::len);
        if basis.len() == previous || bases.len() == n {
            break;
        }
        bases.push(basis);
        power = power.mul(&shifted)?;
    }

    let max_height = bases.len();
    if max_height == 0 {
        // numerically nothing in the nullspace: lambda was only marginally
        // close to the spectrum
        return Err(SpectralError::EigenvalueNotInSpectrum {
            lambda,
            closest,
            tolerance: tol * a.inf_norm(),
        });
    }

    let dims: Vec<usize> = bases.iter().map(Vec::len).collect();
    // number of blocks of size >= k (1-based k)
    let blocks_at_least = |k: usize| -> usize {
        if k == 0 || k > max_height {
            0
        } else {
            dims[k - 1] - if k >= 2 { dims[k - 2] } else { 0 }
        }
    };

    // Work from the tallest height down, picking chain tops independent of
    // the lower ladder rung and of the down-mapped images of taller chains.
    let mut tops: Vec<(usize, ComplexVector)> = Vec::new();
    for k in (1..=max_height).rev() {
        let new_tops = blocks_at_least(k) - blocks_at_least(k + 1);
        if new_tops == 0 {
            continue;
        }
        let mut occupied: Vec<ComplexVector> = Vec::new();
        if k >= 2 {
            for v in &bases[k - 2] {
                orthonormal_insert(&mut occupied, v.clone());
            }
        }
        for (height, top) in &tops {
            let mut image = top.clone();
            for _ in 0..(height - k) {
                image = shifted.apply(&image)?;
            }
            orthonormal_insert(&mut occupied, image);
        }
        for _ in 0..new_tops {
            let (norm, best) = bases[k - 1]
                .iter()
                .map(|v| {
                    let residual = project_out(&occupied, v);
                    (residual.inf_norm(), residual)
                })
                .max_by(|a, b| a.0.partial_cmp(&b.0).expect("finite"))
                .expect("rung basis is nonempty");
            if norm < 1e-8 {
                return Err(SpectralError::ChainResidualTooLarge {
                    residual: norm,
                    tolerance: 1e-8,
                });
            }
            let normalized = normalize2(&best);
            orthonormal_insert(&mut occupied, normalized.clone());
            tops.push((k, normalized));
        }
    }

    // walk each top down with (A - lambda I) to complete the chain
    let mut chains = Vec::with_capacity(tops.len());
    for (height, top) in tops {
        let mut vectors = vec![top];
        for _ in 1..height {
            let next = shifted.apply(vectors.last().expect("nonempty"))?;
            vectors.push(next);
        }
        vectors.reverse(); // vectors[0] is now the eigenvector
        normalize_chain_gauge(&mut vectors);
        chains.push(JordanChain::new(ChainSide::Right, lambda, vectors)?);
    }
    chains.sort_by(|a, b| b.len().cmp(&a.len()));

    // sanity-check the recovered chains against the defining relations
    for chain in &chains {
        let tolerance = 1e-6 * a.inf_norm().max(1.0) * chain.max_vector_norm().max(1.0);
        let report = verify_chain(a, chain, tolerance)?;
        if !report.pass {
            return Err(SpectralError::ChainResidualTooLarge {
                residual: report.max_residual(),
                tolerance,
            });
        }
    }
    Ok(chains)
}

fn normalize2(v: &ComplexVector) -> ComplexVector {
    let norm = v.entries().iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.scale(Complex64::new(1.0 / norm, 0.0))
}

/// Hermitian inner product <u, v> = sum conj(u_i) v_i.
fn hdot(u: &ComplexVector, v: &ComplexVector) -> Complex64 {
    u.entries()
        .iter()
        .zip(v.entries())
        .map(|(&a, &b)| a.conj() * b)
        .sum()
}

fn project_out(basis: &[ComplexVector], v: &ComplexVector) -> ComplexVector {
    let mut out = v.clone();
    // two passes of modified Gram-Schmidt for re-orthogonalization
    for _ in 0..2 {
        for b in basis {
            let coefficient = hdot(b, &out);
            for i in 0..out.dim() {
                let correction = coefficient * b[i];
                out.entries_mut()[i] -= correction;
            }
        }
    }
    out
}

fn orthonormal_insert(basis: &mut Vec<ComplexVector>, v: ComplexVector) {
    let residual = project_out(basis, &v);
    let norm = residual.entries().iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if norm > 1e-12 {
        basis.push(residual.scale(Complex64::new(1.0 / norm, 0.0)));
    }
}

/// A full rotation-structured Jordan basis: Z, its inverse, J, and the
/// orbits carrying both right and left chains.
#[derive(Debug, Clone)]
pub struct OrbitBasis {
    pub z: ComplexMatrix,
    pub z_inv: ComplexMatrix,
    pub j: ComplexMatrix,
    pub orbits: Vec<SpectralOrbit>,
    /// Column range of each orbit inside Z.
    pub orbit_spans: Vec<std::ops::Range<usize>>,
    /// The (consecutive) partition the basis was built against.
    pub partition: OrderedPartition,
    /// Chains for the zero eigenvalue, kept in Z for invertibility but
    /// excluded from component construction.
    pub zero_chains: Vec<JordanChain>,
    /// Column range holding the zero chains, if any.
    pub zero_span: Option<std::ops::Range<usize>>,
    /// ||Z||_inf * ||Z^{-1}||_inf.
    pub condition_estimate: f64,
    pub warnings: Vec<String>,
    /// Relative tolerance the basis was built and checked with.
    pub tolerance: f64,
}

impl OrbitBasis {
    /// Assembles a basis from externally known parts (for example a planted
    /// instance). `orbits` must carry right chains whose vectors, laid out
    /// orbit by orbit with k increasing within each orbit, form Z; left
    /// chains are read back from the rows of Z^{-1}.
    pub fn from_parts(
        a: &ComplexMatrix,
        partition: OrderedPartition,
        orbits: Vec<SpectralOrbit>,
        tolerance: f64,
    ) -> Result<Self, SpectralError> {
        let n = a.require_square().map_err(SpectralError::Matrix)?;
        if partition.total_len() != n {
            return Err(SpectralError::PartitionDimensionMismatch {
                partition: partition.total_len(),
                dim: n,
            });
        }
        assemble_basis(a, partition, orbits, Vec::new(), tolerance)
    }
}

/// Computes the orbit basis of an h-cyclic matrix in consecutive form:
/// clusters the spectrum, groups it into omega-orbits, computes chains for
/// each orbit base, rotates them across the orbit, and assembles (Z, J)
/// with left chains read from Z^{-1}.
pub fn build_orbit_basis(
    a: &ComplexMatrix,
    structure: &CyclicStructure,
    tol: f64,
) -> Result<OrbitBasis, SpectralError> {
    let n = a.require_square().map_err(SpectralError::Matrix)?;
    let partition = &structure.partition;
    if partition.total_len() != n {
        return Err(SpectralError::PartitionDimensionMismatch {
            partition: partition.total_len(),
            dim: n,
        });
    }
    if !partition.is_consecutive() {
        return Err(SpectralError::PartitionNotConsecutive);
    }
    let h = structure.h;
    let roots = RootsOfUnity::new(h).map_err(SpectralError::Matrix)?;
    let tol_abs = tol * a.inf_norm().max(1e-300);

    let clusters = eigendecompose(a, tol)?;

    // split off the zero cluster, if any
    let mut nonzero: Vec<(Complex64, usize)> = Vec::new();
    let mut zero_multiplicity = 0;
    for &(value, mult) in &clusters {
        if value.norm() <= tol_abs {
            zero_multiplicity += mult;
        } else {
            nonzero.push((value, mult));
        }
    }

    // group nonzero clusters into omega-orbits
    let mut used = vec![false; nonzero.len()];
    let mut orbit_groups: Vec<Vec<usize>> = Vec::new();
    for seed in 0..nonzero.len() {
        if used[seed] {
            continue;
        }
        let (seed_value, seed_mult) = nonzero[seed];
        let mut members = Vec::with_capacity(h);
        for k in 0..h {
            let target = seed_value * roots.omega_pow(k as i64);
            let found = nonzero
                .iter()
                .enumerate()
                .filter(|&(idx, _)| !used[idx] && !members.contains(&idx))
                .min_by(|(_, x), (_, y)| {
                    (x.0 - target)
                        .norm()
                        .partial_cmp(&(y.0 - target).norm())
                        .expect("finite")
                });
            match found {
                Some((idx, &(value, mult))) if (value - target).norm() <= tol_abs => {
                    if mult != seed_mult {
                        return Err(SpectralError::OrbitMultiplicityMismatch {
                            base: seed_value,
                            value,
                            expected: seed_mult,
                            got: mult,
                        });
                    }
                    members.push(idx);
                }
                _ => {
                    return Err(SpectralError::OrbitMemberMissing {
                        base: seed_value,
                        k,
                        expected: target,
                    })
                }
            }
        }
        for &m in &members {
            used[m] = true;
        }
        orbit_groups.push(members);
    }

    // base of each orbit: the member with the smallest nonnegative argument,
    // which necessarily lands in [0, 2*pi/h)
    let mut bases: Vec<(Complex64, usize)> = orbit_groups
        .iter()
        .map(|group| {
            let &base_idx = group
                .iter()
                .min_by(|&&x, &&y| {
                    normalized_arg(nonzero[x].0)
                        .partial_cmp(&normalized_arg(nonzero[y].0))
                        .expect("finite")
                })
                .expect("orbit group is nonempty");
            nonzero[base_idx]
        })
        .collect();
    bases.sort_by(|a, b| {
        (-a.0.norm(), normalized_arg(a.0))
            .partial_cmp(&(-b.0.norm(), normalized_arg(b.0)))
            .expect("finite")
    });

    // chains per base; each chain becomes its own orbit block
    let mut orbits: Vec<SpectralOrbit> = Vec::new();
    for &(base, mult) in &bases {
        let chains = jordan_chains_for(a, base, DEFAULT_RANK_TOL)?;
        let total: usize = chains.iter().map(JordanChain::len).sum();
        if total != mult {
            return Err(SpectralError::OrbitMultiplicityMismatch {
                base,
                value: base,
                expected: mult,
                got: total,
            });
        }
        for chain in chains {
            orbits.push(rotate_all(&chain, partition)?);
        }
    }

    // zero chains keep Z square for singular input
    let zero_chains = if zero_multiplicity > 0 {
        jordan_chains_for(a, Complex64::ZERO, DEFAULT_RANK_TOL)?
    } else {
        Vec::new()
    };

    assemble_basis(a, partition.clone(), orbits, zero_chains, tol)
}

fn assemble_basis(
    a: &ComplexMatrix,
    partition: OrderedPartition,
    orbits: Vec<SpectralOrbit>,
    zero_chains: Vec<JordanChain>,
    tol: f64,
) -> Result<OrbitBasis, SpectralError> {
    let n = a.rows();
    let covered: usize = orbits.iter().map(|o| o.h * o.chain_length).sum::<usize>()
        + zero_chains.iter().map(JordanChain::len).sum::<usize>();
    if covered != n {
        return Err(SpectralError::DimensionCountMismatch { covered, expected: n });
    }

    let mut z = ComplexMatrix::zeros(n, n);
    let mut j_blocks: Vec<ComplexMatrix> = Vec::new();
    let mut orbit_spans = Vec::with_capacity(orbits.len());
    let mut column = 0;
    for orbit in &orbits {
        let start = column;
        if orbit.right_chains.len() != orbit.h {
            return Err(SpectralError::MissingChains { side: ChainSide::Right });
        }
        for chain in &orbit.right_chains {
            for vector in chain.vectors() {
                z.set_column(column, vector);
                column += 1;
            }
        }
        orbit_spans.push(start..column);
        j_blocks.push(
            orbit_jordan_form(orbit.base_eigenvalue, orbit.chain_length, orbit.h)
                .map_err(SpectralError::Matrix)?,
        );
    }
    let zero_span = if zero_chains.is_empty() {
        None
    } else {
        let start = column;
        for chain in &zero_chains {
            for vector in chain.vectors() {
                z.set_column(column, vector);
                column += 1;
            }
            j_blocks.push(jordan_block(Complex64::ZERO, chain.len()));
        }
        Some(start..column)
    };
    let j = direct_sum(&j_blocks).map_err(SpectralError::Matrix)?;

    let z_inv = numeric::inverse(&z).map_err(|_| SpectralError::BasisSingular)?;
    let condition_estimate = z.inf_norm() * z_inv.inf_norm();

    let residual = a.mul(&z)?.sub(&z.mul(&j)?)?.inf_norm();
    let tolerance = tol * a.inf_norm().max(1e-300) * z.inf_norm().max(1.0);
    if residual > tolerance {
        return Err(SpectralError::BasisResidualTooLarge { residual, tolerance });
    }

    // left chains are the rows of Z^{-1}, sliced per orbit and per k
    let mut orbits = orbits;
    for (orbit, span) in orbits.iter_mut().zip(&orbit_spans) {
        let r = orbit.chain_length;
        let mut left_chains = Vec::with_capacity(orbit.h);
        for k in 0..orbit.h {
            let eigenvalue = orbit.right_chains[k].eigenvalue();
            let vectors: Vec<ComplexVector> = (0..r)
                .map(|j_pos| z_inv.row(span.start + k * r + j_pos))
                .collect();
            left_chains.push(JordanChain::new(ChainSide::Left, eigenvalue, vectors)?);
        }
        orbit.left_chains = left_chains;
    }

    let mut warnings = Vec::new();
    if condition_estimate > 1.0 / tol {
        warnings.push(format!(
            "basis condition estimate {condition_estimate:.3e} exceeds 1/tolerance; component \
             matrices may lose accuracy"
        ));
    }
    if !zero_chains.is_empty() {
        warnings.push(
            "zero eigenvalue present: the input is outside the nonsingularity assumption and \
             components are built for nonzero orbits only"
                .to_string(),
        );
    }

    Ok(OrbitBasis {
        z,
        z_inv,
        j,
        orbits,
        orbit_spans,
        partition,
        zero_chains,
        zero_span,
        condition_estimate,
        warnings,
        tolerance: tol,
    })
}

/// A spectral component matrix A_lambda with its cyclic blocks.
#[derive(Debug, Clone)]
pub struct ComponentMatrix {
    pub base_eigenvalue: Complex64,
    /// The component matrix, projected onto the exact cyclic zero pattern.
    pub matrix: ComplexMatrix,
    /// The h blocks in positions (pi_ell, pi_{ell+1}); they reassemble to
    /// `matrix` exactly.
    pub blocks: Vec<ComplexMatrix>,
    /// Largest entry modulus removed by the pattern projection; zero for the
    /// block-formula route.
    pub off_pattern_residual: f64,
    /// Whether the base right and left eigenvectors are strictly nonzero in
    /// every entry (None when unknown); the cyclic-index corollary applies
    /// when true.
    pub eigenvectors_strictly_nonzero: Option<bool>,
    pub warnings: Vec<String>,
}

fn split_blocks(matrix: &ComplexMatrix, partition: &OrderedPartition) -> (Vec<ComplexMatrix>, f64) {
    let h = partition.class_count();
    let mut blocks = Vec::with_capacity(h);
    for ell in 0..h {
        let rows = partition.class(ell);
        let cols = partition.class((ell + 1) % h);
        blocks.push(matrix.submatrix(rows, cols));
    }
    // everything outside the cyclic pattern is junk the construction promises
    // to be zero; measure it before discarding
    let n = matrix.rows();
    let mut class_of = vec![usize::MAX; n];
    for (ell, class) in partition.classes().iter().enumerate() {
        for &v in class {
            class_of[v] = ell;
        }
    }
    let mut off_pattern: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            if class_of[j] != (class_of[i] + 1) % h {
                off_pattern = off_pattern.max(matrix[(i, j)].norm());
            }
        }
    }
    (blocks, off_pattern)
}

fn assemble_from_blocks(
    blocks: &[ComplexMatrix],
    partition: &OrderedPartition,
    n: usize,
) -> ComplexMatrix {
    let h = partition.class_count();
    let mut matrix = ComplexMatrix::zeros(n, n);
    for ell in 0..h {
        let rows = partition.class(ell);
        let cols = partition.class((ell + 1) % h);
        let block = &blocks[ell];
        for (bi, &i) in rows.iter().enumerate() {
            for (bj, &j) in cols.iter().enumerate() {
                matrix[(i, j)] = block[(bi, bj)];
            }
        }
    }
    matrix
}

fn strictly_nonzero(v: &ComplexVector) -> bool {
    let max = v.inf_norm();
    max > 0.0 && v.entries().iter().all(|z| z.norm() > 1e-8 * max)
}

fn orbit_eigenvectors_strictly_nonzero(orbit: &SpectralOrbit) -> Option<bool> {
    let right = orbit.base_right()?;
    let left = orbit.base_left()?;
    // the corollary's hypothesis: the right eigenvector (first chain vector)
    // and the left eigenvector (last chain vector) are strictly nonzero
    let x = &right.vectors()[0];
    let y = &left.vectors()[left.len() - 1];
    Some(strictly_nonzero(x) && strictly_nonzero(y))
}

/// The component A_lambda of one orbit via the similarity route:
/// Z diag(0, ..., J(lambda nu_h, r), ..., 0) Z^{-1}.
pub fn component_via_similarity(
    basis: &OrbitBasis,
    orbit_index: usize,
) -> Result<ComponentMatrix, SpectralError> {
    if orbit_index >= basis.orbits.len() {
        return Err(SpectralError::OrbitIndexOutOfRange {
            index: orbit_index,
            count: basis.orbits.len(),
        });
    }
    let orbit = &basis.orbits[orbit_index];
    let span = &basis.orbit_spans[orbit_index];
    let n = basis.z.rows();
    let columns: Vec<usize> = span.clone().collect();
    let all: Vec<usize> = (0..n).collect();
    let z_cols = basis.z.submatrix(&all, &columns);
    let j_block = basis.j.submatrix(&columns, &columns);
    let zinv_rows = basis.z_inv.submatrix(&columns, &all);
    let raw = z_cols.mul(&j_block)?.mul(&zinv_rows)?;

    let (blocks, off_pattern_residual) = split_blocks(&raw, &basis.partition);
    let matrix = assemble_from_blocks(&blocks, &basis.partition, n);
    let mut warnings = Vec::new();
    if basis.condition_estimate > 1.0 / basis.tolerance {
        warnings.push(format!(
            "basis condition estimate {:.3e} exceeds 1/tolerance; component computed anyway",
            basis.condition_estimate
        ));
    }
    Ok(ComponentMatrix {
        base_eigenvalue: orbit.base_eigenvalue,
        matrix,
        blocks,
        off_pattern_residual,
        eigenvectors_strictly_nonzero: orbit_eigenvectors_strictly_nonzero(orbit),
        warnings,
    })
}

/// The component A_lambda of one orbit via the direct block formula: block
/// (ell, ell+1) is lambda h sum_{j=1..r} x_{ell j} y_{j (ell+1)}^T
/// + h sum_{j=1..r-1} x_{ell j} y_{(j+1)(ell+1)}^T, built from the base
/// (k = 0) right and left chains of one biorthogonal pair.
pub fn component_via_blocks(
    orbit: &SpectralOrbit,
    partition: &OrderedPartition,
) -> Result<ComponentMatrix, SpectralError> {
    let right = orbit
        .base_right()
        .ok_or(SpectralError::MissingChains { side: ChainSide::Right })?;
    let left = orbit
        .base_left()
        .ok_or(SpectralError::MissingChains { side: ChainSide::Left })?;
    if right.len() != left.len() {
        return Err(SpectralError::InconsistentChainLengths {
            right: right.len(),
            left: left.len(),
        });
    }
    if !partition.is_consecutive() {
        return Err(SpectralError::PartitionNotConsecutive);
    }
    let n = right.dim();
    if partition.total_len() != n || left.dim() != n {
        return Err(SpectralError::PartitionDimensionMismatch {
            partition: partition.total_len(),
            dim: n,
        });
    }
    let h = partition.class_count();
    let r = right.len();
    let lambda = orbit.base_eigenvalue;
    let h_scalar = Complex64::new(h as f64, 0.0);

    let mut blocks = Vec::with_capacity(h);
    for ell in 0..h {
        let rows = partition.class(ell);
        let cols = partition.class((ell + 1) % h);
        let mut block = ComplexMatrix::zeros(rows.len(), cols.len());
        for j_pos in 0..r {
            let x_block: Vec<Complex64> =
                rows.iter().map(|&i| right.vectors()[j_pos][i]).collect();
            // first sum: lambda h x_{ell j} y_{j (ell+1)}^T
            let y_block: Vec<Complex64> =
                cols.iter().map(|&i| left.vectors()[j_pos][i]).collect();
            for (bi, &xv) in x_block.iter().enumerate() {
                for (bj, &yv) in y_block.iter().enumerate() {
                    block[(bi, bj)] += lambda * h_scalar * xv * yv;
                }
            }
            // second sum: h x_{ell j} y_{(j+1)(ell+1)}^T; empty when j = r
            if j_pos + 1 < r {
                let y_next: Vec<Complex64> =
                    cols.iter().map(|&i| left.vectors()[j_pos + 1][i]).collect();
                for (bi, &xv) in x_block.iter().enumerate() {
                    for (bj, &yv) in y_next.iter().enumerate() {
                        block[(bi, bj)] += h_scalar * xv * yv;
                    }
                }
            }
        }
        blocks.push(block);
    }
    let matrix = assemble_from_blocks(&blocks, partition, n);
    Ok(ComponentMatrix {
        base_eigenvalue: lambda,
        matrix,
        blocks,
        off_pattern_residual: 0.0,
        eigenvectors_strictly_nonzero: orbit_eigenvectors_strictly_nonzero(orbit),
        warnings: Vec::new(),
    })
}

/// One residual measured against its tolerance.
#[derive(Debug, Clone, serde::Serialize)]
pub struct ResidualCheck {
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl ResidualCheck {
    pub fn new(residual: f64, tolerance: f64) -> Self {
        Self { residual, tolerance, pass: residual <= tolerance }
    }
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct ContainmentCheck {
    pub orbit: usize,
    pub contained: bool,
    pub off_pattern_residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct AnnihilationCheck {
    pub first: usize,
    pub second: usize,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct CyclicIndexCheck {
    pub orbit: usize,
    /// False when the corollary's strict-nonzero hypothesis fails; the check
    /// is then skipped and passes vacuously.
    pub applicable: bool,
    pub detected_h: Option<usize>,
    pub digraph_equals_characteristic: Option<bool>,
    pub pass: bool,
}

/// Verification report for a family of components from one basis.
#[derive(Debug, Clone, serde::Serialize)]
pub struct ComponentPropertyReport {
    pub containment: Vec<ContainmentCheck>,
    pub commutation: Vec<ResidualCheck>,
    pub annihilation: Vec<AnnihilationCheck>,
    pub reconstruction: ResidualCheck,
    pub cyclic_index: Vec<CyclicIndexCheck>,
    pub pass: bool,
}

/// Checks every structural claim about the components: digraph containment,
/// commutation with A, mutual annihilation, reconstruction of A, and the
/// cyclic-index corollary where its hypothesis holds. `tol` is the relative
/// residual tolerance; the containment pattern check uses
/// 1e-10 * ||A_lambda||_inf.
pub fn verify_component_properties(
    a: &ComplexMatrix,
    components: &[ComponentMatrix],
    structure: &CyclicStructure,
    tol: f64,
) -> Result<ComponentPropertyReport, SpectralError> {
    let n = a.require_square().map_err(SpectralError::Matrix)?;
    let a_norm = a.inf_norm();
    let chi = cyclic_characteristic_matrix(&structure.partition, n)?;

    let mut containment = Vec::new();
    let mut commutation = Vec::new();
    let mut cyclic_index = Vec::new();
    for (idx, component) in components.iter().enumerate() {
        let c_norm = component.matrix.inf_norm();
        let pattern_tol = 1e-10 * c_norm.max(1e-300);
        let contained = digraph_contained_in(&component.matrix, &chi, pattern_tol)?;
        containment.push(ContainmentCheck {
            orbit: idx,
            contained,
            off_pattern_residual: component.off_pattern_residual,
            tolerance: pattern_tol,
            pass: contained && component.off_pattern_residual <= pattern_tol,
        });

        let commutator = a
            .mul(&component.matrix)?
            .sub(&component.matrix.mul(a)?)?
            .inf_norm();
        commutation.push(ResidualCheck::new(
            commutator,
            tol * a_norm.max(1e-300) * c_norm.max(1e-300),
        ));

        // cyclic-index corollary, when the strict-nonzero hypothesis holds
        if component.eigenvectors_strictly_nonzero == Some(true) {
            let detection = detect_cyclic_structure(&component.matrix, pattern_tol)?;
            let (detected_h, equal) = match detection {
                CyclicDetection::Primitive => (Some(1), Some(false)),
                CyclicDetection::Cyclic(s) => {
                    let forward = digraph_contained_in(&component.matrix, &chi, pattern_tol)?;
                    let reverse = digraph_contained_in(&chi, &component.matrix, pattern_tol)?;
                    (Some(s.h), Some(forward && reverse))
                }
            };
            let pass = detected_h == Some(structure.h) && equal == Some(true);
            cyclic_index.push(CyclicIndexCheck {
                orbit: idx,
                applicable: true,
                detected_h,
                digraph_equals_characteristic: equal,
                pass,
            });
        } else {
            cyclic_index.push(CyclicIndexCheck {
                orbit: idx,
                applicable: false,
                detected_h: None,
                digraph_equals_characteristic: None,
                pass: true,
            });
        }
    }

    let mut annihilation = Vec::new();
    for i in 0..components.len() {
        for j in 0..components.len() {
            if i == j {
                continue;
            }
            let product = components[i].matrix.mul(&components[j].matrix)?;
            let tolerance = tol
                * components[i].matrix.inf_norm().max(1e-300)
                * components[j].matrix.inf_norm().max(1e-300);
            annihilation.push(AnnihilationCheck {
                first: i,
                second: j,
                residual: product.inf_norm(),
                tolerance,
                pass: product.inf_norm() <= tolerance,
            });
        }
    }

    let mut sum = ComplexMatrix::zeros(n, n);
    for component in components {
        sum = sum.add(&component.matrix)?;
    }
    let reconstruction = ResidualCheck::new(sum.sub(a)?.inf_norm(), tol * a_norm.max(1e-300));

    let pass = containment.iter().all(|c| c.pass)
        && commutation.iter().all(|c| c.pass)
        && annihilation.iter().all(|c| c.pass)
        && reconstruction.pass
        && cyclic_index.iter().all(|c| c.pass);

    Ok(ComponentPropertyReport {
        containment,
        commutation,
        annihilation,
        reconstruction,
        cyclic_index,
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::cycle_matrix;

    #[test]
    fn eigendecompose_identity() {
        let spectrum = eigendecompose(&ComplexMatrix::identity(3), 1e-8).unwrap();
        assert_eq!(spectrum.len(), 1);
        assert!((spectrum[0].0 - Complex64::ONE).norm() < 1e-12);
        assert_eq!(spectrum[0].1, 3);
    }

    #[test]
    fn eigendecompose_k4_gives_fourth_roots() {
        let spectrum = eigendecompose(&cycle_matrix(4).unwrap(), 1e-8).unwrap();
        assert_eq!(spectrum.len(), 4);
        for (value, mult) in &spectrum {
            assert_eq!(*mult, 1);
            assert!((value.norm() - 1.0).abs() < 1e-10);
        }
        // ordering: decreasing modulus, then increasing argument
        assert!((spectrum[0].0 - Complex64::ONE).norm() < 1e-10);
    }

    #[test]
    fn chains_of_explicit_jordan_block() {
        let a = jordan_block(Complex64::new(5.0, 0.0), 2);
        let chains = jordan_chains_for(&a, Complex64::new(5.0, 0.0), DEFAULT_RANK_TOL).unwrap();
        assert_eq!(chains.len(), 1);
        assert_eq!(chains[0].len(), 2);
        let report = verify_chain(&a, &chains[0], 1e-10).unwrap();
        assert!(report.pass, "residuals {:?}", report.residuals);
    }

    #[test]
    fn chains_reject_non_eigenvalue() {
        let a = ComplexMatrix::identity(3);
        let err = jordan_chains_for(&a, Complex64::new(7.0, 0.0), DEFAULT_RANK_TOL).unwrap_err();
        assert!(matches!(err, SpectralError::EigenvalueNotInSpectrum { .. }));
    }
}

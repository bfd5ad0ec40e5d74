//! The full analysis pipeline behind the CLI and the C API: detect the
//! cyclic structure, decompose into rotation orbits, build components by
//! both routes, verify every claimed property, and run the
//! Perron-Frobenius suite when the input is nonnegative.

use num_complex::Complex64;

use crate::chain::{verify_chain, ChainError};
use crate::graph::{
    default_zero_tol, detect_cyclic_structure, CyclicDetection, CyclicStructure, GraphError,
    OrderedPartition,
};
use crate::matrix::{ComplexMatrix, MatrixError};
use crate::perron::{
    check_peripheral_rotation, is_nonnegative_irreducible, perron_component, perron_data,
    PerronError,
};
use crate::report::{
    AnalysisReport, ComponentSummary, CyclicSummary, InputDescriptor, MatrixPayload,
    OrbitSummary, PerronSection, SpectrumEntry, Tolerances, REPORT_SCHEMA_VERSION,
};
use crate::spectral::{
    build_orbit_basis, component_via_blocks, component_via_similarity,
    verify_component_properties, ResidualCheck, SpectralError, DEFAULT_CHAIN_TOL,
    DEFAULT_ORBIT_TOL,
};

#[derive(Debug, thiserror::Error)]
pub enum AnalysisError {
    #[error("matrix is reducible; analysis targets the irreducible case")]
    Reducible,
    #[error("matrix is primitive (h = 1); pass --allow-primitive for an informational report")]
    Primitive,
    #[error(transparent)]
    Graph(GraphError),
    #[error("decomposition failed: {0}")]
    Decomposition(#[from] SpectralError),
    #[error("perron analysis failed: {0}")]
    Perron(#[from] PerronError),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error(transparent)]
    Chain(#[from] ChainError),
}

impl From<GraphError> for AnalysisError {
    fn from(e: GraphError) -> Self {
        match e {
            GraphError::Reducible | GraphError::NotStronglyConnected => Self::Reducible,
            other => Self::Graph(other),
        }
    }
}

#[derive(Debug, Clone)]
pub struct AnalyzeOptions {
    /// Absolute pattern tolerance; None selects 1e-12 * max|a_ij|.
    pub zero_tol: Option<f64>,
    /// Relative tolerance for chain residuals and component properties.
    pub chain_tol: f64,
    /// Relative tolerance for eigenvalue clustering and orbit pairing.
    pub orbit_tol: f64,
    /// Report primitive input (h = 1) instead of failing.
    pub allow_primitive: bool,
}

impl Default for AnalyzeOptions {
    fn default() -> Self {
        Self {
            zero_tol: None,
            chain_tol: DEFAULT_CHAIN_TOL,
            orbit_tol: DEFAULT_ORBIT_TOL,
            allow_primitive: false,
        }
    }
}

fn one_based(classes: &[Vec<usize>]) -> Vec<Vec<usize>> {
    classes
        .iter()
        .map(|c| c.iter().map(|v| v + 1).collect())
        .collect()
}

/// Maps a matrix in permuted (consecutive) coordinates back to the original
/// indexing: entry (p, q) of the permuted matrix lands at
/// (order[p], order[q]).
fn unpermute(matrix: &ComplexMatrix, order: &[usize]) -> ComplexMatrix {
    let n = matrix.rows();
    let mut out = ComplexMatrix::zeros(n, n);
    for p in 0..n {
        for q in 0..n {
            out[(order[p], order[q])] = matrix[(p, q)];
        }
    }
    out
}

/// Runs the full pipeline on a matrix. `descriptor` labels the input in the
/// report.
pub fn analyze(
    a: &ComplexMatrix,
    options: &AnalyzeOptions,
    descriptor: InputDescriptor,
) -> Result<AnalysisReport, AnalysisError> {
    a.require_square()?;
    let zero_tol = options.zero_tol.unwrap_or_else(|| default_zero_tol(a));
    let tolerances = Tolerances {
        zero_tol,
        chain_tol: options.chain_tol,
        orbit_tol: options.orbit_tol,
    };

    let detection = detect_cyclic_structure(a, zero_tol)?;
    let structure = match detection {
        CyclicDetection::Primitive => {
            if !options.allow_primitive {
                return Err(AnalysisError::Primitive);
            }
            return primitive_report(a, options, descriptor, tolerances);
        }
        CyclicDetection::Cyclic(s) => s,
    };

    // decompose in consecutive coordinates
    let permuted = !structure.partition.is_consecutive();
    let order = structure.consecutive_permutation.clone();
    let (work, work_structure) = if permuted {
        let b = a.permute_symmetric(&order)?;
        let sizes: Vec<usize> = structure.partition.classes().iter().map(Vec::len).collect();
        let mut classes = Vec::with_capacity(sizes.len());
        let mut start = 0;
        for s in sizes {
            classes.push((start..start + s).collect());
            start += s;
        }
        let partition = OrderedPartition::new(classes)?;
        let characteristic =
            crate::graph::cyclic_characteristic_matrix(&partition, a.rows())?;
        let consecutive = CyclicStructure {
            h: structure.h,
            partition,
            consecutive_permutation: (0..a.rows()).collect(),
            characteristic,
        };
        (b, consecutive)
    } else {
        (a.clone(), structure.clone())
    };

    let mut warnings = Vec::new();
    let basis = build_orbit_basis(&work, &work_structure, options.orbit_tol)?;
    warnings.extend(basis.warnings.iter().cloned());

    // per-orbit chain residual summary
    let work_norm = work.inf_norm();
    let mut orbit_summaries = Vec::with_capacity(basis.orbits.len());
    let mut spectrum = Vec::new();
    for (index, orbit) in basis.orbits.iter().enumerate() {
        let mut right_residuals = Vec::with_capacity(orbit.h);
        let mut left_residuals = Vec::with_capacity(orbit.h);
        let mut tolerance = 0.0_f64;
        let mut pass = true;
        for chain in &orbit.right_chains {
            let tol = options.chain_tol * work_norm * chain.max_vector_norm().max(1.0);
            let report = verify_chain(&work, chain, tol)?;
            right_residuals.push(report.max_residual());
            tolerance = tolerance.max(tol);
            pass &= report.pass;
        }
        for chain in &orbit.left_chains {
            let tol = options.chain_tol * work_norm * chain.max_vector_norm().max(1.0);
            let report = verify_chain(&work, chain, tol)?;
            left_residuals.push(report.max_residual());
            tolerance = tolerance.max(tol);
            pass &= report.pass;
        }
        for (k, chain) in orbit.right_chains.iter().enumerate() {
            spectrum.push(SpectrumEntry {
                value: (chain.eigenvalue().re, chain.eigenvalue().im),
                multiplicity: orbit.chain_length,
                orbit: Some(index),
                k: Some(k),
            });
        }
        orbit_summaries.push(OrbitSummary {
            index,
            base: (orbit.base_eigenvalue.re, orbit.base_eigenvalue.im),
            chain_length: orbit.chain_length,
            right_residuals,
            left_residuals,
            residual_tolerance: tolerance,
            pass,
        });
    }
    for chain in &basis.zero_chains {
        spectrum.push(SpectrumEntry {
            value: (0.0, 0.0),
            multiplicity: chain.len(),
            orbit: None,
            k: None,
        });
    }

    // components by both routes, reported in the original indexing
    let mut components = Vec::with_capacity(basis.orbits.len());
    let mut similarity_components = Vec::with_capacity(basis.orbits.len());
    for index in 0..basis.orbits.len() {
        let via_similarity = component_via_similarity(&basis, index)?;
        let via_blocks = component_via_blocks(&basis.orbits[index], &basis.partition)?;
        let difference = via_similarity.matrix.max_entry_diff(&via_blocks.matrix);
        let route_equivalence =
            ResidualCheck::new(difference, 1e-8 * work_norm.max(1e-300));
        warnings.extend(via_similarity.warnings.iter().cloned());
        let reported = if permuted {
            unpermute(&via_similarity.matrix, &order)
        } else {
            via_similarity.matrix.clone()
        };
        components.push(ComponentSummary {
            orbit: index,
            base: (
                via_similarity.base_eigenvalue.re,
                via_similarity.base_eigenvalue.im,
            ),
            matrix: MatrixPayload::from_matrix(&reported),
            route_equivalence,
        });
        similarity_components.push(via_similarity);
    }

    // structural property checks; for singular input the nilpotent part is
    // not a component, so compare against A minus it
    let checks = if similarity_components.is_empty() {
        None
    } else {
        let target = if let Some(span) = &basis.zero_span {
            let n = work.rows();
            let all: Vec<usize> = (0..n).collect();
            let columns: Vec<usize> = span.clone().collect();
            let z_cols = basis.z.submatrix(&all, &columns);
            let j_block = basis.j.submatrix(&columns, &columns);
            let zinv_rows = basis.z_inv.submatrix(&columns, &all);
            let nilpotent = z_cols.mul(&j_block)?.mul(&zinv_rows)?;
            work.sub(&nilpotent)?
        } else {
            work.clone()
        };
        Some(verify_component_properties(
            &target,
            &similarity_components,
            &work_structure,
            options.chain_tol,
        )?)
    };

    // Perron section for nonnegative input
    let perron = build_perron_section(
        &work,
        &work_structure,
        &basis,
        options,
        zero_tol,
        &mut warnings,
    )?;

    let orbits_pass = orbit_summaries.iter().all(|o| o.pass);
    let routes_pass = components.iter().all(|c| c.route_equivalence.pass);
    let checks_pass = checks.as_ref().map_or(true, |c| c.pass);
    let perron_pass = perron.as_ref().map_or(true, |p| p.pass);
    let pass = orbits_pass && routes_pass && checks_pass && perron_pass;

    Ok(AnalysisReport {
        schema: REPORT_SCHEMA_VERSION,
        input: descriptor,
        tolerances,
        cyclic: CyclicSummary {
            h: structure.h,
            primitive: false,
            partition: one_based(structure.partition.classes()),
            consecutive_permutation: structure
                .consecutive_permutation
                .iter()
                .map(|v| v + 1)
                .collect(),
            permuted,
        },
        spectrum,
        orbits: orbit_summaries,
        components,
        checks,
        perron,
        warnings,
        pass,
    })
}

fn build_perron_section(
    work: &ComplexMatrix,
    work_structure: &CyclicStructure,
    basis: &crate::spectral::OrbitBasis,
    options: &AnalyzeOptions,
    zero_tol: f64,
    warnings: &mut Vec<String>,
) -> Result<Option<PerronSection>, AnalysisError> {
    let nonnegative = match is_nonnegative_irreducible(work, zero_tol) {
        Ok(flag) => flag,
        Err(PerronError::ComplexEntries { .. }) => false,
        Err(e) => return Err(e.into()),
    };
    if !nonnegative {
        return Ok(None);
    }
    let pd = perron_data(work, options.chain_tol)?;
    let rho = pd.spectral_radius;
    let peripheral = check_peripheral_rotation(work, work_structure.h, options.orbit_tol)?;

    // the component lives on the rho-normalized matrix, as in the paper
    let scaled = work.scale(Complex64::new(1.0 / rho, 0.0));
    let scaled_pd = perron_data(&scaled, options.chain_tol)?;
    let component = perron_component(&scaled, &scaled_pd, work_structure)?;
    let component_min_entry = component
        .matrix
        .entries()
        .iter()
        .map(|z| z.re)
        .fold(f64::INFINITY, f64::min);

    // tie the Example-1 formula back to the similarity route: the Perron
    // orbit of the scaled matrix has component (1/rho) * C_rho
    let perron_orbit = basis
        .orbits
        .iter()
        .position(|o| (o.base_eigenvalue - Complex64::new(rho, 0.0)).norm()
            <= options.orbit_tol * work.inf_norm().max(1.0));
    let matches_similarity = match perron_orbit {
        Some(index) => {
            let similarity = component_via_similarity(basis, index)?;
            let scaled_similarity = similarity.matrix.scale(Complex64::new(1.0 / rho, 0.0));
            let difference = component.matrix.max_entry_diff(&scaled_similarity);
            ResidualCheck::new(difference, 1e-8 * scaled.inf_norm().max(1e-300))
        }
        None => {
            warnings.push(format!(
                "no orbit with base eigenvalue {rho:.6} found; skipping the Perron similarity \
                 comparison"
            ));
            ResidualCheck::new(f64::INFINITY, 0.0)
        }
    };

    let pass = peripheral.pass && component_min_entry >= -1e-10 && matches_similarity.pass;
    Ok(Some(PerronSection {
        spectral_radius: rho,
        cyclic_index: pd.cyclic_index,
        right: pd.right.entries().iter().map(|z| z.re).collect(),
        left: pd.left.entries().iter().map(|z| z.re).collect(),
        residual_tolerance: options.chain_tol * work.inf_norm(),
        peripheral,
        component_min_entry,
        component_min_tolerance: 1e-10,
        matches_similarity,
        pass,
    }))
}

/// Informational report for primitive input (h = 1): spectrum and, when
/// applicable, the Perron data, with no orbits or components.
fn primitive_report(
    a: &ComplexMatrix,
    options: &AnalyzeOptions,
    descriptor: InputDescriptor,
    tolerances: Tolerances,
) -> Result<AnalysisReport, AnalysisError> {
    let spectrum_clusters = crate::spectral::eigendecompose(a, options.orbit_tol)?;
    let spectrum = spectrum_clusters
        .iter()
        .map(|&(value, multiplicity)| SpectrumEntry {
            value: (value.re, value.im),
            multiplicity,
            orbit: None,
            k: None,
        })
        .collect();

    let zero_tol = tolerances.zero_tol;
    let mut warnings = Vec::new();
    let perron = match is_nonnegative_irreducible(a, zero_tol) {
        Ok(true) => {
            let pd = perron_data(a, options.chain_tol)?;
            let peripheral = check_peripheral_rotation(a, 1, options.orbit_tol)?;
            let pass = peripheral.pass;
            Some(PerronSection {
                spectral_radius: pd.spectral_radius,
                cyclic_index: pd.cyclic_index,
                right: pd.right.entries().iter().map(|z| z.re).collect(),
                left: pd.left.entries().iter().map(|z| z.re).collect(),
                residual_tolerance: options.chain_tol * a.inf_norm(),
                peripheral,
                component_min_entry: 0.0,
                component_min_tolerance: 1e-10,
                // no Perron component: it needs h >= 2
                matches_similarity: ResidualCheck::new(0.0, 0.0),
                pass,
            })
        }
        _ => None,
    };
    warnings.push("input is primitive: no orbits or components to build".to_string());
    let pass = perron.as_ref().map_or(true, |p| p.pass);
    Ok(AnalysisReport {
        schema: REPORT_SCHEMA_VERSION,
        input: descriptor,
        tolerances,
        cyclic: CyclicSummary {
            h: 1,
            primitive: true,
            partition: vec![(1..=a.rows()).collect()],
            consecutive_permutation: (1..=a.rows()).collect(),
            permuted: false,
        },
        spectrum,
        orbits: Vec::new(),
        components: Vec::new(),
        checks: None,
        perron,
        warnings,
        pass,
    })
}

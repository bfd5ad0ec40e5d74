//! Seeded randomized property suites, exposed both to the CLI selftest
//! subcommand and the acceptance tests. Every failure message carries the
//! seed and instance parameters needed to replay it.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::chain::{rotate_chain, verify_chain};
use crate::graph::{detect_cyclic_structure, CyclicDetection};
use crate::matrix::RootsOfUnity;
use crate::perron::{check_peripheral_rotation, perron_component, perron_data};
use crate::plant::{random_cyclic_instance, random_nonnegative_cyclic};
use crate::spectral::{
    build_orbit_basis, component_via_blocks, component_via_similarity,
    verify_component_properties, OrbitBasis,
};

#[derive(Debug, Clone)]
pub struct SelftestOptions {
    pub seed: u64,
    pub chain_cases: usize,
    pub decomposition_cases: usize,
    pub theorem_cases: usize,
    pub perron_cases: usize,
}

impl Default for SelftestOptions {
    fn default() -> Self {
        Self {
            seed: 20140704,
            chain_cases: 500,
            decomposition_cases: 200,
            theorem_cases: 100,
            perron_cases: 100,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SuiteResult {
    pub name: &'static str,
    pub cases: usize,
    pub failures: Vec<String>,
}

impl SuiteResult {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

fn case_rng(seed: u64, suite: u64, case: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ (suite << 32) ^ case as u64)
}

/// Random chain lengths summing to at most `max_block`.
fn random_chain_lengths(rng: &mut impl Rng, max_block: usize, max_len: usize) -> Vec<usize> {
    let mut lengths = Vec::new();
    let mut remaining = max_block.min(rng.random_range(1..=max_block));
    while remaining > 0 {
        let r = rng.random_range(1..=max_len.min(remaining));
        lengths.push(r);
        remaining -= r;
        if rng.random_bool(0.35) {
            break;
        }
    }
    lengths
}

/// Chain rotation suite: every planted right and left chain, rotated to
/// every k, passes verification for lambda omega^k; rotation composes
/// additively in k and k = 0 is the exact identity.
pub fn chain_rotation_suite(seed: u64, cases: usize) -> SuiteResult {
    let mut failures = Vec::new();
    for case in 0..cases {
        let mut rng = case_rng(seed, 1, case);
        let h = rng.random_range(2..=5usize);
        let max_block = (24 / h).max(1);
        let lengths = random_chain_lengths(&mut rng, max_block.min(4), 3);
        let instance = random_cyclic_instance(&mut rng, h, &lengths);
        let a = &instance.matrix;
        let a_norm = a.inf_norm();
        let ctx = format!("case {case} (seed {seed}, h={h}, lengths {lengths:?})");

        let roots = match RootsOfUnity::new(h) {
            Ok(r) => r,
            Err(e) => {
                failures.push(format!("{ctx}: {e}"));
                continue;
            }
        };

        'orbits: for (orbit_idx, orbit) in instance.orbits.iter().enumerate() {
            for (side_name, base) in
                [("right", &orbit.right_base), ("left", &orbit.left_base)]
            {
                // k = 0 must be the exact identity
                match rotate_chain(base, 0, &instance.partition) {
                    Ok(identity) => {
                        if &identity != base {
                            failures.push(format!(
                                "{ctx}: orbit {orbit_idx} {side_name} k=0 rotation is not the identity"
                            ));
                            continue 'orbits;
                        }
                    }
                    Err(e) => {
                        failures.push(format!("{ctx}: orbit {orbit_idx} {side_name}: {e}"));
                        continue 'orbits;
                    }
                }
                for k in 0..h {
                    let rotated = match rotate_chain(base, k, &instance.partition) {
                        Ok(c) => c,
                        Err(e) => {
                            failures
                                .push(format!("{ctx}: orbit {orbit_idx} {side_name} k={k}: {e}"));
                            continue 'orbits;
                        }
                    };
                    let expected = orbit.base_eigenvalue * roots.omega_pow(k as i64);
                    if (rotated.eigenvalue() - expected).norm() > 1e-12 * expected.norm().max(1.0)
                    {
                        failures.push(format!(
                            "{ctx}: orbit {orbit_idx} {side_name} k={k}: eigenvalue {} != {expected}",
                            rotated.eigenvalue()
                        ));
                        continue 'orbits;
                    }
                    let tol = 1e-9 * a_norm * rotated.max_vector_norm().max(1.0);
                    match verify_chain(a, &rotated, tol) {
                        Ok(report) if report.pass => {}
                        Ok(report) => {
                            failures.push(format!(
                                "{ctx}: orbit {orbit_idx} {side_name} k={k}: residual {:.3e} > {tol:.3e}",
                                report.max_residual()
                            ));
                            continue 'orbits;
                        }
                        Err(e) => {
                            failures
                                .push(format!("{ctx}: orbit {orbit_idx} {side_name} k={k}: {e}"));
                            continue 'orbits;
                        }
                    }
                }

                // composition: rotating by k1 then k2 equals (k1 + k2) mod h
                let k1 = rng.random_range(0..h);
                let k2 = rng.random_range(0..h);
                let composed = rotate_chain(
                    &rotate_chain(base, k1, &instance.partition).expect("checked above"),
                    k2,
                    &instance.partition,
                )
                .expect("valid arguments");
                let direct = rotate_chain(base, (k1 + k2) % h, &instance.partition)
                    .expect("valid arguments");
                let scale = base.max_vector_norm().max(1.0);
                for (u, v) in composed.vectors().iter().zip(direct.vectors()) {
                    for i in 0..u.dim() {
                        if (u[i] - v[i]).norm() > 1e-12 * scale {
                            failures.push(format!(
                                "{ctx}: orbit {orbit_idx} {side_name} composition k1={k1} k2={k2} differs by {:.3e}",
                                (u[i] - v[i]).norm()
                            ));
                            continue 'orbits;
                        }
                    }
                }
            }
        }
    }
    SuiteResult { name: "chain_rotation", cases, failures }
}

/// Route equivalence and component property suite. Diagonalizable draws run
/// the full numerical pipeline; draws with longer chains build the basis
/// from the planted data. Reconstruction, commutation, annihilation,
/// containment, and the two-route comparison are all checked.
pub fn route_equivalence_suite(seed: u64, cases: usize) -> SuiteResult {
    let mut failures = Vec::new();
    for case in 0..cases {
        let mut rng = case_rng(seed, 2, case);
        let h = rng.random_range(2..=4usize);
        let max_block = (24 / h).min(5).max(1);
        let lengths = random_chain_lengths(&mut rng, max_block, 3);
        let instance = random_cyclic_instance(&mut rng, h, &lengths);
        let a = &instance.matrix;
        let a_norm = a.inf_norm();
        let diagonalizable = lengths.iter().all(|&r| r == 1);
        let ctx = format!(
            "case {case} (seed {seed}, h={h}, lengths {lengths:?}, {})",
            if diagonalizable { "numerical" } else { "planted-basis" }
        );

        let structure = match detect_cyclic_structure(a, 0.0) {
            Ok(CyclicDetection::Cyclic(s)) => s,
            Ok(CyclicDetection::Primitive) => {
                failures.push(format!("{ctx}: planted matrix detected as primitive"));
                continue;
            }
            Err(e) => {
                failures.push(format!("{ctx}: detection failed: {e}"));
                continue;
            }
        };
        if structure.h != h {
            failures.push(format!("{ctx}: detected h = {} instead of {h}", structure.h));
            continue;
        }

        let basis: OrbitBasis = if diagonalizable {
            match build_orbit_basis(a, &structure, 1e-8) {
                Ok(b) => b,
                Err(e) => {
                    failures.push(format!("{ctx}: build_orbit_basis failed: {e}"));
                    continue;
                }
            }
        } else {
            let orbits = match instance.spectral_orbits() {
                Ok(o) => o,
                Err(e) => {
                    failures.push(format!("{ctx}: planted orbit rotation failed: {e}"));
                    continue;
                }
            };
            match OrbitBasis::from_parts(a, instance.partition.clone(), orbits, 1e-8) {
                Ok(b) => b,
                Err(e) => {
                    failures.push(format!("{ctx}: planted basis assembly failed: {e}"));
                    continue;
                }
            }
        };

        let mut components = Vec::with_capacity(basis.orbits.len());
        let mut route_failed = false;
        for orbit_index in 0..basis.orbits.len() {
            let via_similarity = match component_via_similarity(&basis, orbit_index) {
                Ok(c) => c,
                Err(e) => {
                    failures.push(format!("{ctx}: similarity route failed: {e}"));
                    route_failed = true;
                    break;
                }
            };
            let via_blocks =
                match component_via_blocks(&basis.orbits[orbit_index], &basis.partition) {
                    Ok(c) => c,
                    Err(e) => {
                        failures.push(format!("{ctx}: block route failed: {e}"));
                        route_failed = true;
                        break;
                    }
                };
            let difference = via_similarity.matrix.max_entry_diff(&via_blocks.matrix);
            if difference > 1e-8 * a_norm {
                failures.push(format!(
                    "{ctx}: orbit {orbit_index} route difference {difference:.3e} > {:.3e}",
                    1e-8 * a_norm
                ));
                route_failed = true;
                break;
            }
            components.push(via_similarity);
        }
        if route_failed {
            continue;
        }

        match verify_component_properties(a, &components, &structure, 1e-9) {
            Ok(report) if report.pass => {}
            Ok(report) => {
                failures.push(format!(
                    "{ctx}: property check failed (reconstruction {:.3e}/{:.3e})",
                    report.reconstruction.residual, report.reconstruction.tolerance
                ));
            }
            Err(e) => failures.push(format!("{ctx}: property check errored: {e}")),
        }
    }
    SuiteResult { name: "route_equivalence", cases, failures }
}

/// Theorem suite for nonnegative irreducible h-cyclic matrices: positive
/// Perron data, simple spectral radius, peripheral spectrum rho * Omega_h,
/// and omega-rotation invariance of the whole spectrum.
pub fn theorem_suite(seed: u64, cases: usize) -> SuiteResult {
    let mut failures = Vec::new();
    for case in 0..cases {
        let mut rng = case_rng(seed, 3, case);
        let h = rng.random_range(2..=4usize);
        let block_size = rng.random_range(1..=(24 / h).min(6));
        let a = random_nonnegative_cyclic(&mut rng, h, block_size);
        let ctx = format!("case {case} (seed {seed}, h={h}, block={block_size})");

        let pd = match perron_data(&a, 1e-9) {
            Ok(p) => p,
            Err(e) => {
                failures.push(format!("{ctx}: perron_data failed: {e}"));
                continue;
            }
        };
        if pd.spectral_radius <= 0.0 {
            failures.push(format!("{ctx}: rho = {} not positive", pd.spectral_radius));
            continue;
        }
        if pd.cyclic_index != h {
            failures.push(format!("{ctx}: cyclic index {} != {h}", pd.cyclic_index));
            continue;
        }
        let min_right = pd.right.entries().iter().map(|z| z.re).fold(f64::INFINITY, f64::min);
        let min_left = pd.left.entries().iter().map(|z| z.re).fold(f64::INFINITY, f64::min);
        if min_right <= 0.0 || min_left <= 0.0 {
            failures.push(format!(
                "{ctx}: Perron vectors not strictly positive (min {min_right:.3e}, {min_left:.3e})"
            ));
            continue;
        }

        // algebraic simplicity: exactly one eigenvalue near rho
        match crate::numeric::eigenvalues(&a) {
            Ok(spectrum) => {
                let near = spectrum
                    .iter()
                    .filter(|z| (*z - Complex64::new(pd.spectral_radius, 0.0)).norm()
                        <= 1e-6 * a.inf_norm())
                    .count();
                if near != 1 {
                    failures.push(format!("{ctx}: rho cluster has size {near}, expected 1"));
                    continue;
                }
            }
            Err(e) => {
                failures.push(format!("{ctx}: eigensolver failed: {e}"));
                continue;
            }
        }

        match check_peripheral_rotation(&a, h, 1e-8) {
            Ok(report) if report.pass => {
                if report.peripheral_count != h {
                    failures.push(format!(
                        "{ctx}: peripheral count {} != h = {h}",
                        report.peripheral_count
                    ));
                }
            }
            Ok(report) => {
                failures.push(format!(
                    "{ctx}: peripheral/rotation residuals {:.3e}/{:.3e} exceed {:.3e}",
                    report.peripheral_residual, report.rotation_residual, report.tolerance
                ));
            }
            Err(e) => failures.push(format!("{ctx}: peripheral check failed: {e}")),
        }
    }
    SuiteResult { name: "theorem_properties", cases, failures }
}

/// Perron component suite: on rho-normalized instances the component is
/// entrywise nonnegative, matches the similarity route on the Perron orbit,
/// and its h-th power has block-diagonal digraph.
pub fn perron_suite(seed: u64, cases: usize) -> SuiteResult {
    let mut failures = Vec::new();
    for case in 0..cases {
        let mut rng = case_rng(seed, 4, case);
        let h = rng.random_range(2..=4usize);
        let block_size = rng.random_range(1..=(24 / h).min(6));
        let raw = random_nonnegative_cyclic(&mut rng, h, block_size);
        let ctx = format!("case {case} (seed {seed}, h={h}, block={block_size})");

        let rho = match perron_data(&raw, 1e-9) {
            Ok(p) => p.spectral_radius,
            Err(e) => {
                failures.push(format!("{ctx}: perron_data failed: {e}"));
                continue;
            }
        };
        let a = raw.scale(Complex64::new(1.0 / rho, 0.0));
        let pd = match perron_data(&a, 1e-9) {
            Ok(p) => p,
            Err(e) => {
                failures.push(format!("{ctx}: scaled perron_data failed: {e}"));
                continue;
            }
        };
        let structure = match detect_cyclic_structure(&a, 0.0) {
            Ok(CyclicDetection::Cyclic(s)) => s,
            other => {
                failures.push(format!("{ctx}: detection surprise: {other:?}"));
                continue;
            }
        };
        let component = match perron_component(&a, &pd, &structure) {
            Ok(c) => c,
            Err(e) => {
                failures.push(format!("{ctx}: perron_component failed: {e}"));
                continue;
            }
        };
        let min_entry = component
            .matrix
            .entries()
            .iter()
            .map(|z| z.re)
            .fold(f64::INFINITY, f64::min);
        if min_entry < -1e-10 {
            failures.push(format!("{ctx}: component entry {min_entry:.3e} below -1e-10"));
            continue;
        }

        // tie back to the similarity route on the Perron orbit
        let basis = match build_orbit_basis(&a, &structure, 1e-8) {
            Ok(b) => b,
            Err(e) => {
                failures.push(format!("{ctx}: build_orbit_basis failed: {e}"));
                continue;
            }
        };
        let perron_orbit = basis
            .orbits
            .iter()
            .position(|o| (o.base_eigenvalue - Complex64::ONE).norm() < 1e-6);
        let Some(orbit_index) = perron_orbit else {
            failures.push(format!("{ctx}: no orbit with base 1 found"));
            continue;
        };
        match component_via_similarity(&basis, orbit_index) {
            Ok(similarity) => {
                let difference = component.matrix.max_entry_diff(&similarity.matrix);
                if difference > 1e-8 * a.inf_norm() {
                    failures.push(format!(
                        "{ctx}: Perron component differs from similarity route by {difference:.3e}"
                    ));
                    continue;
                }
            }
            Err(e) => {
                failures.push(format!("{ctx}: similarity route failed: {e}"));
                continue;
            }
        }

        // dg(A_1^h) is a disjoint union of blocks on the partition classes
        let mut power = component.matrix.clone();
        for _ in 1..h {
            power = power.mul(&component.matrix).expect("square");
        }
        let threshold = 1e-10 * power.inf_norm().max(1e-300);
        let n = a.rows();
        let mut off_diagonal_block = false;
        for i in 0..n {
            for j in 0..n {
                if power[(i, j)].norm() > threshold && i / block_size != j / block_size {
                    off_diagonal_block = true;
                }
            }
        }
        if off_diagonal_block {
            failures.push(format!("{ctx}: (A_1)^{h} has entries outside the diagonal blocks"));
        }
    }
    SuiteResult { name: "perron_component", cases, failures }
}

/// Runs all four suites with the given options.
pub fn run_all(options: &SelftestOptions) -> Vec<SuiteResult> {
    vec![
        chain_rotation_suite(options.seed, options.chain_cases),
        route_equivalence_suite(options.seed, options.decomposition_cases),
        theorem_suite(options.seed, options.theorem_cases),
        perron_suite(options.seed, options.perron_cases),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_selftest_passes() {
        let options = SelftestOptions {
            seed: 99,
            chain_cases: 5,
            decomposition_cases: 5,
            theorem_cases: 3,
            perron_cases: 3,
        };
        for suite in run_all(&options) {
            assert!(
                suite.passed(),
                "suite {} failed: {:?}",
                suite.name,
                suite.failures
            );
        }
    }
}

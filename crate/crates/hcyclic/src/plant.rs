//! Random instance generators with planted structure, used by the selftest
//! suites and the test corpus.
//!
//! The cyclic instances are produced by assembling a rotation-structured
//! basis Z from random base chains, forming A = Z J Z^{-1}, and truncating
//! the (provably zero) off-pattern entries. The rotation scaling here is
//! written out independently of the chain module, so a convention bug in
//! either place shows up as a large truncation residual or a failed chain
//! verification instead of cancelling out.

use num_complex::Complex64;
use rand::Rng;

use crate::chain::{rotate_all, ChainError, ChainSide, JordanChain, SpectralOrbit};
use crate::graph::{Digraph, OrderedPartition};
use crate::matrix::{direct_sum, orbit_jordan_form, ComplexMatrix, ComplexVector, RootsOfUnity};
use crate::numeric;

/// One planted orbit: the base eigenvalue, chain length, and the base right
/// and left chains (the left one read from Z^{-1}).
#[derive(Debug, Clone)]
pub struct PlantedOrbit {
    pub base_eigenvalue: Complex64,
    pub chain_length: usize,
    pub right_base: JordanChain,
    pub left_base: JordanChain,
}

/// A random h-cyclic matrix with fully known Jordan structure.
#[derive(Debug, Clone)]
pub struct PlantedInstance {
    /// Exactly h-cyclic: off-pattern entries are zeroed after assembly.
    pub matrix: ComplexMatrix,
    pub h: usize,
    pub block_size: usize,
    pub partition: OrderedPartition,
    pub z: ComplexMatrix,
    pub z_inv: ComplexMatrix,
    pub j: ComplexMatrix,
    pub orbits: Vec<PlantedOrbit>,
    /// Largest off-pattern entry removed during truncation.
    pub truncation_residual: f64,
}

impl PlantedInstance {
    pub fn dimension(&self) -> usize {
        self.h * self.block_size
    }

    /// Full rotation orbits (right chains only) built from the planted base
    /// chains via the library rotation.
    pub fn spectral_orbits(&self) -> Result<Vec<SpectralOrbit>, ChainError> {
        self.orbits
            .iter()
            .map(|o| rotate_all(&o.right_base, &self.partition))
            .collect()
    }
}

fn random_unit_complex(rng: &mut impl Rng) -> Complex64 {
    Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
}

/// Builds the rotated basis column for sub-block k from a base chain vector.
/// The scaling (omega^k)^{(ell - j) mod h} is written out locally on purpose;
/// see the module docs.
fn rotated_column(
    base: &ComplexVector,
    k: usize,
    chain_position: usize, // 1-based j
    block_size: usize,
    roots: &RootsOfUnity,
) -> ComplexVector {
    let mut out = base.clone();
    for (idx, entry) in out.entries_mut().iter_mut().enumerate() {
        let ell = (idx / block_size + 1) as i64; // 1-based block index
        let exponent = k as i64 * (ell - chain_position as i64);
        *entry *= roots.omega_pow(exponent);
    }
    out
}

/// Generates a random nonsingular h-cyclic matrix with the given chain
/// lengths (one orbit per entry). The matrix has dimension
/// h * sum(chain_lengths) and consecutive equal-size classes.
pub fn random_cyclic_instance(
    rng: &mut impl Rng,
    h: usize,
    chain_lengths: &[usize],
) -> PlantedInstance {
    assert!(h >= 2, "planted instances need h >= 2");
    assert!(!chain_lengths.is_empty());
    let block_size: usize = chain_lengths.iter().sum();
    let n = h * block_size;
    let roots = RootsOfUnity::new(h).expect("h >= 2");
    let partition = OrderedPartition::new(
        (0..h)
            .map(|ell| (ell * block_size..(ell + 1) * block_size).collect())
            .collect(),
    )
    .expect("consecutive classes are disjoint");

    // distinct moduli keep orbits well separated from each other and the
    // in-orbit gap is at least |lambda| * |1 - omega|
    'resample: loop {
        let mut base_eigenvalues = Vec::with_capacity(chain_lengths.len());
        for (idx, _) in chain_lengths.iter().enumerate() {
            let modulus = 1.0 + 0.75 * idx as f64;
            let theta = rng.random_range(0.0..std::f64::consts::TAU);
            base_eigenvalues.push(Complex64::from_polar(modulus, theta));
        }

        let mut z = ComplexMatrix::zeros(n, n);
        let mut j_blocks = Vec::with_capacity(chain_lengths.len());
        let mut base_right: Vec<Vec<ComplexVector>> = Vec::with_capacity(chain_lengths.len());
        let mut column = 0;
        for (orbit_idx, &r) in chain_lengths.iter().enumerate() {
            let base_vectors: Vec<ComplexVector> = (0..r)
                .map(|_| ComplexVector::new((0..n).map(|_| random_unit_complex(rng)).collect()))
                .collect();
            for k in 0..h {
                for (j_pos, base) in base_vectors.iter().enumerate() {
                    let rotated = rotated_column(base, k, j_pos + 1, block_size, &roots);
                    z.set_column(column, &rotated);
                    column += 1;
                }
            }
            j_blocks.push(
                orbit_jordan_form(base_eigenvalues[orbit_idx], r, h).expect("h >= 2"),
            );
            base_right.push(base_vectors);
        }
        let j = direct_sum(&j_blocks).expect("square blocks");

        let z_inv = match numeric::inverse(&z) {
            Ok(inv) => inv,
            Err(_) => continue 'resample,
        };
        if z.inf_norm() * z_inv.inf_norm() > 1e4 {
            continue 'resample;
        }

        let raw = z
            .mul(&j)
            .expect("dimensions agree")
            .mul(&z_inv)
            .expect("dimensions agree");

        // truncate the off-pattern entries, which are zero in exact arithmetic
        let mut matrix = raw.clone();
        let mut truncation_residual: f64 = 0.0;
        for i in 0..n {
            for jj in 0..n {
                let class_i = i / block_size;
                let class_j = jj / block_size;
                if class_j != (class_i + 1) % h {
                    truncation_residual = truncation_residual.max(matrix[(i, jj)].norm());
                    matrix[(i, jj)] = Complex64::ZERO;
                }
            }
        }
        if truncation_residual > 1e-8 * raw.inf_norm() {
            // conditioning spoiled the pattern; try a fresh draw
            continue 'resample;
        }

        let mut orbits = Vec::with_capacity(chain_lengths.len());
        let mut offset = 0;
        for (orbit_idx, &r) in chain_lengths.iter().enumerate() {
            let right_base = JordanChain::new(
                ChainSide::Right,
                base_eigenvalues[orbit_idx],
                base_right[orbit_idx].clone(),
            )
            .expect("nonempty chain");
            let left_vectors: Vec<ComplexVector> =
                (0..r).map(|j_pos| z_inv.row(offset + j_pos)).collect();
            let left_base =
                JordanChain::new(ChainSide::Left, base_eigenvalues[orbit_idx], left_vectors)
                    .expect("nonempty chain");
            orbits.push(PlantedOrbit {
                base_eigenvalue: base_eigenvalues[orbit_idx],
                chain_length: r,
                right_base,
                left_base,
            });
            offset += h * r;
        }

        return PlantedInstance {
            matrix,
            h,
            block_size,
            partition,
            z,
            z_inv,
            j,
            orbits,
            truncation_residual,
        };
    }
}

/// Random nonnegative irreducible h-cyclic matrix with the full block
/// pattern: every allowed entry is drawn from [0.2, 1.2], so the digraph is
/// exactly the characteristic pattern and the cyclic index is exactly h.
pub fn random_nonnegative_cyclic(
    rng: &mut impl Rng,
    h: usize,
    block_size: usize,
) -> ComplexMatrix {
    assert!(h >= 2 && block_size >= 1);
    let n = h * block_size;
    let mut matrix = ComplexMatrix::zeros(n, n);
    for i in 0..n {
        let class_i = i / block_size;
        let target = (class_i + 1) % h;
        for j in target * block_size..(target + 1) * block_size {
            matrix[(i, j)] = Complex64::new(rng.random_range(0.2..1.2), 0.0);
        }
    }
    matrix
}

/// Random strongly connected digraph built around a covering closed walk
/// through `classes` cyclic classes, plus extra class-respecting arcs. All
/// closed-walk lengths are multiples of `classes`, so the period is a
/// multiple of it; with `classes` = 1 the graph is unrestricted.
pub fn random_strong_digraph(rng: &mut impl Rng, n: usize, classes: usize) -> Digraph {
    assert!(n >= 1 && classes >= 1 && classes <= n);
    // random composition of n into `classes` positive parts
    let mut sizes = vec![1usize; classes];
    for _ in 0..(n - classes) {
        let idx = rng.random_range(0..classes);
        sizes[idx] += 1;
    }
    // random vertex labels per class
    let mut labels: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        let j = rng.random_range(0..=i);
        labels.swap(i, j);
    }
    let mut class_members: Vec<Vec<usize>> = Vec::with_capacity(classes);
    let mut cursor = 0;
    for &s in &sizes {
        class_members.push(labels[cursor..cursor + s].to_vec());
        cursor += s;
    }

    let mut arcs = Vec::new();
    // covering closed walk: rounds * classes steps, visiting classes in
    // cyclic order and sweeping through every member of each class
    let rounds = sizes.iter().copied().max().expect("nonempty");
    let mut previous: Option<usize> = None;
    let mut first: Option<usize> = None;
    for t in 0..rounds {
        for (ell, members) in class_members.iter().enumerate() {
            let v = members[t % sizes[ell]];
            if let Some(u) = previous {
                arcs.push((u, v));
            } else {
                first = Some(v);
            }
            previous = Some(v);
        }
    }
    arcs.push((previous.expect("walk nonempty"), first.expect("walk nonempty")));

    // extra class-respecting arcs
    let density = rng.random_range(0.05..0.4);
    for (ell, members) in class_members.iter().enumerate() {
        let next = &class_members[(ell + 1) % classes];
        for &u in members {
            for &v in next {
                if rng.random_bool(density) {
                    arcs.push((u, v));
                }
            }
        }
    }

    Digraph::new(n, arcs).expect("arcs in range")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::verify_chain;
    use crate::graph::{detect_cyclic_structure, is_strongly_connected, CyclicDetection};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn planted_instance_is_exactly_cyclic() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let instance = random_cyclic_instance(&mut rng, 3, &[1, 2]);
        assert_eq!(instance.dimension(), 9);
        assert!(instance.truncation_residual < 1e-9 * instance.matrix.inf_norm());
        match detect_cyclic_structure(&instance.matrix, 0.0).unwrap() {
            CyclicDetection::Cyclic(s) => {
                assert_eq!(s.h, 3);
                assert_eq!(s.partition, instance.partition);
            }
            CyclicDetection::Primitive => panic!("planted instance must be cyclic"),
        }
    }

    #[test]
    fn planted_chains_verify_against_the_matrix() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let instance = random_cyclic_instance(&mut rng, 2, &[2]);
        for orbit in &instance.orbits {
            let tol = 1e-9
                * instance.matrix.inf_norm()
                * orbit.right_base.max_vector_norm().max(1.0);
            let report = verify_chain(&instance.matrix, &orbit.right_base, tol).unwrap();
            assert!(report.pass, "right residuals {:?}", report.residuals);
            let tol = 1e-9
                * instance.matrix.inf_norm()
                * orbit.left_base.max_vector_norm().max(1.0);
            let report = verify_chain(&instance.matrix, &orbit.left_base, tol).unwrap();
            assert!(report.pass, "left residuals {:?}", report.residuals);
        }
    }

    #[test]
    fn nonnegative_instance_has_exact_index() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let a = random_nonnegative_cyclic(&mut rng, 4, 2);
        match detect_cyclic_structure(&a, 0.0).unwrap() {
            CyclicDetection::Cyclic(s) => assert_eq!(s.h, 4),
            CyclicDetection::Primitive => panic!("full pattern has index 4"),
        }
    }

    #[test]
    fn random_digraphs_are_strongly_connected() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..50 {
            let n = rng.random_range(1..=8);
            let classes = rng.random_range(1..=n);
            let g = random_strong_digraph(&mut rng, n, classes);
            assert!(is_strongly_connected(&g), "n={n} classes={classes}");
        }
    }
}

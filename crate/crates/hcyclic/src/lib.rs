//! Detection and exploitation of h-cyclic structure in complex matrices.
//!
//! The crate detects cyclically h-partite digraph structure, rotates Jordan
//! chains across the eigenvalue orbit {lambda * omega^k}, builds the
//! commuting spectral component matrices A_lambda by two independent routes,
//! and verifies the structural properties these constructions promise,
//! including the Perron-Frobenius consequences for nonnegative irreducible
//! imprimitive matrices.

pub mod analyze;
pub mod chain;
pub mod graph;
pub mod io;
pub mod matrix;
pub mod numeric;
pub mod perron;
pub mod plant;
pub mod report;
pub mod selftest;
pub mod spectral;

pub use chain::{
    alpha, rotate_all, rotate_chain, rotate_left_chain, rotate_right_chain, verify_chain,
    ChainError, ChainResidualReport, ChainSide, JordanChain, SpectralOrbit,
};
pub use graph::{
    build_digraph, consecutive_permutation, cyclic_characteristic_matrix, default_zero_tol,
    detect_cyclic_structure, digraph_contained_in, find_cyclic_partition, index_of_imprimitivity,
    is_strongly_connected, CyclicDetection, CyclicStructure, Digraph, GraphError, OrderedPartition,
};
pub use matrix::{
    circulant, circulant_rotation_matrix, cycle_matrix, direct_sum, hadamard, jordan_block,
    orbit_jordan_form, ComplexMatrix, ComplexVector, MatrixError, RootsOfUnity,
};
pub use perron::{
    check_peripheral_rotation, is_nonnegative_irreducible, perron_component, perron_data,
    PeripheralReport, PerronData, PerronError,
};
pub use spectral::{
    build_orbit_basis, component_via_blocks, component_via_similarity, eigendecompose,
    jordan_chains_for, verify_component_properties, ComponentMatrix, ComponentPropertyReport,
    OrbitBasis, SpectralError,
};

//! Combinatorial structure of a matrix: its digraph, strong connectivity,
//! index of imprimitivity, cyclic partitions, and the cyclic characteristic
//! matrix.
//!
//! Vertices are 0-based throughout the API; reports and CLI output render
//! them 1-based.

use std::collections::BTreeSet;
use std::collections::VecDeque;

use num_complex::Complex64;

use crate::matrix::ComplexMatrix;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GraphError {
    #[error("digraph of a matrix requires a square matrix, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("arc ({from}, {to}) out of range for {vertex_count} vertices")]
    ArcOutOfRange { from: usize, to: usize, vertex_count: usize },
    #[error("digraph must have at least one vertex")]
    NoVertices,
    #[error("digraph is not strongly connected")]
    NotStronglyConnected,
    #[error("index of imprimitivity is undefined: no closed walk exists")]
    AperiodicUndefined,
    #[error("h = {h} does not divide the index of imprimitivity {index}")]
    IndexNotDivisible { h: usize, index: usize },
    #[error("h must be at least 2, got {h}")]
    OrderTooSmall { h: usize },
    #[error("partition classes must be nonempty")]
    EmptyClass,
    #[error("vertex {vertex} appears in more than one partition class")]
    OverlappingClasses { vertex: usize },
    #[error("partition covers {covered} vertices but the matrix has {expected}")]
    IncompleteCover { covered: usize, expected: usize },
    #[error("partition vertex {vertex} out of range for n = {n}")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("dimension mismatch: {left_rows}x{left_cols} vs {right_rows}x{right_cols}")]
    DimensionMismatch {
        left_rows: usize,
        left_cols: usize,
        right_rows: usize,
        right_cols: usize,
    },
    #[error("matrix is reducible; cyclic structure detection targets the irreducible case")]
    Reducible,
}

/// Directed graph on vertices 0..vertex_count with a duplicate-free arc set.
#[derive(Debug, Clone, PartialEq)]
pub struct Digraph {
    vertex_count: usize,
    arcs: BTreeSet<(usize, usize)>,
}

impl Digraph {
    pub fn new(
        vertex_count: usize,
        arcs: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self, GraphError> {
        if vertex_count == 0 {
            return Err(GraphError::NoVertices);
        }
        let mut set = BTreeSet::new();
        for (from, to) in arcs {
            if from >= vertex_count || to >= vertex_count {
                return Err(GraphError::ArcOutOfRange { from, to, vertex_count });
            }
            set.insert((from, to));
        }
        Ok(Self { vertex_count, arcs: set })
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn arc_count(&self) -> usize {
        self.arcs.len()
    }

    pub fn has_arc(&self, from: usize, to: usize) -> bool {
        self.arcs.contains(&(from, to))
    }

    pub fn arcs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.arcs.iter().copied()
    }

    /// Adjacency lists in vertex order.
    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.vertex_count];
        for &(u, v) in &self.arcs {
            adj[u].push(v);
        }
        adj
    }

    fn reverse_adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.vertex_count];
        for &(u, v) in &self.arcs {
            adj[v].push(u);
        }
        adj
    }

    /// 0/1 adjacency matrix.
    pub fn adjacency_matrix(&self) -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(self.vertex_count, self.vertex_count);
        for &(u, v) in &self.arcs {
            m[(u, v)] = Complex64::ONE;
        }
        m
    }
}

/// Ordered partition (pi_1, ..., pi_h) of an index set; classes are kept
/// sorted ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct OrderedPartition {
    classes: Vec<Vec<usize>>,
}

impl OrderedPartition {
    pub fn new(classes: Vec<Vec<usize>>) -> Result<Self, GraphError> {
        let mut seen = BTreeSet::new();
        for class in &classes {
            if class.is_empty() {
                return Err(GraphError::EmptyClass);
            }
            for &v in class {
                if !seen.insert(v) {
                    return Err(GraphError::OverlappingClasses { vertex: v });
                }
            }
        }
        let mut classes = classes;
        for class in &mut classes {
            class.sort_unstable();
        }
        Ok(Self { classes })
    }

    pub fn class_count(&self) -> usize {
        self.classes.len()
    }

    pub fn classes(&self) -> &[Vec<usize>] {
        &self.classes
    }

    pub fn class(&self, ell: usize) -> &[usize] {
        &self.classes[ell]
    }

    pub fn total_len(&self) -> usize {
        self.classes.iter().map(|c| c.len()).sum()
    }

    /// Class index of a vertex, if covered.
    pub fn class_of(&self, vertex: usize) -> Option<usize> {
        self.classes.iter().position(|c| c.binary_search(&vertex).is_ok())
    }

    /// Checks the partition covers exactly {0..n}.
    pub fn validate_cover(&self, n: usize) -> Result<(), GraphError> {
        for class in &self.classes {
            for &v in class {
                if v >= n {
                    return Err(GraphError::VertexOutOfRange { vertex: v, n });
                }
            }
        }
        let covered = self.total_len();
        if covered != n {
            return Err(GraphError::IncompleteCover { covered, expected: n });
        }
        Ok(())
    }

    /// True iff classes are consecutive index ranges in order.
    pub fn is_consecutive(&self) -> bool {
        let mut next = 0;
        for class in &self.classes {
            for &v in class {
                if v != next {
                    return false;
                }
                next += 1;
            }
        }
        true
    }
}

/// The detected h-cyclic structure of a matrix.
#[derive(Debug, Clone)]
pub struct CyclicStructure {
    pub h: usize,
    pub partition: OrderedPartition,
    /// `consecutive_permutation[p]` is the original index placed at position
    /// `p`; applying it symmetrically brings the matrix to consecutive block
    /// form.
    pub consecutive_permutation: Vec<usize>,
    /// The 0/1 cyclic characteristic matrix of the partition.
    pub characteristic: ComplexMatrix,
}

/// Outcome of cyclic structure detection on an irreducible matrix.
#[derive(Debug, Clone)]
pub enum CyclicDetection {
    /// Index of imprimitivity is 1: no h-cyclic structure for h >= 2.
    Primitive,
    Cyclic(CyclicStructure),
}

/// Digraph of a matrix: arc (i, j) present iff |a_ij| > zero_tol.
pub fn build_digraph(a: &ComplexMatrix, zero_tol: f64) -> Result<Digraph, GraphError> {
    if !a.is_square() {
        return Err(GraphError::NotSquare { rows: a.rows(), cols: a.cols() });
    }
    let n = a.rows();
    let mut arcs = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if a[(i, j)].norm() > zero_tol {
                arcs.push((i, j));
            }
        }
    }
    Digraph::new(n, arcs)
}

fn reachable_from(start: usize, adj: &[Vec<usize>]) -> Vec<bool> {
    let mut seen = vec![false; adj.len()];
    let mut queue = VecDeque::from([start]);
    seen[start] = true;
    while let Some(u) = queue.pop_front() {
        for &v in &adj[u] {
            if !seen[v] {
                seen[v] = true;
                queue.push_back(v);
            }
        }
    }
    seen
}

/// True iff every ordered vertex pair is joined by a walk. A single vertex
/// counts as strongly connected regardless of arcs.
pub fn is_strongly_connected(g: &Digraph) -> bool {
    if g.vertex_count() == 1 {
        return true;
    }
    let forward = reachable_from(0, &g.adjacency());
    if !forward.iter().all(|&r| r) {
        return false;
    }
    let backward = reachable_from(0, &g.reverse_adjacency());
    backward.iter().all(|&r| r)
}

/// BFS distance labels from `root`; panics unless the graph is connected
/// from the root.
fn bfs_distances(g: &Digraph, root: usize) -> Vec<usize> {
    let adj = g.adjacency();
    let mut dist = vec![usize::MAX; g.vertex_count()];
    let mut queue = VecDeque::from([root]);
    dist[root] = 0;
    while let Some(u) = queue.pop_front() {
        for &v in &adj[u] {
            if dist[v] == usize::MAX {
                dist[v] = dist[u] + 1;
                queue.push_back(v);
            }
        }
    }
    dist
}

/// Index of imprimitivity: the gcd of all closed-walk lengths, computed from
/// BFS distance labels as gcd over arcs (u, v) of |d(u) + 1 - d(v)|, skipping
/// zero contributions.
pub fn index_of_imprimitivity(g: &Digraph) -> Result<usize, GraphError> {
    if !is_strongly_connected(g) {
        return Err(GraphError::NotStronglyConnected);
    }
    if g.arc_count() == 0 {
        // single vertex without a loop: no closed walk at all
        return Err(GraphError::AperiodicUndefined);
    }
    let dist = bfs_distances(g, 0);
    let mut gcd_acc: usize = 0;
    for (u, v) in g.arcs() {
        let contribution = (dist[u] as i64 + 1 - dist[v] as i64).unsigned_abs() as usize;
        if contribution != 0 {
            gcd_acc = gcd(gcd_acc, contribution);
        }
    }
    debug_assert!(gcd_acc > 0, "strongly connected digraph with arcs has a closed walk");
    Ok(gcd_acc)
}

fn gcd(a: usize, b: usize) -> usize {
    if a == 0 {
        b
    } else {
        gcd(b % a, a)
    }
}

/// The cyclic partition with pi_ell = {v : d(v) = ell - 1 (mod h)} for BFS
/// distances from vertex 0, so pi_1 contains the lowest-numbered vertex.
pub fn find_cyclic_partition(g: &Digraph, h: usize) -> Result<OrderedPartition, GraphError> {
    if h < 2 {
        return Err(GraphError::OrderTooSmall { h });
    }
    let index = index_of_imprimitivity(g)?;
    if index % h != 0 {
        return Err(GraphError::IndexNotDivisible { h, index });
    }
    let dist = bfs_distances(g, 0);
    let mut classes = vec![Vec::new(); h];
    for (v, &d) in dist.iter().enumerate() {
        classes[d % h].push(v);
    }
    OrderedPartition::new(classes)
}

/// The cyclic characteristic matrix chi_Pi: entry (i, j) is 1 iff i is in
/// pi_ell and j is in pi_{ell+1} (indices mod h).
pub fn cyclic_characteristic_matrix(
    p: &OrderedPartition,
    n: usize,
) -> Result<ComplexMatrix, GraphError> {
    p.validate_cover(n)?;
    let h = p.class_count();
    let mut class_of = vec![0usize; n];
    for (ell, class) in p.classes().iter().enumerate() {
        for &v in class {
            class_of[v] = ell;
        }
    }
    let mut chi = ComplexMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            if class_of[j] == (class_of[i] + 1) % h {
                chi[(i, j)] = Complex64::ONE;
            }
        }
    }
    Ok(chi)
}

/// True iff every entry of `a` with modulus above `zero_tol` sits at a
/// position where `chi` has a one.
pub fn digraph_contained_in(
    a: &ComplexMatrix,
    chi: &ComplexMatrix,
    zero_tol: f64,
) -> Result<bool, GraphError> {
    if a.rows() != chi.rows() || a.cols() != chi.cols() {
        return Err(GraphError::DimensionMismatch {
            left_rows: a.rows(),
            left_cols: a.cols(),
            right_rows: chi.rows(),
            right_cols: chi.cols(),
        });
    }
    for i in 0..a.rows() {
        for j in 0..a.cols() {
            if a[(i, j)].norm() > zero_tol && chi[(i, j)].norm() < 0.5 {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Permutation bringing a partition to consecutive form: class pi_1 lands at
/// the leading positions (ascending within each class), then pi_2, and so on.
/// Entry `p` of the result is the original index placed at position `p`.
pub fn consecutive_permutation(p: &OrderedPartition) -> Vec<usize> {
    let mut order = Vec::with_capacity(p.total_len());
    for class in p.classes() {
        order.extend_from_slice(class);
    }
    order
}

/// Full detection pipeline for an irreducible matrix: index of
/// imprimitivity, partition, consecutive permutation, and characteristic
/// matrix. Primitive matrices (h = 1) are reported as a distinct non-error
/// outcome; reducible matrices are rejected.
pub fn detect_cyclic_structure(
    a: &ComplexMatrix,
    zero_tol: f64,
) -> Result<CyclicDetection, GraphError> {
    let g = build_digraph(a, zero_tol)?;
    if !is_strongly_connected(&g) {
        return Err(GraphError::Reducible);
    }
    let h = index_of_imprimitivity(&g)?;
    if h == 1 {
        return Ok(CyclicDetection::Primitive);
    }
    let partition = find_cyclic_partition(&g, h)?;
    let permutation = consecutive_permutation(&partition);
    let characteristic = cyclic_characteristic_matrix(&partition, a.rows())?;
    Ok(CyclicDetection::Cyclic(CyclicStructure {
        h,
        partition,
        consecutive_permutation: permutation,
        characteristic,
    }))
}

/// Default pattern tolerance: scale-invariant for floating data, zero for an
/// all-zero matrix.
pub fn default_zero_tol(a: &ComplexMatrix) -> f64 {
    1e-12 * a.max_abs()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::cycle_matrix;

    fn k3_digraph() -> Digraph {
        Digraph::new(3, [(0, 1), (1, 2), (2, 0)]).unwrap()
    }

    #[test]
    fn build_digraph_zero_matrix() {
        let g = build_digraph(&ComplexMatrix::zeros(3, 3), 0.0).unwrap();
        assert_eq!(g.arc_count(), 0);
    }

    #[test]
    fn build_digraph_k3() {
        let g = build_digraph(&cycle_matrix(3).unwrap(), 0.0).unwrap();
        assert_eq!(g, k3_digraph());
    }

    #[test]
    fn build_digraph_rejects_non_square() {
        assert!(matches!(
            build_digraph(&ComplexMatrix::zeros(2, 3), 0.0),
            Err(GraphError::NotSquare { .. })
        ));
    }

    #[test]
    fn single_vertex_is_strongly_connected() {
        let g = Digraph::new(1, []).unwrap();
        assert!(is_strongly_connected(&g));
    }

    #[test]
    fn strong_connectivity_basic_cases() {
        assert!(is_strongly_connected(&k3_digraph()));
        let g = Digraph::new(2, [(0, 1)]).unwrap();
        assert!(!is_strongly_connected(&g));
    }

    #[test]
    fn index_of_k3_is_three() {
        assert_eq!(index_of_imprimitivity(&k3_digraph()).unwrap(), 3);
    }

    #[test]
    fn loop_makes_index_one() {
        let g = Digraph::new(3, [(0, 1), (1, 2), (2, 0), (0, 0)]).unwrap();
        assert_eq!(index_of_imprimitivity(&g).unwrap(), 1);
    }

    #[test]
    fn index_undefined_without_closed_walk() {
        let g = Digraph::new(1, []).unwrap();
        assert!(matches!(
            index_of_imprimitivity(&g),
            Err(GraphError::AperiodicUndefined)
        ));
    }

    #[test]
    fn index_rejects_disconnected() {
        let g = Digraph::new(2, [(0, 1)]).unwrap();
        assert!(matches!(
            index_of_imprimitivity(&g),
            Err(GraphError::NotStronglyConnected)
        ));
    }

    #[test]
    fn partition_of_k3() {
        let p = find_cyclic_partition(&k3_digraph(), 3).unwrap();
        assert_eq!(p.classes(), &[vec![0], vec![1], vec![2]]);
    }

    #[test]
    fn partition_rejects_non_divisor() {
        assert!(matches!(
            find_cyclic_partition(&k3_digraph(), 2),
            Err(GraphError::IndexNotDivisible { h: 2, index: 3 })
        ));
    }

    #[test]
    fn characteristic_of_singletons_is_cycle_matrix() {
        let p = OrderedPartition::new(vec![vec![0], vec![1], vec![2]]).unwrap();
        let chi = cyclic_characteristic_matrix(&p, 3).unwrap();
        assert!(chi.entrywise_close(&cycle_matrix(3).unwrap(), 0.0));
    }

    #[test]
    fn characteristic_two_class_example() {
        // ({1,2},{3}) with n=3: rows 1,2 have a one only in column 3; row 3
        // has ones in columns 1,2 (1-based description).
        let p = OrderedPartition::new(vec![vec![0, 1], vec![2]]).unwrap();
        let chi = cyclic_characteristic_matrix(&p, 3).unwrap();
        let expected =
            ComplexMatrix::from_real(3, 3, &[0., 0., 1., 0., 0., 1., 1., 1., 0.]).unwrap();
        assert!(chi.entrywise_close(&expected, 0.0));
    }

    #[test]
    fn containment_reflexive_and_diagonal_fails() {
        let p = OrderedPartition::new(vec![vec![0, 1], vec![2, 3], vec![4, 5]]).unwrap();
        let chi = cyclic_characteristic_matrix(&p, 6).unwrap();
        assert!(digraph_contained_in(&chi, &chi, 0.0).unwrap());
        let id = ComplexMatrix::identity(6);
        assert!(!digraph_contained_in(&id, &chi, 0.0).unwrap());
    }

    #[test]
    fn containment_rejects_shape_mismatch() {
        let a = ComplexMatrix::zeros(2, 2);
        let chi = ComplexMatrix::zeros(3, 3);
        assert!(matches!(
            digraph_contained_in(&a, &chi, 0.0),
            Err(GraphError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn consecutive_permutation_cases() {
        let already = OrderedPartition::new(vec![vec![0], vec![1], vec![2]]).unwrap();
        assert_eq!(consecutive_permutation(&already), vec![0, 1, 2]);

        // ({3},{1},{2}) 1-based is ({2},{0},{1}) 0-based
        let p = OrderedPartition::new(vec![vec![2], vec![0], vec![1]]).unwrap();
        assert_eq!(consecutive_permutation(&p), vec![2, 0, 1]);

        // ({2,4},{1,3}) 1-based -> order (2,4,1,3)
        let p = OrderedPartition::new(vec![vec![1, 3], vec![0, 2]]).unwrap();
        assert_eq!(consecutive_permutation(&p), vec![1, 3, 0, 2]);
    }

    #[test]
    fn detect_k4() {
        let k4 = cycle_matrix(4).unwrap();
        match detect_cyclic_structure(&k4, 0.0).unwrap() {
            CyclicDetection::Cyclic(s) => {
                assert_eq!(s.h, 4);
                assert_eq!(s.partition.classes(), &[vec![0], vec![1], vec![2], vec![3]]);
            }
            CyclicDetection::Primitive => panic!("K_4 is 4-cyclic"),
        }
    }

    #[test]
    fn detect_all_ones_is_primitive() {
        let ones = ComplexMatrix::from_fn(3, 3, |_, _| Complex64::ONE);
        assert!(matches!(
            detect_cyclic_structure(&ones, 0.0).unwrap(),
            CyclicDetection::Primitive
        ));
    }

    #[test]
    fn detect_rejects_reducible() {
        let upper = ComplexMatrix::from_real(2, 2, &[1.0, 1.0, 0.0, 1.0]).unwrap();
        assert!(matches!(
            detect_cyclic_structure(&upper, 0.0),
            Err(GraphError::Reducible)
        ));
    }

    #[test]
    fn partition_validation() {
        assert!(matches!(
            OrderedPartition::new(vec![vec![0], vec![]]),
            Err(GraphError::EmptyClass)
        ));
        assert!(matches!(
            OrderedPartition::new(vec![vec![0, 1], vec![1]]),
            Err(GraphError::OverlappingClasses { vertex: 1 })
        ));
        let p = OrderedPartition::new(vec![vec![0], vec![1]]).unwrap();
        assert!(matches!(
            p.validate_cover(3),
            Err(GraphError::IncompleteCover { covered: 2, expected: 3 })
        ));
    }
}

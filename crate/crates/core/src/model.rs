//! Graphs, pure matrices, evaluation pairs and their connected pieces.

use std::collections::VecDeque;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::{gcd, lcm};
use crate::cyclotomic::{CycNum, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("magnitude must be non-negative")]
    NegativeMagnitude,
    #[error("root order must be positive")]
    ZeroOrder,
    #[error("matrix is not symmetric at ({0}, {1})")]
    Asymmetric(usize, usize),
    #[error("index {index} out of range for size {size}")]
    OutOfRange { index: usize, size: usize },
    #[error("edge multiplicity must be at least 1")]
    ZeroMultiplicity,
    #[error("expected {expected} entries, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("not a permutation")]
    NotPermutation,
}

/// A value `magnitude * ω_order^exp`, kept with `exp/order` in lowest terms.
/// Zero is stored as `(0, 1, 0)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PureEntry {
    magnitude: Rational,
    root_order: u64,
    root_exp: u64,
}

impl PureEntry {
    pub fn new(magnitude: Rational, root_order: u64, root_exp: u64) -> Result<Self, ModelError> {
        if magnitude.is_negative() {
            return Err(ModelError::NegativeMagnitude);
        }
        if root_order == 0 {
            return Err(ModelError::ZeroOrder);
        }
        if magnitude.is_zero() {
            return Ok(Self::zero());
        }
        let k = root_exp % root_order;
        let g = gcd(k, root_order);
        let (n, k) = if k == 0 { (1, 0) } else { (root_order / g, k / g) };
        Ok(PureEntry {
            magnitude,
            root_order: n,
            root_exp: k,
        })
    }

    /// Accept a signed rational, folding a negative sign into the root part.
    pub fn from_signed(value: Rational, root_order: u64, root_exp: u64) -> Result<Self, ModelError> {
        if value.is_negative() {
            if root_order == 0 {
                return Err(ModelError::ZeroOrder);
            }
            let n = lcm(root_order, 2);
            let k = root_exp % root_order * (n / root_order) + n / 2;
            Self::new(-value, n, k)
        } else {
            Self::new(value, root_order, root_exp)
        }
    }

    pub fn zero() -> Self {
        PureEntry {
            magnitude: Rational::zero(),
            root_order: 1,
            root_exp: 0,
        }
    }

    pub fn rational(r: Rational) -> Result<Self, ModelError> {
        Self::from_signed(r, 1, 0)
    }

    pub fn is_zero(&self) -> bool {
        self.magnitude.is_zero()
    }

    pub fn magnitude(&self) -> &Rational {
        &self.magnitude
    }

    pub fn root_order(&self) -> u64 {
        self.root_order
    }

    pub fn root_exp(&self) -> u64 {
        self.root_exp
    }

    /// Exponent of the root part with respect to `ω_l`; `l` must be a multiple of the order.
    pub fn exponent_in(&self, l: u64) -> u64 {
        debug_assert_eq!(l % self.root_order, 0);
        self.root_exp * (l / self.root_order)
    }

    pub fn to_cycnum(&self, conductor: u64) -> CycNum {
        assert_eq!(conductor % self.root_order, 0, "conductor must be a multiple of the root order");
        CycNum::root(conductor, self.exponent_in(conductor)).scale(&self.magnitude)
    }
}

/// A symmetric matrix of pure entries, stored row-major.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PureMatrix {
    dim: usize,
    entries: Vec<PureEntry>,
}

impl PureMatrix {
    pub fn new(dim: usize, entries: Vec<PureEntry>) -> Result<Self, ModelError> {
        if entries.len() != dim * dim {
            return Err(ModelError::DimensionMismatch {
                expected: dim * dim,
                got: entries.len(),
            });
        }
        for i in 0..dim {
            for j in i + 1..dim {
                if entries[i * dim + j] != entries[j * dim + i] {
                    return Err(ModelError::Asymmetric(i, j));
                }
            }
        }
        Ok(PureMatrix { dim, entries })
    }

    pub fn from_rows(rows: Vec<Vec<PureEntry>>) -> Result<Self, ModelError> {
        let dim = rows.len();
        let mut entries = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(ModelError::DimensionMismatch {
                    expected: dim,
                    got: row.len(),
                });
            }
            entries.extend(row);
        }
        Self::new(dim, entries)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> &PureEntry {
        &self.entries[i * self.dim + j]
    }

    /// The lcm of all root orders; every entry lives in `Q(ω_L)` for this `L`.
    pub fn working_conductor(&self) -> u64 {
        self.entries.iter().fold(1, |acc, e| lcm(acc, e.root_order()))
    }

    pub fn submatrix(&self, idx: &[usize]) -> PureMatrix {
        let k = idx.len();
        let mut entries = Vec::with_capacity(k * k);
        for &i in idx {
            for &j in idx {
                entries.push(self.get(i, j).clone());
            }
        }
        PureMatrix { dim: k, entries }
    }

    /// `P A P^T` where row `i` of the result is row `perm[i]` of `A`.
    pub fn permuted(&self, perm: &Permutation) -> PureMatrix {
        self.submatrix(perm.images())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub mult: u64,
}

/// An undirected multigraph; self-loops allowed, each counting twice towards a degree.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct MultiGraph {
    n: usize,
    edges: Vec<Edge>,
}

impl MultiGraph {
    pub fn new(n: usize) -> Self {
        MultiGraph { n, edges: Vec::new() }
    }

    pub fn add_edge(&mut self, u: usize, v: usize, mult: u64) -> Result<(), ModelError> {
        for x in [u, v] {
            if x >= self.n {
                return Err(ModelError::OutOfRange { index: x, size: self.n });
            }
        }
        if mult == 0 {
            return Err(ModelError::ZeroMultiplicity);
        }
        let (u, v) = if u <= v { (u, v) } else { (v, u) };
        self.edges.push(Edge { u, v, mult });
        Ok(())
    }

    pub fn with_edges(n: usize, edges: &[(usize, usize, u64)]) -> Result<Self, ModelError> {
        let mut g = MultiGraph::new(n);
        for &(u, v, m) in edges {
            g.add_edge(u, v, m)?;
        }
        Ok(g)
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Number of edges counted with multiplicity.
    pub fn total_multiplicity(&self) -> u64 {
        self.edges.iter().map(|e| e.mult).sum()
    }

    pub fn degrees(&self) -> Vec<u64> {
        let mut d = vec![0u64; self.n];
        for e in &self.edges {
            d[e.u] += e.mult;
            d[e.v] += e.mult;
        }
        d
    }

    pub fn has_self_loop(&self) -> bool {
        self.edges.iter().any(|e| e.u == e.v)
    }

    /// Proper 2-colouring of a connected graph with vertex 0 coloured 0, if one exists.
    pub fn two_colouring(&self) -> Option<Vec<u8>> {
        let mut colour = vec![u8::MAX; self.n];
        let adj = self.adjacency();
        for s in 0..self.n {
            if colour[s] != u8::MAX {
                continue;
            }
            colour[s] = 0;
            let mut queue = VecDeque::from([s]);
            while let Some(x) = queue.pop_front() {
                for &y in &adj[x] {
                    if colour[y] == u8::MAX {
                        colour[y] = 1 - colour[x];
                        queue.push_back(y);
                    } else if colour[y] == colour[x] {
                        return None;
                    }
                }
            }
        }
        Some(colour)
    }

    fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n];
        for e in &self.edges {
            adj[e.u].push(e.v);
            if e.u != e.v {
                adj[e.v].push(e.u);
            }
        }
        adj
    }
}

/// A bijection of `0..n`; `images()[i]` is the image of `i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Permutation(Vec<usize>);

impl Permutation {
    pub fn new(images: Vec<usize>) -> Result<Self, ModelError> {
        let mut seen = vec![false; images.len()];
        for &i in &images {
            if i >= images.len() || seen[i] {
                return Err(ModelError::NotPermutation);
            }
            seen[i] = true;
        }
        Ok(Permutation(images))
    }

    pub fn identity(n: usize) -> Self {
        Permutation((0..n).collect())
    }

    pub fn images(&self) -> &[usize] {
        &self.0
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.0.len()];
        for (i, &j) in self.0.iter().enumerate() {
            inv[j] = i;
        }
        Permutation(inv)
    }
}

/// A pair `(C, {D^[r]})`: a symmetric matrix and `N` diagonal weight vectors,
/// the vector `D^[deg v mod N]` weighting vertex `v`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EvalPair {
    c: Vec<Vec<CycNum>>,
    d: Vec<Vec<CycNum>>,
}

impl EvalPair {
    pub fn new(c: Vec<Vec<CycNum>>, d: Vec<Vec<CycNum>>) -> Result<Self, ModelError> {
        let m = c.len();
        for row in &c {
            if row.len() != m {
                return Err(ModelError::DimensionMismatch { expected: m, got: row.len() });
            }
        }
        if d.is_empty() {
            return Err(ModelError::DimensionMismatch { expected: 1, got: 0 });
        }
        for v in &d {
            if v.len() != m {
                return Err(ModelError::DimensionMismatch { expected: m, got: v.len() });
            }
        }
        for i in 0..m {
            for j in i + 1..m {
                if c[i][j] != c[j][i] {
                    return Err(ModelError::Asymmetric(i, j));
                }
            }
        }
        Ok(EvalPair { c, d })
    }

    /// The pair `(A, {I})` with every diagonal weight equal to one.
    pub fn from_matrix(a: &PureMatrix) -> Self {
        let l = a.working_conductor();
        let m = a.dim();
        let c = (0..m)
            .map(|i| (0..m).map(|j| a.get(i, j).to_cycnum(l)).collect())
            .collect();
        EvalPair {
            c,
            d: vec![vec![CycNum::one(l); m]],
        }
    }

    pub fn dim(&self) -> usize {
        self.c.len()
    }

    pub fn modulus(&self) -> usize {
        self.d.len()
    }

    pub fn c(&self) -> &[Vec<CycNum>] {
        &self.c
    }

    pub fn d(&self) -> &[Vec<CycNum>] {
        &self.d
    }
}

/// One connected piece of a matrix, with its indices in the original matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatrixComponent {
    pub indices: Vec<usize>,
    pub matrix: PureMatrix,
}

/// Connected components of the underlying graph of `A` (edge `ij` iff `A_ij != 0`),
/// ordered by smallest index.
pub fn components(a: &PureMatrix) -> Vec<MatrixComponent> {
    let m = a.dim();
    let mut seen = vec![false; m];
    let mut out = Vec::new();
    for s in 0..m {
        if seen[s] {
            continue;
        }
        seen[s] = true;
        let mut idx = vec![s];
        let mut queue = VecDeque::from([s]);
        while let Some(x) = queue.pop_front() {
            for y in 0..m {
                if !seen[y] && !a.get(x, y).is_zero() {
                    seen[y] = true;
                    idx.push(y);
                    queue.push_back(y);
                }
            }
        }
        idx.sort_unstable();
        let matrix = a.submatrix(&idx);
        out.push(MatrixComponent { indices: idx, matrix });
    }
    out
}

/// Result of 2-colouring a connected matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BipartiteSplit {
    /// Sides `left` (containing index 0) and `right`, and the block `B = A[left, right]`.
    Bipartite {
        left: Vec<usize>,
        right: Vec<usize>,
        block: Vec<Vec<PureEntry>>,
    },
    NonBipartite,
}

pub fn bipartite_split(a: &PureMatrix) -> BipartiteSplit {
    let m = a.dim();
    if m == 0 {
        return BipartiteSplit::NonBipartite;
    }
    let mut colour = vec![u8::MAX; m];
    for s in 0..m {
        if colour[s] != u8::MAX {
            continue;
        }
        colour[s] = 0;
        let mut queue = VecDeque::from([s]);
        while let Some(x) = queue.pop_front() {
            for y in 0..m {
                if a.get(x, y).is_zero() {
                    continue;
                }
                if colour[y] == u8::MAX {
                    colour[y] = 1 - colour[x];
                    queue.push_back(y);
                } else if colour[y] == colour[x] {
                    return BipartiteSplit::NonBipartite;
                }
            }
        }
    }
    let left: Vec<usize> = (0..m).filter(|&i| colour[i] == 0).collect();
    let right: Vec<usize> = (0..m).filter(|&i| colour[i] == 1).collect();
    let block = left
        .iter()
        .map(|&i| right.iter().map(|&j| a.get(i, j).clone()).collect())
        .collect();
    BipartiteSplit::Bipartite { left, right, block }
}

/// One connected piece of a graph; `vertices[i]` is the original label of local vertex `i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphComponent {
    pub vertices: Vec<usize>,
    pub graph: MultiGraph,
}

pub fn graph_components(g: &MultiGraph) -> Vec<GraphComponent> {
    let n = g.vertex_count();
    let adj = g.adjacency();
    let mut comp = vec![usize::MAX; n];
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for s in 0..n {
        if comp[s] != usize::MAX {
            continue;
        }
        let id = groups.len();
        comp[s] = id;
        let mut members = vec![s];
        let mut queue = VecDeque::from([s]);
        while let Some(x) = queue.pop_front() {
            for &y in &adj[x] {
                if comp[y] == usize::MAX {
                    comp[y] = id;
                    members.push(y);
                    queue.push_back(y);
                }
            }
        }
        members.sort_unstable();
        groups.push(members);
    }
    let mut local = vec![0usize; n];
    for members in &groups {
        for (i, &v) in members.iter().enumerate() {
            local[v] = i;
        }
    }
    let mut graphs: Vec<MultiGraph> = groups.iter().map(|m| MultiGraph::new(m.len())).collect();
    for e in g.edges() {
        let c = comp[e.u];
        graphs[c]
            .add_edge(local[e.u], local[e.v], e.mult)
            .expect("edge endpoints are in range");
    }
    groups
        .into_iter()
        .zip(graphs)
        .map(|(vertices, graph)| GraphComponent { vertices, graph })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn one() -> PureEntry {
        PureEntry::rational(Rational::from_integer(BigInt::from(1))).unwrap()
    }

    #[test]
    fn entries_are_canonical() {
        let e = PureEntry::new(Rational::from_integer(BigInt::from(2)), 8, 12).unwrap();
        assert_eq!((e.root_order(), e.root_exp()), (2, 1));
        let z = PureEntry::new(Rational::zero(), 5, 3).unwrap();
        assert_eq!(z, PureEntry::zero());
        let neg = PureEntry::from_signed(Rational::from_integer(BigInt::from(-3)), 4, 1).unwrap();
        assert_eq!((neg.root_order(), neg.root_exp()), (4, 3));
    }

    #[test]
    fn split_path_matrix() {
        let z = PureEntry::zero();
        let a = PureMatrix::from_rows(vec![
            vec![z.clone(), one(), z.clone()],
            vec![one(), z.clone(), one()],
            vec![z.clone(), one(), z.clone()],
        ])
        .unwrap();
        match bipartite_split(&a) {
            BipartiteSplit::Bipartite { left, right, .. } => {
                assert_eq!(left, vec![0, 2]);
                assert_eq!(right, vec![1]);
            }
            BipartiteSplit::NonBipartite => panic!("path is bipartite"),
        }
        assert_eq!(components(&a).len(), 1);
    }

    #[test]
    fn graph_pieces() {
        let g = MultiGraph::with_edges(5, &[(0, 3, 2), (4, 4, 1)]).unwrap();
        let parts = graph_components(&g);
        assert_eq!(parts.len(), 4);
        assert_eq!(parts[0].vertices, vec![0, 3]);
        assert_eq!(parts[0].graph.degrees(), vec![2, 2]);
        assert_eq!(parts[3].graph.degrees(), vec![2]);
    }
}

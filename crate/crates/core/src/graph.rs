//! Undirected simple graphs and the k-nearest-neighbor platoon topology.
//!
//! Vertices are labeled `0..n` in platoon order. Edges are kept in canonical
//! lexicographic order with the smaller endpoint first; that order fixes the
//! columns of the incidence matrix and the layout of saved files.

use std::fs;
use std::path::Path;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Number of vehicles and neighbor radius of a platoon `P(n,k)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlatoonSpec {
    pub n: usize,
    pub k: usize,
}

impl PlatoonSpec {
    pub fn new(n: usize, k: usize) -> Result<Self> {
        let spec = Self { n, k };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.k < 1 {
            return Err(Error::InvalidSpec {
                n: self.n,
                k: self.k,
                reason: "k must be at least 1",
            });
        }
        if self.k + 1 > self.n {
            return Err(Error::InvalidSpec {
                n: self.n,
                k: self.k,
                reason: "k must be at most n - 1",
            });
        }
        Ok(())
    }

    /// `floor(n / 2)`, the size of the half-platoon set.
    pub fn half(&self) -> usize {
        self.n / 2
    }
}

/// Undirected simple graph on vertices `0..n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
    neighbors: Vec<Vec<usize>>,
    dense: Vec<bool>,
}

impl Graph {
    /// Builds a graph from an edge list. Endpoint order within a pair does
    /// not matter; self-loops, out-of-range vertices and repeated edges are
    /// rejected.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut dense = vec![false; n * n];
        let mut canonical = Vec::new();
        for (a, b) in edges {
            for v in [a, b] {
                if v >= n {
                    return Err(Error::VertexOutOfRange { vertex: v, n });
                }
            }
            if a == b {
                return Err(Error::SelfLoop(a));
            }
            let (i, j) = if a < b { (a, b) } else { (b, a) };
            if dense[i * n + j] {
                return Err(Error::DuplicateEdge(i, j));
            }
            dense[i * n + j] = true;
            dense[j * n + i] = true;
            canonical.push((i, j));
        }
        canonical.sort_unstable();
        let mut neighbors = vec![Vec::new(); n];
        for &(i, j) in &canonical {
            neighbors[i].push(j);
            neighbors[j].push(i);
        }
        for list in &mut neighbors {
            list.sort_unstable();
        }
        Ok(Self {
            n,
            edges: canonical,
            neighbors,
            dense,
        })
    }

    pub fn empty(n: usize) -> Self {
        Self::new(n, std::iter::empty()).expect("empty graph is valid")
    }

    pub fn complete(n: usize) -> Self {
        let edges = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j)));
        Self::new(n, edges).expect("complete graph is valid")
    }

    pub fn path(n: usize) -> Self {
        Self::new(n, (1..n).map(|i| (i - 1, i))).expect("path is valid")
    }

    pub fn cycle(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::InvalidArgument(format!(
                "cycle needs n >= 3, got {n}"
            )));
        }
        Self::new(n, (0..n).map(|i| (i, (i + 1) % n)))
    }

    /// Star with center 0.
    pub fn star(n: usize) -> Self {
        Self::new(n, (1..n).map(|i| (0, i))).expect("star is valid")
    }

    /// Two complete graphs on `m` vertices each (`0..m` and `m..2m`) joined
    /// by the perfect matching `i <-> i + m`. Minimum degree and vertex
    /// connectivity are both `m`, yet the graph is only 1-robust.
    pub fn matched_cliques(m: usize) -> Self {
        let left = (0..m).flat_map(|i| (i + 1..m).map(move |j| (i, j)));
        let right = (0..m).flat_map(move |i| (i + 1..m).map(move |j| (i + m, j + m)));
        let matching = (0..m).map(|i| (i, i + m));
        Self::new(2 * m, left.chain(right).chain(matching)).expect("matched cliques are valid")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Edges in canonical order, smaller endpoint first.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.neighbors[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.neighbors[v].len()
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.neighbors.iter().map(Vec::len).collect()
    }

    pub fn min_degree(&self) -> usize {
        self.neighbors.iter().map(Vec::len).min().unwrap_or(0)
    }

    pub fn max_degree(&self) -> usize {
        self.neighbors.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        i < self.n && j < self.n && self.dense[i * self.n + j]
    }

    pub fn is_complete(&self) -> bool {
        self.edges.len() == self.n * self.n.saturating_sub(1) / 2
    }

    pub fn is_connected(&self) -> bool {
        if self.n == 0 {
            return true;
        }
        let mut seen = vec![false; self.n];
        let mut stack = vec![0];
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = stack.pop() {
            for &w in &self.neighbors[v] {
                if !seen[w] {
                    seen[w] = true;
                    count += 1;
                    stack.push(w);
                }
            }
        }
        count == self.n
    }

    /// Returns a copy with the edge `(i, j)` added.
    pub fn with_edge(&self, i: usize, j: usize) -> Result<Self> {
        Self::new(
            self.n,
            self.edges.iter().copied().chain(std::iter::once((i, j))),
        )
    }

    /// Pairs `(i, j)`, `i < j`, that are not edges.
    pub fn non_edges(&self) -> Vec<(usize, usize)> {
        (0..self.n)
            .flat_map(|i| (i + 1..self.n).map(move |j| (i, j)))
            .filter(|&(i, j)| !self.has_edge(i, j))
            .collect()
    }

    /// Neighborhood bitmasks; bit `j` of entry `i` is set iff `(i, j)` is an
    /// edge. Only defined for `n <= 64`.
    pub fn neighbor_masks(&self) -> Option<Vec<u64>> {
        if self.n > 64 {
            return None;
        }
        Some(
            self.neighbors
                .iter()
                .map(|list| list.iter().fold(0u64, |m, &j| m | (1u64 << j)))
                .collect(),
        )
    }

    pub fn adjacency(&self) -> DMatrix<f64> {
        DMatrix::from_fn(
            self.n,
            self.n,
            |i, j| if self.has_edge(i, j) { 1.0 } else { 0.0 },
        )
    }

    /// `L = D - A` in integer arithmetic.
    pub fn laplacian_int(&self) -> DMatrix<i64> {
        DMatrix::from_fn(self.n, self.n, |i, j| {
            if i == j {
                self.degree(i) as i64
            } else if self.has_edge(i, j) {
                -1
            } else {
                0
            }
        })
    }

    pub fn laplacian(&self) -> DMatrix<f64> {
        self.laplacian_int().map(|v| v as f64)
    }

    /// Node-edge incidence matrix for the canonical orientation: column `l`
    /// has `+1` at the smaller endpoint (head) of edge `l` and `-1` at the
    /// larger one (tail).
    pub fn incidence_int(&self) -> DMatrix<i64> {
        let mut b = DMatrix::zeros(self.n, self.edges.len());
        for (l, &(i, j)) in self.edges.iter().enumerate() {
            b[(i, l)] = 1;
            b[(j, l)] = -1;
        }
        b
    }

    pub fn incidence(&self) -> DMatrix<f64> {
        self.incidence_int().map(|v| v as f64)
    }

    pub fn to_json(&self) -> String {
        let file = GraphFile {
            n: self.n,
            edges: self.edges.iter().map(|&(i, j)| [i, j]).collect(),
        };
        let mut text = serde_json::to_string(&file).expect("graph serializes");
        text.push('\n');
        text
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: GraphFile = serde_json::from_str(text).map_err(|e| Error::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        file.into_graph()
    }
}

/// On-disk representation: `{"n": int, "edges": [[i, j], ...]}`.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct GraphFile {
    pub n: usize,
    pub edges: Vec<[usize; 2]>,
}

impl GraphFile {
    pub fn into_graph(self) -> Result<Graph> {
        Graph::new(self.n, self.edges.into_iter().map(|[i, j]| (i, j)))
    }
}

impl From<&Graph> for GraphFile {
    fn from(g: &Graph) -> Self {
        Self {
            n: g.n,
            edges: g.edges.iter().map(|&(i, j)| [i, j]).collect(),
        }
    }
}

pub fn save_graph(g: &Graph, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, g.to_json())?;
    Ok(())
}

pub fn load_graph(path: impl AsRef<Path>) -> Result<Graph> {
    Graph::from_json(&fs::read_to_string(path)?)
}

/// `P(n,k)`: edge `(i, j)` iff `0 < |i - j| <= k`.
pub fn build_knn_platoon(spec: PlatoonSpec) -> Result<Graph> {
    spec.validate()?;
    let PlatoonSpec { n, k } = spec;
    let edges = (0..n).flat_map(move |i| (i + 1..=(i + k).min(n - 1)).map(move |j| (i, j)));
    Graph::new(n, edges)
}

//! Unit-capacity max-flow (BFS augmentation) and the Menger-style
//! connectivity computations built on it.

use std::collections::VecDeque;

use crate::graph::Graph;

/// Residual network with paired arcs: arc `a ^ 1` is the reverse of arc `a`.
#[derive(Debug, Clone)]
struct FlowNetwork {
    out: Vec<Vec<usize>>,
    to: Vec<usize>,
    cap: Vec<u32>,
}

impl FlowNetwork {
    fn new(nodes: usize) -> Self {
        Self {
            out: vec![Vec::new(); nodes],
            to: Vec::new(),
            cap: Vec::new(),
        }
    }

    fn add_arc(&mut self, u: usize, v: usize, forward: u32, backward: u32) {
        self.out[u].push(self.to.len());
        self.to.push(v);
        self.cap.push(forward);
        self.out[v].push(self.to.len());
        self.to.push(u);
        self.cap.push(backward);
    }

    fn max_flow(&mut self, source: usize, sink: usize) -> usize {
        let nodes = self.out.len();
        let mut flow = 0;
        let mut via = vec![usize::MAX; nodes];
        loop {
            via.fill(usize::MAX);
            let mut queue = VecDeque::from([source]);
            let mut reached = false;
            while let Some(u) = queue.pop_front() {
                for &arc in &self.out[u] {
                    let v = self.to[arc];
                    if self.cap[arc] > 0 && v != source && via[v] == usize::MAX {
                        via[v] = arc;
                        if v == sink {
                            reached = true;
                            break;
                        }
                        queue.push_back(v);
                    }
                }
                if reached {
                    break;
                }
            }
            if !reached {
                return flow;
            }
            let mut bottleneck = u32::MAX;
            let mut v = sink;
            while v != source {
                let arc = via[v];
                bottleneck = bottleneck.min(self.cap[arc]);
                v = self.to[arc ^ 1];
            }
            let mut v = sink;
            while v != source {
                let arc = via[v];
                self.cap[arc] -= bottleneck;
                self.cap[arc ^ 1] += bottleneck;
                v = self.to[arc ^ 1];
            }
            flow += bottleneck as usize;
        }
    }
}

/// Maximum number of internally vertex-disjoint paths between two distinct
/// non-adjacent vertices, via the vertex-split network.
pub fn local_vertex_connectivity(g: &Graph, s: usize, t: usize) -> usize {
    assert!(
        s != t && !g.has_edge(s, t),
        "local vertex connectivity needs non-adjacent s != t"
    );
    let n = g.n();
    let big = n as u32;
    // vertex v -> in-node 2v, out-node 2v + 1
    let mut net = FlowNetwork::new(2 * n);
    for v in 0..n {
        let c = if v == s || v == t { big } else { 1 };
        net.add_arc(2 * v, 2 * v + 1, c, 0);
    }
    for &(u, v) in g.edges() {
        net.add_arc(2 * u + 1, 2 * v, big, 0);
        net.add_arc(2 * v + 1, 2 * u, big, 0);
    }
    net.max_flow(2 * s + 1, 2 * t)
}

/// Maximum number of edge-disjoint paths between `s` and `t`.
pub fn local_edge_connectivity(g: &Graph, s: usize, t: usize) -> usize {
    let mut net = FlowNetwork::new(g.n());
    for &(u, v) in g.edges() {
        net.add_arc(u, v, 1, 1);
    }
    net.max_flow(s, t)
}

/// Size of a minimum vertex cut. Complete graphs give `n - 1`, disconnected
/// graphs give 0.
///
/// Pairs are scanned in Even's order: source `v_i` for `i = 0, 1, ...` while
/// `i` does not exceed the best cut found so far, sink any later
/// non-adjacent vertex. Some `v_i` with `i <= kappa` lies outside a minimum
/// cut, and every vertex separated from it has a larger index.
pub fn vertex_connectivity(g: &Graph) -> usize {
    let n = g.n();
    if n <= 1 || !g.is_connected() {
        return 0;
    }
    if g.is_complete() {
        return n - 1;
    }
    let mut best = g.min_degree();
    let mut i = 0;
    while i <= best && i < n {
        for j in i + 1..n {
            if !g.has_edge(i, j) {
                best = best.min(local_vertex_connectivity(g, i, j));
            }
        }
        i += 1;
    }
    best
}

/// Minimum number of edges whose removal disconnects the graph; 0 when the
/// graph is already disconnected or has a single vertex.
pub fn edge_connectivity(g: &Graph) -> usize {
    let n = g.n();
    if n <= 1 || !g.is_connected() {
        return 0;
    }
    (1..n)
        .map(|t| local_edge_connectivity(g, 0, t))
        .min()
        .unwrap_or(0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_knn_platoon, PlatoonSpec};

    #[test]
    fn small_graphs() {
        assert_eq!(vertex_connectivity(&Graph::path(3)), 1);
        assert_eq!(vertex_connectivity(&Graph::complete(5)), 4);
        assert_eq!(edge_connectivity(&Graph::star(5)), 1);
        assert_eq!(edge_connectivity(&Graph::cycle(6).unwrap()), 2);
        assert_eq!(vertex_connectivity(&Graph::cycle(6).unwrap()), 2);
    }

    #[test]
    fn disconnected_is_zero() {
        let g = Graph::new(4, [(0, 1), (2, 3)]).unwrap();
        assert_eq!(vertex_connectivity(&g), 0);
        assert_eq!(edge_connectivity(&g), 0);
        assert_eq!(vertex_connectivity(&Graph::empty(1)), 0);
    }

    #[test]
    fn platoons_are_k_connected() {
        for (n, k) in [(6, 2), (8, 3), (10, 4), (10, 3)] {
            let g = build_knn_platoon(PlatoonSpec::new(n, k).unwrap()).unwrap();
            assert_eq!(vertex_connectivity(&g), k, "kappa P({n},{k})");
            assert_eq!(edge_connectivity(&g), k, "edge P({n},{k})");
        }
    }

    #[test]
    fn matched_cliques_connectivity() {
        let g = Graph::matched_cliques(4);
        assert_eq!(vertex_connectivity(&g), 4);
        assert_eq!(edge_connectivity(&g), 4);
    }

    #[test]
    fn bridge_between_triangles() {
        let g = Graph::new(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5), (2, 3)]).unwrap();
        assert_eq!(vertex_connectivity(&g), 1);
        assert_eq!(edge_connectivity(&g), 1);
        assert_eq!(local_vertex_connectivity(&g, 0, 4), 1);
    }
}

//! Laplacian spectrum, algebraic connectivity and its platoon bounds.

use serde::{Deserialize, Serialize};

use crate::graph::{Graph, PlatoonSpec};
use crate::linalg::sorted_symmetric_eigenvalues;

/// Laplacian eigenvalues in ascending order.
pub fn laplacian_spectrum(g: &Graph) -> Vec<f64> {
    sorted_symmetric_eigenvalues(&g.laplacian())
}

/// Second-smallest Laplacian eigenvalue; 0 for graphs with fewer than two
/// vertices.
pub fn algebraic_connectivity(g: &Graph) -> f64 {
    laplacian_spectrum(g).get(1).copied().unwrap_or(0.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Lambda2Bounds {
    pub lower: f64,
    pub upper: f64,
    /// `2 d_min - n + 2` with `d_min = k`.
    pub degree_lower: f64,
    /// `i^2 / (2 d_max)` with the half-platoon isoperimetric value and
    /// `d_max <= 2k`.
    pub expansion_lower: f64,
}

/// Bracket on `lambda_2(P(n,k))`, with `nbar = floor(n/2)`:
/// `max{2k - n + 2, k(k+1)^2 / (16 nbar^2)} <= lambda_2 <= 2k(k+1) / nbar`.
pub fn lambda2_bounds(spec: PlatoonSpec) -> Lambda2Bounds {
    let n = spec.n as f64;
    let k = spec.k as f64;
    let nbar = spec.half() as f64;
    let degree_lower = 2.0 * k - n + 2.0;
    let expansion_lower = k * (k + 1.0).powi(2) / (16.0 * nbar * nbar);
    Lambda2Bounds {
        lower: degree_lower.max(expansion_lower),
        upper: 2.0 * k * (k + 1.0) / nbar,
        degree_lower,
        expansion_lower,
    }
}

//! Network-theoretic analysis of k-nearest-neighbor vehicle platoons.
//!
//! The crate is organized bottom-up:
//!
//! - [`graph`]: undirected simple graphs, the platoon topology `P(n,k)`,
//!   Laplacian and incidence matrices, JSON persistence.
//! - [`connectivity`]: vertex/edge connectivity (max-flow), r-robustness and
//!   the isoperimetric constant (exhaustive), algebraic connectivity and its
//!   platoon bounds.
//! - [`estimation`]: the linear iterative strategy with faulty vehicles and
//!   recovery of all initial values at a single observer.
//! - [`consensus`]: W-MSR resilient consensus against adversarial vehicles.
//! - [`formation`]: double-integrator formation control, its H-infinity norm
//!   in closed form and by frequency sweep, and time-domain simulation.

pub mod connectivity;
pub mod consensus;
pub mod error;
pub mod estimation;
pub mod formation;
pub mod graph;
pub mod linalg;

pub use error::{Error, Result};
pub use graph::{build_knn_platoon, Graph, PlatoonSpec};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

//! Higher-order clustering coefficients of undirected graphs.
//!
//! The crate counts cliques per node, turns the counts into global, local
//! and average clustering coefficients of any order `ℓ ≥ 2`, generates the
//! random and extremal graph families used to interpret them, and compares
//! real networks with degree-preserving null models.
//!
//! Coefficient code is generic over [`Scalar`]; [`Report`] (`f64`) is the
//! everyday type and [`ExactReport`] (big rationals) checks identities
//! exactly on small graphs.

pub mod analysis;
pub mod cliques;
pub mod coeffs;
pub mod error;
pub mod gen;
pub mod graph;
pub mod null;
pub mod ordering;
pub mod rng;
pub mod scalar;

pub use cliques::{brute_force_clique_counts, count_cliques, CliqueConfig, CliqueCounts};
pub use coeffs::{er_baseline, kk_upper_bound, wedge_counts, ClusteringReport, WedgeCounts};
pub use error::{Error, Result};
pub use graph::{load_edge_list, write_edge_list, Graph, LoadOptions, NodeId};
pub use ordering::{degeneracy_order, VertexOrdering};
pub use scalar::Scalar;

pub use num_rational::BigRational;

/// Coefficients in double precision.
pub type Report = ClusteringReport<f64>;
/// Coefficients in single precision.
pub type ReportF32 = ClusteringReport<f32>;
/// Coefficients as exact rationals.
pub type ExactReport = ClusteringReport<BigRational>;

//! Optimal `(ε, δ)`-differentially private mechanisms for binary queries.
//!
//! Datasets form a [`ColoredGraph`]: neighboring datasets are joined by an
//! edge and each vertex is colored by the true answer. A [`Mechanism`] is a
//! randomized recoloring. The crate finds the most truthful private
//! mechanisms for given boundary behavior, in closed form on lines and
//! boundary-homogeneous graphs and by monotone relaxation in general, and
//! ships a brute-force grid oracle to check the answers.

pub mod catalog;
pub mod cli;
pub mod closed_form;
pub mod error;
pub mod graph;
pub mod io;
pub mod mechanism;
pub mod morphism;
pub mod optimizer;
pub mod oracle;

pub use closed_form::{
    balanced_mechanism, compute_tau, optimal_boundary_homogeneous, optimal_line_blue, optimal_line_full, LineSolution, Tau,
};
pub use error::{Error, Result};
pub use graph::{build_topology, boundary_graph_params, Color, ColoredGraph, LineSpec, Topology};
pub use mechanism::{verify_dp, DpReport, Mechanism, PrivacyParams, Violation, DEFAULT_TOLERANCE};
pub use morphism::{build_boundary_morphism, pullback, Morphism};
pub use optimizer::{optimize_with_boundary, BoundaryCondition, OptimizeResult, Status};
pub use oracle::{certify_no_improvement, grid_best, GridSpec};

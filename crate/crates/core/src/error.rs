use thiserror::Error;

use crate::graph::Color;

/// Errors produced by the library.
#[derive(Debug, Error, Clone, PartialEq)]
#[non_exhaustive]
pub enum Error {
    /// The graph violates a structural invariant (self-loop, duplicate edge, ...).
    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    /// A vertex id that is not part of the graph.
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),

    /// No path connects the vertex to the target set.
    #[error("vertex `{0}` cannot reach the target set")]
    Unreachable(String),

    /// A color class has no boundary, or some vertex cannot reach its boundary.
    #[error("no boundary for {color}: {detail}")]
    NoBoundary { color: Color, detail: String },

    #[error("mechanism has no probability for vertex `{0}`")]
    IncompleteMechanism(String),

    #[error("invalid probability {value} for vertex `{vertex}`")]
    InvalidProbability { vertex: String, value: f64 },

    #[error("invalid distribution: {0}")]
    BadDistribution(String),

    #[error("invalid privacy parameters: {0}")]
    InvalidParams(String),

    #[error("map is not defined on source vertex `{0}`")]
    PartialMap(String),

    #[error("not a morphism: edge {0} ~ {1} is neither preserved nor collapsed")]
    NotAMorphism(String, String),

    /// The initial recurrence is only defined for a strictly positive epsilon.
    #[error("initial recurrence is undefined for epsilon = 0")]
    UndefinedBranch,

    #[error("precondition violated: {0}")]
    PreconditionViolated(String),

    #[error("bad boundary condition: {0}")]
    BadBoundaryCondition(String),

    #[error("relaxation did not converge within {0} rounds")]
    NoConvergence(usize),

    #[error("instance too large: {0}")]
    TooLarge(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

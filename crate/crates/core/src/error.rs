use thiserror::Error;

use crate::graph::Vertex;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("self-loop on vertex {vertex}{}", line_suffix(*.line))]
    SelfLoop { vertex: Vertex, line: Option<usize> },
    #[error("duplicate edge {u}-{v}{}", line_suffix(*.line))]
    DuplicateEdge { u: Vertex, v: Vertex, line: Option<usize> },
    #[error("vertex {vertex} out of range for graph with {num_vertices} vertices")]
    InvalidVertex { vertex: Vertex, num_vertices: usize },
    #[error("edge {u}-{v} not present")]
    MissingEdge { u: Vertex, v: Vertex },
    #[error("path endpoints coincide at vertex {0}")]
    SameEndpoints(Vertex),
    #[error("path size bound {0} is below 2")]
    PathSizeTooSmall(usize),
    #[error("{0:?} is not a simple path")]
    NotSimplePath(Vec<Vertex>),
}

fn line_suffix(line: Option<usize>) -> String {
    line.map(|l| format!(" at line {l}")).unwrap_or_default()
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TopologyError {
    #[error("invalid generator parameters: {0}")]
    InvalidSpec(String),
    #[error("could not sample {zeta} disjoint contractible edges after {attempts} attempts")]
    RetriesExhausted { zeta: usize, attempts: usize },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("constraint references undeclared variable {0}")]
    UnknownVariable(usize),
    #[error("duplicate variable name `{0}`")]
    DuplicateName(String),
    #[error("constraint bounds out of order: lower {lower} > upper {upper}")]
    EmptyRange { lower: i64, upper: i64 },
    #[error("warm-start hint has {got} entries, model has {expected} variables")]
    HintLength { got: usize, expected: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolveError {
    #[error("internal error: returned assignment violates constraint {index} ({tag})")]
    Unsound { index: usize, tag: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EmbedError {
    #[error("invalid problem: {0}")]
    InvalidProblem(String),
    #[error("decoded embedding failed verification: {0}")]
    Inconsistent(String),
    #[error("cut self-check failed: {0}")]
    CutCheck(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Solve(#[from] SolveError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("oracle refuses target with {got} vertices (cap {cap})")]
    TargetTooLarge { got: usize, cap: usize },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

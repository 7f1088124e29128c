//! Exact minor-embedding of a logical graph into a hardware graph.
//!
//! Two formulations share one 0-1 engine: a monolithic integer program
//! ([`monolithic`]) and an assignment master problem refined by
//! connectivity cuts ([`decomposition`]). [`verify`] checks embeddings from
//! first principles and hosts a brute-force oracle for tiny instances.

pub mod decomposition;
pub mod embedding;
pub mod error;
pub mod graph;
pub mod milp;
pub mod monolithic;
pub mod topology;
pub mod verify;

pub use embedding::{EmbedObjective, EmbedOutcome, EmbedProblem, EmbedStats, Embedding};
pub use error::{EmbedError, GraphError, ModelError, OracleError, SolveError, TopologyError};
pub use graph::{load_graph, save_graph, Graph, Path, Vertex};

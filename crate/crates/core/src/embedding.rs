//! Problem, result and variable-catalog types shared by both formulations.

use std::collections::BTreeMap;
use std::time::Duration;

use crate::error::EmbedError;
use crate::graph::{Graph, Path, Vertex};
use crate::milp::{SolveLimits, SolveStats, SolveStatus, VarId};

/// Default fiber-size cap of the monolithic formulation.
pub const DEFAULT_FIBER_CAP: usize = 3;

/// Vertex models `φ(y)`, indexed by source vertex.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Embedding {
    vertex_models: Vec<Vec<Vertex>>,
}

impl Embedding {
    /// Sorts and deduplicates each model.
    pub fn new(mut vertex_models: Vec<Vec<Vertex>>) -> Self {
        for m in &mut vertex_models {
            m.sort_unstable();
            m.dedup();
        }
        Embedding { vertex_models }
    }

    /// Builds `φ` from the target-to-source map `π` (`None` = unused qubit).
    pub fn from_projection(projection: &[Option<Vertex>], num_source: usize) -> Self {
        let mut models = vec![Vec::new(); num_source];
        for (x, y) in projection.iter().enumerate() {
            if let Some(y) = *y {
                models[y].push(x);
            }
        }
        Embedding { vertex_models: models }
    }

    pub fn vertex_models(&self) -> &[Vec<Vertex>] {
        &self.vertex_models
    }

    pub fn model(&self, y: Vertex) -> &[Vertex] {
        &self.vertex_models[y]
    }

    pub fn num_source_vertices(&self) -> usize {
        self.vertex_models.len()
    }

    /// Total qubit count `Σ |φ(y)|`.
    pub fn size(&self) -> usize {
        self.vertex_models.iter().map(Vec::len).sum()
    }

    pub fn max_fiber(&self) -> usize {
        self.vertex_models.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// `π`: the source vertex each target vertex represents, if any. Later
    /// models win on overlap.
    pub fn projection(&self, num_target: usize) -> Vec<Option<Vertex>> {
        let mut pi = vec![None; num_target];
        for (y, m) in self.vertex_models.iter().enumerate() {
            for &x in m {
                if x < num_target {
                    pi[x] = Some(y);
                }
            }
        }
        pi
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EmbedObjective {
    /// Any embedding; search stops at the first one.
    Feasibility,
    /// Minimize the total number of target vertices used.
    #[default]
    MinSize,
}

impl EmbedObjective {
    pub fn as_str(self) -> &'static str {
        match self {
            EmbedObjective::Feasibility => "feasible",
            EmbedObjective::MinSize => "min-size",
        }
    }
}

#[derive(Debug, Clone)]
pub struct EmbedProblem {
    pub target: Graph,
    pub source: Graph,
    /// Maximum fiber size, in target vertices.
    pub k: usize,
    pub objective: EmbedObjective,
    pub limits: SolveLimits,
    /// Also cap the number of selected connecting paths per vertex pair at
    /// one, independent of whether the pair is in the fiber.
    pub unique_fiber_path: bool,
}

impl EmbedProblem {
    pub fn new(target: Graph, source: Graph, k: usize, objective: EmbedObjective) -> Self {
        EmbedProblem { target, source, k, objective, limits: SolveLimits::default(), unique_fiber_path: false }
    }

    pub fn with_limits(mut self, limits: SolveLimits) -> Self {
        self.limits = limits;
        self
    }

    pub fn validate(&self) -> Result<(), EmbedError> {
        if self.k < 1 {
            return Err(EmbedError::InvalidProblem("fiber size bound k must be at least 1".into()));
        }
        if self.target.num_vertices() == 0 {
            return Err(EmbedError::InvalidProblem("target graph has no vertices".into()));
        }
        if self.source.num_vertices() == 0 {
            return Err(EmbedError::InvalidProblem("source graph has no vertices".into()));
        }
        Ok(())
    }

    /// More source than target vertices: no embedding can exist.
    pub fn is_trivially_infeasible(&self) -> bool {
        self.source.num_vertices() > self.target.num_vertices()
    }
}

/// Orientation of a target edge `(x1, x2)`, `x1 < x2`, relative to a source
/// edge `(y1, y2)`, `y1 < y2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Orientation {
    /// `x1 ∈ φ(y1)` and `x2 ∈ φ(y2)`.
    Parallel,
    /// `x1 ∈ φ(y2)` and `x2 ∈ φ(y1)`.
    Crossed,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GammaVar {
    pub path: Path,
    pub source: Vertex,
    pub var: VarId,
}

/// Correspondence between formulation quantities and model variables.
/// Edge keys are indices into `Graph::edges()`.
#[derive(Debug, Clone, Default)]
pub struct VarCatalog {
    /// `alpha[x][y]`: target vertex `x` belongs to `φ(y)`.
    pub alpha: Vec<Vec<VarId>>,
    pub gamma: Vec<GammaVar>,
    pub delta_par: BTreeMap<(usize, usize), VarId>,
    pub delta_perp: BTreeMap<(usize, usize), VarId>,
    pub z: BTreeMap<(usize, usize, Orientation), VarId>,
    /// `w[y]`: `φ(y)` has more than one vertex.
    pub w: Vec<VarId>,
}

impl VarCatalog {
    pub fn alpha(&self, x: Vertex, y: Vertex) -> VarId {
        self.alpha[x][y]
    }

    pub fn num_alpha(&self) -> usize {
        self.alpha.iter().map(Vec::len).sum()
    }

    /// Vertex models read off the α block of an assignment; not checked.
    pub fn candidate_models(&self, assignment: &[bool], num_source: usize) -> Vec<Vec<Vertex>> {
        let mut models = vec![Vec::new(); num_source];
        for (x, row) in self.alpha.iter().enumerate() {
            for (y, v) in row.iter().enumerate() {
                if assignment[v.0] {
                    models[y].push(x);
                }
            }
        }
        models
    }

    /// The α block as a flat bit vector, `x`-major.
    pub fn alpha_bits(&self, assignment: &[bool]) -> Vec<bool> {
        self.alpha.iter().flat_map(|row| row.iter().map(|v| assignment[v.0])).collect()
    }
}

/// A disconnected candidate model found by the decomposition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DisconnectedModel {
    pub source: Vertex,
    pub model: Vec<Vertex>,
    /// Target vertices adjacent to the model but outside it.
    pub boundary: Vec<Vertex>,
}

impl DisconnectedModel {
    /// Whether the cut built from this entry rejects `model_of_source`, a
    /// model of the same source vertex: true unless it drops a vertex of
    /// `model` or uses a boundary vertex.
    pub fn excludes(&self, model_of_source: &[Vertex]) -> bool {
        let dropped = self.model.iter().any(|x| !model_of_source.contains(x));
        let grown = self.boundary.iter().any(|x| model_of_source.contains(x));
        !(dropped || grown)
    }
}

/// One master solve of the decomposition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IterationTrace {
    pub iteration: usize,
    pub master_objective: Option<i64>,
    pub cuts_added: usize,
    /// Models cut after this solve.
    pub cut_models: Vec<DisconnectedModel>,
    pub elapsed: Duration,
}

impl IterationTrace {
    pub fn new(iteration: usize, master_objective: Option<i64>, cut_models: Vec<DisconnectedModel>, elapsed: Duration) -> Self {
        IterationTrace { iteration, master_objective, cuts_added: cut_models.len(), cut_models, elapsed }
    }

    /// `iter=<n> master_obj=<v|-> cuts=<c> time_ms=<t>`
    pub fn to_line(&self) -> String {
        let obj = self.master_objective.map_or_else(|| "-".to_string(), |v| v.to_string());
        format!(
            "iter={} master_obj={} cuts={} time_ms={}",
            self.iteration,
            obj,
            self.cuts_added,
            self.elapsed.as_millis()
        )
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EmbedStats {
    pub solve: SolveStats,
    pub num_vars: usize,
    pub num_constraints: usize,
    /// Master solves (decomposition only).
    pub iterations: usize,
    pub cuts: usize,
    pub wall_time: Duration,
}

#[derive(Debug, Clone)]
pub struct EmbedOutcome {
    pub status: SolveStatus,
    pub embedding: Option<Embedding>,
    /// Lower bound on the embedding size.
    pub best_bound: i64,
    /// Fiber-size bound the verdict is relative to.
    pub k: usize,
    pub reason: Option<String>,
    pub stats: EmbedStats,
    pub trace: Vec<IterationTrace>,
}

impl EmbedOutcome {
    pub fn size(&self) -> Option<usize> {
        self.embedding.as_ref().map(Embedding::size)
    }

    /// Relative gap `(size − bound) / size`, when an embedding exists.
    pub fn gap(&self) -> Option<f64> {
        let size = self.size()? as f64;
        if size == 0.0 {
            return Some(0.0);
        }
        Some(((size - self.best_bound as f64) / size).max(0.0))
    }

    pub(crate) fn trivially_infeasible(p: &EmbedProblem) -> Self {
        EmbedOutcome {
            status: SolveStatus::Infeasible,
            embedding: None,
            best_bound: p.source.num_vertices() as i64,
            k: p.k,
            reason: Some(format!(
                "trivially infeasible: source has {} vertices, target only {}",
                p.source.num_vertices(),
                p.target.num_vertices()
            )),
            stats: EmbedStats::default(),
            trace: Vec::new(),
        }
    }
}

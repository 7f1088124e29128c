//! Solver-independent embedding checks and an exhaustive reference search
//! for small targets.

use std::fmt;

use crate::embedding::Embedding;
use crate::error::{GraphError, OracleError};
use crate::graph::{Graph, Vertex};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    /// Target vertex used by more than one model.
    Overlap { target: Vertex, sources: Vec<Vertex> },
    MissingVertex { source: Vertex },
    DisconnectedModel { source: Vertex },
    UncoveredEdge { u: Vertex, v: Vertex },
}

impl Violation {
    pub fn kind(&self) -> &'static str {
        match self {
            Violation::Overlap { .. } => "overlap",
            Violation::MissingVertex { .. } => "missing-vertex",
            Violation::DisconnectedModel { .. } => "disconnected-model",
            Violation::UncoveredEdge { .. } => "uncovered-edge",
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Overlap { target, sources } => write!(f, "overlap: target vertex {target} used by {sources:?}"),
            Violation::MissingVertex { source } => write!(f, "missing-vertex: source vertex {source} has an empty model"),
            Violation::DisconnectedModel { source } => {
                write!(f, "disconnected-model: model of source vertex {source} is not connected")
            }
            Violation::UncoveredEdge { u, v } => write!(f, "uncovered-edge: source edge {u}-{v} has no target edge"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct VerifyReport {
    pub violations: Vec<Violation>,
    pub size: usize,
}

impl VerifyReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks that `embedding` is a minor embedding of `source` into `target`.
/// Errors only on out-of-range ids; structural problems are reported.
pub fn verify_embedding(embedding: &Embedding, target: &Graph, source: &Graph) -> Result<VerifyReport, GraphError> {
    let n = target.num_vertices();
    let m = source.num_vertices();
    let models = embedding.vertex_models();
    if models.len() > m {
        return Err(GraphError::InvalidVertex { vertex: models.len() - 1, num_vertices: m });
    }
    for model in models {
        if let Some(&x) = model.iter().find(|&&x| x >= n) {
            return Err(GraphError::InvalidVertex { vertex: x, num_vertices: n });
        }
    }
    let empty: Vec<Vertex> = Vec::new();
    let model_of = |y: Vertex| models.get(y).unwrap_or(&empty);

    let mut violations = Vec::new();
    let mut owners: Vec<Vec<Vertex>> = vec![Vec::new(); n];
    for (y, model) in models.iter().enumerate() {
        for &x in model {
            owners[x].push(y);
        }
    }
    for (x, o) in owners.iter().enumerate() {
        if o.len() > 1 {
            violations.push(Violation::Overlap { target: x, sources: o.clone() });
        }
    }
    for y in 0..m {
        let model = model_of(y);
        if model.is_empty() {
            violations.push(Violation::MissingVertex { source: y });
        } else if !target.is_connected_subset(model)? {
            violations.push(Violation::DisconnectedModel { source: y });
        }
    }
    for &(u, v) in source.edges() {
        let mv = model_of(v);
        let covered = model_of(u).iter().any(|&a| mv.iter().any(|&b| target.has_edge(a, b)));
        if !covered {
            violations.push(Violation::UncoveredEdge { u, v });
        }
    }
    Ok(VerifyReport { violations, size: embedding.size() })
}

pub const DEFAULT_ORACLE_CAP: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleOptions {
    /// Refuse targets with more vertices than this.
    pub max_target_vertices: usize,
    /// Only consider embeddings of at most this size.
    pub max_size: Option<usize>,
    /// Only consider embeddings whose fibers have at most this many vertices.
    pub max_fiber: Option<usize>,
}

impl Default for OracleOptions {
    fn default() -> Self {
        OracleOptions { max_target_vertices: DEFAULT_ORACLE_CAP, max_size: None, max_fiber: None }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OracleResult {
    /// No embedding within the options.
    Infeasible,
    Minimum { size: usize, witness: Embedding },
}

impl OracleResult {
    pub fn size(&self) -> Option<usize> {
        match self {
            OracleResult::Infeasible => None,
            OracleResult::Minimum { size, .. } => Some(*size),
        }
    }
}

/// Bitmask form of `target` for the small-graph searches.
struct Masks {
    adj: Vec<u64>,
}

impl Masks {
    fn new(g: &Graph) -> Self {
        let adj = g.vertices().map(|v| g.neighbors(v).iter().fold(0u64, |acc, &u| acc | (1 << u))).collect();
        Masks { adj }
    }

    fn connected(&self, set: u64) -> bool {
        if set == 0 {
            return false;
        }
        let mut reach = set & set.wrapping_neg();
        loop {
            let mut next = reach;
            let mut bits = reach;
            while bits != 0 {
                let b = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                next |= self.adj[b] & set;
            }
            if next == reach {
                return reach == set;
            }
            reach = next;
        }
    }

    fn touches(&self, a: u64, b: u64) -> bool {
        let mut bits = a;
        while bits != 0 {
            let x = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            if self.adj[x] & b != 0 {
                return true;
            }
        }
        false
    }
}

struct Search<'a> {
    masks: Masks,
    source: &'a Graph,
    n: usize,
    m: usize,
    max_fiber: usize,
    fibers: Vec<u64>,
    counts: Vec<usize>,
    pi: Vec<Option<Vertex>>,
}

impl<'a> Search<'a> {
    fn new(target: &Graph, source: &'a Graph, max_fiber: Option<usize>) -> Self {
        let n = target.num_vertices();
        let m = source.num_vertices();
        Search {
            masks: Masks::new(target),
            source,
            n,
            m,
            max_fiber: max_fiber.unwrap_or(n),
            fibers: vec![0; m],
            counts: vec![0; m],
            pi: vec![None; n],
        }
    }

    fn is_embedding(&self) -> bool {
        self.fibers.iter().all(|&f| self.masks.connected(f))
            && self.source.edges().iter().all(|&(u, v)| self.masks.touches(self.fibers[u], self.fibers[v]))
    }

    /// Depth-first over `π(x)`, trying "unused" first and then sources in
    /// increasing order. `visit` returns the size bound for the rest of the
    /// search: leaves with `used ≥ bound` are skipped.
    fn run(&mut self, x: usize, used: usize, bound: &mut usize, visit: &mut dyn FnMut(&[Option<Vertex>], usize) -> usize) {
        let empty = self.counts.iter().filter(|&&c| c == 0).count();
        if used + empty >= *bound || self.n - x < empty {
            return;
        }
        if x == self.n {
            if self.is_embedding() {
                *bound = visit(&self.pi, used);
            }
            return;
        }
        self.run(x + 1, used, bound, visit);
        for y in 0..self.m {
            if self.counts[y] >= self.max_fiber {
                continue;
            }
            self.pi[x] = Some(y);
            self.fibers[y] |= 1 << x;
            self.counts[y] += 1;
            self.run(x + 1, used + 1, bound, visit);
            self.counts[y] -= 1;
            self.fibers[y] &= !(1 << x);
            self.pi[x] = None;
        }
    }
}

fn check_cap(target: &Graph, cap: usize) -> Result<(), OracleError> {
    let cap = cap.min(64);
    if target.num_vertices() > cap {
        return Err(OracleError::TargetTooLarge { got: target.num_vertices(), cap });
    }
    Ok(())
}

/// Minimum-size embedding by exhaustive search. Among minimum embeddings
/// the witness is the first in the search order.
pub fn oracle_min_embedding(target: &Graph, source: &Graph, options: &OracleOptions) -> Result<OracleResult, OracleError> {
    check_cap(target, options.max_target_vertices)?;
    let m = source.num_vertices();
    if m > target.num_vertices() {
        return Ok(OracleResult::Infeasible);
    }
    let mut search = Search::new(target, source, options.max_fiber);
    let mut best: Option<(usize, Vec<Option<Vertex>>)> = None;
    let mut bound = options.max_size.map_or(usize::MAX, |s| s + 1);
    search.run(0, 0, &mut bound, &mut |pi, used| {
        best = Some((used, pi.to_vec()));
        used
    });
    Ok(match best {
        None => OracleResult::Infeasible,
        Some((size, pi)) => OracleResult::Minimum { size, witness: Embedding::from_projection(&pi, m) },
    })
}

/// Every embedding (as `π`), optionally restricted by size and fiber caps.
pub fn enumerate_embeddings(target: &Graph, source: &Graph, options: &OracleOptions) -> Result<Vec<Embedding>, OracleError> {
    check_cap(target, options.max_target_vertices)?;
    let m = source.num_vertices();
    let mut all = Vec::new();
    if m > target.num_vertices() {
        return Ok(all);
    }
    let mut search = Search::new(target, source, options.max_fiber);
    let limit = options.max_size.map_or(usize::MAX, |s| s + 1);
    let mut bound = limit;
    search.run(0, 0, &mut bound, &mut |pi, _| {
        all.push(Embedding::from_projection(pi, m));
        limit
    });
    Ok(all)
}

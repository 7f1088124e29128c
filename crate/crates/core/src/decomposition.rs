//! Master/subproblem decomposition: a relaxed master without connectivity,
//! and a combinatorial check that adds one "grow the model" cut for every
//! disconnected vertex model until the master returns a true embedding.
//!
//! Master variables: `a_x_y` as in the monolithic program, `zp_e_f` /
//! `zq_e_f` for target edge `e` realizing source edge `f` with parallel /
//! crossed orientation, and `w_y` marking models of two or more vertices.

use std::collections::HashSet;
use std::time::{Duration, Instant};

pub use crate::embedding::DisconnectedModel;
use crate::embedding::{
    EmbedObjective, EmbedOutcome, EmbedProblem, EmbedStats, Embedding, IterationTrace, Orientation, VarCatalog,
};
use crate::error::EmbedError;
use crate::graph::{Graph, Vertex};
use crate::milp::{solve, LinearConstraint, Model, SolveLimits, SolveStats, SolveStatus};
use crate::monolithic::{add_alpha, add_assignment_rows, decode, size_objective};

pub mod tags {
    pub const EDGE_ASSIGN: &str = "edge_assign";
    pub const Z_LINK: &str = "z_link";
    pub const Z_AGGREGATE: &str = "z_aggregate";
    pub const W_SIZE: &str = "w_size";
    pub const W_NEIGHBOR: &str = "w_neighbor";
    pub const CUT: &str = "connectivity_cut";
}

/// Builds the master without any cuts. Fibers are capped at `problem.k`;
/// pass `k ≥ |V(X)|` for the uncapped relaxation.
pub fn build_master(problem: &EmbedProblem) -> Result<(Model, VarCatalog), EmbedError> {
    problem.validate()?;
    let x_graph = &problem.target;
    let y_graph = &problem.source;
    let n = x_graph.num_vertices();
    let m = y_graph.num_vertices();
    let mut model = Model::new();
    let alpha = add_alpha(&mut model, n, m)?;
    add_assignment_rows(&mut model, &alpha, m, problem.k.min(n))?;

    let mut catalog = VarCatalog { alpha, ..Default::default() };
    for (f, &(y1, y2)) in y_graph.edges().iter().enumerate() {
        let mut choose = Vec::with_capacity(2 * x_graph.num_edges());
        for (e, &(x1, x2)) in x_graph.edges().iter().enumerate() {
            let a = &catalog.alpha;
            let zp = model.add_var(format!("zp_{e}_{f}"))?;
            let zq = model.add_var(format!("zq_{e}_{f}"))?;
            for (z, (u, v)) in [(zp, (a[x1][y1], a[x2][y2])), (zq, (a[x1][y2], a[x2][y1]))] {
                model.add_constraint(LinearConstraint::at_most(vec![(1, z), (-1, u)], 0, tags::Z_LINK))?;
                model.add_constraint(LinearConstraint::at_most(vec![(1, z), (-1, v)], 0, tags::Z_LINK))?;
                // Implied by the two rows above; kept as in the published model.
                model.add_constraint(LinearConstraint::at_most(vec![(2, z), (-1, u), (-1, v)], 0, tags::Z_AGGREGATE))?;
            }
            catalog.z.insert((e, f, Orientation::Parallel), zp);
            catalog.z.insert((e, f, Orientation::Crossed), zq);
            choose.push((1, zp));
            choose.push((1, zq));
        }
        model.add_constraint(LinearConstraint::equal(choose, 1, tags::EDGE_ASSIGN))?;
    }

    let big = n as i64;
    for y in 0..m {
        let w = model.add_var(format!("w_{y}"))?;
        let mut size: Vec<(i64, _)> = catalog.alpha.iter().map(|row| (1, row[y])).collect();
        size.push((-big, w));
        model.add_constraint(LinearConstraint::at_most(size, 1, tags::W_SIZE))?;
        // A member of a multi-vertex model has a neighbor in the same model.
        for x in 0..n {
            let mut terms = vec![(-big, catalog.alpha[x][y]), (-1, w)];
            terms.extend(x_graph.neighbors(x).iter().map(|&l| (1, catalog.alpha[l][y])));
            model.add_constraint(LinearConstraint::at_least(terms, -big, tags::W_NEIGHBOR))?;
        }
        catalog.w.push(w);
    }

    if problem.objective == EmbedObjective::MinSize {
        model.set_objective(size_objective(&catalog.alpha))?;
    }
    Ok((model, catalog))
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ConnectivityReport {
    pub disconnected: Vec<DisconnectedModel>,
}

impl ConnectivityReport {
    pub fn is_connected(&self) -> bool {
        self.disconnected.is_empty()
    }
}

/// Checks every candidate model for connectivity in `target`.
pub fn check_connectivity(models: &[Vec<Vertex>], target: &Graph) -> Result<ConnectivityReport, EmbedError> {
    let mut report = ConnectivityReport::default();
    for (y, model) in models.iter().enumerate() {
        if model.is_empty() || target.is_connected_subset(model)? {
            continue;
        }
        let mut inside = vec![false; target.num_vertices()];
        for &x in model {
            inside[x] = true;
        }
        let mut boundary: Vec<Vertex> =
            model.iter().flat_map(|&x| target.neighbors(x).iter().copied()).filter(|&v| !inside[v]).collect();
        boundary.sort_unstable();
        boundary.dedup();
        report.disconnected.push(DisconnectedModel { source: y, model: model.clone(), boundary });
    }
    Ok(report)
}

/// `(|φ| − Σ_{x∈φ} α_xy) + Σ_{x∈∂φ} α_xy ≥ 1`: drop a vertex of the model
/// or add one of its neighbors.
pub fn make_cut(d: &DisconnectedModel, catalog: &VarCatalog) -> LinearConstraint {
    let mut terms: Vec<_> = d.model.iter().map(|&x| (-1, catalog.alpha(x, d.source))).collect();
    terms.extend(d.boundary.iter().map(|&x| (1, catalog.alpha(x, d.source))));
    LinearConstraint::at_least(terms, 1 - d.model.len() as i64, tags::CUT)
}

/// Total iterations, including the final connected solve.
const DEFAULT_MAX_ITERATIONS: usize = 100_000;

#[derive(Debug, Clone)]
pub struct DecompositionOptions {
    pub max_iterations: usize,
    /// Called with each trace entry as it is produced.
    pub log: Option<fn(&IterationTrace)>,
}

impl Default for DecompositionOptions {
    fn default() -> Self {
        DecompositionOptions { max_iterations: DEFAULT_MAX_ITERATIONS, log: None }
    }
}

pub fn solve_decomposition(problem: &EmbedProblem) -> Result<EmbedOutcome, EmbedError> {
    solve_decomposition_with(problem, &DecompositionOptions::default())
}

/// Runs the cut loop. With a min-size objective, each master optimum is a
/// valid lower bound and is passed on as the floor of the next solve.
pub fn solve_decomposition_with(problem: &EmbedProblem, options: &DecompositionOptions) -> Result<EmbedOutcome, EmbedError> {
    problem.validate()?;
    if problem.is_trivially_infeasible() {
        return Ok(EmbedOutcome::trivially_infeasible(problem));
    }
    let start = Instant::now();
    let (mut model, catalog) = build_master(problem)?;
    let m = problem.source.num_vertices();
    let min_size = problem.objective == EmbedObjective::MinSize;
    let mut bound = m as i64;
    let mut solve_stats = SolveStats::default();
    let mut trace = Vec::new();
    let mut cuts: Vec<LinearConstraint> = Vec::new();
    let mut seen: HashSet<Vec<bool>> = HashSet::new();

    let finish = |status: SolveStatus,
                  embedding: Option<Embedding>,
                  bound: i64,
                  reason: Option<String>,
                  model: &Model,
                  solve_stats: SolveStats,
                  trace: Vec<IterationTrace>,
                  cuts: usize| {
        let stats = EmbedStats {
            solve: solve_stats,
            num_vars: model.num_vars(),
            num_constraints: model.num_constraints(),
            iterations: trace.len(),
            cuts,
            wall_time: start.elapsed(),
        };
        EmbedOutcome { status, embedding, best_bound: bound, k: problem.k, reason, stats, trace }
    };

    for iteration in 1..=options.max_iterations {
        let limits = SolveLimits {
            time_limit: problem.limits.time_limit.map(|t| t.saturating_sub(start.elapsed())),
            node_limit: problem.limits.node_limit,
            objective_floor: if min_size { Some(bound) } else { None },
        };
        if limits.time_limit == Some(Duration::ZERO) {
            let reason = Some("time limit reached in the cut loop".to_string());
            return Ok(finish(SolveStatus::Timeout, None, bound, reason, &model, solve_stats, trace, cuts.len()));
        }
        let out = solve(&model, &limits)?;
        solve_stats.accumulate(&out.stats);
        if min_size && out.status != SolveStatus::Infeasible {
            bound = bound.max(out.best_bound);
        }
        let Some(assignment) = out.assignment else {
            let entry = IterationTrace::new(iteration, None, Vec::new(), start.elapsed());
            log(options, &entry);
            trace.push(entry);
            let (status, reason) = match out.status {
                SolveStatus::Infeasible => {
                    (SolveStatus::Infeasible, format!("no embedding with fibers of at most {} vertices", problem.k))
                }
                _ => (SolveStatus::Timeout, "time limit reached before any embedding was found".to_string()),
            };
            return Ok(finish(status, None, bound, Some(reason), &model, solve_stats, trace, cuts.len()));
        };

        let candidate = catalog.candidate_models(&assignment, m);
        let report = check_connectivity(&candidate, &problem.target)?;
        let master_objective = min_size.then(|| model.objective_value(&assignment));
        if report.is_connected() {
            let entry = IterationTrace::new(iteration, master_objective, Vec::new(), start.elapsed());
            log(options, &entry);
            trace.push(entry);
            let embedding = decode(&catalog, &assignment, &problem.target, &problem.source)?;
            if let Some(c) = cuts.iter().find(|c| !c.is_satisfied(&assignment)) {
                return Err(EmbedError::CutCheck(format!("final embedding violates cut {:?}", c.terms)));
            }
            let status = match out.status {
                SolveStatus::Timeout => SolveStatus::Timeout,
                _ if min_size => SolveStatus::Optimal,
                _ => SolveStatus::Feasible,
            };
            if status == SolveStatus::Optimal {
                bound = embedding.size() as i64;
            }
            return Ok(finish(status, Some(embedding), bound, None, &model, solve_stats, trace, cuts.len()));
        }

        let bits = catalog.alpha_bits(&assignment);
        if !seen.insert(bits) {
            return Err(EmbedError::CutCheck(format!("iteration {iteration} repeated an already cut α vector")));
        }
        for d in &report.disconnected {
            let cut = make_cut(d, &catalog);
            if cut.is_satisfied(&assignment) {
                return Err(EmbedError::CutCheck(format!("cut for source vertex {} does not separate", d.source)));
            }
            model.add_constraint(cut.clone())?;
            cuts.push(cut);
        }
        let entry = IterationTrace::new(iteration, master_objective, report.disconnected, start.elapsed());
        log(options, &entry);
        trace.push(entry);
        // Phases start from the previous master solution.
        model.set_hint(assignment)?;

        if out.status == SolveStatus::Timeout {
            let reason = Some("time limit reached in the cut loop".to_string());
            return Ok(finish(SolveStatus::Timeout, None, bound, reason, &model, solve_stats, trace, cuts.len()));
        }
    }
    let reason = Some(format!("iteration limit {} reached", options.max_iterations));
    Ok(finish(SolveStatus::Timeout, None, bound, reason, &model, solve_stats, trace, cuts.len()))
}

fn log(options: &DecompositionOptions, entry: &IterationTrace) {
    if let Some(f) = options.log {
        f(entry);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn master_sizes() {
        let p = EmbedProblem::new(Graph::cycle(4), Graph::complete(3), 4, EmbedObjective::MinSize);
        let (model, cat) = build_master(&p).unwrap();
        assert_eq!(cat.num_alpha(), 12);
        assert_eq!(cat.z.len(), 2 * 4 * 3);
        assert_eq!(cat.w.len(), 3);
        assert_eq!(model.num_vars(), 12 + 24 + 3);
    }

    #[test]
    fn cut_on_split_model() {
        let x = Graph::path(5);
        let report = check_connectivity(&[vec![0, 2], vec![1]], &x).unwrap();
        assert_eq!(report.disconnected.len(), 1);
        let d = &report.disconnected[0];
        assert_eq!(d.source, 0);
        assert_eq!(d.boundary, vec![1, 3]);
        let p = EmbedProblem::new(x, Graph::complete(2), 5, EmbedObjective::MinSize);
        let (_, cat) = build_master(&p).unwrap();
        let cut = make_cut(d, &cat);
        assert_eq!(cut.lower, Some(-1));
        assert_eq!(cut.terms.len(), 4);
    }

    #[test]
    fn triangle_into_square() {
        let p = EmbedProblem::new(Graph::cycle(4), Graph::complete(3), 4, EmbedObjective::MinSize);
        let out = solve_decomposition(&p).unwrap();
        assert_eq!(out.status, SolveStatus::Optimal);
        assert_eq!(out.size(), Some(4));
        assert_eq!(out.stats.iterations, out.trace.len());
    }

    #[test]
    fn impossible_instance() {
        let p = EmbedProblem::new(Graph::cycle(5), Graph::complete(4), 5, EmbedObjective::MinSize);
        let out = solve_decomposition(&p).unwrap();
        assert_eq!(out.status, SolveStatus::Infeasible);
    }
}

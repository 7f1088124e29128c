//! Single 0-1 program for minor embedding with fibers of at most `k`
//! vertices, connectivity enforced through enumerated short paths.
//!
//! Variables:
//!
//! * `a_x_y`: target vertex `x` lies in the model of source vertex `y`;
//! * `g_x1_x2_p_y`: the `p`-th simple path between the non-adjacent pair
//!   `x1 < x2` is selected as the connection inside the model of `y`;
//! * `dp_e_f` / `dq_e_f`: target edge `e` realizes source edge `f` with
//!   parallel / crossed orientation (products of two α's).

use std::time::Instant;

use crate::embedding::{EmbedObjective, EmbedOutcome, EmbedProblem, EmbedStats, Embedding, GammaVar, VarCatalog};
use crate::error::EmbedError;
use crate::graph::{Graph, Vertex};
use crate::milp::{solve, LinearConstraint, Model, SolveStatus, VarId};
use crate::verify::verify_embedding;

/// Constraint tags emitted by [`build_monolithic`].
pub mod tags {
    pub const TOTAL_SIZE: &str = "total_size";
    pub const WELL_DEFINED: &str = "well_defined";
    pub const FIBER_SIZE: &str = "fiber_size";
    pub const DISTANCE: &str = "distance_exclusion";
    pub const FIBER_PATH_MAX: &str = "fiber_path_max";
    pub const PATH_LINK: &str = "path_link";
    pub const FIBER_PATH_MIN: &str = "fiber_path_min";
    pub const UNIQUE_PATH: &str = "unique_path";
    pub const PULLBACK: &str = "pullback";
    pub const DELTA_LINK: &str = "delta_link";
    pub const DELTA_PRODUCT: &str = "delta_product";
    pub const DELTA_EXCLUSIVE: &str = "delta_exclusive";
}

pub(crate) fn add_alpha(model: &mut Model, n: usize, m: usize) -> Result<Vec<Vec<VarId>>, EmbedError> {
    let mut alpha = Vec::with_capacity(n);
    for x in 0..n {
        let mut row = Vec::with_capacity(m);
        for y in 0..m {
            row.push(model.add_var(format!("a_{x}_{y}"))?);
        }
        alpha.push(row);
    }
    Ok(alpha)
}

/// `Σ_y α_xy ≤ 1` for each `x` and `1 ≤ Σ_x α_xy ≤ k` for each `y`.
pub(crate) fn add_assignment_rows(model: &mut Model, alpha: &[Vec<VarId>], m: usize, k: usize) -> Result<(), EmbedError> {
    for row in alpha {
        model.add_constraint(LinearConstraint::at_most(row.iter().map(|&v| (1, v)).collect(), 1, tags::WELL_DEFINED))?;
    }
    for y in 0..m {
        let terms = alpha.iter().map(|row| (1, row[y])).collect();
        model.add_constraint(LinearConstraint::new(terms, Some(1), Some(k as i64), tags::FIBER_SIZE))?;
    }
    Ok(())
}

pub(crate) fn size_objective(alpha: &[Vec<VarId>]) -> Vec<(i64, VarId)> {
    alpha.iter().flatten().map(|&v| (1, v)).collect()
}

/// Builds the monolithic program for `problem`.
pub fn build_monolithic(problem: &EmbedProblem) -> Result<(Model, VarCatalog), EmbedError> {
    problem.validate()?;
    let x_graph = &problem.target;
    let y_graph = &problem.source;
    let n = x_graph.num_vertices();
    let m = y_graph.num_vertices();
    let k = problem.k;
    let mut model = Model::new();
    let alpha = add_alpha(&mut model, n, m)?;

    let all: Vec<(i64, VarId)> = size_objective(&alpha);
    model.add_constraint(LinearConstraint::new(all.clone(), Some(m as i64), Some(n as i64), tags::TOTAL_SIZE))?;
    add_assignment_rows(&mut model, &alpha, m, k)?;

    let mut gamma = Vec::new();
    let dist = x_graph.distance_matrix();
    for x1 in 0..n {
        for x2 in (x1 + 1)..n {
            let reach = matches!(dist[x1][x2], Some(d) if d < k);
            if !reach {
                // Too far apart to share a fiber of k vertices.
                for y in 0..m {
                    model.add_constraint(LinearConstraint::at_most(
                        vec![(1, alpha[x1][y]), (1, alpha[x2][y])],
                        1,
                        tags::DISTANCE,
                    ))?;
                }
                continue;
            }
            if x_graph.has_edge(x1, x2) {
                continue;
            }
            let paths = x_graph.enumerate_paths(x1, x2, k)?;
            for y in 0..m {
                let mut gs = Vec::with_capacity(paths.len());
                for (p, path) in paths.iter().enumerate() {
                    let g = model.add_var(format!("g_{x1}_{x2}_{p}_{y}"))?;
                    for &l in path.interior() {
                        model.add_constraint(LinearConstraint::at_most(vec![(1, g), (-1, alpha[l][y])], 0, tags::PATH_LINK))?;
                    }
                    gamma.push(GammaVar { path: path.clone(), source: y, var: g });
                    gs.push(g);
                }
                let ends = [(1, alpha[x1][y]), (1, alpha[x2][y])];
                let with = |sign: i64| ends.iter().copied().chain(gs.iter().map(move |&g| (sign, g))).collect::<Vec<_>>();
                // Both ends in the fiber: at most one selected path ...
                model.add_constraint(LinearConstraint::at_most(with(1), 3, tags::FIBER_PATH_MAX))?;
                // ... and at least one.
                model.add_constraint(LinearConstraint::at_most(with(-1), 1, tags::FIBER_PATH_MIN))?;
                if problem.unique_fiber_path {
                    model.add_constraint(LinearConstraint::at_most(gs.iter().map(|&g| (1, g)).collect(), 1, tags::UNIQUE_PATH))?;
                }
            }
        }
    }

    let mut catalog = VarCatalog { alpha, gamma, ..Default::default() };
    for (f, &(y1, y2)) in y_graph.edges().iter().enumerate() {
        let mut cover = Vec::with_capacity(2 * x_graph.num_edges());
        for (e, &(x1, x2)) in x_graph.edges().iter().enumerate() {
            let dp = model.add_var(format!("dp_{e}_{f}"))?;
            let dq = model.add_var(format!("dq_{e}_{f}"))?;
            let a = &catalog.alpha;
            for (d, (u, v)) in [(dp, (a[x1][y1], a[x2][y2])), (dq, (a[x1][y2], a[x2][y1]))] {
                model.add_constraint(LinearConstraint::at_most(vec![(1, d), (-1, u)], 0, tags::DELTA_LINK))?;
                model.add_constraint(LinearConstraint::at_most(vec![(1, d), (-1, v)], 0, tags::DELTA_LINK))?;
                model.add_constraint(LinearConstraint::at_least(vec![(1, d), (-1, u), (-1, v)], -1, tags::DELTA_PRODUCT))?;
            }
            model.add_constraint(LinearConstraint::at_most(vec![(1, dp), (1, dq)], 1, tags::DELTA_EXCLUSIVE))?;
            catalog.delta_par.insert((e, f), dp);
            catalog.delta_perp.insert((e, f), dq);
            cover.push((1, dp));
            cover.push((1, dq));
        }
        model.add_constraint(LinearConstraint::at_least(cover, 1, tags::PULLBACK))?;
    }

    if problem.objective == EmbedObjective::MinSize {
        model.set_objective(all)?;
    }
    Ok((model, catalog))
}

/// Reads the vertex models off an assignment and verifies them.
pub fn decode(
    catalog: &VarCatalog,
    assignment: &[bool],
    target: &Graph,
    source: &Graph,
) -> Result<Embedding, EmbedError> {
    let embedding = Embedding::new(catalog.candidate_models(assignment, source.num_vertices()));
    let report = verify_embedding(&embedding, target, source)?;
    if let Some(v) = report.violations.first() {
        return Err(EmbedError::Inconsistent(v.to_string()));
    }
    Ok(embedding)
}

/// Builds and solves the monolithic program. The verdict is relative to
/// the fiber bound `k`.
pub fn solve_monolithic(problem: &EmbedProblem) -> Result<EmbedOutcome, EmbedError> {
    problem.validate()?;
    if problem.is_trivially_infeasible() {
        return Ok(EmbedOutcome::trivially_infeasible(problem));
    }
    let start = Instant::now();
    let (model, catalog) = build_monolithic(problem)?;
    let out = solve(&model, &problem.limits)?;
    let embedding = match &out.assignment {
        Some(a) => Some(decode(&catalog, a, &problem.target, &problem.source)?),
        None => None,
    };
    let m = problem.source.num_vertices() as i64;
    let best_bound = match (problem.objective, out.status) {
        (EmbedObjective::MinSize, _) => out.best_bound.max(m),
        (EmbedObjective::Feasibility, _) => m,
    };
    let reason = match out.status {
        SolveStatus::Infeasible => Some(format!("no embedding with fibers of at most {} vertices", problem.k)),
        SolveStatus::Timeout if embedding.is_none() => Some("time limit reached before any embedding was found".into()),
        _ => None,
    };
    let stats = EmbedStats {
        solve: out.stats.clone(),
        num_vars: model.num_vars(),
        num_constraints: model.num_constraints(),
        iterations: 1,
        cuts: 0,
        wall_time: start.elapsed(),
    };
    Ok(EmbedOutcome { status: out.status, embedding, best_bound, k: problem.k, reason, stats, trace: Vec::new() })
}

/// α coordinates `(x, y)` of every variable named `a_x_y`.
pub fn alpha_coordinates(model: &Model) -> Vec<(VarId, Vertex, Vertex)> {
    model
        .var_names()
        .iter()
        .enumerate()
        .filter_map(|(i, name)| {
            let mut it = name.strip_prefix("a_")?.split('_');
            let x = it.next()?.parse().ok()?;
            let y = it.next()?.parse().ok()?;
            Some((VarId(i), x, y))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::topology::{gen_chimera, ChimeraSpec};

    #[test]
    fn variable_counts_on_single_cell() {
        let x = gen_chimera(ChimeraSpec { l: 4, m: 1, n: 1 }).unwrap();
        let y = Graph::complete(3);
        let p = EmbedProblem::new(x, y, 3, EmbedObjective::MinSize);
        let (model, cat) = build_monolithic(&p).unwrap();
        assert_eq!(cat.num_alpha(), 24);
        // 12 non-adjacent same-side pairs, 4 paths each, for 3 sources.
        assert_eq!(cat.gamma.len(), 144);
        assert_eq!(cat.delta_par.len(), 16 * 3);
        assert_eq!(model.num_vars(), 24 + 144 + 2 * 48);
        assert_eq!(alpha_coordinates(&model).len(), 24);
    }

    #[test]
    fn triangle_into_square() {
        let p = EmbedProblem::new(Graph::cycle(4), Graph::complete(3), 2, EmbedObjective::MinSize);
        let out = solve_monolithic(&p).unwrap();
        assert_eq!(out.status, SolveStatus::Optimal);
        assert_eq!(out.size(), Some(4));
        assert_eq!(out.best_bound, 4);
    }

    #[test]
    fn fiber_bound_one_is_subgraph_isomorphism() {
        let p = EmbedProblem::new(Graph::cycle(4), Graph::complete(3), 1, EmbedObjective::MinSize);
        let out = solve_monolithic(&p).unwrap();
        assert_eq!(out.status, SolveStatus::Infeasible);
        assert!(out.reason.unwrap().contains("at most 1"));
    }

    #[test]
    fn trivial_infeasibility() {
        let p = EmbedProblem::new(Graph::complete(3), Graph::complete(4), 3, EmbedObjective::MinSize);
        let out = solve_monolithic(&p).unwrap();
        assert_eq!(out.status, SolveStatus::Infeasible);
        assert!(out.reason.unwrap().starts_with("trivially infeasible"));
    }

    #[test]
    fn feasibility_mode() {
        let p = EmbedProblem::new(Graph::cycle(5), Graph::complete(3), 3, EmbedObjective::Feasibility);
        let out = solve_monolithic(&p).unwrap();
        assert_eq!(out.status, SolveStatus::Feasible);
        assert!(out.embedding.is_some());
    }
}

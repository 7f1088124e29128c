use minorcast::decomposition::solve_decomposition;
use minorcast::milp::{SolveLimits, SolveStatus};
use minorcast::topology::{
    gen_chimera, gen_erdos_renyi, gen_pegasus, gen_structured, gen_structured_detailed, illustrative_example,
    ChimeraSpec, ErdosRenyiSpec, PegasusSpec, StructuredCells, StructuredSpec,
};
use minorcast::verify::verify_embedding;
use minorcast::{EmbedObjective, EmbedProblem, Embedding, Graph};

/// Edge count of `C_{L,M,N}` by testing the coupling rule on every
/// coordinate pair.
fn chimera_edges_by_rule(l: usize, m: usize, n: usize) -> usize {
    let mut coords = Vec::new();
    for row in 0..m {
        for col in 0..n {
            for side in 0..2 {
                for idx in 0..l {
                    coords.push((row, col, side, idx));
                }
            }
        }
    }
    let mut count = 0;
    for (i, a) in coords.iter().enumerate() {
        for b in &coords[i + 1..] {
            let same_cell = a.0 == b.0 && a.1 == b.1;
            let intra = same_cell && a.2 != b.2;
            let horizontal = a.2 == 0 && b.2 == 0 && a.3 == b.3 && a.0 == b.0 && a.1.abs_diff(b.1) == 1;
            let vertical = a.2 == 1 && b.2 == 1 && a.3 == b.3 && a.1 == b.1 && a.0.abs_diff(b.0) == 1;
            if intra || horizontal || vertical {
                count += 1;
            }
        }
    }
    count
}

#[test]
fn chimera_counts_for_small_grids() {
    for l in 1..=4 {
        for m in 1..=4 {
            for n in 1..=4 {
                let g = gen_chimera(ChimeraSpec::new(l, m, n)).unwrap();
                assert_eq!(g.num_vertices(), 2 * l * m * n);
                let formula = l * l * m * n + l * (m * (n - 1) + (m - 1) * n);
                assert_eq!(g.num_edges(), formula, "C_{{{l},{m},{n}}}");
                assert_eq!(g.num_edges(), chimera_edges_by_rule(l, m, n));
                assert!(g.bipartition().is_some());
            }
        }
    }
    assert_eq!(gen_chimera(ChimeraSpec::new(4, 16, 16)).unwrap().num_vertices(), 2048);
}

#[test]
fn pegasus_layers() {
    assert_eq!(gen_pegasus(PegasusSpec::new(1, 1)).unwrap().num_vertices(), 24);
    for (m, n) in [(1, 1), (2, 2), (2, 3)] {
        let p = gen_pegasus(PegasusSpec::new(m, n)).unwrap();
        assert_eq!(p.num_vertices(), 96 * m * n / 4);
        let c = gen_chimera(ChimeraSpec::new(4, m, n)).unwrap();
        let per_layer = c.num_vertices();
        for v in p.vertices() {
            assert!(p.degree(v) >= c.degree(v % per_layer));
        }
        assert!(p.is_connected());
    }
}

#[test]
fn erdos_renyi_extremes_and_determinism() {
    let empty = gen_erdos_renyi(ErdosRenyiSpec { nu: 7, p: 0.0, seed: 1 }).unwrap();
    assert_eq!((empty.num_vertices(), empty.num_edges()), (7, 0));
    assert_eq!(gen_erdos_renyi(ErdosRenyiSpec { nu: 7, p: 1.0, seed: 1 }).unwrap(), Graph::complete(7));
    let spec = ErdosRenyiSpec { nu: 10, p: 0.5, seed: 7 };
    assert_eq!(gen_erdos_renyi(spec).unwrap(), gen_erdos_renyi(spec).unwrap());
    assert_ne!(gen_erdos_renyi(spec).unwrap(), gen_erdos_renyi(ErdosRenyiSpec { seed: 8, ..spec }).unwrap());
    assert!(gen_erdos_renyi(ErdosRenyiSpec { nu: 3, p: 1.5, seed: 0 }).is_err());
}

fn structured(zeta: usize, p_inter: f64, p_intra: f64, seed: u64) -> StructuredSpec {
    StructuredSpec { zeta, p_inter, p_intra, cells: StructuredCells::Two, seed }
}

#[test]
fn structured_full_density_is_the_host() {
    let g = gen_structured(structured(0, 1.0, 1.0, 0)).unwrap();
    assert_eq!(g, gen_chimera(ChimeraSpec::new(4, 1, 2)).unwrap());
    let four = gen_structured(StructuredSpec { cells: StructuredCells::Four, ..structured(0, 1.0, 1.0, 0) }).unwrap();
    assert_eq!(four, gen_chimera(ChimeraSpec::new(4, 2, 2)).unwrap());
}

#[test]
fn structured_vertex_budget() {
    for seed in 0..30 {
        for zeta in 0..=3 {
            for p in [0.3, 0.5, 1.0] {
                let inst = gen_structured_detailed(structured(zeta, p, 0.5, seed)).unwrap();
                assert_eq!(inst.contracted.len(), zeta);
                assert_eq!(inst.graph.num_vertices(), 16 - zeta - inst.dropped_vertices.len());
                assert!(inst.graph.is_connected());
                let mut ends: Vec<_> = inst.contracted.iter().flat_map(|&(u, v)| [u, v]).collect();
                ends.sort_unstable();
                ends.dedup();
                assert_eq!(ends.len(), 2 * zeta, "contracted edges are disjoint");
            }
        }
    }
}

#[test]
fn structured_forces_an_attachment() {
    let inst = gen_structured_detailed(structured(0, 1.0, 0.0, 4)).unwrap();
    assert!(inst.forced_attachment);
    assert_eq!(inst.graph.num_edges(), 33);
}

#[test]
fn structured_is_deterministic() {
    for seed in 0..5 {
        let s = structured(2, 0.5, 0.5, seed);
        assert_eq!(gen_structured_detailed(s).unwrap().graph, gen_structured_detailed(s).unwrap().graph);
    }
}

#[test]
fn structured_retries_run_out() {
    // Four disjoint edges need a perfect matching of the random cell.
    assert!(gen_structured(structured(5, 1.0, 1.0, 0)).is_err());
}

#[test]
fn structured_graphs_are_host_minors() {
    let host = gen_chimera(ChimeraSpec::new(4, 1, 2)).unwrap();
    for seed in 0..6 {
        let source = gen_structured(structured(1 + (seed as usize % 3), 0.5, 0.5, seed)).unwrap();
        let mut p = EmbedProblem::new(host.clone(), source.clone(), 16, EmbedObjective::Feasibility);
        p.limits = SolveLimits::with_time_limit(60.0);
        let out = solve_decomposition(&p).unwrap();
        assert_eq!(out.status, SolveStatus::Feasible, "seed {seed}");
        let e = out.embedding.unwrap();
        assert!(verify_embedding(&e, &host, &source).unwrap().is_valid());
    }
}

#[test]
fn illustrative_shape() {
    let g = illustrative_example();
    assert_eq!((g.num_vertices(), g.num_edges()), (12, 22));
    // The block is a K_4 minus the edge 2–3, so it has a triangle.
    for (u, v) in [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3)] {
        assert!(g.has_edge(u, v));
    }
    assert!(!g.has_edge(2, 3));
    assert!(g.has_edge(1, 5));
    for a in 4..8 {
        for b in 8..12 {
            assert!(g.has_edge(a, b));
        }
    }
    assert!(g.is_connected());
    assert!(g.bipartition().is_none());
}

#[test]
fn illustrative_has_a_thirteen_qubit_embedding() {
    let host = gen_chimera(ChimeraSpec::new(4, 1, 2)).unwrap();
    let g = illustrative_example();
    let mut models = vec![vec![0, 4], vec![1], vec![5], vec![6]];
    models.extend((8..16).map(|x| vec![x]));
    let e = Embedding::new(models);
    let report = verify_embedding(&e, &host, &g).unwrap();
    assert!(report.is_valid(), "{:?}", report.violations);
    assert_eq!(report.size, 13);
}

//! Instance generators: Chimera, a Pegasus-style layered variant,
//! Erdős–Rényi graphs, and the structured contracted-biclique family.
//!
//! # Chimera numbering
//!
//! `C_{L,M,N}` has `M × N` cells, each a `K_{L,L}`. Vertex
//! `(row, col, side, idx)` gets id `((row·N + col)·2 + side)·L + idx`.
//! Side 0 vertices are joined to the same index in the cell to the right,
//! side 1 vertices to the same index in the cell below.
//!
//! # Pegasus-style layout
//!
//! `P_{4,M,N,3}` stacks three copies of `C_{4,M,N}`; layer `l` occupies ids
//! `l·32MN .. (l+1)·32MN`. Every cell gains four odd-pair edges, joining
//! indices `0–1` and `2–3` on each side. Each vertex is coupled to the
//! vertex with the same `(row, col, side, idx)` in the next layer. This is
//! a fixed stand-in for the vendor topology; exact hardware graphs can be
//! supplied as edge-list files instead.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::TopologyError;
use crate::graph::{Graph, Vertex};

/// Chimera `C_{L,M,N}`: `M × N` grid of `K_{L,L}` cells.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChimeraSpec {
    pub l: usize,
    pub m: usize,
    pub n: usize,
}

impl ChimeraSpec {
    pub fn new(l: usize, m: usize, n: usize) -> Self {
        ChimeraSpec { l, m, n }
    }

    pub fn num_vertices(&self) -> usize {
        2 * self.l * self.m * self.n
    }

    /// `L²MN + L(M(N−1) + (M−1)N)`.
    pub fn num_edges(&self) -> usize {
        let (l, m, n) = (self.l, self.m, self.n);
        l * l * m * n + l * (m * (n - 1) + (m - 1) * n)
    }

    pub fn vertex(&self, row: usize, col: usize, side: usize, idx: usize) -> Vertex {
        ((row * self.n + col) * 2 + side) * self.l + idx
    }

    fn validate(&self) -> Result<(), TopologyError> {
        if self.l == 0 || self.m == 0 || self.n == 0 {
            return Err(TopologyError::InvalidSpec(format!("Chimera dimensions must be positive, got {self:?}")));
        }
        Ok(())
    }
}

/// Pegasus-style `P_{L,M,N,O}`; only `L = 4`, `O = 3` is accepted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PegasusSpec {
    pub l: usize,
    pub m: usize,
    pub n: usize,
    pub o: usize,
}

impl PegasusSpec {
    pub fn new(m: usize, n: usize) -> Self {
        PegasusSpec { l: 4, m, n, o: 3 }
    }

    pub fn num_vertices(&self) -> usize {
        2 * self.l * self.m * self.n * self.o
    }

    fn validate(&self) -> Result<(), TopologyError> {
        if self.l != 4 || self.o != 3 {
            return Err(TopologyError::InvalidSpec(format!(
                "Pegasus layout is fixed at L=4, O=3, got L={} O={}",
                self.l, self.o
            )));
        }
        ChimeraSpec::new(self.l, self.m, self.n).validate()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErdosRenyiSpec {
    pub nu: usize,
    pub p: f64,
    pub seed: u64,
}

/// Host layout of the structured family: a one-row `C_{4,1,2}` or `C_{4,2,2}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StructuredCells {
    Two,
    Four,
}

impl StructuredCells {
    pub fn count(self) -> usize {
        match self {
            StructuredCells::Two => 2,
            StructuredCells::Four => 4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StructuredSpec {
    pub zeta: usize,
    pub p_inter: f64,
    pub p_intra: f64,
    pub cells: StructuredCells,
    pub seed: u64,
}

/// A structured instance plus the generator decisions worth reporting.
#[derive(Debug, Clone, PartialEq)]
pub struct StructuredInstance {
    pub graph: Graph,
    /// Contracted edges, in host (`C_{4,1,2}` / `C_{4,2,2}`) vertex ids.
    pub contracted: Vec<(Vertex, Vertex)>,
    /// An attachment edge had to be forced because none was sampled.
    pub forced_attachment: bool,
    /// Host vertices dropped because they ended up outside the component
    /// of the complete biclique.
    pub dropped_vertices: Vec<Vertex>,
    pub attempts: usize,
}

const MAX_STRUCTURED_ATTEMPTS: usize = 200;

fn check_probability(name: &str, p: f64) -> Result<(), TopologyError> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(TopologyError::InvalidSpec(format!("{name} must lie in [0, 1], got {p}")))
    }
}

fn chimera_edges(spec: &ChimeraSpec) -> Vec<(Vertex, Vertex)> {
    let mut edges = Vec::with_capacity(spec.num_edges());
    for row in 0..spec.m {
        for col in 0..spec.n {
            for a in 0..spec.l {
                for b in 0..spec.l {
                    edges.push((spec.vertex(row, col, 0, a), spec.vertex(row, col, 1, b)));
                }
            }
            for idx in 0..spec.l {
                if col + 1 < spec.n {
                    edges.push((spec.vertex(row, col, 0, idx), spec.vertex(row, col + 1, 0, idx)));
                }
                if row + 1 < spec.m {
                    edges.push((spec.vertex(row, col, 1, idx), spec.vertex(row + 1, col, 1, idx)));
                }
            }
        }
    }
    edges
}

pub fn gen_chimera(spec: ChimeraSpec) -> Result<Graph, TopologyError> {
    spec.validate()?;
    Ok(Graph::from_edges(spec.num_vertices(), chimera_edges(&spec))?)
}

pub fn gen_pegasus(spec: PegasusSpec) -> Result<Graph, TopologyError> {
    spec.validate()?;
    let layer = ChimeraSpec::new(spec.l, spec.m, spec.n);
    let per_layer = layer.num_vertices();
    let base = chimera_edges(&layer);
    let mut edges = Vec::new();
    for l in 0..spec.o {
        let off = l * per_layer;
        edges.extend(base.iter().map(|&(u, v)| (u + off, v + off)));
        for row in 0..spec.m {
            for col in 0..spec.n {
                for side in 0..2 {
                    for pair in [(0, 1), (2, 3)] {
                        edges.push((
                            off + layer.vertex(row, col, side, pair.0),
                            off + layer.vertex(row, col, side, pair.1),
                        ));
                    }
                }
            }
        }
        if l + 1 < spec.o {
            edges.extend((0..per_layer).map(|v| (off + v, off + per_layer + v)));
        }
    }
    Ok(Graph::from_edges(spec.num_vertices(), edges)?)
}

pub fn gen_erdos_renyi(spec: ErdosRenyiSpec) -> Result<Graph, TopologyError> {
    if spec.nu == 0 {
        return Err(TopologyError::InvalidSpec("Erdős–Rényi graph needs at least one vertex".into()));
    }
    check_probability("p", spec.p)?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut edges = Vec::new();
    for u in 0..spec.nu {
        for v in u + 1..spec.nu {
            if rng.gen_bool(spec.p) {
                edges.push((u, v));
            }
        }
    }
    Ok(Graph::from_edges(spec.nu, edges)?)
}

/// Cell roles in the structured host layout.
struct StructuredLayout {
    host: ChimeraSpec,
    /// `(random cell, complete cell)` pairs, as `(row, col)`.
    pairs: Vec<((usize, usize), (usize, usize))>,
}

impl StructuredLayout {
    fn new(cells: StructuredCells) -> Self {
        match cells {
            StructuredCells::Two => StructuredLayout { host: ChimeraSpec::new(4, 1, 2), pairs: vec![((0, 0), (0, 1))] },
            StructuredCells::Four => StructuredLayout {
                host: ChimeraSpec::new(4, 2, 2),
                pairs: vec![((0, 0), (0, 1)), ((1, 0), (1, 1))],
            },
        }
    }

    fn biclique(&self, (row, col): (usize, usize)) -> Vec<(Vertex, Vertex)> {
        let h = &self.host;
        (0..4).flat_map(|a| (0..4).map(move |b| (h.vertex(row, col, 0, a), h.vertex(row, col, 1, b)))).collect()
    }

    /// Horizontal couplers between a random cell and its complete partner.
    fn attachments(&self, (rc, cc): ((usize, usize), (usize, usize))) -> Vec<(Vertex, Vertex)> {
        (0..4).map(|i| (self.host.vertex(rc.0, rc.1, 0, i), self.host.vertex(cc.0, cc.1, 0, i))).collect()
    }

    /// Vertical couplers joining the two halves of the four-cell layout.
    fn inter_pair_couplers(&self) -> Vec<(Vertex, Vertex)> {
        if self.pairs.len() < 2 {
            return Vec::new();
        }
        let h = &self.host;
        (0..2).flat_map(|col| (0..4).map(move |i| (h.vertex(0, col, 1, i), h.vertex(1, col, 1, i)))).collect()
    }

    fn anchor(&self) -> Vertex {
        let (row, col) = self.pairs[0].1;
        self.host.vertex(row, col, 0, 0)
    }
}

fn anchor_component(host: &Graph, anchor: Vertex) -> Vec<bool> {
    let mut keep = vec![false; host.num_vertices()];
    if let Some(comp) = host.components().into_iter().find(|c| c.contains(&anchor)) {
        for v in comp {
            keep[v] = true;
        }
    }
    keep
}

/// Contracts `contracted` (pairwise disjoint) in the host subgraph with
/// edges `edges`, keeping only the component containing `anchor`. Classes
/// are numbered by their smallest host vertex.
fn assemble(
    host_vertices: usize,
    edges: &[(Vertex, Vertex)],
    contracted: &[(Vertex, Vertex)],
    anchor: Vertex,
) -> Result<(Graph, Vec<Vertex>), TopologyError> {
    let host = Graph::from_edges(host_vertices, edges.iter().copied())?;
    let keep = anchor_component(&host, anchor);
    let mut rep: Vec<Vertex> = (0..host_vertices).collect();
    for &(u, v) in contracted {
        let (a, b) = (u.min(v), u.max(v));
        rep[b] = a;
    }
    let mut class = vec![None; host_vertices];
    let mut next = 0;
    for v in 0..host_vertices {
        if !keep[v] {
            continue;
        }
        if rep[v] == v {
            class[v] = Some(next);
            next += 1;
        }
    }
    for v in 0..host_vertices {
        if keep[v] && rep[v] != v {
            class[v] = class[rep[v]];
        }
    }
    let dropped = (0..host_vertices).filter(|&v| !keep[v]).collect();
    Ok((host.quotient(&class, next)?, dropped))
}

/// Greedy disjoint selection over a shuffled edge list.
fn pick_disjoint(edges: &[(Vertex, Vertex)], zeta: usize, rng: &mut ChaCha8Rng) -> Option<Vec<(Vertex, Vertex)>> {
    if zeta == 0 {
        return Some(Vec::new());
    }
    let mut order = edges.to_vec();
    order.shuffle(rng);
    let mut used = std::collections::BTreeSet::new();
    let mut chosen = Vec::new();
    for (u, v) in order {
        if used.contains(&u) || used.contains(&v) {
            continue;
        }
        used.insert(u);
        used.insert(v);
        chosen.push((u, v));
        if chosen.len() == zeta {
            chosen.sort_unstable();
            return Some(chosen);
        }
    }
    None
}

pub fn gen_structured(spec: StructuredSpec) -> Result<Graph, TopologyError> {
    gen_structured_detailed(spec).map(|inst| inst.graph)
}

/// Random `K_{4,4}(p_inter)` cells with `zeta` disjoint edges contracted,
/// attached to complete `K_{4,4}` cells through couplers sampled with
/// probability `p_intra` (at least one per attachment group is forced).
pub fn gen_structured_detailed(spec: StructuredSpec) -> Result<StructuredInstance, TopologyError> {
    check_probability("p_inter", spec.p_inter)?;
    check_probability("p_intra", spec.p_intra)?;
    let layout = StructuredLayout::new(spec.cells);
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    for attempt in 1..=MAX_STRUCTURED_ATTEMPTS {
        let mut edges = Vec::new();
        let mut random_edges = Vec::new();
        let mut forced = false;
        for &(rc, cc) in &layout.pairs {
            random_edges.extend(layout.biclique(rc).into_iter().filter(|_| rng.gen_bool(spec.p_inter)));
            edges.extend(layout.biclique(cc));
        }
        edges.extend(random_edges.iter().copied());
        let mut groups: Vec<Vec<(Vertex, Vertex)>> = layout.pairs.iter().map(|&p| layout.attachments(p)).collect();
        let inter = layout.inter_pair_couplers();
        if !inter.is_empty() {
            groups.push(inter);
        }
        for group in &groups {
            let mut picked: Vec<_> = group.iter().copied().filter(|_| rng.gen_bool(spec.p_intra)).collect();
            if picked.is_empty() {
                picked.push(group[rng.gen_range(0..group.len())]);
                forced = true;
            }
            edges.extend(picked);
        }
        // Edges outside the kept component would be contracted and then dropped.
        let keep = anchor_component(&Graph::from_edges(layout.host.num_vertices(), edges.iter().copied())?, layout.anchor());
        let candidates: Vec<_> = random_edges.iter().copied().filter(|&(u, _)| keep[u]).collect();
        let Some(contracted) = pick_disjoint(&candidates, spec.zeta, &mut rng) else {
            continue;
        };
        let (graph, dropped_vertices) =
            assemble(layout.host.num_vertices(), &edges, &contracted, layout.anchor())?;
        return Ok(StructuredInstance { graph, contracted, forced_attachment: forced, dropped_vertices, attempts: attempt });
    }
    Err(TopologyError::RetriesExhausted { zeta: spec.zeta, attempts: MAX_STRUCTURED_ATTEMPTS })
}

/// The worked two-cell instance: a `K_{4,4}` joined by a single edge to a
/// four-vertex block (a `K_4` minus one edge). The block arises from
/// the `K_{2,3}` on random-cell vertices `{0,1} × {4,5,6}` of `C_{4,1,2}` by
/// contracting `0–4`, so its minimal embedding into `C_{4,1,2}` uses 13
/// qubits (the contracted vertex needs a chain of two).
///
/// Vertices `0..4` form the block (0 is the contracted vertex), `4..8` and
/// `8..12` are the two sides of the `K_{4,4}`; the joining edge is `1–5`.
pub fn illustrative_example() -> Graph {
    let layout = StructuredLayout::new(StructuredCells::Two);
    let mut edges: Vec<(Vertex, Vertex)> = layout.biclique((0, 1));
    for a in 0..2 {
        for b in 4..7 {
            edges.push((a, b));
        }
    }
    edges.push((1, 9));
    assemble(16, &edges, &[(0, 4)], layout.anchor()).expect("fixed layout is valid").0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chimera_small_counts() {
        let c = gen_chimera(ChimeraSpec::new(4, 1, 1)).unwrap();
        assert_eq!((c.num_vertices(), c.num_edges()), (8, 16));
        let c = gen_chimera(ChimeraSpec::new(4, 1, 2)).unwrap();
        assert_eq!((c.num_vertices(), c.num_edges()), (16, 36));
        assert_eq!(gen_chimera(ChimeraSpec::new(4, 16, 16)).unwrap().num_vertices(), 2048);
        assert!(gen_chimera(ChimeraSpec::new(0, 1, 1)).is_err());
    }

    #[test]
    fn chimera_coupler_layout() {
        let spec = ChimeraSpec::new(2, 2, 2);
        let g = gen_chimera(spec).unwrap();
        assert!(g.has_edge(spec.vertex(0, 0, 0, 1), spec.vertex(0, 1, 0, 1)));
        assert!(g.has_edge(spec.vertex(0, 1, 1, 0), spec.vertex(1, 1, 1, 0)));
        assert!(!g.has_edge(spec.vertex(0, 0, 1, 0), spec.vertex(0, 1, 1, 0)));
        assert!(!g.has_edge(spec.vertex(0, 0, 0, 0), spec.vertex(0, 0, 0, 1)));
    }

    #[test]
    fn pegasus_counts_and_degrees() {
        let p = gen_pegasus(PegasusSpec::new(1, 1)).unwrap();
        assert_eq!(p.num_vertices(), 24);
        let p = gen_pegasus(PegasusSpec::new(2, 2)).unwrap();
        assert_eq!(p.num_vertices(), 96);
        let layer = gen_chimera(ChimeraSpec::new(4, 2, 2)).unwrap();
        for v in p.vertices() {
            assert!(p.degree(v) >= layer.degree(v % 32));
        }
        // 3 layers of chimera edges + 4 extra per cell + 2 inter-layer matchings
        assert_eq!(p.num_edges(), 3 * layer.num_edges() + 3 * 4 * 4 + 2 * 32);
        assert!(p.bipartition().is_none());
        assert!(gen_pegasus(PegasusSpec { l: 4, m: 1, n: 1, o: 2 }).is_err());
    }

    #[test]
    fn erdos_renyi_extremes_and_determinism() {
        let e = gen_erdos_renyi(ErdosRenyiSpec { nu: 6, p: 0.0, seed: 1 }).unwrap();
        assert_eq!(e.num_edges(), 0);
        let k = gen_erdos_renyi(ErdosRenyiSpec { nu: 6, p: 1.0, seed: 1 }).unwrap();
        assert_eq!(k, Graph::complete(6));
        let spec = ErdosRenyiSpec { nu: 10, p: 0.5, seed: 42 };
        assert_eq!(gen_erdos_renyi(spec).unwrap(), gen_erdos_renyi(spec).unwrap());
        assert!(gen_erdos_renyi(ErdosRenyiSpec { nu: 0, p: 0.5, seed: 1 }).is_err());
        assert!(gen_erdos_renyi(ErdosRenyiSpec { nu: 3, p: 1.5, seed: 1 }).is_err());
    }

    #[test]
    fn structured_without_contraction_is_chimera() {
        let spec = StructuredSpec { zeta: 0, p_inter: 1.0, p_intra: 1.0, cells: StructuredCells::Two, seed: 9 };
        let inst = gen_structured_detailed(spec).unwrap();
        assert_eq!(inst.graph, gen_chimera(ChimeraSpec::new(4, 1, 2)).unwrap());
        assert!(!inst.forced_attachment);
    }

    #[test]
    fn structured_contraction_shrinks_by_zeta() {
        for zeta in 0..=4 {
            let spec = StructuredSpec { zeta, p_inter: 1.0, p_intra: 1.0, cells: StructuredCells::Two, seed: 5 };
            let inst = gen_structured_detailed(spec).unwrap();
            assert_eq!(inst.graph.num_vertices(), 16 - zeta);
            assert!(inst.graph.is_connected());
        }
        let spec = StructuredSpec { zeta: 5, p_inter: 1.0, p_intra: 1.0, cells: StructuredCells::Two, seed: 5 };
        assert!(matches!(gen_structured(spec), Err(TopologyError::RetriesExhausted { .. })));
    }

    #[test]
    fn structured_forces_attachment() {
        let spec = StructuredSpec { zeta: 0, p_inter: 1.0, p_intra: 0.0, cells: StructuredCells::Two, seed: 3 };
        let inst = gen_structured_detailed(spec).unwrap();
        assert!(inst.forced_attachment);
        assert_eq!(inst.graph.num_edges(), 33);
        assert!(inst.graph.is_connected());
    }

    #[test]
    fn structured_four_cells_connected() {
        for seed in 0..10 {
            let spec = StructuredSpec { zeta: 2, p_inter: 0.5, p_intra: 0.5, cells: StructuredCells::Four, seed };
            let g = gen_structured(spec).unwrap();
            assert!(g.is_connected());
            assert!(g.num_vertices() >= 16 && g.num_vertices() <= 30);
            assert_eq!(gen_structured(spec).unwrap(), g);
        }
    }

    #[test]
    fn illustrative_shape() {
        let g = illustrative_example();
        assert_eq!(g.num_vertices(), 12);
        assert_eq!(g.num_edges(), 22);
        let block = g.induced_subgraph(&[0, 1, 2, 3]).unwrap();
        assert_eq!(block.edges(), &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3)]);
        assert!(g.has_edge(1, 5));
        let biclique = g.induced_subgraph(&(4..12).collect::<Vec<_>>()).unwrap();
        assert_eq!(biclique, Graph::complete_bipartite(4, 4));
    }
}

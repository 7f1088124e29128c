//! Simple undirected graphs with dense integer vertex ids.
//!
//! Both the hardware target and the logical source are represented by
//! [`Graph`]. Everything here is immutable after construction; the
//! operations used by the model builders (shortest distances, bounded
//! simple-path enumeration, induced connectivity, contraction) are pure.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt::Write as _;

use crate::error::GraphError;

pub type Vertex = usize;

/// Simple undirected graph on the vertices `0..num_vertices`.
///
/// Edges are stored normalized as `(min, max)` in sorted order and the
/// adjacency lists are kept sorted, so iteration order is deterministic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    num_vertices: usize,
    edges: Vec<(Vertex, Vertex)>,
    adjacency: Vec<Vec<Vertex>>,
}

impl Graph {
    /// Graph without edges.
    pub fn empty(num_vertices: usize) -> Self {
        Graph { num_vertices, edges: Vec::new(), adjacency: vec![Vec::new(); num_vertices] }
    }

    /// Builds a graph, rejecting self-loops, duplicate edges and out-of-range endpoints.
    pub fn from_edges<I>(num_vertices: usize, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (Vertex, Vertex)>,
    {
        let mut set = BTreeSet::new();
        for (u, v) in edges {
            if u >= num_vertices || v >= num_vertices {
                return Err(GraphError::InvalidVertex { vertex: u.max(v), num_vertices });
            }
            if u == v {
                return Err(GraphError::SelfLoop { vertex: u, line: None });
            }
            if !set.insert((u.min(v), u.max(v))) {
                return Err(GraphError::DuplicateEdge { u, v, line: None });
            }
        }
        Ok(Self::from_edge_set(num_vertices, set))
    }

    /// Builds a graph from edges that may repeat or contain loops; loops are
    /// dropped and repeats collapsed.
    pub fn from_edges_dedup<I>(num_vertices: usize, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (Vertex, Vertex)>,
    {
        let mut set = BTreeSet::new();
        for (u, v) in edges {
            if u >= num_vertices || v >= num_vertices {
                return Err(GraphError::InvalidVertex { vertex: u.max(v), num_vertices });
            }
            if u != v {
                set.insert((u.min(v), u.max(v)));
            }
        }
        Ok(Self::from_edge_set(num_vertices, set))
    }

    fn from_edge_set(num_vertices: usize, set: BTreeSet<(Vertex, Vertex)>) -> Self {
        let mut adjacency = vec![Vec::new(); num_vertices];
        for &(u, v) in &set {
            adjacency[u].push(v);
            adjacency[v].push(u);
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        Graph { num_vertices, edges: set.into_iter().collect(), adjacency }
    }

    pub fn complete(n: usize) -> Self {
        let edges = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v)));
        Self::from_edge_set(n, edges.collect())
    }

    pub fn path(n: usize) -> Self {
        Self::from_edge_set(n, (1..n).map(|v| (v - 1, v)).collect())
    }

    pub fn cycle(n: usize) -> Self {
        let mut set: BTreeSet<_> = (1..n).map(|v| (v - 1, v)).collect();
        if n >= 3 {
            set.insert((0, n - 1));
        }
        Self::from_edge_set(n, set)
    }

    /// `K_{a,b}` with the first side numbered `0..a`.
    pub fn complete_bipartite(a: usize, b: usize) -> Self {
        let edges = (0..a).flat_map(|u| (0..b).map(move |v| (u, a + v)));
        Self::from_edge_set(a + b, edges.collect())
    }

    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    /// Sorted list of normalized `(min, max)` edges.
    pub fn edges(&self) -> &[(Vertex, Vertex)] {
        &self.edges
    }

    pub fn neighbors(&self, v: Vertex) -> &[Vertex] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: Vertex) -> usize {
        self.adjacency[v].len()
    }

    pub fn has_edge(&self, u: Vertex, v: Vertex) -> bool {
        u < self.num_vertices && self.adjacency[u].binary_search(&v).is_ok()
    }

    pub fn vertices(&self) -> std::ops::Range<Vertex> {
        0..self.num_vertices
    }

    fn check_vertex(&self, v: Vertex) -> Result<(), GraphError> {
        if v < self.num_vertices {
            Ok(())
        } else {
            Err(GraphError::InvalidVertex { vertex: v, num_vertices: self.num_vertices })
        }
    }

    /// BFS distances (edge counts) from `source`; `None` for unreachable vertices.
    pub fn distances_from(&self, source: Vertex) -> Result<Vec<Option<usize>>, GraphError> {
        self.check_vertex(source)?;
        let mut dist = vec![None; self.num_vertices];
        dist[source] = Some(0);
        let mut queue = VecDeque::from([source]);
        while let Some(u) = queue.pop_front() {
            let d = dist[u].unwrap_or(0);
            for &w in &self.adjacency[u] {
                if dist[w].is_none() {
                    dist[w] = Some(d + 1);
                    queue.push_back(w);
                }
            }
        }
        Ok(dist)
    }

    /// Number of edges on a shortest `u`–`v` path, `None` when unreachable.
    pub fn shortest_distance(&self, u: Vertex, v: Vertex) -> Result<Option<usize>, GraphError> {
        self.check_vertex(v)?;
        Ok(self.distances_from(u)?[v])
    }

    /// All-pairs distance matrix by repeated BFS.
    pub fn distance_matrix(&self) -> Vec<Vec<Option<usize>>> {
        self.vertices().map(|v| self.distances_from(v).expect("vertex in range")).collect()
    }

    /// Every simple `u`–`v` path with at most `max_size` vertices, in
    /// lexicographic order of the vertex sequences.
    pub fn enumerate_paths(&self, u: Vertex, v: Vertex, max_size: usize) -> Result<Vec<Path>, GraphError> {
        self.check_vertex(u)?;
        self.check_vertex(v)?;
        if u == v {
            return Err(GraphError::SameEndpoints(u));
        }
        if max_size < 2 {
            return Err(GraphError::PathSizeTooSmall(max_size));
        }
        // Vertices that cannot reach v within the remaining budget are pruned
        // using the BFS distance to v.
        let to_target = self.distances_from(v)?;
        let mut out = Vec::new();
        let mut stack = vec![u];
        let mut on_path = vec![false; self.num_vertices];
        on_path[u] = true;
        self.extend_paths(v, max_size, &to_target, &mut stack, &mut on_path, &mut out);
        Ok(out)
    }

    fn extend_paths(
        &self,
        target: Vertex,
        max_size: usize,
        to_target: &[Option<usize>],
        stack: &mut Vec<Vertex>,
        on_path: &mut [bool],
        out: &mut Vec<Path>,
    ) {
        let last = *stack.last().expect("path never empty");
        for &w in &self.adjacency[last] {
            if on_path[w] {
                continue;
            }
            if w == target {
                stack.push(w);
                out.push(Path { vertices: stack.clone() });
                stack.pop();
                continue;
            }
            // w plus the rest of a shortest route to the target must still fit.
            match to_target[w] {
                Some(d) if stack.len() + 1 + d <= max_size => {}
                _ => continue,
            }
            stack.push(w);
            on_path[w] = true;
            self.extend_paths(target, max_size, to_target, stack, on_path, out);
            on_path[w] = false;
            stack.pop();
        }
    }

    /// True iff the subgraph induced by `subset` is connected. The empty set
    /// and singletons count as connected.
    pub fn is_connected_subset(&self, subset: &[Vertex]) -> Result<bool, GraphError> {
        for &v in subset {
            self.check_vertex(v)?;
        }
        let Some(&start) = subset.first() else {
            return Ok(true);
        };
        let mut inside = vec![false; self.num_vertices];
        for &v in subset {
            inside[v] = true;
        }
        let wanted = inside.iter().filter(|&&b| b).count();
        let mut seen = vec![false; self.num_vertices];
        seen[start] = true;
        let mut reached = 1;
        let mut queue = VecDeque::from([start]);
        while let Some(u) = queue.pop_front() {
            for &w in &self.adjacency[u] {
                if inside[w] && !seen[w] {
                    seen[w] = true;
                    reached += 1;
                    queue.push_back(w);
                }
            }
        }
        Ok(reached == wanted)
    }

    /// Connected components, each sorted, ordered by smallest member.
    pub fn components(&self) -> Vec<Vec<Vertex>> {
        let mut comp = vec![usize::MAX; self.num_vertices];
        let mut out: Vec<Vec<Vertex>> = Vec::new();
        for s in self.vertices() {
            if comp[s] != usize::MAX {
                continue;
            }
            let id = out.len();
            comp[s] = id;
            let mut members = vec![s];
            let mut queue = VecDeque::from([s]);
            while let Some(u) = queue.pop_front() {
                for &w in &self.adjacency[u] {
                    if comp[w] == usize::MAX {
                        comp[w] = id;
                        members.push(w);
                        queue.push_back(w);
                    }
                }
            }
            members.sort_unstable();
            out.push(members);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.components().len() <= 1
    }

    /// Proper 2-coloring if one exists.
    pub fn bipartition(&self) -> Option<Vec<bool>> {
        let mut color: Vec<Option<bool>> = vec![None; self.num_vertices];
        for s in self.vertices() {
            if color[s].is_some() {
                continue;
            }
            color[s] = Some(false);
            let mut queue = VecDeque::from([s]);
            while let Some(u) = queue.pop_front() {
                let cu = color[u].expect("colored on push");
                for &w in &self.adjacency[u] {
                    match color[w] {
                        None => {
                            color[w] = Some(!cu);
                            queue.push_back(w);
                        }
                        Some(cw) if cw == cu => return None,
                        Some(_) => {}
                    }
                }
            }
        }
        Some(color.into_iter().map(|c| c.unwrap_or(false)).collect())
    }

    /// Quotient graph: vertex `v` is sent to `class[v]` (or dropped when
    /// `None`). Class ids must be dense `0..num_classes`. Loops vanish and
    /// parallel edges merge.
    pub fn quotient(&self, class: &[Option<usize>], num_classes: usize) -> Result<Graph, GraphError> {
        let edges = self.edges.iter().filter_map(|&(u, v)| match (class[u], class[v]) {
            (Some(a), Some(b)) => Some((a, b)),
            _ => None,
        });
        Graph::from_edges_dedup(num_classes, edges)
    }

    /// Merges the endpoints of `edge` into the smaller id; ids above the
    /// larger endpoint shift down by one, giving vertices `0..n-1`.
    pub fn contract_edge(&self, edge: (Vertex, Vertex)) -> Result<Graph, GraphError> {
        let (u, v) = (edge.0.min(edge.1), edge.0.max(edge.1));
        if !self.has_edge(u, v) {
            return Err(GraphError::MissingEdge { u, v });
        }
        let class: Vec<Option<usize>> = self
            .vertices()
            .map(|w| {
                Some(match w.cmp(&v) {
                    std::cmp::Ordering::Less => w,
                    std::cmp::Ordering::Equal => u,
                    std::cmp::Ordering::Greater => w - 1,
                })
            })
            .collect();
        self.quotient(&class, self.num_vertices - 1)
    }

    /// Copy of the graph with one extra edge.
    pub fn with_edge(&self, u: Vertex, v: Vertex) -> Result<Graph, GraphError> {
        Graph::from_edges(self.num_vertices, self.edges.iter().copied().chain([(u, v)]))
    }

    /// Induced subgraph on `keep` (sorted, deduplicated); vertices renumbered
    /// by position in `keep`.
    pub fn induced_subgraph(&self, keep: &[Vertex]) -> Result<Graph, GraphError> {
        let mut class = vec![None; self.num_vertices];
        for (idx, &v) in keep.iter().enumerate() {
            self.check_vertex(v)?;
            class[v] = Some(idx);
        }
        self.quotient(&class, keep.len())
    }
}

/// Simple path given as its vertex sequence.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Path {
    vertices: Vec<Vertex>,
}

impl Path {
    /// Wraps a vertex sequence after checking it is a simple path of `g`.
    pub fn new(g: &Graph, vertices: Vec<Vertex>) -> Result<Self, GraphError> {
        let mut seen = BTreeSet::new();
        for &v in &vertices {
            g.check_vertex(v)?;
            if !seen.insert(v) {
                return Err(GraphError::NotSimplePath(vertices.clone()));
            }
        }
        if vertices.windows(2).any(|w| !g.has_edge(w[0], w[1])) {
            return Err(GraphError::NotSimplePath(vertices));
        }
        Ok(Path { vertices })
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    /// Vertex count including both endpoints.
    pub fn size(&self) -> usize {
        self.vertices.len()
    }

    /// Vertices strictly between the endpoints.
    pub fn interior(&self) -> &[Vertex] {
        if self.vertices.len() <= 2 {
            &[]
        } else {
            &self.vertices[1..self.vertices.len() - 1]
        }
    }
}

/// Parses the edge-list text format: one `u v` pair per line, `#` comments,
/// optional `p <num_vertices>` header.
pub fn load_graph(text: &str) -> Result<Graph, GraphError> {
    let mut header: Option<usize> = None;
    let mut raw: Vec<(usize, Vertex, Vertex)> = Vec::new();
    for (idx, full) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = full.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields[0] == "p" {
            if header.is_some() || !raw.is_empty() {
                return Err(GraphError::Parse { line: line_no, message: "header must precede all edges".into() });
            }
            if fields.len() != 2 {
                return Err(GraphError::Parse { line: line_no, message: "expected `p <num_vertices>`".into() });
            }
            let n = fields[1]
                .parse()
                .map_err(|_| GraphError::Parse { line: line_no, message: format!("bad vertex count `{}`", fields[1]) })?;
            header = Some(n);
            continue;
        }
        if fields.len() != 2 {
            return Err(GraphError::Parse { line: line_no, message: format!("expected two vertex ids, got `{line}`") });
        }
        let parse = |s: &str| {
            s.parse::<Vertex>()
                .map_err(|_| GraphError::Parse { line: line_no, message: format!("bad vertex id `{s}`") })
        };
        raw.push((line_no, parse(fields[0])?, parse(fields[1])?));
    }
    let max_id = raw.iter().map(|&(_, u, v)| u.max(v) + 1).max().unwrap_or(0);
    let num_vertices = match header {
        Some(n) if n < max_id => {
            return Err(GraphError::Parse {
                line: 1,
                message: format!("header declares {n} vertices but ids reach {}", max_id - 1),
            })
        }
        Some(n) => n,
        None => max_id,
    };
    let mut seen = BTreeMap::new();
    for &(line, u, v) in &raw {
        if u == v {
            return Err(GraphError::SelfLoop { vertex: u, line: Some(line) });
        }
        if seen.insert((u.min(v), u.max(v)), line).is_some() {
            return Err(GraphError::DuplicateEdge { u, v, line: Some(line) });
        }
    }
    Ok(Graph::from_edge_set(num_vertices, seen.into_keys().collect()))
}

/// Inverse of [`load_graph`]: `p <n>` header followed by sorted edges.
pub fn save_graph(g: &Graph) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "p {}", g.num_vertices());
    for &(u, v) in g.edges() {
        let _ = writeln!(out, "{u} {v}");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn load_basic() {
        let g = load_graph("0 1\n1 2").unwrap();
        assert_eq!(g.num_vertices(), 3);
        assert_eq!(g.edges(), &[(0, 1), (1, 2)]);
    }

    #[test]
    fn load_rejects_self_loop() {
        assert!(matches!(load_graph("0 0"), Err(GraphError::SelfLoop { vertex: 0, line: Some(1) })));
    }

    #[test]
    fn load_rejects_duplicate() {
        assert!(matches!(load_graph("0 1\n# c\n1 0"), Err(GraphError::DuplicateEdge { line: Some(3), .. })));
    }

    #[test]
    fn load_header_and_comments() {
        let g = load_graph("# target\np 4\n0 1 # coupler\n").unwrap();
        assert_eq!(g.num_vertices(), 4);
        assert_eq!(g.num_edges(), 1);
        assert_eq!(g.degree(3), 0);
    }

    #[test]
    fn load_parse_error_has_line() {
        match load_graph("0 1\n1 x") {
            Err(GraphError::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
        assert!(load_graph("0 1 2").is_err());
        assert!(load_graph("p 2\n0 5").is_err());
    }

    #[test]
    fn save_round_trips() {
        let g = Graph::from_edges(5, [(3, 1), (0, 4), (1, 2)]).unwrap();
        let text = save_graph(&g);
        assert!(text.starts_with("p 5\n0 4\n1 2\n1 3\n"));
        assert_eq!(load_graph(&text).unwrap(), g);
    }

    #[test]
    fn distances() {
        let k44 = Graph::complete_bipartite(4, 4);
        assert_eq!(k44.shortest_distance(2, 2).unwrap(), Some(0));
        assert_eq!(k44.shortest_distance(0, 1).unwrap(), Some(2));
        assert_eq!(k44.shortest_distance(0, 5).unwrap(), Some(1));
        let two = Graph::from_edges(4, [(0, 1), (2, 3)]).unwrap();
        assert_eq!(two.shortest_distance(0, 3).unwrap(), None);
        assert!(two.shortest_distance(0, 9).is_err());
    }

    #[test]
    fn paths_adjacent_k2() {
        let g = Graph::complete(2);
        let paths = g.enumerate_paths(0, 1, 2).unwrap();
        assert_eq!(paths.len(), 1);
        assert_eq!(paths[0].vertices(), &[0, 1]);
    }

    #[test]
    fn paths_same_side_of_biclique() {
        let k44 = Graph::complete_bipartite(4, 4);
        let paths = k44.enumerate_paths(0, 1, 3).unwrap();
        assert_eq!(paths.len(), 4);
        for (p, mid) in paths.iter().zip(4..8) {
            assert_eq!(p.vertices(), &[0, mid, 1]);
            assert_eq!(p.interior(), &[mid]);
        }
    }

    #[test]
    fn paths_out_of_reach() {
        let g = Graph::path(4);
        assert!(g.enumerate_paths(0, 3, 3).unwrap().is_empty());
        assert_eq!(g.enumerate_paths(0, 3, 4).unwrap().len(), 1);
    }

    #[test]
    fn paths_errors() {
        let g = Graph::path(3);
        assert!(matches!(g.enumerate_paths(0, 0, 3), Err(GraphError::SameEndpoints(0))));
        assert!(matches!(g.enumerate_paths(0, 1, 1), Err(GraphError::PathSizeTooSmall(1))));
        assert!(g.enumerate_paths(0, 7, 3).is_err());
    }

    #[test]
    fn connected_subsets() {
        let g = Graph::path(3);
        assert!(g.is_connected_subset(&[1]).unwrap());
        assert!(g.is_connected_subset(&[]).unwrap());
        assert!(!g.is_connected_subset(&[0, 2]).unwrap());
        assert!(g.is_connected_subset(&[0, 1, 2]).unwrap());
        assert!(g.is_connected_subset(&[0, 5]).is_err());
    }

    #[test]
    fn contraction() {
        let tri = Graph::complete(3).contract_edge((0, 1)).unwrap();
        assert_eq!(tri, Graph::complete(2));
        let c4 = Graph::cycle(4).contract_edge((1, 2)).unwrap();
        assert_eq!(c4, Graph::complete(3));
        let k2 = Graph::complete(2).contract_edge((1, 0)).unwrap();
        assert_eq!(k2.num_vertices(), 1);
        assert_eq!(k2.num_edges(), 0);
        assert!(matches!(Graph::path(3).contract_edge((0, 2)), Err(GraphError::MissingEdge { .. })));
    }

    #[test]
    fn contraction_renumbers_above_merged_vertex() {
        // 0-1-2-3 path, contract (1,2): 0-1-2 path.
        let g = Graph::path(4).contract_edge((1, 2)).unwrap();
        assert_eq!(g, Graph::path(3));
        // star centered at 3 with leaves 0,1,2,4; contract (0,3)
        let star = Graph::from_edges(5, [(0, 3), (1, 3), (2, 3), (3, 4)]).unwrap();
        let c = star.contract_edge((0, 3)).unwrap();
        assert_eq!(c.edges(), &[(0, 1), (0, 2), (0, 3)]);
    }

    #[test]
    fn bipartition_detects_odd_cycle() {
        assert!(Graph::complete_bipartite(3, 2).bipartition().is_some());
        assert!(Graph::cycle(5).bipartition().is_none());
    }
}

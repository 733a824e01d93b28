//! Immutable simple undirected graphs and the string-defined families
//! (Pell graphs, Fibonacci cubes, hypercubes).

use std::collections::VecDeque;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::seq::PellTable;
use crate::words::{self, PellString};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("{family} dimension {n} exceeds the build limit {limit}")]
    OverBuildLimit {
        family: &'static str,
        n: usize,
        limit: usize,
    },
    #[error("vertex {vertex} out of range (graph has {n_vertices} vertices)")]
    VertexOutOfRange { vertex: usize, n_vertices: usize },
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("{0}-{1} is not an edge")]
    NotAnEdge(usize, usize),
    #[error("label count {labels} does not match vertex count {n_vertices}")]
    LabelCount { labels: usize, n_vertices: usize },
    #[error("graph is disconnected")]
    Disconnected,
}

/// Upper bounds on the dimension of generated graphs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BuildLimits {
    pub pell: usize,
    pub fibonacci: usize,
    pub hypercube: usize,
}

impl Default for BuildLimits {
    fn default() -> Self {
        BuildLimits {
            pell: 16,
            fibonacci: 24,
            hypercube: 12,
        }
    }
}

/// A sorted, duplicate-free list of vertex indices over some host graph.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(from = "Vec<usize>", into = "Vec<usize>")]
pub struct VertexSubset(Vec<usize>);

impl VertexSubset {
    pub fn new(mut vertices: Vec<usize>) -> Self {
        vertices.sort_unstable();
        vertices.dedup();
        VertexSubset(vertices)
    }

    pub fn all(n: usize) -> Self {
        VertexSubset((0..n).collect())
    }

    pub fn from_mask(mask: &[bool]) -> Self {
        VertexSubset(
            mask.iter()
                .enumerate()
                .filter_map(|(i, &m)| m.then_some(i))
                .collect(),
        )
    }

    pub fn vertices(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, v: usize) -> bool {
        self.0.binary_search(&v).is_ok()
    }

    pub fn mask(&self, n: usize) -> Vec<bool> {
        let mut m = vec![false; n];
        for &v in &self.0 {
            if v < n {
                m[v] = true;
            }
        }
        m
    }

    pub fn max_vertex(&self) -> Option<usize> {
        self.0.last().copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }
}

impl From<Vec<usize>> for VertexSubset {
    fn from(v: Vec<usize>) -> Self {
        VertexSubset::new(v)
    }
}

impl From<VertexSubset> for Vec<usize> {
    fn from(s: VertexSubset) -> Self {
        s.0
    }
}

/// Simple undirected graph on vertices `0..n` with sorted adjacency lists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    adjacency: Vec<Vec<usize>>,
    labels: Option<Vec<String>>,
}

impl Graph {
    /// Builds a graph from an edge list. Parallel edges collapse; self-loops
    /// and out-of-range endpoints are rejected.
    pub fn from_edges(
        n_vertices: usize,
        edges: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self, GraphError> {
        let mut adjacency = vec![Vec::new(); n_vertices];
        for (u, v) in edges {
            for x in [u, v] {
                if x >= n_vertices {
                    return Err(GraphError::VertexOutOfRange {
                        vertex: x,
                        n_vertices,
                    });
                }
            }
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            adjacency[u].push(v);
            adjacency[v].push(u);
        }
        Ok(Self::from_raw(adjacency))
    }

    /// Sorts and dedups the lists; the caller guarantees symmetry.
    fn from_raw(mut adjacency: Vec<Vec<usize>>) -> Self {
        adjacency.par_iter_mut().for_each(|l| {
            l.sort_unstable();
            l.dedup();
        });
        Graph {
            adjacency,
            labels: None,
        }
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self, GraphError> {
        if labels.len() != self.n_vertices() {
            return Err(GraphError::LabelCount {
                labels: labels.len(),
                n_vertices: self.n_vertices(),
            });
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn n_vertices(&self) -> usize {
        self.adjacency.len()
    }

    pub fn n_edges(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: usize) -> Result<usize, GraphError> {
        self.check_vertex(v)?;
        Ok(self.adjacency[v].len())
    }

    pub fn check_vertex(&self, v: usize) -> Result<(), GraphError> {
        if v < self.n_vertices() {
            Ok(())
        } else {
            Err(GraphError::VertexOutOfRange {
                vertex: v,
                n_vertices: self.n_vertices(),
            })
        }
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.n_vertices() && self.adjacency[u].binary_search(&v).is_ok()
    }

    /// Each edge once as `(min, max)`, ordered lexicographically.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(u, l)| l.iter().filter(move |&&v| v > u).map(move |&v| (u, v)))
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    /// The label of `v`, or its index when the graph is unlabeled.
    pub fn label(&self, v: usize) -> String {
        match &self.labels {
            Some(l) => l[v].clone(),
            None => v.to_string(),
        }
    }

    /// Induced subgraph on `subset`; vertex `i` of the result is
    /// `subset.vertices()[i]`.
    pub fn induced_subgraph(&self, subset: &VertexSubset) -> Graph {
        let mut index = vec![usize::MAX; self.n_vertices()];
        for (i, v) in subset.iter().enumerate() {
            index[v] = i;
        }
        let adjacency = subset
            .iter()
            .map(|v| {
                self.adjacency[v]
                    .iter()
                    .filter_map(|&w| (index[w] != usize::MAX).then_some(index[w]))
                    .collect()
            })
            .collect();
        let mut g = Graph::from_raw(adjacency);
        if let Some(labels) = &self.labels {
            g.labels = Some(subset.iter().map(|v| labels[v].clone()).collect());
        }
        g
    }

    /// Renumbers vertices: old vertex `v` becomes `perm[v]`.
    pub fn relabeled(&self, perm: &[usize]) -> Graph {
        let n = self.n_vertices();
        let mut adjacency = vec![Vec::new(); n];
        for (v, list) in self.adjacency.iter().enumerate() {
            adjacency[perm[v]] = list.iter().map(|&w| perm[w]).collect();
        }
        let mut g = Graph::from_raw(adjacency);
        if let Some(labels) = &self.labels {
            let mut l = vec![String::new(); n];
            for (v, s) in labels.iter().enumerate() {
                l[perm[v]] = s.clone();
            }
            g.labels = Some(l);
        }
        g
    }

    /// Hop distances from `source`; `None` for unreachable vertices.
    pub fn bfs_distances(&self, source: usize) -> Result<Vec<Option<usize>>, GraphError> {
        self.check_vertex(source)?;
        Ok(self.bfs_within(source, None))
    }

    /// BFS restricted to vertices with `mask[v]` (when given).
    pub(crate) fn bfs_within(&self, source: usize, mask: Option<&[bool]>) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.n_vertices()];
        dist[source] = Some(0);
        let mut queue = VecDeque::from([source]);
        while let Some(u) = queue.pop_front() {
            let du = dist[u].unwrap_or_default();
            for &w in &self.adjacency[u] {
                if dist[w].is_none() && mask.is_none_or(|m| m[w]) {
                    dist[w] = Some(du + 1);
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    /// Distances from `source` with unreachable vertices as an error.
    pub(crate) fn distances_connected(&self, source: usize) -> Result<Vec<usize>, GraphError> {
        self.bfs_distances(source)?
            .into_iter()
            .map(|d| d.ok_or(GraphError::Disconnected))
            .collect()
    }

    pub fn is_connected(&self) -> bool {
        self.n_vertices() == 0 || self.bfs_within(0, None).iter().all(Option::is_some)
    }

    pub fn is_bipartite(&self) -> bool {
        let mut side: Vec<Option<bool>> = vec![None; self.n_vertices()];
        for start in 0..self.n_vertices() {
            if side[start].is_some() {
                continue;
            }
            side[start] = Some(false);
            let mut queue = VecDeque::from([start]);
            while let Some(u) = queue.pop_front() {
                let su = side[u].unwrap_or_default();
                for &w in &self.adjacency[u] {
                    match side[w] {
                        None => {
                            side[w] = Some(!su);
                            queue.push_back(w);
                        }
                        Some(sw) if sw == su => return false,
                        Some(_) => {}
                    }
                }
            }
        }
        true
    }

    /// Whether the subgraph induced by `subset` is isometric in `self`.
    ///
    /// A subset whose induced subgraph is disconnected is reported as
    /// [`Isometry::Disconnected`], not as a plain failure.
    pub fn is_isometric_subset(&self, subset: &VertexSubset) -> Result<Isometry, GraphError> {
        if let Some(max) = subset.max_vertex() {
            self.check_vertex(max)?;
        }
        if subset.is_empty() {
            return Ok(Isometry::Isometric);
        }
        let mask = subset.mask(self.n_vertices());
        let whole = subset.len() == self.n_vertices();
        let verdicts: Vec<Isometry> = subset
            .vertices()
            .par_iter()
            .map(|&x| {
                let inner = self.bfs_within(x, Some(&mask));
                if subset.iter().any(|y| inner[y].is_none()) {
                    return Isometry::Disconnected;
                }
                if whole {
                    return Isometry::Isometric;
                }
                let outer = self.bfs_within(x, None);
                if subset.iter().all(|y| inner[y] == outer[y]) {
                    Isometry::Isometric
                } else {
                    Isometry::NotIsometric
                }
            })
            .collect();
        if verdicts.contains(&Isometry::Disconnected) {
            Ok(Isometry::Disconnected)
        } else if verdicts.contains(&Isometry::NotIsometric) {
            Ok(Isometry::NotIsometric)
        } else {
            Ok(Isometry::Isometric)
        }
    }
}

/// Outcome of an isometric-subgraph test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Isometry {
    Isometric,
    NotIsometric,
    Disconnected,
}

impl Isometry {
    pub fn holds(self) -> bool {
        self == Isometry::Isometric
    }
}

/// The Pell graph on `generate_pell(n)` in canonical order, labeled by the
/// strings.
pub fn build_pell_graph(n: usize, limits: &BuildLimits) -> Result<Graph, GraphError> {
    if n > limits.pell {
        return Err(GraphError::OverBuildLimit {
            family: "pell",
            n,
            limit: limits.pell,
        });
    }
    let vertices = words::generate_pell(n);
    let table = PellTable::new(n as i64).expect("pell table within build limit");
    let adjacency: Vec<Vec<usize>> = vertices
        .par_iter()
        .map(|w| {
            words::rewrites(w.symbols())
                .into_iter()
                .map(|(_, v)| words::rank_with(&table, &v) as usize)
                .collect()
        })
        .collect();
    Graph::from_raw(adjacency).with_labels(vertices.iter().map(PellString::to_string).collect())
}

fn hamming_graph(strings: Vec<Vec<u8>>) -> Graph {
    let index: std::collections::HashMap<&[u8], usize> = strings
        .iter()
        .enumerate()
        .map(|(i, s)| (s.as_slice(), i))
        .collect();
    let adjacency = strings
        .iter()
        .map(|s| {
            let mut t = s.clone();
            let mut out = Vec::new();
            for i in 0..t.len() {
                t[i] ^= 1;
                if let Some(&j) = index.get(t.as_slice()) {
                    out.push(j);
                }
                t[i] ^= 1;
            }
            out
        })
        .collect();
    let labels = strings
        .iter()
        .map(|s| s.iter().map(|b| char::from(b'0' + b)).collect())
        .collect();
    Graph::from_raw(adjacency)
        .with_labels(labels)
        .expect("one label per vertex")
}

/// Fibonacci cube on `generate_fibonacci(n)`.
pub fn build_fibonacci_cube(n: usize, limits: &BuildLimits) -> Result<Graph, GraphError> {
    if n > limits.fibonacci {
        return Err(GraphError::OverBuildLimit {
            family: "fibonacci",
            n,
            limit: limits.fibonacci,
        });
    }
    Ok(hamming_graph(
        words::generate_fibonacci(n)
            .into_iter()
            .map(|f| f.bits().to_vec())
            .collect(),
    ))
}

/// Hypercube on all binary strings of length `n`, lexicographic order.
pub fn build_hypercube(n: usize, limits: &BuildLimits) -> Result<Graph, GraphError> {
    if n > limits.hypercube {
        return Err(GraphError::OverBuildLimit {
            family: "hypercube",
            n,
            limit: limits.hypercube,
        });
    }
    let strings = (0..1usize << n)
        .map(|x| (0..n).map(|i| ((x >> (n - 1 - i)) & 1) as u8).collect())
        .collect();
    Ok(hamming_graph(strings))
}

/// Vertex degree in the Pell graph read directly off the word: every `0`
/// and `1` can flip, every `11` factor (overlaps included) can become `22`
/// and every `22` pair can become `11`.
pub fn pell_degree_formula(w: &PellString) -> usize {
    let s = w.symbols();
    let flips = s.iter().filter(|&&c| c < 2).count();
    let elevens = s.windows(2).filter(|p| p == &[1, 1]).count();
    let twos = s.iter().filter(|&&c| c == 2).count() / 2;
    flips + elevens + twos
}

/// Small named graphs used as fixtures and in the examples.
pub mod families {
    use super::Graph;

    pub fn k1() -> Graph {
        Graph::from_edges(1, []).expect("valid")
    }

    pub fn complete(n: usize) -> Graph {
        Graph::from_edges(n, (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v)))).expect("valid")
    }

    pub fn path(n: usize) -> Graph {
        Graph::from_edges(n, (1..n).map(|v| (v - 1, v))).expect("valid")
    }

    pub fn cycle(n: usize) -> Graph {
        assert!(n >= 3, "cycles need at least 3 vertices");
        Graph::from_edges(n, (0..n).map(|v| (v, (v + 1) % n))).expect("valid")
    }

    pub fn complete_bipartite(a: usize, b: usize) -> Graph {
        Graph::from_edges(a + b, (0..a).flat_map(|u| (a..a + b).map(move |v| (u, v))))
            .expect("valid")
    }

    pub fn star(leaves: usize) -> Graph {
        Graph::from_edges(leaves + 1, (1..=leaves).map(|v| (0, v))).expect("valid")
    }

    /// The seven-vertex graph of the worked expansion example: two 4-cycles
    /// sharing the edge `u v` plus a pendant vertex at `v`.
    ///
    /// Vertex order: `a, u, v, d, e, f, g`.
    pub fn expansion_example() -> Graph {
        let edges = [
            (0, 1),
            (1, 2),
            (2, 3),
            (3, 0),
            (2, 4),
            (2, 6),
            (6, 5),
            (5, 1),
        ];
        Graph::from_edges(7, edges)
            .expect("valid")
            .with_labels(
                ["a", "u", "v", "d", "e", "f", "g"]
                    .map(String::from)
                    .to_vec(),
            )
            .expect("seven labels")
    }
}

#[cfg(test)]
mod tests {
    use super::families::*;
    use super::*;
    use crate::seq::pell;

    fn limits() -> BuildLimits {
        BuildLimits::default()
    }

    fn vertex(g: &Graph, label: &str) -> usize {
        g.labels().unwrap().iter().position(|l| l == label).unwrap()
    }

    #[test]
    fn small_pell_graphs() {
        let g0 = build_pell_graph(0, &limits()).unwrap();
        assert_eq!((g0.n_vertices(), g0.n_edges()), (1, 0));
        let g2 = build_pell_graph(2, &limits()).unwrap();
        assert_eq!((g2.n_vertices(), g2.n_edges()), (5, 5));
        let g4 = build_pell_graph(4, &limits()).unwrap();
        assert_eq!((g4.n_vertices(), g4.n_edges()), (29, 58));
    }

    #[test]
    fn pell_graph_matches_all_pairs_oracle() {
        // Independent adjacency: two words are adjacent iff they differ in
        // one coordinate as {0,1}, or in two consecutive coordinates as 11/22.
        fn adjacent(a: &[u8], b: &[u8]) -> bool {
            let diff: Vec<usize> = (0..a.len()).filter(|&i| a[i] != b[i]).collect();
            match diff.as_slice() {
                [i] => a[*i] + b[*i] == 1,
                [i, j] if *j == i + 1 => {
                    let (x, y) = ((a[*i], a[*j]), (b[*i], b[*j]));
                    (x == (1, 1) && y == (2, 2)) || (x == (2, 2) && y == (1, 1))
                }
                _ => false,
            }
        }
        for n in 0..=7 {
            let g = build_pell_graph(n, &limits()).unwrap();
            let words = crate::words::generate_pell(n);
            for u in 0..words.len() {
                for v in 0..words.len() {
                    assert_eq!(
                        g.has_edge(u, v),
                        adjacent(words[u].symbols(), words[v].symbols()),
                        "{} {}",
                        words[u],
                        words[v]
                    );
                }
            }
        }
    }

    #[test]
    fn pell_edge_count_identity() {
        for n in 1..=14 {
            let g = build_pell_graph(n, &limits()).unwrap();
            let twice = n as u128 * pell(n as i64).unwrap().get();
            assert_eq!(2 * g.n_edges() as u128, twice, "n = {n}");
        }
    }

    #[test]
    fn build_limit_is_enforced() {
        let small = BuildLimits {
            pell: 3,
            fibonacci: 3,
            hypercube: 3,
        };
        assert!(matches!(
            build_pell_graph(4, &small),
            Err(GraphError::OverBuildLimit { n: 4, limit: 3, .. })
        ));
        assert!(build_hypercube(4, &small).is_err());
        assert!(build_fibonacci_cube(4, &small).is_err());
    }

    #[test]
    fn cubes() {
        let q3 = build_hypercube(3, &limits()).unwrap();
        assert_eq!((q3.n_vertices(), q3.n_edges()), (8, 12));
        assert!((0..8).all(|v| q3.degree(v).unwrap() == 3));
        let f2 = build_fibonacci_cube(2, &limits()).unwrap();
        assert_eq!(f2.labels().unwrap(), ["00", "01", "10"]);
        assert_eq!(f2.edges().collect::<Vec<_>>(), vec![(0, 1), (0, 2)]);
        let f0 = build_fibonacci_cube(0, &limits()).unwrap();
        assert_eq!((f0.n_vertices(), f0.n_edges()), (1, 0));
    }

    #[test]
    fn degree_examples() {
        let g2 = build_pell_graph(2, &limits()).unwrap();
        assert_eq!(g2.degree(vertex(&g2, "22")).unwrap(), 1);
        assert_eq!(g2.degree(vertex(&g2, "11")).unwrap(), 3);
        assert!(matches!(
            g2.degree(5),
            Err(GraphError::VertexOutOfRange { .. })
        ));
    }

    #[test]
    fn degree_formula_examples() {
        let d = |s: &str| pell_degree_formula(&s.parse().unwrap());
        assert_eq!(d("0"), 1);
        assert_eq!(d("22"), 1);
        assert_eq!(d("111"), 5);
    }

    #[test]
    fn degree_formula_matches_graph() {
        for n in 0..=10 {
            let g = build_pell_graph(n, &limits()).unwrap();
            for (v, w) in crate::words::generate_pell(n).iter().enumerate() {
                assert_eq!(pell_degree_formula(w), g.degree(v).unwrap());
            }
        }
    }

    #[test]
    fn pell_graphs_are_connected_and_bipartite() {
        for n in 0..=12 {
            let g = build_pell_graph(n, &limits()).unwrap();
            assert!(g.is_connected() && g.is_bipartite(), "n = {n}");
        }
        assert!(!cycle(5).is_bipartite());
    }

    #[test]
    fn canonical_decomposition_neighbour_rule() {
        for n in 2..=10 {
            let g = build_pell_graph(n, &limits()).unwrap();
            let labels = g.labels().unwrap();
            for v in 0..g.n_vertices() {
                if !labels[v].starts_with("22") {
                    continue;
                }
                let ones = g
                    .neighbors(v)
                    .iter()
                    .filter(|&&w| labels[w].starts_with('1'))
                    .count();
                let zeros = g
                    .neighbors(v)
                    .iter()
                    .filter(|&&w| labels[w].starts_with('0'))
                    .count();
                assert_eq!((ones, zeros), (1, 0), "{}", labels[v]);
            }
        }
    }

    #[test]
    fn isometry_examples() {
        let c6 = cycle(6);
        assert_eq!(
            c6.is_isometric_subset(&VertexSubset::all(6)).unwrap(),
            Isometry::Isometric
        );
        assert_eq!(
            c6.is_isometric_subset(&VertexSubset::new(vec![0, 3]))
                .unwrap(),
            Isometry::Disconnected
        );
        let q2 = cycle(4);
        for skip in 0..4 {
            let s = VertexSubset::new((0..4).filter(|&v| v != skip).collect());
            assert_eq!(q2.is_isometric_subset(&s).unwrap(), Isometry::Isometric);
        }
        // five consecutive vertices of C_6: d(0,4) is 4 inside the arc, 2 in C_6
        let s = VertexSubset::new(vec![0, 1, 2, 3, 4]);
        assert_eq!(c6.is_isometric_subset(&s).unwrap(), Isometry::NotIsometric);
        assert!(c6.is_isometric_subset(&VertexSubset::new(vec![9])).is_err());
    }

    #[test]
    fn bfs_on_path() {
        let p = path(4);
        assert_eq!(
            p.bfs_distances(0).unwrap(),
            vec![Some(0), Some(1), Some(2), Some(3)]
        );
        let two = Graph::from_edges(2, []).unwrap();
        assert_eq!(two.bfs_distances(0).unwrap(), vec![Some(0), None]);
        assert!(!two.is_connected());
    }

    #[test]
    fn from_edges_rejects_bad_input() {
        assert!(matches!(
            Graph::from_edges(2, [(0, 0)]),
            Err(GraphError::SelfLoop(0))
        ));
        assert!(Graph::from_edges(2, [(0, 2)]).is_err());
        let g = Graph::from_edges(2, [(0, 1), (1, 0)]).unwrap();
        assert_eq!(g.n_edges(), 1);
    }

    #[test]
    fn induced_and_relabeled() {
        let g = build_pell_graph(2, &limits()).unwrap();
        let sub = g.induced_subgraph(&VertexSubset::new(vec![2, 3, 4]));
        assert_eq!(sub.labels().unwrap(), ["10", "11", "22"]);
        assert_eq!(sub.edges().collect::<Vec<_>>(), vec![(0, 1), (1, 2)]);
        let r = g.relabeled(&[4, 3, 2, 1, 0]);
        assert_eq!(r.label(0), "22");
        assert_eq!(r.n_edges(), 5);
        assert!(r.has_edge(0, 1));
    }

    #[test]
    fn named_families() {
        assert_eq!(complete(4).n_edges(), 6);
        assert_eq!(complete_bipartite(2, 3).n_edges(), 6);
        assert_eq!(star(3).degree(0).unwrap(), 3);
        assert_eq!(expansion_example().n_edges(), 8);
        assert_eq!(k1().n_vertices(), 1);
    }
}

use std::fmt;

use serde::{Deserialize, Serialize};

use super::{Expansion, ExpansionError, ExpansionSpec, Side};
use crate::graphs::{Graph, GraphError, VertexSubset};

/// `W_uv`, `W_vu`, `U_uv`, `U_vu` and `F_uv` for an edge `uv`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThetaSets {
    pub edge: (usize, usize),
    /// Vertices strictly closer to `u` than to `v`.
    pub w_uv: VertexSubset,
    pub w_vu: VertexSubset,
    /// Vertices of `w_uv` with a neighbour in `w_vu`.
    pub u_uv: VertexSubset,
    pub u_vu: VertexSubset,
    /// Edges `(x, z)` with `x ∈ u_uv`, `z ∈ u_vu`, sorted.
    pub f_uv: Vec<(usize, usize)>,
}

impl ThetaSets {
    /// Vertices equidistant from both ends of the edge.
    pub fn equidistant(&self, n_vertices: usize) -> Vec<usize> {
        (0..n_vertices)
            .filter(|&x| !self.w_uv.contains(x) && !self.w_vu.contains(x))
            .collect()
    }

    pub fn is_partition(&self, n_vertices: usize) -> bool {
        self.w_uv.len() + self.w_vu.len() == n_vertices
    }

    /// Whether `f_uv` pairs `u_uv` and `u_vu` one-to-one.
    pub fn is_perfect_matching(&self) -> bool {
        let mut left: Vec<usize> = self.f_uv.iter().map(|e| e.0).collect();
        let mut right: Vec<usize> = self.f_uv.iter().map(|e| e.1).collect();
        left.sort_unstable();
        right.sort_unstable();
        left == self.u_uv.vertices() && right == self.u_vu.vertices()
    }
}

pub fn theta_sets(g: &Graph, u: usize, v: usize) -> Result<ThetaSets, ExpansionError> {
    g.check_vertex(u)?;
    g.check_vertex(v)?;
    if !g.has_edge(u, v) {
        return Err(GraphError::NotAnEdge(u, v).into());
    }
    let (du, dv) = rayon::join(|| g.distances_connected(u), || g.distances_connected(v));
    let (du, dv) = (du?, dv?);
    let n = g.n_vertices();
    let in_uv: Vec<bool> = (0..n).map(|x| du[x] < dv[x]).collect();
    let in_vu: Vec<bool> = (0..n).map(|x| dv[x] < du[x]).collect();
    let boundary = |own: &[bool], other: &[bool]| -> Vec<bool> {
        (0..n)
            .map(|x| own[x] && g.neighbors(x).iter().any(|&z| other[z]))
            .collect()
    };
    let (b_uv, b_vu) = (boundary(&in_uv, &in_vu), boundary(&in_vu, &in_uv));
    let mut f_uv: Vec<(usize, usize)> = (0..n)
        .filter(|&x| b_uv[x])
        .flat_map(|x| {
            g.neighbors(x)
                .iter()
                .filter(|&&z| b_vu[z])
                .map(move |&z| (x, z))
        })
        .collect();
    f_uv.sort_unstable();
    Ok(ThetaSets {
        edge: (u, v),
        w_uv: VertexSubset::from_mask(&in_uv),
        w_vu: VertexSubset::from_mask(&in_vu),
        u_uv: VertexSubset::from_mask(&b_uv),
        u_vu: VertexSubset::from_mask(&b_vu),
        f_uv,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "reason", rename_all = "snake_case")]
pub enum NotContractible {
    /// `W_ab ∪ W_ba ≠ V`.
    NotPartition { equidistant: Vec<usize> },
    /// `F_ab` is not a perfect matching between `U_ab` and `U_ba`.
    NotMatching,
}

impl fmt::Display for NotContractible {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NotContractible::NotPartition { equidistant } => {
                write!(
                    f,
                    "W-sets do not partition V ({} equidistant vertices)",
                    equidistant.len()
                )
            }
            NotContractible::NotMatching => {
                write!(f, "F is not a perfect matching between the U-sets")
            }
        }
    }
}

/// `G'` obtained by contracting the edges of `F_ab`, with the spec that
/// expands it back and the map from `G` into it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Contraction {
    pub graph: Graph,
    pub spec: ExpansionSpec,
    pub theta: ThetaSets,
    /// `image[x]` is the vertex of `graph` that `x` collapses to.
    pub image: Vec<usize>,
    /// Which copy `x` becomes when `graph` is expanded again.
    pub side: Vec<Side>,
}

impl Contraction {
    /// Maps each vertex of the contracted-from graph to its vertex in
    /// `expanded`, when that map exists.
    pub fn bijection_into(&self, expanded: &Expansion) -> Option<Vec<usize>> {
        self.image
            .iter()
            .zip(&self.side)
            .map(|(&i, &s)| expanded.index_of(i, s))
            .collect()
    }

    /// Whether expanding `self.spec` rebuilds `original` exactly under the
    /// tracked bijection.
    pub fn roundtrip_matches(&self, original: &Graph, expanded: &Expansion) -> bool {
        self.bijection_into(expanded)
            .is_some_and(|map| is_isomorphism(original, &expanded.graph, &map))
    }
}

/// `map` is a bijection `V(a) → V(b)` carrying edges exactly onto edges.
pub(crate) fn is_isomorphism(a: &Graph, b: &Graph, map: &[usize]) -> bool {
    if a.n_vertices() != b.n_vertices() || a.n_edges() != b.n_edges() || map.len() != a.n_vertices()
    {
        return false;
    }
    let mut seen = vec![false; b.n_vertices()];
    for &m in map {
        if m >= seen.len() || std::mem::replace(&mut seen[m], true) {
            return false;
        }
    }
    a.edges().all(|(x, y)| b.has_edge(map[x], map[y]))
}

/// Contracts `g` along `edge` (default: the lexicographically smallest edge).
pub fn contract(g: &Graph, edge: Option<(usize, usize)>) -> Result<Contraction, ExpansionError> {
    let (a, b) = match edge {
        Some(e) => e,
        None => g.edges().next().ok_or(ExpansionError::NoEdges)?,
    };
    let theta = theta_sets(g, a, b)?;
    let n = g.n_vertices();
    let fail = |reason| ExpansionError::NotContractible {
        edge: (a, b),
        reason,
    };
    if !theta.is_partition(n) {
        return Err(fail(NotContractible::NotPartition {
            equidistant: theta.equidistant(n),
        }));
    }
    if !theta.is_perfect_matching() {
        return Err(fail(NotContractible::NotMatching));
    }
    let mut partner = vec![None; n];
    for &(x, z) in &theta.f_uv {
        partner[z] = Some(x);
    }
    let mut image = vec![usize::MAX; n];
    let mut next = 0;
    for x in 0..n {
        if partner[x].is_none() {
            image[x] = next;
            next += 1;
        }
    }
    for x in 0..n {
        if let Some(p) = partner[x] {
            image[x] = image[p];
        }
    }
    let side: Vec<Side> = (0..n)
        .map(|x| {
            if theta.w_uv.contains(x) {
                Side::First
            } else {
                Side::Second
            }
        })
        .collect();
    let edges = g
        .edges()
        .filter(|&(x, y)| side[x] == side[y])
        .map(|(x, y)| (image[x], image[y]));
    let mut graph =
        Graph::from_edges(next, edges).expect("images are in range and distinct per edge");
    if let Some(labels) = g.labels() {
        let mut l = vec![String::new(); next];
        for x in (0..n).filter(|&x| partner[x].is_none()) {
            l[image[x]] = labels[x].clone();
        }
        graph = graph.with_labels(l).expect("one label per vertex");
    }
    let spec = ExpansionSpec::new(
        theta.w_uv.iter().map(|x| image[x]).collect::<Vec<_>>(),
        theta.w_vu.iter().map(|x| image[x]).collect::<Vec<_>>(),
    );
    Ok(Contraction {
        graph,
        spec,
        theta,
        image,
        side,
    })
}

//! Isometric expansions of graphs with respect to a cover `(V1, V2)`, the
//! inverse contraction along an edge, partial-cube recognition by iterated
//! contraction, and the irregularity of an expansion evaluated on the host.
//!
//! The expansion `H` of `G` is a copy of `⟨V1⟩` and a copy of `⟨V2⟩` joined
//! by a perfect matching between the two copies of `V1 ∩ V2`. Output vertices
//! are numbered by walking the host in order and emitting the first copy
//! (when `v ∈ V1`) before the second copy (when `v ∈ V2`).

mod random;
mod recognize;
mod theta;

pub use random::{
    random_expansion_sequence, sample_spec, RandomSequence, SampledStep, SamplerConfig,
    SamplingMode,
};
pub use recognize::{is_partial_cube, Certificate, Recognition, RecognitionFailure};
pub(crate) use theta::is_isomorphism;
pub use theta::{contract, theta_sets, Contraction, NotContractible, ThetaSets};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graphs::{Graph, GraphError, Isometry, VertexSubset};
use crate::irregularity::irr;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExpansionError {
    #[error("invalid expansion spec: {0:?}")]
    InvalidSpec(Vec<SpecViolation>),
    #[error("expansion is not peripheral (neither side covers the host)")]
    NotPeripheral,
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("not contractible along {edge:?}: {reason}")]
    NotContractible {
        edge: (usize, usize),
        reason: NotContractible,
    },
    #[error("graph has no edges to contract")]
    NoEdges,
    #[error("no valid spec found after {attempts} attempts on a {n_vertices}-vertex host")]
    SamplingExhausted { attempts: usize, n_vertices: usize },
}

/// Which copy of a host vertex an expanded vertex is.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Side {
    First,
    Second,
}

/// The cover `(V1, V2)` an expansion is taken with respect to. The host
/// graph is passed alongside.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExpansionSpec {
    pub v1: VertexSubset,
    pub v2: VertexSubset,
}

impl ExpansionSpec {
    pub fn new(v1: impl Into<VertexSubset>, v2: impl Into<VertexSubset>) -> Self {
        ExpansionSpec {
            v1: v1.into(),
            v2: v2.into(),
        }
    }

    /// `V1 = V2 = V(host)`.
    pub fn doubling(n_vertices: usize) -> Self {
        ExpansionSpec {
            v1: VertexSubset::all(n_vertices),
            v2: VertexSubset::all(n_vertices),
        }
    }

    pub fn intersection(&self) -> VertexSubset {
        VertexSubset::new(self.v1.iter().filter(|&v| self.v2.contains(v)).collect())
    }

    pub fn is_peripheral(&self, n_vertices: usize) -> bool {
        self.v1.len() == n_vertices || self.v2.len() == n_vertices
    }

    fn swapped(&self) -> Self {
        ExpansionSpec {
            v1: self.v2.clone(),
            v2: self.v1.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "violation", rename_all = "snake_case")]
pub enum SpecViolation {
    VertexOutOfRange {
        vertex: usize,
    },
    /// Vertices in neither side.
    NotCovering {
        missing: Vec<usize>,
    },
    EmptyIntersection,
    NotIsometric {
        side: Side,
        verdict: Isometry,
    },
    /// An edge from `V1 \ V2` to `V2 \ V1`.
    CrossEdge {
        u: usize,
        v: usize,
    },
}

/// Lists every way `spec` fails to define an expansion of `host`.
pub fn validate_spec(host: &Graph, spec: &ExpansionSpec) -> Vec<SpecViolation> {
    let n = host.n_vertices();
    let mut out: Vec<SpecViolation> = spec
        .v1
        .iter()
        .chain(spec.v2.iter())
        .filter(|&v| v >= n)
        .map(|vertex| SpecViolation::VertexOutOfRange { vertex })
        .collect();
    if !out.is_empty() {
        return out;
    }
    let (m1, m2) = (spec.v1.mask(n), spec.v2.mask(n));
    let missing: Vec<usize> = (0..n).filter(|&v| !m1[v] && !m2[v]).collect();
    if !missing.is_empty() {
        out.push(SpecViolation::NotCovering { missing });
    }
    if !(0..n).any(|v| m1[v] && m2[v]) {
        out.push(SpecViolation::EmptyIntersection);
    }
    for (side, subset) in [(Side::First, &spec.v1), (Side::Second, &spec.v2)] {
        match host.is_isometric_subset(subset) {
            Ok(Isometry::Isometric) if !subset.is_empty() => {}
            Ok(Isometry::Isometric) => out.push(SpecViolation::NotIsometric {
                side,
                verdict: Isometry::Disconnected,
            }),
            Ok(verdict) => out.push(SpecViolation::NotIsometric { side, verdict }),
            Err(_) => unreachable!("range checked above"),
        }
    }
    for (u, v) in host.edges() {
        let only1 = |x: usize| m1[x] && !m2[x];
        let only2 = |x: usize| m2[x] && !m1[x];
        if (only1(u) && only2(v)) || (only2(u) && only1(v)) {
            out.push(SpecViolation::CrossEdge { u, v });
        }
    }
    out
}

fn ensure_valid(host: &Graph, spec: &ExpansionSpec) -> Result<(), ExpansionError> {
    let violations = validate_spec(host, spec);
    if violations.is_empty() {
        Ok(())
    } else {
        Err(ExpansionError::InvalidSpec(violations))
    }
}

/// An expanded graph with the provenance of every vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Expansion {
    pub graph: Graph,
    /// `origin[x] = (host vertex, copy)`.
    pub origin: Vec<(usize, Side)>,
    first: Vec<Option<usize>>,
    second: Vec<Option<usize>>,
}

impl Expansion {
    pub fn index_of(&self, host_vertex: usize, side: Side) -> Option<usize> {
        let table = match side {
            Side::First => &self.first,
            Side::Second => &self.second,
        };
        table.get(host_vertex).copied().flatten()
    }

    /// Edges `v₁ v₂` created for `v ∈ V1 ∩ V2`.
    pub fn matching(&self) -> Vec<(usize, usize)> {
        self.first
            .iter()
            .zip(&self.second)
            .filter_map(|(a, b)| Some(((*a)?, (*b)?)))
            .collect()
    }
}

/// Expands `host` with respect to `spec` after validating it.
pub fn expand(host: &Graph, spec: &ExpansionSpec) -> Result<Expansion, ExpansionError> {
    ensure_valid(host, spec)?;
    Ok(expand_unchecked(host, spec))
}

pub(crate) fn expand_unchecked(host: &Graph, spec: &ExpansionSpec) -> Expansion {
    let n = host.n_vertices();
    let (m1, m2) = (spec.v1.mask(n), spec.v2.mask(n));
    let mut origin = Vec::with_capacity(spec.v1.len() + spec.v2.len());
    let mut first = vec![None; n];
    let mut second = vec![None; n];
    for v in 0..n {
        if m1[v] {
            first[v] = Some(origin.len());
            origin.push((v, Side::First));
        }
        if m2[v] {
            second[v] = Some(origin.len());
            origin.push((v, Side::Second));
        }
    }
    let mut edges = Vec::new();
    for v in 0..n {
        if let (Some(a), Some(b)) = (first[v], second[v]) {
            edges.push((a, b));
        }
    }
    for (u, v) in host.edges() {
        if let (Some(a), Some(b)) = (first[u], first[v]) {
            edges.push((a, b));
        }
        if let (Some(a), Some(b)) = (second[u], second[v]) {
            edges.push((a, b));
        }
    }
    let graph = Graph::from_edges(origin.len(), edges).expect("expansion edges are in range");
    Expansion {
        graph,
        origin,
        first,
        second,
    }
}

/// Irregularity of the expansion computed on the host:
///
/// `irr⟨V1⟩ + irr⟨V2⟩ + Σ_{v ∈ I} (deg v − |N_I(v)|) + Σ_{v ∈ I} ||N_{V1∖V2}(v)| − |N_{V2∖V1}(v)||`
/// with `I = V1 ∩ V2`.
pub fn irr_expansion_rhs(host: &Graph, spec: &ExpansionSpec) -> Result<u128, ExpansionError> {
    ensure_valid(host, spec)?;
    let n = host.n_vertices();
    let (m1, m2) = (spec.v1.mask(n), spec.v2.mask(n));
    let mut total = irr(&host.induced_subgraph(&spec.v1)) + irr(&host.induced_subgraph(&spec.v2));
    for v in (0..n).filter(|&v| m1[v] && m2[v]) {
        let (mut both, mut only1, mut only2) = (0usize, 0usize, 0usize);
        for &w in host.neighbors(v) {
            match (m1[w], m2[w]) {
                (true, true) => both += 1,
                (true, false) => only1 += 1,
                _ => only2 += 1,
            }
        }
        total += (host.neighbors(v).len() - both) as u128;
        total += only1.abs_diff(only2) as u128;
    }
    Ok(total)
}

/// Peripheral specialization: with notation chosen so that `V1 = V(host)`,
/// `irr⟨V1⟩ + irr⟨V2⟩ + 2 Σ_{v ∈ V2} |N_{V1∖V2}(v)|`.
pub fn irr_peripheral_rhs(host: &Graph, spec: &ExpansionSpec) -> Result<u128, ExpansionError> {
    ensure_valid(host, spec)?;
    let n = host.n_vertices();
    let spec = if spec.v1.len() == n {
        spec.clone()
    } else if spec.v2.len() == n {
        spec.swapped()
    } else {
        return Err(ExpansionError::NotPeripheral);
    };
    let m2 = spec.v2.mask(n);
    let outside: usize = spec
        .v2
        .iter()
        .map(|v| host.neighbors(v).iter().filter(|&&w| !m2[w]).count())
        .sum();
    Ok(irr(host) + irr(&host.induced_subgraph(&spec.v2)) + 2 * outside as u128)
}

/// Irregularity of the doubling `V1 = V2 = V(g)`, via the peripheral form.
pub fn irr_doubled(g: &Graph) -> Result<u128, ExpansionError> {
    irr_peripheral_rhs(g, &ExpansionSpec::doubling(g.n_vertices()))
}

/// Boundary edges `(u, v)` with `v ∈ V1 ∩ V2` and `u` on one side only,
/// where `u` has the larger degree inside that side. The right-hand side of
/// [`irr_expansion_rhs`] counts every boundary edge as gaining one unit of
/// imbalance; on these edges it loses one instead, so
/// `irr_expansion_rhs = irr(H) + 2 · |boundary_inversions|`.
pub fn boundary_inversions(
    host: &Graph,
    spec: &ExpansionSpec,
) -> Result<Vec<(usize, usize)>, ExpansionError> {
    ensure_valid(host, spec)?;
    let n = host.n_vertices();
    let (m1, m2) = (spec.v1.mask(n), spec.v2.mask(n));
    let side_degree = |x: usize, m: &[bool]| host.neighbors(x).iter().filter(|&&w| m[w]).count();
    let mut out = Vec::new();
    for v in (0..n).filter(|&v| m1[v] && m2[v]) {
        for &u in host.neighbors(v) {
            let side = match (m1[u], m2[u]) {
                (true, false) => &m1,
                (false, true) => &m2,
                _ => continue,
            };
            if side_degree(u, side) > side_degree(v, side) {
                out.push((u, v));
            }
        }
    }
    out.sort_unstable();
    Ok(out)
}

/// `irr(H)` evaluated on the host from side degrees alone, without building
/// `H`. Agrees with [`irr_expansion_rhs`] exactly when
/// [`boundary_inversions`] is empty.
pub fn irr_expansion_exact(host: &Graph, spec: &ExpansionSpec) -> Result<u128, ExpansionError> {
    ensure_valid(host, spec)?;
    let n = host.n_vertices();
    let (m1, m2) = (spec.v1.mask(n), spec.v2.mask(n));
    let both = |x: usize| (m1[x] && m2[x]) as i64;
    let degrees = |m: &[bool]| -> Vec<i64> {
        (0..n)
            .map(|x| host.neighbors(x).iter().filter(|&&w| m[w]).count() as i64 + both(x))
            .collect()
    };
    let (d1, d2) = (degrees(&m1), degrees(&m2));
    let mut total = 0u128;
    for (u, v) in host.edges() {
        if m1[u] && m1[v] {
            total += d1[u].abs_diff(d1[v]) as u128;
        }
        if m2[u] && m2[v] {
            total += d2[u].abs_diff(d2[v]) as u128;
        }
    }
    for v in (0..n).filter(|&v| both(v) == 1) {
        total += d1[v].abs_diff(d2[v]) as u128;
    }
    Ok(total)
}

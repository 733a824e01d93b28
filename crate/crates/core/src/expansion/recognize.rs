use serde::{Deserialize, Serialize};

use super::theta::is_isomorphism;
use super::{
    contract, expand, expand_unchecked, validate_spec, Contraction, ExpansionError, ExpansionSpec,
    SpecViolation,
};
use crate::graphs::{families, Graph};

/// Expansion sequence from `K_1` that rebuilds a partial cube.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    /// Specs in replay order; spec `k` is over the graph produced by the
    /// first `k` expansions.
    pub specs: Vec<ExpansionSpec>,
    /// `vertex_map[x]` is the replayed vertex standing for vertex `x` of the
    /// recognized graph.
    pub vertex_map: Vec<usize>,
}

impl Certificate {
    pub fn replay(&self) -> Result<Graph, ExpansionError> {
        let mut g = families::k1();
        for spec in &self.specs {
            g = expand(&g, spec)?.graph;
        }
        Ok(g)
    }

    /// Replays the specs and checks that `vertex_map` is an isomorphism from
    /// `g` onto the result.
    pub fn verify(&self, g: &Graph) -> bool {
        self.replay()
            .is_ok_and(|h| is_isomorphism(g, &h, &self.vertex_map))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "failure", rename_all = "snake_case")]
pub enum RecognitionFailure {
    Empty,
    Disconnected,
    /// Contraction along the smallest edge failed.
    NotContractible {
        detail: String,
    },
    /// The contraction produced a spec that does not define an expansion.
    InvalidSpec {
        violations: Vec<SpecViolation>,
    },
    /// Expanding the contracted graph did not give back the graph.
    RoundTripMismatch,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Recognition {
    PartialCube(Certificate),
    /// Failed at contraction step `step` (0 = the input graph).
    Rejected {
        step: usize,
        failure: RecognitionFailure,
    },
}

impl Recognition {
    pub fn is_partial_cube(&self) -> bool {
        matches!(self, Recognition::PartialCube(_))
    }

    pub fn certificate(&self) -> Option<&Certificate> {
        match self {
            Recognition::PartialCube(c) => Some(c),
            Recognition::Rejected { .. } => None,
        }
    }
}

/// Recognizes partial cubes by contracting along the smallest edge until
/// `K_1` remains. Every step's spec is validated and its expansion checked
/// against the graph it came from, so acceptance is backed by a replayable
/// certificate. Each step costs `O(|V|·|E|)` in the isometry checks.
pub fn is_partial_cube(g: &Graph) -> Recognition {
    if g.n_vertices() == 0 {
        return Recognition::Rejected {
            step: 0,
            failure: RecognitionFailure::Empty,
        };
    }
    if !g.is_connected() {
        return Recognition::Rejected {
            step: 0,
            failure: RecognitionFailure::Disconnected,
        };
    }
    let mut chain: Vec<Contraction> = Vec::new();
    let mut current = g.clone();
    while current.n_vertices() > 1 {
        let step = chain.len();
        let reject = |failure| Recognition::Rejected { step, failure };
        let c = match contract(&current, None) {
            Ok(c) => c,
            Err(e) => {
                return reject(RecognitionFailure::NotContractible {
                    detail: e.to_string(),
                })
            }
        };
        let violations = validate_spec(&c.graph, &c.spec);
        if !violations.is_empty() {
            return reject(RecognitionFailure::InvalidSpec { violations });
        }
        let expanded = expand_unchecked(&c.graph, &c.spec);
        if !c.roundtrip_matches(&current, &expanded) {
            return reject(RecognitionFailure::RoundTripMismatch);
        }
        current = c.graph.clone();
        chain.push(c);
    }

    // Replay bottom-up, carrying each contracted graph's vertices into the
    // replayed numbering.
    let mut replayed = families::k1();
    let mut map = vec![0usize];
    let mut specs = Vec::with_capacity(chain.len());
    for c in chain.iter().rev() {
        let spec = ExpansionSpec::new(
            c.spec.v1.iter().map(|v| map[v]).collect::<Vec<_>>(),
            c.spec.v2.iter().map(|v| map[v]).collect::<Vec<_>>(),
        );
        let expanded = expand_unchecked(&replayed, &spec);
        map = c
            .image
            .iter()
            .zip(&c.side)
            .map(|(&i, &s)| expanded.index_of(map[i], s).expect("side present in spec"))
            .collect();
        replayed = expanded.graph;
        specs.push(spec);
    }
    Recognition::PartialCube(Certificate {
        specs,
        vertex_map: map,
    })
}

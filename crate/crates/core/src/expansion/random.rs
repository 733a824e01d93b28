//! Seeded random expansion sequences, used as fixtures for the
//! irregularity-of-expansion identities.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{expand_unchecked, theta_sets, validate_spec, ExpansionError, ExpansionSpec};
use crate::graphs::{families, Graph, VertexSubset};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SamplingMode {
    /// Draw from all candidate generators.
    Mixed,
    /// Always `V1 = V2 = V`; `n` steps from `K_1` give `Q_n`.
    DoublingOnly,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SamplerConfig {
    /// Candidates tried per step before giving up.
    pub max_attempts: usize,
    /// Expanded graphs stay at or below this many vertices.
    pub max_vertices: usize,
    pub mode: SamplingMode,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        SamplerConfig {
            max_attempts: 500,
            max_vertices: 200,
            mode: SamplingMode::Mixed,
        }
    }
}

/// Grows a connected vertex set from `start` inside `allowed` until it has
/// `target` vertices or cannot grow.
fn grow<R: Rng>(
    g: &Graph,
    seed_set: &[usize],
    allowed: &[bool],
    target: usize,
    rng: &mut R,
) -> Vec<bool> {
    let mut inside = vec![false; g.n_vertices()];
    let mut members = Vec::new();
    for &s in seed_set {
        if !inside[s] {
            inside[s] = true;
            members.push(s);
        }
    }
    while members.len() < target {
        let frontier: Vec<usize> = members
            .iter()
            .flat_map(|&x| g.neighbors(x).iter().copied())
            .filter(|&w| allowed[w] && !inside[w])
            .collect();
        let Some(&w) = frontier.choose(rng) else {
            break;
        };
        inside[w] = true;
        members.push(w);
    }
    inside
}

fn candidate<R: Rng>(host: &Graph, rng: &mut R, budget: usize) -> Option<ExpansionSpec> {
    let n = host.n_vertices();
    let everything = vec![true; n];
    let all = VertexSubset::all(n);
    let random_edge = |rng: &mut R| {
        let edges: Vec<(usize, usize)> = host.edges().collect();
        edges.choose(rng).copied()
    };
    let spec = match rng.gen_range(0..10) {
        // doubling
        0 if n <= budget => ExpansionSpec::doubling(n),
        // peripheral, second side grown from a random vertex
        0..=3 => {
            let target = rng.gen_range(1..=budget.min(n).max(1));
            let start = rng.gen_range(0..n);
            let side = VertexSubset::from_mask(&grow(host, &[start], &everything, target, rng));
            ExpansionSpec::new(all, side)
        }
        // peripheral, second side an intersection of halfspaces
        4..=5 => {
            let mut mask = everything.clone();
            for _ in 0..rng.gen_range(1..=3) {
                let (a, b) = random_edge(rng)?;
                let t = theta_sets(host, a, b).ok()?;
                let half = if rng.gen_bool(0.5) { &t.w_uv } else { &t.w_vu };
                let keep = half.mask(n);
                mask.iter_mut().zip(keep).for_each(|(m, k)| *m &= k);
            }
            ExpansionSpec::new(all, VertexSubset::from_mask(&mask))
        }
        // two halves of an edge cut, one side widened past the boundary
        _ => {
            let (a, b) = random_edge(rng)?;
            let t = theta_sets(host, a, b).ok()?;
            let far = t.w_vu.mask(n);
            let extra = rng.gen_range(0..=3);
            let widened = grow(host, t.u_vu.vertices(), &far, t.u_vu.len() + extra, rng);
            let mut v1 = t.w_uv.mask(n);
            v1.iter_mut().zip(widened).for_each(|(m, w)| *m |= w);
            ExpansionSpec::new(VertexSubset::from_mask(&v1), t.w_vu)
        }
    };
    let spec = if rng.gen_bool(0.5) {
        ExpansionSpec::new(spec.v2, spec.v1)
    } else {
        spec
    };
    Some(spec)
}

/// Draws a valid spec for `host` by rejection sampling.
pub fn sample_spec<R: Rng>(
    host: &Graph,
    rng: &mut R,
    config: &SamplerConfig,
) -> Result<ExpansionSpec, ExpansionError> {
    let n = host.n_vertices();
    if config.mode == SamplingMode::DoublingOnly {
        return Ok(ExpansionSpec::doubling(n));
    }
    let budget = config.max_vertices.saturating_sub(n);
    let exhausted = ExpansionError::SamplingExhausted {
        attempts: config.max_attempts,
        n_vertices: n,
    };
    if budget == 0 {
        return Err(exhausted);
    }
    for _ in 0..config.max_attempts {
        let Some(spec) = candidate(host, rng, budget) else {
            continue;
        };
        if spec.intersection().len() > budget {
            continue;
        }
        if validate_spec(host, &spec).is_empty() {
            return Ok(spec);
        }
    }
    Err(exhausted)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SampledStep {
    pub host: Graph,
    pub spec: ExpansionSpec,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RandomSequence {
    pub graph: Graph,
    pub steps: Vec<SampledStep>,
}

/// `steps` random expansions starting from `K_1`, deterministic in `seed`.
pub fn random_expansion_sequence(
    steps: usize,
    seed: u64,
    config: &SamplerConfig,
) -> Result<RandomSequence, ExpansionError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut graph = families::k1();
    let mut taken = Vec::with_capacity(steps);
    for _ in 0..steps {
        let spec = sample_spec(&graph, &mut rng, config)?;
        let next = expand_unchecked(&graph, &spec).graph;
        taken.push(SampledStep { host: graph, spec });
        graph = next;
    }
    Ok(RandomSequence {
        graph,
        steps: taken,
    })
}

#[cfg(test)]
mod tests {
    use super::super::{
        boundary_inversions, expand, irr_expansion_exact, irr_expansion_rhs, irr_peripheral_rhs,
        is_partial_cube,
    };
    use super::*;
    use crate::graphs::{build_hypercube, BuildLimits};
    use crate::irregularity::irr;
    use proptest::prelude::*;

    #[test]
    fn zero_steps_is_k1() {
        let s = random_expansion_sequence(0, 1, &SamplerConfig::default()).unwrap();
        assert_eq!(s.graph, families::k1());
        assert!(s.steps.is_empty());
    }

    #[test]
    fn doubling_only_builds_hypercubes() {
        let config = SamplerConfig {
            mode: SamplingMode::DoublingOnly,
            ..Default::default()
        };
        for n in 0..=5 {
            let s = random_expansion_sequence(n, 3, &config).unwrap();
            let q = build_hypercube(n, &BuildLimits::default()).unwrap();
            assert_eq!(s.graph.n_vertices(), q.n_vertices());
            assert_eq!(s.graph.n_edges(), q.n_edges());
            assert!(is_partial_cube(&s.graph).is_partial_cube());
            assert!((0..q.n_vertices()).all(|v| s.graph.degree(v).unwrap() == n));
        }
    }

    #[test]
    fn deterministic_per_seed() {
        let c = SamplerConfig::default();
        let a = random_expansion_sequence(10, 42, &c).unwrap();
        let b = random_expansion_sequence(10, 42, &c).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn exhausted_budget_is_reported() {
        let c = SamplerConfig {
            max_vertices: 4,
            ..Default::default()
        };
        let err = random_expansion_sequence(6, 0, &c).unwrap_err();
        assert!(matches!(
            err,
            ExpansionError::SamplingExhausted { n_vertices: 4, .. }
        ));
    }

    #[test]
    fn sequences_stay_within_vertex_cap() {
        let c = SamplerConfig {
            max_vertices: 60,
            ..Default::default()
        };
        for seed in 0..5 {
            match random_expansion_sequence(20, seed, &c) {
                Ok(s) => assert!(s.graph.n_vertices() <= 60),
                Err(ExpansionError::SamplingExhausted { n_vertices, .. }) => {
                    assert!(n_vertices <= 60)
                }
                Err(e) => panic!("{e}"),
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn sampled_steps_match_the_host_side_evaluations(seed in any::<u64>(), steps in 1usize..10) {
            let c = SamplerConfig { max_vertices: 80, ..Default::default() };
            let Ok(s) = random_expansion_sequence(steps, seed, &c) else { return Ok(()) };
            prop_assert!(is_partial_cube(&s.graph).is_partial_cube());
            for step in &s.steps {
                let h = expand(&step.host, &step.spec).unwrap();
                let actual = irr(&h.graph);
                let rhs = irr_expansion_rhs(&step.host, &step.spec).unwrap();
                let inversions = boundary_inversions(&step.host, &step.spec).unwrap().len() as u128;
                prop_assert_eq!(irr_expansion_exact(&step.host, &step.spec).unwrap(), actual);
                prop_assert_eq!(rhs, actual + 2 * inversions);
                if step.spec.is_peripheral(step.host.n_vertices()) {
                    prop_assert_eq!(irr_peripheral_rhs(&step.host, &step.spec).unwrap(), rhs);
                }
            }
        }
    }
}

//! Edge imbalance and the sums built from it: irregularity (Albertson
//! index), irregularity of an edge set, the σ-index and imbalance histograms.
//!
//! Sums are folded per vertex in parallel over edges `(u, v)` with `u < v`;
//! integer addition keeps the result independent of the thread schedule.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::graphs::{Graph, GraphError};

/// `|deg(u) - deg(v)|` for an edge `uv`.
pub fn imbalance(g: &Graph, u: usize, v: usize) -> Result<u64, GraphError> {
    g.check_vertex(u)?;
    g.check_vertex(v)?;
    if !g.has_edge(u, v) {
        return Err(GraphError::NotAnEdge(u, v));
    }
    Ok(raw_imbalance(g, u, v))
}

fn raw_imbalance(g: &Graph, u: usize, v: usize) -> u64 {
    g.neighbors(u).len().abs_diff(g.neighbors(v).len()) as u64
}

fn fold_edges<F>(g: &Graph, f: F) -> u128
where
    F: Fn(u64) -> u128 + Sync,
{
    (0..g.n_vertices())
        .into_par_iter()
        .map(|u| {
            g.neighbors(u)
                .iter()
                .filter(|&&v| v > u)
                .map(|&v| f(raw_imbalance(g, u, v)))
                .sum::<u128>()
        })
        .sum()
}

/// Sum of imbalances over all edges.
pub fn irr(g: &Graph) -> u128 {
    fold_edges(g, u128::from)
}

/// Sum of squared degree differences over all edges.
pub fn sigma(g: &Graph) -> u128 {
    fold_edges(g, |d| u128::from(d) * u128::from(d))
}

/// Irregularity restricted to the edge set `edges`; every pair must be an
/// edge of `g`. Repeated pairs are counted once per occurrence.
pub fn irr_subset(g: &Graph, edges: &[(usize, usize)]) -> Result<u128, GraphError> {
    edges
        .iter()
        .map(|&(u, v)| imbalance(g, u, v).map(u128::from))
        .sum()
}

/// Edge counts keyed by imbalance value.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ImbalanceHistogram {
    counts: BTreeMap<u64, u64>,
}

impl ImbalanceHistogram {
    pub fn count(&self, k: u64) -> u64 {
        self.counts.get(&k).copied().unwrap_or(0)
    }

    pub fn counts(&self) -> &BTreeMap<u64, u64> {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.counts.values().sum()
    }

    pub fn max_imbalance(&self) -> Option<u64> {
        self.counts
            .iter()
            .rev()
            .find(|(_, &c)| c > 0)
            .map(|(&k, _)| k)
    }

    /// `Σ k · count(k)`
    pub fn weighted_sum(&self) -> u128 {
        self.counts
            .iter()
            .map(|(&k, &c)| u128::from(k) * u128::from(c))
            .sum()
    }

    /// `Σ k² · count(k)`
    pub fn squared_sum(&self) -> u128 {
        self.counts
            .iter()
            .map(|(&k, &c)| u128::from(k) * u128::from(k) * u128::from(c))
            .sum()
    }

    /// JSON object `{"0": c0, "1": c1, ...}` (keys as strings).
    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.counts).expect("map of integers serializes")
    }

    /// `n,k,count` rows for `k` in `0..=max_k` (zero counts included),
    /// without a header.
    pub fn csv_rows(&self, n: usize, max_k: u64) -> String {
        let top = self.max_imbalance().unwrap_or(0).max(max_k);
        let mut out = String::new();
        for k in 0..=top {
            let _ = writeln!(out, "{n},{k},{}", self.count(k));
        }
        out
    }

    fn merge(mut self, other: ImbalanceHistogram) -> ImbalanceHistogram {
        for (k, c) in other.counts {
            *self.counts.entry(k).or_default() += c;
        }
        self
    }
}

pub fn histogram(g: &Graph) -> ImbalanceHistogram {
    (0..g.n_vertices())
        .into_par_iter()
        .fold(ImbalanceHistogram::default, |mut h, u| {
            for &v in g.neighbors(u).iter().filter(|&&v| v > u) {
                *h.counts.entry(raw_imbalance(g, u, v)).or_default() += 1;
            }
            h
        })
        .reduce(ImbalanceHistogram::default, ImbalanceHistogram::merge)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::{
        build_fibonacci_cube, build_hypercube, build_pell_graph, families, BuildLimits,
    };

    fn pell(n: usize) -> Graph {
        build_pell_graph(n, &BuildLimits::default()).unwrap()
    }

    fn at(g: &Graph, s: &str) -> usize {
        g.labels().unwrap().iter().position(|l| l == s).unwrap()
    }

    #[test]
    fn imbalance_examples() {
        let g = pell(2);
        assert_eq!(imbalance(&g, at(&g, "11"), at(&g, "22")).unwrap(), 2);
        assert_eq!(imbalance(&g, at(&g, "00"), at(&g, "01")).unwrap(), 0);
        assert!(matches!(
            imbalance(&g, at(&g, "00"), at(&g, "22")),
            Err(GraphError::NotAnEdge(..))
        ));
        let q = build_hypercube(4, &BuildLimits::default()).unwrap();
        assert!(q.edges().all(|(u, v)| imbalance(&q, u, v).unwrap() == 0));
    }

    #[test]
    fn irr_and_sigma_small_pell() {
        assert_eq!(irr(&pell(1)), 0);
        assert_eq!(irr(&pell(2)), 4);
        assert_eq!(irr(&pell(3)), 18);
        assert_eq!(sigma(&pell(2)), 6);
        assert_eq!(sigma(&pell(3)), 36);
        assert_eq!(
            sigma(&build_hypercube(5, &BuildLimits::default()).unwrap()),
            0
        );
    }

    #[test]
    fn irr_subset_examples() {
        let g = pell(2);
        assert_eq!(irr_subset(&g, &[]).unwrap(), 0);
        let all: Vec<_> = g.edges().collect();
        assert_eq!(irr_subset(&g, &all).unwrap(), 4);
        assert_eq!(irr_subset(&g, &[(at(&g, "11"), at(&g, "22"))]).unwrap(), 2);
        assert!(irr_subset(&g, &[(0, 4)]).is_err());
    }

    #[test]
    fn histogram_examples() {
        let h3 = histogram(&pell(3));
        assert_eq!(
            (0..=4).map(|k| h3.count(k)).collect::<Vec<_>>(),
            vec![7, 6, 3, 2, 0]
        );
        let h1 = histogram(&pell(1));
        assert_eq!(
            h1.counts()
                .iter()
                .map(|(&k, &c)| (k, c))
                .collect::<Vec<_>>(),
            vec![(0, 1)]
        );
        let q3 = histogram(&build_hypercube(3, &BuildLimits::default()).unwrap());
        assert_eq!(q3.count(0), 12);
        assert_eq!(q3.total(), 12);
    }

    #[test]
    fn histogram_serializations() {
        let h = histogram(&pell(2));
        assert_eq!(h.to_json(), r#"{"0":2,"1":2,"2":1}"#);
        assert_eq!(h.csv_rows(2, 4), "2,0,2\n2,1,2\n2,2,1\n2,3,0\n2,4,0\n");
    }

    #[test]
    fn moments_agree_with_direct_sums() {
        let limits = BuildLimits::default();
        let mut graphs = Vec::new();
        for n in 0..=10 {
            graphs.push(build_pell_graph(n, &limits).unwrap());
            graphs.push(build_fibonacci_cube(n, &limits).unwrap());
            graphs.push(build_hypercube(n, &limits).unwrap());
        }
        graphs.push(families::star(5));
        graphs.push(families::complete_bipartite(2, 5));
        for g in &graphs {
            let h = histogram(g);
            assert_eq!(h.total() as usize, g.n_edges());
            assert_eq!(h.weighted_sum(), irr(g));
            assert_eq!(h.squared_sum(), sigma(g));
        }
    }

    #[test]
    fn pell_imbalance_bound() {
        for n in 1..=12 {
            let h = histogram(&pell(n));
            assert!(h.max_imbalance().unwrap_or(0) <= 4, "n = {n}");
        }
    }

    #[test]
    fn invariant_under_relabeling() {
        use rand::seq::SliceRandom;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for n in 2..=9 {
            let g = pell(n);
            let mut perm: Vec<usize> = (0..g.n_vertices()).collect();
            perm.shuffle(&mut rng);
            let r = g.relabeled(&perm);
            assert_eq!(irr(&r), irr(&g));
            assert_eq!(sigma(&r), sigma(&g));
            assert_eq!(histogram(&r), histogram(&g));
        }
    }
}

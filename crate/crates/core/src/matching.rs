use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::graph::{Edge, Graph, Vertex};

/// A set of pairwise vertex-disjoint edges, kept sorted.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Matching(Vec<Edge>);

impl Matching {
    pub fn new(mut edges: Vec<Edge>) -> Self {
        edges.sort();
        edges.dedup();
        Matching(edges)
    }

    pub fn edges(&self) -> &[Edge] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, e: Edge) -> bool {
        self.0.binary_search(&e).is_ok()
    }

    /// True when every edge is in `g` and no two edges share an endpoint.
    pub fn is_valid_in(&self, g: &Graph) -> bool {
        let mut seen: BTreeSet<Vertex> = BTreeSet::new();
        self.0.iter().all(|e| {
            let (a, b) = e.endpoints();
            g.has_edge(a, b) && seen.insert(a) && seen.insert(b)
        })
    }

    pub fn as_pairs(&self) -> Vec<[Vertex; 2]> {
        self.0.iter().map(|e| [e.u(), e.v()]).collect()
    }
}

impl FromIterator<Edge> for Matching {
    fn from_iter<I: IntoIterator<Item = Edge>>(iter: I) -> Self {
        Matching::new(iter.into_iter().collect())
    }
}

/// Two edge-disjoint matchings; vertices may be shared between them.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct MatchingPair {
    pub first: Matching,
    pub second: Matching,
}

impl MatchingPair {
    pub fn total(&self) -> usize {
        self.first.len() + self.second.len()
    }

    pub fn is_valid_in(&self, g: &Graph) -> bool {
        self.first.is_valid_in(g)
            && self.second.is_valid_in(g)
            && self.first.edges().iter().all(|&e| !self.second.contains(e))
    }
}

/// `beta`: maximum matching size. `lambda`: maximum `|H| + |H'|` over
/// edge-disjoint matching pairs. `alpha`: largest `|H|` among pairs reaching
/// `lambda`. `big_l`: largest `beta(G \ F)` over maximum matchings `F`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ParamSet {
    pub beta: usize,
    pub lambda: usize,
    pub alpha: usize,
    #[serde(rename = "L")]
    pub big_l: usize,
}

impl ParamSet {
    /// `lambda == beta + L`, which holds exactly when `alpha == beta`.
    pub fn is_equal(&self) -> bool {
        self.lambda == self.beta + self.big_l
    }

    pub fn alpha_equals_beta(&self) -> bool {
        self.alpha == self.beta
    }

    pub fn within_ratio_bound(&self) -> bool {
        self.alpha <= self.beta && 4 * self.beta <= 5 * self.alpha
    }
}

impl std::ops::Add for ParamSet {
    type Output = ParamSet;

    fn add(self, o: ParamSet) -> ParamSet {
        ParamSet {
            beta: self.beta + o.beta,
            lambda: self.lambda + o.lambda,
            alpha: self.alpha + o.alpha,
            big_l: self.big_l + o.big_l,
        }
    }
}

impl std::fmt::Display for ParamSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "beta={} lambda={} alpha={} L={}",
            self.beta, self.lambda, self.alpha, self.big_l
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validity() {
        let p4 = Graph::path(4);
        let m: Matching = [Edge::new(0, 1), Edge::new(2, 3)].into_iter().collect();
        assert!(m.is_valid_in(&p4));
        let bad: Matching = [Edge::new(0, 1), Edge::new(1, 2)].into_iter().collect();
        assert!(!bad.is_valid_in(&p4));
        let absent: Matching = [Edge::new(0, 2)].into_iter().collect();
        assert!(!absent.is_valid_in(&p4));

        let pair = MatchingPair {
            first: m.clone(),
            second: [Edge::new(1, 2)].into_iter().collect(),
        };
        assert!(pair.is_valid_in(&p4));
        let overlapping = MatchingPair { first: m.clone(), second: m };
        assert!(!overlapping.is_valid_in(&p4));
    }

    #[test]
    fn ratio_bound() {
        let ds10 = ParamSet { beta: 5, lambda: 8, alpha: 4, big_l: 2 };
        assert!(ds10.within_ratio_bound());
        assert!(!ds10.is_equal());
        let too_far = ParamSet { beta: 5, lambda: 6, alpha: 3, big_l: 1 };
        assert!(!too_far.within_ratio_bound());
    }
}

//! Exhaustive ground truth for the matching parameters of small graphs.
//!
//! Everything here enumerates all matchings, so it is exponential in the
//! edge count and guarded by a hard limit. It works on arbitrary simple
//! graphs, not only trees, and serves as the reference the tree dynamic
//! program and the operation gadgets are checked against.

use thiserror::Error;

use crate::graph::{Edge, Graph};
use crate::matching::{Matching, MatchingPair, ParamSet};

pub const DEFAULT_EDGE_LIMIT: usize = 24;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("graph has {edges} edges, oracle limit is {limit}")]
    TooLarge { edges: usize, limit: usize },
    #[error("edge {0} is not in the graph")]
    MissingEdge(Edge),
}

/// All matchings of a graph as bitmasks over its sorted edge list.
struct MatchingTable {
    edges: Vec<Edge>,
    /// Ascending mask order, i.e. binary counting order over edge subsets.
    masks: Vec<u64>,
    /// `masks` re-sorted by decreasing size, for residual maximum matchings.
    by_size: Vec<u64>,
}

impl MatchingTable {
    fn build(g: &Graph, limit: usize) -> Result<Self, OracleError> {
        let edges: Vec<Edge> = g.edges().collect();
        if edges.len() > limit.min(63) {
            return Err(OracleError::TooLarge { edges: edges.len(), limit });
        }
        // conflict[i]: edges sharing an endpoint with edge i (excluding i)
        let conflict: Vec<u64> = edges
            .iter()
            .map(|e| {
                edges.iter().enumerate().fold(0u64, |acc, (j, f)| {
                    let shares = f != e && (f.touches(e.u()) || f.touches(e.v()));
                    if shares {
                        acc | (1 << j)
                    } else {
                        acc
                    }
                })
            })
            .collect();
        let mut masks = Vec::new();
        let mut stack = vec![(0usize, 0u64, 0u64)];
        while let Some((i, mask, blocked)) = stack.pop() {
            if i == edges.len() {
                masks.push(mask);
                continue;
            }
            stack.push((i + 1, mask, blocked));
            if blocked & (1 << i) == 0 {
                stack.push((i + 1, mask | (1 << i), blocked | conflict[i]));
            }
        }
        masks.sort_unstable();
        let mut by_size = masks.clone();
        by_size.sort_by_key(|m| (std::cmp::Reverse(m.count_ones()), *m));
        Ok(MatchingTable { edges, masks, by_size })
    }

    fn matching(&self, mask: u64) -> Matching {
        (0..self.edges.len())
            .filter(|i| mask & (1 << i) != 0)
            .map(|i| self.edges[i])
            .collect()
    }

    fn index_of(&self, e: Edge) -> Result<usize, OracleError> {
        self.edges.binary_search(&e).map_err(|_| OracleError::MissingEdge(e))
    }

    fn beta(&self) -> usize {
        self.by_size[0].count_ones() as usize
    }

    /// Maximum matching avoiding the edges of `removed`, and its mask.
    fn residual(&self, removed: u64) -> u64 {
        // the empty matching is always last and always disjoint
        *self.by_size.iter().find(|&&m| m & removed == 0).unwrap()
    }

    fn residual_beta(&self, removed: u64) -> usize {
        self.residual(removed).count_ones() as usize
    }

    fn params(&self) -> ParamSet {
        let beta = self.beta();
        let (mut lambda, mut alpha, mut big_l) = (0, 0, 0);
        for &h in &self.masks {
            let size = h.count_ones() as usize;
            let rest = self.residual_beta(h);
            if size + rest > lambda {
                lambda = size + rest;
                alpha = size;
            } else if size + rest == lambda {
                alpha = alpha.max(size);
            }
            if size == beta {
                big_l = big_l.max(rest);
            }
        }
        ParamSet { beta, lambda, alpha, big_l }
    }
}

/// Brute-force evaluator with a configurable edge limit.
#[derive(Clone, Copy, Debug)]
pub struct Oracle {
    pub edge_limit: usize,
}

impl Default for Oracle {
    fn default() -> Self {
        Oracle { edge_limit: DEFAULT_EDGE_LIMIT }
    }
}

impl Oracle {
    pub fn with_limit(edge_limit: usize) -> Self {
        Oracle { edge_limit }
    }

    fn table(&self, g: &Graph) -> Result<MatchingTable, OracleError> {
        MatchingTable::build(g, self.edge_limit)
    }

    /// Every matching, including the empty one, in binary counting order
    /// over the sorted edge list.
    pub fn enumerate_matchings(&self, g: &Graph) -> Result<Vec<Matching>, OracleError> {
        let t = self.table(g)?;
        Ok(t.masks.iter().map(|&m| t.matching(m)).collect())
    }

    pub fn beta(&self, g: &Graph) -> Result<usize, OracleError> {
        Ok(self.table(g)?.beta())
    }

    pub fn params(&self, g: &Graph) -> Result<ParamSet, OracleError> {
        Ok(self.table(g)?.params())
    }

    /// Some pair `(H, H')` with `|H| + |H'| = lambda` and `|H| = alpha`
    /// has `e` in `H`.
    pub fn exists_optimal_pair_containing(&self, g: &Graph, e: Edge) -> Result<bool, OracleError> {
        let t = self.table(g)?;
        let bit = 1u64 << t.index_of(e)?;
        let p = t.params();
        Ok(t.masks.iter().any(|&h| {
            h & bit != 0 && h.count_ones() as usize == p.alpha && t.residual_beta(h) == p.lambda - p.alpha
        }))
    }

    /// Some maximum matching `F` with `beta(G \ F) = L` contains `e`.
    pub fn exists_special_max_matching(&self, g: &Graph, e: Edge) -> Result<bool, OracleError> {
        let t = self.table(g)?;
        let bit = 1u64 << t.index_of(e)?;
        let p = t.params();
        Ok(t.masks.iter().any(|&f| {
            f & bit != 0 && f.count_ones() as usize == p.beta && t.residual_beta(f) == p.big_l
        }))
    }

    /// First pair in enumeration order reaching `(lambda, alpha)`.
    pub fn optimal_pair(&self, g: &Graph) -> Result<MatchingPair, OracleError> {
        let t = self.table(g)?;
        let p = t.params();
        let h = *t
            .masks
            .iter()
            .find(|&&h| h.count_ones() as usize == p.alpha && t.residual_beta(h) == p.lambda - p.alpha)
            .unwrap();
        Ok(MatchingPair { first: t.matching(h), second: t.matching(t.residual(h)) })
    }
}

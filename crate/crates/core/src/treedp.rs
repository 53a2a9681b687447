//! Polynomial evaluation of `(beta, L)` and `(lambda, alpha)` on forests.
//!
//! Both pairs are lexicographic optima over edge-disjoint matching pairs
//! `(first, second)`:
//!
//! * `LambdaAlpha` maximizes `(|first| + |second|, |first|)`, giving `(lambda, alpha)`;
//! * `BetaL` maximizes `(|first|, |second|)`, giving `(beta, L)`.
//!
//! The program roots each tree and keeps, per vertex, the best value for
//! each of the four ways the vertex can already be covered by the two
//! matchings inside its subtree. Children are folded in one at a time with
//! a four-state accumulator recording which matching has already claimed
//! an edge at the parent.

use std::ops::Add;

use thiserror::Error;

use crate::graph::{Edge, Graph, Vertex};
use crate::matching::{Matching, MatchingPair, ParamSet};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DpError {
    #[error("graph is not a tree")]
    NotATree,
    #[error("graph is not a forest")]
    NotAForest,
    #[error("edge {0} is not in the graph")]
    MissingEdge(Edge),
}

/// Objective pair compared lexicographically. Addition is componentwise,
/// which preserves the order, so per-subtree optima compose.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LexValue {
    pub primary: i64,
    pub secondary: i64,
}

impl LexValue {
    pub const ZERO: LexValue = LexValue { primary: 0, secondary: 0 };

    pub fn new(primary: i64, secondary: i64) -> Self {
        LexValue { primary, secondary }
    }
}

impl Add for LexValue {
    type Output = LexValue;

    fn add(self, o: LexValue) -> LexValue {
        LexValue::new(self.primary + o.primary, self.secondary + o.secondary)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DpObjective {
    LambdaAlpha,
    BetaL,
}

impl DpObjective {
    fn first_weight(self) -> LexValue {
        match self {
            DpObjective::LambdaAlpha => LexValue::new(1, 1),
            DpObjective::BetaL => LexValue::new(1, 0),
        }
    }

    fn second_weight(self) -> LexValue {
        match self {
            DpObjective::LambdaAlpha => LexValue::new(1, 0),
            DpObjective::BetaL => LexValue::new(0, 1),
        }
    }
}

const FIRST: usize = 1;
const SECOND: usize = 2;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Assign {
    Neither,
    First,
    Second,
}

/// How the accumulator state after folding one child was reached.
#[derive(Clone, Copy, Debug)]
struct Step {
    prev: usize,
    assign: Assign,
    child_state: usize,
}

type States = [Option<LexValue>; 4];

fn better(slot: &mut Option<LexValue>, cand: LexValue) -> bool {
    match slot {
        Some(cur) if *cur >= cand => false,
        _ => {
            *slot = Some(cand);
            true
        }
    }
}

/// Best child state among those allowed by `mask` (a state is allowed when
/// it shares no bit with `mask`). Ties keep the lowest state index.
fn best_state(states: &States, mask: usize) -> Option<(usize, LexValue)> {
    let mut best: Option<(usize, LexValue)> = None;
    for (s, v) in states.iter().enumerate() {
        if s & mask != 0 {
            continue;
        }
        if let Some(v) = *v {
            if best.map_or(true, |(_, b)| v > b) {
                best = Some((s, v));
            }
        }
    }
    best
}

/// BFS order from the root; `children[i]` holds positions in `order`.
struct Rooted {
    order: Vec<Vertex>,
    children: Vec<Vec<usize>>,
}

fn root_tree(g: &Graph, root: Vertex) -> Rooted {
    let mut order = vec![root];
    let mut parent = vec![usize::MAX];
    let mut children = Vec::with_capacity(g.vertex_count());
    let mut head = 0;
    while head < order.len() {
        let x = order[head];
        let up = (parent[head] != usize::MAX).then(|| order[parent[head]]);
        let mut kids = Vec::new();
        for y in g.neighbors(x).filter(|&y| Some(y) != up) {
            kids.push(order.len());
            order.push(y);
            parent.push(head);
        }
        children.push(kids);
        head += 1;
    }
    Rooted { order, children }
}

/// Runs the program on the tree `g` rooted at `root`. If `forced` is an
/// edge from `root` to a child, that edge must go into the first matching.
fn solve_tree(g: &Graph, root: Vertex, obj: DpObjective, forced: Option<Vertex>) -> Option<(LexValue, MatchingPair)> {
    let rooted = root_tree(g, root);
    let n = rooted.order.len();
    let (wf, ws) = (obj.first_weight(), obj.second_weight());
    let mut table: Vec<States> = vec![[None; 4]; n];
    let mut trace: Vec<Vec<[Option<Step>; 4]>> = vec![Vec::new(); n];

    for i in (0..n).rev() {
        let mut acc: States = [Some(LexValue::ZERO), None, None, None];
        let mut steps = Vec::with_capacity(rooted.children[i].len());
        for &c in &rooted.children[i] {
            let child = &table[c];
            let only_first = i == 0 && forced == Some(rooted.order[c]);
            let options = [
                (Assign::Neither, best_state(child, 0)),
                (Assign::First, best_state(child, FIRST).map(|(s, x)| (s, x + wf))),
                (Assign::Second, best_state(child, SECOND).map(|(s, x)| (s, x + ws))),
            ];
            let mut next: States = [None; 4];
            let mut how: [Option<Step>; 4] = [None; 4];
            for (prev, cur) in acc.iter().enumerate() {
                let Some(cur) = *cur else { continue };
                for &(assign, opt) in &options {
                    let Some((child_state, gain)) = opt else { continue };
                    if only_first && assign != Assign::First {
                        continue;
                    }
                    let bit = match assign {
                        Assign::Neither => 0,
                        Assign::First => FIRST,
                        Assign::Second => SECOND,
                    };
                    if prev & bit != 0 {
                        continue;
                    }
                    let s = prev | bit;
                    if better(&mut next[s], cur + gain) {
                        how[s] = Some(Step { prev, assign, child_state });
                    }
                }
            }
            acc = next;
            steps.push(how);
        }
        table[i] = acc;
        trace[i] = steps;
    }

    let (root_state, value) = best_state(&table[0], 0)?;
    let (mut first, mut second) = (Vec::new(), Vec::new());
    let mut stack = vec![(0usize, root_state)];
    while let Some((i, mut s)) = stack.pop() {
        let kids = &rooted.children[i];
        let v = rooted.order[i];
        for j in (0..kids.len()).rev() {
            let step = trace[i][j][s].expect("traceback through unreachable state");
            let c = rooted.order[kids[j]];
            match step.assign {
                Assign::First => first.push(Edge::new(v, c)),
                Assign::Second => second.push(Edge::new(v, c)),
                Assign::Neither => {}
            }
            stack.push((kids[j], step.child_state));
            s = step.prev;
        }
        debug_assert_eq!(s, 0);
    }
    let pair = MatchingPair { first: Matching::new(first), second: Matching::new(second) };
    Some((value, pair))
}

/// Lexicographic optimum over all edge-disjoint matching pairs of a tree,
/// with a pair achieving it.
pub fn lex_pair_dp(g: &Graph, obj: DpObjective) -> Result<(LexValue, MatchingPair), DpError> {
    if !g.is_tree() {
        return Err(DpError::NotATree);
    }
    let root = g.vertices().next().unwrap();
    Ok(solve_tree(g, root, obj, None).expect("unconstrained program is always feasible"))
}

/// One vertex per component; the program rooted there only sees that component.
fn forest_roots(g: &Graph) -> Result<Vec<Vertex>, DpError> {
    let comps = g.components();
    if g.edge_count() + comps.len() != g.vertex_count() {
        return Err(DpError::NotAForest);
    }
    Ok(comps.iter().map(|c| *c.first().unwrap()).collect())
}

fn solve_forest(g: &Graph, roots: &[Vertex], obj: DpObjective) -> (LexValue, MatchingPair) {
    let mut total = LexValue::ZERO;
    let (mut first, mut second) = (Vec::new(), Vec::new());
    for &r in roots {
        let (v, p) = solve_tree(g, r, obj, None).expect("unconstrained program is always feasible");
        total = total + v;
        first.extend_from_slice(p.first.edges());
        second.extend_from_slice(p.second.edges());
    }
    (total, MatchingPair { first: Matching::new(first), second: Matching::new(second) })
}

/// Forest version: component optima summed, witness pairs united.
pub fn lex_pair_dp_forest(g: &Graph, obj: DpObjective) -> Result<(LexValue, MatchingPair), DpError> {
    Ok(solve_forest(g, &forest_roots(g)?, obj))
}

/// `(beta, lambda, alpha, L)` of a forest in linear time.
pub fn params_tree(g: &Graph) -> Result<ParamSet, DpError> {
    let roots = forest_roots(g)?;
    let (la, _) = solve_forest(g, &roots, DpObjective::LambdaAlpha);
    let (bl, _) = solve_forest(g, &roots, DpObjective::BetaL);
    Ok(ParamSet {
        beta: bl.primary as usize,
        lambda: la.primary as usize,
        alpha: la.secondary as usize,
        big_l: bl.secondary as usize,
    })
}

/// Maximum matching size of a forest.
pub fn beta_forest(g: &Graph) -> Result<usize, DpError> {
    Ok(lex_pair_dp_forest(g, DpObjective::BetaL)?.0.primary as usize)
}

/// Whether some maximum matching `F` with `beta(G \ F) = L` contains `e`.
/// Answered by forcing `e` into the first matching and comparing optima.
pub fn exists_special_max_matching(g: &Graph, e: Edge) -> Result<bool, DpError> {
    if !g.is_tree() {
        return Err(DpError::NotATree);
    }
    if !g.has_edge(e.u(), e.v()) {
        return Err(DpError::MissingEdge(e));
    }
    let (free, _) = lex_pair_dp(g, DpObjective::BetaL)?;
    let forced = solve_tree(g, e.u(), DpObjective::BetaL, Some(e.v()));
    Ok(forced.is_some_and(|(v, _)| v == free))
}

/// A maximum matching `F` reaching `beta(G \ F) = L`, plus the residual
/// maximum matching, for a forest.
pub fn special_max_matching(g: &Graph) -> Result<MatchingPair, DpError> {
    Ok(lex_pair_dp_forest(g, DpObjective::BetaL)?.1)
}

/// A pair reaching `(lambda, alpha)` for a forest.
pub fn optimal_pair(g: &Graph) -> Result<MatchingPair, DpError> {
    Ok(lex_pair_dp_forest(g, DpObjective::LambdaAlpha)?.1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn ps(beta: usize, lambda: usize, alpha: usize, big_l: usize) -> ParamSet {
        ParamSet { beta, lambda, alpha, big_l }
    }

    #[test]
    fn param_examples() {
        assert_eq!(params_tree(&Graph::path(5)).unwrap(), ps(2, 4, 2, 2));
        assert_eq!(params_tree(&fixtures::ds10()).unwrap(), ps(5, 8, 4, 2));
        assert_eq!(params_tree(&Graph::empty(1)).unwrap(), ps(0, 0, 0, 0));
        assert_eq!(params_tree(&Graph::path(2)).unwrap(), ps(1, 1, 1, 0));
    }

    #[test]
    fn path_closed_form() {
        for n in 1..=64 {
            let p = params_tree(&Graph::path(n)).unwrap();
            assert_eq!(p, ps(n / 2, n - 1, n / 2, (n - 1) / 2), "P_{n}");
            assert!(p.alpha_equals_beta());
        }
    }

    #[test]
    fn lex_pair_examples() {
        let (v, pair) = lex_pair_dp(&Graph::path(2), DpObjective::LambdaAlpha).unwrap();
        assert_eq!(v, LexValue::new(1, 1));
        assert_eq!(pair.first.edges(), &[Edge::new(0, 1)]);
        assert!(pair.second.is_empty());

        let (v, pair) = lex_pair_dp(&Graph::path(3), DpObjective::BetaL).unwrap();
        assert_eq!(v, LexValue::new(1, 1));
        assert_eq!(pair.total(), 2);
        assert!(pair.is_valid_in(&Graph::path(3)));

        let (v, pair) = lex_pair_dp(&Graph::path(5), DpObjective::LambdaAlpha).unwrap();
        assert_eq!(v, LexValue::new(4, 2));
        assert!(pair.is_valid_in(&Graph::path(5)));
        assert_eq!((pair.first.len(), pair.second.len()), (2, 2));
    }

    #[test]
    fn forest_sums_components() {
        let g = Graph::path(5).disjoint_union(&fixtures::ds10().shifted(5)).unwrap();
        assert_eq!(params_tree(&g).unwrap(), ps(7, 12, 6, 4));
        assert_eq!(lex_pair_dp(&g, DpObjective::BetaL), Err(DpError::NotATree));
    }

    #[test]
    fn rejects_cycles() {
        let c3 = Graph::from_edges(3, &[(0, 1), (1, 2), (0, 2)]);
        assert_eq!(params_tree(&c3), Err(DpError::NotAForest));
    }

    #[test]
    fn special_edge_examples() {
        assert!(exists_special_max_matching(&Graph::path(2), Edge::new(0, 1)).unwrap());
        assert!(!exists_special_max_matching(&Graph::path(4), Edge::new(1, 2)).unwrap());
        assert!(exists_special_max_matching(&Graph::path(3), Edge::new(0, 1)).unwrap());
        assert_eq!(
            exists_special_max_matching(&Graph::path(3), Edge::new(0, 2)),
            Err(DpError::MissingEdge(Edge::new(0, 2)))
        );
    }

    #[test]
    fn deep_path_does_not_overflow() {
        let p = params_tree(&Graph::path(20_000)).unwrap();
        assert_eq!(p.beta, 10_000);
    }
}

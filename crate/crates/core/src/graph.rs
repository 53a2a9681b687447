//! Simple undirected graphs with stable vertex ids.
//!
//! Vertex ids are never renumbered: deleting a vertex leaves a gap, so a
//! subgraph keeps the labels of its host. Certificates rely on this to
//! rebuild a labeled tree id for id.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use thiserror::Error;

pub type Vertex = usize;

/// An undirected edge, normalized so that `u < v`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Edge {
    u: Vertex,
    v: Vertex,
}

impl Edge {
    /// Panics on a loop.
    pub fn new(a: Vertex, b: Vertex) -> Self {
        assert_ne!(a, b, "loop edge ({a}, {a})");
        if a < b {
            Edge { u: a, v: b }
        } else {
            Edge { u: b, v: a }
        }
    }

    pub fn u(&self) -> Vertex {
        self.u
    }

    pub fn v(&self) -> Vertex {
        self.v
    }

    pub fn endpoints(&self) -> (Vertex, Vertex) {
        (self.u, self.v)
    }

    pub fn touches(&self, x: Vertex) -> bool {
        self.u == x || self.v == x
    }

    /// The endpoint opposite to `x`, if `x` is an endpoint.
    pub fn other(&self, x: Vertex) -> Option<Vertex> {
        if self.u == x {
            Some(self.v)
        } else if self.v == x {
            Some(self.u)
        } else {
            None
        }
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.u, self.v)
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("line {line}: loop at vertex {v}")]
    Loop { line: usize, v: Vertex },
    #[error("line {line}: duplicate edge ({u},{v})")]
    DuplicateEdge { line: usize, u: Vertex, v: Vertex },
    #[error("line {line}: vertex id {v} out of range for n = {n}")]
    OutOfRange { line: usize, v: Vertex, n: usize },
    #[error("declared {declared} edges but found {found}")]
    EdgeCount { declared: usize, found: usize },
    #[error("vertex {0} is not in the graph")]
    MissingVertex(Vertex),
    #[error("vertex {0} is already in the graph")]
    VertexExists(Vertex),
    #[error("edge {0} is not in the graph")]
    MissingEdge(Edge),
    #[error("edge {0} is already in the graph")]
    EdgeExists(Edge),
    #[error("edge {0} is not a bridge")]
    NotABridge(Edge),
    #[error("graph is disconnected")]
    Disconnected,
    #[error("graph is not a tree")]
    NotATree,
    #[error("vertex ids are not contiguous from 0; cannot serialize")]
    NonContiguousIds,
}

/// A finite simple undirected graph. Adjacency is kept sorted, so every
/// traversal below is deterministic.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct Graph {
    adj: BTreeMap<Vertex, BTreeSet<Vertex>>,
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let vs: Vec<_> = self.vertices().collect();
        let es: Vec<_> = self.edges().map(|e| e.endpoints()).collect();
        f.debug_struct("Graph").field("vertices", &vs).field("edges", &es).finish()
    }
}

impl Graph {
    pub fn new() -> Self {
        Graph::default()
    }

    /// Vertices `0..n`, no edges.
    pub fn empty(n: usize) -> Self {
        Graph {
            adj: (0..n).map(|v| (v, BTreeSet::new())).collect(),
        }
    }

    /// Builds a graph on `0..n` from an edge list; panics on malformed input.
    /// Intended for tests and fixtures; use [`Graph::parse`] for untrusted text.
    pub fn from_edges(n: usize, edges: &[(Vertex, Vertex)]) -> Self {
        let mut g = Graph::empty(n);
        for &(a, b) in edges {
            g.add_edge(a, b).expect("invalid fixture edge");
        }
        g
    }

    /// The path `0 - 1 - ... - (n-1)`.
    pub fn path(n: usize) -> Self {
        let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        Graph::from_edges(n, &edges)
    }

    /// The star with hub 0 and leaves `1..=leaves`.
    pub fn star(leaves: usize) -> Self {
        let edges: Vec<_> = (1..=leaves).map(|i| (0, i)).collect();
        Graph::from_edges(leaves + 1, &edges)
    }

    pub fn add_vertex(&mut self, v: Vertex) -> Result<(), GraphError> {
        if self.adj.contains_key(&v) {
            return Err(GraphError::VertexExists(v));
        }
        self.adj.insert(v, BTreeSet::new());
        Ok(())
    }

    pub fn add_edge(&mut self, a: Vertex, b: Vertex) -> Result<(), GraphError> {
        if a == b {
            return Err(GraphError::Loop { line: 0, v: a });
        }
        for x in [a, b] {
            if !self.adj.contains_key(&x) {
                return Err(GraphError::MissingVertex(x));
            }
        }
        if !self.adj.get_mut(&a).unwrap().insert(b) {
            return Err(GraphError::EdgeExists(Edge::new(a, b)));
        }
        self.adj.get_mut(&b).unwrap().insert(a);
        Ok(())
    }

    pub fn remove_edge(&mut self, e: Edge) -> Result<(), GraphError> {
        let (a, b) = e.endpoints();
        let present = self.adj.get_mut(&a).map(|s| s.remove(&b)).unwrap_or(false);
        if !present {
            return Err(GraphError::MissingEdge(e));
        }
        self.adj.get_mut(&b).unwrap().remove(&a);
        Ok(())
    }

    pub fn remove_vertex(&mut self, v: Vertex) -> Result<(), GraphError> {
        let nbrs = self.adj.remove(&v).ok_or(GraphError::MissingVertex(v))?;
        for w in nbrs {
            self.adj.get_mut(&w).unwrap().remove(&v);
        }
        Ok(())
    }

    pub fn vertex_count(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.values().map(BTreeSet::len).sum::<usize>() / 2
    }

    pub fn is_empty(&self) -> bool {
        self.adj.is_empty()
    }

    pub fn contains(&self, v: Vertex) -> bool {
        self.adj.contains_key(&v)
    }

    pub fn has_edge(&self, a: Vertex, b: Vertex) -> bool {
        self.adj.get(&a).is_some_and(|s| s.contains(&b))
    }

    pub fn vertices(&self) -> impl Iterator<Item = Vertex> + '_ {
        self.adj.keys().copied()
    }

    /// Neighbors in increasing id order. Empty for absent vertices.
    pub fn neighbors(&self, v: Vertex) -> impl Iterator<Item = Vertex> + '_ {
        self.adj.get(&v).into_iter().flat_map(|s| s.iter().copied())
    }

    pub fn degree(&self, v: Vertex) -> usize {
        self.adj.get(&v).map_or(0, BTreeSet::len)
    }

    /// Edges sorted by `(u, v)`.
    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        self.adj
            .iter()
            .flat_map(|(&u, s)| s.range(u + 1..).map(move |&v| Edge { u, v }))
    }

    /// Smallest id strictly greater than every id in use.
    pub fn next_free_id(&self) -> Vertex {
        self.adj.keys().next_back().map_or(0, |&v| v + 1)
    }

    /// `G \ X` for a vertex set: deletes the vertices and their incident edges.
    pub fn without_vertices<I: IntoIterator<Item = Vertex>>(&self, xs: I) -> Graph {
        let mut g = self.clone();
        for x in xs {
            let _ = g.remove_vertex(x);
        }
        g
    }

    /// `G \ F` for an edge set: deletes the edges only.
    pub fn without_edges<'a, I: IntoIterator<Item = &'a Edge>>(&self, es: I) -> Graph {
        let mut g = self.clone();
        for e in es {
            let _ = g.remove_edge(*e);
        }
        g
    }

    /// The same graph with every id increased by `offset`.
    pub fn shifted(&self, offset: Vertex) -> Graph {
        Graph {
            adj: self
                .adj
                .iter()
                .map(|(&v, s)| (v + offset, s.iter().map(|&w| w + offset).collect()))
                .collect(),
        }
    }

    /// Subgraph induced by `keep`.
    pub fn induced(&self, keep: &BTreeSet<Vertex>) -> Graph {
        Graph {
            adj: keep
                .iter()
                .filter_map(|&v| {
                    self.adj
                        .get(&v)
                        .map(|s| (v, s.iter().copied().filter(|w| keep.contains(w)).collect()))
                })
                .collect(),
        }
    }

    /// Disjoint union; `None` if the id sets overlap.
    pub fn disjoint_union(&self, other: &Graph) -> Option<Graph> {
        let mut g = self.clone();
        for (&v, s) in &other.adj {
            if g.adj.insert(v, s.clone()).is_some() {
                return None;
            }
        }
        Some(g)
    }

    fn reach(&self, start: Vertex, skip: Option<Edge>) -> BTreeSet<Vertex> {
        let mut seen = BTreeSet::new();
        let mut queue = VecDeque::new();
        seen.insert(start);
        queue.push_back(start);
        while let Some(x) = queue.pop_front() {
            for y in self.neighbors(x) {
                if skip == Some(Edge::new(x, y)) {
                    continue;
                }
                if seen.insert(y) {
                    queue.push_back(y);
                }
            }
        }
        seen
    }

    /// Vertex sets of the connected components, ordered by smallest member.
    pub fn components(&self) -> Vec<BTreeSet<Vertex>> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for v in self.vertices() {
            if seen.contains(&v) {
                continue;
            }
            let comp = self.reach(v, None);
            seen.extend(comp.iter().copied());
            out.push(comp);
        }
        out
    }

    pub fn component_graphs(&self) -> Vec<Graph> {
        self.components().iter().map(|c| self.induced(c)).collect()
    }

    pub fn is_connected(&self) -> bool {
        match self.vertices().next() {
            None => true,
            Some(v) => self.reach(v, None).len() == self.vertex_count(),
        }
    }

    /// Connected with `m = n - 1`. The empty graph is not a tree.
    pub fn is_tree(&self) -> bool {
        !self.is_empty() && self.edge_count() + 1 == self.vertex_count() && self.is_connected()
    }

    pub fn is_forest(&self) -> bool {
        self.edge_count() + self.components().len() == self.vertex_count()
    }

    pub fn is_bridge(&self, e: Edge) -> bool {
        self.has_edge(e.u, e.v) && !self.reach(e.u, Some(e)).contains(&e.v)
    }

    /// Degree sum over two; checked in tests against [`Graph::edge_count`].
    pub fn degree_sum(&self) -> usize {
        self.adj.values().map(BTreeSet::len).sum()
    }

    /// Parses the line-oriented `p graph <n> <m>` / `e <u> <v>` format.
    pub fn parse(text: &str) -> Result<Graph, GraphError> {
        let mut graph: Option<(Graph, usize)> = None;
        let mut found = 0usize;
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let mut toks = raw.split_whitespace();
            let Some(tag) = toks.next() else { continue };
            let syntax = |msg: &str| GraphError::Syntax { line, msg: msg.to_string() };
            let mut num = |what: &str| -> Result<usize, GraphError> {
                toks.next()
                    .ok_or_else(|| syntax(&format!("missing {what}")))?
                    .parse::<usize>()
                    .map_err(|_| syntax(&format!("invalid {what}")))
            };
            match tag {
                "c" => continue,
                "p" => {
                    if graph.is_some() {
                        return Err(syntax("second problem line"));
                    }
                    let mut it = raw.split_whitespace().skip(1);
                    if it.next() != Some("graph") {
                        return Err(syntax("expected `p graph <n> <m>`"));
                    }
                    let mut num = |what: &str| -> Result<usize, GraphError> {
                        it.next()
                            .ok_or_else(|| syntax(&format!("missing {what}")))?
                            .parse::<usize>()
                            .map_err(|_| syntax(&format!("invalid {what}")))
                    };
                    let n = num("vertex count")?;
                    let m = num("edge count")?;
                    if it.next().is_some() {
                        return Err(syntax("trailing tokens"));
                    }
                    graph = Some((Graph::empty(n), m));
                }
                "e" => {
                    let a = num("endpoint")?;
                    let b = num("endpoint")?;
                    if toks.next().is_some() {
                        return Err(syntax("trailing tokens"));
                    }
                    let Some((g, _)) = graph.as_mut() else {
                        return Err(syntax("edge before problem line"));
                    };
                    let n = g.vertex_count();
                    for x in [a, b] {
                        if x >= n {
                            return Err(GraphError::OutOfRange { line, v: x, n });
                        }
                    }
                    if a == b {
                        return Err(GraphError::Loop { line, v: a });
                    }
                    if g.has_edge(a, b) {
                        return Err(GraphError::DuplicateEdge {
                            line,
                            u: a.min(b),
                            v: a.max(b),
                        });
                    }
                    g.add_edge(a, b)?;
                    found += 1;
                }
                other => return Err(syntax(&format!("unknown line tag `{other}`"))),
            }
        }
        let (g, declared) = graph.ok_or(GraphError::Syntax {
            line: 0,
            msg: "missing problem line".into(),
        })?;
        if declared != found {
            return Err(GraphError::EdgeCount { declared, found });
        }
        Ok(g)
    }

    /// Serializes with edges sorted by `(u, v)`. Requires ids `0..n`.
    pub fn to_text(&self) -> Result<String, GraphError> {
        if self.vertices().enumerate().any(|(i, v)| i != v) {
            return Err(GraphError::NonContiguousIds);
        }
        let mut out = format!("p graph {} {}\n", self.vertex_count(), self.edge_count());
        for e in self.edges() {
            out.push_str(&format!("e {} {}\n", e.u, e.v));
        }
        Ok(out)
    }
}

/// The two sides of a bridge, each keeping the bridge and the far endpoint.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BridgeSplit {
    pub bridge: Edge,
    /// Side of `bridge.u()`, plus `bridge.v()` as a pendant vertex.
    pub g1e: Graph,
    /// Side of `bridge.v()`, plus `bridge.u()` as a pendant vertex.
    pub g2e: Graph,
}

pub fn split_at_bridge(g: &Graph, e: Edge) -> Result<BridgeSplit, GraphError> {
    if !g.is_connected() {
        return Err(GraphError::Disconnected);
    }
    if !g.has_edge(e.u, e.v) {
        return Err(GraphError::MissingEdge(e));
    }
    let side1 = g.reach(e.u, Some(e));
    if side1.contains(&e.v) {
        return Err(GraphError::NotABridge(e));
    }
    let side2 = g.reach(e.v, Some(e));
    let mut keep1 = side1.clone();
    keep1.insert(e.v);
    let mut keep2 = side2;
    keep2.insert(e.u);
    Ok(BridgeSplit {
        bridge: e,
        g1e: g.induced(&keep1),
        g2e: g.induced(&keep2),
    })
}

/// Leaf-peeling levels: level 0 holds the vertices of degree at most one;
/// level `i` holds those of degree at most one once levels `< i` are gone.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LeafStratification {
    pub level: BTreeMap<Vertex, usize>,
}

impl LeafStratification {
    pub fn of(&self, v: Vertex) -> usize {
        self.level[&v]
    }

    pub fn max_level(&self) -> usize {
        self.level.values().copied().max().unwrap_or(0)
    }
}

pub fn leaf_stratification(g: &Graph) -> Result<LeafStratification, GraphError> {
    if !g.is_tree() {
        return Err(GraphError::NotATree);
    }
    let mut deg: BTreeMap<Vertex, usize> = g.vertices().map(|v| (v, g.degree(v))).collect();
    let mut level = BTreeMap::new();
    let mut frontier: Vec<Vertex> = deg.iter().filter(|&(_, &d)| d <= 1).map(|(&v, _)| v).collect();
    let mut round = 0;
    while !frontier.is_empty() {
        for &v in &frontier {
            level.insert(v, round);
        }
        let mut next = BTreeSet::new();
        for &v in &frontier {
            for w in g.neighbors(v) {
                if level.contains_key(&w) {
                    continue;
                }
                let d = deg.get_mut(&w).unwrap();
                *d -= 1;
                if *d <= 1 {
                    next.insert(w);
                }
            }
        }
        frontier = next.into_iter().collect();
        round += 1;
    }
    debug_assert_eq!(level.len(), g.vertex_count());
    Ok(LeafStratification { level })
}

/// A path hanging off `origin` through vertices of degree at most two,
/// ending in a leaf.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PendantPath {
    pub origin: Vertex,
    /// From the neighbor of `origin` out to the leaf.
    pub vertices: Vec<Vertex>,
}

impl PendantPath {
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn first(&self) -> Vertex {
        self.vertices[0]
    }

    pub fn terminal(&self) -> Vertex {
        *self.vertices.last().unwrap()
    }
}

/// The pendant path from `origin` through its neighbor `first`, when that
/// branch is a path of length at most `max_len` ending in a leaf.
pub fn pendant_path(g: &Graph, origin: Vertex, first: Vertex, max_len: usize) -> Option<PendantPath> {
    if !g.has_edge(origin, first) {
        return None;
    }
    let mut vertices = vec![first];
    let (mut prev, mut cur) = (origin, first);
    loop {
        match g.degree(cur) {
            1 => return (vertices.len() <= max_len).then_some(PendantPath { origin, vertices }),
            2 => {
                let next = g.neighbors(cur).find(|&x| x != prev).unwrap();
                if vertices.len() == max_len || next == origin {
                    return None;
                }
                vertices.push(next);
                prev = cur;
                cur = next;
            }
            _ => return None,
        }
    }
}

/// All pendant paths of length 1 or 2 at `v`, ordered by first vertex.
pub fn pendant_paths(g: &Graph, v: Vertex) -> Vec<PendantPath> {
    g.neighbors(v).filter_map(|w| pendant_path(g, v, w, 2)).collect()
}

/// A path `u0-u1-u2-u3-u4` with `d(u0) = d(u4) = 1` and `d(u1) = d(u3) = 2`.
pub type DoubleLeg = [Vertex; 5];

/// Every double-leg configuration, sorted by `(u2, u0, u4)`.
pub fn double_leg_configs(g: &Graph) -> Vec<DoubleLeg> {
    let mut out = Vec::new();
    for u2 in g.vertices() {
        let legs: Vec<PendantPath> = pendant_paths(g, u2).into_iter().filter(|p| p.len() == 2).collect();
        for p in &legs {
            for q in &legs {
                if p.first() != q.first() {
                    out.push([p.terminal(), p.first(), u2, q.first(), q.terminal()]);
                }
            }
        }
    }
    out.sort_by_key(|c| (c[2], c[0], c[4]));
    out
}

pub fn find_double_leg_config(g: &Graph) -> Option<DoubleLeg> {
    double_leg_configs(g).into_iter().next()
}

/// Rooted-at-center parenthesis code; equal for two trees iff isomorphic.
pub fn canonical_code(g: &Graph) -> Result<Vec<u8>, GraphError> {
    let strat = leaf_stratification(g)?;
    let top = strat.max_level();
    let centers: Vec<Vertex> = strat.level.iter().filter(|&(_, &l)| l == top).map(|(&v, _)| v).collect();
    Ok(centers.iter().map(|&c| rooted_code(g, c)).min().unwrap())
}

fn rooted_code(g: &Graph, root: Vertex) -> Vec<u8> {
    // iterative post-order so deep paths do not exhaust the stack
    let mut order = Vec::with_capacity(g.vertex_count());
    let mut parent = BTreeMap::new();
    let mut stack = vec![root];
    parent.insert(root, usize::MAX);
    while let Some(x) = stack.pop() {
        order.push(x);
        for y in g.neighbors(x) {
            if parent[&x] != y {
                parent.insert(y, x);
                stack.push(y);
            }
        }
    }
    let mut codes: BTreeMap<Vertex, Vec<u8>> = BTreeMap::new();
    for &x in order.iter().rev() {
        let mut kids: Vec<Vec<u8>> = g
            .neighbors(x)
            .filter(|&y| parent[&x] != y)
            .map(|y| codes.remove(&y).unwrap())
            .collect();
        kids.sort();
        let mut code = Vec::with_capacity(2 + kids.iter().map(Vec::len).sum::<usize>());
        code.push(b'(');
        for k in kids {
            code.extend(k);
        }
        code.push(b')');
        codes.insert(x, code);
    }
    codes.remove(&root).unwrap()
}

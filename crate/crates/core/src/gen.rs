//! Instance generation: free trees, random labeled trees, random
//! certificates built forward from seeds, and small connected graphs.
//!
//! All randomness comes from `ChaCha8Rng::seed_from_u64`, so a seed fixes
//! the output on every platform.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::cert::{AGadget, Certificate, Extension};
use crate::graph::{canonical_code, Graph, Vertex};
use crate::ops::{self, Mode};

pub const MAX_TREE_ORDER: usize = 14;
pub const MAX_GRAPH_ORDER: usize = 8;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GenError {
    #[error("order {n} exceeds the enumeration guard of {max}")]
    TooLarge { n: usize, max: usize },
    #[error("a tree needs at least one vertex")]
    EmptyTree,
    #[error("operation set must be a nonempty subset of ABCD, got `{0}`")]
    BadOps(String),
    #[error("no allowed operation has an applicable site at step {0}")]
    NoApplicableSite(usize),
}

/// One representative per isomorphism class of free trees with
/// `1..=n_max` vertices, grouped by order and sorted by canonical code
/// within each order. Vertex ids are `0..n`.
pub fn enumerate_trees(n_max: usize) -> Result<TreeStream, GenError> {
    if n_max > MAX_TREE_ORDER {
        return Err(GenError::TooLarge { n: n_max, max: MAX_TREE_ORDER });
    }
    Ok(TreeStream { n_max, n: 0, layer: Vec::new(), pos: 0 })
}

/// Lazily produces trees one order at a time; each order is built by
/// hanging a new leaf on every vertex of every tree of the previous order.
pub struct TreeStream {
    n_max: usize,
    n: usize,
    layer: Vec<Graph>,
    pos: usize,
}

impl TreeStream {
    fn grow(&mut self) {
        let next = self.n + 1;
        let layer = if next == 1 {
            vec![Graph::empty(1)]
        } else {
            let mut seen: BTreeMap<Vec<u8>, Graph> = BTreeMap::new();
            for t in &self.layer {
                for v in t.vertices() {
                    let mut g = t.clone();
                    g.add_vertex(self.n).unwrap();
                    g.add_edge(v, self.n).unwrap();
                    seen.entry(canonical_code(&g).unwrap()).or_insert(g);
                }
            }
            seen.into_values().collect()
        };
        self.layer = layer;
        self.n = next;
        self.pos = 0;
    }
}

impl Iterator for TreeStream {
    type Item = Graph;

    fn next(&mut self) -> Option<Graph> {
        while self.pos == self.layer.len() {
            if self.n == self.n_max {
                return None;
            }
            self.grow();
        }
        self.pos += 1;
        Some(self.layer[self.pos - 1].clone())
    }
}

/// Uniform labeled tree from a random Prüfer sequence.
pub fn random_tree(n: usize, seed: u64) -> Result<Graph, GenError> {
    if n == 0 {
        return Err(GenError::EmptyTree);
    }
    if n <= 2 {
        return Ok(Graph::path(n));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let code: Vec<usize> = (0..n - 2).map(|_| rng.gen_range(0..n)).collect();
    let mut degree = vec![1usize; n];
    for &c in &code {
        degree[c] += 1;
    }
    let mut leaves: BTreeSet<usize> = (0..n).filter(|&v| degree[v] == 1).collect();
    let mut g = Graph::empty(n);
    for &c in &code {
        let leaf = leaves.pop_first().unwrap();
        g.add_edge(leaf, c).unwrap();
        degree[c] -= 1;
        if degree[c] == 1 {
            leaves.insert(c);
        }
    }
    let a = leaves.pop_first().unwrap();
    let b = leaves.pop_first().unwrap();
    g.add_edge(a, b).unwrap();
    Ok(g)
}

/// Random forest with at most `max_n` vertices on ids `0..n`, built from
/// random trees of random sizes, plus one random anchor per component.
pub fn random_forest(max_n: usize, seed: u64) -> Result<(Graph, Vec<Vertex>), GenError> {
    if max_n == 0 {
        return Err(GenError::EmptyTree);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let total = rng.gen_range(1..=max_n);
    let mut forest = Graph::new();
    let mut anchors = Vec::new();
    let mut used = 0;
    while used < total {
        let n = rng.gen_range(1..=total - used);
        let t = random_tree(n, rng.gen())?.shifted(used);
        anchors.push(used + rng.gen_range(0..n));
        forest = forest.disjoint_union(&t).expect("shifted ids are disjoint");
        used += n;
    }
    Ok((forest, anchors))
}

/// A subset of the operations A, B, C, D.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct OpSet {
    pub a: bool,
    pub b: bool,
    pub c: bool,
    pub d: bool,
}

impl OpSet {
    pub const ALL: OpSet = OpSet { a: true, b: true, c: true, d: true };

    fn letters(&self) -> Vec<char> {
        [(self.a, 'A'), (self.b, 'B'), (self.c, 'C'), (self.d, 'D')]
            .into_iter()
            .filter_map(|(on, l)| on.then_some(l))
            .collect()
    }
}

impl FromStr for OpSet {
    type Err = GenError;

    fn from_str(s: &str) -> Result<Self, GenError> {
        let mut ops = OpSet { a: false, b: false, c: false, d: false };
        for ch in s.chars() {
            match ch.to_ascii_uppercase() {
                'A' => ops.a = true,
                'B' => ops.b = true,
                'C' => ops.c = true,
                'D' => ops.d = true,
                ',' | ' ' => {}
                _ => return Err(GenError::BadOps(s.to_string())),
            }
        }
        if ops.letters().is_empty() {
            return Err(GenError::BadOps(s.to_string()));
        }
        Ok(ops)
    }
}

impl fmt::Display for OpSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.letters().into_iter().collect::<String>())
    }
}

struct Builder {
    rng: ChaCha8Rng,
    next_id: Vertex,
}

impl Builder {
    fn fresh(&mut self) -> Vertex {
        self.next_id += 1;
        self.next_id - 1
    }

    fn seed(&mut self) -> (Graph, Certificate) {
        if self.rng.gen_bool(0.5) {
            let v = self.fresh();
            (single(v), Certificate::Seed1(v))
        } else {
            let (u, v) = (self.fresh(), self.fresh());
            let mut g = single(u).disjoint_union(&single(v)).unwrap();
            g.add_edge(u, v).unwrap();
            (g, Certificate::Seed2(u, v))
        }
    }

    fn pick<T: Copy>(&mut self, xs: &[T]) -> T {
        *xs.choose(&mut self.rng).unwrap()
    }

    /// Strict sites for `op` in `g`, in increasing order.
    fn sites(g: &Graph, op: char) -> Vec<Vertex> {
        g.vertices()
            .filter(|&v| match op {
                'B' => ops::applicable_b(g, v).unwrap(),
                'C' => ops::applicable_c(g, v).unwrap().is_some(),
                'D' => ops::applicable_d(g, v).unwrap().is_some(),
                _ => unreachable!(),
            })
            .collect()
    }

    fn extension(&mut self, op: char, anchor: Vertex) -> Extension {
        match op {
            'B' => Extension::B { anchor, w: self.fresh(), w2: self.fresh() },
            'C' => Extension::C { anchor, a: self.fresh(), b: self.fresh(), c: self.fresh(), d: self.fresh() },
            _ => Extension::D {
                anchor,
                m: self.fresh(),
                a: self.fresh(),
                b: self.fresh(),
                c: self.fresh(),
                d: self.fresh(),
            },
        }
    }

    fn join(&mut self, parts: Vec<(Graph, Certificate)>) -> (Graph, Certificate) {
        let hub = self.fresh();
        let gadget = if self.rng.gen_bool(0.5) {
            AGadget::TwoLeaves { w: self.fresh(), x: self.fresh() }
        } else {
            AGadget::LeafAndLeg { x: self.fresh(), w: self.fresh(), w2: self.fresh() }
        };
        let mut forest = Graph::new();
        let mut anchors = Vec::new();
        let mut cert_parts = Vec::new();
        for (g, c) in parts {
            let vs: Vec<Vertex> = g.vertices().collect();
            let a = self.pick(&vs);
            forest = forest.disjoint_union(&g).expect("fresh ids are unique");
            anchors.push(a);
            cert_parts.push((a, c));
        }
        let g = ops::apply_a(&forest, hub, gadget.clone(), &anchors, true).expect("join of disjoint trees");
        (g, Certificate::Join { hub, gadget, parts: cert_parts })
    }
}

fn single(v: Vertex) -> Graph {
    let mut g = Graph::new();
    g.add_vertex(v).unwrap();
    g
}

/// A certificate with exactly `steps` operations drawn from `ops`, each
/// applied at a strictly applicable site. With A allowed, extra seeds are
/// occasionally started and later merged, so joins have several parts.
pub fn random_certificate(steps: usize, seed: u64, allowed: OpSet) -> Result<Certificate, GenError> {
    let mut b = Builder { rng: ChaCha8Rng::seed_from_u64(seed), next_id: 0 };
    let mut pool = vec![b.seed()];
    let letters = allowed.letters();
    for step in 0..steps {
        let last = step + 1 == steps;
        if allowed.a && !last && b.rng.gen_bool(0.2) {
            pool.push(b.seed());
        }
        if last && pool.len() > 1 {
            let parts = std::mem::take(&mut pool);
            pool.push(b.join(parts));
            continue;
        }
        let mut order = letters.clone();
        order.shuffle(&mut b.rng);
        let mut done = false;
        for op in order {
            if op == 'A' {
                let k = b.rng.gen_range(1..=pool.len());
                pool.shuffle(&mut b.rng);
                let mut parts = pool.split_off(pool.len() - k);
                parts.sort_by_key(|(g, _)| g.vertices().next());
                pool.push(b.join(parts));
                done = true;
                break;
            }
            let mut comps: Vec<usize> = (0..pool.len()).collect();
            comps.shuffle(&mut b.rng);
            for i in comps {
                let sites = Builder::sites(&pool[i].0, op);
                if sites.is_empty() {
                    continue;
                }
                let anchor = b.pick(&sites);
                let ext = b.extension(op, anchor);
                let (g, c) = pool.swap_remove(i);
                let g = ops::apply_extension(&g, &ext, Mode::Strict).expect("site was checked");
                pool.push((g, Certificate::extend(ext, c)));
                done = true;
                break;
            }
            if done {
                break;
            }
        }
        if !done {
            return Err(GenError::NoApplicableSite(step));
        }
    }
    debug_assert_eq!(pool.len(), 1);
    Ok(pool.pop().unwrap().1)
}

/// Relabels `g` on `0..n` to the adjacency pattern minimizing the upper
/// triangle bit string, trying only permutations that sort vertices by
/// degree.
fn canonical_graph(g: &Graph) -> (u64, Graph) {
    let vs: Vec<Vertex> = g.vertices().collect();
    let n = vs.len();
    let mut classes: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (i, &v) in vs.iter().enumerate() {
        classes.entry(g.degree(v)).or_default().push(i);
    }
    let adj: Vec<Vec<bool>> = vs.iter().map(|&a| vs.iter().map(|&b| g.has_edge(a, b)).collect()).collect();
    let groups: Vec<Vec<usize>> = classes.into_values().collect();
    let mut best: Option<(u64, Vec<usize>)> = None;
    let mut label = vec![0usize; n];
    permute_groups(&groups, 0, 0, &mut label, &mut |label| {
        let mut code = 0u64;
        let mut bit = 0;
        for a in 0..n {
            for b in a + 1..n {
                if adj[label[a]][label[b]] {
                    code |= 1 << bit;
                }
                bit += 1;
            }
        }
        if best.as_ref().is_none_or(|(c, _)| code < *c) {
            best = Some((code, label.to_vec()));
        }
    });
    let (code, label) = best.unwrap();
    let mut out = Graph::empty(n);
    for a in 0..n {
        for b in a + 1..n {
            if adj[label[a]][label[b]] {
                out.add_edge(a, b).unwrap();
            }
        }
    }
    (code, out)
}

/// Calls `f` with every assignment of new positions to old indices that
/// keeps each degree group in its block of positions.
fn permute_groups(groups: &[Vec<usize>], gi: usize, start: usize, label: &mut Vec<usize>, f: &mut dyn FnMut(&[usize])) {
    if gi == groups.len() {
        f(label);
        return;
    }
    let mut members = groups[gi].clone();
    heap_permutations(&mut members, groups[gi].len(), &mut |perm| {
        label[start..start + perm.len()].copy_from_slice(perm);
        permute_groups(groups, gi + 1, start + perm.len(), label, f);
    });
}

fn heap_permutations(xs: &mut [usize], k: usize, f: &mut dyn FnMut(&[usize])) {
    if k <= 1 {
        f(xs);
        return;
    }
    for i in 0..k - 1 {
        heap_permutations(xs, k - 1, f);
        if k % 2 == 0 {
            xs.swap(i, k - 1);
        } else {
            xs.swap(0, k - 1);
        }
    }
    heap_permutations(xs, k - 1, f);
}

/// One representative per isomorphism class of connected simple graphs
/// with `1..=n_max` vertices, ordered by order and then canonical code.
pub fn enumerate_connected_graphs(n_max: usize) -> Result<Vec<Graph>, GenError> {
    if n_max > MAX_GRAPH_ORDER {
        return Err(GenError::TooLarge { n: n_max, max: MAX_GRAPH_ORDER });
    }
    let mut out = Vec::new();
    // all graphs, connected or not, since every graph on n vertices is a
    // graph on n - 1 vertices plus one more vertex
    let mut layer: Vec<Graph> = vec![Graph::new()];
    for n in 1..=n_max {
        let mut seen: BTreeMap<u64, Graph> = BTreeMap::new();
        for g in &layer {
            for mask in 0u32..(1 << (n - 1)) {
                let mut h = g.clone();
                h.add_vertex(n - 1).unwrap();
                for u in 0..n - 1 {
                    if mask & (1 << u) != 0 {
                        h.add_edge(u, n - 1).unwrap();
                    }
                }
                let (code, canon) = canonical_graph(&h);
                seen.entry(code).or_insert(canon);
            }
        }
        layer = seen.into_values().collect();
        out.extend(layer.iter().filter(|g| g.is_connected()).cloned());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::treedp;

    fn counts(n_max: usize) -> Vec<usize> {
        let mut c = vec![0; n_max];
        for t in enumerate_trees(n_max).unwrap() {
            c[t.vertex_count() - 1] += 1;
        }
        c
    }

    #[test]
    fn tree_counts() {
        assert_eq!(counts(1), vec![1]);
        assert_eq!(counts(4), vec![1, 1, 1, 2]);
        assert_eq!(counts(10), vec![1, 1, 1, 2, 3, 6, 11, 23, 47, 106]);
        assert!(enumerate_trees(15).is_err());
    }

    #[test]
    fn trees_are_distinct_contiguous_trees() {
        let mut codes = BTreeSet::new();
        for t in enumerate_trees(9).unwrap() {
            assert!(t.is_tree());
            assert!(t.to_text().is_ok());
            assert!(codes.insert(canonical_code(&t).unwrap()));
        }
    }

    #[test]
    fn random_trees() {
        assert_eq!(random_tree(1, 7).unwrap(), Graph::empty(1));
        assert_eq!(random_tree(2, 7).unwrap(), Graph::path(2));
        let t = random_tree(50, 11).unwrap();
        assert!(t.is_tree());
        assert_eq!(t, random_tree(50, 11).unwrap());
        assert_ne!(t, random_tree(50, 12).unwrap());
        assert_eq!(random_tree(0, 1), Err(GenError::EmptyTree));
    }

    #[test]
    fn random_forests() {
        for seed in 0..50 {
            let (f, anchors) = random_forest(12, seed).unwrap();
            assert!(f.is_forest() && f.vertex_count() <= 12);
            assert!(f.to_text().is_ok());
            assert_eq!(anchors.len(), f.components().len());
            assert_eq!(random_forest(12, seed).unwrap(), (f, anchors));
        }
    }

    #[test]
    fn op_sets() {
        assert_eq!("ABCD".parse::<OpSet>().unwrap(), OpSet::ALL);
        assert_eq!("bd".parse::<OpSet>().unwrap().to_string(), "BD");
        assert!("".parse::<OpSet>().is_err());
        assert!("BX".parse::<OpSet>().is_err());
    }

    #[test]
    fn zero_and_one_step() {
        let c = random_certificate(0, 3, OpSet::ALL).unwrap();
        assert!(matches!(c, Certificate::Seed1(_) | Certificate::Seed2(..)));
        let b_only: OpSet = "B".parse().unwrap();
        for seed in 0..10 {
            let c = random_certificate(1, seed, b_only).unwrap();
            let Certificate::Extend { step: Extension::B { .. }, base } = &c else { panic!("{c}") };
            let g = ops::replay(&c, Mode::Strict).unwrap();
            if matches!(**base, Certificate::Seed1(_)) {
                assert_eq!(g, Graph::path(3));
            } else {
                assert_eq!(g.vertex_count(), 4);
            }
        }
    }

    #[test]
    fn certificates_replay_with_equality() {
        for seed in 0..60 {
            let c = random_certificate(25, seed, OpSet::ALL).unwrap();
            assert_eq!(c.op_count(), 25);
            let g = ops::replay(&c, Mode::Strict).unwrap();
            assert!(g.is_tree());
            assert!(g.to_text().is_ok());
            assert!(treedp::params_tree(&g).unwrap().is_equal(), "seed {seed}");
        }
        assert_eq!(random_certificate(30, 5, OpSet::ALL), random_certificate(30, 5, OpSet::ALL));
    }

    #[test]
    fn connected_graph_counts() {
        let mut c = vec![0; 6];
        for g in enumerate_connected_graphs(6).unwrap() {
            c[g.vertex_count() - 1] += 1;
        }
        assert_eq!(c, vec![1, 1, 2, 6, 21, 112]);
    }
}

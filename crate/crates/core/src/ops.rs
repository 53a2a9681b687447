//! The four tree-building operations, their applicability conditions, and
//! certificate replay.
//!
//! Two verification levels exist. `Strict` checks the applicability
//! definitions verbatim. `Sound` checks only what the preservation
//! arguments need: it coincides with `Strict` for B and C, and for D it
//! accepts any vertex covered by every maximum matching, which is exactly
//! the condition under which the D gadget adds two to the matching number.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::cert::{AGadget, Certificate, Extension};
use crate::graph::{Graph, GraphError, Vertex};
use crate::treedp;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Mode {
    #[default]
    Strict,
    Sound,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Strict => "strict",
            Mode::Sound => "sound",
        })
    }
}

impl std::str::FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "strict" => Ok(Mode::Strict),
            "sound" => Ok(Mode::Sound),
            other => Err(format!("unknown mode `{other}` (expected strict or sound)")),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OpsError {
    #[error("vertex {0} is not in the graph")]
    MissingVertex(Vertex),
    #[error("vertex id {0} is already in use")]
    IdCollision(Vertex),
    #[error("anchor {0} is listed twice")]
    DuplicateAnchor(Vertex),
    #[error("operation A needs at least one anchor")]
    NoAnchors,
    #[error("anchors {0} and {1} lie in the same component")]
    SharedComponent(Vertex, Vertex),
    #[error("component containing {0} has no anchor")]
    UncoveredComponent(Vertex),
    #[error("graph is not a tree")]
    NotATree,
    #[error("graph is not a forest")]
    NotAForest,
    #[error("vertex {vertex} is not applicable for {op} ({mode}): {reason}")]
    NotApplicable { op: &'static str, vertex: Vertex, mode: Mode, reason: String },
}

impl From<GraphError> for OpsError {
    fn from(e: GraphError) -> Self {
        match e {
            GraphError::MissingVertex(v) => OpsError::MissingVertex(v),
            GraphError::VertexExists(v) => OpsError::IdCollision(v),
            // the constructions only add edges at fresh vertices
            other => unreachable!("unexpected graph error during construction: {other}"),
        }
    }
}

fn require(g: &Graph, v: Vertex) -> Result<(), OpsError> {
    if g.contains(v) {
        Ok(())
    } else {
        Err(OpsError::MissingVertex(v))
    }
}

fn require_tree(g: &Graph) -> Result<(), OpsError> {
    if g.is_tree() {
        Ok(())
    } else {
        Err(OpsError::NotATree)
    }
}

/// Legs at `x`: neighbors `y` of degree two whose other neighbor is a leaf.
/// Returned as `(inner, leaf)` pairs in increasing inner id. Neighbors in
/// `skip` are ignored.
fn legs(g: &Graph, x: Vertex, skip: &[Vertex]) -> Vec<(Vertex, Vertex)> {
    g.neighbors(x)
        .filter(|y| !skip.contains(y))
        .filter_map(|y| {
            if g.degree(y) != 2 {
                return None;
            }
            let z = g.neighbors(y).find(|&z| z != x)?;
            (g.degree(z) == 1).then_some((y, z))
        })
        .collect()
}

/// `(u0, u1, u3, u4)` witnessing the five-vertex condition of B at `v`:
/// a path `u0-u1-v-u3-u4` with `d(u0) = 1` and `d(u1) = d(u3) = 2`.
pub fn b_config(g: &Graph, v: Vertex) -> Option<[Vertex; 4]> {
    for (u1, u0) in legs(g, v, &[]) {
        for u3 in g.neighbors(v).filter(|&u3| u3 != u1 && g.degree(u3) == 2) {
            if let Some(u4) = g.neighbors(u3).find(|&u4| u4 != v) {
                if u4 != u0 && u4 != u1 {
                    return Some([u0, u1, u3, u4]);
                }
            }
        }
    }
    None
}

/// Definition of applicability for B: degree at most one, or the
/// five-vertex configuration around `v`.
pub fn applicable_b(g: &Graph, v: Vertex) -> Result<bool, OpsError> {
    require(g, v)?;
    Ok(g.degree(v) <= 1 || b_config(g, v).is_some())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CCase {
    One,
    Two,
}

/// `He`: `h` plus the pendant edge `(x, y)` with `x` fresh to `h`.
fn with_pendant(h: &Graph, x: Vertex, y: Vertex) -> Graph {
    let mut he = h.clone();
    he.add_vertex(x).expect("pendant vertex is fresh");
    he.add_edge(x, y).expect("attachment vertex is present");
    he
}

fn beta_l(g: &Graph) -> (usize, usize) {
    let p = treedp::lex_pair_dp(g, treedp::DpObjective::BetaL).expect("tree").0;
    (p.primary as usize, p.secondary as usize)
}

/// Applicability for C at the leaf `v`. Case 1: its neighbor `u1` has
/// degree four, carrying two legs and one further neighbor `u6`, and the
/// pendant edge `(u1, u6)` raises `beta` of the remainder without raising
/// `L`. Case 2: `u1` has degree three, one leg and a further neighbor `u4`,
/// and `(u1, u4)` leaves `lambda` of the remainder unchanged.
pub fn applicable_c(g: &Graph, v: Vertex) -> Result<Option<CCase>, OpsError> {
    require(g, v)?;
    require_tree(g)?;
    if g.degree(v) != 1 {
        return Ok(None);
    }
    let u1 = g.neighbors(v).next().unwrap();
    let leg_list = legs(g, u1, &[v]);
    match g.degree(u1) {
        4 => {
            for (i, &(u2, u3)) in leg_list.iter().enumerate() {
                for &(u4, u5) in &leg_list[i + 1..] {
                    let u6 = g.neighbors(u1).find(|&x| ![v, u2, u4].contains(&x)).unwrap();
                    let h = g.without_vertices([v, u1, u2, u3, u4, u5]);
                    let he = with_pendant(&h, u1, u6);
                    let (bh, lh) = beta_l(&h);
                    let (be, le) = beta_l(&he);
                    if be == bh + 1 && le == lh {
                        return Ok(Some(CCase::One));
                    }
                }
            }
            Ok(None)
        }
        3 => {
            for &(u2, u3) in &leg_list {
                let u4 = g.neighbors(u1).find(|&x| x != v && x != u2).unwrap();
                let h = g.without_vertices([v, u1, u2, u3]);
                let he = with_pendant(&h, u1, u4);
                let lh = treedp::params_tree(&h).expect("tree").lambda;
                let le = treedp::params_tree(&he).expect("tree").lambda;
                if le == lh {
                    return Ok(Some(CCase::Two));
                }
            }
            Ok(None)
        }
        _ => Ok(None),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum DCase {
    One,
    Two,
    Three,
}

/// Applicability for D, first matching case in the order 1, 2, 3.
/// Case 1: `d(v) = 2` with a leaf neighbor. Case 2: `v` is joined to the
/// degree-three center of a double leg. Case 3: `d(v) = 2`, `v` carries a
/// leg `u1-u0` and another neighbor `u3`, and the pendant edge `(v, u3)`
/// raises `beta` of the remainder without raising `L`.
pub fn applicable_d(g: &Graph, v: Vertex) -> Result<Option<DCase>, OpsError> {
    require(g, v)?;
    require_tree(g)?;
    if g.degree(v) == 2 && g.neighbors(v).any(|x| g.degree(x) == 1) {
        return Ok(Some(DCase::One));
    }
    for u2 in g.neighbors(v) {
        if g.degree(u2) == 3 && legs(g, u2, &[v]).len() == 2 {
            return Ok(Some(DCase::Two));
        }
    }
    if g.degree(v) == 2 {
        for (u1, u0) in legs(g, v, &[]) {
            let u3 = g.neighbors(v).find(|&x| x != u1).unwrap();
            let h = g.without_vertices([u0, u1, v]);
            let he = with_pendant(&h, v, u3);
            let (bh, lh) = beta_l(&h);
            let (be, le) = beta_l(&he);
            if be == bh + 1 && le == lh {
                return Ok(Some(DCase::Three));
            }
        }
    }
    Ok(None)
}

/// `v` is covered by every maximum matching of the forest `g`.
pub fn is_essential(g: &Graph, v: Vertex) -> Result<bool, OpsError> {
    require(g, v)?;
    let full = treedp::beta_forest(g).map_err(|_| OpsError::NotAForest)?;
    let rest = treedp::beta_forest(&g.without_vertices([v])).map_err(|_| OpsError::NotAForest)?;
    Ok(rest + 1 == full)
}

/// Why `step` may not be applied to `g` at `mode`, or `None` if it may.
pub fn check_applicable(g: &Graph, step: &Extension, mode: Mode) -> Result<Option<String>, OpsError> {
    let v = step.anchor();
    Ok(match step {
        Extension::B { .. } => (!applicable_b(g, v)?)
            .then(|| "degree at least two and no path u0-u1-v-u3-u4 with d(u0)=1, d(u1)=d(u3)=2".into()),
        Extension::C { .. } => applicable_c(g, v)?
            .is_none()
            .then(|| "neither the degree-4 nor the degree-3 configuration (with its parameter test) fits".into()),
        Extension::D { .. } => {
            let strict = applicable_d(g, v)?.is_some();
            match mode {
                Mode::Strict if !strict => Some("none of the three D configurations fits".into()),
                Mode::Sound if !strict && !is_essential(g, v)? => {
                    Some("vertex is avoided by some maximum matching".into())
                }
                _ => None,
            }
        }
    })
}

fn check_fresh(g: &Graph, ids: &[Vertex]) -> Result<(), OpsError> {
    let mut seen = BTreeSet::new();
    for &x in ids {
        if g.contains(x) || !seen.insert(x) {
            return Err(OpsError::IdCollision(x));
        }
    }
    Ok(())
}

/// Adds the gadget of `step` without checking applicability.
pub fn attach(g: &Graph, step: &Extension) -> Result<Graph, OpsError> {
    require(g, step.anchor())?;
    let fresh = step.new_vertices();
    check_fresh(g, &fresh)?;
    let mut out = g.clone();
    for x in fresh {
        out.add_vertex(x)?;
    }
    for (a, b) in step.new_edges() {
        out.add_edge(a, b)?;
    }
    Ok(out)
}

/// Applies `step` after checking its applicability at `mode`.
pub fn apply_extension(g: &Graph, step: &Extension, mode: Mode) -> Result<Graph, OpsError> {
    require(g, step.anchor())?;
    if let Some(reason) = check_applicable(g, step, mode)? {
        return Err(OpsError::NotApplicable { op: step.name(), vertex: step.anchor(), mode, reason });
    }
    attach(g, step)
}

/// Operation B at `v` with fresh ids `next_free_id`, `next_free_id + 1`.
pub fn apply_b(g: &Graph, v: Vertex, mode: Mode) -> Result<Graph, OpsError> {
    let w = g.next_free_id();
    apply_extension(g, &Extension::B { anchor: v, w, w2: w + 1 }, mode)
}

pub fn apply_c(g: &Graph, v: Vertex, mode: Mode) -> Result<Graph, OpsError> {
    let a = g.next_free_id();
    apply_extension(g, &Extension::C { anchor: v, a, b: a + 1, c: a + 2, d: a + 3 }, mode)
}

pub fn apply_d(g: &Graph, v: Vertex, mode: Mode) -> Result<Graph, OpsError> {
    let m = g.next_free_id();
    apply_extension(g, &Extension::D { anchor: v, m, a: m + 1, b: m + 2, c: m + 3, d: m + 4 }, mode)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum AVariant {
    A1,
    A2,
}

/// Operation A on a forest: a fresh hub joined to every anchor, plus the
/// gadget. With `tree_mode`, the anchors must hit every component exactly
/// once so that the result is a tree.
pub fn apply_a(g: &Graph, hub: Vertex, gadget: AGadget, anchors: &[Vertex], tree_mode: bool) -> Result<Graph, OpsError> {
    if anchors.is_empty() {
        return Err(OpsError::NoAnchors);
    }
    let mut seen = BTreeSet::new();
    for &a in anchors {
        require(g, a)?;
        if !seen.insert(a) {
            return Err(OpsError::DuplicateAnchor(a));
        }
    }
    let mut fresh = vec![hub];
    fresh.extend(gadget.new_vertices());
    check_fresh(g, &fresh)?;
    if tree_mode {
        if !g.is_forest() {
            return Err(OpsError::NotAForest);
        }
        for comp in g.components() {
            let hits: Vec<Vertex> = anchors.iter().copied().filter(|a| comp.contains(a)).collect();
            match hits.as_slice() {
                [] => return Err(OpsError::UncoveredComponent(*comp.first().unwrap())),
                [_] => {}
                [a, b, ..] => return Err(OpsError::SharedComponent(*a, *b)),
            }
        }
    }
    let mut out = g.clone();
    for x in fresh {
        out.add_vertex(x)?;
    }
    for &a in anchors {
        out.add_edge(hub, a)?;
    }
    for (a, b) in gadget.new_edges(hub) {
        out.add_edge(a, b)?;
    }
    Ok(out)
}

/// Operation A with fresh ids allocated after the largest id in use.
pub fn apply_a_fresh(g: &Graph, anchors: &[Vertex], variant: AVariant) -> Result<Graph, OpsError> {
    let hub = g.next_free_id();
    let gadget = match variant {
        AVariant::A1 => AGadget::TwoLeaves { w: hub + 1, x: hub + 2 },
        AVariant::A2 => AGadget::LeafAndLeg { x: hub + 1, w: hub + 2, w2: hub + 3 },
    };
    apply_a(g, hub, gadget, anchors, true)
}

/// One step of a replay, with applicability at both levels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StepCheck {
    pub path: String,
    pub op: &'static str,
    pub anchor: Vertex,
    pub strict_ok: bool,
    pub sound_ok: bool,
    pub reason: Option<String>,
}

impl StepCheck {
    pub fn ok_at(&self, mode: Mode) -> bool {
        match mode {
            Mode::Strict => self.strict_ok,
            Mode::Sound => self.sound_ok,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("at {path}: {error}")]
pub struct ReplayError {
    pub path: String,
    pub error: OpsError,
}

fn label(cert: &Certificate) -> String {
    match cert {
        Certificate::Seed1(v) => format!("seed1@{v}"),
        Certificate::Seed2(u, _) => format!("seed2@{u}"),
        Certificate::Extend { step, .. } => format!("{}@{}", step.name(), step.anchor()),
        Certificate::Join { hub, gadget, .. } => format!("{}@{}", gadget.name(), hub),
    }
}

fn join_path(parent: &str, child: &str) -> String {
    if parent.is_empty() {
        child.to_string()
    } else {
        format!("{parent}/{child}")
    }
}

/// Builds the graph bottom-up. Structural problems (id reuse, missing
/// anchors) abort. Applicability is recorded in `log`; when `enforce` is
/// set, a step failing at `mode` aborts as well.
fn build(cert: &Certificate, mode: Mode, enforce: bool, log: &mut Vec<StepCheck>) -> Result<Graph, ReplayError> {
    // walk extension chains iteratively; recurse only at joins
    let mut chain: Vec<(&Extension, String)> = Vec::new();
    let mut cur = cert;
    let mut path = label(cert);
    let base_path;
    let base = loop {
        match cur {
            Certificate::Seed1(v) => {
                base_path = path;
                let mut g = Graph::new();
                g.add_vertex(*v).unwrap();
                break g;
            }
            Certificate::Seed2(u, v) => {
                if u == v {
                    return Err(ReplayError { path, error: OpsError::IdCollision(*u) });
                }
                base_path = path;
                let mut g = Graph::new();
                g.add_vertex(*u).unwrap();
                g.add_vertex(*v).unwrap();
                g.add_edge(*u, *v).unwrap();
                break g;
            }
            Certificate::Extend { step, base } => {
                chain.push((step, path.clone()));
                path = join_path(&path, &label(base));
                cur = base;
            }
            Certificate::Join { hub, gadget, parts } => {
                base_path = path.clone();
                let mut forest = Graph::new();
                let mut anchors = Vec::new();
                for (i, (anchor, sub)) in parts.iter().enumerate() {
                    let part = build_at(sub, mode, enforce, log, &format!("{path}[{i}]"))?;
                    if !part.contains(*anchor) {
                        return Err(ReplayError {
                            path: format!("{path}[{i}]"),
                            error: OpsError::MissingVertex(*anchor),
                        });
                    }
                    forest = match forest.disjoint_union(&part) {
                        Some(f) => f,
                        None => {
                            let clash = part.vertices().find(|&x| forest.contains(x)).unwrap();
                            return Err(ReplayError {
                                path: format!("{path}[{i}]"),
                                error: OpsError::IdCollision(clash),
                            });
                        }
                    };
                    anchors.push(*anchor);
                }
                let g = apply_a(&forest, *hub, *gadget, &anchors, true)
                    .map_err(|error| ReplayError { path: path.clone(), error })?;
                log.push(StepCheck {
                    path: path.clone(),
                    op: gadget.name(),
                    anchor: *hub,
                    strict_ok: true,
                    sound_ok: true,
                    reason: None,
                });
                break g;
            }
        }
    };
    let _ = base_path;
    let mut g = base;
    for (step, path) in chain.into_iter().rev() {
        let fail = |error| ReplayError { path: path.clone(), error };
        let strict = check_applicable(&g, step, Mode::Strict).map_err(fail)?;
        let sound = if strict.is_none() { None } else { check_applicable(&g, step, Mode::Sound).map_err(fail)? };
        let check = StepCheck {
            path: path.clone(),
            op: step.name(),
            anchor: step.anchor(),
            strict_ok: strict.is_none(),
            sound_ok: sound.is_none(),
            reason: match mode {
                Mode::Strict => strict.clone(),
                Mode::Sound => sound.clone(),
            },
        };
        let ok = check.ok_at(mode);
        log.push(check);
        if enforce && !ok {
            let reason = if mode == Mode::Strict { strict } else { sound }.unwrap();
            return Err(fail(OpsError::NotApplicable { op: step.name(), vertex: step.anchor(), mode, reason }));
        }
        g = attach(&g, step).map_err(fail)?;
    }
    Ok(g)
}

fn build_at(
    cert: &Certificate,
    mode: Mode,
    enforce: bool,
    log: &mut Vec<StepCheck>,
    prefix: &str,
) -> Result<Graph, ReplayError> {
    let mut inner = Vec::new();
    let out = build(cert, mode, enforce, &mut inner).map_err(|e| ReplayError {
        path: join_path(prefix, &e.path),
        error: e.error,
    });
    log.extend(inner.into_iter().map(|mut c| {
        c.path = join_path(prefix, &c.path);
        c
    }));
    out
}

/// Replays `cert`, requiring every step to be applicable at `mode`.
pub fn replay(cert: &Certificate, mode: Mode) -> Result<Graph, ReplayError> {
    build(cert, mode, true, &mut Vec::new())
}

/// Replays `cert` regardless of applicability, reporting every step.
pub fn replay_logged(cert: &Certificate, mode: Mode) -> (Result<Graph, ReplayError>, Vec<StepCheck>) {
    let mut log = Vec::new();
    let g = build(cert, mode, false, &mut log);
    (g, log)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::matching::ParamSet;
    use crate::oracle::Oracle;

    fn params(g: &Graph) -> ParamSet {
        Oracle::default().params(g).unwrap()
    }

    #[test]
    fn b_applicability() {
        assert!(applicable_b(&Graph::empty(1), 0).unwrap());
        assert!(!applicable_b(&Graph::path(3), 1).unwrap());
        // center 2 of the path 0..4 with an extra neighbor 5
        let g = Graph::from_edges(6, &[(0, 1), (1, 2), (2, 3), (3, 4), (2, 5)]);
        assert!(applicable_b(&g, 2).unwrap());
        assert_eq!(b_config(&g, 2), Some([0, 1, 3, 4]));
        assert_eq!(applicable_b(&g, 9), Err(OpsError::MissingVertex(9)));
    }

    #[test]
    fn b_constructions() {
        assert_eq!(apply_b(&Graph::empty(1), 0, Mode::Strict).unwrap(), Graph::path(3));
        let p4 = apply_b(&Graph::path(2), 0, Mode::Strict).unwrap();
        assert!(p4.is_tree());
        assert_eq!(p4.edge_count(), 3);
        assert_eq!((0..4).map(|v| p4.degree(v)).max(), Some(2));
        assert!(matches!(apply_b(&Graph::path(3), 1, Mode::Strict), Err(OpsError::NotApplicable { op: "B", .. })));
    }

    fn c_case1_host() -> Graph {
        // u1=1 with leaf 0, legs 1-2-3 and 1-4-5, and 6 ending the path 6-7-8
        Graph::from_edges(9, &[(0, 1), (1, 2), (2, 3), (1, 4), (4, 5), (1, 6), (6, 7), (7, 8)])
    }

    fn c_case2_host() -> Graph {
        // u1=1 with leaf 0, leg 1-2-3, and u4 = 6, the center of the path 4-5-6-7-8
        Graph::from_edges(9, &[(0, 1), (1, 2), (2, 3), (1, 6), (4, 5), (5, 6), (6, 7), (7, 8)])
    }

    #[test]
    fn c_applicability() {
        assert_eq!(applicable_c(&c_case1_host(), 0).unwrap(), Some(CCase::One));
        assert_eq!(applicable_c(&c_case2_host(), 0).unwrap(), Some(CCase::Two));
        let leafy = Graph::from_edges(5, &[(0, 1), (1, 2), (2, 3), (1, 4)]);
        assert_eq!(applicable_c(&leafy, 0).unwrap(), None);
        let two_k2 = Graph::from_edges(4, &[(0, 1), (2, 3)]);
        assert_eq!(applicable_c(&two_k2, 0), Err(OpsError::NotATree));
    }

    #[test]
    fn c_case2_lambda_claim() {
        // the remainder is P5 and the extended remainder is P5 plus a pendant at its center
        let h = Graph::path(5);
        let he = with_pendant(&h, 9, 2);
        assert_eq!(params(&h).lambda, 4);
        assert_eq!(params(&he).lambda, 4);
    }

    #[test]
    fn c_constructions_preserve_equality() {
        for host in [c_case1_host(), c_case2_host()] {
            assert!(params(&host).alpha_equals_beta());
            let out = apply_c(&host, 0, Mode::Strict).unwrap();
            assert_eq!(out.vertex_count(), host.vertex_count() + 4);
            let p = params(&out);
            assert_eq!(p.beta, params(&host).beta + 2);
            assert!(p.alpha_equals_beta());
        }
        let leafy = Graph::from_edges(5, &[(0, 1), (1, 2), (2, 3), (1, 4)]);
        assert!(apply_c(&leafy, 0, Mode::Strict).is_err());
    }

    #[test]
    fn d_applicability() {
        assert_eq!(applicable_d(&Graph::path(3), 1).unwrap(), Some(DCase::One));
        assert_eq!(applicable_d(&Graph::path(6), 2).unwrap(), Some(DCase::Three));
        assert_eq!(applicable_d(&Graph::path(5), 2).unwrap(), None);
        assert_eq!(applicable_d(&Graph::path(2), 0).unwrap(), None);
        assert_eq!(applicable_d(&Graph::path(2), 1).unwrap(), None);
        // 5 joined to the center of the double leg 0-1-2-3-4
        let g = Graph::from_edges(6, &[(0, 1), (1, 2), (2, 3), (3, 4), (2, 5)]);
        assert_eq!(applicable_d(&g, 5).unwrap(), Some(DCase::Two));
    }

    #[test]
    fn d_constructions() {
        let out = apply_d(&Graph::path(3), 1, Mode::Strict).unwrap();
        assert_eq!(out.vertex_count(), 8);
        assert!(params(&out).alpha_equals_beta());

        // endpoint of K2: not strict, but covered by every maximum matching
        assert!(apply_d(&Graph::path(2), 0, Mode::Strict).is_err());
        let out = apply_d(&Graph::path(2), 0, Mode::Sound).unwrap();
        assert_eq!(out.vertex_count(), 7);
        assert_eq!(params(&out).lambda, 5);

        // the center of P5 is avoided by a maximum matching; D there gives the
        // tree with alpha < beta, so sound mode must refuse it
        assert!(!is_essential(&Graph::path(5), 2).unwrap());
        assert!(apply_d(&Graph::path(5), 2, Mode::Sound).is_err());
        let bad = attach(&Graph::path(5), &Extension::D { anchor: 2, m: 5, a: 6, b: 7, c: 8, d: 9 }).unwrap();
        assert_eq!(params(&bad), params(&fixtures::ds10()));
    }

    #[test]
    fn a_constructions() {
        let two_k1 = Graph::empty(2);
        let out = apply_a_fresh(&two_k1, &[0, 1], AVariant::A1).unwrap();
        assert_eq!(out.vertex_count(), 5);
        assert!(out.is_tree());
        assert_eq!(params(&out), ParamSet { beta: 1, lambda: 2, alpha: 1, big_l: 1 });

        let out = apply_a_fresh(&Graph::path(2), &[0], AVariant::A2).unwrap();
        assert_eq!(out.vertex_count(), 6);
        let p = params(&out);
        assert_eq!((p.beta, p.alpha, p.big_l), (3, 3, 1));
    }

    #[test]
    fn a_structure_errors() {
        let two_k2 = Graph::from_edges(4, &[(0, 1), (2, 3)]);
        assert_eq!(apply_a_fresh(&two_k2, &[0, 0], AVariant::A1), Err(OpsError::DuplicateAnchor(0)));
        assert_eq!(apply_a_fresh(&two_k2, &[0, 1], AVariant::A1), Err(OpsError::SharedComponent(0, 1)));
        assert_eq!(apply_a_fresh(&two_k2, &[0], AVariant::A1), Err(OpsError::UncoveredComponent(2)));
        assert_eq!(apply_a_fresh(&two_k2, &[], AVariant::A1), Err(OpsError::NoAnchors));
        let g = apply_a(&two_k2, 9, AGadget::TwoLeaves { w: 3, x: 10 }, &[0, 2], true);
        assert_eq!(g, Err(OpsError::IdCollision(3)));
    }

    #[test]
    fn replay_examples() {
        let c = Certificate::parse("(B 0 1 2 (seed1 0))").unwrap();
        assert_eq!(replay(&c, Mode::Strict).unwrap(), Graph::path(3));
        let c = Certificate::parse("(B 2 1 0 (B 2 3 4 (seed1 2)))").unwrap();
        assert_eq!(replay(&c, Mode::Strict).unwrap(), Graph::path(5));
        let reused = Certificate::parse("(B 0 1 0 (seed1 0))").unwrap();
        assert_eq!(replay(&reused, Mode::Strict).unwrap_err().error, OpsError::IdCollision(0));
        let missing = Certificate::parse("(B 7 1 2 (seed1 0))").unwrap();
        assert_eq!(replay(&missing, Mode::Strict).unwrap_err().error, OpsError::MissingVertex(7));
    }

    #[test]
    fn replay_reports_failing_step_path() {
        // B at the middle of P3 is not applicable
        let c = Certificate::parse("(B 1 3 4 (B 0 1 2 (seed1 0)))").unwrap();
        let err = replay(&c, Mode::Strict).unwrap_err();
        assert_eq!(err.path, "B@1");
        assert!(matches!(err.error, OpsError::NotApplicable { op: "B", vertex: 1, .. }));
        let (g, log) = replay_logged(&c, Mode::Strict);
        assert!(g.is_ok());
        assert_eq!(log.len(), 2);
        assert!(log[0].strict_ok);
        assert!(!log[1].strict_ok);
    }

    #[test]
    fn replay_join_paths() {
        let c = Certificate::parse("(A1 4 ((0 (seed1 0)) (1 (B 1 2 3 (seed1 1)))) (5 6))").unwrap();
        let g = replay(&c, Mode::Strict).unwrap();
        assert!(g.is_tree());
        assert_eq!(g.vertex_count(), 7);
        let clash = Certificate::parse("(A1 4 ((0 (seed1 0)) (1 (seed2 1 0))) (5 6))").unwrap();
        let err = replay(&clash, Mode::Strict).unwrap_err();
        assert_eq!(err.path, "A1@4[1]");
        assert_eq!(err.error, OpsError::IdCollision(0));
        let deep = Certificate::parse("(A1 4 ((0 (seed1 0)) (1 (B 2 8 9 (seed1 1)))) (5 6))").unwrap();
        let err = replay(&deep, Mode::Strict).unwrap_err();
        assert_eq!(err.path, "A1@4[1]/B@2");
    }
}

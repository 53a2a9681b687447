//! Decomposition of a tree into seeds and operations, or a witness that no
//! such decomposition exists.
//!
//! Each reduction removes a small configuration near the leaves and records
//! the operation that puts it back. After every reduction the equality
//! `lambda = beta + L` is recomputed on the pieces, so a reduction that
//! breaks it is reported instead of silently producing a bad certificate.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cert::{AGadget, BuildStep, Certificate, Extension};
use crate::graph::{leaf_stratification, pendant_path, Edge, Graph, LeafStratification, PendantPath, Vertex};
use crate::matching::{Matching, MatchingPair, ParamSet};
use crate::ops::{self, Mode, StepCheck};
use crate::treedp;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Rule {
    Base,
    PendantPath,
    TripleLeg,
    SplitA,
    TwoLegB,
    LeafD,
    TwinD,
    Case1C,
    Case2aD,
    Case2bC,
    PathP3,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReductionStep {
    pub rule: Rule,
    pub removed: BTreeSet<Vertex>,
    pub anchor: Vertex,
    pub build: BuildStep,
}

impl fmt::Display for ReductionStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} at {} removing {:?} ({})", self.rule, self.anchor, self.removed, self.build.name())
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DecomposeError {
    #[error("input is not a tree")]
    NotATree,
    #[error("internal consistency failure: {message}")]
    Internal { message: String, trace: Vec<String> },
}

/// Evidence that `alpha < beta`: the optimal pair beats every maximum
/// matching's best residual.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub beta: usize,
    pub lambda: usize,
    pub alpha: usize,
    #[serde(rename = "L")]
    pub big_l: usize,
    pub pair: [Vec<[Vertex; 2]>; 2],
    #[serde(rename = "maxMatching")]
    pub max_matching: Vec<[Vertex; 2]>,
}

fn to_matching(pairs: &[[Vertex; 2]]) -> Option<Matching> {
    pairs
        .iter()
        .map(|&[a, b]| (a != b).then(|| Edge::new(a, b)))
        .collect::<Option<Vec<_>>>()
        .map(Matching::new)
}

impl Witness {
    pub fn params(&self) -> ParamSet {
        ParamSet { beta: self.beta, lambda: self.lambda, alpha: self.alpha, big_l: self.big_l }
    }

    /// Checks the witness against `g`: the pair is a disjoint pair of
    /// matchings of total `lambda`, the matching is maximum with residual
    /// `L`, and `lambda > beta + L`.
    pub fn validate(&self, g: &Graph) -> Result<(), String> {
        let (h1, h2, f) = match (to_matching(&self.pair[0]), to_matching(&self.pair[1]), to_matching(&self.max_matching)) {
            (Some(a), Some(b), Some(c)) => (a, b, c),
            _ => return Err("loop in an edge list".into()),
        };
        let pair = MatchingPair { first: h1, second: h2 };
        if !pair.is_valid_in(g) {
            return Err("pair is not two edge-disjoint matchings of the graph".into());
        }
        if pair.total() != self.lambda {
            return Err(format!("pair has {} edges, lambda is {}", pair.total(), self.lambda));
        }
        if !f.is_valid_in(g) || f.len() != self.beta {
            return Err("matching is not a maximum matching of the graph".into());
        }
        let beta = treedp::beta_forest(g).map_err(|e| e.to_string())?;
        if beta != self.beta {
            return Err(format!("beta is {beta}, witness claims {}", self.beta));
        }
        let residual = treedp::beta_forest(&g.without_edges(f.edges())).map_err(|e| e.to_string())?;
        if residual != self.big_l {
            return Err(format!("residual matching number is {residual}, witness claims L = {}", self.big_l));
        }
        if self.lambda <= self.beta + self.big_l {
            return Err("lambda does not exceed beta + L".into());
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CertifiedTree {
    pub cert: Certificate,
    /// Steps that pass only at the sound level.
    pub warnings: Vec<String>,
    pub trace: Vec<ReductionStep>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Decomposition {
    Certificate(CertifiedTree),
    Witness(Witness),
}

impl Decomposition {
    pub fn is_equal(&self) -> bool {
        matches!(self, Decomposition::Certificate(_))
    }
}

/// Pendant paths of length at most two at `v` through strictly lower
/// neighbors, ordered by first vertex.
fn lower_paths(g: &Graph, k: &LeafStratification, v: Vertex) -> Vec<PendantPath> {
    g.neighbors(v).filter(|&w| k.of(w) < k.of(v)).filter_map(|w| pendant_path(g, v, w, 2)).collect()
}

fn legs_at(g: &Graph, v: Vertex) -> Vec<PendantPath> {
    g.neighbors(v).filter_map(|w| pendant_path(g, v, w, 2)).filter(|p| p.len() == 2).collect()
}

fn ext_step(rule: Rule, removed: &[Vertex], ext: Extension) -> ReductionStep {
    ReductionStep { rule, removed: removed.iter().copied().collect(), anchor: ext.anchor(), build: BuildStep::Extend(ext) }
}

fn rule_pendant_path(g: &Graph) -> Option<ReductionStep> {
    for u0 in g.vertices().filter(|&x| g.degree(x) == 1) {
        let u1 = g.neighbors(u0).next().unwrap();
        if g.degree(u1) != 2 {
            continue;
        }
        let u2 = g.neighbors(u1).find(|&x| x != u0).unwrap();
        if g.degree(u2) == 2 {
            return Some(ext_step(Rule::PendantPath, &[u0, u1], Extension::B { anchor: u2, w: u1, w2: u0 }));
        }
    }
    None
}

fn rule_triple_leg(g: &Graph) -> Option<ReductionStep> {
    g.vertices().find_map(|u2| {
        let legs = legs_at(g, u2);
        (legs.len() >= 3).then(|| {
            let (w, w2) = (legs[0].first(), legs[0].terminal());
            ext_step(Rule::TripleLeg, &[w, w2], Extension::B { anchor: u2, w, w2 })
        })
    })
}

fn rule_split_a(g: &Graph, k: &LeafStratification, candidates: &[Vertex]) -> Option<ReductionStep> {
    for &v in candidates {
        let paths = lower_paths(g, k, v);
        let Some(p1) = paths.iter().find(|p| p.len() == 1) else { continue };
        let p2 = paths
            .iter()
            .filter(|p| p.first() != p1.first())
            .max_by_key(|p| (p.len(), std::cmp::Reverse(p.first())));
        let Some(p2) = p2 else { continue };
        let gadget = match p2.len() {
            1 => AGadget::TwoLeaves { w: p1.first(), x: p2.first() },
            _ => AGadget::LeafAndLeg { x: p1.first(), w: p2.first(), w2: p2.terminal() },
        };
        let used: BTreeSet<Vertex> = p1.vertices.iter().chain(&p2.vertices).copied().chain([v]).collect();
        let anchors: Vec<Vertex> = g.neighbors(v).filter(|x| !used.contains(x)).collect();
        let rule = Rule::SplitA;
        return Some(ReductionStep { rule, removed: used, anchor: v, build: BuildStep::Join { hub: v, gadget, anchors } });
    }
    None
}

fn rule_two_legs(g: &Graph, k: &LeafStratification, candidates: &[Vertex]) -> Result<ReductionStep, String> {
    let mut best: Option<(usize, Vertex, Vertex)> = None;
    for &v in candidates {
        let mut up = g.neighbors(v).filter(|&x| k.of(x) > k.of(v));
        let (Some(vp), None) = (up.next(), up.next()) else { continue };
        if best.is_none_or(|(kb, vb, _)| (k.of(vp), v) < (kb, vb)) {
            best = Some((k.of(vp), v, vp));
        }
    }
    let Some((_, v, vp)) = best else {
        return Err("no vertex of minimal level has a unique higher neighbor".into());
    };
    let legs: Vec<PendantPath> = lower_paths(g, k, v).into_iter().filter(|p| p.len() == 2).collect();
    if legs.len() != 2 || g.degree(v) != 3 {
        return Err(format!("vertex {v} does not carry exactly two legs and one higher neighbor"));
    }
    let (x1, y1, x2, y2) = (legs[0].first(), legs[0].terminal(), legs[1].first(), legs[1].terminal());
    let d_step = |rule| ext_step(rule, &[v, x1, y1, x2, y2], Extension::D { anchor: vp, m: v, a: x1, b: y1, c: x2, d: y2 });
    let c_step = |rule| ext_step(rule, &[x1, y1, x2, y2], Extension::C { anchor: v, a: x1, b: y1, c: x2, d: y2 });

    if g.degree(vp) == 2 {
        return Ok(ext_step(Rule::TwoLegB, &[x1, y1], Extension::B { anchor: v, w: x1, w2: y1 }));
    }
    if g.neighbors(vp).any(|u| g.degree(u) == 1) {
        return Ok(d_step(Rule::LeafD));
    }
    if g.neighbors(vp).any(|u| u != v && g.degree(u) >= 3 && k.of(u) == k.of(v)) {
        return Ok(d_step(Rule::TwinD));
    }
    match legs_at(g, vp).len() {
        2 => Ok(c_step(Rule::Case1C)),
        1 => {
            let special = treedp::exists_special_max_matching(g, Edge::new(v, vp)).map_err(|e| e.to_string())?;
            Ok(if special { c_step(Rule::Case2bC) } else { d_step(Rule::Case2aD) })
        }
        r => Err(format!("neighbor {vp} of {v} carries {r} legs")),
    }
}

/// One reduction of a tree with at least one edge and `lambda = beta + L`.
pub fn reduce_once(g: &Graph) -> Result<(ReductionStep, Graph), DecomposeError> {
    let internal = |message: String| DecomposeError::Internal { message, trace: Vec::new() };
    if !g.is_tree() {
        return Err(DecomposeError::NotATree);
    }
    let step = if g.edge_count() <= 1 {
        return Err(internal("base case has nothing to reduce".into()));
    } else if g.edge_count() == 2 {
        let leaf = g.vertices().find(|&x| g.degree(x) == 1).unwrap();
        let mid = g.neighbors(leaf).next().unwrap();
        let far = g.neighbors(mid).find(|&x| x != leaf).unwrap();
        ext_step(Rule::PathP3, &[mid, far], Extension::B { anchor: leaf, w: mid, w2: far })
    } else if let Some(s) = rule_pendant_path(g).or_else(|| rule_triple_leg(g)) {
        s
    } else {
        let k = leaf_stratification(g).map_err(|_| DecomposeError::NotATree)?;
        let branching: Vec<Vertex> = g.vertices().filter(|&x| g.degree(x) >= 3).collect();
        let min_level = branching.iter().map(|&x| k.of(x)).min().ok_or_else(|| internal("path with no pendant rule".into()))?;
        let candidates: Vec<Vertex> = branching.into_iter().filter(|&x| k.of(x) == min_level).collect();
        match rule_split_a(g, &k, &candidates) {
            Some(s) => s,
            None => rule_two_legs(g, &k, &candidates).map_err(internal)?,
        }
    };
    let reduced = g.without_vertices(step.removed.iter().copied());
    Ok((step, reduced))
}

fn seed_for(g: &Graph) -> Option<Certificate> {
    let vs: Vec<Vertex> = g.vertices().collect();
    match (vs.as_slice(), g.edge_count()) {
        ([v], 0) => Some(Certificate::Seed1(*v)),
        ([u, v], 1) => Some(Certificate::Seed2(*u, *v)),
        _ => None,
    }
}

enum Plan {
    Seed(Certificate),
    Extend(Extension, usize),
    Join { hub: Vertex, gadget: AGadget, parts: Vec<(Vertex, usize)> },
}

fn best_pair(g: &Graph) -> MatchingPair {
    treedp::optimal_pair(g).expect("tree")
}

fn witness(g: &Graph, params: ParamSet) -> Witness {
    let pair = best_pair(g);
    let special = treedp::special_max_matching(g).expect("tree");
    Witness {
        beta: params.beta,
        lambda: params.lambda,
        alpha: params.alpha,
        big_l: params.big_l,
        pair: [pair.first.as_pairs(), pair.second.as_pairs()],
        max_matching: special.first.as_pairs(),
    }
}

/// Certificate when `lambda = beta + L`, witness otherwise.
pub fn decompose(g: &Graph) -> Result<Decomposition, DecomposeError> {
    if !g.is_tree() {
        return Err(DecomposeError::NotATree);
    }
    let params = treedp::params_tree(g).map_err(|_| DecomposeError::NotATree)?;
    if !params.is_equal() {
        return Ok(Decomposition::Witness(witness(g, params)));
    }

    let mut plans: Vec<Option<Plan>> = vec![None];
    let mut work: Vec<(usize, Graph)> = vec![(0, g.clone())];
    let mut trace = Vec::new();
    let mut warnings = Vec::new();
    let fail = |message: String, trace: &[ReductionStep]| DecomposeError::Internal {
        message,
        trace: trace.iter().map(|s| s.to_string()).collect(),
    };

    while let Some((slot, tree)) = work.pop() {
        if let Some(seed) = seed_for(&tree) {
            plans[slot] = Some(Plan::Seed(seed));
            continue;
        }
        let (step, reduced) = reduce_once(&tree).map_err(|e| match e {
            DecomposeError::Internal { message, .. } => fail(message, &trace),
            other => other,
        })?;
        for part in reduced.component_graphs() {
            let p = treedp::params_tree(&part).map_err(|e| fail(e.to_string(), &trace))?;
            if !p.is_equal() {
                trace.push(step.clone());
                return Err(fail(format!("reduced component {part:?} has {p}"), &trace));
            }
        }
        match &step.build {
            BuildStep::Extend(ext) => {
                let check = |mode| ops::check_applicable(&reduced, ext, mode).map_err(|e| fail(e.to_string(), &trace));
                if let Some(reason) = check(Mode::Strict)? {
                    let sound = ext.name() == "D" && check(Mode::Sound)?.is_none();
                    if !sound {
                        trace.push(step.clone());
                        return Err(fail(format!("{} not applicable at {}: {reason}", ext.name(), ext.anchor()), &trace));
                    }
                    warnings.push(format!("{} at {} holds only at the sound level: {reason}", ext.name(), ext.anchor()));
                }
                let child = plans.len();
                plans.push(None);
                plans[slot] = Some(Plan::Extend(ext.clone(), child));
                work.push((child, reduced));
            }
            BuildStep::Join { hub, gadget, anchors } => {
                let mut parts = Vec::new();
                let comps = reduced.components();
                for &a in anchors {
                    let comp = comps.iter().find(|c| c.contains(&a)).unwrap();
                    let child = plans.len();
                    plans.push(None);
                    parts.push((a, child));
                    work.push((child, reduced.induced(comp)));
                }
                plans[slot] = Some(Plan::Join { hub: *hub, gadget: gadget.clone(), parts });
            }
            BuildStep::Seed1(_) | BuildStep::Seed2(..) => unreachable!("reductions never record seeds"),
        }
        trace.push(step);
    }

    // children always have larger slots than their parents
    let mut built: Vec<Option<Certificate>> = vec![None; plans.len()];
    for slot in (0..plans.len()).rev() {
        let cert = match plans[slot].take().unwrap() {
            Plan::Seed(c) => c,
            Plan::Extend(ext, child) => Certificate::extend(ext, built[child].take().unwrap()),
            Plan::Join { hub, gadget, parts } => Certificate::Join {
                hub,
                gadget,
                parts: parts.into_iter().map(|(a, c)| (a, built[c].take().unwrap())).collect(),
            },
        };
        built[slot] = Some(cert);
    }
    let cert = built[0].take().unwrap();
    Ok(Decomposition::Certificate(CertifiedTree { cert, warnings, trace }))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerifyReport {
    pub mode: Mode,
    pub steps: Vec<StepCheck>,
    /// Structural replay failure, if any.
    pub replay_error: Option<String>,
    pub graph_matches: bool,
    pub equality_holds: bool,
}

impl VerifyReport {
    pub fn strict_passes(&self) -> usize {
        self.steps.iter().filter(|s| s.strict_ok).count()
    }

    pub fn failed_steps(&self) -> impl Iterator<Item = &StepCheck> {
        self.steps.iter().filter(|s| !s.ok_at(self.mode))
    }

    pub fn passed(&self) -> bool {
        self.replay_error.is_none() && self.graph_matches && self.equality_holds && self.failed_steps().next().is_none()
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.steps {
            let status = if s.ok_at(self.mode) { "ok" } else { "FAIL" };
            write!(f, "{status} {} (strict={})", s.path, s.strict_ok)?;
            if let Some(r) = s.reason.as_deref() {
                write!(f, ": {r}")?;
            }
            writeln!(f)?;
        }
        if let Some(e) = &self.replay_error {
            writeln!(f, "replay error: {e}")?;
        }
        writeln!(f, "graph matches: {}", self.graph_matches)?;
        writeln!(f, "equality holds: {}", self.equality_holds)?;
        write!(f, "{} ({} mode)", if self.passed() { "PASS" } else { "FAIL" }, self.mode)
    }
}

/// Replays `cert` and compares it with `g`, recording every step.
pub fn verify(g: &Graph, cert: &Certificate, mode: Mode) -> VerifyReport {
    let (built, steps) = ops::replay_logged(cert, mode);
    let (replay_error, graph_matches, equality_holds) = match built {
        Ok(h) => {
            let eq = treedp::params_tree(&h).map(|p| p.is_equal()).unwrap_or(false);
            (None, &h == g, eq)
        }
        Err(e) => (Some(e.to_string()), false, false),
    };
    VerifyReport { mode, steps, replay_error, graph_matches, equality_holds }
}

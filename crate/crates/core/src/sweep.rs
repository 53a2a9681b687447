//! Exhaustive checks over all small trees: parameter agreement between the
//! oracle and the tree program, the structural identities for bridges and
//! double legs, and the decomposition in both directions.

use std::fmt::{self, Write as _};

use rayon::prelude::*;

use crate::decompose::{decompose, verify, Decomposition};
use crate::gen::{enumerate_trees, GenError};
use crate::graph::{double_leg_configs, split_at_bridge, Edge, Graph};
use crate::matching::ParamSet;
use crate::ops::{self, Mode};
use crate::oracle::{Oracle, OracleError};
use crate::treedp;

/// Number of instances examined and the violations found.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Tally {
    pub checked: usize,
    pub violations: Vec<String>,
}

impl Tally {
    fn check(&mut self, ok: bool, msg: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.violations.push(msg());
        }
    }

    fn absorb(&mut self, other: Tally) {
        self.checked += other.checked;
        self.violations.extend(other.violations);
    }
}

fn pendant_edges(g: &Graph) -> Vec<Edge> {
    g.edges().filter(|e| g.degree(e.u()) == 1 || g.degree(e.v()) == 1).collect()
}

/// Every pendant edge lies in the first matching of some optimal pair
/// reaching `alpha`, and in some maximum matching reaching `L`.
pub fn pendant(g: &Graph, o: &Oracle) -> Result<Tally, OracleError> {
    let mut t = Tally::default();
    for e in pendant_edges(g) {
        let pair = o.exists_optimal_pair_containing(g, e)?;
        t.check(pair, || format!("{g:?}: pendant edge {e} avoids every alpha-optimal pair"));
        let special = o.exists_special_max_matching(g, e)?;
        t.check(special, || format!("{g:?}: pendant edge {e} avoids every L-optimal maximum matching"));
    }
    Ok(t)
}

/// Removing a double leg `u0..u4` drops `lambda` by exactly four and
/// `alpha` by at least two.
pub fn double_leg(g: &Graph, o: &Oracle) -> Result<Tally, OracleError> {
    let mut t = Tally::default();
    let p = o.params(g)?;
    for u in double_leg_configs(g) {
        let q = o.params(&g.without_vertices(u))?;
        t.check(p.lambda == q.lambda + 4 && p.alpha >= q.alpha + 2, || {
            format!("{g:?}: double leg {u:?} gives {p} against remainder {q}")
        });
    }
    Ok(t)
}

/// Tallies for the two bridge identities on a tree.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BridgeTallies {
    /// `lambda(G) >= lambda(G1e) + lambda(G2e) - 1` on every edge.
    pub lambda_bound: Tally,
    /// `L(G) = L(G1e) + L(G2e)` on edges lying in some maximum matching
    /// that reaches `L`.
    pub l_additive: Tally,
    /// The same identity on every edge, with no condition.
    pub l_additive_all: Tally,
}

pub fn bridge_identities(g: &Graph, o: &Oracle) -> Result<BridgeTallies, OracleError> {
    let mut t = BridgeTallies::default();
    let p = o.params(g)?;
    for e in g.edges() {
        let s = split_at_bridge(g, e).expect("tree edges are bridges");
        let (a, b) = (o.params(&s.g1e)?, o.params(&s.g2e)?);
        t.lambda_bound.check(p.lambda + 1 >= a.lambda + b.lambda, || {
            format!("{g:?}: edge {e} has lambda {} below {} + {} - 1", p.lambda, a.lambda, b.lambda)
        });
        let additive = p.big_l == a.big_l + b.big_l;
        let msg = || format!("{g:?}: edge {e} has L {} but sides give {} + {}", p.big_l, a.big_l, b.big_l);
        t.l_additive_all.check(additive, msg);
        if o.exists_special_max_matching(g, e)? {
            t.l_additive.check(additive, msg);
        }
    }
    Ok(t)
}

/// Trees where every edge is in some maximum matching have `alpha = beta`.
pub fn matching_covered(g: &Graph, o: &Oracle) -> Result<Tally, OracleError> {
    let mut t = Tally::default();
    let beta = o.beta(g)?;
    let maxima: Vec<_> = o.enumerate_matchings(g)?.into_iter().filter(|m| m.len() == beta).collect();
    let covered = g.edges().all(|e| maxima.iter().any(|m| m.contains(e)));
    if covered && g.edge_count() > 0 {
        let p = o.params(g)?;
        t.check(p.alpha_equals_beta(), || format!("{g:?}: matching covered but {p}"));
    }
    Ok(t)
}

/// The oracle's view of the equivalence: `alpha = beta` exactly when
/// `lambda = beta + L`, and `lambda >= beta + L` always.
pub fn equivalence(p: &ParamSet) -> bool {
    p.alpha_equals_beta() == p.is_equal() && p.lambda >= p.beta + p.big_l
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LemmaReport {
    pub pendant: Tally,
    pub double_leg: Tally,
    pub lambda_bound: Tally,
    pub l_additive: Tally,
    pub matching_covered: Tally,
    /// Unconditional L additivity; informational, not a violation.
    pub l_additive_all_edges: Tally,
}

impl LemmaReport {
    fn absorb(&mut self, other: LemmaReport) {
        self.pendant.absorb(other.pendant);
        self.double_leg.absorb(other.double_leg);
        self.lambda_bound.absorb(other.lambda_bound);
        self.l_additive.absorb(other.l_additive);
        self.matching_covered.absorb(other.matching_covered);
        self.l_additive_all_edges.absorb(other.l_additive_all_edges);
    }

    pub fn rows(&self) -> [(&'static str, &Tally); 5] {
        [
            ("pendant-edge membership", &self.pendant),
            ("double-leg removal", &self.double_leg),
            ("bridge lambda bound", &self.lambda_bound),
            ("bridge L additivity on L-optimal edges", &self.l_additive),
            ("matching-covered trees", &self.matching_covered),
        ]
    }

    pub fn violation_count(&self) -> usize {
        self.rows().iter().map(|(_, t)| t.violations.len()).sum()
    }
}

impl fmt::Display for LemmaReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (name, t) in self.rows() {
            writeln!(f, "{name}: {} checked, {} violations", t.checked, t.violations.len())?;
        }
        let all = &self.l_additive_all_edges;
        writeln!(f, "bridge L additivity on all edges (informational): {} checked, {} fail", all.checked, all.violations.len())
    }
}

pub fn lemmas_for(g: &Graph, o: &Oracle) -> Result<LemmaReport, OracleError> {
    let bridges = bridge_identities(g, o)?;
    Ok(LemmaReport {
        pendant: pendant(g, o)?,
        double_leg: double_leg(g, o)?,
        lambda_bound: bridges.lambda_bound,
        l_additive: bridges.l_additive,
        matching_covered: matching_covered(g, o)?,
        l_additive_all_edges: bridges.l_additive_all,
    })
}

/// Outcome of all checks on one tree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeCheck {
    pub equal: bool,
    pub strict_ok: bool,
    pub sound_warnings: usize,
    pub lemmas: LemmaReport,
    pub problems: Vec<String>,
}

pub fn check_tree(g: &Graph, o: &Oracle) -> Result<TreeCheck, OracleError> {
    let mut problems = Vec::new();
    let exact = o.params(g)?;
    let dp = treedp::params_tree(g).expect("enumerated graphs are trees");
    if exact != dp {
        problems.push(format!("oracle gives {exact}, tree program gives {dp}"));
    }
    if !equivalence(&exact) {
        problems.push(format!("alpha = beta disagrees with lambda = beta + L at {exact}"));
    }
    if !exact.within_ratio_bound() {
        problems.push(format!("ratio bound fails at {exact}"));
    }
    for e in g.edges() {
        let a = o.exists_special_max_matching(g, e)?;
        let b = treedp::exists_special_max_matching(g, e).expect("tree edge");
        if a != b {
            problems.push(format!("forced-edge query on {e}: oracle {a}, tree program {b}"));
        }
    }

    let (mut strict_ok, mut sound_warnings) = (false, 0);
    match decompose(g) {
        Err(e) => problems.push(format!("decompose failed: {e}")),
        Ok(Decomposition::Witness(w)) => {
            if exact.is_equal() {
                problems.push("witness returned for a tree with lambda = beta + L".into());
            }
            if let Err(e) = w.validate(g) {
                problems.push(format!("invalid witness: {e}"));
            }
        }
        Ok(Decomposition::Certificate(c)) => {
            if !exact.is_equal() {
                problems.push("certificate returned for a tree with lambda > beta + L".into());
            }
            match ops::replay(&c.cert, Mode::Sound) {
                Ok(h) if &h == g => {}
                Ok(_) => problems.push(format!("certificate {} replays to a different tree", c.cert)),
                Err(e) => problems.push(format!("certificate {} fails to replay: {e}", c.cert)),
            }
            let report = verify(g, &c.cert, Mode::Sound);
            if !report.passed() {
                problems.push(format!("sound verification failed for {}:\n{report}", c.cert));
            }
            strict_ok = verify(g, &c.cert, Mode::Strict).passed();
            sound_warnings = c.warnings.len();
        }
    }
    Ok(TreeCheck { equal: exact.is_equal(), strict_ok, sound_warnings, lemmas: lemmas_for(g, o)?, problems })
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SizeRow {
    pub n: usize,
    pub trees: usize,
    pub equal: usize,
    pub strict_pass: usize,
    pub sound_warnings: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Discrepancy {
    pub graph: Graph,
    pub problems: Vec<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SweepReport {
    pub rows: Vec<SizeRow>,
    pub lemmas: LemmaReport,
    /// In enumeration order, so the first entry is a smallest counterexample.
    pub discrepancies: Vec<Discrepancy>,
}

impl SweepReport {
    pub fn total_trees(&self) -> usize {
        self.rows.iter().map(|r| r.trees).sum()
    }

    pub fn total_equal(&self) -> usize {
        self.rows.iter().map(|r| r.equal).sum()
    }

    pub fn passed(&self) -> bool {
        self.discrepancies.is_empty() && self.lemmas.violation_count() == 0
    }

    /// A smallest tree with a problem or lemma violation.
    pub fn counterexample(&self) -> Option<&Graph> {
        self.discrepancies.first().map(|d| &d.graph)
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        writeln!(s, "{:>3} {:>6} {:>6} {:>10} {:>12} {:>10}", "n", "trees", "equal", "not_equal", "strict_pass", "sound_only").unwrap();
        for r in &self.rows {
            writeln!(
                s,
                "{:>3} {:>6} {:>6} {:>10} {:>12} {:>10}",
                r.n,
                r.trees,
                r.equal,
                r.trees - r.equal,
                r.strict_pass,
                r.sound_warnings
            )
            .unwrap();
        }
        writeln!(s, "total trees: {}, equal: {}", self.total_trees(), self.total_equal()).unwrap();
        write!(s, "{}", self.lemmas).unwrap();
        writeln!(s, "discrepancies: {}", self.discrepancies.len()).unwrap();
        for d in self.discrepancies.iter().take(5) {
            writeln!(s, "  {:?}", d.graph).unwrap();
            for p in &d.problems {
                writeln!(s, "    {p}").unwrap();
            }
        }
        s
    }
}

#[derive(Debug, thiserror::Error)]
pub enum SweepError {
    #[error(transparent)]
    Gen(#[from] GenError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
}

/// Runs [`check_tree`] on every free tree with at most `max_n` vertices.
/// The report does not depend on `parallel`.
pub fn sweep(max_n: usize, parallel: bool) -> Result<SweepReport, SweepError> {
    let trees: Vec<Graph> = enumerate_trees(max_n)?.collect();
    let o = Oracle::default();
    let checks: Vec<Result<TreeCheck, OracleError>> = if parallel {
        trees.par_iter().map(|g| check_tree(g, &o)).collect()
    } else {
        trees.iter().map(|g| check_tree(g, &o)).collect()
    };
    let mut report = SweepReport { rows: (1..=max_n).map(|n| SizeRow { n, ..SizeRow::default() }).collect(), ..Default::default() };
    for (g, check) in trees.into_iter().zip(checks) {
        let c = check?;
        let row = &mut report.rows[g.vertex_count() - 1];
        row.trees += 1;
        row.equal += usize::from(c.equal);
        row.strict_pass += usize::from(c.equal && c.strict_ok);
        row.sound_warnings += usize::from(c.sound_warnings > 0);
        let mut problems = c.problems;
        for (_, t) in c.lemmas.rows() {
            problems.extend(t.violations.iter().cloned());
        }
        report.lemmas.absorb(c.lemmas);
        if !problems.is_empty() {
            report.discrepancies.push(Discrepancy { graph: g, problems });
        }
    }
    Ok(report)
}

/// Lemma checks alone over all free trees up to `max_n`.
pub fn lemma_sweep(max_n: usize) -> Result<LemmaReport, SweepError> {
    let o = Oracle::default();
    let mut report = LemmaReport::default();
    for g in enumerate_trees(max_n)? {
        report.absorb(lemmas_for(&g, &o)?);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sweep_small() {
        let r = sweep(7, false).unwrap();
        assert_eq!(r.total_trees(), 25);
        assert!(r.passed(), "{}", r.render());
        assert_eq!(r, sweep(7, true).unwrap());
    }

    #[test]
    fn ds10_counted_not_equal() {
        let r = sweep(10, true).unwrap();
        assert_eq!(r.total_trees(), 201);
        assert!(r.passed(), "{}", r.render());
        assert!(r.rows[9].trees > r.rows[9].equal);
    }

    #[test]
    fn l_additivity_needs_an_optimal_edge() {
        // the middle edge of P4 is in no maximum matching; both sides are P3
        let t = bridge_identities(&Graph::path(4), &Oracle::default()).unwrap();
        assert_eq!(t.l_additive_all.violations.len(), 1);
        assert_eq!(t.l_additive.checked, 2);
        assert!(t.l_additive.violations.is_empty());
    }

    #[test]
    fn double_leg_on_p5() {
        let t = double_leg(&Graph::path(5), &Oracle::default()).unwrap();
        assert_eq!(t.checked, 2);
        assert!(t.violations.is_empty());
    }
}

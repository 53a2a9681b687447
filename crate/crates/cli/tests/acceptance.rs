//! Acceptance criteria, one line each. Runs as a plain binary so the lines
//! are always visible; exits nonzero if any criterion fails.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use matchpair_core::decompose::{decompose, verify, Decomposition};
use matchpair_core::fixtures;
use matchpair_core::gen::{enumerate_connected_graphs, enumerate_trees, random_certificate, random_forest, OpSet};
use matchpair_core::ops::{self, AVariant, Mode};
use matchpair_core::sweep::{bridge_identities, equivalence, pendant, double_leg, Tally};
use matchpair_core::{treedp, Extension, Graph, Oracle, ParamSet};

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict { pass, detail: detail.into() }
}

fn trees(n_max: usize) -> Vec<Graph> {
    enumerate_trees(n_max).unwrap().collect()
}

fn oracle(g: &Graph) -> ParamSet {
    Oracle::default().params(g).unwrap()
}

fn within(elapsed: Duration, limit_secs: u64) -> bool {
    elapsed <= Duration::from_secs(limit_secs)
}

fn oracle_dp_equivalence() -> Verdict {
    let start = Instant::now();
    let all = trees(10);
    let mismatches = all.iter().filter(|g| treedp::params_tree(g).unwrap() != oracle(g)).count();
    let t = start.elapsed();
    verdict(
        all.len() == 201 && mismatches == 0 && within(t, 60),
        format!("{} trees, {mismatches} mismatches, {t:.2?}", all.len()),
    )
}

fn equivalence_identity() -> Verdict {
    let start = Instant::now();
    let all = trees(10);
    let bad = all.iter().filter(|g| !equivalence(&oracle(g))).count();
    let unequal = all.iter().filter(|g| !oracle(g).alpha_equals_beta()).count();
    let t = start.elapsed();
    verdict(
        all.len() == 201 && bad == 0 && within(t, 60),
        format!("{} trees, {unequal} with alpha < beta, {bad} violations, {t:.2?}", all.len()),
    )
}

fn ratio_bound() -> Verdict {
    let start = Instant::now();
    let graphs = enumerate_connected_graphs(7).unwrap();
    let bad_graphs = graphs.iter().filter(|g| !oracle(g).within_ratio_bound()).count();
    let bad_trees = trees(10).iter().filter(|g| !oracle(g).within_ratio_bound()).count();
    let t = start.elapsed();
    verdict(
        graphs.len() == 996 && bad_graphs + bad_trees == 0 && within(t, 300),
        format!("{} connected graphs, 201 trees, {} violations, {t:.2?}", graphs.len(), bad_graphs + bad_trees),
    )
}

fn lemma_suite() -> Verdict {
    let start = Instant::now();
    let o = Oracle::default();
    let (mut l1, mut l2, mut l4, mut l5, mut l5_opt) =
        (Tally::default(), Tally::default(), Tally::default(), Tally::default(), Tally::default());
    let add = |into: &mut Tally, t: Tally| {
        into.checked += t.checked;
        into.violations.extend(t.violations);
    };
    for g in trees(10) {
        if g.vertex_count() <= 9 {
            add(&mut l1, pendant(&g, &o).unwrap());
        }
        add(&mut l2, double_leg(&g, &o).unwrap());
        let b = bridge_identities(&g, &o).unwrap();
        add(&mut l4, b.lambda_bound);
        add(&mut l5, b.l_additive_all);
        add(&mut l5_opt, b.l_additive);
    }
    let t = start.elapsed();
    let bad = |x: &Tally| x.violations.len();
    let mut detail = format!(
        "pendant {}/{} ok, double-leg {}/{} ok, lambda bound {}/{} ok, L additivity {}/{} ok",
        l1.checked - bad(&l1),
        l1.checked,
        l2.checked - bad(&l2),
        l2.checked,
        l4.checked - bad(&l4),
        l4.checked,
        l5.checked - bad(&l5),
        l5.checked,
    );
    if bad(&l5) > 0 {
        detail += &format!(
            " (holds on all {} edges of some L-optimal maximum matching {}; first failure: {})",
            l5_opt.checked,
            if bad(&l5_opt) == 0 { "without exception" } else { "with exceptions" },
            l5.violations[0]
        );
    }
    detail += &format!(", {t:.2?}");
    verdict(bad(&l1) + bad(&l2) + bad(&l4) + bad(&l5) == 0 && within(t, 300), detail)
}

fn operation_algebra() -> Verdict {
    let mut a_bad = 0;
    for seed in 0..200 {
        let (forest, anchors) = random_forest(12, seed).unwrap();
        let p = oracle(&forest);
        let a1 = oracle(&ops::apply_a_fresh(&forest, &anchors, AVariant::A1).unwrap());
        let a2 = oracle(&ops::apply_a_fresh(&forest, &anchors, AVariant::A2).unwrap());
        let ok1 = (a1.alpha, a1.beta, a1.big_l) == (p.alpha + 1, p.beta + 1, p.big_l + 1);
        let ok2 = (a2.alpha, a2.beta, a2.big_l) == (p.alpha + 2, p.beta + 2, p.big_l + 1);
        a_bad += usize::from(!ok1) + usize::from(!ok2);
    }
    let (mut sites, mut d_lambda_bad, mut d_beta_bad, mut b_bad) = (0, 0, 0, 0);
    let mut first_beta_failure = None;
    for g in trees(8) {
        let p = oracle(&g);
        for v in g.vertices() {
            sites += 1;
            let m = g.next_free_id();
            let d = oracle(&ops::attach(&g, &Extension::D { anchor: v, m, a: m + 1, b: m + 2, c: m + 3, d: m + 4 }).unwrap());
            d_lambda_bad += usize::from(d.lambda != p.lambda + 4);
            if d.beta != p.beta + 2 {
                d_beta_bad += 1;
                first_beta_failure.get_or_insert_with(|| format!("{g:?} at {v}: beta {} -> {}", p.beta, d.beta));
            }
            let b = oracle(&ops::attach(&g, &Extension::B { anchor: v, w: m, w2: m + 1 }).unwrap());
            b_bad += usize::from(b.beta != p.beta + 1);
        }
    }
    let mut detail = format!(
        "A1/A2 algebra {a_bad} failures on 200 forests; D over {sites} tree vertices: lambda+4 fails {d_lambda_bad}, \
         beta+2 fails {d_beta_bad}; B beta+1 fails {b_bad}"
    );
    if let Some(f) = first_beta_failure {
        detail += &format!(" (beta+2 needs a vertex covered by every maximum matching; first failure: {f})");
    }
    verdict(a_bad + d_lambda_bad + d_beta_bad + b_bad == 0, detail)
}

fn decomposition_exhaustive() -> Verdict {
    let start = Instant::now();
    let all = trees(12);
    let (mut certs, mut witnesses, mut problems) = (0, 0, Vec::new());
    for g in &all {
        let truth = oracle(g).is_equal();
        match decompose(g) {
            Ok(Decomposition::Certificate(c)) => {
                certs += 1;
                let exact = ops::replay(&c.cert, Mode::Sound).map(|h| &h == g).unwrap_or(false);
                if !truth || !exact || !verify(g, &c.cert, Mode::Sound).passed() {
                    problems.push(format!("{g:?}"));
                }
            }
            Ok(Decomposition::Witness(w)) => {
                witnesses += 1;
                if truth || w.validate(g).is_err() {
                    problems.push(format!("{g:?}"));
                }
            }
            Err(e) => problems.push(format!("{g:?}: {e}")),
        }
    }
    let ds10 = match decompose(&fixtures::ds10()) {
        Ok(Decomposition::Witness(w)) => w.params() == ParamSet { beta: 5, lambda: 8, alpha: 4, big_l: 2 },
        _ => false,
    };
    let t = start.elapsed();
    verdict(
        all.len() == 987 && problems.is_empty() && ds10 && within(t, 600),
        format!(
            "{} trees: {certs} certificates, {witnesses} witnesses, {} problems, DS10 rejected as (5,8,4,2): {ds10}, {t:.2?}",
            all.len(),
            problems.len()
        ),
    )
}

fn generator_soundness() -> Verdict {
    let start = Instant::now();
    let (mut bad, mut largest, mut over_130) = (0, 0, 0);
    for seed in 0..1000u64 {
        let steps = (seed % 41) as usize;
        let cert = random_certificate(steps, seed, OpSet::ALL).unwrap();
        match ops::replay(&cert, Mode::Strict) {
            Ok(g) => {
                largest = largest.max(g.vertex_count());
                over_130 += usize::from(g.vertex_count() > 130);
                bad += usize::from(!treedp::params_tree(&g).unwrap().is_equal());
            }
            Err(_) => bad += 1,
        }
    }
    let t = start.elapsed();
    verdict(
        bad == 0 && within(t, 120),
        format!("1000 certificates up to 40 steps, largest tree {largest} vertices ({over_130} above 130), {bad} failures, {t:.2?}"),
    )
}

fn run_bin(args: &[&str]) -> Vec<u8> {
    let out = Command::new(env!("CARGO_BIN_EXE_matchpair")).args(args).output().expect("binary runs");
    assert!(out.status.success(), "{args:?} exited with {}", out.status);
    out.stdout
}

fn determinism() -> Verdict {
    let sweep_a = run_bin(&["sweep", "--max-n", "10"]);
    let sweep_b = run_bin(&["sweep", "--max-n", "10"]);
    let dir = tempfile::tempdir().unwrap();
    let files = |name: &str| {
        let prefix = dir.path().join(name);
        run_bin(&["generate", "--seed", "7", "--steps", "25", "-o", prefix.to_str().unwrap()]);
        let read = |ext: &str| std::fs::read(dir.path().join(format!("{name}.{ext}"))).unwrap();
        (read("graph"), read("cert"))
    };
    let (g1, c1) = files("first");
    let (g2, c2) = files("second");
    let sweep_same = sweep_a == sweep_b;
    let gen_same = g1 == g2 && c1 == c2;
    verdict(sweep_same && gen_same, format!("sweep reports identical: {sweep_same}, generated files identical: {gen_same}"))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Verdict); 8] = [
        ("oracle and tree program agree", oracle_dp_equivalence),
        ("alpha = beta iff lambda = beta + L", equivalence_identity),
        ("ratio bound", ratio_bound),
        ("lemma suite", lemma_suite),
        ("operation algebra", operation_algebra),
        ("decomposition, both directions", decomposition_exhaustive),
        ("generator soundness", generator_soundness),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let v = run();
        failed += usize::from(!v.pass);
        println!("criterion {} {name}: {} ({})", i + 1, if v.pass { "PASS" } else { "FAIL" }, v.detail);
    }
    println!("{} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

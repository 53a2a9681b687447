//! Exhaustive checks of the four operations against the brute-force oracle.

use matchpair_core::cert::{AGadget, Extension};
use matchpair_core::gen::{enumerate_trees, random_forest};
use matchpair_core::ops::{self, AVariant, Mode};
use matchpair_core::{Graph, Oracle, ParamSet, Vertex};

fn params(g: &Graph) -> ParamSet {
    Oracle::default().params(g).unwrap()
}

fn trees(n_max: usize) -> Vec<Graph> {
    enumerate_trees(n_max).unwrap().collect()
}

fn fresh_d(g: &Graph, v: Vertex) -> Extension {
    let m = g.next_free_id();
    Extension::D { anchor: v, m, a: m + 1, b: m + 2, c: m + 3, d: m + 4 }
}

#[test]
fn strict_applications_preserve_equality() {
    for g in trees(8) {
        let equal = params(&g).alpha_equals_beta();
        for v in g.vertices() {
            for out in [ops::apply_b(&g, v, Mode::Strict), ops::apply_c(&g, v, Mode::Strict), ops::apply_d(&g, v, Mode::Strict)]
                .into_iter()
                .flatten()
            {
                assert!(out.is_tree());
                if equal {
                    assert!(params(&out).alpha_equals_beta(), "{g:?} at {v} gives {out:?}");
                }
            }
        }
    }
}

#[test]
fn b_preserves_inequality() {
    let mut seen = 0;
    for g in trees(11) {
        if params(&g).alpha_equals_beta() {
            continue;
        }
        for v in g.vertices() {
            if let Ok(out) = ops::apply_b(&g, v, Mode::Strict) {
                seen += 1;
                assert!(!params(&out).alpha_equals_beta(), "{g:?} at {v}");
            }
        }
    }
    assert!(seen > 0);
}

#[test]
fn b_adds_one_to_beta() {
    for g in trees(8) {
        let beta = params(&g).beta;
        for v in g.vertices() {
            let w = g.next_free_id();
            let out = ops::attach(&g, &Extension::B { anchor: v, w, w2: w + 1 }).unwrap();
            assert_eq!(params(&out).beta, beta + 1);
        }
    }
}

#[test]
fn d_adds_four_to_lambda_everywhere() {
    for g in trees(8) {
        let p = params(&g);
        for v in g.vertices() {
            let out = ops::attach(&g, &fresh_d(&g, v)).unwrap();
            assert_eq!(params(&out).lambda, p.lambda + 4, "{g:?} at {v}");
        }
    }
}

#[test]
fn d_adds_two_to_beta_exactly_at_essential_vertices() {
    for g in trees(8) {
        let p = params(&g);
        for v in g.vertices() {
            let q = params(&ops::attach(&g, &fresh_d(&g, v)).unwrap());
            let essential = ops::is_essential(&g, v).unwrap();
            assert_eq!(q.beta, p.beta + if essential { 2 } else { 3 }, "{g:?} at {v}");
            if p.alpha_equals_beta() && essential {
                assert!(q.alpha_equals_beta(), "{g:?} at {v}");
            }
        }
    }
}

#[test]
fn strict_d_sites_are_essential() {
    for g in trees(10) {
        for v in g.vertices() {
            if ops::applicable_d(&g, v).unwrap().is_some() {
                assert!(ops::is_essential(&g, v).unwrap(), "{g:?} at {v}");
            }
        }
    }
}

#[test]
fn a_algebra_on_random_forests() {
    for seed in 0..200 {
        let (forest, anchors) = random_forest(12, seed).unwrap();
        let p = params(&forest);
        let a1 = params(&ops::apply_a_fresh(&forest, &anchors, AVariant::A1).unwrap());
        assert_eq!(
            (a1.beta, a1.alpha, a1.big_l, a1.lambda),
            (p.beta + 1, p.alpha + 1, p.big_l + 1, p.lambda + 2),
            "{forest:?}"
        );
        let a2 = params(&ops::apply_a_fresh(&forest, &anchors, AVariant::A2).unwrap());
        assert_eq!((a2.beta, a2.alpha, a2.big_l), (p.beta + 2, p.alpha + 2, p.big_l + 1), "{forest:?}");
    }
}

#[test]
fn a_gap_is_additive_over_components() {
    for seed in 1000..1100 {
        let (forest, anchors) = random_forest(12, seed).unwrap();
        let gap: usize = forest
            .component_graphs()
            .iter()
            .map(|c| {
                let p = params(c);
                p.beta - p.alpha
            })
            .sum();
        for variant in [AVariant::A1, AVariant::A2] {
            let q = params(&ops::apply_a_fresh(&forest, &anchors, variant).unwrap());
            assert_eq!(q.beta - q.alpha, gap, "{forest:?}");
        }
    }
}

#[test]
fn a_on_small_forests_preserves_equality() {
    let small = trees(5);
    for a in &small {
        for b in &small {
            let forest = a.disjoint_union(&b.shifted(a.vertex_count())).unwrap();
            let both_equal = params(a).alpha_equals_beta() && params(b).alpha_equals_beta();
            for &x in &[0, a.vertex_count() - 1] {
                let anchors = [x, a.vertex_count()];
                let hub = forest.next_free_id();
                let out = ops::apply_a(&forest, hub, AGadget::TwoLeaves { w: hub + 1, x: hub + 2 }, &anchors, true).unwrap();
                assert_eq!(params(&out).alpha_equals_beta(), both_equal);
            }
        }
    }
}

use std::collections::BTreeSet;

use polyparam::model::{parse_model, Pta};
use polyparam::oracle::{
    grid_check, integer_instance, reachable, trace_equal, unavoidable, verdict, Check, IntegerTa, ZoneGraph,
};
use polyparam::poly::PolyhedralSet;
use polyparam::synthesis::{synthesize, Algorithm, Property, SynthesisRequest};
use polyparam::Rational;

const EX6: &str = include_str!("../../../models/ex6.pta");
const EX7: &str = include_str!("../../../models/ex7.pta");
const FIG4A: &str = include_str!("../../../models/fig4a.pta");

fn q(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

fn goals(pta: &Pta, names: &[&str]) -> BTreeSet<usize> {
    names.iter().map(|n| pta.location_index(n).unwrap()).collect()
}

fn inst(pta: &Pta, v: &[Rational]) -> IntegerTa {
    integer_instance(pta, v).unwrap()
}

#[test]
fn reachability_verdicts() {
    let pta = parse_model(EX6).unwrap();
    let l0 = goals(&pta, &["l0"]);
    let l1 = goals(&pta, &["l1"]);
    assert!(reachable(&inst(&pta, &[q(1, 1)]), &l0));
    assert!(reachable(&inst(&pta, &[q(1, 1)]), &l1));
    assert!(!reachable(&inst(&pta, &[q(1, 4)]), &l1));
    assert!(reachable(&inst(&pta, &[q(1, 2)]), &l1));
}

#[test]
fn unavoidability_verdicts() {
    let pta = parse_model(EX7).unwrap();
    let l0 = goals(&pta, &["l0"]);
    let l1 = goals(&pta, &["l1"]);
    assert!(unavoidable(&inst(&pta, &[q(1, 1)]), &l0));
    assert!(unavoidable(&inst(&pta, &[q(0, 1)]), &l1));
    assert!(!unavoidable(&inst(&pta, &[q(1, 1)]), &l1));
    assert!(!unavoidable(&inst(&pta, &[q(1, 2)]), &l1));
    assert!(unavoidable(&inst(&pta, &[q(1, 4)]), &l1));
}

#[test]
fn reachable_sink_defeats_unavoidability() {
    let pta = parse_model(EX7).unwrap();
    let l1 = goals(&pta, &["l1"]);
    let l2 = goals(&pta, &["l2"]);
    for k in 0..=8 {
        let ta = inst(&pta, &[q(k, 4)]);
        if reachable(&ta, &l2) {
            assert!(!unavoidable(&ta, &l1), "p = {k}/4");
        }
    }
}

#[test]
fn self_loop_without_goal_is_a_counterexample() {
    let pta = parse_model("clocks: x\ninit: l0\nloc l0\nloc l1\nedge l0 -> l0 on a reset {x}\nedge l0 -> l1 on b\n").unwrap();
    let ta = inst(&pta, &[]);
    assert!(!unavoidable(&ta, &goals(&pta, &["l1"])));
}

#[test]
fn blocked_states_are_counterexamples() {
    // From l0 the edge needs x <= 1, but delays are unbounded.
    let open = parse_model("clocks: x\ninit: l0\nloc l0 inv: x <= 2\nloc l1\nedge l0 -> l1 on a when x <= 1\n").unwrap();
    assert!(!unavoidable(&inst(&open, &[]), &goals(&open, &["l1"])));
    let closed = parse_model("clocks: x\ninit: l0\nloc l0 inv: x <= 1\nloc l1\nedge l0 -> l1 on a when x <= 1\n").unwrap();
    assert!(unavoidable(&inst(&closed, &[]), &goals(&closed, &["l1"])));
    let pruned =
        parse_model("clocks: x\ninit: l0\nloc l0 inv: x <= 1\nloc l1 inv: x <= 0\nedge l0 -> l1 on a when x <= 1\n").unwrap();
    assert!(!unavoidable(&inst(&pruned, &[]), &goals(&pruned, &["l1"])));
}

#[test]
fn trace_equality_verdicts() {
    let ex6 = parse_model(EX6).unwrap();
    let a = inst(&ex6, &[q(1, 1)]);
    assert!(trace_equal(&a, &a).unwrap());
    assert!(!trace_equal(&a, &inst(&ex6, &[q(1, 4)])).unwrap());
    let fig = parse_model(FIG4A).unwrap();
    let v12 = inst(&fig, &[q(1, 1), q(2, 1)]);
    assert!(trace_equal(&v12, &inst(&fig, &[q(2, 1), q(3, 1)])).unwrap());
    assert!(!trace_equal(&v12, &inst(&fig, &[q(2, 1), q(1, 1)])).unwrap());
}

#[test]
fn trace_equality_is_an_equivalence_on_samples() {
    let fig = parse_model(FIG4A).unwrap();
    let vals: Vec<_> = [(1, 2), (2, 3), (0, 0), (3, 1), (2, 1), (5, 5)]
        .iter()
        .map(|&(a, b)| inst(&fig, &[q(a, 1), q(b, 1)]))
        .collect();
    for a in &vals {
        assert!(trace_equal(a, a).unwrap());
        for b in &vals {
            let ab = trace_equal(a, b).unwrap();
            assert_eq!(ab, trace_equal(b, a).unwrap());
            for c in &vals {
                if ab && trace_equal(b, c).unwrap() {
                    assert!(trace_equal(a, c).unwrap());
                }
            }
        }
    }
}

#[test]
fn extrapolation_agrees_with_unwidened_search() {
    for (text, goal) in [(EX6, "l1"), (EX7, "l2"), (FIG4A, "l1p")] {
        let pta = parse_model(text).unwrap();
        let g = goals(&pta, &[goal]);
        for v in polyparam::oracle::integer_points(&pta).unwrap().into_iter().step_by(3) {
            let ta = inst(&pta, &v);
            let widened = ZoneGraph::build(&ta);
            let plain = ZoneGraph::build_with(&ta, None, Some(widened.len()));
            assert_eq!(widened.reaches(&g), plain.reaches(&g), "{text} at {v:?}");
        }
    }
}

#[test]
fn larger_extrapolation_constants_keep_verdicts() {
    let pta = parse_model(FIG4A).unwrap();
    let g = goals(&pta, &["l1p"]);
    for v in polyparam::oracle::integer_points(&pta).unwrap() {
        let ta = inst(&pta, &v);
        let base = ZoneGraph::build(&ta).reaches(&g);
        for k in 1..=2 {
            let wider = ZoneGraph::build_with(&ta, Some(ta.max_constant + k), None);
            assert_eq!(base, wider.reaches(&g));
        }
    }
}

#[test]
fn rescaling_keeps_reachability() {
    let pta = parse_model(EX6).unwrap();
    let g = goals(&pta, &["l1"]);
    for k in 0..=8 {
        let v = [q(k, 4)];
        let direct = pta.instantiate(&v).unwrap().rescale();
        let twice = direct.rescale();
        assert_eq!(
            reachable(&IntegerTa::new(&direct).unwrap(), &g),
            reachable(&IntegerTa::new(&twice).unwrap(), &g)
        );
        assert_eq!(reachable(&IntegerTa::new(&direct).unwrap(), &g), k >= 2);
    }
}

fn synth(pta: &Pta, alg: Algorithm, goal: &str) -> PolyhedralSet {
    let g = goals(pta, &[goal]);
    let property = match alg.property_kind() {
        "EF" => Property::Reach(g),
        _ => Property::Unavoid(g),
    };
    synthesize(&SynthesisRequest::new(pta, property, alg.variant())).unwrap().valuations
}

#[test]
fn grid_on_example6() {
    let pta = parse_model(EX6).unwrap();
    let k = synth(&pta, Algorithm::Rief, "l1");
    let r = grid_check(&pta, &Check::Reach(goals(&pta, &["l1"])), &k, 10).unwrap();
    assert_eq!(r.integer.len(), 3);
    assert!(r.is_clean(), "{}", r.to_table());
}

#[test]
fn grid_on_example7() {
    let pta = parse_model(EX7).unwrap();
    let check = Check::Unavoid(goals(&pta, &["l1"]));
    let k = synth(&pta, Algorithm::Riaf, "l1");
    let r = grid_check(&pta, &check, &k, 20).unwrap();
    assert!(r.is_clean(), "{}", r.to_table());
    assert!(k.contains(&[q(1, 4)]).unwrap() && verdict(&pta, &check, &[q(1, 4)]).unwrap());
    assert!(!k.contains(&[q(1, 2)]).unwrap());

    let iaf = synth(&pta, Algorithm::Iaf, "l1");
    let r = grid_check(&pta, &check, &iaf, 20).unwrap();
    assert!(r.disagreements().is_empty(), "{}", r.to_table());
    let bad: Vec<_> = r.soundness_violations().iter().map(|p| p.valuation.clone()).collect();
    assert!(bad.contains(&vec![q(1, 2)]), "{}", r.to_table());
}

#[test]
fn report_json_has_sorted_keys() {
    let pta = parse_model(EX6).unwrap();
    let k = synth(&pta, Algorithm::Rief, "l1");
    let r = grid_check(&pta, &Check::Reach(goals(&pta, &["l1"])), &k, 3).unwrap();
    let text = serde_json::to_string(&r.to_json()).unwrap();
    let keys: Vec<&str> = ["\"disagreements\"", "\"integer_points\"", "\"params\"", "\"property\"", "\"rational_samples\""]
        .into_iter()
        .collect();
    let positions: Vec<usize> = keys.iter().map(|k| text.rfind(k).unwrap()).collect();
    assert!(positions.windows(2).all(|w| w[0] < w[1]), "{text}");
}

use std::collections::BTreeSet;

use polyparam::model::{parse_model, Pta};
use polyparam::poly::PolyhedralSet;
use polyparam::synthesis::{synthesize, Algorithm, Property, Status, SynthesisRequest};
use polyparam::Rational;

const EX6: &str = include_str!("../../../models/ex6.pta");
const EX7: &str = include_str!("../../../models/ex7.pta");
const FIG2A: &str = include_str!("../../../models/fig2a.pta");
const FIG4A: &str = include_str!("../../../models/fig4a.pta");

fn run(pta: &Pta, alg: Algorithm, goals: &[&str], budget: Option<usize>) -> (String, Status) {
    let goals: BTreeSet<usize> = goals.iter().map(|g| pta.location_index(g).unwrap()).collect();
    let property = match alg.property_kind() {
        "EF" => Property::Reach(goals),
        _ => Property::Unavoid(goals),
    };
    let mut req = SynthesisRequest::new(pta, property, alg.variant());
    req.budget = budget;
    let r = synthesize(&req).unwrap();
    (r.valuations.to_text(), r.status)
}

fn same(pta: &Pta, got: &str, want: &str) -> bool {
    let space = pta.space().params_only();
    let a = PolyhedralSet::parse(&space, got).unwrap();
    let b = PolyhedralSet::parse(&space, want).unwrap();
    a.set_equals(&b).unwrap()
}

#[test]
fn example6_reachability() {
    let pta = parse_model(EX6).unwrap();
    let (k, _) = run(&pta, Algorithm::Rief, &["l1"], None);
    assert!(same(&pta, &k, "1/2 <= p <= 2"), "{k}");
    let (k, _) = run(&pta, Algorithm::Ief, &["l1"], None);
    assert!(same(&pta, &k, "1 <= p <= 2"), "{k}");
    let (k, st) = run(&pta, Algorithm::Ef, &["l1"], Some(100));
    assert!(same(&pta, &k, "1/2 <= p <= 2"), "{k}");
    assert_eq!(st, Status::Complete);
}

#[test]
fn example7_unavoidability() {
    let pta = parse_model(EX7).unwrap();
    let (k, _) = run(&pta, Algorithm::Riaf, &["l1"], None);
    assert!(same(&pta, &k, "0 <= p < 1/2"), "{k}");
    let (k, _) = run(&pta, Algorithm::Iaf, &["l1"], None);
    assert!(same(&pta, &k, "0 <= p < 1"), "{k}");
}

#[test]
fn loop_terminates_under_hull_keys() {
    let pta = parse_model(FIG2A).unwrap();
    let (k, st) = run(&pta, Algorithm::Rief, &["l0"], None);
    assert_eq!(st, Status::Complete);
    assert!(same(&pta, &k, "0 <= p <= 1"), "{k}");
}

#[test]
fn trace_preservation_on_drifting_loop() {
    let pta = parse_model(FIG4A).unwrap();
    let v0 = vec![Rational::from_integer(1.into()), Rational::from_integer(2.into())];
    let req = SynthesisRequest::new(&pta, Property::TracePreserve(v0.clone()), Algorithm::Tp.variant()).with_budget(500);
    let r = synthesize(&req).unwrap();
    assert_eq!(r.status, Status::BudgetExhausted);
    let req = SynthesisRequest::new(&pta, Property::TracePreserve(v0), Algorithm::Ritp.variant());
    let r = synthesize(&req).unwrap();
    assert_eq!(r.status, Status::Complete);
    eprintln!("ritp: {} ({} states)", r.valuations, r.stats.states_explored);
}

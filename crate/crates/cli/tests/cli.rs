use std::path::PathBuf;
use std::process::{Command, Output};

use polyparam::model::parse_model;
use polyparam::poly::PolyhedralSet;
use polyparam::synthesis::{synthesize, Algorithm, Property, SynthesisRequest};
use serde_json::Value;

fn model(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../models").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_polyparam")).args(args).output().expect("binary runs")
}

fn polyparam(model_name: &str, args: &[&str]) -> Output {
    let path = model(model_name);
    let mut all = vec![path.to_str().unwrap()];
    all.extend_from_slice(args);
    run(&all)
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn first_line(o: &Output) -> String {
    stdout(o).lines().next().unwrap_or_default().to_string()
}

#[test]
fn example6_results() {
    let o = polyparam("ex6.pta", &["--prop", "EF {l1}", "--algorithm", "rief"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(first_line(&o), "-2*p + 1 <= 0 & p - 2 <= 0");
    assert!(stdout(&o).contains("status: complete"));
    let o = polyparam("ex6.pta", &["--prop", "EF {l1}", "--algorithm", "ief"]);
    assert_eq!(first_line(&o), "-p + 1 <= 0 & p - 2 <= 0");
    // The algorithm defaults to the terminating one for the property.
    let o = polyparam("ex6.pta", &["--prop", "EF {l1}"]);
    assert_eq!(first_line(&o), "-2*p + 1 <= 0 & p - 2 <= 0");
}

#[test]
fn exhausted_budget_exits_with_two() {
    let o = polyparam("fig4a.pta", &["--prop", "TP at p1=1, p2=2", "--algorithm", "tp", "--budget", "100"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).contains("status: budget-exhausted"));
}

#[test]
fn errors_exit_with_one() {
    for args in [
        vec!["--prop", "EF {nowhere}"],
        vec!["--prop", "EF {l1}", "--budget", "10"],
        vec!["--prop", "AF {l1}", "--algorithm", "rief"],
        vec!["--prop", "TP at p=1/2"],
        vec!["--prop", "EF {l1}", "--algorithm", "xyz"],
        vec!["--prop", "EF {l1}", "--oracle-check", "sometimes"],
        vec![],
    ] {
        let o = polyparam("ex6.pta", &args);
        assert_eq!(o.status.code(), Some(1), "{args:?}");
        assert!(!o.stderr.is_empty());
    }
    let o = run(&["/nonexistent/model.pta", "--prop", "EF {l1}"]);
    assert_eq!(o.status.code(), Some(1));
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.pta");
    std::fs::write(&bad, "clocks: x\nparams: p in [0, 1]\ninit: l0\nloc l0\nedge l0 -> l0 on a when x + x <= p\n").unwrap();
    let o = run(&[bad.to_str().unwrap(), "--prop", "EF {l0}"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 5"));
}

#[test]
fn property_file() {
    let dir = tempfile::tempdir().unwrap();
    let prop = dir.path().join("prop.txt");
    std::fs::write(&prop, "AF {l1}\n").unwrap();
    let o = polyparam("ex7.pta", &["--prop-file", prop.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(first_line(&o), "-p <= 0 & 2*p - 1 < 0");
}

#[test]
fn json_result_round_trips() {
    let o = polyparam("ex7.pta", &["--prop", "AF {l1}", "--algorithm", "iaf", "--output", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["status"], "complete");
    assert_eq!(v["algorithm"], "iaf");

    let pta = parse_model(&std::fs::read_to_string(model("ex7.pta")).unwrap()).unwrap();
    let space = pta.space().params_only();
    let disjuncts: Vec<String> = v["result"]
        .as_array()
        .unwrap()
        .iter()
        .map(|d| {
            let cons: Vec<&str> = d.as_array().unwrap().iter().map(|c| c.as_str().unwrap()).collect();
            if cons.is_empty() { "true".to_string() } else { cons.join(" & ") }
        })
        .collect();
    let text = if disjuncts.is_empty() { "false".to_string() } else { disjuncts.join(" | ") };
    let rebuilt = PolyhedralSet::parse(&space, &text).unwrap();

    let goal = [pta.location_index("l1").unwrap()].into();
    let direct = synthesize(&SynthesisRequest::new(&pta, Property::Unavoid(goal), Algorithm::Iaf.variant()))
        .unwrap()
        .valuations;
    assert!(rebuilt.set_equals(&direct).unwrap());
    assert_eq!(v["text"].as_str().unwrap(), direct.to_text());
}

#[test]
fn oracle_report() {
    let o = polyparam("ex7.pta", &["--prop", "AF {l1}", "--algorithm", "iaf", "--oracle-check", "grid+rational:8"]);
    let out = stdout(&o);
    assert!(out.contains("0 disagreements"), "{out}");
    assert!(out.contains("UNSOUND"), "{out}");
    let o = polyparam("ex7.pta", &["--prop", "AF {l1}", "--oracle-check", "grid+rational:8", "--output", "json"]);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["oracle"]["disagreements"], 0);
    assert_eq!(v["oracle"]["soundness_violations"], 0);
    assert_eq!(v["oracle"]["integer_points"].as_array().unwrap().len(), 3);
}

fn dot_of(model_name: &str, prop: &str) -> String {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("tree.dot");
    let o = polyparam(model_name, &["--prop", prop, "--dot", path.to_str().unwrap()]);
    assert!(o.status.success());
    std::fs::read_to_string(path).unwrap()
}

fn count(dot: &str, pred: impl Fn(&str) -> bool) -> usize {
    dot.lines().filter(|l| pred(l.trim())).count()
}

#[test]
fn dot_export() {
    let is_node = |l: &str| l.starts_with('n') && l.contains("[label=") && !l.contains("->");
    let is_edge = |l: &str| l.contains("->") && !l.contains("dashed");

    let dot = dot_of("ex6.pta", "EF {l1}");
    assert!(dot.starts_with("digraph"));
    assert_eq!((count(&dot, is_node), count(&dot, is_edge)), (2, 1), "{dot}");
    assert!(dot.contains("label=\"a\""));

    let dir = tempfile::tempdir().unwrap();
    let single = dir.path().join("single.pta");
    std::fs::write(&single, "clocks: x\ninit: l0\nloc l0\n").unwrap();
    let path = dir.path().join("single.dot");
    let o = run(&[single.to_str().unwrap(), "--prop", "TP at", "--dot", path.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let dot = std::fs::read_to_string(path).unwrap();
    assert_eq!((count(&dot, is_node), count(&dot, is_edge)), (1, 0), "{dot}");

    // The loop is cut once hull keys repeat.
    let dot = dot_of("fig2a.pta", "TP at p=1");
    assert_eq!(count(&dot, |l| l.contains("style=dashed")), 1, "{dot}");
    assert!(count(&dot, is_node) <= 5, "{dot}");
}

#[test]
fn output_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    for (m, prop) in [("ex6.pta", "EF {l1}"), ("ex7.pta", "AF {l1}"), ("fig4a.pta", "TP at p1=1, p2=2")] {
        let mut outs = Vec::new();
        for i in 0..2 {
            let dot = dir.path().join(format!("{i}.dot"));
            let text = polyparam(m, &["--prop", prop, "--dot", dot.to_str().unwrap()]).stdout;
            let json = polyparam(m, &["--prop", prop, "--output", "json", "--oracle-check", "grid+rational:3"]).stdout;
            outs.push((text, json, std::fs::read(&dot).unwrap()));
        }
        assert_eq!(outs[0], outs[1], "{m}");
    }
}

use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn symdl(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_symdl")).args(args).output().unwrap()
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

const ODD: &str = r#"{"kind":"path","domain":2,"unary":["C0","C0","C0"],"binary":["NEQ","NEQ"]}"#;
const EVEN: &str = r#"{"kind":"path","domain":2,"unary":["C0","C1","C0"],"binary":["NEQ","NEQ"]}"#;

#[test]
fn hm_search() {
    let v = json(&symdl(&["hm-search", "--structure", "AK2"]));
    assert_eq!(v["found"], true);
    assert_eq!(v["n"], 2);
    let v = json(&symdl(&["hm-search", "--structure", "IMP2"]));
    assert_eq!(v["found"], false);
}

#[test]
fn solve_path_instances() {
    let dir = tempfile::tempdir().unwrap();
    let odd = write(dir.path(), "odd.json", ODD);
    let even = write(dir.path(), "even.json", EVEN);
    let traces = dir.path().join("traces");
    let v = json(&symdl(&[
        "solve",
        "--structure",
        "AK2",
        "--instance",
        &odd,
        "--trace-dir",
        traces.to_str().unwrap(),
    ]));
    assert_eq!(v["satisfiable"], false);
    let id = v["trace"].as_str().unwrap();
    let trace = traces.join(format!("{id}.trace.json"));
    assert!(trace.is_file());
    let text = symdl(&["export", "--structure", "AK2", "--instance", &odd, "--trace", trace.to_str().unwrap(), "--format", "text"]);
    assert_eq!(String::from_utf8(text.stdout).unwrap(), std::fs::read_to_string(&trace).unwrap());
    let v = json(&symdl(&["solve", "--structure", "AK2", "--instance", &even]));
    assert_eq!(v["satisfiable"], true);
    assert_eq!(v["witness"], serde_json::json!([0, 1, 0]));
}

#[test]
fn solve_and_bubble_general_instances() {
    let dir = tempfile::tempdir().unwrap();
    let tri = write(
        dir.path(),
        "tri.json",
        r#"{"kind":"csp","variables":["a","b","c"],"constraints":[
            {"relation":"NEQ","scope":["a","b"]},{"relation":"NEQ","scope":["b","c"]},{"relation":"NEQ","scope":["c","a"]}]}"#,
    );
    let dec = write(dir.path(), "dec.json", r#"{"width":2,"bags":[["a","b","c"]]}"#);
    let v = json(&symdl(&["solve", "--structure", "AK2", "--instance", &tri, "--decomposition", &dec]));
    assert_eq!(v["satisfiable"], false);
    let v = json(&symdl(&["solve", "--structure", "AK2", "--instance", &tri]));
    assert_eq!(v["satisfiable"], false);
    let v = json(&symdl(&["bubble", "--structure", "AK2", "--instance", &tri, "--decomposition", &dec, "--decide"]));
    assert_eq!(v["k"], 3);
    assert_eq!(v["domain"], 8);
    assert_eq!(v["satisfiable"], false);
    let bad = write(dir.path(), "bad.json", r#"{"width":1,"bags":[["a","b"],["b","c"]]}"#);
    assert_eq!(symdl(&["bubble", "--structure", "AK2", "--instance", &tri, "--decomposition", &bad]).status.code(), Some(1));
}

#[test]
fn eval_lambda_shrink() {
    let dir = tempfile::tempdir().unwrap();
    let odd = write(dir.path(), "odd.json", ODD);
    let v = json(&symdl(&["eval", "--structure", "AK2", "--instance", &odd, "--width", "2"]));
    assert_eq!(v["goal_reached"], true);
    let prog = write(
        dir.path(),
        "p.dl",
        "#edb C0/1\n#edb C1/1\n#edb NEQ/2\n#idb Z/1\n#idb G/1\n#goal G\nZ(x) :- C0(x).\nZ(y) :- Z(x), NEQ(x,y), C0(y).\nG(x) :- Z(x), C0(x).\n",
    );
    let v = json(&symdl(&["eval", "--structure", "AK2", "--instance", &odd, "--program", &prog]));
    assert_eq!(v["goal_reached"], true);
    let even = write(dir.path(), "even.json", r#"{"kind":"path","domain":2,"unary":[[0,1],[0,1],[0,1]],"binary":["NEQ","NEQ"]}"#);
    let v = json(&symdl(&["lambda", "--structure", "AK2", "--instance", &even, "--from", "1", "--to", "3"]));
    assert_eq!(v["pairs"], serde_json::json!([[0, 0], [1, 1]]));
    let chain = write(
        dir.path(),
        "chain.json",
        r#"{"kind":"path","domain":2,"unary":["C0",[0,1],[0,1],[0,1]],"binary":["NEQ","NEQ","NEQ"]}"#,
    );
    let v = json(&symdl(&["shrink", "--structure", "AK2", "--instance", &chain, "--width", "2"]));
    assert!(v["length"].as_u64().unwrap() < 4);
    assert_eq!(symdl(&["shrink", "--structure", "AK2", "--instance", &even, "--width", "1"]).status.code(), Some(1));
}

#[test]
fn experiment_exit_codes_and_determinism() {
    let args = ["experiment", "--structure", "AZ2", "--trials", "20", "--seed", "3", "--solvers", "oracle,path,canon"];
    let a = symdl(&args);
    let b = symdl(&[&args[..], &["--sequential"]].concat());
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let v: Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["agreement"][0][1], 20);
    let budget = symdl(&["experiment", "--trials", "3", "--budget", "2", "--format", "text"]);
    assert_eq!(budget.status.code(), Some(3));
    let dir = tempfile::tempdir().unwrap();
    let rep = write(dir.path(), "r.json", std::str::from_utf8(&a.stdout).unwrap());
    let text = symdl(&["export", "--report", &rep, "--format", "text"]);
    assert!(String::from_utf8(text.stdout).unwrap().contains("agreement"));
}

#[test]
fn export_formats() {
    let dir = tempfile::tempdir().unwrap();
    let odd = write(dir.path(), "odd.json", ODD);
    let dot = symdl(&["export", "--structure", "AK2", "--instance", &odd, "--format", "dot"]);
    assert!(String::from_utf8(dot.stdout).unwrap().starts_with("digraph microstructure"));
    let back = symdl(&["export", "--structure", "AK2", "--instance", &odd, "--format", "json"]);
    let again = write(dir.path(), "again.json", std::str::from_utf8(&back.stdout).unwrap());
    let back2 = symdl(&["export", "--structure", "AK2", "--instance", &again, "--format", "json"]);
    assert_eq!(back.stdout, back2.stdout);
    let bad = symdl(&["export", "--structure", "AK2", "--instance", &odd, "--format", "svg"]);
    assert_eq!(bad.status.code(), Some(1));
    assert!(String::from_utf8(bad.stderr).unwrap().contains("unsupported"));
}

use std::path::PathBuf;
use std::process::{Command, Output};

use varlie::check_source;
use varlie::report::Status;
use varlie::run::RunOptions;

fn root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn scenario(name: &str) -> PathBuf {
    root().join("scenarios").join(format!("{name}.vl"))
}

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(format!("{name}.vl"))
}

fn varlie(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut c = Command::new(env!("CARGO_BIN_EXE_varlie"));
    c.args(args).env_remove("VARLIE_ORDER_BOUND");
    for (k, v) in env {
        c.env(k, v);
    }
    c.output().expect("binary runs")
}

fn check(path: &PathBuf, extra: &[&str], env: &[(&str, &str)]) -> Output {
    let mut args = vec!["check", path.to_str().unwrap()];
    args.extend_from_slice(extra);
    varlie(&args, env)
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

const PASSING: &[&str] = &[
    "kdv",
    "liouville",
    "maxwell",
    "schouten-props",
    "involutive-weight1",
    "involutive-weight2",
    "involutive-weight3",
    "involutive-weight4",
    "involutive-weight5",
    "involutive-weight6",
];

fn run_file(path: &PathBuf) -> varlie::report::Report {
    let src = std::fs::read_to_string(path).unwrap();
    check_source("t", &src, &RunOptions::default()).unwrap()
}

#[test]
fn shipped_scenarios_pass() {
    for name in PASSING {
        let r = run_file(&scenario(name));
        assert_eq!(r.summary.status, Status::Pass, "{name}:\n{}", r.text());
    }
}

#[test]
fn weight_seven_fails_only_on_the_tabulated_quadratic_symbol() {
    let r = run_file(&scenario("involutive-weight7"));
    let failing: Vec<_> = r.tasks.iter().flat_map(|t| &t.checks).filter(|c| c.status != Status::Pass).collect();
    assert_eq!(failing.len(), 1, "{}", r.text());
    let c = failing[0];
    assert!(c.name.starts_with("listed -4*u^2*Dx^3"), "{}", c.name);
    let d = c.detail.as_deref().unwrap();
    assert!(d.contains("scale -4"), "{d}");
    assert!(d.contains("gamma = 2*p1_x*p2_xx*u - 2*p1_xx*p2_x*u"), "{d}");
    assert!(d.contains("does not reconstruct"), "{d}");
    assert_eq!(r.exit_code(), 1);
}

#[test]
fn exit_codes() {
    assert_eq!(check(&scenario("kdv"), &[], &[]).status.code(), Some(0));
    let bad = check(&fixture("corrupted-gamma"), &[], &[]);
    assert_eq!(bad.status.code(), Some(1));
    assert!(stdout(&bad).contains("task square (verify-q2): fail"));
    assert_eq!(check(&fixture("corrupted-generator"), &[], &[]).status.code(), Some(1));
    assert_eq!(check(&fixture("not-hamiltonian"), &[], &[]).status.code(), Some(1));
    let inc = check(&fixture("bounded"), &[], &[]);
    assert_eq!(inc.status.code(), Some(2));
    assert!(stdout(&inc).contains("task square (verify-q2): inconclusive"));
    assert_eq!(check(&root().join("no-such-file.vl"), &[], &[]).status.code(), Some(3));
}

#[test]
fn syntax_errors_point_at_the_dangling_operator() {
    let o = check(&fixture("syntax-error"), &[], &[]);
    assert_eq!(o.status.code(), Some(3));
    let e = stderr(&o);
    assert!(e.contains("syntax-error.vl:3:13: dangling `+`"), "{e}");
    let o = varlie(&["parse", fixture("syntax-error").to_str().unwrap()], &[]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn binding_errors_carry_positions() {
    let o = check(&fixture("undeclared"), &[], &[]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("undeclared.vl:3:8: unknown name `v`"), "{}", stderr(&o));
    let cases = [
        ("base x;\nfield u even;\nfield u odd;\n", "3:1", "already defined"),
        ("field u even;\n", "1:1", "`base` must be declared first"),
        ("base x;\nfield u even;\nfield b odd;\ntask s = verify-q2 q;\ntask q = build-q Dx target u ghost b gamma 0;\n", "4:20", "unknown task `q`"),
        ("base x;\nfield u even;\nfield b odd;\ntask a = extract-christoffel Dx target u;\ntask s = verify-q2 a;\n", "5:20", "not a build-q task"),
        ("base x;\nfield u even;\ntask s = schouten u u;\n", "3:1", "needs `pair` declarations"),
        ("base x y;\nfield u even weight 2;\ntask s = search weight 3;\n", "3:1", "`base x`"),
        ("base x;\nfield u even;\ntask s = search weight 3;\n", "3:1", "weight 2"),
        ("base x;\nfield u even;\nfield b odd;\ntask h = check-hamiltonian Dx target w ghost b;\n", "4:31", "unknown field `w`"),
        ("base x;\nfield u even;\nequation E: u = u_x;\n", "3:13", "left-hand side"),
        ("base x;\nfield u even;\nequation E: u_x*u = u;\n", "3:13", "single jet"),
    ];
    for (src, pos, msg) in cases {
        let e = check_source("t", src, &RunOptions::default()).unwrap_err().to_string();
        assert!(e.starts_with(pos) && e.contains(msg), "{src}: {e}");
    }
}

#[test]
fn order_bound_precedence() {
    let f = fixture("bounded");
    assert_eq!(check(&f, &[], &[("VARLIE_ORDER_BOUND", "7")]).status.code(), Some(2), "task clause beats the environment");
    let o = check(&f, &["--order-bound", "7"], &[("VARLIE_ORDER_BOUND", "0")]);
    assert_eq!(o.status.code(), Some(0), "flag beats the task clause");
    assert!(stdout(&o).contains("order bound: 7"));
    let k = scenario("kdv");
    assert_eq!(check(&k, &[], &[("VARLIE_ORDER_BOUND", "0")]).status.code(), Some(2), "environment beats the default");
    assert_eq!(check(&k, &[], &[("VARLIE_ORDER_BOUND", "x")]).status.code(), Some(3));
}

#[test]
fn tree_output_is_structured() {
    let o = check(&scenario("liouville"), &["--emit", "tree"], &[]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["scenario"], "liouville");
    assert_eq!(v["summary"]["status"], "pass");
    let names: Vec<&str> = v["tasks"].as_array().unwrap().iter().map(|t| t["name"].as_str().unwrap()).collect();
    assert_eq!(names, ["integral", "reduce", "christoffel", "given", "square"]);
    assert_eq!(v["tasks"][0]["objects"][0]["key"], "reduced");
    assert_eq!(v["tasks"][0]["objects"][0]["value"], "0");
    assert_eq!(v["tasks"][4]["checks"][0]["detail"], "exact zero");
}

#[test]
fn timing_is_opt_in() {
    let plain = stdout(&check(&scenario("kdv"), &[], &[]));
    assert!(!plain.contains(" ms]"));
    let timed = stdout(&check(&scenario("kdv"), &["--timing"], &[]));
    assert!(timed.contains(" ms]"));
}

#[test]
fn parse_prints_canonical_text() {
    let o = varlie(&["parse", scenario("kdv").to_str().unwrap()], &[]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("op A2 = -1/2*Dx^3 + 2*u*Dx + u_x;\n"), "{text}");
    assert!(!text.contains("//"));
}

#[test]
fn search_command() {
    let o = varlie(&["search", "--max-weight", "3"], &[]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let text = stdout(&o);
    assert!(text.contains("task weight3 (search): pass"));
    assert!(text.contains("family 0 = Dx^3 + 2*#2*u*Dx + #2*u_x (dim 2)"), "{text}");
    assert!(text.contains("task formal (search): pass"));
    assert!(text.contains("[pass] involutive f(u)*Dx^3: gamma = 0"));
    let o = varlie(&["search", "--max-weight", "2", "--formal-f", "--emit", "tree"], &[]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["tasks"].as_array().unwrap().len(), 3);
    assert_eq!(varlie(&["search", "--max-weight", "0"], &[]).status.code(), Some(3));
}

#[test]
fn reports_do_not_depend_on_threads() {
    for name in PASSING.iter().chain(&["involutive-weight7"]) {
        let p = scenario(name);
        let one = check(&p, &["--jobs", "1", "--emit", "tree"], &[]);
        let four = check(&p, &["--jobs", "4", "--emit", "tree"], &[]);
        assert_eq!(one.stdout, four.stdout, "{name}");
    }
}

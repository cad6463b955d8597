use std::path::Path;
use std::process::{Command, Output};

use circle_flow::io::{format_pattern, parse_pattern};
use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_circle-flow"))
}

fn run(args: &[&str]) -> (i32, Value, String) {
    let out: Output = bin()
        .args(args)
        .env_remove("CIRCLE_FLOW_TOL")
        .output()
        .unwrap();
    let stdout = String::from_utf8(out.stdout).unwrap();
    let json = serde_json::from_str(&stdout).unwrap_or(Value::Null);
    (
        out.status.code().unwrap(),
        json,
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn example_text(name: &str) -> String {
    let out = bin().args(["example", name]).output().unwrap();
    assert!(out.status.success(), "{name}");
    String::from_utf8(out.stdout).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

const SATURATED: &str = "vertices: a b\nedges:\ne a b pi/2\ntargets:\na pi/2\nb pi/2\n";

#[test]
fn check_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let tetra = write(dir.path(), "t.pat", &example_text("tetrahedron"));
    let (code, json, _) = run(&["check", &tetra]);
    assert_eq!(code, 0);
    let slack = json["feasibility"]["worst_slack"].as_f64().unwrap();
    assert!((slack - 4.0 * std::f64::consts::PI / 3.0).abs() < 1e-12);

    let sat = write(dir.path(), "s.pat", SATURATED);
    let (code, json, stderr) = run(&["check", &sat]);
    assert_eq!(code, 1);
    assert_eq!(
        json["feasibility"]["witness"],
        serde_json::json!(["a", "b"])
    );
    assert!(stderr.contains("a, b"));
    let (code, _, _) = run(&["check", &sat, "--flow-margin", "1e-9"]);
    assert_eq!(code, 1);

    let bad = write(
        dir.path(),
        "b.pat",
        "vertices: a b\nedges:\ne a b notanumber\ntargets:\na 1\nb 1\n",
    );
    let (code, json, stderr) = run(&["check", &bad]);
    assert_eq!(code, 2);
    assert!(stderr.contains("line 3"), "{stderr}");
    assert!(json["error"].as_str().unwrap().contains("line 3"));

    let (code, _, _) = run(&["check", "/nonexistent/file.pat"]);
    assert_eq!(code, 2);
}

#[test]
fn solve_both_methods_on_tetrahedron() {
    let dir = tempfile::tempdir().unwrap();
    let tetra = write(dir.path(), "t.pat", &example_text("tetrahedron"));
    let (code, json, _) = run(&["solve", &tetra, "--method", "both"]);
    assert_eq!(code, 0);
    let r_exact = (1.0f64 / 3.0).acos();
    for row in json["vertices"].as_array().unwrap() {
        assert!((row["r"].as_f64().unwrap() - r_exact).abs() < 1e-8);
    }
    assert_eq!(json["solvers"].as_array().unwrap().len(), 2);
    assert!(json["agreement"].as_f64().unwrap() < 1e-8);
    for s in json["solvers"].as_array().unwrap() {
        assert_eq!(s["termination"], "tolerance");
    }
    assert!(json["solvers"][0]["rate"].as_f64().is_some());
    assert!(json["config"]["tol"].as_f64().unwrap() == 1e-10);
}

#[test]
fn trajectory_energy_strictly_decreases() {
    let dir = tempfile::tempdir().unwrap();
    let tetra = write(dir.path(), "t.pat", &example_text("tetrahedron"));
    let csv = dir.path().join("t.csv");
    let (code, _, _) = run(&[
        "solve",
        &tetra,
        "--method",
        "flow",
        "--seed",
        "3",
        "--trajectory",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "t,residual,energy,K_1,K_2,K_3,K_4");
    let energies: Vec<f64> = lines
        .map(|l| l.split(',').nth(2).unwrap().parse().unwrap())
        .collect();
    assert!(energies.len() > 10);
    assert!(energies.windows(2).all(|w| w[1] < w[0]));
}

#[test]
fn seeds_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let tetra = write(dir.path(), "t.pat", &example_text("tetrahedron"));
    let a = run(&["solve", &tetra, "--seed", "9"]).1;
    let b = run(&["solve", &tetra, "--seed", "9"]).1;
    assert_eq!(a["config"]["initial_K"], b["config"]["initial_K"]);
    assert_eq!(a["vertices"], b["vertices"]);
}

#[test]
fn infeasible_solve_reports_witness() {
    let dir = tempfile::tempdir().unwrap();
    let sat = write(dir.path(), "s.pat", SATURATED);
    let (code, json, _) = run(&["solve", &sat, "--max-time", "50"]);
    assert_eq!(code, 1);
    assert_eq!(json["feasibility"]["feasible"], false);
    assert_eq!(
        json["feasibility"]["witness"],
        serde_json::json!(["a", "b"])
    );
    assert_eq!(json["solvers"][0]["converged"], false);
}

#[test]
fn report_refeeds_solution() {
    let dir = tempfile::tempdir().unwrap();
    let ico = write(dir.path(), "i.pat", &example_text("icosahedron"));
    let solved = dir.path().join("solved.pat");
    let (code, json, _) = run(&[
        "solve",
        &ico,
        "--method",
        "newton",
        "--emit-pattern",
        solved.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let (code, again, _) = run(&["report", solved.to_str().unwrap()]);
    assert_eq!(code, 0);
    let (a, b) = (
        json["vertices"].as_array().unwrap(),
        again["vertices"].as_array().unwrap(),
    );
    assert_eq!(a.len(), 12);
    for (x, y) in a.iter().zip(b) {
        let dl = (x["L"].as_f64().unwrap() - y["L"].as_f64().unwrap()).abs();
        assert!(dl <= 1e-10, "{dl}");
    }
}

#[test]
fn report_at_known_radii() {
    let dir = tempfile::tempdir().unwrap();
    let base = example_text("tetrahedron");
    let radii: String = (1..=4)
        .map(|i| format!("v{i} {:?}\n", (1.0f64 / 3.0).acos()))
        .collect();
    let file = write(dir.path(), "r.pat", &format!("{base}radii:\n{radii}"));
    let (code, json, _) = run(&["report", &file]);
    assert_eq!(code, 0);
    for row in json["vertices"].as_array().unwrap() {
        assert!((row["cone_angle"].as_f64().unwrap() - 2.0 * std::f64::consts::PI).abs() < 1e-12);
    }
    for face in json["faces"].as_array().unwrap() {
        assert!((face["cone_angle"].as_f64().unwrap() - 2.0 * std::f64::consts::PI).abs() < 1e-12);
    }

    let radii: String = (1..=4).map(|i| format!("v{i} pi/4\n")).collect();
    let file = write(dir.path(), "q.pat", &format!("{base}radii:\n{radii}"));
    let (_, at_quarter, _) = run(&["report", &file]);
    let residual = at_quarter["residual"].as_f64().unwrap();
    assert!(residual > 0.1);
    let plain = write(dir.path(), "p.pat", &base);
    let (_, solve, _) = run(&["solve", &plain, "--max-time", "0"]);
    assert!((solve["solvers"][0]["final_residual"].as_f64().unwrap() - residual).abs() < 1e-12);

    let (code, json, _) = run(&["report", &plain]);
    assert_eq!(code, 2);
    assert!(json["error"].as_str().unwrap().contains("radii"));
}

#[test]
fn examples_roundtrip_and_check() {
    let dir = tempfile::tempdir().unwrap();
    for name in circle_flow::io::examples::EXAMPLES {
        let text = example_text(name);
        let parsed = parse_pattern(&text).unwrap();
        assert_eq!(format_pattern(&parsed), text);
        let again = parse_pattern(&format_pattern(&parsed)).unwrap();
        assert_eq!(again, parsed);
        let path = write(dir.path(), &format!("{name}.pat"), &text);
        assert_eq!(run(&["check", &path]).0, 0, "{name}");
    }
    let tetra = parse_pattern(&example_text("tetrahedron")).unwrap();
    assert!(tetra
        .pattern
        .edges
        .iter()
        .all(|e| e.theta == std::f64::consts::FRAC_PI_3));
    assert!(tetra
        .pattern
        .targets
        .iter()
        .all(|t| t.1 == 2.0 * std::f64::consts::PI / 3.0));

    let out = bin().args(["example", "klein"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8(out.stderr)
        .unwrap()
        .contains("tetrahedron"));
}

#[test]
fn tolerance_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let tetra = write(dir.path(), "t.pat", &example_text("tetrahedron"));
    let out = bin()
        .args(["solve", &tetra])
        .env("CIRCLE_FLOW_TOL", "1e-6")
        .output()
        .unwrap();
    let json: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(json["config"]["tol"].as_f64(), Some(1e-6));
}

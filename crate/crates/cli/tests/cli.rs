use std::path::Path;
use std::process::{Command, Output};

fn qcost(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qcost"))
        .args(args)
        .output()
        .expect("spawn qcost")
}

fn qcost_into(args: &[&str], out: &Path) -> Output {
    let mut all: Vec<&str> = args.to_vec();
    all.extend(["--out", out.to_str().unwrap()]);
    qcost(&all)
}

fn read_json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn csv_column(text: &str, name: &str) -> Vec<String> {
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let idx = header.iter().position(|h| *h == name).unwrap();
    lines.map(|l| l.split(',').nth(idx).unwrap().to_string()).collect()
}

#[test]
fn pauli_x_demo_succeeds() {
    let dir = tempfile::tempdir().unwrap();
    let o = qcost_into(&["lde", "--demo", "pauli-x", "--k", "10"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let report = read_json(&dir.path().join("lde.json"));
    assert_eq!(report["schema_version"], 1);
    let fid = report["result"]["run"]["fidelity_vs_oracle"].as_f64().unwrap();
    assert!(fid >= 1.0 - 1e-10);
    let csv = std::fs::read_to_string(dir.path().join("lde.csv")).unwrap();
    assert!(csv.starts_with("k,success_prob,expected_success_prob,fidelity_vs_oracle,fidelity_vs_exact"));
}

#[test]
fn pauli_x_low_order_is_a_tolerance_violation() {
    // k = 1 keeps the oracle match but misses the exact solution
    let dir = tempfile::tempdir().unwrap();
    let o = qcost_into(&["lde", "--demo", "pauli-x", "--k", "1"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("tolerance violation"));
}

#[test]
fn diffusion_scaling_slopes() {
    let o = qcost(&["lde", "--demo", "diffusion-scaling", "--k", "1", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8(o.stdout).unwrap();
    let slope: f64 = csv_column(&text, "p_slope")[0].parse().unwrap();
    assert!((slope + 4.0).abs() < 0.6, "{slope}");
}

#[test]
fn hhl_two_by_two_demo() {
    let o = qcost(&["hhl", "--demo", "two-by-two"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let herald = v["result"]["result"]["herald_prob"].as_f64().unwrap();
    assert!((herald - 0.625).abs() < 1e-9);
    assert!(v["result"]["result"]["clock_residual"].as_f64().unwrap() <= 1e-18);
    assert_eq!(v["result"]["result"]["exact_spectrum"], true);
}

#[test]
fn hhl_problem_file_with_snapping() {
    let dir = tempfile::tempdir().unwrap();
    let problem = dir.path().join("p.json");
    std::fs::write(
        &problem,
        r#"{"A": [[[1.1,0],[0.4,0]],[[0.4,0],[2.3,0]]], "b": [[1,0],[0,0]], "m": 3, "t0": 6.283185307179586}"#,
    )
    .unwrap();
    let out = dir.path().join("out");
    let o = qcost_into(&["hhl", "--problem", problem.to_str().unwrap(), "--snap-spectrum"], &out);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(read_json(&out.join("hhl.json"))["result"]["result"]["exact_spectrum"], true);
}

#[test]
fn tomo_uniform_budget_is_7190() {
    let o = qcost(&["tomo", "--uniform-n", "8", "--delta", "0.1", "--epsilon", "0.05", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = String::from_utf8(o.stdout).unwrap();
    let budgets = csv_column(&text, "budget");
    assert_eq!(budgets.len(), 8);
    assert!(budgets.iter().all(|b| b == "7190"));
}

#[test]
fn tomo_underfunded_is_a_statistical_failure() {
    let o = qcost(&["tomo", "--uniform-n", "4", "--underfund", "10", "--trials", "100"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn complexity_table_on_stdout() {
    let o = qcost(&["complexity", "--table"]);
    assert_eq!(o.status.code(), Some(0));
    let table = String::from_utf8(o.stdout).unwrap();
    for cell in [
        "N⁴·(C(ε) + log(N) + log²(N))",
        "N⁴·(C(ε) + log(N))",
        "N²·(C(ε) + log²(N))",
        "N²·(C(ε) + log(N) + log²(N))",
        "C(ε) + log²(N) + N⁴",
        "C(ε) + log(N) + N⁴",
    ] {
        assert!(table.contains(cell), "missing {cell}");
    }
}

#[test]
fn prep_bench_matches_closed_form() {
    let o = qcost(&["prep-bench", "--max-qubits", "5", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8(o.stdout).unwrap();
    let counts = csv_column(&text, "elementary_count");
    let closed = csv_column(&text, "closed_form");
    assert_eq!(counts, closed);
    assert_eq!(counts, ["19", "91", "347"]);
}

#[test]
fn missing_problem_file_exits_2_without_output() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let o = qcost_into(&["lde", "--problem", "/nonexistent/problem.json"], &out);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("/nonexistent/problem.json"));
    assert!(!out.exists() || std::fs::read_dir(&out).unwrap().next().is_none());
}

#[test]
fn malformed_problem_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let problem = dir.path().join("p.json");
    // non-Hermitian
    std::fs::write(&problem, r#"{"A": [[[1,0],[1,0]],[[0,0],[2,0]]], "b": [[1,0],[0,0]], "m": 3}"#).unwrap();
    let o = qcost(&["hhl", "--problem", problem.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    std::fs::write(&problem, r#"{"M": [[1]], "b": [[1,0]], "x0": [[1,0]], "t": 1, "k": 2, "extra": 1}"#).unwrap();
    let o = qcost(&["lde", "--problem", problem.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn unknown_flag_is_invalid_input() {
    assert_eq!(qcost(&["lde", "--frobnicate"]).status.code(), Some(2));
}

#[test]
fn reports_match_their_schema_files() {
    let schemas = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../docs/schemas");
    let runs: [(&str, &[&str]); 6] = [
        ("lde-run", &["lde", "--demo", "pauli-x"]),
        ("lde-diffusion", &["lde", "--demo", "diffusion-scaling", "--k", "1"]),
        ("hhl-run", &["hhl", "--demo", "two-by-two"]),
        ("tomo", &["tomo", "--uniform-n", "2", "--trials", "100"]),
        ("complexity", &["complexity"]),
        ("prep-bench", &["prep-bench", "--max-qubits", "4"]),
    ];
    for (name, args) in runs {
        let schema = read_json(&schemas.join(format!("{name}.schema.json")));
        let report: serde_json::Value = serde_json::from_slice(&qcost(args).stdout).unwrap();
        assert_eq!(report["schema"], schema["properties"]["schema"]["const"], "{name}");
        assert_eq!(report["schema_version"], schema["properties"]["schema_version"]["const"]);
        let result = report["result"].as_object().unwrap();
        let props = schema["properties"]["result"]["properties"].as_object().unwrap();
        let mut emitted: Vec<&String> = result.keys().collect();
        let mut documented: Vec<&String> = props.keys().collect();
        emitted.sort();
        documented.sort();
        assert_eq!(emitted, documented, "{name}");
    }
}

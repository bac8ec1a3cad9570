use serde_json::{json, Value};
use zastava_cli::{run, Outcome};

const EXAMPLE: &str = r#"{"root_system":{"type":"A1"},"points":{"0":[{"w":"0","y":"1"},{"w":"1","y":"2"}]}}"#;

fn zastava(args: &[&str]) -> Outcome {
    run(std::iter::once("zastava").chain(args.iter().copied()))
}

fn json_out(o: &Outcome) -> Value {
    serde_json::from_str(&o.stdout).unwrap_or_else(|e| panic!("bad JSON ({e}): {}", o.stdout))
}

#[test]
fn convert_worked_example() {
    let o = zastava(&["--input", EXAMPLE, "convert"]);
    assert_eq!(o.code, 0, "{}", o.stderr);
    assert_eq!(json_out(&o), json!({"Q": ["0/1", "-1/1", "1/1"], "R": ["1/1", "1/1"]}));
}

#[test]
fn convert_back_from_map() {
    let o = zastava(&["--input", r#"{"Q":["0","-1","1"],"R":["1","1"]}"#, "convert"]);
    assert_eq!(o.code, 0, "{}", o.stderr);
    let v = json_out(&o);
    assert_eq!(v["points"]["0"][1], json!({"w": "1/1", "y": "2/1"}));
}

#[test]
fn csv_rows_are_json_pointers() {
    let o = zastava(&["--input", EXAMPLE, "--format", "csv", "convert"]);
    assert_eq!(o.code, 0);
    let lines: Vec<&str> = o.stdout.lines().collect();
    assert_eq!(lines[0], "path,value");
    assert!(lines.contains(&"/Q/1,-1/1"));
    assert!(lines.contains(&"/R/0,1/1"));
}

#[test]
fn boundary_of_example() {
    let v = json_out(&zastava(&["--input", EXAMPLE, "boundary"]));
    assert_eq!(v["F_squared"], "4/1");
    assert_eq!(v["matches_resultant"], true);
}

#[test]
fn involution_inverts_y() {
    let v = json_out(&zastava(&["--input", EXAMPLE, "involute"]));
    assert_eq!(v["points"]["0"][1]["y"], "1/2");
}

#[test]
fn zero_denominator_is_schema_error() {
    let bad = r#"{"root_system":{"type":"A1"},"points":{"0":[{"w":"1/0","y":"1"}]}}"#;
    let o = zastava(&["--input", bad, "convert"]);
    assert_eq!(o.code, 2);
    let v = json_out(&o);
    assert_eq!(v["error"], "SchemaViolation");
    assert_eq!(v["pointer"], "/points/0/0/w");
}

#[test]
fn missing_field_is_schema_error() {
    let o = zastava(&["--input", r#"{"root_system":{"type":"A1"}}"#, "convert"]);
    assert_eq!(o.code, 2);
    assert_eq!(json_out(&o)["error"], "SchemaViolation");
}

#[test]
fn coincident_points_are_rejected() {
    let bad = r#"{"root_system":{"type":"A1"},"points":{"0":[{"w":"1","y":"1"},{"w":"1","y":"2"}]}}"#;
    let o = zastava(&["--input", bad, "convert"]);
    assert_eq!(o.code, 2);
    assert!(json_out(&o)["error"].is_string());
}

#[test]
fn bracket_of_generators() {
    let input = r#"{"root_system":{"type":"A1"},"alpha":[1],"f":"w[1,1]","g":"y[1,1]"}"#;
    let o = zastava(&["--input", input, "bracket"]);
    assert_eq!(o.code, 0);
    assert_eq!(json_out(&o)["bracket"], "y[1,1]");
}

#[test]
fn jacobi_and_negative_control() {
    let input = r#"{"root_system":{"type":"A2"},"alpha":[1,1]}"#;
    assert_eq!(zastava(&["--input", input, "jacobi"]).code, 0);
    assert_eq!(zastava(&["--input", input, "jacobi", "--negative-control"]).code, 1);
}

#[test]
fn superpotential_operations() {
    let input = r#"{"params":{"root_system":{"type":"B2"},"alpha":[1,1],"h_alpha":[{"re":0.3},{"re":-0.2,"im":0.1}]},"w":[[{"re":1.5,"im":0.2}],[{"re":-0.7,"im":1.1}]]}"#;
    for op in ["eval", "critical", "defect", "compare", "exponents"] {
        let o = zastava(&["--input", input, "--variant", "++", "superpotential", op]);
        assert_eq!(o.code, 0, "{op}: {}", o.stdout);
    }
    let v = json_out(&zastava(&["--input", input, "--variant", "(-,-)", "superpotential", "exponents"]));
    assert!(v["log_derivative_mismatch"].as_f64().unwrap() < 1e-12);
}

#[test]
fn check_is_deterministic() {
    let args = ["--seed", "7", "check", "--only", "roundtrip", "--trials", "20"];
    let a = zastava(&args);
    let b = zastava(&args);
    assert_eq!(a.code, 0);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(json_out(&a)["summary"]["passed"], 20);
}

#[test]
fn check_negative_control_fails() {
    let o = zastava(&["check", "--negative-control", "--trials", "1"]);
    assert_eq!(o.code, 1);
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_zastava");
    let ok = std::process::Command::new(bin).args(["--input", EXAMPLE, "convert"]).output().unwrap();
    assert!(ok.status.success());
    let bad = std::process::Command::new(bin)
        .args(["--input", "{not json", "convert"])
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
}

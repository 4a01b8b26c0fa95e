use serde_json::{json, Value};
use std::path::Path;
use std::process::{Command, Output};

fn tropr(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tropr")).args(args).env_remove("TROPR_PRECISION").output().expect("binary runs")
}

fn stdout_json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&o.stdout)))
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn write(dir: &Path, name: &str, v: &Value) -> String {
    let p = dir.join(name);
    std::fs::write(&p, serde_json::to_string(v).unwrap()).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn ybe_suite_passes_on_a1() {
    let dir = tempfile::tempdir().unwrap();
    let rd = dir.path().to_str().unwrap();
    let o = tropr(&["verify", "--suite", "ybe", "--family", "A1", "--n", "3", "--cases", "100", "--seed", "7", "--replay-dir", rd]);
    let text = String::from_utf8_lossy(&o.stdout);
    assert_eq!(code(&o), 0, "{text}");
    assert!(text.contains("100/100 pass"), "{text}");
}

#[test]
fn theorem_suite_passes_on_d1() {
    let o = tropr(&["verify", "--suite", "theorem", "--family", "D1", "--n", "3", "--cases", "25", "--seed", "1", "--format", "json"]);
    assert_eq!(code(&o), 0);
    let r = stdout_json(&o);
    assert_eq!(r["passed"], 25);
    assert_eq!(r["failed"], 0);
    assert!(r["first_failure"].is_null());
}

#[test]
fn unknown_suite_lists_the_suites() {
    let o = tropr(&["verify", "--suite", "nonsense"]);
    assert_eq!(code(&o), 2);
    let err = String::from_utf8_lossy(&o.stderr);
    for s in ["inversion", "fermion-identities", "vertex", "ud"] {
        assert!(err.contains(s), "{err}");
    }
}

#[test]
fn reports_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let p = dir.path().join(name);
        let o = tropr(&["verify", "--suite", "sigma", "--n", "4", "--cases", "30", "--seed", "11", "--format", "json", "--output", p.to_str().unwrap()]);
        assert_eq!(code(&o), 0);
        std::fs::read(p).unwrap()
    };
    assert_eq!(run("a.json"), run("b.json"));
    let o = tropr(&["verify", "--suite", "uv", "--n", "3", "--cases", "5", "--format", "csv"]);
    let text = String::from_utf8_lossy(&o.stdout);
    assert!(text.starts_with("suite,family,n,seed,mode,cases,passed,failed,first_failure\nuv,D1,3,0,exact,5,5,0,"), "{text}");
}

#[test]
fn r_apply_inline_and_from_file() {
    let o = tropr(&["r-apply", "--family", "D1", "--n", "3", "--x", "[1,2,3,4,5]", "--y", "[6,7,8,9,10]", "--checks"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let r = stdout_json(&o);
    assert_eq!(r["x"]["family"], "D1");
    assert!(r["checks"].as_array().unwrap().iter().all(|c| c["passed"] == true));

    let dir = tempfile::tempdir().unwrap();
    let case = json!({
        "x": {"family": "A1", "n": 3, "coords": ["1", "2", "3"]},
        "y": {"family": "A1", "n": 3, "coords": ["1/2", "5", "7"]},
        "z": {"family": "A1", "n": 3, "coords": ["4", "1/3", "2"]},
        "replay": "tropr r-apply --checks --input <file>",
    });
    let f = write(dir.path(), "case.json", &case);
    let o = tropr(&["r-apply", "--input", &f, "--checks"]);
    assert_eq!(code(&o), 0);
    let names: Vec<String> = stdout_json(&o)["checks"].as_array().unwrap().iter().map(|c| c["name"].as_str().unwrap().to_string()).collect();
    for n in ["inversion", "positivity", "toda", "lax", "ybe"] {
        assert!(names.contains(&n.to_string()), "{names:?}");
    }
    let o = tropr(&["r-apply", "--input", &f, "--checks", "--mode", "numeric", "--precision", "128"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn bad_inputs_exit_with_two() {
    assert_eq!(code(&tropr(&["r-apply", "--x", "[1,2]", "--y", "[1,2]"])), 2);
    assert_eq!(code(&tropr(&["r-apply", "--family", "A1", "--n", "2", "--x", "[1,0]", "--y", "[1,2]"])), 2);
    assert_eq!(code(&tropr(&["bilinear", "residuals", "--input", "/nonexistent/data.json"])), 2);
    let o = Command::new(env!("CARGO_BIN_EXE_tropr"))
        .args(["verify", "--suite", "inversion", "--cases", "1"])
        .env("TROPR_PRECISION", "16")
        .output()
        .unwrap();
    assert_eq!(code(&o), 2);
}

#[test]
fn solve_then_verify_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let lambda = json!({"family": "D1", "n": 3, "coords": ["2", "3", "1", "5", "7"]});
    let kappa = json!({"family": "D1", "n": 3, "coords": ["1/2", "4", "1", "9", "2"]});
    let free = json!({
        "n": 3, "N": ["3/2"], "W": ["2"],
        "tau1": ["1", "2", "3", "5"], "tau2": ["2", "1", "7", "1/3"], "tau3": ["4", "1", "1", "2"],
        "lambda": lambda, "kappa": kappa, "alpha": "5/3", "beta": "2",
    });
    let input = write(dir.path(), "free.json", &free);
    let data = dir.path().join("data.json");
    let o = tropr(&["bilinear", "solve", "--n", "3", "--input", &input, "--output", data.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let d = data.to_str().unwrap();
    let o = tropr(&["bilinear", "residuals", "--input", d]);
    assert_eq!(code(&o), 0);
    let r = stdout_json(&o);
    assert_eq!(r["residuals"].as_array().unwrap().len(), 16);
    assert!(r["residuals"].as_array().unwrap().iter().all(|x| x["residual"] == "0"));
    let o = tropr(&["bilinear", "verify-theorem", "--input", d]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));

    let mut broken: Value = serde_json::from_str(&std::fs::read_to_string(&data).unwrap()).unwrap();
    broken["tau"][4][0] = json!("12345");
    let b = write(dir.path(), "broken.json", &broken);
    let o = tropr(&["bilinear", "verify-theorem", "--input", &b]);
    assert_eq!(code(&o), 1);
    assert_eq!(stdout_json(&o)["passed"], false);
}

fn grid() -> Value {
    json!({
        "n": 3, "K": "7", "L": "2", "a": ["5"],
        "eta": [["1/9", 1], ["-1/9", -1]],
        "reduction": {"b": ["1/2"], "p": ["3"], "c": ["0+2/3i"], "p_prime": ["3"]},
    })
}

#[test]
fn exact_reduction_and_assignment() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(dir.path(), "grid.json", &grid());
    let o = tropr(&["tau", "reduce", "--spec", &spec]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let r = stdout_json(&o);
    let p: Vec<&str> = r["params"]["p"].as_array().unwrap().iter().map(|v| v.as_str().unwrap()).collect();
    assert!(p.contains(&"4"), "{p:?}");
    let q = r["params"]["q"][0].as_str().unwrap();
    assert!(q == "12/5" || q == "-12/5", "{q}");

    let params = write(dir.path(), "params.json", &r["params"]);
    let o = tropr(&["tau", "assign", "--spec", &spec, "--params", &params]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout_json(&o)["solution"], true);
    let o = tropr(&["tau", "eval", "--spec", &spec, "--params", &params, "--what", "F", "--charges", "0,-1,1"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout_json(&o)["F"].is_string());
    let o = tropr(&["tau", "eval", "--spec", &spec, "--params", &params, "--what", "identities"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
}

#[test]
fn numeric_reduction_matches_exact_partner() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(dir.path(), "grid.json", &grid());
    let o = tropr(&["tau", "reduce", "--spec", &spec, "--mode", "numeric"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let r = stdout_json(&o);
    let p: Vec<f64> = r["params"]["p"].as_array().unwrap().iter().map(|v| v.as_str().unwrap().parse().unwrap()).collect();
    assert!(p.iter().any(|v| (v - 4.0).abs() < 1e-30), "{p:?}");
}

#[test]
fn vertex_run_with_tau_check_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    let el = |v: [&str; 5]| json!({"family": "D1", "n": 3, "coords": v});
    let b = json!({
        "west": [el(["1", "2", "3", "4", "5"]), el(["2", "1/3", "1", "7", "1"]), el(["9", "1", "1", "1", "1"])],
        "north": [el(["6", "7", "8", "9", "10"]), el(["1/2", "1", "3", "1", "2"])],
    });
    let bp = write(dir.path(), "b.json", &b);
    let field = json!({
        "n": 3, "K": ["7", "9"], "L": ["2", "6"], "a": ["5"],
        "base": [["1/11", 1], ["-1/11", -1]],
        "params": {"b": ["1/2"], "c": [], "p": ["3", "4"], "q": []},
    });
    let fp = write(dir.path(), "field.json", &field);
    let prefix = dir.path().join("dump");
    let o = tropr(&["vertex", "run", "--boundary", &bp, "--window", "2x3", "--tau-check", "--field", &fp, "--csv", prefix.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}{}", String::from_utf8_lossy(&o.stdout), String::from_utf8_lossy(&o.stderr));
    let r = stdout_json(&o);
    assert_eq!(r["state"]["cols"], 2);
    assert_eq!(r["state"]["rows"], 3);
    assert_eq!(r["tau_check"]["faces"], 25);
    let edges = std::fs::read_to_string(dir.path().join("dump-edges.csv")).unwrap();
    // 3 rows of 3 horizontal edges and 2 columns of 4 vertical edges.
    assert_eq!(edges.lines().count(), 1 + 9 + 8);
    let faces = std::fs::read_to_string(dir.path().join("dump-faces.csv")).unwrap();
    assert_eq!(faces.lines().count(), 1 + 25);

    let o = tropr(&["vertex", "run", "--boundary", &bp, "--window", "3x3"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn max_plus_commands() {
    let o = tropr(&["trop", "apply", "--family", "A1", "--n", "2", "--x", "[0,1]", "--y", "[1,0]"]);
    assert_eq!(code(&o), 0);
    let r = stdout_json(&o);
    assert_eq!(r["x"]["coords"], json!(["0", "1"]));
    assert_eq!(r["inverse_ok"], true);

    let o = tropr(&["trop", "ybe", "--family", "D1", "--n", "3", "--x", "[3,2,1,2,3]", "--y", "[1,0,1,2,0]", "--z", "[0,-1,0,1,-2]"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));

    let o = tropr(&["trop", "ud-check", "--family", "D1", "--n", "3", "--x", "[1,-2,0,3,1]", "--y", "[0,2,-1,1,2]", "--eps", "0.01,0.001"]);
    assert_eq!(code(&o), 0);
    let r = stdout_json(&o);
    assert_eq!(r["rows"].as_array().unwrap().len(), 2);
    assert!(r["rows"].as_array().unwrap().iter().all(|row| row["within_bound"] == true));
}

#[test]
fn identities_replay_format() {
    let dir = tempfile::tempdir().unwrap();
    let case = json!({
        "params": {"b": ["2"], "c": ["-1/3"], "p": ["1/2", "5/4", "3"], "q": ["-2"]},
        "x": [["1/6", 1], ["2/9", -2]],
        "odd": [["1/5", 1], ["-1/5", -1]],
        "y": [["3/8", 1], ["-3/8", -1]],
        "u": ["7", "-5", "11/3"],
        "c": "7/2",
    });
    let f = write(dir.path(), "case.json", &case);
    let o = tropr(&["tau", "identities", "--input", &f]);
    assert_eq!(code(&o), 0, "{}{}", String::from_utf8_lossy(&o.stdout), String::from_utf8_lossy(&o.stderr));
    let o = tropr(&["tau", "identities", "--input", &f, "--mode", "numeric"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
}

use std::path::PathBuf;
use std::process::Command;

use cxsq::cost::CostReport;
use cxsq::library::builtin;
use cxsq::scheme::from_json;

fn cxsq(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_cxsq"))
        .args(args)
        .output()
        .expect("binary runs");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn scratch(name: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR"));
    dir.join(name)
}

#[test]
fn list_names_all_builtins() {
    let (code, out, _) = cxsq(&["list"]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().count(), 12);
    assert!(out.lines().any(|l| l.starts_with("div_via_conjugate_mul ")));
}

#[test]
fn show_prints_erratum() {
    let (code, out, _) = cxsq(&["show", "div_eq8_as_printed"]);
    assert_eq!(code, 0);
    assert!(out.contains("erratum:"));
    assert!(out.contains("stage 0: linear 8x4"));
}

#[test]
fn eval_as_printed_square() {
    let (code, out, err) = cxsq(&["eval", "square_eq6_as_printed", "--inputs", "0,1"]);
    assert_eq!(code, 0);
    assert_eq!(out, "1, 0\n");
    assert_eq!(err.lines().count(), 1);
    assert!(err.starts_with("warning: square_eq6_as_printed"));
    let (_, out, err) = cxsq(&["eval", "square_logan_corrected", "--inputs", "0,1"]);
    assert_eq!(out, "-1, 0\n");
    assert!(err.is_empty());
}

#[test]
fn eval_division_prints_canonical_rationals() {
    // (1 + 2j) / (3 - 4j) = -1/5 + 2/5 j
    let (code, out, _) = cxsq(&["eval", "div_direct", "--inputs", "1,2,3,-4"]);
    assert_eq!(code, 0);
    assert_eq!(out, "-1/5, 2/5\n");
}

#[test]
fn audit_json_parses_back() {
    let (code, out, _) = cxsq(&["audit", "mul_eq7", "--json"]);
    assert_eq!(code, 0);
    let c: CostReport = serde_json::from_str(&out).unwrap();
    assert_eq!((c.adders, c.squarers, c.shifts), (14, 6, 2));
}

#[test]
fn export_json_reloads_via_file_argument() {
    let path = scratch("mul_gauss.json");
    let p = path.to_str().unwrap();
    let (code, out, _) = cxsq(&["export", "mul_gauss", "--format", "json", "--out", p]);
    assert_eq!(code, 0);
    assert!(out.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(
        from_json(&text).unwrap(),
        builtin("mul_gauss").unwrap().scheme
    );

    let at = format!("@{p}");
    let (code, out, _) = cxsq(&["verify", &at, "--against", "mul", "--exhaustive", "2"]);
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("PASS (exhaustive R=2: 625 points, 0 skipped)"));
    let (_, out, _) = cxsq(&["audit", &at]);
    assert_eq!(out, "adders=5 multipliers=3\n");
}

#[test]
fn file_arguments_report_parse_errors() {
    let path = scratch("broken.json");
    std::fs::write(
        &path,
        r#"{"name": "x", "inputs": ["a"], "outputs": ["b"], "stages": [{"kind": "cube"}]}"#,
    )
    .unwrap();
    let at = format!("@{}", path.display());
    let (code, _, err) = cxsq(&["show", &at]);
    assert_eq!(code, 2);
    assert_eq!(err.lines().count(), 1);
    assert!(err.starts_with("error:"));

    let (code, _, err) = cxsq(&["show", "@/nonexistent/scheme.json"]);
    assert_eq!(code, 2);
    assert!(err.contains("cannot read"));
}

#[test]
fn width_mismatch_in_file_is_rejected() {
    let path = scratch("mismatch.json");
    std::fs::write(
        &path,
        r#"{"name": "m", "inputs": ["a", "b"], "outputs": ["c"],
            "stages": [{"kind": "linear", "rows": 1, "cols": 3, "entries": [["1", "1", "1"]]}]}"#,
    )
    .unwrap();
    let at = format!("@{}", path.display());
    let (code, _, err) = cxsq(&["audit", &at]);
    assert_eq!(code, 2);
    assert!(err.starts_with("error:"), "{err}");
}

#[test]
fn export_dot_is_a_digraph() {
    let (code, out, _) = cxsq(&["export", "square_logan_corrected", "--format", "dot"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("digraph"));
    assert!(out.trim_end().ends_with('}'));
    assert_eq!(out.matches("label=\"sq\"").count(), 3, "{out}");
}

#[test]
fn sweep_json_and_overflow_points() {
    let (code, out, _) = cxsq(&[
        "sweep",
        "div_logan_corrected",
        "--fixed",
        "32,8",
        "--range",
        "2",
        "--json",
    ]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["points"], 625);
    assert_eq!(v["skipped"], 25);

    let (code, out, _) = cxsq(&["sweep", "mul_eq7", "--fixed", "8,0", "--range", "6"]);
    assert_eq!(code, 3);
    assert!(out.contains("failed at"));
}

#[test]
fn unknown_scheme_and_bad_usage() {
    let (code, _, err) = cxsq(&["audit", "cube"]);
    assert_eq!(code, 2);
    assert_eq!(err, "error: unknown built-in scheme \"cube\"\n");
    let (code, _, _) = cxsq(&["verify", "mul_eq7", "--against", "cube"]);
    assert_eq!(code, 2);
    let (code, _, _) = cxsq(&["verify", "mul_eq7", "--against", "square"]);
    assert_eq!(code, 2);
}

use std::io::Write;
use std::process::{Command, Stdio};

fn run(args: &[&str], input: &str) -> (String, String, i32) {
    let mut child = Command::new(env!("CARGO_BIN_EXE_accordion"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.as_mut().unwrap().write_all(input.as_bytes()).unwrap();
    let out = child.wait_with_output().unwrap();
    (
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
        out.status.code().unwrap_or(-1),
    )
}

#[test]
fn facets_and_nests_agree() {
    let input = r#"{"n":5,"diagonals":[[1,5],[1,7]]}"#;
    let (facets, _, code) = run(&["facets"], input);
    assert_eq!(code, 0);
    let (nests, _, code) = run(&["nests"], input);
    assert_eq!(code, 0);
    let facets: Vec<serde_json::Value> = serde_json::from_str(&facets).unwrap();
    let nests: Vec<serde_json::Value> = serde_json::from_str(&nests).unwrap();
    assert_eq!(facets.len(), 5);
    assert_eq!(nests.len(), 5);
}

#[test]
fn phi_psi_round_trip_is_byte_stable() {
    let input = r#"{"n":5,"diagonals":[[1,5],[5,9]]}"#;
    let (facets, _, _) = run(&["facets"], input);
    let facets: Vec<serde_json::Value> = serde_json::from_str(&facets).unwrap();
    for facet in facets {
        let envelope = format!(
            r#"{{"dissection":{input},"facet":{facet}}}"#,
        );
        let (phi_out, _, code) = run(&["phi"], &envelope);
        assert_eq!(code, 0, "{phi_out}");
        let nest = serde_json::from_str::<serde_json::Value>(&phi_out).unwrap()["nest"].clone();
        let back = format!(r#"{{"dissection":{input},"nest":{nest}}}"#);
        let (psi_out, _, code) = run(&["psi"], &back);
        assert_eq!(code, 0, "{psi_out}");
        let got = serde_json::from_str::<serde_json::Value>(&psi_out).unwrap()["facet"].clone();
        assert_eq!(got.to_string(), facet.to_string());
    }
}

#[test]
fn trace_flag_adds_trace() {
    let input = r#"{"dissection":{"n":4,"diagonals":[[1,5]]},"facet":[[2,6]]}"#;
    let (plain, _, _) = run(&["phi"], input);
    assert!(!plain.contains("trace"));
    let (traced, _, _) = run(&["phi", "--trace"], input);
    let v: serde_json::Value = serde_json::from_str(&traced).unwrap();
    assert!(v["trace"].as_array().is_some_and(|t| !t.is_empty()));
}

#[test]
fn verify_reports_summary_and_json() {
    let (stdout, stderr, code) = run(&["verify", "--max-n", "5"], "");
    assert_eq!(code, 0);
    assert!(stderr.contains("15 dissections, 0 failures"), "{stderr}");
    let report: serde_json::Value = serde_json::from_str(&stdout).unwrap();
    assert_eq!(report["instances"], 15);
    assert_eq!(report["failures"], 0);
}

#[test]
fn render_writes_svg_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.svg");
    let (_, _, code) = run(
        &["render", "--svg", path.to_str().unwrap()],
        r#"{"n":4,"diagonals":[[1,5]]}"#,
    );
    assert_eq!(code, 0);
    let svg = std::fs::read_to_string(&path).unwrap();
    assert_eq!(svg.matches("<circle").count(), 8);
}

#[test]
fn malformed_input_exits_one() {
    let (_, stderr, code) = run(&["facets"], "{not json");
    assert_eq!(code, 1);
    assert!(stderr.contains("malformed"), "{stderr}");

    let (_, stderr, code) = run(&["facets"], r#"{"n":4,"diagonals":[[1,2]]}"#);
    assert_eq!(code, 1);
    assert!(stderr.contains("[1,2]"), "{stderr}");
}

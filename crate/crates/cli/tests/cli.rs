use std::path::PathBuf;
use std::process::{Command, Output};

fn gcflag(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gcflag")).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn golden(name: &str) -> String {
    let path: PathBuf = [env!("CARGO_MANIFEST_DIR"), "tests", "golden", name].iter().collect();
    std::fs::read_to_string(path).unwrap()
}

fn assert_golden(args: &[&str], name: &str) {
    let out = gcflag(args);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(stdout(&out), golden(name), "{args:?}");
}

#[test]
fn markdown_goldens() {
    assert_golden(&["decompose", "--type", "B", "--rank", "3", "--theta", "3"], "decompose_b3_theta3.md");
    assert_golden(&["decompose", "--type", "B2", "--theta", "1"], "decompose_b2_theta1.md");
    assert_golden(&["decompose", "--type", "D4", "--sigma-minus-theta", "1,2"], "decompose_d4_12.md");
    assert_golden(&["classify", "--type", "A3", "--sigma-minus-theta", "1,2"], "classify_a3_12.md");
    assert_golden(&["classify", "--type", "B3", "--theta", "3"], "classify_b3_theta3.md");
    assert_golden(&["classify", "--type", "C4", "--sigma-minus-theta", "2,4"], "classify_c4_24.md");
    assert_golden(&["roots", "--type", "G2"], "roots_g2.md");
}

#[test]
fn json_is_byte_identical_across_runs() {
    for args in [
        &["classify", "--type", "D5", "--sigma-minus-theta", "1,2", "--format", "json"][..],
        &["decompose", "--type", "E6", "--sigma-minus-theta", "1,5", "--format", "json"][..],
        &["verify", "--type", "A3", "--theta", "3", "--oracle", "--format", "json"][..],
    ] {
        let a = gcflag(args);
        let b = gcflag(args);
        assert_eq!(a.status.code(), Some(0));
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn json_reports_carry_schema_and_one_based_indices() {
    let out = gcflag(&["decompose", "--type", "B3", "--theta", "3", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["schema"], "gcflag.decompose/v1");
    assert_eq!(v["theta"], serde_json::json!([3]));
    assert_eq!(v["sigma_minus_theta"], serde_json::json!([1, 2]));
    assert_eq!(v["components"].as_array().unwrap().len(), 4);

    let out = gcflag(&["roots", "--type", "B", "--rank", "3", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["count"], 9);
    assert_eq!(v["positive_roots"][8]["label"], "α1+2α2+2α3");
}

#[test]
fn verify_exit_codes() {
    let ok = gcflag(&["verify", "--type", "B2", "--theta", "1", "--oracle"]);
    assert_eq!(ok.status.code(), Some(0));
    assert!(stdout(&ok).contains("0 disagreements"));

    let a2 = gcflag(&["verify", "--type", "A2", "--oracle", "--format", "json"]);
    assert_eq!(a2.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&a2.stdout).unwrap();
    assert_eq!(v["ok"], true);
    assert_eq!(v["oracle"]["mode"], "full");

    let e6 = gcflag(&["verify", "--type", "E6", "--sigma-minus-theta", "1,5", "--oracle"]);
    assert_eq!(e6.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&e6.stderr).contains("rank <= 4"));

    let e7 = gcflag(&["verify", "--type", "E7", "--sigma-minus-theta", "1,2"]);
    assert_eq!(e7.status.code(), Some(0));
    assert!(stdout(&e7).contains("63 positive roots"));
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        &["roots", "--type", "C", "--rank", "2"][..],
        &["roots", "--type", "Q", "--rank", "2"][..],
        &["decompose", "--type", "B3", "--theta", "4"][..],
        &["decompose", "--type", "B3", "--theta", "long"][..],
        &["decompose", "--type", "B3", "--theta", "1", "--sigma-minus-theta", "2"][..],
        &["classify", "--type", "B3", "--format", "xml"][..],
        &["catalog", "--rows", "/nonexistent/rows.json"][..],
        &["frobnicate"][..],
    ] {
        assert_eq!(gcflag(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn catalog_builtin_and_custom_rows() {
    let out = gcflag(&["catalog"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("0 failed"));

    let dir = std::env::temp_dir().join(format!("gcflag-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let wrong = dir.join("wrong.json");
    std::fs::write(
        &wrong,
        r#"{"rows": [{"table": 3, "label": "F4/SU(3)×SU(2)×SU(1)", "type": "F4", "sigma_minus_theta": [3], "s": 3}]}"#,
    )
    .unwrap();
    let out = gcflag(&["catalog", "--rows", wrong.to_str().unwrap(), "--format", "json"]);
    assert_eq!(out.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["rows"][0]["computed_s"], 4);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn g2_descriptors() {
    let out = gcflag(&["decompose", "--type", "G2", "--sigma-minus-theta", "short", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["components"].as_array().unwrap().len(), 3);
    let out = gcflag(&["decompose", "--type", "G2", "--sigma-minus-theta", "long", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["components"].as_array().unwrap().len(), 2);
}

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn erw(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_erw"))
        .args(args)
        .env_remove("ERW_THREADS")
        .output()
        .expect("binary runs")
}

fn schema_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("schemas")
}

fn load_schema(name: &str) -> Value {
    let text = std::fs::read_to_string(schema_dir().join(name)).unwrap();
    serde_json::from_str(&text).unwrap()
}

fn type_matches(ty: &str, v: &Value) -> bool {
    match ty {
        "object" => v.is_object(),
        "array" => v.is_array(),
        "string" => v.is_string(),
        "boolean" => v.is_boolean(),
        "null" => v.is_null(),
        "integer" => v.is_i64() || v.is_u64(),
        "number" => v.is_number(),
        other => panic!("schema uses unsupported type {other}"),
    }
}

/// Checks the subset of JSON Schema used by the shipped schema files.
fn validate(schema: &Value, v: &Value, at: &str) {
    if let Some(r) = schema.get("$ref").and_then(Value::as_str) {
        return validate(&load_schema(r), v, at);
    }
    match schema.get("type") {
        Some(Value::String(t)) => assert!(type_matches(t, v), "{at}: expected {t}, got {v}"),
        Some(Value::Array(ts)) => assert!(
            ts.iter().any(|t| type_matches(t.as_str().unwrap(), v)),
            "{at}: {v} matches none of {ts:?}"
        ),
        _ => {}
    }
    if let Some(Value::Array(allowed)) = schema.get("enum") {
        assert!(allowed.contains(v), "{at}: {v} not in {allowed:?}");
    }
    if let (Some(min), Some(x)) = (schema.get("minimum").and_then(Value::as_f64), v.as_f64()) {
        assert!(x >= min, "{at}: {x} < {min}");
    }
    if let Value::Object(obj) = v {
        for key in schema
            .get("required")
            .and_then(Value::as_array)
            .into_iter()
            .flatten()
        {
            let key = key.as_str().unwrap();
            assert!(obj.contains_key(key), "{at}: missing required key {key}");
        }
        let props = schema.get("properties").and_then(Value::as_object);
        for (key, child) in obj {
            match props.and_then(|p| p.get(key)) {
                Some(s) => validate(s, child, &format!("{at}.{key}")),
                None => {
                    if let Some(extra) =
                        schema.get("additionalProperties").filter(|e| e.is_object())
                    {
                        validate(extra, child, &format!("{at}.{key}"));
                    }
                }
            }
        }
    }
    if let Value::Array(items) = v {
        if let Some(n) = schema.get("minItems").and_then(Value::as_u64) {
            assert!(items.len() as u64 >= n, "{at}: too few items");
        }
        if let Some(n) = schema.get("maxItems").and_then(Value::as_u64) {
            assert!(items.len() as u64 <= n, "{at}: too many items");
        }
        if let Some(s) = schema.get("items") {
            for (i, item) in items.iter().enumerate() {
                if !(item.is_null() && s.get("type").is_none()) {
                    validate(s, item, &format!("{at}[{i}]"));
                }
            }
        }
    }
}

fn stdout_json(out: &Output) -> Value {
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn verify_quick_passes() {
    let out = erw(&["verify", "--quick"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().count() >= 7);
    assert!(text.lines().all(|l| l.starts_with("pass  ")), "{text}");
}

#[test]
fn exact_example_rows() {
    let out = erw(&["exact", "--p", "0.75", "--q", "0.5", "--n", "2"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows, ["atom,weight", "-2,0.375", "0,0.25", "2,0.375"]);
}

#[test]
fn coeffs_degenerate_rows() {
    let out = erw(&["coeffs", "--p", "0.5", "--n", "3"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<Vec<&str>> = text
        .lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').collect())
        .collect();
    for (i, row) in rows.iter().enumerate() {
        assert_eq!(row[0], (i + 1).to_string());
        assert_eq!(row[1], "1");
        assert_eq!(row[2], (i + 1).to_string());
    }
}

#[test]
fn outputs_match_schemas() {
    let table = stdout_json(&erw(&[
        "--format", "json", "coeffs", "--p", "0.3", "--n", "20", "--stride", "7",
    ]));
    validate(&load_schema("table.schema.json"), &table, "coeffs");
    let table = stdout_json(&erw(&[
        "--format", "json", "qv-scan", "--p", "0.6", "--q", "0.5", "--n-list", "10,20", "--reps",
        "200",
    ]));
    validate(&load_schema("table.schema.json"), &table, "qv-scan");

    let summary = stdout_json(&erw(&[
        "simulate", "--p", "0.3", "--q", "0.5", "--n", "50", "--reps", "500", "--emit", "summary",
    ]));
    validate(
        &load_schema("simulate_summary.schema.json"),
        &summary,
        "summary",
    );

    let check = stdout_json(&erw(&["--format", "json", "verify", "--quick"]));
    validate(&load_schema("verify.schema.json"), &check, "verify");
    assert_eq!(check["passed"], Value::Bool(true));

    let dir = tempfile::tempdir().unwrap();
    for (p, mode) in [("0.3", "exact"), ("0.75", "exact"), ("0.3", "mc")] {
        let base = dir.path().join(format!("scan-{p}-{mode}.json"));
        let out = erw(&[
            "rate-scan",
            "--p",
            p,
            "--q",
            "0.5",
            "--n-list",
            "16,32,64,128",
            "--mode",
            mode,
            "--reps",
            "10000",
            "--out",
            base.to_str().unwrap(),
        ]);
        assert!(
            out.status.success(),
            "{}",
            String::from_utf8_lossy(&out.stderr)
        );
        let report: Value = serde_json::from_str(&std::fs::read_to_string(&base).unwrap()).unwrap();
        validate(
            &load_schema("rate_report.schema.json"),
            &report,
            "rate-scan",
        );
        let csv = std::fs::read_to_string(base.with_extension("csv")).unwrap();
        let body: Vec<&str> = csv.lines().filter(|l| !l.starts_with('#')).collect();
        assert_eq!(body[0], "n,w1,rate,ratio");
        assert_eq!(body.len(), 5);
    }
}

#[test]
fn exit_codes() {
    assert_eq!(erw(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(
        erw(&["exact", "--p", "0.3", "--q", "0.5"]).status.code(),
        Some(2)
    );
    assert_eq!(
        erw(&["exact", "--p", "0.3", "--q", "0.5", "--n", "3", "--center"])
            .status
            .code(),
        Some(2)
    );
    let limit = erw(&["exact", "--p", "0.3", "--q", "0.5", "--n", "20000"]);
    assert_eq!(limit.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&limit.stderr).contains("--dp-ceiling"));
    assert_eq!(
        erw(&["rate-scan", "--p", "0.3", "--q", "0.5", "--n-list", "16,32"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(erw(&["--help"]).status.code(), Some(0));
}

#[test]
fn thread_env_fallback_and_flag_agree() {
    let args = [
        "simulate", "--p", "0.6", "--q", "0.3", "--n", "200", "--reps", "3000", "--seed", "9",
    ];
    let via_env = Command::new(env!("CARGO_BIN_EXE_erw"))
        .args(args)
        .env("ERW_THREADS", "3")
        .output()
        .unwrap();
    let mut flagged = vec!["--threads", "1"];
    flagged.extend(args);
    assert!(via_env.status.success());
    assert_eq!(via_env.stdout, erw(&flagged).stdout);
    let bad = Command::new(env!("CARGO_BIN_EXE_erw"))
        .args(args)
        .env("ERW_THREADS", "many")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn out_flag_writes_same_bytes_as_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("nested/law.csv");
    let args = [
        "exact",
        "--p",
        "0.6",
        "--q",
        "0.2",
        "--n",
        "30",
        "--normalize",
        "--center",
    ];
    let mut with_out = vec!["--out", path.to_str().unwrap()];
    with_out.extend(args);
    assert!(erw(&with_out).status.success());
    assert_eq!(std::fs::read(&path).unwrap(), erw(&args).stdout);
}

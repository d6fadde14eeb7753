use std::path::PathBuf;

use pnhs_cli::run;
use serde_json::Value;

fn path(rel: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join(rel).display().to_string()
}

fn fixture(name: &str) -> String {
    path(&format!("tests/fixtures/{name}"))
}

/// Validator for the keywords used by `docs/output-schema.json`.
fn valid(root: &Value, schema: &Value, v: &Value) -> Result<(), String> {
    let Some(s) = schema.as_object() else { return Ok(()) };
    if let Some(r) = s.get("$ref").and_then(Value::as_str) {
        let name = r.strip_prefix("#/$defs/").ok_or(format!("unsupported ref {r}"))?;
        return valid(root, &root["$defs"][name], v);
    }
    if let Some(t) = s.get("type").and_then(Value::as_str) {
        let ok = match t {
            "object" => v.is_object(),
            "array" => v.is_array(),
            "string" => v.is_string(),
            "integer" => v.is_u64() || v.is_i64(),
            "null" => v.is_null(),
            _ => return Err(format!("unsupported type {t}")),
        };
        if !ok {
            return Err(format!("{v} is not {t}"));
        }
    }
    if let Some(min) = s.get("minimum").and_then(Value::as_i64) {
        if v.as_i64().is_some_and(|x| x < min) {
            return Err(format!("{v} < {min}"));
        }
    }
    if let Some(c) = s.get("const") {
        if c != v {
            return Err(format!("{v} != {c}"));
        }
    }
    if let Some(e) = s.get("enum").and_then(Value::as_array) {
        if !e.contains(v) {
            return Err(format!("{v} not in {e:?}"));
        }
    }
    if let Some(obj) = v.as_object() {
        for key in s.get("required").and_then(Value::as_array).into_iter().flatten() {
            if !obj.contains_key(key.as_str().unwrap()) {
                return Err(format!("missing {key}"));
            }
        }
        for (k, sub) in s.get("properties").and_then(Value::as_object).into_iter().flatten() {
            if let Some(x) = obj.get(k) {
                valid(root, sub, x).map_err(|e| format!("{k}: {e}"))?;
            }
        }
    }
    if let (Some(items), Some(arr)) = (s.get("items"), v.as_array()) {
        for x in arr {
            valid(root, items, x)?;
        }
    }
    if let Some(alts) = s.get("oneOf").and_then(Value::as_array) {
        let n = alts.iter().filter(|a| valid(root, a, v).is_ok()).count();
        if n != 1 {
            return Err(format!("{v} matches {n} oneOf branches"));
        }
    }
    for sub in s.get("allOf").and_then(Value::as_array).into_iter().flatten() {
        valid(root, sub, v)?;
    }
    if let (Some(cond), Some(then)) = (s.get("if"), s.get("then")) {
        if valid(root, cond, v).is_ok() {
            valid(root, then, v)?;
        }
    }
    Ok(())
}

fn output(args: &[&str]) -> Value {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = ["pnhs"].into_iter().chain(args.iter().copied()).chain(["--format", "json"]);
    run(argv, None, &mut out, &mut err);
    assert!(err.is_empty(), "{}", String::from_utf8_lossy(&err));
    serde_json::from_slice(&out).unwrap()
}

#[test]
fn json_outputs_match_schema() {
    let schema: Value = serde_json::from_str(&std::fs::read_to_string(path("../../docs/output-schema.json")).unwrap()).unwrap();
    let (mover, consumer) = (fixture("mover.net"), fixture("consumer.net"));
    let (x, home, not, pairs) = (fixture("x.sls"), fixture("h_home.sls"), fixture("h_not.sls"), fixture("pairs.sls"));
    let cases: Vec<Vec<&str>> = vec![
        vec!["check", "--net", &mover, "--from", &x, "--home", &home],
        vec!["check", "--net", &mover, "--from", &x, "--home", &not],
        vec!["witness", "--net", &mover, "--linear", &home],
        vec!["witness", "--net", &mover, "--linear", &pairs],
        vec!["reach", "--net", &mover, "--from", &x, "--to", &home],
        vec!["reach", "--net", &mover, "--from", &home, "--to", &x],
        vec!["minbasis", "--net", &consumer],
        vec!["minbasis", "--net", &mover, "--linear", &pairs],
        vec!["simulate", "--net", &mover, "--init", "2,0", "--steps", "1"],
        vec!["simulate", "--net", &mover, "--init", "1,0"],
    ];
    for args in cases {
        let v = output(&args);
        if let Err(e) = valid(&schema, &schema, &v) {
            panic!("{args:?}: {e}\n{v:#}");
        }
    }
    let bogus = serde_json::json!({ "version": "0", "command": "reach", "verdict": "home-space", "provenance": {} });
    assert!(valid(&schema, &schema, &bogus).is_err());
}

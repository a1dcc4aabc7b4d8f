use handleforge::cli::{materialize, run_with};
use handleforge::library::NAMES;
use proptest::prelude::*;
use serde_json::Value;
use std::path::Path;

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("handleforge").chain(args.iter().copied());
    let code = run_with(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn json(args: &[&str]) -> Value {
    let (code, out, err) = run(args);
    assert_eq!(code, 0, "{args:?}: {err}");
    serde_json::from_str(&out).unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn cube_reports() {
    let v = json(&["validate", "--example", "cube"]);
    assert_eq!(v["schema"], "handleforge-validation/1");
    assert_eq!(v["valid"], true);
    let v = json(&["cycles", "--example", "cube", "-k", "1"]);
    assert_eq!(v["count"], 3);
    let v = json(&["handles", "--example", "cube"]);
    assert_eq!(v["counts"], serde_json::json!([1, 3, 3, 1]));
    let v = json(&["homology", "--example", "cube"]);
    assert_eq!(v["betti"], serde_json::json!([1, 3, 3, 1]));
    assert_eq!(v["euler"], 0);
    let v = json(&["pi1", "--example", "cube"]);
    assert_eq!(v["abelianization"]["betti"], 3);
}

#[test]
fn wielenberg_reports() {
    let v = json(&["cusps", "--example", "wielenberg", "--bound", "1"]);
    assert_eq!(v["count"], 3);
    for c in v["cusps"].as_array().unwrap() {
        assert_eq!(c["classification"]["verdict"], "torus");
        assert!(c["basis"]["meridian_length"].as_f64().unwrap() > 0.0);
        assert!(!c["slopes"].as_array().unwrap().is_empty());
    }
    let v = json(&["search", "--example", "wielenberg", "--bound", "1"]);
    assert!(!v["successes"].as_array().unwrap().is_empty());
}

#[test]
fn files_round_trip_through_the_command_line() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let v = json(&["examples", "--dir", path(d)]);
    assert_eq!(v["schema"], "handleforge-examples/1");
    for name in NAMES {
        let f = d.join(format!("{name}.json"));
        let v = json(&["validate", "--input", path(&f)]);
        assert_eq!(v["valid"], true, "{name}");
        assert!(v["complex"]["violations"].as_array().is_none_or(|a| a.is_empty()), "{name}");
        assert!(v["pairing"]["violations"].as_array().is_none_or(|a| a.is_empty()), "{name}");
    }
    let w = d.join("wielenberg.json");
    let v = json(&["fill", "--input", path(&w), "--slopes", path(&d.join("wielenberg-meridians.json"))]);
    assert_eq!(v["schema"], "handleforge-fill/1");
    assert!(v["certificate"]["verdict"].as_str().unwrap().starts_with("S³"));
    assert_eq!(v["link_exterior"].as_array().unwrap().len(), 3);
    assert!(v["trace"][0].as_str().unwrap().starts_with("1. "));
    let v = json(&["cusps", "--input", path(&w), "--geometry", path(&d.join("wielenberg-geometry.json"))]);
    assert!(v["cusps"][0]["basis"]["meridian_length"].is_number());
    let svg = d.join("w.svg");
    let (code, out, _) = run(&[
        "diagram",
        "--input",
        path(&w),
        "--layout",
        path(&d.join("wielenberg-layout.json")),
        "--slopes",
        path(&d.join("wielenberg-meridians.json")),
        "-o",
        path(&svg),
    ]);
    assert_eq!(code, 0);
    assert!(out.is_empty());
    assert!(std::fs::read_to_string(&svg).unwrap().contains("<svg"));
}

#[test]
fn materialized_files_match_the_command() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let written = materialize(a.path()).unwrap();
    json(&["examples", "--dir", path(b.path())]);
    for f in written {
        assert_eq!(std::fs::read(a.path().join(&f)).unwrap(), std::fs::read(b.path().join(&f)).unwrap(), "{f}");
    }
}

#[test]
fn output_is_deterministic() {
    let cmds: [&[&str]; 7] = [
        &["handles", "--example", "wielenberg"],
        &["pi1", "--example", "wielenberg"],
        &["cusps", "--example", "wielenberg", "--bound", "2"],
        &["search", "--example", "figure-eight", "--bound", "1"],
        &["diagram", "--example", "tesseract", "--format", "svg", "--view-axis", "x"],
        &["diagram", "--example", "rt1011", "--format", "json"],
        &["homology", "--example", "rt1011-double"],
    ];
    for args in cmds {
        let (c1, o1, _) = run(args);
        let (c2, o2, _) = run(args);
        assert_eq!((c1, c2), (0, 0), "{args:?}");
        assert_eq!(o1, o2, "{args:?}");
    }
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{ not json").unwrap();
    assert_eq!(run(&["validate", "--input", path(&bad)]).0, 2);
    assert_eq!(run(&["validate", "--input", path(&dir.path().join("missing.json"))]).0, 2);
    assert_eq!(run(&["frobnicate"]).0, 2);
    assert_eq!(run(&["homology", "--example", "no-such-example"]).0, 1);
    assert_eq!(run(&["cycles", "--example", "cube", "-k", "7"]).0, 2);
    assert_eq!(run(&["diagram", "--example", "cube", "--format", "bmp"]).0, 2);
    assert_eq!(run(&["diagram", "--example", "cube", "--view-axis", "w"]).0, 2);
    assert_eq!(run(&["diagram", "--example", "circle"]).0, 1);
    let (code, out, _) = run(&["--help"]);
    assert_eq!(code, 0);
    assert!(out.contains("diagram"));
    // a document without pairings needs --pairing
    let plain = dir.path().join("plain.json");
    let e = handleforge::library::by_name("cube").unwrap();
    std::fs::write(&plain, e.complex.to_document().to_json()).unwrap();
    assert_eq!(run(&["validate", "--input", path(&plain)]).0, 1);
    // and a file input without a layout cannot be drawn
    let full = dir.path().join("cube.json");
    std::fs::write(&full, handleforge::pairing::to_document(&e.complex, &e.pairing).to_json()).unwrap();
    assert_eq!(run(&["diagram", "--input", path(&full)]).0, 2);
    // an invalid pairing is reported, not a crash
    let mut doc: Value = serde_json::from_str(&std::fs::read_to_string(&full).unwrap()).unwrap();
    doc["pairings"][0]["target"] = Value::from("x2=1");
    std::fs::write(&full, doc.to_string()).unwrap();
    let (code, out, _) = run(&["validate", "--input", path(&full)]);
    assert_eq!(code, 1);
    assert_eq!(serde_json::from_str::<Value>(&out).unwrap()["valid"], false);
}

#[test]
fn budget_flag_is_reported() {
    let v = json(&["pi1", "--example", "wielenberg", "--budget", "0"]);
    assert_eq!(v["budget"], 0);
    assert_eq!(v["budget_exhausted"], true);
}

fn cube_document() -> String {
    let e = handleforge::library::by_name("cube").unwrap();
    handleforge::pairing::to_document(&e.complex, &e.pairing).to_json()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    // Damaged documents are rejected with a status, never a panic.
    #[test]
    fn damaged_documents_never_panic(cut in 0usize..4000, at in 0usize..4000, byte in any::<u8>()) {
        let mut doc = cube_document().into_bytes();
        let at = at % doc.len();
        doc[at] = byte;
        doc.truncate(cut.max(at + 1).min(doc.len()));
        let dir = tempfile::tempdir().unwrap();
        let f = dir.path().join("d.json");
        std::fs::write(&f, &doc).unwrap();
        for cmd in ["validate", "homology", "pi1", "cusps"] {
            let (code, _, _) = run(&[cmd, "--input", path(&f)]);
            prop_assert!((0..=2).contains(&code));
        }
    }

    #[test]
    fn edited_values_never_panic(k in 0usize..200, v in prop::sample::select(vec!["0", "-1", "2", "\"\"", "null", "[]", "\"x1=0\"", "\"v000\"", "99999999999"])) {
        let doc = cube_document();
        // swap the k-th scalar value for v
        let mut n = 0;
        let mut out = String::new();
        let mut chars = doc.char_indices().peekable();
        let mut done = false;
        while let Some((_, ch)) = chars.next() {
            out.push(ch);
            if !done && ch == ':' {
                if n == k {
                    while let Some(&(_, c)) = chars.peek() {
                        if c == ',' || c == '}' || c == '\n' || c == '{' || c == '[' { break; }
                        chars.next();
                    }
                    out.push(' ');
                    out.push_str(v);
                    done = true;
                }
                n += 1;
            }
        }
        let dir = tempfile::tempdir().unwrap();
        let f = dir.path().join("d.json");
        std::fs::write(&f, out).unwrap();
        for cmd in ["validate", "handles", "cusps"] {
            let (code, _, _) = run(&[cmd, "--input", path(&f)]);
            prop_assert!((0..=2).contains(&code));
        }
    }
}

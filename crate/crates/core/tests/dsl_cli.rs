//! End-to-end checks of the model-file DSL and the `gpd` binary: grammar
//! round-trips, validation diagnostics, verb verdicts, and exit codes.

use std::process::Command;

use groupoidal::dsl;

const SAMPLE: &str = r#"
# a fibration with singleton fibers over two points, and a set universe
groupoid B = discrete(2);
groupoid T = discrete(2);
functor Q: T -> B { x0 |-> x0; x1 |-> x1; }
fibration p = Q;
universe U = set(1);
"#;

#[test]
fn sample_file_round_trips_through_emit() {
    let model = dsl::parse(SAMPLE).unwrap();
    assert!(model.validate().is_empty());
    let text1 = dsl::emit(&model);
    let model2 = dsl::parse(&text1).unwrap();
    let text2 = dsl::emit(&model2);
    assert_eq!(text1, text2, "emit must be stable under reparsing");
    assert!(model2.fibration("p").is_ok());
    assert!(model2.universe("U").is_ok());
}

#[test]
fn broken_composition_table_parses_and_validation_cites_it() {
    let text = r#"
groupoid G {
    objects: a;
    mor f: a -> a;
    mor g: a -> a;
    comp f.f = g;
    comp g.f = f;
    comp f.g = f;
    comp g.g = f;
}
"#;
    let model = dsl::parse(text).expect("broken tables still parse");
    let violations = model.validate();
    assert!(
        !violations.is_empty(),
        "inconsistent table must fail validation"
    );
    assert!(
        violations.iter().any(|v| v.contains('f') || v.contains('g')),
        "diagnostic should name the offending morphisms: {violations:?}"
    );
}

#[test]
fn parse_errors_carry_location() {
    let err = dsl::parse("groupoid B = discrete(;").unwrap_err();
    let msg = err.to_string();
    assert!(
        msg.contains("parse error at 1:"),
        "location missing from: {msg}"
    );
}

fn gpd() -> Command {
    Command::new(env!("CARGO_BIN_EXE_gpd"))
}

fn write_sample() -> std::path::PathBuf {
    let path = std::env::temp_dir().join("gpd_cli_sample.gpd");
    std::fs::write(&path, SAMPLE).unwrap();
    path
}

#[test]
fn cli_exit_codes_follow_the_contract() {
    let f = write_sample();
    // pass = 0
    let out = gpd().args(["validate"]).arg(&f).output().unwrap();
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    // failed check = 1
    let out = gpd()
        .args(["check-univalent"])
        .arg(&f)
        .arg("p")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1), "{out:?}");
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(
        text.contains("outside the unit's essential image"),
        "false verdict must name a witness: {text}"
    );
    // error (unresolved name) = 2
    let out = gpd()
        .args(["check-univalent"])
        .arg(&f)
        .arg("nonexistent")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2), "{out:?}");
}

#[test]
fn cli_shape_census_json() {
    let out = gpd()
        .args(["shape", "K", "--emit", "json"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(
        v["report"]["nondegenerate_census"],
        serde_json::json!([2, 3, 2, 0])
    );
    let out = gpd()
        .args(["shape", "J2", "--emit", "json"])
        .output()
        .unwrap();
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(
        v["report"]["nondegenerate_census"],
        serde_json::json!([2, 2, 1, 0])
    );
}

#[test]
fn cli_completion_of_the_worked_example() {
    let f = write_sample();
    let out = gpd()
        .args(["complete"])
        .arg(&f)
        .args(["p", "--universe", "U", "--emit", "json"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["report"]["completed_base"]["objects"], 2);
    assert_eq!(v["report"]["completed_base"]["morphisms"], 4);
    assert_eq!(v["report"]["univalent"], true);
    assert_eq!(v["report"]["connecting_square_bm"], true);
}

#[test]
fn cli_verdicts_match_library_verdicts() {
    let f = write_sample();
    let model = dsl::parse(SAMPLE).unwrap();
    let p = model.fibration("p").unwrap();
    let b = groupoidal::error::Budget::new(1 << 16, 1 << 18);
    let lib = groupoidal::fib::is_univalent_fibration(&p, &b).unwrap();
    let out = gpd()
        .args(["check-univalent"])
        .arg(&f)
        .arg("p")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(if lib { 0 } else { 1 }));
}

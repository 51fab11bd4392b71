use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use twistverify::catalog::{operator_macros, Catalog, Lattice};
use twistverify::cli;
use twistverify::expr::parse_with_macros;
use twistverify::opalg::{realize, Context, Param};

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let mut full = vec!["twistverify"];
    full.extend_from_slice(args);
    let code = cli::run(full, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn binary(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_twistverify"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn shipped_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("catalog")
}

/// Copy of the shipped catalog with one file edited.
fn corrupted_catalog(file: &str, from: &str, to: &str) -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    for e in fs::read_dir(shipped_dir()).unwrap() {
        let p = e.unwrap().path();
        let text = fs::read_to_string(&p).unwrap();
        let name = p.file_name().unwrap();
        let text = if name == file {
            assert!(text.contains(from), "{from} not in {file}");
            text.replacen(from, to, 1)
        } else {
            text
        };
        fs::write(dir.path().join(name), text).unwrap();
    }
    dir
}

fn validate_report(path: &Path) -> serde_json::Value {
    let schema: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("schema/report.schema.json")).unwrap())
            .unwrap();
    let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap();
    let validator = jsonschema::validator_for(&schema).expect("schema compiles");
    let errors: Vec<String> = validator.iter_errors(&report).map(|e| e.to_string()).collect();
    assert!(errors.is_empty(), "{errors:#?}");
    report
}

#[test]
fn verify_one_twist_passes_and_writes_a_valid_report() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.json");
    let (code, out, _) = run(&["verify", "twist", "map_bh", "--order", "4", "--report", path.to_str().unwrap()]);
    assert_eq!(code, cli::EXIT_PASS, "{out}");
    assert!(out.contains("PASS"));
    let report = validate_report(&path);
    assert_eq!(report["schema_version"], 1);
    assert_eq!(report["config"]["order"], 4);
    let records = report["records"].as_array().unwrap();
    assert!(!records.is_empty());
    assert!(records.iter().all(|r| r["status"] == "pass" && r.get("residual").is_none()));
}

#[test]
fn reports_are_deterministic_apart_from_timing() {
    let dir = tempfile::tempdir().unwrap();
    let strip = |p: &Path| {
        let mut v: serde_json::Value = serde_json::from_str(&fs::read_to_string(p).unwrap()).unwrap();
        for r in v["records"].as_array_mut().unwrap() {
            r["millis"] = 0.into();
        }
        v.to_string()
    };
    let mut texts = Vec::new();
    for name in ["a.json", "b.json"] {
        let p = dir.path().join(name);
        let (code, ..) = run(&["verify", "algebra", "hopf", "uz_sl2_bc", "cl_sl2_be_bf", "--report", p.to_str().unwrap()]);
        assert_eq!(code, 0);
        texts.push(strip(&p));
    }
    assert_eq!(texts[0], texts[1]);
}

#[test]
fn corrupted_catalog_exits_one_naming_the_check() {
    let dir = corrupted_catalog("uz_sl2_ba.toml", "2*sinh(z*X)/z", "3*sinh(z*X)/z");
    let out = binary(&["--catalog", dir.path().to_str().unwrap(), "verify", "hopf", "twist", "uz_sl2_ba", "--no-report"]);
    assert_eq!(out.status.code(), Some(cli::EXIT_FAIL));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("FAIL hopf [uz_sl2_ba] coproduct_hom"), "{text}");
    assert!(text.contains("FAIL twist [map_bh"), "{text}");
}

#[test]
fn malformed_catalog_is_a_usage_error_with_location() {
    let dir = corrupted_catalog("map_bb.toml", "[definition]", "[definition\n");
    let out = binary(&["--catalog", dir.path().to_str().unwrap(), "list"]);
    assert_eq!(out.status.code(), Some(cli::EXIT_USAGE));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("map_bb.toml:"), "{err}");
}

#[test]
fn suspected_erratum_fails_unless_allowed() {
    let dir = corrupted_catalog("real_gd.toml", "- 1/4*t*(1 - 3", "- 1/2*t*(1 - 3");
    let cat = dir.path().to_str().unwrap();
    let strict = binary(&["--catalog", cat, "verify", "realization", "real_gd", "--no-report"]);
    assert_eq!(strict.status.code(), Some(cli::EXIT_FAIL));
    let text = String::from_utf8(strict.stdout).unwrap();
    assert!(text.contains("ERRATUM realization [real_gd]"), "{text}");
    assert!(text.contains("replace 1/2 by 1/4"), "{text}");
    let lenient = binary(&["--catalog", cat, "verify", "realization", "real_gd", "--no-report", "--allow-errata"]);
    assert_eq!(lenient.status.code(), Some(cli::EXIT_PASS));
}

#[test]
fn show_counts_brackets_and_coproducts() {
    let (code, out, _) = run(&["show", "uz_h4_fb"]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().filter(|l| l.trim_start().starts_with('[')).count(), 4, "{out}");
    assert_eq!(out.lines().filter(|l| l.trim_start().starts_with("Δ(")).count(), 4, "{out}");
}

#[test]
fn show_renders_the_canonical_operators() {
    let (code, out, _) = run(&["show", "real_ib"]);
    assert_eq!(code, 0);
    let ops: Vec<&str> = out.lines().filter(|l| l.trim_start().starts_with('c')).collect();
    assert_eq!(ops.len(), 6, "{out}");

    let cat = Catalog::shipped().unwrap();
    let real = realize(&cat, "real_ib", Param::Formal, Param::Formal).unwrap();
    let ctx = Context::new(Lattice::Space, Param::Formal, Param::Formal);
    let k = parse_with_macros("-t*Dx - m*x*Tx^-1 - m*sigma/2*Tx^-1", &operator_macros()).unwrap();
    let expected = ctx.eval(&k).unwrap();
    assert_eq!(real.op("cK"), &expected);
    assert!(out.contains(&format!("cK = {}", real.render(&expected))), "{out}");
}

#[test]
fn show_formats() {
    let (code, out, _) = run(&["show", "real_ib", "--format", "json"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["kind"], "realization");
    assert_eq!(v["items"].as_array().unwrap().len(), 8);
    let (_, latex, _) = run(&["show", "real_ib", "--format", "latex"]);
    assert!(latex.contains("\\sigma") && latex.contains("T_x^{-1}"), "{latex}");
    let (_, expanded, _) = run(&["show", "uz_sl2_bc", "--expand", "--order", "2"]);
    assert!(expanded.contains("Δ(Jm) mod z^2"), "{expanded}");
}

#[test]
fn unknown_entry_is_a_usage_error() {
    let (code, _, err) = run(&["show", "nope"]);
    assert_eq!(code, cli::EXIT_USAGE);
    assert!(err.contains("unknown catalog entry `nope`"));
    let (code, _, err) = run(&["verify", "twist", "nope", "--no-report"]);
    assert_eq!(code, cli::EXIT_USAGE, "{err}");
}

#[test]
fn usage_errors() {
    assert_eq!(run(&["verify"]).0, cli::EXIT_USAGE);
    assert_eq!(run(&["verify", "map_bh"]).0, cli::EXIT_USAGE);
    assert_eq!(run(&["verify", "twist", "--order", "0", "--no-report"]).0, cli::EXIT_USAGE);
    assert_eq!(run(&["verify", "lattice", "--m", "0", "--no-report"]).0, cli::EXIT_USAGE);
    assert_eq!(run(&["verify", "lattice", "--sigma", "x", "--no-report"]).0, cli::EXIT_USAGE);
    assert_eq!(run(&["list", "--kind", "widget"]).0, cli::EXIT_USAGE);
    assert_eq!(run(&["--help"]).0, cli::EXIT_PASS);
}

#[test]
fn unwritable_report_is_an_internal_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("missing/r.json");
    let (code, ..) = run(&["verify", "twist", "map_bb", "--report", path.to_str().unwrap()]);
    assert_eq!(code, cli::EXIT_INTERNAL);
}

#[test]
fn config_file_then_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("ci.toml");
    fs::write(&cfg, "id = \"ci\"\nkind = \"config\"\n\n[definition]\norder = 2\nsamples = [[\"1/2\", \"1/2\"]]\nm = \"1\"\n").unwrap();
    let report = dir.path().join("r.json");
    let args = ["verify", "twist", "map_bb", "--config", cfg.to_str().unwrap(), "--report", report.to_str().unwrap()];
    assert_eq!(run(&args).0, 0);
    let v = validate_report(&report);
    assert_eq!(v["config"]["order"], 2);
    assert_eq!(v["config"]["lattice"]["m"], "1");
    assert_eq!(v["config"]["samples"], serde_json::json!([["1/2", "1/2"]]));

    let mut with_flag = args.to_vec();
    with_flag.extend(["--order", "3"]);
    assert_eq!(run(&with_flag).0, 0);
    assert_eq!(validate_report(&report)["config"]["order"], 3);

    fs::write(&cfg, "id = \"ci\"\nkind = \"config\"\n\n[definition]\norder = \"two\"\n").unwrap();
    let (code, _, err) = run(&args);
    assert_eq!(code, cli::EXIT_USAGE);
    assert!(err.contains("ci.toml:5:"), "{err}");
}

#[test]
fn list_by_kind() {
    let (code, out, _) = run(&["list", "--kind", "twist"]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().count(), 10, "{out}");
    assert!(out.lines().all(|l| l.contains(" twist ")));
}

#[test]
fn sample_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g.csv");
    let (code, ..) = run(&["sample", "geometric", "--k", "1/2", "--nx", "4", "--nt", "3", "--out", path.to_str().unwrap()]);
    assert_eq!(code, 0);
    let mut rdr = csv::Reader::from_path(&path).unwrap();
    let rows: Vec<(f64, f64, f64)> = rdr.deserialize().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), 12);
    // (1 + σk)^{x/σ} e^{k²t/2m} at x = σ, t = 0.
    let (x, t, v) = rows[3];
    assert!((x - 0.1).abs() < 1e-15 && t == 0.0);
    assert!((v - 1.05).abs() < 1e-12, "{v}");
}

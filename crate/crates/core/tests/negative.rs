//! Deliberately broken inputs must be caught.

use std::path::Path;

use twistverify::catalog::Catalog;
use twistverify::driver::{Engine, Suite, SuiteConfig};
use twistverify::report::Status;

fn edited(id: &str, from: &str, to: &str) -> Catalog {
    let cat = Catalog::shipped().unwrap();
    let file = Path::new(env!("CARGO_MANIFEST_DIR")).join("catalog").join(format!("{id}.toml"));
    let text = std::fs::read_to_string(&file).unwrap();
    assert!(text.contains(from));
    cat.with_document(&file, &text.replacen(from, to, 1)).unwrap()
}

#[test]
fn overscaled_contraction_diverges() {
    let cat = edited(
        "con_da",
        r#"{ new = "Pp", old = "Jp", factor = "1", eps_power = 1 }"#,
        r#"{ new = "Pp", old = "Jp", factor = "1", eps_power = 2 }"#,
    );
    let report = Engine::new(&cat, SuiteConfig::default()).run(&[Suite::Contraction], &["con_da".into()]).unwrap();
    let failures: Vec<_> = report.failures(false).collect();
    assert!(!failures.is_empty(), "{:#?}", report.records);
    assert!(failures.iter().all(|r| r.finding.status == Status::Fail));
}

#[test]
fn wrong_coproduct_breaks_the_hopf_axioms() {
    let cat = edited("uz_sl2_bc", "tensor(1, Jp) + tensor(Jp, 1)", "tensor(1, Jp) + 2*tensor(Jp, 1)");
    let report = Engine::new(&cat, SuiteConfig::default()).run(&[Suite::Hopf], &["uz_sl2_bc".into()]).unwrap();
    let checks: Vec<&str> = report.failures(false).map(|r| r.finding.check.as_str()).collect();
    assert!(checks.contains(&"counit_left") || checks.contains(&"counit_right"), "{checks:?}");
}

#[test]
fn wrong_symmetry_multiplier_is_an_erratum() {
    let cat = edited("sym_lc", "2*t*Tt^-1", "3*t*Tt^-1");
    let report = Engine::new(&cat, SuiteConfig::default()).run(&[Suite::Symmetry], &["sym_lc".into()]).unwrap();
    let errata: Vec<_> = report.records.iter().filter(|r| r.finding.status == Status::ErratumSuspected).collect();
    assert!(!errata.is_empty());
    assert!(errata.iter().all(|r| r.finding.residual.is_some()));
    assert!(errata[0].finding.note.as_deref().unwrap().contains("replace 3 by 2"));
    assert!(!report.passed(false));
    assert!(report.passed(true));
}

#[test]
fn unverified_symmetry_is_skipped_by_the_lattice_suite() {
    let cat = edited("sym_lc", "2*t*Tt^-1", "3*t*Tt^-1");
    let report = Engine::new(&cat, SuiteConfig::default()).run(&[Suite::Lattice], &["sym_lc".into()]).unwrap();
    assert!(report.records.iter().any(|r| r.finding.note.as_deref() == Some("not exactly verified, skipped")));
}

use super::*;
use crate::expr::parse;

fn shipped() -> Catalog {
    Catalog::shipped().unwrap()
}

#[test]
fn shipped_catalog_loads() {
    let c = shipped();
    assert!(c.warnings.is_empty());
    assert_eq!(c.list(Some(Kind::Presentation)).len(), 14);
    assert_eq!(c.list(Some(Kind::Twist)).len(), 10);
    assert_eq!(c.list(Some(Kind::Contraction)).len(), 4);
    assert_eq!(c.list(Some(Kind::Realization)).len(), 7);
    assert_eq!(c.list(Some(Kind::Casimir)).len(), 3);
    assert_eq!(c.list(Some(Kind::SymmetryTable)).len(), 6);
}

#[test]
fn poincare_counts() {
    let c = shipped();
    let p = c.presentation("uz_poincare_db").unwrap();
    assert_eq!(p.generators.len(), 3);
    assert_eq!(p.brackets.len(), 3);
    assert_eq!(p.coproducts.len(), 3);
}

#[test]
fn jd_carries_b() {
    let c = shipped();
    let r = c.realization("real_jd").unwrap();
    assert_eq!(r.macros["b"], parse("m/2 - 2").unwrap());
    assert_eq!(r.lattice, Lattice::Time);
}

#[test]
fn unknown_entry() {
    assert_eq!(
        shipped().load("nonexistent").unwrap_err(),
        CatalogError::UnknownEntry("nonexistent".into())
    );
}

#[test]
fn every_entry_round_trips() {
    let c = shipped();
    for e in c.entries() {
        let text = c.serialize(&e.id).unwrap();
        let back = c.parse_document(&e.file, &text).unwrap_or_else(|err| panic!("{}: {err}\n{text}", e.id));
        assert_eq!(&back, e, "{}", e.id);
    }
}

#[test]
fn errors_cite_line() {
    let c = shipped();
    let e = c.load("uz_poincare_db").unwrap();
    let text = std::fs::read_to_string(&e.file).unwrap().replace("\"-Pm\"", "\"-Pq\"");
    let line = text.lines().position(|l| l.contains("-Pq")).unwrap() + 1;
    match c.parse_document(&e.file, &text).unwrap_err() {
        CatalogError::ValidationFailed { line: l, message, .. } => {
            assert_eq!(l, line);
            assert!(message.contains("Pq"), "{message}");
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn syntax_errors_cite_line() {
    let text = "id = \"x\"\nkind = \"presentation\"\npaper_label = \"\"\nsource_text = \"\"\n[definition]\nparameter = 3\n";
    match Catalog::from_sources(vec![("x.toml".into(), text.into())]).unwrap_err() {
        CatalogError::ValidationFailed { line, .. } => assert_eq!(line, 6),
        other => panic!("{other:?}"),
    }
}

#[test]
fn duplicate_ids_rejected() {
    let c = shipped();
    let e = c.load("borel_aa").unwrap();
    let text = std::fs::read_to_string(&e.file).unwrap();
    let err = Catalog::from_sources(vec![("a.toml".into(), text.clone()), ("b.toml".into(), text)]).unwrap_err();
    assert!(err.to_string().contains("duplicate id"));
}

#[test]
fn twist_with_missing_target_rejected() {
    let c = shipped();
    let e = c.load("map_dc").unwrap();
    let text = std::fs::read_to_string(&e.file).unwrap().replace("cl_poincare_dd_de", "cl_missing");
    assert!(c.parse_document(&e.file, &text).is_err());
}

#[test]
fn empty_catalog_warns() {
    let c = Catalog::from_sources(Vec::new()).unwrap();
    assert!(c.is_empty());
    assert_eq!(c.warnings.len(), 1);
}

#[test]
fn labels_cover_every_equation() {
    let labels = [
        "aaa", "aa", "ab", "ba", "bb", "bc", "bd", "be", "bf", "bg", "bh", "ca", "cb", "cc", "cd", "da", "db", "dc",
        "dd", "de", "fa", "fb", "fc", "fe", "fg", "ae", "ga", "gb", "gc", "gd", "ge", "gf", "gg", "ha", "hb", "hc",
        "hd", "he", "hf", "hg", "hi", "hk", "ia", "ib", "ja", "jb", "jc", "jd", "je", "jf", "jg", "ka", "kb", "kc",
        "kd", "ke", "kf", "kg", "la", "lb", "lc",
    ];
    // The joint space-time lattice equation is only the source of the two
    // semi-discrete limits.
    let out_of_scope = ["ac"];
    let c = shipped();
    for l in labels {
        let tag = format!("({l})");
        assert!(
            c.entries().any(|e| e.paper_label.contains(&tag)) || out_of_scope.contains(&l),
            "no entry for {tag}"
        );
    }
}

#[test]
fn presentations_build() {
    let c = shipped();
    for id in c.list(Some(Kind::Presentation)) {
        c.presentation(id).unwrap().build(id, EngineLimits::default()).unwrap();
    }
}

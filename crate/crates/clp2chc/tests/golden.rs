//! Golden translations against the reference encodings in tests/data.

use clp2chc::smtlib::{emit, parse_script, structurally_equal, Script, Style};
use clp2chc::syntax::parse_program;
use clp2chc::translator::translate_program;

fn translate(source: &str) -> Script {
    let db = parse_program(source).unwrap().database;
    translate_program(&db).unwrap().script
}

fn assert_golden(source: &str, golden: &str) {
    let script = translate(source);
    let reference = parse_script(golden).unwrap();
    assert!(
        structurally_equal(&script, &reference),
        "translation differs from golden.\n=== translated ===\n{}\n=== golden ===\n{golden}",
        emit(&script, Style::Modern),
    );
    // Both emission styles re-parse to the same script.
    for style in [Style::Modern, Style::Legacy] {
        let text = emit(&script, style);
        let reparsed = parse_script(&text).unwrap();
        assert!(
            structurally_equal(&script, &reparsed),
            "{style:?} emission changed the script:\n{text}"
        );
    }
}

#[test]
fn claire() {
    assert_golden(
        include_str!("data/claire.pl"),
        include_str!("data/claire.smt2"),
    );
}

#[test]
fn list_concat() {
    assert_golden(
        include_str!("data/list_concat.pl"),
        include_str!("data/list_concat.smt2"),
    );
}

#[test]
fn cities() {
    assert_golden(
        include_str!("data/cities.pl"),
        include_str!("data/cities.smt2"),
    );
}

#[test]
fn cities_differs_from_tightened_bound() {
    // Same program with the query bound changed must not compare equal.
    let script = translate(include_str!("data/cities_34.pl"));
    let reference = parse_script(include_str!("data/cities.smt2")).unwrap();
    assert!(!structurally_equal(&script, &reference));
}

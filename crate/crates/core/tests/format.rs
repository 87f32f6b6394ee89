mod common;

use std::fs;
use std::path::Path;

use gsip_lab::format::{parse_problem, serialize_problem, ParseErrorKind};
use gsip_lab::{builtin, builtin_problems, GsipProblem};
use proptest::prelude::*;

fn manifest(rel: &str) -> std::path::PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join(rel)
}

#[test]
fn golden_builtins() {
    for name in ["cex1", "cex2"] {
        let golden = fs::read_to_string(manifest(&format!("tests/golden/{name}.gsip"))).unwrap();
        assert_eq!(builtin(name).unwrap().to_text(), golden, "{name}");
    }
}

#[test]
fn problem_files_match_builtins() {
    for name in ["cex1", "cex2"] {
        let text = fs::read_to_string(manifest(&format!("problems/{name}.gsip"))).unwrap();
        assert_eq!(GsipProblem::parse(&text).unwrap(), builtin(name).unwrap(), "{name}");
    }
}

#[test]
fn every_problem_file_round_trips() {
    let mut seen = 0;
    for entry in fs::read_dir(manifest("problems")).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().and_then(|e| e.to_str()) != Some("gsip") {
            continue;
        }
        let doc = parse_problem(&fs::read_to_string(&path).unwrap()).unwrap();
        let text = serialize_problem(&doc);
        assert_eq!(parse_problem(&text).unwrap(), doc, "{}", path.display());
        assert_eq!(serialize_problem(&parse_problem(&text).unwrap()), text);
        GsipProblem::from_document(doc).unwrap();
        seen += 1;
    }
    assert!(seen >= 3);
}

#[test]
fn builtins_round_trip() {
    for p in builtin_problems() {
        assert_eq!(GsipProblem::parse(&p.to_text()).unwrap(), p);
    }
}

#[test]
fn h_order_is_kept() {
    let text = "problem \"two\"\nouter x in [0, 1]\ninner y in [0, 1]\nobjective: x\n\
                g: x - y\nh: y - x\nh: -y\n";
    let doc = parse_problem(text).unwrap();
    assert_eq!(doc.h[0].to_string(), "y - x");
    assert_eq!(doc.h[1].to_string(), "-y");
    let again = parse_problem(&serialize_problem(&doc)).unwrap();
    assert_eq!(again.h, doc.h);
    let hbar = GsipProblem::from_document(doc).unwrap().hbar().unwrap();
    assert_eq!(hbar.to_string(), "max(y - x, -y)");
}

#[test]
fn error_positions() {
    let err = parse_problem("problem \"p\"\nouter x in [0, 1]\nouter x in [0, 2]\n").unwrap_err();
    assert_eq!((err.line, err.column), (3, 7));
    assert!(matches!(err.kind, ParseErrorKind::DuplicateDeclaration(_)));

    let err = parse_problem("problem \"p\"\nouter x in [0, 1]\ninner y in [0, 1]\nobjective: x + z\ng: y\nh: y\n")
        .unwrap_err();
    assert_eq!((err.line, err.column), (4, 16));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn fuzzed_documents_round_trip(doc in common::arb_document()) {
        let text = serialize_problem(&doc);
        let back = parse_problem(&text).map_err(|e| TestCaseError::fail(format!("{e}\n{text}")))?;
        prop_assert_eq!(&back, &doc);
        prop_assert_eq!(serialize_problem(&back), text);
    }
}

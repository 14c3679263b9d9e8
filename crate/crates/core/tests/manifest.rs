mod common;

use std::path::PathBuf;

use proptest::prelude::*;
use uea_lab::families::example_z3;
use uea_lab::manifest::{parse_manifest, parse_unvalidated, render, Manifest, ManifestError};

use common::corpus;

fn corpus_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

#[test]
fn bundled_manifests_round_trip() {
    let mut seen = 0;
    for entry in std::fs::read_dir(corpus_dir()).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_none_or(|e| e != "uea") {
            continue;
        }
        let text = std::fs::read_to_string(&path).unwrap();
        let m = parse_manifest(&text).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        assert_eq!(parse_manifest(&render(&m)).unwrap(), m, "{}", path.display());
        seen += 1;
    }
    assert!(seen >= 4);
    let z3 = parse_manifest(&std::fs::read_to_string(corpus_dir().join("example_z3.uea")).unwrap()).unwrap();
    assert_eq!(z3.presentation().unwrap(), example_z3());
}

#[test]
fn invalid_corpus_is_rejected() {
    for entry in std::fs::read_dir(corpus_dir().join("invalid")).unwrap() {
        let path = entry.unwrap().path();
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(parse_manifest(&text).is_err(), "{}", path.display());
    }
}

#[test]
fn presentations_survive_rendering() {
    for (name, l) in corpus() {
        let m = Manifest::from_presentation(&l, Some(10), None);
        let text = render(&m);
        let parsed = parse_manifest(&text).unwrap_or_else(|e| panic!("{name}: {e}\n{text}"));
        assert_eq!(parsed, m, "{name}");
        assert_eq!(parsed.presentation().unwrap(), l, "{name}");
    }
}

proptest! {
    #[test]
    fn arbitrary_text_never_panics(text in "\\PC{0,200}") {
        let _ = parse_unvalidated(&text);
    }

    #[test]
    fn line_noise_reports_positions(lines in prop::collection::vec("[a-z0-9\\[\\],=*/+ -]{0,24}", 0..8)) {
        let text = format!("prime 3\ngen x1 1\ngen y2 2\n{}", lines.join("\n"));
        match parse_manifest(&text) {
            Ok(m) => prop_assert_eq!(parse_manifest(&render(&m)).unwrap(), m),
            Err(ManifestError::Parse { line, column, .. }) => {
                prop_assert!(line >= 1 && line <= text.lines().count().max(1));
                prop_assert!(column >= 1);
            }
            Err(ManifestError::Validation(r)) => prop_assert!(!r.is_valid()),
        }
    }
}

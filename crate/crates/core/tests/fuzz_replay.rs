//! Replays the checked-in fuzz seeds through the same properties as the fuzz targets.

use std::path::PathBuf;

use uea_lab::manifest::{parse_manifest, render};
use uea_lab::PrimeContext;

fn seeds(target: &str) -> Vec<(PathBuf, Vec<u8>)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus").join(target);
    let mut out: Vec<(PathBuf, Vec<u8>)> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let path = e.unwrap().path();
            let bytes = std::fs::read(&path).unwrap();
            (path, bytes)
        })
        .collect();
    out.sort();
    assert!(!out.is_empty(), "no seeds for {target}");
    out
}

#[test]
fn manifest_seeds() {
    let mut accepted = 0;
    for (path, bytes) in seeds("parse_manifest") {
        let Ok(text) = std::str::from_utf8(&bytes) else {
            continue;
        };
        if let Ok(m) = parse_manifest(text) {
            let again = parse_manifest(&render(&m)).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
            assert_eq!(again, m, "{}", path.display());
            accepted += 1;
        }
    }
    assert!(accepted >= 4);
}

#[test]
fn scalar_seeds() {
    for (path, bytes) in seeds("parse_scalar") {
        let Some((&p, rest)) = bytes.split_first() else {
            continue;
        };
        let ctx = PrimeContext::new([3, 5, 7, 11][p as usize % 4]).unwrap();
        let Ok(text) = std::str::from_utf8(rest) else {
            continue;
        };
        if let Ok(x) = ctx.parse(text) {
            assert!(ctx.is_local(&x), "{}", path.display());
            assert_eq!(ctx.parse(&x.to_string()).unwrap(), x, "{}", path.display());
        }
    }
}

//! Replays the checked-in fuzz corpus through both parsers with the same
//! invariants the fuzz targets assert.

use std::fs;
use std::path::PathBuf;

use gwsi::cli::{parse_source, parse_weights};

fn corpus(target: &str) -> Vec<(PathBuf, String)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus").join(target);
    let mut files: Vec<_> = fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|e| e.unwrap().path())
        .collect();
    files.sort();
    files.into_iter().filter_map(|p| String::from_utf8(fs::read(&p).unwrap()).ok().map(|t| (p, t))).collect()
}

#[test]
fn source_corpus() {
    let seeds = corpus("parse_source");
    assert!(seeds.len() >= 5);
    let mut accepted = 0;
    for (path, text) in seeds {
        if let Ok(spec) = parse_source(&text) {
            accepted += 1;
            let total: f64 = spec.pmf().iter().sum();
            assert!((total - 1.0).abs() <= 1e-9, "{}", path.display());
            assert_eq!(spec.sizes().len(), 4);
        }
    }
    assert!(accepted >= 4);
}

#[test]
fn weights_corpus() {
    let seeds = corpus("parse_weights");
    assert!(seeds.len() >= 4);
    for (path, text) in seeds {
        if let Ok(ws) = parse_weights(&text) {
            for w in ws {
                assert!(w.as_array().iter().all(|x| x.is_finite() && *x >= 0.0), "{}", path.display());
            }
        }
    }
}

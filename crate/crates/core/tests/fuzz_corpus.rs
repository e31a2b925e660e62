//! Replays the checked-in fuzz corpus through the parsers on stable.

use std::fs;
use std::path::PathBuf;

use wegan::harness::config::render_config;
use wegan::harness::{parse_config_str, read_trace_csv};

fn corpus(target: &str) -> Vec<(PathBuf, Vec<u8>)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus").join(target);
    let mut files: Vec<_> = fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|e| e.unwrap().path())
        .map(|p| {
            let bytes = fs::read(&p).unwrap();
            (p, bytes)
        })
        .collect();
    files.sort();
    assert!(!files.is_empty());
    files
}

#[test]
fn config_corpus() {
    let mut accepted = 0;
    for (path, bytes) in corpus("parse_config") {
        let Ok(text) = std::str::from_utf8(&bytes) else { continue };
        if let Ok(cfg) = parse_config_str(text) {
            accepted += 1;
            let again = parse_config_str(&render_config(&cfg)).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
            assert_eq!(cfg, again, "{}", path.display());
        }
    }
    assert_eq!(accepted, 3);
}

#[test]
fn trace_corpus() {
    let mut accepted = 0;
    for (_, bytes) in corpus("read_trace_csv") {
        if read_trace_csv(bytes.as_slice()).is_ok() {
            accepted += 1;
        }
    }
    assert_eq!(accepted, 3);
}

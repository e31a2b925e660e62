use std::fs;
use std::path::Path;

use wegan::harness::compare::{aggregate, write_outputs};
use wegan::harness::{parse_config_str, read_trace_csv, run_compare, run_sweep, ExperimentConfig};

const SMALL: &str = "
seeds = 3, 1, 2
iters = 40
epoch_len = 10
batch_size = 16
eval_samples = 64
algorithms = wegan
etas = 0.5
";

fn config(text: &str, out: &Path) -> ExperimentConfig {
    let mut cfg = parse_config_str(text).unwrap();
    cfg.out_dir = out.to_path_buf();
    cfg
}

fn numeric_content(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files = Vec::new();
    for sub in [dir.to_path_buf(), dir.join("traces")] {
        for entry in fs::read_dir(&sub).unwrap() {
            let path = entry.unwrap().path();
            if path.extension().is_some_and(|e| e == "csv") {
                files.push((path.strip_prefix(dir).unwrap().display().to_string(), fs::read(&path).unwrap()));
            }
        }
    }
    files.sort();
    files
}

#[test]
fn compare_is_byte_reproducible() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let first = run_compare(&config(SMALL, a.path())).unwrap();
    run_compare(&config(SMALL, b.path())).unwrap();
    assert_eq!(first.traces.len(), 6);
    assert_eq!(first.aggregates.len(), 2);
    assert_eq!(first.improvements.len(), 1);
    let (ca, cb) = (numeric_content(a.path()), numeric_content(b.path()));
    assert_eq!(ca.len(), 9);
    assert_eq!(ca, cb);
}

#[test]
fn written_traces_read_back() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(SMALL, dir.path());
    let sweep = run_sweep(&cfg);
    let out = write_outputs(&cfg, &sweep, dir.path()).unwrap();
    for path in &out.traces {
        let rows = read_trace_csv(fs::File::open(path).unwrap()).unwrap();
        let o = sweep.outcomes.iter().find(|o| rows[0].run_id == o.run_id()).unwrap();
        let trace = o.result.as_ref().unwrap();
        assert_eq!(rows.len(), trace.len());
        for (row, rec) in rows.iter().zip(&trace.records) {
            assert_eq!(&row.record, rec);
            assert_eq!(row.seed, o.seed);
        }
    }
}

#[test]
fn aggregates_ignore_seed_order() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(SMALL, dir.path());
    let sweep = run_sweep(&cfg);
    let traces = sweep.traces(&cfg.variants[0]);
    let mut reversed = traces.clone();
    reversed.reverse();
    assert_eq!(aggregate(&traces), aggregate(&reversed));
    assert_eq!(aggregate(&traces)[0].runs, 3);
}

#[test]
fn divergent_runs_are_counted_not_aggregated() {
    let dir = tempfile::tempdir().unwrap();
    let text = "
runs = 3
iters = 300
epoch_len = 50
eval_samples = 128
algorithms = iwgan
lr_d = 1
";
    let cfg = config(text, dir.path());
    let out = run_compare(&cfg).unwrap();
    let m = &out.summary;
    let iw = m.variants.iter().find(|v| v.algorithm == "iwgan").unwrap();
    let base = m.variants.iter().find(|v| v.algorithm == "uniform").unwrap();
    assert!(iw.failed > 0);
    assert_eq!(iw.completed + iw.failed, 3);
    assert_eq!(base.completed, 3);
    assert_eq!(m.failure_count, m.failures.len());
    assert_eq!(m.failure_count, 6 - out.traces.len());
    assert!(m.failures.iter().all(|f| f.error.contains("divergent")));
    let json: serde_json::Value = serde_json::from_reader(fs::File::open(&out.manifest).unwrap()).unwrap();
    assert_eq!(json["failure_count"].as_u64().unwrap() as usize, m.failure_count);
    let agg = fs::read_to_string(dir.path().join("aggregate_iwgan-vanilla.csv")).unwrap();
    let runs_col: Vec<&str> = agg.lines().skip(1).map(|l| l.split(',').nth(5).unwrap()).collect();
    assert!(runs_col.iter().all(|r| r.parse::<usize>().unwrap() == iw.completed));
}

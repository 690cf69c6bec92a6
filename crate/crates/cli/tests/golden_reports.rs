//! Frozen witness reports. PERRON_BLESS=1 rewrites them.

use std::path::PathBuf;

use perron_cli::{run, CommandId, RunConfig, Timing};

fn frozen(name: &str, config: RunConfig) {
    let mut report = run(config, Some(1)).unwrap().report;
    assert!(report.pass, "{:?}", report.checks);
    report.timing = Timing { elapsed_ms: 0.0, workers: 1 };
    let body = report.to_json();
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name);
    if std::env::var_os("PERRON_BLESS").is_some() {
        std::fs::write(&path, &body).unwrap();
    }
    let want = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    assert_eq!(want, body, "{name} changed; rerun with PERRON_BLESS=1 if intended");
}

#[test]
fn t2_order_one() {
    let config = RunConfig {
        command: Some(CommandId::WitnessT2),
        order: Some(1),
        seed: Some(42),
        d_max: Some(10_000),
        ..Default::default()
    };
    frozen("witness_t2_n1_seed42.json", config);
}

#[test]
fn t2_order_two() {
    let config = RunConfig {
        command: Some(CommandId::WitnessT2),
        order: Some(2),
        seed: Some(42),
        d_max: Some(100_000),
        ..Default::default()
    };
    frozen("witness_t2_n2_seed42.json", config);
}

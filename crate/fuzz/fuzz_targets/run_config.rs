#![no_main]

use libfuzzer_sys::fuzz_target;
use perron_cli::RunConfig;

// parse and resolve only; executing arbitrary configs could run for hours
fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(cfg) = RunConfig::from_json(text) {
        let _ = cfg.resolve();
    }
});

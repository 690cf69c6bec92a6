#![no_main]

use libfuzzer_sys::fuzz_target;
use perron::directionsets::{generate, invert, GeneratorSpec};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(mut spec) = GeneratorSpec::from_json(text) else { return };
    // keep runs short; parsing and validation are the interesting part
    spec.count = spec.count.min(64);
    if let Ok(sample) = generate(&spec) {
        let _ = invert(&sample);
        let _ = sample.to_csv();
    }
});

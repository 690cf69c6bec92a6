#![no_main]

use libfuzzer_sys::fuzz_target;
use perron::lacunary::{verify_order_certificate, LacunaryCertificate};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(cert) = LacunaryCertificate::from_json(text) else { return };
    let omega: Vec<f64> = (1..=12).map(|k| 1.0 - 0.5f64.powi(k)).collect();
    for order in 0..4 {
        let _ = verify_order_certificate(&omega, &cert, order);
    }
    let _ = cert.depth();
    let _ = cert.gap_points();
});

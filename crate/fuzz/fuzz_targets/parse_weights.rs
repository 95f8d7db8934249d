#![no_main]

use gwsi::cli::parse_weights;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(ws) = parse_weights(text) {
        for w in ws {
            assert!(w.as_array().iter().all(|x| x.is_finite() && *x >= 0.0));
        }
    }
});

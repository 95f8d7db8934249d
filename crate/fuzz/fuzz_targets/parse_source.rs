#![no_main]

use gwsi::cli::parse_source;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(spec) = parse_source(text) {
        // Anything accepted must be a valid pmf over (X, Y, U, V).
        let total: f64 = spec.pmf().iter().sum();
        assert!((total - 1.0).abs() <= 1e-9);
        assert_eq!(spec.sizes().len(), 4);
    }
});

#![no_main]

use cheshire_core::hilbert::BasisConvention;
use libfuzzer_sys::fuzz_target;

// First byte picks the photon count, the rest is the descriptor.
fuzz_target!(|data: &[u8]| {
    let Some((&n, rest)) = data.split_first() else { return };
    let Ok(conv) = BasisConvention::new(usize::from(n % 6) + 1) else { return };
    if let Ok(text) = std::str::from_utf8(rest) {
        let _ = cheshire_core::solver::parse_observable(text, conv);
    }
});

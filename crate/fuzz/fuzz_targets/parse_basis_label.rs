#![no_main]

use cheshire_core::hilbert::BasisConvention;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Some((&n, rest)) = data.split_first() else { return };
    let Ok(conv) = BasisConvention::new(usize::from(n % 24) + 1) else { return };
    if let Ok(text) = std::str::from_utf8(rest) {
        if let Ok(index) = conv.parse_label(text) {
            assert_eq!(conv.parse_label(&conv.label(index)).ok(), Some(index));
        }
    }
});

#![no_main]

use libfuzzer_sys::fuzz_target;
use spinphase::qstate::{format_state, parse_state};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(rho) = parse_state(text) {
        // accepted states survive a write/read cycle unchanged
        let again = parse_state(&format_state(&rho)).expect("formatted state must parse");
        assert_eq!(rho.matrix(), again.matrix());
    }
});

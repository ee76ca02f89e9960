#![no_main]

use libfuzzer_sys::fuzz_target;
use spinphase::qstate::parse_matrix;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(m) = parse_matrix(text) {
        assert!(m.iter().all(|z| z.re.is_finite() && z.im.is_finite()));
    }
});

#![no_main]

use libfuzzer_sys::fuzz_target;
use spinphase::experiment::Experiment;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(e) = text.parse::<Experiment>() {
        assert_eq!(e.as_str(), text);
    }
});

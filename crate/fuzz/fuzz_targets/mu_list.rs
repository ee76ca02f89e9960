#![no_main]

use libfuzzer_sys::fuzz_target;
use spinphase::experiment::parse_mu_list;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(list) = parse_mu_list(text) {
        assert!(!list.is_empty());
        // Display writes the same syntax back
        let joined = list.iter().map(|m| m.to_string()).collect::<Vec<_>>().join(",");
        assert_eq!(parse_mu_list(&joined).expect("displayed list must parse"), list);
    }
});

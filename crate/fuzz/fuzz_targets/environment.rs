#![no_main]

use libfuzzer_sys::fuzz_target;
use rewardgap::format::{parse_environment, write_environment};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok((mdp, pi)) = parse_environment(text) {
        let again = parse_environment(&write_environment(&mdp, &pi)).expect("written environment reparses");
        assert_eq!(again, (mdp, pi));
    }
});

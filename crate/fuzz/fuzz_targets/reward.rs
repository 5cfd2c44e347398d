#![no_main]

use libfuzzer_sys::fuzz_target;
use rewardgap::format::{parse_reward, write_reward};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(r) = parse_reward(text) {
        assert_eq!(parse_reward(&write_reward(&r)).unwrap(), r);
    }
});

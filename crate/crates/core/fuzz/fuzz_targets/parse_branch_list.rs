#![no_main]

use libfuzzer_sys::fuzz_target;
use radkit::netmodel::{parse_branch_list, BranchListOptions};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let opts = BranchListOptions {
        base_kv: 12.66,
        base_mva: 10.0,
        substation: 1,
    };
    let _ = parse_branch_list(text, &opts);
});

#![no_main]

use libfuzzer_sys::fuzz_target;
use radkit::emitter::{read_back_stats, Format};

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        let _ = read_back_stats(text, Format::Lp);
    }
});

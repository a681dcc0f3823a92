#![no_main]

use libfuzzer_sys::fuzz_target;
use radkit::netmodel::{parse_network, serialize_network};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(net) = parse_network(text) {
        // whatever parses must survive a write/read cycle
        let again = parse_network(&serialize_network(&net)).expect("serialized network reparses");
        assert_eq!(again.n_buses(), net.n_buses());
        assert_eq!(again.n_branches(), net.n_branches());
    }
});

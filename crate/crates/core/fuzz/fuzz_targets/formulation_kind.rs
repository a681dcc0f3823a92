#![no_main]

use libfuzzer_sys::fuzz_target;
use radkit::formulation::FormulationKind;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(kind) = text.parse::<FormulationKind>() {
        assert_eq!(kind.as_str().parse::<FormulationKind>().unwrap(), kind);
    }
});

#![no_main]

use libfuzzer_sys::fuzz_target;
use morphoskel::shapes::ShapeSpec;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(spec) = text.parse::<ShapeSpec>() {
        // Printing a parsed spec must give text that parses back to it.
        let again: ShapeSpec = spec.to_string().parse().expect("display output parses");
        assert_eq!(again, spec);
    }
});

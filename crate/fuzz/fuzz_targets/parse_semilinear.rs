#![no_main]

use libfuzzer_sys::fuzz_target;
use pnhs::{format_semilinear, parse_semilinear};

// The first byte picks the dimension (1..=8), the rest is the file.
fuzz_target!(|data: &[u8]| {
    let Some((&first, rest)) = data.split_first() else {
        return;
    };
    let dim = usize::from(first % 8) + 1;
    let text = String::from_utf8_lossy(rest);
    if let Ok(set) = parse_semilinear(&text, dim) {
        let printed = format_semilinear(&set);
        let back = parse_semilinear(&printed, dim).expect("formatted sets parse");
        assert_eq!(back, set);
        assert_eq!(format_semilinear(&back), printed);
    }
});

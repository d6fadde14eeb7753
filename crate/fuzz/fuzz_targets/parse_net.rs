#![no_main]

use libfuzzer_sys::fuzz_target;
use pnhs::{format_net, parse_net};

fuzz_target!(|data: &[u8]| {
    let text = String::from_utf8_lossy(data);
    if let Ok(net) = parse_net(&text) {
        let printed = format_net(&net);
        let back = parse_net(&printed).expect("formatted nets parse");
        assert_eq!(back, net);
        assert_eq!(format_net(&back), printed);
    }
});

#![no_main]

use libfuzzer_sys::fuzz_target;
use nbldpc::ChannelOutput;

// first line: symbol width p; the rest is a channel file
fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Some((head, body)) = text.split_once('\n') else { return };
    let Ok(p) = head.trim().parse::<u8>() else { return };
    if let Ok(ch) = ChannelOutput::from_text(body, p) {
        let again = ChannelOutput::from_text(&ch.to_text(), p).expect("serialized channel parses");
        assert_eq!(again.observations(), ch.observations());
        for set in ch.a_priori_sets() {
            assert!(set.cardinality().is_power_of_two());
        }
    }
});

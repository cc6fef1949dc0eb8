#![no_main]

use libfuzzer_sys::fuzz_target;
use nbldpc::{decode, ChannelOutput, LdpcCode};

// a code file and a channel file separated by a `%%` line
fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Some((code, channel)) = text.split_once("\n%%\n") else { return };
    let Ok(code) = LdpcCode::from_text(code) else { return };
    if code.edges().len() > 5000 {
        return;
    }
    let Ok(channel) = ChannelOutput::from_text(channel, code.p()) else { return };
    if let Ok(result) = decode(&code, &channel, None) {
        for (set, prior) in result.sets.iter().zip(channel.a_priori_sets()) {
            assert!(set.is_subset_of(&prior));
        }
    }
});

#![no_main]

use libfuzzer_sys::fuzz_target;
use nbldpc::onthefly::equivalence_check;
use nbldpc::{ArrivalStream, LdpcCode};

// a code file and an arrival stream separated by a `%%` line
fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Some((code, stream)) = text.split_once("\n%%\n") else { return };
    let Ok(code) = LdpcCode::from_text(code) else { return };
    if code.edges().len() > 5000 {
        return;
    }
    let Ok(stream) = ArrivalStream::from_text(stream, code.n(), code.p()) else { return };
    // inconsistent streams are reported as contradictions by both decoders
    if let Ok(same) = equivalence_check(&code, &stream, stream.len()) {
        assert!(same);
    }
});

#![no_main]

use libfuzzer_sys::fuzz_target;
use nbldpc::ArrivalStream;

// first line: `n p`; the rest is an arrival stream
fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Some((head, body)) = text.split_once('\n') else { return };
    let mut dims = head.split_whitespace().map(str::parse::<usize>);
    let (Some(Ok(n)), Some(Ok(p))) = (dims.next(), dims.next()) else { return };
    if n > 1 << 16 || p == 0 || p > 8 {
        return;
    }
    if let Ok(stream) = ArrivalStream::from_text(body, n, p as u8) {
        let again = ArrivalStream::from_text(&stream.to_text(), n, p as u8).expect("serialized stream parses");
        assert_eq!(again.bits(), stream.bits());
    }
});

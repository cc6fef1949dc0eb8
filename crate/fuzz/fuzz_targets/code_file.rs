#![no_main]

use libfuzzer_sys::fuzz_target;
use nbldpc::LdpcCode;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(code) = LdpcCode::from_text(text) {
        let again = LdpcCode::from_text(&code.to_text()).expect("serialized code parses");
        assert_eq!(again, code);
    }
});

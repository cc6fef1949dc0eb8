#![no_main]

use libfuzzer_sys::fuzz_target;
use nbldpc::EnsembleConfig;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(cfg) = EnsembleConfig::from_json(text) {
        if let Ok(ens) = cfg.to_ensemble() {
            let total: f64 = ens.pdf.support().iter().map(|(_, w)| w).sum();
            assert!((total - 1.0).abs() < 1e-6);
            assert!(ens.degrees.design_rate().is_finite());
        }
    }
});

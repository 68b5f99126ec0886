#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(fr) = transduction::io::read_response_csv(data) {
        // Anything accepted must survive the analysis pipeline without panicking.
        let chi = transduction::circuit::chi_from_response(&fr);
        if let Some(w) = chi.peak_omega() {
            let _ = transduction::circuit::integrate_zero_point(&chi, w, 50.0, Default::default());
        }
    }
});

#![no_main]
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    feemarket_fuzz::experiment_config(data);
});

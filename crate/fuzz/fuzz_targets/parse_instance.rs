#![no_main]

use libfuzzer_sys::fuzz_target;
use msca::instances::{instance_from_json, instance_hash, instance_to_json};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(inst) = instance_from_json(text) else { return };
    // Anything accepted must serialize and parse back to the same instance.
    let again = instance_from_json(&instance_to_json(&inst).unwrap()).unwrap();
    assert_eq!(again, inst);
    assert_eq!(instance_hash(&again), instance_hash(&inst));
});

#![no_main]

use libfuzzer_sys::fuzz_target;
use msca::instances::{allocation_from_json, allocation_to_json};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok((x, prov)) = allocation_from_json(text) else { return };
    let (again, prov2) = allocation_from_json(&allocation_to_json(&x, prov.clone()).unwrap()).unwrap();
    assert_eq!(again, x);
    assert_eq!(prov2, prov);
});

#![no_main]

use libfuzzer_sys::fuzz_target;
use msca::relax::{simplex_solve, LinearProgram};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(lp) = LinearProgram::parse_tableau(text) else { return };
    let again = LinearProgram::parse_tableau(&lp.to_tableau_string()).unwrap();
    assert_eq!(again, lp);
    if lp.num_vars() <= 16 && lp.rows.len() <= 16 {
        let _ = simplex_solve(&lp);
    }
});

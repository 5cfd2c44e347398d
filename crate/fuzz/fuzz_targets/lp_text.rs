#![no_main]

use libfuzzer_sys::fuzz_target;
use rewardgap::lp::{solve_lp, LpProblem};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(lp) = LpProblem::from_text(text) {
        assert_eq!(LpProblem::from_text(&lp.to_text()).unwrap(), lp);
        // keep the solver on small problems so iterations stay fast
        if lp.n_vars() <= 16 && lp.constraints.len() <= 64 {
            let _ = solve_lp(&lp);
        }
    }
});

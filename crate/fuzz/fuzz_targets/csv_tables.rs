#![no_main]

use libfuzzer_sys::fuzz_target;
use rewardgap::csvio::{self, CurveRow, RegressionRow, SearchRow, SubjectiveRow, SweepRow};

fuzz_target!(|data: &[u8]| {
    let _ = csvio::read_rows::<_, CurveRow>(data, &csvio::CURVE);
    let _ = csvio::read_rows::<_, SweepRow>(data, &csvio::SWEEP);
    let _ = csvio::read_rows::<_, SearchRow>(data, &csvio::SEARCH);
    let _ = csvio::read_rows::<_, RegressionRow>(data, &csvio::REGRESSION);
    let _ = csvio::read_rows::<_, SubjectiveRow>(data, &csvio::SUBJECTIVE);
});

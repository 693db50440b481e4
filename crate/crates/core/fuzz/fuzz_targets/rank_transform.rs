#![no_main]

use copent::copula::rank_transform;
use copent::data::parse_csv;
use copent::estimators::{mi_copula, EstimatorConfig};
use copent::{RankScaling, TiePolicy};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(m) = parse_csv(text, false, None) else {
        return;
    };
    for scaling in [RankScaling::T, RankScaling::TPlusOne] {
        for ties in [TiePolicy::OccurrenceOrder, TiePolicy::Average] {
            let p = rank_transform(&m, scaling, ties).expect("valid matrix ranks");
            assert!(p.matrix().as_slice().iter().all(|&u| u > 0.0 && u <= 1.0));
        }
    }
    if m.rows() <= 512 {
        // errors are fine, panics are not
        let _ = mi_copula(&m, &EstimatorConfig::default().with_k(1));
    }
});

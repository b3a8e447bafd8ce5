use std::time::Instant;

use expanso_core::catalog;
use expanso_core::classify::{classify, ClassifyParams};

#[test]
fn expected_verdicts_match_classifier() {
    let mut mismatches = Vec::new();
    for entry in catalog::all() {
        for exp in &entry.expected {
            let space = entry.space(&exp.space).unwrap();
            let start = Instant::now();
            let report = classify(&entry.system, &space, &ClassifyParams::for_entry(&entry)).unwrap();
            let v = report.verdicts();
            println!(
                "{:16} {:8} n={:?} aleph0={} cw={:?} meagre={} fwd={:?} exp={:.3} trunc={} ({:.2?})",
                entry.name,
                exp.space,
                v.n_expansive,
                v.aleph0_proxy,
                v.cw_expansive,
                v.meagre_expansive,
                report.forward.verdicts,
                report.primary().scaling.max_growth_exponent,
                report.primary().truncated_centers,
                start.elapsed()
            );
            let got = (v.n_expansive, v.aleph0_proxy, v.cw_expansive, v.meagre_expansive);
            let want = (exp.n_expansive, exp.aleph0_proxy, exp.cw_expansive, exp.meagre_expansive);
            if got != want {
                mismatches.push(format!("{} on {}: got {got:?}, expected {want:?}", entry.name, exp.space));
            }
        }
    }
    assert!(mismatches.is_empty(), "{mismatches:#?}");
}

use proptest::prelude::*;

use resolvent::config::parse_config;
use resolvent::output::{csv_column, solution_csv};
use resolvent::verify::{
    all_fail_or_inert, check_contraction, check_max_principle, random_contraction_pair, run_suite, CheckStatus,
    Suite, SuiteOptions,
};
use resolvent::{build_grid, continuation_solve, SolverConfig};

fn quick() -> SuiteOptions {
    SuiteOptions { n: 128, random_cases: 2, ..SuiteOptions::default() }
}

#[test]
fn every_suite_passes_clean() {
    let reports = run_suite(Suite::All, &quick());
    let failed: Vec<_> = reports.iter().filter(|r| r.failed()).map(|r| (&r.name, r.measured, &r.note)).collect();
    assert!(failed.is_empty(), "{failed:?}");
    assert!(reports.iter().filter(|r| r.passed()).count() > 40);
}

#[test]
fn injected_fault_fails_every_applicable_check() {
    let opts = SuiteOptions { inject_fault: true, ..quick() };
    let reports = run_suite(Suite::All, &opts);
    assert!(all_fail_or_inert(&reports));
    assert!(reports.iter().filter(|r| r.status == CheckStatus::Fail).count() > 30);
}

#[test]
fn config_to_csv_round_trip() {
    let rc = parse_config(include_str!("../../../configs/m1.cfg")).unwrap();
    let grid = build_grid(&rc.spec.domain, 64).unwrap();
    let b = continuation_solve(&rc.spec, &grid, &rc.solver).unwrap();
    let csv = solution_csv(&b);
    let u = csv_column(&csv, "u").unwrap();
    let rho = csv_column(&csv, "rho").unwrap();
    assert_eq!(u, b.u.values());
    assert_eq!(rho, grid.centers);
    assert_eq!(check_max_principle(&b, &rc.spec).status, CheckStatus::Pass);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn contraction_holds_for_random_pairs(seed in 0u64..10_000, k in 0usize..4) {
        let m = [-1.0, 0.5, 1.0, 2.0][k];
        let (s1, s2) = random_contraction_pair(m, seed).unwrap();
        let config = SolverConfig::default().with_eps_final(1e-3);
        let grid = build_grid(&s1.domain, 48).unwrap();
        let r = check_contraction(&s1, &s2, &grid, &config).unwrap();
        prop_assert!(r.passed(), "{:?}", r);
    }
}

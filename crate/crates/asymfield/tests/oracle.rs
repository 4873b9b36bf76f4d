//! Solver-versus-closed-form equivalence over randomized parameters, plus
//! the limit reductions and normalization identities. These are the same
//! suites exposed through the command-line `selfcheck`.

use asymfield::selftest::{
    linearity_suite, loss_suite, normalization_suite, oracle_suites, reduction_suites,
    unitarity_suites, SelfTestOptions,
};

#[test]
fn solver_matches_closed_forms_on_1000_draws_per_topology() {
    let reports = oracle_suites(&SelfTestOptions::default());
    assert_eq!(reports.len(), 3);
    for report in reports {
        assert_eq!(report.cases, 1000);
        assert!(
            report.passed,
            "{}: worst {:.3e} over tolerance {:.0e}",
            report.name, report.worst, report.tolerance
        );
    }
}

#[test]
fn lossless_smatrices_are_unitary_and_reciprocal() {
    for report in unitarity_suites(1000) {
        assert!(
            report.passed,
            "{}: worst {:.3e} over tolerance {:.0e}",
            report.name, report.worst, report.tolerance
        );
    }
}

#[test]
fn attenuation_always_breaks_unitarity() {
    let report = loss_suite(200);
    assert!(report.passed, "column norm {} reached 1", report.worst);
}

#[test]
fn superposition_linearity_holds() {
    let report = linearity_suite(200);
    assert!(report.passed, "worst {:.3e}", report.worst);
}

#[test]
fn limit_reductions_hold() {
    for report in reduction_suites() {
        assert!(
            report.passed,
            "{}: worst {:.3e} over tolerance {:.0e}",
            report.name, report.worst, report.tolerance
        );
    }
}

#[test]
fn probabilities_normalize_along_every_route() {
    let report = normalization_suite(500);
    assert!(report.passed, "worst {:.3e}", report.worst);
}

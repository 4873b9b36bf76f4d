//! The `selfcheck` subcommand: run the library's verification suites and
//! print one status line per suite.

use asymfield::selftest::{run_all, SelfTestOptions};

pub fn run(draws: usize, inject_sign_fault: bool) -> i32 {
    let options = SelfTestOptions { draws, flip_backward_coupling: inject_sign_fault };
    if inject_sign_fault {
        println!("note: backward coupler sign fault injected; the oracle suites must fail");
    }
    let reports = run_all(&options);
    let mut failed = 0usize;
    println!("{:<28} {:>6} {:>12} {:>10}  status", "suite", "cases", "worst", "tolerance");
    for report in &reports {
        println!(
            "{:<28} {:>6} {:>12.3e} {:>10.0e}  {}",
            report.name,
            report.cases,
            report.worst,
            report.tolerance,
            if report.passed { "PASS" } else { "FAIL" }
        );
        if !report.passed {
            failed += 1;
        }
    }
    if failed == 0 {
        println!("selfcheck: PASS ({} suites)", reports.len());
        0
    } else {
        println!("selfcheck: FAIL ({failed} of {} suites)", reports.len());
        4
    }
}

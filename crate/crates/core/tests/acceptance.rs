//! The eleven acceptance criteria, one verdict line each.

use secure_metrology::harness::acceptance::{verdict_line, verify_suite, SuiteOptions};
use std::process::ExitCode;

fn main() -> ExitCode {
    let opts = SuiteOptions::default();
    let (report, timings) = match verify_suite(&opts) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("acceptance suite could not run: {e}");
            return ExitCode::FAILURE;
        }
    };
    let mut failures = Vec::new();
    for (criterion, elapsed) in report.criteria.iter().zip(&timings) {
        let on_time = criterion.within_runtime(*elapsed);
        println!("{}{}", verdict_line(criterion, Some(*elapsed)), if on_time { "" } else { " [over time limit]" });
        if !criterion.passed || !on_time {
            failures.push(criterion.id);
        }
    }
    if report.criteria.len() != 11 {
        println!("expected 11 criteria, got {}", report.criteria.len());
        return ExitCode::FAILURE;
    }
    println!();
    print!("{}", report.to_text(None));
    if failures.is_empty() {
        ExitCode::SUCCESS
    } else {
        println!("failed criteria: {failures:?}");
        ExitCode::FAILURE
    }
}

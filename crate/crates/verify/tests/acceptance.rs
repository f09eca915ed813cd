//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any numbered criterion fails.

use std::process::ExitCode;
use std::time::Instant;

use tlsim_cli::acceptance::run_all_criteria;

fn main() -> ExitCode {
    let started = Instant::now();
    let results = run_all_criteria();
    let mut failed = Vec::new();
    for r in &results {
        println!("{}", r.line());
        if !r.passed && r.id != "3s" {
            failed.push(r.id.clone());
        }
    }
    println!(
        "acceptance: {} criteria, {} failed {:?}, {:.1}s",
        12,
        failed.len(),
        failed,
        started.elapsed().as_secs_f64()
    );
    if failed.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

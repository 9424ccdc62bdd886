//! Runs every acceptance criterion at full budget and prints one line each.
//! Set `HARPERLAB_QUICK=1` for reduced budgets without runtime limits.

use std::process::ExitCode;

use harperlab::verify::{run_all, Budget};

fn main() -> ExitCode {
    let quick = std::env::var("HARPERLAB_QUICK").is_ok_and(|v| v == "1");
    let budget = if quick { Budget::quick() } else { Budget::full() };
    let results = run_all(&budget);
    for r in &results {
        println!("{}", r.line());
    }
    let passed = results.iter().filter(|r| r.pass).count();
    println!("acceptance: {passed}/{} criteria passed{}", results.len(), if quick { " (quick budget)" } else { "" });
    if passed == results.len() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

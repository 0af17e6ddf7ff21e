//! Runs without the libtest harness so that the per-criterion lines are
//! always printed.

use std::process::ExitCode;

use phicon::acceptance::run_all;

fn main() -> ExitCode {
    let outcomes = run_all(20261015);
    for o in &outcomes {
        println!("{o}");
    }
    let failed = outcomes.iter().filter(|o| !o.passed).count();
    println!("acceptance: {} passed, {failed} failed", outcomes.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

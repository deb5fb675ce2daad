//! Runs the built-in numerical self-checks and prints the results as a
//! table. The `validate` subcommand of the CLI wraps the same routine; a
//! nonzero measured value is fine as long as it stays under its tolerance.

use psklink::experiment::run_validate;

fn main() {
    let checks = run_validate(1).expect("validation suite failed to run");
    let mut failed = 0;
    println!("{:<26} {:>12} {:>10}  detail", "check", "measured", "tol");
    for c in &checks {
        if !c.pass {
            failed += 1;
        }
        println!(
            "{:<26} {:>12.3e} {:>10.1e}  {} [{}]",
            c.name,
            c.measured,
            c.tolerance,
            c.detail,
            if c.pass { "ok" } else { "FAIL" }
        );
    }
    println!();
    if failed == 0 {
        println!("all {} checks passed", checks.len());
    } else {
        println!("{failed} of {} checks failed", checks.len());
        std::process::exit(3);
    }
}

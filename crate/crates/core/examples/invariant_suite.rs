// The seeded invariant suite that `opuc verify` runs.

use opuc::validation::{verify, VerifyOptions};

pub fn run() -> Result<(), String> {
    let seed = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(0);
    let report = verify(seed, &VerifyOptions::default());
    for c in &report.checks {
        println!(
            "{:<22} {:<4} max error {:.2e} (tolerance {:.0e}, {} instances)",
            c.name,
            if c.passed { "ok" } else { "FAIL" },
            c.max_error,
            c.tolerance,
            c.instances
        );
    }
    if report.passed {
        Ok(())
    } else {
        Err(format!("seed {seed} failed"))
    }
}

fn main() -> Result<(), String> {
    run()
}

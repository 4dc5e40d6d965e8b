// Amplitude and unwrapped phase of Phi_n on the circle.

use opuc::asymptotics::pruefer_trace;
use opuc::error::Result;
use opuc::sequence::{UnitCirclePoint, VerblunskySequence, C64};

pub fn run() -> Result<()> {
    let seq = VerblunskySequence::new(
        (0..5000).map(|n| C64::from_polar(0.6 / (1.0 + n as f64).sqrt(), 0.3 * n as f64)),
    )?;
    let trace = pruefer_trace(&seq, UnitCirclePoint::from_angle(1.2)?, 5000)?;
    for n in [0, 1, 10, 100, 1000, 5000] {
        println!(
            "n = {n:>4}: R_n = {:.6}, theta_n = {:+.6}",
            trace.radius[n], trace.phase[n]
        );
    }
    println!(
        "largest reconstruction error {:.1e}",
        trace.max_reconstruction_error(&seq)
    );
    println!(
        "phase steps over the bound: {}",
        trace.phase_bound_violations(&seq).len()
    );
    Ok(())
}

fn main() -> Result<()> {
    run()
}

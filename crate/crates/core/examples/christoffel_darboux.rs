// Christoffel–Darboux kernel as a direct sum and in closed form.

use opuc::error::Result;
use opuc::kernel::cd_kernel;
use opuc::sequence::{VerblunskySequence, C64};

pub fn run() -> Result<()> {
    let seq = VerblunskySequence::new(
        (0..40).map(|k| C64::from_polar(0.7 / (1.0 + k as f64).sqrt(), k as f64)),
    )?;
    for (x, y) in [
        (C64::new(0.3, 0.4), C64::new(-0.5, 0.2)),
        (C64::new(0.0, 0.0), C64::new(0.9, 0.0)),
        (C64::from_polar(1.0, 0.4), C64::from_polar(1.0, 2.0)),
    ] {
        let k = cd_kernel(&seq, x, y, 40)?;
        println!(
            "K_40({x:.2}, {y:.2}) = {:.12}  closed-form residual {:.1e}",
            k.direct,
            k.residual().unwrap_or(0.0)
        );
    }
    // on the diagonal only the direct sum is defined
    let z = C64::from_polar(1.0, 1.0);
    let k = cd_kernel(&seq, z, z, 40)?;
    println!(
        "K_40(z, z) on the circle = {:.12} (closed form skipped: {})",
        k.direct.re,
        k.is_diagonal()
    );
    Ok(())
}

fn main() -> Result<()> {
    run()
}

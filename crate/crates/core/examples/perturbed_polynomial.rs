// Monic orthogonal polynomials of Lebesgue measure plus a mass at 1:
// Phi_n(z) = z^n - gamma / (1 + (n - 1) gamma) (z^{n-1} + ... + 1).

use opuc::error::Result;
use opuc::pointmass::geronimus_polynomial;
use opuc::sequence::{UnitCirclePoint, VerblunskySequence};

pub fn run() -> Result<()> {
    let gamma = 0.4;
    let zeta = UnitCirclePoint::from_angle(0.0)?;
    for n in [1, 2, 5, 30] {
        let p = geronimus_polynomial(&VerblunskySequence::default(), zeta, gamma, n)?;
        let expected = gamma / (1.0 + (n as f64 - 1.0) * gamma);
        let worst = p.coeffs[..n]
            .iter()
            .map(|c| (c.re + expected).abs() + c.im.abs())
            .fold((p.coeffs[n].re - 1.0).abs(), f64::max);
        println!(
            "n = {n:>2}: lower coefficients {:+.12}, expected {:+.12}, error {worst:.1e}",
            p.coeffs[0].re, -expected
        );
        assert!(worst < 1e-12);
    }
    Ok(())
}

fn main() -> Result<()> {
    run()
}

// A mass of weight gamma at z = 1 added to normalized Lebesgue measure has
// Verblunsky coefficients gamma / (1 + gamma n).

use opuc::error::Result;
use opuc::pointmass::insert_direct;
use opuc::sequence::{UnitCirclePoint, VerblunskySequence};

pub fn run() -> Result<()> {
    let zeta = UnitCirclePoint::from_angle(0.0)?;
    for gamma in [0.1, 0.5, 0.9] {
        let r = insert_direct(&VerblunskySequence::default(), zeta, gamma, 201)?;
        let worst = (0..=200)
            .map(|n| (r.perturbed.get(n).re - gamma / (1.0 + gamma * n as f64)).abs())
            .fold(0.0, f64::max);
        let head: Vec<f64> = (0..5).map(|n| r.perturbed.get(n).re).collect();
        println!("gamma = {gamma}: a_0..a_4 = {head:.6?}");
        println!("  max |a_n - gamma/(1 + gamma n)| over n <= 200: {worst:.2e}");
        assert!(worst < 1e-12);
    }
    Ok(())
}

fn main() -> Result<()> {
    run()
}

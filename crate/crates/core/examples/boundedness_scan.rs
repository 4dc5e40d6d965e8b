// sup |phi_n^*| on an arc away from the masses, and on one through a mass.

use opuc::asymptotics::{convergence_scan, Arc, DEFAULT_EXCLUSION_RADIUS};
use opuc::error::Result;
use opuc::measure::{MeasureSpec, PointMass};
use opuc::pointmass::insert_chain;
use opuc::sequence::VerblunskySequence;
use std::f64::consts::PI;

pub fn run() -> Result<()> {
    let masses = vec![
        PointMass::at_angle(0.0, 0.3)?,
        PointMass::at_angle(PI / 2.0, 0.3)?,
    ];
    let spec = MeasureSpec::new(VerblunskySequence::default(), masses.clone())?;
    let n = 1 << 13;
    let seq = insert_chain(&spec, n)?;
    let points: Vec<_> = masses.iter().map(|m| m.location()).collect();

    let away = convergence_scan(
        &seq,
        Arc::new(0.75 * PI, 1.75 * PI)?,
        &points,
        64,
        n,
        DEFAULT_EXCLUSION_RADIUS,
    )?;
    println!(
        "away from the masses: sup {:.4}, growth over 3 blocks {:+.2e}",
        away.sup,
        away.sup_growth(3)
    );
    println!(
        "  Cauchy block maxima {:?}",
        away.cauchy[6..]
            .iter()
            .map(|c| format!("{c:.1e}"))
            .collect::<Vec<_>>()
    );

    let through = convergence_scan(
        &seq,
        Arc::new(-0.25 * PI, 0.25 * PI)?,
        &[],
        64,
        n,
        DEFAULT_EXCLUSION_RADIUS,
    )?;
    println!(
        "through a mass: sup {:.4}, growth over 3 blocks {:+.2e}",
        through.sup,
        through.sup_growth(3)
    );
    Ok(())
}

fn main() -> Result<()> {
    run()
}

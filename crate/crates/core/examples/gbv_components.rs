// Splitting the perturbed coefficients into a base part and one 1/n tail per mass,
// and checking that every rotated variation sum settles.

use opuc::asymptotics::{extract_components, gbv_variation, TailConvention};
use opuc::error::Result;
use opuc::measure::{MeasureSpec, PointMass};
use opuc::pointmass::insert_chain;
use opuc::sequence::{VerblunskySequence, C64};

pub fn run() -> Result<()> {
    let masses = vec![
        PointMass::at_angle(std::f64::consts::FRAC_PI_2, 0.2)?,
        PointMass::at_angle(4.0, 0.3)?,
    ];
    let spec = MeasureSpec::new(VerblunskySequence::default(), masses.clone())?;
    let n = 1 << 14;
    let perturbed = insert_chain(&spec, n + 1)?;
    let d = vec![C64::new(1.0, 0.0); masses.len()];
    let parts = extract_components(
        spec.base(),
        &perturbed,
        &masses,
        &d,
        TailConvention::ConjOverD,
    )?;
    let variation = gbv_variation(&parts.decomposition, n)?;
    for (k, (sum, verdict)) in variation
        .partial_sums
        .iter()
        .zip(&variation.verdicts)
        .enumerate()
    {
        let incs = &variation.block_increments[k];
        println!(
            "component {k}: S(N) = {sum:.6}, last increments {:.2e} {:.2e} {:.2e} -> {verdict:?}",
            incs[incs.len() - 3],
            incs[incs.len() - 2],
            incs[incs.len() - 1]
        );
    }
    for b in parts.error_blocks.iter().rev().take(4) {
        println!("max n|E_n| on [{}, {}) = {:.3e}", b.start, b.end, b.max);
    }
    Ok(())
}

fn main() -> Result<()> {
    run()
}

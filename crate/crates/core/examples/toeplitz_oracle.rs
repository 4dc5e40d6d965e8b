// Coefficients from repeated insertion match those obtained from the moments
// c_j of the measure through the Toeplitz matrices (L_n)_{jk} = c_{j-k}.

use opuc::error::Result;
use opuc::measure::{moments_auto, moments_to_verblunsky, MeasureSpec, PointMass};
use opuc::pointmass::insert_chain;
use opuc::sequence::{VerblunskySequence, C64};
use opuc::validation::max_pairwise;

pub fn run() -> Result<()> {
    let base = VerblunskySequence::new([C64::new(0.4, 0.0), C64::new(-0.2, 0.3)])?;
    let masses = vec![
        PointMass::at_angle(1.0, 0.2)?,
        PointMass::at_angle(4.0, 0.15)?,
    ];
    let spec = MeasureSpec::new(base, masses)?;
    let n = 30;
    let chain = insert_chain(&spec, n)?;
    let mv = moments_auto(&spec, n)?;
    let oracle = moments_to_verblunsky(&mv, n)?;
    println!("c_1 = {:.12}, c_2 = {:.12}", mv.c[1], mv.c[2]);
    for k in [0, 1, 5, 29] {
        println!(
            "a_{k:<2} chain {:.12}  oracle {:.12}",
            chain.get(k),
            oracle.get(k)
        );
    }
    let diff = max_pairwise(&[chain, oracle]);
    println!("largest difference: {diff:.2e}");
    assert!(diff < 1e-8);
    Ok(())
}

fn main() -> Result<()> {
    run()
}

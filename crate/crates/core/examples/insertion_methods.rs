// The three ways of computing a_n after inserting a point mass agree.

use opuc::error::Result;
use opuc::pointmass::{insert, InsertionMethod};
use opuc::sequence::{UnitCirclePoint, VerblunskySequence, C64};
use opuc::validation::max_pairwise;

pub fn run() -> Result<()> {
    let base =
        VerblunskySequence::new([C64::new(0.3, -0.2), C64::new(-0.5, 0.1), C64::new(0.0, 0.6)])?;
    let zeta = UnitCirclePoint::from_angle(2.1)?;
    let gamma = 0.35;
    let runs = InsertionMethod::ALL
        .iter()
        .map(|&m| insert(m, &base, zeta, gamma, 50).map(|r| r.perturbed))
        .collect::<Result<Vec<_>>>()?;
    for n in [0, 1, 2, 10, 49] {
        println!(
            "a_{n:<2} direct {:.12}  simon {:.12}  geronimus {:.12}",
            runs[0].get(n),
            runs[1].get(n),
            runs[2].get(n)
        );
    }
    let spread = max_pairwise(&runs);
    println!("largest pairwise difference: {spread:.2e}");
    assert!(spread < 1e-10);
    Ok(())
}

fn main() -> Result<()> {
    run()
}

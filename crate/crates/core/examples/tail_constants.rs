// After inserting masses, n (a_n - a_n(base)) approaches sum_j c_j conj(z_j)^n.
// The fit decides which of the two unimodular candidates built from D(z_j) is right.

use opuc::asymptotics::fit_tail_constants;
use opuc::error::Result;
use opuc::measure::PointMass;
use opuc::pointmass::insert_direct;
use opuc::sequence::{VerblunskySequence, C64};

pub fn run() -> Result<()> {
    let base = VerblunskySequence::new([C64::new(0.5, 0.0)])?;
    let mass = PointMass::at_angle(std::f64::consts::FRAC_PI_2, 0.3)?;
    let perturbed = insert_direct(&base, mass.location(), mass.weight(), 4001)?.perturbed;
    let report = fit_tail_constants(&base, &perturbed, &[mass], (1000, 4000))?;
    println!("fitted c             {:.6}", report.fitted_c[0]);
    println!(
        "conj(z) |D|^2 / D^2  {:.6}  (distance {:.1e})",
        report.predicted_conj_over_d[0], report.distance_conj_over_d
    );
    println!(
        "conj(z) D^2 / |D|^2  {:.6}  (distance {:.1e})",
        report.predicted_d_over_conj[0], report.distance_d_over_conj
    );
    println!(
        "winner: {:?}, rms residual {:.1e}",
        report.winner, report.residual_rms
    );
    for b in report.error_decay.iter().filter(|b| b.start >= 64) {
        println!("  max n|E_n| on [{}, {}) = {:.3e}", b.start, b.end, b.max);
    }
    Ok(())
}

fn main() -> Result<()> {
    run()
}

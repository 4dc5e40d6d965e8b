// Szegő function of a Bernstein–Szegő weight three ways, plus the identity
// prod (1 - |a_j|^2) = exp(mean log w).

use opuc::error::Result;
use opuc::sequence::{UnitCirclePoint, VerblunskySequence, C64};
use opuc::szego::{
    szego_closed_form, szego_inverse_via_limit, szego_quadrature, szego_theorem_check, LimitOptions,
};

pub fn run() -> Result<()> {
    let base = VerblunskySequence::new([C64::new(0.5, 0.0)])?;
    for t in [0.5, 1.5, 3.0, 5.0] {
        let z = UnitCirclePoint::from_angle(t)?;
        let exact = szego_closed_form(&base, z.value())?.value;
        let quad = szego_quadrature(&base, z.value(), 8192)?.value;
        let limit = szego_inverse_via_limit(&base, z, &[], LimitOptions::default())?.value;
        println!(
            "theta = {t}: D = {exact:.10}  |quadrature - exact| = {:.1e}  |limit - exact| = {:.1e}",
            (quad - exact).norm(),
            (limit - exact).norm()
        );
    }
    let d0 = szego_quadrature(&base, C64::new(0.0, 0.0), 4096)?.value;
    println!("D(0) = {d0:.12}, sqrt(0.75) = {:.12}", 0.75f64.sqrt());
    let check = szego_theorem_check(&base, 4096)?;
    println!(
        "product {:.15} vs exp(mean log w) {:.15}",
        check.lhs, check.rhs
    );
    Ok(())
}

fn main() -> Result<()> {
    run()
}

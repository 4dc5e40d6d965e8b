//! Szegő function `D(z) = exp((1/4pi) int (e^{it} + z)/(e^{it} - z) log w(t) dt)`
//! for Bernstein–Szegő measures, by quadrature, by the limit of `phi_n^*`, and
//! in closed form.

use serde::{Deserialize, Serialize};

use crate::error::{OpucError, Result};
use crate::measure::bernstein_szego_weight;
use crate::quadrature::PeriodicGrid;
use crate::recursion::Trajectory;
use crate::sequence::{UnitCirclePoint, VerblunskySequence, C64};

/// Points with `|z| >= 1 - BOUNDARY_TOLERANCE` are treated as boundary points.
pub const BOUNDARY_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SzegoMethod {
    Quadrature,
    PolynomialLimit,
    ClosedForm,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SzegoEvaluation {
    pub z: C64,
    pub value: C64,
    pub method: SzegoMethod,
    /// Quadrature points, or recursion steps for the limit.
    pub count: usize,
    /// Quadrature: change against the half-size grid. Limit: last block oscillation.
    pub defect: f64,
}

/// `log w(theta)` of the Bernstein–Szegő weight.
pub fn log_weight(base: &VerblunskySequence, theta: f64) -> f64 {
    bernstein_szego_weight(base, theta).ln()
}

fn log_szego(base: &VerblunskySequence, z: C64, points: usize) -> Result<C64> {
    let r = z.norm();
    if r >= 1.0 - BOUNDARY_TOLERANCE {
        // Boundary: the real part of the Herglotz kernel collapses to a point
        // evaluation, the imaginary part is a principal-value conjugate
        // function, sampled on a grid offset half a step from arg z.
        let phi = z.arg();
        let at_point = log_weight(base, phi);
        if !at_point.is_finite() {
            return Err(OpucError::WeightVanishes { angle: phi });
        }
        let grid =
            PeriodicGrid::with_offset(points, phi + 0.5 * std::f64::consts::TAU / points as f64);
        let conj = grid.mean(|t| (0.5 * (t - phi)).tan().recip() * log_weight(base, t));
        Ok(C64::new(0.5 * at_point, -0.5 * conj))
    } else {
        let grid = PeriodicGrid::new(points);
        Ok(0.5
            * grid.mean_complex(|t| {
                let e = C64::from_polar(1.0, t);
                (e + z) / (e - z) * log_weight(base, t)
            }))
    }
}

/// `D(z)` by the periodic trapezoidal rule on `points` nodes.
///
/// Interior points use the plain grid. Boundary points use `D = w^{1/2} e^{i v}`
/// where the conjugate function `v` comes from a half-step offset grid, which
/// is exact for trigonometric polynomials of degree below `points`.
pub fn szego_quadrature(
    base: &VerblunskySequence,
    z: C64,
    points: usize,
) -> Result<SzegoEvaluation> {
    if !z.re.is_finite() || !z.im.is_finite() {
        return Err(OpucError::NonFinite("evaluation point"));
    }
    if z.norm() > 1.0 + BOUNDARY_TOLERANCE {
        return Err(OpucError::PointOutsideDisk(z.norm()));
    }
    if points < 4 {
        return Err(OpucError::TooFewQuadraturePoints {
            points,
            required: 4,
        });
    }
    let value = log_szego(base, z, points)?.exp();
    let coarse = log_szego(base, z, points / 2)?.exp();
    Ok(SzegoEvaluation {
        z,
        value,
        method: SzegoMethod::Quadrature,
        count: points,
        defect: (value - coarse).norm(),
    })
}

/// `D(z) = ||Phi_N|| / Phi_N^*(z)` with `N` the support length of `base`.
///
/// Exact for Bernstein–Szegő measures, where `phi_n^* = phi_N^*` for all `n >= N`.
pub fn szego_closed_form(base: &VerblunskySequence, z: C64) -> Result<SzegoEvaluation> {
    if z.norm() > 1.0 + BOUNDARY_TOLERANCE {
        return Err(OpucError::PointOutsideDisk(z.norm()));
    }
    let state = Trajectory::new(base, z, false)
        .nth(base.support_len())
        .expect("unbounded");
    Ok(SzegoEvaluation {
        z,
        value: state.norm / state.phi_star_monic,
        method: SzegoMethod::ClosedForm,
        count: base.support_len(),
        defect: 0.0,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LimitOptions {
    pub tol: f64,
    pub n_max: usize,
    /// Minimum distance from every excluded point, in radians.
    pub exclusion_radius: f64,
    /// Blocks ending before this index (and before the support of the
    /// sequence ends) never count as converged.
    pub min_steps: usize,
}

impl Default for LimitOptions {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            n_max: 1 << 20,
            exclusion_radius: 0.05,
            min_steps: 64,
        }
    }
}

pub(crate) fn check_exclusions(
    point: &UnitCirclePoint,
    excluded: &[UnitCirclePoint],
    radius: f64,
) -> Result<()> {
    for e in excluded {
        let distance = point.distance(e);
        if distance < radius {
            return Err(OpucError::TooCloseToExclusion {
                angle: point.angle(),
                distance,
                radius,
            });
        }
    }
    Ok(())
}

/// `D(z) = 1 / lim phi_n^*(z)` on the circle.
///
/// Runs the recursion over dyadic blocks `[2^k, 2^{k+1}]` and stops once
/// `max_{n in block} |phi_n^* - phi_{2^k}^*| < tol`.
pub fn szego_inverse_via_limit(
    seq: &VerblunskySequence,
    z: UnitCirclePoint,
    masses_to_avoid: &[UnitCirclePoint],
    options: LimitOptions,
) -> Result<SzegoEvaluation> {
    check_exclusions(&z, masses_to_avoid, options.exclusion_radius)?;
    let earliest_stop = options.min_steps.min(seq.support_len().max(1));
    let mut traj = Trajectory::new(seq, z.value(), false).skip(1);
    let mut anchor = traj.next().expect("unbounded").phi_star();
    let mut block_end = 2;
    let mut oscillation = f64::INFINITY;
    while block_end <= options.n_max {
        let mut last = anchor;
        oscillation = 0.0;
        for state in traj.by_ref().take(block_end / 2) {
            last = state.phi_star();
            oscillation = oscillation.max((last - anchor).norm());
        }
        if oscillation < options.tol && block_end >= earliest_stop {
            return Ok(SzegoEvaluation {
                z: z.value(),
                value: last.inv(),
                method: SzegoMethod::PolynomialLimit,
                count: block_end,
                defect: oscillation,
            });
        }
        anchor = last;
        block_end *= 2;
    }
    Err(OpucError::NonConvergence {
        n_max: options.n_max,
        oscillation,
    })
}

/// Both sides of `prod (1 - |a_j|^2) = exp((1/2pi) int log w)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SzegoTheoremCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub residual: f64,
}

pub fn szego_theorem_check(base: &VerblunskySequence, points: usize) -> Result<SzegoTheoremCheck> {
    if points == 0 {
        return Err(OpucError::TooFewQuadraturePoints {
            points,
            required: 1,
        });
    }
    let lhs = base.norm_sqr_product(base.len());
    let mean_log = PeriodicGrid::new(points).mean(|t| log_weight(base, t));
    if !mean_log.is_finite() {
        return Err(OpucError::NonFinite("log-weight quadrature"));
    }
    let rhs = mean_log.exp();
    Ok(SzegoTheoremCheck {
        lhs,
        rhs,
        residual: (lhs - rhs).abs(),
    })
}

//! Prüfer variables, generalized bounded variation diagnostics, tail constant
//! fits and boundedness scans on arcs of the circle.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{OpucError, Result};
use crate::measure::PointMass;
use crate::recursion::Trajectory;
use crate::sequence::{
    angular_distance, canonical_angle, UnitCirclePoint, VerblunskySequence, C64,
};
use crate::szego::szego_closed_form;

/// Default exclusion radius around mass points, in radians.
pub const DEFAULT_EXCLUSION_RADIUS: f64 = 0.05;
/// Condition number above which a tail fit is refused.
pub const MAX_CONDITION: f64 = 1e8;
/// Distance under which a fitted constant is said to match a candidate.
pub const CONVENTION_TOLERANCE: f64 = 0.05;
const DECOMPOSITION_TOLERANCE: f64 = 1e-13;

/// `Phi_n(e^{i eta}) = R_n exp(i(n eta + theta_n))`, with `theta` unwrapped.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrueferTrace {
    pub point: UnitCirclePoint,
    pub radius: Vec<f64>,
    pub phase: Vec<f64>,
}

pub fn pruefer_trace(
    seq: &VerblunskySequence,
    point: UnitCirclePoint,
    n: usize,
) -> Result<PrueferTrace> {
    let mut radius = Vec::with_capacity(n + 1);
    let mut phase = Vec::with_capacity(n + 1);
    let mut theta = 0.0;
    let mut prev_star: Option<C64> = None;
    for state in Trajectory::new(seq, point.value(), false).take(n + 1) {
        let r = state.phi_star_monic.norm();
        if !(r >= f64::MIN_POSITIVE) || !r.is_finite() {
            return Err(OpucError::RadiusUnderflow { n: state.n });
        }
        if let Some(prev) = prev_star {
            // Phi_{n+1}^* / Phi_n^* = 1 - a_n z Phi_n / Phi_n^* lies in the right half plane
            theta -= (state.phi_star_monic * prev.conj()).arg();
        }
        radius.push(r);
        phase.push(theta);
        prev_star = Some(state.phi_star_monic);
    }
    Ok(PrueferTrace {
        point,
        radius,
        phase,
    })
}

impl PrueferTrace {
    pub fn len(&self) -> usize {
        self.radius.len()
    }

    pub fn is_empty(&self) -> bool {
        self.radius.is_empty()
    }

    /// `R_n exp(i(n eta + theta_n))`
    pub fn reconstruct(&self, n: usize) -> C64 {
        C64::from_polar(
            self.radius[n],
            n as f64 * self.point.angle() + self.phase[n],
        )
    }

    /// `R_n exp(-i theta_n)`
    pub fn reconstruct_star(&self, n: usize) -> C64 {
        C64::from_polar(self.radius[n], -self.phase[n])
    }

    /// Largest `|R_n e^{i(n eta + theta_n)} - Phi_n| / |Phi_n|` against the recursion.
    pub fn max_reconstruction_error(&self, seq: &VerblunskySequence) -> f64 {
        Trajectory::new(seq, self.point.value(), false)
            .take(self.len())
            .map(|s| (self.reconstruct(s.n) - s.phi_monic).norm() / s.phi_monic.norm())
            .fold(0.0, f64::max)
    }

    /// Steps `n` where `|theta_{n+1} - theta_n| < (pi/2)|a_n| / (1 - |a_n|)` fails.
    ///
    /// A zero coefficient gives a zero bound and a zero step, which is accepted.
    pub fn phase_bound_violations(&self, seq: &VerblunskySequence) -> Vec<usize> {
        (0..self.len().saturating_sub(1))
            .filter(|&n| {
                let a = seq.get(n).norm();
                let step = (self.phase[n + 1] - self.phase[n]).abs();
                let bound = std::f64::consts::FRAC_PI_2 * a / (1.0 - a);
                !(step < bound || (a == 0.0 && step == 0.0))
            })
            .collect()
    }

    pub fn max_phase_step(&self) -> f64 {
        self.phase
            .windows(2)
            .map(|w| (w[1] - w[0]).abs())
            .fold(0.0, f64::max)
    }
}

/// `a_n = sum_k beta_{n,k} + E_n`, one component per frequency.
#[derive(Debug, Clone, PartialEq)]
pub struct GbvDecomposition {
    frequencies: Vec<UnitCirclePoint>,
    components: Vec<Vec<C64>>,
    residual: Vec<C64>,
    sequence: Vec<C64>,
}

impl GbvDecomposition {
    /// The residual is whatever the components leave of `sequence`.
    pub fn new(
        frequencies: Vec<UnitCirclePoint>,
        components: Vec<Vec<C64>>,
        sequence: Vec<C64>,
    ) -> Result<Self> {
        let residual = vec![C64::new(0.0, 0.0); sequence.len()];
        let mut d = Self::with_residual(frequencies, components, residual, sequence)?;
        for n in 0..d.sequence.len() {
            d.residual[n] = d.sequence[n] - d.components.iter().map(|c| c[n]).sum::<C64>();
        }
        Ok(d)
    }

    pub fn with_residual(
        frequencies: Vec<UnitCirclePoint>,
        components: Vec<Vec<C64>>,
        residual: Vec<C64>,
        sequence: Vec<C64>,
    ) -> Result<Self> {
        if frequencies.len() != components.len() {
            return Err(OpucError::InvalidArgument(format!(
                "{} frequencies for {} components",
                frequencies.len(),
                components.len()
            )));
        }
        let n = sequence.len();
        if residual.len() != n || components.iter().any(|c| c.len() != n) {
            return Err(OpucError::InvalidArgument(
                "component lengths differ".into(),
            ));
        }
        Ok(Self {
            frequencies,
            components,
            residual,
            sequence,
        })
    }

    pub fn frequencies(&self) -> &[UnitCirclePoint] {
        &self.frequencies
    }

    pub fn components(&self) -> &[Vec<C64>] {
        &self.components
    }

    pub fn residual(&self) -> &[C64] {
        &self.residual
    }

    pub fn sequence(&self) -> &[C64] {
        &self.sequence
    }

    pub fn len(&self) -> usize {
        self.sequence.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sequence.is_empty()
    }

    /// First index where `sum beta + E` differs from `a`, with its residual.
    pub fn identity_mismatch(&self, upto: usize) -> Option<(usize, f64)> {
        (0..upto.min(self.len())).find_map(|n| {
            let total = self.components.iter().map(|c| c[n]).sum::<C64>() + self.residual[n];
            let r = (total - self.sequence[n]).norm();
            (r > DECOMPOSITION_TOLERANCE * (1.0 + self.sequence[n].norm())).then_some((n, r))
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GbvVerdict {
    Converging,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GbvVariation {
    pub n: usize,
    /// `S_k(N) = sum_{n<N} |zeta_k beta_{n+1,k} - beta_{n,k}|`
    pub partial_sums: Vec<f64>,
    /// `S_k(2^j)` for `2^j <= N`.
    pub dyadic_partials: Vec<Vec<f64>>,
    /// `S_k(2^{j+1}) - S_k(2^j)`
    pub block_increments: Vec<Vec<f64>>,
    pub verdicts: Vec<GbvVerdict>,
}

impl GbvVariation {
    pub fn all_converging(&self) -> bool {
        self.verdicts.iter().all(|v| *v == GbvVerdict::Converging)
    }
}

/// Converging when each of the last three block increments shrinks by `factor`.
pub fn increments_verdict(increments: &[f64], factor: f64) -> GbvVerdict {
    if increments.len() < 3 {
        return GbvVerdict::Inconclusive;
    }
    let last = &increments[increments.len() - 3..];
    if last.windows(2).all(|w| w[1] * factor <= w[0]) {
        GbvVerdict::Converging
    } else {
        GbvVerdict::Inconclusive
    }
}

/// Variation sums of every component up to `n`; needs components through index `n`.
pub fn gbv_variation(decomp: &GbvDecomposition, n: usize) -> Result<GbvVariation> {
    if decomp.len() < n + 1 {
        return Err(OpucError::NotEnoughMoments {
            available: decomp.len(),
            required: n + 1,
        });
    }
    if let Some((index, residual)) = decomp.identity_mismatch(n + 1) {
        return Err(OpucError::DecompositionMismatch { index, residual });
    }
    let mut partial_sums = Vec::new();
    let mut dyadic_partials = Vec::new();
    let mut block_increments = Vec::new();
    let mut verdicts = Vec::new();
    for (freq, beta) in decomp.frequencies.iter().zip(&decomp.components) {
        let zeta = freq.value();
        let mut sum = crate::summation::CompensatedSum::new();
        let mut dyadic = Vec::new();
        for m in 0..n {
            if m.is_power_of_two() {
                dyadic.push(sum.value());
            }
            sum.add((zeta * beta[m + 1] - beta[m]).norm());
        }
        if n.is_power_of_two() {
            dyadic.push(sum.value());
        }
        let increments: Vec<f64> = dyadic.windows(2).map(|w| w[1] - w[0]).collect();
        verdicts.push(increments_verdict(&increments, 1.5));
        partial_sums.push(sum.value());
        dyadic_partials.push(dyadic);
        block_increments.push(increments);
    }
    Ok(GbvVariation {
        n,
        partial_sums,
        dyadic_partials,
        block_increments,
        verdicts,
    })
}

/// How `c_j` is built from `z_j` and `D(z_j)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TailConvention {
    /// `conj(z) |D|^2 / D^2`
    ConjOverD,
    /// `conj(z) D^2 / |D|^2`
    DOverConj,
}

impl TailConvention {
    pub fn constant(self, z: C64, d: C64) -> C64 {
        let u = match self {
            Self::ConjOverD => d.conj() / d,
            Self::DOverConj => d / d.conj(),
        };
        z.conj() * u
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DyadicBlock {
    pub start: usize,
    pub end: usize,
    pub max: f64,
}

/// Maxima of `values[n]` over full blocks `[2^k, 2^{k+1})`.
pub fn dyadic_block_maxima(values: &[f64]) -> Vec<DyadicBlock> {
    let mut out = Vec::new();
    let mut start = 1;
    while 2 * start <= values.len() {
        let max = values[start..2 * start].iter().copied().fold(0.0, f64::max);
        out.push(DyadicBlock {
            start,
            end: 2 * start,
            max,
        });
        start *= 2;
    }
    out
}

/// Each block maximum is below the previous one divided by `factor` (`factor = 1` means strictly decreasing).
pub fn blocks_decay(blocks: &[DyadicBlock], factor: f64) -> bool {
    blocks.windows(2).all(|w| {
        if factor == 1.0 {
            w[1].max < w[0].max
        } else {
            w[1].max * factor <= w[0].max
        }
    })
}

fn check_distinct(masses: &[PointMass]) -> Result<()> {
    for (i, a) in masses.iter().enumerate() {
        if masses[..i].iter().any(|b| b.location() == a.location()) {
            return Err(OpucError::CoincidentMasses {
                angle: a.location().angle(),
            });
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComponentExtraction {
    pub decomposition: GbvDecomposition,
    pub constants: Vec<C64>,
    /// Per dyadic block maximum of `n |E_n|`.
    pub error_blocks: Vec<DyadicBlock>,
}

/// Splits `a_n(perturbed)` into the base, model tails `c_j conj(z_j)^n / n` and a residual `E_n`.
pub fn extract_components(
    base: &VerblunskySequence,
    perturbed: &VerblunskySequence,
    masses: &[PointMass],
    d_at_masses: &[C64],
    convention: TailConvention,
) -> Result<ComponentExtraction> {
    check_distinct(masses)?;
    if d_at_masses.len() != masses.len() {
        return Err(OpucError::InvalidArgument(format!(
            "{} Szegő values for {} masses",
            d_at_masses.len(),
            masses.len()
        )));
    }
    let constants: Vec<C64> = masses
        .iter()
        .zip(d_at_masses)
        .map(|(m, &d)| convention.constant(m.location().value(), d))
        .collect();
    let sequence = perturbed.values();
    let len = sequence.len();
    let mut frequencies = vec![UnitCirclePoint::from_angle(0.0)?];
    let mut components = vec![(0..len).map(|n| base.get(n)).collect::<Vec<_>>()];
    for (m, &c) in masses.iter().zip(&constants) {
        frequencies.push(m.location());
        components.push(model_tail(m.location(), c, len));
    }
    let decomposition = GbvDecomposition::new(frequencies, components, sequence)?;
    let scaled: Vec<f64> = decomposition
        .residual()
        .iter()
        .enumerate()
        .map(|(n, e)| n as f64 * e.norm())
        .collect();
    Ok(ComponentExtraction {
        error_blocks: dyadic_block_maxima(&scaled),
        decomposition,
        constants,
    })
}

/// `c conj(z)^n / n` for `n >= 1`, zero at `n = 0`.
pub fn model_tail(z: UnitCirclePoint, c: C64, len: usize) -> Vec<C64> {
    let t = z.angle();
    (0..len)
        .map(|n| {
            if n == 0 {
                C64::new(0.0, 0.0)
            } else {
                c * C64::from_polar(1.0, -(n as f64) * t) / n as f64
            }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConventionVerdict {
    ConjOverD,
    DOverConj,
    /// The candidates coincide within tolerance (e.g. real `D`).
    Both,
    Neither,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailFitReport {
    pub fitted_c: Vec<C64>,
    pub predicted_conj_over_d: Vec<C64>,
    pub predicted_d_over_conj: Vec<C64>,
    pub distance_conj_over_d: f64,
    pub distance_d_over_conj: f64,
    pub winner: ConventionVerdict,
    pub window: (usize, usize),
    pub residual_rms: f64,
    pub condition: f64,
    /// Per dyadic block maximum of `n |E_n|` with the selected constants.
    pub error_decay: Vec<DyadicBlock>,
}

/// Least-squares fit of `n (a_n(perturbed) - a_n(base)) ~ sum_j c_j conj(z_j)^n` over `window`.
pub fn fit_tail_constants(
    base: &VerblunskySequence,
    perturbed: &VerblunskySequence,
    masses: &[PointMass],
    window: (usize, usize),
) -> Result<TailFitReport> {
    check_distinct(masses)?;
    let m = masses.len();
    let (lo, hi) = window;
    if m == 0 {
        return Err(OpucError::InvalidArgument(
            "tail fit needs at least one mass".into(),
        ));
    }
    if lo == 0 || hi < lo + 10 * m {
        return Err(OpucError::InvalidWindow(format!(
            "[{lo}, {hi}] needs n_lo >= 1 and n_hi >= n_lo + {}",
            10 * m
        )));
    }
    if hi >= perturbed.len() {
        return Err(OpucError::InvalidWindow(format!(
            "n_hi = {hi} beyond the {} available coefficients",
            perturbed.len()
        )));
    }
    let rows = hi - lo + 1;
    let design = DMatrix::from_fn(rows, m, |r, j| {
        C64::from_polar(1.0, -((lo + r) as f64) * masses[j].location().angle())
    });
    let target = DVector::from_fn(rows, |r, _| {
        let n = lo + r;
        n as f64 * (perturbed.get(n) - base.get(n))
    });
    let svd = design.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    let condition = if smin > 0.0 {
        smax / smin
    } else {
        f64::INFINITY
    };
    if !(condition <= MAX_CONDITION) {
        return Err(OpucError::IllConditioned { condition });
    }
    let solution = svd
        .solve(&target, 0.0)
        .map_err(|e| OpucError::InvalidArgument(e.to_string()))?;
    let fitted_c: Vec<C64> = solution.iter().copied().collect();
    let residual_rms = ((&design * &solution - &target).norm_squared() / rows as f64).sqrt();

    let mut predicted_conj_over_d = Vec::with_capacity(m);
    let mut predicted_d_over_conj = Vec::with_capacity(m);
    for mass in masses {
        let z = mass.location().value();
        let d = szego_closed_form(base, z)?.value;
        predicted_conj_over_d.push(TailConvention::ConjOverD.constant(z, d));
        predicted_d_over_conj.push(TailConvention::DOverConj.constant(z, d));
    }
    let distance = |pred: &[C64]| {
        fitted_c
            .iter()
            .zip(pred)
            .map(|(f, p)| (f - p).norm())
            .fold(0.0, f64::max)
    };
    let distance_conj_over_d = distance(&predicted_conj_over_d);
    let distance_d_over_conj = distance(&predicted_d_over_conj);
    let winner = match (
        distance_conj_over_d < CONVENTION_TOLERANCE,
        distance_d_over_conj < CONVENTION_TOLERANCE,
    ) {
        (true, true) => ConventionVerdict::Both,
        (true, false) => ConventionVerdict::ConjOverD,
        (false, true) => ConventionVerdict::DOverConj,
        (false, false) => ConventionVerdict::Neither,
    };
    let constants = match winner {
        ConventionVerdict::ConjOverD | ConventionVerdict::Both => &predicted_conj_over_d,
        ConventionVerdict::DOverConj => &predicted_d_over_conj,
        ConventionVerdict::Neither => &fitted_c,
    };
    let mut scaled = vec![0.0; perturbed.len()];
    for (n, s) in scaled.iter_mut().enumerate().skip(1) {
        let model: C64 = masses
            .iter()
            .zip(constants)
            .map(|(mass, c)| c * C64::from_polar(1.0, -(n as f64) * mass.location().angle()))
            .sum();
        *s = (n as f64 * (perturbed.get(n) - base.get(n)) - model).norm();
    }
    Ok(TailFitReport {
        fitted_c,
        predicted_conj_over_d,
        predicted_d_over_conj,
        distance_conj_over_d,
        distance_d_over_conj,
        winner,
        window,
        residual_rms,
        condition,
        error_decay: dyadic_block_maxima(&scaled),
    })
}

/// Counter-clockwise arc from `start` to `end` (radians).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Arc {
    pub start: f64,
    pub end: f64,
}

impl Arc {
    pub fn new(start: f64, end: f64) -> Result<Self> {
        if !start.is_finite()
            || !end.is_finite()
            || end < start
            || end - start > std::f64::consts::TAU
        {
            return Err(OpucError::InvalidArgument(format!("arc [{start}, {end}]")));
        }
        Ok(Self { start, end })
    }

    pub fn length(&self) -> f64 {
        self.end - self.start
    }

    pub fn distance_to(&self, p: &UnitCirclePoint) -> f64 {
        if canonical_angle(p.angle() - self.start) <= self.length() {
            0.0
        } else {
            angular_distance(p.angle(), self.start).min(angular_distance(p.angle(), self.end))
        }
    }

    /// `count` equally spaced points including both ends.
    pub fn grid(&self, count: usize) -> Vec<f64> {
        match count {
            0 => Vec::new(),
            1 => vec![self.start],
            _ => (0..count)
                .map(|i| self.start + self.length() * i as f64 / (count - 1) as f64)
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanReport {
    pub n: usize,
    pub grid: usize,
    /// `max_{n <= N, grid} |phi_n^*|`
    pub sup: f64,
    /// `running_sup[k] = max_{n <= 2^k, grid} |phi_n^*|`
    pub running_sup: Vec<f64>,
    /// `cauchy[k] = max_grid |phi_{2^{k+1}}^* - phi_{2^k}^*|`
    pub cauchy: Vec<f64>,
}

impl ScanReport {
    /// Relative growth of the running sup over the last `blocks` dyadic checkpoints.
    pub fn sup_growth(&self, blocks: usize) -> f64 {
        let k = self.running_sup.len() - 1;
        let j = k.saturating_sub(blocks);
        self.running_sup[k] / self.running_sup[j] - 1.0
    }

    /// Cauchy block maxima strictly decrease from checkpoint `from` on.
    pub fn cauchy_decreasing(&self, from: usize) -> bool {
        self.cauchy
            .get(from..)
            .is_some_and(|c| c.windows(2).all(|w| w[1] < w[0]))
    }

    /// Cauchy block maxima peak within the first quarter of the blocks and
    /// strictly decrease after the peak.
    pub fn cauchy_decreasing_after_peak(&self) -> bool {
        let Some(peak) = self
            .cauchy
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .map(|(k, _)| k)
        else {
            return false;
        };
        4 * peak < self.cauchy.len() && self.cauchy_decreasing(peak)
    }
}

/// Scans `|phi_n^*|` for `n <= N` on `grid` points of `arc`.
pub fn convergence_scan(
    seq: &VerblunskySequence,
    arc: Arc,
    exclusions: &[UnitCirclePoint],
    grid: usize,
    n: usize,
    exclusion_radius: f64,
) -> Result<ScanReport> {
    for e in exclusions {
        let distance = arc.distance_to(e);
        if distance < exclusion_radius {
            return Err(OpucError::TooCloseToExclusion {
                angle: e.angle(),
                distance,
                radius: exclusion_radius,
            });
        }
    }
    if grid == 0 {
        return Err(OpucError::InvalidArgument("empty scan grid".into()));
    }
    let checkpoints = (usize::BITS - 1 - n.max(1).leading_zeros()) as usize + 1;
    let per_point: Vec<(Vec<f64>, Vec<C64>, f64)> = arc
        .grid(grid)
        .into_par_iter()
        .map(|theta| {
            let mut running = Vec::with_capacity(checkpoints);
            let mut at_pow = Vec::with_capacity(checkpoints);
            let mut sup: f64 = 0.0;
            for state in Trajectory::new(seq, C64::from_polar(1.0, theta), false).take(n + 1) {
                let v = state.phi_star();
                sup = sup.max(v.norm());
                if state.n.is_power_of_two() {
                    running.push(sup);
                    at_pow.push(v);
                }
            }
            (running, at_pow, sup)
        })
        .collect();
    let mut running_sup = vec![0.0f64; checkpoints];
    let mut cauchy = vec![0.0f64; checkpoints.saturating_sub(1)];
    let mut sup: f64 = 0.0;
    for (running, at_pow, s) in &per_point {
        sup = sup.max(*s);
        for (r, v) in running_sup.iter_mut().zip(running) {
            *r = r.max(*v);
        }
        for (k, c) in cauchy.iter_mut().enumerate() {
            *c = c.max((at_pow[k + 1] - at_pow[k]).norm());
        }
    }
    Ok(ScanReport {
        n,
        grid,
        sup,
        running_sup,
        cauchy,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::MeasureSpec;
    use crate::pointmass::{insert_chain, insert_direct};
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, PI, TAU};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn at(t: f64) -> UnitCirclePoint {
        UnitCirclePoint::from_angle(t).unwrap()
    }

    fn one_mass(base: &VerblunskySequence, angle: f64, gamma: f64, n: usize) -> VerblunskySequence {
        insert_direct(base, at(angle), gamma, n).unwrap().perturbed
    }

    #[test]
    fn pruefer_lebesgue() {
        let t = pruefer_trace(&VerblunskySequence::default(), at(1.3), 50).unwrap();
        assert!(t.radius.iter().all(|&r| r == 1.0));
        assert!(t.phase.iter().all(|&p| p == 0.0));
        assert!(t
            .phase_bound_violations(&VerblunskySequence::default())
            .is_empty());
    }

    #[test]
    fn pruefer_single_step() {
        let a = c(0.4, -0.3);
        let s = VerblunskySequence::new([a]).unwrap();
        let eta = 0.7;
        let t = pruefer_trace(&s, at(eta), 20).unwrap();
        let r1 = (C64::from_polar(1.0, eta) - a.conj()).norm();
        for n in 1..=20 {
            assert!((t.radius[n] - r1).abs() < 1e-15);
            assert_eq!(t.phase[n], t.phase[1]);
        }
        assert!(t.max_reconstruction_error(&s) < 1e-14);
        assert!(t.phase_bound_violations(&s).is_empty());
    }

    #[test]
    fn pruefer_unwraps_past_pi() {
        // many steps of the same sign push theta well past pi
        let s = VerblunskySequence::new(vec![c(0.6, 0.0); 200]).unwrap();
        let t = pruefer_trace(&s, at(0.1), 200).unwrap();
        assert!(t.max_phase_step() < FRAC_PI_2);
        assert!(t.max_reconstruction_error(&s) < 1e-10);
        assert!(t.phase.iter().any(|p| p.abs() > PI));
    }

    #[test]
    fn variation_constant_component() {
        let d = GbvDecomposition::new(
            vec![at(0.0)],
            vec![vec![c(0.3, 0.1); 65]],
            vec![c(0.3, 0.1); 65],
        )
        .unwrap();
        let v = gbv_variation(&d, 64).unwrap();
        assert_eq!(v.partial_sums, vec![0.0]);
        assert_eq!(v.verdicts, vec![GbvVerdict::Converging]);
    }

    #[test]
    fn variation_model_tail() {
        let z = at(2.0);
        let beta = model_tail(z, c(1.0, 0.0), 4097);
        let d = GbvDecomposition::new(vec![z], vec![beta.clone()], beta).unwrap();
        let v = gbv_variation(&d, 4096).unwrap();
        assert_eq!(v.verdicts, vec![GbvVerdict::Converging]);
        // |1/(n+1) - 1/n| telescopes to 1 - 1/N, plus the n = 0 term
        assert!((v.partial_sums[0] - (2.0 - 1.0 / 4096.0)).abs() < 1e-12);
    }

    #[test]
    fn variation_detects_divergence_and_mismatch() {
        // frequency 1 paired with a rotating component never settles
        let z = at(2.0);
        let beta: Vec<C64> = (0..1025)
            .map(|n| C64::from_polar(0.1, -(n as f64) * 2.0))
            .collect();
        let d = GbvDecomposition::new(vec![at(0.0)], vec![beta.clone()], beta.clone()).unwrap();
        assert_eq!(
            gbv_variation(&d, 1024).unwrap().verdicts,
            vec![GbvVerdict::Inconclusive]
        );
        let d = GbvDecomposition::new(vec![z], vec![beta.clone()], beta.clone()).unwrap();
        assert!(gbv_variation(&d, 1024).unwrap().partial_sums[0] < 1e-12);

        let bad = GbvDecomposition::with_residual(
            vec![z],
            vec![beta.clone()],
            vec![c(0.0, 0.0); 1025],
            vec![c(0.5, 0.0); 1025],
        )
        .unwrap();
        assert!(matches!(
            gbv_variation(&bad, 1024),
            Err(OpucError::DecompositionMismatch { index: 0, .. })
        ));
        assert!(matches!(
            gbv_variation(&d, 2048),
            Err(OpucError::NotEnoughMoments { .. })
        ));
    }

    #[test]
    fn extraction_without_masses() {
        let base = VerblunskySequence::new([c(0.3, 0.2), c(-0.1, 0.0)]).unwrap();
        let long = base.resized(64);
        let e = extract_components(&base, &long, &[], &[], TailConvention::ConjOverD).unwrap();
        assert_eq!(e.decomposition.components().len(), 1);
        assert!(e.decomposition.residual().iter().all(|r| r.norm() == 0.0));
    }

    #[test]
    fn extraction_single_mass_lebesgue() {
        for gamma in [0.2, 0.5] {
            let base = VerblunskySequence::default();
            let pert = one_mass(&base, 0.0, gamma, 1 << 15);
            let m = PointMass::at_angle(0.0, gamma).unwrap();
            let e = extract_components(
                &base,
                &pert,
                &[m],
                &[c(1.0, 0.0)],
                TailConvention::ConjOverD,
            )
            .unwrap();
            // E_n = gamma/(1 + gamma n) - 1/n = -1/(n (1 + gamma n))
            for n in [10usize, 1000, 30000] {
                let expected = -1.0 / (n as f64 * (1.0 + gamma * n as f64));
                assert!(
                    (e.decomposition.residual()[n].re - expected).abs()
                        < 1e-12 * expected.abs().max(1e-6)
                );
            }
            let late: Vec<_> = e
                .error_blocks
                .iter()
                .filter(|b| b.start >= 1 << 10)
                .copied()
                .collect();
            assert!(blocks_decay(&late, 1.2));
        }
    }

    #[test]
    fn extraction_rejects_coincident() {
        let m = PointMass::at_angle(1.0, 0.1).unwrap();
        let s = VerblunskySequence::default();
        assert!(matches!(
            extract_components(
                &s,
                &s,
                &[m, m],
                &[c(1.0, 0.0); 2],
                TailConvention::ConjOverD
            ),
            Err(OpucError::CoincidentMasses { .. })
        ));
    }

    #[test]
    fn two_mass_extraction_converges() {
        let masses = vec![
            PointMass::at_angle(FRAC_PI_2, 0.2).unwrap(),
            PointMass::at_angle(4.0, 0.3).unwrap(),
        ];
        let spec = MeasureSpec::new(VerblunskySequence::default(), masses.clone()).unwrap();
        let pert = insert_chain(&spec, (1 << 16) + 1).unwrap();
        let d = vec![c(1.0, 0.0); 2];
        let e =
            extract_components(spec.base(), &pert, &masses, &d, TailConvention::ConjOverD).unwrap();
        let v = gbv_variation(&e.decomposition, 1 << 16).unwrap();
        assert!(v.all_converging(), "{:?}", v.block_increments);
        let late: Vec<_> = e
            .error_blocks
            .iter()
            .filter(|b| b.start >= 1 << 10)
            .copied()
            .collect();
        assert!(blocks_decay(&late, 1.0), "{late:?}");
    }

    #[test]
    fn tail_fit_lebesgue_weight_independent() {
        for gamma in [0.1, 0.5, 0.9] {
            let base = VerblunskySequence::default();
            let pert = one_mass(&base, 0.0, gamma, 4001);
            let m = PointMass::at_angle(0.0, gamma).unwrap();
            let r = fit_tail_constants(&base, &pert, &[m], (1000, 4000)).unwrap();
            assert!((r.fitted_c[0] - c(1.0, 0.0)).norm() < 0.05, "{r:?}");
            assert_eq!(r.winner, ConventionVerdict::Both);
        }
    }

    #[test]
    fn tail_fit_rotated_mass() {
        let base = VerblunskySequence::default();
        let pert = one_mass(&base, FRAC_PI_3, 0.3, 4001);
        let m = PointMass::at_angle(FRAC_PI_3, 0.3).unwrap();
        let r = fit_tail_constants(&base, &pert, &[m], (1000, 4000)).unwrap();
        assert!((r.fitted_c[0] - C64::from_polar(1.0, -FRAC_PI_3)).norm() < 0.05);
    }

    #[test]
    fn tail_fit_selects_convention() {
        let base = VerblunskySequence::new([c(0.5, 0.0)]).unwrap();
        let pert = one_mass(&base, FRAC_PI_2, 0.4, 4001);
        let m = PointMass::at_angle(FRAC_PI_2, 0.4).unwrap();
        let r = fit_tail_constants(&base, &pert, &[m], (1000, 4000)).unwrap();
        assert_eq!(r.winner, ConventionVerdict::ConjOverD, "{r:?}");
        assert!((r.predicted_conj_over_d[0] - c(-0.8, -0.6)).norm() < 1e-12);
        assert!(r.distance_d_over_conj > 1.0);
    }

    #[test]
    fn tail_fit_errors() {
        let base = VerblunskySequence::default();
        let pert = one_mass(&base, 0.0, 0.3, 200);
        let near = [
            PointMass::at_angle(1.0, 0.1).unwrap(),
            PointMass::at_angle(1.0 + 1e-9, 0.1).unwrap(),
        ];
        assert!(matches!(
            fit_tail_constants(&base, &pert, &near, (100, 150)),
            Err(OpucError::IllConditioned { .. })
        ));
        let m = [PointMass::at_angle(0.0, 0.3).unwrap()];
        assert!(matches!(
            fit_tail_constants(&base, &pert, &m, (100, 105)),
            Err(OpucError::InvalidWindow(_))
        ));
        assert!(matches!(
            fit_tail_constants(&base, &pert, &m, (100, 400)),
            Err(OpucError::InvalidWindow(_))
        ));
    }

    #[test]
    fn scan_lebesgue() {
        let r = convergence_scan(
            &VerblunskySequence::default(),
            Arc::new(0.0, TAU).unwrap(),
            &[],
            16,
            256,
            0.05,
        )
        .unwrap();
        assert_eq!(r.sup, 1.0);
        assert!(r.cauchy.iter().all(|&c| c == 0.0));
        assert_eq!(r.running_sup.len(), 9);
    }

    #[test]
    fn scan_away_from_mass() {
        let seq = one_mass(&VerblunskySequence::default(), 0.0, 0.5, 1 << 12);
        let arc = Arc::new(FRAC_PI_2, 3.0 * FRAC_PI_2).unwrap();
        let r = convergence_scan(&seq, arc, &[at(0.0)], 64, 1 << 12, 0.05).unwrap();
        assert!(r.sup < 10.0);
        assert!(r.sup_growth(3) <= 0.0);
        assert!(r.cauchy_decreasing(4), "{:?}", r.cauchy);
        assert!(r.cauchy_decreasing_after_peak());
        assert!(matches!(
            convergence_scan(&seq, Arc::new(-0.5, 0.5).unwrap(), &[at(0.0)], 8, 64, 0.05),
            Err(OpucError::TooCloseToExclusion { .. })
        ));
        assert!(matches!(
            convergence_scan(&seq, Arc::new(0.06, 1.0).unwrap(), &[at(0.0)], 8, 64, 0.1),
            Err(OpucError::TooCloseToExclusion { .. })
        ));
    }

    fn disk_value(max_abs: f64) -> impl Strategy<Value = C64> {
        (0.0..max_abs, 0.0..TAU).prop_map(|(r, t)| C64::from_polar(r, t))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn pruefer_invariants(coeffs in prop::collection::vec(disk_value(0.9), 1..400), eta in 0.0..TAU) {
            let s = VerblunskySequence::new(coeffs).unwrap();
            let t = pruefer_trace(&s, at(eta), s.len() + 10).unwrap();
            prop_assert!(t.max_reconstruction_error(&s) < 1e-10);
            prop_assert!(t.phase_bound_violations(&s).is_empty());
            prop_assert!(t.max_phase_step() < PI);
            let last = Trajectory::new(&s, at(eta).value(), false).nth(s.len()).unwrap();
            prop_assert!((t.reconstruct_star(s.len()) - last.phi_star_monic).norm() < 1e-10 * last.phi_star_monic.norm());
        }

        #[test]
        fn candidates_are_unimodular(d in disk_value(10.0), eta in 0.0..TAU) {
            prop_assume!(d.norm() > 1e-6);
            let z = C64::from_polar(1.0, eta);
            for conv in [TailConvention::ConjOverD, TailConvention::DOverConj] {
                prop_assert!((conv.constant(z, d).norm() - 1.0).abs() < 1e-12);
            }
        }
    }
}

//! Verblunsky coefficients after adding a point mass.
//!
//! For `dnu = (1 - gamma) dmu + gamma delta_omega` with `zeta = e^{i omega}`,
//!
//! ```text
//! a_n(dnu) = a_n + rho_n / ((1 - gamma)/gamma + K_n(zeta)) * conj(phi_{n+1}(zeta)) * phi_n^*(zeta)
//! ```
//!
//! where `rho_n = (1 - |a_n|^2)^{1/2}` and `K_n(zeta) = sum_{j<=n} |phi_j(zeta)|^2`.
//! Everything on the right is recursion data of `dmu` at the single point `zeta`,
//! so one sweep produces `N` perturbed coefficients in O(N). Two slower,
//! independently derived routes (Simon's inner-sum formula and Geronimus'
//! perturbed polynomials) are kept for cross-validation.

use serde::{Deserialize, Serialize};

use crate::error::{OpucError, Result};
use crate::measure::{permute, MeasureSpec, PointMass};
use crate::recursion::{CoefficientTrajectory, Polynomial, Trajectory};
use crate::sequence::{UnitCirclePoint, VerblunskySequence, C64};
use crate::summation::CompensatedSum;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InsertionMethod {
    /// Single O(N) sweep with the closed-form correction.
    Direct,
    /// Simon's formula with the inner sum over `a_{j-1} ||Phi_{n+1}|| / ||Phi_j|| phi_j`.
    Simon,
    /// Coefficient extraction from Geronimus' perturbed monic polynomials.
    Geronimus,
}

impl InsertionMethod {
    pub const ALL: [InsertionMethod; 3] = [Self::Direct, Self::Simon, Self::Geronimus];
}

#[derive(Debug, Clone, PartialEq)]
pub struct InsertionResult {
    pub perturbed: VerblunskySequence,
    /// `a_n(dnu) - a_n(dmu)`
    pub tail_terms: Vec<C64>,
    pub method: InsertionMethod,
}

fn check_weight(gamma: f64) -> Result<()> {
    if gamma.is_finite() && gamma > 0.0 && gamma < 1.0 {
        Ok(())
    } else {
        Err(OpucError::InvalidWeight(gamma))
    }
}

fn finish(
    perturbed: Vec<C64>,
    tail_terms: Vec<C64>,
    method: InsertionMethod,
) -> Result<InsertionResult> {
    debug_assert_eq!(perturbed.len(), tail_terms.len());
    Ok(InsertionResult {
        perturbed: VerblunskySequence::new(perturbed)?,
        tail_terms,
        method,
    })
}

/// `a_n(dnu)` for `n < n_max` in one sweep of the recursion at `zeta`.
pub fn insert_direct(
    base: &VerblunskySequence,
    zeta: UnitCirclePoint,
    gamma: f64,
    n_max: usize,
) -> Result<InsertionResult> {
    check_weight(gamma)?;
    let z = zeta.value();
    let ratio = (1.0 - gamma) / gamma;
    let mut perturbed = Vec::with_capacity(n_max);
    let mut tails = Vec::with_capacity(n_max);
    let mut traj = Trajectory::new(base, z, true);
    let mut current = traj.next().expect("unbounded");
    for next in traj.take(n_max) {
        let n = current.n;
        let alpha = base.coeff(n);
        let kernel = current.kernel_accum().expect("kernel tracked");
        let tail = alpha.rho() / (ratio + kernel) * next.phi().conj() * current.phi_star();
        tails.push(tail);
        perturbed.push(alpha.value() + tail);
        current = next;
    }
    finish(perturbed, tails, InsertionMethod::Direct)
}

/// Simon's formula
/// `a_n(dnu) = a_n - q_n^{-1} gamma conj(phi_{n+1}(zeta)) sum_{j<=n} a_{j-1} (||Phi_{n+1}|| / ||Phi_j||) phi_j(zeta)`
/// with `a_{-1} = -1` and `q_n = (1 - gamma) + gamma K_n(zeta)`. O(N^2).
pub fn insert_simon(
    base: &VerblunskySequence,
    zeta: UnitCirclePoint,
    gamma: f64,
    n_max: usize,
) -> Result<InsertionResult> {
    check_weight(gamma)?;
    let states: Vec<_> = Trajectory::new(base, zeta.value(), false)
        .take(n_max + 1)
        .collect();
    let phi: Vec<C64> = states.iter().map(|s| s.phi()).collect();
    let norms: Vec<f64> = states.iter().map(|s| s.norm).collect();
    let alpha_prev = |j: usize| {
        if j == 0 {
            C64::new(-1.0, 0.0)
        } else {
            base.get(j - 1)
        }
    };

    let mut perturbed = Vec::with_capacity(n_max);
    let mut tails = Vec::with_capacity(n_max);
    let mut kernel = 0.0;
    for n in 0..n_max {
        kernel += phi[n].norm_sqr();
        let q = (1.0 - gamma) + gamma * kernel;
        let inner: C64 = (0..=n)
            .map(|j| alpha_prev(j) * (norms[n + 1] / norms[j]) * phi[j])
            .sum();
        let alpha = base.get(n);
        let value = alpha - gamma / q * phi[n + 1].conj() * inner;
        perturbed.push(value);
        tails.push(value - alpha);
    }
    finish(perturbed, tails, InsertionMethod::Simon)
}

/// Calls `visit(k, Phi_k(., dnu))` for `k = 0..=n_max`, where
/// `Phi_k(z, dnu) = Phi_k(z) - Phi_k(zeta) K_{k-1}(z, zeta) / ((1-gamma)/gamma + K_{k-1}(zeta, zeta))`.
fn geronimus_sweep<F>(
    base: &VerblunskySequence,
    zeta: UnitCirclePoint,
    gamma: f64,
    n_max: usize,
    mut visit: F,
) where
    F: FnMut(usize, Polynomial),
{
    let z = zeta.value();
    let ratio = (1.0 - gamma) / gamma;
    // K_{k-1}(., zeta) = sum_{j<k} conj(phi_j(zeta)) phi_j(.)
    let mut kernel_poly = Polynomial::new(Vec::new());
    let mut kernel_diag = CompensatedSum::new();
    let coeffs = CoefficientTrajectory::new(base);
    let points = Trajectory::new(base, z, false);
    for (k, (pair, state)) in coeffs.zip(points).take(n_max + 1).enumerate() {
        let factor = state.phi_monic / (ratio + kernel_diag.value());
        let mut perturbed = pair.monic.clone();
        perturbed.add_scaled(&kernel_poly, -factor);
        visit(k, perturbed);

        let phi_zeta = state.phi();
        kernel_poly.add_scaled(&pair.monic, phi_zeta.conj() / state.norm);
        kernel_diag.add(phi_zeta.norm_sqr());
    }
}

/// Perturbed monic polynomial `Phi_n(z, dnu)` as a coefficient vector.
pub fn geronimus_polynomial(
    base: &VerblunskySequence,
    zeta: UnitCirclePoint,
    gamma: f64,
    n: usize,
) -> Result<Polynomial> {
    check_weight(gamma)?;
    let mut out = None;
    geronimus_sweep(base, zeta, gamma, n, |k, p| {
        if k == n {
            out = Some(p);
        }
    });
    Ok(out.expect("sweep reaches n"))
}

/// `a_n(dnu) = -conj(Phi_{n+1}(0, dnu))` from Geronimus' polynomials. O(N^2).
pub fn insert_geronimus(
    base: &VerblunskySequence,
    zeta: UnitCirclePoint,
    gamma: f64,
    n_max: usize,
) -> Result<InsertionResult> {
    check_weight(gamma)?;
    let mut perturbed = Vec::with_capacity(n_max);
    geronimus_sweep(base, zeta, gamma, n_max, |k, p| {
        if k > 0 {
            perturbed.push(-p.constant_term().conj());
        }
    });
    let tails = perturbed
        .iter()
        .enumerate()
        .map(|(n, &a)| a - base.get(n))
        .collect();
    finish(perturbed, tails, InsertionMethod::Geronimus)
}

pub fn insert(
    method: InsertionMethod,
    base: &VerblunskySequence,
    zeta: UnitCirclePoint,
    gamma: f64,
    n_max: usize,
) -> Result<InsertionResult> {
    match method {
        InsertionMethod::Direct => insert_direct(base, zeta, gamma, n_max),
        InsertionMethod::Simon => insert_simon(base, zeta, gamma, n_max),
        InsertionMethod::Geronimus => insert_geronimus(base, zeta, gamma, n_max),
    }
}

/// Like [`insert`], but `gamma == 0` returns the base (zero-padded to `n_max`)
/// instead of an error.
pub fn insert_or_identity(
    method: InsertionMethod,
    base: &VerblunskySequence,
    zeta: UnitCirclePoint,
    gamma: f64,
    n_max: usize,
) -> Result<InsertionResult> {
    if gamma == 0.0 {
        return Ok(InsertionResult {
            perturbed: base.resized(n_max),
            tail_terms: vec![C64::new(0.0, 0.0); n_max],
            method,
        });
    }
    insert(method, base, zeta, gamma, n_max)
}

/// One insertion of a chain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainStep {
    pub mass: PointMass,
    /// Weight relative to the measure built so far: `gamma_j / (1 - sum of gammas inserted later)`.
    pub effective_weight: f64,
}

/// Order and rescaled weights for building
/// `(1 - sum gamma_j) dmu_0 + sum gamma_j delta_{omega_j}` one mass at a time.
///
/// After the first `k` steps the measure is
/// `(1 - sum_{j<=k} g_j) dmu_0 + sum_{j<=k} g_j delta_{omega_j}` with
/// `g_j = gamma_j / (1 - sum_{l>k} gamma_l)`; the last step uses the original weight.
#[derive(Debug, Clone, PartialEq)]
pub struct InsertionChain {
    spec: MeasureSpec,
    order: Vec<usize>,
    steps: Vec<ChainStep>,
}

impl InsertionChain {
    pub fn new(spec: &MeasureSpec) -> Self {
        let order: Vec<usize> = (0..spec.masses().len()).collect();
        Self::with_order(spec, &order).expect("identity permutation")
    }

    pub fn with_order(spec: &MeasureSpec, order: &[usize]) -> Result<Self> {
        let masses = permute(spec.masses(), order)?;
        let steps = (0..masses.len())
            .map(|k| {
                let later: f64 = masses[k + 1..].iter().map(|m| m.weight()).sum();
                ChainStep {
                    mass: masses[k],
                    effective_weight: masses[k].weight() / (1.0 - later),
                }
            })
            .collect();
        Ok(Self {
            spec: spec.clone(),
            order: order.to_vec(),
            steps,
        })
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn steps(&self) -> &[ChainStep] {
        &self.steps
    }

    /// Mass weights inside the intermediate measure after `k` insertions.
    pub fn intermediate_weights(&self, k: usize) -> Vec<f64> {
        let later: f64 = self.steps[k..].iter().map(|s| s.mass.weight()).sum();
        self.steps[..k]
            .iter()
            .map(|s| s.mass.weight() / (1.0 - later))
            .collect()
    }

    /// Runs every insertion with `method`, returning `a_n(dmu_m)` for `n < n_max`.
    pub fn run(&self, method: InsertionMethod, n_max: usize) -> Result<VerblunskySequence> {
        let mut current = self.spec.base().resized(n_max);
        for step in &self.steps {
            current = insert(
                method,
                &current,
                step.mass.location(),
                step.effective_weight,
                n_max,
            )?
            .perturbed;
        }
        Ok(current)
    }
}

/// `a_n(dmu_m)` for `n < n_max`, inserting the masses in listed order with the direct formula.
pub fn insert_chain(spec: &MeasureSpec, n_max: usize) -> Result<VerblunskySequence> {
    InsertionChain::new(spec).run(InsertionMethod::Direct, n_max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::{lebesgue_plus_one_mass_exact, moments, moments_to_verblunsky};
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, TAU};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn at(angle: f64) -> UnitCirclePoint {
        UnitCirclePoint::from_angle(angle).unwrap()
    }

    fn max_diff(a: &VerblunskySequence, b: &VerblunskySequence) -> f64 {
        assert_eq!(a.len(), b.len());
        (0..a.len())
            .map(|n| (a.get(n) - b.get(n)).norm())
            .fold(0.0, f64::max)
    }

    #[test]
    fn lebesgue_single_mass_closed_form_all_methods() {
        let lebesgue = VerblunskySequence::default();
        for gamma in [0.1, 0.5, 0.9] {
            for method in InsertionMethod::ALL {
                let r = insert(method, &lebesgue, at(0.0), gamma, 40).unwrap();
                for n in 0..40 {
                    let exact = lebesgue_plus_one_mass_exact(gamma, n);
                    assert!(
                        (r.perturbed.get(n) - c(exact, 0.0)).norm() < 1e-13,
                        "{method:?} n={n}"
                    );
                }
            }
        }
    }

    #[test]
    fn tail_terms_match_difference_exactly() {
        let base = VerblunskySequence::new([c(0.3, 0.2), c(-0.1, 0.4)]).unwrap();
        let r = insert_direct(&base, at(1.3), 0.4, 12).unwrap();
        for n in 0..12 {
            assert_eq!(r.perturbed.get(n), base.get(n) + r.tail_terms[n]);
        }
    }

    #[test]
    fn lebesgue_tail_magnitude() {
        let gamma = 0.35;
        let r = insert_direct(&VerblunskySequence::default(), at(2.2), gamma, 100).unwrap();
        for (n, t) in r.tail_terms.iter().enumerate() {
            let expected = 1.0 / ((1.0 - gamma) / gamma + n as f64 + 1.0);
            assert!((t.norm() - expected).abs() < 1e-15);
        }
    }

    #[test]
    fn tiny_weight_is_close_to_base() {
        let base = VerblunskySequence::new([c(0.4, 0.0), c(0.1, -0.3)]).unwrap();
        let r = insert_direct(&base, at(0.9), 1e-15, 10).unwrap();
        for n in 0..10 {
            assert!((r.perturbed.get(n) - base.get(n)).norm() < 1e-13);
        }
    }

    #[test]
    fn zero_weight_identity_is_opt_in() {
        let base = VerblunskySequence::new([c(0.4, 0.0)]).unwrap();
        assert_eq!(
            insert_direct(&base, at(0.0), 0.0, 3),
            Err(OpucError::InvalidWeight(0.0))
        );
        assert!(insert_simon(&base, at(0.0), 1.0, 3).is_err());
        assert!(insert_geronimus(&base, at(0.0), -0.1, 3).is_err());
        for method in InsertionMethod::ALL {
            let r = insert_or_identity(method, &base, at(0.0), 0.0, 3).unwrap();
            assert_eq!(r.perturbed, base.resized(3));
        }
    }

    #[test]
    fn simon_first_coefficient_matches_direct() {
        let base = VerblunskySequence::new([c(0.5, -0.2), c(0.3, 0.3)]).unwrap();
        let a = insert_direct(&base, at(0.77), 0.6, 1).unwrap();
        let b = insert_simon(&base, at(0.77), 0.6, 1).unwrap();
        assert!((a.perturbed.get(0) - b.perturbed.get(0)).norm() < 1e-14);
    }

    #[test]
    fn simon_agrees_with_direct() {
        let base = VerblunskySequence::new([c(0.4, 0.0), c(0.0, -0.2)]).unwrap();
        let a = insert_direct(&base, at(2.0), 0.25, 15).unwrap();
        let b = insert_simon(&base, at(2.0), 0.25, 15).unwrap();
        assert!(max_diff(&a.perturbed, &b.perturbed) < 1e-12);
    }

    #[test]
    fn geronimus_lebesgue_polynomial() {
        let gamma = 0.3;
        for n in 0..=12 {
            let p =
                geronimus_polynomial(&VerblunskySequence::default(), at(0.0), gamma, n).unwrap();
            assert_eq!(p.coeffs.len(), n + 1);
            let shift = if n == 0 {
                0.0
            } else {
                gamma / (1.0 + (n as f64 - 1.0) * gamma)
            };
            for k in 0..n {
                assert!((p.coeffs[k] - c(-shift, 0.0)).norm() < 1e-14);
            }
            assert!((p.coeffs[n] - c(1.0, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn direct_matches_toeplitz_oracle() {
        let base = VerblunskySequence::new([c(0.4, 0.0)]).unwrap();
        let spec = MeasureSpec::new(
            base.clone(),
            vec![PointMass::at_angle(FRAC_PI_3, 0.3).unwrap()],
        )
        .unwrap();
        let oracle = moments_to_verblunsky(&moments(&spec, 20, 4096).unwrap(), 20).unwrap();
        let r = insert_direct(&base, at(FRAC_PI_3), 0.3, 20).unwrap();
        assert!(max_diff(&r.perturbed, &oracle) < 1e-8);
    }

    #[test]
    fn chain_without_masses_is_identity() {
        let base = VerblunskySequence::new([c(0.4, 0.1)]).unwrap();
        let spec = MeasureSpec::new(base.clone(), vec![]).unwrap();
        assert_eq!(insert_chain(&spec, 5).unwrap(), base.resized(5));
    }

    #[test]
    fn chain_two_masses_order_and_oracle() {
        let spec = MeasureSpec::new(
            VerblunskySequence::default(),
            vec![
                PointMass::at_angle(FRAC_PI_2, 0.2).unwrap(),
                PointMass::at_angle(4.0, 0.3).unwrap(),
            ],
        )
        .unwrap();
        let forward = insert_chain(&spec, 30).unwrap();
        let backward = InsertionChain::with_order(&spec, &[1, 0])
            .unwrap()
            .run(InsertionMethod::Direct, 30)
            .unwrap();
        assert!(max_diff(&forward, &backward) < 1e-9);
        let oracle = moments_to_verblunsky(&moments(&spec, 30, 1024).unwrap(), 30).unwrap();
        assert!(max_diff(&forward, &oracle) < 1e-9);
    }

    #[test]
    fn chain_weights() {
        let spec = MeasureSpec::new(
            VerblunskySequence::default(),
            vec![
                PointMass::at_angle(0.5, 0.2).unwrap(),
                PointMass::at_angle(1.5, 0.3).unwrap(),
                PointMass::at_angle(2.5, 0.1).unwrap(),
            ],
        )
        .unwrap();
        let chain = InsertionChain::new(&spec);
        let w: Vec<f64> = chain.steps().iter().map(|s| s.effective_weight).collect();
        assert!((w[2] - 0.1).abs() < 1e-16);
        assert!((w[1] - 0.3 / 0.9).abs() < 1e-16);
        assert!((w[0] - 0.2 / 0.6).abs() < 1e-16);
        // dropping the last mass rescales the rest by (1 - gamma_m)^{-1}
        let inner = chain.intermediate_weights(2);
        assert!((inner[0] - 0.2 / 0.9).abs() < 1e-16 && (inner[1] - 0.3 / 0.9).abs() < 1e-16);
        for k in 0..=3 {
            assert!(chain.intermediate_weights(k).iter().sum::<f64>() < 1.0);
        }
        assert!(InsertionChain::with_order(&spec, &[0, 0, 1]).is_err());
    }

    #[test]
    fn direct_extends_past_base_length() {
        let base = VerblunskySequence::new([c(0.5, 0.0)]).unwrap();
        let r = insert_direct(&base, at(1.0), 0.5, 300).unwrap();
        assert_eq!(r.perturbed.len(), 300);
        assert!(r.perturbed.get(299).norm() > 0.0);
    }

    fn disk_value(max_abs: f64) -> impl Strategy<Value = C64> {
        (0.0..max_abs, 0.0..TAU).prop_map(|(r, t)| C64::from_polar(r, t))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn three_paths_agree(
            coeffs in prop::collection::vec(disk_value(0.8), 0..=10),
            angle in 0.0..TAU,
            gamma in 0.01..0.99,
        ) {
            let base = VerblunskySequence::new(coeffs).unwrap();
            let n = 50;
            let d = insert_direct(&base, at(angle), gamma, n).unwrap();
            let s = insert_simon(&base, at(angle), gamma, n).unwrap();
            let g = insert_geronimus(&base, at(angle), gamma, n).unwrap();
            prop_assert!(max_diff(&d.perturbed, &s.perturbed) < 1e-11);
            prop_assert!(max_diff(&d.perturbed, &g.perturbed) < 1e-9);
            for a in d.perturbed.values() {
                prop_assert!(a.norm() < 1.0 - 1e-13);
            }
        }

        #[test]
        fn tail_bound(
            coeffs in prop::collection::vec(disk_value(0.8), 0..=10),
            angle in 0.0..TAU,
            gamma in 0.01..0.99,
        ) {
            let base = VerblunskySequence::new(coeffs).unwrap();
            let r = insert_direct(&base, at(angle), gamma, 40).unwrap();
            let states: Vec<_> = Trajectory::new(&base, at(angle).value(), true).take(41).collect();
            for n in 0..40 {
                let bound = base.coeff(n).rho() * (states[n + 1].phi() * states[n].phi_star()).norm()
                    / states[n].kernel_accum().unwrap();
                prop_assert!(r.tail_terms[n].norm() <= bound * (1.0 + 1e-12));
            }
        }
    }
}

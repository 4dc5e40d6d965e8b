//! Measures built from a Bernstein–Szegő base plus point masses, their
//! moments, and the Toeplitz-matrix route back to Verblunsky coefficients.
//!
//! The Toeplitz route is deliberately naive (one dense Hermitian solve per
//! order) because it serves as ground truth for the recursion-based paths.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{OpucError, Result};
use crate::quadrature::PeriodicGrid;
use crate::recursion::{Polynomial, Trajectory};
use crate::sequence::{UnitCirclePoint, VerblunskySequence, C64};

/// Largest tolerated `|c_0 - 1|` of the quadrature before renormalizing.
pub const QUADRATURE_DEFECT_LIMIT: f64 = 1e-8;

/// A point mass of weight `gamma` at `e^{i omega}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PointMass {
    location: UnitCirclePoint,
    weight: f64,
}

impl PointMass {
    pub fn new(location: UnitCirclePoint, weight: f64) -> Result<Self> {
        if !weight.is_finite() || weight <= 0.0 || weight >= 1.0 {
            return Err(OpucError::InvalidWeight(weight));
        }
        Ok(Self { location, weight })
    }

    pub fn at_angle(angle: f64, weight: f64) -> Result<Self> {
        Self::new(UnitCirclePoint::from_angle(angle)?, weight)
    }

    pub fn location(&self) -> UnitCirclePoint {
        self.location
    }

    pub fn weight(&self) -> f64 {
        self.weight
    }
}

/// `(1 - sum gamma_j) dmu_0 + sum gamma_j delta_{omega_j}` with `dmu_0` the
/// Bernstein–Szegő measure of `base`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasureSpec {
    base: VerblunskySequence,
    masses: Vec<PointMass>,
}

impl MeasureSpec {
    pub fn new(base: VerblunskySequence, masses: Vec<PointMass>) -> Result<Self> {
        let total: f64 = masses.iter().map(|m| m.weight).sum();
        if total >= 1.0 {
            return Err(OpucError::TotalWeightTooLarge(total));
        }
        for (i, a) in masses.iter().enumerate() {
            for b in &masses[i + 1..] {
                if a.location.distance(&b.location) == 0.0 {
                    return Err(OpucError::CoincidentMasses {
                        angle: a.location.angle(),
                    });
                }
            }
        }
        Ok(Self { base, masses })
    }

    pub fn base(&self) -> &VerblunskySequence {
        &self.base
    }

    pub fn masses(&self) -> &[PointMass] {
        &self.masses
    }

    pub fn total_mass_weight(&self) -> f64 {
        self.masses.iter().map(|m| m.weight).sum()
    }

    /// Mirror image `theta -> -theta`: conjugated base, reflected mass locations.
    pub fn conj(&self) -> Self {
        Self {
            base: self.base.conj(),
            masses: self
                .masses
                .iter()
                .map(|m| PointMass {
                    location: m.location.conj(),
                    weight: m.weight,
                })
                .collect(),
        }
    }

    /// Same measure with the masses listed in a different order.
    pub fn permuted(&self, order: &[usize]) -> Result<Self> {
        let masses = permute(&self.masses, order)?;
        Ok(Self {
            base: self.base.clone(),
            masses,
        })
    }
}

pub(crate) fn permute<T: Copy>(items: &[T], order: &[usize]) -> Result<Vec<T>> {
    let mut seen = vec![false; items.len()];
    if order.len() != items.len() {
        return Err(OpucError::InvalidArgument(format!(
            "order has {} entries for {} masses",
            order.len(),
            items.len()
        )));
    }
    for &i in order {
        if i >= items.len() || std::mem::replace(&mut seen[i], true) {
            return Err(OpucError::InvalidArgument(format!(
                "{order:?} is not a permutation"
            )));
        }
    }
    Ok(order.iter().map(|&i| items[i]).collect())
}

/// Density `w(theta)` (w.r.t. `dtheta / 2pi`) of the Bernstein–Szegő measure of `base`:
/// `prod_j (1 - |a_j|^2) / |Phi_N^*(e^{i theta})|^2`.
pub fn bernstein_szego_weight(base: &VerblunskySequence, theta: f64) -> f64 {
    let n = base.support_len();
    let state = Trajectory::new(base, C64::from_polar(1.0, theta), false)
        .nth(n)
        .expect("trajectory is unbounded");
    (state.norm * state.norm) / state.phi_star_monic.norm_sqr()
}

/// Moments `c_j = int e^{-i j theta} dmu`, `j = 0..=M`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentVector {
    pub c: Vec<C64>,
    /// `|c_0 - 1|` of the absolutely continuous part before renormalization.
    pub defect: f64,
}

impl MomentVector {
    pub fn new(c: Vec<C64>) -> Self {
        Self { c, defect: 0.0 }
    }

    /// Highest stored index `M`.
    pub fn max_index(&self) -> usize {
        self.c.len().saturating_sub(1)
    }

    /// `c_j` for any integer `j`, using `c_{-j} = conj(c_j)`.
    pub fn get(&self, j: isize) -> C64 {
        let v = self.c[j.unsigned_abs()];
        if j < 0 {
            v.conj()
        } else {
            v
        }
    }

    /// `(L_n)_{jk} = c_{j-k}`, of size `(n + 1) x (n + 1)`.
    pub fn toeplitz(&self, n: usize) -> DMatrix<C64> {
        DMatrix::from_fn(n + 1, n + 1, |j, k| self.get(j as isize - k as isize))
    }
}

/// Default quadrature size for `moments`: `max(1024, 8 (M + N))`.
pub fn default_quad_points(max_index: usize, base_len: usize) -> usize {
    1024.max(8 * (max_index + base_len))
}

/// Moments `c_0..=c_M` of `spec`, with the absolutely continuous part
/// integrated by the periodic trapezoidal rule.
pub fn moments(spec: &MeasureSpec, max_index: usize, quad_points: usize) -> Result<MomentVector> {
    let degree = spec.base.support_len();
    let required = 4 * (max_index + degree);
    if quad_points < required.max(1) {
        return Err(OpucError::TooFewQuadraturePoints {
            points: quad_points,
            required,
        });
    }

    let grid = PeriodicGrid::new(quad_points);
    let roots = grid.roots_of_unity();
    let weights: Vec<f64> = if degree == 0 {
        vec![1.0; quad_points]
    } else {
        grid.nodes()
            .map(|t| bernstein_szego_weight(&spec.base, t))
            .collect()
    };

    let q = quad_points;
    let ac: Vec<C64> = (0..=max_index)
        .map(|j| {
            let mut acc = C64::new(0.0, 0.0);
            let mut comp = C64::new(0.0, 0.0);
            for (k, &w) in weights.iter().enumerate() {
                // e^{-i j theta_k} = conj(root[(j k) mod q])
                let term = w * roots[(j * k) % q].conj() - comp;
                let t = acc + term;
                comp = (t - acc) - term;
                acc = t;
            }
            acc / q as f64
        })
        .collect();

    let c0 = ac[0].re;
    let defect = (ac[0] - C64::new(1.0, 0.0)).norm();
    if defect > QUADRATURE_DEFECT_LIMIT {
        return Err(OpucError::QuadratureDefect {
            defect,
            limit: QUADRATURE_DEFECT_LIMIT,
        });
    }

    let scale = 1.0 - spec.total_mass_weight();
    let c = ac
        .iter()
        .enumerate()
        .map(|(j, &a)| {
            let point: C64 = spec
                .masses
                .iter()
                .map(|m| m.weight * C64::from_polar(1.0, -(j as f64) * m.location.angle()))
                .sum();
            if j == 0 {
                C64::new(1.0, 0.0)
            } else {
                scale * a / c0 + point
            }
        })
        .collect();
    Ok(MomentVector { c, defect })
}

/// Largest grid tried by [`moments_auto`].
pub const MAX_AUTO_QUAD_POINTS: usize = 1 << 22;

/// [`moments`] on a grid doubled from [`default_quad_points`] until the defect
/// drops below `1e-14` (or the grid reaches [`MAX_AUTO_QUAD_POINTS`], in which
/// case the usual `1e-8` acceptance applies).
pub fn moments_auto(spec: &MeasureSpec, max_index: usize) -> Result<MomentVector> {
    let mut points = default_quad_points(max_index, spec.base.support_len());
    loop {
        match moments(spec, max_index, points) {
            Ok(mv) if mv.defect < 1e-14 || points >= MAX_AUTO_QUAD_POINTS => return Ok(mv),
            Err(e @ OpucError::QuadratureDefect { .. }) if points >= MAX_AUTO_QUAD_POINTS => {
                return Err(e)
            }
            Ok(_) | Err(OpucError::QuadratureDefect { .. }) => points *= 2,
            Err(e) => return Err(e),
        }
    }
}

/// Monic `Phi_n` and `||Phi_n||^2` from `(a_0..a_n) = L_n^{-1} delta_n / <delta_n, L_n^{-1} delta_n>`.
pub fn toeplitz_monic(mv: &MomentVector, n: usize) -> Result<(Polynomial, f64)> {
    if mv.max_index() < n {
        return Err(OpucError::NotEnoughMoments {
            available: mv.max_index(),
            required: n,
        });
    }
    let c0 = mv.c[0];
    if !(c0.re > 0.0) || c0.im != 0.0 {
        return Err(OpucError::NotPositiveDefinite { order: 0 });
    }
    let normalized = MomentVector {
        c: mv.c.iter().map(|&c| c / c0.re).collect(),
        defect: mv.defect,
    };
    let chol = normalized
        .toeplitz(n)
        .cholesky()
        .ok_or(OpucError::NotPositiveDefinite { order: n })?;
    // the complex square root never fails, so indefinite input shows up as
    // pivots off the positive real axis
    let l = chol.l_dirty();
    for j in 0..=n {
        let pivot = l[(j, j)] * l[(j, j)];
        if !(pivot.re > 0.0) || pivot.im.abs() > 1e-10 * pivot.re {
            return Err(OpucError::NotPositiveDefinite { order: j });
        }
    }
    let mut rhs = nalgebra::DVector::<C64>::zeros(n + 1);
    rhs[n] = C64::new(1.0, 0.0);
    let x = chol.solve(&rhs);
    let last = x[n];
    if !(last.re > 0.0) || !last.re.is_finite() {
        return Err(OpucError::NotPositiveDefinite { order: n });
    }
    let coeffs: Vec<C64> = x.iter().map(|&v| v / last).collect();
    Ok((Polynomial::new(coeffs), 1.0 / last.re))
}

/// Verblunsky coefficients `a_0..a_{N-1}` from moments via `a_n = -conj(Phi_{n+1}(0))`.
pub fn moments_to_verblunsky(mv: &MomentVector, n: usize) -> Result<VerblunskySequence> {
    let mut out = Vec::with_capacity(n);
    for order in 1..=n {
        let (poly, norm_sqr) = toeplitz_monic(mv, order)?;
        if !(norm_sqr > 0.0) {
            return Err(OpucError::NotPositiveDefinite { order });
        }
        let alpha = -poly.constant_term().conj();
        out.push(alpha);
    }
    VerblunskySequence::new(out).map_err(|_| OpucError::NotPositiveDefinite { order: n })
}

/// `gamma / (1 + gamma n)`: coefficients of `(1 - gamma) dtheta/2pi + gamma delta_0`.
pub fn lebesgue_plus_one_mass_exact(gamma: f64, n: usize) -> f64 {
    gamma / (1.0 + gamma * n as f64)
}

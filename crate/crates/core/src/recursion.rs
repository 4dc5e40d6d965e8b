//! Szegő recursion for monic and normalized orthogonal polynomials.
//!
//! Values are propagated in the monic normalization,
//!
//! ```text
//! Phi_{n+1}(z)  = z Phi_n(z) - conj(a_n) Phi_n^*(z)
//! Phi_{n+1}^*(z) = Phi_n^*(z) - a_n z Phi_n(z)
//! ```
//!
//! with `||Phi_n|| = prod_{j<n} (1 - |a_j|^2)^{1/2}` carried alongside.
//! Normalized values `phi_n = Phi_n / ||Phi_n||` are derived on demand.

use crate::error::{OpucError, Result};
use crate::sequence::{DiskCoeff, VerblunskySequence, C64};
use crate::summation::CompensatedSum;

/// Running values of the recursion at a single point `z`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RecursionState {
    pub n: usize,
    /// `Phi_n(z)`
    pub phi_monic: C64,
    /// `Phi_n^*(z)`
    pub phi_star_monic: C64,
    /// `||Phi_n||`
    pub norm: f64,
    kernel: Option<CompensatedSum>,
}

impl RecursionState {
    /// State at `n = 0`: `Phi_0 = Phi_0^* = 1`, `||Phi_0|| = 1`.
    ///
    /// With `track_kernel`, the state also carries `K_n(z) = sum_{j<=n} |phi_j(z)|^2`
    /// which starts at `K_0 = 1`.
    pub fn initial(track_kernel: bool) -> Self {
        Self {
            n: 0,
            phi_monic: C64::new(1.0, 0.0),
            phi_star_monic: C64::new(1.0, 0.0),
            norm: 1.0,
            kernel: track_kernel.then(|| CompensatedSum::with_value(1.0)),
        }
    }

    /// One step of the recursion with coefficient `alpha` at point `z`.
    #[must_use]
    pub fn step(&self, alpha: DiskCoeff, z: C64) -> Self {
        let a = alpha.value();
        let phi_monic = z * self.phi_monic - a.conj() * self.phi_star_monic;
        let phi_star_monic = self.phi_star_monic - a * z * self.phi_monic;
        let norm = self.norm * alpha.rho();
        let kernel = self.kernel.map(|mut k| {
            k.add(phi_monic.norm_sqr() / (norm * norm));
            k
        });
        Self {
            n: self.n + 1,
            phi_monic,
            phi_star_monic,
            norm,
            kernel,
        }
    }

    /// `phi_n(z)`
    #[inline]
    pub fn phi(&self) -> C64 {
        self.phi_monic / self.norm
    }

    /// `phi_n^*(z)`
    #[inline]
    pub fn phi_star(&self) -> C64 {
        self.phi_star_monic / self.norm
    }

    /// `K_n(z)`, when tracked.
    pub fn kernel_accum(&self) -> Option<f64> {
        self.kernel.map(|k| k.value())
    }
}

/// Advances `state` by one index using `alpha` at `z`.
pub fn szego_step(state: &RecursionState, alpha: DiskCoeff, z: C64) -> RecursionState {
    state.step(alpha, z)
}

/// Iterator over recursion states `n = 0, 1, 2, ...` at a fixed point.
///
/// Coefficients past the end of the sequence are read as zero, so the iterator
/// never ends on its own; bound it with `take`.
#[derive(Debug, Clone)]
pub struct Trajectory<'a> {
    seq: &'a VerblunskySequence,
    z: C64,
    state: Option<RecursionState>,
}

impl<'a> Trajectory<'a> {
    pub fn new(seq: &'a VerblunskySequence, z: C64, track_kernel: bool) -> Self {
        Self {
            seq,
            z,
            state: Some(RecursionState::initial(track_kernel)),
        }
    }
}

impl Iterator for Trajectory<'_> {
    type Item = RecursionState;

    fn next(&mut self) -> Option<RecursionState> {
        let current = self.state?;
        self.state = Some(current.step(self.seq.coeff(current.n), self.z));
        Some(current)
    }
}

/// Monic and normalized values at index `n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evaluation {
    pub phi_monic: C64,
    pub phi_star_monic: C64,
    pub phi: C64,
    pub phi_star: C64,
    pub norm: f64,
}

impl From<RecursionState> for Evaluation {
    fn from(s: RecursionState) -> Self {
        Self {
            phi_monic: s.phi_monic,
            phi_star_monic: s.phi_star_monic,
            phi: s.phi(),
            phi_star: s.phi_star(),
            norm: s.norm,
        }
    }
}

fn check_index(seq: &VerblunskySequence, n: usize) -> Result<()> {
    if n > seq.len() {
        Err(OpucError::IndexOutOfRange {
            index: n,
            len: seq.len(),
        })
    } else {
        Ok(())
    }
}

/// `Phi_n(z)`, `Phi_n^*(z)`, `phi_n(z)`, `phi_n^*(z)` and `||Phi_n||` for `n <= seq.len()`.
pub fn evaluate(seq: &VerblunskySequence, z: C64, n: usize) -> Result<Evaluation> {
    check_index(seq, n)?;
    let state = Trajectory::new(seq, z, false)
        .nth(n)
        .expect("trajectory is unbounded");
    Ok(state.into())
}

/// Polynomial stored by ascending powers: `coeffs[k]` multiplies `z^k`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Polynomial {
    pub coeffs: Vec<C64>,
}

impl Polynomial {
    pub fn new(coeffs: Vec<C64>) -> Self {
        Self { coeffs }
    }

    pub fn one() -> Self {
        Self::new(vec![C64::new(1.0, 0.0)])
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    /// Horner evaluation.
    pub fn eval(&self, z: C64) -> C64 {
        self.coeffs
            .iter()
            .rev()
            .fold(C64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    pub fn constant_term(&self) -> C64 {
        self.coeffs.first().copied().unwrap_or_default()
    }

    pub fn leading(&self) -> C64 {
        self.coeffs.last().copied().unwrap_or_default()
    }

    /// `z^d conj(P(1/conj z))` for `d = degree`: reversed, conjugated coefficients.
    pub fn reversed(&self) -> Self {
        Self::new(self.coeffs.iter().rev().map(|c| c.conj()).collect())
    }

    pub fn scaled(&self, s: C64) -> Self {
        Self::new(self.coeffs.iter().map(|&c| c * s).collect())
    }

    /// `self += s * other`, growing `self` if needed.
    pub fn add_scaled(&mut self, other: &Polynomial, s: C64) {
        if self.coeffs.len() < other.coeffs.len() {
            self.coeffs.resize(other.coeffs.len(), C64::new(0.0, 0.0));
        }
        for (c, &o) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *c += s * o;
        }
    }
}

/// Coefficient vectors of `Phi_n` (monic, degree `n`) and `Phi_n^*`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientPair {
    pub monic: Polynomial,
    pub reversed: Polynomial,
}

/// One recursion step on coefficient vectors of common length `n + 1`.
pub(crate) fn step_coefficients(pair: &CoefficientPair, alpha: C64) -> CoefficientPair {
    let n = pair.monic.coeffs.len();
    let zero = C64::new(0.0, 0.0);
    let mut monic = vec![zero; n + 1];
    let mut reversed = vec![zero; n + 1];
    for k in 0..=n {
        // z * Phi_n shifts coefficients up by one
        let shifted = if k > 0 {
            pair.monic.coeffs[k - 1]
        } else {
            zero
        };
        let star = if k < n { pair.reversed.coeffs[k] } else { zero };
        monic[k] = shifted - alpha.conj() * star;
        reversed[k] = star - alpha * shifted;
    }
    CoefficientPair {
        monic: Polynomial::new(monic),
        reversed: Polynomial::new(reversed),
    }
}

/// Iterator over coefficient pairs for `n = 0, 1, 2, ...` (trailing-zero semantics).
pub(crate) struct CoefficientTrajectory<'a> {
    seq: &'a VerblunskySequence,
    n: usize,
    pair: Option<CoefficientPair>,
}

impl<'a> CoefficientTrajectory<'a> {
    pub(crate) fn new(seq: &'a VerblunskySequence) -> Self {
        Self {
            seq,
            n: 0,
            pair: Some(CoefficientPair {
                monic: Polynomial::one(),
                reversed: Polynomial::one(),
            }),
        }
    }
}

impl Iterator for CoefficientTrajectory<'_> {
    type Item = CoefficientPair;

    fn next(&mut self) -> Option<CoefficientPair> {
        let current = self.pair.take()?;
        self.pair = Some(step_coefficients(&current, self.seq.get(self.n)));
        self.n += 1;
        Some(current)
    }
}

/// Coefficient vectors of `Phi_n` and `Phi_n^*` for `n <= seq.len()`.
pub fn coefficient_vectors(seq: &VerblunskySequence, n: usize) -> Result<CoefficientPair> {
    check_index(seq, n)?;
    Ok(CoefficientTrajectory::new(seq)
        .nth(n)
        .expect("trajectory is unbounded"))
}

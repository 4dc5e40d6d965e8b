//! Christoffel–Darboux kernel `K_n(x, y) = sum_{j<=n} conj(phi_j(x)) phi_j(y)`.

use crate::error::{OpucError, Result};
use crate::recursion::Trajectory;
use crate::sequence::{VerblunskySequence, C64};
use crate::summation::CompensatedSum;

/// Below this value of `|1 - conj(x) y|` the closed form is not evaluated.
pub const CD_DIAGONAL_GUARD: f64 = 1e-3;

/// Both evaluation routes of the kernel.
///
/// `closed_form` is `None` when `(x, y)` is within the diagonal guard, in which
/// case only the direct sum is available.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CdKernel {
    pub direct: C64,
    pub closed_form: Option<C64>,
}

impl CdKernel {
    pub fn is_diagonal(&self) -> bool {
        self.closed_form.is_none()
    }

    /// `|direct - closed_form|`, when both exist.
    pub fn residual(&self) -> Option<f64> {
        self.closed_form.map(|c| (c - self.direct).norm())
    }
}

/// Direct sum and closed form
/// `[conj(phi_n^*(x)) phi_n^*(y) - conj(x) y conj(phi_n(x)) phi_n(y)] / (1 - conj(x) y)`.
pub fn cd_kernel(seq: &VerblunskySequence, x: C64, y: C64, n: usize) -> Result<CdKernel> {
    if n > seq.len() {
        return Err(OpucError::IndexOutOfRange {
            index: n,
            len: seq.len(),
        });
    }
    let mut re = CompensatedSum::new();
    let mut im = CompensatedSum::new();
    let mut last = None;
    for (sx, sy) in Trajectory::new(seq, x, false)
        .zip(Trajectory::new(seq, y, false))
        .take(n + 1)
    {
        let term = sx.phi().conj() * sy.phi();
        re.add(term.re);
        im.add(term.im);
        last = Some((sx, sy));
    }
    let (sx, sy) = last.expect("at least one term");
    let direct = C64::new(re.value(), im.value());

    let xy = x.conj() * y;
    let denom = C64::new(1.0, 0.0) - xy;
    let closed_form = (denom.norm() >= CD_DIAGONAL_GUARD)
        .then(|| (sx.phi_star().conj() * sy.phi_star() - xy * sx.phi().conj() * sy.phi()) / denom);
    Ok(CdKernel {
        direct,
        closed_form,
    })
}

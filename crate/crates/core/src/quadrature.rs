//! Uniform-grid periodic trapezoidal rule on `[0, 2pi)`.

use std::f64::consts::TAU;

use crate::sequence::C64;
use crate::summation::CompensatedSum;

/// Nodes `offset + 2 pi k / points`, `k = 0..points`, all with weight `1 / points`.
///
/// For smooth periodic integrands the rule converges geometrically, and it
/// integrates trigonometric polynomials of degree below `points` exactly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeriodicGrid {
    points: usize,
    offset: f64,
}

impl PeriodicGrid {
    pub fn new(points: usize) -> Self {
        Self::with_offset(points, 0.0)
    }

    pub fn with_offset(points: usize, offset: f64) -> Self {
        assert!(points > 0, "grid needs at least one node");
        Self { points, offset }
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn step(&self) -> f64 {
        TAU / self.points as f64
    }

    pub fn node(&self, k: usize) -> f64 {
        self.offset + self.step() * k as f64
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.points).map(move |k| self.node(k))
    }

    /// `(1/2pi) int f dtheta`
    pub fn mean<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        let acc: CompensatedSum = self.nodes().map(&mut f).collect();
        acc.value() / self.points as f64
    }

    /// Complex-valued version of [`PeriodicGrid::mean`].
    pub fn mean_complex<F: FnMut(f64) -> C64>(&self, mut f: F) -> C64 {
        let mut re = CompensatedSum::new();
        let mut im = CompensatedSum::new();
        for t in self.nodes() {
            let v = f(t);
            re.add(v.re);
            im.add(v.im);
        }
        C64::new(re.value(), im.value()) / self.points as f64
    }

    /// `e^{i m 2pi / points}` for `m = 0..points`, each computed from its own angle.
    pub fn roots_of_unity(&self) -> Vec<C64> {
        (0..self.points)
            .map(|m| C64::from_polar(1.0, self.step() * m as f64))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integrates_trig_polynomials_exactly() {
        let g = PeriodicGrid::new(16);
        assert!((g.mean(|t| 3.0 + (5.0 * t).cos() + (15.0 * t).sin()) - 3.0).abs() < 1e-14);
        // aliasing starts at degree = points
        assert!((g.mean(|t| (16.0 * t).cos()) - 1.0).abs() < 1e-13);
    }

    #[test]
    fn spectral_accuracy_for_analytic_integrand() {
        // (1/2pi) int 1/(1 - r cos t) dt = 1/sqrt(1 - r^2)
        let r: f64 = 0.5;
        let exact = 1.0 / (1.0 - r * r).sqrt();
        let coarse = PeriodicGrid::new(8).mean(|t| 1.0 / (1.0 - r * t.cos()));
        let fine = PeriodicGrid::new(64).mean(|t| 1.0 / (1.0 - r * t.cos()));
        assert!((coarse - exact).abs() < 1e-3);
        assert!((fine - exact).abs() < 1e-15);
    }

    #[test]
    fn offset_grid() {
        let g = PeriodicGrid::with_offset(4, 0.25);
        let nodes: Vec<f64> = g.nodes().collect();
        assert!((nodes[1] - (0.25 + TAU / 4.0)).abs() < 1e-15);
        assert!((g.mean_complex(|t| C64::from_polar(1.0, t))).norm() < 1e-15);
    }
}

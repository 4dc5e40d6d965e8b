//! Verblunsky coefficients, unit-circle points and the disk invariant.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{OpucError, Result};

/// Complex scalar used throughout the crate.
pub type C64 = Complex64;

/// Margin kept from the unit circle: coefficients with `|a| >= 1 - DISK_MARGIN`
/// are rejected so that `(1 - |a|^2)^{1/2}` stays well conditioned.
pub const DISK_MARGIN: f64 = 1e-12;

/// A complex number strictly inside the unit disk.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(try_from = "C64", into = "C64")]
pub struct DiskCoeff(C64);

impl DiskCoeff {
    pub const ZERO: DiskCoeff = DiskCoeff(C64::new(0.0, 0.0));

    pub fn new(value: C64) -> Result<Self> {
        if !value.re.is_finite() || !value.im.is_finite() {
            return Err(OpucError::NonFinite("Verblunsky coefficient"));
        }
        let modulus = value.norm();
        if modulus >= 1.0 - DISK_MARGIN {
            return Err(OpucError::OutsideDisk {
                value: value.to_string(),
                modulus,
                margin: DISK_MARGIN,
            });
        }
        Ok(Self(value))
    }

    #[inline]
    pub fn value(self) -> C64 {
        self.0
    }

    /// `(1 - |a|^2)^{1/2}`.
    #[inline]
    pub fn rho(self) -> f64 {
        (1.0 - self.0.norm_sqr()).sqrt()
    }
}

impl TryFrom<C64> for DiskCoeff {
    type Error = OpucError;
    fn try_from(value: C64) -> Result<Self> {
        Self::new(value)
    }
}

impl From<DiskCoeff> for C64 {
    fn from(value: DiskCoeff) -> Self {
        value.0
    }
}

/// A finite prefix `(a_0, ..., a_{N-1})` of Verblunsky coefficients.
///
/// Indices past the stored length read as zero, so a stored prefix also names
/// the Bernstein–Szegő measure whose coefficients vanish from `N` on.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct VerblunskySequence {
    coeffs: Vec<DiskCoeff>,
}

impl VerblunskySequence {
    pub fn new<I>(values: I) -> Result<Self>
    where
        I: IntoIterator<Item = C64>,
    {
        let coeffs = values
            .into_iter()
            .map(DiskCoeff::new)
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { coeffs })
    }

    pub fn from_coeffs(coeffs: Vec<DiskCoeff>) -> Self {
        Self { coeffs }
    }

    /// Sequence of `len` zeros: normalized Lebesgue measure.
    pub fn lebesgue(len: usize) -> Self {
        Self {
            coeffs: vec![DiskCoeff::ZERO; len],
        }
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `a_n`, or zero when `n` is past the stored prefix.
    #[inline]
    pub fn coeff(&self, n: usize) -> DiskCoeff {
        self.coeffs.get(n).copied().unwrap_or(DiskCoeff::ZERO)
    }

    #[inline]
    pub fn get(&self, n: usize) -> C64 {
        self.coeff(n).value()
    }

    pub fn coeffs(&self) -> &[DiskCoeff] {
        &self.coeffs
    }

    pub fn values(&self) -> Vec<C64> {
        self.coeffs.iter().map(|a| a.value()).collect()
    }

    /// Copy padded with zeros (or truncated) to exactly `len` entries.
    pub fn resized(&self, len: usize) -> Self {
        Self {
            coeffs: (0..len).map(|n| self.coeff(n)).collect(),
        }
    }

    /// Index of the last nonzero coefficient plus one.
    pub fn support_len(&self) -> usize {
        self.coeffs
            .iter()
            .rposition(|a| a.value() != C64::new(0.0, 0.0))
            .map_or(0, |p| p + 1)
    }

    /// Coefficients of the complex-conjugated measure `dmu(-theta)`.
    pub fn conj(&self) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|a| DiskCoeff(a.0.conj())).collect(),
        }
    }

    /// `prod_{j<n} (1 - |a_j|^2)`.
    pub fn norm_sqr_product(&self, n: usize) -> f64 {
        (0..n).map(|j| 1.0 - self.get(j).norm_sqr()).product()
    }
}

impl std::ops::Index<usize> for VerblunskySequence {
    type Output = DiskCoeff;
    fn index(&self, index: usize) -> &DiskCoeff {
        &self.coeffs[index]
    }
}

/// A point `e^{i angle}` on the unit circle with canonical angle in `[0, 2pi)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UnitCirclePoint {
    angle: f64,
    value: C64,
}

impl UnitCirclePoint {
    pub fn from_angle(angle: f64) -> Result<Self> {
        if !angle.is_finite() {
            return Err(OpucError::NonFinite("angle"));
        }
        let angle = canonical_angle(angle);
        Ok(Self {
            angle,
            value: C64::from_polar(1.0, angle),
        })
    }

    /// Projects a nonzero complex number onto the circle.
    pub fn from_complex(z: C64) -> Result<Self> {
        if z.norm() == 0.0 || !z.norm().is_finite() {
            return Err(OpucError::InvalidArgument(format!(
                "{z} has no direction on the circle"
            )));
        }
        Self::from_angle(z.arg())
    }

    pub fn angle(&self) -> f64 {
        self.angle
    }

    pub fn value(&self) -> C64 {
        self.value
    }

    /// Shortest arc length to another point, in `[0, pi]`.
    pub fn distance(&self, other: &UnitCirclePoint) -> f64 {
        angular_distance(self.angle, other.angle)
    }

    /// The reflected point `e^{-i angle}`.
    pub fn conj(&self) -> Self {
        Self::from_angle(-self.angle).expect("finite angle")
    }
}

/// Maps any finite angle into `[0, 2pi)`.
pub fn canonical_angle(angle: f64) -> f64 {
    let a = angle.rem_euclid(TAU);
    // rem_euclid can round up to exactly TAU for tiny negative inputs
    if a >= TAU {
        0.0
    } else {
        a
    }
}

/// Shortest arc length between two angles.
pub fn angular_distance(a: f64, b: f64) -> f64 {
    let d = canonical_angle(a - b);
    d.min(TAU - d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn disk_rejects_boundary_and_outside() {
        assert!(DiskCoeff::new(C64::new(1.0, 0.0)).is_err());
        assert!(DiskCoeff::new(C64::new(0.0, 1.0 - 1e-13)).is_err());
        assert!(DiskCoeff::new(C64::new(0.6, 0.8)).is_err());
        assert!(DiskCoeff::new(C64::new(0.6, 0.79)).is_ok());
        assert!(DiskCoeff::new(C64::new(f64::NAN, 0.0)).is_err());
    }

    #[test]
    fn trailing_zero_semantics() {
        let s = VerblunskySequence::new([C64::new(0.5, 0.0), C64::new(0.0, 0.0)]).unwrap();
        assert_eq!(s.get(1), C64::new(0.0, 0.0));
        assert_eq!(s.get(100), C64::new(0.0, 0.0));
        assert_eq!(s.support_len(), 1);
        assert_eq!(s.resized(4).len(), 4);
        assert_eq!(s.norm_sqr_product(5), 0.75);
    }

    #[test]
    fn angles_are_canonical() {
        let p = UnitCirclePoint::from_angle(-PI / 2.0).unwrap();
        assert!((p.angle() - 1.5 * PI).abs() < 1e-15);
        assert!((p.value() - C64::new(0.0, -1.0)).norm() < 1e-15);
        let q = UnitCirclePoint::from_angle(TAU).unwrap();
        assert_eq!(q.angle(), 0.0);
        assert_eq!(canonical_angle(-1e-300), 0.0);
        assert!((angular_distance(0.1, TAU - 0.1) - 0.2).abs() < 1e-14);
    }

    #[test]
    fn disk_coeff_serde_enforces_invariant() {
        let ok: DiskCoeff = serde_json::from_str("[0.5, 0.0]").unwrap();
        assert_eq!(ok.value(), C64::new(0.5, 0.0));
        assert!(serde_json::from_str::<DiskCoeff>("[1.5, 0.0]").is_err());
    }
}

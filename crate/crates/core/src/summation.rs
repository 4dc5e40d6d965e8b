//! Compensated summation for long running sums.

/// Neumaier's variant of Kahan summation.
///
/// The kernel `K_n` grows linearly in `n` while each new term is O(1), which
/// is exactly the regime where naive accumulation loses low-order digits.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CompensatedSum {
    sum: f64,
    compensation: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_value(value: f64) -> Self {
        Self {
            sum: value,
            compensation: 0.0,
        }
    }

    #[inline]
    pub fn add(&mut self, value: f64) {
        let t = self.sum + value;
        if self.sum.abs() >= value.abs() {
            self.compensation += (self.sum - t) + value;
        } else {
            self.compensation += (value - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = Self::new();
        for v in iter {
            acc.add(v);
        }
        acc
    }
}

impl Extend<f64> for CompensatedSum {
    fn extend<I: IntoIterator<Item = f64>>(&mut self, iter: I) {
        for v in iter {
            self.add(v);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_small_terms_lost_by_naive_sum() {
        let terms = std::iter::once(1.0).chain(std::iter::repeat_n(1e-16, 10_000));
        let naive: f64 = terms.clone().sum();
        let compensated = terms.collect::<CompensatedSum>().value();
        assert_eq!(naive, 1.0);
        assert!((compensated - (1.0 + 1e-12)).abs() < 1e-20);
    }

    #[test]
    fn cancellation() {
        let acc: CompensatedSum = [1e100, 1.0, -1e100].into_iter().collect();
        assert_eq!(acc.value(), 1.0);
    }

    #[test]
    fn integer_terms_are_exact() {
        let acc: CompensatedSum = (0..1000).map(|_| 1.0).collect();
        assert_eq!(acc.value(), 1000.0);
    }
}

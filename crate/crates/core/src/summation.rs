//! Compensated (Neumaier) summation.

use std::iter::FromIterator;
use std::ops::AddAssign;

/// Running sum with a Neumaier correction term.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    compensation: f64,
    abs_sum: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
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
        self.abs_sum += value.abs();
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }

    /// Sum of the absolute values of every term added so far; scales the rounding error.
    pub fn abs_total(&self) -> f64 {
        self.abs_sum
    }

    /// A bound on the accumulated rounding error of `value()`.
    pub fn rounding_bound(&self) -> f64 {
        4.0 * f64::EPSILON * self.abs_sum
    }
}

impl AddAssign<f64> for CompensatedSum {
    fn add_assign(&mut self, rhs: f64) {
        self.add(rhs);
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

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_cancelled_small_terms() {
        let terms = [1.0, 1e100, 1.0, -1e100];
        let acc: CompensatedSum = terms.iter().copied().collect();
        assert_eq!(acc.value(), 2.0);
        let naive: f64 = terms.iter().sum();
        assert_eq!(naive, 0.0);
    }

    #[test]
    fn harmonic_tail_matches_reference() {
        // sum_{k=1}^{1e6} 1/k^2 = pi^2/6 - psi'(1e6 + 1)
        let acc: CompensatedSum = (1..=1_000_000u64).rev().map(|k| 1.0 / (k as f64).powi(2)).collect();
        let reference = std::f64::consts::PI.powi(2) / 6.0 - (1.0 / 1_000_000.5);
        assert!((acc.value() - reference).abs() < 1e-13);
    }
}

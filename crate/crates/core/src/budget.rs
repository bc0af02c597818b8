//! Resource budgets for exact orbit computations.
//!
//! Coordinate sizes along a Hénon orbit double at every step, so every
//! engine that expands exact coordinates takes a [`Budget`] and stops with
//! an overflow guard rather than letting a computation run away.

/// Limits on coordinate size, rational-function degree and window area.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Budget {
    /// Maximum number of decimal digits per numerator/denominator.
    pub max_digits: u64,
    /// Maximum degree of rational-function numerators/denominators.
    pub max_degree: u64,
    /// Maximum number of (n, m) cells scanned by a window search.
    pub max_window: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_digits: 200_000,
            max_degree: 10_000,
            max_window: 4_000_000,
        }
    }
}

impl Budget {
    /// Digit limit converted to a bit-length bound (digits * log2(10), rounded up).
    pub fn max_bits(&self) -> u64 {
        (self.max_digits as f64 * std::f64::consts::LOG2_10).ceil() as u64
    }
}

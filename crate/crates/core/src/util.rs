//! Small numeric helpers: logs of big integers, significant-digit formatting,
//! and a tiny deterministic RNG for screening points.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

/// Natural log of |n| for a nonzero big integer, accurate even when `n`
/// does not fit in an `f64`. Uses the top 64 bits plus the bit length.
pub fn ln_big(n: &BigInt) -> f64 {
    let n = n.abs();
    if n.is_zero() {
        return f64::NEG_INFINITY;
    }
    let bits = n.bits();
    if bits <= 63 {
        return (n.to_f64().unwrap()).ln();
    }
    let shift = bits - 63;
    let top = (&n >> shift).to_f64().unwrap();
    top.ln() + (shift as f64) * std::f64::consts::LN_2
}

/// Natural log of |x| for a nonzero rational.
pub fn ln_ratio(x: &BigRational) -> f64 {
    ln_big(x.numer()) - ln_big(x.denom())
}

/// Render a float with the given number of significant decimal digits,
/// trimming trailing zeros. Used for report payloads.
pub fn fmt_sig(x: f64, sig: usize) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    if x == 0.0 {
        return "0".to_string();
    }
    let mag = x.abs().log10().floor() as i32;
    let decimals = (sig as i32 - 1 - mag).max(0) as usize;
    let s = format!("{:.*}", decimals, x);
    if s.contains('.') {
        let s = s.trim_end_matches('0').trim_end_matches('.');
        s.to_string()
    } else {
        s
    }
}

/// SplitMix64: a tiny deterministic generator for screening points and
/// randomized in-crate tests. Not cryptographic.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E3779B97F4A7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
        z ^ (z >> 31)
    }

    /// Uniform value in `0..n` (n > 0).
    pub fn below(&mut self, n: u64) -> u64 {
        self.next_u64() % n
    }

    /// Uniform value in `lo..=hi`.
    pub fn range_i64(&mut self, lo: i64, hi: i64) -> i64 {
        debug_assert!(lo <= hi);
        lo + (self.below((hi - lo + 1) as u64) as i64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use num_traits::One;

    #[test]
    fn ln_big_matches_f64_for_small_values() {
        let n = BigInt::from(1_000_003u64);
        assert!((ln_big(&n) - (1_000_003f64).ln()).abs() < 1e-12);
    }

    #[test]
    fn ln_big_handles_huge_values() {
        let n = BigInt::one() << 4096u32;
        let expected = 4096.0 * std::f64::consts::LN_2;
        assert!((ln_big(&n) - expected).abs() / expected < 1e-12);
    }

    #[test]
    fn fmt_sig_rounds_and_trims() {
        assert_eq!(fmt_sig(2.618033988749895, 7), "2.618034");
        assert_eq!(fmt_sig(0.5, 12), "0.5");
        assert_eq!(fmt_sig(-15.0, 12), "-15");
    }
}

//! Exact elements a + b*sqrt(D) of a real quadratic field, with D a
//! squarefree positive integer. D = 1 encodes a plain rational (b folded
//! into a). All comparisons are exact sign tests, no floating point.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::util::ln_ratio;

/// Extract the square part: n = s^2 * d with d squarefree, returns (s, d).
fn squarefree_part(n: &BigInt) -> (BigInt, BigInt) {
    assert!(n.is_positive(), "radicand must be positive");
    let mut d = n.clone();
    let mut s = BigInt::one();
    let mut p = BigInt::from(2);
    while &p * &p <= d {
        let p2 = &p * &p;
        while (&d % &p2).is_zero() {
            d /= &p2;
            s *= &p;
        }
        p += 1;
    }
    (s, d)
}

/// a + b*sqrt(D) with exact rational parts. Invariants: D squarefree and
/// positive; D == 1 iff b == 0.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QuadraticNumber {
    rat: BigRational,
    surd: BigRational,
    d: BigInt,
}

impl QuadraticNumber {
    pub fn new(rat: BigRational, surd: BigRational, d: BigInt) -> Self {
        if surd.is_zero() {
            return QuadraticNumber {
                rat,
                surd,
                d: BigInt::one(),
            };
        }
        let (s, d0) = squarefree_part(&d);
        if d0.is_one() {
            return QuadraticNumber {
                rat: rat + surd * BigRational::from_integer(s),
                surd: BigRational::zero(),
                d: BigInt::one(),
            };
        }
        QuadraticNumber {
            rat,
            surd: surd * BigRational::from_integer(s),
            d: d0,
        }
    }

    pub fn from_rational(rat: BigRational) -> Self {
        QuadraticNumber {
            rat,
            surd: BigRational::zero(),
            d: BigInt::one(),
        }
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_rational(BigRational::from_integer(BigInt::from(n)))
    }

    /// sqrt(n) for a positive integer n.
    pub fn sqrt_of(n: &BigInt) -> Self {
        QuadraticNumber::new(BigRational::zero(), BigRational::one(), n.clone())
    }

    pub fn zero() -> Self {
        Self::from_int(0)
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    pub fn rational_part(&self) -> &BigRational {
        &self.rat
    }

    pub fn surd_part(&self) -> &BigRational {
        &self.surd
    }

    pub fn radicand(&self) -> &BigInt {
        &self.d
    }

    pub fn is_zero(&self) -> bool {
        self.rat.is_zero() && self.surd.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.surd.is_zero()
    }

    /// Unify radicands; panics on genuinely incompatible fields (the crate
    /// keeps all eigen-data of one matrix inside a single Q(sqrt(D))).
    fn unify(&self, other: &Self) -> BigInt {
        if self.surd.is_zero() {
            return other.d.clone();
        }
        if other.surd.is_zero() {
            return self.d.clone();
        }
        assert_eq!(
            self.d, other.d,
            "incompatible radicands {} and {}",
            self.d, other.d
        );
        self.d.clone()
    }

    pub fn conjugate(&self) -> Self {
        QuadraticNumber::new(self.rat.clone(), -self.surd.clone(), self.d.clone())
    }

    /// Field norm a^2 - b^2 D (a rational).
    pub fn norm(&self) -> BigRational {
        &self.rat * &self.rat - &self.surd * &self.surd * BigRational::from_integer(self.d.clone())
    }

    pub fn inverse(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let n = self.norm();
        Some(QuadraticNumber::new(
            &self.rat / &n,
            -(&self.surd / &n),
            self.d.clone(),
        ))
    }

    /// Exact sign: -1, 0 or +1.
    pub fn sign(&self) -> i8 {
        let (a, b) = (&self.rat, &self.surd);
        if b.is_zero() {
            return sign_of(a);
        }
        if a.is_zero() {
            return sign_of(b);
        }
        match (a.is_positive(), b.is_positive()) {
            (true, true) => 1,
            (false, false) => -1,
            (true, false) => {
                // a > 0 > b: positive iff a^2 > b^2 D
                if a * a > b * b * BigRational::from_integer(self.d.clone()) {
                    1
                } else if a * a < b * b * BigRational::from_integer(self.d.clone()) {
                    -1
                } else {
                    0
                }
            }
            (false, true) => {
                // b > 0 > a: positive iff b^2 D > a^2
                if b * b * BigRational::from_integer(self.d.clone()) > a * a {
                    1
                } else if b * b * BigRational::from_integer(self.d.clone()) < a * a {
                    -1
                } else {
                    0
                }
            }
        }
    }

    pub fn is_positive(&self) -> bool {
        self.sign() > 0
    }

    pub fn abs(&self) -> Self {
        if self.sign() < 0 {
            -self.clone()
        } else {
            self.clone()
        }
    }

    /// Exact comparison inside one quadratic field.
    pub fn cmp_exact(&self, other: &Self) -> std::cmp::Ordering {
        match (self.clone() - other.clone()).sign() {
            -1 => std::cmp::Ordering::Less,
            0 => std::cmp::Ordering::Equal,
            _ => std::cmp::Ordering::Greater,
        }
    }

    pub fn min_exact(self, other: Self) -> Self {
        if self.cmp_exact(&other) == std::cmp::Ordering::Greater {
            other
        } else {
            self
        }
    }

    pub fn pow_i64(&self, e: i64) -> Option<Self> {
        if e == 0 {
            return Some(Self::one());
        }
        let base = if e < 0 {
            self.inverse()?
        } else {
            self.clone()
        };
        let mut out = Self::one();
        let mut acc = base;
        let mut k = e.unsigned_abs();
        while k > 0 {
            if k & 1 == 1 {
                out = out * acc.clone();
            }
            acc = acc.clone() * acc.clone();
            k >>= 1;
        }
        Some(out)
    }

    pub fn to_f64(&self) -> f64 {
        let a = ratio_to_f64(&self.rat);
        if self.surd.is_zero() {
            return a;
        }
        a + ratio_to_f64(&self.surd) * self.d.to_f64().unwrap_or(f64::NAN).sqrt()
    }

    /// Scale by a rational.
    pub fn scale(&self, c: &BigRational) -> Self {
        QuadraticNumber::new(&self.rat * c, &self.surd * c, self.d.clone())
    }
}

fn sign_of(x: &BigRational) -> i8 {
    if x.is_zero() {
        0
    } else if x.is_positive() {
        1
    } else {
        -1
    }
}

fn ratio_to_f64(x: &BigRational) -> f64 {
    x.to_f64().unwrap_or_else(|| {
        let s = ln_ratio(x).exp();
        if x.is_negative() {
            -s
        } else {
            s
        }
    })
}

impl Add for QuadraticNumber {
    type Output = QuadraticNumber;
    fn add(self, rhs: QuadraticNumber) -> QuadraticNumber {
        let d = self.unify(&rhs);
        QuadraticNumber::new(self.rat + rhs.rat, self.surd + rhs.surd, d)
    }
}

impl Sub for QuadraticNumber {
    type Output = QuadraticNumber;
    fn sub(self, rhs: QuadraticNumber) -> QuadraticNumber {
        self + (-rhs)
    }
}

impl Neg for QuadraticNumber {
    type Output = QuadraticNumber;
    fn neg(self) -> QuadraticNumber {
        QuadraticNumber {
            rat: -self.rat,
            surd: -self.surd,
            d: self.d,
        }
    }
}

impl Mul for QuadraticNumber {
    type Output = QuadraticNumber;
    fn mul(self, rhs: QuadraticNumber) -> QuadraticNumber {
        let d = self.unify(&rhs);
        let dd = BigRational::from_integer(d.clone());
        QuadraticNumber::new(
            &self.rat * &rhs.rat + &self.surd * &rhs.surd * dd,
            &self.rat * &rhs.surd + &self.surd * &rhs.rat,
            d,
        )
    }
}

impl Div for QuadraticNumber {
    type Output = QuadraticNumber;
    fn div(self, rhs: QuadraticNumber) -> QuadraticNumber {
        self * rhs.inverse().expect("division by zero quadratic number")
    }
}

impl fmt::Display for QuadraticNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.surd.is_zero() {
            return write!(f, "{}", self.rat);
        }
        if !self.rat.is_zero() {
            write!(f, "{}", self.rat)?;
            if self.surd.is_positive() {
                write!(f, "+")?;
            }
        }
        if self.surd == -BigRational::one() {
            write!(f, "-")?;
        } else if self.surd != BigRational::one() {
            write!(f, "{}*", self.surd)?;
        }
        write!(f, "sqrt({})", self.d)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn squarefree_normalization() {
        // sqrt(12) = 2 sqrt(3)
        let x = QuadraticNumber::sqrt_of(&BigInt::from(12));
        assert_eq!(x.radicand(), &BigInt::from(3));
        assert_eq!(x.surd_part(), &q(2, 1));
        // sqrt(9) = 3 is rational
        let y = QuadraticNumber::sqrt_of(&BigInt::from(9));
        assert!(y.is_rational());
        assert_eq!(y.rational_part(), &q(3, 1));
    }

    #[test]
    fn golden_ratio_arithmetic() {
        // phi = (1+sqrt5)/2 satisfies phi^2 = phi + 1
        let phi = QuadraticNumber::new(q(1, 2), q(1, 2), BigInt::from(5));
        let phi2 = phi.clone() * phi.clone();
        assert_eq!(phi2, phi.clone() + QuadraticNumber::one());
        // and 1/phi = phi - 1
        assert_eq!(
            phi.inverse().unwrap(),
            phi.clone() - QuadraticNumber::one()
        );
    }

    #[test]
    fn exact_signs() {
        // 2 - sqrt(3) > 0, 1 - sqrt(2) < 0
        let x = QuadraticNumber::new(q(2, 1), q(-1, 1), BigInt::from(3));
        assert_eq!(x.sign(), 1);
        let y = QuadraticNumber::new(q(1, 1), q(-1, 1), BigInt::from(2));
        assert_eq!(y.sign(), -1);
        // sqrt(2) - 1 > 0
        assert_eq!((-y).sign(), 1);
    }

    #[test]
    fn rational_and_surd_mix() {
        let half = QuadraticNumber::from_rational(q(1, 2));
        let r5 = QuadraticNumber::sqrt_of(&BigInt::from(5));
        let s = half + r5.clone();
        assert_eq!(s.radicand(), &BigInt::from(5));
        let p = s * r5; // (1/2 + sqrt5) sqrt5 = 5 + 1/2 sqrt5
        assert_eq!(p.rational_part(), &q(5, 1));
        assert_eq!(p.surd_part(), &q(1, 2));
    }

    #[test]
    fn display_forms() {
        let lam = QuadraticNumber::new(q(3, 2), q(1, 2), BigInt::from(5));
        assert_eq!(lam.to_string(), "3/2+1/2*sqrt(5)");
        assert_eq!(QuadraticNumber::from_int(-3).to_string(), "-3");
    }
}

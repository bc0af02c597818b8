//! The rationals as a valued field: archimedean place plus one finite
//! place per prime, normalized by |p|_p = 1/p.

use std::fmt;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::budget::Budget;
use crate::error::{EngineError, FieldError};
use crate::field::{
    ExactOrd, FieldCtx, Height, HeightExact, LogAbs, ProductFormulaReport, ValuedField,
};
use crate::util::{ln_big, ln_ratio, SplitMix64};

/// A normalized place of the rationals.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum QPlace {
    /// The usual absolute value.
    Arch,
    /// The p-adic place with |p| = 1/p.
    Prime(BigInt),
}

impl fmt::Display for QPlace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QPlace::Arch => write!(f, "arch"),
            QPlace::Prime(p) => write!(f, "p:{}", p),
        }
    }
}

/// The sign part of a factored rational.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct QSign(pub bool); // true = negative

impl fmt::Display for QSign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", if self.0 { "-1" } else { "1" })
    }
}

// ---- integer factorization at desk scale ----

fn mulmod(a: &BigUint, b: &BigUint, m: &BigUint) -> BigUint {
    (a * b) % m
}

fn powmod(base: &BigUint, mut exp: BigUint, m: &BigUint) -> BigUint {
    let mut result = BigUint::one();
    let mut base = base % m;
    let two = BigUint::from(2u32);
    while !exp.is_zero() {
        if exp.is_odd() {
            result = mulmod(&result, &base, m);
        }
        base = mulmod(&base, &base, m);
        exp /= &two;
    }
    result
}

/// Miller-Rabin with a fixed witness set; deterministic for inputs below
/// 3.3e24 and overwhelmingly reliable beyond desk scale.
pub fn is_prime(n: &BigInt) -> bool {
    if n.sign() != Sign::Plus {
        return false;
    }
    let n = n.magnitude().clone();
    let two = BigUint::from(2u32);
    if n < two {
        return false;
    }
    for small in [2u32, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let s = BigUint::from(small);
        if n == s {
            return true;
        }
        if (&n % &s).is_zero() {
            return false;
        }
    }
    let one = BigUint::one();
    let n_minus_1 = &n - &one;
    let mut d = n_minus_1.clone();
    let mut r = 0u64;
    while d.is_even() {
        d /= &two;
        r += 1;
    }
    'witness: for a in [2u32, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = powmod(&BigUint::from(a), d.clone(), &n);
        if x == one || x == n_minus_1 {
            continue;
        }
        for _ in 0..r - 1 {
            x = mulmod(&x, &x, &n);
            if x == n_minus_1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn pollard_brent(n: &BigUint, rng: &mut SplitMix64) -> Option<BigUint> {
    if n.is_even() {
        return Some(BigUint::from(2u32));
    }
    let one = BigUint::one();
    for _ in 0..24 {
        let c = BigUint::from(rng.next_u64() % 1_000_000 + 1);
        let mut x = BigUint::from(rng.next_u64() % 1_000_000 + 2);
        let mut y = x.clone();
        let mut d = one.clone();
        let f = |v: &BigUint| (v * v + &c) % n;
        let mut count = 0u64;
        while d == one {
            x = f(&x);
            y = f(&f(&y));
            let diff = if x > y { &x - &y } else { &y - &x };
            if diff.is_zero() {
                break;
            }
            d = diff.gcd(n);
            count += 1;
            if count > 2_000_000 {
                break;
            }
        }
        if d != one && &d != n {
            return Some(d);
        }
    }
    None
}

/// Factor a positive integer into prime powers, smallest prime first.
pub fn factor_bigint(n: &BigInt) -> Result<Vec<(BigInt, BigInt)>, FieldError> {
    if n.sign() != Sign::Plus {
        return Err(FieldError::ZeroInput);
    }
    let mut m = n.magnitude().clone();
    let one = BigUint::one();
    let mut factors: Vec<(BigUint, u64)> = Vec::new();
    // trial division by small primes
    let mut p = BigUint::from(2u32);
    let limit = BigUint::from(1u32 << 20);
    while &p * &p <= m && p <= limit {
        let mut e = 0u64;
        while (&m % &p).is_zero() {
            m /= &p;
            e += 1;
        }
        if e > 0 {
            factors.push((p.clone(), e));
        }
        p += if p == BigUint::from(2u32) { 1u32 } else { 2u32 };
    }
    // remaining cofactor: split recursively with Pollard-Brent
    let mut stack = vec![m];
    let mut rng = SplitMix64::new(0x5EED_FACE_D00Du64);
    while let Some(m) = stack.pop() {
        if m == one {
            continue;
        }
        let mi = BigInt::from(m.clone());
        if is_prime(&mi) {
            let mut found = false;
            for (q, e) in factors.iter_mut() {
                if *q == m {
                    *e += 1;
                    found = true;
                    break;
                }
            }
            if !found {
                factors.push((m, 1));
            }
            continue;
        }
        match pollard_brent(&m, &mut rng) {
            Some(d) => {
                stack.push(m / &d);
                stack.push(d);
            }
            None => return Err(FieldError::FactorBudget(format!("{}", m))),
        }
    }
    factors.sort_by(|a, b| a.0.cmp(&b.0));
    Ok(factors
        .into_iter()
        .map(|(p, e)| (BigInt::from(p), BigInt::from(e)))
        .collect())
}

/// ord_p of a nonzero integer: the exact power of p dividing it.
pub fn ord_p_int(n: &BigInt, p: &BigInt) -> BigInt {
    debug_assert!(!n.is_zero());
    let mut cur = n.abs();
    let mut ord = BigInt::zero();
    loop {
        let (q, r) = cur.div_rem(p);
        if !r.is_zero() {
            return ord;
        }
        cur = q;
        ord += 1;
    }
}

/// ord_p of a nonzero rational.
pub fn ord_p_rat(x: &BigRational, p: &BigInt) -> BigInt {
    ord_p_int(x.numer(), p) - ord_p_int(x.denom(), p)
}

fn parse_rational(s: &str) -> Result<BigRational, FieldError> {
    let s = s.trim();
    let parse_int = |t: &str| -> Result<BigInt, FieldError> {
        t.trim()
            .parse::<BigInt>()
            .map_err(|e| FieldError::Parse(format!("bad integer {t:?}: {e}")))
    };
    match s.split_once('/') {
        None => Ok(BigRational::from_integer(parse_int(s)?)),
        Some((n, d)) => {
            let den = parse_int(d)?;
            if den.is_zero() {
                return Err(FieldError::Parse("zero denominator".into()));
            }
            Ok(BigRational::new(parse_int(n)?, den))
        }
    }
}

impl ValuedField for BigRational {
    type Place = QPlace;
    type Unit = QSign;

    fn zero() -> Self {
        num_traits::Zero::zero()
    }

    fn one() -> Self {
        num_traits::One::one()
    }

    fn is_zero(&self) -> bool {
        num_traits::Zero::is_zero(self)
    }

    fn is_one(&self) -> bool {
        num_traits::One::is_one(self)
    }

    fn try_inverse(&self) -> Option<Self> {
        if num_traits::Zero::is_zero(self) {
            None
        } else {
            Some(self.recip())
        }
    }

    fn int_pow(&self, e: i64, budget: &Budget) -> Result<Self, EngineError> {
        if num_traits::Zero::is_zero(self) {
            return match e {
                0 => Ok(<Self as ValuedField>::one()),
                e if e > 0 => Ok(<Self as ValuedField>::zero()),
                _ => Err(EngineError::Field(FieldError::ZeroInput)),
            };
        }
        let bits = self.numer().bits().max(self.denom().bits()).max(1);
        if bits.saturating_mul(e.unsigned_abs()) > budget.max_bits() {
            return Err(EngineError::Overflow(format!(
                "power {} of a {}-bit rational exceeds the digit budget",
                e, bits
            )));
        }
        let e32: i32 = e
            .try_into()
            .map_err(|_| EngineError::Overflow("exponent exceeds i32".into()))?;
        Ok(self.pow(e32))
    }

    fn characteristic(&self) -> u64 {
        0
    }

    fn same_field(&self, _other: &Self) -> bool {
        true
    }

    fn parse(s: &str, ctx: &FieldCtx) -> Result<Self, FieldError> {
        match ctx {
            FieldCtx::Rationals => parse_rational(s),
            FieldCtx::FunctionField { .. } => Err(FieldError::WrongContext(
                "expected a rational, got a function-field context".into(),
            )),
        }
    }

    fn size_digits(&self) -> u64 {
        let bits = self.numer().bits() + self.denom().bits();
        (bits as f64 / std::f64::consts::LOG2_10).ceil() as u64
    }

    fn infinite_place() -> QPlace {
        QPlace::Arch
    }

    fn is_finite_place(v: &QPlace) -> bool {
        matches!(v, QPlace::Prime(_))
    }

    fn parse_place(s: &str, _ctx: &FieldCtx) -> Result<QPlace, FieldError> {
        let s = s.trim();
        if s == "arch" {
            return Ok(QPlace::Arch);
        }
        if let Some(p) = s.strip_prefix("p:") {
            let p: BigInt = p
                .trim()
                .parse()
                .map_err(|e| FieldError::Parse(format!("bad prime {p:?}: {e}")))?;
            if !is_prime(&p) {
                return Err(FieldError::NotPrime(p.to_string()));
            }
            return Ok(QPlace::Prime(p));
        }
        Err(FieldError::Parse(format!(
            "unknown place {s:?}; expected \"arch\" or \"p:<prime>\""
        )))
    }

    fn place_label(v: &QPlace) -> String {
        match v {
            QPlace::Arch => "arch".into(),
            QPlace::Prime(p) => p.to_string(),
        }
    }

    fn place_weight_log(v: &QPlace) -> f64 {
        match v {
            QPlace::Arch => f64::NAN,
            QPlace::Prime(p) => ln_big(p),
        }
    }

    fn abs_log(v: &QPlace, x: &Self) -> Result<LogAbs, FieldError> {
        if num_traits::Zero::is_zero(x) {
            return Err(FieldError::ZeroInput);
        }
        match v {
            QPlace::Arch => Ok(LogAbs::archimedean(ln_ratio(x))),
            QPlace::Prime(p) => Ok(LogAbs::from_exact(ExactOrd::Prime {
                p: p.clone(),
                ord: ord_p_rat(x, p),
            })),
        }
    }

    fn ord_at(v: &QPlace, x: &Self) -> Result<Option<BigInt>, FieldError> {
        if num_traits::Zero::is_zero(x) {
            return Err(FieldError::ZeroInput);
        }
        Ok(match v {
            QPlace::Arch => None,
            QPlace::Prime(p) => Some(ord_p_rat(x, p)),
        })
    }

    fn factor(&self) -> Result<(QSign, Vec<(QPlace, BigInt)>), FieldError> {
        if num_traits::Zero::is_zero(self) {
            return Err(FieldError::ZeroInput);
        }
        let mut merged: Vec<(BigInt, BigInt)> = Vec::new();
        for (p, e) in factor_bigint(&self.numer().abs())? {
            merged.push((p, e));
        }
        for (p, e) in factor_bigint(self.denom())? {
            match merged.iter_mut().find(|(q, _)| *q == p) {
                Some((_, me)) => *me -= e,
                None => merged.push((p, -e)),
            }
        }
        merged.sort_by(|a, b| a.0.cmp(&b.0));
        merged.retain(|(_, e)| !e.is_zero());
        Ok((
            QSign(self.numer().sign() == Sign::Minus),
            merged
                .into_iter()
                .map(|(p, e)| (QPlace::Prime(p), e))
                .collect(),
        ))
    }

    fn unit_one() -> QSign {
        QSign(false)
    }

    fn unit_mul(a: &QSign, b: &QSign) -> QSign {
        QSign(a.0 ^ b.0)
    }

    fn unit_pow(u: &QSign, e: &BigInt) -> QSign {
        QSign(u.0 && e.is_odd())
    }

    fn unit_inverse(u: &QSign) -> QSign {
        *u
    }

    fn unit_to_element(u: &QSign) -> Self {
        if u.0 {
            -<Self as ValuedField>::one()
        } else {
            <Self as ValuedField>::one()
        }
    }

    fn from_factors(
        unit: &QSign,
        factors: &[(QPlace, BigInt)],
        budget: &Budget,
    ) -> Result<Self, EngineError> {
        let mut est_bits: u64 = 1;
        for (v, e) in factors {
            if let QPlace::Prime(p) = v {
                est_bits = est_bits.saturating_add(
                    p.bits()
                        .saturating_mul(e.magnitude().to_u64().unwrap_or(u64::MAX)),
                );
            }
        }
        if est_bits > budget.max_bits() {
            return Err(EngineError::Overflow(
                "factored rational too large to expand".into(),
            ));
        }
        let mut num = BigInt::one();
        let mut den = BigInt::one();
        for (v, e) in factors {
            let p = match v {
                QPlace::Prime(p) => p,
                QPlace::Arch => continue,
            };
            let mag = e.magnitude().to_u32().ok_or_else(|| {
                EngineError::Overflow("exponent exceeds expansion range".into())
            })?;
            if e.sign() == Sign::Minus {
                den *= p.pow(mag);
            } else {
                num *= p.pow(mag);
            }
        }
        if unit.0 {
            num = -num;
        }
        Ok(BigRational::new(num, den))
    }

    fn weil_height(coords: &[Self]) -> Height {
        // Primitive representative: clear denominators with the lcm, then
        // h = ln max(|a_1|, ..., |a_n|, c). The lcm construction makes the
        // tuple (a_1, ..., a_n, c) automatically coprime.
        let mut c = BigInt::one();
        for x in coords {
            if !num_traits::Zero::is_zero(x) {
                c = c.lcm(x.denom());
            }
        }
        let mut best = c.clone();
        for x in coords {
            if num_traits::Zero::is_zero(x) {
                continue;
            }
            let a = (x.numer() * (&c / x.denom())).abs();
            if a > best {
                best = a;
            }
        }
        Height {
            log_value: ln_big(&best),
            exact: Some(HeightExact::LogRational(BigRational::from_integer(best))),
        }
    }

    fn product_formula(x: &Self) -> Result<ProductFormulaReport<QPlace>, FieldError> {
        if num_traits::Zero::is_zero(x) {
            return Err(FieldError::ZeroInput);
        }
        let (_, factors) = <Self as ValuedField>::factor(x)?;
        // The multiset of prime ords must reconstruct |x| exactly.
        let mut recon = BigRational::from_integer(BigInt::one());
        for (v, e) in &factors {
            if let QPlace::Prime(p) = v {
                let mag = e
                    .magnitude()
                    .to_u32()
                    .ok_or_else(|| FieldError::FactorBudget("ord too large".into()))?;
                let pw = BigRational::from_integer(p.pow(mag));
                if e.sign() == Sign::Minus {
                    recon /= pw;
                } else {
                    recon *= pw;
                }
            }
        }
        let holds = recon == x.abs();
        Ok(ProductFormulaReport {
            ords: factors.into_iter().map(|(v, e)| (v, e)).collect(),
            infinite_contribution: ln_ratio(x),
            holds,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{coordinate_norm_log, relevant_places, weil_height};

    fn q(s: &str) -> BigRational {
        <BigRational as ValuedField>::parse(s, &FieldCtx::Rationals).unwrap()
    }

    #[test]
    fn abs_log_examples() {
        // |2/3| at 3 is 3, with exact ord -1
        let l = <BigRational as ValuedField>::abs_log(&QPlace::Prime(3.into()), &q("2/3")).unwrap();
        assert!((l.value - 3f64.ln()).abs() < 1e-12);
        assert_eq!(
            l.exact,
            Some(ExactOrd::Prime {
                p: 3.into(),
                ord: (-1).into()
            })
        );
        // |-5| at arch is 5
        let l = <BigRational as ValuedField>::abs_log(&QPlace::Arch, &q("-5")).unwrap();
        assert!((l.value - 5f64.ln()).abs() < 1e-12);
        assert!(l.exact.is_none());
        // zero input is rejected
        assert_eq!(
            <BigRational as ValuedField>::abs_log(&QPlace::Arch, &q("0")),
            Err(FieldError::ZeroInput)
        );
    }

    #[test]
    fn relevant_places_examples() {
        let places = relevant_places(&[q("2/3"), q("5")]).unwrap();
        let expected: Vec<QPlace> = vec![
            QPlace::Arch,
            QPlace::Prime(2.into()),
            QPlace::Prime(3.into()),
            QPlace::Prime(5.into()),
        ];
        assert_eq!(places.into_iter().collect::<Vec<_>>(), expected);

        let places = relevant_places(&[q("1")]).unwrap();
        assert_eq!(places.into_iter().collect::<Vec<_>>(), vec![QPlace::Arch]);
    }

    #[test]
    fn coordinate_norm_examples() {
        let p = [q("2/3"), q("5")];
        assert!((coordinate_norm_log::<BigRational>(&QPlace::Arch, &p) - 5f64.ln()).abs() < 1e-12);
        assert!(
            (coordinate_norm_log::<BigRational>(&QPlace::Prime(3.into()), &p) - 3f64.ln()).abs()
                < 1e-12
        );
        // |2/3|_5 = 1 and |5|_5 = 1/5, so the max-norm is 1
        assert_eq!(
            coordinate_norm_log::<BigRational>(&QPlace::Prime(5.into()), &p),
            0.0
        );
        // a tuple that is small at 5 in every coordinate
        let small = [q("5"), q("25")];
        assert!(
            (coordinate_norm_log::<BigRational>(&QPlace::Prime(5.into()), &small) + 5f64.ln())
                .abs()
                < 1e-12
        );
        // all-zero tuple: -inf sentinel
        assert_eq!(
            coordinate_norm_log::<BigRational>(&QPlace::Arch, &[q("0")]),
            f64::NEG_INFINITY
        );
    }

    #[test]
    fn weil_height_examples() {
        // (2/3, 5) has primitive representative (2, 15; 3), max 15
        let h = weil_height(&[q("2/3"), q("5")]);
        assert!((h.log_value - 15f64.ln()).abs() < 1e-12);
        assert_eq!(
            h.exact,
            Some(HeightExact::LogRational(BigRational::from_integer(
                15.into()
            )))
        );
        // all units
        let h = weil_height(&[q("1"), q("1")]);
        assert_eq!(h.log_value, 0.0);
    }

    #[test]
    fn product_formula_examples() {
        let r = <BigRational as ValuedField>::product_formula(&q("6")).unwrap();
        assert!(r.holds);
        assert_eq!(r.ords.len(), 2);
        let r = <BigRational as ValuedField>::product_formula(&q("1")).unwrap();
        assert!(r.holds);
        assert!(r.ords.is_empty());
    }

    #[test]
    fn factor_and_reconstruct_roundtrip() {
        let budget = Budget::default();
        for s in ["-84/55", "1", "2/3", "1024", "-7"] {
            let x = q(s);
            let (u, f) = <BigRational as ValuedField>::factor(&x).unwrap();
            let back = <BigRational as ValuedField>::from_factors(&u, &f, &budget).unwrap();
            assert_eq!(back, x, "roundtrip failed for {s}");
        }
    }

    #[test]
    fn primality_and_factoring() {
        assert!(is_prime(&BigInt::from(2u32)));
        assert!(is_prime(&BigInt::from(1_000_003u32)));
        assert!(!is_prime(&BigInt::from(1_000_001u32)));
        let f = factor_bigint(&BigInt::from(600u32)).unwrap();
        assert_eq!(
            f,
            vec![
                (BigInt::from(2), BigInt::from(3)),
                (BigInt::from(3), BigInt::from(1)),
                (BigInt::from(5), BigInt::from(2)),
            ]
        );
    }
}

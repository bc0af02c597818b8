//! Rational function fields F_p(t) over a prime field, with their places:
//! one finite place per monic irreducible polynomial pi (weighted by
//! deg pi) and the infinite place with log|x| = deg(x).

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::budget::Budget;
use crate::error::{EngineError, FieldError};
use crate::field::{
    ExactOrd, FieldCtx, Height, HeightExact, LogAbs, ProductFormulaReport, ValuedField,
};

fn check_prime_u64(p: u64) -> Result<(), FieldError> {
    if p < 2 {
        return Err(FieldError::NotPrime(p.to_string()));
    }
    let mut d = 2u64;
    while d * d <= p {
        if p % d == 0 {
            return Err(FieldError::NotPrime(p.to_string()));
        }
        d += 1;
    }
    Ok(())
}

fn inv_mod(a: u64, p: u64) -> u64 {
    // extended Euclid; a != 0 mod p
    let (mut t, mut new_t) = (0i128, 1i128);
    let (mut r, mut new_r) = (p as i128, (a % p) as i128);
    while new_r != 0 {
        let q = r / new_r;
        (t, new_t) = (new_t, t - q * new_t);
        (r, new_r) = (new_r, r - q * new_r);
    }
    debug_assert_eq!(r, 1);
    t.rem_euclid(p as i128) as u64
}

/// A dense univariate polynomial over F_p, coefficients ascending.
/// Canonical form: empty vector for zero, nonzero leading coefficient.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FqPoly {
    pub p: u64,
    coeffs: Vec<u64>,
}

impl FqPoly {
    pub fn new(p: u64, mut coeffs: Vec<u64>) -> Self {
        for c in coeffs.iter_mut() {
            *c %= p;
        }
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        FqPoly { p, coeffs }
    }

    pub fn zero(p: u64) -> Self {
        FqPoly { p, coeffs: vec![] }
    }

    pub fn one(p: u64) -> Self {
        FqPoly::new(p, vec![1])
    }

    pub fn constant(p: u64, c: u64) -> Self {
        FqPoly::new(p, vec![c])
    }

    pub fn t(p: u64) -> Self {
        FqPoly::new(p, vec![0, 1])
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs == [1]
    }

    /// Degree; -1 for the zero polynomial.
    pub fn degree(&self) -> i64 {
        self.coeffs.len() as i64 - 1
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn leading(&self) -> u64 {
        *self.coeffs.last().unwrap_or(&0)
    }

    pub fn is_monic(&self) -> bool {
        self.leading() == 1
    }

    fn assert_same(&self, other: &Self) {
        assert_eq!(
            self.p, other.p,
            "mixed characteristics {} and {}",
            self.p, other.p
        );
    }

    pub fn add(&self, other: &Self) -> Self {
        // zero polynomials act as neutral elements across characteristics,
        // so generic accumulator patterns starting from zero stay usable
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        self.assert_same(other);
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = vec![0u64; n];
        for (i, slot) in out.iter_mut().enumerate() {
            let a = self.coeffs.get(i).copied().unwrap_or(0);
            let b = other.coeffs.get(i).copied().unwrap_or(0);
            *slot = (a + b) % self.p;
        }
        FqPoly::new(self.p, out)
    }

    pub fn neg(&self) -> Self {
        let out = self.coeffs.iter().map(|c| (self.p - c) % self.p).collect();
        FqPoly::new(self.p, out)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return FqPoly::zero(self.p.max(other.p));
        }
        if self.is_one() {
            return other.clone();
        }
        if other.is_one() {
            return self.clone();
        }
        self.assert_same(other);
        let mut out = vec![0u64; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                let prod = (a as u128 * b as u128) % self.p as u128;
                out[i + j] = ((out[i + j] as u128 + prod) % self.p as u128) as u64;
            }
        }
        FqPoly::new(self.p, out)
    }

    pub fn scale(&self, c: u64) -> Self {
        let c = c % self.p;
        let out = self
            .coeffs
            .iter()
            .map(|a| ((*a as u128 * c as u128) % self.p as u128) as u64)
            .collect();
        FqPoly::new(self.p, out)
    }

    /// Quotient and remainder by a nonzero divisor.
    pub fn div_rem(&self, div: &Self) -> (Self, Self) {
        self.assert_same(div);
        assert!(!div.is_zero(), "division by the zero polynomial");
        if self.degree() < div.degree() {
            return (FqPoly::zero(self.p), self.clone());
        }
        let p = self.p;
        let inv_lead = inv_mod(div.leading(), p);
        let mut rem = self.coeffs.clone();
        let mut quot = vec![0u64; (self.degree() - div.degree() + 1) as usize];
        for k in (0..quot.len()).rev() {
            let top = rem[k + div.degree() as usize];
            if top == 0 {
                continue;
            }
            let q = ((top as u128 * inv_lead as u128) % p as u128) as u64;
            quot[k] = q;
            for (j, &d) in div.coeffs.iter().enumerate() {
                let sub = (q as u128 * d as u128) % p as u128;
                let idx = k + j;
                rem[idx] = ((rem[idx] as u128 + p as u128 * p as u128 - sub) % p as u128) as u64;
            }
        }
        (FqPoly::new(p, quot), FqPoly::new(p, rem))
    }

    pub fn gcd(&self, other: &Self) -> Self {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let r = a.div_rem(&b).1;
            a = b;
            b = r;
        }
        if a.is_zero() {
            a
        } else {
            a.monic()
        }
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() || self.is_monic() {
            return self.clone();
        }
        self.scale(inv_mod(self.leading(), self.p))
    }

    /// p-th power Frobenius applied k times: spreads coefficients, since
    /// (sum a_i t^i)^(p^k) = sum a_i t^(i*p^k) over F_p.
    pub fn frobenius_pow(&self, k: u32) -> Self {
        if self.is_zero() || k == 0 {
            return self.clone();
        }
        let stride = (self.p as u128).pow(k);
        let stride = usize::try_from(stride).expect("frobenius stride overflow");
        let mut out = vec![0u64; (self.coeffs.len() - 1) * stride + 1];
        for (i, &c) in self.coeffs.iter().enumerate() {
            out[i * stride] = c;
        }
        FqPoly::new(self.p, out)
    }

    /// Decide irreducibility by trial division by all monic polynomials of
    /// degree at most deg/2 (q is small at desk scale).
    pub fn is_irreducible(&self) -> Result<bool, FieldError> {
        let d = self.degree();
        if d < 1 {
            return Ok(false);
        }
        if d == 1 {
            return Ok(true);
        }
        let half = (d / 2) as u32;
        let count = (self.p as f64).powi(half as i32);
        if count > 4_000_000.0 {
            return Err(FieldError::FactorBudget(format!(
                "irreducibility test over F_{} up to degree {half}",
                self.p
            )));
        }
        for deg in 1..=half {
            let mut cand = monic_iter(self.p, deg as usize);
            while let Some(c) = cand.next() {
                if self.div_rem(&c).1.is_zero() {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Factor into monic irreducibles (smallest degree first); returns the
    /// leading unit and the irreducible powers. Trial division: once all
    /// factors of degree < d are removed, a remainder of degree < 2d must
    /// itself be irreducible.
    pub fn factor(&self) -> Result<(u64, Vec<(FqPoly, BigInt)>), FieldError> {
        if self.is_zero() {
            return Err(FieldError::ZeroInput);
        }
        let unit = self.leading();
        let mut rem = self.monic();
        let mut out: Vec<(FqPoly, BigInt)> = Vec::new();
        let mut deg = 1usize;
        while rem.degree() > 0 {
            if (deg as i64) * 2 > rem.degree() {
                out.push((rem, BigInt::from(1)));
                break;
            }
            let count = (self.p as f64).powi(deg as i32);
            if count > 4_000_000.0 {
                return Err(FieldError::FactorBudget(format!(
                    "factoring over F_{} at degree {deg}",
                    self.p
                )));
            }
            for c in monic_iter(self.p, deg) {
                let mut e = BigInt::zero();
                loop {
                    let (q, r) = rem.div_rem(&c);
                    if !r.is_zero() {
                        break;
                    }
                    rem = q;
                    e += 1;
                }
                if !e.is_zero() {
                    out.push((c, e));
                }
                if rem.degree() == 0 {
                    break;
                }
            }
            deg += 1;
        }
        Ok((unit, out))
    }

    pub fn parse(s: &str, p: u64) -> Result<Self, FieldError> {
        parse_poly(s, p)
    }
}

/// Iterate monic polynomials of exactly the given degree over F_p by
/// counting the lower coefficients in base p.
struct MonicIter {
    p: u64,
    deg: usize,
    counter: Vec<u64>,
    done: bool,
}

fn monic_iter(p: u64, deg: usize) -> MonicIter {
    MonicIter {
        p,
        deg,
        counter: vec![0; deg],
        done: false,
    }
}

impl Iterator for MonicIter {
    type Item = FqPoly;

    fn next(&mut self) -> Option<FqPoly> {
        if self.done {
            return None;
        }
        let mut coeffs = self.counter.clone();
        coeffs.push(1);
        let out = FqPoly::new(self.p, coeffs);
        // increment
        let mut i = 0;
        loop {
            if i == self.counter.len() {
                self.done = true;
                break;
            }
            self.counter[i] += 1;
            if self.counter[i] < self.p {
                break;
            }
            self.counter[i] = 0;
            i += 1;
        }
        Some(out)
    }
}

impl fmt::Display for FqPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, &c) in self.coeffs.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            if !first {
                write!(f, "+")?;
            }
            first = false;
            match i {
                0 => write!(f, "{}", c)?,
                1 => {
                    if c != 1 {
                        write!(f, "{}", c)?;
                    }
                    write!(f, "t")?;
                }
                _ => {
                    if c != 1 {
                        write!(f, "{}", c)?;
                    }
                    write!(f, "t^{}", i)?;
                }
            }
        }
        Ok(())
    }
}

fn parse_poly(s: &str, p: u64) -> Result<FqPoly, FieldError> {
    let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() {
        return Err(FieldError::Parse("empty polynomial".into()));
    }
    let mut out = FqPoly::zero(p);
    // split into signed terms
    let mut terms: Vec<(bool, String)> = Vec::new();
    let mut cur = String::new();
    let mut neg = false;
    for (i, ch) in s.chars().enumerate() {
        match ch {
            '+' | '-' if i > 0 => {
                terms.push((neg, std::mem::take(&mut cur)));
                neg = ch == '-';
            }
            '-' => neg = true,
            _ => cur.push(ch),
        }
    }
    terms.push((neg, cur));
    for (neg, term) in terms {
        if term.is_empty() {
            return Err(FieldError::Parse(format!("dangling sign in {s:?}")));
        }
        let term = term.replace('*', "");
        let (coef_str, exp) = match term.find('t') {
            None => (term.as_str(), 0usize),
            Some(pos) => {
                let coef = &term[..pos];
                let rest = &term[pos + 1..];
                let exp = if rest.is_empty() {
                    1
                } else if let Some(e) = rest.strip_prefix('^') {
                    e.parse::<usize>()
                        .map_err(|e| FieldError::Parse(format!("bad exponent: {e}")))?
                } else {
                    return Err(FieldError::Parse(format!("bad term {term:?}")));
                };
                (coef, exp)
            }
        };
        let coef: u64 = if coef_str.is_empty() {
            1
        } else {
            coef_str
                .parse::<u64>()
                .map_err(|e| FieldError::Parse(format!("bad coefficient {coef_str:?}: {e}")))?
        };
        let coef = if neg { (p - coef % p) % p } else { coef % p };
        let mut mono = vec![0u64; exp + 1];
        mono[exp] = coef;
        out = out.add(&FqPoly::new(p, mono));
    }
    Ok(out)
}

/// A place of F_p(t): the infinite place or a monic irreducible.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum FqPlace {
    Infinity,
    Poly(FqPoly),
}

impl PartialOrd for FqPlace {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for FqPlace {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        use std::cmp::Ordering;
        match (self, other) {
            (FqPlace::Infinity, FqPlace::Infinity) => Ordering::Equal,
            (FqPlace::Infinity, _) => Ordering::Less,
            (_, FqPlace::Infinity) => Ordering::Greater,
            (FqPlace::Poly(a), FqPlace::Poly(b)) => a
                .degree()
                .cmp(&b.degree())
                .then_with(|| a.coeffs().cmp(b.coeffs())),
        }
    }
}

impl fmt::Display for FqPlace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FqPlace::Infinity => write!(f, "inf"),
            FqPlace::Poly(pi) => write!(f, "poly:{}", pi),
        }
    }
}

/// A rational function over F_p: reduced fraction with monic denominator.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FqRatFunc {
    num: FqPoly,
    den: FqPoly,
}

impl FqRatFunc {
    pub fn new(num: FqPoly, den: FqPoly) -> Result<Self, FieldError> {
        if num.p != den.p {
            return Err(FieldError::CharacteristicMismatch(num.p, den.p));
        }
        if den.is_zero() {
            return Err(FieldError::Parse("zero denominator".into()));
        }
        Ok(Self::reduce(num, den))
    }

    fn reduce(num: FqPoly, den: FqPoly) -> Self {
        if num.is_zero() {
            return FqRatFunc {
                num,
                den: FqPoly::one(den.p),
            };
        }
        let g = num.gcd(&den);
        let num = num.div_rem(&g).0;
        let den = den.div_rem(&g).0;
        // normalize: monic denominator
        let lead_inv = inv_mod(den.leading(), den.p);
        FqRatFunc {
            num: num.scale(lead_inv),
            den: den.scale(lead_inv),
        }
    }

    pub fn from_poly(p: FqPoly) -> Self {
        let one = FqPoly::one(p.p);
        FqRatFunc { num: p, den: one }
    }

    pub fn constant(p: u64, c: u64) -> Self {
        Self::from_poly(FqPoly::constant(p, c))
    }

    pub fn t_var(p: u64) -> Self {
        Self::from_poly(FqPoly::t(p))
    }

    pub fn num(&self) -> &FqPoly {
        &self.num
    }

    pub fn den(&self) -> &FqPoly {
        &self.den
    }

    pub fn prime(&self) -> u64 {
        self.num.p
    }

    /// deg(num) - deg(den); the log of the infinite-place absolute value.
    pub fn deg(&self) -> i64 {
        debug_assert!(!self.num.is_zero());
        self.num.degree() - self.den.degree()
    }

    /// p-th power Frobenius applied k times.
    pub fn frobenius_pow(&self, k: u32) -> Self {
        FqRatFunc {
            num: self.num.frobenius_pow(k),
            den: self.den.frobenius_pow(k),
        }
    }

    pub fn degree_size(&self) -> u64 {
        (self.num.degree().max(0) + self.den.degree().max(0)) as u64
    }
}

impl fmt::Display for FqRatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

impl std::ops::Add for FqRatFunc {
    type Output = FqRatFunc;
    fn add(self, rhs: FqRatFunc) -> FqRatFunc {
        if self.num.is_zero() {
            return rhs;
        }
        if rhs.num.is_zero() {
            return self;
        }
        FqRatFunc::reduce(
            self.num.mul(&rhs.den).add(&rhs.num.mul(&self.den)),
            self.den.mul(&rhs.den),
        )
    }
}

impl std::ops::Sub for FqRatFunc {
    type Output = FqRatFunc;
    fn sub(self, rhs: FqRatFunc) -> FqRatFunc {
        self + (-rhs)
    }
}

impl std::ops::Neg for FqRatFunc {
    type Output = FqRatFunc;
    fn neg(self) -> FqRatFunc {
        FqRatFunc {
            num: self.num.neg(),
            den: self.den,
        }
    }
}

impl std::ops::Mul for FqRatFunc {
    type Output = FqRatFunc;
    fn mul(self, rhs: FqRatFunc) -> FqRatFunc {
        if self.num.is_zero() || <Self as ValuedField>::is_one(&rhs) {
            return self;
        }
        if rhs.num.is_zero() || <Self as ValuedField>::is_one(&self) {
            return rhs;
        }
        FqRatFunc::reduce(self.num.mul(&rhs.num), self.den.mul(&rhs.den))
    }
}

impl std::ops::Div for FqRatFunc {
    type Output = FqRatFunc;
    fn div(self, rhs: FqRatFunc) -> FqRatFunc {
        assert!(!rhs.num.is_zero(), "division by zero rational function");
        if self.num.is_zero() || <Self as ValuedField>::is_one(&rhs) {
            return self;
        }
        FqRatFunc::reduce(self.num.mul(&rhs.den), self.den.mul(&rhs.num))
    }
}

/// ord of a nonzero rational function at a monic irreducible.
pub fn ord_at_poly(x: &FqRatFunc, pi: &FqPoly) -> BigInt {
    fn ord_poly(mut f: FqPoly, pi: &FqPoly) -> BigInt {
        let mut ord = BigInt::zero();
        loop {
            let (q, r) = f.div_rem(pi);
            if !r.is_zero() {
                return ord;
            }
            f = q;
            ord += 1;
        }
    }
    ord_poly(x.num.clone(), pi) - ord_poly(x.den.clone(), pi)
}

impl ValuedField for FqRatFunc {
    type Place = FqPlace;
    type Unit = FqUnit;

    fn zero() -> Self {
        // characteristic is value-level; a standalone zero defaults to F_2
        // and same_field treats zero as compatible with everything.
        FqRatFunc::from_poly(FqPoly::zero(2))
    }

    fn one() -> Self {
        FqRatFunc::from_poly(FqPoly::one(2))
    }

    fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    fn try_inverse(&self) -> Option<Self> {
        if self.num.is_zero() {
            None
        } else {
            Some(Self::reduce(self.den.clone(), self.num.clone()))
        }
    }

    fn int_pow(&self, e: i64, budget: &Budget) -> Result<Self, EngineError> {
        if self.num.is_zero() {
            return match e {
                0 => Ok(FqRatFunc::constant(self.prime(), 1)),
                e if e > 0 => Ok(self.clone()),
                _ => Err(EngineError::Field(FieldError::ZeroInput)),
            };
        }
        let degs = self.degree_size().max(1);
        if degs.saturating_mul(e.unsigned_abs()) > budget.max_degree {
            return Err(EngineError::Overflow(format!(
                "power {e} of a degree-{degs} rational function exceeds the degree budget"
            )));
        }
        let base = if e < 0 {
            self.try_inverse().unwrap()
        } else {
            self.clone()
        };
        let mut out = FqRatFunc::constant(self.prime(), 1);
        let mut acc = base;
        let mut k = e.unsigned_abs();
        while k > 0 {
            if k & 1 == 1 {
                out = out * acc.clone();
            }
            k >>= 1;
            if k > 0 {
                acc = acc.clone() * acc;
            }
        }
        Ok(out)
    }

    fn characteristic(&self) -> u64 {
        self.prime()
    }

    fn same_field(&self, other: &Self) -> bool {
        self.is_zero() || other.is_zero() || self.prime() == other.prime()
    }

    fn parse(s: &str, ctx: &FieldCtx) -> Result<Self, FieldError> {
        let p = match ctx {
            FieldCtx::FunctionField { p } => *p,
            FieldCtx::Rationals => {
                return Err(FieldError::WrongContext(
                    "expected a function-field context".into(),
                ))
            }
        };
        check_prime_u64(p)?;
        let s = s.trim();
        match s.split_once('/') {
            None => Ok(FqRatFunc::from_poly(parse_poly(s, p)?)),
            Some((n, d)) => FqRatFunc::new(parse_poly(n, p)?, parse_poly(d, p)?),
        }
    }

    fn size_digits(&self) -> u64 {
        self.degree_size()
    }

    fn infinite_place() -> FqPlace {
        FqPlace::Infinity
    }

    fn is_finite_place(v: &FqPlace) -> bool {
        matches!(v, FqPlace::Poly(_))
    }

    fn parse_place(s: &str, ctx: &FieldCtx) -> Result<FqPlace, FieldError> {
        let s = s.trim();
        if s == "inf" {
            return Ok(FqPlace::Infinity);
        }
        let p = match ctx {
            FieldCtx::FunctionField { p } => *p,
            FieldCtx::Rationals => {
                return Err(FieldError::WrongContext(
                    "expected a function-field context".into(),
                ))
            }
        };
        if let Some(body) = s.strip_prefix("poly:") {
            let pi = parse_poly(body, p)?;
            if !pi.is_monic() {
                return Err(FieldError::Parse(format!("{pi} is not monic")));
            }
            if !pi.is_irreducible()? {
                return Err(FieldError::NotIrreducible(pi.to_string()));
            }
            return Ok(FqPlace::Poly(pi));
        }
        Err(FieldError::Parse(format!(
            "unknown place {s:?}; expected \"inf\" or \"poly:<monic irreducible>\""
        )))
    }

    fn place_weight_log(v: &FqPlace) -> f64 {
        match v {
            FqPlace::Infinity => 1.0,
            FqPlace::Poly(pi) => pi.degree() as f64,
        }
    }

    fn abs_log(v: &FqPlace, x: &Self) -> Result<LogAbs, FieldError> {
        if x.num.is_zero() {
            return Err(FieldError::ZeroInput);
        }
        match v {
            FqPlace::Infinity => Ok(LogAbs::from_exact(ExactOrd::PolyPlace {
                weight: 1,
                ord: BigInt::from(-x.deg()),
            })),
            FqPlace::Poly(pi) => Ok(LogAbs::from_exact(ExactOrd::PolyPlace {
                weight: pi.degree() as u64,
                ord: ord_at_poly(x, pi),
            })),
        }
    }

    fn ord_at(v: &FqPlace, x: &Self) -> Result<Option<BigInt>, FieldError> {
        if x.num.is_zero() {
            return Err(FieldError::ZeroInput);
        }
        Ok(Some(match v {
            FqPlace::Infinity => BigInt::from(-x.deg()),
            FqPlace::Poly(pi) => ord_at_poly(x, pi),
        }))
    }

    fn factor(&self) -> Result<(FqUnit, Vec<(FqPlace, BigInt)>), FieldError> {
        if self.num.is_zero() {
            return Err(FieldError::ZeroInput);
        }
        let (unit, num_f) = self.num.factor()?;
        let (_, den_f) = self.den.factor()?; // monic: unit 1
        let mut merged: Vec<(FqPoly, BigInt)> = num_f;
        for (pi, e) in den_f {
            match merged.iter_mut().find(|(q, _)| *q == pi) {
                Some((_, me)) => *me -= e,
                None => merged.push((pi, -e)),
            }
        }
        merged.retain(|(_, e)| !e.is_zero());
        merged.sort_by(|a, b| {
            a.0.degree()
                .cmp(&b.0.degree())
                .then_with(|| a.0.coeffs().cmp(b.0.coeffs()))
        });
        Ok((
            FqUnit {
                p: self.prime(),
                value: unit,
            },
            merged
                .into_iter()
                .map(|(pi, e)| (FqPlace::Poly(pi), e))
                .collect(),
        ))
    }

    fn unit_one() -> FqUnit {
        FqUnit { p: 0, value: 1 }
    }

    fn unit_mul(a: &FqUnit, b: &FqUnit) -> FqUnit {
        let p = if a.p == 0 { b.p } else { a.p };
        if p == 0 {
            return FqUnit { p, value: 1 };
        }
        FqUnit {
            p,
            value: ((a.value as u128 * b.value as u128) % p as u128) as u64,
        }
    }

    fn unit_pow(u: &FqUnit, e: &BigInt) -> FqUnit {
        if u.p == 0 || u.value == 1 {
            return u.clone();
        }
        // exponent reduces mod the unit-group order p-1
        let order = BigInt::from(u.p - 1);
        let r = e.mod_floor(&order).to_u64().unwrap();
        let mut out = 1u64;
        let mut acc = u.value;
        let mut k = r;
        while k > 0 {
            if k & 1 == 1 {
                out = ((out as u128 * acc as u128) % u.p as u128) as u64;
            }
            acc = ((acc as u128 * acc as u128) % u.p as u128) as u64;
            k >>= 1;
        }
        FqUnit { p: u.p, value: out }
    }

    fn unit_inverse(u: &FqUnit) -> FqUnit {
        if u.p == 0 || u.value == 1 {
            return u.clone();
        }
        FqUnit {
            p: u.p,
            value: inv_mod(u.value, u.p),
        }
    }

    fn unit_to_element(u: &FqUnit) -> Self {
        if u.p == 0 {
            FqRatFunc::constant(2, 1)
        } else {
            FqRatFunc::constant(u.p, u.value)
        }
    }

    fn from_factors(
        unit: &FqUnit,
        factors: &[(FqPlace, BigInt)],
        budget: &Budget,
    ) -> Result<Self, EngineError> {
        let p = factors
            .iter()
            .find_map(|(v, _)| match v {
                FqPlace::Poly(pi) => Some(pi.p),
                FqPlace::Infinity => None,
            })
            .unwrap_or(if unit.p == 0 { 2 } else { unit.p });
        let mut est_deg: u64 = 0;
        for (v, e) in factors {
            if let FqPlace::Poly(pi) = v {
                est_deg = est_deg.saturating_add(
                    (pi.degree() as u64)
                        .saturating_mul(e.magnitude().to_u64().unwrap_or(u64::MAX)),
                );
            }
        }
        if est_deg > budget.max_degree {
            return Err(EngineError::Overflow(
                "factored rational function too large to expand".into(),
            ));
        }
        let mut num = FqPoly::one(p);
        let mut den = FqPoly::one(p);
        for (v, e) in factors {
            let pi = match v {
                FqPlace::Poly(pi) => pi,
                FqPlace::Infinity => continue,
            };
            let mag = e
                .magnitude()
                .to_u64()
                .ok_or_else(|| EngineError::Overflow("exponent exceeds expansion range".into()))?;
            for _ in 0..mag {
                if e.sign() == num_bigint::Sign::Minus {
                    den = den.mul(pi);
                } else {
                    num = num.mul(pi);
                }
            }
        }
        if unit.p != 0 {
            num = num.scale(unit.value);
        }
        FqRatFunc::new(num, den).map_err(EngineError::Field)
    }

    fn weil_height(coords: &[Self]) -> Height {
        // Function-field analogue of the primitive representative: clear
        // denominators with the monic lcm D, then h = max(deg a_i, deg D).
        let p = coords
            .iter()
            .find(|x| !x.num.is_zero())
            .map(|x| x.prime())
            .unwrap_or(2);
        let mut d = FqPoly::one(p);
        for x in coords {
            if x.num.is_zero() {
                continue;
            }
            let g = d.gcd(&x.den);
            d = d.div_rem(&g).0.mul(&x.den);
        }
        let mut best = d.degree();
        for x in coords {
            if x.num.is_zero() {
                continue;
            }
            let a = x.num.mul(&d.div_rem(&x.den).0);
            best = best.max(a.degree());
        }
        Height {
            log_value: best as f64,
            exact: Some(HeightExact::Integer(BigInt::from(best))),
        }
    }

    fn product_formula(x: &Self) -> Result<ProductFormulaReport<FqPlace>, FieldError> {
        if x.num.is_zero() {
            return Err(FieldError::ZeroInput);
        }
        let (_, factors) = <Self as ValuedField>::factor(x)?;
        // sum over finite places of deg(pi) * ord_pi(x) must equal deg(x)
        let mut total = BigInt::zero();
        for (v, e) in &factors {
            if let FqPlace::Poly(pi) = v {
                total += BigInt::from(pi.degree()) * e;
            }
        }
        let holds = total == BigInt::from(x.deg());
        Ok(ProductFormulaReport {
            ords: factors,
            infinite_contribution: x.deg() as f64,
            holds,
        })
    }
}

/// A unit of F_p(t): a nonzero scalar. `p == 0` encodes the neutral unit
/// of an as-yet-unknown field (only produced by `unit_one`).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FqUnit {
    pub p: u64,
    pub value: u64,
}

impl fmt::Display for FqUnit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{relevant_places, weil_height};

    fn ctx2() -> FieldCtx {
        FieldCtx::FunctionField { p: 2 }
    }

    fn rf(s: &str) -> FqRatFunc {
        FqRatFunc::parse(s, &ctx2()).unwrap()
    }

    #[test]
    fn parse_and_display_roundtrip() {
        for s in ["t^2+t+1/t+1", "t", "1", "t^3+t+1"] {
            let x = rf(s);
            assert_eq!(x.to_string(), s);
        }
        // reducible fractions come out in lowest terms with monic denominator
        assert_eq!(rf("t^2+1/t+1").to_string(), "t+1");
    }

    #[test]
    fn abs_log_at_t_of_inverse_t() {
        // ord_t(1/t) = -1, deg t = 1, so log|1/t|_t = +1
        let x = rf("1/t");
        let v = FqPlace::Poly(FqPoly::t(2));
        let l = <FqRatFunc as ValuedField>::abs_log(&v, &x).unwrap();
        assert_eq!(l.value, 1.0);
        assert_eq!(
            l.exact,
            Some(ExactOrd::PolyPlace {
                weight: 1,
                ord: (-1).into()
            })
        );
    }

    #[test]
    fn relevant_places_of_t_over_t_plus_one() {
        let places = relevant_places(&[rf("t/t+1")]).unwrap();
        let names: Vec<String> = places.iter().map(|v| v.to_string()).collect();
        assert_eq!(names, vec!["inf", "poly:t", "poly:t+1"]);
    }

    #[test]
    fn height_of_t_and_inverse_t() {
        let h = weil_height(&[rf("t"), rf("1/t")]);
        assert_eq!(h.log_value, 2.0);
        assert_eq!(h.exact, Some(HeightExact::Integer(2.into())));
    }

    #[test]
    fn product_formula_t2_over_t_plus_1() {
        let r = <FqRatFunc as ValuedField>::product_formula(&rf("t^2/t+1")).unwrap();
        assert!(r.holds);
        assert_eq!(r.infinite_contribution, 1.0);
        assert_eq!(r.ords.len(), 2);
    }

    #[test]
    fn irreducibility_over_f2() {
        assert!(FqPoly::parse("t^2+t+1", 2).unwrap().is_irreducible().unwrap());
        assert!(!FqPoly::parse("t^2+1", 2).unwrap().is_irreducible().unwrap());
        assert!(FqPoly::parse("t^3+t+1", 2).unwrap().is_irreducible().unwrap());
    }

    #[test]
    fn factor_over_f2() {
        // t^2+1 = (t+1)^2 over F_2
        let (unit, f) = FqPoly::parse("t^2+1", 2).unwrap().factor().unwrap();
        assert_eq!(unit, 1);
        assert_eq!(f.len(), 1);
        assert_eq!(f[0].0.to_string(), "t+1");
        assert_eq!(f[0].1, BigInt::from(2));
    }

    #[test]
    fn frobenius_spreads_coefficients() {
        let x = rf("t+1");
        let y = x.frobenius_pow(1);
        assert_eq!(y.to_string(), "t^2+1");
    }
}

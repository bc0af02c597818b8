//! Normalized places, absolute values and Weil heights over the two base
//! fields of the crate: the rationals and rational function fields over a
//! prime field.
//!
//! Normalizations: over the rationals the finite place at a prime p has
//! |p| = 1/p and the archimedean place is the usual absolute value. Over
//! F_q(t) the place at a monic irreducible pi contributes
//! log|x| = -deg(pi) * ord_pi(x), and the infinite place contributes
//! log|x| = deg(x) = deg(num) - deg(den); with these degree weights the
//! product formula holds exactly in integer arithmetic.

pub mod ratfunc;
pub mod rational;

use std::collections::BTreeSet;
use std::fmt::{Debug, Display};
use std::hash::Hash;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::budget::Budget;
use crate::error::{EngineError, FieldError};
use crate::util::ln_big;

/// Context needed to parse field elements from strings.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FieldCtx {
    /// The rationals.
    Rationals,
    /// A rational function field over the prime field with p elements.
    FunctionField { p: u64 },
}

/// Exact integer backing of a non-archimedean log-absolute value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExactOrd {
    /// log|x|_p = -ord * ln(p) over the rationals.
    Prime { p: BigInt, ord: BigInt },
    /// log|x|_v = -ord * weight over a function field; `weight` is deg(pi)
    /// at a finite place and 1 at the infinite place (where ord = -deg).
    PolyPlace { weight: u64, ord: BigInt },
}

impl ExactOrd {
    pub fn value(&self) -> f64 {
        match self {
            ExactOrd::Prime { p, ord } => -ord.to_f64().unwrap_or(f64::NAN) * ln_big(p),
            ExactOrd::PolyPlace { weight, ord } => {
                -ord.to_f64().unwrap_or(f64::NAN) * (*weight as f64)
            }
        }
    }
}

/// log|x|_v with its exact integer backing at non-archimedean places.
#[derive(Debug, Clone, PartialEq)]
pub struct LogAbs {
    pub value: f64,
    pub exact: Option<ExactOrd>,
}

impl LogAbs {
    pub fn archimedean(value: f64) -> Self {
        LogAbs { value, exact: None }
    }

    pub fn from_exact(exact: ExactOrd) -> Self {
        LogAbs {
            value: exact.value(),
            exact: Some(exact),
        }
    }
}

/// Exact backing of a Weil height.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum HeightExact {
    /// h = ln(r) for an exact rational r >= 1 (rationals: r is the maximum
    /// coordinate of the primitive integer representative).
    LogRational(BigRational),
    /// h = n exactly (function fields: degree bookkeeping is integral).
    Integer(BigInt),
}

/// A Weil height: a real value together with exact backing when available.
#[derive(Debug, Clone, PartialEq)]
pub struct Height {
    pub log_value: f64,
    pub exact: Option<HeightExact>,
}

impl Height {
    pub fn zero() -> Self {
        Height {
            log_value: 0.0,
            exact: Some(HeightExact::Integer(BigInt::zero())),
        }
    }

    /// Exact equality when both sides carry exact backing of the same kind.
    pub fn eq_exact(&self, other: &Height) -> Option<bool> {
        match (&self.exact, &other.exact) {
            (Some(HeightExact::LogRational(a)), Some(HeightExact::LogRational(b))) => {
                Some(a == b)
            }
            (Some(HeightExact::Integer(a)), Some(HeightExact::Integer(b))) => Some(a == b),
            _ => None,
        }
    }
}

/// Outcome of an exact product-formula verification for one element.
#[derive(Debug, Clone)]
pub struct ProductFormulaReport<P> {
    /// ord_v(x) at each finite place in the support.
    pub ords: Vec<(P, BigInt)>,
    /// Contribution of the archimedean/infinite place (natural-log units).
    pub infinite_contribution: f64,
    /// Whether the formula was verified exactly.
    pub holds: bool,
}

/// A field with a normalized set of places, exact factorization over its
/// finite places, and Weil-height machinery. Implemented by `BigRational`
/// and by [`ratfunc::FqRatFunc`].
pub trait ValuedField:
    Clone
    + PartialEq
    + Eq
    + Hash
    + Debug
    + Display
    + Sized
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    /// A normalized place. Ordered with the archimedean/infinite place
    /// first, then finite places by numeric or lexicographic key.
    type Place: Clone + PartialEq + Eq + PartialOrd + Ord + Hash + Debug + Display;
    /// The unit part of a factorization: a sign over the rationals, a
    /// nonzero scalar of the coefficient field over function fields.
    type Unit: Clone + PartialEq + Eq + Hash + Debug + Display;

    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn is_one(&self) -> bool;
    fn try_inverse(&self) -> Option<Self>;
    /// x^e with an overflow guard; errors on 0^e for e < 0.
    fn int_pow(&self, e: i64, budget: &Budget) -> Result<Self, EngineError>;
    /// 0 for the rationals, p for a function field over F_p.
    fn characteristic(&self) -> u64;
    fn same_field(&self, other: &Self) -> bool;
    fn parse(s: &str, ctx: &FieldCtx) -> Result<Self, FieldError>;
    /// Approximate decimal-digit size, used by the overflow guard.
    fn size_digits(&self) -> u64;

    fn infinite_place() -> Self::Place;
    fn is_finite_place(v: &Self::Place) -> bool;
    fn parse_place(s: &str, ctx: &FieldCtx) -> Result<Self::Place, FieldError>;
    /// Short label of a finite place for factored rendering ("2", "t+1").
    fn place_label(v: &Self::Place) -> String;
    /// ln(p) at a finite rational place, deg(pi) at a finite function-field
    /// place, 1 at the function-field infinite place, NaN at the
    /// archimedean place (no discrete normalizer there).
    fn place_weight_log(v: &Self::Place) -> f64;
    fn abs_log(v: &Self::Place, x: &Self) -> Result<LogAbs, FieldError>;
    /// Exact ord at a place: `Ok(None)` at the archimedean place,
    /// `Ok(Some(ord))` elsewhere (the infinite function-field place uses
    /// ord = -deg). Errors on zero input.
    fn ord_at(v: &Self::Place, x: &Self) -> Result<Option<BigInt>, FieldError>;

    /// Factor a nonzero element over its finite places: x = unit * prod v^e.
    fn factor(&self) -> Result<(Self::Unit, Vec<(Self::Place, BigInt)>), FieldError>;
    fn unit_one() -> Self::Unit;
    fn unit_mul(a: &Self::Unit, b: &Self::Unit) -> Self::Unit;
    fn unit_pow(u: &Self::Unit, e: &BigInt) -> Self::Unit;
    fn unit_inverse(u: &Self::Unit) -> Self::Unit;
    fn unit_to_element(u: &Self::Unit) -> Self;
    /// Expand a factored element back to a field element, guarded.
    fn from_factors(
        unit: &Self::Unit,
        factors: &[(Self::Place, BigInt)],
        budget: &Budget,
    ) -> Result<Self, EngineError>;

    /// Weil height of a coordinate tuple (zeros allowed).
    fn weil_height(coords: &[Self]) -> Height;
    /// Exact product-formula verification for a nonzero element.
    fn product_formula(x: &Self) -> Result<ProductFormulaReport<Self::Place>, FieldError>;
}

/// The finite places where some input is a non-unit, plus the
/// archimedean/infinite place. For every place outside the returned set,
/// every input has absolute value exactly 1.
pub fn relevant_places<K: ValuedField>(xs: &[K]) -> Result<BTreeSet<K::Place>, FieldError> {
    let mut out = BTreeSet::new();
    out.insert(K::infinite_place());
    for x in xs {
        if x.is_zero() {
            return Err(FieldError::ZeroInput);
        }
        for (v, e) in x.factor()?.1 {
            if !e.is_zero() {
                out.insert(v);
            }
        }
    }
    Ok(out)
}

/// log of the sup-norm max_i |x_i|_v. Zero coordinates are excluded from
/// the max; the all-zero tuple returns -inf as a sentinel.
pub fn coordinate_norm_log<K: ValuedField>(v: &K::Place, point: &[K]) -> f64 {
    let mut best = f64::NEG_INFINITY;
    for x in point {
        if x.is_zero() {
            continue;
        }
        // abs_log only fails on zero input, which is excluded here.
        let l = K::abs_log(v, x).expect("nonzero coordinate").value;
        if l > best {
            best = l;
        }
    }
    best
}

/// Exact ord-based variant of [`coordinate_norm_log`] at a non-archimedean
/// place: the minimum ord over nonzero coordinates (`None` for all-zero).
pub fn coordinate_min_ord<K: ValuedField>(
    v: &K::Place,
    point: &[K],
) -> Result<Option<BigInt>, FieldError> {
    let mut best: Option<BigInt> = None;
    for x in point {
        if x.is_zero() {
            continue;
        }
        if let Some(o) = K::ord_at(v, x)? {
            best = Some(match best {
                None => o,
                Some(b) => b.min(o),
            });
        }
    }
    Ok(best)
}

/// Weil height h(p) = sum_v log+ ||p||_v of a coordinate tuple.
pub fn weil_height<K: ValuedField>(point: &[K]) -> Height {
    K::weil_height(point)
}

/// Verify the product formula for a nonzero element, exactly.
pub fn product_formula_check<K: ValuedField>(
    x: &K,
) -> Result<ProductFormulaReport<K::Place>, FieldError> {
    K::product_formula(x)
}

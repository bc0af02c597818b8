//! The group of pseudo-monomial automorphisms of the 2-torus:
//! f(x,y) = (alpha x^a y^b, beta x^c y^d) with (a b; c d) in GL_2(Z),
//! written additively as f(p) = M p + b. Composition, inversion, dynamical
//! degree, loxodromy, and an exact factored-coordinate orbit engine that
//! keeps orbit points as unit * product-of-prime-powers so that windows of
//! hundreds of steps stay exact (plain coordinates would need more digits
//! than the observable universe has atoms).

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::budget::Budget;
use crate::error::{EngineError, FieldError};
use crate::field::{Height, ValuedField};
use crate::quadratic::QuadraticNumber;

/// A 2x2 integer matrix with determinant +1 or -1.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GlzMatrix {
    pub a: BigInt,
    pub b: BigInt,
    pub c: BigInt,
    pub d: BigInt,
}

impl GlzMatrix {
    pub fn new(a: BigInt, b: BigInt, c: BigInt, d: BigInt) -> Result<Self, EngineError> {
        let m = GlzMatrix { a, b, c, d };
        let det = m.det_big();
        if det.magnitude().to_u32() != Some(1) {
            return Err(EngineError::Invalid(format!(
                "matrix determinant {det} is not +1 or -1"
            )));
        }
        Ok(m)
    }

    pub fn from_i64(m: [[i64; 2]; 2]) -> Result<Self, EngineError> {
        GlzMatrix::new(
            BigInt::from(m[0][0]),
            BigInt::from(m[0][1]),
            BigInt::from(m[1][0]),
            BigInt::from(m[1][1]),
        )
    }

    pub fn identity() -> Self {
        GlzMatrix {
            a: BigInt::one(),
            b: BigInt::zero(),
            c: BigInt::zero(),
            d: BigInt::one(),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.a.is_one() && self.b.is_zero() && self.c.is_zero() && self.d.is_one()
    }

    fn det_big(&self) -> BigInt {
        &self.a * &self.d - &self.b * &self.c
    }

    /// Determinant, +1 or -1.
    pub fn det(&self) -> i8 {
        if self.det_big().is_positive() {
            1
        } else {
            -1
        }
    }

    pub fn trace(&self) -> BigInt {
        &self.a + &self.d
    }

    pub fn mul(&self, other: &GlzMatrix) -> GlzMatrix {
        GlzMatrix {
            a: &self.a * &other.a + &self.b * &other.c,
            b: &self.a * &other.b + &self.b * &other.d,
            c: &self.c * &other.a + &self.d * &other.c,
            d: &self.c * &other.b + &self.d * &other.d,
        }
    }

    pub fn inverse(&self) -> GlzMatrix {
        let det = BigInt::from(self.det());
        GlzMatrix {
            a: &self.d * &det,
            b: -&self.b * &det,
            c: -&self.c * &det,
            d: &self.a * &det,
        }
    }

    pub fn pow(&self, n: i64) -> GlzMatrix {
        let base = if n < 0 { self.inverse() } else { self.clone() };
        let mut out = GlzMatrix::identity();
        let mut acc = base;
        let mut k = n.unsigned_abs();
        while k > 0 {
            if k & 1 == 1 {
                out = out.mul(&acc);
            }
            acc = acc.mul(&acc);
            k >>= 1;
        }
        out
    }

    /// Apply to an integer column vector.
    pub fn apply_vec(&self, v: &(BigInt, BigInt)) -> (BigInt, BigInt) {
        (
            &self.a * &v.0 + &self.b * &v.1,
            &self.c * &v.0 + &self.d * &v.1,
        )
    }

    /// Spectral radius > 1, decided exactly: for det = +1 this is
    /// |trace| > 2, for det = -1 it is trace != 0.
    pub fn is_loxodromic(&self) -> bool {
        match self.det() {
            1 => self.trace().magnitude() > BigInt::from(2).magnitude().clone(),
            _ => !self.trace().is_zero(),
        }
    }

    /// trace^2 - 4 det; positive for loxodromic matrices and never a
    /// perfect square there, so the spectral radius is a genuine quadratic
    /// irrational.
    pub fn discriminant(&self) -> BigInt {
        let t = self.trace();
        &t * &t - BigInt::from(4 * self.det() as i64)
    }

    /// The eigenvalue of largest modulus, as an exact quadratic number
    /// (requires loxodromy). Negative when the trace is negative.
    pub fn perron_eigenvalue(&self) -> Result<QuadraticNumber, EngineError> {
        if !self.is_loxodromic() {
            return Err(EngineError::NotLoxodromic);
        }
        let t = BigRational::from_integer(self.trace());
        let half = BigRational::new(BigInt::one(), BigInt::from(2));
        let root = QuadraticNumber::sqrt_of(&self.discriminant());
        let tq = QuadraticNumber::from_rational(&t * &half);
        let rq = root.scale(&half);
        Ok(if self.trace().is_negative() {
            tq - rq
        } else {
            tq + rq
        })
    }

    /// The other eigenvalue, det / perron.
    pub fn small_eigenvalue(&self) -> Result<QuadraticNumber, EngineError> {
        let perron = self.perron_eigenvalue()?;
        Ok(QuadraticNumber::from_int(self.det() as i64) * perron.inverse().unwrap())
    }
}

impl fmt::Display for GlzMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{},{}],[{},{}]]", self.a, self.b, self.c, self.d)
    }
}

/// Exact characteristic data of a dynamical degree lambda = rho(M).
#[derive(Debug, Clone)]
pub struct DynamicalDegree {
    pub value: f64,
    pub trace: BigInt,
    pub det: i8,
    pub discriminant: BigInt,
    /// lambda as an exact quadratic number, (|T| + sqrt(T^2 - 4 det))/2,
    /// or 1 when the matrix is not loxodromic.
    pub exact: QuadraticNumber,
}

/// A point of the 2-torus: both coordinates nonzero.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TorusPoint<K: ValuedField> {
    pub x: K,
    pub y: K,
}

impl<K: ValuedField> TorusPoint<K> {
    pub fn new(x: K, y: K) -> Result<Self, EngineError> {
        if x.is_zero() || y.is_zero() {
            return Err(EngineError::Field(FieldError::ZeroInput));
        }
        if !x.same_field(&y) {
            return Err(EngineError::MixedSystems);
        }
        Ok(TorusPoint { x, y })
    }

    pub fn coords(&self) -> [K; 2] {
        [self.x.clone(), self.y.clone()]
    }
}

impl<K: ValuedField> fmt::Display for TorusPoint<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}", self.x, self.y)
    }
}

/// f(x,y) = (alpha x^a y^b, beta x^c y^d): a GL_2(Z) matrix plus a
/// translation b_f = (alpha, beta) in the torus.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PseudoMonomialMap<K: ValuedField> {
    pub matrix: GlzMatrix,
    pub translation: TorusPoint<K>,
}

/// (x^a y^b, x^c y^d) with exact arithmetic, negative entries via inverses.
pub fn monomial_apply<K: ValuedField>(
    m: &GlzMatrix,
    p: &TorusPoint<K>,
    budget: &Budget,
) -> Result<TorusPoint<K>, EngineError> {
    let e = |v: &BigInt| -> Result<i64, EngineError> {
        v.to_i64()
            .ok_or_else(|| EngineError::Overflow("matrix entry exceeds i64 in plain apply".into()))
    };
    let x = p.x.int_pow(e(&m.a)?, budget)? * p.y.int_pow(e(&m.b)?, budget)?;
    let y = p.x.int_pow(e(&m.c)?, budget)? * p.y.int_pow(e(&m.d)?, budget)?;
    TorusPoint::new(x, y)
}

impl<K: ValuedField> PseudoMonomialMap<K> {
    pub fn new(matrix: GlzMatrix, translation: TorusPoint<K>) -> Self {
        PseudoMonomialMap {
            matrix,
            translation,
        }
    }

    /// f(p) = M p + b in additive notation.
    pub fn apply(&self, p: &TorusPoint<K>, budget: &Budget) -> Result<TorusPoint<K>, EngineError> {
        if !self.translation.x.same_field(&p.x) {
            return Err(EngineError::MixedSystems);
        }
        let mp = monomial_apply(&self.matrix, p, budget)?;
        let out = TorusPoint::new(
            mp.x * self.translation.x.clone(),
            mp.y * self.translation.y.clone(),
        )?;
        let digits = out.x.size_digits().max(out.y.size_digits());
        if digits > budget.max_digits {
            return Err(EngineError::Overflow(format!(
                "torus coordinate reached {digits} digits"
            )));
        }
        Ok(out)
    }

    /// f o g, with matrix M_f M_g and translation M_f(b_g) + b_f.
    pub fn compose(&self, g: &Self, budget: &Budget) -> Result<Self, EngineError> {
        if !self.translation.x.same_field(&g.translation.x) {
            return Err(EngineError::MixedSystems);
        }
        let mbg = monomial_apply(&self.matrix, &g.translation, budget)?;
        Ok(PseudoMonomialMap {
            matrix: self.matrix.mul(&g.matrix),
            translation: TorusPoint::new(
                mbg.x * self.translation.x.clone(),
                mbg.y * self.translation.y.clone(),
            )?,
        })
    }

    /// f^{-1}: matrix M^{-1}, translation the componentwise inverse of
    /// M^{-1}(b).
    pub fn inverse(&self, budget: &Budget) -> Result<Self, EngineError> {
        let minv = self.matrix.inverse();
        let mb = monomial_apply(&minv, &self.translation, budget)?;
        Ok(PseudoMonomialMap {
            matrix: minv,
            translation: TorusPoint::new(
                mb.x.try_inverse().expect("nonzero translation"),
                mb.y.try_inverse().expect("nonzero translation"),
            )?,
        })
    }

    /// f^n by binary composition (n may be negative; n = 0 is the identity).
    pub fn power(&self, n: i64, budget: &Budget) -> Result<Self, EngineError> {
        let one_x = self.translation.x.clone()
            * self.translation.x.try_inverse().expect("nonzero translation");
        let mut out = PseudoMonomialMap {
            matrix: GlzMatrix::identity(),
            translation: TorusPoint::new(one_x.clone(), one_x)?,
        };
        let base = if n < 0 {
            self.inverse(budget)?
        } else {
            self.clone()
        };
        let mut acc = base;
        let mut k = n.unsigned_abs();
        while k > 0 {
            if k & 1 == 1 {
                out = out.compose(&acc, budget)?;
            }
            k >>= 1;
            if k > 0 {
                acc = acc.compose(&acc, budget)?;
            }
        }
        Ok(out)
    }

    pub fn is_identity(&self) -> bool {
        self.matrix.is_identity()
            && self.translation.x.is_one()
            && self.translation.y.is_one()
    }

    pub fn is_loxodromic(&self) -> bool {
        self.matrix.is_loxodromic()
    }

    /// lambda(f) = rho(M_f) with its exact characteristic data.
    pub fn dynamical_degree(&self) -> DynamicalDegree {
        dynamical_degree_of(&self.matrix)
    }
}

/// Dynamical degree of a GL_2(Z) matrix.
pub fn dynamical_degree_of(m: &GlzMatrix) -> DynamicalDegree {
    let exact = if m.is_loxodromic() {
        let t_abs = BigRational::from_integer(m.trace().abs());
        let half = BigRational::new(BigInt::one(), BigInt::from(2));
        QuadraticNumber::from_rational(&t_abs * &half)
            + QuadraticNumber::sqrt_of(&m.discriminant()).scale(&half)
    } else {
        QuadraticNumber::one()
    };
    DynamicalDegree {
        value: exact.to_f64(),
        trace: m.trace(),
        det: m.det(),
        discriminant: m.discriminant(),
        exact,
    }
}

/// Tr(M^n) for n >= 1 via the exact recurrence
/// t_{n+1} = Tr(M) t_n - det(M) t_{n-1}, t_0 = 2, t_1 = Tr(M).
pub fn matrix_power_trace(m: &GlzMatrix, n: u64) -> BigInt {
    assert!(n >= 1, "matrix_power_trace needs n >= 1");
    trace_of_power(m, n as i64)
}

/// Tr(M^n) for any integer n (Tr(M^-n) = Tr(M^n) det^n).
pub fn trace_of_power(m: &GlzMatrix, n: i64) -> BigInt {
    let t = m.trace();
    let det = BigInt::from(m.det() as i64);
    let mut t_prev = BigInt::from(2); // Tr(M^0)
    let mut t_cur = t.clone(); // Tr(M^1)
    let n_abs = n.unsigned_abs();
    if n_abs == 0 {
        return t_prev;
    }
    for _ in 1..n_abs {
        let next = &t * &t_cur - &det * &t_prev;
        t_prev = t_cur;
        t_cur = next;
    }
    if n < 0 && m.det() == -1 && n_abs % 2 == 1 {
        -t_cur
    } else {
        t_cur
    }
}

// ---- factored orbit machinery ----

/// A fixed, sorted list of finite places that supports every element a
/// torus orbit can visit. Built once per instance from the map
/// translations, the starting points, and any polynomial coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactorBasis<K: ValuedField> {
    places: Vec<K::Place>,
}

impl<K: ValuedField> FactorBasis<K> {
    pub fn new(elements: &[K]) -> Result<Self, FieldError> {
        let mut places: Vec<K::Place> = Vec::new();
        for x in elements {
            if x.is_zero() {
                return Err(FieldError::ZeroInput);
            }
            for (v, e) in x.factor()?.1 {
                if !e.is_zero() && !places.contains(&v) {
                    places.push(v);
                }
            }
        }
        places.sort();
        Ok(FactorBasis { places })
    }

    pub fn places(&self) -> &[K::Place] {
        &self.places
    }

    pub fn len(&self) -> usize {
        self.places.len()
    }

    pub fn is_empty(&self) -> bool {
        self.places.is_empty()
    }

    /// Factor an element over this basis; errors if its support escapes.
    pub fn factor_into(&self, x: &K) -> Result<FactoredElement<K>, EngineError> {
        if x.is_zero() {
            return Err(EngineError::Field(FieldError::ZeroInput));
        }
        let (unit, factors) = x.factor().map_err(EngineError::Field)?;
        let mut exps = vec![BigInt::zero(); self.places.len()];
        for (v, e) in factors {
            match self.places.iter().position(|w| *w == v) {
                Some(i) => exps[i] = e,
                None => {
                    return Err(EngineError::Invalid(format!(
                        "support at place {v} escapes the factor basis"
                    )))
                }
            }
        }
        Ok(FactoredElement { unit, exps })
    }
}

/// A nonzero field element in fully factored form over a [`FactorBasis`]:
/// unit * prod places[i]^exps[i]. Exact and cheap to multiply no matter
/// how large the expanded element would be.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FactoredElement<K: ValuedField> {
    pub unit: K::Unit,
    pub exps: Vec<BigInt>,
}

impl<K: ValuedField> FactoredElement<K> {
    pub fn one(basis: &FactorBasis<K>) -> Self {
        FactoredElement {
            unit: K::unit_one(),
            exps: vec![BigInt::zero(); basis.len()],
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        debug_assert_eq!(self.exps.len(), other.exps.len());
        FactoredElement {
            unit: K::unit_mul(&self.unit, &other.unit),
            exps: self
                .exps
                .iter()
                .zip(&other.exps)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn inverse(&self) -> Self {
        FactoredElement {
            unit: K::unit_inverse(&self.unit),
            exps: self.exps.iter().map(|e| -e).collect(),
        }
    }

    pub fn pow(&self, e: &BigInt) -> Self {
        FactoredElement {
            unit: K::unit_pow(&self.unit, e),
            exps: self.exps.iter().map(|x| x * e).collect(),
        }
    }

    pub fn expand(&self, basis: &FactorBasis<K>, budget: &Budget) -> Result<K, EngineError> {
        let factors: Vec<(K::Place, BigInt)> = basis
            .places
            .iter()
            .cloned()
            .zip(self.exps.iter().cloned())
            .collect();
        K::from_factors(&self.unit, &factors, budget)
    }

    /// log|.| at the archimedean / infinite place (sum of exps * weights).
    pub fn infinite_log(&self, basis: &FactorBasis<K>) -> f64 {
        self.exps
            .iter()
            .zip(&basis.places)
            .map(|(e, v)| e.to_f64().unwrap_or(f64::NAN) * K::place_weight_log(v))
            .sum()
    }

    pub fn display(&self, basis: &FactorBasis<K>) -> String {
        let mut parts: Vec<String> = Vec::new();
        let unit = K::unit_to_element(&self.unit);
        if !unit.is_one() || self.exps.iter().all(|e| e.is_zero()) {
            parts.push(format!("{unit}"));
        }
        for (e, v) in self.exps.iter().zip(&basis.places) {
            if !e.is_zero() {
                parts.push(format!("({})^{}", K::place_label(v), e));
            }
        }
        parts.join("*")
    }
}

/// A torus point in factored coordinates, carrying its basis.
#[derive(Debug, Clone)]
pub struct FactoredPoint<K: ValuedField> {
    pub basis: Arc<FactorBasis<K>>,
    pub x: FactoredElement<K>,
    pub y: FactoredElement<K>,
}

impl<K: ValuedField> PartialEq for FactoredPoint<K> {
    fn eq(&self, other: &Self) -> bool {
        debug_assert_eq!(self.basis, other.basis, "points from different bases");
        self.x == other.x && self.y == other.y
    }
}

impl<K: ValuedField> Eq for FactoredPoint<K> {}

impl<K: ValuedField> std::hash::Hash for FactoredPoint<K> {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.x.hash(state);
        self.y.hash(state);
    }
}

impl<K: ValuedField> fmt::Display for FactoredPoint<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // expand when affordable, else show the exact factored form
        let small = Budget {
            max_digits: 64,
            max_degree: 64,
            max_window: 1,
        };
        match (
            self.x.expand(&self.basis, &small),
            self.y.expand(&self.basis, &small),
        ) {
            (Ok(x), Ok(y)) => write!(f, "{},{}", x, y),
            _ => write!(
                f,
                "{},{}",
                self.x.display(&self.basis),
                self.y.display(&self.basis)
            ),
        }
    }
}

impl<K: ValuedField> FactoredPoint<K> {
    /// Weil height read off the exponent vectors: finite places contribute
    /// weight * max(0, -min(ord_x, ord_y)); the infinite place contributes
    /// log+ max(|x|, |y|).
    pub fn height(&self) -> f64 {
        let mut h = 0.0;
        for (i, v) in self.basis.places.iter().enumerate() {
            let min_ord = (&self.x.exps[i]).min(&self.y.exps[i]);
            if min_ord.is_negative() {
                h += (-min_ord).to_f64().unwrap_or(f64::NAN) * K::place_weight_log(v);
            }
        }
        let inf = self
            .x
            .infinite_log(&self.basis)
            .max(self.y.infinite_log(&self.basis));
        h + inf.max(0.0)
    }

    pub fn expand(&self, budget: &Budget) -> Result<TorusPoint<K>, EngineError> {
        TorusPoint::new(
            self.x.expand(&self.basis, budget)?,
            self.y.expand(&self.basis, budget)?,
        )
    }

    /// Exact (ord_x, ord_y) at basis place i.
    pub fn ord_pair(&self, i: usize) -> (BigInt, BigInt) {
        (self.x.exps[i].clone(), self.y.exps[i].clone())
    }
}

/// Precomputed factored data of one map direction.
#[derive(Debug, Clone)]
struct FactoredMapData<K: ValuedField> {
    matrix: GlzMatrix,
    tx: FactoredElement<K>,
    ty: FactoredElement<K>,
}

impl<K: ValuedField> FactoredMapData<K> {
    fn step(&self, p: &FactoredPoint<K>) -> FactoredPoint<K> {
        let m = &self.matrix;
        let x = p.x.pow(&m.a).mul(&p.y.pow(&m.b)).mul(&self.tx);
        let y = p.x.pow(&m.c).mul(&p.y.pow(&m.d)).mul(&self.ty);
        FactoredPoint {
            basis: p.basis.clone(),
            x,
            y,
        }
    }
}

/// A pseudo-monomial map prepared for exact orbit iteration over a fixed
/// factor basis (both directions precomputed).
#[derive(Debug, Clone)]
pub struct TorusSystem<K: ValuedField> {
    map: PseudoMonomialMap<K>,
    basis: Arc<FactorBasis<K>>,
    fwd: FactoredMapData<K>,
    bwd: FactoredMapData<K>,
}

impl<K: ValuedField> TorusSystem<K> {
    /// Build a system whose basis also covers `extras` (start points,
    /// polynomial coefficients, the other map of a pair).
    pub fn new(map: &PseudoMonomialMap<K>, extras: &[K]) -> Result<Self, EngineError> {
        let mut elems = vec![map.translation.x.clone(), map.translation.y.clone()];
        elems.extend_from_slice(extras);
        let basis = Arc::new(FactorBasis::new(&elems).map_err(EngineError::Field)?);
        Self::with_basis(map, basis)
    }

    /// Build two systems over one shared basis, so that their factored
    /// points are directly comparable (hash-joins across the pair).
    pub fn new_pair(
        f: &PseudoMonomialMap<K>,
        g: &PseudoMonomialMap<K>,
        extras: &[K],
    ) -> Result<(Self, Self), EngineError> {
        let mut elems = vec![
            f.translation.x.clone(),
            f.translation.y.clone(),
            g.translation.x.clone(),
            g.translation.y.clone(),
        ];
        elems.extend_from_slice(extras);
        let basis = Arc::new(FactorBasis::new(&elems).map_err(EngineError::Field)?);
        Ok((
            Self::with_basis(f, basis.clone())?,
            Self::with_basis(g, basis)?,
        ))
    }

    pub fn with_basis(
        map: &PseudoMonomialMap<K>,
        basis: Arc<FactorBasis<K>>,
    ) -> Result<Self, EngineError> {
        let inv = map.inverse(&Budget::default())?;
        let fwd = FactoredMapData {
            matrix: map.matrix.clone(),
            tx: basis.factor_into(&map.translation.x)?,
            ty: basis.factor_into(&map.translation.y)?,
        };
        let bwd = FactoredMapData {
            matrix: inv.matrix.clone(),
            tx: basis.factor_into(&inv.translation.x)?,
            ty: basis.factor_into(&inv.translation.y)?,
        };
        Ok(TorusSystem {
            map: map.clone(),
            basis,
            fwd,
            bwd,
        })
    }

    pub fn map(&self) -> &PseudoMonomialMap<K> {
        &self.map
    }

    pub fn basis(&self) -> &Arc<FactorBasis<K>> {
        &self.basis
    }

    pub fn point(&self, p: &TorusPoint<K>) -> Result<FactoredPoint<K>, EngineError> {
        Ok(FactoredPoint {
            basis: self.basis.clone(),
            x: self.basis.factor_into(&p.x)?,
            y: self.basis.factor_into(&p.y)?,
        })
    }

    pub fn step_forward(&self, p: &FactoredPoint<K>) -> FactoredPoint<K> {
        self.fwd.step(p)
    }

    pub fn step_backward(&self, p: &FactoredPoint<K>) -> FactoredPoint<K> {
        self.bwd.step(p)
    }

    /// The translation of f^n in factored form: b_{f^(n+1)} = f(b_{f^n}),
    /// so iterate the map on its own translation (n != 0).
    pub fn iterate_translation(&self, n: i64) -> FactoredPoint<K> {
        assert!(n != 0);
        let (data, steps) = if n > 0 {
            (&self.fwd, n as u64)
        } else {
            (&self.bwd, (-n) as u64)
        };
        let mut p = FactoredPoint {
            basis: self.basis.clone(),
            x: data.tx.clone(),
            y: data.ty.clone(),
        };
        for _ in 1..steps {
            p = data.step(&p);
        }
        p
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldCtx;

    fn q(s: &str) -> BigRational {
        <BigRational as ValuedField>::parse(s, &FieldCtx::Rationals).unwrap()
    }

    fn point(x: &str, y: &str) -> TorusPoint<BigRational> {
        TorusPoint::new(q(x), q(y)).unwrap()
    }

    fn map(m: [[i64; 2]; 2], tx: &str, ty: &str) -> PseudoMonomialMap<BigRational> {
        PseudoMonomialMap::new(GlzMatrix::from_i64(m).unwrap(), point(tx, ty))
    }

    fn b() -> Budget {
        Budget::default()
    }

    #[test]
    fn apply_examples() {
        let f = map([[2, 1], [1, 1]], "2", "3");
        assert_eq!(f.apply(&point("1", "1"), &b()).unwrap(), point("2", "3"));
        assert_eq!(f.apply(&point("1/2", "4"), &b()).unwrap(), point("2", "6"));
        let g = map([[0, -1], [1, 0]], "1", "1");
        assert_eq!(g.apply(&point("2", "3"), &b()).unwrap(), point("1/3", "2"));
    }

    #[test]
    fn compose_examples() {
        let f = map([[2, 1], [1, 1]], "2", "3");
        let g = map([[1, 1], [1, 2]], "5", "1");
        let fg = f.compose(&g, &b()).unwrap();
        assert_eq!(fg, map([[3, 4], [2, 3]], "50", "15"));
        // identity laws
        let id = map([[1, 0], [0, 1]], "1", "1");
        assert_eq!(f.compose(&id, &b()).unwrap(), f);
        assert!(f
            .compose(&f.inverse(&b()).unwrap(), &b())
            .unwrap()
            .is_identity());
    }

    #[test]
    fn inverse_examples() {
        let f = map([[2, 1], [1, 1]], "2", "3");
        let finv = f.inverse(&b()).unwrap();
        assert_eq!(finv, map([[1, -1], [-1, 2]], "3/2", "2/9"));
        let id = map([[1, 0], [0, 1]], "1", "1");
        assert_eq!(id.inverse(&b()).unwrap(), id);
        assert_eq!(finv.inverse(&b()).unwrap(), f);
    }

    #[test]
    fn dynamical_degree_examples() {
        let f = map([[2, 1], [1, 1]], "1", "1");
        let d = f.dynamical_degree();
        assert!((d.value - (3.0 + 5f64.sqrt()) / 2.0).abs() < 1e-12);
        assert_eq!(d.trace, BigInt::from(3));
        assert_eq!(d.det, 1);
        assert_eq!(d.discriminant, BigInt::from(5));

        let id = map([[1, 0], [0, 1]], "1", "1");
        assert_eq!(id.dynamical_degree().value, 1.0);
        let par = map([[1, 1], [0, 1]], "1", "1");
        assert_eq!(par.dynamical_degree().value, 1.0);
    }

    #[test]
    fn loxodromy_examples() {
        assert!(GlzMatrix::from_i64([[2, 1], [1, 1]]).unwrap().is_loxodromic());
        assert!(!GlzMatrix::from_i64([[0, 1], [1, 0]]).unwrap().is_loxodromic());
        assert!(GlzMatrix::from_i64([[1, 1], [1, 2]]).unwrap().is_loxodromic());
        // det = -1 with nonzero trace is loxodromic (golden-ratio matrix)
        assert!(GlzMatrix::from_i64([[1, 1], [1, 0]]).unwrap().is_loxodromic());
        // loxodromy is inversion-invariant
        let m = GlzMatrix::from_i64([[2, 1], [1, 1]]).unwrap();
        assert_eq!(m.is_loxodromic(), m.inverse().is_loxodromic());
    }

    #[test]
    fn trace_recurrence_examples() {
        let m = GlzMatrix::from_i64([[2, 1], [1, 1]]).unwrap();
        assert_eq!(matrix_power_trace(&m, 1), BigInt::from(3));
        assert_eq!(matrix_power_trace(&m, 2), BigInt::from(7));
        assert_eq!(matrix_power_trace(&m, 4), BigInt::from(47));
        // against the explicit power
        for n in 1..=8 {
            assert_eq!(matrix_power_trace(&m, n), m.pow(n as i64).trace());
        }
        // negative powers, det = -1 case included
        let g = GlzMatrix::from_i64([[1, 1], [1, 0]]).unwrap();
        for n in -6..=6i64 {
            assert_eq!(trace_of_power(&g, n), g.pow(n).trace(), "n = {n}");
        }
    }

    #[test]
    fn factored_orbit_matches_plain_orbit() {
        let f = map([[2, 1], [1, 1]], "2", "3");
        let p0 = point("1", "1");
        let sys = TorusSystem::new(&f, &[q("1")]).unwrap();
        let mut fp = sys.point(&p0).unwrap();
        let mut plain = p0;
        for _ in 0..8 {
            fp = sys.step_forward(&fp);
            plain = f.apply(&plain, &b()).unwrap();
            assert_eq!(fp.expand(&b()).unwrap(), plain);
        }
        // and back again
        for _ in 0..8 {
            fp = sys.step_backward(&fp);
        }
        assert_eq!(fp.expand(&b()).unwrap(), point("1", "1"));
    }

    #[test]
    fn factored_translation_iterates() {
        let f = map([[2, 1], [1, 1]], "2", "3");
        let sys = TorusSystem::new(&f, &[]).unwrap();
        for n in 1..=5i64 {
            let fe = sys.iterate_translation(n);
            let fexp = fe.expand(&b()).unwrap();
            let fpow = f.power(n, &b()).unwrap();
            assert_eq!(fexp, fpow.translation, "n = {n}");
        }
        for n in 1..=4i64 {
            let fe = sys.iterate_translation(-n);
            let fexp = fe.expand(&b()).unwrap();
            let fpow = f.power(-n, &b()).unwrap();
            assert_eq!(fexp, fpow.translation, "n = -{n}");
        }
    }

    #[test]
    fn factored_height_matches_plain_height() {
        let f = map([[2, 1], [1, 1]], "2", "3");
        let p0 = point("1", "1");
        let sys = TorusSystem::new(&f, &[]).unwrap();
        let mut fp = sys.point(&p0).unwrap();
        let mut plain = p0;
        for _ in 0..7 {
            fp = sys.step_forward(&fp);
            plain = f.apply(&plain, &b()).unwrap();
            let exact = <BigRational as ValuedField>::weil_height(&plain.coords());
            assert!((fp.height() - exact.log_value).abs() < 1e-9);
        }
    }

    #[test]
    fn overflow_guard_fires() {
        let f = map([[2, 1], [1, 1]], "2", "3");
        let tiny = Budget {
            max_digits: 10,
            max_degree: 10,
            max_window: 100,
        };
        let mut p = point("2", "3");
        let mut hit = false;
        for _ in 0..64 {
            match f.apply(&p, &tiny) {
                Ok(next) => p = next,
                Err(EngineError::Overflow(_)) => {
                    hit = true;
                    break;
                }
                Err(e) => panic!("unexpected error {e}"),
            }
        }
        assert!(hit);
    }
}

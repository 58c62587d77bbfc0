//! Exact scalar arithmetic underpinning the derivation pipeline.
//!
//! Three layers, each exact and immutable:
//!
//! - [`Rational`] — arbitrary-precision rationals, always stored reduced with
//!   a positive denominator, serialized as `"p/q"` (integers without `"/1"`).
//! - [`RadicalElem`] — elements of the radical field ℚ(θ)/(θ^m − k), where θ
//!   denotes the *positive real* m-th root of the positive rational k.  These
//!   house the irrational constants of the asymptotic expansions (e.g. 1/√3).
//! - [`ParamPoly`] — Laurent polynomials over ℚ(θ) in the two formal scaling
//!   symbols `A = N^{1/ν}` and `B = r^{1/ν}`, which carry the parameter
//!   dependence of expansion coefficients.  `A` and `B` also denote positive
//!   real quantities; numeric evaluation (in `orbitnum`) substitutes positive
//!   real values.
//!
//! There is no floating-point arithmetic in this module; all numeric
//! evaluation lives in `orbitnum`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::{polyq, Error, Result};

/// Arbitrary-precision rational number: always reduced, denominator > 0.
///
/// Both invariants are maintained by the underlying `Ratio` type for every
/// value built through its public constructors.
pub type Rational = BigRational;

// ============================================================================
// Rational helpers
// ============================================================================

/// Builds `n/d` (reduced, positive denominator).
///
/// # Panics
/// Panics if `d == 0`.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Builds the integer rational `n`.
pub fn rat_int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Renders a rational as `"p/q"`, or `"p"` when the denominator is 1.
pub fn rat_to_string(q: &Rational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Parses `"p"` or `"p/q"` into a reduced rational.
pub fn rat_from_str(s: &str) -> Result<Rational> {
    let s = s.trim();
    let parse_int = |t: &str| -> Result<BigInt> {
        t.parse::<BigInt>()
            .map_err(|_| Error::Parse(format!("invalid integer {t:?}")))
    };
    match s.split_once('/') {
        None => Ok(Rational::from_integer(parse_int(s)?)),
        Some((p, q)) => {
            let denom = parse_int(q)?;
            if denom.is_zero() {
                return Err(Error::Parse(format!("zero denominator in {s:?}")));
            }
            Ok(Rational::new(parse_int(p)?, denom))
        }
    }
}

/// Exact binomial coefficient `C(n, k)` as a rational.
pub fn binomial(n: u64, k: u64) -> Rational {
    Rational::from_integer(num_integer::binomial(BigInt::from(n), BigInt::from(k)))
}

// ============================================================================
// Radical field ℚ(θ)/(θ^m − k)
// ============================================================================

/// The field ℚ(θ) with θ^m = k, θ the positive real m-th root of k.
///
/// Invariants: `m ≥ 1`, `k > 0`.  Elements of different fields never mix.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RadicalField {
    m: usize,
    k: Rational,
}

impl RadicalField {
    /// Creates the field ℚ(θ)/(θ^m − k).
    ///
    /// # Panics
    /// Panics if `m == 0` or `k ≤ 0` (construction-time invariant).
    pub fn new(m: usize, k: Rational) -> Self {
        assert!(m >= 1, "radical field degree must be at least 1");
        assert!(k.is_positive(), "radicand must be positive, got {k}");
        RadicalField { m, k }
    }

    /// Extension degree m.
    pub fn degree(&self) -> usize {
        self.m
    }

    /// The radicand k with θ^m = k.
    pub fn radicand(&self) -> &Rational {
        &self.k
    }

    /// Zero element of this field.
    pub fn zero(&self) -> RadicalElem {
        RadicalElem {
            field: self.clone(),
            coeffs: vec![Rational::zero(); self.m],
        }
    }

    /// Unit element of this field.
    pub fn one(&self) -> RadicalElem {
        self.from_rational(Rational::one())
    }

    /// Embeds a rational into this field.
    pub fn from_rational(&self, q: Rational) -> RadicalElem {
        let mut coeffs = vec![Rational::zero(); self.m];
        coeffs[0] = q;
        RadicalElem {
            field: self.clone(),
            coeffs,
        }
    }

    /// θ^j, reduced through θ^m = k.
    pub fn theta_pow(&self, j: u32) -> RadicalElem {
        let j = j as usize;
        let wraps = j / self.m;
        let rem = j % self.m;
        let mut coeffs = vec![Rational::zero(); self.m];
        let mut c = Rational::one();
        for _ in 0..wraps {
            c *= &self.k;
        }
        coeffs[rem] = c;
        RadicalElem {
            field: self.clone(),
            coeffs,
        }
    }

    /// Builds an element from its θ-power coefficients (length must equal m).
    pub fn from_coeffs(&self, coeffs: Vec<Rational>) -> Result<RadicalElem> {
        if coeffs.len() != self.m {
            return Err(Error::Parse(format!(
                "expected {} coefficients for degree-{} field, got {}",
                self.m,
                self.m,
                coeffs.len()
            )));
        }
        Ok(RadicalElem {
            field: self.clone(),
            coeffs,
        })
    }

    fn describe(&self) -> String {
        format!("Q(theta), theta^{} = {}", self.m, rat_to_string(&self.k))
    }
}

/// Element of a [`RadicalField`]: `coeffs[j]` multiplies θ^j, `0 ≤ j < m`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RadicalElem {
    field: RadicalField,
    coeffs: Vec<Rational>,
}

impl RadicalElem {
    /// The ambient field.
    pub fn field(&self) -> &RadicalField {
        &self.field
    }

    /// Coefficients of θ^0 … θ^{m−1}.
    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    /// True iff this is the zero element.
    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Rational::is_zero)
    }

    /// True iff this is the unit element.
    pub fn is_one(&self) -> bool {
        self.coeffs[0].is_one() && self.coeffs[1..].iter().all(Rational::is_zero)
    }

    /// Returns the rational value when every θ-power beyond θ^0 vanishes.
    pub fn as_rational(&self) -> Option<&Rational> {
        if self.coeffs[1..].iter().all(Rational::is_zero) {
            Some(&self.coeffs[0])
        } else {
            None
        }
    }

    /// Multiplies by a rational scalar.
    pub fn scale(&self, q: &Rational) -> RadicalElem {
        RadicalElem {
            field: self.field.clone(),
            coeffs: self.coeffs.iter().map(|c| c * q).collect(),
        }
    }

    /// Multiplicative inverse via the extended Euclidean algorithm in ℚ[x]
    /// modulo x^m − k.
    ///
    /// # Errors
    /// [`Error::DivisionByZero`] for the zero element; [`Error::NotInvertible`]
    /// when the element is a zero divisor (possible only if x^m − k is
    /// reducible over ℚ, which never holds for the fields this crate builds).
    pub fn inv(&self) -> Result<RadicalElem> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        // Modulus x^m − k.
        let m = self.field.m;
        let mut modulus = vec![Rational::zero(); m + 1];
        modulus[0] = -self.field.k.clone();
        modulus[m] = Rational::one();

        // Extended Euclid tracking only the Bezout coefficient of `self`.
        let mut r_prev = modulus;
        let mut r_cur = polyq::qp_trim(self.coeffs.clone());
        let mut t_prev: Vec<Rational> = vec![];
        let mut t_cur = vec![Rational::one()];
        while !r_cur.is_empty() {
            let (q, rem) = polyq::qp_divmod(&r_prev, &r_cur);
            let t_next = polyq::qp_sub(&t_prev, &polyq::qp_mul(&q, &t_cur));
            r_prev = r_cur;
            r_cur = rem;
            t_prev = t_cur;
            t_cur = t_next;
        }
        if r_prev.len() != 1 {
            return Err(Error::NotInvertible);
        }
        // gcd is the constant r_prev[0]; scale Bezout coefficient to make it 1.
        let scale = Rational::one() / &r_prev[0];
        let mut coeffs: Vec<Rational> = t_prev.iter().map(|c| c * &scale).collect();
        coeffs.resize(m, Rational::zero());
        Ok(RadicalElem {
            field: self.field.clone(),
            coeffs,
        })
    }

    fn assert_same_field(&self, other: &RadicalElem) {
        assert!(
            self.field == other.field,
            "radical field mismatch: {} vs {}",
            self.field.describe(),
            other.field.describe()
        );
    }
}

impl fmt::Display for RadicalElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (j, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match j {
                0 => write!(f, "{}", rat_to_string(c))?,
                1 => write!(f, "{}*theta", rat_to_string(c))?,
                _ => write!(f, "{}*theta^{j}", rat_to_string(c))?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

impl Add for &RadicalElem {
    type Output = RadicalElem;
    fn add(self, rhs: &RadicalElem) -> RadicalElem {
        self.assert_same_field(rhs);
        RadicalElem {
            field: self.field.clone(),
            coeffs: self
                .coeffs
                .iter()
                .zip(&rhs.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl Sub for &RadicalElem {
    type Output = RadicalElem;
    fn sub(self, rhs: &RadicalElem) -> RadicalElem {
        self.assert_same_field(rhs);
        RadicalElem {
            field: self.field.clone(),
            coeffs: self
                .coeffs
                .iter()
                .zip(&rhs.coeffs)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl Neg for &RadicalElem {
    type Output = RadicalElem;
    fn neg(self) -> RadicalElem {
        RadicalElem {
            field: self.field.clone(),
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl Mul for &RadicalElem {
    type Output = RadicalElem;
    fn mul(self, rhs: &RadicalElem) -> RadicalElem {
        self.assert_same_field(rhs);
        let m = self.field.m;
        let mut wide = vec![Rational::zero(); 2 * m - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                wide[i + j] += a * b;
            }
        }
        // Reduce θ^{m+j} = k·θ^j.
        let mut coeffs = vec![Rational::zero(); m];
        for (i, c) in wide.into_iter().enumerate() {
            if i < m {
                coeffs[i] += c;
            } else {
                coeffs[i - m] += c * &self.field.k;
            }
        }
        RadicalElem {
            field: self.field.clone(),
            coeffs,
        }
    }
}

// ============================================================================
// Laurent polynomials in the scaling symbols A, B
// ============================================================================

/// Laurent polynomial in `A = N^{1/ν}` and `B = r^{1/ν}` over a radical field.
///
/// Invariants: no stored zero coefficients; exponents may be negative.
/// Term order (and hence serialization) is the lexicographic order on
/// `(eA, eB)`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ParamPoly {
    field: RadicalField,
    terms: BTreeMap<(i64, i64), RadicalElem>,
}

impl ParamPoly {
    /// The zero polynomial.
    pub fn zero(field: &RadicalField) -> Self {
        ParamPoly {
            field: field.clone(),
            terms: BTreeMap::new(),
        }
    }

    /// The unit polynomial.
    pub fn one(field: &RadicalField) -> Self {
        Self::constant(field.one())
    }

    /// Embeds a field element as the `A^0 B^0` term.
    pub fn constant(c: RadicalElem) -> Self {
        Self::monomial(0, 0, c)
    }

    /// The single term `c · A^{e_a} B^{e_b}` (zero `c` gives the zero poly).
    pub fn monomial(e_a: i64, e_b: i64, c: RadicalElem) -> Self {
        let field = c.field().clone();
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert((e_a, e_b), c);
        }
        ParamPoly { field, terms }
    }

    /// The ambient radical field.
    pub fn field(&self) -> &RadicalField {
        &self.field
    }

    /// Iterates terms as `((eA, eB), coefficient)` in (eA, eB) order.
    pub fn terms(&self) -> impl Iterator<Item = (&(i64, i64), &RadicalElem)> {
        self.terms.iter()
    }

    /// Number of stored (nonzero) terms.
    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    /// True iff this is the zero polynomial.
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Coefficient of `A^{e_a} B^{e_b}` (zero element when absent).
    pub fn coeff(&self, e_a: i64, e_b: i64) -> RadicalElem {
        self.terms
            .get(&(e_a, e_b))
            .cloned()
            .unwrap_or_else(|| self.field.zero())
    }

    /// Returns `Some(((eA, eB), c))` iff the polynomial has exactly one term.
    pub fn as_monomial(&self) -> Option<((i64, i64), &RadicalElem)> {
        if self.terms.len() == 1 {
            let (&k, v) = self.terms.iter().next().unwrap();
            Some((k, v))
        } else {
            None
        }
    }

    /// Multiplies by the monomial `c · A^{e_a} B^{e_b}`.
    pub fn mul_monomial(&self, e_a: i64, e_b: i64, c: &RadicalElem) -> ParamPoly {
        if c.is_zero() {
            return ParamPoly::zero(&self.field);
        }
        let terms = self
            .terms
            .iter()
            .filter_map(|(&(a, b), v)| {
                let w = v * c;
                (!w.is_zero()).then_some(((a + e_a, b + e_b), w))
            })
            .collect();
        ParamPoly {
            field: self.field.clone(),
            terms,
        }
    }

    /// Multiplies every coefficient by a rational scalar.
    pub fn scale(&self, q: &Rational) -> ParamPoly {
        if q.is_zero() {
            return ParamPoly::zero(&self.field);
        }
        ParamPoly {
            field: self.field.clone(),
            terms: self
                .terms
                .iter()
                .map(|(&k, v)| (k, v.scale(q)))
                .collect(),
        }
    }

    /// Inverse of an invertible monomial: `(c·A^a B^b)^{-1} = c^{-1}·A^{-a}B^{-b}`.
    ///
    /// # Errors
    /// [`Error::NotMonomial`] when the polynomial has zero or several terms;
    /// propagates inversion failures of the coefficient.
    pub fn inv(&self) -> Result<ParamPoly> {
        let ((e_a, e_b), c) = self
            .as_monomial()
            .ok_or_else(|| Error::NotMonomial(format!("{} terms", self.terms.len())))?;
        Ok(ParamPoly::monomial(-e_a, -e_b, c.inv()?))
    }

    /// Substitutes `A = 1`, merging all A-powers at fixed B-power.
    pub fn subst_a_one(&self) -> ParamPoly {
        let mut out = ParamPoly::zero(&self.field);
        for (&(_, e_b), c) in &self.terms {
            out.add_term(0, e_b, c.clone());
        }
        out
    }

    /// Scaling degree d such that substituting `(N, r) → (σN, σ^{ν−1} r)`
    /// multiplies the polynomial by σ^d; `None` when the terms are not all of
    /// the same degree or the polynomial is zero.
    ///
    /// On a monomial `A^{eA} B^{eB}` the degree is `(eA + (ν−1)·eB)/ν`.
    pub fn scaling_degree(&self, nu: u32) -> Option<Rational> {
        let mut result: Option<Rational> = None;
        for &(e_a, e_b) in self.terms.keys() {
            let d = Rational::new(
                BigInt::from(e_a + (nu as i64 - 1) * e_b),
                BigInt::from(nu as i64),
            );
            match &result {
                None => result = Some(d),
                Some(prev) if *prev == d => {}
                Some(_) => return None,
            }
        }
        result
    }

    fn add_term(&mut self, e_a: i64, e_b: i64, c: RadicalElem) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry((e_a, e_b)) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let sum = &*e.get() + &c;
                if sum.is_zero() {
                    e.remove();
                } else {
                    e.insert(sum);
                }
            }
        }
    }

    fn assert_same_field(&self, other: &ParamPoly) {
        assert!(
            self.field == other.field,
            "radical field mismatch: {} vs {}",
            self.field.describe(),
            other.field.describe()
        );
    }
}

impl fmt::Display for ParamPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (&(e_a, e_b), c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({c})")?;
            if e_a != 0 {
                write!(f, "*A^{e_a}")?;
            }
            if e_b != 0 {
                write!(f, "*B^{e_b}")?;
            }
        }
        Ok(())
    }
}

impl Add for &ParamPoly {
    type Output = ParamPoly;
    fn add(self, rhs: &ParamPoly) -> ParamPoly {
        self.assert_same_field(rhs);
        let mut out = self.clone();
        for (&(a, b), c) in &rhs.terms {
            out.add_term(a, b, c.clone());
        }
        out
    }
}

impl Sub for &ParamPoly {
    type Output = ParamPoly;
    fn sub(self, rhs: &ParamPoly) -> ParamPoly {
        self.assert_same_field(rhs);
        let mut out = self.clone();
        for (&(a, b), c) in &rhs.terms {
            out.add_term(a, b, -c);
        }
        out
    }
}

impl Neg for &ParamPoly {
    type Output = ParamPoly;
    fn neg(self) -> ParamPoly {
        ParamPoly {
            field: self.field.clone(),
            terms: self.terms.iter().map(|(&k, v)| (k, -v)).collect(),
        }
    }
}

impl Mul for &ParamPoly {
    type Output = ParamPoly;
    fn mul(self, rhs: &ParamPoly) -> ParamPoly {
        self.assert_same_field(rhs);
        let mut out = ParamPoly::zero(&self.field);
        for (&(a1, b1), c1) in &self.terms {
            for (&(a2, b2), c2) in &rhs.terms {
                out.add_term(a1 + a2, b1 + b2, c1 * c2);
            }
        }
        out
    }
}

// ============================================================================
// JSON serialization
// ============================================================================

use serde_json::{json, Value};

/// Serializes a [`RadicalElem`] as `{"m": …, "k": "p/q", "coeffs": ["p/q", …]}`.
pub fn radical_to_json(e: &RadicalElem) -> Value {
    json!({
        "m": e.field.m,
        "k": rat_to_string(&e.field.k),
        "coeffs": e.coeffs.iter().map(rat_to_string).collect::<Vec<_>>(),
    })
}

/// Parses the JSON form produced by [`radical_to_json`].
pub fn radical_from_json(v: &Value) -> Result<RadicalElem> {
    let obj = v
        .as_object()
        .ok_or_else(|| Error::Parse("radical element must be a JSON object".into()))?;
    let m = obj
        .get("m")
        .and_then(Value::as_u64)
        .ok_or_else(|| Error::Parse("missing field degree \"m\"".into()))? as usize;
    let k = rat_from_str(
        obj.get("k")
            .and_then(Value::as_str)
            .ok_or_else(|| Error::Parse("missing radicand \"k\"".into()))?,
    )?;
    let coeffs = obj
        .get("coeffs")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::Parse("missing \"coeffs\" array".into()))?
        .iter()
        .map(|c| {
            c.as_str()
                .ok_or_else(|| Error::Parse("coefficient must be a string".into()))
                .and_then(rat_from_str)
        })
        .collect::<Result<Vec<_>>>()?;
    if m == 0 || !k.is_positive() {
        return Err(Error::Parse("invalid radical field parameters".into()));
    }
    RadicalField::new(m, k).from_coeffs(coeffs)
}

/// Serializes a [`ParamPoly`] as a list of `{"eA": …, "eB": …, "c": …}` terms
/// in (eA, eB) order.
pub fn ppoly_to_json(p: &ParamPoly) -> Value {
    Value::Array(
        p.terms
            .iter()
            .map(|(&(e_a, e_b), c)| {
                json!({ "eA": e_a, "eB": e_b, "c": radical_to_json(c) })
            })
            .collect(),
    )
}

/// Parses the JSON form produced by [`ppoly_to_json`].  The field is inferred
/// from the first term; `fallback_field` supplies it for the empty list.
pub fn ppoly_from_json(v: &Value, fallback_field: &RadicalField) -> Result<ParamPoly> {
    let arr = v
        .as_array()
        .ok_or_else(|| Error::Parse("parameter polynomial must be a JSON array".into()))?;
    let mut out = ParamPoly::zero(fallback_field);
    for term in arr {
        let obj = term
            .as_object()
            .ok_or_else(|| Error::Parse("term must be a JSON object".into()))?;
        let e_a = obj
            .get("eA")
            .and_then(Value::as_i64)
            .ok_or_else(|| Error::Parse("missing exponent \"eA\"".into()))?;
        let e_b = obj
            .get("eB")
            .and_then(Value::as_i64)
            .ok_or_else(|| Error::Parse("missing exponent \"eB\"".into()))?;
        let c = radical_from_json(
            obj.get("c")
                .ok_or_else(|| Error::Parse("missing coefficient \"c\"".into()))?,
        )?;
        if out.is_zero() && out.field != *c.field() {
            out = ParamPoly::zero(c.field());
        }
        out.add_term(e_a, e_b, c);
    }
    Ok(out)
}

// ============================================================================
// Tests
// ============================================================================

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn f23() -> RadicalField {
        RadicalField::new(2, rat_int(3))
    }

    fn f310() -> RadicalField {
        RadicalField::new(3, rat_int(10))
    }

    #[test]
    fn rational_string_round_trip() {
        assert_eq!(rat_to_string(&rat(6, 4)), "3/2");
        assert_eq!(rat_to_string(&rat(-6, 4)), "-3/2");
        assert_eq!(rat_to_string(&rat(8, 2)), "4");
        assert_eq!(rat_from_str("3/2").unwrap(), rat(3, 2));
        assert_eq!(rat_from_str("-3/2").unwrap(), rat(-3, 2));
        assert_eq!(rat_from_str("42").unwrap(), rat_int(42));
        assert_eq!(rat_from_str("6/-4").unwrap(), rat(-3, 2));
        assert!(rat_from_str("1/0").is_err());
        assert!(rat_from_str("x").is_err());
    }

    #[test]
    fn rational_invariants_hold() {
        let q = rat(6, -4);
        assert!(q.denom().is_positive());
        assert_eq!(q, rat(-3, 2));
    }

    #[test]
    fn binomial_values() {
        assert_eq!(binomial(3, 1), rat_int(3));
        assert_eq!(binomial(5, 2), rat_int(10));
        assert_eq!(binomial(13, 6), rat_int(1716));
    }

    #[test]
    fn theta_squared_is_radicand() {
        let f = f23();
        let theta = f.theta_pow(1);
        assert_eq!(&theta * &theta, f.from_rational(rat_int(3)));
    }

    #[test]
    fn difference_of_squares() {
        // (1 + θ)(1 − θ) = 1 − θ² = −2 when θ² = 3.
        let f = f23();
        let a = f.from_coeffs(vec![rat_int(1), rat_int(1)]).unwrap();
        let b = f.from_coeffs(vec![rat_int(1), rat_int(-1)]).unwrap();
        assert_eq!(&a * &b, f.from_rational(rat_int(-2)));
    }

    #[test]
    fn quartic_theta_power_wraps() {
        // θ⁴ = k·θ for m = 3, k = 10.
        let f = f310();
        let t2 = f.theta_pow(2);
        let expected = f
            .from_coeffs(vec![rat_int(0), rat_int(10), rat_int(0)])
            .unwrap();
        assert_eq!(&t2 * &t2, expected);
    }

    #[test]
    fn inverse_of_theta() {
        let f = f23();
        let theta = f.theta_pow(1);
        let inv = theta.inv().unwrap();
        assert_eq!(
            inv,
            f.from_coeffs(vec![rat_int(0), rat(1, 3)]).unwrap(),
            "1/θ = θ/3 when θ² = 3"
        );
        assert!((&theta * &inv).is_one());
    }

    #[test]
    fn inverse_of_one_plus_theta() {
        let f = f23();
        let a = f.from_coeffs(vec![rat_int(1), rat_int(1)]).unwrap();
        let inv = a.inv().unwrap();
        assert_eq!(
            inv,
            f.from_coeffs(vec![rat(-1, 2), rat(1, 2)]).unwrap(),
            "1/(1+θ) = (θ−1)/2 when θ² = 3"
        );
        assert!((&a * &inv).is_one());
    }

    #[test]
    fn inverse_of_theta_cubic() {
        let f = f310();
        let theta = f.theta_pow(1);
        let inv = theta.inv().unwrap();
        assert_eq!(
            inv,
            f.from_coeffs(vec![rat_int(0), rat_int(0), rat(1, 10)])
                .unwrap(),
            "1/θ = θ²/10 when θ³ = 10"
        );
        assert!((&theta * &inv).is_one());
    }

    #[test]
    fn zero_has_no_inverse() {
        assert!(matches!(f23().zero().inv(), Err(Error::DivisionByZero)));
    }

    #[test]
    fn ppoly_monomial_square() {
        // (θ·A⁻¹B⁻¹)² = 3·A⁻²B⁻² when θ² = 3.
        let f = f23();
        let p = ParamPoly::monomial(-1, -1, f.theta_pow(1));
        let sq = &p * &p;
        assert_eq!(sq, ParamPoly::monomial(-2, -2, f.from_rational(rat_int(3))));
    }

    #[test]
    fn ppoly_cancellation_prunes_terms() {
        let f = f23();
        let p = &ParamPoly::monomial(2, -1, f.theta_pow(1)) + &ParamPoly::one(&f);
        let zero = &p - &p;
        assert!(zero.is_zero());
        assert_eq!(zero.term_count(), 0, "cancelled terms must be pruned");
    }

    #[test]
    fn scaling_degree_of_inverse_symbols() {
        // A⁻¹B⁻¹·θ⁻¹ scales with total weight −1 under
        // (A, B) → (σ^{1/ν}A, σ^{(ν−1)/ν}B) at ν = 2.
        let f = f23();
        let p = ParamPoly::monomial(-1, -1, f.theta_pow(1).inv().unwrap());
        assert_eq!(p.scaling_degree(2), Some(rat_int(-1)));
    }

    #[test]
    fn scaling_degree_rejects_mixed_weights() {
        let f = f23();
        let p = &ParamPoly::monomial(-1, -1, f.one()) + &ParamPoly::one(&f);
        assert_eq!(p.scaling_degree(2), None);
    }

    #[test]
    fn ppoly_monomial_inverse() {
        let f = f23();
        let p = ParamPoly::monomial(3, -2, f.theta_pow(1));
        let inv = p.inv().unwrap();
        assert_eq!(&p * &inv, ParamPoly::one(&f));
        let two_terms = &p + &ParamPoly::one(&f);
        assert!(matches!(two_terms.inv(), Err(Error::NotMonomial(_))));
    }

    #[test]
    fn subst_a_one_merges_terms() {
        let f = f23();
        let p = &ParamPoly::monomial(2, -1, f.one()) + &ParamPoly::monomial(-1, -1, f.one());
        let merged = p.subst_a_one();
        assert_eq!(merged.term_count(), 1);
        assert_eq!(merged.coeff(0, -1), f.from_rational(rat_int(2)));
    }

    #[test]
    fn radical_json_round_trip() {
        let f = f310();
        let e = f
            .from_coeffs(vec![rat(1, 2), rat_int(0), rat(-7, 3)])
            .unwrap();
        let v = radical_to_json(&e);
        assert_eq!(v["m"], 3);
        assert_eq!(v["k"], "10");
        assert_eq!(radical_from_json(&v).unwrap(), e);
    }

    #[test]
    fn ppoly_json_round_trip() {
        let f = f23();
        let p = &ParamPoly::monomial(-1, -1, f.theta_pow(1)).scale(&rat(1, 3))
            + &ParamPoly::monomial(0, -2, f.from_rational(rat(-1, 6)));
        let v = ppoly_to_json(&p);
        assert_eq!(ppoly_from_json(&v, &f).unwrap(), p);
    }

    // ------------------------------------------------------------------
    // Property tests
    // ------------------------------------------------------------------

    fn arb_rational() -> impl Strategy<Value = Rational> {
        (-20i64..=20, 1i64..=12).prop_map(|(n, d)| rat(n, d))
    }

    fn arb_elem(field: RadicalField) -> impl Strategy<Value = RadicalElem> {
        let m = field.degree();
        proptest::collection::vec(arb_rational(), m)
            .prop_map(move |coeffs| field.from_coeffs(coeffs).unwrap())
    }

    fn arb_ppoly(field: RadicalField) -> impl Strategy<Value = ParamPoly> {
        proptest::collection::vec(((-3i64..=3), (-3i64..=3), arb_elem(field.clone())), 0..4)
            .prop_map(move |terms| {
                let mut p = ParamPoly::zero(&field);
                for (a, b, c) in terms {
                    p.add_term(a, b, c);
                }
                p
            })
    }

    proptest! {
        #[test]
        fn inverse_is_two_sided(e in arb_elem(f23()).prop_filter("nonzero", |e| !e.is_zero())) {
            let inv = e.inv().unwrap();
            prop_assert!((&e * &inv).is_one());
            prop_assert!((&inv * &e).is_one());
        }

        #[test]
        fn inverse_is_two_sided_cubic(e in arb_elem(f310()).prop_filter("nonzero", |e| !e.is_zero())) {
            let inv = e.inv().unwrap();
            prop_assert!((&e * &inv).is_one());
        }

        #[test]
        fn ppoly_ring_axioms(
            a in arb_ppoly(f23()),
            b in arb_ppoly(f23()),
            c in arb_ppoly(f23()),
        ) {
            // Associativity of multiplication.
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            // Distributivity over addition.
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            // Commutativity.
            prop_assert_eq!(&a * &b, &b * &a);
        }
    }
}

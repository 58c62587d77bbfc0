//! Truncated series arithmetic in the asymptotic gauge variable and in the
//! coupling.
//!
//! Two series types with explicit truncation bookkeeping:
//!
//! - [`GaugeSeries`] — sparse Laurent series on the exponent grid (1/ν)·ℤ.
//!   The formal variable `u` satisfies `u = n^{−1/ν}`, so the stored integer
//!   exponent `e` represents `n^{−e/ν}` (and `u^ν = n^{−1}`).  Coefficients
//!   are [`ParamPoly`] values; plain rationals embed as constant polynomials.
//!   Exponents never drop below −ν.
//! - [`CouplingSeries`] — dense power series in a coupling symbol with
//!   rational coefficients, used for vertex-count extraction.
//!
//! Every series carries its guaranteed truncation order; binary operations
//! propagate the resulting guaranteed order pessimistically, because
//! coefficients beyond the truncation are *undefined, not zero*.  Silent
//! order loss — trusting a coefficient that was never computed — is the
//! classic series-solver bug, and the bookkeeping here is designed to make
//! it impossible to express.

use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};
use serde_json::{json, Value};

use crate::exactnum::{ppoly_to_json, rat_int, rat_to_string, ParamPoly, RadicalField, Rational};
use crate::genfun::GenFunExpr;
use crate::{Error, Result};

/// Generalized binomial coefficient `C(q, k)` for rational `q`, computed as
/// the falling-factorial product `q(q−1)⋯(q−k+1)/k!`.
pub fn gen_binomial(q: &Rational, k: u64) -> Rational {
    let mut out = Rational::one();
    for i in 0..k {
        out *= q - rat_int(i as i64);
        out /= rat_int(i as i64 + 1);
    }
    out
}

// ============================================================================
// GaugeSeries
// ============================================================================

/// Sparse truncated Laurent series on the grid (1/ν)·ℤ.
///
/// Invariants:
/// - all stored exponents lie in `[−ν, trunc]` and at or above `low`;
/// - no stored coefficient is zero;
/// - all coefficients share one radical field;
/// - coefficients at exponents `> trunc` are undefined (unknown), while
///   coefficients in `[low, trunc]` that are absent from the map are exactly
///   zero.
#[derive(Clone, PartialEq, Debug)]
pub struct GaugeSeries {
    nu: u32,
    field: RadicalField,
    low: i64,
    trunc: i64,
    terms: BTreeMap<i64, ParamPoly>,
}

impl GaugeSeries {
    /// Series that is exactly zero through `trunc`, on window `[low, trunc]`.
    pub fn zero(nu: u32, field: &RadicalField, low: i64, trunc: i64) -> Self {
        assert!(nu >= 1, "grid denominator must be positive");
        assert!(low >= -(nu as i64), "lowest exponent below -nu");
        assert!(low <= trunc, "empty truncation window");
        GaugeSeries {
            nu,
            field: field.clone(),
            low,
            trunc,
            terms: BTreeMap::new(),
        }
    }

    /// The constant series 1, known through `trunc ≥ 0`.
    pub fn one(nu: u32, field: &RadicalField, trunc: i64) -> Self {
        let mut s = Self::zero(nu, field, 0, trunc);
        s.insert_term(0, ParamPoly::one(field));
        s
    }

    /// The single term `c·u^e`, known through `trunc`.
    pub fn monomial(nu: u32, e: i64, c: ParamPoly, trunc: i64) -> Self {
        let mut s = Self::zero(nu, c.field(), e.min(trunc), trunc);
        s.insert_term(e, c);
        s
    }

    /// Builds a series from explicit terms on the window `[low, trunc]`.
    pub fn from_terms(
        nu: u32,
        field: &RadicalField,
        low: i64,
        trunc: i64,
        terms: impl IntoIterator<Item = (i64, ParamPoly)>,
    ) -> Self {
        let mut s = Self::zero(nu, field, low, trunc);
        for (e, c) in terms {
            s.insert_term(e, c);
        }
        s
    }

    /// Grid denominator ν.
    pub fn nu(&self) -> u32 {
        self.nu
    }

    /// The coefficient field.
    pub fn field(&self) -> &RadicalField {
        &self.field
    }

    /// Window start: no terms exist below this exponent.
    pub fn low(&self) -> i64 {
        self.low
    }

    /// Truncation order: coefficients beyond it are unknown.
    pub fn trunc(&self) -> i64 {
        self.trunc
    }

    /// Lowest exponent carrying a nonzero coefficient, if any.
    pub fn effective_low(&self) -> Option<i64> {
        self.terms.keys().next().copied()
    }

    /// True iff the series is exactly zero through its truncation.
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Coefficient at exponent `e` (exact zero when absent).
    ///
    /// # Panics
    /// Panics when `e > trunc`: that coefficient was never computed.
    pub fn coeff(&self, e: i64) -> ParamPoly {
        assert!(
            e <= self.trunc,
            "coefficient at exponent {e} requested beyond truncation {}",
            self.trunc
        );
        self.terms
            .get(&e)
            .cloned()
            .unwrap_or_else(|| ParamPoly::zero(&self.field))
    }

    /// Iterates nonzero terms in increasing exponent order.
    pub fn terms(&self) -> impl Iterator<Item = (&i64, &ParamPoly)> {
        self.terms.iter()
    }

    /// Restricts knowledge to `new_trunc ≤ trunc`, dropping higher terms.
    pub fn truncate(&self, new_trunc: i64) -> Self {
        assert!(new_trunc <= self.trunc, "cannot extend knowledge by fiat");
        let mut out = self.clone();
        out.trunc = new_trunc;
        out.low = out.low.min(new_trunc);
        out.terms.retain(|&e, _| e <= new_trunc);
        out
    }

    /// Claims validity through `t` without computing anything — the absent
    /// coefficients up to `t` are asserted to be zero by the *caller*.  Only
    /// iterative solvers (Newton steps, order-by-order matching) may use
    /// this, to state what they are about to make true.
    pub(crate) fn with_claimed_trunc(&self, t: i64) -> Self {
        let mut out = self.clone();
        out.trunc = t;
        out.low = out.low.min(t);
        out.terms.retain(|&e, _| e <= t);
        out
    }

    /// Sets the coefficient at exponent `e` within the window.
    pub fn set_coeff(&mut self, e: i64, c: ParamPoly) {
        assert!(e >= self.low && e <= self.trunc, "exponent outside window");
        self.terms.remove(&e);
        self.insert_term(e, c);
    }

    /// Multiplies every coefficient by the parameter polynomial `p`
    /// (no exponent shift: `p` carries no gauge-variable dependence).
    pub fn mul_poly(&self, p: &ParamPoly) -> Self {
        let mut out = Self::zero(self.nu, &self.field, self.low, self.trunc);
        for (&e, c) in &self.terms {
            out.insert_term(e, c * p);
        }
        out
    }

    /// Multiplies every coefficient by a rational scalar.
    pub fn scale(&self, q: &Rational) -> Self {
        let mut out = Self::zero(self.nu, &self.field, self.low, self.trunc);
        for (&e, c) in &self.terms {
            out.insert_term(e, c.scale(q));
        }
        out
    }

    /// Substitutes `A = 1` in every coefficient.
    pub fn subst_a_one(&self) -> Self {
        let mut out = Self::zero(self.nu, &self.field, self.low, self.trunc);
        for (&e, c) in &self.terms {
            out.insert_term(e, c.subst_a_one());
        }
        out
    }

    /// True iff the two series agree on every exponent `≤ t`.
    pub fn agrees_with(&self, other: &GaugeSeries, t: i64) -> bool {
        assert!(t <= self.trunc && t <= other.trunc, "window beyond knowledge");
        let lo = self.low.min(other.low);
        (lo..=t).all(|e| self.coeff(e) == other.coeff(e))
    }

    fn insert_term(&mut self, e: i64, c: ParamPoly) {
        if c.is_zero() {
            return;
        }
        assert!(
            e >= -(self.nu as i64),
            "exponent {e} below the grid floor -{}",
            self.nu
        );
        assert!(
            e >= self.low && e <= self.trunc,
            "exponent {e} outside window [{}, {}]",
            self.low,
            self.trunc
        );
        assert!(
            c.field() == &self.field,
            "coefficient field differs from series field"
        );
        match self.terms.entry(e) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let sum = &*o.get() + &c;
                if sum.is_zero() {
                    o.remove();
                } else {
                    o.insert(sum);
                }
            }
        }
    }

    fn assert_compatible(&self, other: &GaugeSeries) {
        assert!(
            self.nu == other.nu,
            "gauge grid mismatch: 1/{} vs 1/{}",
            self.nu,
            other.nu
        );
        assert!(
            self.field == other.field,
            "coefficient field mismatch between series"
        );
    }

    /// Debug dump as `{"nu", "low", "trunc", "terms": [{"e", "c"}]}`.
    pub fn to_json(&self) -> Value {
        json!({
            "nu": self.nu,
            "low": self.low,
            "trunc": self.trunc,
            "terms": self.terms.iter().map(|(&e, c)| {
                json!({ "e": e, "c": ppoly_to_json(c) })
            }).collect::<Vec<_>>(),
        })
    }
}

impl Add for &GaugeSeries {
    type Output = GaugeSeries;
    fn add(self, rhs: &GaugeSeries) -> GaugeSeries {
        self.assert_compatible(rhs);
        let trunc = self.trunc.min(rhs.trunc);
        let low = self.low.min(rhs.low).min(trunc);
        let mut out = GaugeSeries::zero(self.nu, &self.field, low, trunc);
        for (&e, c) in self.terms.iter().chain(rhs.terms.iter()) {
            if e <= trunc {
                out.insert_term(e, c.clone());
            }
        }
        out
    }
}

impl Sub for &GaugeSeries {
    type Output = GaugeSeries;
    fn sub(self, rhs: &GaugeSeries) -> GaugeSeries {
        self + &(-rhs)
    }
}

impl Neg for &GaugeSeries {
    type Output = GaugeSeries;
    fn neg(self) -> GaugeSeries {
        let mut out = GaugeSeries::zero(self.nu, &self.field, self.low, self.trunc);
        for (&e, c) in &self.terms {
            out.insert_term(e, -c);
        }
        out
    }
}

/// Product with pessimistic truncation: writing `ℓ(·)` for the lowest
/// nonzero exponent (or `trunc+1` for a series that is zero through its
/// truncation), the product is guaranteed through
/// `min(trunc_a + ℓ(b), trunc_b + ℓ(a))`, because the first unknown
/// coefficient of either factor first influences that order.
///
/// # Panics
/// Panics on grid or coefficient-field mismatch.
pub fn ser_mul(a: &GaugeSeries, b: &GaugeSeries) -> GaugeSeries {
    a.assert_compatible(b);
    let ea = a.effective_low().unwrap_or(a.trunc + 1);
    let eb = b.effective_low().unwrap_or(b.trunc + 1);
    let trunc = (a.trunc + eb).min(b.trunc + ea);
    let low = (ea + eb).min(trunc).max(-(a.nu as i64));
    let mut out = GaugeSeries::zero(a.nu, &a.field, low, trunc);
    for (&e1, c1) in &a.terms {
        for (&e2, c2) in &b.terms {
            if e1 + e2 <= trunc {
                out.insert_term(e1 + e2, c1 * c2);
            }
        }
    }
    out
}

/// Integer power by repeated multiplication (`k = 0` gives 1 on `a`'s window).
pub fn ser_pow(a: &GaugeSeries, k: u32) -> GaugeSeries {
    let mut out = GaugeSeries::one(a.nu, &a.field, a.trunc.max(0));
    for _ in 0..k {
        out = ser_mul(&out, a);
    }
    out
}

/// Reciprocal series: `ser_mul(a, ser_recip(a)?) = 1` through the result's
/// truncation.  The leading coefficient must be invertible — a monomial in
/// the scaling symbols with invertible radical-field coefficient.
///
/// With leading exponent `L` and truncation `t`, the result lives on
/// `[−L, t − 2L]`.
///
/// # Errors
/// [`Error::NotInvertible`] for a series that is zero through its
/// truncation; [`Error::NotMonomial`] when the leading coefficient has
/// several terms.
pub fn ser_recip(a: &GaugeSeries) -> Result<GaugeSeries> {
    let l = a.effective_low().ok_or(Error::NotInvertible)?;
    let c0 = a.coeff(l);
    let c0_inv = c0.inv()?;
    let rel_order = a.trunc - l;
    // d₀ = c₀⁻¹;  d_e = −c₀⁻¹ · Σ_{i=1}^{e} c_i d_{e−i}   (relative exponents).
    let mut d: Vec<ParamPoly> = Vec::with_capacity(rel_order as usize + 1);
    d.push(c0_inv.clone());
    for e in 1..=rel_order {
        let mut s = ParamPoly::zero(&a.field);
        for i in 1..=e {
            let ci = a.coeff(l + i);
            if ci.is_zero() {
                continue;
            }
            s = &s + &(&ci * &d[(e - i) as usize]);
        }
        d.push(-&(&c0_inv * &s));
    }
    let mut out = GaugeSeries::zero(a.nu, &a.field, -l, a.trunc - 2 * l);
    for (i, c) in d.into_iter().enumerate() {
        out.insert_term(-l + i as u32 as i64, c);
    }
    Ok(out)
}

/// Re-expands a series in `n` as a series in `n + j`-shifted argument:
/// given the expansion `Σ c_e n^{−e/ν}` this returns `Σ c_e (n+j)^{−e/ν}`
/// re-expanded around `n`, using
/// `(n+j)^{−e/ν} = Σ_k C(−e/ν, k) j^k n^{−e/ν − k}`
/// (each correction lands `ν·k` grid steps higher).  Truncation and window
/// are preserved.
///
/// # Errors
/// [`Error::ShiftOutOfRange`] unless `|j| < ν`;
/// [`Error::TruncationTooShort`] when corrections exist mathematically but
/// *none* of them fits below the truncation — the result would silently
/// equal the input while the re-expansion does not.
pub fn shift_reexpand(a: &GaugeSeries, j: i64) -> Result<GaugeSeries> {
    let nu = a.nu as i64;
    if j.abs() >= nu {
        return Err(Error::ShiftOutOfRange { j, nu: a.nu });
    }
    let mut out = GaugeSeries::zero(a.nu, &a.field, a.low, a.trunc);
    let mut any_correction_exists = false;
    let mut any_correction_fits = false;
    for (&e, c) in &a.terms {
        out.insert_term(e, c.clone());
        if j == 0 || e == 0 {
            continue; // exponent 0: C(0, k) = 0 for all k ≥ 1
        }
        any_correction_exists = true;
        let q = Rational::new((-e).into(), nu.into());
        let mut jk = Rational::one();
        let mut k = 1u64;
        while e + nu * (k as i64) <= a.trunc {
            any_correction_fits = true;
            jk *= rat_int(j);
            let w = gen_binomial(&q, k) * &jk;
            out.insert_term(e + nu * (k as i64), c.scale(&w));
            k += 1;
        }
    }
    if any_correction_exists && !any_correction_fits {
        return Err(Error::TruncationTooShort(format!(
            "shift by {j} produces corrections only beyond truncation {}",
            a.trunc
        )));
    }
    Ok(out)
}

// ============================================================================
// CouplingSeries
// ============================================================================

/// Dense power series in the coupling with rational coefficients; the
/// coefficient vector has length `order + 1`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CouplingSeries {
    coeffs: Vec<Rational>,
}

impl CouplingSeries {
    /// Wraps a coefficient vector (constant term first).
    ///
    /// # Panics
    /// Panics on an empty vector (a series knows at least its value at 0).
    pub fn new(coeffs: Vec<Rational>) -> Self {
        assert!(!coeffs.is_empty(), "series needs at least the constant term");
        CouplingSeries { coeffs }
    }

    /// Zero series through the given order.
    pub fn zero(order: usize) -> Self {
        CouplingSeries {
            coeffs: vec![Rational::zero(); order + 1],
        }
    }

    /// Constant series 1 through the given order.
    pub fn one(order: usize) -> Self {
        let mut s = Self::zero(order);
        s.coeffs[0] = Rational::one();
        s
    }

    /// Truncation order J.
    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Coefficient of `coupling^j`.
    ///
    /// # Panics
    /// Panics for `j` beyond the truncation order.
    pub fn coeff(&self, j: usize) -> &Rational {
        assert!(j < self.coeffs.len(), "coefficient beyond truncation");
        &self.coeffs[j]
    }

    /// All coefficients, constant term first.
    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    /// Restricts to a lower order.
    pub fn truncated(&self, order: usize) -> Self {
        assert!(order <= self.order(), "cannot extend knowledge by fiat");
        CouplingSeries {
            coeffs: self.coeffs[..=order].to_vec(),
        }
    }

    /// Scales by a rational constant.
    pub fn scale(&self, s: &Rational) -> Self {
        CouplingSeries {
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
    }

    /// Reciprocal series to the same order.
    ///
    /// # Errors
    /// [`Error::NotInvertible`] when the constant term is zero.
    pub fn recip(&self) -> Result<Self> {
        if self.coeffs[0].is_zero() {
            return Err(Error::NotInvertible);
        }
        let target = self.order();
        // Newton doubling: g ← g·(2 − f·g) doubles the matched order.
        let mut g = CouplingSeries::new(vec![Rational::one() / &self.coeffs[0]]);
        let mut known = 0usize;
        while known < target {
            known = (2 * known + 1).min(target);
            let mut padded = g.coeffs;
            padded.resize(known + 1, Rational::zero());
            g = CouplingSeries::new(padded);
            let f = self.truncated(known);
            let fg = &f * &g;
            let mut two_minus = -&fg;
            two_minus.coeffs[0] += rat_int(2);
            g = &g * &two_minus;
        }
        Ok(g)
    }

    /// Natural logarithm of a series with constant term exactly 1, computed
    /// as the antiderivative of `S′/S` (constant term ln 1 = 0).
    ///
    /// # Errors
    /// [`Error::SingularPoint`] when the constant term differs from 1.
    pub fn ln(&self) -> Result<Self> {
        if !self.coeffs[0].is_one() {
            return Err(Error::SingularPoint(format!(
                "log argument has constant term {} (expected exactly 1)",
                rat_to_string(&self.coeffs[0])
            )));
        }
        let j = self.order();
        let mut out = Self::zero(j);
        if j == 0 {
            return Ok(out);
        }
        // S′ to order J−1, S⁻¹ to order J−1, product to order J−1, integrate.
        let deriv = CouplingSeries::new(
            (1..=j).map(|i| &self.coeffs[i] * rat_int(i as i64)).collect(),
        );
        let quotient = &deriv * &self.truncated(j - 1).recip()?;
        for (i, c) in quotient.coeffs.iter().enumerate() {
            out.coeffs[i + 1] = c / rat_int(i as i64 + 1);
        }
        Ok(out)
    }

    /// Integer power (negative exponents through the reciprocal).
    ///
    /// # Errors
    /// Propagates [`Error::NotInvertible`] for negative powers of a series
    /// with zero constant term.
    pub fn pow(&self, e: i64) -> Result<Self> {
        let base = if e < 0 { self.recip()? } else { self.clone() };
        let mut out = Self::one(self.order());
        for _ in 0..e.unsigned_abs() {
            out = &out * &base;
        }
        Ok(out)
    }

    /// Evaluates a ℚ[x] polynomial (ascending coefficients) at this series.
    pub fn eval_poly(p: &[Rational], at: &CouplingSeries) -> Self {
        let mut acc = Self::zero(at.order());
        for c in p.iter().rev() {
            acc = &acc * at;
            acc.coeffs[0] += c;
        }
        acc
    }

    /// Coefficients as `"p/q"` strings (JSON array form).
    pub fn to_json(&self) -> Value {
        Value::Array(
            self.coeffs
                .iter()
                .map(|c| Value::String(rat_to_string(c)))
                .collect(),
        )
    }
}

impl Add for &CouplingSeries {
    type Output = CouplingSeries;
    fn add(self, rhs: &CouplingSeries) -> CouplingSeries {
        let order = self.order().min(rhs.order());
        CouplingSeries::new(
            (0..=order)
                .map(|i| &self.coeffs[i] + &rhs.coeffs[i])
                .collect(),
        )
    }
}

impl Sub for &CouplingSeries {
    type Output = CouplingSeries;
    fn sub(self, rhs: &CouplingSeries) -> CouplingSeries {
        let order = self.order().min(rhs.order());
        CouplingSeries::new(
            (0..=order)
                .map(|i| &self.coeffs[i] - &rhs.coeffs[i])
                .collect(),
        )
    }
}

impl Neg for &CouplingSeries {
    type Output = CouplingSeries;
    fn neg(self) -> CouplingSeries {
        CouplingSeries::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

impl Mul for &CouplingSeries {
    type Output = CouplingSeries;
    fn mul(self, rhs: &CouplingSeries) -> CouplingSeries {
        let order = self.order().min(rhs.order());
        let mut out = vec![Rational::zero(); order + 1];
        for (i, a) in self.coeffs.iter().enumerate().take(order + 1) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate().take(order + 1 - i) {
                out[i + j] += a * b;
            }
        }
        CouplingSeries::new(out)
    }
}

/// Taylor-expands `f ∘ g` to the order of `g`: the rational part becomes
/// `num(g) · den(g)⁻¹`, and each log term `c·ln(arg)` becomes
/// `c · ln(arg(g))` where the inner series must have constant term exactly 1
/// (so the expansion starts from ln 1 = 0).
///
/// # Errors
/// [`Error::SingularPoint`] when a denominator vanishes at the expansion
/// point or a log argument differs from 1 there.
pub fn cs_compose(f: &GenFunExpr, g: &CouplingSeries) -> Result<CouplingSeries> {
    let evaluate = |num: &[Rational], den: &[Rational]| -> Result<CouplingSeries> {
        let num_s = CouplingSeries::eval_poly(num, g);
        let den_s = CouplingSeries::eval_poly(den, g);
        let den_inv = den_s.recip().map_err(|_| {
            Error::SingularPoint(format!(
                "denominator vanishes at the expansion point g(0) = {}",
                rat_to_string(&g.coeffs[0])
            ))
        })?;
        Ok(&num_s * &den_inv)
    };
    let mut acc = evaluate(f.rational().num(), f.rational().den())?;
    for term in f.logs() {
        let arg_series = evaluate(term.arg().num(), term.arg().den())?;
        let ln_series = arg_series.ln()?;
        acc = &acc + &ln_series.scale(term.coef());
    }
    Ok(acc)
}

// ============================================================================
// Tests
// ============================================================================

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::{rat, RadicalField};
    use crate::genfun::{LogTerm, RationalFunc};
    use proptest::prelude::*;

    fn f23() -> RadicalField {
        RadicalField::new(2, rat_int(3))
    }

    /// Constant-coefficient helper: the rational `q` as a ParamPoly.
    fn cpoly(q: Rational) -> ParamPoly {
        ParamPoly::constant(f23().from_rational(q))
    }

    fn cseries(nu: u32, trunc: i64, terms: &[(i64, i64, i64)]) -> GaugeSeries {
        GaugeSeries::from_terms(
            nu,
            &f23(),
            terms.iter().map(|t| t.0).min().unwrap_or(0).min(trunc),
            trunc,
            terms.iter().map(|&(e, n, d)| (e, cpoly(rat(n, d)))),
        )
    }

    #[test]
    fn product_of_conjugates() {
        // (1 + u)(1 − u) = 1 − u², known through order 5.
        let a = cseries(2, 5, &[(0, 1, 1), (1, 1, 1)]);
        let b = cseries(2, 5, &[(0, 1, 1), (1, -1, 1)]);
        let p = ser_mul(&a, &b);
        assert_eq!(p.trunc(), 5);
        assert_eq!(p.coeff(0), cpoly(rat_int(1)));
        assert_eq!(p.coeff(1), cpoly(rat_int(0)));
        assert_eq!(p.coeff(2), cpoly(rat_int(-1)));
        assert!((3..=5).all(|e| p.coeff(e).is_zero()));
    }

    #[test]
    fn inverse_monomials_cancel() {
        let a = cseries(2, 5, &[(-1, 1, 1)]);
        let b = cseries(2, 5, &[(1, 1, 1)]);
        let p = ser_mul(&a, &b);
        assert_eq!(p.coeff(0), cpoly(rat_int(1)));
        // Unknowns of `a` start at u⁶; times u they reach u⁷ − but the
        // unknowns of `b` start at u⁶ and times u⁻¹ reach u⁵, so the
        // product is guaranteed only through u⁴.
        assert_eq!(p.trunc(), 4);
    }

    #[test]
    fn leading_product_is_coefficient_product() {
        // Leading coefficient of x·x equals the ParamPoly square of the
        // leading coefficient of x, for x starting at u⁻¹.
        let f = f23();
        let lead = ParamPoly::monomial(-1, -1, f.theta_pow(1)).scale(&rat(1, 3));
        let x = GaugeSeries::from_terms(
            2,
            &f,
            -1,
            3,
            [(-1, lead.clone()), (0, ParamPoly::one(&f))],
        );
        let sq = ser_mul(&x, &x);
        assert_eq!(sq.coeff(-2), &lead * &lead);
    }

    #[test]
    fn geometric_reciprocal() {
        // 1/(1 − u) = 1 + u + u² + … through the full window.
        let a = cseries(2, 6, &[(0, 1, 1), (1, -1, 1)]);
        let r = ser_recip(&a).unwrap();
        assert_eq!(r.trunc(), 6);
        for e in 0..=6 {
            assert_eq!(r.coeff(e), cpoly(rat_int(1)), "exponent {e}");
        }
        let check = ser_mul(&a, &r);
        assert_eq!(check.coeff(0), cpoly(rat_int(1)));
        assert!((1..=check.trunc()).all(|e| check.coeff(e).is_zero()));
    }

    #[test]
    fn reciprocal_of_inverse_monomial() {
        // 1/u⁻¹ = u, with the truncation gain t − 2·(−1).
        let a = cseries(2, 4, &[(-1, 1, 1)]);
        let r = ser_recip(&a).unwrap();
        assert_eq!(r.trunc(), 6);
        assert_eq!(r.low(), 1);
        assert_eq!(r.coeff(1), cpoly(rat_int(1)));
        assert!((2..=6).all(|e| r.coeff(e).is_zero()));
    }

    #[test]
    fn reciprocal_rejects_zero_and_sums() {
        let z = GaugeSeries::zero(2, &f23(), 0, 4);
        assert!(matches!(ser_recip(&z), Err(Error::NotInvertible)));
        // Leading coefficient with two ParamPoly terms is not invertible.
        let f = f23();
        let two_terms = &ParamPoly::monomial(1, 0, f.one()) + &ParamPoly::one(&f);
        let s = GaugeSeries::monomial(2, 0, two_terms, 4);
        assert!(matches!(ser_recip(&s), Err(Error::NotMonomial(_))));
    }

    #[test]
    fn shift_of_constant_is_identity() {
        let one = GaugeSeries::one(2, &f23(), 4);
        let shifted = shift_reexpand(&one, 1).unwrap();
        assert!(shifted.agrees_with(&one, 4));
    }

    #[test]
    fn shift_of_sqrt_gauge() {
        // (n+1)^{−1/2} = u − ½u³ + ⅜u⁵ − …  (ν = 2, u = n^{−1/2});
        // frozen oracle: binomial series of (1+x)^{−1/2} = 1 − x/2 + 3x²/8 − …
        let u = cseries(2, 5, &[(1, 1, 1)]);
        let s = shift_reexpand(&u, 1).unwrap();
        assert_eq!(s.coeff(1), cpoly(rat_int(1)));
        assert_eq!(s.coeff(3), cpoly(rat(-1, 2)));
        assert_eq!(s.coeff(5), cpoly(rat(3, 8)));
        assert!(s.coeff(2).is_zero() && s.coeff(4).is_zero());
    }

    #[test]
    fn shift_range_is_enforced() {
        let u = cseries(2, 5, &[(1, 1, 1)]);
        assert!(matches!(
            shift_reexpand(&u, 2),
            Err(Error::ShiftOutOfRange { j: 2, nu: 2 })
        ));
        assert!(shift_reexpand(&u, -1).is_ok());
    }

    #[test]
    fn shift_needs_room_for_corrections() {
        // u known only through u¹: the first correction u³ cannot be held.
        let u = cseries(2, 1, &[(1, 1, 1)]);
        assert!(matches!(
            shift_reexpand(&u, 1),
            Err(Error::TruncationTooShort(_))
        ));
    }

    #[test]
    fn generalized_binomial_values() {
        assert_eq!(gen_binomial(&rat(-1, 2), 0), rat_int(1));
        assert_eq!(gen_binomial(&rat(-1, 2), 1), rat(-1, 2));
        assert_eq!(gen_binomial(&rat(-1, 2), 2), rat(3, 8));
        assert_eq!(gen_binomial(&rat(-1, 2), 3), rat(-5, 16));
        assert_eq!(gen_binomial(&rat(-1, 3), 1), rat(-1, 3));
        assert_eq!(gen_binomial(&rat_int(3), 5), rat_int(0));
    }

    // ------------------------------------------------------------------
    // CouplingSeries
    // ------------------------------------------------------------------

    fn cs(vals: &[(i64, i64)]) -> CouplingSeries {
        CouplingSeries::new(vals.iter().map(|&(n, d)| rat(n, d)).collect())
    }

    #[test]
    fn coupling_mul_truncates_to_shorter() {
        let a = cs(&[(1, 1), (2, 1), (3, 1)]);
        let b = cs(&[(1, 1), (-1, 1)]);
        let p = &a * &b;
        assert_eq!(p.order(), 1);
        assert_eq!(p.coeffs(), &[rat_int(1), rat_int(1)]);
    }

    #[test]
    fn coupling_recip_geometric() {
        let a = cs(&[(1, 1), (-1, 1)]);
        let mut padded = a.coeffs().to_vec();
        padded.resize(7, rat_int(0));
        let r = CouplingSeries::new(padded).recip().unwrap();
        assert!(r.coeffs().iter().all(|c| c.is_one()));
        assert!(cs(&[(0, 1), (1, 1)]).recip().is_err());
    }

    #[test]
    fn coupling_ln_of_one_minus_r() {
        // ln(1 − r) = −r − r²/2 − r³/3 − …
        let mut v = vec![rat_int(1), rat_int(-1)];
        v.resize(6, rat_int(0));
        let l = CouplingSeries::new(v).ln().unwrap();
        assert_eq!(l.coeff(0), &rat_int(0));
        for j in 1..=5 {
            assert_eq!(l.coeff(j), &rat(-1, j as i64), "order {j}");
        }
        assert!(cs(&[(2, 1), (1, 1)]).ln().is_err());
    }

    #[test]
    fn compose_identity_returns_inner() {
        let f = GenFunExpr::pure_rational(
            RationalFunc::new(vec![rat_int(0), rat_int(1)], vec![rat_int(1)]).unwrap(),
        )
        .unwrap();
        let g = cs(&[(1, 1), (-3, 1), (18, 1)]);
        assert_eq!(cs_compose(&f, &g).unwrap(), g);
    }

    #[test]
    fn compose_log_of_inner_starts_at_zero() {
        let f = GenFunExpr::new(
            RationalFunc::from_poly(vec![]),
            vec![LogTerm::new(
                rat_int(1),
                RationalFunc::new(vec![rat_int(0), rat_int(1)], vec![rat_int(1)]).unwrap(),
            )],
        )
        .unwrap();
        let g = cs(&[(1, 1), (-3, 1), (18, 1)]);
        let out = cs_compose(&f, &g).unwrap();
        assert_eq!(out.coeff(0), &rat_int(0));
        // ln(1 − 3r + 18r²) = −3r + 27r²/2 + O(r³).
        assert_eq!(out.coeff(1), &rat_int(-3));
        assert_eq!(out.coeff(2), &rat(27, 2));
    }

    #[test]
    fn compose_detects_pole_at_expansion_point() {
        let f = GenFunExpr::pure_rational(
            // 1/(2 − z₀): regular at 1 — then force the inner series to hit 2.
            RationalFunc::new(vec![rat_int(1)], vec![rat_int(2), rat_int(-1)]).unwrap(),
        )
        .unwrap();
        let g = cs(&[(2, 1), (1, 1)]);
        assert!(matches!(cs_compose(&f, &g), Err(Error::SingularPoint(_))));
    }

    // ------------------------------------------------------------------
    // Property tests
    // ------------------------------------------------------------------

    fn arb_gauge(nu: u32, lowest: i64, trunc: i64) -> impl Strategy<Value = GaugeSeries> {
        let exps: Vec<i64> = (lowest..=trunc).collect();
        proptest::collection::vec((-9i64..=9, 1i64..=6), exps.len()).prop_map(move |coefs| {
            GaugeSeries::from_terms(
                nu,
                &f23(),
                lowest,
                trunc,
                exps.iter()
                    .zip(coefs)
                    .map(|(&e, (n, d))| (e, cpoly(rat(n, d)))),
            )
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn ser_mul_commutes(a in arb_gauge(2, -1, 5), b in arb_gauge(2, -1, 5)) {
            let ab = ser_mul(&a, &b);
            let ba = ser_mul(&b, &a);
            prop_assert_eq!(&ab, &ba);
        }

        #[test]
        fn ser_mul_associates(
            a in arb_gauge(3, 0, 5),
            b in arb_gauge(3, 0, 5),
            c in arb_gauge(3, 0, 5),
        ) {
            let left = ser_mul(&ser_mul(&a, &b), &c);
            let right = ser_mul(&a, &ser_mul(&b, &c));
            let t = left.trunc().min(right.trunc());
            prop_assert!(left.agrees_with(&right, t));
        }

        #[test]
        fn recip_round_trips(a in arb_gauge(2, -1, 6)) {
            prop_assume!(!a.coeff(a.low()).is_zero());
            let r = ser_recip(&a).unwrap();
            let back = ser_recip(&r).unwrap();
            let t = back.trunc().min(a.trunc());
            prop_assert!(back.agrees_with(&a, t));
            let product = ser_mul(&a, &r);
            prop_assert_eq!(product.coeff(0), cpoly(rat_int(1)));
            for e in 1..=product.trunc() {
                prop_assert!(product.coeff(e).is_zero(), "residual at exponent {}", e);
            }
        }

        #[test]
        fn shift_zero_is_identity(a in arb_gauge(2, -1, 5)) {
            let s = shift_reexpand(&a, 0).unwrap();
            prop_assert!(s.agrees_with(&a, 5));
        }

        #[test]
        fn shift_round_trips(a in arb_gauge(3, -2, 9), j in -2i64..=2) {
            let there = shift_reexpand(&a, j);
            prop_assume!(there.is_ok());
            let back = shift_reexpand(&there.unwrap(), -j).unwrap();
            prop_assert!(back.agrees_with(&a, 9));
        }

        #[test]
        fn coupling_compose_matches_long_division(
            num in proptest::collection::vec((-6i64..=6, 1i64..=4), 1..4),
            den0 in (1i64..=5),
            den_rest in proptest::collection::vec((-4i64..=4, 1i64..=4), 0..3),
            g_tail in proptest::collection::vec((-5i64..=5, 1i64..=3), 1..6),
        ) {
            // f = num/den regular at 1 with den(g(0)) ≠ 0 arranged by a
            // nonzero constant term and g(0) = 0 for simplicity.
            let num: Vec<Rational> = num.iter().map(|&(n, d)| rat(n, d)).collect();
            let mut den: Vec<Rational> = vec![rat_int(den0)];
            den.extend(den_rest.iter().map(|&(n, d)| rat(n, d)));
            let mut g_coeffs = vec![rat_int(0)];
            g_coeffs.extend(g_tail.iter().map(|&(n, d)| rat(n, d)));
            let g = CouplingSeries::new(g_coeffs);
            prop_assume!(!crate::polyq::qp_eval(&den, &rat_int(0)).is_zero());
            prop_assume!(!crate::polyq::qp_eval(&den, &rat_int(1)).is_zero());

            let f = GenFunExpr::pure_rational(
                RationalFunc::new(num.clone(), den.clone()).unwrap()).unwrap();
            let got = cs_compose(&f, &g).unwrap();

            // Independent oracle: long division digit by digit. num(g) and
            // den(g) are exact polynomial compositions truncated to J; the
            // quotient digits come from the leading-coefficient recurrence.
            let j_max = g.order();
            let num_g = CouplingSeries::eval_poly(&num, &g);
            let den_g = CouplingSeries::eval_poly(&den, &g);
            let mut digits = Vec::with_capacity(j_max + 1);
            let mut rem = num_g.coeffs().to_vec();
            for j in 0..=j_max {
                let d = &rem[j] / den_g.coeff(0);
                for i in j..=j_max {
                    let t = &d * den_g.coeff(i - j);
                    rem[i] -= t;
                }
                digits.push(d);
            }
            prop_assert_eq!(got.coeffs(), &digits[..]);
        }
    }
}

//! Symbolic valence-2ν recurrence and its asymptotic orbit expansion.
//!
//! For the even weight `exp[−N(λ²/2 + r·λ^{2ν}/(2ν))]` the squared
//! off-diagonal recurrence coefficients `x_n = b_n²` of the orthogonal
//! polynomials satisfy a nonlinear difference equation
//!
//! ```text
//! n/N = x_n + r · M_ν(x_{n−ν+1}, …, x_{n+ν−1})
//! ```
//!
//! where `M_ν` is a degree-ν polynomial in the neighbouring orbit values.
//! This module:
//!
//! - builds `M_ν` exactly ([`build_freud`]) from the banded Jacobi-matrix
//!   power: the `(n, n−1)` entry of `J^{2ν−1}` is a sum over ±1 walks of
//!   length 2ν−1 from level 0 to level −1; each edge contributes the
//!   off-diagonal symbol at its larger endpoint, the prefactor contributes
//!   one more at offset 0, and the resulting even powers `b²` collapse to
//!   `x` factors;
//! - solves the smooth (one-cut) orbit branch order by order in `n^{−1/ν}`
//!   ([`cm_expand`]), producing exact [`ParamPoly`] coefficients in the
//!   scaling symbols `A = N^{1/ν}`, `B = r^{1/ν}` over ℚ(C^{1/ν}) with
//!   `C = C(2ν−1, ν−1)`;
//! - re-expresses the expansion in the self-similar normalization used by
//!   the genus matching ([`rescale_cm`]).

use std::collections::BTreeMap;

use serde_json::{json, Value};

use crate::exactnum::{binomial, ppoly_to_json, rat_int, ParamPoly, RadicalField, Rational};
use crate::series::{ser_mul, shift_reexpand, GaugeSeries};
use crate::{Error, Result};

// ============================================================================
// The recurrence polynomial M_ν
// ============================================================================

/// Degree-ν polynomial `M_ν` in the orbit values `x_{n+j}`, `|j| ≤ ν−1`.
///
/// Terms map a sorted multiset of ν offsets to a positive multiplicity;
/// for example the term `x_{n}² x_{n+1}` with multiplicity 2 is stored as
/// `[0, 0, 1] → 2`.
///
/// Invariants: every key holds exactly ν offsets in `[−(ν−1), ν−1]` and
/// contains the offset 0 (the prefactor forces a `x_n` in every monomial);
/// the total multiplicity equals `C(2ν−1, ν−1)`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FreudPolynomial {
    nu: u32,
    terms: BTreeMap<Vec<i64>, u64>,
}

impl FreudPolynomial {
    /// Valence parameter ν.
    pub fn nu(&self) -> u32 {
        self.nu
    }

    /// Iterates `(offset multiset, multiplicity)` pairs in sorted key order.
    pub fn terms(&self) -> impl Iterator<Item = (&Vec<i64>, &u64)> {
        self.terms.iter()
    }

    /// Number of distinct monomials.
    pub fn monomial_count(&self) -> usize {
        self.terms.len()
    }

    /// Sum of multiplicities — the value of `M_ν` at all-ones.
    pub fn total_multiplicity(&self) -> u64 {
        self.terms.values().sum()
    }

    /// Image under the offset reversal `j → −j` (transposing every walk).
    /// `M_ν` is invariant under this map; the ν=2 polynomial
    /// `x₀(x₋₁ + x₀ + x₁)` is fixed term by term.
    pub fn reflected(&self) -> FreudPolynomial {
        let terms = self
            .terms
            .iter()
            .map(|(k, &m)| {
                let mut rev: Vec<i64> = k.iter().map(|&j| -j).collect();
                rev.sort_unstable();
                (rev, m)
            })
            .collect();
        FreudPolynomial { nu: self.nu, terms }
    }

    /// Evaluates `M_ν` on a family of series indexed by offset.
    ///
    /// # Panics
    /// Panics if a required offset is missing from `shifts`.
    pub fn eval_gauge(&self, shifts: &BTreeMap<i64, GaugeSeries>) -> GaugeSeries {
        let mut acc: Option<GaugeSeries> = None;
        for (offsets, &mult) in &self.terms {
            let mut prod = shifts[&offsets[0]].clone();
            for j in &offsets[1..] {
                prod = ser_mul(&prod, &shifts[j]);
            }
            let prod = prod.scale(&rat_int(mult as i64));
            acc = Some(match acc {
                None => prod,
                Some(a) => &a + &prod,
            });
        }
        acc.expect("M_nu has at least one monomial")
    }

    /// Serializes as `[{"offsets": […], "mult": …}]` in sorted key order.
    pub fn to_json(&self) -> Value {
        Value::Array(
            self.terms
                .iter()
                .map(|(k, m)| json!({ "offsets": k, "mult": m }))
                .collect(),
        )
    }
}

/// Builds `M_ν` for valence 2ν by enumerating the ±1 walks of length 2ν−1
/// from level 0 to level −1 (the `(n, n−1)` entry of the banded power),
/// attaching the extra offset-0 factor, and halving the even symbol counts.
///
/// # Panics
/// Panics for ν < 2 (the quadratic weight has no interaction term).
pub fn build_freud(nu: u32) -> FreudPolynomial {
    assert!(nu >= 2, "valence parameter must be at least 2");
    let steps = 2 * nu - 1;
    let mut terms: BTreeMap<Vec<i64>, u64> = BTreeMap::new();
    for mask in 0u64..(1 << steps) {
        // Bit i set = step up at move i; need (#up − #down) = −1.
        if (mask.count_ones() as i64) * 2 - (steps as i64) != -1 {
            continue;
        }
        let mut level = 0i64;
        let mut b_count: BTreeMap<i64, u64> = BTreeMap::new();
        for i in 0..steps {
            let next = if mask >> i & 1 == 1 { level + 1 } else { level - 1 };
            *b_count.entry(level.max(next)).or_insert(0) += 1;
            level = next;
        }
        debug_assert_eq!(level, -1);
        *b_count.entry(0).or_insert(0) += 1; // prefactor b at offset 0
        let mut offsets = Vec::with_capacity(nu as usize);
        for (j, c) in b_count {
            assert!(c % 2 == 0, "odd symbol power cannot collapse to x");
            for _ in 0..c / 2 {
                offsets.push(j);
            }
        }
        debug_assert_eq!(offsets.len(), nu as usize);
        *terms.entry(offsets).or_insert(0) += 1;
    }
    let m = FreudPolynomial { nu, terms };
    debug_assert_eq!(
        Rational::from_integer(m.total_multiplicity().into()),
        binomial(2 * nu as u64 - 1, nu as u64 - 1)
    );
    m
}

// ============================================================================
// Orbit expansion
// ============================================================================

/// Exact asymptotic expansion of the smooth orbit branch:
/// `x_n ∼ Σ_{k=−1}^{kmax} c_k · n^{−k/ν}` with each `c_k` a [`ParamPoly`]
/// over ℚ(θ), θ = C^{1/ν}, C = C(2ν−1, ν−1).
///
/// Invariants: `c₋₁ = (θ^{ν−1}/C)·A⁻¹B⁻¹` (positive real branch), and every
/// `c_k` is homogeneous of scaling degree −1 under `(N, r) → (σN, σ^{ν−1}r)`
/// — equivalently `eA + (ν−1)·eB = −ν` on each monomial.
#[derive(Clone, PartialEq, Debug)]
pub struct CmExpansion {
    nu: u32,
    kmax: i64,
    field: RadicalField,
    coeffs: Vec<ParamPoly>, // index i holds c_{i−1}
}

impl CmExpansion {
    /// Valence parameter ν.
    pub fn nu(&self) -> u32 {
        self.nu
    }

    /// Highest solved order.
    pub fn kmax(&self) -> i64 {
        self.kmax
    }

    /// The coefficient field ℚ(C^{1/ν}).
    pub fn field(&self) -> &RadicalField {
        &self.field
    }

    /// The coefficient `c_k`, `−1 ≤ k ≤ kmax`.
    pub fn coeff(&self, k: i64) -> &ParamPoly {
        assert!(k >= -1 && k <= self.kmax, "order {k} outside expansion");
        &self.coeffs[(k + 1) as usize]
    }

    /// The expansion as a gauge series `Σ c_k u^k`, known through `kmax`.
    pub fn to_gauge(&self) -> GaugeSeries {
        GaugeSeries::from_terms(
            self.nu,
            &self.field,
            -1,
            self.kmax,
            self.coeffs
                .iter()
                .enumerate()
                .map(|(i, c)| (i as i64 - 1, c.clone())),
        )
    }

    /// Serializes as `[{"k": …, "c": [ParamPoly terms]}]`.
    pub fn to_json(&self) -> Value {
        Value::Array(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(i, c)| json!({ "k": i as i64 - 1, "c": ppoly_to_json(c) }))
                .collect(),
        )
    }
}

/// Shift that tolerates a truncation too short to hold any correction: in
/// that regime the re-expansion coincides with the input through the
/// truncation, which is exactly what the caller needs.
fn shift_or_identity(x: &GaugeSeries, j: i64) -> Result<GaugeSeries> {
    match shift_reexpand(x, j) {
        Err(Error::TruncationTooShort(_)) => Ok(x.clone()),
        other => other,
    }
}

/// Residual of the recurrence at the candidate expansion `x`:
/// `x + B^ν·M_ν(shifted x) − A^{−ν}u^{−ν}`, guaranteed through
/// `trunc(x) + 1 − ν`.
fn freud_residual(m_nu: &FreudPolynomial, x: &GaugeSeries) -> Result<GaugeSeries> {
    let nu = m_nu.nu() as i64;
    let field = x.field();
    let mut shifts = BTreeMap::new();
    for j in -(nu - 1)..=(nu - 1) {
        shifts.insert(j, shift_or_identity(x, j)?);
    }
    let m_val = m_nu.eval_gauge(&shifts);
    let r_coupling = ParamPoly::monomial(0, nu, field.one());
    let rm = m_val.mul_poly(&r_coupling);
    let lhs = GaugeSeries::monomial(
        x.nu(),
        -nu,
        ParamPoly::monomial(-nu, 0, field.one()),
        rm.trunc(),
    );
    Ok(&(&x.truncate(rm.trunc().min(x.trunc())) + &rm) - &lhs)
}

/// Solves the orbit expansion through order `kmax`.
///
/// Order `m` is fixed by an affine probe: the residual coefficient at
/// exponent `m + 1 − ν` is evaluated with the unknown `c_m` set to 0 and to
/// 1; the two values determine the affine relation `ρ(c) = ρ₀ + S·c`
/// exactly (quadratic-and-higher feedback of `c_m` starts strictly beyond
/// that exponent), and `c_m = −S⁻¹ρ₀`.  After the sweep the full residual
/// is re-checked to vanish identically through `kmax + 1 − ν`.
///
/// # Errors
/// [`Error::VanishingSlope`] if an affine slope fails to be an invertible
/// monomial (cannot happen for the one-cut branch; guards the solve);
/// [`Error::SystemDefect`] if the final residual self-check or the
/// homogeneity audit fails.
pub fn cm_expand(nu: u32, kmax: i64) -> Result<CmExpansion> {
    assert!(nu >= 2, "valence parameter must be at least 2");
    assert!(kmax >= -1, "expansion needs at least the leading order");
    let c = binomial(2 * nu as u64 - 1, nu as u64 - 1);
    let field = RadicalField::new(nu as usize, c.clone());
    let m_nu = build_freud(nu);

    // Leading balance: r·C·c₋₁^ν·n = n/N, positive real branch.
    let c_minus1 = ParamPoly::monomial(
        -1,
        -1,
        field
            .theta_pow(nu - 1)
            .scale(&(Rational::from_integer(1.into()) / &c)),
    );
    let mut x = GaugeSeries::monomial(nu, -1, c_minus1, -1);

    for m in 0..=kmax {
        let x0 = {
            let mut widened = GaugeSeries::zero(nu, &field, -1, m);
            for (&e, coeff) in x.terms() {
                widened.set_coeff(e, coeff.clone());
            }
            widened
        };
        let mut x1 = x0.clone();
        x1.set_coeff(m, ParamPoly::one(&field));

        let target = m + 1 - nu as i64;
        let rho0 = freud_residual(&m_nu, &x0)?.coeff(target);
        let rho1 = freud_residual(&m_nu, &x1)?.coeff(target);
        let slope = &rho1 - &rho0;
        let slope_inv = slope.inv().map_err(|_| Error::VanishingSlope(m))?;
        let cm = -&(&slope_inv * &rho0);
        x = x0;
        if !cm.is_zero() {
            x.set_coeff(m, cm);
        }
    }

    // Self-consistency re-check: the solved expansion must annihilate the
    // residual through every order it claims.
    let residual = freud_residual(&m_nu, &x)?;
    if !residual.is_zero() {
        return Err(Error::SystemDefect(format!(
            "orbit residual survives at exponent {:?} after solving through {kmax}",
            residual.effective_low()
        )));
    }

    // Homogeneity audit: each c_k scales like 1/σ under (N, r) → (σN, σ^{ν−1}r).
    let minus_one = rat_int(-1);
    let mut coeffs = vec![ParamPoly::zero(&field); (kmax + 2) as usize];
    for (&e, coeff) in x.terms() {
        if coeff.scaling_degree(nu) != Some(minus_one.clone()) {
            return Err(Error::SystemDefect(format!(
                "coefficient c_{e} is not homogeneous of scaling degree -1"
            )));
        }
        coeffs[(e + 1) as usize] = coeff.clone();
    }
    Ok(CmExpansion {
        nu,
        kmax,
        field,
        coeffs,
    })
}

/// Self-similar normalization of the expansion used by the genus matching:
/// the first parameter slot is set to 1 (`A → 1`) and every order moves ν
/// grid steps up, realizing `Σ_k c_k(1, B) · n^{−(k+ν)/ν}` — the orbit value
/// divided by `n`, with `B` carrying the remaining parameter formally.
pub fn rescale_cm(e: &CmExpansion) -> GaugeSeries {
    let nu = e.nu as i64;
    GaugeSeries::from_terms(
        e.nu,
        &e.field,
        nu - 1,
        e.kmax + nu,
        e.coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| (i as i64 - 1 + nu, c.subst_a_one())),
    )
}

/// Default expansion depth for deriving genus `g` at valence 2ν:
/// `5gν − 2ν − 3g + 1` for the direct ansatz; the ν=2 reduced ansatz
/// (factored numerator) needs only `5g − 2`.
pub fn kmax_for_genus(nu: u32, g: u32, reduced: bool) -> i64 {
    let (nu, g) = (nu as i64, g as i64);
    if reduced {
        assert!(nu == 2, "reduced ansatz applies to valence 4 only");
        5 * g - 2
    } else {
        5 * g * nu - 2 * nu - 3 * g + 1
    }
}

// ============================================================================
// Tests
// ============================================================================

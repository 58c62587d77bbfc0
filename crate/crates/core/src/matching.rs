//! Genus matching: from orbit expansion coefficients to exact generating
//! functions.
//!
//! The pipeline implemented here:
//!
//! 1. [`extract_a`] reads the genus-g coefficient ladder `a_{(ν−1)m, g}`
//!    (m = 1…3g−1) out of a [`CmExpansion`]: the value sits as the
//!    coefficient of `B^{−m}` inside orbit order `k = 2gν + (ν−1)m − ν`
//!    once A is set to 1, and every monomial of every order consumed must
//!    occupy such a slot for some genus.
//! 2. [`ansatz_rows`] expands the candidate rational form
//!    `z_g = z₀(z₀−1)P(z₀)/(ν−(ν−1)z₀)^{5g−1}` along the Puiseux series of
//!    z₀ and collects the linear system relating the unknown numerator
//!    coefficients β to the extracted ladder.
//! 3. [`solve_beta`] solves that system exactly over ℚ(θ) and checks that
//!    every β comes out rational (the θ-components must cancel).
//! 4. [`q_factor`] (ν=2) divides out the forced `(z₀−1)^{2g−1}` factor,
//!    [`partial_fraction`] re-expands `z_g/z₀` in powers of
//!    `w = ν−(ν−1)z₀`, [`recursion_check`] verifies the quadratic
//!    recursion satisfied by the top partial-fraction coefficients, and
//!    [`q_roots`] isolates the real roots of the reduced numerators with
//!    exact Sturm-sequence arithmetic.
//!
//! A reduced derivation mode for ν=2 solves directly for the numerator in
//! the `z₀(z₀−1)^{2g}Q_{g−1}(z₀)/(2−z₀)^{5g−1}` form, which only needs
//! orbit data up to order 5g−2 instead of 7g−3.

use num_traits::{One, Signed, Zero};

use crate::exactnum::{rat, rat_int, ParamPoly, RadicalElem, Rational};
use crate::freud::{kmax_for_genus, CmExpansion};
use crate::genfun::{GenFunExpr, RationalFunc};
use crate::polyq::{
    qp_deg, qp_derivative, qp_display, qp_divmod, qp_eval, qp_gcd, qp_mul, qp_pow, qp_sign_at,
    qp_trim, QPoly,
};
use crate::series::{ser_mul, ser_pow, ser_recip, GaugeSeries};
use crate::stringeq::z0_puiseux;
use crate::{Error, Result};

// ============================================================================
// Slot extraction
// ============================================================================

/// Orbit order holding the genus-g ladder entry of index m:
/// `k = 2gν + (ν−1)m − ν`.
pub fn slot_index(nu: u32, g: u32, m: i64) -> i64 {
    2 * g as i64 * nu as i64 + (nu as i64 - 1) * m - nu as i64
}

/// Every monomial `B^{−m'}` of orbit order k must satisfy
/// `k = 2g'ν + (ν−1)m' − ν` for some integer genus g' ≥ 0 and m' ≥ 1.
fn validate_slots(nu: u32, k: i64, c: &ParamPoly) -> Result<()> {
    for (&(e_a, e_b), _) in c.terms() {
        let m = -e_b;
        let num = k + nu as i64 - (nu as i64 - 1) * m;
        if m < 1 || num < 0 || num % (2 * nu as i64) != 0 {
            return Err(Error::SlotViolation(format!(
                "monomial A^{e_a} B^{e_b} at order {k} fits no genus slot"
            )));
        }
    }
    Ok(())
}

/// Reads the single ladder entry `a_{(ν−1)m, g}` (at A = 1) from the orbit
/// expansion, after validating that its host order is slot-clean.
pub fn extract_slot(e: &CmExpansion, g: u32, m: i64) -> Result<RadicalElem> {
    assert!(m >= 1, "ladder index must be positive");
    let nu = e.nu();
    let k = slot_index(nu, g, m);
    if k > e.kmax() {
        return Err(Error::OrderTooSmall {
            need: k,
            have: e.kmax(),
            context: format!("orbit order for genus-{g} ladder entry m={m}"),
        });
    }
    let c = e.coeff(k);
    validate_slots(nu, k, c)?;
    Ok(c.subst_a_one().coeff(0, -m))
}

/// Largest ladder index m whose slot fits inside the expansion depth.
pub fn max_slot(e: &CmExpansion, g: u32) -> i64 {
    let nu = e.nu() as i64;
    (e.kmax() + nu - 2 * g as i64 * nu).div_euclid(nu - 1)
}

/// The full genus-g extraction: `a_{(ν−1)m, g}` for m = 1…3g−1.
///
/// # Errors
/// [`Error::OrderTooSmall`] when the expansion is shallower than the
/// matching depth `5gν − 2ν − 3g + 1`; [`Error::SlotViolation`] when a
/// consumed order carries a monomial outside the genus-slot grid.
pub fn extract_a(e: &CmExpansion, g: u32) -> Result<Vec<RadicalElem>> {
    assert!(g >= 1, "extraction targets positive genus");
    let need = kmax_for_genus(e.nu(), g, false);
    if e.kmax() < need {
        return Err(Error::OrderTooSmall {
            need,
            have: e.kmax(),
            context: format!("matching depth for genus {g}"),
        });
    }
    (1..=3 * g as i64 - 1)
        .map(|m| extract_slot(e, g, m))
        .collect()
}

// ============================================================================
// Ansatz rows
// ============================================================================

/// Evaluates a polynomial (ascending rational coefficients) on a gauge
/// series by Horner's rule; the argument must have nonnegative valuation so
/// the truncation window never shrinks.
fn poly_at_gauge(p: &[Rational], z: &GaugeSeries) -> GaugeSeries {
    let field = z.field().clone();
    let nu = z.nu();
    let t = z.trunc();
    let mut acc = GaugeSeries::zero(nu, &field, 0, t);
    for c in p.iter().rev() {
        acc = ser_mul(&acc, z).truncate(t);
        if !c.is_zero() {
            let cpoly = ParamPoly::constant(field.from_rational(c.clone()));
            acc = &acc + &GaugeSeries::monomial(nu, 0, cpoly, t);
        }
    }
    acc
}

/// Gauge expansion of `z₀^{c+1}(z₀−1)^{p}/(ν−(ν−1)z₀)^{d}` for c = 0…cols−1,
/// sampled at the requested v-exponents.
fn ansatz_matrix(
    z0: &GaugeSeries,
    zm1_pow: u32,
    den_exp: u32,
    cols: usize,
    slots: &[i64],
) -> Result<Vec<Vec<RadicalElem>>> {
    let nu = z0.nu();
    let t = z0.trunc();
    let field = z0.field().clone();
    let one = GaugeSeries::one(nu, &field, t);
    let zm1 = z0 - &one;
    let den = poly_at_gauge(&[rat_int(nu as i64), rat_int(-(nu as i64 - 1))], z0);
    let base = ser_mul(
        &ser_pow(&zm1, zm1_pow),
        &ser_pow(&ser_recip(&den)?, den_exp),
    )
    .truncate(t);

    let mut rows = vec![Vec::with_capacity(cols); slots.len()];
    let mut zc = z0.clone();
    for _ in 0..cols {
        let f = ser_mul(&zc, &base).truncate(t);
        for (row, &m) in slots.iter().enumerate() {
            let e = (nu as i64 - 1) * m;
            assert!(e <= t, "ansatz expansion shorter than its slot");
            rows[row].push(f.coeff(e).coeff(0, 0));
        }
        zc = ser_mul(&zc, z0).truncate(t);
    }
    Ok(rows)
}

/// The (3g−1)×(3g−1) matching system for the general ansatz
/// `z₀(z₀−1)(β₀ + β₁z₀ + …)/(ν−(ν−1)z₀)^{5g−1}`: row m, column c holds the
/// coefficient of `v^{(ν−1)m}` in the expansion of
/// `z₀^{c+1}(z₀−1)/(ν−(ν−1)z₀)^{5g−1}`.
pub fn ansatz_rows(nu: u32, g: u32) -> Result<Vec<Vec<RadicalElem>>> {
    assert!(g >= 1);
    let n = 3 * g as i64 - 1;
    let slots: Vec<i64> = (1..=n).collect();
    let z0 = z0_puiseux(nu, (nu as i64 - 1) * n)?;
    ansatz_matrix(&z0, 1, 5 * g - 1, n as usize, &slots)
}

/// The g×g reduced system (ν = 2 only) for the factored ansatz
/// `z₀(z₀−1)^{2g}(q₀ + q₁z₀ + …)/(2−z₀)^{5g−1}`, which needs ladder entries
/// m = 1…g only.
pub fn ansatz_rows_reduced(g: u32) -> Result<Vec<Vec<RadicalElem>>> {
    assert!(g >= 1);
    let slots: Vec<i64> = (1..=g as i64).collect();
    let z0 = z0_puiseux(2, g as i64)?;
    ansatz_matrix(&z0, 2 * g, 5 * g - 1, g as usize, &slots)
}

// ============================================================================
// Exact solve
// ============================================================================

/// Solves `rows · β = a` exactly over ℚ(θ) by Gaussian elimination and
/// insists the solution is componentwise rational.
///
/// # Errors
/// [`Error::SystemDefect`] for a singular system,
/// [`Error::NonRationalBeta`] when a solved coefficient keeps a θ-component,
/// [`Error::NotInvertible`] if a pivot is a zero divisor of the field.
pub fn solve_beta(a: &[RadicalElem], rows: &[Vec<RadicalElem>]) -> Result<Vec<Rational>> {
    let n = a.len();
    assert!(n > 0 && rows.len() == n && rows.iter().all(|r| r.len() == n));
    let mut m: Vec<Vec<RadicalElem>> = rows.to_vec();
    let mut rhs: Vec<RadicalElem> = a.to_vec();

    for col in 0..n {
        let piv = (col..n)
            .find(|&r| !m[r][col].is_zero())
            .ok_or_else(|| Error::SystemDefect(format!("singular system at column {col}")))?;
        m.swap(col, piv);
        rhs.swap(col, piv);
        let inv = m[col][col].inv()?;
        for r in col + 1..n {
            if m[r][col].is_zero() {
                continue;
            }
            let factor = &m[r][col] * &inv;
            for cc in col..n {
                let delta = &factor * &m[col][cc];
                m[r][cc] = &m[r][cc] - &delta;
            }
            let delta = &factor * &rhs[col];
            rhs[r] = &rhs[r] - &delta;
        }
    }

    let field = a[0].field().clone();
    let mut beta = vec![field.zero(); n];
    for row in (0..n).rev() {
        let mut acc = rhs[row].clone();
        for cc in row + 1..n {
            let delta = &m[row][cc] * &beta[cc];
            acc = &acc - &delta;
        }
        beta[row] = &acc * &m[row][row].inv()?;
    }

    beta.into_iter()
        .enumerate()
        .map(|(index, b)| {
            b.as_rational().cloned().ok_or_else(|| Error::NonRationalBeta {
                index,
                value: b.to_string(),
            })
        })
        .collect()
}

// ============================================================================
// Genus solution
// ============================================================================

/// One derived generating function
/// `z_g = z₀(z₀−1)P(z₀)/(ν−(ν−1)z₀)^{5g−1}` in exact form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GenusSolution {
    nu: u32,
    g: u32,
    /// Ascending coefficients of the degree-(3g−2) numerator polynomial P.
    beta: Vec<Rational>,
    /// For ν = 2: ascending coefficients of `Q_{g−1} = P/(z₀−1)^{2g−1}`.
    q: Option<Vec<Rational>>,
}

impl GenusSolution {
    pub fn nu(&self) -> u32 {
        self.nu
    }

    pub fn genus(&self) -> u32 {
        self.g
    }

    /// Coefficients of P (ascending, length 3g−1).
    pub fn beta(&self) -> &[Rational] {
        &self.beta
    }

    /// Reduced numerator Q (ν = 2 only; ascending, length g).
    pub fn q(&self) -> Option<&[Rational]> {
        self.q.as_deref()
    }

    /// Exponent 5g−1 of the `(ν−(ν−1)z₀)` denominator.
    pub fn den_exponent(&self) -> u32 {
        5 * self.g - 1
    }

    /// The solution as an evaluatable rational function of z₀.
    pub fn to_genfun(&self) -> GenFunExpr {
        let num = qp_mul(&qp_mul(&[Rational::zero(), Rational::one()], &[rat_int(-1), rat_int(1)]), &self.beta);
        let den = qp_pow(
            &[rat_int(self.nu as i64), rat_int(-(self.nu as i64 - 1))],
            (5 * self.g - 1) as usize,
        );
        GenFunExpr::pure_rational(RationalFunc::new(num, den).expect("nonzero denominator"))
            .expect("denominator regular at z0 = 1")
    }

    pub fn to_json(&self) -> serde_json::Value {
        use crate::exactnum::rat_to_string;
        let mut v = serde_json::json!({
            "nu": self.nu,
            "genus": self.g,
            "den_exponent": self.den_exponent(),
            "beta": self.beta.iter().map(rat_to_string).collect::<Vec<_>>(),
        });
        if let Some(q) = &self.q {
            v["q"] = serde_json::json!(q.iter().map(rat_to_string).collect::<Vec<_>>());
        }
        v
    }
}

/// Divides P by `(z₀−1)^{e}` exactly.
///
/// # Errors
/// [`Error::NonzeroRemainder`] if the division is not exact.
pub fn q_factor(beta: &[Rational], e: u32) -> Result<QPoly> {
    let den = qp_pow(&[rat_int(-1), rat_int(1)], e as usize);
    let (quot, rem) = qp_divmod(beta, &den);
    if !rem.is_empty() {
        return Err(Error::NonzeroRemainder(format!(
            "numerator is not divisible by (z0 - 1)^{e}"
        )));
    }
    Ok(quot)
}

/// Verifies that z₀ = 1 is a root of z_g of multiplicity at least
/// ⌈2g/(ν−1)⌉, counting the explicit `(z₀−1)` ansatz factor plus whatever
/// P carries on top.
pub fn divisibility_check(sol: &GenusSolution) -> Result<()> {
    let d = sol.nu as i64 - 1;
    let need = (2 * sol.g as i64 + d - 1).div_euclid(d);
    let have = 1 + zm1_multiplicity(&sol.beta) as i64;
    if have < need {
        return Err(Error::SystemDefect(format!(
            "genus-{} numerator carries (z0 - 1)^{have}, below the forced (z0 - 1)^{need}",
            sol.g
        )));
    }
    Ok(())
}

/// Multiplicity of the root z₀ = 1 in the numerator polynomial P.
pub fn zm1_multiplicity(beta: &[Rational]) -> u32 {
    let mut p = qp_trim(beta.to_vec());
    let mut mult = 0;
    loop {
        if p.is_empty() || !qp_eval(&p, &Rational::one()).is_zero() {
            return mult;
        }
        let (quot, rem) = qp_divmod(&p, &[rat_int(-1), rat_int(1)]);
        debug_assert!(rem.is_empty());
        p = quot;
        mult += 1;
    }
}

/// Full derivation for one genus: extract the ladder, build the system,
/// verify its triangular structure entry-wise, solve, and (ν = 2) factor
/// the numerator.
///
/// `reduced` selects the ν=2 factored ansatz, which reads orbit orders only
/// up to 5g−2.
pub fn derive_zg(e: &CmExpansion, g: u32, reduced: bool) -> Result<GenusSolution> {
    assert!(g >= 1, "genus-0 data lives in the planar solution");
    let nu = e.nu();
    assert!(!reduced || nu == 2, "reduced mode is specific to nu = 2");

    let (a, rows) = if reduced {
        let need = kmax_for_genus(2, g, true);
        if e.kmax() < need {
            return Err(Error::OrderTooSmall {
                need,
                have: e.kmax(),
                context: format!("reduced matching depth for genus {g}"),
            });
        }
        let a: Vec<RadicalElem> = (1..=g as i64)
            .map(|m| extract_slot(e, g, m))
            .collect::<Result<_>>()?;
        (a, ansatz_rows_reduced(g)?)
    } else {
        (extract_a(e, g)?, ansatz_rows(nu, g)?)
    };

    verify_triangular(nu, g, &rows, reduced)?;
    let solved = solve_beta(&a, &rows)?;

    let (beta, q) = if reduced {
        let beta = qp_mul(&qp_pow(&[rat_int(-1), rat_int(1)], 2 * g as usize - 1), &solved);
        (beta, Some(solved))
    } else {
        let q = if nu == 2 {
            Some(q_factor(&solved, 2 * g - 1)?)
        } else {
            None
        };
        (solved, q)
    };

    Ok(GenusSolution { nu, g, beta, q })
}

/// Entry-wise structural check of the matching system: strictly-upper
/// entries vanish and the diagonal is `∓p₁^m/ν^{5g−1}` (− for the general
/// ansatz, + for the reduced one), where p₁ is the leading Puiseux
/// coefficient of z₀.
fn verify_triangular(
    nu: u32,
    g: u32,
    rows: &[Vec<RadicalElem>],
    reduced: bool,
) -> Result<()> {
    let field = rows[0][0].field().clone();
    let c = field.radicand().clone();
    let p1 = field.theta_pow(nu - 1).scale(&(Rational::one() / &c));
    let nu_pow = Rational::from_integer(nu.into()).pow(5 * g as i32 - 1);
    let mut p1_pow = field.one();
    for (i, row) in rows.iter().enumerate() {
        p1_pow = &p1_pow * &p1;
        for (j, entry) in row.iter().enumerate() {
            if j > i && !entry.is_zero() {
                return Err(Error::SystemDefect(format!(
                    "upper entry ({i},{j}) of the matching system is nonzero"
                )));
            }
            if j == i {
                let mut expect = p1_pow.scale(&(Rational::one() / &nu_pow));
                if !reduced {
                    expect = -&expect;
                }
                if entry != &expect {
                    return Err(Error::SystemDefect(format!(
                        "diagonal entry {i} is {entry}, expected {expect}"
                    )));
                }
            }
        }
    }
    Ok(())
}

/// Re-expands the solved z_g along the Puiseux series of z₀ and compares
/// every coefficient against the orbit ladder — including slots beyond the
/// 3g−1 used in the solve. Returns the number of surplus slots checked.
pub fn overdetermination_check(e: &CmExpansion, sol: &GenusSolution) -> Result<usize> {
    let nu = sol.nu;
    let g = sol.g;
    let mtop = max_slot(e, g);
    assert!(mtop >= 1, "expansion holds no slots for this genus");
    let t = (nu as i64 - 1) * mtop;
    let z0 = z0_puiseux(nu, t)?;
    let field = z0.field().clone();
    let one = GaugeSeries::one(nu, &field, t);
    let den = poly_at_gauge(&[rat_int(nu as i64), rat_int(-(nu as i64 - 1))], &z0);
    let f = ser_mul(
        &ser_mul(&ser_mul(&z0, &(&z0 - &one)), &poly_at_gauge(&sol.beta, &z0)),
        &ser_pow(&ser_recip(&den)?, 5 * g - 1),
    );
    for m in 1..=mtop {
        let predicted = f.coeff((nu as i64 - 1) * m).coeff(0, 0);
        let measured = extract_slot(e, g, m)?;
        if predicted != measured {
            return Err(Error::SystemDefect(format!(
                "genus-{g} ladder entry m={m} disagrees with the solved form: \
                 orbit gives {measured}, form gives {predicted}"
            )));
        }
    }
    Ok((mtop - (3 * g as i64 - 1)).max(0) as usize)
}

// ============================================================================
// Partial fractions in w = ν − (ν−1)z₀
// ============================================================================

/// Rewrites a polynomial in z₀ as a polynomial in `w = ν − (ν−1)z₀`
/// (substituting `z₀ = (ν−w)/(ν−1)`).
pub fn substitute_w_for_z0(p: &[Rational], nu: u32) -> QPoly {
    let d = nu as i64 - 1;
    let lin = vec![rat(nu as i64, d), rat(-1, d)];
    let mut acc: QPoly = Vec::new();
    for c in p.iter().rev() {
        acc = qp_mul(&acc, &lin);
        if acc.is_empty() {
            acc.push(c.clone());
        } else {
            acc[0] += c;
        }
        acc = qp_trim(acc);
    }
    acc
}

/// The expansion `z_g/z₀ = Σ_k a_k·w^{−k}`, k = 2g…5g−1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartialFraction {
    g: u32,
    k_lo: i64,
    /// `coeffs[i]` is the coefficient of `w^{−(k_lo + i)}`.
    coeffs: Vec<Rational>,
}

impl PartialFraction {
    /// Inclusive range of represented inverse powers.
    pub fn k_range(&self) -> (i64, i64) {
        (self.k_lo, self.k_lo + self.coeffs.len() as i64 - 1)
    }

    /// Coefficient of `w^{−k}` (zero outside the stored range).
    pub fn coeff(&self, k: i64) -> Rational {
        if k < self.k_lo || k >= self.k_lo + self.coeffs.len() as i64 {
            return Rational::zero();
        }
        self.coeffs[(k - self.k_lo) as usize].clone()
    }

    /// The top coefficient (of `w^{−(5g−1)}`), the quantity driven by the
    /// quadratic recursion.
    pub fn top(&self) -> &Rational {
        self.coeffs.last().expect("non-empty ladder")
    }

    pub fn to_json(&self) -> serde_json::Value {
        use crate::exactnum::rat_to_string;
        serde_json::json!({
            "k_lo": self.k_lo,
            "coeffs": self.coeffs.iter().map(rat_to_string).collect::<Vec<_>>(),
        })
    }
}

/// Expands `z_g/z₀ = (z₀−1)P(z₀)/w^{5g−1}` into the inverse-power ladder.
pub fn partial_fraction(sol: &GenusSolution) -> PartialFraction {
    let num = qp_mul(&[rat_int(-1), rat_int(1)], &sol.beta);
    let n_w = substitute_w_for_z0(&num, sol.nu);
    let top_k = 5 * sol.g as i64 - 1;
    let deg = qp_deg(&n_w).expect("nonzero numerator") as i64;
    // a_{top_k − j} = coefficient of w^j; reverse into ascending k.
    let coeffs: Vec<Rational> = n_w.iter().rev().cloned().collect();
    PartialFraction {
        g: sol.g,
        k_lo: top_k - deg,
        coeffs,
    }
}

// ============================================================================
// Top-coefficient recursion
// ============================================================================

/// Seed of the top-coefficient recursion: the genus-1 top equals ν²/6.
pub fn recursion_seed(nu: u32) -> Rational {
    rat((nu as i64) * (nu as i64), 6)
}

/// Predicts the genus-(G+1) top coefficient from the tops of genera 1…G:
/// `top_{G+1} = ν³(25G²−1)/6 · top_G + ν/2 · Σ_{m=1}^{G} top_m·top_{G−m+1}`.
pub fn recursion_next(nu: u32, tops: &[Rational]) -> Rational {
    let g = tops.len() as i64;
    assert!(g >= 1, "recursion needs at least the genus-1 seed");
    let n = nu as i64;
    let linear = rat(n * n * n * (25 * g * g - 1), 6) * &tops[(g - 1) as usize];
    let mut quad = Rational::zero();
    for m in 1..=g {
        quad += &tops[(m - 1) as usize] * &tops[(g - m) as usize];
    }
    linear + quad * rat(n, 2)
}

/// Verifies `tops[0] = ν²/6` and each successive top against the quadratic
/// recursion; `tops[i]` is the genus-(i+1) top coefficient.
pub fn recursion_check(nu: u32, tops: &[Rational]) -> Result<()> {
    if tops.is_empty() {
        return Ok(());
    }
    if tops[0] != recursion_seed(nu) {
        return Err(Error::SystemDefect(format!(
            "genus-1 top coefficient {} differs from the seed {}",
            tops[0],
            recursion_seed(nu)
        )));
    }
    for g in 1..tops.len() {
        let predicted = recursion_next(nu, &tops[..g]);
        if predicted != tops[g] {
            return Err(Error::SystemDefect(format!(
                "top-coefficient recursion fails at genus {}: expected {}, got {}",
                g + 1,
                predicted,
                tops[g]
            )));
        }
    }
    Ok(())
}

// ============================================================================
// Real-root isolation (Sturm sequences)
// ============================================================================

/// An isolating interval `[lo, hi]` around a single real root, with exact
/// rational endpoints. A degenerate interval (lo = hi) pins an exact
/// rational root.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootInterval {
    lo: Rational,
    hi: Rational,
}

impl RootInterval {
    pub fn lo(&self) -> &Rational {
        &self.lo
    }

    pub fn hi(&self) -> &Rational {
        &self.hi
    }

    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn midpoint_f64(&self) -> f64 {
        let mid = (&self.lo + &self.hi) / rat_int(2);
        use num_traits::ToPrimitive;
        mid.to_f64().unwrap_or(f64::NAN)
    }

    pub fn contains(&self, x: &Rational) -> bool {
        &self.lo <= x && x <= &self.hi
    }
}

fn sturm_chain(p: &QPoly) -> Vec<QPoly> {
    let mut chain = vec![p.clone(), qp_derivative(p)];
    loop {
        let len = chain.len();
        if chain[len - 1].is_empty() {
            chain.pop();
            return chain;
        }
        let (_, rem) = qp_divmod(&chain[len - 2], &chain[len - 1]);
        chain.push(rem.iter().map(|c| -c).collect());
    }
}

fn sign_variations(chain: &[QPoly], x: &Rational) -> usize {
    let mut last = 0i32;
    let mut v = 0usize;
    for p in chain {
        let s = qp_sign_at(p, x);
        if s != 0 {
            if last != 0 && s != last {
                v += 1;
            }
            last = s;
        }
    }
    v
}

/// Number of distinct real roots in the half-open interval (lo, hi].
fn roots_in(chain: &[QPoly], lo: &Rational, hi: &Rational) -> usize {
    sign_variations(chain, lo) - sign_variations(chain, hi)
}

/// Bisection threshold for isolating intervals: 2⁻⁴⁸ ≈ 3.6·10⁻¹⁵.
fn root_width_limit() -> Rational {
    rat(1, 1i64 << 48)
}

/// Isolates every real root of the polynomial into pairwise-disjoint
/// rational intervals of width ≤ 2⁻⁴⁸, sorted in increasing order, after
/// proving by Sturm count that all roots of its squarefree part are real.
///
/// # Errors
/// [`Error::NonRealRoot`] when the Sturm count over the full real line
/// falls short of the squarefree degree.
pub fn q_roots(q: &[Rational]) -> Result<Vec<RootInterval>> {
    let p = qp_trim(q.to_vec());
    let deg = match qp_deg(&p) {
        Some(d) if d >= 1 => d,
        _ => return Ok(Vec::new()),
    };
    let sf = if deg == 1 {
        p.clone()
    } else {
        let gcd = qp_gcd(&p, &qp_derivative(&p));
        qp_divmod(&p, &gcd).0
    };
    let sdeg = qp_deg(&sf).expect("squarefree part of a nonconstant polynomial");

    // Cauchy bound: all roots lie strictly inside |x| < 1 + max|a_i/a_d|.
    let lead = sf.last().expect("nonzero").clone();
    let mut bound = Rational::one();
    for c in &sf[..sdeg] {
        let ratio = (c / &lead).abs();
        if ratio > bound {
            bound = ratio;
        }
    }
    bound += Rational::one();

    let chain = sturm_chain(&sf);
    let total = roots_in(&chain, &(-&bound), &bound);
    if total < sdeg {
        return Err(Error::NonRealRoot(format!(
            "only {total} of {sdeg} roots of {} are real",
            qp_display(&sf, "x")
        )));
    }

    // Split until each interval isolates exactly one root.
    let mut pending = vec![(-&bound, bound.clone(), total)];
    let mut isolated: Vec<RootInterval> = Vec::new();
    while let Some((lo, hi, count)) = pending.pop() {
        if count == 0 {
            continue;
        }
        let mid = (&lo + &hi) / rat_int(2);
        if qp_eval(&sf, &mid).is_zero() {
            isolated.push(RootInterval {
                lo: mid.clone(),
                hi: mid.clone(),
            });
            let left = roots_in(&chain, &lo, &mid) - 1;
            pending.push((lo, mid.clone(), left));
            pending.push((mid, hi, count - 1 - left));
            continue;
        }
        if count == 1 {
            // Refine by bisection, keeping the root strictly inside.
            let (mut lo, mut hi) = (lo, hi);
            let limit = root_width_limit();
            while &hi - &lo > limit {
                let mid = (&lo + &hi) / rat_int(2);
                if qp_eval(&sf, &mid).is_zero() {
                    lo = mid.clone();
                    hi = mid;
                    break;
                }
                if roots_in(&chain, &lo, &mid) == 1 {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            isolated.push(RootInterval { lo, hi });
            continue;
        }
        let left = roots_in(&chain, &lo, &mid);
        pending.push((lo, mid.clone(), left));
        pending.push((mid, hi, count - left));
    }

    isolated.sort_by(|a, b| a.lo.cmp(&b.lo));
    Ok(isolated)
}

/// Strict interlacing test: expects one more outer root than inner, with
/// `outer[i] < inner[i] < outer[i+1]` certified by disjoint intervals.
pub fn check_interlacing(inner: &[RootInterval], outer: &[RootInterval]) -> bool {
    if inner.len() + 1 != outer.len() {
        return false;
    }
    (0..inner.len())
        .all(|i| outer[i].hi < inner[i].lo && inner[i].hi < outer[i + 1].lo)
}

// ============================================================================
// Tests
// ============================================================================

//! The string equation and its planar solution z₀.
//!
//! The even-valence string equation at unit scale is
//!
//! ```text
//! 1 = z₀ + C·ρ·z₀^ν,        C = C(2ν−1, ν−1),
//! ```
//!
//! where ρ is the coupling; the 3-valent analogue is `1 = z₀² − 72t²z₀³`.
//! This module solves both in the two regimes the pipeline needs:
//!
//! - [`z0_puiseux`] — large-argument Puiseux expansion on the gauge grid,
//!   with ρ growing like `n^{ν−1}` (coefficients in ℚ(C^{1/ν}), used by the
//!   genus matching);
//! - [`z0_coupling_series`] — Taylor series around zero coupling with
//!   `z₀(0) = 1` (rational coefficients, used for count extraction);
//! - [`z0_closed_nu2`] — the exact ν=2 closed form
//!   `z₀ = (−1 + √(1+12αr))/(6αr)` as a radical-field element.
//!
//! All coupling-variable conventions are centralized here: the 4-valent
//! no-leg pipeline uses `s = −r/4` ([`z0_quartic_s_series`]) and the
//! 3-valent pipeline uses `t` directly.

use num_traits::{One, Signed, Zero};

use crate::exactnum::{binomial, rat_int, ParamPoly, RadicalElem, RadicalField, Rational};
use crate::series::{ser_mul, ser_pow, ser_recip, CouplingSeries, GaugeSeries};
use crate::{Error, Result};

/// Which string equation to solve.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum StringEquationSpec {
    /// `1 = z₀ + C(2ν−1, ν−1)·ρ·z₀^ν` (valence 2ν, unit scale).
    EvenValence { nu: u32 },
    /// `1 = z₀² − 72·t²·z₀³`.
    Trivalent,
}

impl StringEquationSpec {
    /// The binomial constant C for the even-valence case.
    pub fn binomial_constant(&self) -> Rational {
        match self {
            StringEquationSpec::EvenValence { nu } => {
                binomial(2 * *nu as u64 - 1, *nu as u64 - 1)
            }
            StringEquationSpec::Trivalent => rat_int(-72),
        }
    }
}

// ============================================================================
// Puiseux regime (gauge grid)
// ============================================================================

/// Newton–Puiseux expansion of z₀ on the gauge grid, where the coupling
/// grows like `n^{ν−1}`: solving `1 = z + C·n^{ν−1}·z^ν` for large n gives
/// `z₀ = Σ a_i·n^{−i/ν}` with `a_i ∈ ℚ(θ)`, `θ = C^{1/ν}`, and `a_i = 0`
/// unless `i` is a multiple of ν−1... precisely, unless `i ≡ ν−1 (mod ν(ν−1))`
/// scaled down to the `v = n^{−(ν−1)/ν}` subgrid: only exponents that are
/// multiples of ν−1 appear.
///
/// Internally the equation is normalized by `z₀ = p₁·v·W` with
/// `p₁ = θ^{ν−1}/C` and `v = u^{ν−1}`; since `C·p₁^ν = 1` the equation
/// becomes `W^ν = 1 − p₁·v·W`, whose exponents never leave the grid, and a
/// doubling Newton iteration solves it from `W = 1`.
///
/// # Errors
/// [`Error::OrderTooSmall`] when `order < ν−1` (not even the leading
/// exponent fits).
pub fn z0_puiseux(nu: u32, order: i64) -> Result<GaugeSeries> {
    assert!(nu >= 2, "valence parameter must be at least 2");
    let lead = nu as i64 - 1;
    if order < lead {
        return Err(Error::OrderTooSmall {
            need: lead,
            have: order,
            context: "leading Puiseux exponent of z0".into(),
        });
    }
    let c = binomial(2 * nu as u64 - 1, nu as u64 - 1);
    let field = RadicalField::new(nu as usize, c.clone());
    let p1 = field
        .theta_pow(nu - 1)
        .scale(&(Rational::one() / &c));
    let p1v = |trunc: i64| {
        if trunc < lead {
            // Window too short to hold the monomial: it contributes nothing.
            GaugeSeries::zero(nu, &field, 0, trunc)
        } else {
            GaugeSeries::monomial(nu, lead, ParamPoly::constant(p1.clone()), trunc)
        }
    };

    // Newton on G(W) = W^ν + p₁vW − 1, G′(W) = νW^{ν−1} + p₁v, from W = 1.
    let target = order - lead;
    let mut w = GaugeSeries::one(nu, &field, 0);
    let mut known = 0i64;
    while known < target {
        known = (2 * known + 1).min(target);
        let wc = w.with_claimed_trunc(known);
        let g = &(&ser_pow(&wc, nu) + &ser_mul(&wc, &p1v(known + lead)).truncate(known))
            - &GaugeSeries::one(nu, &field, known);
        let g_prime = &ser_pow(&wc, nu - 1).scale(&rat_int(nu as i64))
            + &p1v(known).truncate(known);
        let delta = ser_mul(&g, &ser_recip(&g_prime)?);
        w = (&wc - &delta.truncate(known.min(delta.trunc()))).truncate(known);
    }

    let z0 = ser_mul(&w, &p1v(order)).truncate(order);

    // Defining-property re-check in the normalized form.
    let w_check = &(&ser_pow(&w, nu) + &ser_mul(&w, &p1v(target + lead)).truncate(target))
        - &GaugeSeries::one(nu, &field, target);
    if !w_check.is_zero() {
        return Err(Error::SystemDefect(
            "Puiseux solution fails its defining equation".into(),
        ));
    }
    Ok(z0)
}

// ============================================================================
// Coupling regime (Taylor series at zero coupling)
// ============================================================================

/// Multiplies a coupling series by `coupling^k` (shift up by k slots); the
/// result stays on the same truncation window.
fn shift_up(s: &CouplingSeries, k: usize) -> CouplingSeries {
    let j = s.order();
    let mut out = vec![Rational::zero(); j + 1];
    for i in k..=j {
        out[i] = s.coeff(i - k).clone();
    }
    CouplingSeries::new(out)
}

/// Taylor expansion of z₀ around zero coupling with `z₀(0) = 1`, by a
/// doubling Newton iteration on the defining polynomial.
pub fn z0_coupling_series(spec: StringEquationSpec, j_order: usize) -> CouplingSeries {
    // F(Z) and F′(Z) in the power-series ring; both regular at Z = 1.
    let f_and_fprime = |z: &CouplingSeries| -> (CouplingSeries, CouplingSeries) {
        match spec {
            StringEquationSpec::EvenValence { nu } => {
                let c = spec.binomial_constant();
                let zn = z.pow(nu as i64).expect("nonnegative power");
                let znm1 = z.pow(nu as i64 - 1).expect("nonnegative power");
                let f = &(z + &shift_up(&zn, 1).scale(&c)) - &CouplingSeries::one(z.order());
                let fp = &CouplingSeries::one(z.order())
                    + &shift_up(&znm1, 1).scale(&(&c * rat_int(nu as i64)));
                (f, fp)
            }
            StringEquationSpec::Trivalent => {
                let z2 = z.pow(2).expect("square");
                let z3 = z.pow(3).expect("cube");
                let f = &(&z2 - &shift_up(&z3, 2).scale(&rat_int(72)))
                    - &CouplingSeries::one(z.order());
                let fp = &z.scale(&rat_int(2)) - &shift_up(&z2, 2).scale(&rat_int(216));
                (f, fp)
            }
        }
    };

    let mut z = CouplingSeries::one(0);
    let mut known = 0usize;
    while known < j_order {
        known = (2 * known + 1).min(j_order);
        let mut padded = z.coeffs().to_vec();
        padded.resize(known + 1, Rational::zero());
        z = CouplingSeries::new(padded);
        let (f, fp) = f_and_fprime(&z);
        let delta = &f * &fp.recip().expect("F' is a unit at Z(0) = 1");
        z = &z - &delta;
    }
    debug_assert!(f_and_fprime(&z).0.coeffs().iter().all(Rational::is_zero));
    z
}

/// The 4-valent no-leg coupling series: z₀ as a series in `s = −r/4`
/// (equivalently the solution of `1 = z₀ − 12s·z₀²`), obtained from the
/// r-series by the substitution `r → −4s`.
pub fn z0_quartic_s_series(j_order: usize) -> CouplingSeries {
    let z_r = z0_coupling_series(StringEquationSpec::EvenValence { nu: 2 }, j_order);
    substitute_scaled_coupling(&z_r, &rat_int(-4))
}

/// Substitutes `coupling → factor · coupling'` term by term.
pub fn substitute_scaled_coupling(s: &CouplingSeries, factor: &Rational) -> CouplingSeries {
    let mut scale = Rational::one();
    let coeffs = s
        .coeffs()
        .iter()
        .map(|c| {
            let out = c * &scale;
            scale *= factor;
            out
        })
        .collect();
    CouplingSeries::new(coeffs)
}

// ============================================================================
// Closed form (ν = 2)
// ============================================================================

/// Exact ν=2 planar root `z₀ = (−1 + √(1 + 12αr))/(6αr)` as an element of
/// ℚ(√(1+12αr)), taking the branch with `z₀(0) = 1`; the removable point
/// `αr = 0` returns exactly 1 (the defining quadratic degenerates to
/// `z₀ = 1` there).
///
/// # Errors
/// [`Error::BranchCut`] when `αr ≤ −1/12` (the square root leaves the real
/// branch on that ray).
pub fn z0_closed_nu2(r: &Rational, alpha: &Rational) -> Result<RadicalElem> {
    let ar = alpha * r;
    let disc = rat_int(1) + rat_int(12) * &ar;
    if !disc.is_positive() {
        return Err(Error::BranchCut(ar.to_string()));
    }
    if ar.is_zero() {
        let field = RadicalField::new(2, Rational::one());
        return Ok(field.one());
    }
    let field = RadicalField::new(2, disc);
    let scale = Rational::one() / (rat_int(6) * &ar);
    field.from_coeffs(vec![-&scale, scale])
}

// ============================================================================
// Tests
// ============================================================================

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::rat;
    use crate::genfun::{GenFunExpr, RationalFunc};
    use crate::series::{cs_compose, gen_binomial};
    use proptest::prelude::*;

    #[test]
    fn quartic_coupling_series_values() {
        let z = z0_coupling_series(StringEquationSpec::EvenValence { nu: 2 }, 3);
        assert_eq!(
            z.coeffs(),
            &[rat_int(1), rat_int(-3), rat_int(18), rat_int(-135)]
        );
        let z0 = z0_coupling_series(StringEquationSpec::EvenValence { nu: 2 }, 0);
        assert_eq!(z0.coeffs(), &[rat_int(1)]);
    }

    #[test]
    fn quartic_coupling_series_matches_binomial_expansion() {
        // Independent oracle: z₀ = (−1 + (1+12r)^{1/2})/(6r) expanded by the
        // generalized binomial series: coeff_j = C(1/2, j+1)·12^{j+1}/6.
        let j_max = 9usize;
        let z = z0_coupling_series(StringEquationSpec::EvenValence { nu: 2 }, j_max);
        let mut pow12 = rat_int(12);
        for j in 0..=j_max {
            let expected = gen_binomial(&rat(1, 2), j as u64 + 1) * &pow12 / rat_int(6);
            assert_eq!(z.coeff(j), &expected, "order {j}");
            pow12 *= rat_int(12);
        }
    }

    #[test]
    fn trivalent_coupling_series() {
        let z = z0_coupling_series(StringEquationSpec::Trivalent, 5);
        assert_eq!(z.coeff(0), &rat_int(1));
        assert_eq!(z.coeff(2), &rat_int(36));
        assert!(z.coeff(1).is_zero() && z.coeff(3).is_zero() && z.coeff(5).is_zero());
        // Residual of 1 = Z² − 72t²Z³ vanishes identically.
        let z2 = z.pow(2).unwrap();
        let z3 = z.pow(3).unwrap();
        let resid = &(&z2 - &shift_up(&z3, 2).scale(&rat_int(72))) - &CouplingSeries::one(5);
        assert!(resid.coeffs().iter().all(Rational::is_zero));
    }

    #[test]
    fn quartic_s_series() {
        // z₀(s) solves 1 = z₀ − 12s·z₀²: 1 + 12s + 288s² + …
        let z = z0_quartic_s_series(2);
        assert_eq!(z.coeffs(), &[rat_int(1), rat_int(12), rat_int(288)]);
    }

    #[test]
    fn puiseux_quartic_leading_coefficients() {
        // Oracle from the large-argument binomial expansion of the closed
        // form: a₁ = θ/3, a₂ = −1/6, a_{1+2k} = (θ/3)·C(1/2,k)/12^k, even
        // indices beyond 2 vanish.
        let z = z0_puiseux(2, 8).unwrap();
        let f = z.field().clone();
        let coeff = |e: i64| z.coeff(e);
        let theta_over = |num: Rational| ParamPoly::constant(f.theta_pow(1).scale(&num));
        assert_eq!(coeff(1), theta_over(rat(1, 3)));
        assert_eq!(coeff(2), ParamPoly::constant(f.from_rational(rat(-1, 6))));
        assert_eq!(coeff(3), theta_over(rat(1, 72)));
        assert_eq!(coeff(5), theta_over(rat(-1, 3456)));
        assert_eq!(coeff(7), theta_over(rat(1, 82944)));
        assert!(coeff(4).is_zero() && coeff(6).is_zero() && coeff(8).is_zero());
    }

    #[test]
    fn puiseux_sextic_support() {
        // ν=3: only exponents that are multiples of 2 carry coefficients,
        // and the leading coefficient is θ²/10 at exponent 2.
        let z = z0_puiseux(3, 13).unwrap();
        let f = z.field().clone();
        assert_eq!(
            z.coeff(2),
            ParamPoly::constant(f.theta_pow(2).scale(&rat(1, 10)))
        );
        for e in 0..=13i64 {
            if e % 2 == 1 {
                assert!(z.coeff(e).is_zero(), "odd exponent {e}");
            }
        }
        assert!(!z.coeff(4).is_zero());
    }

    #[test]
    fn puiseux_order_guard() {
        assert!(matches!(
            z0_puiseux(3, 1),
            Err(Error::OrderTooSmall { need: 2, have: 1, .. })
        ));
    }

    #[test]
    fn closed_form_values() {
        // α=1, r=1: (−1+√13)/6.
        let v = z0_closed_nu2(&rat_int(1), &rat_int(1)).unwrap();
        assert_eq!(v.field().radicand(), &rat_int(13));
        assert_eq!(v.coeffs(), &[rat(-1, 6), rat(1, 6)]);
        // Zero-coupling limit is exactly 1.
        let one = z0_closed_nu2(&rat_int(0), &rat_int(1)).unwrap();
        assert!(one.is_one());
        // Branch-cut guard.
        assert!(matches!(
            z0_closed_nu2(&rat(-1, 12), &rat_int(1)),
            Err(Error::BranchCut(_))
        ));
        assert!(z0_closed_nu2(&rat(-1, 13), &rat_int(1)).is_ok());
    }

    #[test]
    fn derivative_identity_even() {
        // d z₀/dρ = −C·z₀^{ν+1}/(ν − (ν−1)z₀) composed with the series.
        for nu in [2u32, 3] {
            let j = 8usize;
            let c = binomial(2 * nu as u64 - 1, nu as u64 - 1);
            let z = z0_coupling_series(StringEquationSpec::EvenValence { nu }, j);
            let deriv: Vec<Rational> = (1..=j)
                .map(|i| z.coeff(i) * rat_int(i as i64))
                .collect();
            let mut num = vec![Rational::zero(); nu as usize + 2];
            num[nu as usize + 1] = -c;
            let den = vec![rat_int(nu as i64), rat_int(-(nu as i64 - 1))];
            let rhs = cs_compose(
                &GenFunExpr::pure_rational(RationalFunc::new(num, den).unwrap()).unwrap(),
                &z.truncated(j - 1),
            )
            .unwrap();
            assert_eq!(&deriv[..], rhs.coeffs(), "nu = {nu}");
        }
    }

    proptest! {
        #[test]
        fn closed_form_satisfies_quadratic(
            rn in -8i64..=60, rd in 1i64..=12, an in 1i64..=6, ad in 1i64..=6,
        ) {
            let r = rat(rn, rd);
            let alpha = rat(an, ad);
            let ar = &alpha * &r;
            prop_assume!(ar > rat(-1, 12));
            let z = z0_closed_nu2(&r, &alpha).unwrap();
            let field = z.field().clone();
            // 3αr·z₀² + z₀ − 1 = 0 exactly.
            let residual = &(&(&z * &z).scale(&(rat_int(3) * &ar)) + &z) - &field.one();
            prop_assert!(residual.is_zero());
        }
    }
}

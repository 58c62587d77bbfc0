//! Generating-function expressions and exact map-count tables.
//!
//! A generating function here is a rational function of the planar root z₀
//! plus an optional list of logarithmic terms `coef · ln(arg(z₀))`:
//!
//! - [`RationalFunc`] — quotient of two ℚ[z₀] polynomials.
//! - [`GenFunExpr`] — rational part plus log terms; the shape taken by every
//!   genus-g generating function handled by this crate.
//! - [`CountTable`] — rows of exact per-vertex-count map counts produced by
//!   composing a [`GenFunExpr`] with the coupling expansion of z₀.
//!
//! Expansion points sit at z₀ = 1 (zero coupling), so expressions must be
//! regular there: denominators nonzero at 1 and log arguments equal to 1
//! there.  Count extraction lives in this module; the coupling expansions of
//! z₀ themselves come from `stringeq`.

use num_traits::{One, Zero};
use serde_json::{json, Value};

use crate::exactnum::{rat_from_str, rat_to_string, Rational};
use crate::polyq;
use crate::{Error, Result};

// ============================================================================
// Rational functions of z₀
// ============================================================================

/// Quotient `num(z₀)/den(z₀)` of polynomials over ℚ.
///
/// Invariant: `den` is not the zero polynomial.  The representation is kept
/// as constructed (no automatic gcd reduction); equality of mathematical
/// values is tested with [`RationalFunc::equivalent`].
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RationalFunc {
    num: Vec<Rational>,
    den: Vec<Rational>,
}

impl RationalFunc {
    /// Builds `num/den`; coefficients ascending in z₀.
    ///
    /// # Errors
    /// [`Error::DivisionByZero`] when `den` is identically zero.
    pub fn new(num: Vec<Rational>, den: Vec<Rational>) -> Result<Self> {
        let num = polyq::qp_trim(num);
        let den = polyq::qp_trim(den);
        if den.is_empty() {
            return Err(Error::DivisionByZero);
        }
        Ok(RationalFunc { num, den })
    }

    /// A polynomial, as the quotient `num/1`.
    pub fn from_poly(num: Vec<Rational>) -> Self {
        RationalFunc {
            num: polyq::qp_trim(num),
            den: vec![Rational::one()],
        }
    }

    /// Numerator coefficients (ascending, trimmed).
    pub fn num(&self) -> &[Rational] {
        &self.num
    }

    /// Denominator coefficients (ascending, trimmed).
    pub fn den(&self) -> &[Rational] {
        &self.den
    }

    /// Exact value at a rational point.
    ///
    /// # Errors
    /// [`Error::SingularPoint`] when the denominator vanishes at `x`.
    pub fn eval(&self, x: &Rational) -> Result<Rational> {
        let d = polyq::qp_eval(&self.den, x);
        if d.is_zero() {
            return Err(Error::SingularPoint(format!(
                "denominator vanishes at {}",
                rat_to_string(x)
            )));
        }
        Ok(polyq::qp_eval(&self.num, x) / d)
    }

    /// True iff the two quotients represent the same function
    /// (cross-multiplication identity `num_a·den_b = num_b·den_a`).
    pub fn equivalent(&self, other: &RationalFunc) -> bool {
        polyq::qp_mul(&self.num, &other.den) == polyq::qp_mul(&other.num, &self.den)
    }

    /// Sum of two quotients over the product denominator.
    pub fn add(&self, other: &RationalFunc) -> RationalFunc {
        RationalFunc {
            num: polyq::qp_add(
                &polyq::qp_mul(&self.num, &other.den),
                &polyq::qp_mul(&other.num, &self.den),
            ),
            den: polyq::qp_mul(&self.den, &other.den),
        }
    }

    /// Scales the numerator by a rational constant.
    pub fn scale(&self, s: &Rational) -> RationalFunc {
        RationalFunc {
            num: polyq::qp_scale(&self.num, s),
            den: self.den.clone(),
        }
    }

    /// Human-readable `num/den` form in the variable `z0`.
    pub fn display(&self) -> String {
        if self.den.len() == 1 && self.den[0].is_one() {
            polyq::qp_display(&self.num, "z0")
        } else {
            format!(
                "({}) / ({})",
                polyq::qp_display(&self.num, "z0"),
                polyq::qp_display(&self.den, "z0")
            )
        }
    }
}

/// One logarithmic term `coef · ln(arg(z₀))`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LogTerm {
    coef: Rational,
    arg: RationalFunc,
}

impl LogTerm {
    /// Builds `coef · ln(arg)`.
    pub fn new(coef: Rational, arg: RationalFunc) -> Self {
        LogTerm { coef, arg }
    }

    /// The rational prefactor.
    pub fn coef(&self) -> &Rational {
        &self.coef
    }

    /// The log argument as a rational function of z₀.
    pub fn arg(&self) -> &RationalFunc {
        &self.arg
    }
}

/// Generating function: rational part plus logarithmic terms.
///
/// Invariants (checked at construction): every denominator — of the rational
/// part and of each log argument — is nonzero at z₀ = 1, and every log
/// argument equals exactly 1 at z₀ = 1, so the expression is regular at the
/// zero-coupling point and its logs expand from ln 1 = 0.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct GenFunExpr {
    rat: RationalFunc,
    logs: Vec<LogTerm>,
}

impl GenFunExpr {
    /// Builds and validates an expression.
    ///
    /// # Errors
    /// [`Error::SingularPoint`] when a denominator vanishes at z₀ = 1 or a
    /// log argument differs from 1 there.
    pub fn new(rat: RationalFunc, logs: Vec<LogTerm>) -> Result<Self> {
        rat.eval(&Rational::one())?;
        for term in &logs {
            let v = term.arg.eval(&Rational::one())?;
            if !v.is_one() {
                return Err(Error::SingularPoint(format!(
                    "log argument equals {} (expected 1) at z0 = 1",
                    rat_to_string(&v)
                )));
            }
        }
        Ok(GenFunExpr { rat, logs })
    }

    /// Expression with no log terms.
    pub fn pure_rational(rat: RationalFunc) -> Result<Self> {
        Self::new(rat, vec![])
    }

    /// The rational part.
    pub fn rational(&self) -> &RationalFunc {
        &self.rat
    }

    /// The log terms.
    pub fn logs(&self) -> &[LogTerm] {
        &self.logs
    }

    /// True iff the two expressions are the same function: rational parts
    /// cross-multiply equal and log terms match pairwise in order.
    pub fn equivalent(&self, other: &GenFunExpr) -> bool {
        self.rat.equivalent(&other.rat)
            && self.logs.len() == other.logs.len()
            && self
                .logs
                .iter()
                .zip(&other.logs)
                .all(|(a, b)| a.coef == b.coef && a.arg.equivalent(&b.arg))
    }

    /// Human-readable rendering.
    pub fn display(&self) -> String {
        let mut out = self.rat.display();
        for t in &self.logs {
            out.push_str(&format!(
                " + {}*ln({})",
                rat_to_string(&t.coef),
                t.arg.display()
            ));
        }
        out
    }
}

// ============================================================================
// JSON serialization
// ============================================================================

fn poly_to_json(p: &[Rational]) -> Value {
    Value::Array(p.iter().map(|c| Value::String(rat_to_string(c))).collect())
}

fn poly_from_json(v: &Value) -> Result<Vec<Rational>> {
    v.as_array()
        .ok_or_else(|| Error::Parse("polynomial must be a JSON array".into()))?
        .iter()
        .map(|c| {
            c.as_str()
                .ok_or_else(|| Error::Parse("coefficient must be a string".into()))
                .and_then(rat_from_str)
        })
        .collect()
}

/// Serializes an expression as
/// `{"num": […], "den": […], "logs": [{"coef": …, "arg_num": […], "arg_den": […]}]}`
/// with polynomials as ascending arrays of `"p/q"` strings.
pub fn genfun_to_json(e: &GenFunExpr) -> Value {
    json!({
        "num": poly_to_json(&e.rat.num),
        "den": poly_to_json(&e.rat.den),
        "logs": e.logs.iter().map(|t| json!({
            "coef": rat_to_string(&t.coef),
            "arg_num": poly_to_json(&t.arg.num),
            "arg_den": poly_to_json(&t.arg.den),
        })).collect::<Vec<_>>(),
    })
}

/// Parses the JSON form produced by [`genfun_to_json`].
pub fn genfun_from_json(v: &Value) -> Result<GenFunExpr> {
    let obj = v
        .as_object()
        .ok_or_else(|| Error::Parse("expression must be a JSON object".into()))?;
    let num = poly_from_json(
        obj.get("num")
            .ok_or_else(|| Error::Parse("missing \"num\"".into()))?,
    )?;
    let den = poly_from_json(
        obj.get("den")
            .ok_or_else(|| Error::Parse("missing \"den\"".into()))?,
    )?;
    let mut logs = vec![];
    if let Some(arr) = obj.get("logs").and_then(Value::as_array) {
        for t in arr {
            let coef = rat_from_str(
                t.get("coef")
                    .and_then(Value::as_str)
                    .ok_or_else(|| Error::Parse("missing log \"coef\"".into()))?,
            )?;
            let arg_num = poly_from_json(
                t.get("arg_num")
                    .ok_or_else(|| Error::Parse("missing \"arg_num\"".into()))?,
            )?;
            let arg_den = poly_from_json(
                t.get("arg_den")
                    .ok_or_else(|| Error::Parse("missing \"arg_den\"".into()))?,
            )?;
            logs.push(LogTerm::new(coef, RationalFunc::new(arg_num, arg_den)?));
        }
    }
    GenFunExpr::new(RationalFunc::new(num, den)?, logs)
}


// ============================================================================
// Count tables
// ============================================================================

/// Map valence: even valence 2ν, or the 3-valent family.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Valence {
    /// Valence 2ν, ν ≥ 2.
    Even(u32),
    /// Valence 3.
    Trivalent,
}

impl Valence {
    /// One-vertex relabeling cardinality: (2ν)^j·j! legs in the even case,
    /// 3^j·j! in the 3-valent one; unlabeled × this = labeled.
    pub fn labeled_scale(&self, j: u32) -> Rational {
        let base = match self {
            Valence::Even(nu) => 2 * *nu as u64,
            Valence::Trivalent => 3,
        };
        let mut out = Rational::one();
        for i in 1..=j as u64 {
            out *= Rational::from_integer((base * i).into());
        }
        out
    }

    pub fn label(&self) -> String {
        match self {
            Valence::Even(nu) => format!("{}", 2 * nu),
            Valence::Trivalent => "3".into(),
        }
    }
}

/// Which enumeration a table belongs to: maps with two legs (z-family) or
/// maps without legs (e-family).
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Family {
    Z,
    E,
}

/// Exact per-vertex map counts for one genus.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CountTable {
    valence: Valence,
    family: Family,
    genus: u32,
    /// (vertex count j, unlabeled count).
    rows: Vec<(u32, Rational)>,
}

impl CountTable {
    /// Assembles a table from explicit rows; call [`CountTable::validate`]
    /// before trusting the contents.
    pub fn new(valence: Valence, family: Family, genus: u32, rows: Vec<(u32, Rational)>) -> Self {
        CountTable {
            valence,
            family,
            genus,
            rows,
        }
    }

    pub fn valence(&self) -> Valence {
        self.valence
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn genus(&self) -> u32 {
        self.genus
    }

    pub fn rows(&self) -> &[(u32, Rational)] {
        &self.rows
    }

    /// The count at vertex number j (zero when outside the stored rows).
    pub fn count(&self, j: u32) -> Rational {
        self.rows
            .iter()
            .find(|(jj, _)| *jj == j)
            .map(|(_, c)| c.clone())
            .unwrap_or_else(Rational::zero)
    }

    /// Structural invariants every emitted table must satisfy:
    /// - z-family counts are nonnegative integers;
    /// - counts vanish below the vertex floor, `j(ν−1) < 2g` (z-family) or
    ///   `j(ν−1) < 2g−1` (e-family), with ν = 3/2 for the 3-valent family;
    /// - 3-valent counts vanish for odd j;
    /// - unlabeled counts times the relabeling cardinality are integers.
    pub fn validate(&self) -> Result<()> {
        let g = self.genus as i64;
        for (j, c) in &self.rows {
            let j64 = *j as i64;
            // Vertex floor: j·(ν−1) against 2g (z) or 2g−1 (e), where the
            // 3-valent family has ν−1 = 1/2 (doubled to stay integral).
            let (lhs, rhs) = match (self.family, self.valence) {
                (Family::Z, Valence::Even(nu)) => (j64 * (nu as i64 - 1), 2 * g),
                (Family::E, Valence::Even(nu)) => (j64 * (nu as i64 - 1), 2 * g - 1),
                (Family::Z, Valence::Trivalent) => (j64, 2 * (2 * g)),
                (Family::E, Valence::Trivalent) => (j64, 2 * (2 * g - 1)),
            };
            let below_floor = lhs < rhs;
            let odd_trivalent = self.valence == Valence::Trivalent && j % 2 == 1;
            if (below_floor || odd_trivalent) && !c.is_zero() {
                return Err(Error::SlotViolation(format!(
                    "genus-{} count at j={j} must vanish but is {c}",
                    self.genus
                )));
            }
            if self.family == Family::Z {
                if !c.is_integer() || c < &Rational::zero() {
                    return Err(Error::SlotViolation(format!(
                        "two-leg count at j={j} is not a nonnegative integer: {c}"
                    )));
                }
            }
            let labeled = c * self.valence.labeled_scale(*j);
            if !labeled.is_integer() {
                return Err(Error::SlotViolation(format!(
                    "labeled genus-{} count at j={j} is not an integer: {labeled}",
                    self.genus
                )));
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> Value {
        json!({
            "valence": self.valence.label(),
            "family": match self.family { Family::Z => "z", Family::E => "e" },
            "genus": self.genus,
            "rows": self.rows.iter().map(|(j, c)| json!({"j": j, "count": rat_to_string(c)})).collect::<Vec<_>>(),
        })
    }
}

/// Two-leg counts: `count_j = (−1)^j·[ρ^j](f ∘ z₀(ρ))` for j = 1…jmax.
pub fn z_counts(f: &GenFunExpr, nu: u32, genus: u32, jmax: u32) -> Result<CountTable> {
    let z0 = crate::stringeq::z0_coupling_series(
        crate::stringeq::StringEquationSpec::EvenValence { nu },
        jmax as usize,
    );
    let comp = crate::series::cs_compose(f, &z0)?;
    let rows = (1..=jmax)
        .map(|j| {
            let c = comp.coeff(j as usize).clone();
            (j, if j % 2 == 1 { -c } else { c })
        })
        .collect();
    Ok(CountTable {
        valence: Valence::Even(nu),
        family: Family::Z,
        genus,
        rows,
    })
}

/// No-leg counts for valence 4: `count_j = [s^j](f ∘ z₀(s))/4^j` where
/// z₀(s) solves `1 = z₀ − 12s·z₀²`.
pub fn e_counts(f: &GenFunExpr, genus: u32, jmax: u32) -> Result<CountTable> {
    let z0 = crate::stringeq::z0_quartic_s_series(jmax as usize);
    let comp = crate::series::cs_compose(f, &z0)?;
    let mut pow4 = Rational::one();
    let rows = (1..=jmax)
        .map(|j| {
            pow4 *= Rational::from_integer(4.into());
            (j, comp.coeff(j as usize) / &pow4)
        })
        .collect();
    Ok(CountTable {
        valence: Valence::Even(2),
        family: Family::E,
        genus,
        rows,
    })
}

/// No-leg 3-valent counts: `count_j = [t^j](f ∘ z₀(t))/3^j` where z₀(t)
/// solves `1 = z₀² − 72t²z₀³`.
pub fn e3_counts(f: &GenFunExpr, genus: u32, jmax: u32) -> Result<CountTable> {
    let z0 = crate::stringeq::z0_coupling_series(
        crate::stringeq::StringEquationSpec::Trivalent,
        jmax as usize,
    );
    let comp = crate::series::cs_compose(f, &z0)?;
    let mut pow3 = Rational::one();
    let rows = (1..=jmax)
        .map(|j| {
            pow3 *= Rational::from_integer(3.into());
            (j, comp.coeff(j as usize) / &pow3)
        })
        .collect();
    Ok(CountTable {
        valence: Valence::Trivalent,
        family: Family::E,
        genus,
        rows,
    })
}

// ============================================================================
// Genus-0 closed form
// ============================================================================

fn factorial(n: i64) -> Rational {
    assert!(n >= 0, "factorial of a negative number");
    let mut out = Rational::one();
    for i in 2..=n {
        out *= Rational::from_integer(i.into());
    }
    out
}

/// Labeled genus-0 count of 2ν-valent no-leg maps with j vertices:
/// `(2ν·C(2ν−1,ν−1))^j · (νj−1)! / ((ν−1)j+2)!`.
pub fn genus0_closed_labeled(nu: u32, j: u32) -> Rational {
    assert!(j >= 1);
    let c = crate::exactnum::binomial(2 * nu as u64 - 1, nu as u64 - 1);
    let base = Rational::from_integer((2 * nu as i64).into()) * c;
    let mut pow = Rational::one();
    for _ in 0..j {
        pow *= &base;
    }
    let n = nu as i64 * j as i64;
    let d = (nu as i64 - 1) * j as i64 + 2;
    pow * factorial(n - 1) / factorial(d)
}

/// Unlabeled genus-0 count: the labeled count divided by `(2ν)^j·j!`.
pub fn genus0_closed_unlabeled(nu: u32, j: u32) -> Rational {
    genus0_closed_labeled(nu, j) / Valence::Even(nu).labeled_scale(j)
}

// ============================================================================
// Inverse-power ladders in w = ν − (ν−1)z₀ and their consistency relations
// ============================================================================

/// Expands a rational function whose denominator is a pure power of
/// `w = ν − (ν−1)z₀` into its inverse-power ladder `Σ_k a_k·w^{−k}`
/// (k may reach zero and below when the numerator degree exceeds the
/// denominator's).
///
/// # Errors
/// [`Error::NonzeroRemainder`] when the denominator is not `c·w^d`.
pub fn w_ladder(f: &RationalFunc, nu: u32) -> Result<std::collections::BTreeMap<i64, Rational>> {
    let n_w = crate::matching::substitute_w_for_z0(f.num(), nu);
    let d_w = crate::matching::substitute_w_for_z0(f.den(), nu);
    let d = polyq::qp_deg(&d_w).expect("denominator is nonzero") as i64;
    if d_w[..d as usize].iter().any(|c| !c.is_zero()) {
        return Err(Error::NonzeroRemainder(
            "denominator is not a pure power of the dual variable".into(),
        ));
    }
    let lead = &d_w[d as usize];
    Ok(n_w
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(jj, c)| (d - jj as i64, c / lead))
        .collect())
}

/// The quantitative link between the deepest ladder coefficients of the
/// no-leg and two-leg functions of the same genus g ≥ 2:
/// `e_top = z_top / (4(5g−5)(5g−3))`.
pub fn top_coefficient_link(g: u32, z_top: &Rational, e_top: &Rational) -> bool {
    let g = g as i64;
    let denom = Rational::from_integer((4 * (5 * g - 5) * (5 * g - 3)).into());
    e_top * denom == *z_top
}

/// Expected constant ladder term for genus g ≥ 2 given the constants of
/// all lower genera (keyed by genus):
///
/// `a₀(g) = −2(2g−3)!·[1/(2g+2)! − 1/(12(2g)!)
///          + (1/(2g−1)!)·Σ_{k=2}^{g−1} Π_{j=0}^{2g−2k+1}(2−2k−j)·a₀(k)/(2g−2k+2)!]`
///
/// with the sum empty for g < 3.
pub fn a0_recurrence_expected(
    g: u32,
    known: &std::collections::BTreeMap<u32, Rational>,
) -> Rational {
    assert!(g >= 2);
    let g = g as i64;
    let mut bracket = Rational::one() / factorial(2 * g + 2)
        - Rational::one() / (factorial(2 * g) * Rational::from_integer(12.into()));
    let mut sum = Rational::zero();
    for k in 2..g {
        let mut prod = Rational::one();
        for j in 0..=(2 * g - 2 * k + 1) {
            prod *= Rational::from_integer((2 - 2 * k - j).into());
        }
        let a0k = known
            .get(&(k as u32))
            .unwrap_or_else(|| panic!("constant for genus {k} required"));
        sum += prod * a0k / factorial(2 * g - 2 * k + 2);
    }
    bracket += sum / factorial(2 * g - 1);
    bracket * factorial(2 * g - 3) * Rational::from_integer((-2).into())
}

/// Checks every genus ≥ 3 entry (and genus 2 against the closed seed) of a
/// constant-ladder collection against the recurrence.
pub fn a0_recurrence_check(a0s: &std::collections::BTreeMap<u32, Rational>) -> Result<()> {
    for (&g, value) in a0s {
        assert!(g >= 2, "constant ladder terms start at genus 2");
        let expected = a0_recurrence_expected(g, a0s);
        if *value != expected {
            return Err(Error::SystemDefect(format!(
                "constant ladder term at genus {g} is {value}, recurrence demands {expected}"
            )));
        }
    }
    Ok(())
}

#[cfg(test)]
mod count_tests {
    use super::*;
    use crate::exactnum::{rat, rat_int};
    use crate::polyq::qp;
    use std::collections::BTreeMap;

    /// z₁ = 2z₀(z₀−1)²/(3(2−z₀)⁴) assembled by hand.
    fn z1_expr() -> GenFunExpr {
        let num = polyq::qp_scale(
            &polyq::qp_mul(&qp(&[0, 1]), &polyq::qp_pow(&qp(&[-1, 1]), 2)),
            &rat(2, 3),
        );
        let den = polyq::qp_pow(&qp(&[2, -1]), 4);
        GenFunExpr::pure_rational(RationalFunc::new(num, den).unwrap()).unwrap()
    }

    #[test]
    fn two_leg_counts_genus1() {
        let t = z_counts(&z1_expr(), 2, 1, 5).unwrap();
        assert_eq!(t.count(1), rat_int(0));
        assert_eq!(t.count(2), rat_int(6));
        assert_eq!(t.count(3), rat_int(162));
        assert_eq!(t.count(4), rat_int(3132));
        assert_eq!(t.count(5), rat_int(52650));
        t.validate().unwrap();
    }

    #[test]
    fn no_leg_counts_log_terms() {
        // e₁ = −(1/12)ln(2−z₀): counts 1/4, 15/8, … at genus 1.
        let e1 = GenFunExpr::new(
            RationalFunc::from_poly(qp(&[0])),
            vec![LogTerm::new(
                rat(-1, 12),
                RationalFunc::new(qp(&[2, -1]), qp(&[1])).unwrap(),
            )],
        )
        .unwrap();
        let t = e_counts(&e1, 1, 2).unwrap();
        assert_eq!(t.count(1), rat(1, 4));
        assert_eq!(t.count(2), rat(15, 8));
        t.validate().unwrap();
    }

    #[test]
    fn trivalent_counts_genus1() {
        // e₁ = −(1/24)ln((3−z₀²)/2).
        let e1 = GenFunExpr::new(
            RationalFunc::from_poly(qp(&[0])),
            vec![LogTerm::new(
                rat(-1, 24),
                RationalFunc::new(
                    vec![rat(3, 2), rat_int(0), rat(-1, 2)],
                    qp(&[1]),
                )
                .unwrap(),
            )],
        )
        .unwrap();
        let t = e3_counts(&e1, 1, 4).unwrap();
        assert_eq!(t.count(1), rat_int(0));
        assert_eq!(t.count(2), rat(1, 6));
        assert_eq!(t.count(3), rat_int(0));
        assert_eq!(t.count(4), rat(7, 3));
        t.validate().unwrap();
    }

    #[test]
    fn genus0_closed_values() {
        assert_eq!(genus0_closed_labeled(2, 1), rat_int(2));
        assert_eq!(genus0_closed_unlabeled(2, 1), rat(1, 2));
        assert_eq!(genus0_closed_unlabeled(2, 2), rat(9, 8));
        assert_eq!(genus0_closed_unlabeled(2, 3), rat(9, 2));
    }

    #[test]
    fn ladder_and_links() {
        // Genus-2 no-leg function: num = −(z₀−1)³(3z₀²−21z₀−82)/720 over
        // (2−z₀)⁵; constant term 1/240, top term 7/45.
        let num = polyq::qp_scale(
            &polyq::qp_mul(&polyq::qp_pow(&qp(&[-1, 1]), 3), &qp(&[-82, -21, 3])),
            &rat(-1, 720),
        );
        let den = polyq::qp_pow(&qp(&[2, -1]), 5);
        let f = RationalFunc::new(num, den).unwrap();
        let ladder = w_ladder(&f, 2).unwrap();
        assert_eq!(ladder[&0], rat(1, 240));
        assert_eq!(ladder[&5], rat(7, 45));
        assert!(top_coefficient_link(2, &rat(196, 9), &rat(7, 45)));
        assert!(!top_coefficient_link(2, &rat(196, 9), &rat(7, 44)));
    }

    #[test]
    fn a0_recurrence_seed_and_consistency() {
        let mut known = BTreeMap::new();
        assert_eq!(a0_recurrence_expected(2, &known), rat(1, 240));
        known.insert(2, rat(1, 240));
        a0_recurrence_check(&known).unwrap();
        known.insert(3, rat_int(9999));
        assert!(a0_recurrence_check(&known).is_err());
    }

    #[test]
    fn table_validation_guards() {
        // A fractional two-leg count must be rejected.
        let bad = CountTable {
            valence: Valence::Even(2),
            family: Family::Z,
            genus: 0,
            rows: vec![(1, rat(1, 2))],
        };
        assert!(bad.validate().is_err());
        // A nonzero count below the vertex floor must be rejected.
        let bad2 = CountTable {
            valence: Valence::Even(2),
            family: Family::Z,
            genus: 1,
            rows: vec![(1, rat_int(5))],
        };
        assert!(bad2.validate().is_err());
        // Odd-vertex 3-valent counts must vanish.
        let bad3 = CountTable {
            valence: Valence::Trivalent,
            family: Family::E,
            genus: 0,
            rows: vec![(3, rat(1, 27))],
        };
        assert!(bad3.validate().is_err());
    }
}

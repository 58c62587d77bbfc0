//! Full acceptance sweep over the engine's deliverables, one criterion at a
//! time, printing one PASS/FAIL line each and failing at the end if any
//! criterion failed.
//!
//! Heavy shared artifacts (the two deep orbit expansions and the seven
//! valence-4 genus solutions) are computed once and reused across criteria.

use std::collections::BTreeMap;
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use num_traits::Zero;

use mapcount_core::exactnum::{rat, rat_int, RadicalElem, Rational};
use mapcount_core::freud::{build_freud, cm_expand, kmax_for_genus, CmExpansion};
use mapcount_core::genfun::{
    a0_recurrence_check, genus0_closed_unlabeled, top_coefficient_link, w_ladder, GenFunExpr,
    RationalFunc,
};
use mapcount_core::golden::GoldenCatalog;
use mapcount_core::matching::{
    ansatz_rows, ansatz_rows_reduced, check_interlacing, derive_zg, divisibility_check,
    extract_slot, overdetermination_check, partial_fraction, q_roots, recursion_check,
    GenusSolution, RootInterval,
};
use mapcount_core::stringeq::z0_puiseux;
use mapcount_core::verify::{self, Scope, VerifyOptions};

// ============================================================================
// Shared artifacts
// ============================================================================

/// Valence-4 orbit expansion deep enough for every full-mode solve through
/// genus 7 (k = 46) plus two surplus ladder entries for the genus-7
/// overdetermination replay (k = 47, 48).
fn orbit2() -> &'static Result<CmExpansion, String> {
    static E: OnceLock<Result<CmExpansion, String>> = OnceLock::new();
    E.get_or_init(|| cm_expand(2, 48).map_err(|e| e.to_string()))
}

/// Valence-6 orbit expansion: the genus-2 solve needs k = 19, the surplus
/// replay two more ladder entries (k ≤ 23), and the Puiseux cross-oracle
/// k = 21.
fn orbit3() -> &'static Result<CmExpansion, String> {
    static E: OnceLock<Result<CmExpansion, String>> = OnceLock::new();
    E.get_or_init(|| cm_expand(3, 23).map_err(|e| e.to_string()))
}

/// Full-mode (general-ansatz) solutions for genera 1…7 at valence 4.
fn sols() -> &'static Result<Vec<GenusSolution>, String> {
    static S: OnceLock<Result<Vec<GenusSolution>, String>> = OnceLock::new();
    S.get_or_init(|| {
        let e = orbit2().as_ref().map_err(Clone::clone)?;
        (1..=7)
            .map(|g| derive_zg(e, g, false).map_err(|e| format!("genus {g}: {e}")))
            .collect()
    })
}

fn solutions() -> Result<&'static [GenusSolution], String> {
    sols().as_ref().map(Vec::as_slice).map_err(Clone::clone)
}

// ============================================================================
// Small exact helpers
// ============================================================================

fn eval_poly(p: &[Rational], x: &Rational) -> Rational {
    p.iter().rev().fold(Rational::zero(), |acc, c| acc * x + c)
}

fn rat_pow(base: i64, exp: u32) -> Rational {
    let mut out = rat_int(1);
    for _ in 0..exp {
        out *= rat_int(base);
    }
    out
}

/// Entry-wise structural audit of a matching system: strictly-upper entries
/// vanish and the diagonal at row i equals ∓p₁^{i+1}/ν^{5g−1}, where p₁ is
/// the leading Puiseux coefficient of the planar solution (θ/3 at ν = 2).
fn triangular_entrywise(g: u32, rows: &[Vec<RadicalElem>], reduced: bool) -> Result<(), String> {
    let field = rows[0][0].field().clone();
    let p1 = field
        .theta_pow(1)
        .scale(&(rat_int(1) / field.radicand()));
    let denom = rat_pow(2, 5 * g - 1);
    let mut p1_pow = field.one();
    for (i, row) in rows.iter().enumerate() {
        p1_pow = &p1_pow * &p1;
        for (j, entry) in row.iter().enumerate() {
            if j > i && !entry.is_zero() {
                return Err(format!(
                    "genus {g}{}: upper entry ({i},{j}) is {entry}, expected 0",
                    if reduced { " (reduced)" } else { "" }
                ));
            }
            if j == i {
                let mut expect = p1_pow.scale(&(rat_int(1) / &denom));
                if !reduced {
                    expect = -&expect;
                }
                if entry != &expect {
                    return Err(format!(
                        "genus {g}{}: diagonal entry {i} is {entry}, expected {expect}",
                        if reduced { " (reduced)" } else { "" }
                    ));
                }
            }
        }
    }
    Ok(())
}

// ============================================================================
// Criteria
// ============================================================================

/// Genus-1 bootstrap: exact coefficient vector and closed form, from a cold
/// start, in under a second.
fn c1_genus1_bootstrap() -> Result<String, String> {
    let t = Instant::now();
    let e = cm_expand(2, kmax_for_genus(2, 1, false)).map_err(|e| e.to_string())?;
    let sol = derive_zg(&e, 1, false).map_err(|e| e.to_string())?;
    if sol.beta() != [rat(-2, 3), rat(2, 3)] {
        return Err(format!(
            "numerator coefficients {:?}, expected (−2/3, 2/3)",
            sol.beta()
        ));
    }
    // 2z₀(z₀−1)²/(3(2−z₀)⁴), assembled from scratch.
    let reference = GenFunExpr::pure_rational(
        RationalFunc::new(
            vec![rat_int(0), rat(2, 3), rat(-4, 3), rat(2, 3)],
            vec![rat_int(16), rat_int(-32), rat_int(24), rat_int(-8), rat_int(1)],
        )
        .expect("nonzero denominator"),
    )
    .expect("denominator regular at z0 = 1");
    if !sol.to_genfun().equivalent(&reference) {
        return Err("derived genus-1 form differs from 2z0(z0−1)²/(3(2−z0)⁴)".into());
    }
    let elapsed = t.elapsed();
    if elapsed >= Duration::from_secs(1) {
        return Err(format!("bootstrap took {elapsed:?}, budget is 1 s"));
    }
    Ok(format!(
        "coefficients (−2/3, 2/3); closed form exact; {elapsed:.2?}"
    ))
}

/// Genera 2…7 at valence 4: the general-ansatz solution matches the
/// reference form exactly, the factored-ansatz solve reproduces the same
/// numerator, and the genus-7 surplus ladder entries agree with the form.
fn c2_quartic_derivations() -> Result<String, String> {
    let cat = GoldenCatalog::get();
    let e = orbit2().as_ref().map_err(Clone::clone)?;
    let sols = solutions()?;
    for g in 2..=7u32 {
        let sol = &sols[g as usize - 1];
        if !sol.to_genfun().equivalent(cat.quartic_z(g)) {
            return Err(format!("genus {g}: derived form differs from the reference"));
        }
        let reduced = derive_zg(e, g, true).map_err(|e| format!("genus {g} reduced: {e}"))?;
        if reduced.beta() != sol.beta() {
            return Err(format!(
                "genus {g}: factored-ansatz numerator differs from the general one"
            ));
        }
    }
    let surplus = overdetermination_check(e, &sols[6]).map_err(|e| e.to_string())?;
    if surplus < 2 {
        return Err(format!(
            "genus-7 replay covered only {surplus} surplus ladder entries"
        ));
    }
    Ok(format!(
        "genera 2…7 exact in both ansatz modes; genus-7 form reproduces \
         {surplus} surplus ladder entries"
    ))
}

/// Valence 6: exact genus-2 derivation, and the generated walk polynomial
/// reconciles with the transcribed one through the recorded deviations.
fn c3_sextic_and_walk() -> Result<String, String> {
    let cat = GoldenCatalog::get();
    let e = orbit3().as_ref().map_err(Clone::clone)?;
    let sol = derive_zg(e, 2, false).map_err(|e| e.to_string())?;
    if sol.beta() != cat.sextic_z2_beta() {
        return Err("genus-2 numerator coefficients differ from the reference".into());
    }
    if !sol.to_genfun().equivalent(cat.sextic_z2_factored()) {
        return Err("genus-2 assembled form differs from the reference".into());
    }
    let surplus = overdetermination_check(e, &sol).map_err(|e| e.to_string())?;

    let walk = build_freud(3);
    if walk.total_multiplicity() != 10 {
        return Err(format!(
            "walk polynomial carries total multiplicity {}, expected 10",
            walk.total_multiplicity()
        ));
    }
    let engine: BTreeMap<Vec<i64>, u64> = walk.terms().map(|(k, m)| (k.clone(), *m)).collect();
    let printed = cat.walk_printed();
    let printed_total: u64 = printed.values().sum();
    if printed_total != 10 {
        return Err(format!(
            "transcribed walk polynomial sums to {printed_total}, expected 10"
        ));
    }
    // The transcription must deviate from the generated polynomial in the
    // recorded terms — and only there. Reconcile and compare.
    if cat.walk_printed_only().is_empty() && cat.walk_engine_only().is_empty() {
        return Err("no transcription deviations recorded, but the sources disagree".into());
    }
    let mut reconstructed = printed.clone();
    for (k, m) in cat.walk_printed_only() {
        match reconstructed.get_mut(k) {
            Some(slot) if *slot >= *m => {
                *slot -= m;
                if *slot == 0 {
                    reconstructed.remove(k);
                }
            }
            _ => return Err("recorded surplus deviation is not present in the transcription".into()),
        }
    }
    for (k, m) in cat.walk_engine_only() {
        *reconstructed.entry(k.clone()).or_insert(0) += m;
    }
    if reconstructed != engine {
        return Err("recorded deviations do not reconcile the two walk polynomials".into());
    }
    if *printed == engine {
        return Err("transcription unexpectedly matches the generated polynomial \
                    although deviations are recorded"
            .into());
    }
    Ok(format!(
        "genus-2 form exact with {surplus} surplus ladder entries; walk polynomial \
         all-ones value 10; transcription deviations reconcile exactly"
    ))
}

/// All three count tables, cell by cell, exactly.
fn c4_count_tables() -> Result<String, String> {
    let report = verify::run(Scope::Counts, &VerifyOptions::default()).map_err(|e| e.to_string())?;
    match report.first_failure() {
        None => Ok(format!(
            "{} table checks exact (8 + 8 + 3 columns and the genus-0 product formula)",
            report.checks().len()
        )),
        Some(c) => Err(format!("{}: {}", c.name(), c.detail())),
    }
}

/// Structural theorems: top-coefficient recursion, constant-ladder
/// recurrence, entry-wise triangularity with the predicted diagonal for
/// every solved system, and the numerator divisibility bound.
fn c5_structural_checks() -> Result<String, String> {
    let cat = GoldenCatalog::get();
    let sols = solutions()?;

    let tops: Vec<Rational> = sols.iter().map(|s| partial_fraction(s).top().clone()).collect();
    recursion_check(2, &tops).map_err(|e| e.to_string())?;

    let mut a0s: BTreeMap<u32, Rational> = BTreeMap::new();
    for g in 2..=7u32 {
        let lad = w_ladder(cat.quartic_e(g).rational(), 2).map_err(|e| e.to_string())?;
        a0s.insert(g, lad.get(&0).cloned().unwrap_or_else(Rational::zero));
        let (&k_top, e_top) = lad.iter().next_back().expect("nonempty ladder");
        if k_top != 5 * (g as i64 - 1) {
            return Err(format!(
                "genus {g}: no-leg ladder peaks at {k_top}, expected {}",
                5 * (g - 1)
            ));
        }
        if !top_coefficient_link(g, &tops[g as usize - 1], e_top) {
            return Err(format!("genus {g}: deepest-ladder link violated"));
        }
    }
    a0_recurrence_check(&a0s).map_err(|e| e.to_string())?;

    for g in 1..=7u32 {
        let rows = ansatz_rows(2, g).map_err(|e| e.to_string())?;
        triangular_entrywise(g, &rows, false)?;
        if g >= 2 {
            let rows = ansatz_rows_reduced(g).map_err(|e| e.to_string())?;
            triangular_entrywise(g, &rows, true)?;
        }
        divisibility_check(&sols[g as usize - 1]).map_err(|e| format!("genus {g}: {e}"))?;
    }
    Ok("recursion, constant-ladder recurrence, deepest-ladder link, entry-wise \
        triangularity (both ansatz modes), and divisibility all hold through genus 7"
        .into())
}

/// Reduced-numerator roots: all real under exact isolation, the genus-2
/// root exactly 4/9, and interlacing along the genus chain.
fn c6_root_interlacing() -> Result<String, String> {
    let sols = solutions()?;
    let mut chain: Vec<(u32, Vec<RootInterval>)> = Vec::new();
    for g in 2..=7u32 {
        let sol = &sols[g as usize - 1];
        let q = sol.q().expect("valence-4 solutions carry a reduced numerator");
        if g == 2 {
            let at = eval_poly(q, &rat(4, 9));
            if !at.is_zero() {
                return Err(format!("genus-2 numerator at 4/9 evaluates to {at}, not 0"));
            }
        }
        let roots = q_roots(q).map_err(|e| format!("genus {g}: {e}"))?;
        if roots.len() != g as usize - 1 {
            return Err(format!(
                "genus {g}: isolated {} roots, expected {}",
                roots.len(),
                g - 1
            ));
        }
        chain.push((g, roots));
    }
    for w in chain.windows(2) {
        if !check_interlacing(&w[0].1, &w[1].1) {
            return Err(format!(
                "roots of genera {} and {} fail to interlace",
                w[0].0, w[1].0
            ));
        }
    }
    Ok("roots real and exactly isolated for genera 2…7; genus-2 root is 4/9; \
        consecutive root sets interlace"
        .into())
}

/// High-precision numeric validation at 512 bits over n = 50…400 and a
/// two-minute budget: recurrence residuals, both rescaling identities at
/// σ ∈ {2, 10}, and the convergence-rate fits.
fn c7_numeric_validation() -> Result<String, String> {
    let t = Instant::now();
    let report =
        verify::run(Scope::Numeric, &VerifyOptions::default()).map_err(|e| e.to_string())?;
    let elapsed = t.elapsed();
    if elapsed >= Duration::from_secs(120) {
        return Err(format!("numeric scope took {elapsed:?}, budget is 2 min"));
    }
    let failing: Vec<String> = report
        .checks()
        .iter()
        .filter(|c| !c.passed())
        .map(|c| format!("{} [{}]", c.name(), c.detail()))
        .collect();
    if failing.is_empty() {
        Ok(format!(
            "{} numeric checks pass in {elapsed:.2?}",
            report.checks().len()
        ))
    } else {
        Err(format!(
            "{}/{} checks fail in {elapsed:.2?}: {}",
            failing.len(),
            report.checks().len(),
            failing.join("; ")
        ))
    }
}

/// Planar cross-oracle: the genus-0 ladder reproduces the Puiseux
/// coefficients at both valences, and the product formula reproduces the
/// genus-0 table column.
fn c8_planar_cross_oracle() -> Result<String, String> {
    let cat = GoldenCatalog::get();
    for (nu, e) in [(2u32, orbit2()), (3u32, orbit3())] {
        let e = e.as_ref().map_err(Clone::clone)?;
        let z0 = z0_puiseux(nu, (nu as i64 - 1) * 12).map_err(|e| e.to_string())?;
        for m in 1..=12i64 {
            let slot = extract_slot(e, 0, m).map_err(|e| e.to_string())?;
            let series = z0.coeff((nu as i64 - 1) * m).coeff(0, 0);
            if slot != series {
                return Err(format!(
                    "valence {}: ladder entry m={m} is {slot}, series gives {series}",
                    2 * nu
                ));
            }
        }
    }
    let grid = cat.table_e();
    for j in 1..=15u32 {
        let direct = genus0_closed_unlabeled(2, j);
        let tabled = grid.count(j, 0);
        if direct != tabled {
            return Err(format!(
                "vertices {j}: product formula {direct}, table {tabled}"
            ));
        }
    }
    Ok("12 Puiseux terms match the genus-0 ladder at both valences; the product \
        formula reproduces the genus-0 column"
        .into())
}

// ============================================================================
// Driver
// ============================================================================

#[test]
fn acceptance() {
    let criteria: &[(&str, fn() -> Result<String, String>)] = &[
        ("1 genus-1 bootstrap", c1_genus1_bootstrap),
        ("2 valence-4 derivations g=2…7", c2_quartic_derivations),
        ("3 valence-6 derivation and walk polynomial", c3_sextic_and_walk),
        ("4 exact count tables", c4_count_tables),
        ("5 structural theorems", c5_structural_checks),
        ("6 root reality and interlacing", c6_root_interlacing),
        ("7 numeric validation", c7_numeric_validation),
        ("8 planar cross-oracle", c8_planar_cross_oracle),
    ];
    let mut failed = Vec::new();
    for (label, check) in criteria {
        match check() {
            Ok(detail) => println!("criterion {label}: PASS — {detail}"),
            Err(detail) => {
                println!("criterion {label}: FAIL — {detail}");
                failed.push(*label);
            }
        }
    }
    assert!(
        failed.is_empty(),
        "acceptance criteria failed: {failed:?} (see the per-criterion lines above)"
    );
}

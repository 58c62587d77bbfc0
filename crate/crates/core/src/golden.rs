//! Frozen reference catalog.
//!
//! The engine derives everything it emits; this module holds an independent
//! record of the expected answers, shipped as JSON next to the sources and
//! parsed once on first use:
//!
//! - closed-form generating functions for the 4-valent family (two-leg
//!   genus 1–7, no-leg genus 0–7) and the 3-valent family (no-leg genus 0–2),
//! - the 6-valent genus-2 coefficient vector together with its factored form,
//! - two published shapes of the 3-valent genus-2 two-leg function that must
//!   agree identically,
//! - the printed 6-valent walk polynomial, recorded verbatim alongside its
//!   known deviations from the enumerated one,
//! - three count grids (two-leg and no-leg 4-valent, no-leg 3-valent).
//!
//! Everything in the catalog is immutable; the verification layer compares
//! engine output against it and reports any drift.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use serde_json::Value;

use crate::exactnum::{rat_from_str, Rational};
use crate::genfun::{CountTable, Family, GenFunExpr, LogTerm, RationalFunc, Valence};
use crate::polyq::{qp_mul, qp_pow, qp_scale, QPoly};

// ============================================================================
// Embedded data
// ============================================================================

const QUARTIC_Z: &str = include_str!("../data/quartic_z.json");
const QUARTIC_E: &str = include_str!("../data/quartic_e.json");
const TRIVALENT_E: &str = include_str!("../data/trivalent_e.json");
const SEXTIC: &str = include_str!("../data/sextic.json");
const Z2_HALFODD: &str = include_str!("../data/z2_halfodd.json");
const WALKPOLY: &str = include_str!("../data/walkpoly_printed.json");
const TABLE_Z: &str = include_str!("../data/table_z.json");
const TABLE_E: &str = include_str!("../data/table_e.json");
const TABLE_E3: &str = include_str!("../data/table_e3.json");

// ============================================================================
// JSON → expression parsing
// ============================================================================

fn parse_poly(v: &Value) -> QPoly {
    v.as_array()
        .expect("polynomial is an array")
        .iter()
        .map(|c| rat_from_str(c.as_str().expect("coefficient is a string")).expect("coefficient parses"))
        .collect()
}

/// Expands `[{poly, exp}, …]` into the product of the powered factors.
fn parse_factors(v: &Value) -> QPoly {
    let mut out = vec![Rational::from_integer(1.into())];
    for f in v.as_array().expect("factor list is an array") {
        let p = parse_poly(&f["poly"]);
        let e = f["exp"].as_u64().expect("exponent is a nonnegative integer") as usize;
        out = qp_mul(&out, &qp_pow(&p, e));
    }
    out
}

fn parse_rational_func(v: &Value) -> RationalFunc {
    let scale = rat_from_str(v["scale"].as_str().expect("scale is a string")).expect("scale parses");
    let num = qp_scale(&parse_factors(&v["num_factors"]), &scale);
    let den = parse_factors(&v["den_factors"]);
    RationalFunc::new(num, den).expect("catalog denominator is nonzero")
}

fn parse_expr(v: &Value) -> GenFunExpr {
    let rational = parse_rational_func(&v["rational"]);
    let logs = v["logs"]
        .as_array()
        .expect("log list is an array")
        .iter()
        .map(|l| {
            let coef = rat_from_str(l["coef"].as_str().expect("log coefficient is a string"))
                .expect("log coefficient parses");
            let num = parse_factors(&l["arg_num_factors"]);
            let den = parse_factors(&l["arg_den_factors"]);
            LogTerm::new(coef, RationalFunc::new(num, den).expect("argument denominator is nonzero"))
        })
        .collect();
    GenFunExpr::new(rational, logs).expect("catalog expression is regular at 1")
}

fn parse_genus_entries(text: &str) -> BTreeMap<u32, GenFunExpr> {
    let v: Value = serde_json::from_str(text).expect("catalog JSON parses");
    v["entries"]
        .as_array()
        .expect("entry list is an array")
        .iter()
        .map(|e| {
            let g = e["genus"].as_u64().expect("genus is a nonnegative integer") as u32;
            (g, parse_expr(e))
        })
        .collect()
}

fn parse_multiset(v: &Value) -> BTreeMap<Vec<i64>, u64> {
    v.as_array()
        .expect("monomial list is an array")
        .iter()
        .map(|m| {
            let offsets = m["offsets"]
                .as_array()
                .expect("offsets is an array")
                .iter()
                .map(|o| o.as_i64().expect("offset is an integer"))
                .collect();
            (offsets, m["mult"].as_u64().expect("multiplicity is a nonnegative integer"))
        })
        .collect()
}

// ============================================================================
// Count grids
// ============================================================================

/// A rectangular table of exact counts: rows indexed by vertex number, one
/// column per genus.
#[derive(Clone, Debug)]
pub struct CountGrid {
    family: Family,
    valence: Valence,
    genera: Vec<u32>,
    rows: Vec<(u32, Vec<Rational>)>,
}

impl CountGrid {
    fn parse(text: &str) -> CountGrid {
        let v: Value = serde_json::from_str(text).expect("grid JSON parses");
        let family = match v["family"].as_str().expect("family is a string") {
            "z" => Family::Z,
            "e" => Family::E,
            other => panic!("unknown family tag {other:?}"),
        };
        let valence = match &v["valence"] {
            Value::String(s) if s == "trivalent" => Valence::Trivalent,
            Value::Number(n) => Valence::Even(n.as_u64().expect("valence parameter is positive") as u32),
            other => panic!("unknown valence tag {other:?}"),
        };
        let genera = v["genera"]
            .as_array()
            .expect("genus list is an array")
            .iter()
            .map(|g| g.as_u64().expect("genus is a nonnegative integer") as u32)
            .collect::<Vec<_>>();
        let rows = v["rows"]
            .as_array()
            .expect("row list is an array")
            .iter()
            .map(|r| {
                let j = r["j"].as_u64().expect("vertex number is positive") as u32;
                let counts = r["counts"]
                    .as_array()
                    .expect("counts is an array")
                    .iter()
                    .map(|c| rat_from_str(c.as_str().expect("count is a string")).expect("count parses"))
                    .collect::<Vec<_>>();
                assert_eq!(counts.len(), genera.len(), "ragged grid row");
                (j, counts)
            })
            .collect();
        CountGrid {
            family,
            valence,
            genera,
            rows,
        }
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn valence(&self) -> Valence {
        self.valence
    }

    pub fn genera(&self) -> &[u32] {
        &self.genera
    }

    /// Vertex numbers covered, in row order.
    pub fn vertex_numbers(&self) -> Vec<u32> {
        self.rows.iter().map(|(j, _)| *j).collect()
    }

    /// (row count, genus count).
    pub fn dims(&self) -> (usize, usize) {
        (self.rows.len(), self.genera.len())
    }

    /// The count at vertex number j and genus g; panics when the cell is
    /// outside the grid (that is a caller bug, not a data condition).
    pub fn count(&self, j: u32, g: u32) -> Rational {
        let col = self
            .genera
            .iter()
            .position(|&gg| gg == g)
            .unwrap_or_else(|| panic!("grid has no genus-{g} column"));
        let row = self
            .rows
            .iter()
            .find(|(jj, _)| *jj == j)
            .unwrap_or_else(|| panic!("grid has no row for {j} vertices"));
        row.1[col].clone()
    }

    /// Extracts one genus column as a [`CountTable`].
    pub fn column(&self, g: u32) -> CountTable {
        let col = self
            .genera
            .iter()
            .position(|&gg| gg == g)
            .unwrap_or_else(|| panic!("grid has no genus-{g} column"));
        CountTable::new(
            self.valence,
            self.family,
            g,
            self.rows.iter().map(|(j, counts)| (*j, counts[col].clone())).collect(),
        )
    }
}

// ============================================================================
// The catalog
// ============================================================================

/// Parsed form of every embedded reference file.  Obtain via
/// [`GoldenCatalog::get`]; parsing happens once per process.
pub struct GoldenCatalog {
    quartic_z: BTreeMap<u32, GenFunExpr>,
    quartic_e: BTreeMap<u32, GenFunExpr>,
    trivalent_e: BTreeMap<u32, GenFunExpr>,
    sextic_z2_beta: Vec<Rational>,
    sextic_z2_factored: GenFunExpr,
    halfodd_a: GenFunExpr,
    halfodd_b: GenFunExpr,
    walk_printed: BTreeMap<Vec<i64>, u64>,
    walk_engine_only: BTreeMap<Vec<i64>, u64>,
    walk_printed_only: BTreeMap<Vec<i64>, u64>,
    table_z: CountGrid,
    table_e: CountGrid,
    table_e3: CountGrid,
}

static CATALOG: OnceLock<GoldenCatalog> = OnceLock::new();

impl GoldenCatalog {
    pub fn get() -> &'static GoldenCatalog {
        CATALOG.get_or_init(|| {
            let sextic: Value = serde_json::from_str(SEXTIC).expect("catalog JSON parses");
            let halfodd: Value = serde_json::from_str(Z2_HALFODD).expect("catalog JSON parses");
            let walk: Value = serde_json::from_str(WALKPOLY).expect("catalog JSON parses");
            GoldenCatalog {
                quartic_z: parse_genus_entries(QUARTIC_Z),
                quartic_e: parse_genus_entries(QUARTIC_E),
                trivalent_e: parse_genus_entries(TRIVALENT_E),
                sextic_z2_beta: sextic["genus2_beta"]
                    .as_array()
                    .expect("coefficient list is an array")
                    .iter()
                    .map(|c| rat_from_str(c.as_str().expect("coefficient is a string")).expect("coefficient parses"))
                    .collect(),
                sextic_z2_factored: parse_expr(&sextic["genus2_factored"]),
                halfodd_a: parse_expr(&halfodd["form_a"]),
                halfodd_b: parse_expr(&halfodd["form_b"]),
                walk_printed: parse_multiset(&walk["printed_monomials"]),
                walk_engine_only: parse_multiset(&walk["engine_only"]),
                walk_printed_only: parse_multiset(&walk["printed_only"]),
                table_z: CountGrid::parse(TABLE_Z),
                table_e: CountGrid::parse(TABLE_E),
                table_e3: CountGrid::parse(TABLE_E3),
            }
        })
    }

    /// Two-leg 4-valent generating function at genus g ∈ [1, 7].
    pub fn quartic_z(&self, g: u32) -> &GenFunExpr {
        &self.quartic_z[&g]
    }

    /// No-leg 4-valent generating function at genus g ∈ [0, 7].
    pub fn quartic_e(&self, g: u32) -> &GenFunExpr {
        &self.quartic_e[&g]
    }

    /// No-leg 3-valent generating function at genus g ∈ [0, 2].
    pub fn trivalent_e(&self, g: u32) -> &GenFunExpr {
        &self.trivalent_e[&g]
    }

    /// Genera covered by the two-leg 4-valent closed forms.
    pub fn quartic_z_genera(&self) -> Vec<u32> {
        self.quartic_z.keys().copied().collect()
    }

    pub fn quartic_e_genera(&self) -> Vec<u32> {
        self.quartic_e.keys().copied().collect()
    }

    pub fn trivalent_e_genera(&self) -> Vec<u32> {
        self.trivalent_e.keys().copied().collect()
    }

    /// Numerator coefficient vector (ascending, constant term first) of the
    /// 6-valent genus-2 two-leg function over `(3 − 2z₀)⁹`.
    pub fn sextic_z2_beta(&self) -> &[Rational] {
        &self.sextic_z2_beta
    }

    pub fn sextic_z2_factored(&self) -> &GenFunExpr {
        &self.sextic_z2_factored
    }

    /// The two published shapes of the 3-valent genus-2 two-leg function.
    pub fn halfodd_forms(&self) -> (&GenFunExpr, &GenFunExpr) {
        (&self.halfodd_a, &self.halfodd_b)
    }

    /// The 6-valent walk polynomial exactly as printed.
    pub fn walk_printed(&self) -> &BTreeMap<Vec<i64>, u64> {
        &self.walk_printed
    }

    /// Monomials the enumeration produces that the printed form lacks.
    pub fn walk_engine_only(&self) -> &BTreeMap<Vec<i64>, u64> {
        &self.walk_engine_only
    }

    /// Monomials the printed form carries that the enumeration does not.
    pub fn walk_printed_only(&self) -> &BTreeMap<Vec<i64>, u64> {
        &self.walk_printed_only
    }

    pub fn table_z(&self) -> &CountGrid {
        &self.table_z
    }

    pub fn table_e(&self) -> &CountGrid {
        &self.table_e
    }

    pub fn table_e3(&self) -> &CountGrid {
        &self.table_e3
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::{rat, rat_int};
    use crate::polyq::qp;

    #[test]
    fn grid_dimensions() {
        let cat = GoldenCatalog::get();
        assert_eq!(cat.table_z().dims(), (15, 8));
        assert_eq!(cat.table_e().dims(), (15, 8));
        assert_eq!(cat.table_e3().dims(), (15, 3));
        assert_eq!(cat.table_z().genera(), &[0, 1, 2, 3, 4, 5, 6, 7]);
        assert_eq!(cat.table_e3().vertex_numbers(), (1..=15).map(|k| 2 * k).collect::<Vec<_>>());
    }

    #[test]
    fn grid_spot_values() {
        let cat = GoldenCatalog::get();
        assert_eq!(cat.table_z().count(3, 1), rat_int(162));
        assert_eq!(cat.table_z().count(4, 2), rat_int(630));
        assert_eq!(cat.table_z().count(14, 7), rat_from_str("732588016195035000").unwrap());
        assert_eq!(cat.table_e().count(1, 0), rat(1, 2));
        assert_eq!(cat.table_e().count(5, 3), rat(945, 2));
        assert_eq!(cat.table_e().count(13, 7), rat_from_str("260893168160625").unwrap());
        assert_eq!(cat.table_e3().count(2, 0), rat(2, 3));
        assert_eq!(cat.table_e3().count(6, 2), rat(35, 6));
    }

    #[test]
    fn grid_columns_validate() {
        let cat = GoldenCatalog::get();
        for grid in [cat.table_z(), cat.table_e(), cat.table_e3()] {
            for &g in grid.genera() {
                grid.column(g).validate().unwrap();
            }
        }
    }

    #[test]
    fn quartic_genus1_closed_form() {
        // 2z₀(z₀−1)²/(3(2−z₀)⁴), assembled independently of the JSON.
        let num = qp_scale(&qp_mul(&qp(&[0, 1]), &qp_pow(&qp(&[-1, 1]), 2)), &rat(2, 3));
        let den = qp_pow(&qp(&[2, -1]), 4);
        let direct = GenFunExpr::pure_rational(RationalFunc::new(num, den).unwrap()).unwrap();
        assert!(GoldenCatalog::get().quartic_z(1).equivalent(&direct));
    }

    #[test]
    fn sextic_beta_matches_factored_form() {
        let cat = GoldenCatalog::get();
        // num = z₀(z₀−1)·B(z₀) over (3−2z₀)⁹, the shape the derivation emits.
        let num = qp_mul(&qp_mul(&qp(&[0, 1]), &qp(&[-1, 1])), cat.sextic_z2_beta());
        let den = qp_pow(&qp(&[3, -2]), 9);
        let from_beta = GenFunExpr::pure_rational(RationalFunc::new(num, den).unwrap()).unwrap();
        assert!(from_beta.equivalent(cat.sextic_z2_factored()));
    }

    #[test]
    fn halfodd_forms_agree() {
        let (a, b) = GoldenCatalog::get().halfodd_forms();
        assert!(a.equivalent(b));
        assert!(!a.equivalent(GoldenCatalog::get().quartic_z(2)));
    }

    #[test]
    fn walk_deviation_bookkeeping() {
        // printed − printed_only + engine_only reproduces the enumeration.
        let cat = GoldenCatalog::get();
        let mut reconstructed = cat.walk_printed().clone();
        for (k, m) in cat.walk_printed_only() {
            let slot = reconstructed.get_mut(k).expect("printed-only monomial is printed");
            assert!(*slot >= *m);
            *slot -= m;
            if *slot == 0 {
                reconstructed.remove(k);
            }
        }
        for (k, m) in cat.walk_engine_only() {
            *reconstructed.entry(k.clone()).or_insert(0) += m;
        }
        let engine = crate::freud::build_freud(3);
        let engine_terms: BTreeMap<Vec<i64>, u64> =
            engine.terms().map(|(k, m)| (k.clone(), *m)).collect();
        assert_eq!(reconstructed, engine_terms);
        // Both shapes carry the same total weight.
        let printed_total: u64 = cat.walk_printed().values().sum();
        assert_eq!(printed_total, engine.total_multiplicity());
    }

    #[test]
    fn catalog_files_are_frozen() {
        use sha2::{Digest, Sha256};
        let digest = |text: &str| format!("{:x}", Sha256::digest(text.as_bytes()));
        for (text, expected) in [
            (QUARTIC_Z, "d2e41cae330bd275be4989c8e59fe7884d8069909a3c6c890725d5c690ff975e"),
            (QUARTIC_E, "c629aa16e0abb8c29087fcf1bfb3dbc53138693197bd3835a33762b05db888bb"),
            (TRIVALENT_E, "93e8d525f4be1c21b9bf38cd41592992998126e428fe76f17784685470ef4187"),
            (SEXTIC, "d84d409b4cb4f312747ed9f4fe5e55e0b707e8aae9d35d89bb46796346cfc530"),
            (Z2_HALFODD, "391282c78159b1442388e6a7e2512f9d6ab3a0ee0cf7365cb977e854ddf78adb"),
            (WALKPOLY, "635751764f41d873a3916bc5aa28dea5d1f41f0432ab1bbf7cdb3a4b89673970"),
            (TABLE_Z, "7aa548a4a7605724dd48c82b4471f5ae185021415964ab6596ced8ebab51a2fa"),
            (TABLE_E, "e7dbd9d4eab4c4f41b9c45aec0057a03058ab5e6ca62e4967e296ed6a447fee7"),
            (TABLE_E3, "eb8f654fc47185a3a3b57dde3e0fd514ce0c0940f067b8ad0fd9901657bd2c21"),
        ] {
            assert_eq!(digest(text), expected);
        }
    }
}

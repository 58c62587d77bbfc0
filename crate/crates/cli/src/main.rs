//! Command-line front end for the map-count engine.
//!
//! Subcommands:
//!
//! - `cm-expand` — slow-orbit expansion of the recurrence coefficients.
//! - `z0` — planar string-equation solution, as a coupling power series or
//!   as the asymptotic Puiseux series.
//! - `derive-zg` — derive the genus-g generating function and its
//!   partial-fraction ladder.
//! - `counts` — one exact map-count table column.
//! - `qroots` — isolated real roots of a reduced numerator polynomial.
//! - `orbit-check` — true recurrence coefficients from moments versus the
//!   truncated orbit expansion, with a convergence-rate summary.
//! - `verify` — the named verification suite (see the core `verify`
//!   module); exit status reflects the report.
//! - `export` — a full reference table as CSV or JSON.
//!
//! Exit codes: 0 success, 1 verification failure (or any data-dependent
//! error), 2 usage error, 3 insufficient expansion order or numeric
//! precision. All payload output goes to stdout (or `--out FILE`) and is
//! byte-deterministic for fixed inputs; diagnostics go to stderr.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use rug::Float;
use serde_json::{json, Value};

use mapcount_core::exactnum::{rat_to_string, Rational};
use mapcount_core::freud::{cm_expand, kmax_for_genus};
use mapcount_core::genfun::{e3_counts, e_counts, z_counts, CountTable, GenFunExpr, RationalFunc};
use mapcount_core::golden::{CountGrid, GoldenCatalog};
use mapcount_core::matching::{derive_zg, partial_fraction, q_roots};
use mapcount_core::orbitnum::{cm_compare, hankel_x, max_freud_residual, PrecisionConfig};
use mapcount_core::stringeq::{z0_coupling_series, z0_puiseux, StringEquationSpec};
use mapcount_core::verify::{self, Scope, VerifyOptions};
use mapcount_core::Error as CoreError;

// ============================================================================
// Argument surface
// ============================================================================

#[derive(Parser)]
#[command(
    name = "mapcount",
    version,
    about = "Exact genus-indexed map counts from the even-valence string equation"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SeriesKind {
    /// Power series in the coupling constant.
    Coupling,
    /// Asymptotic Puiseux series in the index gauge.
    Puiseux,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FamilyArg {
    /// Two-legged maps of valence 2ν.
    Z,
    /// Closed maps of valence 4.
    E,
    /// Closed 3-valent maps.
    E3,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ScopeArg {
    All,
    Derivations,
    Counts,
    Numeric,
}

impl From<ScopeArg> for Scope {
    fn from(s: ScopeArg) -> Scope {
        match s {
            ScopeArg::All => Scope::All,
            ScopeArg::Derivations => Scope::Derivations,
            ScopeArg::Counts => Scope::Counts,
            ScopeArg::Numeric => Scope::Numeric,
        }
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Expand the slow orbit of the recurrence coefficients to a given order.
    CmExpand {
        /// Half-valence ν ≥ 2 (the weight degree is 2ν).
        #[arg(long)]
        nu: u32,
        /// Deepest expansion order to solve.
        #[arg(long)]
        order: i64,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        /// Write the payload to a file instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Planar string-equation solution as a series.
    Z0 {
        /// Half-valence ν ≥ 2.
        #[arg(long)]
        nu: u32,
        #[arg(long, value_enum)]
        series: SeriesKind,
        /// Series truncation order.
        #[arg(long)]
        order: i64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Derive the genus-g generating function.
    DeriveZg {
        /// Half-valence ν ≥ 2.
        #[arg(long)]
        nu: u32,
        /// Genus g ≥ 1.
        #[arg(long)]
        genus: u32,
        /// Solve with the factored ansatz (ν = 2 only; much shallower).
        #[arg(long)]
        reduced: bool,
        /// Override the expansion depth (defaults to the minimum the solve
        /// needs).
        #[arg(long)]
        order: Option<i64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// One exact map-count table column.
    Counts {
        #[arg(long, value_enum)]
        family: FamilyArg,
        /// Half-valence for the z family (2 or 3); fixed otherwise.
        #[arg(long, default_value_t = 2)]
        nu: u32,
        #[arg(long)]
        genus: u32,
        /// Largest vertex count (defaults to 15, or 30 for 3-valent maps).
        #[arg(long)]
        jmax: Option<u32>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Isolated real roots of the reduced numerator polynomial.
    Qroots {
        /// Only ν = 2 carries the reduced-numerator factorization.
        #[arg(long, default_value_t = 2)]
        nu: u32,
        /// Genus g ≥ 1 (genus g has g − 1 roots).
        #[arg(long)]
        genus: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// True recurrence coefficients from moments versus the orbit expansion.
    OrbitCheck {
        /// Half-valence ν ≥ 2.
        #[arg(long)]
        nu: u32,
        /// Weight size parameter N > 0 (decimal string, parsed exactly).
        #[arg(long = "N", default_value = "1")]
        n_param: String,
        /// Coupling r > 0 (decimal string, parsed exactly).
        #[arg(long = "r", default_value = "1")]
        r_param: String,
        /// Largest recurrence index to compute.
        #[arg(long, default_value_t = 40)]
        nmax: usize,
        /// Requested precision in bits (≥ 128).
        #[arg(long, default_value_t = 512)]
        precision: u32,
        /// Truncation order of the compared expansion.
        #[arg(long, default_value_t = 5)]
        terms: i64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the named verification suite and report per-check status.
    Verify {
        #[arg(long, value_enum, default_value_t = ScopeArg::All)]
        scope: ScopeArg,
        /// Deepest genus the derivation scope re-derives (1…7).
        #[arg(long, default_value_t = 7)]
        genus: u32,
        /// Numeric-scope precision in bits.
        #[arg(long, default_value_t = 512)]
        precision: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Export a full reference table.
    Export {
        #[arg(long, value_enum)]
        family: FamilyArg,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

// ============================================================================
// Failure plumbing
// ============================================================================

enum Failure {
    /// Bad flag values beyond what clap can see (exit 2).
    Usage(String),
    /// Engine error; order/precision shortfalls exit 3, the rest exit 1.
    Core(CoreError),
    Io(std::io::Error),
}

impl From<CoreError> for Failure {
    fn from(e: CoreError) -> Self {
        Failure::Core(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e)
    }
}

impl Failure {
    fn message(&self) -> String {
        match self {
            Failure::Usage(m) => m.clone(),
            Failure::Core(e) => e.to_string(),
            Failure::Io(e) => e.to_string(),
        }
    }

    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Core(CoreError::OrderTooSmall { .. })
            | Failure::Core(CoreError::PrecisionShortfall(_)) => 3,
            Failure::Core(_) | Failure::Io(_) => 1,
        }
    }
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

/// Writes the payload (with a trailing newline) to stdout or `--out`.
fn emit(payload: &str, out: Option<&PathBuf>) -> std::io::Result<()> {
    let mut text = payload.to_string();
    if !text.ends_with('\n') {
        text.push('\n');
    }
    match out {
        Some(path) => std::fs::write(path, text),
        None => {
            use std::io::Write;
            std::io::stdout().write_all(text.as_bytes())
        }
    }
}

fn emit_json(v: &Value, out: Option<&PathBuf>) -> std::io::Result<()> {
    emit(
        &serde_json::to_string_pretty(v).expect("report values serialize"),
        out,
    )
}

/// CSV field quoting: wrap only when the value needs it.
fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.cmd) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}

fn run(cmd: Cmd) -> Result<u8, Failure> {
    match cmd {
        Cmd::CmExpand {
            nu,
            order,
            format,
            out,
        } => cmd_cm_expand(nu, order, format, out.as_ref()),
        Cmd::Z0 {
            nu,
            series,
            order,
            out,
        } => cmd_z0(nu, series, order, out.as_ref()),
        Cmd::DeriveZg {
            nu,
            genus,
            reduced,
            order,
            out,
        } => cmd_derive_zg(nu, genus, reduced, order, out.as_ref()),
        Cmd::Counts {
            family,
            nu,
            genus,
            jmax,
            format,
            out,
        } => cmd_counts(family, nu, genus, jmax, format, out.as_ref()),
        Cmd::Qroots { nu, genus, out } => cmd_qroots(nu, genus, out.as_ref()),
        Cmd::OrbitCheck {
            nu,
            n_param,
            r_param,
            nmax,
            precision,
            terms,
            out,
        } => cmd_orbit_check(nu, &n_param, &r_param, nmax, precision, terms, out.as_ref()),
        Cmd::Verify {
            scope,
            genus,
            precision,
            out,
        } => cmd_verify(scope, genus, precision, out.as_ref()),
        Cmd::Export { family, format, out } => cmd_export(family, format, out.as_ref()),
    }
}

// ============================================================================
// Subcommand bodies
// ============================================================================

fn require_nu(nu: u32) -> Result<(), Failure> {
    if nu < 2 {
        return Err(usage(format!(
            "--nu must be at least 2 (the weight degree is 2ν), got {nu}"
        )));
    }
    Ok(())
}

fn cmd_cm_expand(nu: u32, order: i64, format: Format, out: Option<&PathBuf>) -> Result<u8, Failure> {
    require_nu(nu)?;
    if order < 1 {
        return Err(usage(format!("--order must be at least 1, got {order}")));
    }
    let e = cm_expand(nu, order)?;
    match format {
        Format::Json => {
            emit_json(
                &json!({ "nu": nu, "kmax": e.kmax(), "coefficients": e.to_json() }),
                out,
            )?;
        }
        Format::Csv => {
            let mut text = String::from("k,coefficient\n");
            for k in -1..=e.kmax() {
                let _ = writeln!(text, "{k},{}", csv_field(&e.coeff(k).to_string()));
            }
            emit(&text, out)?;
        }
    }
    Ok(0)
}

fn cmd_z0(nu: u32, series: SeriesKind, order: i64, out: Option<&PathBuf>) -> Result<u8, Failure> {
    require_nu(nu)?;
    if order < 0 {
        return Err(usage(format!("--order must be nonnegative, got {order}")));
    }
    let payload = match series {
        SeriesKind::Coupling => {
            let s = z0_coupling_series(StringEquationSpec::EvenValence { nu }, order as usize);
            json!({
                "nu": nu,
                "series": "coupling",
                "coefficients": (0..=s.order())
                    .map(|j| rat_to_string(s.coeff(j)))
                    .collect::<Vec<_>>(),
            })
        }
        SeriesKind::Puiseux => {
            let s = z0_puiseux(nu, order)?;
            let terms: Vec<Value> = (s.low()..=s.trunc())
                .map(|k| json!({ "k": k, "value": s.coeff(k).to_string() }))
                .collect();
            json!({
                "nu": nu,
                "series": "puiseux",
                "gauge_denominator": nu,
                "truncation": s.trunc(),
                "terms": terms,
            })
        }
    };
    emit_json(&payload, out)?;
    Ok(0)
}

fn cmd_derive_zg(
    nu: u32,
    genus: u32,
    reduced: bool,
    order: Option<i64>,
    out: Option<&PathBuf>,
) -> Result<u8, Failure> {
    require_nu(nu)?;
    if genus < 1 {
        return Err(usage("--genus must be at least 1"));
    }
    if reduced && nu != 2 {
        return Err(usage("--reduced applies only to --nu 2"));
    }
    let depth = order.unwrap_or_else(|| kmax_for_genus(nu, genus, reduced));
    let e = cm_expand(nu, depth)?;
    let sol = derive_zg(&e, genus, reduced)?;
    let pf = partial_fraction(&sol);
    let mut payload = sol.to_json();
    payload["partial_fractions"] = pf.to_json();
    payload["display"] = Value::String(sol.to_genfun().display());
    emit_json(&payload, out)?;
    Ok(0)
}

/// The two-leg generating function of genus 0 is the planar solution itself.
fn identity_genfun() -> GenFunExpr {
    GenFunExpr::pure_rational(RationalFunc::from_poly(vec![
        Rational::from_integer(0.into()),
        Rational::from_integer(1.into()),
    ]))
    .expect("the identity map is a valid expression")
}

fn cmd_counts(
    family: FamilyArg,
    nu: u32,
    genus: u32,
    jmax: Option<u32>,
    format: Format,
    out: Option<&PathBuf>,
) -> Result<u8, Failure> {
    let cat = GoldenCatalog::get();
    let table: CountTable = match family {
        FamilyArg::Z => match nu {
            2 => {
                if genus > 7 {
                    return Err(usage("two-leg closed forms stop at genus 7"));
                }
                let jmax = jmax.unwrap_or(15);
                if genus == 0 {
                    z_counts(&identity_genfun(), 2, 0, jmax)?
                } else {
                    z_counts(cat.quartic_z(genus), 2, genus, jmax)?
                }
            }
            3 => {
                if genus != 2 {
                    return Err(usage(
                        "the valence-6 two-leg closed form is available for genus 2 only",
                    ));
                }
                z_counts(cat.sextic_z2_factored(), 3, 2, jmax.unwrap_or(15))?
            }
            _ => {
                return Err(usage(format!(
                    "--family z supports --nu 2 or 3, got {nu}"
                )))
            }
        },
        FamilyArg::E => {
            if nu != 2 {
                return Err(usage("--family e is the valence-4 closed-map table (ν = 2)"));
            }
            if genus > 7 {
                return Err(usage("closed-map forms stop at genus 7"));
            }
            e_counts(cat.quartic_e(genus), genus, jmax.unwrap_or(15))?
        }
        FamilyArg::E3 => {
            if nu != 2 {
                return Err(usage("--family e3 fixes the valence; drop --nu"));
            }
            if genus > 2 {
                return Err(usage("3-valent closed forms stop at genus 2"));
            }
            e3_counts(cat.trivalent_e(genus), genus, jmax.unwrap_or(30))?
        }
    };
    match format {
        Format::Json => emit_json(&table.to_json(), out)?,
        Format::Csv => {
            let mut text = format!("vertices,genus{genus}\n");
            for (j, c) in table.rows() {
                let _ = writeln!(text, "{j},{}", csv_field(&rat_to_string(c)));
            }
            emit(&text, out)?;
        }
    }
    Ok(0)
}

fn cmd_qroots(nu: u32, genus: u32, out: Option<&PathBuf>) -> Result<u8, Failure> {
    if nu != 2 {
        return Err(usage(
            "the reduced-numerator factorization is specific to --nu 2",
        ));
    }
    if genus < 1 {
        return Err(usage("--genus must be at least 1"));
    }
    let reduced = genus >= 2;
    let e = cm_expand(2, kmax_for_genus(2, genus, reduced))?;
    let sol = derive_zg(&e, genus, reduced)?;
    let q = sol.q().expect("valence-4 solutions carry a reduced numerator");
    let roots = q_roots(q)?;
    let payload = json!({
        "nu": 2,
        "genus": genus,
        "q": q.iter().map(rat_to_string).collect::<Vec<_>>(),
        "roots": roots.iter().map(|r| json!({
            "lo": rat_to_string(r.lo()),
            "hi": rat_to_string(r.hi()),
            "midpoint": r.midpoint_f64(),
        })).collect::<Vec<_>>(),
    });
    emit_json(&payload, out)?;
    Ok(0)
}

fn parse_positive_float(label: &str, text: &str, prec: u32) -> Result<Float, Failure> {
    let parsed = Float::parse(text)
        .map_err(|e| usage(format!("--{label} is not a valid number ({e})")))?;
    let value = Float::with_val(prec, parsed);
    if value.cmp0() != Some(std::cmp::Ordering::Greater) {
        return Err(usage(format!("--{label} must be positive, got {text}")));
    }
    Ok(value)
}

fn cmd_orbit_check(
    nu: u32,
    n_text: &str,
    r_text: &str,
    nmax: usize,
    precision: u32,
    terms: i64,
    out: Option<&PathBuf>,
) -> Result<u8, Failure> {
    require_nu(nu)?;
    if precision < 128 {
        return Err(usage(format!(
            "--precision must be at least 128 bits, got {precision}"
        )));
    }
    if nmax < 1 {
        return Err(usage("--nmax must be at least 1"));
    }
    if terms < 1 {
        return Err(usage("--terms must be at least 1"));
    }
    let n_param = parse_positive_float("N", n_text, precision)?;
    let r_param = parse_positive_float("r", r_text, precision)?;
    let cfg = PrecisionConfig::new(precision)?;
    let sample = hankel_x(nu, &n_param, &r_param, nmax, &cfg)?;
    let expansion = cm_expand(nu, terms + nu as i64 + 2)?;
    let rep = cm_compare(&sample, &expansion, terms)?;
    let digits = ((precision as f64) * std::f64::consts::LOG10_2).ceil() as usize + 2;
    let payload = json!({
        "nu": nu,
        "N": n_text,
        "r": r_text,
        "nmax": nmax,
        "precision_bits": precision,
        "max_recurrence_residual": format!("{:.6e}", max_freud_residual(&sample).to_f64()),
        "rows": rep.rows().iter().map(|row| json!({
            "n": row.n,
            "x_n": row.measured.to_string_radix(10, Some(digits)),
            "cm_value": row.predicted.to_string_radix(10, Some(digits)),
            "abs_err": format!("{:.6e}", row.abs_err.to_f64()),
        })).collect::<Vec<_>>(),
        "slope_summary": {
            "truncation": rep.truncation(),
            "expected_slope": rep.expected_slope(),
            "fitted_slope": if rep.fitted_slope().is_finite() {
                json!(rep.fitted_slope())
            } else {
                Value::Null
            },
            "saturated": rep.saturated(),
        },
    });
    emit_json(&payload, out)?;
    Ok(0)
}

fn cmd_verify(
    scope: ScopeArg,
    genus: u32,
    precision: u32,
    out: Option<&PathBuf>,
) -> Result<u8, Failure> {
    if !(1..=7).contains(&genus) {
        return Err(usage("--genus must lie in 1…7 (reference forms stop at 7)"));
    }
    if precision < 128 {
        return Err(usage(format!(
            "--precision must be at least 128 bits, got {precision}"
        )));
    }
    let opts = VerifyOptions {
        max_genus: genus,
        precision_bits: precision,
    };
    let report = verify::run(scope.into(), &opts)?;
    emit_json(&report.to_json(), out)?;
    Ok(if report.passed() { 0 } else { 1 })
}

fn cmd_export(family: FamilyArg, format: Format, out: Option<&PathBuf>) -> Result<u8, Failure> {
    let cat = GoldenCatalog::get();
    let grid: &CountGrid = match family {
        FamilyArg::Z => cat.table_z(),
        FamilyArg::E => cat.table_e(),
        FamilyArg::E3 => cat.table_e3(),
    };
    match format {
        Format::Csv => {
            let mut text = String::from("vertices");
            for g in grid.genera() {
                let _ = write!(text, ",genus{g}");
            }
            text.push('\n');
            for j in grid.vertex_numbers() {
                let _ = write!(text, "{j}");
                for &g in grid.genera() {
                    let _ = write!(text, ",{}", csv_field(&rat_to_string(&grid.count(j, g))));
                }
                text.push('\n');
            }
            emit(&text, out)?;
        }
        Format::Json => {
            let rows: Vec<Value> = grid
                .vertex_numbers()
                .iter()
                .map(|&j| {
                    json!({
                        "j": j,
                        "counts": grid.genera().iter()
                            .map(|&g| rat_to_string(&grid.count(j, g)))
                            .collect::<Vec<_>>(),
                    })
                })
                .collect();
            let valence = match family {
                FamilyArg::E3 => Value::String("trivalent".into()),
                _ => json!(2),
            };
            let family_tag = match family {
                FamilyArg::Z => "z",
                FamilyArg::E | FamilyArg::E3 => "e",
            };
            emit_json(
                &json!({
                    "family": family_tag,
                    "valence": valence,
                    "genera": grid.genera(),
                    "rows": rows,
                }),
                out,
            )?;
        }
    }
    Ok(0)
}

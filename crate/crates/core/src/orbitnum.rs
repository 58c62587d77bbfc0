//! High-precision numeric validation of the symbolic orbit expansion.
//!
//! Everything upstream of this module is exact. Here the exact results meet
//! true recurrence data computed from the weight
//! `exp[−N(λ²/2 + r·λ^{2ν}/(2ν))]`:
//!
//! - [`moments`] integrates the weight by certified composite-trapezoid
//!   quadrature (interval doubling until the tail is provably negligible,
//!   step halving until successive refinements agree at working precision);
//! - [`hankel_x`] recovers the squared recurrence coefficients `x_n` from
//!   ratios of Hankel determinants via a block LDLᵀ factorization;
//! - [`freud_residuals`], [`moment_rescaling_gap`] and
//!   [`orbit_rescaling_gap`] test the nonlinear recurrence and the exact
//!   scaling covariance of the data;
//! - [`cm_compare`], [`reciprocal_compare`] and [`adapted_compare`] measure
//!   how fast truncations of the symbolic expansion converge to the data and
//!   fit the observed error decay rate.
//!
//! Design notes:
//!
//! - `x_n` is never produced by forward iteration of the recurrence: the
//!   positive orbit is dynamically unstable, so iteration amplifies initial
//!   error geometrically. The determinant route is merely ill-conditioned —
//!   a predictable number of bits is lost, and the working precision is
//!   padded up front to absorb it.
//! - The weight is even, so every Hankel matrix splits into an even-index
//!   and an odd-index block. The LDLᵀ pivots of the two blocks yield the
//!   `x_n` directly, and pivot positivity certifies that precision sufficed;
//!   a nonpositive pivot aborts with [`Error::PrecisionShortfall`] rather
//!   than returning garbage.
//! - All intermediate arithmetic runs at `working bits = requested bits +
//!   ⌈1.3·nmax⌉ + 192`; the 1.3/step term tracks the observed cancellation
//!   inside the factorization, the constant absorbs quadrature and
//!   accumulation slack.

use std::cmp::Ordering;

use rug::ops::Pow;
use rug::Float;

use crate::exactnum::{rat_to_string, ParamPoly, RadicalElem, Rational};
use crate::freud::{build_freud, CmExpansion};
use crate::series::{ser_recip, GaugeSeries};
use crate::{Error, Result};

// ============================================================================
// Precision plumbing
// ============================================================================

/// Numeric-run configuration: requested result precision, optional explicit
/// quadrature cutoff, and the tolerance that identity checks are held to.
#[derive(Clone, Debug)]
pub struct PrecisionConfig {
    bits: u32,
    radius: Option<f64>,
    tol_log10: u32,
    working_override: Option<u32>,
}

impl PrecisionConfig {
    /// Requested precision must be at least 128 bits; the default tolerance
    /// scales with it (`10^{−bits/12}`).
    pub fn new(bits: u32) -> Result<Self> {
        if bits < 128 {
            return Err(Error::NumericDomain(format!(
                "requested precision {bits} bits is below the 128-bit floor"
            )));
        }
        Ok(PrecisionConfig {
            bits,
            radius: None,
            tol_log10: bits / 12,
            working_override: None,
        })
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    /// Identity checks pass when the observed gap is below `10^{−value}`.
    pub fn tolerance_log10(&self) -> u32 {
        self.tol_log10
    }

    /// Overrides the tolerance; it must stay well inside the requested
    /// precision (`3.33·digits + 64 ≤ bits`), otherwise the checks would
    /// measure rounding noise instead of mathematics.
    pub fn with_tolerance_log10(mut self, digits: u32) -> Result<Self> {
        if (digits as f64) * std::f64::consts::LN_10 / std::f64::consts::LN_2 + 64.0
            > self.bits as f64
        {
            return Err(Error::NumericDomain(format!(
                "tolerance 10^-{digits} is not resolvable at {} bits",
                self.bits
            )));
        }
        self.tol_log10 = digits;
        Ok(self)
    }

    /// Fixes the quadrature cutoff instead of deriving it from the weight;
    /// the caller asserts the integrand is negligible beyond the radius.
    pub fn with_radius(mut self, radius: f64) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(Error::NumericDomain(format!(
                "quadrature radius must be positive, got {radius}"
            )));
        }
        self.radius = Some(radius);
        Ok(self)
    }

    /// Caps the derived working precision. This is a failure-injection and
    /// benchmarking knob: production callers should let the working
    /// precision be derived, which sizes it to the factorization depth.
    pub fn with_working_bits(mut self, bits: u32) -> Self {
        self.working_override = Some(bits);
        self
    }

    /// Working precision for a run that factors matrices of depth tied to
    /// `nmax`.
    fn working_bits(&self, nmax: usize) -> u32 {
        self.working_override
            .unwrap_or(self.bits + (13 * nmax as u32 + 9) / 10 + 192)
    }
}

/// Converts an exact rational to a float with a single rounding.
pub fn rat_to_float(q: &Rational, prec: u32) -> Float {
    let parsed = rug::Rational::parse(rat_to_string(q)).expect("canonical rational rendering");
    Float::with_val(prec, rug::Rational::from(parsed))
}

/// Evaluates a radical-field element at the positive real root of the
/// defining equation.
///
/// # Panics
/// If the radicand is not positive (no positive real root to choose).
pub fn radical_to_float(e: &RadicalElem, prec: u32) -> Float {
    let field = e.field();
    let radicand = rat_to_float(field.radicand(), prec);
    assert!(
        radicand.cmp0() == Some(Ordering::Greater),
        "radicand must be positive for real evaluation"
    );
    let theta = radicand.root(field.degree() as u32);
    // Horner evaluation in θ.
    let mut acc = Float::new(prec);
    for c in e.coeffs().iter().rev() {
        acc *= &theta;
        acc += rat_to_float(c, prec);
    }
    acc
}

/// Evaluates a two-parameter polynomial at positive reals `a`, `b`.
pub fn param_to_float(p: &ParamPoly, a: &Float, b: &Float) -> Float {
    let prec = a.prec().max(b.prec());
    let mut acc = Float::new(prec);
    for (&(ea, eb), c) in p.terms() {
        let mut term = radical_to_float(c, prec);
        term *= Float::with_val(prec, a.pow(ea as i32));
        term *= Float::with_val(prec, b.pow(eb as i32));
        acc += term;
    }
    acc
}

// ============================================================================
// Moments
// ============================================================================

/// Adds `scale·λ^{2k}·w(λ)` for every k to the running sums.
fn accumulate_point(
    lam: &Float,
    half: bool,
    nu: u32,
    n_param: &Float,
    r_param: &Float,
    acc: &mut [Float],
) {
    let prec = lam.prec();
    let l2 = Float::with_val(prec, lam * lam);
    let mut inner = Float::with_val(prec, &l2 / 2u32);
    inner += Float::with_val(prec, (&l2).pow(nu as i32)) * r_param / (2 * nu);
    inner *= n_param;
    let mut w = (-inner).exp();
    if half {
        w /= 2u32;
    }
    let mut t = w;
    acc[0] += &t;
    for slot in acc.iter_mut().skip(1) {
        t *= &l2;
        *slot += &t;
    }
}

/// Even moments `μ₀, μ₂, …, μ_{2·top}` of the weight, each accurate to the
/// working precision derived from `top` (or overridden by the config).
fn even_moments(
    nu: u32,
    n_param: &Float,
    r_param: &Float,
    top: usize,
    wbits: u32,
    radius: Option<f64>,
) -> Result<Vec<Float>> {
    if n_param.cmp0() != Some(Ordering::Greater) || r_param.cmp0() != Some(Ordering::Greater) {
        return Err(Error::NumericDomain(
            "weight parameters N and r must be positive".into(),
        ));
    }
    let prec = wbits + 64;
    let nf = n_param.to_f64();
    let rf = r_param.to_f64();
    // Cutoff: smallest power of two past the integrand peak with
    // log(λ^{2·top}·w(λ)) below −(wbits+64)·ln 2. The integrand decays
    // monotonically beyond its peak, so a pointwise bound there bounds the
    // tail integral up to a factor the 64-bit margin absorbs.
    let target = -((wbits as f64 + 64.0) * std::f64::consts::LN_2);
    let log_integrand = |x: f64| {
        2.0 * top as f64 * x.ln() - nf * (x * x / 2.0 + rf * x.powi(2 * nu as i32) / (2.0 * nu as f64))
    };
    let cutoff = match radius {
        Some(r) => r,
        None => {
            let mut r = 2.0f64;
            while log_integrand(r) > target {
                r *= 2.0;
                if r > 1e12 {
                    return Err(Error::PrecisionShortfall(
                        "quadrature cutoff search diverged".into(),
                    ));
                }
            }
            r
        }
    };
    let radius_f = Float::with_val(prec, cutoff);

    // Composite trapezoid on [0, cutoff] with step halving; the integrand is
    // even, so the final moments are twice the half-line integrals.
    let mut acc: Vec<Float> = (0..=top).map(|_| Float::new(prec)).collect();
    let mut intervals = 64u64;
    let mut h = Float::with_val(prec, &radius_f / intervals);
    accumulate_point(&Float::new(prec), true, nu, n_param, r_param, &mut acc);
    accumulate_point(&radius_f, true, nu, n_param, r_param, &mut acc);
    for j in 1..intervals {
        let lam = Float::with_val(prec, &h * j);
        accumulate_point(&lam, false, nu, n_param, r_param, &mut acc);
    }
    let mut estimate: Vec<Float> = acc.iter().map(|s| Float::with_val(prec, s * &h)).collect();

    let agree = Float::with_val(64, 1u32) >> wbits;
    for _level in 0..28 {
        intervals *= 2;
        h = Float::with_val(prec, &radius_f / intervals);
        for j in (1..intervals).step_by(2) {
            let lam = Float::with_val(prec, &h * j);
            accumulate_point(&lam, false, nu, n_param, r_param, &mut acc);
        }
        let refined: Vec<Float> = acc.iter().map(|s| Float::with_val(prec, s * &h)).collect();
        let mut worst = Float::new(64);
        for (old, new) in estimate.iter().zip(&refined) {
            let rel = Float::with_val(64, Float::with_val(prec, old - new).abs() / new).abs();
            if rel > worst {
                worst = rel;
            }
        }
        estimate = refined;
        if worst <= agree {
            return Ok(estimate.into_iter().map(|m| m * 2u32).collect());
        }
    }
    Err(Error::PrecisionShortfall(format!(
        "quadrature did not stabilize to 2^-{wbits} within 28 refinements"
    )))
}

/// Moments `μ₀ … μ_{2·count}` of the weight. Odd moments are exactly zero
/// (the weight is even) and are returned as exact zeros.
///
/// # Errors
/// [`Error::NumericDomain`] for nonpositive parameters,
/// [`Error::PrecisionShortfall`] when quadrature cannot stabilize.
pub fn moments(
    nu: u32,
    n_param: &Float,
    r_param: &Float,
    count: usize,
    cfg: &PrecisionConfig,
) -> Result<Vec<Float>> {
    let wbits = cfg.working_bits(count);
    let even = even_moments(nu, n_param, r_param, count, wbits, cfg.radius)?;
    let prec = even[0].prec();
    let mut out = Vec::with_capacity(2 * count + 1);
    for (k, m) in even.into_iter().enumerate() {
        out.push(m);
        if k < count {
            out.push(Float::new(prec));
        }
    }
    Ok(out)
}

// ============================================================================
// Hankel route to the recurrence coefficients
// ============================================================================

/// LDLᵀ pivots of the Hankel block with entries `mom[offset + i + j]`.
fn block_pivots(mom: &[Float], offset: usize, dim: usize, label: &str) -> Result<Vec<Float>> {
    let mut l_rows: Vec<Vec<Float>> = Vec::with_capacity(dim);
    let mut ld_rows: Vec<Vec<Float>> = Vec::with_capacity(dim);
    let mut pivots: Vec<Float> = Vec::with_capacity(dim);
    for i in 0..dim {
        let mut lrow = Vec::with_capacity(i);
        let mut ldrow = Vec::with_capacity(i);
        for j in 0..i {
            let mut s = mom[offset + i + j].clone();
            for k in 0..j {
                s -= &lrow[k] * &ld_rows[j][k];
            }
            lrow.push(Float::with_val(s.prec(), &s / &pivots[j]));
            ldrow.push(s);
        }
        let mut s = mom[offset + 2 * i].clone();
        for k in 0..i {
            s -= &lrow[k] * &ldrow[k];
        }
        if s.cmp0() != Some(Ordering::Greater) {
            return Err(Error::PrecisionShortfall(format!(
                "pivot {i} of the {label} moment block is nonpositive; \
                 the working precision cannot support this depth"
            )));
        }
        pivots.push(s);
        l_rows.push(lrow);
        ld_rows.push(ldrow);
    }
    Ok(pivots)
}

/// Squared recurrence coefficients together with the weight parameters that
/// produced them. All values are strictly positive.
#[derive(Clone, Debug)]
pub struct OrbitSample {
    nu: u32,
    n_param: Float,
    r_param: Float,
    n_lo: usize,
    xs: Vec<Float>,
}

impl OrbitSample {
    /// Wraps externally produced values, enforcing positivity.
    pub fn from_values(
        nu: u32,
        n_param: Float,
        r_param: Float,
        n_lo: usize,
        xs: Vec<Float>,
    ) -> Result<Self> {
        if nu < 2 {
            return Err(Error::NumericDomain(format!(
                "valence parameter must be at least 2, got {nu}"
            )));
        }
        if n_lo == 0 || xs.is_empty() {
            return Err(Error::NumericDomain(
                "sample must cover a nonempty range starting at n ≥ 1".into(),
            ));
        }
        if n_param.cmp0() != Some(Ordering::Greater) || r_param.cmp0() != Some(Ordering::Greater) {
            return Err(Error::NumericDomain(
                "weight parameters N and r must be positive".into(),
            ));
        }
        if let Some(i) = xs.iter().position(|x| x.cmp0() != Some(Ordering::Greater)) {
            return Err(Error::NumericDomain(format!(
                "coefficient x_{} is not positive",
                n_lo + i
            )));
        }
        Ok(OrbitSample {
            nu,
            n_param,
            r_param,
            n_lo,
            xs,
        })
    }

    pub fn nu(&self) -> u32 {
        self.nu
    }

    pub fn n_param(&self) -> &Float {
        &self.n_param
    }

    pub fn r_param(&self) -> &Float {
        &self.r_param
    }

    /// First recurrence index covered.
    pub fn n_lo(&self) -> usize {
        self.n_lo
    }

    /// Last recurrence index covered.
    pub fn n_hi(&self) -> usize {
        self.n_lo + self.xs.len() - 1
    }

    /// The coefficient `x_n`; panics outside the covered range.
    pub fn x(&self, n: usize) -> &Float {
        assert!(
            n >= self.n_lo && n <= self.n_hi(),
            "x_{n} outside sample range [{}, {}]",
            self.n_lo,
            self.n_hi()
        );
        &self.xs[n - self.n_lo]
    }

    /// Restricts to a subrange (both ends inclusive).
    pub fn restrict(&self, lo: usize, hi: usize) -> Result<OrbitSample> {
        if lo < self.n_lo || hi > self.n_hi() || lo > hi {
            return Err(Error::NumericDomain(format!(
                "restriction [{lo}, {hi}] escapes the sample range [{}, {}]",
                self.n_lo,
                self.n_hi()
            )));
        }
        Ok(OrbitSample {
            nu: self.nu,
            n_param: self.n_param.clone(),
            r_param: self.r_param.clone(),
            n_lo: lo,
            xs: self.xs[lo - self.n_lo..=hi - self.n_lo].to_vec(),
        })
    }
}

/// Computes `x₁ … x_nmax` from Hankel determinant ratios
/// (`x_n = D_{n−2}D_n/D_{n−1}²` with `D_{−1} = 1`), organized as pivot
/// ratios of the even/odd moment blocks.
///
/// # Errors
/// Everything [`moments`] can raise, plus [`Error::PrecisionShortfall`] when
/// a pivot loses positivity.
pub fn hankel_x(
    nu: u32,
    n_param: &Float,
    r_param: &Float,
    nmax: usize,
    cfg: &PrecisionConfig,
) -> Result<OrbitSample> {
    if nmax == 0 {
        return Err(Error::NumericDomain("nmax must be at least 1".into()));
    }
    let wbits = cfg.working_bits(nmax);
    let mom = even_moments(nu, n_param, r_param, nmax, wbits, cfg.radius)?;
    let prec = mom[0].prec();
    // Permuting rows and columns by index parity block-diagonalizes every
    // moment matrix (odd moments vanish), so each D_n splits into an
    // even-block and an odd-block determinant and the ratios below collapse
    // to single pivot quotients: x_{2m+1} = ω_m/ε_m, x_{2m} = ε_m/ω_{m−1}.
    let eps = block_pivots(&mom, 0, nmax / 2 + 1, "even")?;
    let omg = block_pivots(&mom, 1, nmax.div_ceil(2), "odd")?;
    let xs = (1..=nmax)
        .map(|n| {
            let m = n / 2;
            if n % 2 == 1 {
                Float::with_val(prec, &omg[m] / &eps[m])
            } else {
                Float::with_val(prec, &eps[m] / &omg[m - 1])
            }
        })
        .collect();
    OrbitSample::from_values(
        nu,
        Float::with_val(prec, n_param),
        Float::with_val(prec, r_param),
        1,
        xs,
    )
}

// ============================================================================
// Identity checks
// ============================================================================

/// Absolute residuals `|n/N − x_n − r·W(x)_n|` of the nonlinear recurrence,
/// where `W` is the walk polynomial of the valence, for every interior `n`
/// (those whose full stencil lies inside the sample).
pub fn freud_residuals(sample: &OrbitSample) -> Vec<(usize, Float)> {
    let walk = build_freud(sample.nu);
    let reach = sample.nu as usize - 1;
    let prec = sample.x(sample.n_lo()).prec();
    let mut out = Vec::new();
    for n in sample.n_lo() + reach..=sample.n_hi().saturating_sub(reach) {
        let mut w_val = Float::new(prec);
        for (offsets, mult) in walk.terms() {
            let mut prod = Float::with_val(prec, *mult);
            for o in offsets {
                prod *= sample.x((n as i64 + o) as usize);
            }
            w_val += prod;
        }
        let mut res = Float::with_val(prec, n) / &sample.n_param;
        res -= sample.x(n);
        res -= w_val * &sample.r_param;
        out.push((n, res.abs()));
    }
    out
}

/// Largest interior recurrence residual, as an f64 exponent-safe magnitude.
pub fn max_freud_residual(sample: &OrbitSample) -> Float {
    let mut worst = Float::new(64);
    for (_, r) in freud_residuals(sample) {
        let r64 = Float::with_val(64, r);
        if r64 > worst {
            worst = r64;
        }
    }
    worst
}

/// Largest relative violation of the moment scaling law
/// `μ_n(σN, σ^{ν−1}r) = σ^{−(n+1)/2}·μ_n(N, r)` over even `n ≤ 2·count`.
pub fn moment_rescaling_gap(
    nu: u32,
    n_param: &Float,
    r_param: &Float,
    sigma: &Float,
    count: usize,
    cfg: &PrecisionConfig,
) -> Result<Float> {
    let base = moments(nu, n_param, r_param, count, cfg)?;
    let prec = base[0].prec();
    let scaled_n = Float::with_val(prec, n_param * sigma);
    let scaled_r = Float::with_val(prec, r_param * Float::with_val(prec, sigma.pow((nu - 1) as i32)));
    let scaled = moments(nu, &scaled_n, &scaled_r, count, cfg)?;
    let sqrt_sigma = Float::with_val(prec, sigma).sqrt();
    let mut worst = Float::new(64);
    for k in 0..=count {
        let n = 2 * k;
        let lhs = Float::with_val(prec, &scaled[n] * Float::with_val(prec, (&sqrt_sigma).pow((n + 1) as i32)));
        let gap = Float::with_val(64, Float::with_val(prec, &lhs - &base[n]).abs() / &base[n]);
        if gap > worst {
            worst = gap;
        }
    }
    Ok(worst)
}

/// Largest relative violation of the orbit scaling law
/// `x_{n,σN,σ^{ν−1}r} = x_{n,N,r}/σ` over the common range of the two
/// samples.
///
/// # Errors
/// [`Error::GridMismatch`] when the valence parameters differ,
/// [`Error::NumericDomain`] when the ranges are disjoint or the samples'
/// parameters are not σ-related.
pub fn orbit_rescaling_gap(
    base: &OrbitSample,
    scaled: &OrbitSample,
    sigma: &Float,
) -> Result<Float> {
    if base.nu() != scaled.nu() {
        return Err(Error::GridMismatch(base.nu(), scaled.nu()));
    }
    let prec = base.x(base.n_lo()).prec();
    let expected_n = Float::with_val(prec, base.n_param() * sigma);
    let rel_n = Float::with_val(
        64,
        Float::with_val(prec, scaled.n_param() - &expected_n).abs() / &expected_n,
    );
    if rel_n > Float::with_val(64, 1e-30) {
        return Err(Error::NumericDomain(
            "samples are not related by the claimed scale factor".into(),
        ));
    }
    let lo = base.n_lo().max(scaled.n_lo());
    let hi = base.n_hi().min(scaled.n_hi());
    if lo > hi {
        return Err(Error::NumericDomain(
            "samples cover disjoint index ranges".into(),
        ));
    }
    let mut worst = Float::new(64);
    for n in lo..=hi {
        let lhs = Float::with_val(prec, scaled.x(n) * sigma);
        let gap = Float::with_val(64, Float::with_val(prec, &lhs - base.x(n)).abs() / base.x(n));
        if gap > worst {
            worst = gap;
        }
    }
    Ok(worst)
}

// ============================================================================
// Expansion-versus-data comparisons
// ============================================================================

/// One compared index: the measured value, the truncated-expansion value,
/// and their absolute difference.
#[derive(Clone, Debug)]
pub struct CompareRow {
    pub n: usize,
    pub measured: Float,
    pub predicted: Float,
    pub abs_err: Float,
}

/// Outcome of an error-decay measurement: the least-squares slope of
/// `log|error|` against `log n`, and the slope the truncation order
/// predicts.
#[derive(Clone, Debug)]
pub struct SlopeReport {
    truncation: i64,
    expected_slope: f64,
    fitted_slope: f64,
    saturated: bool,
    rows: Vec<CompareRow>,
}

impl SlopeReport {
    pub fn truncation(&self) -> i64 {
        self.truncation
    }

    /// Decay rate implied by the first omitted nonzero term.
    pub fn expected_slope(&self) -> f64 {
        self.expected_slope
    }

    pub fn fitted_slope(&self) -> f64 {
        self.fitted_slope
    }

    /// True when some errors sat at the precision floor (those points are
    /// excluded from the fit; if fewer than two remain the slope is NaN).
    pub fn saturated(&self) -> bool {
        self.saturated
    }

    pub fn rows(&self) -> &[CompareRow] {
        &self.rows
    }

    /// Whether the fitted slope lies within `width` of the expected one.
    pub fn within(&self, width: f64) -> bool {
        self.fitted_slope.is_finite() && (self.fitted_slope - self.expected_slope).abs() <= width
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "truncation": self.truncation,
            "expected_slope": self.expected_slope,
            "fitted_slope": if self.fitted_slope.is_finite() {
                serde_json::json!(self.fitted_slope)
            } else {
                serde_json::Value::Null
            },
            "saturated": self.saturated,
            "rows": self.rows.iter().map(|r| serde_json::json!({
                "n": r.n,
                "x": format!("{:e}", r.measured.to_f64()),
                "predicted": format!("{:e}", r.predicted.to_f64()),
                "abs_err": format!("{:e}", r.abs_err.to_f64()),
            })).collect::<Vec<_>>(),
        })
    }
}

/// Least-squares slope of η against ξ.
fn fit_slope(points: &[(f64, f64)]) -> f64 {
    if points.len() < 2 {
        return f64::NAN;
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (x, y) in points {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    sxy / sxx
}

/// Shared comparison driver: measured values per n against a partial sum
/// with terms `(exponent k, coefficient value)` meaning `value·n^{−k/ν}`,
/// where the coefficient value may depend on n.
fn compare_terms(
    sample: &OrbitSample,
    measured: impl Fn(usize) -> Float,
    terms: impl Fn(usize) -> Vec<(i64, Float)>,
    truncation: i64,
    expected_slope: f64,
) -> SlopeReport {
    let prec = sample.x(sample.n_lo()).prec();
    let mut rows = Vec::with_capacity(sample.n_hi() - sample.n_lo() + 1);
    let mut fit_points = Vec::new();
    let mut saturated = false;
    for n in sample.n_lo()..=sample.n_hi() {
        let root = Float::with_val(prec, n).root(sample.nu());
        let mut predicted = Float::new(prec);
        for (k, c) in terms(n) {
            predicted += c * Float::with_val(prec, (&root).pow(-k as i32));
        }
        let value = measured(n);
        let err = Float::with_val(prec, &value - &predicted).abs();
        // Below this magnitude the difference is rounding noise, not signal.
        let floor = Float::with_val(prec, value.clone().abs() >> (prec - 64));
        if err.cmp0() == Some(Ordering::Equal) || err <= floor {
            saturated = true;
        } else {
            fit_points.push(((n as f64).ln(), err.to_f64().ln()));
        }
        rows.push(CompareRow {
            n,
            measured: value,
            predicted,
            abs_err: err,
        });
    }
    SlopeReport {
        truncation,
        expected_slope,
        fitted_slope: fit_slope(&fit_points),
        saturated,
        rows,
    }
}

/// First exponent above `m` carrying a nonzero coefficient, as the decay
/// slope it implies; falls back to `m+1` when nothing is visible.
fn expected_from_gauge(s: &GaugeSeries, m: i64, nu: u32) -> f64 {
    let mut next = m + 1;
    while next <= s.trunc() {
        if !s.coeff(next).is_zero() {
            break;
        }
        next += 1;
    }
    if next > s.trunc() {
        next = m + 1;
    }
    -(next as f64) / nu as f64
}

/// Compares sample data against the expansion truncated after exponent `m`
/// and fits the error decay rate. The expected slope comes from the first
/// omitted nonzero term.
///
/// # Errors
/// [`Error::GridMismatch`] on valence mismatch, [`Error::OrderTooSmall`]
/// when the expansion does not reach `m`.
pub fn cm_compare(sample: &OrbitSample, e: &CmExpansion, m: i64) -> Result<SlopeReport> {
    if sample.nu() != e.nu() {
        return Err(Error::GridMismatch(sample.nu(), e.nu()));
    }
    if m > e.kmax() || m < -1 {
        return Err(Error::OrderTooSmall {
            need: m,
            have: e.kmax(),
            context: "expansion too short for the requested comparison".into(),
        });
    }
    let prec = sample.x(sample.n_lo()).prec();
    let a = Float::with_val(prec, sample.n_param()).root(sample.nu());
    let b = Float::with_val(prec, sample.r_param()).root(sample.nu());
    let coeffs: Vec<(i64, Float)> = (-1..=m)
        .filter(|&k| !e.coeff(k).is_zero())
        .map(|k| (k, param_to_float(e.coeff(k), &a, &b)))
        .collect();
    let expected = expected_from_gauge(&e.to_gauge(), m, sample.nu());
    Ok(compare_terms(
        sample,
        |n| sample.x(n).clone(),
        |_| coeffs.clone(),
        m,
        expected,
    ))
}

/// Compares `u_n = −1/(r·x_n)` against the truncated reciprocal expansion
/// derived from `e`. With the quartic weight the exponent-4 slot of the
/// reciprocal vanishes, so the three-term truncation already decays at rate
/// −5/2.
pub fn reciprocal_compare(sample: &OrbitSample, e: &CmExpansion, m: i64) -> Result<SlopeReport> {
    if sample.nu() != e.nu() {
        return Err(Error::GridMismatch(sample.nu(), e.nu()));
    }
    let x_inv = ser_recip(&e.to_gauge())?;
    let u = (-&x_inv).mul_poly(&ParamPoly::monomial(
        0,
        -(sample.nu() as i64),
        e.field().one(),
    ));
    if m > u.trunc() {
        return Err(Error::OrderTooSmall {
            need: m,
            have: u.trunc(),
            context: "reciprocal expansion too short for the requested comparison".into(),
        });
    }
    let prec = sample.x(sample.n_lo()).prec();
    let a = Float::with_val(prec, sample.n_param()).root(sample.nu());
    let b = Float::with_val(prec, sample.r_param()).root(sample.nu());
    let coeffs: Vec<(i64, Float)> = (u.low()..=m)
        .filter(|&k| !u.coeff(k).is_zero())
        .map(|k| (k, param_to_float(&u.coeff(k), &a, &b)))
        .collect();
    let expected = expected_from_gauge(&u, m, sample.nu());
    let r_param = sample.r_param().clone();
    Ok(compare_terms(
        sample,
        move |n| {
            let mut u_val = Float::with_val(prec, sample.x(n) * &r_param);
            u_val = u_val.recip();
            -u_val
        },
        |_| coeffs.clone(),
        m,
        expected,
    ))
}

/// Compares the data against the expansion in the adapted regime where the
/// weight parameters grow with the index: at index n the pair
/// `(N', r') = (σN, σ^{ν−1}r)` with `σ = n/N`, so the measured value is
/// `x_n·N/n` by the scaling law, while the expansion is evaluated at the
/// adapted parameters. Each term loses one extra power of n, so the error
/// decays at the base rate minus one.
pub fn adapted_compare(sample: &OrbitSample, e: &CmExpansion, m: i64) -> Result<SlopeReport> {
    if sample.nu() != e.nu() {
        return Err(Error::GridMismatch(sample.nu(), e.nu()));
    }
    if m > e.kmax() || m < -1 {
        return Err(Error::OrderTooSmall {
            need: m,
            have: e.kmax(),
            context: "expansion too short for the requested comparison".into(),
        });
    }
    let prec = sample.x(sample.n_lo()).prec();
    let nu = sample.nu();
    let coeff_polys: Vec<(i64, &ParamPoly)> = (-1..=m)
        .filter(|&k| !e.coeff(k).is_zero())
        .map(|k| (k, e.coeff(k)))
        .collect();
    let expected = expected_from_gauge(&e.to_gauge(), m, nu) - 1.0;
    let n_param = sample.n_param().clone();
    let n_param2 = n_param.clone();
    let r_param = sample.r_param().clone();
    Ok(compare_terms(
        sample,
        move |n| {
            let mut v = Float::with_val(prec, sample.x(n) * &n_param);
            v /= Float::with_val(prec, n);
            v
        },
        move |n| {
            // σ·N = n exactly, so the adapted first parameter is n itself.
            let sigma = Float::with_val(prec, n) / &n_param2;
            let a = Float::with_val(prec, n).root(nu);
            let scaled_r = Float::with_val(prec, (&sigma).pow((nu - 1) as i32)) * &r_param;
            let b = scaled_r.root(nu);
            coeff_polys
                .iter()
                .map(|&(k, p)| (k, param_to_float(p, &a, &b)))
                .collect()
        },
        m,
        expected,
    ))
}

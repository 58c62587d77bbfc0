//! Dense univariate polynomials over ℚ (crate-internal helpers).
//!
//! Representation: `Vec<Rational>` in ascending powers with no trailing
//! zeros; the empty vector is the zero polynomial.  These helpers back the
//! radical-field inverse, rational-function algebra on generating functions,
//! exact synthetic division, and the Sturm-sequence root isolation.

use num_traits::{One, Signed, Zero};

use crate::exactnum::{rat_int, Rational};

/// Dense ℚ[x] polynomial, ascending powers, trimmed.
pub(crate) type QPoly = Vec<Rational>;

/// Builds a polynomial from integer coefficients (constant term first).
#[cfg(test)]
pub(crate) fn qp(coeffs: &[i64]) -> QPoly {
    qp_trim(coeffs.iter().map(|&c| rat_int(c)).collect())
}

/// Removes trailing zero coefficients.
pub(crate) fn qp_trim(mut p: QPoly) -> QPoly {
    while p.last().is_some_and(Rational::is_zero) {
        p.pop();
    }
    p
}

/// Degree, or `None` for the zero polynomial.
pub(crate) fn qp_deg(p: &QPoly) -> Option<usize> {
    p.len().checked_sub(1)
}

pub(crate) fn qp_add(a: &[Rational], b: &[Rational]) -> QPoly {
    let mut out = vec![Rational::zero(); a.len().max(b.len())];
    for (i, c) in a.iter().enumerate() {
        out[i] += c;
    }
    for (i, c) in b.iter().enumerate() {
        out[i] += c;
    }
    qp_trim(out)
}

pub(crate) fn qp_sub(a: &[Rational], b: &[Rational]) -> QPoly {
    let mut out = vec![Rational::zero(); a.len().max(b.len())];
    for (i, c) in a.iter().enumerate() {
        out[i] += c;
    }
    for (i, c) in b.iter().enumerate() {
        out[i] -= c;
    }
    qp_trim(out)
}

pub(crate) fn qp_scale(a: &[Rational], s: &Rational) -> QPoly {
    if s.is_zero() {
        return vec![];
    }
    a.iter().map(|c| c * s).collect()
}

pub(crate) fn qp_mul(a: &[Rational], b: &[Rational]) -> QPoly {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![Rational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    qp_trim(out)
}

pub(crate) fn qp_pow(a: &[Rational], k: usize) -> QPoly {
    let mut out = vec![Rational::one()];
    for _ in 0..k {
        out = qp_mul(&out, a);
    }
    out
}

/// Euclidean division: `(quotient, remainder)` with `deg rem < deg den`.
///
/// # Panics
/// Panics if `den` is the zero polynomial.
pub(crate) fn qp_divmod(num: &[Rational], den: &[Rational]) -> (QPoly, QPoly) {
    assert!(!den.is_empty(), "polynomial division by zero");
    let dn = den.len() - 1;
    let lead_inv = Rational::one() / den.last().unwrap();
    let mut rem: QPoly = num.to_vec();
    if num.len() <= dn {
        return (vec![], qp_trim(rem));
    }
    let mut quot = vec![Rational::zero(); num.len() - dn];
    for i in (dn..rem.len()).rev() {
        let c = &rem[i] * &lead_inv;
        if c.is_zero() {
            continue;
        }
        for (j, d) in den.iter().enumerate() {
            let t = &c * d;
            rem[i - dn + j] -= t;
        }
        quot[i - dn] = c;
    }
    (qp_trim(quot), qp_trim(rem))
}

/// Monic greatest common divisor (zero polynomial if both inputs are zero).
pub(crate) fn qp_gcd(a: &[Rational], b: &[Rational]) -> QPoly {
    let mut r0 = qp_trim(a.to_vec());
    let mut r1 = qp_trim(b.to_vec());
    while !r1.is_empty() {
        let (_, rem) = qp_divmod(&r0, &r1);
        r0 = r1;
        r1 = rem;
    }
    if let Some(lead) = r0.last().cloned() {
        r0 = qp_scale(&r0, &(Rational::one() / lead));
    }
    r0
}

pub(crate) fn qp_derivative(p: &[Rational]) -> QPoly {
    qp_trim(
        p.iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c * rat_int(i as i64))
            .collect(),
    )
}

/// Horner evaluation at a rational point.
pub(crate) fn qp_eval(p: &[Rational], x: &Rational) -> Rational {
    let mut acc = Rational::zero();
    for c in p.iter().rev() {
        acc = acc * x + c;
    }
    acc
}

/// Sign of the value at a rational point: −1, 0, or +1.
pub(crate) fn qp_sign_at(p: &[Rational], x: &Rational) -> i32 {
    let v = qp_eval(p, x);
    if v.is_zero() {
        0
    } else if v.is_positive() {
        1
    } else {
        -1
    }
}

/// Renders as a human-readable polynomial in the given variable name,
/// highest power first, e.g. `"9*z0^2 - 4"`.
pub(crate) fn qp_display(p: &[Rational], var: &str) -> String {
    use crate::exactnum::rat_to_string;
    if p.is_empty() {
        return "0".to_string();
    }
    let mut out = String::new();
    for (i, c) in p.iter().enumerate().rev() {
        if c.is_zero() {
            continue;
        }
        let mag = c.abs();
        if out.is_empty() {
            if c.is_negative() {
                out.push('-');
            }
        } else {
            out.push_str(if c.is_negative() { " - " } else { " + " });
        }
        let coeff_part = rat_to_string(&mag);
        match i {
            0 => out.push_str(&coeff_part),
            _ => {
                if !mag.is_one() {
                    out.push_str(&coeff_part);
                    out.push('*');
                }
                out.push_str(var);
                if i > 1 {
                    out.push_str(&format!("^{i}"));
                }
            }
        }
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

//! Reference values that do not depend on any of the series under test.
//!
//! π comes from Machin's formula and is cross-checked against Euler's
//! `π/4 = arctan(1/2) + arctan(1/3)`. erf comes from its Maclaurin series on
//! `|x| <= 8`.

use std::collections::HashMap;
use std::sync::{OnceLock, RwLock};

use num_bigint::BigInt;
use num_traits::Zero;

use crate::bignum::{machin_pi, pow10, round_div, BigReal, PrecisionContext};
use crate::error::{Error, Result};

/// Largest `|x|` accepted by [`reference_erf`].
pub const ERF_ORACLE_LIMIT: i64 = 8;

const PI_GUARD: u32 = 10;

/// Decimal digits of π, truncated (not rounded) so that a longer expansion
/// always extends a shorter one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReferencePi {
    /// `"3.14159..."` with `precision` significant digits.
    pub digits: String,
    pub precision: u32,
}

impl ReferencePi {
    /// The first `precision` significant digits of π (`precision = 1` is `"3"`).
    pub fn new(precision: u32) -> Result<Self> {
        if precision == 0 {
            return Err(Error::invalid("reference pi needs at least one digit"));
        }
        let decimals = precision - 1;
        let mut guard = PI_GUARD;
        loop {
            let v = reference_pi(decimals + guard);
            let full = v.to_exact_string();
            // Truncation is safe unless the guard digits are all 0 or all 9,
            // in which case the true expansion could straddle the cut.
            let tail = &full[full.len() - guard as usize..];
            if tail.bytes().all(|b| b == b'0') || tail.bytes().all(|b| b == b'9') {
                guard *= 2;
                continue;
            }
            return Ok(Self {
                digits: v.to_truncated_string(decimals),
                precision,
            });
        }
    }
}

/// π rounded to `decimals` places after the point (error at most half an
/// ulp plus the Machin evaluation error, well under one ulp).
///
/// Memoised per precision; the two independent formulas are compared on
/// first use of every precision.
pub fn reference_pi(decimals: u32) -> BigReal {
    static CACHE: OnceLock<RwLock<HashMap<u32, BigReal>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| RwLock::new(HashMap::new()));
    if let Some(v) = cache.read().expect("pi cache poisoned").get(&decimals) {
        return v.clone();
    }
    let pi = machin_pi(decimals);
    let check = euler_pi(decimals);
    let ulps = (&pi - &check).abs().mantissa_at(decimals);
    assert!(
        ulps <= BigInt::from(2),
        "Machin and Euler formulas disagree by {ulps} ulp at {decimals} digits"
    );
    cache
        .write()
        .expect("pi cache poisoned")
        .entry(decimals)
        .or_insert(pi)
        .clone()
}

/// π at the context's working precision.
pub fn reference_pi_ctx(ctx: &PrecisionContext) -> BigReal {
    reference_pi(ctx.work_digits())
}

/// `4 (arctan(1/2) + arctan(1/3))`.
fn euler_pi(decimals: u32) -> BigReal {
    let inner = PrecisionContext::new(decimals.max(1), 4).expect("nonzero digits");
    let a = BigReal::atan_reciprocal(2, &inner).expect("n >= 1");
    let b = BigReal::atan_reciprocal(3, &inner).expect("n >= 1");
    (&a + &b).mul_int(4).rescaled(decimals)
}

/// `erf(x)` from the Maclaurin series
/// `(2/√π) Σ (-1)^n x^(2n+1) / (n! (2n+1))`, for `|x| <= 8`.
///
/// The partial sums of the alternating series peak near `e^(x²)`, so the sum is
/// carried with `x² log10(e)` extra digits; truncation happens once the next
/// power `x^(2n+1)/n!` vanishes at that scale. Error at most 5 ulp.
pub fn reference_erf(x: &BigReal, ctx: &PrecisionContext) -> Result<BigReal> {
    if x.abs() > BigReal::from_int(ERF_ORACLE_LIMIT) {
        return Err(Error::OutOfDomain {
            value: x.to_string(),
            limit: ERF_ORACLE_LIMIT.to_string(),
        });
    }
    if x.is_zero() {
        return Ok(BigReal::from_scaled(BigInt::zero(), ctx.work_digits()));
    }
    let w = ctx.work_digits();
    let xf = x.to_f64().abs();
    let extra = (xf * xf * std::f64::consts::LOG10_E + (xf + 1.0).log10()).ceil() as u32 + 4;
    let wp = w + extra + 6;
    let one = pow10(wp);
    let xm = x.mantissa_at(wp);
    let x2 = round_div(&(&xm * &xm), &one);

    let mut power = xm.clone();
    let mut sum = xm;
    let mut n: u64 = 1;
    loop {
        power = -round_div(&(&power * &x2), &(&one * BigInt::from(n)));
        if power.is_zero() {
            break;
        }
        sum += round_div(&power, &BigInt::from(2 * n + 1));
        n += 1;
    }
    let inner = PrecisionContext::new(wp, 0).expect("wp > 0");
    let sqrt_pi = reference_pi(wp + 2).sqrt(&inner)?;
    let two_over = BigReal::from_int(2).div(&sqrt_pi, &inner)?;
    let series = BigReal::from_scaled(sum, wp);
    Ok(series.mul_round(&two_over, &inner).round_to(ctx))
}

/// [`reference_erf`] widened to the whole real line for profile data.
///
/// Beyond `|x| = 8` it uses `1 - erfc(|x|)` with the asymptotic expansion
/// `erfc(x) ~ e^(-x²)/(x√π) Σ (-1)^n (2n-1)!!/(2x²)^n`, truncated at its
/// smallest term; the truncation error is below that term, which for
/// `|x| > 8` is under `10^-55`. Precisions beyond that bound are refused.
pub fn reference_erf_extended(x: &BigReal, ctx: &PrecisionContext) -> Result<BigReal> {
    let limit = BigReal::from_int(ERF_ORACLE_LIMIT);
    if x.abs() <= limit {
        return reference_erf(x, ctx);
    }
    let w = ctx.work_digits();
    let xf = x.to_f64().abs();
    // log10 of (prefactor * smallest term) ~ -2 x² log10(e).
    let bound_exp = -2.0 * xf * xf * std::f64::consts::LOG10_E;
    if bound_exp > -(w as f64) - 1.0 {
        return Err(Error::OutOfDomain {
            value: x.to_string(),
            limit: format!("{ERF_ORACLE_LIMIT} at {w} working digits"),
        });
    }
    let inner = ctx.widened(6);
    let ax = x.abs();
    let two_x2 = ax.mul_round(&ax, &inner).mul_int(2);
    let mut term = BigReal::one();
    let mut series = BigReal::one();
    let mut n: i64 = 1;
    loop {
        let next = term.mul_int(-(2 * n - 1)).div(&two_x2, &inner)?;
        if next.is_zero() || next.abs() >= term.abs() {
            break;
        }
        series = &series + &next;
        term = next;
        n += 1;
    }
    let sqrt_pi = reference_pi_ctx(&inner).sqrt(&inner)?;
    let pref = ax
        .mul_round(&ax, &inner)
        .exp_neg(&inner)
        .div(&ax.mul_round(&sqrt_pi, &inner), &inner)?;
    let erfc = pref.mul_round(&series, &inner);
    let erf = &BigReal::one() - &erfc;
    let erf = if x.is_negative() { -erf } else { erf };
    Ok(erf.round_to(ctx))
}

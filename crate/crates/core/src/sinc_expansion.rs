//! The sinc function, its truncated Vieta product, the product-to-sum
//! rewriting, and the incomplete cosine expansion
//! `sinc(x) ≈ (1/L) Σ_{ℓ=1..L} cos((ℓ - 1/2) x / L)`.
//!
//! The cosine sum is periodic with period `4πL` and tracks sinc only on
//! `|x| <= πL`. Nothing here rejects arguments outside that window: the erf
//! construction deliberately evaluates it where a Gaussian factor has already
//! damped the integrand.

use crate::bignum::{ceil_log10, BigReal, PrecisionContext};
use crate::error::{Error, Result};
use crate::oracles::reference_pi;
use crate::par;

/// Order of an incomplete cosine expansion. The dyadic form with `M` factors
/// is the special case `L = 2^(M-1)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SincExpansionParams {
    General { l: u64 },
    Dyadic { m: u32 },
}

impl SincExpansionParams {
    pub fn general(l: u64) -> Result<Self> {
        if l == 0 {
            return Err(Error::invalid("expansion order L must be at least 1"));
        }
        Ok(Self::General { l })
    }

    pub fn dyadic(m: u32) -> Result<Self> {
        if m == 0 || m > 63 {
            return Err(Error::invalid("dyadic order M must lie in 1..=63"));
        }
        Ok(Self::Dyadic { m })
    }

    /// Number of cosine terms `L`.
    pub fn order(&self) -> u64 {
        match *self {
            Self::General { l } => l,
            Self::Dyadic { m } => 1u64 << (m - 1),
        }
    }
}

/// `|x| <= half_width` is where the expansion follows sinc; it repeats
/// every `period`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValidityWindow {
    pub half_width: BigReal,
    pub period: BigReal,
}

/// `sin(x)/x`, exactly 1 at the origin.
pub fn sinc(x: &BigReal, ctx: &PrecisionContext) -> BigReal {
    if x.is_zero() {
        return BigReal::one().round_to(ctx);
    }
    let inner = ctx.widened(4);
    x.sin(&inner)
        .div(x, &inner)
        .expect("x is non-zero")
        .round_to(ctx)
}

/// `Π_{m=1..M} cos(x / 2^m)`.
pub fn vieta_product(m: u32, x: &BigReal, ctx: &PrecisionContext) -> Result<BigReal> {
    SincExpansionParams::dyadic(m)?;
    let inner = ctx.widened(ceil_log10(m as u64) + 3);
    let mut prod = BigReal::one();
    for k in 1..=m {
        prod = prod.mul_round(&x.div_pow2(k).cos(&inner), &inner);
    }
    Ok(prod.round_to(ctx))
}

/// `(1/2^(M-1)) Σ_{m=1..2^(M-1)} cos((2m - 1) x / 2^M)`, evaluated term by term.
pub fn product_to_sum_rhs(m: u32, x: &BigReal, ctx: &PrecisionContext) -> Result<BigReal> {
    let terms = SincExpansionParams::dyadic(m)?.order();
    let inner = ctx.widened(ceil_log10(terms) + 3);
    let base = x.div_pow2(m);
    let sum = sum_indexed(terms, |i| base.mul_int(2 * i as i64 + 1).cos(&inner));
    Ok(sum.round_to(&inner).div_pow2(m - 1).round_to(ctx))
}

/// `(1/L) Σ_{ℓ=1..L} cos((ℓ - 1/2) x / L)`, for any real `x`.
pub fn incomplete_cosine(l: u64, x: &BigReal, ctx: &PrecisionContext) -> Result<BigReal> {
    SincExpansionParams::general(l)?;
    let inner = ctx.widened(ceil_log10(l) + 3);
    // (ℓ - 1/2) x / L = (2ℓ - 1) * (x / 2L)
    let step = x.div(
        &BigReal::from(2 * l as i64),
        &inner.widened(ceil_log10(l) + 1),
    )?;
    let sum = sum_indexed(l, |i| step.mul_int(2 * i as i64 + 1).cos(&inner));
    Ok(sum.div(&BigReal::from(l as i64), &inner)?.round_to(ctx))
}

/// `πL` and `4πL`.
pub fn validity_window(l: u64, ctx: &PrecisionContext) -> Result<ValidityWindow> {
    SincExpansionParams::general(l)?;
    let half_width = reference_pi(ctx.work_digits()).mul_int(l as i64);
    let period = half_width.mul_int(4);
    Ok(ValidityWindow { half_width, period })
}

/// `Σ_{i<n} f(i)` with the terms computed in parallel and added in index
/// order; the terms are exact decimals so the order is immaterial, but it
/// keeps the reduction obviously deterministic.
fn sum_indexed<F>(n: u64, f: F) -> BigReal
where
    F: Fn(u64) -> BigReal + Sync + Send,
{
    let terms = par::map_indexed(n as usize, |i| f(i as u64));
    terms.iter().fold(BigReal::zero(), |acc, t| &acc + t)
}

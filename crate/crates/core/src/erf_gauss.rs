//! erf as a finite sum of Gaussians:
//!
//! `erf(x) ≈ (2x / (√π L)) Σ_{ℓ=1..L} exp(-(ℓ - 1/2)² x² / L²)`
//!
//! obtained by integrating the incomplete cosine expansion of sinc against
//! `e^(-t²/4)`. The substitution is sound while `πL >= 12x`; outside `[-6, 6]`
//! the piecewise form returns `±1`.
//!
//! The sum is the midpoint rule with step `1/L` for `(2x/√π) ∫₀¹ e^(-x²s²) ds`,
//! so inside the valid range its error behaves like
//! `2x³ e^(-x²) / (12 √π L²)`.

use std::io::Write;

use num_bigint::BigInt;

use crate::bignum::{ceil_log10, BigReal, PrecisionContext};
use crate::error::{Error, Result};
use crate::oracles::{reference_erf_extended, reference_pi};
use crate::par;

/// `|x|` beyond which the piecewise form returns `sign(x)`.
pub const PIECEWISE_CUTOFF: i64 = 6;

/// Number of Gaussian terms and the real argument.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ErfApproxParams {
    pub l: u64,
    pub x: BigReal,
}

impl ErfApproxParams {
    pub fn new(l: u64, x: BigReal) -> Result<Self> {
        if l == 0 {
            return Err(Error::invalid(
                "number of Gaussian terms L must be at least 1",
            ));
        }
        Ok(Self { l, x })
    }

    pub fn evaluate(&self, ctx: &PrecisionContext) -> Result<BigReal> {
        erf_gauss_series(self.l, &self.x, ctx)
    }

    pub fn criterion_ok(&self, ctx: &PrecisionContext) -> bool {
        criterion_ok(self.l, &self.x, ctx)
    }
}

/// One row of an erf profile.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ErfProfileRecord {
    pub x: BigReal,
    pub erf_ref: BigReal,
    pub erf_approx: BigReal,
    pub criterion_satisfied: bool,
}

impl ErfProfileRecord {
    pub fn abs_error(&self) -> BigReal {
        (&self.erf_ref - &self.erf_approx).abs()
    }
}

/// The Gaussian expansion series. Error at most `(L + 5)` ulp.
pub fn erf_gauss_series(l: u64, x: &BigReal, ctx: &PrecisionContext) -> Result<BigReal> {
    if l == 0 {
        return Err(Error::invalid(
            "number of Gaussian terms L must be at least 1",
        ));
    }
    if x.is_zero() {
        return Ok(BigReal::zero().round_to(ctx));
    }
    let inner = ctx.widened(ceil_log10(l) + 4);
    // exponent of term ℓ: (2ℓ - 1)² q with q = x² / (4L²). Errors in q are
    // amplified by up to 4L², so q carries 2 log10(2L) more digits.
    let q_ctx = inner.widened(2 * ceil_log10(2 * l) + 1);
    let l_big = BigInt::from(l);
    let four_l2 = BigReal::from_bigint(&l_big * &l_big * 4u32);
    let q = x.mul_round(x, &q_ctx).div(&four_l2, &q_ctx)?;
    let terms = par::map_indexed(l as usize, |i| {
        let odd = BigInt::from(2 * i as u64 + 1);
        q.mul_bigint(&(&odd * &odd)).exp_neg(&inner)
    });
    let sum = terms.iter().fold(BigReal::zero(), |acc, t| &acc + t);
    let sqrt_pi = reference_pi(inner.work_digits() + 2).sqrt(&inner)?;
    let pref = x.mul_int(2).div(&sqrt_pi.mul_bigint(&l_big), &inner)?;
    Ok(pref.mul_round(&sum, &inner).round_to(ctx))
}

/// Whether `πL >= 12x`, comparing against π at working precision.
///
/// Differences within `L + 12` ulp count as equality, so an `x` that is the
/// rounded image of an exact boundary value (such as `π/12` at `L = 1`) is
/// accepted.
pub fn criterion_ok(l: u64, x: &BigReal, ctx: &PrecisionContext) -> bool {
    let pi = reference_pi(ctx.work_digits());
    let lhs = pi.mul_int(l as i64);
    let rhs = x.mul_int(12);
    let slack = ctx.ulp().mul_int(l as i64 + 12);
    &lhs + &slack >= rhs
}

/// Smallest `L` with `πL >= 12 x_max`, i.e. `ceil(12 x_max / π)`.
pub fn min_l_for_range(x_max: &BigReal, ctx: &PrecisionContext) -> Result<u64> {
    if x_max.signum() <= 0 {
        return Err(Error::invalid("x_max must be positive"));
    }
    let pi = reference_pi(ctx.work_digits());
    let q = x_max.mul_int(12).div(&pi, ctx)?;
    let mut n = q.floor_to_bigint();
    n += 1;
    let mut n: u64 = n
        .try_into()
        .map_err(|_| Error::invalid("x_max too large for a 64-bit order"))?;
    while n > 1 && criterion_ok(n - 1, x_max, ctx) {
        n -= 1;
    }
    while !criterion_ok(n, x_max, ctx) {
        n += 1;
    }
    Ok(n)
}

/// The series on `[-6, 6]`, `sign(x)` outside it.
pub fn erf_piecewise(l: u64, x: &BigReal, ctx: &PrecisionContext) -> Result<BigReal> {
    if x.abs() <= BigReal::from_int(PIECEWISE_CUTOFF) {
        erf_gauss_series(l, x, ctx)
    } else {
        Ok(BigReal::from_int(x.signum() as i64).round_to(ctx))
    }
}

/// Uniform grid `x_min + i (x_max - x_min) / steps`, `i = 0..=steps`.
pub fn uniform_grid(
    x_min: &BigReal,
    x_max: &BigReal,
    steps: u64,
    ctx: &PrecisionContext,
) -> Result<Vec<BigReal>> {
    if x_min >= x_max {
        return Err(Error::invalid("x_min must be below x_max"));
    }
    if steps < 2 {
        return Err(Error::invalid("steps must be at least 2"));
    }
    let span = x_max - x_min;
    (0..=steps)
        .map(|i| {
            let off = span
                .mul_int(i as i64)
                .div(&BigReal::from(steps as i64), ctx)?;
            Ok(x_min + &off)
        })
        .collect()
}

/// Series and reference erf over a uniform grid. Rows come back in grid order
/// even though they are evaluated in parallel.
pub fn erf_profile(
    l: u64,
    x_min: &BigReal,
    x_max: &BigReal,
    steps: u64,
    ctx: &PrecisionContext,
) -> Result<Vec<ErfProfileRecord>> {
    if l == 0 {
        return Err(Error::invalid(
            "number of Gaussian terms L must be at least 1",
        ));
    }
    let grid = uniform_grid(x_min, x_max, steps, ctx)?;
    par::map_slice(&grid, |x| -> Result<ErfProfileRecord> {
        Ok(ErfProfileRecord {
            x: x.clone(),
            erf_ref: reference_erf_extended(x, ctx)?,
            erf_approx: erf_gauss_series(l, x, ctx)?,
            criterion_satisfied: criterion_ok(l, &x.abs(), ctx),
        })
    })
    .into_iter()
    .collect()
}

/// First grid point where `|series - erf|` exceeds `threshold`, scanning
/// upward from `x_min`.
pub fn degradation_onset(
    l: u64,
    threshold: &BigReal,
    x_min: &BigReal,
    x_max: &BigReal,
    steps: u64,
    ctx: &PrecisionContext,
) -> Result<Option<BigReal>> {
    let rows = erf_profile(l, x_min, x_max, steps, ctx)?;
    Ok(rows
        .into_iter()
        .find(|r| r.abs_error() > *threshold)
        .map(|r| r.x))
}

/// CSV with header `x,erf_ref,erf_approx,abs_error,criterion`; numbers are
/// plain decimals with `decimals` fractional digits.
pub fn write_profile_csv<W: Write>(
    out: &mut W,
    records: &[ErfProfileRecord],
    decimals: u32,
) -> std::io::Result<()> {
    writeln!(out, "x,erf_ref,erf_approx,abs_error,criterion")?;
    for r in records {
        writeln!(
            out,
            "{},{},{},{},{}",
            r.x.to_decimal_string(decimals),
            r.erf_ref.to_decimal_string(decimals),
            r.erf_approx.to_decimal_string(decimals),
            r.abs_error().to_decimal_string(decimals),
            r.criterion_satisfied
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracles::reference_erf;

    fn r(s: &str) -> BigReal {
        s.parse().unwrap()
    }

    fn ctx() -> PrecisionContext {
        PrecisionContext::new(25, 10).unwrap()
    }

    #[test]
    fn series_is_odd_and_vanishes_at_origin() {
        let c = ctx();
        for l in [1u64, 5, 23] {
            assert!(erf_gauss_series(l, &BigReal::zero(), &c).unwrap().is_zero());
            let x = r("1.375");
            assert_eq!(
                erf_gauss_series(l, &-&x, &c).unwrap(),
                -erf_gauss_series(l, &x, &c).unwrap()
            );
        }
        assert!(erf_gauss_series(0, &r("1"), &c).is_err());
    }

    #[test]
    fn series_error_follows_midpoint_law() {
        // series - erf ≈ 2x³e^(-x²) / (12√π L²) = 3.8431e-5 at x = 1, L = 30.
        let c = ctx();
        let x = r("1");
        let d = erf_gauss_series(30, &x, &c).unwrap() - reference_erf(&x, &c).unwrap();
        assert!(d > BigReal::zero());
        assert!(d < r("0.00004"));
        let law = x
            .exp_neg(&c)
            .mul_int(2)
            .div(&r("1").mul_int(12 * 900), &c)
            .unwrap();
        let law = law.div(&reference_pi(40).sqrt(&c).unwrap(), &c).unwrap();
        let ratio = d.div(&law, &c).unwrap().to_f64();
        assert!((ratio - 1.0).abs() < 0.01, "ratio {ratio}");
    }

    #[test]
    fn error_shrinks_as_l_doubles() {
        let c = ctx();
        let x = r("2");
        let exact = reference_erf(&x, &c).unwrap();
        let mut prev: Option<BigReal> = None;
        for l in [16u64, 32, 64, 128, 256] {
            let e = (erf_gauss_series(l, &x, &c).unwrap() - exact.clone()).abs();
            if let Some(p) = prev {
                assert!(e < p, "L = {l}");
            }
            prev = Some(e);
        }
    }

    #[test]
    fn criterion_examples() {
        let c = ctx();
        assert!(criterion_ok(23, &r("6"), &c));
        assert!(!criterion_ok(22, &r("6"), &c));
        assert!(criterion_ok(1, &BigReal::zero(), &c));
    }

    #[test]
    fn min_l_examples() {
        let c = ctx();
        assert_eq!(min_l_for_range(&r("6"), &c).unwrap(), 23);
        assert_eq!(min_l_for_range(&r("1"), &c).unwrap(), 4);
        let pi_12 = reference_pi(c.work_digits()).div_int(12, &c).unwrap();
        assert_eq!(min_l_for_range(&pi_12, &c).unwrap(), 1);
        assert!(min_l_for_range(&BigReal::zero(), &c).is_err());
    }

    #[test]
    fn piecewise_examples() {
        let c = ctx();
        assert_eq!(erf_piecewise(23, &r("10"), &c).unwrap(), BigReal::one());
        assert_eq!(
            erf_piecewise(23, &r("-10"), &c).unwrap(),
            BigReal::from_int(-1)
        );
        assert!(erf_piecewise(23, &BigReal::zero(), &c).unwrap().is_zero());
        assert_eq!(
            erf_piecewise(23, &r("6"), &c).unwrap(),
            erf_gauss_series(23, &r("6"), &c).unwrap()
        );
    }

    #[test]
    fn profile_rows_and_origin() {
        let c = PrecisionContext::new(20, 10).unwrap();
        let rows = erf_profile(8, &r("0"), &r("6"), 60, &c).unwrap();
        assert_eq!(rows.len(), 61);
        assert!(rows[0].erf_ref.is_zero() && rows[0].erf_approx.is_zero());
        let pi8 = reference_pi(30).mul_int(8);
        for row in &rows {
            assert_eq!(row.criterion_satisfied, row.x.mul_int(12) <= pi8);
            if row.criterion_satisfied {
                // calibrated maximum 6.02e-4 near x = 1.2
                assert!(row.abs_error() < r("0.00061"), "{}", row.x);
            }
        }
        assert!(erf_profile(8, &r("1"), &r("1"), 10, &c).is_err());
        assert!(erf_profile(8, &r("0"), &r("1"), 1, &c).is_err());
    }

    #[test]
    fn small_l_decays_far_out() {
        let c = PrecisionContext::new(20, 10).unwrap();
        let rows = erf_profile(5, &r("0"), &r("30"), 300, &c).unwrap();
        let last = rows.last().unwrap();
        assert_eq!(last.erf_ref.to_decimal_string(15), "1.000000000000000");
        // 8.355e-4 at x = 30, 8.267e-2 at x = 20
        assert!(last.erf_approx.abs() < r("0.001"));
        assert!(rows[200].erf_approx > r("0.08"));
        assert!(rows[200..]
            .windows(2)
            .all(|w| w[1].erf_approx < w[0].erf_approx));
    }

    #[test]
    fn csv_layout() {
        let c = PrecisionContext::new(6, 4).unwrap();
        let rows = erf_profile(8, &r("0"), &r("1"), 2, &c).unwrap();
        let mut buf = Vec::new();
        write_profile_csv(&mut buf, &rows, 6).unwrap();
        let s = String::from_utf8(buf).unwrap();
        let lines: Vec<_> = s.lines().collect();
        assert_eq!(lines.len(), 4);
        assert_eq!(lines[0], "x,erf_ref,erf_approx,abs_error,criterion");
        assert_eq!(lines[1], "0.000000,0.000000,0.000000,0.000000,true");
        assert!(lines[3].starts_with("1.000000,0.842701,"));
    }
}

//! Square root, exponential, sine/cosine and arctangent on [`BigReal`].
//!
//! Every function evaluates at a widened internal precision and rounds once to
//! the caller's working digits. The internal widening covers the truncation
//! and per-step rounding of the series below, so the stated bounds hold at the
//! caller's scale:
//!
//! | function          | bound (ulp at `work_digits`) |
//! |-------------------|------------------------------|
//! | `sqrt`            | 1                            |
//! | `exp_neg`, `exp`  | 2                            |
//! | `sin`, `cos`      | 2                            |
//! | `atan_reciprocal` | 2                            |

use std::collections::HashMap;
use std::sync::{OnceLock, RwLock};

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

use super::{pow10, round_div, BigReal, PrecisionContext};
use crate::error::{Error, Result};

/// Extra internal digits carried by every series evaluation.
const INTERNAL_GUARD: u32 = 6;

fn fx_mul(a: &BigInt, b: &BigInt, one: &BigInt) -> BigInt {
    round_div(&(a * b), one)
}

/// Number of decimal digits in the integer part of `|x|` (0 for |x| < 1).
fn int_digits(x: &BigReal) -> u32 {
    match x.magnitude_exponent() {
        Some(e) if e >= 0 => e as u32 + 1,
        _ => 0,
    }
}

impl BigReal {
    /// Square root, error at most half an ulp (rounded integer Newton root).
    pub fn sqrt(&self, ctx: &PrecisionContext) -> Result<BigReal> {
        if self.is_negative() {
            return Err(Error::Domain(format!("sqrt of negative value {self}")));
        }
        let w = ctx.work_digits();
        // sqrt(m / 10^(2w)) * 10^w = sqrt(m)
        let n = self.mantissa_at(2 * w);
        let n = n.magnitude();
        let mut root = n.sqrt();
        // Round to nearest: bump when (root + 1/2)^2 <= n, i.e. 4n >= (2root+1)^2.
        let twice = (&root << 1u32) + 1u32;
        if (n << 2u32) >= &twice * &twice {
            root += 1u32;
        }
        Ok(BigReal::from_scaled(BigInt::from(root), w))
    }

    /// `e^(-a)`. Defined for every real `a`; negative arguments go through
    /// [`BigReal::exp`].
    ///
    /// The argument is halved `k` times until it is at most 1, the alternating
    /// Taylor series is summed until the next term vanishes at the internal
    /// scale, and the result is squared `k` times.
    pub fn exp_neg(&self, ctx: &PrecisionContext) -> BigReal {
        if self.is_negative() {
            return (-self).exp(ctx);
        }
        let w = ctx.work_digits();
        // e^-a < 10^-(w+2) rounds to zero.
        let cutoff = BigReal::from_int(((w as i64) + 2) * 2303 / 1000 + 1);
        if *self > cutoff {
            return BigReal::from_scaled(BigInt::zero(), w);
        }
        let ip = self.floor_to_bigint();
        let k = if ip.is_zero() { 0 } else { ip.bits() as u32 };
        // Each squaring doubles the relative error: about 0.302 digits per step.
        let wp = w + INTERNAL_GUARD + (k * 302).div_ceil(1000) + 2;
        let one = pow10(wp);
        let r = self.div_pow2(k).mantissa_at(wp);

        let mut sum = one.clone();
        let mut term = one.clone();
        let mut n: u64 = 1;
        loop {
            term = -round_div(&(&term * &r), &(&one * BigInt::from(n)));
            if term.is_zero() {
                break;
            }
            sum += &term;
            n += 1;
        }
        for _ in 0..k {
            sum = fx_mul(&sum, &sum, &one);
        }
        BigReal::from_scaled(sum, wp).rescaled(w)
    }

    /// `e^a` for any real `a`.
    pub fn exp(&self, ctx: &PrecisionContext) -> BigReal {
        if !self.is_positive_strict() {
            return (-self).exp_neg(ctx);
        }
        // e^-a carries about a*log10(e) leading zeros; widen so the reciprocal
        // keeps full relative precision.
        let lead = self.to_f64() * std::f64::consts::LOG10_E;
        let extra = lead.ceil().max(0.0) as u32 + 4;
        let inner = ctx.widened(extra);
        let q = self.exp_neg(&inner);
        BigReal::one()
            .div(&q, ctx)
            .expect("e^-a is positive at widened precision")
    }

    fn is_positive_strict(&self) -> bool {
        self.mantissa.is_positive()
    }

    /// Sine with argument reduction modulo π/2 against a Machin π carried at
    /// extra precision.
    pub fn sin(&self, ctx: &PrecisionContext) -> BigReal {
        self.sin_cos(ctx).0
    }

    pub fn cos(&self, ctx: &PrecisionContext) -> BigReal {
        self.sin_cos(ctx).1
    }

    /// Both `(sin x, cos x)` from one reduction.
    pub fn sin_cos(&self, ctx: &PrecisionContext) -> (BigReal, BigReal) {
        let w = ctx.work_digits();
        // Reduction subtracts n*π/2 with n ~ |x|; each integer digit of |x|
        // costs one digit of π.
        let wp = w + INTERNAL_GUARD + int_digits(self);
        let one = pow10(wp);
        let x = self.mantissa_at(wp);
        let half_pi = machin_pi(wp + 1).mantissa_at(wp + 1);
        let half_pi = round_div(&half_pi, &BigInt::from(20));
        let n = round_div(&x, &half_pi);
        let r = &x - &n * &half_pi;

        let r2 = fx_mul(&r, &r, &one);
        // sin r
        let mut s = r.clone();
        let mut t = r.clone();
        let mut k: u64 = 1;
        loop {
            let d = BigInt::from((2 * k) * (2 * k + 1));
            t = -round_div(&(&t * &r2), &(&one * d));
            if t.is_zero() {
                break;
            }
            s += &t;
            k += 1;
        }
        // cos r
        let mut c = one.clone();
        let mut t = one.clone();
        let mut k: u64 = 1;
        loop {
            let d = BigInt::from((2 * k - 1) * (2 * k));
            t = -round_div(&(&t * &r2), &(&one * d));
            if t.is_zero() {
                break;
            }
            c += &t;
            k += 1;
        }

        let quadrant = n.mod_floor_4();
        let (s, c) = match quadrant {
            0 => (s, c),
            1 => (c, -s),
            2 => (-s, -c),
            _ => (-c, s),
        };
        (
            BigReal::from_scaled(s, wp).rescaled(w),
            BigReal::from_scaled(c, wp).rescaled(w),
        )
    }

    /// `arctan(1/n)` for `n >= 1` from the alternating Taylor series in `1/n`.
    pub fn atan_reciprocal(n: u64, ctx: &PrecisionContext) -> Result<BigReal> {
        if n == 0 {
            return Err(Error::Domain("atan_reciprocal needs n >= 1".into()));
        }
        if n == 1 {
            // The series in 1/n does not converge usefully at n = 1; use
            // arctan 1 = 4 arctan(1/5) - arctan(1/239).
            let inner = ctx.widened(2);
            let a = BigReal::atan_reciprocal(5, &inner)?;
            let b = BigReal::atan_reciprocal(239, &inner)?;
            return Ok((&a.mul_int(4) - &b).round_to(ctx));
        }
        let w = ctx.work_digits();
        Ok(BigReal::from_scaled(
            atan_recip_raw(n, w + INTERNAL_GUARD + 2),
            w + INTERNAL_GUARD + 2,
        )
        .rescaled(w))
    }
}

/// `arctan(1/n) * 10^wp`, each power `10^wp / n^(2k+1)` truncated. The
/// accumulated truncation is below two units per term.
fn atan_recip_raw(n: u64, wp: u32) -> BigInt {
    let n = BigInt::from(n);
    let n2 = &n * &n;
    let mut power = pow10(wp) / &n;
    let mut sum = BigInt::zero();
    let mut k: u64 = 0;
    while !power.is_zero() {
        let term = &power / BigInt::from(2 * k + 1);
        if k.is_multiple_of(2) {
            sum += term;
        } else {
            sum -= term;
        }
        power /= &n2;
        k += 1;
    }
    sum
}

trait ModFloor4 {
    fn mod_floor_4(&self) -> u8;
}

impl ModFloor4 for BigInt {
    fn mod_floor_4(&self) -> u8 {
        let m = num_integer::Integer::mod_floor(self, &BigInt::from(4));
        m.to_u8().unwrap_or(0)
    }
}

/// π from Machin's formula `16 arctan(1/5) - 4 arctan(1/239)` with `digits`
/// places after the point, memoised per digit count.
///
/// This is the building block used for argument reduction; the
/// cross-checked reference value lives in `oracles::reference_pi`.
pub fn machin_pi(digits: u32) -> BigReal {
    static CACHE: OnceLock<RwLock<HashMap<u32, BigReal>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| RwLock::new(HashMap::new()));
    if let Some(v) = cache.read().expect("pi cache poisoned").get(&digits) {
        return v.clone();
    }
    let wp = digits + INTERNAL_GUARD + 2;
    let a = atan_recip_raw(5, wp);
    let b = atan_recip_raw(239, wp);
    let pi = BigReal::from_scaled(a * 16 - b * 4, wp).rescaled(digits);
    cache
        .write()
        .expect("pi cache poisoned")
        .entry(digits)
        .or_insert(pi)
        .clone()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    fn r(s: &str) -> BigReal {
        s.parse().unwrap()
    }

    fn ctx(out: u32) -> PrecisionContext {
        PrecisionContext::new(out, 0).unwrap()
    }

    /// e from the independent factorial series 1/k!, using exact rationals
    /// until the tail is below 10^-(digits+5).
    fn e_by_factorials(digits: u32) -> BigReal {
        use num_rational::BigRational;
        let mut sum = BigRational::zero();
        let mut fact = BigInt::one();
        let bound = BigRational::new(BigInt::one(), pow10(digits + 5));
        let mut k: u64 = 0;
        loop {
            if k > 0 {
                fact *= BigInt::from(k);
            }
            let term = BigRational::new(BigInt::one(), fact.clone());
            let small = term < bound;
            sum += term;
            if small {
                break;
            }
            k += 1;
        }
        let w = digits + 5;
        BigReal::from_scaled(round_div(&(sum.numer() * pow10(w)), sum.denom()), w)
    }

    #[test]
    fn sqrt_examples() {
        assert_eq!(r("4").sqrt(&ctx(5)).unwrap(), r("2"));
        assert!(r("0").sqrt(&ctx(5)).unwrap().is_zero());
        let c = ctx(20);
        let s = r("2").sqrt(&c).unwrap();
        assert_eq!(s.to_exact_string(), "1.41421356237309504880");
        let sq = (&s * &s) - r("2");
        assert!(sq.abs() <= c.ulp().mul_int(3));
        assert!(r("-1").sqrt(&c).is_err());
    }

    #[test]
    fn exp_neg_examples() {
        let c = ctx(15);
        assert_eq!(BigReal::zero().exp_neg(&c), BigReal::one());
        let inv_e = BigReal::one().div(&e_by_factorials(30), &ctx(30)).unwrap();
        let got = r("1").exp_neg(&c);
        assert_eq!(got.to_exact_string(), "0.367879441171442");
        assert!(got.ulps_from(&inv_e, &c) <= BigInt::from(2));
        for a in ["0.001", "0.5", "2.75", "13", "40.5", "100"] {
            let v = r(a).exp_neg(&ctx(30));
            assert!(v > BigReal::zero() || a == "100", "{a}");
            assert!(v <= BigReal::one());
        }
    }

    #[test]
    fn exp_neg_matches_power_of_inverse_e() {
        // e^-5 = (1/e)^5 computed from the independent factorial series.
        let c = ctx(25);
        let inv_e = BigReal::one().div(&e_by_factorials(40), &ctx(40)).unwrap();
        let mut p = BigReal::one();
        for _ in 0..5 {
            p = p.mul_round(&inv_e, &ctx(40));
        }
        let got = r("5").exp_neg(&c);
        assert!(got.ulps_from(&p, &c) <= BigInt::from(2), "{got} vs {p}");
    }

    #[test]
    fn exp_positive_is_reciprocal() {
        let c = ctx(30);
        let e = r("1").exp(&c);
        assert!(e.ulps_from(&e_by_factorials(40), &c) <= BigInt::from(2));
        let big = r("20").exp(&c);
        let back = r("20").exp_neg(&ctx(45)).mul_round(&big, &c);
        assert!((back - BigReal::one()).abs() < r("0.000000000000000000001"));
    }

    #[test]
    fn trig_basics() {
        let c = ctx(30);
        assert_eq!(BigReal::zero().cos(&c), BigReal::one());
        assert!(BigReal::zero().sin(&c).is_zero());
        let (s, co) = r("1").sin_cos(&c);
        let id = &s.mul_round(&s, &c) + &co.mul_round(&co, &c);
        assert!(id.ulps_from(&BigReal::one(), &c) <= BigInt::from(5));
        assert_eq!(s.to_decimal_string(20), "0.84147098480789650665");
        assert_eq!(co.to_decimal_string(20), "0.54030230586813971740");
    }

    #[test]
    fn trig_quadrants() {
        let c = ctx(25);
        let pi = machin_pi(40);
        assert!(pi.sin(&c).abs() <= c.ulp().mul_int(2));
        assert!(pi.cos(&c).ulps_from(&BigReal::from_int(-1), &c) <= BigInt::from(2));
        let x = r("-2.5");
        assert_eq!(x.sin(&c), -(r("2.5").sin(&c)));
        assert_eq!(x.cos(&c), r("2.5").cos(&c));
    }

    #[test]
    fn atan_examples() {
        let c = ctx(20);
        let a1 = BigReal::atan_reciprocal(1, &c).unwrap();
        // π/4 = 0.785398163397448309615660...
        assert!(a1.ulps_from(&r("0.78539816339744830961566"), &c) <= BigInt::from(2));
        for n in [1u64, 2, 3, 5, 239, 1000] {
            let a = BigReal::atan_reciprocal(n, &c).unwrap();
            assert!(a < BigReal::one().div_int(n as i64, &c).unwrap(), "{n}");
        }
        assert!(BigReal::atan_reciprocal(0, &c).is_err());
    }

    #[test]
    fn machin_pi_prefix() {
        assert_eq!(
            machin_pi(50).to_truncated_string(40),
            "3.1415926535897932384626433832795028841971"
        );
    }
}

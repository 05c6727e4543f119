//! Decimal fixed-point arbitrary-precision reals.
//!
//! A [`BigReal`] is an exact value `mantissa / 10^scale`. Addition, subtraction
//! and plain multiplication are exact; anything that cannot be exact (division,
//! square roots, transcendental functions) takes a [`PrecisionContext`] and
//! rounds half away from zero to `work_digits` places after the point.
//!
//! Decimal rather than binary scaling keeps the leading digits of a result
//! directly readable, which is what digit-coincidence counting needs.

mod elementary;

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;
use std::sync::OnceLock;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub use elementary::machin_pi;

/// Guard digits used when a caller does not ask for anything else.
pub const DEFAULT_GUARD_DIGITS: u32 = 10;

/// Output digits plus guard digits; every rounded operation lands on
/// `work_digits()` places after the decimal point.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PrecisionContext {
    out_digits: u32,
    guard_digits: u32,
}

impl PrecisionContext {
    pub fn new(out_digits: u32, guard_digits: u32) -> Result<Self> {
        if out_digits == 0 {
            return Err(Error::invalid("out_digits must be at least 1"));
        }
        Ok(Self {
            out_digits,
            guard_digits,
        })
    }

    /// `out_digits` with the default guard.
    pub fn digits(out_digits: u32) -> Result<Self> {
        Self::new(out_digits, DEFAULT_GUARD_DIGITS)
    }

    pub fn out_digits(&self) -> u32 {
        self.out_digits
    }

    pub fn guard_digits(&self) -> u32 {
        self.guard_digits
    }

    pub fn work_digits(&self) -> u32 {
        self.out_digits + self.guard_digits
    }

    /// Same output digits, `extra` more guard digits.
    pub fn widened(&self, extra: u32) -> Self {
        Self {
            out_digits: self.out_digits,
            guard_digits: self.guard_digits + extra,
        }
    }

    pub fn with_min_guard(&self, min_guard: u32) -> Self {
        Self {
            out_digits: self.out_digits,
            guard_digits: self.guard_digits.max(min_guard),
        }
    }

    /// Guard digits for a sum of `n_terms` rounded terms at expansion order
    /// `order`: `10 + ceil(log10 order) + ceil(log10 n_terms)`, never below 10.
    pub fn summation_guard(order: u64, n_terms: u64) -> u32 {
        (10 + ceil_log10(order) + ceil_log10(n_terms)).max(10)
    }

    /// One unit in the last working place.
    pub fn ulp(&self) -> BigReal {
        BigReal::from_scaled(BigInt::one(), self.work_digits())
    }
}

/// `ceil(log10(n))` for `n >= 1`; zero for `n <= 1`.
pub fn ceil_log10(n: u64) -> u32 {
    if n <= 1 {
        return 0;
    }
    let mut digits = 0;
    let mut p: u128 = 1;
    while p < n as u128 {
        p *= 10;
        digits += 1;
    }
    digits
}

const POW10_CACHE: usize = 2048;

fn pow10_table() -> &'static [BigInt] {
    static TABLE: OnceLock<Vec<BigInt>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut v = Vec::with_capacity(POW10_CACHE);
        let mut p = BigInt::one();
        for _ in 0..POW10_CACHE {
            v.push(p.clone());
            p *= 10u32;
        }
        v
    })
}

/// `10^k` as a big integer.
pub fn pow10(k: u32) -> BigInt {
    match pow10_table().get(k as usize) {
        Some(p) => p.clone(),
        None => BigInt::from(10u32).pow(k),
    }
}

fn pow10_ref(k: u32) -> std::borrow::Cow<'static, BigInt> {
    match pow10_table().get(k as usize) {
        Some(p) => std::borrow::Cow::Borrowed(p),
        None => std::borrow::Cow::Owned(BigInt::from(10u32).pow(k)),
    }
}

/// `num / den` rounded half away from zero. `den` must be non-zero.
pub(crate) fn round_div(num: &BigInt, den: &BigInt) -> BigInt {
    let (q, r) = num.div_rem(den);
    if r.is_zero() {
        return q;
    }
    // |2r| >= |den| rounds away from zero; the sign of r follows num.
    let twice = r.magnitude() << 1u32;
    if twice >= *den.magnitude() {
        if (num.sign() == Sign::Minus) != (den.sign() == Sign::Minus) {
            q - 1
        } else {
            q + 1
        }
    } else {
        q
    }
}

/// Exact decimal fixed-point real: `mantissa / 10^scale`.
#[derive(Clone, Debug)]
pub struct BigReal {
    mantissa: BigInt,
    scale: u32,
}

impl BigReal {
    pub fn zero() -> Self {
        Self::from_scaled(BigInt::zero(), 0)
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    pub fn from_int(v: i64) -> Self {
        Self::from_scaled(BigInt::from(v), 0)
    }

    pub fn from_bigint(v: BigInt) -> Self {
        Self::from_scaled(v, 0)
    }

    pub fn from_scaled(mantissa: BigInt, scale: u32) -> Self {
        Self { mantissa, scale }
    }

    pub fn mantissa(&self) -> &BigInt {
        &self.mantissa
    }

    pub fn scale(&self) -> u32 {
        self.scale
    }

    pub fn is_zero(&self) -> bool {
        self.mantissa.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.mantissa.is_negative()
    }

    pub fn signum(&self) -> i32 {
        match self.mantissa.sign() {
            Sign::Minus => -1,
            Sign::NoSign => 0,
            Sign::Plus => 1,
        }
    }

    pub fn abs(&self) -> Self {
        Self::from_scaled(self.mantissa.abs(), self.scale)
    }

    /// Mantissa at `scale`, exact when growing the scale and rounded half
    /// away from zero when shrinking it.
    pub(crate) fn mantissa_at(&self, scale: u32) -> BigInt {
        match scale.cmp(&self.scale) {
            Ordering::Equal => self.mantissa.clone(),
            Ordering::Greater => &self.mantissa * pow10_ref(scale - self.scale).as_ref(),
            Ordering::Less => round_div(&self.mantissa, &pow10(self.scale - scale)),
        }
    }

    /// Re-express at `scale` decimal places (rounding half away from zero if
    /// precision is dropped).
    pub fn rescaled(&self, scale: u32) -> Self {
        Self::from_scaled(self.mantissa_at(scale), scale)
    }

    /// Round to the context's working precision.
    pub fn round_to(&self, ctx: &PrecisionContext) -> Self {
        self.rescaled(ctx.work_digits())
    }

    /// Drop trailing zero digits from the mantissa; the represented value is
    /// unchanged.
    pub fn normalized(&self) -> Self {
        if self.mantissa.is_zero() {
            return Self::zero();
        }
        let mut m = self.mantissa.clone();
        let mut s = self.scale;
        let ten = BigInt::from(10u32);
        while s > 0 {
            let (q, r) = m.div_rem(&ten);
            if !r.is_zero() {
                break;
            }
            m = q;
            s -= 1;
        }
        Self::from_scaled(m, s)
    }

    pub fn mul_int(&self, k: i64) -> Self {
        Self::from_scaled(&self.mantissa * k, self.scale)
    }

    pub fn mul_bigint(&self, k: &BigInt) -> Self {
        Self::from_scaled(&self.mantissa * k, self.scale)
    }

    /// Exact division by `2^k`: `1/2^k = 5^k / 10^k` has a finite expansion.
    pub fn div_pow2(&self, k: u32) -> Self {
        Self::from_scaled(&self.mantissa * BigInt::from(5u32).pow(k), self.scale + k)
    }

    /// Product rounded to working precision; error at most half an ulp.
    pub fn mul_round(&self, other: &Self, ctx: &PrecisionContext) -> Self {
        (self * other).round_to(ctx)
    }

    /// Quotient rounded to working precision; error at most half an ulp.
    pub fn div(&self, other: &Self, ctx: &PrecisionContext) -> Result<Self> {
        if other.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let w = ctx.work_digits();
        // self/other * 10^w = (ma * 10^(w + sb)) / (mb * 10^sa)
        let num_shift = w as i64 + other.scale as i64 - self.scale as i64;
        let (num, den) = if num_shift >= 0 {
            (
                &self.mantissa * pow10_ref(num_shift as u32).as_ref(),
                other.mantissa.clone(),
            )
        } else {
            (
                self.mantissa.clone(),
                &other.mantissa * pow10_ref((-num_shift) as u32).as_ref(),
            )
        };
        Ok(Self::from_scaled(round_div(&num, &den), w))
    }

    pub fn div_int(&self, d: i64, ctx: &PrecisionContext) -> Result<Self> {
        self.div(&Self::from_int(d), ctx)
    }

    /// Exact decimal representation with `scale` fractional digits.
    pub fn to_exact_string(&self) -> String {
        format_scaled(&self.mantissa, self.scale)
    }

    /// Rounded (half away from zero) to `decimals` fractional digits.
    pub fn to_decimal_string(&self, decimals: u32) -> String {
        format_scaled(&self.mantissa_at(decimals), decimals)
    }

    /// Truncated toward zero to `decimals` fractional digits.
    pub fn to_truncated_string(&self, decimals: u32) -> String {
        let m = if decimals >= self.scale {
            self.mantissa_at(decimals)
        } else {
            // BigInt division truncates toward zero.
            &self.mantissa / pow10(self.scale - decimals)
        };
        format_scaled(&m, decimals)
    }

    /// Lossy conversion for diagnostics and plotting only.
    pub fn to_f64(&self) -> f64 {
        let digits = self.mantissa.magnitude().to_str_radix(10);
        // 20 leading digits are more than an f64 can hold
        let keep = digits.len().min(20);
        let exp = (digits.len() - keep) as i64 - self.scale as i64;
        let v: f64 = format!("{}e{exp}", &digits[..keep])
            .parse()
            .unwrap_or(f64::NAN);
        if self.is_negative() {
            -v
        } else {
            v
        }
    }

    /// Decimal exponent of the leading non-zero digit (`floor(log10|x|)`),
    /// or `None` for zero.
    pub fn magnitude_exponent(&self) -> Option<i64> {
        if self.mantissa.is_zero() {
            return None;
        }
        let digits = self.mantissa.magnitude().to_str_radix(10).len() as i64;
        Some(digits - 1 - self.scale as i64)
    }

    /// Unit in the last place at this value's own scale.
    pub fn ulp_at_scale(&self) -> Self {
        Self::from_scaled(BigInt::one(), self.scale)
    }

    pub fn floor_to_bigint(&self) -> BigInt {
        self.mantissa.div_floor(&pow10(self.scale))
    }

    pub fn to_u64_floor(&self) -> Option<u64> {
        self.floor_to_bigint().to_u64()
    }

    /// Largest difference `|self - other|`, expressed in ulps at `ctx`.
    pub fn ulps_from(&self, other: &Self, ctx: &PrecisionContext) -> BigInt {
        let d = (self - other).abs();
        d.mantissa_at(ctx.work_digits()).abs()
    }
}

fn format_scaled(m: &BigInt, scale: u32) -> String {
    let digits = m.magnitude().to_str_radix(10);
    let mut out = String::with_capacity(digits.len() + 3);
    if m.is_negative() {
        out.push('-');
    }
    if scale == 0 {
        out.push_str(&digits);
        return out;
    }
    let scale = scale as usize;
    if digits.len() <= scale {
        out.push_str("0.");
        out.extend(std::iter::repeat_n('0', scale - digits.len()));
        out.push_str(&digits);
    } else {
        let split = digits.len() - scale;
        out.push_str(&digits[..split]);
        out.push('.');
        out.push_str(&digits[split..]);
    }
    out
}

impl fmt::Display for BigReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_exact_string())
    }
}

impl FromStr for BigReal {
    type Err = Error;

    /// Plain decimal literals: optional sign, digits, optional fraction.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::MalformedNumber(s.to_string());
        let t = s.trim();
        let (neg, body) = match t.as_bytes().first() {
            Some(b'-') => (true, &t[1..]),
            Some(b'+') => (false, &t[1..]),
            _ => (false, t),
        };
        let (int_part, frac_part) = match body.split_once('.') {
            Some((i, f)) => (i, f),
            None => (body, ""),
        };
        if int_part.is_empty() && frac_part.is_empty() {
            return Err(bad());
        }
        if !int_part.bytes().all(|b| b.is_ascii_digit())
            || !frac_part.bytes().all(|b| b.is_ascii_digit())
        {
            return Err(bad());
        }
        let digits = format!("{int_part}{frac_part}");
        let mag = BigUint::parse_bytes(digits.as_bytes(), 10).ok_or_else(bad)?;
        let sign = if neg { Sign::Minus } else { Sign::Plus };
        Ok(Self::from_scaled(
            BigInt::from_biguint(sign, mag),
            frac_part.len() as u32,
        ))
    }
}

impl PartialEq for BigReal {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for BigReal {}

impl PartialOrd for BigReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for BigReal {
    fn cmp(&self, other: &Self) -> Ordering {
        let s = self.scale.max(other.scale);
        self.mantissa_at(s).cmp(&other.mantissa_at(s))
    }
}

impl<'a> Add<&'a BigReal> for &'a BigReal {
    type Output = BigReal;

    fn add(self, rhs: &'a BigReal) -> BigReal {
        let s = self.scale.max(rhs.scale);
        BigReal::from_scaled(self.mantissa_at(s) + rhs.mantissa_at(s), s)
    }
}

impl Add for BigReal {
    type Output = BigReal;

    fn add(self, rhs: BigReal) -> BigReal {
        &self + &rhs
    }
}

impl<'a> Sub<&'a BigReal> for &'a BigReal {
    type Output = BigReal;

    fn sub(self, rhs: &'a BigReal) -> BigReal {
        let s = self.scale.max(rhs.scale);
        BigReal::from_scaled(self.mantissa_at(s) - rhs.mantissa_at(s), s)
    }
}

impl Sub for BigReal {
    type Output = BigReal;

    fn sub(self, rhs: BigReal) -> BigReal {
        &self - &rhs
    }
}

/// Exact product; the scale is the sum of the operand scales.
impl<'a> Mul<&'a BigReal> for &'a BigReal {
    type Output = BigReal;

    fn mul(self, rhs: &'a BigReal) -> BigReal {
        BigReal::from_scaled(&self.mantissa * &rhs.mantissa, self.scale + rhs.scale)
    }
}

impl Mul for BigReal {
    type Output = BigReal;

    fn mul(self, rhs: BigReal) -> BigReal {
        &self * &rhs
    }
}

impl Neg for BigReal {
    type Output = BigReal;

    fn neg(self) -> BigReal {
        BigReal::from_scaled(-self.mantissa, self.scale)
    }
}

impl Neg for &BigReal {
    type Output = BigReal;

    fn neg(self) -> BigReal {
        BigReal::from_scaled(-&self.mantissa, self.scale)
    }
}

impl From<i64> for BigReal {
    fn from(v: i64) -> Self {
        Self::from_int(v)
    }
}

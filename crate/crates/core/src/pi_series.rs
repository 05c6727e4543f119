//! The two asymptotic π series
//!
//! * midpoint form: `π ≈ 16L Σ_{ℓ=1..L} 1/((2ℓ-1)² + 4L²)`
//! * endpoint form: `π ≈ 4L Σ_{ℓ=1..L} 1/(ℓ² + L²)`
//!
//! evaluated either by direct summation or through their Euler–Maclaurin
//! expansions. With `g(x) = 4/(1+x²)` and `h = 1/L` the midpoint form is the
//! midpoint rule and the endpoint form the right-endpoint rule for
//! `∫₀¹ g = π`, so
//!
//! ```text
//! midpoint = π + Σ_k (2^(1-2k) - 1) B_2k/(2k)! h^2k (g^(2k-1)(1) - g^(2k-1)(0))
//! endpoint = π + h/2 (g(1) - g(0)) + Σ_k B_2k/(2k)! h^2k (g^(2k-1)(1) - g^(2k-1)(0))
//! ```
//!
//! The leading terms give the error laws `+1/(12L²)` and `-1/L - 1/(6L²)`.

use std::sync::OnceLock;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::bignum::{pow10, round_div, BigReal, PrecisionContext};
use crate::error::{Error, Result};
use crate::oracles::reference_pi;
use crate::par;

/// Direct summation refuses more terms than this unless overridden.
pub const DIRECT_TERM_CAP: u64 = 2_000_000_000;

/// Direct summation refuses more terms than this even when overridden.
pub const DIRECT_HARD_CAP: u64 = 100_000_000_000;

/// Largest Euler–Maclaurin order the accelerated path will use.
pub const MAX_CORRECTION_ORDER: u32 = 12;

/// Largest accepted `L`.
pub const MAX_L: u64 = 1_000_000_000_000_000_000;

/// Orders tabulated beyond the cap so that the first omitted non-zero
/// correction is always available.
const TABLE_ORDER: u32 = MAX_CORRECTION_ORDER + 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SeriesKind {
    /// `16L Σ 1/((2ℓ-1)² + 4L²)`
    Midpoint,
    /// `4L Σ 1/(ℓ² + L²)`
    Endpoint,
}

impl SeriesKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::Midpoint => "midpoint",
            Self::Endpoint => "endpoint",
        }
    }

    /// `(2ℓ-1)² + 4L²` or `ℓ² + L²`.
    pub fn denominator(self, l: u64, ell: u64) -> u128 {
        let (l, ell) = (l as u128, ell as u128);
        match self {
            Self::Midpoint => (2 * ell - 1) * (2 * ell - 1) + 4 * l * l,
            Self::Endpoint => ell * ell + l * l,
        }
    }

    fn multiplier(self, l: u64) -> u128 {
        match self {
            Self::Midpoint => 16 * l as u128,
            Self::Endpoint => 4 * l as u128,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Direct,
    Accelerated,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Self::Direct => "direct",
            Self::Accelerated => "accelerated",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CorrectionOrder {
    /// Smallest order whose first omitted correction is below
    /// `10^-(out_digits + 3)`.
    Auto,
    Fixed(u32),
}

#[derive(Clone, Debug)]
pub struct PiResult {
    pub kind: SeriesKind,
    pub l: u64,
    pub method: Method,
    pub value: BigReal,
    pub error_bound: BigReal,
    /// Correction order used; 0 for direct sums.
    pub order: u32,
    pub ctx: PrecisionContext,
}

impl PiResult {
    /// The value cut (not rounded) to `out_digits` significant digits.
    pub fn digit_string(&self) -> String {
        self.value.to_truncated_string(self.ctx.out_digits() - 1)
    }
}

#[derive(Clone, Debug)]
pub struct DirectOptions {
    /// Worker count; `None` uses the global pool.
    pub threads: Option<usize>,
    /// Lift [`DIRECT_TERM_CAP`] (but not [`DIRECT_HARD_CAP`]).
    pub allow_over_cap: bool,
    /// Terms per parallel chunk.
    pub chunk_terms: u64,
}

impl Default for DirectOptions {
    fn default() -> Self {
        Self {
            threads: None,
            allow_over_cap: false,
            chunk_terms: 1 << 15,
        }
    }
}

fn check_l(l: u64) -> Result<()> {
    if l == 0 || l > MAX_L {
        return Err(Error::invalid(format!("L must lie in 1..=10^18, got {l}")));
    }
    Ok(())
}

/// [`pi_direct_with`] with default options.
pub fn pi_direct(kind: SeriesKind, l: u64, ctx: &PrecisionContext) -> Result<PiResult> {
    pi_direct_with(kind, l, ctx, &DirectOptions::default())
}

/// Sum the series term by term.
///
/// Each reciprocal `10^W / d` is rounded once to an integer at scale `W`;
/// the integers are added exactly, so the total does not depend on how the
/// range is chunked or scheduled. `W` carries enough guard digits to absorb
/// the `L/2` ulp of term rounding after multiplication by `16L` or `4L`.
pub fn pi_direct_with(
    kind: SeriesKind,
    l: u64,
    ctx: &PrecisionContext,
    opts: &DirectOptions,
) -> Result<PiResult> {
    check_l(l)?;
    if l > DIRECT_HARD_CAP || (l > DIRECT_TERM_CAP && !opts.allow_over_cap) {
        let cap = if opts.allow_over_cap {
            DIRECT_HARD_CAP
        } else {
            DIRECT_TERM_CAP
        };
        return Err(Error::ResourceRefused { terms: l, cap });
    }
    if opts.chunk_terms == 0 {
        return Err(Error::invalid("chunk size must be positive"));
    }
    let eff = ctx.with_min_guard(PrecisionContext::summation_guard(l, l));
    let w = eff.work_digits();
    let numerator = pow10(w).magnitude().clone();
    let num_be: Vec<u64> = numerator.to_u64_digits().into_iter().rev().collect();

    let chunk = opts.chunk_terms;
    let n_chunks = l.div_ceil(chunk) as usize;
    let partials = par::with_threads(opts.threads, || {
        par::map_indexed(n_chunks, |c| {
            let lo = 1 + c as u64 * chunk;
            let hi = (lo + chunk - 1).min(l);
            chunk_sum(kind, l, lo, hi, &num_be, &numerator)
        })
    })?;
    let mut total = BigUint::zero();
    for p in partials {
        total += p;
    }
    let scaled = BigInt::from(total) * BigInt::from(kind.multiplier(l));
    let value = BigReal::from_scaled(scaled, w);
    // L terms of at most half an ulp each, times the multiplier.
    let ulps = BigInt::from(kind.multiplier(l)) * BigInt::from(l);
    let error_bound = BigReal::from_scaled((ulps + 1u32) / 2u32, w);
    Ok(PiResult {
        kind,
        l,
        method: Method::Direct,
        value,
        error_bound,
        order: 0,
        ctx: eff,
    })
}

/// `Σ_{ℓ=lo..=hi} round(N / d_ℓ)`.
fn chunk_sum(kind: SeriesKind, l: u64, lo: u64, hi: u64, num_be: &[u64], num: &BigUint) -> BigUint {
    let mut acc = vec![0u64; num_be.len() + 1];
    let mut q = vec![0u64; num_be.len()];
    let mut big = BigUint::zero();
    for ell in lo..=hi {
        let d = kind.denominator(l, ell);
        if let Ok(d) = u64::try_from(d) {
            div_round_into(num_be, d, &mut q);
            add_be_into(&mut acc, &q);
        } else {
            let d = BigUint::from(d);
            big += (num + (&d >> 1)) / &d;
        }
    }
    let digits: Vec<u32> = acc
        .iter()
        .flat_map(|&limb| [limb as u32, (limb >> 32) as u32])
        .collect();
    BigUint::new(digits) + big
}

/// `q = round(n / d)` (halves up) with `n` and `q` as big-endian `u64` limbs.
fn div_round_into(n: &[u64], d: u64, q: &mut [u64]) {
    let mut rem: u128 = 0;
    for (qi, &ni) in q.iter_mut().zip(n) {
        let cur = (rem << 64) | ni as u128;
        *qi = (cur / d as u128) as u64;
        rem = cur % d as u128;
    }
    if rem >= d as u128 - rem {
        for qi in q.iter_mut().rev() {
            let (v, carry) = qi.overflowing_add(1);
            *qi = v;
            if !carry {
                break;
            }
        }
    }
}

/// `acc += q`, `acc` little-endian, `q` big-endian.
fn add_be_into(acc: &mut [u64], q: &[u64]) {
    let mut carry = false;
    for (i, &qi) in q.iter().rev().enumerate() {
        let (s1, c1) = acc[i].overflowing_add(qi);
        let (s2, c2) = s1.overflowing_add(carry as u64);
        acc[i] = s2;
        carry = c1 || c2;
    }
    let mut i = q.len();
    while carry {
        let (s, c) = acc[i].overflowing_add(1);
        acc[i] = s;
        carry = c;
        i += 1;
    }
}

/// Even-index Bernoulli numbers `B_2, B_4, ..., B_2k` as exact rationals.
#[derive(Clone, Debug)]
pub struct BernoulliTable {
    all: Vec<BigRational>,
}

impl BernoulliTable {
    /// `B_n`, for `n` up to the tabulated index.
    pub fn get(&self, n: usize) -> Option<&BigRational> {
        self.all.get(n)
    }

    /// `B_2k` for `k = 1..`.
    pub fn even(&self) -> impl Iterator<Item = &BigRational> {
        self.all.iter().skip(2).step_by(2)
    }

    /// Whether every odd-index value past `B_1` came out of the recurrence
    /// as zero.
    pub fn odd_values_vanish(&self) -> bool {
        self.all.iter().skip(3).step_by(2).all(|b| b.is_zero())
    }

    pub fn max_index(&self) -> usize {
        self.all.len() - 1
    }
}

/// Bernoulli numbers up to `B_upto` from `Σ_{j=0..m} C(m+1, j) B_j = 0`.
pub fn bernoulli_even(upto_2k: usize) -> Result<BernoulliTable> {
    if upto_2k < 2 || upto_2k % 2 == 1 {
        return Err(Error::invalid("Bernoulli table needs an even index >= 2"));
    }
    let mut all: Vec<BigRational> = vec![BigRational::one()];
    for m in 1..=upto_2k {
        let mut binom = BigInt::one(); // C(m+1, j), starting at j = 0
        let mut acc = BigRational::zero();
        for (j, b) in all.iter().enumerate() {
            acc += b * &binom;
            binom = binom * BigInt::from(m + 1 - j) / BigInt::from(j + 1);
        }
        // binom is now C(m+1, m)
        all.push(-acc / BigRational::from_integer(binom));
    }
    Ok(BernoulliTable { all })
}

/// `g(x0), g'(x0), ..., g^(n)(x0)` for `g(x) = 4/(1+x²)`, from
/// `(1+x²) g^(n) + 2n x g^(n-1) + n(n-1) g^(n-2) = 0`.
pub fn g_derivatives(x0: &BigRational, n: usize) -> Vec<BigRational> {
    let one_plus = BigRational::one() + x0 * x0;
    let mut d = vec![BigRational::from_integer(4.into()) / &one_plus];
    for k in 1..=n {
        let kk = BigRational::from_integer(BigInt::from(k));
        let mut rhs = -(BigRational::from_integer(2.into()) * &kk * x0 * &d[k - 1]);
        if k >= 2 {
            rhs -= &kk * (&kk - BigRational::one()) * &d[k - 2];
        }
        d.push(rhs / &one_plus);
    }
    d
}

/// Correction coefficients `c_k` with `series = π + shift/L + Σ c_k / L^2k`.
struct CorrectionTable {
    /// `c_k` for `k = 1..=TABLE_ORDER` at index `k - 1`.
    coeffs: Vec<BigRational>,
    /// Coefficient of `1/L`.
    shift: BigRational,
}

fn correction_table(kind: SeriesKind) -> &'static CorrectionTable {
    static MID: OnceLock<CorrectionTable> = OnceLock::new();
    static END: OnceLock<CorrectionTable> = OnceLock::new();
    let cell = match kind {
        SeriesKind::Midpoint => &MID,
        SeriesKind::Endpoint => &END,
    };
    cell.get_or_init(|| build_correction_table(kind))
}

fn build_correction_table(kind: SeriesKind) -> CorrectionTable {
    let n = 2 * TABLE_ORDER as usize;
    let bern = bernoulli_even(n).expect("even index");
    let at0 = g_derivatives(&BigRational::zero(), n);
    let at1 = g_derivatives(&BigRational::one(), n);
    let mut fact = BigInt::one();
    let mut coeffs = Vec::new();
    for k in 1..=TABLE_ORDER as usize {
        fact *= BigInt::from((2 * k - 1) * 2 * k);
        let delta = &at1[2 * k - 1] - &at0[2 * k - 1];
        let base =
            bern.get(2 * k).expect("tabulated") * delta / BigRational::from_integer(fact.clone());
        let c = match kind {
            SeriesKind::Endpoint => base,
            SeriesKind::Midpoint => {
                let two_pow = BigRational::from_integer(BigInt::one() << (2 * k - 1));
                base * (BigRational::one() / two_pow - BigRational::one())
            }
        };
        coeffs.push(c);
    }
    let shift = match kind {
        SeriesKind::Endpoint => (&at1[0] - &at0[0]) / BigRational::from_integer(2.into()),
        SeriesKind::Midpoint => BigRational::zero(),
    };
    CorrectionTable { coeffs, shift }
}

/// `c_k / L^2k` for `k = 1..`, exactly.
fn correction_terms(kind: SeriesKind, l: u64) -> Vec<BigRational> {
    let table = correction_table(kind);
    let l2 = BigInt::from(l) * BigInt::from(l);
    let mut pow = BigInt::one();
    table
        .coeffs
        .iter()
        .map(|c| {
            pow *= &l2;
            c / BigRational::from_integer(pow.clone())
        })
        .collect()
}

/// `|t| < 10^-e`.
fn below_pow10(t: &BigRational, e: u32) -> bool {
    t.abs() * BigRational::from_integer(pow10(e)) < BigRational::one()
}

/// Largest `e` with `|t| < 10^-e` (`t` non-zero).
fn neg_log10_floor(t: &BigRational) -> i64 {
    let t = t.abs();
    let est = t.denom().to_string().len() as i64 - t.numer().to_string().len() as i64;
    let lt = |e: i64| -> bool {
        if e >= 0 {
            &t * BigRational::from_integer(pow10(e as u32)) < BigRational::one()
        } else {
            t < BigRational::from_integer(pow10((-e) as u32))
        }
    };
    let mut e = est + 1;
    while !lt(e) {
        e -= 1;
    }
    while lt(e + 1) {
        e += 1;
    }
    e
}

/// First non-zero term strictly after index `k` (1-based).
fn first_omitted(terms: &[BigRational], k: u32) -> &BigRational {
    terms[k as usize..]
        .iter()
        .find(|t| !t.is_zero())
        .expect("table extends past the order cap")
}

fn rational_to_real(r: &BigRational, w: u32) -> BigReal {
    BigReal::from_scaled(round_div(&(r.numer() * pow10(w)), r.denom()), w)
}

/// Evaluate the series as `π` plus its Euler–Maclaurin corrections through
/// order `K`.
///
/// Refuses when the first omitted non-zero correction is not below
/// `10^-(out_digits + 3)`, reporting the digits that are reachable.
pub fn pi_accelerated(
    kind: SeriesKind,
    l: u64,
    order: CorrectionOrder,
    ctx: &PrecisionContext,
) -> Result<PiResult> {
    check_l(l)?;
    let threshold = ctx.out_digits() + 3;
    let terms = correction_terms(kind, l);
    let k = match order {
        CorrectionOrder::Fixed(k) => {
            if k == 0 || k > MAX_CORRECTION_ORDER {
                return Err(Error::invalid(format!(
                    "correction order must lie in 1..={MAX_CORRECTION_ORDER}"
                )));
            }
            k
        }
        CorrectionOrder::Auto => (1..=MAX_CORRECTION_ORDER)
            .find(|&k| below_pow10(first_omitted(&terms, k), threshold))
            .unwrap_or(MAX_CORRECTION_ORDER),
    };
    let omitted = first_omitted(&terms, k);
    if !below_pow10(omitted, threshold) {
        let achievable = (neg_log10_floor(omitted) - 3).max(0) as u32;
        return Err(Error::AccuracyRefused {
            requested: ctx.out_digits(),
            achievable,
            l,
            order: k,
        });
    }
    let table = correction_table(kind);
    let mut correction = &table.shift / BigRational::from_integer(BigInt::from(l));
    for t in &terms[..k as usize] {
        correction += t;
    }
    let w = ctx.work_digits();
    let value = &reference_pi(w) + &rational_to_real(&correction, w);
    // one ulp each for π and the converted correction
    let error_bound = &rational_to_real(&omitted.abs(), w) + &BigReal::from_scaled(2.into(), w);
    Ok(PiResult {
        kind,
        l,
        method: Method::Accelerated,
        value,
        error_bound,
        order: k,
        ctx: *ctx,
    })
}

/// L below which the convergence probe sums directly.
pub const PROBE_DIRECT_BELOW: u64 = 10_000_000;

/// Evaluate each `L` with the cheaper valid method: direct below `10^7`,
/// accelerated (automatic order) from there on.
pub fn pi_convergence_probe(
    kind: SeriesKind,
    ls: &[u64],
    ctx: &PrecisionContext,
) -> Result<Vec<PiResult>> {
    if ls.is_empty() {
        return Err(Error::invalid("probe needs at least one L"));
    }
    if ls.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::invalid("probe L values must be strictly ascending"));
    }
    ls.iter()
        .map(|&l| {
            if l < PROBE_DIRECT_BELOW {
                pi_direct(kind, l, ctx)
            } else {
                pi_accelerated(kind, l, CorrectionOrder::Auto, ctx)
            }
        })
        .collect()
}

/// The midpoint denominator in its expanded form `4ℓ² - 4ℓ + 1 + 4L²`.
pub fn expanded_midpoint_denominator(l: u64, ell: u64) -> u128 {
    let (l, ell) = (l as u128, ell as u128);
    4 * ell * ell - 4 * ell + 1 + 4 * l * l
}

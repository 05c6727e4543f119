//! Tanh-sinh (double-exponential) quadrature at arbitrary precision, and the
//! integral identities it is used to check:
//!
//! * `erf(x) = (2x/π) ∫₀^∞ e^(-t²/4) sinc(xt) dt`, truncated at `t = 12`;
//! * `√π = 4 ∫₀^∞ e^(-t²) erf(t) dt`, truncated at `t = 6` (or further out
//!   for tighter targets);
//! * the termwise Gaussian integral of the incomplete cosine expansion,
//!   which reproduces the Gaussian erf series.
//!
//! Truncation errors are bounded by [`damping_tail_bound`], not assumed.

use crate::bignum::{BigReal, PrecisionContext};
use crate::erf_gauss::erf_gauss_series;
use crate::error::{Error, Result};
use crate::oracles::{reference_erf, reference_pi};
use crate::par;
use crate::sinc_expansion::{incomplete_cosine, sinc};

/// Default cap on refinement levels (step `2^-level`).
pub const DEFAULT_MAX_REFINEMENT: u32 = 12;

/// Upper limit used for the `e^(-t²/4)` kernel.
pub const SINC_KERNEL_CUTOFF: i64 = 12;

/// Upper limit used for the `e^(-t²)` kernel.
pub const GAUSS_KERNEL_CUTOFF: i64 = 6;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadratureSpec {
    pub a: BigReal,
    pub b: BigReal,
    pub target_digits: u32,
    pub max_refinement: u32,
}

impl QuadratureSpec {
    pub fn new(a: BigReal, b: BigReal, target_digits: u32, max_refinement: u32) -> Result<Self> {
        if a >= b {
            return Err(Error::invalid("quadrature needs a < b"));
        }
        if target_digits == 0 || max_refinement == 0 {
            return Err(Error::invalid(
                "target_digits and max_refinement must be positive",
            ));
        }
        Ok(Self {
            a,
            b,
            target_digits,
            max_refinement,
        })
    }

    pub fn interval(a: i64, b: i64, target_digits: u32) -> Result<Self> {
        Self::new(a.into(), b.into(), target_digits, DEFAULT_MAX_REFINEMENT)
    }
}

/// Result of a converged integration.
#[derive(Clone, Debug)]
pub struct Integral {
    pub value: BigReal,
    /// Estimate after each level, coarsest first.
    pub estimates: Vec<BigReal>,
    /// Digits on which the last two levels agree.
    pub agreement_digits: u32,
}

impl Integral {
    /// Agreement (in digits) between each pair of successive levels.
    pub fn agreement_history(&self, cap: u32) -> Vec<u32> {
        self.estimates
            .windows(2)
            .map(|w| agreement_digits(&w[0], &w[1], cap))
            .collect()
    }
}

fn agreement_digits(a: &BigReal, b: &BigReal, cap: u32) -> u32 {
    match (a - b).magnitude_exponent() {
        None => cap,
        Some(e) if e >= 0 => 0,
        Some(e) => ((-e - 1) as u32).min(cap),
    }
}

/// Abscissa offset `x_k` in `(-1, 1)` and weight `w_k` of a tanh-sinh node
/// at `t = k h`.
fn node(t: &BigReal, half_pi: &BigReal, ctx: &PrecisionContext) -> (BigReal, BigReal) {
    if t.is_zero() {
        return (BigReal::zero(), half_pi.clone());
    }
    let et = t.exp(ctx);
    let emt = BigReal::one().div(&et, ctx).expect("e^t > 0");
    let sinh = (&et - &emt).div_pow2(1);
    let cosh = (&et + &emt).div_pow2(1);
    let u = half_pi.mul_round(&sinh, ctx);
    // q = e^(-2u); x = tanh u = (1 - q)/(1 + q); 1/cosh²u = 4q/(1 + q)²
    let q = u.mul_int(2).exp_neg(ctx);
    let one_plus = &BigReal::one() + &q;
    let x = (&BigReal::one() - &q)
        .div(&one_plus, ctx)
        .expect("1 + q > 0");
    let den = one_plus.mul_round(&one_plus, ctx);
    let w = half_pi
        .mul_int(4)
        .mul_round(&cosh, ctx)
        .mul_round(&q, ctx)
        .div(&den, ctx)
        .expect("(1 + q)² > 0");
    (x, w)
}

/// Integrate `f` over `[spec.a, spec.b]`.
///
/// The step is halved each level, reusing the previous sum. Node
/// evaluations within a level run in parallel and are added in ascending node
/// order. Stops once two successive levels agree to `target_digits`.
pub fn integrate<F>(f: F, spec: &QuadratureSpec, ctx: &PrecisionContext) -> Result<Integral>
where
    F: Fn(&BigReal) -> Result<BigReal> + Sync + Send,
{
    if spec.target_digits > ctx.out_digits() {
        return Err(Error::invalid(format!(
            "target of {} digits exceeds the context's {} output digits",
            spec.target_digits,
            ctx.out_digits()
        )));
    }
    let inner = ctx.widened(5);
    let w = inner.work_digits();
    let half_pi = reference_pi(w + 2).div_pow2(1).round_to(&inner);
    let center = (&spec.a + &spec.b).div_pow2(1);
    let half = (&spec.b - &spec.a).div_pow2(1);

    // Weights fall below 10^-(w+5) once (π/2) e^t exceeds (w+5) ln 10.
    let t_max =
        ((2.0 / std::f64::consts::PI) * ((w + 5) as f64 * std::f64::consts::LN_10 + 5.0)).ln();

    let eval_node = |t: &BigReal| -> Result<BigReal> {
        let (x, wt) = node(t, &half_pi, &inner);
        if t.is_zero() {
            return Ok(wt.mul_round(&f(&center)?, &inner));
        }
        let dx = half.mul_round(&x, &inner);
        let right = f(&(&center + &dx))?;
        let left = f(&(&center - &dx))?;
        Ok(wt.mul_round(&(&right + &left), &inner))
    };

    let mut estimates: Vec<BigReal> = Vec::new();
    let mut sum = BigReal::zero();
    for level in 0..=spec.max_refinement {
        let steps_per_unit = 1u64 << level;
        let k_max = (t_max * steps_per_unit as f64).floor() as u64;
        // level 0 takes every k >= 0, later levels only the new odd ones
        let ks: Vec<u64> = if level == 0 {
            (0..=k_max).collect()
        } else {
            (1..=k_max).step_by(2).collect()
        };
        let contributions = par::map_slice(&ks, |&k| {
            let t = BigReal::from_int(k as i64).div_pow2(level);
            eval_node(&t)
        });
        let mut level_sum = BigReal::zero();
        for c in contributions {
            level_sum = &level_sum + &c?;
        }
        let level_sum = level_sum.div_pow2(level);
        sum = if level == 0 {
            level_sum
        } else {
            &sum.div_pow2(1) + &level_sum
        }
        .round_to(&inner);
        let estimate = half.mul_round(&sum, &inner);
        estimates.push(estimate);

        let n = estimates.len();
        if n >= 3 {
            let agree = agreement_digits(&estimates[n - 1], &estimates[n - 2], w);
            if agree >= spec.target_digits {
                return Ok(Integral {
                    value: estimates[n - 1].round_to(ctx),
                    estimates,
                    agreement_digits: agree,
                });
            }
        }
    }
    let n = estimates.len();
    let agree = if n >= 2 {
        agreement_digits(&estimates[n - 1], &estimates[n - 2], w)
    } else {
        0
    };
    Err(Error::QuadratureNotConverged {
        best: estimates[n - 1].round_to(ctx),
        agreement_digits: agree,
        levels: n as u32,
    })
}

/// Rigorous bound on `∫_T^∞ e^(-t²/s²) dt`: substituting `u = t/s` and using
/// `∫_v^∞ e^(-u²) du <= e^(-v²)/(2v)` gives `s² e^(-(T/s)²) / (2T)`.
pub fn damping_tail_bound(t: &BigReal, scale: &BigReal, ctx: &PrecisionContext) -> Result<BigReal> {
    if t.signum() <= 0 || scale.signum() <= 0 {
        return Err(Error::invalid("damping bound needs T > 0 and scale > 0"));
    }
    let inner = ctx.widened(5);
    let v = t.div(scale, &inner)?;
    let s2 = scale.mul_round(scale, &inner);
    let num = s2.mul_round(&v.mul_round(&v, &inner).exp_neg(&inner), &inner);
    Ok(num.div(&t.mul_int(2), &inner)?.round_to(ctx))
}

/// `(2x/π) ∫₀^12 e^(-t²/4) sinc(xt) dt`.
pub fn erf_via_sinc_integral(x: &BigReal, ctx: &PrecisionContext) -> Result<BigReal> {
    let spec = QuadratureSpec::interval(0, SINC_KERNEL_CUTOFF, ctx.out_digits())?;
    let inner = ctx.widened(4);
    let integral = integrate(
        |t| {
            let damp = t.mul_round(t, &inner).div_pow2(2).exp_neg(&inner);
            let s = sinc(&x.mul_round(t, &inner), &inner);
            Ok(damp.mul_round(&s, &inner))
        },
        &spec,
        &inner,
    )?;
    let pi = reference_pi(inner.work_digits());
    let pref = x.mul_int(2).div(&pi, &inner)?;
    Ok(pref.mul_round(&integral.value, &inner).round_to(ctx))
}

/// `|erf_via_sinc_integral(x) - erf(x)|` for `0 < x <= 6`.
pub fn verify_erf_integral(x: &BigReal, ctx: &PrecisionContext) -> Result<BigReal> {
    if x.signum() <= 0 || *x > BigReal::from_int(GAUSS_KERNEL_CUTOFF) {
        return Err(Error::invalid("verify_erf_integral needs 0 < x <= 6"));
    }
    let got = erf_via_sinc_integral(x, ctx)?;
    Ok((got - reference_erf(x, ctx)?).abs())
}

/// `|4 ∫₀^6 e^(-t²) erf(t) dt - √π|`.
pub fn verify_sqrtpi_identity(ctx: &PrecisionContext) -> Result<BigReal> {
    verify_sqrtpi_identity_to(&BigReal::from_int(GAUSS_KERNEL_CUTOFF), ctx)
}

/// As [`verify_sqrtpi_identity`] with an explicit upper limit.
pub fn verify_sqrtpi_identity_to(upper: &BigReal, ctx: &PrecisionContext) -> Result<BigReal> {
    if upper.signum() <= 0 {
        return Err(Error::invalid("upper limit must be positive"));
    }
    let spec = QuadratureSpec::new(
        BigReal::zero(),
        upper.clone(),
        ctx.out_digits(),
        DEFAULT_MAX_REFINEMENT,
    )?;
    let inner = ctx.widened(4);
    let integral = integrate(
        |t| {
            let g = t.mul_round(t, &inner).exp_neg(&inner);
            Ok(g.mul_round(&reference_erf(t, &inner)?, &inner))
        },
        &spec,
        &inner,
    )?;
    let sqrt_pi = reference_pi(inner.work_digits() + 2).sqrt(&inner)?;
    Ok((integral.value.mul_int(4) - sqrt_pi).abs().round_to(ctx))
}

/// `|(2x/π) ∫₀^12 e^(-t²/4) C_L(xt) dt - G_L(x)|` where `C_L` is the
/// incomplete cosine expansion and `G_L` the Gaussian erf series: the series
/// is exactly the termwise integral, up to the truncated tail.
pub fn verify_gauss_series_integral(
    l: u64,
    x: &BigReal,
    ctx: &PrecisionContext,
) -> Result<BigReal> {
    let spec = QuadratureSpec::interval(0, SINC_KERNEL_CUTOFF, ctx.out_digits())?;
    let inner = ctx.widened(4);
    let integral = integrate(
        |t| {
            let damp = t.mul_round(t, &inner).div_pow2(2).exp_neg(&inner);
            let c = incomplete_cosine(l, &x.mul_round(t, &inner), &inner)?;
            Ok(damp.mul_round(&c, &inner))
        },
        &spec,
        &inner,
    )?;
    let pi = reference_pi(inner.work_digits());
    let got = x
        .mul_int(2)
        .div(&pi, &inner)?
        .mul_round(&integral.value, &inner);
    Ok((got - erf_gauss_series(l, x, &inner)?).abs().round_to(ctx))
}

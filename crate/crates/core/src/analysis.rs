//! Digit-coincidence counting against the reference expansion of π, the
//! off-by-one pattern of the endpoint series, and convergence tables.
//!
//! Digits are counted from the first character with the decimal point
//! skipped, so `"3.141"` agreeing with π counts as 4 digits.

use std::io::Write;
use std::time::Instant;

use serde::Serialize;

use crate::bignum::PrecisionContext;
use crate::error::{Error, Result};
use crate::oracles::ReferencePi;
use crate::pi_series::{pi_convergence_probe, Method, SeriesKind};

/// Two runs of matching digits separated by one digit that is exactly one
/// below the reference digit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct OffByOne {
    pub prefix_len: u32,
    /// Digit index (decimal point not counted) of the mismatch.
    pub mismatch_index: u32,
    pub second_group_len: u32,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DigitReport {
    pub approx_digits: String,
    pub ref_digits: String,
    pub coinciding: u32,
    pub pattern: Option<OffByOne>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConvergenceRecord {
    pub kind: SeriesKind,
    pub l: u64,
    pub method: Method,
    pub value: String,
    pub coinciding: u32,
    pub pattern: Option<OffByOne>,
    pub wall_time_s: f64,
}

fn validate(s: &str) -> Result<&[u8]> {
    let b = s.as_bytes();
    let ok = b.first().is_some_and(u8::is_ascii_digit)
        && b.iter().all(|c| c.is_ascii_digit() || *c == b'.')
        && b.iter().filter(|&&c| c == b'.').count() <= 1;
    if ok {
        Ok(b)
    } else {
        Err(Error::MalformedNumber(s.to_string()))
    }
}

/// Walk both strings in step. Returns the number of leading matching digits
/// and the byte offset where they stop. A decimal point only matches a
/// decimal point.
fn common_prefix(a: &[u8], b: &[u8]) -> (u32, usize) {
    let mut digits = 0;
    let mut i = 0;
    while i < a.len() && i < b.len() && a[i] == b[i] {
        if a[i] != b'.' {
            digits += 1;
        }
        i += 1;
    }
    (digits, i)
}

/// Number of leading digits the two decimal strings share.
pub fn coinciding_digits(approx: &str, reference: &str) -> Result<u32> {
    let (a, b) = (validate(approx)?, validate(reference)?);
    Ok(common_prefix(a, b).0)
}

/// `Some` when the strings agree on `p1 >= 1` digits, then differ in one
/// digit where `approx` is exactly one less, then agree on `p2 >= 1` more.
pub fn off_by_one_pattern(approx: &str, reference: &str) -> Result<Option<OffByOne>> {
    let (a, b) = (validate(approx)?, validate(reference)?);
    let (p1, at) = common_prefix(a, b);
    if p1 == 0 || at >= a.len() || at >= b.len() {
        return Ok(None);
    }
    let (x, y) = (a[at], b[at]);
    if x == b'.' || y == b'.' || x + 1 != y {
        return Ok(None);
    }
    let (p2, _) = common_prefix(&a[at + 1..], &b[at + 1..]);
    if p2 == 0 {
        return Ok(None);
    }
    Ok(Some(OffByOne {
        prefix_len: p1,
        mismatch_index: p1,
        second_group_len: p2,
    }))
}

pub fn digit_report(approx: &str, reference: &str) -> Result<DigitReport> {
    Ok(DigitReport {
        approx_digits: approx.to_string(),
        ref_digits: reference.to_string(),
        coinciding: coinciding_digits(approx, reference)?,
        pattern: off_by_one_pattern(approx, reference)?,
    })
}

/// One timed record per `L`, each compared with π to `out_digits + 5`
/// significant digits.
pub fn convergence_table(
    kind: SeriesKind,
    ls: &[u64],
    ctx: &PrecisionContext,
) -> Result<Vec<ConvergenceRecord>> {
    if ls.is_empty() || ls.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::invalid(
            "L list must be non-empty and strictly ascending",
        ));
    }
    let reference = ReferencePi::new(ctx.out_digits() + 5)?.digits;
    ls.iter()
        .map(|&l| {
            let start = Instant::now();
            let result = pi_convergence_probe(kind, &[l], ctx)?.remove(0);
            let wall_time_s = start.elapsed().as_secs_f64();
            let value = result.digit_string();
            let report = digit_report(&value, &reference)?;
            Ok(ConvergenceRecord {
                kind,
                l,
                method: result.method,
                value,
                coinciding: report.coinciding,
                pattern: report.pattern,
                wall_time_s,
            })
        })
        .collect()
}

pub const CONVERGENCE_CSV_HEADER: &str =
    "kind,L,method,value,coinciding,pattern_p1,pattern_p2,wall_time_s";

pub fn write_convergence_csv<W: Write>(out: &mut W, records: &[ConvergenceRecord]) -> Result<()> {
    writeln!(out, "{CONVERGENCE_CSV_HEADER}")?;
    for r in records {
        let (p1, p2) = match r.pattern {
            Some(p) => (p.prefix_len.to_string(), p.second_group_len.to_string()),
            None => (String::new(), String::new()),
        };
        writeln!(
            out,
            "{},{},{},{},{},{},{},{:.6}",
            r.kind.name(),
            r.l,
            r.method.name(),
            r.value,
            r.coinciding,
            p1,
            p2,
            r.wall_time_s
        )?;
    }
    Ok(())
}

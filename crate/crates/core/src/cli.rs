//! Command-line front end. [`run`] parses arguments, dispatches to the
//! library and maps failures to exit codes: 0 success, 1 domain or I/O
//! error, 2 usage error.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::analysis::{coinciding_digits, convergence_table, write_convergence_csv};
use crate::bignum::{BigReal, PrecisionContext};
use crate::erf_gauss::{erf_profile, write_profile_csv};
use crate::error::{Error, Result};
use crate::oracles::ReferencePi;
use crate::par;
use crate::pi_series::{
    pi_accelerated, pi_direct_with, CorrectionOrder, DirectOptions, PiResult, SeriesKind, MAX_L,
};
use crate::quadrature::{damping_tail_bound, verify_erf_integral, verify_sqrtpi_identity};
use crate::sinc_expansion::{
    incomplete_cosine, product_to_sum_rhs, sinc, validity_window, vieta_product,
};

/// Default seed for every randomised check.
pub const DEFAULT_SEED: u64 = 20160228;

/// `--method auto` sums directly up to this `L`.
pub const AUTO_DIRECT_MAX_L: u64 = 1_000_000;

#[derive(Debug, Parser)]
#[command(
    name = "sinc-pi",
    version,
    about = "Incomplete cosine expansion of sinc, Gaussian erf series and asymptotic pi series"
)]
pub struct Cli {
    /// Significant digits to report
    #[arg(long, global = true, default_value_t = 40,
          value_parser = clap::value_parser!(u32).range(1..=10000))]
    pub digits: u32,

    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,

    /// Worker threads for direct summation (default: all cores)
    #[arg(long, global = true, env = "PI_SINC_THREADS",
          value_parser = clap::value_parser!(u64).range(1..=4096))]
    pub threads: Option<u64>,

    /// Seed for randomised checks
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    pub seed: u64,

    /// Write output to FILE (atomically) instead of standard output
    #[arg(long, global = true, value_name = "FILE")]
    pub out: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SeriesArg {
    #[value(alias = "eq15")]
    Midpoint,
    #[value(alias = "eq16")]
    Endpoint,
}

impl From<SeriesArg> for SeriesKind {
    fn from(s: SeriesArg) -> Self {
        match s {
            SeriesArg::Midpoint => SeriesKind::Midpoint,
            SeriesArg::Endpoint => SeriesKind::Endpoint,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    /// direct for L <= 10^6, accelerated above
    Auto,
    Direct,
    Accelerated,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate one of the pi series
    Pi {
        #[arg(long, value_enum)]
        series: SeriesArg,
        #[arg(long = "L", value_parser = parse_l)]
        l: u64,
        #[arg(long, value_enum, default_value_t = MethodArg::Auto)]
        method: MethodArg,
        /// Correction order for the accelerated method (default: automatic)
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..=12))]
        order: Option<u32>,
        /// Allow direct sums above the 2e9-term cap
        #[arg(long)]
        allow_large_direct: bool,
    },
    /// Coinciding digits for a list of L values, as CSV
    PiTable {
        #[arg(long, value_enum)]
        series: SeriesArg,
        #[arg(long = "L-list", value_parser = parse_l, value_delimiter = ',', required = true)]
        l_list: Vec<u64>,
    },
    /// Gaussian erf series against erf on a uniform grid, as CSV
    ErfProfile {
        #[arg(long = "L", value_parser = parse_l)]
        l: u64,
        #[arg(long, value_parser = parse_real, allow_hyphen_values = true)]
        x_min: BigReal,
        #[arg(long, value_parser = parse_real, allow_hyphen_values = true)]
        x_max: BigReal,
        #[arg(long, default_value_t = 100, value_parser = clap::value_parser!(u64).range(2..=1_000_000))]
        steps: u64,
    },
    /// Spot checks of the cosine expansion of sinc
    SincCheck {
        #[arg(long = "L", value_parser = parse_l, default_value = "15")]
        l: u64,
        #[arg(long = "M", default_value_t = 4, value_parser = clap::value_parser!(u32).range(1..=20))]
        m: u32,
        #[arg(long, default_value_t = 20, value_parser = clap::value_parser!(u64).range(1..=100_000))]
        samples: u64,
    },
    /// Reference digits of pi (truncated)
    ReferencePi,
    /// Quadrature checks of the erf and sqrt(pi) integral identities
    VerifyIdentities,
}

fn parse_l(s: &str) -> std::result::Result<u64, String> {
    let digits: String = s.chars().filter(|&c| c != '_').collect();
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return Err(format!("{s:?} is not a decimal integer"));
    }
    match digits.parse::<u64>() {
        Ok(v) if (1..=MAX_L).contains(&v) => Ok(v),
        _ => Err(format!("L must lie in 1..=10^18, got {s}")),
    }
}

fn parse_real(s: &str) -> std::result::Result<BigReal, String> {
    s.parse::<BigReal>()
        .map_err(|_| format!("{s:?} is not a plain decimal number"))
}

/// Parse `args` (program name first), execute, and return the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = err.write_all(text.as_bytes());
                2
            } else {
                let _ = out.write_all(text.as_bytes());
                0
            };
        }
    };
    match execute(&cli).and_then(|bytes| emit(&cli, &bytes, out)) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            1
        }
    }
}

fn emit(cli: &Cli, bytes: &[u8], out: &mut dyn Write) -> Result<()> {
    match &cli.out {
        Some(path) => write_atomic(path, bytes),
        None => Ok(out.write_all(bytes)?),
    }
}

/// Write through a temporary file in the target directory, then rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

fn threads(cli: &Cli) -> Option<usize> {
    cli.threads.map(|t| t as usize)
}

fn context(cli: &Cli) -> Result<PrecisionContext> {
    PrecisionContext::digits(cli.digits)
}

/// Render the command's output.
pub fn execute(cli: &Cli) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    match &cli.command {
        Command::Pi {
            series,
            l,
            method,
            order,
            allow_large_direct,
        } => cmd_pi(
            cli,
            (*series).into(),
            *l,
            *method,
            *order,
            *allow_large_direct,
            &mut buf,
        )?,
        Command::PiTable { series, l_list } => {
            cmd_pi_table(cli, (*series).into(), l_list, &mut buf)?
        }
        Command::ErfProfile {
            l,
            x_min,
            x_max,
            steps,
        } => cmd_erf_profile(cli, *l, x_min, x_max, *steps, &mut buf)?,
        Command::SincCheck { l, m, samples } => cmd_sinc_check(cli, *l, *m, *samples, &mut buf)?,
        Command::ReferencePi => {
            let digits = ReferencePi::new(cli.digits)?.digits;
            match cli.format {
                Format::Json => {
                    serde_json::to_writer(
                        &mut buf,
                        &serde_json::json!({ "digits": cli.digits, "value": digits }),
                    )
                    .map_err(std::io::Error::from)?;
                    writeln!(buf)?;
                }
                _ => writeln!(buf, "{digits}")?,
            }
        }
        Command::VerifyIdentities => cmd_verify_identities(cli, &mut buf)?,
    }
    Ok(buf)
}

#[derive(Debug, Serialize)]
struct PiRecord {
    series: &'static str,
    #[serde(rename = "L")]
    l: String,
    method: &'static str,
    digits: u32,
    value: String,
    coinciding: u32,
    error_bound: String,
    wall_time_s: f64,
}

fn cmd_pi(
    cli: &Cli,
    kind: SeriesKind,
    l: u64,
    method: MethodArg,
    order: Option<u32>,
    allow_large_direct: bool,
    buf: &mut Vec<u8>,
) -> Result<()> {
    let ctx = context(cli)?;
    let direct = match method {
        MethodArg::Auto => l <= AUTO_DIRECT_MAX_L,
        MethodArg::Direct => true,
        MethodArg::Accelerated => false,
    };
    let start = Instant::now();
    let result: PiResult = if direct {
        let opts = DirectOptions {
            threads: threads(cli),
            allow_over_cap: allow_large_direct,
            ..Default::default()
        };
        pi_direct_with(kind, l, &ctx, &opts)?
    } else {
        let order = order.map_or(CorrectionOrder::Auto, CorrectionOrder::Fixed);
        pi_accelerated(kind, l, order, &ctx)?
    };
    let wall_time_s = start.elapsed().as_secs_f64();
    let value = result.digit_string();
    let reference = ReferencePi::new(cli.digits + 5)?.digits;
    let rec = PiRecord {
        series: kind.name(),
        l: l.to_string(),
        method: result.method.name(),
        digits: cli.digits,
        coinciding: coinciding_digits(&value, &reference)?,
        value,
        error_bound: result.error_bound.normalized().to_exact_string(),
        wall_time_s,
    };
    match cli.format {
        Format::Json => {
            serde_json::to_writer(&mut *buf, &rec).map_err(std::io::Error::from)?;
            writeln!(buf)?;
        }
        Format::Csv => {
            writeln!(
                buf,
                "series,L,method,digits,value,coinciding,error_bound,wall_time_s"
            )?;
            writeln!(
                buf,
                "{},{},{},{},{},{},{},{:.6}",
                rec.series,
                rec.l,
                rec.method,
                rec.digits,
                rec.value,
                rec.coinciding,
                rec.error_bound,
                rec.wall_time_s
            )?;
        }
        Format::Text => {
            writeln!(buf, "series: {}", rec.series)?;
            writeln!(buf, "L: {}", rec.l)?;
            writeln!(buf, "method: {}", rec.method)?;
            if result.order > 0 {
                writeln!(buf, "correction order: {}", result.order)?;
            }
            writeln!(buf, "value: {}", rec.value)?;
            writeln!(buf, "coinciding: {}", rec.coinciding)?;
            writeln!(buf, "error_bound: {}", sci(&result.error_bound))?;
            writeln!(buf, "wall_time_s: {:.6}", rec.wall_time_s)?;
        }
    }
    Ok(())
}

fn cmd_pi_table(cli: &Cli, kind: SeriesKind, ls: &[u64], buf: &mut Vec<u8>) -> Result<()> {
    let ctx = context(cli)?;
    let rows = par::with_threads(threads(cli), || convergence_table(kind, ls, &ctx))??;
    match cli.format {
        Format::Json => {
            serde_json::to_writer(&mut *buf, &rows).map_err(std::io::Error::from)?;
            writeln!(buf)?;
        }
        _ => write_convergence_csv(buf, &rows)?,
    }
    Ok(())
}

#[derive(Serialize)]
struct ProfileRow {
    x: String,
    erf_ref: String,
    erf_approx: String,
    abs_error: String,
    criterion: bool,
}

fn cmd_erf_profile(
    cli: &Cli,
    l: u64,
    x_min: &BigReal,
    x_max: &BigReal,
    steps: u64,
    buf: &mut Vec<u8>,
) -> Result<()> {
    let ctx = context(cli)?;
    let rows = par::with_threads(threads(cli), || erf_profile(l, x_min, x_max, steps, &ctx))??;
    let decimals = cli.digits;
    match cli.format {
        Format::Json => {
            let out: Vec<ProfileRow> = rows
                .iter()
                .map(|r| ProfileRow {
                    x: r.x.to_decimal_string(decimals),
                    erf_ref: r.erf_ref.to_decimal_string(decimals),
                    erf_approx: r.erf_approx.to_decimal_string(decimals),
                    abs_error: r.abs_error().to_decimal_string(decimals),
                    criterion: r.criterion_satisfied,
                })
                .collect();
            serde_json::to_writer(&mut *buf, &out).map_err(std::io::Error::from)?;
            writeln!(buf)?;
        }
        _ => write_profile_csv(buf, &rows, decimals)?,
    }
    Ok(())
}

#[derive(Serialize)]
struct SincReport {
    l: u64,
    m: u32,
    samples: u64,
    seed: u64,
    identity_max_deviation: String,
    identity_tolerance: String,
    identity_ok: bool,
    window_half_width: String,
    window_period: String,
    window_max_deviation: String,
    periodicity_max_deviation: String,
}

fn cmd_sinc_check(cli: &Cli, l: u64, m: u32, samples: u64, buf: &mut Vec<u8>) -> Result<()> {
    let ctx = context(cli)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cli.seed);
    let xs: Vec<BigReal> = (0..samples)
        .map(|_| format!("{:.6}", rng.gen_range(-50.0..=50.0f64)))
        .map(|s| s.parse().expect("formatted decimal"))
        .collect();
    let window = validity_window(l, &ctx)?;

    let (identity, window_dev, period_dev) = par::with_threads(threads(cli), || -> Result<_> {
        let identity = max_of(par::map_slice(&xs, |x| -> Result<BigReal> {
            Ok((product_to_sum_rhs(m, x, &ctx)? - vieta_product(m, x, &ctx)?).abs())
        }))?;
        let grid: Vec<BigReal> = if samples == 1 {
            vec![BigReal::zero()]
        } else {
            (0..samples)
                .map(|i| {
                    window
                        .half_width
                        .mul_int(i as i64)
                        .div_int(samples as i64 - 1, &ctx)
                })
                .collect::<Result<_>>()?
        };
        let window_dev = max_of(par::map_slice(&grid, |x| -> Result<BigReal> {
            Ok((incomplete_cosine(l, x, &ctx)? - sinc(x, &ctx)).abs())
        }))?;
        let period_dev = max_of(par::map_slice(&xs, |x| -> Result<BigReal> {
            let shifted = x + &window.period;
            Ok((incomplete_cosine(l, &shifted, &ctx)? - incomplete_cosine(l, x, &ctx)?).abs())
        }))?;
        Ok((identity, window_dev, period_dev))
    })??;

    let tolerance = BigReal::from_int(1i64 << m)
        .mul_round(&BigReal::from_scaled(1.into(), ctx.work_digits() - 2), &ctx);
    let report = SincReport {
        l,
        m,
        samples,
        seed: cli.seed,
        identity_ok: identity <= tolerance,
        identity_max_deviation: sci(&identity),
        identity_tolerance: sci(&tolerance),
        window_half_width: window.half_width.to_decimal_string(4),
        window_period: window.period.to_decimal_string(4),
        window_max_deviation: sci(&window_dev),
        periodicity_max_deviation: sci(&period_dev),
    };
    match cli.format {
        Format::Json => {
            serde_json::to_writer(&mut *buf, &report).map_err(std::io::Error::from)?;
            writeln!(buf)?;
        }
        Format::Csv => {
            writeln!(buf, "check,value")?;
            writeln!(
                buf,
                "identity_max_deviation,{}",
                report.identity_max_deviation
            )?;
            writeln!(buf, "identity_tolerance,{}", report.identity_tolerance)?;
            writeln!(buf, "identity_ok,{}", report.identity_ok)?;
            writeln!(buf, "window_half_width,{}", report.window_half_width)?;
            writeln!(buf, "window_period,{}", report.window_period)?;
            writeln!(buf, "window_max_deviation,{}", report.window_max_deviation)?;
            writeln!(
                buf,
                "periodicity_max_deviation,{}",
                report.periodicity_max_deviation
            )?;
        }
        Format::Text => {
            writeln!(
                buf,
                "product-to-sum identity (M = {m}, {samples} samples, seed {}): max deviation {} (tolerance {}) {}",
                cli.seed,
                report.identity_max_deviation,
                report.identity_tolerance,
                if report.identity_ok { "ok" } else { "FAILED" }
            )?;
            writeln!(
                buf,
                "window (L = {l}): half-width {}, period {}",
                report.window_half_width, report.window_period
            )?;
            writeln!(
                buf,
                "max |expansion - sinc| on [0, {}]: {}",
                report.window_half_width, report.window_max_deviation
            )?;
            writeln!(
                buf,
                "max |expansion(x + period) - expansion(x)|: {}",
                report.periodicity_max_deviation
            )?;
        }
    }
    Ok(())
}

fn max_of(values: Vec<Result<BigReal>>) -> Result<BigReal> {
    let mut best = BigReal::zero();
    for v in values {
        let v = v?;
        if v > best {
            best = v;
        }
    }
    Ok(best)
}

/// Points at which the erf integral identity is checked.
pub const IDENTITY_GRID: [&str; 7] = ["0.5", "1", "2", "3", "4", "5", "6"];

#[derive(Serialize)]
struct IdentityRow {
    identity: &'static str,
    x: String,
    discrepancy: String,
}

fn cmd_verify_identities(cli: &Cli, buf: &mut Vec<u8>) -> Result<()> {
    let ctx = context(cli)?;
    let rows = par::with_threads(threads(cli), || -> Result<Vec<(IdentityRow, BigReal)>> {
        let mut rows = Vec::new();
        for x in IDENTITY_GRID {
            let d = verify_erf_integral(&x.parse()?, &ctx)?;
            rows.push((row("erf-sinc-integral", x, &d), d));
        }
        let d = verify_sqrtpi_identity(&ctx)?;
        rows.push((row("sqrt-pi-integral", "", &d), d));
        let t12 = damping_tail_bound(&BigReal::from_int(12), &BigReal::from_int(2), &ctx)?;
        rows.push((row("tail-bound-12-scale-2", "", &t12), t12));
        let t6 = damping_tail_bound(&BigReal::from_int(6), &BigReal::one(), &ctx)?;
        rows.push((row("tail-bound-6-scale-1", "", &t6), t6));
        Ok(rows)
    })??;
    match cli.format {
        Format::Json => {
            let out: Vec<&IdentityRow> = rows.iter().map(|(r, _)| r).collect();
            serde_json::to_writer(&mut *buf, &out).map_err(std::io::Error::from)?;
            writeln!(buf)?;
        }
        Format::Csv => {
            writeln!(buf, "identity,x,discrepancy")?;
            for (r, _) in &rows {
                writeln!(buf, "{},{},{}", r.identity, r.x, r.discrepancy)?;
            }
        }
        Format::Text => {
            writeln!(buf, "{:<24}{:>6}  value", "identity", "x")?;
            for (r, d) in &rows {
                writeln!(buf, "{:<24}{:>6}  {}", r.identity, r.x, sci(d))?;
            }
        }
    }
    Ok(())
}

fn row(identity: &'static str, x: &str, d: &BigReal) -> IdentityRow {
    IdentityRow {
        identity,
        x: x.to_string(),
        discrepancy: d.normalized().to_exact_string(),
    }
}

/// Short scientific rendering for reports.
fn sci(v: &BigReal) -> String {
    if v.is_zero() {
        "0".to_string()
    } else {
        format!("{:.3e}", v.to_f64())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let mut full = vec!["sinc-pi"];
        full.extend_from_slice(args);
        let code = run(full, &mut out, &mut err);
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn reference_digits() {
        let (code, out, _) = run_args(&["reference-pi", "--digits", "38"]);
        assert_eq!(code, 0);
        assert_eq!(out.trim_end(), "3.1415926535897932384626433832795028841");
        assert_eq!(
            run_args(&["reference-pi", "--digits", "1"]).1.trim_end(),
            "3"
        );
    }

    #[test]
    fn pi_text_and_json() {
        let (code, out, _) = run_args(&["pi", "--series", "eq15", "--L", "23", "--digits", "30"]);
        assert_eq!(code, 0);
        assert!(out.contains("coinciding: 4"), "{out}");
        let (code, out, _) = run_args(&[
            "pi", "--series", "endpoint", "--L", "1", "--method", "direct", "--format", "json",
        ]);
        assert_eq!(code, 0);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert!(v["value"].as_str().unwrap().starts_with("2.000"));
        assert_eq!(v["L"], "1");
        assert_eq!(serde_json::to_string(&v).unwrap(), out.trim_end());
    }

    #[test]
    fn exit_codes() {
        let (code, _, err) = run_args(&[
            "pi",
            "--series",
            "eq15",
            "--L",
            "1000000000000",
            "--method",
            "direct",
        ]);
        assert_eq!(code, 1);
        assert!(err.contains("cap"), "{err}");
        assert_eq!(run_args(&["pi", "--series", "eq15", "--L", "0"]).0, 2);
        assert_eq!(run_args(&["pi", "--series", "eq15", "--L", "1e3"]).0, 2);
        assert_eq!(run_args(&["reference-pi", "--digits", "0"]).0, 2);
        assert_eq!(run_args(&["reference-pi", "--bogus"]).0, 2);
        assert_eq!(run_args(&["--help"]).0, 0);
        assert_eq!(
            run_args(&[
                "pi",
                "--series",
                "eq15",
                "--L",
                "2",
                "--method",
                "accelerated"
            ])
            .0,
            1
        );
        assert_eq!(
            run_args(&["reference-pi", "--out", "/nonexistent/dir/x.txt"]).0,
            1
        );
    }

    #[test]
    fn table_csv() {
        let (code, out, _) = run_args(&["pi-table", "--series", "eq16", "--L-list", "1000"]);
        assert_eq!(code, 0);
        let lines: Vec<&str> = out.lines().collect();
        assert_eq!(lines.len(), 2);
        assert!(lines[1].contains(",3,3,"), "{}", lines[1]);
    }

    #[test]
    fn profile_zero_row_and_negative_bounds() {
        let (code, out, _) = run_args(&[
            "erf-profile",
            "--L",
            "8",
            "--x-min",
            "-1",
            "--x-max",
            "1",
            "--steps",
            "2",
            "--digits",
            "10",
        ]);
        assert_eq!(code, 0, "{out}");
        let lines: Vec<&str> = out.lines().collect();
        assert_eq!(lines.len(), 4);
        assert_eq!(
            lines[2],
            "0.0000000000,0.0000000000,0.0000000000,0.0000000000,true"
        );
    }

    #[test]
    fn sinc_check_reports() {
        let (code, out, _) = run_args(&[
            "sinc-check",
            "--L",
            "15",
            "--samples",
            "5",
            "--digits",
            "20",
        ]);
        assert_eq!(code, 0);
        assert!(out.contains("half-width 47.1239"), "{out}");
        assert!(out.contains(" ok"), "{out}");
        let (code, out, _) = run_args(&["sinc-check", "--L", "1", "--M", "1", "--samples", "1"]);
        assert_eq!(code, 0, "{out}");
    }

    #[test]
    fn l_parsing() {
        assert_eq!(parse_l("1_000_000").unwrap(), 1_000_000);
        assert_eq!(parse_l("1000000000000000000").unwrap(), MAX_L);
        assert!(parse_l("1000000000000000001").is_err());
        assert!(parse_l("-5").is_err());
    }
}

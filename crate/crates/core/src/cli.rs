//! Command-line front end.

use std::fmt::Write as _;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde_json::{json, Value};

use crate::classifier::{
    brjuno_partial, diophantine_report, distance_floor, speed_witnesses, BrjunoVerdict, DiophantineOptions,
    WitnessStatus,
};
use crate::convergents::ConvergentTable;
use crate::dynamics::{
    birkhoff_log_derivative, gauss_measure_enclosure, gauss_measure_interval, kappa_gauss, lambda_gauss_exact,
    lambda_gauss_quadrature, lyapunov_report, monte_carlo_lyapunov,
};
use crate::encoding::{encode, parse};
use crate::error::{Error, Result};
use crate::exactnum::Interval;
use crate::gallery::{construct_at_speed, SpeedFunction, SpeedStrategy};
use crate::precise::decimal_string;
use crate::scalar::ln_ratio;

pub const EXIT_PARSE: i32 = 2;
pub const EXIT_PRECISION: i32 = 3;
pub const EXIT_DOMAIN: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "diophantine", version, about = "Continued fractions, Diophantine diagnostics and Gauss-map dynamics")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    /// Flat tab-separated rows
    Table,
    /// Nested JSON
    Structured,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Depth N (number of partial quotients / convergents examined)
    #[arg(long)]
    pub depth: Option<usize>,
    /// Trailing window width for limsup/liminf surrogates (default: half the depth)
    #[arg(long)]
    pub window: Option<usize>,
    /// Precision in decimal digits
    #[arg(long)]
    pub prec: Option<u32>,
    /// Seed for randomized operations
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output format
    #[arg(long, value_enum, default_value_t = Format::Table)]
    pub format: Format,
    /// Speed function psi(q) = c q^-e, given as two rationals `c,e`
    #[arg(long, value_name = "C,E")]
    pub psi: Option<String>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the encoding and leading coefficients of a number; with --psi,
    /// extend the given finite prefix at that speed (randomized with --seed)
    Construct {
        /// Number in text form: [a0; a1, ...], [a0; pre | period~], rule:NAME(..), dec:X+-U, sqrt:N, p/q
        input: String,
        #[command(flatten)]
        common: Common,
    },
    /// Table of n, a_n, p_n, q_n
    Convergents {
        /// Number in text form: [a0; a1, ...], [a0; pre | period~], rule:NAME(..), dec:X+-U, sqrt:N, p/q
        input: String,
        #[command(flatten)]
        common: Common,
    },
    /// Diophantine exponent, bounded type, distance floor and speed witnesses
    Classify {
        /// Number in text form: [a0; a1, ...], [a0; pre | period~], rule:NAME(..), dec:X+-U, sqrt:N, p/q
        input: String,
        #[command(flatten)]
        common: Common,
    },
    /// Partial Brjuno sum with a tail bound when the coefficients are bounded
    Brjuno {
        /// Number in text form: [a0; a1, ...], [a0; pre | period~], rule:NAME(..), dec:X+-U, sqrt:N, p/q
        input: String,
        /// Bound on every partial quotient past the depth, for the tail
        #[arg(long)]
        bound: Option<BigInt>,
        #[command(flatten)]
        common: Common,
    },
    /// Lyapunov exponent estimates from (2/n) ln q_n and the Birkhoff sum
    Lyapunov {
        /// Number in text form: [a0; a1, ...], [a0; pre | period~], rule:NAME(..), dec:X+-U, sqrt:N, p/q
        input: String,
        #[command(flatten)]
        common: Common,
    },
    /// Integrals against the Gauss measure
    Measure {
        #[command(subcommand)]
        quantity: MeasureQuantity,
    },
}

#[derive(Debug, Subcommand)]
pub enum MeasureQuantity {
    /// lambda = pi^2/(6 ln 2) by quadrature
    Lambda {
        #[command(flatten)]
        common: Common,
    },
    /// kappa = sum_k ln k mu_g(cylinder k)
    Kappa {
        #[command(flatten)]
        common: Common,
    },
    /// mu_g([a, b]) for rationals 0 <= a <= b <= 1
    Interval {
        a: String,
        b: String,
        #[command(flatten)]
        common: Common,
    },
    /// Monte Carlo estimate of lambda
    Montecarlo {
        /// Number of samples
        #[arg(long, default_value_t = 1_000_000)]
        samples: usize,
        #[command(flatten)]
        common: Common,
    },
}

/// Exit status for an error.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Parse(_) => EXIT_PARSE,
        Error::PrecisionExhausted { .. } | Error::EnclosureTooWide { .. } => EXIT_PRECISION,
        _ => EXIT_DOMAIN,
    }
}

/// Parses `argv` and runs; returns the exit status, stdout and stderr.
pub fn run_args<I, T>(args: I) -> (i32, String, String)
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => match run(&cli) {
            Ok(out) => (0, out, String::new()),
            Err(e) => (exit_code(&e), String::new(), format!("error: {e}\n")),
        },
        Err(e) => {
            let code = if e.use_stderr() { EXIT_PARSE } else { 0 };
            let text = e.render().to_string();
            if code == 0 {
                (0, text, String::new())
            } else {
                (code, String::new(), text)
            }
        }
    }
}

pub fn run(cli: &Cli) -> Result<String> {
    match &cli.command {
        Command::Construct { input, common } => construct(input, common),
        Command::Convergents { input, common } => convergents(input, common),
        Command::Classify { input, common } => classify(input, common),
        Command::Brjuno { input, bound, common } => brjuno(input, bound.clone(), common),
        Command::Lyapunov { input, common } => lyapunov(input, common),
        Command::Measure { quantity } => measure(quantity),
    }
}

fn depth(common: &Common, default: usize) -> Result<usize> {
    let d = common.depth.unwrap_or(default);
    if d == 0 {
        return Err(Error::invalid("--depth must be >= 1"));
    }
    Ok(d)
}

fn rational_arg(s: &str) -> Result<BigRational> {
    let parse_int = |t: &str| {
        t.trim()
            .parse::<BigInt>()
            .map_err(|_| Error::Parse(crate::error::ParseError::new(0, format!("invalid rational {s:?}"))))
    };
    match s.split_once('/') {
        Some((n, d)) => {
            let d = parse_int(d)?;
            if d.is_zero() {
                return Err(Error::invalid("zero denominator"));
            }
            Ok(BigRational::new(parse_int(n)?, d))
        }
        None => Ok(BigRational::from_integer(parse_int(s)?)),
    }
}

fn psi_arg(common: &Common) -> Result<Option<SpeedFunction>> {
    let Some(text) = &common.psi else {
        return Ok(None);
    };
    let (c, e) = text
        .split_once(',')
        .ok_or_else(|| Error::Parse(crate::error::ParseError::new(0, "--psi expects c,e")))?;
    Ok(Some(SpeedFunction::new(rational_arg(c)?, rational_arg(e)?)?))
}

fn render(format: Format, rows: Vec<(String, String)>, extra: &str, value: Value) -> String {
    match format {
        Format::Table => {
            let mut out = String::new();
            for (k, v) in rows {
                writeln!(out, "{k}\t{v}").expect("write to string");
            }
            out.push_str(extra);
            out
        }
        Format::Structured => {
            let mut s = serde_json::to_string_pretty(&value).expect("json values serialize");
            s.push('\n');
            s
        }
    }
}

fn row(k: &str, v: impl ToString) -> (String, String) {
    (k.to_string(), v.to_string())
}

/// Scientific notation with `sig` significant digits, computed exactly.
pub fn sci(x: &BigRational, sig: usize) -> String {
    if x.is_zero() {
        return "0".to_string();
    }
    let neg = x.is_negative();
    let a = x.abs();
    let mut exp = (ln_ratio::<f64>(&a) / std::f64::consts::LN_10).floor() as i64;
    let ten = BigRational::from_integer(10.into());
    let pow = |e: i64| {
        if e >= 0 {
            num_traits::pow(ten.clone(), e as usize)
        } else {
            num_traits::pow(ten.clone(), (-e) as usize).recip()
        }
    };
    let mut m = &a / pow(exp);
    // the float estimate can be off by one either way
    while m >= ten {
        exp += 1;
        m = &a / pow(exp);
    }
    while m < BigRational::from_integer(1.into()) {
        exp -= 1;
        m = &a / pow(exp);
    }
    let mut digits = decimal_string(&m, sig.saturating_sub(1));
    if digits.starts_with("10") {
        exp += 1;
        digits = decimal_string(&(&a / pow(exp)), sig.saturating_sub(1));
    }
    format!("{}{}e{}", if neg { "-" } else { "" }, digits, exp)
}

fn interval_text(i: &Interval, sig: usize) -> String {
    format!("[{}, {}]", sci(i.lo(), sig), sci(i.hi(), sig))
}

fn construct(input: &str, common: &Common) -> Result<String> {
    let base = parse(input)?;
    let cf = match psi_arg(common)? {
        Some(psi) => {
            let strategy = match common.seed {
                Some(seed) => SpeedStrategy::Randomized { seed },
                None => SpeedStrategy::Minimal,
            };
            construct_at_speed(&base, &psi, strategy)?
        }
        None => base,
    };
    let n = depth(common, 10)?;
    let coeffs = cf.coefficients(n)?;
    let text = encode(&cf);
    let list: Vec<String> = coeffs.iter().map(ToString::to_string).collect();
    let rows = vec![
        row("encoding", &text),
        row("depth", coeffs.len() - 1),
        row("coefficients", list.join(" ")),
    ];
    Ok(render(common.format, rows, "", json!({
        "encoding": text,
        "depth": coeffs.len() - 1,
        "coefficients": list,
    })))
}

fn convergents(input: &str, common: &Common) -> Result<String> {
    let cf = parse(input)?;
    let n = depth(common, 10)?;
    let mut table = ConvergentTable::new(cf);
    table.extend(n)?;
    let entries: Vec<Value> = table
        .entries()
        .iter()
        .map(|c| {
            json!({
                "n": c.n,
                "a": table.coefficient(c.n).expect("read").to_string(),
                "p": c.p.to_string(),
                "q": c.q.to_string(),
            })
        })
        .collect();
    let extra = format!("n\ta_n\tp_n\tq_n\n{}", table.to_tsv());
    Ok(render(
        common.format,
        vec![],
        &extra,
        json!({ "terminated": table.is_terminated(), "convergents": entries }),
    ))
}

fn classify(input: &str, common: &Common) -> Result<String> {
    let cf = parse(input)?;
    let n = depth(common, 40)?;
    if n < 2 {
        return Err(Error::invalid("classify needs --depth >= 2"));
    }
    let opts = DiophantineOptions {
        window: common.window,
        ..DiophantineOptions::default()
    };
    let rep = diophantine_report::<f64>(&cf, n, &opts)?;
    let two = BigRational::from_integer(2.into());
    let floor = distance_floor(&cf, &two, n)?;
    let bt = &rep.class_flags.bounded_type_upto;
    let mut rows = vec![
        row("diagnostic_depth", n),
        row("window", rep.window),
        row("exponent_estimate", format!("{:.6}", rep.exponent_estimate)),
        row("exponent_tolerance", "1e-6"),
        row("max_coefficient", &rep.max_coefficient),
        row("max_coefficient_index", bt.argmax),
        row("bounded_type_flag", bt.bounded_flag),
        row("slow_candidate", rep.class_flags.slow_candidate),
        row("distance_floor_e2", interval_text(&floor.floor, 12)),
        row("distance_floor_e2_argmin", floor.argmin),
        row("distance_tail_floor_e2", interval_text(&floor.tail_floor, 12)),
    ];
    let mut fast_json = Vec::new();
    for (gamma, ns) in &rep.class_flags.fast_witnesses {
        let list: Vec<String> = ns.iter().map(ToString::to_string).collect();
        rows.push(row(&format!("fast_witnesses_gamma_{gamma}"), list.join(" ")));
        fast_json.push(json!({ "gamma": gamma, "n": ns }));
    }
    let sf: Vec<String> = rep.class_flags.superfast_witnesses.iter().map(ToString::to_string).collect();
    rows.push(row("superfast_witnesses", sf.join(" ")));
    let mut speed_json = Value::Null;
    if let Some(psi) = psi_arg(common)? {
        let ws = speed_witnesses(&cf, &psi, n)?;
        let items: Vec<Value> = ws
            .iter()
            .map(|w| {
                json!({
                    "n": w.n,
                    "p": w.p.to_string(),
                    "q": w.q.to_string(),
                    "error": interval_text(&w.error, 12),
                    "margin": interval_text(&w.margin, 12),
                    "status": match w.status { WitnessStatus::Certified => "certified", WitnessStatus::Boundary => "boundary" },
                })
            })
            .collect();
        rows.push(row("psi", &psi));
        let label = |w: &crate::classifier::SpeedWitness| {
            let at = w.n.map_or(format!("{}/{}", w.p, w.q), |n| n.to_string());
            match w.status {
                WitnessStatus::Certified => at,
                WitnessStatus::Boundary => format!("{at}(boundary)"),
            }
        };
        rows.push(row("speed_witnesses", ws.iter().map(label).collect::<Vec<_>>().join(" ")));
        speed_json = json!({ "psi": psi.to_string(), "witnesses": items });
    }
    let samples: Vec<Value> = rep
        .exponent_samples
        .iter()
        .map(|s| json!({ "n": s.n, "mu_lo": s.lo, "mu_hi": s.hi }))
        .collect();
    let extra = format!("\n{}", rep.to_tsv());
    Ok(render(
        common.format,
        rows,
        &extra,
        json!({
            "diagnostic_depth": n,
            "window": rep.window,
            "exponent_estimate": rep.exponent_estimate,
            "exponent_tolerance": 1e-6,
            "max_coefficient": rep.max_coefficient.to_string(),
            "class_flags": {
                "bounded_type_upto": {
                    "max_coefficient": bt.max_coefficient.to_string(),
                    "argmax": bt.argmax,
                    "flag": bt.bounded_flag,
                },
                "slow_candidate": rep.class_flags.slow_candidate,
                "fast_witnesses": fast_json,
                "superfast_witnesses": rep.class_flags.superfast_witnesses,
            },
            "distance_floor_e2": {
                "floor": interval_text(&floor.floor, 12),
                "argmin": floor.argmin,
                "tail_floor": interval_text(&floor.tail_floor, 12),
            },
            "speed": speed_json,
            "exponent_samples": samples,
        }),
    ))
}

fn brjuno(input: &str, bound: Option<BigInt>, common: &Common) -> Result<String> {
    let cf = parse(input)?;
    let n = depth(common, 30)?;
    let digits = common.prec.unwrap_or(crate::classifier::DEFAULT_BRJUNO_DIGITS);
    if digits < 16 {
        return Err(Error::invalid("--prec must be at least 16 digits"));
    }
    let rep = brjuno_partial(&cf, n, digits, bound)?;
    let shown = digits as usize - 2;
    let verdict = match rep.verdict {
        BrjunoVerdict::CertifiedFiniteAtDepth => "certified-finite-at-depth",
        BrjunoVerdict::Inconclusive => "inconclusive",
    };
    let sum = rep.partial_sum.to_decimal(shown);
    let tail = rep.tail_bound.as_ref().map(|t| sci(t, 6));
    let rows = vec![
        row("diagnostic_depth", n),
        row("partial_sum", &sum),
        row("partial_sum_error_bound", sci(&rep.partial_sum.radius(), 3)),
        row("digits", shown),
        row("tail_bound", tail.clone().unwrap_or_else(|| "none".into())),
        row(
            "coefficient_bound",
            rep.coefficient_bound.as_ref().map_or("none".to_string(), ToString::to_string),
        ),
        row("verdict", verdict),
    ];
    let mut extra = String::from("\nn\tterm\tterm_upper\n");
    for t in &rep.terms {
        writeln!(extra, "{}\t{}\t{}", t.n, sci(&t.value.center(), 12), sci(&t.upper, 6)).expect("write to string");
    }
    let terms: Vec<Value> = rep
        .terms
        .iter()
        .map(|t| json!({ "n": t.n, "term": sci(&t.value.center(), 12), "upper": sci(&t.upper, 6) }))
        .collect();
    Ok(render(
        common.format,
        rows,
        &extra,
        json!({
            "diagnostic_depth": n,
            "partial_sum": sum,
            "partial_sum_error_bound": sci(&rep.partial_sum.radius(), 3),
            "digits": shown,
            "tail_bound": tail,
            "coefficient_bound": rep.coefficient_bound.as_ref().map(ToString::to_string),
            "verdict": verdict,
            "terms": terms,
        }),
    ))
}

fn lyapunov(input: &str, common: &Common) -> Result<String> {
    let cf = parse(input)?;
    let n = depth(common, 200)?;
    let rep = lyapunov_report::<f64>(&cf, n, common.window)?;
    let birkhoff = birkhoff_log_derivative::<f64>(&cf, n, 64)?;
    let rows = vec![
        row("diagnostic_depth", n),
        row("window", rep.window),
        row("s_N", format!("{:.9}", rep.s_n(n))),
        row("lambda_upper_estimate", format!("{:.9}", rep.lambda_upper_estimate)),
        row("lambda_lower_estimate", format!("{:.9}", rep.lambda_lower_estimate)),
        row("kappa_upper_estimate", format!("{:.9}", rep.kappa_upper_estimate)),
        row("birkhoff_mean", format!("{:.9}", birkhoff.mean)),
        row("birkhoff_error_bound", format!("{:.3e}", birkhoff.error)),
        row("derivative_sandwich", birkhoff.sandwich_holds),
        row("s_n_error_bound", "1e-9"),
    ];
    let extra = format!("\n{}", rep.to_tsv());
    Ok(render(
        common.format,
        rows,
        &extra,
        json!({
            "diagnostic_depth": n,
            "window": rep.window,
            "s_N": rep.s_n(n),
            "lambda_upper_estimate": rep.lambda_upper_estimate,
            "lambda_lower_estimate": rep.lambda_lower_estimate,
            "kappa_upper_estimate": rep.kappa_upper_estimate,
            "birkhoff": {
                "mean": birkhoff.mean,
                "error_bound": birkhoff.error,
                "derivative_sandwich": birkhoff.sandwich_holds,
            },
            "s_n": rep.s,
        }),
    ))
}

// f64 quadrature cannot certify below this
const FLOAT_FLOOR: f64 = 1e-12;

fn measure(quantity: &MeasureQuantity) -> Result<String> {
    match quantity {
        MeasureQuantity::Lambda { common } => {
            let digits = common.prec.unwrap_or(8);
            let tol = 10f64.powi(-(digits as i32)).max(FLOAT_FLOOR);
            let q = lambda_gauss_quadrature::<f64>(tol);
            let shown = digits.min(12) as usize;
            let value = format!("{:.*}", shown, q.value);
            let rows = vec![
                row("quantity", "lambda_gauss"),
                row("value", &value),
                row("digits", shown),
                row("error_estimate", format!("{:.3e}", q.error)),
                row("closed_form", format!("{:.*}", shown, lambda_gauss_exact::<f64>())),
            ];
            Ok(render(common.format, rows, "", json!({
                "quantity": "lambda_gauss",
                "value": value,
                "digits": shown,
                "error_estimate": q.error,
            })))
        }
        MeasureQuantity::Kappa { common } => {
            let digits = common.prec.unwrap_or(8);
            let tol = 10f64.powi(-(digits as i32)).max(FLOAT_FLOOR);
            let q = kappa_gauss::<f64>(tol);
            let shown = digits.min(12) as usize;
            let value = format!("{:.*}", shown, q.value);
            let rows = vec![
                row("quantity", "kappa_gauss"),
                row("value", &value),
                row("digits", shown),
                row("error_bound", format!("{:.3e}", q.error)),
            ];
            Ok(render(common.format, rows, "", json!({
                "quantity": "kappa_gauss",
                "value": value,
                "digits": shown,
                "error_bound": q.error,
            })))
        }
        MeasureQuantity::Interval { a, b, common } => {
            let (a, b) = (rational_arg(a)?, rational_arg(b)?);
            let digits = common.prec.unwrap_or(16);
            let enc = gauss_measure_enclosure(&a, &b, digits + 4)?;
            let float = gauss_measure_interval::<f64>(&a, &b)?;
            let value = decimal_string(&enc.midpoint(), digits as usize);
            let rows = vec![
                row("quantity", "gauss_measure"),
                row("a", &a),
                row("b", &b),
                row("value", &value),
                row("digits", digits),
                row("enclosure_width", sci(&enc.width(), 3)),
            ];
            Ok(render(common.format, rows, "", json!({
                "quantity": "gauss_measure",
                "a": a.to_string(),
                "b": b.to_string(),
                "value": value,
                "value_f64": float,
                "digits": digits,
            })))
        }
        MeasureQuantity::Montecarlo { samples, common } => {
            let seed = common.seed.unwrap_or(0);
            let mc = monte_carlo_lyapunov::<f64>(*samples, seed)?;
            let rows = vec![
                row("quantity", "lambda_gauss_monte_carlo"),
                row("generator", mc.generator),
                row("seed", mc.seed),
                row("samples", mc.samples),
                row("mean", format!("{:.9}", mc.mean)),
                row("standard_error", format!("{:.3e}", mc.standard_error)),
            ];
            Ok(render(common.format, rows, "", json!({
                "quantity": "lambda_gauss_monte_carlo",
                "generator": mc.generator,
                "seed": mc.seed,
                "samples": mc.samples,
                "mean": mc.mean,
                "standard_error": mc.standard_error,
            })))
        }
    }
}

//! Text encoding of continued fractions.
//!
//! ```text
//! [a0; a1, a2, ...]          finite
//! [a0; pre | period~]        eventually periodic (pre may be empty)
//! [a0; period~]              purely periodic tail
//! rule:<name>(<params>)      named rule, e.g. rule:euler, rule:liouville(10)
//! dec:<decimal>±<ulp>        certified real from a decimal literal (`+-` also accepted)
//! sqrt:<n>                   certified sqrt(n)
//! <p>/<q>                    rational, expanded canonically
//! ```
//!
//! A rule, `dec:` or `sqrt:` form may carry a shift suffix `>>j` (the Gauss
//! map applied `j` times) followed by an integer offset `+k`/`-k` added to
//! the integer part.

use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, ParseError, Result};
use crate::exactnum::{
    cf_from_rational, ArithmeticRule, CoefficientStream, ContinuedFraction, DecimalEnclosure,
    EnclosureOracle, LiouvilleRule, RandomRule, SqrtEnclosure,
    DEFAULT_MAX_REFINEMENTS,
};
use crate::gallery::{self, SpeedFunction, SpeedStrategy};
use crate::precise::decimal_string;

/// Parses any of the supported encodings.
pub fn parse(input: &str) -> Result<ContinuedFraction> {
    let lead = input.len() - input.trim_start().len();
    let s = input.trim();
    if s.starts_with('[') {
        parse_bracket(s, lead)
    } else if let Some(rest) = s.strip_prefix("rule:") {
        parse_rule(rest, lead + 5)
    } else if let Some(rest) = s.strip_prefix("dec:") {
        parse_dec(rest, lead + 4)
    } else if let Some(rest) = s.strip_prefix("sqrt:") {
        let (body, shift, delta) = split_suffixes(rest, lead + 5)?;
        let n = parse_int(body, lead + 5)?;
        let oracle = SqrtEnclosure::new(n).map_err(|e| perr(lead + 5, e.to_string()))?;
        let cf = ContinuedFraction::from_enclosure(Arc::new(oracle), DEFAULT_MAX_REFINEMENTS)?;
        Ok(apply_suffixes(cf, shift, delta))
    } else if s.contains('/') || s.chars().all(|c| c.is_ascii_digit() || c == '-') {
        parse_fraction(s, lead)
    } else {
        Err(perr(lead, "expected '[', 'rule:', 'dec:', 'sqrt:' or a fraction"))
    }
}

fn perr(position: usize, message: impl Into<String>) -> Error {
    Error::Parse(ParseError::new(position, message))
}

fn parse_int(token: &str, position: usize) -> Result<BigInt> {
    let t = token.trim();
    if t.is_empty() {
        return Err(perr(position, "expected an integer"));
    }
    t.parse::<BigInt>()
        .map_err(|_| perr(position, format!("invalid integer {t:?}")))
}

fn parse_rational(token: &str, position: usize) -> Result<BigRational> {
    match token.split_once('/') {
        Some((n, d)) => {
            let d = parse_int(d, position)?;
            if d.is_zero() {
                return Err(perr(position, "zero denominator"));
            }
            Ok(BigRational::new(parse_int(n, position)?, d))
        }
        None => Ok(BigRational::from_integer(parse_int(token, position)?)),
    }
}

fn parse_fraction(s: &str, pos: usize) -> Result<ContinuedFraction> {
    Ok(cf_from_rational(&parse_rational(s, pos)?))
}

// comma separated integers; `base` is the offset of `body` in the input
fn parse_list(body: &str, base: usize) -> Result<Vec<BigInt>> {
    let mut out = Vec::new();
    if body.trim().is_empty() {
        return Ok(out);
    }
    let mut offset = 0;
    for part in body.split(',') {
        let lead = part.len() - part.trim_start().len();
        out.push(parse_int(part, base + offset + lead)?);
        offset += part.len() + 1;
    }
    Ok(out)
}

fn parse_bracket(s: &str, pos: usize) -> Result<ContinuedFraction> {
    let inner = s
        .strip_prefix('[')
        .and_then(|t| t.strip_suffix(']'))
        .ok_or_else(|| perr(pos + s.len(), "missing closing ']'"))?;
    let base = pos + 1;
    let (head, tail) = match inner.find([';', ':']) {
        Some(i) => (&inner[..i], Some((&inner[i + 1..], base + i + 1))),
        None => (inner, None),
    };
    let a0 = parse_int(head, base)?;
    let Some((tail, tail_pos)) = tail else {
        return ContinuedFraction::finite(a0, vec![]);
    };
    let checked = |r: Result<ContinuedFraction>, at: usize| {
        r.map_err(|e| match e {
            Error::InvalidCoefficient { index, value } => {
                perr(at, format!("coefficient a_{index} = {value} must be >= 1"))
            }
            other => other,
        })
    };
    match tail.find('|') {
        Some(bar) => {
            let period_part = &tail[bar + 1..];
            let period_body = period_part
                .trim_end()
                .strip_suffix('~')
                .ok_or_else(|| perr(tail_pos + tail.len(), "periodic block must end with '~'"))?;
            let pre = parse_list(&tail[..bar], tail_pos)?;
            let period = parse_list(period_body, tail_pos + bar + 1)?;
            if period.is_empty() {
                return Err(perr(tail_pos + bar + 1, "period must be nonempty"));
            }
            checked(ContinuedFraction::periodic(a0, pre, period), tail_pos)
        }
        // `[a0; p1, p2~]` is shorthand for an empty preperiod
        None if tail.trim_end().ends_with('~') => {
            let body = tail.trim_end().strip_suffix('~').unwrap_or_default();
            let period = parse_list(body, tail_pos)?;
            if period.is_empty() {
                return Err(perr(tail_pos, "period must be nonempty"));
            }
            checked(ContinuedFraction::periodic(a0, vec![], period), tail_pos)
        }
        None => {
            let coeffs = parse_list(tail, tail_pos)?;
            checked(ContinuedFraction::finite(a0, coeffs), tail_pos)
        }
    }
}

// strips `>>j` and `+k`/`-k` suffixes
fn split_suffixes(s: &str, pos: usize) -> Result<(&str, usize, BigInt)> {
    let mut body = s.trim_end();
    let mut delta = BigInt::zero();
    let close = body.rfind(')').map(|i| i + 1).unwrap_or(0);
    if let Some(i) = body[close..].rfind(['+', '-']).map(|i| i + close) {
        let digits = &body[i + 1..];
        // `+-` and `±` belong to a dec literal, not to an offset
        let prev = body[..i].chars().next_back();
        let attached = matches!(prev, Some(c) if c.is_ascii_alphanumeric() || c == ')');
        if attached && !digits.is_empty() && digits.chars().all(|c| c.is_ascii_digit()) {
            delta = parse_int(&body[i..], pos + i)?;
            body = &body[..i];
        }
    }
    let mut shift = 0usize;
    if let Some(i) = body.rfind(">>") {
        let t = &body[i + 2..];
        shift = t
            .trim()
            .parse()
            .map_err(|_| perr(pos + i + 2, format!("invalid shift {t:?}")))?;
        body = &body[..i];
    }
    Ok((body, shift, delta))
}

fn apply_suffixes(cf: ContinuedFraction, shift: usize, delta: BigInt) -> ContinuedFraction {
    let cf = if shift > 0 { cf.shifted(shift) } else { cf };
    if delta.is_zero() {
        cf
    } else {
        cf.with_a0(cf.a0() + delta)
    }
}

fn parse_rule(s: &str, pos: usize) -> Result<ContinuedFraction> {
    let (body, shift, delta) = split_suffixes(s, pos)?;
    let (name, params, params_pos) = match body.find('(') {
        Some(i) => {
            let inner = body[i + 1..]
                .strip_suffix(')')
                .ok_or_else(|| perr(pos + body.len(), "missing ')'"))?;
            let parts: Vec<&str> = if inner.trim().is_empty() {
                vec![]
            } else {
                inner.split(',').map(str::trim).collect()
            };
            (&body[..i], parts, pos + i + 1)
        }
        None => (body, vec![], pos + body.len()),
    };
    let want = |k: usize| -> Result<()> {
        if params.len() == k {
            Ok(())
        } else {
            Err(perr(params_pos, format!("rule {name} takes {k} parameter(s), got {}", params.len())))
        }
    };
    let domain = |e: Error| perr(params_pos, e.to_string());
    let u64_param = |t: &str| -> Result<u64> {
        t.parse().map_err(|_| perr(params_pos, format!("invalid parameter {t:?}")))
    };
    let cf = match name.trim() {
        "golden" => {
            want(0)?;
            gallery::golden_ratio()
        }
        "sqrt2m1" => {
            want(0)?;
            gallery::sqrt2_minus_1()
        }
        "euler" | "e" => {
            want(0)?;
            gallery::euler_pattern()
        }
        "naturals" => {
            want(0)?;
            gallery::naturals()
        }
        "liouville" => {
            want(1)?;
            let base = parse_int(params[0], params_pos)?;
            let rule = LiouvilleRule::new(base).map_err(domain)?;
            ContinuedFraction::from_rule(BigInt::zero(), Arc::new(rule))
        }
        "arith" => {
            want(2)?;
            let rule = ArithmeticRule::new(parse_int(params[0], params_pos)?, parse_int(params[1], params_pos)?)
                .map_err(domain)?;
            ContinuedFraction::from_rule(BigInt::zero(), Arc::new(rule))
        }
        "random" => {
            want(2)?;
            let rule = RandomRule::new(u64_param(params[0])?, u64_param(params[1])?).map_err(domain)?;
            ContinuedFraction::from_rule(BigInt::zero(), Arc::new(rule))
        }
        "surd" => {
            want(3)?;
            gallery::quadratic_surd(
                &parse_int(params[0], params_pos)?,
                &parse_int(params[1], params_pos)?,
                &parse_int(params[2], params_pos)?,
            )
            .map_err(domain)?
        }
        "speed" => {
            if params.len() < 4 {
                return Err(perr(params_pos, "rule speed takes c, e, strategy, a0[, a1, ...]"));
            }
            let psi = SpeedFunction::new(
                parse_rational(params[0], params_pos)?,
                parse_rational(params[1], params_pos)?,
            )
            .map_err(domain)?;
            let strategy = match params[2] {
                "min" => SpeedStrategy::Minimal,
                other => match other.strip_prefix("seed=") {
                    Some(seed) => SpeedStrategy::Randomized { seed: u64_param(seed)? },
                    None => return Err(perr(params_pos, format!("unknown strategy {other:?}"))),
                },
            };
            let a0 = parse_int(params[3], params_pos)?;
            let rest = params[4..]
                .iter()
                .map(|t| parse_int(t, params_pos))
                .collect::<Result<Vec<_>>>()?;
            let prefix = ContinuedFraction::finite(a0, rest).map_err(domain)?;
            gallery::construct_at_speed(&prefix, &psi, strategy)?
        }
        other => return Err(perr(pos, format!("unknown rule {other:?}"))),
    };
    Ok(apply_suffixes(cf, shift, delta))
}

fn parse_dec(s: &str, pos: usize) -> Result<ContinuedFraction> {
    let (body, shift, delta) = split_suffixes(s, pos)?;
    let (digits, ulp) = if let Some(i) = body.find('±') {
        (&body[..i], &body[i + '±'.len_utf8()..])
    } else if let Some(i) = body.find("+-") {
        (&body[..i], &body[i + 2..])
    } else {
        return Err(perr(pos + body.len(), "expected ±<ulp> after the decimal"));
    };
    let ulp = parse_int(ulp, pos + digits.len() + 1)?;
    let oracle = DecimalEnclosure::new(digits.trim(), &ulp).map_err(|e| perr(pos, e.to_string()))?;
    let cf = ContinuedFraction::from_enclosure(Arc::new(oracle), DEFAULT_MAX_REFINEMENTS)?;
    Ok(apply_suffixes(cf, shift, delta))
}

fn join(v: &[BigInt]) -> String {
    v.iter().map(ToString::to_string).collect::<Vec<_>>().join(", ")
}

/// Canonical text form; `parse(encode(x))` has the same coefficients as `x`.
pub fn encode(cf: &ContinuedFraction) -> String {
    let off = cf.offset();
    match cf.stream() {
        CoefficientStream::Finite(c) => {
            let rest = if off < c.len() { &c[off..] } else { &[][..] };
            if rest.is_empty() {
                format!("[{}]", cf.a0())
            } else {
                format!("[{}; {}]", cf.a0(), join(rest))
            }
        }
        CoefficientStream::EventuallyPeriodic { preperiod, period } => {
            let (pre, per) = if off <= preperiod.len() {
                (preperiod[off..].to_vec(), period.clone())
            } else {
                let r = (off - preperiod.len()) % period.len();
                let mut per = period[r..].to_vec();
                per.extend_from_slice(&period[..r]);
                (vec![], per)
            };
            if pre.is_empty() {
                format!("[{}; | {}~]", cf.a0(), join(&per))
            } else {
                format!("[{}; {} | {}~]", cf.a0(), join(&pre), join(&per))
            }
        }
        CoefficientStream::Rule(r) => {
            let rule = r.rule();
            let params = rule.params();
            let mut s = if params.is_empty() {
                format!("rule:{}", rule.name())
            } else {
                format!("rule:{}({})", rule.name(), params.join(","))
            };
            let base = if off > 0 { BigInt::zero() } else { rule.default_a0() };
            push_suffixes(&mut s, off, cf.a0() - base);
            s
        }
        CoefficientStream::CertifiedReal(c) => {
            let mut s = c
                .oracle()
                .describe()
                .unwrap_or_else(|| describe_enclosure(c.oracle().as_ref()));
            let base = if off > 0 {
                BigInt::zero()
            } else {
                cf.stream().get(0).ok().flatten().unwrap_or_default()
            };
            push_suffixes(&mut s, off, cf.a0() - base);
            s
        }
    }
}

fn push_suffixes(s: &mut String, shift: usize, delta: BigInt) {
    if shift > 0 {
        s.push_str(&format!(">>{shift}"));
    }
    if delta > BigInt::zero() {
        s.push_str(&format!("+{delta}"));
    } else if delta < BigInt::zero() {
        s.push_str(&format!("{delta}"));
    }
}

// dec: form of the level-0 enclosure, for oracles without a text form
fn describe_enclosure(oracle: &dyn EnclosureOracle) -> String {
    let enc = oracle.enclosure(0);
    let mut digits = 0usize;
    let ten = BigRational::from_integer(10.into());
    let mut unit = BigRational::one();
    while unit > enc.width() && digits < 200 {
        unit /= &ten;
        digits += 1;
    }
    let mid = enc.midpoint();
    let ulp = ((enc.width() / &unit).ceil().to_integer()) + 1;
    format!("dec:{}±{}", decimal_string(&mid, digits), ulp)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn parse_finite_and_periodic() {
        assert_eq!(parse("[3; 7, 16]").unwrap().coefficients(9).unwrap(), ints(&[3, 7, 16]));
        assert_eq!(parse("[7:]").unwrap().coefficients(9).unwrap(), ints(&[7]));
        assert_eq!(parse("[7]").unwrap().coefficients(9).unwrap(), ints(&[7]));
        let p = parse("[0; 1 | 2, 3~]").unwrap();
        assert_eq!(p.coefficients(6).unwrap(), ints(&[0, 1, 2, 3, 2, 3, 2]));
        let g = parse("[1; | 1~]").unwrap();
        assert_eq!(parse("[1; 1~]").unwrap().coefficients(6).unwrap(), g.coefficients(6).unwrap());
        assert!(parse("[1; ~]").is_err());
        assert_eq!(g.coefficients(4).unwrap(), ints(&[1, 1, 1, 1, 1]));
    }

    #[test]
    fn parse_errors_carry_positions() {
        let e = parse("[3; 7, x]").unwrap_err();
        match e {
            Error::Parse(p) => assert_eq!(p.position, 7),
            other => panic!("{other:?}"),
        }
        let e = parse("[3; 0, 2]").unwrap_err();
        assert!(matches!(e, Error::Parse(_)));
        assert!(matches!(parse("[1; 2 | ]"), Err(Error::Parse(_))));
        assert!(matches!(parse("[1; 2 | 3]"), Err(Error::Parse(_))));
        assert!(matches!(parse("rule:nope"), Err(Error::Parse(_))));
        assert!(matches!(parse("rule:liouville(1)"), Err(Error::Parse(_))));
        assert!(matches!(parse("hello"), Err(Error::Parse(_))));
    }

    #[test]
    fn rules_and_suffixes() {
        let e = parse("rule:euler").unwrap();
        assert_eq!(e.coefficients(5).unwrap(), ints(&[2, 1, 2, 1, 1, 4]));
        let em2 = parse("rule:euler-2").unwrap();
        assert_eq!(em2.coefficients(5).unwrap(), ints(&[0, 1, 2, 1, 1, 4]));
        let sh = parse("rule:euler>>3").unwrap();
        assert_eq!(sh.coefficients(3).unwrap(), ints(&[0, 1, 4, 1]));
        let l = parse("rule:liouville(10)").unwrap();
        assert_eq!(l.coefficient(2).unwrap(), Some(BigInt::from(100)));
        assert_eq!(parse("rule:sqrt2m1").unwrap().coefficients(3).unwrap(), ints(&[0, 2, 2, 2]));
    }

    #[test]
    fn decimal_and_sqrt_inputs() {
        let pi = parse("dec:3.14159265358979±1").unwrap();
        assert_eq!(pi.coefficients(4).unwrap(), ints(&[3, 7, 15, 1, 292]));
        let pi2 = parse("dec:3.14159265358979+-1").unwrap();
        assert_eq!(pi2.coefficients(4).unwrap(), ints(&[3, 7, 15, 1, 292]));
        let s = parse("sqrt:7").unwrap();
        assert_eq!(s.coefficients(8).unwrap(), ints(&[2, 1, 1, 1, 4, 1, 1, 1, 4]));
        assert_eq!(parse("355/113").unwrap().coefficients(5).unwrap(), ints(&[3, 7, 16]));
    }

    #[test]
    fn encode_round_trips() {
        for text in [
            "[3; 7, 16]",
            "[-2]",
            "[0; 1 | 2, 3~]",
            "[1; | 1~]",
            "rule:euler",
            "rule:liouville(10)",
            "rule:arith(1,1)",
            "rule:random(7,100)",
            "rule:euler>>4",
            "rule:euler-2",
            "rule:speed(1,3,min,0,1)",
            "rule:speed(1/2,5/2,seed=9,0,1,2)",
            "dec:3.14159265358979±1",
            "sqrt:2",
            "sqrt:2>>3",
        ] {
            let cf = parse(text).unwrap();
            let enc = encode(&cf);
            let back = parse(&enc).unwrap();
            assert_eq!(enc, encode(&back), "{text}");
            assert_eq!(cf.coefficients(6).unwrap(), back.coefficients(6).unwrap(), "{text}");
        }
        assert_eq!(encode(&parse("[1; | 1~]").unwrap().shifted(2)), "[0; | 1~]");
        assert_eq!(encode(&parse("[0; 5 | 1, 2~]").unwrap().shifted(2)), "[0; | 2, 1~]");
    }
}

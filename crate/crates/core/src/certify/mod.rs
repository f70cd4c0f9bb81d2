//! Certified comparisons.
//!
//! Irrational quantities are enclosed in [`Interval`]s with dyadic endpoints.
//! A comparison `lhs < rhs` is decided from an enclosure of the margin
//! `rhs - lhs`, doubling the working precision until the sign of the margin
//! is known or the precision cap is reached.

mod dyadic;
mod expr;
mod interval;

pub use dyadic::{Dyadic, Round};
pub use expr::Expr;
pub use interval::{pi_enclosure, sqrt_enclosure, Interval};

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Starting precision of the escalation loop.
pub const START_PRECISION_BITS: u32 = 64;
/// Default cap of the escalation loop.
pub const DEFAULT_MAX_PRECISION_BITS: u32 = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Holds,
    Fails,
    Inconclusive,
}

impl Outcome {
    pub fn as_str(self) -> &'static str {
        match self {
            Outcome::Holds => "holds",
            Outcome::Fails => "fails",
            Outcome::Inconclusive => "inconclusive",
        }
    }

    pub fn is_decisive(self) -> bool {
        self != Outcome::Inconclusive
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Verdict {
    pub outcome: Outcome,
    pub precision_bits_used: u32,
    /// Enclosure of `rhs - lhs`.
    pub margin: Interval,
}

impl Verdict {
    /// Strict-inequality verdict: holds iff the margin is certainly positive.
    pub fn from_margin(margin: Interval, precision_bits_used: u32) -> Self {
        let outcome = if margin.is_positive() {
            Outcome::Holds
        } else if margin.is_negative() {
            Outcome::Fails
        } else {
            Outcome::Inconclusive
        };
        Verdict {
            outcome,
            precision_bits_used,
            margin,
        }
    }

    /// Verdict for an exactly known margin of a non-strict relation `lhs <= rhs`.
    ///
    /// A zero margin counts as holding here, unlike [`Verdict::from_margin`].
    pub fn from_exact_nonstrict(margin: &BigRational) -> Self {
        let outcome = if margin.is_negative() {
            Outcome::Fails
        } else {
            Outcome::Holds
        };
        Verdict {
            outcome,
            precision_bits_used: 0,
            margin: exact_interval(margin),
        }
    }
}

/// Enclosure of an exact rational; degenerate whenever the value is a
/// dyadic of at most 256 significant bits.
fn exact_interval(r: &BigRational) -> Interval {
    Interval::from_rational(r, 256)
}

/// Escalate precision from [`START_PRECISION_BITS`] (or the cap, if lower)
/// by doubling until `margin_at(prec)` has a definite sign.
pub fn certify_margin<F>(max_precision_bits: u32, margin_at: F) -> Result<Verdict>
where
    F: Fn(u32) -> Result<Interval>,
{
    let max_precision_bits = max_precision_bits.max(8);
    let mut prec = START_PRECISION_BITS.min(max_precision_bits);
    loop {
        let verdict = Verdict::from_margin(margin_at(prec)?, prec);
        if verdict.outcome.is_decisive() || prec >= max_precision_bits {
            return Ok(verdict);
        }
        prec = (prec * 2).min(max_precision_bits);
    }
}

/// Certify `lhs < rhs` for an exact rational `lhs`.
pub fn certify_less(lhs: &BigRational, rhs: &Expr, max_precision_bits: u32) -> Result<Verdict> {
    certify_margin(max_precision_bits, |prec| {
        let r = rhs.eval(prec)?;
        let l = Interval::from_rational(lhs, prec + 8);
        Ok(r.sub(&l, prec + 8))
    })
}

/// Certify `lhs < rhs` for two expressions.
pub fn certify_expr_less(lhs: &Expr, rhs: &Expr, max_precision_bits: u32) -> Result<Verdict> {
    certify_margin(max_precision_bits, |prec| {
        Ok(rhs.eval(prec)?.sub(&lhs.eval(prec)?, prec + 8))
    })
}

/// Rounding mode for decimal output.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecimalRound {
    Floor,
    Ceil,
    Nearest,
}

fn pow10(e: u32) -> BigInt {
    BigInt::from(10).pow(e)
}

/// `r` as a decimal string with `digits` significant digits.
///
/// `Floor`/`Ceil` round toward negative/positive infinity, so a bracket
/// printed with them still contains the value. Trailing fractional zeros are
/// dropped.
pub fn decimal_string(r: &BigRational, digits: u32, round: DecimalRound) -> String {
    if r.is_zero() {
        return "0".to_string();
    }
    let digits = digits.max(1);
    let negative = r.is_negative();
    let a = r.abs();
    let (num, den) = (a.numer(), a.denom());

    // Decimal exponent e with 10^e <= a < 10^(e+1).
    let mut e =
        ((num.bits() as f64 - den.bits() as f64) * std::f64::consts::LOG10_2).floor() as i64;
    let ge_pow = |e: i64| -> bool {
        if e >= 0 {
            num >= &(den * pow10(e as u32))
        } else {
            &(num * pow10((-e) as u32)) >= den
        }
    };
    while ge_pow(e + 1) {
        e += 1;
    }
    while !ge_pow(e) {
        e -= 1;
    }

    // scaled = a * 10^(digits - 1 - e)
    let shift = digits as i64 - 1 - e;
    let (sn, sd) = if shift >= 0 {
        (num * pow10(shift as u32), den.clone())
    } else {
        (num.clone(), den * pow10((-shift) as u32))
    };
    let (q, rem) = sn.div_rem(&sd);
    let round_up_magnitude = match (round, negative) {
        (_, _) if rem.is_zero() => false,
        (DecimalRound::Floor, false) | (DecimalRound::Ceil, true) => false,
        (DecimalRound::Floor, true) | (DecimalRound::Ceil, false) => true,
        (DecimalRound::Nearest, _) => rem * 2 >= sd,
    };
    let mut mant = if round_up_magnitude { q + 1 } else { q };
    if mant == pow10(digits) {
        mant /= 10;
        e += 1;
    }

    let s = mant.to_string();
    let mut out = String::new();
    if negative {
        out.push('-');
    }
    if (-7..21).contains(&e) {
        if e >= 0 {
            let int_len = e as usize + 1;
            if s.len() <= int_len {
                out.push_str(&s);
                out.push_str(&"0".repeat(int_len - s.len()));
            } else {
                let frac = s[int_len..].trim_end_matches('0');
                out.push_str(&s[..int_len]);
                if !frac.is_empty() {
                    out.push('.');
                    out.push_str(frac);
                }
            }
        } else {
            out.push_str("0.");
            out.push_str(&"0".repeat((-e - 1) as usize));
            out.push_str(s.trim_end_matches('0'));
        }
    } else {
        let frac = s[1..].trim_end_matches('0');
        out.push_str(&s[..1]);
        if !frac.is_empty() {
            out.push('.');
            out.push_str(frac);
        }
        out.push_str(&format!("e{e}"));
    }
    out
}

/// Parse a decimal string (as produced by [`decimal_string`]) back to an exact rational.
pub fn parse_decimal(s: &str) -> Result<BigRational> {
    let bad = || Error::InvalidParameter(format!("malformed decimal {s:?}"));
    let (mantissa, exp) = match s.split_once(['e', 'E']) {
        Some((m, e)) => (m, e.parse::<i64>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (negative, mantissa) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa),
    };
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if int_part.is_empty()
        || !int_part
            .chars()
            .chain(frac_part.chars())
            .all(|c| c.is_ascii_digit())
    {
        return Err(bad());
    }
    let digits: BigInt = format!("{int_part}{frac_part}")
        .parse()
        .map_err(|_| bad())?;
    let scale = exp - frac_part.len() as i64;
    let mut v = if scale >= 0 {
        BigRational::from_integer(digits * pow10(scale as u32))
    } else {
        BigRational::new(digits, pow10((-scale) as u32))
    };
    if negative {
        v = -v;
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn certify_examples() {
        // c_{5,2} = 1/5 against sqrt(6/(pi*24*2)): reversed.
        let rhs = Expr::sqrt(Expr::int(6) / (Expr::pi() * Expr::int(24) * Expr::int(2)));
        let v = certify_less(&q(1, 5), &rhs, 4096).unwrap();
        assert_eq!(v.outcome, Outcome::Fails);
        assert_eq!(v.precision_bits_used, 64);
        assert!((v.margin.mid_f64() + 5.288_6e-4).abs() < 1e-7);

        let rhs = Expr::sqrt(Expr::int(6) / (Expr::pi() * Expr::int(3) * Expr::int(4)));
        assert_eq!(
            certify_less(&q(3, 8), &rhs, 4096).unwrap().outcome,
            Outcome::Holds
        );

        let rhs = Expr::sqrt(Expr::int(6) / (Expr::pi() * Expr::int(15) * Expr::int(2)));
        assert_eq!(
            certify_less(&q(1, 4), &rhs, 4096).unwrap().outcome,
            Outcome::Holds
        );
    }

    #[test]
    fn equality_stays_inconclusive_up_to_the_cap() {
        let rhs: Expr = "sqrt(4)/2".parse().unwrap();
        let v = certify_less(&q(1, 1), &rhs, 512).unwrap();
        assert_eq!(v.outcome, Outcome::Inconclusive);
        assert_eq!(v.precision_bits_used, 512);
    }

    #[test]
    fn escalation_decides_tiny_margins() {
        // pi - 3.14159265358979323846264338327950288 is about 4.2e-36, well below 64 bits.
        let lhs = parse_decimal("3.14159265358979323846264338327950288").unwrap();
        let v = certify_less(&lhs, &Expr::pi(), 4096).unwrap();
        assert_eq!(v.outcome, Outcome::Holds);
        assert!(v.precision_bits_used > 64);
    }

    #[test]
    fn trichotomy_matches_margin_sign() {
        let cases = [(q(1, 3), Outcome::Holds), (q(-1, 3), Outcome::Fails)];
        for (m, expected) in cases {
            let v = Verdict::from_margin(Interval::from_rational(&m, 64), 64);
            assert_eq!(v.outcome, expected);
        }
        let straddle = Interval::new(Dyadic::from_int(-1), Dyadic::from_int(1)).unwrap();
        assert_eq!(
            Verdict::from_margin(straddle, 64).outcome,
            Outcome::Inconclusive
        );
        let zero = Interval::from_int(0);
        assert_eq!(
            Verdict::from_margin(zero, 64).outcome,
            Outcome::Inconclusive
        );
        assert_eq!(
            Verdict::from_exact_nonstrict(&q(0, 1)).outcome,
            Outcome::Holds
        );
    }

    #[test]
    fn decimal_formatting() {
        assert_eq!(
            decimal_string(&q(157, 160), 30, DecimalRound::Nearest),
            "0.98125"
        );
        assert_eq!(decimal_string(&q(1, 3), 5, DecimalRound::Floor), "0.33333");
        assert_eq!(decimal_string(&q(1, 3), 5, DecimalRound::Ceil), "0.33334");
        assert_eq!(
            decimal_string(&q(-1, 3), 5, DecimalRound::Floor),
            "-0.33334"
        );
        assert_eq!(decimal_string(&q(2, 3), 3, DecimalRound::Nearest), "0.667");
        assert_eq!(
            decimal_string(&q(999_999, 1), 3, DecimalRound::Ceil),
            "1000000"
        );
        assert_eq!(
            decimal_string(&q(1, 1_000_000_000), 3, DecimalRound::Nearest),
            "1e-9"
        );
        assert_eq!(
            decimal_string(&q(1200, 1), 30, DecimalRound::Nearest),
            "1200"
        );
        assert_eq!(decimal_string(&q(0, 1), 30, DecimalRound::Nearest), "0");
    }

    #[test]
    fn directed_decimals_bracket_value() {
        for (n, d) in [(1i64, 7i64), (-22, 7), (123_456_789, 1000), (5, 1 << 40)] {
            let r = q(n, d);
            let lo = parse_decimal(&decimal_string(&r, 12, DecimalRound::Floor)).unwrap();
            let hi = parse_decimal(&decimal_string(&r, 12, DecimalRound::Ceil)).unwrap();
            assert!(lo <= r && r <= hi, "{r}");
        }
    }
}

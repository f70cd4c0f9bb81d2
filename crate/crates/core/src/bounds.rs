//! Closed-form upper bounds for concentrations, evaluated as certified
//! enclosures.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::certify::{certify_margin, Dyadic, Expr, Interval, Round, Verdict};
use crate::error::{invalid, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BoundKind {
    MainBound,
    CorollaryBound,
    WallisBound,
    BesselG,
    BesselChain,
    DSequence,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundValue {
    pub value: Interval,
    pub kind: BoundKind,
}

fn check_ell_n(ell: u32, n: u32) -> Result<()> {
    if ell < 2 {
        return Err(invalid(format!("ell must be at least 2, got {ell}")));
    }
    if n < 1 {
        return Err(invalid("n must be at least 1"));
    }
    Ok(())
}

/// `sqrt(6 / (pi (ell^2 - 1) n))`
pub fn main_bound_expr(ell: u32, n: u32) -> Result<Expr> {
    check_ell_n(ell, n)?;
    let ell = i64::from(ell);
    Ok(Expr::sqrt(
        Expr::int(6) / (Expr::pi() * Expr::int(ell * ell - 1) * Expr::int(i64::from(n))),
    ))
}

pub fn main_bound(ell: u32, n: u32, precision_bits: u32) -> Result<BoundValue> {
    Ok(BoundValue {
        value: main_bound_expr(ell, n)?.eval(precision_bits)?,
        kind: BoundKind::MainBound,
    })
}

/// `2 sqrt(2/pi) / (ell sqrt(n))`
pub fn corollary_bound_expr(ell: u32, n: u32) -> Result<Expr> {
    check_ell_n(ell, n)?;
    Ok(Expr::int(2) * Expr::sqrt(Expr::int(2) / Expr::pi())
        / (Expr::int(i64::from(ell)) * Expr::sqrt(Expr::int(i64::from(n)))))
}

pub fn corollary_bound(ell: u32, n: u32, precision_bits: u32) -> Result<BoundValue> {
    Ok(BoundValue {
        value: corollary_bound_expr(ell, n)?.eval(precision_bits)?,
        kind: BoundKind::CorollaryBound,
    })
}

/// `1 / sqrt(pi k)`
pub fn wallis_bound_expr(k: u32) -> Result<Expr> {
    if k < 1 {
        return Err(invalid("k must be at least 1"));
    }
    Ok(Expr::int(1) / Expr::sqrt(Expr::pi() * Expr::int(i64::from(k))))
}

pub fn wallis_bound(k: u32, precision_bits: u32) -> Result<BoundValue> {
    Ok(BoundValue {
        value: wallis_bound_expr(k)?.eval(precision_bits)?,
        kind: BoundKind::WallisBound,
    })
}

/// `C(2k, k) 2^{-2k}`, the central symmetric binomial probability.
pub fn central_binomial_probability(k: u32) -> BigRational {
    let k = u64::from(k);
    let c = crate::exactdist::binomial(2 * k, k);
    BigRational::new(BigInt::from(c), BigInt::one() << (2 * k))
}

/// `d_n = 1 - 3/(20n) + 21/(160 n^2) + [n even] / (sqrt(3) (n-1) 2^(n-1))`
pub fn d_sequence_expr(n: u32) -> Result<Expr> {
    if n < 1 {
        return Err(invalid("n must be at least 1"));
    }
    let n64 = i64::from(n);
    let rational_part = BigRational::one() - BigRational::new(3.into(), (20 * n64).into())
        + BigRational::new(21.into(), (160 * n64 * n64).into());
    let expr = Expr::rational(rational_part);
    if n.is_multiple_of(2) {
        let scale = BigInt::from(n - 1) << (n - 1);
        Ok(expr + Expr::int(1) / (Expr::sqrt(Expr::int(3)) * Expr::big(scale)))
    } else {
        Ok(expr)
    }
}

pub fn d_sequence(n: u32, precision_bits: u32) -> Result<BoundValue> {
    Ok(BoundValue {
        value: d_sequence_expr(n)?.eval(precision_bits)?,
        kind: BoundKind::DSequence,
    })
}

/// `sqrt(3 / (pi n))`
pub fn bessel_chain_expr(n: u32) -> Result<Expr> {
    if n < 1 {
        return Err(invalid("n must be at least 1"));
    }
    Ok(Expr::sqrt(
        Expr::int(3) / (Expr::pi() * Expr::int(i64::from(n))),
    ))
}

pub fn bessel_chain_bound(n: u32, precision_bits: u32) -> Result<BoundValue> {
    Ok(BoundValue {
        value: bessel_chain_expr(n)?.eval(precision_bits)?,
        kind: BoundKind::BesselChain,
    })
}

/// Sum of a positive series `t_0 + t_1 + ...` given `t_0` and the ratios
/// `t_{m+1}/t_m`, which must be decreasing in `m`.
///
/// Terms are added until the next one is below `rel_tol * partial_sum`
/// and the ratio has dropped below 1/2; the remainder is then bounded by the
/// geometric series with the next ratio and added as `[0, tail]`.
fn positive_series<R>(first: Interval, ratio: R, rel_tol: &Dyadic, prec: u32) -> Interval
where
    R: Fn(u64) -> Interval,
{
    let half = Dyadic::one().mul_pow2(-1);
    let mut sum = Interval::from_int(0);
    let mut term = first;
    let mut m = 0u64;
    loop {
        sum = sum.add(&term, prec);
        let next = term.mul(&ratio(m), prec);
        if next.hi().is_zero() {
            return sum;
        }
        let r_next = ratio(m + 1);
        let small = *next.hi() <= sum.lo().mul(rel_tol);
        if small && *r_next.hi() < half {
            let tail = next
                .hi()
                .div(&Dyadic::one().sub(r_next.hi()), prec, Round::Up);
            let slack = Interval::new(Dyadic::zero(), tail).expect("tail is non-negative");
            return sum.add(&slack, prec);
        }
        term = next;
        m += 1;
    }
}

/// Working precision for a target absolute tolerance on a value of order one.
fn precision_for(tolerance: f64) -> u32 {
    let bits = (-tolerance.log2()).ceil().max(0.0) as u32;
    bits.max(53) + 48
}

fn bessel_g_interval(lambda: &BigRational, tol: &Dyadic, prec: u32) -> Interval {
    let rel_tol = tol.mul_pow2(-2);
    let lam = Interval::from_rational(lambda, prec);
    let quarter_sq = lam.mul(&lam, prec).mul_pow2(-2);

    // I0(x) = sum (x^2/4)^m / (m!)^2
    let i0 = positive_series(
        Interval::from_int(1),
        |m| {
            let d = Interval::from_int(((m + 1) * (m + 1)) as i64);
            quarter_sq.div(&d, prec).expect("positive divisor")
        },
        &rel_tol,
        prec,
    );
    // I1(x) = (x/2) sum (x^2/4)^m / (m! (m+1)!)
    let i1 = positive_series(
        lam.mul_pow2(-1),
        |m| {
            let d = Interval::from_int(((m + 1) * (m + 2)) as i64);
            quarter_sq.div(&d, prec).expect("positive divisor")
        },
        &rel_tol,
        prec,
    );
    // exp(x) = sum x^k / k!
    let e = positive_series(
        Interval::from_int(1),
        |k| {
            lam.div(&Interval::from_int(k as i64 + 1), prec)
                .expect("positive divisor")
        },
        &rel_tol,
        prec,
    );
    i0.add(&i1, prec).div(&e, prec).expect("exp is positive")
}

/// Enclosure of `G(lambda) = e^{-lambda} (I0(lambda) + I1(lambda))`.
///
/// The modified Bessel series and the exponential series are summed with
/// interval arithmetic; each truncated remainder is enclosed by a geometric
/// bound, so the result always contains the true value. Its width is about
/// `tolerance` or less.
pub fn bessel_g(lambda: &BigRational, tolerance: f64) -> Result<BoundValue> {
    if *lambda < BigRational::zero() {
        return Err(invalid("lambda must be non-negative"));
    }
    let tol = Dyadic::from_f64(tolerance)
        .filter(|t| t.signum() > 0)
        .ok_or_else(|| invalid("tolerance must be positive and finite"))?;
    let value = bessel_g_interval(lambda, &tol, precision_for(tolerance));
    Ok(BoundValue {
        value,
        kind: BoundKind::BesselG,
    })
}

/// Certified verdicts for `pair < G(2n/3)` and `G(2n/3) < sqrt(3/(pi n))`.
///
/// `G` is enclosed with tail tolerance `min(tolerance, 2^-prec)` at each
/// escalation step.
pub fn certify_bessel_chain(
    pair: &BigRational,
    n: u32,
    tolerance: f64,
    max_precision_bits: u32,
) -> Result<(Verdict, Verdict)> {
    let rhs = bessel_chain_expr(n)?;
    let lambda = BigRational::new(BigInt::from(2 * n), BigInt::from(3));
    let tol_at = |prec: u32| -> Dyadic {
        let t = Dyadic::from_f64(tolerance).unwrap_or_else(|| Dyadic::one().mul_pow2(-40));
        t.min(Dyadic::one().mul_pow2(-i64::from(prec)))
    };
    let g_at = |prec: u32| bessel_g_interval(&lambda, &tol_at(prec), prec + 48);
    let left = certify_margin(max_precision_bits, |prec| {
        Ok(g_at(prec).sub(&Interval::from_rational(pair, prec + 48), prec + 48))
    })?;
    let right = certify_margin(max_precision_bits, |prec| {
        Ok(rhs.eval(prec)?.sub(&g_at(prec), prec + 48))
    })?;
    Ok((left, right))
}

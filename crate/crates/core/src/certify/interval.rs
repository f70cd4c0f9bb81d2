use std::collections::HashMap;
use std::fmt;
use std::sync::{Mutex, OnceLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::dyadic::{Dyadic, Round};
use crate::error::{Error, Result};

/// Closed interval `[lo, hi]` with dyadic endpoints.
///
/// Every arithmetic method takes a working precision in bits; results are
/// rounded outward so that they contain the exact result for every choice of
/// operands from the inputs.
#[derive(Clone, PartialEq, Eq)]
pub struct Interval {
    lo: Dyadic,
    hi: Dyadic,
}

impl Interval {
    pub fn new(lo: Dyadic, hi: Dyadic) -> Result<Self> {
        if lo > hi {
            return Err(Error::Domain(format!("empty interval [{lo:?}, {hi:?}]")));
        }
        Ok(Interval { lo, hi })
    }

    pub fn point(d: Dyadic) -> Self {
        Interval {
            lo: d.clone(),
            hi: d,
        }
    }

    pub fn from_int(v: i64) -> Self {
        Self::point(Dyadic::from_int(v))
    }

    /// Outward enclosure of a rational; exact when the denominator is a power of two.
    pub fn from_rational(r: &BigRational, prec: u32) -> Self {
        let lo = Dyadic::from_rational(r, prec, Round::Down);
        let hi = Dyadic::from_rational(r, prec, Round::Up);
        Interval { lo, hi }
    }

    pub fn lo(&self) -> &Dyadic {
        &self.lo
    }

    pub fn hi(&self) -> &Dyadic {
        &self.hi
    }

    pub fn width(&self) -> Dyadic {
        self.hi.sub(&self.lo)
    }

    pub fn mid_f64(&self) -> f64 {
        self.lo.add(&self.hi).mul_pow2(-1).to_f64()
    }

    pub fn contains_rational(&self, r: &BigRational) -> bool {
        self.lo.to_rational() <= *r && *r <= self.hi.to_rational()
    }

    pub fn contains_zero(&self) -> bool {
        self.lo.signum() <= 0 && self.hi.signum() >= 0
    }

    pub fn is_positive(&self) -> bool {
        self.lo.signum() > 0
    }

    pub fn is_negative(&self) -> bool {
        self.hi.signum() < 0
    }

    fn outward(lo: Dyadic, hi: Dyadic, prec: u32) -> Self {
        Interval {
            lo: lo.round(prec, Round::Down),
            hi: hi.round(prec, Round::Up),
        }
    }

    pub fn neg(&self) -> Self {
        Interval {
            lo: self.hi.neg(),
            hi: self.lo.neg(),
        }
    }

    pub fn add(&self, other: &Self, prec: u32) -> Self {
        Self::outward(self.lo.add(&other.lo), self.hi.add(&other.hi), prec)
    }

    pub fn sub(&self, other: &Self, prec: u32) -> Self {
        Self::outward(self.lo.sub(&other.hi), self.hi.sub(&other.lo), prec)
    }

    pub fn mul(&self, other: &Self, prec: u32) -> Self {
        let products = [
            self.lo.mul(&other.lo),
            self.lo.mul(&other.hi),
            self.hi.mul(&other.lo),
            self.hi.mul(&other.hi),
        ];
        let lo = products.iter().min().cloned().unwrap_or_else(Dyadic::zero);
        let hi = products.iter().max().cloned().unwrap_or_else(Dyadic::zero);
        Self::outward(lo, hi, prec)
    }

    /// Multiply by `2^k`; exact.
    pub fn mul_pow2(&self, k: i64) -> Self {
        Interval {
            lo: self.lo.mul_pow2(k),
            hi: self.hi.mul_pow2(k),
        }
    }

    pub fn div(&self, other: &Self, prec: u32) -> Result<Self> {
        if other.contains_zero() {
            return Err(Error::Domain(
                "division by an interval containing zero".into(),
            ));
        }
        let mut lo: Option<Dyadic> = None;
        let mut hi: Option<Dyadic> = None;
        for a in [&self.lo, &self.hi] {
            for b in [&other.lo, &other.hi] {
                let down = a.div(b, prec, Round::Down);
                let up = a.div(b, prec, Round::Up);
                if lo.as_ref().is_none_or(|l| down < *l) {
                    lo = Some(down);
                }
                if hi.as_ref().is_none_or(|h| up > *h) {
                    hi = Some(up);
                }
            }
        }
        Ok(Interval {
            lo: lo.expect("four quotients"),
            hi: hi.expect("four quotients"),
        })
    }

    /// Enclosure of `{sqrt(t) : t in self}`.
    pub fn sqrt(&self, prec: u32) -> Result<Self> {
        if self.lo.signum() < 0 {
            return Err(Error::Domain(
                "square root of an interval with negative lower endpoint".into(),
            ));
        }
        Ok(Interval {
            lo: self.lo.sqrt(prec, Round::Down),
            hi: self.hi.sqrt(prec, Round::Up),
        })
    }

    /// Smallest interval containing both.
    pub fn hull(&self, other: &Self) -> Self {
        Interval {
            lo: self.lo.clone().min(other.lo.clone()),
            hi: self.hi.clone().max(other.hi.clone()),
        }
    }

    /// Whether `self` lies inside `other`.
    pub fn is_subset_of(&self, other: &Self) -> bool {
        other.lo <= self.lo && self.hi <= other.hi
    }
}

impl fmt::Debug for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:?}, {:?}]", self.lo, self.hi)
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

/// Enclosure of `sqrt(x)`; see [`Interval::sqrt`].
pub fn sqrt_enclosure(x: &Interval, prec: u32) -> Result<Interval> {
    x.sqrt(prec)
}

/// `atan(1/x) * 2^bits` as a truncated fixed-point sum, with an absolute
/// error bound in units of `2^-bits`.
///
/// Each floor division loses less than one unit on the running power and
/// less than two on each term; the alternating tail after the last nonzero
/// power is below two units.
fn atan_recip_scaled(x: u64, bits: u64) -> (BigInt, u64) {
    let x2 = BigInt::from(x * x);
    let mut power = (BigInt::one() << bits) / BigInt::from(x);
    let mut sum = BigInt::zero();
    let mut k: u64 = 0;
    while !power.is_zero() {
        let term = &power / BigInt::from(2 * k + 1);
        if k.is_multiple_of(2) {
            sum += term;
        } else {
            sum -= term;
        }
        power /= &x2;
        k += 1;
    }
    (sum, 3 * k + 2)
}

fn compute_pi(prec: u32) -> Interval {
    let bits = u64::from(prec) + 40;
    let (a, ea) = atan_recip_scaled(5, bits);
    let (b, eb) = atan_recip_scaled(239, bits);
    // pi = 16 atan(1/5) - 4 atan(1/239)
    let center = a * 16 - b * 4;
    let err = BigInt::from(16 * ea + 4 * eb);
    let exp = -(bits as i64);
    Interval {
        lo: Dyadic::new(&center - &err, exp),
        hi: Dyadic::new(center + err, exp),
    }
}

static PI_CACHE: OnceLock<Mutex<HashMap<u32, Interval>>> = OnceLock::new();

/// Enclosure of pi with width at most `2^-prec`.
pub fn pi_enclosure(prec: u32) -> Interval {
    let prec = prec.max(8);
    let cache = PI_CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(hit) = cache.lock().expect("pi cache poisoned").get(&prec) {
        return hit.clone();
    }
    let value = compute_pi(prec);
    cache
        .lock()
        .expect("pi cache poisoned")
        .insert(prec, value.clone());
    value
}

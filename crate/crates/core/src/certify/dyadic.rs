//! Arbitrary-precision dyadic rationals `mantissa * 2^exponent`.
//!
//! Addition, subtraction and multiplication are exact. Division, square roots
//! and precision reduction take an explicit [`Round`] direction so that
//! interval endpoints can be rounded outward.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Rounding direction for inexact operations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Round {
    /// Toward negative infinity.
    Down,
    /// Toward positive infinity.
    Up,
}

/// A dyadic rational, kept normalized (odd mantissa, or zero with exponent 0).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Dyadic {
    mantissa: BigInt,
    exponent: i64,
}

fn pow2(bits: u64) -> BigInt {
    BigInt::one() << bits
}

/// `floor(m / 2^d)`
fn shr_floor(m: &BigInt, d: u64) -> BigInt {
    m.div_floor(&pow2(d))
}

/// `ceil(m / 2^d)`
fn shr_ceil(m: &BigInt, d: u64) -> BigInt {
    -((-m).div_floor(&pow2(d)))
}

fn div_rounded(num: &BigInt, den: &BigInt, round: Round) -> BigInt {
    match round {
        Round::Down => num.div_floor(den),
        Round::Up => -((-num).div_floor(den)),
    }
}

impl Dyadic {
    pub fn new(mantissa: BigInt, exponent: i64) -> Self {
        if mantissa.is_zero() {
            return Self::zero();
        }
        let tz = mantissa.trailing_zeros().unwrap_or(0);
        if tz == 0 {
            Dyadic { mantissa, exponent }
        } else {
            Dyadic {
                mantissa: mantissa >> tz,
                exponent: exponent + tz as i64,
            }
        }
    }

    pub fn zero() -> Self {
        Dyadic {
            mantissa: BigInt::zero(),
            exponent: 0,
        }
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    pub fn from_int(v: i64) -> Self {
        Self::new(BigInt::from(v), 0)
    }

    pub fn from_bigint(v: BigInt) -> Self {
        Self::new(v, 0)
    }

    pub fn mantissa(&self) -> &BigInt {
        &self.mantissa
    }

    pub fn exponent(&self) -> i64 {
        self.exponent
    }

    pub fn is_zero(&self) -> bool {
        self.mantissa.is_zero()
    }

    pub fn signum(&self) -> i32 {
        match self.mantissa.sign() {
            Sign::Minus => -1,
            Sign::NoSign => 0,
            Sign::Plus => 1,
        }
    }

    /// Number of significant bits of the mantissa.
    pub fn bits(&self) -> u64 {
        self.mantissa.bits()
    }

    /// Multiply by `2^k`; exact.
    pub fn mul_pow2(&self, k: i64) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        Dyadic {
            mantissa: self.mantissa.clone(),
            exponent: self.exponent + k,
        }
    }

    pub fn abs(&self) -> Self {
        Dyadic {
            mantissa: self.mantissa.abs(),
            exponent: self.exponent,
        }
    }

    fn align(&self, other: &Self) -> (BigInt, BigInt, i64) {
        let e = self.exponent.min(other.exponent);
        let a = &self.mantissa << (self.exponent - e) as u64;
        let b = &other.mantissa << (other.exponent - e) as u64;
        (a, b, e)
    }

    pub fn add(&self, other: &Self) -> Self {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        let (a, b, e) = self.align(other);
        Self::new(a + b, e)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        Dyadic {
            mantissa: -&self.mantissa,
            exponent: self.exponent,
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self::new(
            &self.mantissa * &other.mantissa,
            self.exponent + other.exponent,
        )
    }

    /// Round to at most `prec` significant bits in direction `round`.
    pub fn round(&self, prec: u32, round: Round) -> Self {
        let bits = self.bits();
        let prec = u64::from(prec.max(1));
        if bits <= prec {
            return self.clone();
        }
        let d = bits - prec;
        let m = match round {
            Round::Down => shr_floor(&self.mantissa, d),
            Round::Up => shr_ceil(&self.mantissa, d),
        };
        Self::new(m, self.exponent + d as i64)
    }

    /// `self / other` to about `prec` significant bits, rounded in direction `round`.
    ///
    /// Panics if `other` is zero; callers check for zero divisors.
    pub fn div(&self, other: &Self, prec: u32, round: Round) -> Self {
        assert!(!other.is_zero(), "dyadic division by zero");
        if self.is_zero() {
            return Self::zero();
        }
        let shift = (i64::from(prec) + other.bits() as i64 - self.bits() as i64 + 2).max(0);
        let num = &self.mantissa << shift as u64;
        let q = div_rounded(&num, &other.mantissa, round);
        Self::new(q, self.exponent - other.exponent - shift)
    }

    /// Square root to about `prec` significant bits. Requires `self >= 0`.
    pub fn sqrt(&self, prec: u32, round: Round) -> Self {
        assert!(self.signum() >= 0, "square root of a negative dyadic");
        if self.is_zero() {
            return Self::zero();
        }
        let want = 2 * u64::from(prec) + 2;
        let mut shift = want.saturating_sub(self.bits()) as i64;
        if (self.exponent - shift).rem_euclid(2) != 0 {
            shift += 1;
        }
        let m = &self.mantissa << shift as u64;
        let mut root = m.sqrt();
        if round == Round::Up && &root * &root != m {
            root += 1;
        }
        Self::new(root, (self.exponent - shift) / 2)
    }

    /// Nearest-or-directed dyadic approximation of a rational.
    pub fn from_rational(r: &BigRational, prec: u32, round: Round) -> Self {
        let num = Self::from_bigint(r.numer().clone());
        let den = Self::from_bigint(r.denom().clone());
        num.div(&den, prec, round)
    }

    /// Exact conversion of a finite float.
    pub fn from_f64(x: f64) -> Option<Self> {
        if !x.is_finite() {
            return None;
        }
        if x == 0.0 {
            return Some(Self::zero());
        }
        let bits = x.to_bits();
        let sign = if bits >> 63 == 1 { -1i64 } else { 1 };
        let raw_exp = ((bits >> 52) & 0x7ff) as i64;
        let frac = bits & ((1u64 << 52) - 1);
        let (mant, exp) = if raw_exp == 0 {
            (frac, -1074)
        } else {
            (frac | (1u64 << 52), raw_exp - 1075)
        };
        Some(Self::new(BigInt::from(mant) * sign, exp))
    }

    /// Exact conversion.
    pub fn to_rational(&self) -> BigRational {
        if self.exponent >= 0 {
            BigRational::from_integer(&self.mantissa << self.exponent as u64)
        } else {
            BigRational::new(self.mantissa.clone(), pow2((-self.exponent) as u64))
        }
    }

    /// Exact comparison against a rational.
    pub fn cmp_rational(&self, r: &BigRational) -> Ordering {
        self.to_rational().cmp(r)
    }

    pub fn to_f64(&self) -> f64 {
        let r = self.round(62, Round::Down);
        let m = r.mantissa.to_f64().unwrap_or(f64::NAN);
        ldexp(m, r.exponent)
    }
}

fn ldexp(mut x: f64, mut e: i64) -> f64 {
    while e > 1000 {
        x *= 2f64.powi(1000);
        e -= 1000;
        if x.is_infinite() {
            return x;
        }
    }
    while e < -1000 {
        x *= 2f64.powi(-1000);
        e += 1000;
        if x == 0.0 {
            return x;
        }
    }
    x * 2f64.powi(e as i32)
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        let (sa, sb) = (self.signum(), other.signum());
        if sa != sb {
            return sa.cmp(&sb);
        }
        if sa == 0 {
            return Ordering::Equal;
        }
        // Same nonzero sign: compare magnitudes by bit position first.
        let top_a = self.bits() as i64 + self.exponent;
        let top_b = other.bits() as i64 + other.exponent;
        if top_a != top_b {
            let mag = top_a.cmp(&top_b);
            return if sa > 0 { mag } else { mag.reverse() };
        }
        let (a, b, _) = self.align(other);
        a.cmp(&b)
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}*2^{}", self.mantissa, self.exponent)
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_f64())
    }
}

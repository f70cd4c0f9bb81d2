//! Exact convolution powers of the discrete uniform distribution on
//! `{0, ..., ell-1}`.
//!
//! Densities are stored as unreduced integer numerators over the implicit
//! common denominator `ell^n`, so normalization can be checked exactly.

use std::collections::BTreeSet;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{invalid, Result};

/// Support size `ell` of the base uniform and convolution power `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct LatticeParams {
    ell: u32,
    n: u32,
}

impl LatticeParams {
    pub fn new(ell: u32, n: u32) -> Result<Self> {
        if ell == 0 {
            return Err(invalid("ell must be at least 1"));
        }
        if n == 0 {
            return Err(invalid("n must be at least 1"));
        }
        Ok(LatticeParams { ell, n })
    }

    pub fn ell(&self) -> u32 {
        self.ell
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    /// Largest support point `n(ell-1)`.
    pub fn top(&self) -> u64 {
        u64::from(self.n) * u64::from(self.ell - 1)
    }

    pub fn support_len(&self) -> usize {
        self.top() as usize + 1
    }

    /// `ell^n`
    pub fn denominator(&self) -> BigUint {
        BigUint::from(self.ell).pow(self.n)
    }

    /// The one or two central points `floor(top/2)`, `ceil(top/2)`.
    pub fn central_points(&self) -> BTreeSet<u64> {
        let top = self.top();
        [top / 2, top.div_ceil(2)].into_iter().collect()
    }
}

/// Density of `U_ell^{*n}` as numerators over `ell^n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactDensity {
    params: LatticeParams,
    numerators: Vec<BigUint>,
}

impl ExactDensity {
    /// Point mass at zero, the identity for [`convolve`]; its power is `n = 0`.
    pub fn point_mass(ell: u32) -> Result<Self> {
        if ell == 0 {
            return Err(invalid("ell must be at least 1"));
        }
        Ok(ExactDensity {
            params: LatticeParams { ell, n: 0 },
            numerators: vec![BigUint::one()],
        })
    }

    pub fn params(&self) -> LatticeParams {
        self.params
    }

    pub fn numerators(&self) -> &[BigUint] {
        &self.numerators
    }

    /// Exponent of the implicit denominator `ell^n`.
    pub fn denominator_exponent(&self) -> u32 {
        self.params.n
    }

    pub fn denominator(&self) -> BigUint {
        self.params.denominator()
    }

    /// `u(k)` as a reduced rational; zero outside the support.
    pub fn pmf(&self, k: i64) -> BigRational {
        if k < 0 || k as u64 >= self.numerators.len() as u64 {
            return BigRational::zero();
        }
        BigRational::new(
            BigInt::from(self.numerators[k as usize].clone()),
            BigInt::from(self.denominator()),
        )
    }

    pub fn max_numerator(&self) -> &BigUint {
        self.numerators
            .iter()
            .max()
            .expect("support is never empty")
    }

    pub fn max_probability(&self) -> BigRational {
        BigRational::new(
            BigInt::from(self.max_numerator().clone()),
            BigInt::from(self.denominator()),
        )
    }

    /// Checks normalization and symmetry; used by tests.
    pub fn invariants_hold(&self) -> bool {
        let total: BigUint = self.numerators.iter().sum();
        let len = self.numerators.len();
        total == self.denominator()
            && len as u64 == u64::from(self.params.n) * u64::from(self.params.ell - 1) + 1
            && (0..len / 2).all(|k| self.numerators[k] == self.numerators[len - 1 - k])
    }
}

/// The uniform density on `{0, ..., ell-1}`.
pub fn uniform_density(ell: u32) -> Result<ExactDensity> {
    let params = LatticeParams::new(ell, 1)?;
    Ok(ExactDensity {
        params,
        numerators: vec![BigUint::one(); ell as usize],
    })
}

/// Exact convolution of two powers of the same uniform.
///
/// Both inputs are symmetric, so only the lower half of the Cauchy product is
/// computed and the rest is mirrored.
pub fn convolve(a: &ExactDensity, b: &ExactDensity) -> Result<ExactDensity> {
    if a.params.ell != b.params.ell {
        return Err(invalid(format!(
            "cannot convolve densities with ell = {} and ell = {}",
            a.params.ell, b.params.ell
        )));
    }
    let (xa, xb) = (&a.numerators, &b.numerators);
    let len = xa.len() + xb.len() - 1;
    let half = (len - 1) / 2;
    let mut out: Vec<BigUint> = Vec::with_capacity(len);
    for k in 0..=half {
        let lo = k.saturating_sub(xb.len() - 1);
        let hi = k.min(xa.len() - 1);
        let mut acc = BigUint::zero();
        for i in lo..=hi {
            acc += &xa[i] * &xb[k - i];
        }
        out.push(acc);
    }
    for k in half + 1..len {
        out.push(out[len - 1 - k].clone());
    }
    Ok(ExactDensity {
        params: LatticeParams {
            ell: a.params.ell,
            n: a.params.n + b.params.n,
        },
        numerators: out,
    })
}

/// `U_ell^{*n}` by repeated squaring.
pub fn power(params: LatticeParams) -> ExactDensity {
    let mut base = uniform_density(params.ell).expect("validated params");
    let mut acc: Option<ExactDensity> = None;
    let mut n = params.n;
    loop {
        if n & 1 == 1 {
            acc = Some(match acc {
                None => base.clone(),
                Some(d) => convolve(&d, &base).expect("same ell"),
            });
        }
        n >>= 1;
        if n == 0 {
            break;
        }
        base = convolve(&base, &base).expect("same ell");
    }
    acc.expect("n >= 1")
}

/// `C(n, k)` for machine-sized arguments.
pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

/// Numerator of `u(k)` over `ell^n` from the alternating binomial sum,
/// as a signed integer (the sum is exact, so the result is never negative).
fn de_moivre_numerator(params: LatticeParams, k: u64) -> BigInt {
    let ell = u64::from(params.ell);
    let n = u64::from(params.n);
    let r = n - 1;
    let j_max = (k / ell).min(n);

    // Running values C(n, j) and C(top, r) with top = n + k - ell*j - 1.
    let mut outer = BigInt::one();
    let mut top = n + k - 1;
    let mut inner = BigInt::from(binomial(top, r));
    let mut sum = BigInt::zero();
    for j in 0..=j_max {
        if j % 2 == 0 {
            sum += &outer * &inner;
        } else {
            sum -= &outer * &inner;
        }
        if j == j_max {
            break;
        }
        outer = outer * (n - j) / (j + 1);
        // C(t-1, r) = C(t, r) * (t - r) / t
        for _ in 0..ell {
            inner = inner * (top - r) / top;
            top -= 1;
        }
    }
    sum
}

/// `u_ell^{*n}(k)` from the alternating binomial sum; zero for `k < 0`.
///
/// For `k > n(ell-1)` the sum is evaluated anyway and cancels to zero.
pub fn de_moivre_pmf(params: LatticeParams, k: i64) -> BigRational {
    if k < 0 {
        return BigRational::zero();
    }
    let num = de_moivre_numerator(params, k as u64);
    BigRational::new(num, BigInt::from(params.denominator()))
}

/// `c_{ell,n}`, the maximal point probability of `U_ell^{*n}`, evaluated at
/// the central point `floor(n(ell-1)/2)`.
pub fn concentration(params: LatticeParams) -> BigRational {
    de_moivre_pmf(params, (params.top() / 2) as i64)
}

/// All maximizers of the density.
pub fn argmax_set(d: &ExactDensity) -> BTreeSet<u64> {
    let max = d.max_numerator();
    d.numerators
        .iter()
        .enumerate()
        .filter(|(_, v)| *v == max)
        .map(|(k, _)| k as u64)
        .collect()
}

/// Exact mean and variance.
pub fn moments(d: &ExactDensity) -> (BigRational, BigRational) {
    let mut first = BigInt::zero();
    let mut second = BigInt::zero();
    for (k, v) in d.numerators.iter().enumerate() {
        let v = BigInt::from(v.clone());
        let k = BigInt::from(k);
        first += &k * &v;
        second += &k * &k * v;
    }
    let den = BigInt::from(d.denominator());
    let mean = BigRational::new(first, den.clone());
    let second = BigRational::new(second, den);
    let variance = second - &mean * &mean;
    (mean, variance)
}

/// `max_k u(k) + u(k+1)`.
pub fn pair_concentration(params: LatticeParams) -> BigRational {
    let d = power(params);
    let xs = d.numerators();
    let best = if xs.len() == 1 {
        xs[0].clone()
    } else {
        xs.windows(2)
            .map(|w| &w[0] + &w[1])
            .max()
            .expect("at least one window")
    };
    let den = BigInt::from(d.denominator());
    BigRational::new(BigInt::from(best), den)
}

//! Finite-n checks of the local central limit behaviour that makes the main
//! bound asymptotically sharp.

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::certify::{Dyadic, Expr, Interval, Round};
use crate::error::{invalid, Result};
use crate::exactdist::{concentration, power, LatticeParams};

#[derive(Debug, Clone, PartialEq)]
pub struct CltReport {
    pub ell: u32,
    pub n: u32,
    /// `sqrt(n) c_{ell,n} / sqrt(6 / (pi (ell^2 - 1)))`
    pub ratio: f64,
    /// `sup_k |sqrt(n) u(k) - phi((k - n mu) / (sigma sqrt(n))) / sigma|`
    pub sup_deviation: f64,
}

fn params(ell: u32, n: u32) -> Result<LatticeParams> {
    if ell < 2 {
        return Err(invalid(format!("ell must be at least 2, got {ell}")));
    }
    LatticeParams::new(ell, n)
}

/// Enclosure of `c_{ell,n} * sqrt(pi (ell^2 - 1) n / 6)` from the exact concentration.
pub fn clt_ratio_enclosure(ell: u32, n: u32, precision_bits: u32) -> Result<Interval> {
    let p = params(ell, n)?;
    let c = concentration(p);
    let l = i64::from(ell);
    let scale =
        Expr::sqrt(Expr::pi() * Expr::int(l * l - 1) * Expr::int(i64::from(n)) / Expr::int(6));
    (Expr::rational(c) * scale).eval(precision_bits)
}

/// `sqrt(n) c_{ell,n} sqrt(pi (ell^2 - 1) / 6)`; tends to 1 as `n` grows.
pub fn clt_ratio(ell: u32, n: u32) -> Result<f64> {
    Ok(clt_ratio_enclosure(ell, n, 128)?.mid_f64())
}

fn to_f64(r: &BigRational) -> f64 {
    Dyadic::from_rational(r, 64, Round::Down).to_f64()
}

/// Largest deviation between the rescaled density and the normal density,
/// scanned over `k` in `[-n(ell-1), 2 n (ell-1)]`.
pub fn local_clt_sup_dev(ell: u32, n: u32) -> Result<f64> {
    let p = params(ell, n)?;
    let density = power(p);
    let den = BigInt::from(density.denominator());
    let l = f64::from(ell);
    let nf = f64::from(n);
    let mu = (l - 1.0) / 2.0;
    let sigma = ((l * l - 1.0) / 12.0).sqrt();
    let root_n = nf.sqrt();
    let norm = 1.0 / (2.0 * std::f64::consts::PI).sqrt();

    let top = p.top() as i64;
    let mut sup = 0.0f64;
    for k in -top..=2 * top {
        let u = if (0..=top).contains(&k) {
            let num = BigInt::from(density.numerators()[k as usize].clone());
            to_f64(&BigRational::new(num, den.clone()))
        } else {
            0.0
        };
        let z = (k as f64 - nf * mu) / (sigma * root_n);
        let gauss = norm * (-0.5 * z * z).exp() / sigma;
        sup = sup.max((root_n * u - gauss).abs());
    }
    Ok(sup)
}

pub fn clt_report(ell: u32, n: u32) -> Result<CltReport> {
    Ok(CltReport {
        ell,
        n,
        ratio: clt_ratio(ell, n)?,
        sup_deviation: local_clt_sup_dev(ell, n)?,
    })
}

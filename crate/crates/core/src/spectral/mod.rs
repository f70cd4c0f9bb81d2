//! Fourier-inversion view of `U_ell^{*n}`.
//!
//! The characteristic function of `U_ell` is a Dirichlet-type ratio, and
//! after symmetrization
//!
//! ```text
//! u(k) = (2/pi) * int_0^{pi/2} (sin(ell t) / (ell sin t))^n cos((n(ell-1) - 2k) t) dt.
//! ```
//!
//! Everything here is floating point with heuristic error estimates. It
//! serves as an independent numerical oracle for the exact densities and as
//! a diagnostic for the split of the concentration integral at `t = pi/ell`.

mod quadrature;

pub use quadrature::{integrate, QuadratureResult};

use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{invalid, Error, Result};

/// Below this value of `ell * t` the kernel is evaluated from its series.
const SERIES_CROSSOVER: f64 = 1e-3;

/// Panels per period of the fastest oscillation in the integrand.
const PANELS_PER_PERIOD: f64 = 8.0;

fn kernel(ell: f64, t: f64) -> f64 {
    if ell * t < SERIES_CROSSOVER {
        // log of the ratio is -(ell^2-1) t^2/6 - (ell^4-1) t^4/180 - O((ell t)^6)
        let t2 = t * t;
        let l2 = ell * ell;
        (-(l2 - 1.0) * t2 / 6.0 - (l2 * l2 - 1.0) * t2 * t2 / 180.0).exp()
    } else {
        (ell * t).sin() / (ell * t.sin())
    }
}

/// `sin(ell t) / (ell sin t)` on `[0, pi/2]`, equal to 1 at `t = 0`.
pub fn charfn_kernel(ell: u32, t: f64) -> Result<f64> {
    if ell < 1 {
        return Err(invalid("ell must be at least 1"));
    }
    if !(0.0..=FRAC_PI_2).contains(&t) {
        return Err(Error::Domain(format!("t = {t} outside [0, pi/2]")));
    }
    Ok(kernel(f64::from(ell), t))
}

fn panels_for(max_frequency: f64, length: f64) -> usize {
    let periods = max_frequency * length / (2.0 * PI);
    (PANELS_PER_PERIOD * periods).ceil().max(1.0) as usize
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

fn check_tol(tol: f64) -> Result<()> {
    if tol > 0.0 && tol.is_finite() {
        Ok(())
    } else {
        Err(invalid("tolerance must be positive"))
    }
}

/// `(2/pi) int_a^b K(t)^n cos(freq t) dt`
fn inversion_integral(
    ell: u32,
    n: u32,
    freq: f64,
    a: f64,
    b: f64,
    tol: f64,
) -> Result<QuadratureResult> {
    let l = f64::from(ell);
    let n_i = n as i32;
    let highest = f64::from(n) * (l - 1.0) + freq.abs();
    let panels = panels_for(highest, b - a);
    let scale = 2.0 / PI;
    let mut r = integrate(
        |t| kernel(l, t).powi(n_i) * (freq * t).cos(),
        a,
        b,
        panels,
        tol / scale,
    )?;
    r.value *= scale;
    r.error_estimate *= scale;
    Ok(r)
}

/// `u_ell^{*n}(k)` by numerical Fourier inversion.
pub fn fourier_pmf(ell: u32, n: u32, k: i64, tol: f64) -> Result<QuadratureResult> {
    check_ell_n(ell, n)?;
    check_tol(tol)?;
    let freq = (i64::from(n) * i64::from(ell - 1) - 2 * k) as f64;
    inversion_integral(ell, n, freq, 0.0, FRAC_PI_2, tol)
}

/// `ell`, `n` and the parity `alpha = n(ell-1) mod 2` of the centered
/// concentration integral.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SplitParams {
    ell: u32,
    n: u32,
    alpha: u32,
}

impl SplitParams {
    pub fn new(ell: u32, n: u32) -> Result<Self> {
        check_ell_n(ell, n)?;
        let top = u64::from(n) * u64::from(ell - 1);
        Ok(SplitParams {
            ell,
            n,
            alpha: (top - 2 * (top / 2)) as u32,
        })
    }

    pub fn ell(&self) -> u32 {
        self.ell
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn alpha(&self) -> u32 {
        self.alpha
    }
}

/// The concentration integral split at `pi/ell` into `(I1, I2)`, over
/// `[0, pi/ell]` and `[pi/ell, pi/2]`.
pub fn split_integrals(
    params: SplitParams,
    tol: f64,
) -> Result<(QuadratureResult, QuadratureResult)> {
    check_tol(tol)?;
    let cut = PI / f64::from(params.ell);
    let alpha = f64::from(params.alpha);
    let half = tol / 2.0;
    let i1 = inversion_integral(params.ell, params.n, alpha, 0.0, cut, half)?;
    let i2 = if cut >= FRAC_PI_2 {
        QuadratureResult::zero()
    } else {
        inversion_integral(params.ell, params.n, alpha, cut, FRAC_PI_2, half)?
    };
    Ok((i1, i2))
}

/// Upper bound `1 - 3/(20n) + 21/(160 n^2)` for `sqrt(pi (ell^2-1) n / 6) * I1`.
pub fn i1_majorant(ell: u32, n: u32) -> Result<f64> {
    check_ell_n(ell, n)?;
    let n = f64::from(n);
    Ok(1.0 - 3.0 / (20.0 * n) + 21.0 / (160.0 * n * n))
}

/// Upper bound for `I2`: zero for odd `n`, and
/// `sqrt(2/(pi n)) / (ell (n-1) 2^(n-1))` for even `n`.
pub fn i2_majorant(ell: u32, n: u32) -> Result<f64> {
    check_ell_n(ell, n)?;
    if n % 2 == 1 {
        return Ok(0.0);
    }
    let nf = f64::from(n);
    let denom = f64::from(ell) * (nf - 1.0) * 2f64.powi(n as i32 - 1);
    Ok((2.0 / (PI * nf)).sqrt() / denom)
}

/// `int_0^{pi/2} sin(t)^lambda dt`
pub fn wallis_integral(lambda: f64, tol: f64) -> Result<QuadratureResult> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(invalid("lambda must be positive"));
    }
    check_tol(tol)?;
    integrate(|t| t.sin().powf(lambda), 0.0, FRAC_PI_2, 4, tol)
}

/// Numerically checks `int f g <= (1/(2a)) int f * int g` over `[-a, a]`
/// within `tol`.
///
/// Meant for `f` even and decreasing on `[0, a]` and `g` convex; the caller
/// is responsible for those hypotheses.
pub fn chebyshev_lemma_check<F, G>(f: F, g: G, a: f64, tol: f64) -> bool
where
    F: Fn(f64) -> f64,
    G: Fn(f64) -> f64,
{
    if !(a > 0.0 && a.is_finite()) {
        return false;
    }
    let qtol = tol * 1e-3;
    let value = |r: Result<QuadratureResult>| match r {
        Ok(q) => q.value,
        Err(Error::Convergence { best_estimate, .. }) => best_estimate,
        Err(_) => f64::NAN,
    };
    let fg = value(integrate(|x| f(x) * g(x), -a, a, 8, qtol));
    let int_f = value(integrate(&f, -a, a, 8, qtol));
    let int_g = value(integrate(&g, -a, a, 8, qtol));
    fg <= int_f * int_g / (2.0 * a) + tol
}

//! Composite Gauss-Legendre quadrature with adaptive dyadic panel splitting.

use std::sync::OnceLock;

use crate::error::{Error, Result};

/// Nodes per panel.
pub const ORDER: usize = 20;

const MAX_DEPTH: u32 = 120;
const MAX_PANELS: usize = 1 << 22;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureResult {
    pub value: f64,
    /// Sum over accepted panels of |one-panel rule - two-half-panel rule|.
    /// Heuristic; the returned value is the finer of the two and usually far
    /// more accurate.
    pub error_estimate: f64,
    /// Number of accepted panels.
    pub subdivisions: usize,
}

impl QuadratureResult {
    pub fn zero() -> Self {
        QuadratureResult {
            value: 0.0,
            error_estimate: 0.0,
            subdivisions: 0,
        }
    }
}

/// Legendre nodes on [-1, 1] and their weights, by Newton iteration on P_ORDER.
fn rule() -> &'static [(f64, f64); ORDER] {
    static RULE: OnceLock<[(f64, f64); ORDER]> = OnceLock::new();
    RULE.get_or_init(|| {
        let n = ORDER;
        let mut out = [(0.0, 0.0); ORDER];
        for i in 0..n.div_ceil(2) {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                // three-term recurrence for P_n(x) and P_{n-1}(x)
                let (mut p0, mut p1) = (1.0f64, x);
                for k in 2..=n {
                    let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            out[i] = (-x, w);
            out[n - 1 - i] = (x, w);
        }
        out
    })
}

fn panel<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> f64 {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    rule()
        .iter()
        .map(|&(x, w)| w * f(mid + half * x))
        .sum::<f64>()
        * half
}

/// Integrate `f` over `[a, b]`, starting from `initial_panels` equal panels.
///
/// A panel is accepted when the one-panel rule and the sum over its two
/// halves agree within `tol * width / (b - a)`; otherwise both halves are
/// refined. Panels are processed left to right so results are reproducible.
pub fn integrate<F>(
    f: F,
    a: f64,
    b: f64,
    initial_panels: usize,
    tol: f64,
) -> Result<QuadratureResult>
where
    F: Fn(f64) -> f64,
{
    if a == b {
        return Ok(QuadratureResult::zero());
    }
    let length = b - a;
    let initial_panels = initial_panels.max(1);
    let h = length / initial_panels as f64;

    let mut value = 0.0;
    let mut error_estimate = 0.0;
    let mut subdivisions = 0usize;
    let mut failed = false;

    for i in 0..initial_panels {
        let lo = a + h * i as f64;
        let hi = if i + 1 == initial_panels {
            b
        } else {
            a + h * (i + 1) as f64
        };
        // (left, right, one-panel estimate, depth); stack pops leftmost first
        let mut stack = vec![(lo, hi, panel(&f, lo, hi), 0u32)];
        while let Some((l, r, coarse, depth)) = stack.pop() {
            let m = 0.5 * (l + r);
            let left = panel(&f, l, m);
            let right = panel(&f, m, r);
            let fine = left + right;
            let diff = (coarse - fine).abs();
            let allowed = tol * (r - l) / length;
            if diff <= allowed || depth >= MAX_DEPTH || subdivisions + stack.len() >= MAX_PANELS {
                if diff > allowed {
                    failed = true;
                }
                value += fine;
                error_estimate += diff;
                subdivisions += 1;
            } else {
                stack.push((m, r, right, depth + 1));
                stack.push((l, m, left, depth + 1));
            }
        }
    }

    if failed || !value.is_finite() {
        return Err(Error::Convergence {
            best_estimate: value,
            error_estimate,
        });
    }
    Ok(QuadratureResult {
        value,
        error_estimate,
        subdivisions,
    })
}

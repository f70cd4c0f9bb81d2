//! Acceptance criteria, one printed PASS/FAIL line each.
//!
//! Runs without the libtest harness so the lines are always shown. The
//! process fails if any criterion outside `KNOWN_UNATTAINABLE` fails, or if a
//! criterion listed there starts passing.

use std::collections::BTreeSet;
use std::time::Instant;

use num_bigint::BigInt;
use num_rational::BigRational;

use uniconc::asymptotics::{clt_ratio, local_clt_sup_dev};
use uniconc::bounds::{
    bessel_g, central_binomial_probability, certify_bessel_chain, corollary_bound_expr, d_sequence,
    d_sequence_expr, wallis_bound_expr,
};
use uniconc::certify::{certify_expr_less, certify_less, Expr, Outcome};
use uniconc::exactdist::{
    argmax_set, concentration, de_moivre_pmf, moments, pair_concentration, power, LatticeParams,
};
use uniconc::spectral::{fourier_pmf, split_integrals, SplitParams};
use uniconc::sweep::{parse_checks, render, run_sweep, Check, SweepConfig};

/// The stated relation c_{ell,n} <= (2/ell) c_{2,n} is false at six cells of
/// the grid (all odd n); see the Bretagnolle section of the README.
const KNOWN_UNATTAINABLE: [u32; 1] = [9];

const PREC: u32 = 256;

type Criterion = fn() -> (bool, String);

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn p(ell: u32, n: u32) -> LatticeParams {
    LatticeParams::new(ell, n).unwrap()
}

fn to_f64(r: &BigRational) -> f64 {
    uniconc::certify::Dyadic::from_rational(r, 80, uniconc::certify::Round::Down).to_f64()
}

fn workers() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

fn main_sweep(parallelism: usize) -> uniconc::sweep::SweepReport {
    let cfg = SweepConfig {
        ell_range: "2:40".parse().unwrap(),
        n_range: "1:400".parse().unwrap(),
        checks: [Check::Main].into_iter().collect(),
        precision_bits: PREC,
        parallelism,
        ..SweepConfig::default()
    };
    run_sweep(&cfg).unwrap()
}

fn criterion_1() -> (bool, String) {
    let t = Instant::now();
    let report = main_sweep(workers());
    let elapsed = t.elapsed().as_secs_f64();
    let mut wrong = Vec::new();
    for c in &report.cells {
        let want = if c.n == 2 && c.ell >= 5 {
            Outcome::Fails
        } else {
            Outcome::Holds
        };
        if c.verdict != want {
            wrong.push((c.ell, c.n, c.verdict));
        }
    }
    let ok = wrong.is_empty() && report.summary.inconclusive == 0 && elapsed < 300.0;
    (
        ok,
        format!(
            "{} cells, {} reversed at n=2, {} inconclusive, {} wrong, {elapsed:.1}s",
            report.summary.cells,
            report.summary.fails,
            report.summary.inconclusive,
            wrong.len()
        ),
    )
}

fn criterion_2() -> (bool, String) {
    let mut checks = 0usize;
    let mut bad = 0usize;
    for ell in 2..=8 {
        for n in 1..=12 {
            let params = p(ell, n);
            let d = power(params);
            for k in 0..=params.top() as i64 {
                checks += 1;
                if de_moivre_pmf(params, k) != d.pmf(k) {
                    bad += 1;
                }
            }
        }
    }
    (bad == 0, format!("{checks} point checks, {bad} unequal"))
}

fn criterion_3() -> (bool, String) {
    let bad: Vec<u32> = (2..=100)
        .filter(|&ell| {
            let want = q(1, i64::from(ell));
            concentration(p(ell, 1)) != want || concentration(p(ell, 2)) != want
        })
        .collect();
    (bad.is_empty(), format!("ell 2..100, failures {bad:?}"))
}

fn criterion_4() -> (bool, String) {
    let mut bad = Vec::new();
    for ell in 2..=8 {
        for n in 1..=12 {
            let params = p(ell, n);
            let set = argmax_set(&power(params));
            let central = params.central_points();
            let ok = if n == 1 {
                central.is_subset(&set)
            } else {
                set == central
            };
            if !ok {
                bad.push((ell, n));
            }
        }
    }
    (
        bad.is_empty(),
        format!("ell 2..8, n 1..12, failures {bad:?}"),
    )
}

fn criterion_5() -> (bool, String) {
    let mut not_holds = Vec::new();
    for k in 1..=2000 {
        let v = certify_less(
            &central_binomial_probability(k),
            &wallis_bound_expr(k).unwrap(),
            4096,
        )
        .unwrap();
        if v.outcome != Outcome::Holds {
            not_holds.push(k);
        }
    }
    let mut unequal = Vec::new();
    for k in 1..=50 {
        let b = central_binomial_probability(k);
        if concentration(p(2, 2 * k - 1)) != b || concentration(p(2, 2 * k)) != b {
            unequal.push(k);
        }
    }
    (
        not_holds.is_empty() && unequal.is_empty(),
        format!(
            "wallis k 1..2000 not certified {not_holds:?}; identity k 1..50 failures {unequal:?}"
        ),
    )
}

fn criterion_6() -> (bool, String) {
    let mut bad = Vec::new();
    for n in 1..=200 {
        let (left, right) =
            certify_bessel_chain(&pair_concentration(p(3, n)), n, 1e-12, 4096).unwrap();
        if left.outcome != Outcome::Holds || right.outcome != Outcome::Holds {
            bad.push(n);
        }
    }
    let g = bessel_g(&q(4, 3), 1e-12).unwrap().value;
    let spot = (g.mid_f64() - 0.612_214_668_849_917_6).abs() < 1e-12;
    let pair = pair_concentration(p(3, 2));
    let ok = bad.is_empty() && spot && pair == q(5, 9) && g.lo().cmp_rational(&pair).is_gt();
    (
        ok,
        format!(
            "n 1..200 failures {bad:?}; G(4/3) = {:.16} vs 5/9",
            g.mid_f64()
        ),
    )
}

fn criterion_7() -> (bool, String) {
    let tol = 1e-12;
    let mut worst_point = 0.0f64;
    let mut worst_split = 0.0f64;
    let mut worst_i2_odd = f64::NEG_INFINITY;
    for ell in [2u32, 3, 5, 10] {
        for n in 1..=20 {
            let params = p(ell, n);
            let d = power(params);
            for k in 0..=params.top() as i64 {
                let f = fourier_pmf(ell, n, k, tol).unwrap().value;
                worst_point = worst_point.max((f - to_f64(&d.pmf(k))).abs());
            }
            let (i1, i2) = split_integrals(SplitParams::new(ell, n).unwrap(), tol).unwrap();
            let c = to_f64(&concentration(params));
            worst_split = worst_split.max((i1.value + i2.value - c).abs());
            if n % 2 == 1 {
                worst_i2_odd = worst_i2_odd.max(i2.value);
            }
        }
    }
    let ok = worst_point <= 1e-10 && worst_split <= 1e-10 && worst_i2_odd <= 1e-10;
    (
        ok,
        format!("max pmf error {worst_point:.2e}, max |I1+I2-c| {worst_split:.2e}, max odd-n I2 {worst_i2_odd:.2e}"),
    )
}

fn criterion_8() -> (bool, String) {
    let one = Expr::int(1);
    let d2 = certify_expr_less(&one, &d_sequence_expr(2).unwrap(), 4096).unwrap();
    let mut not_below = Vec::new();
    for n in std::iter::once(1).chain(3..=10_000) {
        let v = certify_expr_less(&d_sequence_expr(n).unwrap(), &one, 4096).unwrap();
        if v.outcome != Outcome::Holds {
            not_below.push(n);
        }
    }
    let mut worst = f64::NEG_INFINITY;
    for n in 1..=200 {
        let dn = d_sequence(n, 128).unwrap().value.mid_f64();
        for ell in 2..=10 {
            worst = worst.max(clt_ratio(ell, n).unwrap() - dn);
        }
    }
    let ok = d2.outcome == Outcome::Holds && not_below.is_empty() && worst <= 1e-9;
    (
        ok,
        format!(
            "d_2 > 1 {}, d_n < 1 failures {not_below:?}, max ratio - d_n {worst:.3e}",
            d2.outcome.as_str()
        ),
    )
}

fn criterion_9() -> (bool, String) {
    let mut violations = Vec::new();
    let mut corollary_bad = Vec::new();
    for n in 1..=60 {
        let c2 = concentration(p(2, n));
        for ell in 2..=12 {
            let c = concentration(p(ell, n));
            if c > q(2, i64::from(ell)) * &c2 {
                violations.push((ell, n));
            }
            let v = certify_less(&c, &corollary_bound_expr(ell, n).unwrap(), 4096).unwrap();
            if v.outcome != Outcome::Holds {
                corollary_bad.push((ell, n));
            }
        }
    }
    (
        violations.is_empty() && corollary_bad.is_empty(),
        format!(
            "relation violated at {violations:?}; corollary not certified at {corollary_bad:?}"
        ),
    )
}

fn criterion_10() -> (bool, String) {
    let ratios: Vec<f64> = (2..=5).map(|ell| clt_ratio(ell, 1000).unwrap()).collect();
    let devs: Vec<f64> = [25, 100, 400]
        .iter()
        .map(|&n| local_clt_sup_dev(2, n).unwrap())
        .collect();
    let ok = ratios.iter().all(|&r| r > 0.999 && r < 1.0)
        && devs[0] > devs[1]
        && devs[1] > devs[2]
        && devs[2] < 0.005;
    (
        ok,
        format!("ratios at n=1000 {ratios:?}; sup deviations {devs:?}"),
    )
}

fn criterion_11() -> (bool, String) {
    let mut bad = Vec::new();
    for ell in 2..=10i64 {
        for n in 1..=20i64 {
            let (mean, var) = moments(&power(p(ell as u32, n as u32)));
            if mean != q(n * (ell - 1), 2) || var != q(n * (ell * ell - 1), 12) {
                bad.push((ell, n));
            }
        }
    }
    (
        bad.is_empty(),
        format!("ell 2..10, n 1..20, failures {bad:?}"),
    )
}

fn criterion_12() -> (bool, String) {
    let main_same = render(&main_sweep(1)) == render(&main_sweep(8));
    let cfg = |parallelism| SweepConfig {
        checks: parse_checks("all").unwrap(),
        parallelism,
        ..SweepConfig::default()
    };
    let all_1 = render(&run_sweep(&cfg(1)).unwrap());
    let all_8 = render(&run_sweep(&cfg(8)).unwrap());
    let ok = main_same && all_1 == all_8;
    (
        ok,
        format!(
            "main sweep identical {main_same}; all-checks sweep ({} bytes) identical {}",
            all_1.len(),
            all_1 == all_8
        ),
    )
}

fn main() {
    let criteria: [(u32, &str, Criterion); 12] = [
        (1, "theorem sweep", criterion_1),
        (2, "oracle equivalence", criterion_2),
        (3, "concentration at n = 1, 2", criterion_3),
        (4, "central argmax", criterion_4),
        (5, "wallis", criterion_5),
        (6, "bessel chain", criterion_6),
        (7, "fourier oracle", criterion_7),
        (8, "d_n chain", criterion_8),
        (9, "bretagnolle relation", criterion_9),
        (10, "asymptotic sharpness", criterion_10),
        (11, "moments", criterion_11),
        (12, "determinism", criterion_12),
    ];
    let known: BTreeSet<u32> = KNOWN_UNATTAINABLE.into_iter().collect();
    let mut unexpected = Vec::new();
    let mut passed = 0;
    for (id, name, run) in criteria {
        let t = Instant::now();
        let (ok, detail) = run();
        let status = if ok { "PASS" } else { "FAIL" };
        println!(
            "criterion {id:>2} {status} {name}: {detail} [{:.1}s]",
            t.elapsed().as_secs_f64()
        );
        if ok {
            passed += 1;
        }
        if ok == known.contains(&id) {
            unexpected.push(id);
        }
    }
    println!("acceptance: {passed}/12 passed; known unattainable {KNOWN_UNATTAINABLE:?}");
    if !unexpected.is_empty() {
        println!("unexpected outcome for criteria {unexpected:?}");
        std::process::exit(1);
    }
}

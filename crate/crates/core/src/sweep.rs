//! Grid sweeps of the certified checks and their CSV/JSON reports.
//!
//! Each `(check, ell, n)` cell is an independent work item. Cells are
//! evaluated on a bounded worker pool and always reported sorted by
//! `(check, ell, n)`, so the report bytes do not depend on the pool size.

use std::collections::BTreeSet;
use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{
    bessel_g, central_binomial_probability, certify_bessel_chain, corollary_bound_expr,
    d_sequence_expr, main_bound_expr, wallis_bound_expr,
};
use crate::certify::{
    certify_expr_less, certify_less, decimal_string, DecimalRound, Expr, Interval, Outcome, Verdict,
};
use crate::error::{invalid, Error, Result};
use crate::exactdist::{
    argmax_set, concentration, de_moivre_pmf, moments, pair_concentration, power, LatticeParams,
};

/// Significant digits of decimal columns.
pub const DECIMAL_DIGITS: u32 = 30;

/// Tail tolerance for the Bessel `G` enclosure.
pub const BESSEL_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Check {
    Main,
    Corollary,
    Bretagnolle,
    Wallis,
    BesselChain,
    Dsequence,
    Argmax,
    Moments,
    OracleEquiv,
}

impl Check {
    pub const ALL: [Check; 9] = [
        Check::Main,
        Check::Corollary,
        Check::Bretagnolle,
        Check::Wallis,
        Check::BesselChain,
        Check::Dsequence,
        Check::Argmax,
        Check::Moments,
        Check::OracleEquiv,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Check::Main => "main",
            Check::Corollary => "corollary",
            Check::Bretagnolle => "bretagnolle",
            Check::Wallis => "wallis",
            Check::BesselChain => "bessel_chain",
            Check::Dsequence => "dsequence",
            Check::Argmax => "argmax",
            Check::Moments => "moments",
            Check::OracleEquiv => "oracle_equiv",
        }
    }

    /// Checks indexed by `n` alone run once per `n`, at a fixed `ell`.
    fn fixed_ell(self) -> Option<u32> {
        match self {
            Check::Wallis => Some(2),
            Check::BesselChain => Some(3),
            _ => None,
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Check {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Check::ALL
            .into_iter()
            .find(|c| c.as_str() == s.trim())
            .ok_or_else(|| invalid(format!("unknown check {s:?}")))
    }
}

/// Parse a comma-separated check list; `all` selects every check.
pub fn parse_checks(s: &str) -> Result<BTreeSet<Check>> {
    let mut out = BTreeSet::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        if part == "all" {
            out.extend(Check::ALL);
        } else {
            out.insert(part.parse()?);
        }
    }
    if out.is_empty() {
        return Err(invalid("no checks selected"));
    }
    Ok(out)
}

/// Inclusive integer range written `A:B` (or a single `A`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntRange {
    pub lo: u32,
    pub hi: u32,
}

impl IntRange {
    pub fn new(lo: u32, hi: u32) -> Result<Self> {
        if lo > hi {
            return Err(invalid(format!("empty range {lo}:{hi}")));
        }
        Ok(IntRange { lo, hi })
    }

    pub fn iter(&self) -> impl Iterator<Item = u32> {
        self.lo..=self.hi
    }
}

impl FromStr for IntRange {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || invalid(format!("malformed range {s:?}, expected A:B"));
        let (a, b) = match s.split_once(':') {
            Some((a, b)) => (a, b),
            None => (s, s),
        };
        let lo = a.trim().parse().map_err(|_| bad())?;
        let hi = b.trim().parse().map_err(|_| bad())?;
        IntRange::new(lo, hi)
    }
}

impl fmt::Display for IntRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.lo, self.hi)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(invalid(format!("unknown format {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub ell_range: IntRange,
    pub n_range: IntRange,
    pub checks: BTreeSet<Check>,
    pub precision_bits: u32,
    pub output_format: OutputFormat,
    /// Worker count; not serialized, so reports are independent of it.
    #[serde(skip, default = "one_worker")]
    pub parallelism: usize,
}

fn one_worker() -> usize {
    1
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        if self.ell_range.lo < 2 {
            return Err(invalid("ell range must start at 2 or above"));
        }
        if self.n_range.lo < 1 {
            return Err(invalid("n range must start at 1 or above"));
        }
        if self.checks.is_empty() {
            return Err(invalid("no checks selected"));
        }
        if self.parallelism < 1 {
            return Err(invalid("parallelism must be at least 1"));
        }
        if self.precision_bits < 8 {
            return Err(invalid("precision must be at least 8 bits"));
        }
        Ok(())
    }
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            ell_range: IntRange { lo: 2, hi: 10 },
            n_range: IntRange { lo: 1, hi: 50 },
            checks: [Check::Main].into_iter().collect(),
            precision_bits: 256,
            output_format: OutputFormat::Csv,
            parallelism: 1,
        }
    }
}

/// What the theorem predicts for a cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Expected {
    Holds,
    Reversed,
}

/// One report row. Columns that do not apply to a check are empty strings.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellRecord {
    pub ell: u32,
    pub n: u32,
    pub check: Check,
    pub exact: String,
    pub bound_lo: String,
    pub bound_hi: String,
    pub verdict: Outcome,
    pub margin_lo: String,
    pub margin_hi: String,
    pub expected: Expected,
}

impl CellRecord {
    pub fn is_mismatch(&self) -> bool {
        matches!(
            (self.expected, self.verdict),
            (Expected::Holds, Outcome::Fails) | (Expected::Reversed, Outcome::Holds)
        )
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub cells: usize,
    pub holds: usize,
    pub fails: usize,
    pub inconclusive: usize,
    pub mismatches: usize,
}

impl Summary {
    pub fn of(cells: &[CellRecord]) -> Self {
        let mut s = Summary {
            cells: cells.len(),
            ..Summary::default()
        };
        for c in cells {
            match c.verdict {
                Outcome::Holds => s.holds += 1,
                Outcome::Fails => s.fails += 1,
                Outcome::Inconclusive => s.inconclusive += 1,
            }
            if c.is_mismatch() {
                s.mismatches += 1;
            }
        }
        s
    }

    /// A run is clean when every cell matched its prediction decisively.
    pub fn is_clean(&self) -> bool {
        self.mismatches == 0 && self.inconclusive == 0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub config: SweepConfig,
    pub cells: Vec<CellRecord>,
    pub summary: Summary,
}

/// Predicted outcome of the main inequality: reversed exactly for `n = 2, ell >= 5`.
pub fn theorem_expectation(ell: u32, n: u32) -> Expected {
    if n == 2 && ell >= 5 {
        Expected::Reversed
    } else {
        Expected::Holds
    }
}

fn ratio_string(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

fn lo_str(iv: &Interval) -> String {
    decimal_string(&iv.lo().to_rational(), DECIMAL_DIGITS, DecimalRound::Floor)
}

fn hi_str(iv: &Interval) -> String {
    decimal_string(&iv.hi().to_rational(), DECIMAL_DIGITS, DecimalRound::Ceil)
}

struct CellOutcome {
    exact: String,
    bound: Option<Interval>,
    verdict: Outcome,
    margin: Option<Interval>,
    expected: Expected,
}

impl CellOutcome {
    fn from_verdict(exact: String, bound: Interval, v: Verdict, expected: Expected) -> Self {
        CellOutcome {
            exact,
            bound: Some(bound),
            verdict: v.outcome,
            margin: Some(v.margin),
            expected,
        }
    }

    fn exact_only(exact: String, ok: bool) -> Self {
        CellOutcome {
            exact,
            bound: None,
            verdict: if ok { Outcome::Holds } else { Outcome::Fails },
            margin: None,
            expected: Expected::Holds,
        }
    }

    fn into_record(self, check: Check, ell: u32, n: u32) -> CellRecord {
        let (bound_lo, bound_hi) = self
            .bound
            .as_ref()
            .map_or((String::new(), String::new()), |b| (lo_str(b), hi_str(b)));
        let (margin_lo, margin_hi) = self
            .margin
            .as_ref()
            .map_or((String::new(), String::new()), |m| (lo_str(m), hi_str(m)));
        CellRecord {
            ell,
            n,
            check,
            exact: self.exact,
            bound_lo,
            bound_hi,
            verdict: self.verdict,
            margin_lo,
            margin_hi,
            expected: self.expected,
        }
    }
}

fn certified_cell(
    lhs: &BigRational,
    rhs: &Expr,
    prec: u32,
    expected: Expected,
) -> Result<CellOutcome> {
    let v = certify_less(lhs, rhs, prec)?;
    let bound = rhs.eval(v.precision_bits_used)?;
    Ok(CellOutcome::from_verdict(
        ratio_string(lhs),
        bound,
        v,
        expected,
    ))
}

/// Evaluate a single sweep cell.
pub fn evaluate_cell(check: Check, ell: u32, n: u32, precision_bits: u32) -> Result<CellRecord> {
    let params = LatticeParams::new(ell, n)?;
    let outcome = match check {
        Check::Main => certified_cell(
            &concentration(params),
            &main_bound_expr(ell, n)?,
            precision_bits,
            theorem_expectation(ell, n),
        )?,
        Check::Corollary => certified_cell(
            &concentration(params),
            &corollary_bound_expr(ell, n)?,
            precision_bits,
            Expected::Holds,
        )?,
        Check::Wallis => certified_cell(
            &central_binomial_probability(n),
            &wallis_bound_expr(n)?,
            precision_bits,
            Expected::Holds,
        )?,
        Check::Bretagnolle => {
            let c = concentration(params);
            let rhs = BigRational::new(BigInt::from(2), BigInt::from(ell))
                * concentration(LatticeParams::new(2, n)?);
            let margin = &rhs - &c;
            let v = Verdict::from_exact_nonstrict(&margin);
            let bound = Interval::from_rational(&rhs, precision_bits);
            CellOutcome::from_verdict(ratio_string(&c), bound, v, Expected::Holds)
        }
        Check::Dsequence => {
            let c = concentration(params);
            let l = i64::from(ell);
            let lhs = Expr::rational(c.clone())
                * Expr::sqrt(
                    Expr::pi() * Expr::int(l * l - 1) * Expr::int(i64::from(n)) / Expr::int(6),
                );
            let rhs = d_sequence_expr(n)?;
            let v = certify_expr_less(&lhs, &rhs, precision_bits)?;
            let bound = rhs.eval(v.precision_bits_used)?;
            CellOutcome::from_verdict(ratio_string(&c), bound, v, Expected::Holds)
        }
        Check::BesselChain => {
            let pair = pair_concentration(params);
            let (left, right) = certify_bessel_chain(&pair, n, BESSEL_TOLERANCE, precision_bits)?;
            let verdict = match (left.outcome, right.outcome) {
                (Outcome::Holds, Outcome::Holds) => Outcome::Holds,
                (Outcome::Fails, _) | (_, Outcome::Fails) => Outcome::Fails,
                _ => Outcome::Inconclusive,
            };
            let weaker = if left.margin.lo() <= right.margin.lo() {
                left
            } else {
                right
            };
            let lambda = BigRational::new(BigInt::from(2 * n), BigInt::from(3));
            let g = bessel_g(&lambda, BESSEL_TOLERANCE)?.value;
            CellOutcome {
                exact: ratio_string(&pair),
                bound: Some(g),
                verdict,
                margin: Some(weaker.margin),
                expected: Expected::Holds,
            }
        }
        Check::Argmax => {
            let set = argmax_set(&power(params));
            let central = params.central_points();
            let ok = if n == 1 {
                central.is_subset(&set)
            } else {
                set == central
            };
            CellOutcome::exact_only(ratio_string(&concentration(params)), ok)
        }
        Check::Moments => {
            let (mean, var) = moments(&power(params));
            let (l, nn) = (BigInt::from(ell), BigInt::from(n));
            let want_mean = BigRational::new(&nn * (&l - 1), BigInt::from(2));
            let want_var = BigRational::new(&nn * (&l * &l - 1), BigInt::from(12));
            let ok = mean == want_mean && var == want_var;
            CellOutcome::exact_only(
                format!("{};{}", ratio_string(&mean), ratio_string(&var)),
                ok,
            )
        }
        Check::OracleEquiv => {
            let d = power(params);
            let top = params.top() as i64;
            let ok = (-1..=top + 1).all(|k| de_moivre_pmf(params, k) == d.pmf(k));
            CellOutcome::exact_only(ratio_string(&d.max_probability()), ok)
        }
    };
    Ok(outcome.into_record(check, ell, n))
}

/// All `(check, ell, n)` cells of a configuration, in report order.
pub fn cells_of(config: &SweepConfig) -> Vec<(Check, u32, u32)> {
    let mut cells = Vec::new();
    for &check in &config.checks {
        match check.fixed_ell() {
            Some(ell) => cells.extend(config.n_range.iter().map(|n| (check, ell, n))),
            None => {
                for ell in config.ell_range.iter() {
                    cells.extend(config.n_range.iter().map(|n| (check, ell, n)));
                }
            }
        }
    }
    cells.sort_by(|a, b| (a.0.as_str(), a.1, a.2).cmp(&(b.0.as_str(), b.1, b.2)));
    cells
}

pub fn run_sweep(config: &SweepConfig) -> Result<SweepReport> {
    config.validate()?;
    let cells = cells_of(config);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.parallelism)
        .build()
        .map_err(|e| invalid(format!("cannot start worker pool: {e}")))?;
    let records: Vec<CellRecord> = pool.install(|| {
        cells
            .par_iter()
            .map(|&(check, ell, n)| evaluate_cell(check, ell, n, config.precision_bits))
            .collect::<Result<Vec<_>>>()
    })?;
    let summary = Summary::of(&records);
    Ok(SweepReport {
        config: config.clone(),
        cells: records,
        summary,
    })
}

pub fn write_csv<W: Write>(cells: &[CellRecord], out: W) -> std::io::Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    for c in cells {
        w.serialize(c)?;
    }
    if cells.is_empty() {
        w.write_record([
            "ell",
            "n",
            "check",
            "exact",
            "bound_lo",
            "bound_hi",
            "verdict",
            "margin_lo",
            "margin_hi",
            "expected",
        ])?;
    }
    w.flush()
}

pub fn read_csv<R: Read>(input: R) -> Result<Vec<CellRecord>> {
    let mut r = csv::Reader::from_reader(input);
    r.deserialize()
        .map(|row| row.map_err(|e| invalid(format!("malformed CSV report: {e}"))))
        .collect()
}

/// Decimal rendering of an `exact` column; `;`-separated parts are kept apart.
pub fn exact_decimal(exact: &str) -> Option<String> {
    exact
        .split(';')
        .map(|part| {
            part.parse::<BigRational>()
                .ok()
                .map(|r| decimal_string(&r, DECIMAL_DIGITS, DecimalRound::Nearest))
        })
        .collect::<Option<Vec<_>>>()
        .map(|parts| parts.join(";"))
}

#[derive(Serialize, Deserialize)]
struct JsonCell {
    #[serde(flatten)]
    record: CellRecord,
    #[serde(default)]
    exact_decimal: String,
}

#[derive(Serialize, Deserialize)]
struct JsonReport {
    config: SweepConfig,
    cells: Vec<JsonCell>,
    summary: Summary,
}

pub fn write_json<W: Write>(report: &SweepReport, mut out: W) -> std::io::Result<()> {
    let doc = JsonReport {
        config: report.config.clone(),
        cells: report
            .cells
            .iter()
            .map(|c| JsonCell {
                exact_decimal: exact_decimal(&c.exact).unwrap_or_default(),
                record: c.clone(),
            })
            .collect(),
        summary: report.summary,
    };
    serde_json::to_writer_pretty(&mut out, &doc)?;
    out.write_all(b"\n")
}

pub fn read_json<R: Read>(input: R) -> Result<SweepReport> {
    let doc: JsonReport = serde_json::from_reader(input)
        .map_err(|e| invalid(format!("malformed JSON report: {e}")))?;
    Ok(SweepReport {
        config: doc.config,
        cells: doc.cells.into_iter().map(|c| c.record).collect(),
        summary: doc.summary,
    })
}

/// Serialize a report in the configured format.
pub fn render(report: &SweepReport) -> Vec<u8> {
    let mut buf = Vec::new();
    match report.config.output_format {
        OutputFormat::Csv => write_csv(&report.cells, &mut buf),
        OutputFormat::Json => write_json(report, &mut buf),
    }
    .expect("writing to memory cannot fail");
    buf
}

mod config;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_bigint::BigInt;
use num_rational::BigRational;

use uniconc::asymptotics::{clt_ratio, local_clt_sup_dev};
use uniconc::certify::{decimal_string, DecimalRound};
use uniconc::exactdist::{concentration, de_moivre_pmf, power, LatticeParams};
use uniconc::spectral::fourier_pmf;
use uniconc::sweep::{
    parse_checks, read_csv, read_json, render, run_sweep, write_csv, OutputFormat, Summary,
    SweepConfig, SweepReport,
};

use config::FileConfig;

const FOURIER_TOLERANCE: f64 = 1e-12;

/// Exact and certified concentration of sums of discrete uniform variables
#[derive(Parser, Debug)]
#[command(name = "uniconc", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    #[command(flatten)]
    opts: Opts,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print pmf values of U_ell^{*n}
    Pmf,
    /// Print the concentration c_{ell,n}
    Conc,
    /// Run certified checks over a grid and write a report
    Verify,
    /// Tabulate the finite-n sharpness ratio and local CLT deviation
    Asymptotics,
    /// Summarize an existing CSV or JSON report
    Report {
        /// Report file to read
        input: PathBuf,
    },
}

#[derive(Args, Debug, Default)]
struct Opts {
    /// key=value file supplying defaults for the flags below
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[arg(long, global = true)]
    ell: Option<String>,

    /// Convolution power; a comma-separated list for `asymptotics`
    #[arg(long, global = true)]
    n: Option<String>,

    #[arg(long, global = true, allow_hyphen_values = true)]
    k: Option<String>,

    /// exact | demoivre | fourier
    #[arg(long, global = true)]
    method: Option<String>,

    /// Inclusive range A:B
    #[arg(long, global = true)]
    ell_range: Option<String>,

    /// Inclusive range A:B
    #[arg(long, global = true)]
    n_range: Option<String>,

    /// Comma-separated check names, or `all`
    #[arg(long, global = true)]
    checks: Option<String>,

    #[arg(long, global = true)]
    precision_bits: Option<String>,

    /// csv | json
    #[arg(long, global = true)]
    format: Option<String>,

    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[arg(long, global = true)]
    parallelism: Option<String>,
}

enum Failure {
    Verification,
    Usage(String),
    Io(String),
}

impl From<uniconc::Error> for Failure {
    fn from(e: uniconc::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

type CmdResult = Result<(), Failure>;

/// Flag values merged with the optional config file.
struct Settings {
    file: FileConfig,
    opts: Opts,
}

impl Settings {
    fn raw(&self, key: &str) -> Option<String> {
        let flag = match key {
            "ell" => self.opts.ell.clone(),
            "n" => self.opts.n.clone(),
            "k" => self.opts.k.clone(),
            "method" => self.opts.method.clone(),
            "ell-range" => self.opts.ell_range.clone(),
            "n-range" => self.opts.n_range.clone(),
            "checks" => self.opts.checks.clone(),
            "precision-bits" => self.opts.precision_bits.clone(),
            "format" => self.opts.format.clone(),
            "out" => self.opts.out.as_ref().map(|p| p.display().to_string()),
            "parallelism" => self.opts.parallelism.clone(),
            _ => None,
        };
        self.file.pick(flag, key)
    }

    fn parsed<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>, Failure> {
        self.raw(key)
            .map(|v| {
                v.parse()
                    .map_err(|_| Failure::Usage(format!("invalid value {v:?} for --{key}")))
            })
            .transpose()
    }

    fn required<T: std::str::FromStr>(&self, key: &str) -> Result<T, Failure> {
        self.parsed(key)?
            .ok_or_else(|| Failure::Usage(format!("missing --{key}")))
    }

    fn params(&self) -> Result<LatticeParams, Failure> {
        Ok(LatticeParams::new(
            self.required("ell")?,
            self.required("n")?,
        )?)
    }

    fn sweep_config(&self) -> Result<SweepConfig, Failure> {
        let mut cfg = SweepConfig::default();
        if let Some(r) = self.raw("ell-range") {
            cfg.ell_range = r.parse()?;
        }
        if let Some(r) = self.raw("n-range") {
            cfg.n_range = r.parse()?;
        }
        if let Some(c) = self.raw("checks") {
            cfg.checks = parse_checks(&c)?;
        }
        if let Some(f) = self.raw("format") {
            cfg.output_format = f.parse()?;
        }
        if let Some(p) = self.parsed("precision-bits")? {
            cfg.precision_bits = p;
        }
        if let Some(p) = self.parsed("parallelism")? {
            cfg.parallelism = p;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn out(&self) -> Option<PathBuf> {
        self.raw("out").map(PathBuf::from)
    }
}

fn ratio_string(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// `N/ell^n`, followed by the reduced fraction when it differs.
fn over_denominator(r: &BigRational, den: &BigInt) -> String {
    if r.numer() == &BigInt::from(0) {
        return "0".to_string();
    }
    let num = r.numer() * den / r.denom();
    let raw = format!("{num}/{den}");
    let reduced = ratio_string(r);
    if raw == reduced {
        raw
    } else {
        format!("{raw} = {reduced}")
    }
}

fn cmd_pmf(s: &Settings, out: &mut dyn Write) -> CmdResult {
    let params = s.params()?;
    let method = s.raw("method").unwrap_or_else(|| "exact".into());
    let single: Option<i64> = s.parsed("k")?;
    let ks: Vec<i64> = match single {
        Some(k) => vec![k],
        None => (0..=params.top() as i64).collect(),
    };
    let den = BigInt::from(params.denominator());
    let lines: Vec<String> = match method.as_str() {
        "exact" | "demoivre" => {
            let density = (method == "exact").then(|| power(params));
            ks.iter()
                .map(|&k| {
                    let v = match &density {
                        Some(d) => d.pmf(k),
                        None => de_moivre_pmf(params, k),
                    };
                    if single.is_some() {
                        over_denominator(&v, &den)
                    } else {
                        format!("{k} {}/{den}", v.numer() * &den / v.denom())
                    }
                })
                .collect()
        }
        "fourier" => ks
            .iter()
            .map(|&k| {
                let v = fourier_pmf(params.ell(), params.n(), k, FOURIER_TOLERANCE)?.value;
                Ok(if single.is_some() {
                    format!("{v}")
                } else {
                    format!("{k} {v}")
                })
            })
            .collect::<Result<_, uniconc::Error>>()?,
        other => return Err(Failure::Usage(format!("unknown method {other:?}"))),
    };
    for line in lines {
        writeln!(out, "{line}").map_err(io_failure)?;
    }
    Ok(())
}

fn cmd_conc(s: &Settings, out: &mut dyn Write) -> CmdResult {
    let params = s.params()?;
    let c = concentration(params);
    let den = BigInt::from(params.denominator());
    writeln!(out, "{}", over_denominator(&c, &den)).map_err(io_failure)?;
    writeln!(out, "{}", decimal_string(&c, 30, DecimalRound::Nearest)).map_err(io_failure)
}

fn cmd_asymptotics(s: &Settings, out: &mut dyn Write) -> CmdResult {
    let ell: u32 = s.required("ell")?;
    let list = s
        .raw("n")
        .ok_or_else(|| Failure::Usage("missing --n".into()))?;
    let ns = list
        .split(',')
        .map(|p| p.trim().parse::<u32>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|_| Failure::Usage(format!("invalid n list {list:?}")))?;
    let csv = matches!(s.raw("format").as_deref(), Some("csv"));
    let mut rows = Vec::new();
    for n in ns {
        let c = concentration(LatticeParams::new(ell, n)?);
        rows.push([
            n.to_string(),
            decimal_string(&c, 20, DecimalRound::Nearest),
            format!("{:.15}", clt_ratio(ell, n)?),
            format!("{:.6e}", local_clt_sup_dev(ell, n)?),
        ]);
    }
    let header = ["n", "c", "ratio", "sup_deviation"];
    let mut text = String::new();
    if csv {
        text.push_str(&header.join(","));
        text.push('\n');
        for r in &rows {
            text.push_str(&r.join(","));
            text.push('\n');
        }
    } else {
        let widths: Vec<usize> = (0..4)
            .map(|i| {
                rows.iter()
                    .map(|r| r[i].len())
                    .chain([header[i].len()])
                    .max()
                    .unwrap_or(0)
            })
            .collect();
        let fmt_row = |cells: Vec<&str>| {
            cells
                .iter()
                .zip(&widths)
                .map(|(c, w)| format!("{c:>w$}"))
                .collect::<Vec<_>>()
                .join("  ")
        };
        text.push_str(&fmt_row(header.to_vec()));
        text.push('\n');
        for r in &rows {
            text.push_str(&fmt_row(r.iter().map(String::as_str).collect()));
            text.push('\n');
        }
    }
    out.write_all(text.as_bytes()).map_err(io_failure)
}

fn summary_line(s: &Summary) -> String {
    format!(
        "cells={} holds={} fails={} inconclusive={} mismatches={}",
        s.cells, s.holds, s.fails, s.inconclusive, s.mismatches
    )
}

fn emit(bytes: &[u8], path: Option<&Path>, out: &mut dyn Write) -> CmdResult {
    match path {
        Some(p) => fs::write(p, bytes).map_err(|e| Failure::Io(format!("{}: {e}", p.display()))),
        None => out.write_all(bytes).map_err(io_failure),
    }
}

fn finish(summary: &Summary) -> CmdResult {
    eprintln!("{}", summary_line(summary));
    if summary.is_clean() {
        Ok(())
    } else {
        Err(Failure::Verification)
    }
}

fn cmd_verify(s: &Settings, out: &mut dyn Write) -> CmdResult {
    let cfg = s.sweep_config()?;
    let report = run_sweep(&cfg)?;
    emit(&render(&report), s.out().as_deref(), out)?;
    finish(&report.summary)
}

fn cmd_report(s: &Settings, input: &Path, out: &mut dyn Write) -> CmdResult {
    let bytes = fs::read(input).map_err(|e| Failure::Io(format!("{}: {e}", input.display())))?;
    let is_json = bytes.iter().find(|b| !b.is_ascii_whitespace()) == Some(&b'{');
    let cells = if is_json {
        let report: SweepReport = read_json(&bytes[..])?;
        if report.summary != Summary::of(&report.cells) {
            return Err(Failure::Usage(
                "stored summary disagrees with the cells".into(),
            ));
        }
        report.cells
    } else {
        read_csv(&bytes[..])?
    };
    let summary = Summary::of(&cells);
    match s
        .raw("format")
        .map(|f| f.parse::<OutputFormat>())
        .transpose()?
    {
        Some(OutputFormat::Csv) => {
            let mut buf = Vec::new();
            write_csv(&cells, &mut buf).map_err(io_failure)?;
            emit(&buf, s.out().as_deref(), out)?;
        }
        Some(OutputFormat::Json) => {
            return Err(Failure::Usage("report can only re-emit CSV".into()));
        }
        None => writeln!(out, "{}", summary_line(&summary)).map_err(io_failure)?,
    }
    finish(&summary)
}

fn io_failure(e: std::io::Error) -> Failure {
    Failure::Io(e.to_string())
}

fn run(cli: Cli) -> CmdResult {
    let file = match &cli.opts.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
            FileConfig::parse(&text).map_err(Failure::Usage)?
        }
        None => FileConfig::default(),
    };
    let settings = Settings {
        file,
        opts: cli.opts,
    };
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    match &cli.command {
        Command::Pmf => cmd_pmf(&settings, &mut out),
        Command::Conc => cmd_conc(&settings, &mut out),
        Command::Verify => cmd_verify(&settings, &mut out),
        Command::Asymptotics => cmd_asymptotics(&settings, &mut out),
        Command::Report { input } => cmd_report(&settings, input, &mut out),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}

use std::fs;
use std::process::{Command, Output};

fn uniconc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_uniconc"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn pmf_examples() {
    let o = uniconc(&[
        "pmf", "--ell", "3", "--n", "2", "--k", "2", "--method", "demoivre",
    ]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "3/9 = 1/3\n");

    let o = uniconc(&["pmf", "--ell", "2", "--n", "4", "--method", "exact"]);
    assert_eq!(stdout(&o), "0 1/16\n1 4/16\n2 6/16\n3 4/16\n4 1/16\n");

    let o = uniconc(&["pmf", "--ell", "2", "--n", "1", "--k", "9"]);
    assert_eq!(stdout(&o), "0\n");

    let o = uniconc(&[
        "pmf", "--ell", "2", "--n", "1", "--k", "-1", "--method", "demoivre",
    ]);
    assert_eq!(stdout(&o), "0\n");
}

#[test]
fn pmf_fourier_matches_exact() {
    let o = uniconc(&[
        "pmf", "--ell", "3", "--n", "3", "--k", "3", "--method", "fourier",
    ]);
    let v: f64 = stdout(&o).trim().parse().unwrap();
    assert!((v - 7.0 / 27.0).abs() < 1e-10);
}

#[test]
fn conc_prints_exact_and_decimal() {
    let o = uniconc(&["conc", "--ell", "5", "--n", "2"]);
    assert_eq!(stdout(&o), "5/25 = 1/5\n0.2\n");
}

#[test]
fn verify_main_grid_is_clean_with_reversed_exception() {
    let o = uniconc(&[
        "verify",
        "--ell-range",
        "2:10",
        "--n-range",
        "1:50",
        "--checks",
        "main",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text
        .starts_with("ell,n,check,exact,bound_lo,bound_hi,verdict,margin_lo,margin_hi,expected\n"));
    let row = text.lines().find(|l| l.starts_with("5,2,main,")).unwrap();
    assert!(row.contains(",fails,"));
    assert!(row.ends_with(",reversed"));
    assert_eq!(text.lines().count(), 1 + 9 * 50);
}

#[test]
fn verify_small_ell_at_two_holds() {
    let o = uniconc(&[
        "verify",
        "--ell-range",
        "2:4",
        "--n-range",
        "2:2",
        "--checks",
        "main",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let rows: Vec<String> = stdout(&o).lines().skip(1).map(str::to_string).collect();
    assert_eq!(rows.len(), 3);
    assert!(rows
        .iter()
        .all(|r| r.contains(",holds,") && r.ends_with(",holds")));
}

#[test]
fn verify_oracle_equivalence() {
    let o = uniconc(&[
        "verify",
        "--checks",
        "oracle_equiv",
        "--ell-range",
        "2:6",
        "--n-range",
        "1:10",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&o.stderr).contains("cells=50 holds=50"));
}

#[test]
fn mismatches_give_exit_one() {
    let o = uniconc(&[
        "verify",
        "--checks",
        "bretagnolle",
        "--ell-range",
        "3:3",
        "--n-range",
        "3:3",
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("mismatches=1"));
}

#[test]
fn usage_and_io_errors_have_distinct_codes() {
    assert_eq!(
        uniconc(&["pmf", "--ell", "0", "--n", "2"]).status.code(),
        Some(2)
    );
    assert_eq!(uniconc(&["pmf", "--ell", "2"]).status.code(), Some(2));
    assert_eq!(
        uniconc(&["verify", "--ell-range", "1:3"]).status.code(),
        Some(2)
    );
    assert_eq!(
        uniconc(&["verify", "--checks", "nope"]).status.code(),
        Some(2)
    );
    assert_eq!(uniconc(&["frobnicate"]).status.code(), Some(2));
    let o = uniconc(&[
        "verify",
        "--n-range",
        "1:2",
        "--out",
        "/nonexistent/dir/r.csv",
    ]);
    assert_eq!(o.status.code(), Some(3));
    assert_eq!(
        uniconc(&["report", "/nonexistent/r.json"]).status.code(),
        Some(3)
    );
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("sweep.conf");
    fs::write(
        &cfg,
        "# grid\nell_range=2:3\nn-range=1:4\nchecks=moments\nparallelism=2\n",
    )
    .unwrap();
    let o = uniconc(&[
        "verify",
        "--config",
        cfg.to_str().unwrap(),
        "--n-range",
        "1:2",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 1 + 2 * 2);
    assert!(text.contains("2,1,moments,1/2;1/4,"));
}

#[test]
fn json_report_round_trip_through_report_command() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("r.json");
    let csv = dir.path().join("r.csv");
    let o = uniconc(&[
        "verify",
        "--checks",
        "main,wallis",
        "--ell-range",
        "2:5",
        "--n-range",
        "1:4",
        "--format",
        "json",
        "--out",
        json.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());

    let o = uniconc(&["report", json.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(
        stdout(&o),
        "cells=20 holds=19 fails=1 inconclusive=0 mismatches=0\n"
    );

    let o = uniconc(&[
        "report",
        json.to_str().unwrap(),
        "--format",
        "csv",
        "--out",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let direct = uniconc(&[
        "verify",
        "--checks",
        "main,wallis",
        "--ell-range",
        "2:5",
        "--n-range",
        "1:4",
    ]);
    assert_eq!(fs::read(&csv).unwrap(), direct.stdout);

    let o = uniconc(&["report", csv.to_str().unwrap()]);
    assert_eq!(
        stdout(&o),
        "cells=20 holds=19 fails=1 inconclusive=0 mismatches=0\n"
    );
}

#[test]
fn asymptotics_table() {
    let o = uniconc(&[
        "asymptotics",
        "--ell",
        "2",
        "--n",
        "10,100,1000",
        "--format",
        "csv",
    ]);
    assert!(o.status.success());
    let text = stdout(&o);
    let ratios: Vec<f64> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(2).unwrap().parse().unwrap())
        .collect();
    assert_eq!(ratios.len(), 3);
    assert!(ratios.windows(2).all(|w| w[0] < w[1]));
    assert!(ratios.iter().all(|&r| r < 1.0));

    let o = uniconc(&["asymptotics", "--ell", "2", "--n", "1", "--format", "csv"]);
    let row = stdout(&o).lines().nth(1).unwrap().to_string();
    let ratio: f64 = row.split(',').nth(2).unwrap().parse().unwrap();
    assert!((ratio - 0.626_657_068_657_750_1).abs() < 1e-12);

    let o = uniconc(&["asymptotics", "--ell", "3", "--n", "2"]);
    assert!(stdout(&o).contains("0.964801672744357"));
}

#[test]
fn verify_is_independent_of_parallelism() {
    let args = [
        "verify",
        "--checks",
        "all",
        "--ell-range",
        "2:5",
        "--n-range",
        "1:6",
        "--format",
        "json",
    ];
    let one = uniconc(&[&args[..], &["--parallelism", "1"]].concat());
    let four = uniconc(&[&args[..], &["--parallelism", "4"]].concat());
    assert_eq!(one.status.code(), four.status.code());
    assert!(!one.stdout.is_empty());
    assert_eq!(one.stdout, four.stdout);
}

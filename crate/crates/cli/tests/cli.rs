//! End-to-end runs of the built binary: exit codes, stdout shapes, and the
//! machine CSV written behind -o.

use std::fs;
use std::process::{Command, Output};

use bchchain::interweave::{events_from_csv, events_to_csv};
use bchchain_cli::tables::{parse_bandwidth_csv, parse_chain_csv, parse_report_csv};

fn bchchain(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bchchain"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(output: &Output) -> String {
    assert!(
        output.status.success(),
        "exit {:?}, stderr: {}",
        output.status.code(),
        String::from_utf8_lossy(&output.stderr)
    );
    String::from_utf8(output.stdout.clone()).expect("stdout is UTF-8")
}

fn field<'a>(fields: &'a [(String, String)], name: &str) -> &'a str {
    fields
        .iter()
        .find(|(n, _)| n == name)
        .map(|(_, v)| v.as_str())
        .unwrap_or_else(|| panic!("report has no field {:?}", name))
}

#[test]
fn chain_lists_the_first_five_codes() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("chain.csv");
    let out = bchchain(&[
        "chain",
        "-s",
        "2",
        "-c",
        "1",
        "-d",
        "3",
        "-j",
        "4",
        "-o",
        csv.to_str().unwrap(),
    ]);
    let text = stdout(&out);
    assert_eq!(text.lines().count(), 6, "header plus five rows:\n{}", text);

    let written = fs::read_to_string(&csv).unwrap();
    let rows = parse_chain_csv(&written).unwrap();
    let shapes: Vec<(usize, usize)> = rows.iter().map(|r| (r.length, r.dimension)).collect();
    assert_eq!(shapes, [(3, 1), (12, 8), (24, 16), (48, 32), (96, 64)]);
    assert_eq!(rows[0].generator, "1+x+x^2");
    assert_eq!(rows[1].generator, "1+x^2+x^4");
    assert_eq!(rows[0].rate, (1, 3));
    assert!(rows[1..].iter().all(|r| r.rate == (2, 3)));
}

#[test]
fn chain_rates_flag_prints_both_rates() {
    let out = bchchain(&["chain", "-s", "2", "-c", "1", "-d", "3", "-j", "1", "--rates"]);
    let text = stdout(&out);
    assert!(text.contains("1/3"), "{}", text);
    assert!(text.contains("2/3"), "{}", text);
}

#[test]
fn chain_bad_delta_exits_2() {
    let out = bchchain(&["chain", "-s", "2", "-d", "99"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("delta out of range"), "{}", err);
}

#[test]
fn chain_unknown_flag_exits_2() {
    let out = bchchain(&["chain", "-s", "2", "-d", "3", "--frobnicate"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn decode_through_level_one_matches_the_worked_numbers() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("report.csv");
    let out = bchchain(&[
        "decode",
        "--bch",
        "s=2,c=1,d=3",
        "--via-chain",
        "1",
        "101",
        "-o",
        csv.to_str().unwrap(),
    ]);
    let text = stdout(&out);
    assert!(text.contains("projected"), "{}", text);

    let fields = parse_report_csv(&fs::read_to_string(&csv).unwrap()).unwrap();
    assert_eq!(field(&fields, "received"), "101");
    assert_eq!(field(&fields, "lifted"), "100010000000");
    assert_eq!(field(&fields, "syndrome"), "1010");
    assert_eq!(field(&fields, "corrected"), "101010000000");
    assert_eq!(field(&fields, "projected"), "111");
    assert_eq!(field(&fields, "message"), "1");
}

#[test]
fn decode_clean_word_is_left_alone() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("report.csv");
    let out = bchchain(&[
        "decode",
        "--bch",
        "s=2,c=1,d=3",
        "--via-chain",
        "1",
        "111",
        "-o",
        csv.to_str().unwrap(),
    ]);
    stdout(&out);
    let fields = parse_report_csv(&fs::read_to_string(&csv).unwrap()).unwrap();
    assert_eq!(field(&fields, "syndrome"), "0000");
    assert_eq!(field(&fields, "corrected"), field(&fields, "lifted"));
    assert_eq!(field(&fields, "projected"), "111");
}

#[test]
fn decode_through_level_two_gives_the_same_answer() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("report.csv");
    let out = bchchain(&[
        "decode",
        "--bch",
        "s=2,c=1,d=3",
        "--via-chain",
        "2",
        "101",
        "-o",
        csv.to_str().unwrap(),
    ]);
    stdout(&out);
    let fields = parse_report_csv(&fs::read_to_string(&csv).unwrap()).unwrap();
    assert_eq!(field(&fields, "projected"), "111");
}

#[test]
fn decode_bounded_table_exits_3_on_a_double_error() {
    let out = bchchain(&[
        "decode",
        "--bch",
        "s=4,c=1,d=5",
        "--max-weight",
        "1",
        "110000000000000",
    ]);
    assert_eq!(out.status.code(), Some(3));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("no stored leader"), "{}", err);
}

#[test]
fn decode_wrong_length_exits_2() {
    let out = bchchain(&["decode", "--bch", "s=2,c=1,d=3", "--via-chain", "1", "10101"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn bandwidth_table_shape_and_values() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("bandwidth.csv");
    let out = bchchain(&[
        "bandwidth",
        "-s",
        "2",
        "-c",
        "1",
        "-d",
        "3",
        "-j",
        "4",
        "--ru",
        "64",
        "--w",
        "1.2",
        "--m",
        "1,3",
        "-o",
        csv.to_str().unwrap(),
    ]);
    let text = stdout(&out);
    assert_eq!(text.lines().count(), 3, "header plus two schemes:\n{}", text);
    assert!(text.contains("BPSK") && text.contains("8PSK"), "{}", text);

    let (j_max, lines) = parse_bandwidth_csv(&fs::read_to_string(&csv).unwrap()).unwrap();
    assert_eq!(j_max, 4);
    assert_eq!(lines.len(), 2);
    assert_eq!(lines[0].m, 1);
    assert_eq!(lines[0].bands[0], "230.4");
    assert_eq!(lines[1].m, 3);
    assert_eq!(lines[1].bands[0], "76.8");
    assert_eq!(lines[1].bands[1], "38.4");
    for line in &lines {
        assert!(
            line.bands[1..].iter().all(|band| band == &line.bands[1]),
            "chain columns differ in {:?}",
            line
        );
        assert_eq!(line.saving, "1/2");
    }
}

#[test]
fn bandwidth_shows_previous_figures_on_request() {
    let out = bchchain(&[
        "bandwidth",
        "-s",
        "2",
        "-d",
        "3",
        "--ru",
        "64",
        "--w",
        "1.2",
        "--m",
        "1,3",
        "--paper-values",
    ]);
    let text = stdout(&out);
    assert!(text.contains("236.4"), "{}", text);
    assert!(text.contains("78.8"), "{}", text);
}

#[test]
fn simulate_same_seed_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("sim.cfg");
    fs::write(
        &cfg,
        "# mixed-traffic scenario\n\
         s = 2\n\
         delta = 3\n\
         j0 = 2\n\
         slots = 300\n\
         rho = 0.4, 0.2\n\
         crossover = 0.02\n\
         sensing_miss = 0.1\n\
         sensing_false_alarm = 0.05\n\
         ru = 64\n\
         w = 1.2\n\
         p0_traffic = 0.9\n",
    )
    .unwrap();
    let events_a = dir.path().join("a.csv");
    let events_b = dir.path().join("b.csv");

    let first = bchchain(&[
        "simulate",
        "--config",
        cfg.to_str().unwrap(),
        "--seed",
        "42",
        "-o",
        events_a.to_str().unwrap(),
    ]);
    let second = bchchain(&[
        "simulate",
        "--config",
        cfg.to_str().unwrap(),
        "--seed",
        "42",
        "-o",
        events_b.to_str().unwrap(),
    ]);
    assert_eq!(stdout(&first), stdout(&second));
    let log = fs::read_to_string(&events_a).unwrap();
    assert_eq!(log, fs::read_to_string(&events_b).unwrap());

    let events = events_from_csv(&log).unwrap();
    assert_eq!(events_to_csv(&events), log);

    let other = bchchain(&["simulate", "--config", cfg.to_str().unwrap(), "--seed", "43"]);
    assert_ne!(stdout(&first), stdout(&other), "seed must steer the run");
}

#[test]
fn simulate_idle_noiseless_halves_the_band() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("sim.cfg");
    fs::write(&cfg, "s = 2\ndelta = 3\nj0 = 1\nslots = 100\nrho = 0\n").unwrap();

    let out = bchchain(&["simulate", "--config", cfg.to_str().unwrap()]);
    let text = stdout(&out);
    assert!(text.contains("bandwidth_saving=0.500000"), "{}", text);
    assert!(text.contains("post_decode_ber=0.000000"), "{}", text);
    assert!(text.contains("collision_count=0"), "{}", text);

    let out = bchchain(&["simulate", "--config", cfg.to_str().unwrap(), "--json"]);
    let value: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(value["bandwidth_saving"].as_f64(), Some(0.5));
    assert_eq!(value["secondary_opportunities"].as_u64(), Some(100));
}

#[test]
fn simulate_unknown_key_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("sim.cfg");
    fs::write(&cfg, "s = 2\ndelta = 3\nj0 = 1\nslots = 10\nrho = 0\nbogus = 1\n").unwrap();
    let out = bchchain(&["simulate", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("config line"), "{}", err);
}

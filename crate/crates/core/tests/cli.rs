use std::path::PathBuf;
use std::process::{Command, Output};

use mirrorsim::cli::{CommandName, Flags, RunConfig, CURVE_HEADER};
use serde_json::Value;

fn mirrorsim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mirrorsim"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("valid JSON on stdout")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("mirrorsim-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn column(csv: &str, idx: usize) -> Vec<f64> {
    csv.lines()
        .skip(1)
        .map(|l| l.split(',').nth(idx).unwrap().parse().unwrap())
        .collect()
}

#[test]
fn visibility_csv_has_header_and_requested_rows() {
    let out = mirrorsim(&["visibility", "--k", "1"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert_eq!(text.lines().next().unwrap(), CURVE_HEADER);
    assert_eq!(text.lines().count(), 513);
    let v = column(&text, 1);
    let min = v.iter().cloned().fold(f64::INFINITY, f64::min);
    assert!((min - (-2.0f64).exp()).abs() < 1e-4, "min {min}");
    assert!((v[0] - 1.0).abs() < 1e-12);
    assert!((v[511] - 1.0).abs() < 1e-9);
}

#[test]
fn uncoupled_mirror_keeps_full_visibility() {
    let out = mirrorsim(&["visibility", "--k", "0", "--samples", "64"]);
    assert_eq!(code(&out), 0);
    for v in column(&stdout(&out), 1) {
        assert!((v - 1.0).abs() < 1e-12);
    }
}

#[test]
fn dephasing_in_period_units_damps_the_revival() {
    let out = mirrorsim(&["visibility", "--k", "1", "--gamma", "1.0", "--samples", "32"]);
    assert_eq!(code(&out), 0);
    let last = *column(&stdout(&out), 1).last().unwrap();
    assert!((last - (-1.0f64).exp()).abs() < 1e-9, "last {last}");
}

#[test]
fn output_file_is_deterministic() {
    let a = scratch("a.csv");
    let b = scratch("b.csv");
    for path in [&a, &b] {
        let out = mirrorsim(&[
            "visibility",
            "--k",
            "1.5",
            "--samples",
            "100",
            "--output",
            path.to_str().unwrap(),
        ]);
        assert_eq!(code(&out), 0);
        assert!(out.stdout.is_empty());
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn json_report_echoes_resolved_config() {
    let out = mirrorsim(&["discriminate", "--k", "2"]);
    assert_eq!(code(&out), 0);
    let report = json(&out);
    assert_eq!(report["verdict"], "RelativeDecoherence");
    let echoed: RunConfig = serde_json::from_value(report["config"].clone()).unwrap();
    let flags = Flags {
        k: Some(2.0),
        ..Flags::default()
    };
    assert_eq!(echoed, RunConfig::resolve(CommandName::Discriminate, &flags).unwrap());
}

#[test]
fn collapse_with_certain_branch() {
    let out = mirrorsim(&["collapse", "--k", "1", "--weights", "1,0", "--draws", "1"]);
    assert_eq!(code(&out), 0);
    let report = json(&out);
    assert_eq!(report["counts"], serde_json::json!([1, 0]));
}

#[test]
fn collapse_frequencies_track_born_weights() {
    let out = mirrorsim(&["collapse", "--k", "1", "--weights", "0.3,0.7", "--draws", "40000"]);
    assert_eq!(code(&out), 0);
    let report = json(&out);
    let freqs: Vec<f64> = serde_json::from_value(report["frequencies"].clone()).unwrap();
    assert!((freqs[0] - 0.3).abs() < 0.01);
    assert!((freqs[1] - 0.7).abs() < 0.01);
}

#[test]
fn collapse_refuses_interfering_packets() {
    let out = mirrorsim(&["collapse", "--k", "1", "--t-over-tm", "0.01"]);
    assert_eq!(code(&out), 4);
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));
}

#[test]
fn packet_check_coherent_and_cat() {
    let out = mirrorsim(&["packet-check", "--alpha", "5"]);
    assert_eq!(code(&out), 0);
    let report = json(&out);
    let x = &report["observables"][0];
    let p = &report["observables"][1];
    assert!((x["ratio"].as_f64().unwrap() - 10.0).abs() < 1e-6);
    assert!(p["ratio"].as_f64().unwrap().abs() < 1e-9);
    assert_eq!(report["is_wave_packet"], false);

    let both = mirrorsim(&["packet-check", "--alpha", "5+5i"]);
    assert_eq!(json(&both)["is_wave_packet"], true);

    let cat = mirrorsim(&["packet-check", "--cat", "5"]);
    assert_eq!(code(&cat), 0);
    let report = json(&cat);
    assert!(report["observables"][0]["ratio"].as_f64().unwrap().abs() < 1e-9);
    assert_eq!(report["is_wave_packet"], false);
}

#[test]
fn packet_check_needs_exactly_one_state() {
    assert_eq!(code(&mirrorsim(&["packet-check"])), 2);
    assert_eq!(code(&mirrorsim(&["packet-check", "--alpha", "1", "--cat", "1"])), 2);
    assert_eq!(code(&mirrorsim(&["packet-check", "--alpha", "1+"])), 2);
}

#[test]
fn evolve_check_trivial_coupling_is_exact() {
    let out = mirrorsim(&["evolve-check", "--k", "0", "--samples", "16"]);
    assert_eq!(code(&out), 0);
    assert!(json(&out)["defect"].as_f64().unwrap() <= 1e-12);
}

#[test]
fn small_cutoff_exits_three() {
    let out = mirrorsim(&["visibility", "--k", "2", "--n-max", "10"]);
    assert_eq!(code(&out), 3);
}

#[test]
fn config_file_sits_below_flags() {
    let path = scratch("run.conf");
    std::fs::write(&path, "# run settings\nk = 0.5\nsamples = 8\nformat = json\n").unwrap();
    let cfg = path.to_str().unwrap();

    let from_file = json(&mirrorsim(&["visibility", "--config", cfg]));
    assert_eq!(from_file["config"]["k"], 0.5);
    assert_eq!(from_file["times"].as_array().unwrap().len(), 8);

    let overridden = json(&mirrorsim(&["visibility", "--config", cfg, "--k", "1", "--samples", "4"]));
    assert_eq!(overridden["config"]["k"], 1.0);
    assert_eq!(overridden["times"].as_array().unwrap().len(), 4);

    std::fs::write(&path, "nonsense = 1\n").unwrap();
    assert_eq!(code(&mirrorsim(&["visibility", "--config", cfg])), 2);
}

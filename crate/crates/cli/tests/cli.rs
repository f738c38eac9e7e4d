use std::f64::consts::PI;
use std::process::{Command, Output};

use serde_json::Value;

fn lab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_protocol-lab"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

#[test]
fn protocol_reports_bbb_and_bb_times() {
    let o = lab(&["protocol", "--kind", "bbb", "--D", "6", "--R", "6", "--format", "json"]);
    assert_eq!(code(&o), 0);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let total = v["report"]["total_time"].as_f64().unwrap();
    assert!((total - 2.0 * PI / 3.0).abs() < 1e-12);

    let o = lab(&["protocol", "--kind", "bb", "--D", "6"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("total time: 3.14159265359"));
}

#[test]
fn exit_codes() {
    assert_eq!(code(&lab(&["protocol", "--kind", "bbb", "--R", "1", "--D", "6"])), 2);
    assert_eq!(code(&lab(&["protocol", "--D", "6"])), 2);
    assert_eq!(code(&lab(&["protocol", "--kind", "teleport"])), 2);
    assert_eq!(code(&lab(&["protocol", "--kind", "dsbbb", "--R", "3"])), 2);
    assert_eq!(code(&lab(&["simulate", "--kind", "bb", "--n-points", "1000"])), 2);
    assert_eq!(
        code(&lab(&["convert", "--mass", "40", "--freq", "1", "--freq-unit", "mhz"])),
        2
    );
    assert_eq!(code(&lab(&["scan", "--n-t2", "0"])), 2);
    assert_eq!(code(&lab(&["qsl", "--points", "1"])), 2);
    // The coarsest allowed time step still keeps the oracles together.
    let o = lab(&[
        "simulate",
        "--kind",
        "bbb",
        "--D",
        "3",
        "--R",
        "3",
        "--truncate-at",
        "2.5",
        "--dt",
        "0.01",
    ]);
    assert_eq!(code(&o), 0);
    assert_eq!(
        code(&lab(&["simulate", "--kind", "bbb", "--D", "3", "--dt", "0.02"])),
        2
    );
    // Unwritable output path.
    assert_eq!(code(&lab(&["qsl", "--out", "/nonexistent-dir/x.csv"])), 1);
}

#[test]
fn config_file_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(&cfg, r#"{"kind": "bbb", "D": 6, "R": 3, "format": "json"}"#).unwrap();
    let c = cfg.to_str().unwrap();

    let from_file: Value = serde_json::from_str(&stdout(&lab(&["protocol", "--config", c]))).unwrap();
    assert!((from_file["report"]["total_time"].as_f64().unwrap() - PI).abs() < 1e-12);

    let o = lab(&["protocol", "--config", c, "--R", "6"]);
    let overridden: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!((overridden["report"]["total_time"].as_f64().unwrap() - 2.0 * PI / 3.0).abs() < 1e-12);

    std::fs::write(&cfg, r#"{"kind": "bbb", "radius": 3}"#).unwrap();
    assert_eq!(code(&lab(&["protocol", "--config", c])), 2);
    assert_eq!(code(&lab(&["protocol", "--config", "/no/such/file.json"])), 2);
}

#[test]
fn simulate_oracles_and_dump() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("fid.csv");
    let dump = dir.path().join("psi.txt");
    let o = lab(&[
        "simulate",
        "--kind",
        "bb",
        "--D",
        "6",
        "--format",
        "csv",
        "--out",
        out.to_str().unwrap(),
        "--dump",
        dump.to_str().unwrap(),
        "--quiet",
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).is_empty());
    let csv = std::fs::read_to_string(&out).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next(),
        Some("method,fidelity,residual_momentum,energy_drift,norm_drift,final_mean_x")
    );
    for line in lines {
        let f: f64 = line.split(',').nth(1).unwrap().parse().unwrap();
        assert!(f >= 1.0 - 1e-6, "{line}");
    }
    let dumped = std::fs::read_to_string(&dump).unwrap();
    assert!(dumped.starts_with("t,x,re_psi,im_psi\n"));

    let o = lab(&[
        "simulate",
        "--kind",
        "bbb",
        "--R",
        "6",
        "--oracle",
        "gaussian",
        "--dump",
        dump.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 2);
}

#[test]
fn truncated_simulation_matches_gaussian() {
    let o = lab(&[
        "simulate",
        "--kind",
        "bbb",
        "--D",
        "2",
        "--R",
        "2",
        "--truncate-at",
        "1.0",
        "--format",
        "json",
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let g = v["gaussian"]["fidelity"].as_f64().unwrap();
    let n = v["grid"]["fidelity"].as_f64().unwrap();
    assert!(g < 0.9 && (g - n).abs() < 1e-5);
}

#[test]
fn scan_writes_csv_and_gnuplot() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("scan.csv");
    let gp = dir.path().join("scan.gp");
    let o = lab(&[
        "scan",
        "--n-omega2",
        "8",
        "--n-t2",
        "5",
        "--out",
        out.to_str().unwrap(),
        "--gnuplot",
        gp.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("8 x 5 cells"));
    let csv = std::fs::read_to_string(&out).unwrap();
    assert_eq!(csv.lines().count(), 41);
    assert!(csv.ends_with('\n') && !csv.contains('\r'));
    assert!(std::fs::read_to_string(&gp).unwrap().contains(out.to_str().unwrap()));
    assert_eq!(code(&lab(&["scan", "--gnuplot", gp.to_str().unwrap()])), 2);

    let json: Value = serde_json::from_str(&stdout(&lab(&[
        "scan",
        "--n-omega2",
        "2",
        "--n-t2",
        "2",
        "--format",
        "json",
    ])))
    .unwrap();
    assert_eq!(json["result"]["cells"].as_array().unwrap().len(), 4);
}

#[test]
fn qsl_table_on_stdout() {
    let o = lab(&["qsl", "--D", "3", "--points", "10"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    assert_eq!(text.lines().next(), Some("R,tau_bbb,tau_mt,tau_ml,asymptote"));
    assert_eq!(text.lines().count(), 11);
    let o = lab(&["qsl", "--D", "0.5", "--r-min", "1", "--points", "3"]);
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8_lossy(&o.stderr).contains("warning"));
}

#[test]
fn convert_calcium() {
    let o = lab(&[
        "convert",
        "--mass",
        "40",
        "--mass-unit",
        "amu",
        "--freq",
        "2.35",
        "--freq-unit",
        "mhz",
        "--distance",
        "0.785",
        "--distance-unit",
        "um",
        "--format",
        "json",
    ]);
    assert_eq!(code(&o), 0);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!((v["D"].as_f64().unwrap() - 53.53).abs() < 0.01);
    assert!(v["frequency_convention"].as_str().unwrap().contains("cyclic"));

    let o = lab(&[
        "convert",
        "--mass",
        "40",
        "--mass-unit",
        "amu",
        "--freq",
        "2.35",
        "--freq-unit",
        "mhz",
        "--distance",
        "0",
        "--distance-unit",
        "um",
    ]);
    assert!(stdout(&o).contains(" D = 0\n"));
    assert_eq!(
        code(&lab(&[
            "convert",
            "--mass",
            "40",
            "--mass-unit",
            "amu",
            "--freq",
            "2.35",
            "--freq-unit",
            "mhz",
            "--distance",
            "1"
        ])),
        2
    );
}

#[test]
fn forward_search_is_seeded() {
    let run = |seed: &str| {
        stdout(&lab(&[
            "protocol",
            "--kind",
            "forward-search",
            "--samples",
            "500",
            "--seed",
            seed,
            "--format",
            "csv",
        ]))
    };
    assert_eq!(run("9"), run("9"));
    let line = run("9").lines().nth(1).unwrap().to_string();
    let min: f64 = line.split(',').nth(2).unwrap().parse().unwrap();
    assert!(min >= PI * (1.0 - 1e-9));
}

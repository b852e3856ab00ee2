use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;
use typebounds::cli::ingest::read_wide;
use typebounds::cli::report::{BOUNDS_COLUMNS, VERSION};
use typebounds::simlab::{generate, Scenario};

const PANEL: &str = "\
unit_id,region,sex,status_1,outcome_1,reason_1,status_2,outcome_2,reason_2,status_3,outcome_3,reason_3
u1,north,female,alive,1,,alive,,refused,alive,,moved
u2,south,male,alive,0,,dead,,,dead,,
u3,north,male,alive,,moved,alive,0,,alive,1,
u4,south,female,alive,0,,alive,,refused,alive,0,
";

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_typebounds"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn bounds_report_has_header_line_and_columns() {
    let dir = TempDir::new().unwrap();
    let panel = write(&dir, "p.csv", PANEL);
    let o = run(&["bounds", s(&panel), "--past", "2", "--future", "2"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert!(lines
        .next()
        .unwrap()
        .starts_with(&format!("# typebounds {VERSION} command=bounds")));
    assert_eq!(lines.next().unwrap(), BOUNDS_COLUMNS.join(","));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 3);
    assert!(rows[1].starts_with("all,2,1,1,"), "{}", rows[1]);
    assert!(rows[0].ends_with("horizon-clipped"));
}

#[test]
fn ci_header_records_seed_and_replicates() {
    let dir = TempDir::new().unwrap();
    let panel = write(&dir, "p.csv", PANEL);
    let a = run(&[
        "ci",
        s(&panel),
        "--boot",
        "50",
        "--seed",
        "9",
        "--wave",
        "2",
    ]);
    let b = run(&[
        "ci",
        s(&panel),
        "--boot",
        "50",
        "--seed",
        "9",
        "--wave",
        "2",
    ]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert!(stdout(&a)
        .lines()
        .next()
        .unwrap()
        .contains("seed=9 boot=50 alpha=0.05"));
}

#[test]
fn sensitivity_appends_rung_column() {
    let dir = TempDir::new().unwrap();
    let panel = write(&dir, "p.csv", PANEL);
    let out = dir.path().join("sens.csv");
    let o = run(&[
        "sensitivity",
        s(&panel),
        "--ladder",
        "moved,refused",
        "--boot",
        "0",
        "--wave",
        "2",
        "--out",
        s(&out),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(out).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines[1].ends_with(",flags,rung"));
    let rungs: Vec<&str> = lines[2..]
        .iter()
        .map(|l| l.rsplit(',').next().unwrap())
        .collect();
    assert_eq!(rungs, ["A", "JD1", "JD2"]);
}

#[test]
fn json_output_parses() {
    let dir = TempDir::new().unwrap();
    let panel = write(&dir, "p.csv", PANEL);
    let o = run(&["bounds", s(&panel), "--by", "sex", "--format", "json"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["header"]["command"], "bounds");
    assert_eq!(v["rows"].as_array().unwrap().len(), 6);
}

#[test]
fn exit_codes_follow_failure_kind() {
    let dir = TempDir::new().unwrap();
    let panel = write(&dir, "p.csv", PANEL);
    let bad_row = write(
        &dir,
        "bad.csv",
        "unit_id,status_1,outcome_1,reason_1\nu1,dead,1,\n",
    );
    let nonmonotone = write(
        &dir,
        "nm.csv",
        "unit_id,status_1,outcome_1,reason_1,status_2,outcome_2,reason_2\nu1,alive,1,,alive,0,\n",
    );
    let code = |args: &[&str]| run(args).status.code().unwrap();
    assert_eq!(code(&["bounds", s(&dir.path().join("missing.csv"))]), 1);
    assert_eq!(code(&["bounds"]), 2);
    assert_eq!(code(&["bounds", s(&bad_row)]), 3);
    assert_eq!(code(&["bounds", s(&nonmonotone)]), 4);
    assert_eq!(code(&["bounds", s(&nonmonotone), "--drop-nonmonotone"]), 6);
    assert_eq!(code(&["bounds", s(&panel), "--alpha", "3"]), 5);
    assert_eq!(code(&["bounds", s(&panel), "--mar", "bogus"]), 5);
    assert_eq!(code(&["bounds", s(&panel), "--method", "nope"]), 5);
    assert_eq!(code(&["ci", s(&panel), "--boot", "1"]), 6);
}

#[test]
fn validate_reports_missing_proportions() {
    // 4062 units with 1185, 1487 and 1706 missing cells over three waves.
    let mut text = String::from(
        "unit_id,status_2004,outcome_2004,reason_2004,status_2006,outcome_2006,reason_2006,status_2008,outcome_2008,reason_2008\n",
    );
    for k in 0..4062 {
        let cell = |missing: usize| {
            if k < missing {
                "alive,,refused"
            } else {
                "alive,0,"
            }
        };
        text.push_str(&format!(
            "u{k},{},{},{}\n",
            cell(1185),
            cell(1487),
            cell(1706)
        ));
    }
    let dir = TempDir::new().unwrap();
    let panel = write(&dir, "p.csv", &text);
    let o = run(&["validate", s(&panel)]);
    assert!(o.status.success());
    let proportions: Vec<String> = stdout(&o)
        .lines()
        .skip(2)
        .map(|l| {
            let p: f64 = l.rsplit(',').next().unwrap().parse().unwrap();
            format!("{:.1}", 100.0 * p)
        })
        .collect();
    assert_eq!(proportions, ["29.2", "36.6", "42.0"]);
}

#[test]
fn strict_checks_fail_on_falsified_panel() {
    let dir = TempDir::new().unwrap();
    let sc = Scenario::example_one();
    let panel = generate(&sc, 4000, 11).unwrap();
    let path = dir.path().join("ex1.csv");
    typebounds::cli::ingest::write_wide(&panel, std::fs::File::create(&path).unwrap()).unwrap();
    let args = [
        "bounds",
        s(&path),
        "--wave",
        "0",
        "--future",
        "1",
        "--mar",
        "moved",
    ];
    let lenient = run(&args);
    assert!(lenient.status.success());
    assert!(
        String::from_utf8_lossy(&lenient.stderr).contains("warning: testable condition violated")
    );
    assert!(stdout(&lenient).contains("check-failed="));
    let mut strict = args.to_vec();
    strict.push("--strict-checks");
    let o = run(&strict);
    assert_eq!(o.status.code(), Some(7));
    assert!(o.stdout.is_empty());
}

#[test]
fn convert_round_trip() {
    let dir = TempDir::new().unwrap();
    let wide = write(&dir, "p.csv", PANEL);
    let long = dir.path().join("long.csv");
    let back = dir.path().join("back.csv");
    assert!(run(&[
        "convert",
        s(&wide),
        s(&long),
        "--from",
        "wide",
        "--to",
        "long"
    ])
    .status
    .success());
    assert!(run(&[
        "convert",
        s(&long),
        s(&back),
        "--from",
        "long",
        "--to",
        "wide"
    ])
    .status
    .success());
    let a = read_wide(PANEL.as_bytes()).unwrap();
    let b = read_wide(std::fs::File::open(back).unwrap()).unwrap();
    assert_eq!(a, b);
}

#[test]
fn simulate_and_oracle_commands() {
    let dir = TempDir::new().unwrap();
    let scenario = write(
        &dir,
        "sc.json",
        &serde_json::to_string(&Scenario::example_one()).unwrap(),
    );
    let panel = dir.path().join("sim.csv");
    let o = run(&[
        "simulate",
        "--scenario",
        s(&scenario),
        "--n",
        "100",
        "--out",
        s(&panel),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(
        read_wide(std::fs::File::open(&panel).unwrap())
            .unwrap()
            .units()
            .len(),
        100
    );

    let o = run(&[
        "oracle",
        "--scenario",
        s(&scenario),
        "--wave",
        "0",
        "--future",
        "1",
    ]);
    assert!(o.status.success());
    let feasible = |o: &Output| {
        stdout(o)
            .lines()
            .nth(2)
            .unwrap()
            .split(',')
            .nth(3)
            .unwrap()
            .to_string()
    };
    assert_eq!(feasible(&o), "false");
    let o = run(&["oracle", "--scenario", s(&scenario), "--wave", "0"]);
    assert_eq!(feasible(&o), "true");

    let broken = write(&dir, "broken.json", r#"{"waves": 0}"#);
    assert_eq!(
        run(&["simulate", "--scenario", s(&broken)]).status.code(),
        Some(5)
    );
}

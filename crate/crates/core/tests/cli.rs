use std::fs;
use std::path::Path;
use std::process::Command;

use controlled_echo::cli::{self, RunConfig};
use controlled_echo::dynamics::simulate_group;
use controlled_echo::ensemble::SpinGroup;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_controlled-echo"))
}

fn report_value<'a>(report: &'a str, key: &str) -> &'a str {
    report
        .lines()
        .find_map(|l| l.strip_prefix(key).and_then(|r| r.strip_prefix('=')))
        .unwrap_or_else(|| panic!("no `{key}` in report"))
}

fn write_config(dir: &Path, body: &str) -> std::path::PathBuf {
    let path = dir.join("run.toml");
    fs::write(&path, body).unwrap();
    path
}

#[test]
fn fig1_run_writes_csv_and_report() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "protocol = \"fig1\"\noutputs = [\"rho13\", \"rho23\", \"pop3\"]\n");
    let out = dir.path().join("out");
    let status = bin()
        .args(["run", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());

    let report = fs::read_to_string(out.join("fig1_counter_intuitive.report")).unwrap();
    assert_eq!(report_value(&report, "emissive"), "true");
    assert_eq!(report_value(&report, "inverted"), "false");

    let csv = fs::read_to_string(out.join("fig1_counter_intuitive.csv")).unwrap();
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(header, ["time_us", "re_rho13", "im_rho13", "re_rho23", "im_rho23", "pop3"]);
    let rows: Vec<Vec<f64>> = lines
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect();
    assert!(rows.iter().all(|r| r.len() == header.len()));
    assert!(rows.windows(2).all(|w| w[1][0] > w[0][0]));

    // the echo burst on Im ρ23 sits just after t_C
    let im23 = |t: f64| rows.iter().min_by(|a, b| (a[0] - t).abs().total_cmp(&(b[0] - t).abs())).unwrap()[4];
    assert!(im23(19.0) > 0.1);
    assert!(im23(15.0).abs() < 1e-3);
}

#[test]
fn identical_configs_give_identical_files() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "protocol = \"fig2\"\n[ensemble]\ngroups = 41\nspacing = 10.0\n");
    let mut bodies = Vec::new();
    for run in ["a", "b"] {
        let out = dir.path().join(run);
        let status = bin().args(["run", "--config"]).arg(&cfg).arg("--out").arg(&out).status().unwrap();
        assert!(status.success());
        bodies.push(fs::read(out.join("fig2_counter_intuitive.csv")).unwrap());
    }
    assert_eq!(bodies[0], bodies[1]);
}

#[test]
fn single_group_matches_group_run() {
    let dir = tempfile::tempdir().unwrap();
    let config = RunConfig::from_toml("protocol = \"fig1\"\noutputs = [\"rho12\"]\n[ensemble]\ngroups = 1\n")
        .unwrap()
        .with_overrides(None, None, None, Some(dir.path().to_path_buf()))
        .unwrap();
    let outcome = cli::run(&config).unwrap();
    let group = simulate_group(&config.protocol, &SpinGroup { detuning: 0.0, weight: 1.0 }, 0.01).unwrap();
    assert_eq!(outcome.series.times, group.times);
    for (a, b) in outcome.series.mean_rho.iter().zip(&group.states) {
        assert_eq!(a, b);
    }
}

#[test]
fn fig3_conventional_is_inverted() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "protocol = \"fig3\"\naccess = \"conventional\"\nname = \"conv\"\n");
    let status = bin()
        .args(["run", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(dir.path())
        .args(["--groups", "51", "--spacing", "8"])
        .status()
        .unwrap();
    assert!(status.success());
    let report = fs::read_to_string(dir.path().join("conv.report")).unwrap();
    assert_eq!(report_value(&report, "inverted"), "true");
    assert_eq!(report_value(&report, "groups"), "51");
}

#[test]
fn bad_inputs_fail_with_diagnostic() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        "protocol = \"fig7\"\n",
        "protocol = \"fig1\"\noutputs = [\"rho45\"]\n",
        "protocol = \"fig1\"\n[ensemble]\ngroups = 200\n",
        "this is not toml",
    ];
    for body in cases {
        let cfg = write_config(dir.path(), body);
        let out = bin().args(["run", "--config"]).arg(&cfg).output().unwrap();
        assert!(!out.status.success(), "{body}");
        assert!(String::from_utf8_lossy(&out.stderr).contains("error"), "{body}");
    }

    let missing = bin().args(["run", "--config", "/nonexistent/run.toml"]).output().unwrap();
    assert!(!missing.status.success());

    let blocker = dir.path().join("file");
    fs::write(&blocker, "").unwrap();
    let cfg = write_config(dir.path(), "protocol = \"two_level\"\n[ensemble]\ngroups = 3\n");
    let unwritable = bin()
        .args(["run", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(blocker.join("sub"))
        .output()
        .unwrap();
    assert!(!unwritable.status.success());

    let suite = bin().args(["verify", "--suite", "everything"]).output().unwrap();
    assert!(!suite.status.success());
}

#[test]
fn verify_invariants_exits_zero() {
    let out = bin().args(["verify", "--suite", "invariants"]).output().unwrap();
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(out.status.success(), "{text}");
    assert!(text.contains("[PASS] criterion  9"));
}

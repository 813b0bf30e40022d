use std::process::Command;

use proptest::prelude::*;
use ramsey_tg::PhysicsConfig;
use ramsey_tg_cli::{parse_config, run_scenario, RawConfig, RunConfig, Scenario};

const BIN: &str = env!("CARGO_BIN_EXE_ramsey-tg");

/// Cheap quantum settings for debug-build runs.
const FAST: &str = "nodes = 128\nN = 2\n";

fn config(text: &str) -> RunConfig {
    parse_config(&RawConfig::parse_text(text).unwrap()).unwrap()
}

fn run(cfg: &RunConfig, scenario: Scenario) -> String {
    let mut out = Vec::new();
    let report = run_scenario(cfg, scenario, &mut out).unwrap();
    assert!(report.passed);
    String::from_utf8(out).unwrap()
}

fn table(csv: &str) -> Vec<Vec<f64>> {
    csv.lines()
        .skip(1)
        .map(|l| l.split(',').map(|c| c.parse().unwrap()).collect())
        .collect()
}

#[test]
fn empty_config_gives_defaults() {
    let cfg = config("");
    assert_eq!(cfg.physics, PhysicsConfig::default());
    assert_eq!(cfg.delta_count, 201);
    assert!(!cfg.per_level);
}

#[test]
fn single_atom_is_accepted() {
    let cfg = config("N = 1\ndelta_count = 1\ndelta_min = 0\nnodes = 128");
    let rows = table(&run(&cfg, Scenario::Fringe));
    assert_eq!(rows.len(), 1);
    assert!((rows[0][1] - 1.0).abs() < 1e-3);
}

#[test]
fn zero_length_field_is_rejected_naming_l() {
    let out = Command::new(BIN).args(["fringe", "--l", "0"]).output().unwrap();
    assert!(!out.status.success());
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("`l`") && stderr.contains("> 0"), "{stderr}");
}

#[test]
fn unknown_key_lists_accepted_keys() {
    let out = Command::new(BIN).args(["fringe", "--lenght", "1"]).output().unwrap();
    assert!(!out.status.success());
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("`lenght`") && stderr.contains("delta_count"), "{stderr}");
}

#[test]
fn fringe_centre_is_full_transfer() {
    let cfg = config(&format!("{FAST}delta_min = -0.1\ndelta_max = 0.1\ndelta_count = 3"));
    let csv = run(&cfg, Scenario::Fringe);
    assert_eq!(csv.lines().next().unwrap(), "delta_rad_per_s,P_quantum,P_semiclassical");
    let rows = table(&csv);
    assert_eq!(rows[1][0], 0.0);
    assert_eq!(rows[1][2], 1.0);
    assert!(rows.iter().all(|r| (r[1] - r[2]).abs() < 1e-3));
}

#[test]
fn per_level_columns_follow_atom_count() {
    let cfg = config(&format!("{FAST}per_level = true\ndelta_count = 2"));
    let csv = run(&cfg, Scenario::Fringe);
    assert!(csv.starts_with("delta_rad_per_s,P_quantum,P_semiclassical,p_0,p_1\n"));
    for r in table(&csv) {
        assert!((r[1] - 0.5 * (r[3] + r[4])).abs() < 1e-15);
    }
}

#[test]
fn csv_uses_lf_and_seventeen_digits() {
    let csv = run(&config("delta_count = 5"), Scenario::TimeDomain);
    assert!(!csv.contains('\r'));
    assert!(csv.ends_with('\n'));
    for line in csv.lines().skip(1) {
        for cell in line.split(',') {
            let mantissa = cell.split('e').next().unwrap().trim_start_matches('-');
            assert_eq!(mantissa.chars().filter(char::is_ascii_digit).count(), 17, "{cell}");
        }
    }
}

#[test]
fn timedomain_uses_its_own_durations() {
    let cfg = config("tau = 2\nT = 3\nrabi = 0.7853981633974483\ndelta_count = 1\ndelta_min = 0");
    let rows = table(&run(&cfg, Scenario::TimeDomain));
    assert!((rows[0][1] - 1.0).abs() < 1e-15);
}

#[test]
fn wellimit_approaches_unit_reflection() {
    let csv = run(&config("well_steps = 5"), Scenario::WellLimit);
    assert!(csv.starts_with("L_w,abs_R_minus_1\n"));
    let rows = table(&csv);
    assert_eq!(rows.len(), 5);
    assert!(rows.windows(2).all(|w| w[1][1] < w[0][1]));
    assert!(rows[4][1] < 1e-4);
}

#[test]
fn noise_columns_and_limit() {
    let cfg = config(&format!("{FAST}delta_min = 0\ndelta_max = 0.3\nnoise_step = 0.01"));
    let csv = run(&cfg, Scenario::Noise);
    assert!(csv.starts_with("delta_rad_per_s,r_rad_per_s,r_limit_rad_per_s\n"));
    let rows = table(&csv);
    assert_eq!(rows.len(), 31);
    // spread and slope vanish together at the fringe extrema, so r stays near
    // the limit away from the ends of the half fringe
    assert!(rows[1..=25].iter().all(|r| (r[1] / r[2] - 1.0).abs() < 0.15));
    let limit = 1.0 / (10.0 * 2f64.sqrt());
    assert!(rows.iter().all(|r| (r[2] - limit).abs() < 1e-15));
}

#[test]
fn tg_density_integrates_to_atom_count() {
    let csv = run(&config("N = 3\ndensity_points = 801"), Scenario::TgDensity);
    assert!(csv.starts_with("x_m,density_per_m\n"));
    let rows = table(&csv);
    let h = rows[1][0] - rows[0][0];
    let total: f64 = rows.iter().map(|r| r[1] * h).sum();
    assert!((total - 3.0).abs() < 1e-3, "{total}");
}

#[test]
fn collision_report_passes() {
    let out = Command::new(BIN).arg("collision").output().unwrap();
    assert!(out.status.success());
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.lines().count() >= 6);
    assert!(stdout.lines().all(|l| l.starts_with("PASS ")), "{stdout}");
}

#[test]
fn emitted_config_reproduces_output() {
    let cfg = config(&format!("{FAST}v0 = 0.0123\nrabi = 1.1\ndelta_count = 4\nx0 = -7e-4"));
    let again = config(&cfg.to_config_text());
    assert_eq!(again, cfg);
    assert_eq!(run(&again, Scenario::Fringe), run(&cfg, Scenario::Fringe));
}

#[test]
fn binary_round_trip_through_dump_and_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("in.cfg");
    std::fs::write(&file, "delta_count = 7\nT = 4\n").unwrap();
    let dump = dir.path().join("resolved.cfg");
    let first = dir.path().join("a.csv");
    let status = Command::new(BIN)
        .arg("timedomain")
        .arg("--config")
        .arg(&file)
        .args(["--T", "5"])
        .arg("--out")
        .arg(&first)
        .arg("--dump-config")
        .arg(&dump)
        .status()
        .unwrap();
    assert!(status.success());
    let resolved = std::fs::read_to_string(&dump).unwrap();
    assert!(resolved.contains("T = 5.0000000000000000e0"));
    assert!(resolved.contains("delta_count = 7"));

    let second = dir.path().join("b.csv");
    let status = Command::new(BIN)
        .arg("timedomain")
        .arg("--config")
        .arg(&dump)
        .arg("--out")
        .arg(&second)
        .status()
        .unwrap();
    assert!(status.success());
    assert_eq!(std::fs::read(&first).unwrap(), std::fs::read(&second).unwrap());
}

#[test]
fn header_block_echoes_derived_quantities() {
    let out = Command::new(BIN)
        .args(["timedomain", "--delta_count", "2"])
        .output()
        .unwrap();
    let stderr = String::from_utf8_lossy(&out.stderr);
    for key in ["# l = ", "tau_field", "T_flight", "k0", "delta0"] {
        assert!(stderr.contains(key), "missing {key}: {stderr}");
    }
}

#[test]
fn thread_count_does_not_change_output() {
    let args = ["fringe", "--nodes", "128", "--N", "2", "--delta_count", "6"];
    let one = Command::new(BIN).args(args).env("RAMSEY_TG_THREADS", "1").output().unwrap();
    let three = Command::new(BIN).args(args).env("RAMSEY_TG_THREADS", "3").output().unwrap();
    assert!(one.status.success() && three.status.success());
    assert_eq!(one.stdout, three.stdout);

    let bad = Command::new(BIN).args(args).env("RAMSEY_TG_THREADS", "0").output().unwrap();
    assert!(!bad.status.success());
    assert!(String::from_utf8_lossy(&bad.stderr).contains("RAMSEY_TG_THREADS"));
}

proptest! {
    #[test]
    fn resolved_config_reparses_exactly(
        l in 1e-4f64..0.1,
        gap in 0.0f64..1.0,
        v0 in 1e-3f64..1.0,
        x0 in -1e-2f64..-1e-5,
        n in 1usize..50,
        rabi in 0.0f64..100.0,
    ) {
        let text = format!("l = {l}\nL = {gap}\nv0 = {v0}\nx0 = {x0}\nN = {n}\nrabi = {rabi}");
        let cfg = config(&text);
        prop_assert_eq!(config(&cfg.to_config_text()), cfg);
    }
}

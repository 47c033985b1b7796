use std::process::{Command, Output};
use std::time::{Duration, Instant};

use phasedetect_core::analytic::cat_overlap_zero;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_phasedetect")).args(args).output().expect("binary runs")
}

fn rows(out: &Output) -> Vec<Vec<f64>> {
    String::from_utf8(out.stdout.clone())
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(|f| f.parse().unwrap_or(f64::NAN)).collect())
        .collect()
}

#[test]
fn fock_overlap_grid() {
    let out = run(&["overlap", "--family", "fock", "--n", "1", "--delta-max", "3", "--steps", "300"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout.clone()).unwrap();
    assert!(text.starts_with("delta,analytic,numeric,abs_diff\n"));
    assert!(!text.contains('\r'));
    let rows = rows(&out);
    assert_eq!(rows.len(), 300);
    let at_one = rows.iter().find(|r| r[0] == 1.0).expect("delta = 1 on the grid");
    assert!(at_one[1].abs() < 1e-12);
    assert!(rows.iter().all(|r| r[3] < 1e-8));
}

#[test]
fn cat_overlap_sign_change_near_first_zero() {
    let (max, steps) = (1.5, 300);
    let out = run(&["overlap", "--family", "cat", "--alpha", "1.5", "--delta-max", "1.5", "--steps", "300"]);
    assert!(out.status.success());
    let rows = rows(&out);
    let crossing = rows.windows(2).find(|w| w[0][1] > 0.0 && w[1][1] <= 0.0).expect("sign change");
    let zero = cat_overlap_zero(1.5, 0);
    assert!((crossing[0][0] - zero).abs() <= max / steps as f64);
    assert!(rows.iter().all(|r| r[3] < 1e-8));
}

#[test]
fn missing_required_flags_are_validation_errors() {
    let out = run(&["overlap", "--delta-max", "3"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("Usage"));
    // family-specific parameter
    assert_eq!(run(&["overlap", "--family", "cat", "--delta-max", "3"]).status.code(), Some(1));
    assert_eq!(run(&["evaluate", "--family", "fock", "--n", "1", "--eta", "1.5"]).status.code(), Some(1));
    assert_eq!(run(&["figure", "7"]).status.code(), Some(1));
    assert_eq!(run(&["parity", "--family", "fock", "--n", "1", "--delta", "1"]).status.code(), Some(1));
}

#[test]
fn help_exits_zero() {
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    assert_eq!(run(&["--version"]).status.code(), Some(0));
}

#[test]
fn lossy_fock_without_closed_form_needs_the_oracle() {
    let refused = run(&["evaluate", "--family", "fock", "--n", "3", "--eta", "0.9"]);
    assert_eq!(refused.status.code(), Some(1));
    let accepted = run(&["evaluate", "--family", "fock", "--n", "3", "--eta", "0.9", "--oracle"]);
    assert!(accepted.status.success());
    // p_fp = 1 - η³ for a three-photon probe
    assert!((rows(&accepted)[0][6] - (1.0 - 0.9f64.powi(3))).abs() < 1e-9);
}

#[test]
fn figure5_lossless_column_is_zero() {
    let out = run(&["figure", "5"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout.clone()).unwrap();
    let header: Vec<&str> = text.lines().next().unwrap().split(',').collect();
    let col = header.iter().position(|h| *h == "p_fp_eta_1").expect("eta = 1 column");
    let rows = rows(&out);
    assert_eq!(rows.len(), 200);
    assert!(rows.iter().all(|r| r[col] == 0.0));
}

#[test]
fn figure2_displaced_single_photon_has_no_one_photon_weight() {
    let rows = rows(&run(&["figure", "2"]));
    assert_eq!(rows[1][0], 1.0);
    assert_eq!(rows[1][1], 1.0);
    assert!(rows[1][2].abs() < 1e-12);
}

#[test]
fn figure3_parity_starts_at_one() {
    let rows = rows(&run(&["figure", "3"]));
    assert_eq!(rows.len(), 500);
    assert_eq!(rows[0], vec![0.0, 1.0, 1.0]);
    assert_eq!(rows[499][0], 2.5);
}

#[test]
fn figure4_shape() {
    let rows = rows(&run(&["figure", "4"]));
    let after_two: Vec<&Vec<f64>> = rows.iter().filter(|r| r[0] >= 2.0).collect();
    assert!(after_two.windows(2).all(|w| w[1][2] <= w[0][2] && w[1][3] >= w[0][3]));
    assert!(after_two.last().unwrap()[2] < 0.1);
}

#[test]
fn sweep_matches_values_order_and_reports_discrepancy() {
    let out = run(&[
        "sweep", "--family", "cat", "--alpha", "2", "--axis", "eta", "--values", "0.98,0.5,1,0.8", "--oracle",
    ]);
    assert!(out.status.success());
    let rows = rows(&out);
    assert_eq!(rows.iter().map(|r| r[0]).collect::<Vec<_>>(), vec![0.98, 0.5, 1.0, 0.8]);
    assert!(rows.iter().all(|r| r[10] < 1e-6));
    assert_eq!(rows[2][4], 0.0);
    assert!(String::from_utf8_lossy(&out.stderr).contains("max_discrepancy"));
}

#[test]
fn out_flag_writes_file() {
    let path = std::env::temp_dir().join(format!("phasedetect-out-{}.csv", std::process::id()));
    let out = run(&["optimize", "--family", "cat", "--alpha", "2", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    std::fs::remove_file(&path).unwrap();
    assert!(text.starts_with("phi0,delta,delta_detected,source"));
    assert!(text.contains("parity-minimized"));
}

#[test]
fn verify_tolerance_below_precision_fails_with_code_3() {
    let out = run(&["verify", "--grid", "small", "--tolerance", "1e-15"]);
    assert_eq!(out.status.code(), Some(3));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().any(|l| l.contains(",fail,")));
    assert!(text.lines().any(|l| l.contains(",pass,")));
}

#[test]
fn verify_small_grid_is_quick() {
    let start = Instant::now();
    let out = run(&["verify", "--grid", "small"]);
    assert!(start.elapsed() < Duration::from_secs(10));
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("check,status,max_discrepancy,tolerance,points\n"));
    assert!(text.lines().skip(1).all(|l| l.split(',').nth(1) == Some("pass")));
}

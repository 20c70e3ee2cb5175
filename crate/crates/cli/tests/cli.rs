use std::process::{Command, Output};

use bergman::weights::RadialWeightSpec;
use serde_json::Value;

const COS_WEIGHT: &str = r#"{"family":"mittag_leffler","n":-1,"alpha":1,"m":0.5}"#;

fn bergman(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bergman"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn stderr_json(out: &Output) -> Value {
    let text = String::from_utf8_lossy(&out.stderr);
    serde_json::from_str(text.lines().last().expect("an error line")).expect("stderr is JSON")
}

#[test]
fn moments_of_the_cos_weight_are_even_factorials() {
    let out = bergman(&["moments", "--weight", COS_WEIGHT, "--k-max", "3"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("k,W_k,log_W_k,provenance"));
    for (k, want) in [1.0, 2.0, 24.0, 720.0].into_iter().enumerate() {
        let row: Vec<&str> = lines.next().unwrap().split(',').collect();
        assert_eq!(row[0], k.to_string());
        let got: f64 = row[1].parse().unwrap();
        assert!((got - want).abs() < 1e-13 * want, "k={k}: {got}");
        assert_eq!(row[3], "closed_form");
    }
    assert_eq!(lines.next(), None);
}

#[test]
fn ml_eval_of_e() {
    let v = stdout_json(&bergman(&["ml-eval", "--beta", "1", "--gamma", "1", "--z", "1,0"]));
    assert!((v["value"][0].as_f64().unwrap() - std::f64::consts::E).abs() < 1e-10);
    assert_eq!(v["value"][1].as_f64(), Some(0.0));
    assert!(v["terms"].as_u64().unwrap() > 0);
    assert!(v["tail_bound"].as_f64().unwrap() < 1e-10);
}

#[test]
fn cos_kernel_zeros() {
    let v = stdout_json(&bergman(&[
        "zeros", "--weight", COS_WEIGHT, "--w", "1,0", "--radius", "30",
    ]));
    assert_eq!(v["count"], 2);
    let zeros = v["zeros"].as_array().unwrap();
    let h = std::f64::consts::FRAC_PI_2;
    for (z, want) in zeros.iter().zip([-h * h, -9.0 * h * h]) {
        assert!((z[0].as_f64().unwrap() - want).abs() < 1e-8);
        assert!(z[1].as_f64().unwrap().abs() < 1e-8);
    }
    // the emitted weight re-parses to the same spec
    let emitted = serde_json::to_string(&v["weight"]).unwrap();
    assert_eq!(
        RadialWeightSpec::from_json(&emitted).unwrap(),
        RadialWeightSpec::from_json(COS_WEIGHT).unwrap()
    );
}

#[test]
fn zero_count_scan_as_csv() {
    let w = r#"{"family":"mittag_leffler","n":0,"alpha":1,"m":1.5}"#;
    let out = bergman(&[
        "zeros", "--weight", w, "--w", "1,0", "--radius", "16", "--scan", "2,4,8,16", "--format", "csv",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let counts: Vec<&str> = text.lines().skip(1).map(|l| l.split(',').nth(1).unwrap()).collect();
    assert_eq!(counts, ["0", "2", "6", "20"]);
}

#[test]
fn identical_runs_are_byte_identical() {
    let runs = [
        vec![
            "kernel-eval",
            "--weight",
            r#"{"family":"truncated_disk","q":100}"#,
            "--z",
            "0.3,0.1",
            "--w",
            "-0.2,0.4",
        ],
        vec!["ramadanov", "--q-ladder", "10,1000", "--grid-n", "4"],
        vec![
            "kernel-grid",
            "--weight",
            COS_WEIGHT,
            "--grid",
            "polar:1:3",
            "--path",
            "series",
        ],
    ];
    for args in runs {
        let (a, b) = (bergman(&args), bergman(&args));
        assert!(a.status.success());
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn kernel_grid_covers_all_pairs() {
    let out = bergman(&["kernel-grid", "--weight", COS_WEIGHT, "--grid", "polar:2:3"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    // origin plus 2 rings of 3 angles = 7 points, 49 pairs
    assert_eq!(text.lines().count(), 50);
    assert_eq!(text.lines().next(), Some("re_z,im_z,re_w,im_w,re_K,im_K"));
    for line in text.lines().skip(1) {
        let f: Vec<f64> = line.split(',').map(|x| x.parse().unwrap()).collect();
        let s = num_complex::Complex64::new(f[0], f[1]) * num_complex::Complex64::new(f[2], -f[3]);
        let want = s.sqrt().cosh();
        assert!((f[4] - want.re).abs() < 1e-9 && (f[5] - want.im).abs() < 1e-9, "{line}");
    }
}

#[test]
fn reproduce_check_reports_a_small_residual() {
    let v = stdout_json(&bergman(&[
        "reproduce-check",
        "--weight",
        r#"{"family":"truncated_disk","q":100}"#,
        "--poly",
        "1,0;0,-1;0.5,0.5",
        "--z",
        "0.3,-0.2",
    ]));
    assert!(v["residual"].as_f64().unwrap() < 1e-8);
}

#[test]
fn output_file_matches_stdout() {
    let path = std::env::temp_dir().join(format!("bergman-cli-test-{}.json", std::process::id()));
    let args = ["ml-eval", "--beta", "0.5", "--gamma", "1", "--z", "-2,1"];
    let direct = bergman(&args);
    let mut with_out = args.to_vec();
    let p = path.to_str().unwrap();
    with_out.extend(["--out", p]);
    let out = bergman(&with_out);
    assert!(out.status.success() && out.stdout.is_empty());
    assert_eq!(std::fs::read(&path).unwrap(), direct.stdout);
    std::fs::remove_file(&path).ok();
}

#[test]
fn validation_errors_exit_two_with_json() {
    let cases: [&[&str]; 4] = [
        &[
            "kernel-eval",
            "--weight",
            r#"{"family":"truncated_disk","q":10,"extra":1}"#,
            "--z",
            "0,0",
            "--w",
            "0,0",
        ],
        &["ml-eval", "--beta", "-1", "--gamma", "1", "--z", "1,0"],
        &["ml-eval", "--beta", "1", "--gamma", "1", "--z", "1,0", "--tol", "0"],
        &[
            "kernel-eval",
            "--weight",
            r#"{"family":"truncated_disk","q":10}"#,
            "--z",
            "2,0",
            "--w",
            "0,0",
        ],
    ];
    for args in cases {
        let out = bergman(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        let e = stderr_json(&out);
        assert!(e["code"].is_string() && e["message"].is_string(), "{e}");
        assert!(out.stdout.is_empty());
    }
    assert_eq!(bergman(&["no-such-command"]).status.code(), Some(2));
}

#[test]
fn accuracy_errors_exit_three() {
    let out = bergman(&["ml-eval", "--beta", "1", "--gamma", "1", "--z", "1000,0"]);
    assert_eq!(out.status.code(), Some(3));
    let e = stderr_json(&out);
    assert_eq!(e["code"], "accuracy");
    assert_eq!(e["context"]["subcommand"], "ml-eval");
}

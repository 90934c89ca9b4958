use std::path::Path;
use std::process::{Command, Output};

fn lab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ginibre-lab"))
        .args(args)
        .env_remove("GINIBRE_LAB_THREADS")
        .output()
        .unwrap()
}

fn path_arg(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn read_rows(path: &Path) -> Vec<Vec<String>> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .map(|line| line.split(',').map(str::to_owned).collect())
        .collect()
}

fn manifest_without_wall_time(path: &Path) -> serde_json::Value {
    let mut json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    json.as_object_mut().unwrap().remove("wall_time_seconds");
    json
}

#[test]
fn zero_matrix_size_is_a_usage_error_without_output() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("onepoint.csv");
    let output = lab(&["onepoint", "--n", "0", "--out", path_arg(&out)]);
    assert_eq!(output.status.code(), Some(2));
    assert!(!out.exists());
    assert!(!dir.path().join("onepoint.json").exists());
}

#[test]
fn malformed_flags_are_usage_errors() {
    assert_eq!(lab(&["density"]).status.code(), Some(2));
    assert_eq!(lab(&["mc", "--n", "4", "--symmetry", "quaternion"]).status.code(), Some(2));
    assert_eq!(lab(&["besselcheck", "--lambda-min", "-1"]).status.code(), Some(2));
    let bad_threads = Command::new(env!("CARGO_BIN_EXE_ginibre-lab"))
        .args(["density", "--delta", "0"])
        .env("GINIBRE_LAB_THREADS", "many")
        .output()
        .unwrap();
    assert_eq!(bad_threads.status.code(), Some(2));
}

#[test]
fn density_writes_csv_manifest_and_hints() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("density.csv");
    let output = lab(&[
        "density",
        "--delta",
        "-0.05",
        "--e-min",
        "0",
        "--e-max",
        "7",
        "--e-points",
        "50",
        "--out",
        path_arg(&out),
        "--gnuplot-hints",
    ]);
    assert_eq!(output.status.code(), Some(0), "{}", String::from_utf8_lossy(&output.stderr));
    let rows = read_rows(&out);
    assert_eq!(rows[0], ["E", "rho_Y", "rho_H"]);
    assert_eq!(rows.len(), 51);
    let manifest = manifest_without_wall_time(&dir.path().join("density.json"));
    assert_eq!(manifest["subcommand"], "density");
    assert_eq!(manifest["parameters"]["command"]["density"]["delta"], -0.05);
    let script = std::fs::read_to_string(dir.path().join("density.gp")).unwrap();
    assert!(script.starts_with("# gnuplot companion script\n# column 1: E\n"));
}

#[test]
fn mc_is_reproducible_from_its_seed() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let out = dir.path().join(name);
        let output = lab(&[
            "mc",
            "--n",
            "6",
            "--z-re",
            "0.5",
            "--z-im",
            "-0.2",
            "--symmetry",
            "real",
            "--samples",
            "50",
            "--seed",
            "123",
            "--out",
            path_arg(&out),
        ]);
        assert_eq!(output.status.code(), Some(0), "{}", String::from_utf8_lossy(&output.stderr));
        out
    };
    let first = run("first.csv");
    let second = run("second.csv");
    assert_eq!(std::fs::read(&first).unwrap(), std::fs::read(&second).unwrap());
    assert_eq!(
        std::fs::read(dir.path().join("first.summary.csv")).unwrap(),
        std::fs::read(dir.path().join("second.summary.csv")).unwrap()
    );
    let rows = read_rows(&first);
    assert_eq!(rows[0], ["sample_index", "seed", "lambda1", "x"]);
    assert_eq!(rows.len(), 51);

    let manifest = manifest_without_wall_time(&dir.path().join("first.json"));
    let bytes = std::fs::read(&first).unwrap();
    run("first.csv");
    assert_eq!(bytes, std::fs::read(&first).unwrap());
    assert_eq!(manifest, manifest_without_wall_time(&dir.path().join("first.json")));
    assert_eq!(manifest["master_seed"], 123);
}

#[test]
fn mc_real_shift_on_axis_has_heavier_small_tail() {
    let dir = tempfile::tempdir().unwrap();
    let cdf_at_small_x = |z_re: &str, z_im: &str, name: &str| -> f64 {
        let out = dir.path().join(name);
        let output = lab(&[
            "mc", "--n", "30", "--z-re", z_re, "--z-im", z_im, "--symmetry", "real", "--samples", "1500", "--seed", "5",
            "--x-min", "0.2", "--x-max", "0.2", "--x-points", "1", "--out", path_arg(&out),
        ]);
        assert_eq!(output.status.code(), Some(0), "{}", String::from_utf8_lossy(&output.stderr));
        let rows = read_rows(&dir.path().join(name.replace(".csv", ".summary.csv")));
        rows[1][1].parse().unwrap()
    };
    let on_axis = cdf_at_small_x("1", "0", "axis.csv");
    let imaginary = cdf_at_small_x("0", "1", "imaginary.csv");
    assert!(on_axis > imaginary, "{on_axis} vs {imaginary}");
}

#[test]
fn besselcheck_single_point() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("kernel.csv");
    let output = lab(&[
        "besselcheck",
        "--lambda-min",
        "1",
        "--lambda-max",
        "1",
        "--lambda-points",
        "1",
        "--out",
        path_arg(&out),
    ]);
    assert_eq!(output.status.code(), Some(0));
    let rows = read_rows(&out);
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0], ["lambda", "K_diag", "Im_q0_over_pi", "rel_diff"]);
    assert!(rows[1][3].parse::<f64>().unwrap() < 1e-3);
}

#[test]
fn onepoint_rows_outside_the_saddle_regime_are_nan() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("saddle.csv");
    let output = lab(&[
        "onepoint", "--n", "100", "--method", "saddle", "--e-min", "1e-4", "--e-max", "1", "--e-points", "2", "--log-grid",
        "--out", path_arg(&out),
    ]);
    assert_eq!(output.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&output.stderr).contains("warning"));
    let rows = read_rows(&out);
    assert_eq!(rows[1][1], "NaN");
    assert_ne!(rows[2][1], "NaN");

    let odd = dir.path().join("odd.csv");
    let output = lab(&["onepoint", "--n", "5", "--method", "real", "--out", path_arg(&odd), "--e-points", "1"]);
    assert_eq!(output.status.code(), Some(1));
    assert!(odd.exists());
}

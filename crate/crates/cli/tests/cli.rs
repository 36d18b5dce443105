use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_ifimage"));
    cmd.env_remove("IFIMAGE_OUTPUT_DIR");
    cmd
}

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn run(args: &[&str], dir: &Path) -> Output {
    bin().args(args).current_dir(dir).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn config(name: &str) -> String {
    configs().join(name).display().to_string()
}

fn column(csv: &str, name: &str) -> Vec<f64> {
    let mut lines = csv.lines();
    let idx = lines.next().unwrap().split(',').position(|h| h == name).unwrap();
    lines.map(|l| l.split(',').nth(idx).unwrap().parse().unwrap()).collect()
}

fn json(text: &str) -> serde_json::Value {
    serde_json::from_str(text).unwrap()
}

#[test]
fn wire_scan_has_the_plateau_and_analyzes() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["scan", &config("wire.toml"), "-o", "wire.csv", "--plot"], dir.path());
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let csv = std::fs::read_to_string(dir.path().join("wire.csv")).unwrap();
    assert!(csv.starts_with("x_um,p_norm,p_ifm,p_abs,p_noresult\n"));
    let peak = column(&csv, "p_ifm").into_iter().fold(0.0, f64::max);
    assert!((peak - 0.24255).abs() < 1e-9, "{peak}");
    assert!(dir.path().join("wire.meta.json").exists());
    assert!(std::fs::read_to_string(dir.path().join("wire.svg")).unwrap().starts_with("<svg"));

    let o = run(&["analyze", "wire.csv", "--kind", "width"], dir.path());
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let report = json(&stdout(&o));
    for w in report["widths"].as_array().unwrap() {
        let fwhm = w["fwhm"].as_f64().unwrap();
        assert!((fwhm - 95.5).abs() / 95.5 < 0.02, "{fwhm}");
    }

    let o = run(&["analyze", "wire.csv", "--kind", "edge"], dir.path());
    assert_eq!(code(&o), 4);
    assert!(stderr(&o).contains("not a knife edge"));
}

#[test]
fn absent_object_sits_on_the_visibility_floor() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["scan", &config("absent.toml"), "-o", "absent.csv"], dir.path());
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let csv = std::fs::read_to_string(dir.path().join("absent.csv")).unwrap();
    for p in column(&csv, "p_ifm") {
        assert!((p - 0.0347).abs() < 5e-5, "{p}");
    }
    let o = run(&["analyze", "absent.csv", "--kind", "phase"], dir.path());
    assert_eq!(code(&o), 4, "coherent scans carry no phase profile");
}

#[test]
fn knife_edge_recovers_the_spot() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&run(&["scan", &config("knife_edge.toml"), "-o", "ke.csv"], dir.path())), 0);
    let o = run(&["analyze", "ke.csv", "--kind", "edge", "-o", "report.json"], dir.path());
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let report = json(&std::fs::read_to_string(dir.path().join("report.json")).unwrap());
    let spot = report["resolution"]["spot_fwhm"].as_f64().unwrap();
    let rayleigh = report["resolution"]["rayleigh"].as_f64().unwrap();
    assert!((spot - 9.1).abs() <= 0.1 && (rayleigh - 10.7).abs() <= 0.2, "{spot} {rayleigh}");
}

#[test]
fn fiber_phase_comes_back_from_the_profile() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["scan", &config("fiber.toml"), "-o", "fiber.csv"], dir.path());
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(stdout(&o).contains("K = 1.0326"));
    let o = run(&["analyze", "fiber.csv", "--kind", "phase"], dir.path());
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let report = json(&stdout(&o));
    let peak = report["phase_profile"]
        .as_array()
        .unwrap()
        .iter()
        .filter_map(|p| p["phi"].as_f64())
        .fold(0.0, f64::max);
    assert!((peak - 1.81).abs() < 0.01, "{peak}");
}

#[test]
fn slit_scan_measures_the_gap() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&run(&["scan", &config("slit.toml"), "-o", "slit.csv"], dir.path())), 0);
    let o = run(&["analyze", "slit.csv", "--kind", "width", "--channel", "transmission"], dir.path());
    let report = json(&stdout(&o));
    let fwhm = report["widths"][0]["fwhm"].as_f64().unwrap();
    assert!((fwhm - 40.0).abs() < 0.4, "{fwhm}");
}

#[test]
fn sweep_rows() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["sweep", "--eps", "0", "--plot"], dir.path());
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let csv = std::fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
    assert!(csv.starts_with("r,p_ifm,eta\n"));
    let (r, eta) = (column(&csv, "r"), column(&csv, "eta"));
    let mid = r.iter().position(|&x| (x - 0.5).abs() < 1e-9).unwrap();
    assert!((eta[mid] - 1.0 / 3.0).abs() < 1e-12);
    assert!(dir.path().join("sweep.svg").exists());

    let o = run(&["sweep", "--points", "1", "-o", "one.csv"], dir.path());
    assert_eq!(code(&o), 0);
    let csv = std::fs::read_to_string(dir.path().join("one.csv")).unwrap();
    assert_eq!(column(&csv, "r"), vec![0.5]);

    let o = run(&["sweep", "--eps", "0.01", "--points", "99", "--r-min", "0.01", "--r-max", "0.99", "-o", "x.csv"], dir.path());
    assert_eq!(code(&o), 0);
    let csv = std::fs::read_to_string(dir.path().join("x.csv")).unwrap();
    let eta = column(&csv, "eta");
    let top = eta.iter().cloned().fold(0.0, f64::max);
    assert!(eta[0] < top && eta[9] > eta[0], "rises from the low-R end");

    assert_eq!(code(&run(&["sweep", "--eps", "0.7"], dir.path())), 2);
    assert_eq!(code(&run(&["sweep", "--points", "0"], dir.path())), 2);
}

#[test]
fn monte_carlo_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config("balanced_opaque.toml");
    let a = run(&["mc", &cfg, "--seed", "9"], dir.path());
    let b = run(&["mc", &cfg, "--seed", "9"], dir.path());
    assert_eq!(code(&a), 0, "{}", stderr(&a));
    assert_eq!(a.stdout, b.stdout);
    let tally = json(&stdout(&a));
    let n = tally["n_total"].as_f64().unwrap();
    for (key, p) in [("n_ifm", 0.25), ("n_abs", 0.5), ("n_noresult", 0.25)] {
        let f = tally[key].as_f64().unwrap() / n;
        assert!((f - p).abs() <= 3.0 * (p * (1.0 - p) / n).sqrt(), "{key}: {f}");
    }
    assert_eq!(code(&run(&["mc", &cfg, "--n", "0"], dir.path())), 2);
}

#[test]
fn spot_prediction() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["spot", "--wavelength-nm", "670", "--focal-mm", "60", "--aperture-mm", "5", "--beam-mm", "25"], dir.path());
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    assert!(out.contains("K = 1.0325") && out.contains("d = 8.302") && out.contains("d_R = 9.79"), "{out}");

    let o = run(&["spot", "--wavelength-nm", "670", "--focal-mm", "60", "--aperture-mm", "5", "--beam-mm", "10"], dir.path());
    assert!(stdout(&o).contains("K = 1.052650"));

    let o = run(&["spot", "--wavelength-nm", "670", "--focal-mm", "60", "--aperture-mm", "5", "--beam-mm", "1"], dir.path());
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("pole"));
}

#[test]
fn bad_inputs_map_to_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "[interferometer]\nt1 = 0.5\nt2 = 0.5\n\n[scan]\nstart = 0\nstop = 10\nstep = 1\nspeed = 3\n").unwrap();
    let o = run(&["scan", "bad.toml"], dir.path());
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("bad.toml:9:"), "{}", stderr(&o));

    std::fs::write(&bad, "[interferometer]\nt1 = 0.5\nt2 = 1.5\n").unwrap();
    let o = run(&["scan", "bad.toml"], dir.path());
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("bad.toml:3:"), "{}", stderr(&o));

    assert_eq!(code(&run(&["scan", "missing.toml"], dir.path())), 3);
    assert_eq!(code(&run(&["analyze", "missing.csv", "--kind", "width"], dir.path())), 3);
    assert_eq!(code(&run(&["frobnicate"], dir.path())), 2);

    std::fs::write(dir.path().join("junk.csv"), "x_um,p_norm,p_ifm,p_abs,p_noresult\n1,2,oops,4,5\n").unwrap();
    std::fs::write(dir.path().join("junk.meta.json"), "{}").unwrap();
    let o = run(&["analyze", "junk.csv", "--kind", "width"], dir.path());
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("junk.csv:2:"), "{}", stderr(&o));

    let ro = dir.path().join("file");
    std::fs::write(&ro, "").unwrap();
    let o = run(&["sweep", "-o", "file/sweep.csv"], dir.path());
    assert_eq!(code(&o), 3);
}

#[test]
fn output_dir_env_var_is_honored() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("results");
    let o = bin()
        .args(["sweep", "-o", "s.csv"])
        .env("IFIMAGE_OUTPUT_DIR", &out)
        .current_dir(dir.path())
        .output()
        .unwrap();
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(out.join("s.csv").exists());

    let o = bin()
        .args(["--output-dir", out.to_str().unwrap(), "scan", &config("absent.toml"), "-o", "sub/a.csv", "--plot"])
        .current_dir(dir.path())
        .output()
        .unwrap();
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    for name in ["a.csv", "a.meta.json", "a.svg"] {
        assert!(out.join("sub").join(name).exists(), "{name}");
    }
}

#[test]
fn demo_is_complete_and_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&run(&["demo", "a"], dir.path())), 0);
    assert_eq!(code(&run(&["--output-dir", "b", "demo", "."], dir.path())), 0);

    let a = dir.path().join("a");
    let mut names: Vec<_> = std::fs::read_dir(&a).unwrap().map(|e| e.unwrap().file_name()).collect();
    names.sort();
    assert_eq!(names.len(), 19);
    for name in &names {
        let x = std::fs::read(a.join(name)).unwrap();
        let y = std::fs::read(dir.path().join("b").join(name)).unwrap();
        assert_eq!(x, y, "{name:?} differs between runs");
    }

    let sweep = std::fs::read_to_string(a.join("sweep_eps0.csv")).unwrap();
    for (r, eta) in column(&sweep, "r").into_iter().zip(column(&sweep, "eta")) {
        assert!((eta - (1.0 - r) / (2.0 - r)).abs() < 1e-11);
    }

    let report = json(&std::fs::read_to_string(a.join("wire_widths.json")).unwrap());
    let rows = report["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 5);
    for row in rows {
        for key in ["transmission_error", "ifm_error"] {
            assert!(row[key].as_f64().unwrap().abs() < 0.02, "{row}");
        }
    }
}

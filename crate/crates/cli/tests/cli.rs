use lowfreq2d::grid::RadialGrid;
use lowfreq2d::radial::RadialFunction;
use serde_json::Value;
use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::sync::Arc;
use tempfile::TempDir;

const BIN: &str = env!("CARGO_BIN_EXE_lowfreq2d");

struct Run {
    out: PathBuf,
    output: Output,
    _dir: TempDir,
}

impl Run {
    fn code(&self) -> i32 {
        self.output.status.code().expect("exited normally")
    }

    fn json(&self, name: &str) -> Value {
        serde_json::from_str(&fs::read_to_string(self.out.join(name)).unwrap()).unwrap()
    }

    fn csv(&self, name: &str) -> Vec<BTreeMap<String, String>> {
        let text = fs::read_to_string(self.out.join(name)).unwrap();
        let mut lines = text.lines();
        let header: Vec<&str> = lines.next().unwrap().split(',').collect();
        lines
            .map(|l| {
                header
                    .iter()
                    .map(|h| h.to_string())
                    .zip(l.split(',').map(str::to_string))
                    .collect()
            })
            .collect()
    }

    fn stderr_json(&self) -> Value {
        serde_json::from_slice(&self.output.stderr).expect("stderr is one JSON object")
    }
}

fn run(cmd: &str, config: &str) -> Run {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("case.toml");
    fs::write(&cfg, config).unwrap();
    let out = dir.path().join("out");
    let output = Command::new(BIN)
        .args([
            cmd,
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    Run {
        out,
        output,
        _dir: dir,
    }
}

fn ok(cmd: &str, config: &str) -> Run {
    let r = run(cmd, config);
    assert_eq!(
        r.code(),
        0,
        "{cmd} failed: {}",
        String::from_utf8_lossy(&r.output.stderr)
    );
    r
}

fn field(v: &Value) -> f64 {
    v.as_f64().unwrap()
}

const DIRICHLET: &str = "kind = disk\nradius = 1\nbc = dirichlet\ngrid.min = 1e-6\ngrid.max = 1e-3\nfit.jmax = 1\nfit.kmax = 2\n";
const WELL: &str =
    "kind = potential\nbreaks = 0.6, 1.2\nvalues = -3, 1.5\nfit.jmax = 1\nfit.kmax = 2\n";

#[test]
fn dirichlet_disk_classification() {
    let r = ok("classify", DIRICHLET);
    let c = r.json("classify.json");
    assert_eq!(c["dimG0modG1"], 0);
    assert_eq!(c["dimG1modG2"], 0);
    assert!(field(&c["capacity"]).abs() < 1e-9);
}

#[test]
fn capacity_of_radius_two_disk() {
    let r = ok("capacity", "kind = disk; radius = 2; bc = dirichlet");
    let c = r.json("capacity.json");
    assert!((field(&c["capacity"]) - 2f64.ln()).abs() < 1e-8);
    let a = field(&c["a"][0]);
    let g = field(&c["gamma0"][0]);
    assert!((a - (g - 2f64.ln())).abs() < 1e-8);
}

#[test]
fn capacity_refuses_s_resonant_scatterer() {
    let r = run("capacity", "kind = disk; radius = 1; bc = neumann");
    assert_eq!(r.code(), 2);
    assert_eq!(r.stderr_json()["error"], "validation");
}

#[test]
fn verify_well_identities() {
    let r = ok("verify", WELL);
    let rows = r.csv("identities.csv");
    assert!(!rows.is_empty());
    for row in &rows {
        let res: f64 = row["residual"].parse().unwrap();
        assert!(res < 1e-6, "{}: {res:e}", row["identity"]);
        assert_eq!(row["pass"], "true");
    }
}

fn bump_integral(a: f64, b: f64) -> f64 {
    let edges: Vec<f64> = (0..=32).map(|i| a + (b - a) * i as f64 / 32.0).collect();
    let grid = Arc::new(RadialGrid::from_edges(edges, 16).unwrap());
    RadialFunction::bump(0, grid, a, b).integral().re
}

#[test]
fn neumann_log_coefficient() {
    let cfg = "kind = disk; radius = 1; bc = neumann\nf.inner = 1.2; f.outer = 2\ng.inner = 1.5; g.outer = 2.5\nfit.jmax = 1; fit.kmax = 3\n";
    let r = ok("expand", cfg);
    let fit = r.json("fit.json");
    assert_eq!(fit["accepted"], true);
    let expect = -bump_integral(1.2, 2.0) * bump_integral(1.5, 2.5) / (2.0 * PI);
    let terms = fit["series"]["terms"].as_array().unwrap();
    let log = terms
        .iter()
        .find(|t| t[0]["type"] == "regular" && t[0]["j"] == 0 && t[0]["k"] == 1)
        .expect("log term present");
    let got = field(&log[1][0]);
    assert!(
        (got - expect).abs() < 1e-2 * expect.abs(),
        "{got} vs {expect}"
    );
    let samples = r.csv("samples.csv");
    assert!(samples.len() >= 24);
    assert!(samples.iter().any(|s| s["held_out"] == "true"));
}

#[test]
fn phase_matches_asymptotic_for_dirichlet_disk() {
    let r = ok(
        "phase",
        &format!("{DIRICHLET}phase.min = 1e-8\nphase.max = 1e-4\nphase.count = 5\n"),
    );
    let rows = r.csv("phase.csv");
    assert_eq!(rows.len(), 5);
    for row in &rows {
        let s: f64 = row["sigma_re"].parse().unwrap();
        let a: f64 = row["sigma_asymptotic_re"].parse().unwrap();
        let lambda: f64 = row["lambda"].parse().unwrap();
        let l = lambda.ln();
        assert!(
            (s - a).abs() < 10.0 / (l * l * l.abs()),
            "λ = {lambda:e}: {s} vs {a}"
        );
        let det: f64 = row["det_modulus"].parse().unwrap();
        assert!((det - 1.0).abs() < 1e-10);
    }
}

#[test]
fn phase_leaves_asymptotic_empty_when_unavailable() {
    let r = ok(
        "phase",
        "kind = disk; radius = 1; bc = neumann\nphase.count = 3\n",
    );
    for row in r.csv("phase.csv") {
        assert_eq!(row["sigma_asymptotic_re"], "");
    }
}

const EIGEN: &str = "kind = potential\nbreaks = 0.5, 1\nvalues = -1, -0.5\ntune.mode = 2\ntune.lo = 26.5\ntune.hi = 27.5\n\
perturb.breaks = 1\nperturb.values = 1\nepsilons = 0.01, 0.04\npole.mode = 2\npole.seed = 0.07-0.0001i\n\
phase.min = 0.05\nphase.max = 0.3\nphase.count = 41\n";

#[test]
fn perturbed_eigenvalue_gives_resonance() {
    let r = ok("perturb", EIGEN);
    let summary = r.json("perturb.json");
    let list = summary.as_array().unwrap();
    assert_eq!(list.len(), 2);
    let mut moduli = Vec::new();
    for e in list {
        let p = &e["poles"][0];
        assert_eq!(p["kind"], "resonance");
        let arg = field(&p["lambda"]["arg"]);
        assert!(arg < 0.0 && arg > -0.1);
        moduli.push(field(&p["lambda"]["modulus"]));
    }
    assert!(moduli[1] > moduli[0]);
    assert_eq!(r.csv("perturb.csv").len(), 2 * 41);
}

#[test]
fn resonance_from_seed() {
    let cfg = "kind = potential\nbreaks = 1\nvalues = 30\npole.mode = 0\npole.seed = 2-0.5i\n";
    let r = ok("resonance", cfg);
    let p = &r.json("resonance.json")["poles"][0];
    assert!(field(&p["residual"]) < 1e-8);
    assert!(field(&p["lambda"]["arg"]) < 0.0);
}

#[test]
fn free_wave_matches_leading_term() {
    let r = ok(
        "wave",
        "kind = free\nf.inner = 0\nf.outer = 1\nwave.times = 1e3, 1e4\n",
    );
    for row in r.csv("wave.csv") {
        let ratio: f64 = row["ratio_free"].parse().unwrap();
        assert!((ratio - 1.0).abs() < 1e-5, "{ratio}");
    }
    assert!(r.json("wave.json")["integralF"][0].as_f64().unwrap() > 0.0);
}

fn strip_wall_time(v: &mut Value) {
    v.as_object_mut().unwrap().remove("wallTimeSeconds");
}

#[test]
fn runs_are_deterministic_and_manifest_is_complete() {
    let a = ok("expand", WELL);
    let b = ok("expand", WELL);
    let mut m = a.json("manifest.json");
    let mut n = b.json("manifest.json");
    assert_eq!(m["status"], "ok");
    assert_eq!(m["command"], "expand");
    assert_eq!(m["configHash"].as_str().unwrap().len(), 64);
    let listed: Vec<&str> = m["files"]
        .as_array()
        .unwrap()
        .iter()
        .map(|f| f.as_str().unwrap())
        .collect();
    let mut on_disk: Vec<String> = fs::read_dir(&a.out)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .filter(|f| f != "manifest.json")
        .collect();
    on_disk.sort();
    let mut sorted = listed.clone();
    sorted.sort();
    assert_eq!(sorted, on_disk);
    for f in &listed {
        assert_eq!(read(&a.out, f), read(&b.out, f), "{f} differs");
    }
    strip_wall_time(&mut m);
    strip_wall_time(&mut n);
    m["configPath"] = Value::Null;
    n["configPath"] = Value::Null;
    assert_eq!(m, n);
}

fn read(dir: &Path, f: &str) -> Vec<u8> {
    fs::read(dir.join(f)).unwrap()
}

#[test]
fn unknown_flag_is_usage_error() {
    let out = Command::new(BIN)
        .args(["classify", "--frobnicate"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(64));
}

#[test]
fn help_exits_zero() {
    let out = Command::new(BIN).arg("--help").output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("resonance"));
}

#[test]
fn bad_config_reports_line_and_key() {
    let r = run(
        "classify",
        "kind = potential\nbreaks = 1, 0.5\nvalues = 1, 2\n",
    );
    assert_eq!(r.code(), 2);
    let e = r.stderr_json();
    assert_eq!(e["error"], "validation");
    assert_eq!(e["line"], 2);
    assert_eq!(e["key"], "breaks");
    assert!(
        !r.out.exists(),
        "nothing is written for an unreadable config"
    );
}

#[test]
fn unknown_key_is_rejected() {
    let r = run("classify", "kind = free\nlmx = 3\n");
    assert_eq!(r.code(), 2);
    assert_eq!(r.stderr_json()["key"], "lmx");
}

#[test]
fn missing_config_is_io_error() {
    let dir = TempDir::new().unwrap();
    let out = Command::new(BIN)
        .args(["classify", "--config", "/nonexistent/x.toml", "--out"])
        .arg(dir.path().join("o"))
        .output()
        .unwrap();
    assert_ne!(out.status.code(), Some(0));
    let e: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(e["error"], "io");
}

#[test]
fn numerical_failure_exits_three() {
    // zero-energy eigenvalue: no resonance near the seed for the unperturbed well
    let cfg = EIGEN.replace("epsilons = 0.01, 0.04\n", "");
    let r = run("resonance", &cfg);
    assert_eq!(r.code(), 3, "{}", String::from_utf8_lossy(&r.output.stderr));
    assert_eq!(r.stderr_json()["error"], "numerical");
    assert_eq!(r.json("manifest.json")["status"], "failed");
}

#[test]
fn overfitted_expansion_is_numerical_failure() {
    let r = run(
        "expand",
        "kind = potential\nbreaks = 0.6, 1.2\nvalues = -3, 1.5\nfit.jmax = 2\nfit.kmax = 2\n",
    );
    assert_eq!(r.code(), 3);
}

use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn relacc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_relacc"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = relacc(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn fails_with(args: &[&str], code: i32) -> String {
    let out = relacc(args);
    assert_eq!(out.status.code(), Some(code), "{args:?}");
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(!stderr.trim().is_empty());
    stderr
}

fn path(dir: &TempDir, name: &str) -> PathBuf {
    dir.path().join(name)
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn read_csv(p: &Path) -> (String, Vec<Vec<f64>>) {
    let text = fs::read_to_string(p).unwrap();
    assert!(!text.contains('\r'));
    let mut lines = text.lines();
    let header = lines.next().unwrap().to_string();
    let rows = lines
        .map(|l| l.split(',').map(|c| c.parse().unwrap()).collect())
        .collect();
    (header, rows)
}

fn key_values(text: &str) -> HashMap<String, String> {
    text.lines()
        .filter_map(|l| l.split_once('='))
        .map(|(k, v)| (k.to_string(), v.to_string()))
        .collect()
}

fn sidecar(p: &Path) -> HashMap<String, String> {
    let mut name = p.as_os_str().to_owned();
    name.push(".meta.txt");
    key_values(&fs::read_to_string(name).expect("sidecar exists"))
}

const CURVE: [&str; 15] = [
    "curve", "--k1", "1", "--k2", "2", "--m", "1", "--c1", "2", "--c2", "1", "--hmin", "0.1",
    "--hmax", "4",
];

const CURVE_HIGH: [&str; 17] = [
    "curve", "--k1", "1", "--k2", "3", "--m", "0", "--c1", "1.5", "--c2", "0.25", "--lambda", "3",
    "--hmin", "0.01", "--hmax", "10",
];

fn curve_rows(dir: &TempDir, name: &str, extra: &[&str]) -> Vec<(f64, f64)> {
    let out = path(dir, name);
    let mut args = CURVE.to_vec();
    args.extend_from_slice(extra);
    args.extend_from_slice(&["--n", "100", "--out", s(&out)]);
    ok(&args);
    let (header, rows) = read_csv(&out);
    assert_eq!(header, "h,probability");
    rows.into_iter().map(|r| (r[0], r[1])).collect()
}

#[test]
fn curve_low_line_plateaus_at_half() {
    let dir = TempDir::new().unwrap();
    let rows = curve_rows(&dir, "low.csv", &["--lambda", "1"]);
    assert!(rows.len() >= 100);
    assert!(rows
        .windows(2)
        .all(|w| w[0].0 < w[1].0 && w[0].1 <= w[1].1 + 1e-15));
    for &(h, p) in &rows {
        if h >= 1.0 {
            assert_eq!(p, 0.5, "h={h}");
        } else {
            assert!(p < 0.5);
        }
    }
    let meta = sidecar(&path(&dir, "low.csv"));
    assert_eq!(meta["regime"], "low-line");
    assert_eq!(meta["hbar1"], "0.5");
    assert_eq!(meta["hbar2"], "1");
    assert_eq!(meta["h_star"], "2");
    assert!(rows.iter().any(|&(h, _)| h == 0.5) && rows.iter().any(|&(h, _)| h == 1.0));
}

#[test]
fn curve_high_line_overshoots_then_returns() {
    let dir = TempDir::new().unwrap();
    let rows = curve_rows(&dir, "high.csv", &["--lambda", "8"]);
    let (h_peak, p_peak) = rows
        .iter()
        .copied()
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .unwrap();
    assert!(p_peak > 0.6, "{p_peak}");
    assert!((h_peak - 8f64.sqrt()).abs() < 1e-12);
    assert_eq!(rows.last().unwrap().1, 0.5);
    let at_star = rows.iter().find(|r| r.0 == 2.0).unwrap();
    assert!((at_star.1 - 0.5).abs() < 1e-15);
    assert_eq!(sidecar(&path(&dir, "high.csv"))["regime"], "high-line");
}

#[test]
fn curve_legacy_is_monotone_towards_one() {
    let dir = TempDir::new().unwrap();
    let rows = curve_rows(&dir, "legacy.csv", &["--legacy"]);
    assert!(rows.windows(2).all(|w| w[0].1 < w[1].1));
    assert!(rows.last().unwrap().1 > 0.5);
    assert_eq!(sidecar(&path(&dir, "legacy.csv"))["lambda"], "inf");
}

#[test]
fn curve_flag_errors_name_the_flag() {
    let dir = TempDir::new().unwrap();
    let out = path(&dir, "x.csv");
    let base = |extra: &[&str]| {
        let mut a = vec![
            "curve", "--m", "1", "--c2", "1", "--hmin", "0.1", "--hmax", "4",
        ];
        a.extend_from_slice(extra);
        a.extend_from_slice(&["--out", s(&out)]);
        a.iter().map(|x| x.to_string()).collect::<Vec<_>>()
    };
    let run = |extra: &[&str]| {
        let a = base(extra);
        fails_with(&a.iter().map(String::as_str).collect::<Vec<_>>(), 2)
    };
    assert!(run(&["--k1", "2", "--k2", "2", "--c1", "1", "--lambda", "1"]).contains("--k2"));
    assert!(run(&["--k1", "1", "--k2", "2", "--c1", "-1", "--lambda", "1"]).contains("--c1"));
    assert!(run(&["--k1", "1", "--k2", "2", "--c1", "1", "--lambda", "0"]).contains("--lambda"));
    assert!(run(&["--k1", "1", "--k2", "2", "--c1", "1"]).contains("--lambda"));
    run(&[
        "--k1", "1", "--k2", "2", "--c1", "1", "--lambda", "1", "--legacy",
    ]);
    assert!(!out.exists());
}

#[test]
fn density_triangle_and_trapezoid() {
    let dir = TempDir::new().unwrap();
    let tri = path(&dir, "tri.csv");
    ok(&[
        "density",
        "--beta1",
        "1",
        "--beta2",
        "1",
        "--n",
        "101",
        "--out",
        s(&tri),
    ]);
    let (header, rows) = read_csv(&tri);
    assert_eq!(header, "z,f");
    for r in &rows {
        assert!((r[1] - (1.0 - r[0].abs())).abs() < 1e-12, "{r:?}");
    }
    assert_eq!(rows.first().unwrap()[0], -1.0);
    assert_eq!(rows.last().unwrap()[0], 1.0);

    let trap = path(&dir, "trap.csv");
    ok(&["density", "--beta1", "1", "--beta2", "2", "--out", s(&trap)]);
    let (_, rows) = read_csv(&trap);
    for r in &rows {
        let (z, f) = (r[0], r[1]);
        let expected = if z < -1.0 {
            (z + 2.0) / 2.0
        } else if z <= 0.0 {
            0.5
        } else {
            (1.0 - z) / 2.0
        };
        assert!((f - expected).abs() < 1e-12, "z={z}");
    }
    assert!(rows.iter().any(|r| r[0] == -1.0) && rows.iter().any(|r| r[0] == 0.0));
    assert_eq!(sidecar(&trap)["beta2"], "2");
}

#[test]
fn density_rejects_zero_bound() {
    let dir = TempDir::new().unwrap();
    let out = path(&dir, "d.csv");
    let err = fails_with(
        &["density", "--beta1", "0", "--beta2", "1", "--out", s(&out)],
        4,
    );
    assert!(err.contains("--beta1"));
}

#[test]
fn mc_agrees_with_closed_form() {
    let dir = TempDir::new().unwrap();
    let out = path(&dir, "mc.csv");
    ok(&[
        "mc",
        "--beta1",
        "1",
        "--beta2",
        "2",
        "--samples",
        "1000000",
        "--seed",
        "42",
        "--out",
        s(&out),
    ]);
    let (header, rows) = read_csv(&out);
    assert_eq!(header, "p_hat,std_err,n,closed_form");
    let r = &rows[0];
    assert_eq!(r[2], 1e6);
    assert_eq!(r[3], 0.75);
    assert!((r[0] - 0.75).abs() <= 4.0 * r[1], "{r:?}");
}

#[test]
fn mc_small_run_and_missing_samples() {
    let dir = TempDir::new().unwrap();
    let out = path(&dir, "mc.csv");
    ok(&[
        "mc",
        "--beta1",
        "1",
        "--beta2",
        "1",
        "--samples",
        "10",
        "--seed",
        "7",
        "--out",
        s(&out),
    ]);
    let (_, rows) = read_csv(&out);
    let r = &rows[0];
    assert!((0.0..=1.0).contains(&r[0]));
    assert_eq!(r[1], (r[0] * (1.0 - r[0]) / 10.0).sqrt());
    assert_eq!(r[2], 10.0);

    let err = fails_with(&["mc", "--beta1", "1", "--beta2", "1", "--out", s(&out)], 2);
    assert!(err.contains("--samples"));
}

#[test]
fn mc_output_ignores_stream_count() {
    let dir = TempDir::new().unwrap();
    let run = |streams: &str| {
        let out = path(&dir, &format!("mc{streams}.csv"));
        ok(&[
            "mc",
            "--beta1",
            "0.3",
            "--beta2",
            "1.1",
            "--samples",
            "54321",
            "--seed",
            "5",
            "--streams",
            streams,
            "--out",
            s(&out),
        ]);
        fs::read(out).unwrap()
    };
    assert_eq!(run("1"), run("7"));
}

fn write_series(dir: &TempDir, name: &str, c: f64, q: i32) -> PathBuf {
    let p = path(dir, name);
    let mut text = String::from("h,err\n");
    for j in 0..6 {
        let h = 0.5f64.powi(j);
        text.push_str(&format!("{h:e},{:e}\n", c * h.powi(q)));
    }
    fs::write(&p, text).unwrap();
    p
}

#[test]
fn calibrate_recovers_exact_constants() {
    let dir = TempDir::new().unwrap();
    let s1 = write_series(&dir, "s1.csv", 3.0, 1);
    let s2 = write_series(&dir, "s2.csv", 0.5, 2);
    let out = path(&dir, "params.txt");
    let stdout = ok(&[
        "calibrate",
        "--in",
        s(&s1),
        "--in2",
        s(&s2),
        "--k1",
        "1",
        "--k2",
        "2",
        "--m",
        "1",
        "--lambda-policy",
        "given",
        "--lambda",
        "2",
        "--out",
        s(&out),
    ]);
    let kv = key_values(&stdout);
    let c1: f64 = kv["c1"].parse().unwrap();
    let c2: f64 = kv["c2"].parse().unwrap();
    assert!(
        (c1 - 3.0).abs() < 1e-12 && (c2 - 0.5).abs() < 1e-12,
        "{stdout}"
    );
    assert_eq!(kv["lambda"], "2");
    assert!(!kv.contains_key("warning"), "{stdout}");
    assert_eq!(fs::read_to_string(&out).unwrap(), stdout);
    assert_eq!(sidecar(&out)["lambda_policy"], "given");
}

#[test]
fn calibrate_rejects_malformed_rows() {
    let dir = TempDir::new().unwrap();
    let good = write_series(&dir, "good.csv", 1.0, 1);
    let bad = path(&dir, "bad.csv");
    fs::write(&bad, "h,err\n0.5,0.25\n0.25,oops\n").unwrap();
    let err = fails_with(
        &[
            "calibrate",
            "--in",
            s(&good),
            "--in2",
            s(&bad),
            "--k1",
            "1",
            "--k2",
            "2",
            "--m",
            "1",
        ],
        3,
    );
    assert!(err.contains("line 3"), "{err}");
    fails_with(
        &[
            "calibrate",
            "--in",
            s(&good),
            "--in2",
            s(&path(&dir, "missing.csv")),
            "--k1",
            "1",
            "--k2",
            "2",
            "--m",
            "1",
        ],
        3,
    );
}

fn fitted_order(stdout: &str) -> f64 {
    key_values(stdout)["fitted_order"].parse().unwrap()
}

#[test]
fn demo_slopes_match_theory() {
    let dir = TempDir::new().unwrap();
    for (k, m) in [(1, 0), (1, 1), (2, 1), (3, 0)] {
        let out = path(&dir, &format!("fem{k}{m}.csv"));
        let stdout = ok(&[
            "demo",
            "--family",
            "fem",
            "--preset",
            "sin-pi",
            "--k",
            &k.to_string(),
            "--m",
            &m.to_string(),
            "--out",
            s(&out),
        ]);
        let expected = (k + 1 - m) as f64;
        assert!(
            (fitted_order(&stdout) - expected).abs() < 0.2,
            "k={k} m={m}: {stdout}"
        );
        let (header, rows) = read_csv(&out);
        assert_eq!(header, "h,err");
        assert_eq!(rows.len(), 5);
    }
    let out = path(&dir, "quad.csv");
    let stdout = ok(&[
        "demo",
        "--family",
        "quad",
        "--preset",
        "expx",
        "--out",
        s(&out),
    ]);
    assert!((fitted_order(&stdout) - 4.0).abs() < 0.2, "{stdout}");
    let out = path(&dir, "ode.csv");
    let stdout = ok(&[
        "demo",
        "--family",
        "ode",
        "--preset",
        "harmonic",
        "--scheme",
        "heun",
        "--error",
        "defect",
        "--h",
        "0.1,0.05,0.025,0.0125",
        "--out",
        s(&out),
    ]);
    assert!((fitted_order(&stdout) - 2.0).abs() < 0.2, "{stdout}");
    assert_eq!(
        sidecar(&out)["h"],
        "0.10000000000000001,0.050000000000000003,0.025000000000000001,0.012500000000000001"
    );
}

#[test]
fn demo_unknown_preset_lists_choices() {
    let dir = TempDir::new().unwrap();
    let out = path(&dir, "x.csv");
    let err = fails_with(
        &[
            "demo",
            "--family",
            "fem",
            "--preset",
            "nope",
            "--out",
            s(&out),
        ],
        2,
    );
    assert!(err.contains("sin-pi") && err.contains("exp"), "{err}");
}

#[test]
fn demo_calibrate_curve_round_trip() {
    let dir = TempDir::new().unwrap();
    let s1 = path(&dir, "p1.csv");
    let s2 = path(&dir, "p2.csv");
    ok(&[
        "demo",
        "--family",
        "fem",
        "--preset",
        "exp",
        "--k",
        "1",
        "--out",
        s(&s1),
    ]);
    ok(&[
        "demo",
        "--family",
        "fem",
        "--preset",
        "exp",
        "--k",
        "2",
        "--out",
        s(&s2),
    ]);
    let stdout = ok(&[
        "calibrate",
        "--in",
        s(&s1),
        "--in2",
        s(&s2),
        "--k1",
        "1",
        "--k2",
        "2",
        "--m",
        "1",
        "--lambda-policy",
        "given",
        "--lambda",
        "0.01",
    ]);
    let kv = key_values(&stdout);
    assert!(!kv.contains_key("warning"), "{stdout}");
    let curve = path(&dir, "curve.csv");
    ok(&[
        "curve",
        "--k1",
        "1",
        "--k2",
        "2",
        "--m",
        "1",
        "--c1",
        &kv["c1"],
        "--c2",
        &kv["c2"],
        "--lambda",
        &kv["lambda"],
        "--hmin",
        "0.001",
        "--hmax",
        "1",
        "--spacing",
        "log",
        "--out",
        s(&curve),
    ]);
    let (_, rows) = read_csv(&curve);
    assert!(rows.len() >= 200);
    assert!(rows.iter().all(|r| (0.0..=1.0).contains(&r[1])));
}

#[test]
fn calibrate_writes_curve_over_series_range() {
    let dir = TempDir::new().unwrap();
    let s1 = path(&dir, "p1.csv");
    let s2 = path(&dir, "p2.csv");
    ok(&[
        "demo",
        "--family",
        "fem",
        "--preset",
        "sin-pi",
        "--k",
        "1",
        "--out",
        s(&s1),
    ]);
    ok(&[
        "demo",
        "--family",
        "fem",
        "--preset",
        "sin-pi",
        "--k",
        "2",
        "--out",
        s(&s2),
    ]);
    let curve = path(&dir, "curve.csv");
    ok(&[
        "calibrate",
        "--in",
        s(&s1),
        "--in2",
        s(&s2),
        "--k1",
        "1",
        "--k2",
        "2",
        "--m",
        "1",
        "--curve-out",
        s(&curve),
        "--n",
        "20",
    ]);
    let (_, rows) = read_csv(&curve);
    assert_eq!(rows.first().unwrap()[0], 0.015625);
    assert_eq!(rows.last().unwrap()[0], 0.25);
    assert!(rows.iter().all(|r| (0.0..=1.0).contains(&r[1])));
    let meta = sidecar(&curve);
    assert_eq!(meta["command"], "calibrate");
    assert!(meta.contains_key("c1") && meta.contains_key("regime"));
}

#[test]
fn outputs_are_byte_deterministic() {
    let dir = TempDir::new().unwrap();
    let runs: [&[&str]; 4] = [
        &CURVE_HIGH,
        &["density", "--beta1", "0.7", "--beta2", "1.3"],
        &[
            "mc",
            "--beta1",
            "1",
            "--beta2",
            "3",
            "--samples",
            "20000",
            "--seed",
            "11",
        ],
        &[
            "demo",
            "--family",
            "ode",
            "--preset",
            "exp-growth",
            "--scheme",
            "euler",
        ],
    ];
    for (i, args) in runs.iter().enumerate() {
        let bytes: Vec<(Vec<u8>, Vec<u8>)> = (0..2)
            .map(|j| {
                let out = path(&dir, &format!("r{i}_{j}.csv"));
                let mut a = args.to_vec();
                a.extend_from_slice(&["--out", s(&out)]);
                ok(&a);
                let meta = fs::read_to_string(format!("{}.meta.txt", out.display())).unwrap();
                let meta: String = meta.lines().filter(|l| !l.starts_with("out=")).collect();
                (fs::read(&out).unwrap(), meta.into_bytes())
            })
            .collect();
        assert_eq!(bytes[0], bytes[1], "{args:?}");
    }
}

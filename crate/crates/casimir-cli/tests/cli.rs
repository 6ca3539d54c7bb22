use std::path::Path;
use std::process::{Command, Output};

fn casimir(config: &str, command: Option<&str>, out: &Path) -> Output {
    let cfg = out.join("config.json");
    std::fs::write(&cfg, config).unwrap();
    let mut c = Command::new(env!("CARGO_BIN_EXE_casimir"));
    c.arg("--config").arg(&cfg).arg("--out").arg(out);
    if let Some(name) = command {
        c.arg("--command").arg(name);
    }
    c.output().unwrap()
}

fn csv(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let text = std::fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let header = lines
        .next()
        .unwrap()
        .split(',')
        .map(str::to_string)
        .collect();
    (
        header,
        lines
            .map(|l| l.split(',').map(str::to_string).collect())
            .collect(),
    )
}

fn column(header: &[String], rows: &[Vec<String>], name: &str) -> Vec<f64> {
    let k = header
        .iter()
        .position(|h| h == name)
        .unwrap_or_else(|| panic!("no column {name}"));
    rows.iter().map(|r| r[k].parse().unwrap()).collect()
}

#[test]
fn slab_wick_square_midpoint() {
    let dir = tempfile::tempdir().unwrap();
    let o = casimir(
        r#"{"geometry": {"type": "slab", "d": 1}, "z_grid": {"from": 0.1, "to": 0.9, "count": 9}}"#,
        Some("wick-square"),
        dir.path(),
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert!(
        stdout.starts_with("wick-square: 9 rows, max err "),
        "{stdout}"
    );
    let (h, rows) = csv(&dir.path().join("wick-square.csv"));
    let (z, v, e) = (
        column(&h, &rows, "z"),
        column(&h, &rows, "value"),
        column(&h, &rows, "err"),
    );
    let mid = z.iter().position(|z| (z - 0.5).abs() < 1e-12).unwrap();
    assert!(
        (v[mid] + 1.0 / 24.0).abs() <= e[mid],
        "{} ± {}",
        v[mid],
        e[mid]
    );
    let svg = std::fs::read_to_string(dir.path().join("wick-square.svg")).unwrap();
    assert!(svg.contains("version=\"1.1\"") && svg.contains("<polyline"));
}

#[test]
fn half_space_conformal_stress_vanishes() {
    let dir = tempfile::tempdir().unwrap();
    let o = casimir(
        r#"{"command": "stress", "geometry": {"type": "half_space"}, "z_grid": {"from": 0.25, "to": 1.0, "count": 4}}"#,
        None,
        dir.path(),
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let (h, rows) = csv(&dir.path().join("stress.csv"));
    assert_eq!(rows.len(), 16);
    for v in column(&h, &rows, "value") {
        assert!(v.abs() <= 1e-10, "{v}");
    }
}

#[test]
fn convergence_decreases_monotonically() {
    let dir = tempfile::tempdir().unwrap();
    let o = casimir(
        r#"{"series": {"n_max": 60}}"#,
        Some("convergence"),
        dir.path(),
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let (h, rows) = csv(&dir.path().join("convergence.csv"));
    let v = column(&h, &rows, "value");
    assert_eq!(v.len(), 61);
    assert!(v.windows(2).all(|w| w[1] < w[0]));
    // each ± pair of images contributes ~ n⁻⁴, so the remainder falls like N⁻³
    let ratio = v[30] / v[60];
    assert!(ratio > 6.0 && ratio < 10.0, "{ratio}");
    assert!(dir.path().join("convergence.svg").exists());
}

#[test]
fn every_row_has_an_error_estimate() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        (
            "twopoint",
            r#"{"points": [{"x": [0, 0, 0, 0.3], "xp": [0.1, 0.2, 0, 0.6]}, {"x": [0.5, 0, 0, 0.2], "xp": [0, 0, 0, 0.7]}]}"#,
        ),
        (
            "stress",
            r#"{"xi": 0, "z_grid": {"from": 0.2, "to": 0.8, "count": 3}, "components": [[0, 0], [0, 3]]}"#,
        ),
        (
            "algebra-check",
            r#"{"functions": [{"center": [0, 0, 0, 0.5], "radii": [0.1, 0.1, 0.1, 0.1]}, {"center": [0.05, 0.1, 0, 0.5], "radii": [0.1, 0.1, 0.1, 0.1]}],
                "pairs": [[0, 1]], "pairings": ["minkowski_e", "deformed_h"]}"#,
        ),
    ];
    for (cmd, cfg) in cases {
        let o = casimir(cfg, Some(cmd), dir.path());
        assert!(
            o.status.success(),
            "{cmd}: {}",
            String::from_utf8_lossy(&o.stderr)
        );
        let (h, rows) = csv(&dir.path().join(format!("{cmd}.csv")));
        assert!(!rows.is_empty());
        let e = column(&h, &rows, "err");
        assert!(e.iter().all(|e| e.is_finite() && *e >= 0.0), "{cmd}");
        assert!(rows.iter().all(|r| r.len() == h.len()));
    }
}

#[test]
fn reruns_are_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let cfg = r#"{"command": "twopoint", "state": {"type": "kms", "beta": 2},
                  "points": [{"x": [0, 0, 0, 0.3], "xp": [0.1, 0.2, 0, 0.6]}, {"x": [0.2, 0.1, 0, 0.4], "xp": [0, 0, 0.3, 0.5]}]}"#;
    for d in [&a, &b] {
        assert!(casimir(cfg, None, d.path()).status.success());
    }
    let x = std::fs::read(a.path().join("twopoint.csv")).unwrap();
    let y = std::fs::read(b.path().join("twopoint.csv")).unwrap();
    assert_eq!(x, y);
}

#[test]
fn malformed_config_exits_one_naming_the_key() {
    let dir = tempfile::tempdir().unwrap();
    for (cfg, key) in [
        (r#"{"geometry": {"type": "slab", "d": -1}}"#, "geometry.d"),
        (
            r#"{"geometry": {"type": "slab", "d": "wide"}}"#,
            "geometry.d",
        ),
        (r#"{"z_grd": {}}"#, "z_grd"),
        (r#"{"state": {"type": "kms"}}"#, "state.beta"),
        (
            r#"{"functions": [{"center": [0, 0, 0, 0.5], "radii": [0.1, 0, 0.1, 0.1]}]}"#,
            "functions[0].radii",
        ),
    ] {
        let o = casimir(cfg, Some("wick-square"), dir.path());
        assert_eq!(o.status.code(), Some(1), "{cfg}");
        let err = String::from_utf8_lossy(&o.stderr);
        assert!(err.contains(key), "{cfg}: {err}");
    }
    let o = casimir("{}", Some("no-such-command"), dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("command"));
    let o = casimir("{}", None, dir.path());
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn unreachable_tolerance_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = r#"{"series": {"n_max": 2, "tail_tol": 1e-14}, "points": [{"x": [0, 0, 0, 0.3], "xp": [0.1, 0.2, 0, 0.6]}]}"#;
    let o = casimir(cfg, Some("twopoint"), dir.path());
    assert_eq!(
        o.status.code(),
        Some(2),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    assert!(String::from_utf8_lossy(&o.stderr).contains("accuracy"));
}

#[test]
fn command_line_overrides_config_command() {
    let dir = tempfile::tempdir().unwrap();
    let o = casimir(
        r#"{"command": "positivity", "series": {"n_max": 5}}"#,
        Some("convergence"),
        dir.path(),
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(dir.path().join("convergence.csv").exists());
    assert!(!dir.path().join("positivity.csv").exists());
}

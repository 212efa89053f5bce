use std::path::Path;
use std::process::{Command, Output};

fn revival(args: &[&str], envs: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_revival"));
    cmd.args(args).env_remove("REVIVAL_GRID");
    for (k, v) in envs {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn write_config(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

fn read_table(path: &Path) -> (String, Vec<Vec<f64>>) {
    let text = std::fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap().to_string();
    let rows = lines
        .map(|l| l.split(',').map(|c| c.parse::<f64>().unwrap()).collect())
        .collect();
    (header, rows)
}

const FIGURE: &str = "\
potential.kind = mathieu
potential.q_im = 0.25
initial = indicator(3pi/8, 5pi/8)
time.p = 1
time.q = 5
modes = 100
outputs = decomposition_csv, spectrum_csv, plot_svg, continuity_csv
";

#[test]
fn mathieu_run_writes_consistent_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "fig.conf", FIGURE);
    let out = dir.path().join("out");
    let res = revival(
        &["run", "--config", &cfg, "--out", out.to_str().unwrap()],
        &[],
    );
    assert!(
        res.status.success(),
        "{}",
        String::from_utf8_lossy(&res.stderr)
    );

    let (header, rows) = read_table(&out.join("decomposition.csv"));
    assert_eq!(header, "x,u_re,u_im,revival_re,revival_im,w_re,w_im");
    assert_eq!(rows.len(), 4101);
    let mut levels: Vec<(f64, f64)> = Vec::new();
    for r in &rows {
        assert!((r[1] - r[3] - r[5]).abs() < 1e-14 && (r[2] - r[4] - r[6]).abs() < 1e-14);
        let level = (r[3], r[4]);
        if level.0.hypot(level.1) > 1e-12
            && !levels
                .iter()
                .any(|l| (l.0 - level.0).hypot(l.1 - level.1) < 1e-12)
        {
            levels.push(level);
        }
    }
    assert!(levels.len() <= 5, "{levels:?}");

    let (header, rows) = read_table(&out.join("spectrum.csv"));
    assert_eq!(header, "j,lambda_re,lambda_im,residual,k_j_re,k_j_im");
    assert_eq!(rows.len(), 100);
    assert!((rows[9][1] - 100.0).abs() < 0.5);

    let text = std::fs::read_to_string(out.join("continuity.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "field,max_jump,refinement_ratio,l2,sup"
    );
    let w_free: Vec<&str> = lines
        .find(|l| l.starts_with("w_free,"))
        .unwrap()
        .split(',')
        .collect();
    assert!(w_free[2].parse::<f64>().unwrap() > 1.5);

    let svg = std::fs::read_to_string(out.join("plot.svg")).unwrap();
    assert!(svg.starts_with("<svg"));
    assert_eq!(svg.matches("<polyline").count(), 5);
}

#[test]
fn runs_are_deterministic_and_grid_is_overridable() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "small.conf",
        "initial = indicator(3pi/8, 5pi/8)\npotential.q_im = 0.5\ntime.p = 2\ntime.q = 5\nmodes = 40\noutputs = decomposition_csv, spectrum_csv\n",
    );
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    for out in [&a, &b] {
        let res = revival(
            &["run", "--config", &cfg, "--out", out.to_str().unwrap()],
            &[("REVIVAL_GRID", "1000")],
        );
        assert!(
            res.status.success(),
            "{}",
            String::from_utf8_lossy(&res.stderr)
        );
    }
    for name in ["decomposition.csv", "spectrum.csv"] {
        assert_eq!(
            std::fs::read(a.join(name)).unwrap(),
            std::fs::read(b.join(name)).unwrap()
        );
    }
    let (_, rows) = read_table(&a.join("decomposition.csv"));
    assert_eq!(rows.len(), 1001);
}

#[test]
fn free_full_period_returns_the_truncated_data() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "free.conf",
        "potential.kind = mathieu\ninitial = sine(3)\ntime.p = 1\ntime.q = 1\nmodes = 10\ngrid = 512\noutputs = solution_csv\n",
    );
    let out = dir.path().join("out");
    let res = revival(
        &["run", "--config", &cfg, "--out", out.to_str().unwrap()],
        &[],
    );
    assert!(
        res.status.success(),
        "{}",
        String::from_utf8_lossy(&res.stderr)
    );
    let (header, rows) = read_table(&out.join("solution.csv"));
    assert_eq!(header, "x,u_re,u_im");
    for r in rows {
        let exact = (2.0 / std::f64::consts::PI).sqrt() * (3.0 * r[0]).sin();
        assert!((r[1] - exact).abs() < 1e-9 && r[2].abs() < 1e-9);
    }
}

#[test]
fn parallel_sweep_matches_sequential() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "sweep.conf",
        "initial = indicator(3pi/8, 5pi/8)\ntime.p = 1\ntime.q = 5\nmodes = 30\ngrid = 1024\noutputs = decomposition_csv\nsweep = i/4, i/2, 3i/4, i\n",
    );
    let seq = dir.path().join("seq");
    let par = dir.path().join("par");
    for (out, jobs) in [(&seq, "1"), (&par, "4")] {
        let res = revival(
            &[
                "run",
                "--config",
                &cfg,
                "--out",
                out.to_str().unwrap(),
                "--jobs",
                jobs,
            ],
            &[],
        );
        assert!(
            res.status.success(),
            "{}",
            String::from_utf8_lossy(&res.stderr)
        );
    }
    for label in ["i_4", "i_2", "3i_4", "i"] {
        let name = format!("q_{label}_decomposition.csv");
        assert_eq!(
            std::fs::read(seq.join(&name)).unwrap(),
            std::fs::read(par.join(&name)).unwrap()
        );
    }
}

#[test]
fn failures_leave_nothing_behind() {
    let dir = tempfile::tempdir().unwrap();
    // the second entry is far outside what shooting from j² can follow
    let cfg = write_config(
        dir.path(),
        "bad.conf",
        "initial = indicator(3pi/8, 5pi/8)\ntime.p = 1\ntime.q = 5\nmodes = 30\ngrid = 1024\noutputs = decomposition_csv\nsweep = i/4, 300i\n",
    );
    let out = dir.path().join("out");
    let res = revival(
        &["run", "--config", &cfg, "--out", out.to_str().unwrap()],
        &[],
    );
    assert!(!res.status.success());
    let stderr = String::from_utf8_lossy(&res.stderr);
    assert!(
        stderr.contains("300i") && stderr.contains("index"),
        "{stderr}"
    );
    assert_eq!(std::fs::read_dir(&out).unwrap().count(), 0);

    let missing = revival(&["run", "--config", "/nonexistent.conf"], &[]);
    assert!(!missing.status.success());
    let bad_grid = revival(
        &["run", "--config", &cfg, "--out", out.to_str().unwrap()],
        &[("REVIVAL_GRID", "lots")],
    );
    assert!(!bad_grid.status.success());
}

#[test]
fn validate_reports_per_check() {
    let res = revival(&["validate", "--suite", "gauss"], &[]);
    assert!(res.status.success());
    let stdout = String::from_utf8_lossy(&res.stdout);
    assert!(
        stdout.lines().any(|l| l.starts_with("PASS [ 1]")),
        "{stdout}"
    );
    assert!(!revival(&["validate", "--suite", "bogus"], &[])
        .status
        .success());
}

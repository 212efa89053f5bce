//! CSV and SVG writers. Every file is written to a temporary sibling and
//! renamed into place; [`OutputSet`] removes whatever it wrote if the run
//! fails later.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use num_complex::Complex64;
use revival_core::diagnostics::ContinuityReport;
use revival_core::evolution::RevivalDecomposition;
use revival_core::spectral::EigenPair;
use revival_core::GridFunction;

#[derive(Debug, Default)]
pub struct OutputSet {
    written: Vec<PathBuf>,
    committed: bool,
}

impl OutputSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn write(&mut self, path: &Path, contents: &str) -> Result<()> {
        let dir = path
            .parent()
            .filter(|p| !p.as_os_str().is_empty())
            .unwrap_or(Path::new("."));
        let mut tmp = tempfile::NamedTempFile::new_in(dir)
            .with_context(|| format!("creating temporary file in {}", dir.display()))?;
        tmp.write_all(contents.as_bytes())?;
        tmp.as_file().sync_all()?;
        tmp.persist(path)
            .with_context(|| format!("writing {}", path.display()))?;
        self.written.push(path.to_path_buf());
        Ok(())
    }

    pub fn absorb(&mut self, mut other: OutputSet) {
        self.written.append(&mut other.written);
        other.committed = true;
    }

    /// Keeps the files.
    pub fn commit(mut self) -> Vec<PathBuf> {
        self.committed = true;
        std::mem::take(&mut self.written)
    }
}

impl Drop for OutputSet {
    fn drop(&mut self) {
        if !self.committed {
            for p in &self.written {
                let _ = std::fs::remove_file(p);
            }
        }
    }
}

// shortest round-trip representation, so output is exact and reproducible
fn push_row(out: &mut String, cells: &[f64]) {
    for (k, v) in cells.iter().enumerate() {
        if k > 0 {
            out.push(',');
        }
        write!(out, "{v:e}").expect("writing to a String");
    }
    out.push('\n');
}

pub fn solution_csv(u: &GridFunction) -> String {
    let mut out = String::from("x,u_re,u_im\n");
    for (i, v) in u.values().iter().enumerate() {
        push_row(&mut out, &[u.x(i), v.re, v.im]);
    }
    out
}

pub fn decomposition_csv(d: &RevivalDecomposition) -> String {
    let mut out = String::from("x,u_re,u_im,revival_re,revival_im,w_re,w_im\n");
    let (u, r, w) = (
        d.solution.values(),
        d.revival_part.values(),
        d.correction.values(),
    );
    for i in 0..u.len() {
        push_row(
            &mut out,
            &[
                d.solution.x(i),
                u[i].re,
                u[i].im,
                r[i].re,
                r[i].im,
                w[i].re,
                w[i].im,
            ],
        );
    }
    out
}

pub fn spectrum_csv(pairs: &[EigenPair]) -> String {
    let mut out = String::from("j,lambda_re,lambda_im,residual,k_j_re,k_j_im\n");
    for p in pairs {
        write!(out, "{},", p.index).expect("writing to a String");
        push_row(
            &mut out,
            &[
                p.lambda.re,
                p.lambda.im,
                p.residual,
                p.deviation.re,
                p.deviation.im,
            ],
        );
    }
    out
}

pub fn continuity_csv(rows: &[(&str, ContinuityReport)]) -> String {
    let mut out = String::from("field,max_jump,refinement_ratio,l2,sup\n");
    for (name, r) in rows {
        write!(out, "{name},").expect("writing to a String");
        push_row(
            &mut out,
            &[r.max_jump, r.refinement_ratio, r.l2_norm, r.sup_norm],
        );
    }
    out
}

const PANEL_W: f64 = 360.0;
const PANEL_H: f64 = 260.0;
const MARGIN: f64 = 40.0;
const MAX_POINTS: usize = 1500;

// (stroke colour, dashed, points)
type Series = (&'static str, bool, Vec<(f64, f64)>);

struct Panel {
    title: String,
    xlabel: &'static str,
    ylabel: &'static str,
    series: Vec<Series>,
    equal_axes: bool,
}

fn bounds(panel: &Panel) -> (f64, f64, f64, f64) {
    let mut b = (
        f64::INFINITY,
        f64::NEG_INFINITY,
        f64::INFINITY,
        f64::NEG_INFINITY,
    );
    for (_, _, pts) in &panel.series {
        for &(x, y) in pts {
            b = (b.0.min(x), b.1.max(x), b.2.min(y), b.3.max(y));
        }
    }
    let pad = |lo: f64, hi: f64| {
        let span = if hi > lo { hi - lo } else { 1.0 };
        (lo - 0.05 * span, hi + 0.05 * span)
    };
    let (x0, x1) = pad(b.0, b.1);
    let (y0, y1) = pad(b.2, b.3);
    if panel.equal_axes {
        let (cx, cy) = (0.5 * (x0 + x1), 0.5 * (y0 + y1));
        let half = 0.5 * (x1 - x0).max(y1 - y0);
        (cx - half, cx + half, cy - half, cy + half)
    } else {
        (x0, x1, y0, y1)
    }
}

fn draw_panel(svg: &mut String, panel: &Panel, left: f64) {
    let (x0, x1, y0, y1) = bounds(panel);
    let (w, h) = (PANEL_W - 2.0 * MARGIN, PANEL_H - 2.0 * MARGIN);
    let sx = |x: f64| left + MARGIN + (x - x0) / (x1 - x0) * w;
    let sy = |y: f64| MARGIN + (y1 - y) / (y1 - y0) * h;
    let _ = writeln!(
        svg,
        r##"<rect x="{:.1}" y="{MARGIN:.1}" width="{w:.1}" height="{h:.1}" fill="none" stroke="#444"/>"##,
        left + MARGIN
    );
    let _ = writeln!(
        svg,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle" font-size="13">{}</text>"#,
        left + PANEL_W / 2.0,
        MARGIN - 12.0,
        panel.title
    );
    let _ = writeln!(
        svg,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle" font-size="11">{}</text>"#,
        left + PANEL_W / 2.0,
        PANEL_H - 8.0,
        panel.xlabel
    );
    let _ = writeln!(
        svg,
        r#"<text x="{:.1}" y="{:.1}" font-size="11">{}</text>"#,
        left + 4.0,
        MARGIN + h / 2.0,
        panel.ylabel
    );
    for (v, anchor) in [(x0, "start"), (x1, "end")] {
        let _ = writeln!(
            svg,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="{anchor}" font-size="9">{v:.2}</text>"#,
            sx(v),
            MARGIN + h + 12.0
        );
    }
    for v in [y0, y1] {
        let _ = writeln!(
            svg,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="end" font-size="9">{v:.2}</text>"#,
            left + MARGIN - 3.0,
            sy(v) + 3.0
        );
    }
    for (colour, dashed, pts) in &panel.series {
        let mut d = String::new();
        for &(x, y) in pts {
            let _ = write!(d, "{:.2},{:.2} ", sx(x), sy(y));
        }
        let dash = if *dashed {
            r#" stroke-dasharray="4 3""#
        } else {
            ""
        };
        let _ = writeln!(
            svg,
            r#"<polyline points="{}" fill="none" stroke="{colour}" stroke-width="1.2"{dash}/>"#,
            d.trim_end()
        );
    }
}

fn thin(values: &[Complex64], xs: impl Fn(usize) -> f64) -> Vec<(f64, Complex64)> {
    let stride = values.len().div_ceil(MAX_POINTS).max(1);
    let mut out: Vec<(f64, Complex64)> = values
        .iter()
        .enumerate()
        .step_by(stride)
        .map(|(i, v)| (xs(i), *v))
        .collect();
    let last = values.len() - 1;
    if !last.is_multiple_of(stride) {
        out.push((xs(last), values[last]));
    }
    out
}

/// Real part, imaginary part and complex-plane trace of the solution, with
/// the revival part dashed in the first two panels.
pub fn plot_svg(d: &RevivalDecomposition, title: &str) -> String {
    let u = thin(d.solution.values(), |i| d.solution.x(i));
    let r = thin(d.revival_part.values(), |i| d.revival_part.x(i));
    let re = |pts: &[(f64, Complex64)]| pts.iter().map(|(x, v)| (*x, v.re)).collect::<Vec<_>>();
    let im = |pts: &[(f64, Complex64)]| pts.iter().map(|(x, v)| (*x, v.im)).collect::<Vec<_>>();
    let panels = [
        Panel {
            title: "Re u".into(),
            xlabel: "x",
            ylabel: "Re",
            series: vec![("#1f77b4", false, re(&u)), ("#d62728", true, re(&r))],
            equal_axes: false,
        },
        Panel {
            title: "Im u".into(),
            xlabel: "x",
            ylabel: "Im",
            series: vec![("#1f77b4", false, im(&u)), ("#d62728", true, im(&r))],
            equal_axes: false,
        },
        Panel {
            title: "u in the complex plane".into(),
            xlabel: "Re u",
            ylabel: "Im u",
            series: vec![(
                "#000000",
                false,
                u.iter().map(|(_, v)| (v.re, v.im)).collect(),
            )],
            equal_axes: true,
        },
    ];
    let width = 3.0 * PANEL_W;
    let height = PANEL_H + 30.0;
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}" font-family="sans-serif">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle" font-size="14">{}</text>"#,
        width / 2.0,
        height - 6.0,
        escape(title)
    );
    for (k, p) in panels.iter().enumerate() {
        draw_panel(&mut svg, p, k as f64 * PANEL_W);
    }
    svg.push_str("</svg>\n");
    svg
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;
    use revival_core::{Grid, GridFunction};

    #[test]
    fn rows_round_trip() {
        let mut s = String::new();
        push_row(&mut s, &[0.1, -2.5e-300, 1.0 / 3.0]);
        let back: Vec<f64> = s.trim().split(',').map(|c| c.parse().unwrap()).collect();
        assert_eq!(back, vec![0.1, -2.5e-300, 1.0 / 3.0]);
    }

    #[test]
    fn solution_table_shape() {
        let g = Grid::new(8).unwrap();
        let csv = solution_csv(&GridFunction::from_real_fn(g, f64::sin));
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "x,u_re,u_im");
        assert_eq!(lines.len(), 10);
        assert!(lines.iter().all(|l| l.split(',').count() == 3));
    }

    #[test]
    fn unfinished_sets_clean_up() {
        let dir = tempfile::tempdir().unwrap();
        let a = dir.path().join("a.csv");
        {
            let mut set = OutputSet::new();
            set.write(&a, "x\n").unwrap();
            assert!(a.exists());
        }
        assert!(!a.exists());
        let mut set = OutputSet::new();
        set.write(&a, "x\n").unwrap();
        set.commit();
        assert_eq!(std::fs::read_to_string(&a).unwrap(), "x\n");
    }
}

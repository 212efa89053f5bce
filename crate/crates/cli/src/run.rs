//! The experiment pipeline: potential → eigenpairs → bi-orthogonal system →
//! decomposition → files.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use log::info;
use num_complex::Complex64;
use rayon::prelude::*;
use revival_core::biortho::build_system;
use revival_core::diagnostics::{continuity_report, jump_ratio, plateau_levels};
use revival_core::evolution::{decompose_at_rational_time, RevivalDecomposition};
use revival_core::{Grid, GridFunction, Potential, RationalTime};

use crate::config::{ExperimentConfig, InitialSpec, Output, PotentialSpec};
use crate::output::{self, OutputSet};

pub const GRID_ENV: &str = "REVIVAL_GRID";

/// Grid size from the config, overridden by `REVIVAL_GRID`, rounded up to a
/// multiple of `2q`.
pub fn resolve_grid(cfg: &ExperimentConfig) -> Result<Grid> {
    let base = match std::env::var(GRID_ENV) {
        Ok(s) => s
            .trim()
            .parse::<usize>()
            .with_context(|| format!("{GRID_ENV} must be a positive integer, got `{s}`"))?,
        Err(_) => cfg.grid,
    };
    let grid = Grid::divisible_by(base, cfg.q)?;
    if cfg.modes >= grid.intervals() / 2 {
        bail!(
            "{} modes need more than {} grid intervals",
            cfg.modes,
            2 * cfg.modes
        );
    }
    Ok(grid)
}

/// Rows `x,re,im`; blank lines, `#` comments and a non-numeric header are
/// skipped.
pub fn read_samples(path: &Path) -> Result<(Vec<f64>, Vec<Complex64>)> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut xs = Vec::new();
    let mut vs = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let cells: Vec<&str> = line.split(',').map(str::trim).collect();
        let parsed: Result<Vec<f64>, _> = cells.iter().map(|c| c.parse::<f64>()).collect();
        match parsed {
            Ok(v) if v.len() == 3 => {
                xs.push(v[0]);
                vs.push(Complex64::new(v[1], v[2]));
            }
            Err(_) if xs.is_empty() && n == 0 => continue,
            _ => bail!("{}:{}: expected `x,re,im`", path.display(), n + 1),
        }
    }
    Ok((xs, vs))
}

fn build_potential(spec: &PotentialSpec, grid: Grid) -> Result<Potential> {
    Ok(match spec {
        PotentialSpec::Mathieu(q) => Potential::mathieu(*q),
        PotentialSpec::Zero => Potential::zero(),
        PotentialSpec::Samples(path) => {
            let (x, v) = read_samples(path)?;
            Potential::samples(x, v)
                .with_context(|| format!("potential samples in {}", path.display()))?
                .with_quadrature_grid(grid)
        }
    })
}

fn build_initial(spec: &InitialSpec, grid: Grid) -> Result<GridFunction> {
    Ok(match spec {
        InitialSpec::Indicator(a, b) => GridFunction::indicator(grid, *a, *b),
        InitialSpec::Sine(j) => GridFunction::sine_mode(grid, *j),
        InitialSpec::Poly => GridFunction::from_real_fn(grid, |x| x * (std::f64::consts::PI - x)),
        InitialSpec::Samples(path) => {
            let (x, v) = read_samples(path)?;
            // same piecewise-linear reading, jumps included, as sampled potentials
            Potential::samples(x, v)
                .with_context(|| format!("initial samples in {}", path.display()))?
                .sample(grid)
        }
    })
}

/// One potential of an experiment, with the prefix its files get.
struct Entry {
    prefix: String,
    title: String,
    potential: PotentialSpec,
}

fn sanitize(label: &str) -> String {
    label
        .chars()
        .filter_map(|c| match c {
            c if c.is_ascii_alphanumeric() || c == '.' => Some(c),
            '/' => Some('_'),
            '+' => Some('p'),
            '-' => Some('m'),
            _ => None,
        })
        .collect()
}

fn entries(cfg: &ExperimentConfig) -> Vec<Entry> {
    if cfg.sweep.is_empty() {
        return vec![Entry {
            prefix: String::new(),
            title: cfg.potential.to_string(),
            potential: cfg.potential.clone(),
        }];
    }
    cfg.sweep
        .iter()
        .map(|s| Entry {
            prefix: format!("q_{}_", sanitize(&s.label)),
            title: format!("mathieu(q = {})", s.label),
            potential: PotentialSpec::Mathieu(s.q),
        })
        .collect()
}

fn decompose(
    v: &Potential,
    initial: &InitialSpec,
    t: RationalTime,
    modes: usize,
    grid: Grid,
) -> Result<(RevivalDecomposition, Vec<revival_core::spectral::EigenPair>)> {
    let sys = build_system(v, modes, grid)?;
    let f = build_initial(initial, grid)?;
    let d = decompose_at_rational_time(v, &sys, sys.eigenpairs(), &f, t)?;
    Ok((d, sys.eigenpairs().to_vec()))
}

fn run_entry(cfg: &ExperimentConfig, entry: &Entry, grid: Grid, out: &Path) -> Result<OutputSet> {
    let t = RationalTime::new(cfg.p, cfg.q)?;
    let v = build_potential(&entry.potential, grid)?;
    let (d, pairs) =
        decompose(&v, &cfg.initial, t, cfg.modes, grid).with_context(|| entry.title.clone())?;
    let mut files = OutputSet::new();
    let title = format!(
        "{}, t = {}, N = {}, M = {}",
        entry.title,
        t,
        cfg.modes,
        grid.intervals()
    );
    for kind in &cfg.outputs {
        let path = out.join(kind.file_name(&entry.prefix));
        let text = match kind {
            Output::Solution => output::solution_csv(&d.solution),
            Output::Decomposition => output::decomposition_csv(&d),
            Output::Spectrum => output::spectrum_csv(&pairs),
            Output::Plot => output::plot_svg(&d, &title),
            Output::Continuity => {
                let v2 = build_potential(&entry.potential, grid.refined())?;
                let (fine, _) = decompose(&v2, &cfg.initial, t, cfg.modes, grid.refined())
                    .with_context(|| format!("{} on the refined grid", entry.title))?;
                let rows = [
                    ("solution", continuity_report(&d.solution, &fine.solution)?),
                    (
                        "revival",
                        continuity_report(&d.revival_part, &fine.revival_part)?,
                    ),
                    ("w", continuity_report(&d.correction, &fine.correction)?),
                    (
                        "w_free",
                        continuity_report(&d.free_correction, &fine.free_correction)?,
                    ),
                ];
                for (name, r) in &rows {
                    info!(
                        "{}: {name} refinement ratio {:.3}",
                        entry.title, r.refinement_ratio
                    );
                }
                output::continuity_csv(&rows)
            }
        };
        files.write(&path, &text)?;
    }
    let levels = plateau_levels(&d.revival_part, 1e-12)
        .iter()
        .filter(|l| l.norm() > 1e-12)
        .count();
    match jump_ratio(&d) {
        Ok(r) => println!("{title}: jump ratio {r:.4}, {levels} revival levels"),
        Err(_) => println!("{title}: smooth initial data, {levels} revival levels"),
    }
    Ok(files)
}

/// Runs every entry of the experiment and returns the files written. On
/// failure nothing written by this call is left behind.
pub fn run(cfg: &ExperimentConfig, out: &Path, jobs: usize) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    let grid = resolve_grid(cfg)?;
    let entries = entries(cfg);
    let mut all = OutputSet::new();
    if jobs > 1 && entries.len() > 1 {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(jobs).build()?;
        let results: Vec<Result<OutputSet>> = pool.install(|| {
            entries
                .par_iter()
                .map(|e| run_entry(cfg, e, grid, out))
                .collect()
        });
        let mut first_err = None;
        for r in results {
            match r {
                Ok(set) => all.absorb(set),
                Err(e) => {
                    first_err.get_or_insert(e);
                }
            }
        }
        if let Some(e) = first_err {
            return Err(e);
        }
    } else {
        for e in &entries {
            all.absorb(run_entry(cfg, e, grid, out)?);
        }
    }
    Ok(all.commit())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn labels_become_file_prefixes() {
        assert_eq!(sanitize("3i/4"), "3i_4");
        assert_eq!(sanitize("0.3+0.1i"), "0.3p0.1i");
        assert_eq!(sanitize(" -i "), "mi");
    }

    #[test]
    fn sample_files() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("v.csv");
        std::fs::write(&p, "x,re,im\n0,1,0\n# jump\n1.5,1,0\n1.5,-1,0\n3.2,-1,0\n").unwrap();
        let (x, v) = read_samples(&p).unwrap();
        assert_eq!(x, vec![0.0, 1.5, 1.5, 3.2]);
        assert_eq!(v[2], Complex64::new(-1.0, 0.0));
        std::fs::write(&p, "0,1,0\n1,oops,0\n").unwrap();
        assert!(read_samples(&p).is_err());
    }
}

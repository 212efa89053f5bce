//! Jump and continuity diagnostics for sampled fields.
//!
//! A field sampled from a Lipschitz function has adjacent-node jumps of size
//! `O(h)`, so its largest jump halves when the grid is refined; a genuine
//! discontinuity keeps its jump. The ratio of the two maxima separates the
//! cases, with [`CONTINUITY_THRESHOLD`] as the dividing line.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::biortho::build_system;
use crate::error::{Error, Result};
use crate::evolution::{decompose_at_rational_time, RevivalDecomposition};
use crate::grid::{Grid, GridFunction};
use crate::potential::Potential;
use crate::revival::RationalTime;

pub const CONTINUITY_THRESHOLD: f64 = 1.5;

/// Total width of each excluded neighbourhood is `GIBBS_FACTOR·π/N`.
pub const GIBBS_FACTOR: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContinuityReport {
    /// Largest adjacent-node jump on the coarse grid.
    pub max_jump: f64,
    /// Coarse max jump over refined max jump; infinite when the refined field
    /// has no jumps at all.
    pub refinement_ratio: f64,
    pub l2_norm: f64,
    pub sup_norm: f64,
}

impl ContinuityReport {
    pub fn looks_continuous(&self) -> bool {
        self.refinement_ratio > CONTINUITY_THRESHOLD
    }
}

/// Compares `field` with the same quantity computed on the grid with twice as
/// many intervals.
pub fn continuity_report(field: &GridFunction, refined: &GridFunction) -> Result<ContinuityReport> {
    if refined.intervals() != 2 * field.intervals() {
        return Err(Error::InvalidGrid(format!(
            "refined field needs {} intervals, got {}",
            2 * field.intervals(),
            refined.intervals()
        )));
    }
    let coarse = field.max_jump();
    let fine = refined.max_jump();
    let refinement_ratio = if fine > 0.0 {
        coarse / fine
    } else {
        f64::INFINITY
    };
    Ok(ContinuityReport {
        max_jump: coarse,
        refinement_ratio,
        l2_norm: field.l2_norm(),
        sup_norm: field.sup_norm(),
    })
}

/// Jump locations of the odd 2π-periodic extension of `f`, reduced to
/// `[0, 2π)`.
///
/// An interior jump is a node pair whose difference exceeds both `1e-6` and
/// fifty times the median difference; it is placed at the pair's midpoint.
/// The endpoints count when `f` does not vanish there.
pub fn extension_jumps(f: &GridFunction) -> Vec<f64> {
    let values = f.values();
    let diffs: Vec<f64> = values.windows(2).map(|w| (w[1] - w[0]).norm()).collect();
    let mut sorted = diffs.clone();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite samples"));
    let median = sorted[sorted.len() / 2];
    let threshold = (50.0 * median).max(1e-6);
    let mut jumps = Vec::new();
    for (i, d) in diffs.iter().enumerate() {
        if *d > threshold {
            let x = 0.5 * (f.x(i) + f.x(i + 1));
            jumps.push(x);
            jumps.push(2.0 * PI - x);
        }
    }
    let scale = f.sup_norm().max(1.0);
    if values[0].norm() > 1e-9 * scale {
        jumps.push(0.0);
    }
    if values[values.len() - 1].norm() > 1e-9 * scale {
        jumps.push(PI);
    }
    jumps
}

fn circular_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(2.0 * PI);
    d.min(2.0 * PI - d)
}

/// Node-pair mask: `true` where the segment `[x_i, x_{i+1}]` stays at least
/// `GIBBS_FACTOR·π/(2N)` away from every shifted jump of `f°`.
pub fn outside_gibbs_zones(f: &GridFunction, t: RationalTime, modes: usize) -> Vec<bool> {
    let half = GIBBS_FACTOR * PI / (2.0 * modes as f64);
    let q = t.q();
    let centres: Vec<f64> = extension_jumps(f)
        .iter()
        .flat_map(|&s| (0..q).map(move |k| s + 2.0 * PI * k as f64 / q as f64))
        .collect();
    (0..f.intervals())
        .map(|i| {
            let (a, b) = (f.x(i), f.x(i + 1));
            centres.iter().all(|&c| {
                let inside = (c - a).rem_euclid(2.0 * PI) <= b - a;
                !inside && circular_distance(a, c) >= half && circular_distance(b, c) >= half
            })
        })
        .collect()
}

/// `max_jump(correction)` outside the Gibbs zones divided by
/// `max_jump(revival_part)` over the whole interval.
pub fn jump_ratio(d: &RevivalDecomposition) -> Result<f64> {
    if extension_jumps(&d.initial).is_empty() {
        return Err(Error::NotApplicable(
            "initial data has no jumps, so the revival part is continuous".into(),
        ));
    }
    let reference = d.revival_part.max_jump();
    if reference == 0.0 {
        return Err(Error::NotApplicable("revival part has no jumps".into()));
    }
    let mask = outside_gibbs_zones(&d.initial, d.time, d.modes);
    let w = d.correction.values();
    let max = mask
        .iter()
        .enumerate()
        .filter(|(_, keep)| **keep)
        .map(|(i, _)| (w[i + 1] - w[i]).norm())
        .fold(0.0, f64::max);
    Ok(max / reference)
}

/// Continuity reports for the fields of a decomposition recomputed on `grid`
/// and on its refinement.
#[derive(Debug, Clone)]
pub struct RefinedDiagnostics {
    pub coarse: RevivalDecomposition,
    pub solution: ContinuityReport,
    pub revival_part: ContinuityReport,
    pub correction: ContinuityReport,
    pub free_correction: ContinuityReport,
}

/// Runs the full pipeline on `grid` and on `grid.refined()` and compares.
///
/// `initial` samples the initial data on a given grid so that both
/// resolutions see the same function.
pub fn refined_diagnostics(
    v: &Potential,
    initial: &dyn Fn(Grid) -> GridFunction,
    t: RationalTime,
    modes: usize,
    grid: Grid,
) -> Result<RefinedDiagnostics> {
    let run = |g: Grid| -> Result<RevivalDecomposition> {
        let sys = build_system(v, modes, g)?;
        decompose_at_rational_time(v, &sys, sys.eigenpairs(), &initial(g), t)
    };
    let coarse = run(grid)?;
    let fine = run(grid.refined())?;
    Ok(RefinedDiagnostics {
        solution: continuity_report(&coarse.solution, &fine.solution)?,
        revival_part: continuity_report(&coarse.revival_part, &fine.revival_part)?,
        correction: continuity_report(&coarse.correction, &fine.correction)?,
        free_correction: continuity_report(&coarse.free_correction, &fine.free_correction)?,
        coarse,
    })
}

/// `‖a − b‖₂` for two fields on one grid.
pub fn l2_distance(a: &GridFunction, b: &GridFunction) -> Result<f64> {
    Ok(a.try_sub(b)?.l2_norm())
}

/// Distinct values (to `tol`) taken by a field.
pub fn plateau_levels(field: &GridFunction, tol: f64) -> Vec<Complex64> {
    let mut levels: Vec<Complex64> = Vec::new();
    for v in field.values() {
        if !levels.iter().any(|l| (l - v).norm() <= tol) {
            levels.push(*v);
        }
    }
    levels
}

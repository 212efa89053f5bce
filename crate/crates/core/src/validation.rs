//! Reproducible checks of the library against exact identities and
//! independent solvers, grouped into suites.
//!
//! Every check reports what it measured and the bound it was held to, so a
//! failure can be read straight off the output.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use num_complex::Complex64;

use crate::biortho::build_system;
use crate::diagnostics::{jump_ratio, l2_distance, refined_diagnostics, CONTINUITY_THRESHOLD};
use crate::error::{Error, Result};
use crate::evolution::{evolve, free_evolution, free_evolution_rational};
use crate::grid::{Grid, GridFunction, DEFAULT_GRID};
use crate::mathieu::{characteristic_values, default_truncation};
use crate::potential::Potential;
use crate::revival::{
    gauss_indicator, gauss_sum, odd_periodic_extension, revival_superposition, RationalTime,
};
use crate::spectral::{aligned_sup_distance, eigen_sweep};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Suite {
    Gauss,
    Free,
    Mathieu,
    Biortho,
    SelfAdjoint,
}

impl Suite {
    pub const ALL: [Suite; 5] = [
        Suite::Gauss,
        Suite::Free,
        Suite::Mathieu,
        Suite::Biortho,
        Suite::SelfAdjoint,
    ];

    /// Criterion numbers covered by the suite.
    pub fn criteria(self) -> &'static [u8] {
        match self {
            Suite::Gauss => &[1],
            Suite::Free => &[2, 3, 4, 5],
            Suite::Mathieu => &[6, 7, 8, 11],
            Suite::Biortho => &[9, 12],
            Suite::SelfAdjoint => &[10],
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Suite::Gauss => "gauss",
            Suite::Free => "free",
            Suite::Mathieu => "mathieu",
            Suite::Biortho => "biortho",
            Suite::SelfAdjoint => "selfadjoint",
        }
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|suite| suite.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown suite `{s}`")))
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One checked claim.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub criterion: u8,
    pub label: String,
    pub passed: bool,
    /// Reported only; never counted as a failure.
    pub advisory: bool,
    pub measured: String,
    pub bound: String,
    pub elapsed: Duration,
}

impl Outcome {
    fn new(
        criterion: u8,
        label: impl Into<String>,
        passed: bool,
        measured: String,
        bound: impl Into<String>,
    ) -> Self {
        Outcome {
            criterion,
            label: label.into(),
            passed,
            advisory: false,
            measured,
            bound: bound.into(),
            elapsed: Duration::ZERO,
        }
    }

    fn advisory(mut self) -> Self {
        self.advisory = true;
        self
    }

    fn errored(criterion: u8, label: impl Into<String>, e: &Error) -> Self {
        Outcome::new(criterion, label, false, format!("error: {e}"), "completes")
    }

    pub fn status(&self) -> &'static str {
        match (self.advisory, self.passed) {
            (true, _) => "INFO",
            (false, true) => "PASS",
            (false, false) => "FAIL",
        }
    }

    /// Counts toward the verdict and failed.
    pub fn is_failure(&self) -> bool {
        !self.advisory && !self.passed
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} [{:>2}] {}: {} (bound: {}) [{:.2}s]",
            self.status(),
            self.criterion,
            self.label,
            self.measured,
            self.bound,
            self.elapsed.as_secs_f64()
        )
    }
}

fn step_data(grid: Grid) -> GridFunction {
    GridFunction::indicator(grid, 3.0 * PI / 8.0, 5.0 * PI / 8.0)
}

fn grid(m: usize) -> Grid {
    Grid::new(m).expect("even grid")
}

fn imag(x: f64) -> Complex64 {
    Complex64::new(0.0, x)
}

/// Runs criterion `n` and returns its outcomes with timings filled in.
pub fn run_criterion(n: u8) -> Vec<Outcome> {
    let start = Instant::now();
    let mut outcomes = match n {
        1 => gauss_sums(),
        2 => free_revival_identity(),
        3 => full_period(),
        4 => half_period(),
        5 => free_spectrum(),
        6 => mathieu_cross_check(),
        7 => perturbation_series(),
        8 => decay_law(),
        9 => biorthogonality(),
        10 => self_adjoint_conservation(),
        11 => continuity_certification(),
        12 => mean_shift(),
        _ => vec![Outcome::new(
            n,
            "unknown criterion",
            false,
            "n/a".into(),
            "1..=12",
        )],
    };
    let elapsed = start.elapsed();
    // shared wall time unless a check timed itself
    for o in &mut outcomes {
        if o.elapsed == Duration::ZERO {
            o.elapsed = elapsed;
        }
    }
    outcomes
}

pub fn run_suite(suite: Suite) -> Vec<Outcome> {
    suite
        .criteria()
        .iter()
        .flat_map(|&n| run_criterion(n))
        .collect()
}

pub fn run_all() -> Vec<Outcome> {
    (1..=12).flat_map(run_criterion).collect()
}

fn within(limit_secs: f64, start: Instant) -> (bool, Duration) {
    let e = start.elapsed();
    (e.as_secs_f64() < limit_secs, e)
}

fn gauss_sums() -> Vec<Outcome> {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    let mut mismatches = 0;
    for q in 1..=50u64 {
        for m in 0..q as i64 {
            for j in 0..q as i64 {
                let expected = if (m - j).rem_euclid(q as i64) == 0 {
                    q as i64
                } else {
                    0
                };
                worst = worst.max((gauss_sum(m, j, q) - expected as f64).norm());
                if gauss_indicator(m, j, q) != expected {
                    mismatches += 1;
                }
            }
        }
    }
    let (fast, elapsed) = within(1.0, start);
    let mut o = Outcome::new(
        1,
        "Gauss-sum indicator, q <= 50",
        mismatches == 0 && worst < 1e-9 && fast,
        format!("{mismatches} mismatches, max pre-rounding error {worst:.2e}"),
        "0 mismatches, error < 1e-9, < 1 s",
    );
    o.elapsed = elapsed;
    vec![o]
}

/// `‖R − S_N‖₂` for the step at `t = 2π/5` on a grid fine enough for 10⁴ modes.
pub fn free_revival_distances(modes: &[usize]) -> Result<Vec<f64>> {
    let t = RationalTime::new(1, 5)?;
    let g = Grid::divisible_by(65536, t.q())?;
    let f = step_data(g);
    let revival = revival_superposition(&f, t, Complex64::new(0.0, 0.0));
    modes
        .iter()
        .map(|&n| l2_distance(&revival, &free_evolution_rational(&f, t, n)?))
        .collect()
}

fn free_revival_identity() -> Vec<Outcome> {
    let start = Instant::now();
    let modes = [500, 1000, 2000, 5000, 10000];
    let d = match free_revival_distances(&modes) {
        Ok(d) => d,
        Err(e) => return vec![Outcome::errored(2, "free revival identity", &e)],
    };
    let (fast, elapsed) = within(30.0, start);
    let decreasing = d.windows(2).all(|w| w[1] < w[0]);
    let listing = modes
        .iter()
        .zip(&d)
        .map(|(n, x)| format!("N={n}: {x:.4}"))
        .collect::<Vec<_>>()
        .join(", ");
    let mut o = Outcome::new(
        2,
        "free revival identity at t = 2π/5",
        decreasing && d[2] < 0.05 && d[4] < 0.02 && fast,
        listing,
        "decreasing, < 0.05 at N=2000, < 0.02 at N=10000, < 30 s",
    );
    o.elapsed = elapsed;
    vec![o]
}

fn full_period() -> Vec<Outcome> {
    let g = grid(DEFAULT_GRID);
    let f = step_data(g);
    let t = RationalTime::new(1, 1).expect("1/1");
    let r = revival_superposition(&f, t, Complex64::new(0.0, 0.0));
    let exact = r.try_sub(&f).map(|d| d.sup_norm()).unwrap_or(f64::INFINITY);

    let n = 500;
    let evolved = free_evolution(&f, 2.0 * PI, n);
    let mut coeffs = f.sine_coefficients();
    coeffs.truncate(n + 1);
    let truncated = GridFunction::sine_synthesis(g, &coeffs);
    let series = match (evolved, truncated) {
        (Ok(a), Ok(b)) => a.try_sub(&b).map(|d| d.sup_norm()).unwrap_or(f64::INFINITY),
        _ => f64::INFINITY,
    };
    vec![
        Outcome::new(
            3,
            "revival at t = 2π reproduces f",
            exact == 0.0,
            format!("max error {exact:e}"),
            "exactly 0",
        ),
        Outcome::new(
            3,
            "free evolution at t = 2π is the N-mode truncation",
            series < 1e-12,
            format!("max error {series:.2e} (N = {n})"),
            "< 1e-12",
        ),
    ]
}

fn half_period() -> Vec<Outcome> {
    let g = grid(DEFAULT_GRID);
    let t = RationalTime::new(1, 2).expect("1/2");
    let data = [
        ("step", step_data(g)),
        (
            "complex smooth",
            GridFunction::from_fn(g, |x| Complex64::new(x * (PI - x), (2.0 * x).sin() + 0.3)),
        ),
    ];
    data.into_iter()
        .map(|(name, f)| {
            let r = revival_superposition(&f, t, Complex64::new(0.0, 0.0));
            let err = (0..g.nodes())
                .map(|i| (r.values()[i] - odd_periodic_extension(&f, g.x(i) - PI)).norm())
                .fold(0.0, f64::max);
            Outcome::new(
                4,
                format!("half-period mirror ({name} data)"),
                err < 1e-12,
                format!("max error {err:.2e}"),
                "< 1e-12",
            )
        })
        .collect()
}

fn free_spectrum() -> Vec<Outcome> {
    let start = Instant::now();
    let g = grid(DEFAULT_GRID);
    let pairs = match eigen_sweep(&Potential::zero(), 100, g) {
        Ok(p) => p,
        Err(e) => return vec![Outcome::errored(5, "free spectrum", &e)],
    };
    let lambda_err = pairs
        .iter()
        .map(|p| (p.lambda - (p.index * p.index) as f64).norm())
        .fold(0.0, f64::max);
    let shape_err = pairs
        .iter()
        .map(|p| {
            aligned_sup_distance(
                &p.normalized_eigenfunction(),
                &GridFunction::sine_mode(g, p.index),
            )
            .unwrap_or(f64::INFINITY)
        })
        .fold(0.0, f64::max);
    let (fast, elapsed) = within(60.0, start);
    let mut a = Outcome::new(
        5,
        "free eigenvalues, N = 100, M = 4096",
        lambda_err < 1e-8 && fast,
        format!("max |λ_j − j²| = {lambda_err:.2e}"),
        "< 1e-8, < 60 s",
    );
    let mut b = Outcome::new(
        5,
        "free eigenfunctions against normalised sines",
        shape_err < 1e-7 && fast,
        format!("max sup distance {shape_err:.2e}"),
        "< 1e-7, < 60 s",
    );
    a.elapsed = elapsed;
    b.elapsed = elapsed;
    vec![a, b]
}

fn mathieu_cross_check() -> Vec<Outcome> {
    let start = Instant::now();
    let q = imag(0.25);
    let n = 20;
    let shooting = eigen_sweep(&Potential::mathieu(q), n, grid(DEFAULT_GRID));
    let matrix = characteristic_values(q, n, default_truncation(n));
    let (shooting, matrix) = match (shooting, matrix) {
        (Ok(s), Ok(m)) => (s, m),
        (Err(e), _) | (_, Err(e)) => return vec![Outcome::errored(6, "Mathieu cross-check", &e)],
    };
    let (worst_j, worst) = shooting
        .iter()
        .zip(&matrix.values)
        .map(|(p, b)| (p.index, (p.lambda - b).norm()))
        .fold((0, 0.0), |acc, x| if x.1 > acc.1 { x } else { acc });
    let (fast, elapsed) = within(120.0, start);
    let mut o = Outcome::new(
        6,
        "shooting vs matrix Mathieu values, q = i/4, j <= 20",
        worst < 1e-6 && fast,
        format!("max difference {worst:.2e} at j = {worst_j}"),
        "< 1e-6 per index, < 120 s",
    );
    o.elapsed = elapsed;
    vec![o]
}

/// `|b_j(q) − j² − q²/(2(j² − 1))|` from the matrix method.
pub fn perturbation_residual(q: f64, j: usize) -> Result<f64> {
    let s = characteristic_values(Complex64::new(q, 0.0), j, default_truncation(j))?;
    let jf = j as f64;
    Ok((s.values[j - 1] - jf * jf - q * q / (2.0 * (jf * jf - 1.0))).norm())
}

fn perturbation_series() -> Vec<Outcome> {
    let qs = [0.05, 0.1, 0.2];
    let js = 2..=6usize;
    let mut table = Vec::new();
    for j in js.clone() {
        for &q in &qs {
            match perturbation_residual(q, j) {
                Ok(r) => table.push((j, q, r)),
                Err(e) => return vec![Outcome::errored(7, "perturbation series", &e)],
            }
        }
    }
    // C is fixed where higher-order terms weigh most (largest q); an O(q⁴)
    // residual then stays under C·q⁴ at the smaller q.
    let qmax = qs[qs.len() - 1];
    let c = table
        .iter()
        .filter(|(_, q, _)| *q == qmax)
        .map(|(_, q, r)| r / q.powi(4))
        .fold(0.0, f64::max);
    let violations: Vec<String> = table
        .iter()
        .filter(|(_, q, r)| *r > c * q.powi(4))
        .map(|(j, q, r)| format!("j={j} q={q}: r/q⁴ = {:.3}", r / q.powi(4)))
        .collect();
    let slopes: Vec<String> = js
        .clone()
        .map(|j| {
            let r: Vec<f64> = table
                .iter()
                .filter(|(jj, _, _)| *jj == j)
                .map(|(_, _, r)| *r)
                .collect();
            let slope = (r[2] / r[0]).ln() / (qs[2] / qs[0]).ln();
            format!("j={j}: {slope:.2}")
        })
        .collect();
    let mut out = vec![Outcome::new(
        7,
        "residual <= C·q⁴ with one C, q ∈ {0.05, 0.1, 0.2}, j ∈ 2..=6",
        violations.is_empty(),
        format!(
            "C = {c:.4} (fitted at q = {qmax}); violations: [{}]; log-log slopes: [{}]",
            violations.join("; "),
            slopes.join(", ")
        ),
        "no violations",
    )];

    let sub: Vec<&(usize, f64, f64)> = table.iter().filter(|(j, _, _)| *j >= 4).collect();
    let c4 = sub
        .iter()
        .filter(|(_, q, _)| *q == qmax)
        .map(|(_, q, r)| r / q.powi(4))
        .fold(0.0, f64::max);
    let ok4 = sub
        .iter()
        .all(|(_, q, r)| *r <= c4 * q.powi(4) * (1.0 + 1e-9) || *r < 1e-12);
    out.push(
        Outcome::new(
            7,
            "same check restricted to j ∈ 4..=6",
            ok4,
            format!("C = {c4:.2e}"),
            "no violations",
        )
        .advisory(),
    );

    let b3 = characteristic_values(Complex64::new(0.1, 0.0), 3, default_truncation(3))
        .map(|s| s.values[2]);
    out.push(match b3 {
        Ok(b3) => Outcome::new(
            7,
            "b_3(0.1)",
            (b3 - 9.000625).norm() <= 1e-4,
            format!("{:.7}", b3.re),
            "9.000625 ± 1e-4",
        ),
        Err(e) => Outcome::errored(7, "b_3(0.1)", &e),
    });
    out
}

fn decay_law() -> Vec<Outcome> {
    let pairs = match eigen_sweep(&Potential::mathieu(imag(0.25)), 40, grid(DEFAULT_GRID)) {
        Ok(p) => p,
        Err(e) => return vec![Outcome::errored(8, "decay law", &e)],
    };
    let mut scaled: Vec<f64> = pairs[9..]
        .iter()
        .map(|p| (p.omega - p.index as f64).norm() * (p.index as f64).powi(3))
        .collect();
    scaled.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    let max = scaled[scaled.len() - 1];
    let median = scaled[scaled.len() / 2];
    let ratio = max / median;
    vec![Outcome::new(
        8,
        "|ω_j − j|·j³ bounded over j ∈ 10..=40, q = i/4",
        ratio < 5.0,
        format!(
            "max/median = {ratio:.3} (median {median:.3e}, min {:.3e})",
            scaled[0]
        ),
        "< 5",
    )]
}

fn biorthogonality() -> Vec<Outcome> {
    match build_system(&Potential::mathieu(imag(0.25)), 50, grid(DEFAULT_GRID)) {
        Ok(sys) => vec![Outcome::new(
            9,
            "Gram defect, q = i/4, N = 50, M = 4096",
            sys.gram_defect < 1e-6,
            format!("{:.2e}", sys.gram_defect),
            "< 1e-6",
        )],
        Err(e) => vec![Outcome::errored(9, "bi-orthogonality", &e)],
    }
}

/// Real step potential `±1` with the jump at `π/2`.
pub fn step_potential() -> Potential {
    let one = Complex64::new(1.0, 0.0);
    Potential::samples(
        vec![0.0, PI / 2.0, PI / 2.0, PI],
        vec![one, one, -one, -one],
    )
    .expect("valid samples")
}

fn self_adjoint_conservation() -> Vec<Outcome> {
    let g = grid(DEFAULT_GRID);
    let v = step_potential();
    let run = || -> Result<Vec<f64>> {
        let sys = build_system(&v, 100, g)?;
        let f = step_data(g);
        [0.0, 0.5, 2.0 * PI / 5.0, 2.0 * PI]
            .iter()
            .map(|&t| Ok(evolve(&sys, sys.eigenpairs(), &f, t)?.l2_norm()))
            .collect()
    };
    match run() {
        Ok(norms) => {
            let spread = norms.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b))
                - norms.iter().fold(f64::INFINITY, |a, &b| a.min(b));
            vec![Outcome::new(
                10,
                "norm conservation, real step potential, t ∈ {0, 0.5, 2π/5, 2π}",
                spread < 1e-6,
                format!("spread {spread:.2e} around {:.6}", norms[0]),
                "< 1e-6",
            )]
        }
        Err(e) => vec![Outcome::errored(10, "self-adjoint conservation", &e)],
    }
}

fn continuity_certification() -> Vec<Outcome> {
    let t = RationalTime::new(1, 5).expect("1/5");
    let g = match Grid::divisible_by(DEFAULT_GRID, t.q()) {
        Ok(g) => g,
        Err(e) => return vec![Outcome::errored(11, "continuity", &e)],
    };
    let mut out = Vec::new();
    for (name, q, hard) in [
        ("i/4", 0.25, true),
        ("i/2", 0.5, true),
        ("3i/4", 0.75, false),
        ("i", 1.0, false),
    ] {
        let start = Instant::now();
        let v = Potential::mathieu(imag(q));
        let diag = match refined_diagnostics(&v, &step_data, t, 100, g) {
            Ok(d) => d,
            Err(e) => {
                let o = Outcome::errored(11, format!("q = {name}"), &e);
                out.push(if hard { o } else { o.advisory() });
                continue;
            }
        };
        let elapsed = start.elapsed();
        let (ratio_text, ratio_ok) = match jump_ratio(&diag.coarse) {
            Ok(r) => (format!("{r:.4}"), r < 0.1),
            Err(e) => (format!("error: {e}"), false),
        };
        let mut a = Outcome::new(
            11,
            format!("(a) jump ratio outside Gibbs zones, q = {name}"),
            ratio_ok,
            ratio_text,
            "< 0.1",
        );
        let mut b = Outcome::new(
            11,
            format!(
                "(b) refinement ratio of u − free evolution, q = {name}, M = {} → {}",
                g.intervals(),
                2 * g.intervals()
            ),
            diag.free_correction.refinement_ratio > CONTINUITY_THRESHOLD,
            format!(
                "{:.3} (u − revival part: {:.3}, revival part: {:.3})",
                diag.free_correction.refinement_ratio,
                diag.correction.refinement_ratio,
                diag.revival_part.refinement_ratio
            ),
            "> 1.5",
        );
        a.elapsed = elapsed;
        b.elapsed = elapsed;
        if !hard {
            a = a.advisory();
            b = b.advisory();
        }
        out.push(a);
        out.push(b);
    }
    out
}

fn mean_shift() -> Vec<Outcome> {
    let g = grid(DEFAULT_GRID);
    let shift = Complex64::new(0.3, 0.1);
    let v = Potential::mathieu(imag(0.25));
    let t = RationalTime::new(1, 5).expect("1/5");
    let f = step_data(g);
    let run = || -> Result<(f64, f64)> {
        let a = build_system(&v, 50, g)?;
        let b = build_system(&v.shifted(shift), 50, g)?;
        let phase = (Complex64::new(0.0, -t.time()) * shift).exp();
        let ua = evolve(&a, a.eigenpairs(), &f, t.time())?;
        let ub = evolve(&b, b.eigenpairs(), &f, t.time())?;
        let evolve_err = ua.scale(phase).try_sub(&ub)?.sup_norm();
        let ra = revival_superposition(&f, t, v.mean());
        let rb = revival_superposition(&f, t, v.mean() + shift);
        let revival_err = ra.scale(phase).try_sub(&rb)?.sup_norm();
        Ok((evolve_err, revival_err))
    };
    match run() {
        Ok((e, r)) => vec![
            Outcome::new(
                12,
                "evolve under V + c equals e^{−ict}·evolve under V",
                e < 1e-8,
                format!("max error {e:.2e}"),
                "< 1e-8",
            ),
            Outcome::new(
                12,
                "revival phase e^{−2πi⟨V⟩p/q} tracks the shift",
                r < 1e-14,
                format!("max error {r:.2e}"),
                "< 1e-14 (rounding only)",
            ),
        ],
        Err(e) => vec![Outcome::errored(12, "mean shift", &e)],
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suites_parse_and_cover_everything() {
        for s in Suite::ALL {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
        assert!("nope".parse::<Suite>().is_err());
        let mut all: Vec<u8> = Suite::ALL
            .iter()
            .flat_map(|s| s.criteria().iter().copied())
            .collect();
        all.sort();
        assert_eq!(all, (1..=12).collect::<Vec<_>>());
    }

    #[test]
    fn cheap_criteria_pass() {
        for n in [1, 3, 4] {
            for o in run_criterion(n) {
                assert!(!o.is_failure(), "{o}");
            }
        }
    }

    #[test]
    fn unknown_criterion_fails() {
        assert!(run_criterion(13)[0].is_failure());
    }
}

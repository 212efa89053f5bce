//! Time evolution by truncated eigenfunction expansion and the split of the
//! solution at rational times.
//!
//! `u(x, t) = Σ_{j ≤ N} c_j e^{−iλ_j t} φ_j(x)` with `c_j = ⟨f, φ*_j⟩`. The free
//! reference `Σ_{j ≤ N} ⟨f, d_j⟩ e^{−ij²t} d_j(x)` is computed by a fast sine
//! transform, so it can carry many more modes than the eigen-expansion.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::biortho::BiorthogonalSystem;
use crate::error::{Error, Result};
use crate::grid::GridFunction;
use crate::potential::Potential;
use crate::revival::{revival_superposition, RationalTime};
use crate::spectral::EigenPair;

/// Largest admissible `Im(λ_j)·t`; beyond it `e^{−iλ_j t}` amplifies by more
/// than `e^50`.
pub const GROWTH_GUARD: f64 = 50.0;

/// The solution at `t = 2πp/q` split into its revival superposition and the
/// remainder.
#[derive(Debug, Clone)]
pub struct RevivalDecomposition {
    pub time: RationalTime,
    /// `u(·, t)` with `modes` eigenmodes.
    pub solution: GridFunction,
    pub revival_part: GridFunction,
    /// `solution − revival_part`.
    pub correction: GridFunction,
    /// `solution − e^{−i⟨V⟩t}·(N-mode free evolution of f)`.
    pub free_correction: GridFunction,
    pub modes: usize,
    pub mean: Complex64,
    pub initial: GridFunction,
}

/// `Σ_{j ≤ N} c_j e^{−iλ_j t} φ_j` with `c = sys.expand(f)`.
pub fn evolve(
    sys: &BiorthogonalSystem,
    pairs: &[EigenPair],
    f: &GridFunction,
    t: f64,
) -> Result<GridFunction> {
    if t < 0.0 || !t.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "time must be finite and nonnegative, got {t}"
        )));
    }
    if pairs.len() != sys.modes() {
        return Err(Error::InvalidArgument(format!(
            "{} eigenpairs for a system of {} modes",
            pairs.len(),
            sys.modes()
        )));
    }
    let coeffs = sys.expand(f)?;
    let mut amplitudes = Vec::with_capacity(coeffs.len());
    for ((c, pair), bp) in coeffs.iter().zip(pairs).zip(&sys.pairs) {
        if pair.index != bp.index {
            return Err(Error::InvalidArgument(format!(
                "eigenpair {} does not match system index {}",
                pair.index, bp.index
            )));
        }
        pair.eigenfunction.check_same_grid(&bp.phi)?;
        let growth = pair.lambda.im * t;
        if growth > GROWTH_GUARD {
            return Err(Error::ExplosiveGrowth {
                index: pair.index,
                growth,
            });
        }
        amplitudes.push(c * (Complex64::new(0.0, -t) * pair.lambda).exp());
    }
    Ok(synthesize(sys, &amplitudes))
}

// Node-parallel, mode-ordered sum: bit-identical across thread counts.
fn synthesize(sys: &BiorthogonalSystem, amplitudes: &[Complex64]) -> GridFunction {
    let grid = sys.grid();
    let values = (0..grid.nodes())
        .into_par_iter()
        .map(|i| {
            amplitudes
                .iter()
                .zip(&sys.pairs)
                .fold(Complex64::new(0.0, 0.0), |acc, (a, p)| {
                    acc + a * p.phi.values()[i]
                })
        })
        .collect();
    GridFunction::from_values(values).expect("system grid is valid")
}

/// `Σ_{j=1}^{n} ⟨f, d_j⟩ e^{−ij²t} d_j` on `f`'s grid.
///
/// Needs `n < M`; for `n < M/2` the Simpson-weighted coefficients of a
/// synthesized series are recovered exactly, so repeated application composes.
pub fn free_evolution(f: &GridFunction, t: f64, n: usize) -> Result<GridFunction> {
    let tau = t / (2.0 * PI);
    free_evolution_by(f, n, |j| {
        let turns = ((j * j) as f64 * tau).rem_euclid(1.0);
        Complex64::from_polar(1.0, -2.0 * PI * turns)
    })
}

/// [`free_evolution`] at `t = 2πp/q`, with `j²p` reduced modulo `q` exactly.
pub fn free_evolution_rational(
    f: &GridFunction,
    t: RationalTime,
    n: usize,
) -> Result<GridFunction> {
    let q = t.q() as u128;
    let p = t.p() as u128;
    free_evolution_by(f, n, |j| {
        let r = ((j as u128 * j as u128) % q * (p % q)) % q;
        t.root_of_unity(-(r as i64))
    })
}

fn free_evolution_by(
    f: &GridFunction,
    n: usize,
    phase: impl Fn(usize) -> Complex64,
) -> Result<GridFunction> {
    if n == 0 {
        return Err(Error::InvalidArgument("need at least one mode".into()));
    }
    let m = f.intervals();
    if n >= m {
        return Err(Error::InvalidArgument(format!(
            "{n} sine modes cannot be resolved on {m} intervals"
        )));
    }
    let mut coeffs = f.sine_coefficients();
    coeffs.truncate(n + 1);
    for (j, c) in coeffs.iter_mut().enumerate().skip(1) {
        *c *= phase(j);
    }
    GridFunction::sine_synthesis(f.grid(), &coeffs)
}

/// Solution, revival part and corrections at `t = 2πp/q`.
///
/// The eigenpairs carry `⟨V⟩` in `λ_j`, so the solution already includes the
/// phase `e^{−i⟨V⟩t}` that the revival part applies explicitly.
pub fn decompose_at_rational_time(
    v: &Potential,
    sys: &BiorthogonalSystem,
    pairs: &[EigenPair],
    f: &GridFunction,
    t: RationalTime,
) -> Result<RevivalDecomposition> {
    let mean = v.mean();
    let solution = evolve(sys, pairs, f, t.time())?;
    let revival_part = revival_superposition(f, t, mean);
    let correction = solution.try_sub(&revival_part)?;
    let phase = (Complex64::new(0.0, -t.time()) * mean).exp();
    let free = free_evolution_rational(f, t, pairs.len())?.scale(phase);
    let free_correction = solution.try_sub(&free)?;
    Ok(RevivalDecomposition {
        time: t,
        solution,
        revival_part,
        correction,
        free_correction,
        modes: pairs.len(),
        mean,
        initial: f.clone(),
    })
}

//! Uniform grids on `[0, π]` and complex sampled functions.
//!
//! Every field in the crate (initial data, eigenfunctions, solutions,
//! correction terms) is a [`GridFunction`]: `M + 1` complex samples at the
//! nodes `x_i = iπ/M`. `M` is always even so that composite Simpson
//! quadrature applies on the whole interval.

use std::f64::consts::PI;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};

/// Default number of intervals for every grid in the crate.
pub const DEFAULT_GRID: usize = 4096;

/// Number of intervals `M` of a uniform grid on `[0, π]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Grid(usize);

impl Grid {
    pub fn new(intervals: usize) -> Result<Self> {
        if intervals < 2 || !intervals.is_multiple_of(2) {
            return Err(Error::InvalidGrid(format!(
                "need an even number of intervals >= 2, got {intervals}"
            )));
        }
        Ok(Grid(intervals))
    }

    /// Smallest even grid `>= base` whose size is a multiple of `2q`, so that
    /// shifts by `2πk/q` land on nodes.
    pub fn divisible_by(base: usize, q: u64) -> Result<Self> {
        let step = 2 * q as usize;
        let m = base.max(2).div_ceil(step) * step;
        Grid::new(m)
    }

    pub fn intervals(self) -> usize {
        self.0
    }

    pub fn nodes(self) -> usize {
        self.0 + 1
    }

    pub fn step(self) -> f64 {
        PI / self.0 as f64
    }

    pub fn x(self, i: usize) -> f64 {
        if i == self.0 {
            PI
        } else {
            i as f64 * PI / self.0 as f64
        }
    }

    pub fn refined(self) -> Self {
        Grid(2 * self.0)
    }

    /// Composite Simpson weights for this grid.
    pub fn simpson_weights(self) -> Vec<f64> {
        let h = self.step();
        (0..=self.0)
            .map(|i| {
                if i == 0 || i == self.0 {
                    h / 3.0
                } else if i % 2 == 1 {
                    4.0 * h / 3.0
                } else {
                    2.0 * h / 3.0
                }
            })
            .collect()
    }
}

/// Complex samples on a uniform grid of `[0, π]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    grid: Grid,
    values: Vec<Complex64>,
}

impl GridFunction {
    pub fn from_values(values: Vec<Complex64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidGrid("no samples".into()));
        }
        let grid = Grid::new(values.len() - 1)?;
        Ok(GridFunction { grid, values })
    }

    pub fn zeros(grid: Grid) -> Self {
        GridFunction {
            grid,
            values: vec![Complex64::new(0.0, 0.0); grid.nodes()],
        }
    }

    pub fn from_fn(grid: Grid, f: impl Fn(f64) -> Complex64) -> Self {
        let values = (0..grid.nodes()).map(|i| f(grid.x(i))).collect();
        GridFunction { grid, values }
    }

    pub fn from_real_fn(grid: Grid, f: impl Fn(f64) -> f64) -> Self {
        Self::from_fn(grid, |x| Complex64::new(f(x), 0.0))
    }

    /// Characteristic function of `[a, b]`, endpoints included.
    pub fn indicator(grid: Grid, a: f64, b: f64) -> Self {
        Self::from_real_fn(grid, |x| if (a..=b).contains(&x) { 1.0 } else { 0.0 })
    }

    /// Orthonormal sine mode `d_j(x) = sqrt(2/π) sin(jx)`.
    pub fn sine_mode(grid: Grid, j: usize) -> Self {
        let scale = (2.0 / PI).sqrt();
        Self::from_real_fn(grid, |x| scale * (j as f64 * x).sin())
    }

    /// Orthonormal cosine mode `n_j(x) = sqrt(2/π) cos(jx)`.
    pub fn cosine_mode(grid: Grid, j: usize) -> Self {
        let scale = (2.0 / PI).sqrt();
        Self::from_real_fn(grid, |x| scale * (j as f64 * x).cos())
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn intervals(&self) -> usize {
        self.grid.intervals()
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn x(&self, i: usize) -> f64 {
        self.grid.x(i)
    }

    /// Linear interpolation between nodes; exact at nodes.
    pub fn interpolate(&self, x: f64) -> Result<Complex64> {
        if !(-1e-12..=PI + 1e-12).contains(&x) {
            return Err(Error::Domain { x, lo: 0.0, hi: PI });
        }
        let m = self.intervals();
        let s = (x / self.grid.step()).clamp(0.0, m as f64);
        let i = (s.floor() as usize).min(m - 1);
        let frac = s - i as f64;
        if frac == 0.0 {
            return Ok(self.values[i]);
        }
        Ok(self.values[i] * (1.0 - frac) + self.values[i + 1] * frac)
    }

    pub fn check_same_grid(&self, other: &GridFunction) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch {
                left: self.intervals(),
                right: other.intervals(),
            });
        }
        Ok(())
    }

    /// `∫₀^π f·conj(g)` by composite Simpson.
    pub fn inner(&self, other: &GridFunction) -> Result<Complex64> {
        self.check_same_grid(other)?;
        Ok(self.inner_unchecked(other))
    }

    pub(crate) fn inner_unchecked(&self, other: &GridFunction) -> Complex64 {
        let h = self.grid.step();
        let m = self.intervals();
        let mut odd = Complex64::new(0.0, 0.0);
        let mut even = Complex64::new(0.0, 0.0);
        for i in 1..m {
            let p = self.values[i] * other.values[i].conj();
            if i % 2 == 1 {
                odd += p;
            } else {
                even += p;
            }
        }
        let ends =
            self.values[0] * other.values[0].conj() + self.values[m] * other.values[m].conj();
        (ends + odd * 4.0 + even * 2.0) * (h / 3.0)
    }

    /// `∫₀^π f` by composite Simpson.
    pub fn integral(&self) -> Complex64 {
        simpson(&self.values, self.grid.step())
    }

    pub fn l2_norm(&self) -> f64 {
        self.inner_unchecked(self).re.max(0.0).sqrt()
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Largest modulus of a difference between adjacent nodes.
    pub fn max_jump(&self) -> f64 {
        self.values
            .windows(2)
            .map(|w| (w[1] - w[0]).norm())
            .fold(0.0, f64::max)
    }

    pub fn scale(&self, s: Complex64) -> GridFunction {
        GridFunction {
            grid: self.grid,
            values: self.values.iter().map(|v| v * s).collect(),
        }
    }

    pub fn conj(&self) -> GridFunction {
        GridFunction {
            grid: self.grid,
            values: self.values.iter().map(|v| v.conj()).collect(),
        }
    }

    pub fn try_add(&self, other: &GridFunction) -> Result<GridFunction> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn try_sub(&self, other: &GridFunction) -> Result<GridFunction> {
        self.zip_with(other, |a, b| a - b)
    }

    fn zip_with(
        &self,
        other: &GridFunction,
        op: impl Fn(Complex64, Complex64) -> Complex64,
    ) -> Result<GridFunction> {
        self.check_same_grid(other)?;
        Ok(GridFunction {
            grid: self.grid,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| op(a, b))
                .collect(),
        })
    }

    /// Every other node of a function on the refined grid.
    pub fn coarsened(&self) -> Result<GridFunction> {
        if !self.intervals().is_multiple_of(4) {
            return Err(Error::InvalidGrid(format!(
                "cannot halve {} intervals to an even grid",
                self.intervals()
            )));
        }
        let values = self.values.iter().step_by(2).copied().collect();
        GridFunction::from_values(values)
    }

    /// Sine coefficients `⟨f, d_j⟩` for `j = 0..=M` (entry 0 is zero), with the
    /// Simpson-weighted inner product of [`GridFunction::inner`].
    pub fn sine_coefficients(&self) -> Vec<Complex64> {
        let weights = self.grid.simpson_weights();
        let weighted: Vec<Complex64> = self
            .values
            .iter()
            .zip(&weights)
            .map(|(v, w)| v * *w)
            .collect();
        let scale = (2.0 / PI).sqrt();
        let mut out = sine_transform(&weighted);
        for c in &mut out {
            *c *= scale;
        }
        out[0] = Complex64::new(0.0, 0.0);
        out
    }

    /// `Σ_{j=1}^{n} c_j d_j(x)` sampled on `grid`; `coeffs[0]` is ignored.
    pub fn sine_synthesis(grid: Grid, coeffs: &[Complex64]) -> Result<GridFunction> {
        let m = grid.intervals();
        if coeffs.len() > m {
            return Err(Error::InvalidArgument(format!(
                "{} sine modes cannot be resolved on {m} intervals",
                coeffs.len() - 1
            )));
        }
        let mut padded = vec![Complex64::new(0.0, 0.0); m + 1];
        padded[1..coeffs.len()].copy_from_slice(&coeffs[1..]);
        let scale = (2.0 / PI).sqrt();
        let mut values = sine_transform(&padded);
        for v in &mut values {
            *v *= scale;
        }
        values[0] = Complex64::new(0.0, 0.0);
        values[m] = Complex64::new(0.0, 0.0);
        Ok(GridFunction { grid, values })
    }
}

impl Add for &GridFunction {
    type Output = GridFunction;

    /// Panics on grid mismatch; use [`GridFunction::try_add`] otherwise.
    fn add(self, rhs: &GridFunction) -> GridFunction {
        self.try_add(rhs).expect("grid mismatch")
    }
}

impl Sub for &GridFunction {
    type Output = GridFunction;

    fn sub(self, rhs: &GridFunction) -> GridFunction {
        self.try_sub(rhs).expect("grid mismatch")
    }
}

impl Mul<Complex64> for &GridFunction {
    type Output = GridFunction;

    fn mul(self, rhs: Complex64) -> GridFunction {
        self.scale(rhs)
    }
}

/// Composite Simpson rule over equally spaced samples (even interval count).
pub fn simpson(values: &[Complex64], h: f64) -> Complex64 {
    let m = values.len() - 1;
    debug_assert!(m.is_multiple_of(2));
    let mut acc = values[0] + values[m];
    for (i, v) in values.iter().enumerate().take(m).skip(1) {
        acc += v * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    acc * (h / 3.0)
}

/// `S_k = Σ_{n=1}^{M-1} x_n sin(πkn/M)` for `k = 0..=M`, via an FFT of the
/// odd extension of length `2M`.
pub fn sine_transform(x: &[Complex64]) -> Vec<Complex64> {
    let m = x.len() - 1;
    let mut buf = vec![Complex64::new(0.0, 0.0); 2 * m];
    for n in 1..m {
        buf[n] = x[n];
        buf[2 * m - n] = -x[n];
    }
    let fft = FftPlanner::new().plan_fft_forward(2 * m);
    fft.process(&mut buf);
    // G_k = -2i S_k
    let half_i = Complex64::new(0.0, 0.5);
    (0..=m).map(|k| buf[k % (2 * m)] * half_i).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(m: usize) -> Grid {
        Grid::new(m).unwrap()
    }

    #[test]
    fn odd_grids_are_rejected() {
        assert!(Grid::new(7).is_err());
        assert!(Grid::new(0).is_err());
        assert_eq!(Grid::divisible_by(4096, 5).unwrap().intervals(), 4100);
        assert_eq!(Grid::divisible_by(4096, 1).unwrap().intervals(), 4096);
    }

    #[test]
    fn sine_modes_are_orthonormal() {
        let grid = g(512);
        let d3 = GridFunction::sine_mode(grid, 3);
        let d5 = GridFunction::sine_mode(grid, 5);
        assert!((d3.inner(&d3).unwrap() - 1.0).norm() < 1e-13);
        assert!(d3.inner(&d5).unwrap().norm() < 1e-13);
    }

    #[test]
    fn sine_transform_matches_direct_sum() {
        let grid = g(64);
        let f = GridFunction::from_real_fn(grid, |x| x * (PI - x) * (1.0 + x.cos()));
        let fast = f.sine_coefficients();
        for j in [1usize, 2, 7, 31] {
            let direct = f.inner(&GridFunction::sine_mode(grid, j)).unwrap();
            assert!((fast[j] - direct).norm() < 1e-13, "j = {j}");
        }
        let back = GridFunction::sine_synthesis(grid, &fast[..40]).unwrap();
        let direct: Vec<Complex64> = (0..=64)
            .map(|i| {
                (1..40)
                    .map(|j| fast[j] * (2.0 / PI).sqrt() * (j as f64 * grid.x(i)).sin())
                    .sum()
            })
            .collect();
        for (a, b) in back.values().iter().zip(&direct) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn interpolation_is_exact_at_nodes_and_linear_between() {
        let grid = g(8);
        let f = GridFunction::from_real_fn(grid, |x| x);
        assert_eq!(f.interpolate(grid.x(3)).unwrap(), f.values()[3]);
        assert!((f.interpolate(1.0).unwrap().re - 1.0).abs() < 1e-14);
        assert!(f.interpolate(-0.5).is_err());
        assert!(f.interpolate(PI + 0.1).is_err());
    }

    #[test]
    fn mismatched_grids_do_not_combine() {
        let a = GridFunction::zeros(g(8));
        let b = GridFunction::zeros(g(16));
        assert!(matches!(a.try_add(&b), Err(Error::GridMismatch { .. })));
        assert!(a.inner(&b).is_err());
    }
}

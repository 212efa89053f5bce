//! Bounded complex potentials on `[0, π]` and the derived quantities used by
//! the spectral asymptotics: the mean `⟨V⟩`, the antiderivative
//! `V₁(x) = ∫₀ˣ V` and the second-order term `V₂(x) = ∫₀ˣ V·V₁ − V(x) + V(0)`.
//!
//! Analytic kinds are integrated cell by cell with Simpson's rule using the
//! cell midpoint, so the cumulative tables are exactly additive and partial
//! cells are handled with the same rule. Tabulated samples are interpolated
//! linearly and integrated exactly (trapezoid on the sample nodes).

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{Grid, GridFunction, DEFAULT_GRID};

/// Threshold on `‖V‖_∞` below which eigenvalues stay in disjoint
/// neighbourhoods of `j²`.
pub const SIMPLE_SPECTRUM_BOUND: f64 = 1.5;

const DOMAIN_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub enum PotentialKind {
    /// `V(x) = 2q·cos(2x)`.
    Mathieu { q: Complex64 },
    /// `V(x) = Σ_k cos[k]·cos(kx) + Σ_k sin[k]·sin(kx)`, `k` starting at 0.
    Fourier {
        cos: Vec<Complex64>,
        sin: Vec<Complex64>,
    },
    /// Piecewise-linear interpolant of `(x, V)` samples covering `[0, π]`.
    /// Repeated abscissae encode jumps; the right-most value wins there.
    Samples { x: Vec<f64>, values: Vec<Complex64> },
}

impl PotentialKind {
    fn is_analytic(&self) -> bool {
        !matches!(self, PotentialKind::Samples { .. })
    }
}

/// Whether a derived quantity came from a reliable rule or is a best effort.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Accuracy {
    Quadrature,
    BestEffort,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SecondTerm {
    pub value: Complex64,
    pub accuracy: Accuracy,
}

/// An immutable potential with cached mean, sup-norm estimate and
/// cumulative integral tables.
#[derive(Debug, Clone)]
pub struct Potential {
    kind: PotentialKind,
    offset: Complex64,
    quadrature: Grid,
    mean: Complex64,
    sup_norm: f64,
    // V₁ and ∫V·V₁ at the nodes of `quadrature` (analytic) or at the sample
    // abscissae (samples).
    v1_table: Vec<Complex64>,
    vv1_table: Vec<Complex64>,
}

impl Potential {
    pub fn mathieu(q: Complex64) -> Self {
        Self::build(
            PotentialKind::Mathieu { q },
            Complex64::new(0.0, 0.0),
            default_grid(),
        )
    }

    pub fn zero() -> Self {
        Self::mathieu(Complex64::new(0.0, 0.0))
    }

    pub fn constant(c: Complex64) -> Self {
        Self::fourier(vec![c], Vec::new())
    }

    pub fn fourier(cos: Vec<Complex64>, sin: Vec<Complex64>) -> Self {
        Self::build(
            PotentialKind::Fourier { cos, sin },
            Complex64::new(0.0, 0.0),
            default_grid(),
        )
    }

    pub fn samples(x: Vec<f64>, values: Vec<Complex64>) -> Result<Self> {
        if x.len() != values.len() || x.len() < 2 {
            return Err(Error::InvalidArgument(
                "samples need at least two (x, V) pairs of equal length".into(),
            ));
        }
        if x.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::InvalidArgument(
                "sample abscissae must be nondecreasing".into(),
            ));
        }
        if x[0] > DOMAIN_SLACK || x[x.len() - 1] < PI - DOMAIN_SLACK {
            return Err(Error::InvalidArgument(format!(
                "samples cover [{}, {}], not [0, π]",
                x[0],
                x[x.len() - 1]
            )));
        }
        Ok(Self::build(
            PotentialKind::Samples { x, values },
            Complex64::new(0.0, 0.0),
            default_grid(),
        ))
    }

    /// Samples taken from a grid function on its own nodes.
    pub fn from_grid_function(f: &GridFunction) -> Self {
        let x = (0..=f.intervals()).map(|i| f.x(i)).collect();
        Self::samples(x, f.values().to_vec()).expect("grid functions cover [0, π]")
    }

    /// Recomputes cached quantities on a different quadrature grid.
    pub fn with_quadrature_grid(&self, grid: Grid) -> Self {
        Self::build(self.kind.clone(), self.offset, grid)
    }

    /// `V + c`.
    pub fn shifted(&self, c: Complex64) -> Self {
        Self::build(self.kind.clone(), self.offset + c, self.quadrature)
    }

    /// `V − ⟨V⟩`.
    pub fn centered(&self) -> Self {
        self.shifted(-self.mean)
    }

    /// Pointwise complex conjugate, the potential of the adjoint operator.
    pub fn conj(&self) -> Self {
        let kind = match &self.kind {
            PotentialKind::Mathieu { q } => PotentialKind::Mathieu { q: q.conj() },
            PotentialKind::Fourier { cos, sin } => PotentialKind::Fourier {
                cos: cos.iter().map(|c| c.conj()).collect(),
                sin: sin.iter().map(|c| c.conj()).collect(),
            },
            PotentialKind::Samples { x, values } => PotentialKind::Samples {
                x: x.clone(),
                values: values.iter().map(|c| c.conj()).collect(),
            },
        };
        Self::build(kind, self.offset.conj(), self.quadrature)
    }

    fn build(kind: PotentialKind, offset: Complex64, quadrature: Grid) -> Self {
        let mut pot = Potential {
            kind,
            offset,
            quadrature,
            mean: Complex64::new(0.0, 0.0),
            sup_norm: 0.0,
            v1_table: Vec::new(),
            vv1_table: Vec::new(),
        };
        pot.fill_tables();
        pot.mean = match &pot.kind {
            PotentialKind::Mathieu { .. } => offset,
            PotentialKind::Fourier { .. } => {
                let samples = GridFunction::from_fn(quadrature, |x| pot.eval(x));
                samples.integral() / PI
            }
            PotentialKind::Samples { .. } => pot.v1_table[pot.v1_table.len() - 1] / PI,
        };
        pot.sup_norm = (0..quadrature.nodes())
            .map(|i| pot.eval(quadrature.x(i)).norm())
            .chain(match &pot.kind {
                PotentialKind::Samples { values, .. } => values
                    .iter()
                    .map(|v| (v + offset).norm())
                    .collect::<Vec<_>>(),
                _ => Vec::new(),
            })
            .fold(0.0, f64::max);
        pot
    }

    fn fill_tables(&mut self) {
        match &self.kind {
            PotentialKind::Samples { x, .. } => {
                let x = x.clone();
                let mut v1 = vec![Complex64::new(0.0, 0.0); x.len()];
                let mut vv1 = vec![Complex64::new(0.0, 0.0); x.len()];
                for i in 1..x.len() {
                    let dx = x[i] - x[i - 1];
                    let (a, b) = (self.eval_sample_at(i - 1), self.eval_sample_at(i));
                    v1[i] = v1[i - 1] + (a + b) * (dx / 2.0);
                    vv1[i] = vv1[i - 1] + (a * v1[i - 1] + b * v1[i]) * (dx / 2.0);
                }
                self.v1_table = v1;
                self.vv1_table = vv1;
            }
            _ => {
                let grid = self.quadrature;
                let h = grid.step();
                let mut v1 = vec![Complex64::new(0.0, 0.0); grid.nodes()];
                let mut vv1 = vec![Complex64::new(0.0, 0.0); grid.nodes()];
                for i in 0..grid.intervals() {
                    let (x0, x1) = (grid.x(i), grid.x(i + 1));
                    let xm = 0.5 * (x0 + x1);
                    let (f0, fm, f1) = (self.eval(x0), self.eval(xm), self.eval(x1));
                    v1[i + 1] = v1[i] + (f0 + fm * 4.0 + f1) * (h / 6.0);
                    let v1m = v1[i] + self.simpson_piece(x0, xm);
                    vv1[i + 1] =
                        vv1[i] + (f0 * v1[i] + fm * v1m * 4.0 + f1 * v1[i + 1]) * (h / 6.0);
                }
                self.v1_table = v1;
                self.vv1_table = vv1;
            }
        }
    }

    fn eval_sample_at(&self, i: usize) -> Complex64 {
        match &self.kind {
            PotentialKind::Samples { values, .. } => values[i] + self.offset,
            _ => unreachable!(),
        }
    }

    /// Simpson's rule for `∫ₐᵇ V` on one (partial) cell.
    fn simpson_piece(&self, a: f64, b: f64) -> Complex64 {
        (self.eval(a) + self.eval(0.5 * (a + b)) * 4.0 + self.eval(b)) * ((b - a) / 6.0)
    }

    pub(crate) fn eval(&self, x: f64) -> Complex64 {
        let base = match &self.kind {
            PotentialKind::Mathieu { q } => q * (2.0 * (2.0 * x).cos()),
            PotentialKind::Fourier { cos, sin } => {
                let mut acc = Complex64::new(0.0, 0.0);
                for (k, c) in cos.iter().enumerate() {
                    acc += c * (k as f64 * x).cos();
                }
                for (k, s) in sin.iter().enumerate() {
                    acc += s * (k as f64 * x).sin();
                }
                acc
            }
            PotentialKind::Samples { x: xs, values } => {
                let x = x.clamp(xs[0], xs[xs.len() - 1]);
                // first index with xs[idx] > x
                let idx = xs.partition_point(|&s| s <= x);
                if idx == 0 {
                    values[0]
                } else if idx == xs.len() || xs[idx - 1] == x {
                    values[idx - 1]
                } else {
                    let (x0, x1) = (xs[idx - 1], xs[idx]);
                    let w = (x - x0) / (x1 - x0);
                    values[idx - 1] * (1.0 - w) + values[idx] * w
                }
            }
        };
        base + self.offset
    }

    fn check_domain(x: f64) -> Result<f64> {
        if !(-DOMAIN_SLACK..=PI + DOMAIN_SLACK).contains(&x) || x.is_nan() {
            return Err(Error::Domain { x, lo: 0.0, hi: PI });
        }
        Ok(x.clamp(0.0, PI))
    }

    pub fn kind(&self) -> &PotentialKind {
        &self.kind
    }

    /// Constant added on top of the kind (from [`Potential::shifted`]).
    pub fn offset(&self) -> Complex64 {
        self.offset
    }

    /// `V(x)` for `x ∈ [0, π]`.
    pub fn evaluate(&self, x: f64) -> Result<Complex64> {
        Ok(self.eval(Self::check_domain(x)?))
    }

    /// `⟨V⟩ = (1/π)∫₀^π V`, cached at construction.
    pub fn mean(&self) -> Complex64 {
        self.mean
    }

    /// `‖V‖_∞` estimated on the quadrature grid (and sample nodes).
    pub fn sup_norm(&self) -> f64 {
        self.sup_norm
    }

    pub fn quadrature_grid(&self) -> Grid {
        self.quadrature
    }

    /// True when `‖V‖_∞ < 3/2`.
    pub fn has_simple_spectrum_bound(&self) -> bool {
        self.sup_norm < SIMPLE_SPECTRUM_BOUND
    }

    pub fn is_real(&self) -> bool {
        let real = |c: &Complex64| c.im == 0.0;
        real(&self.offset)
            && match &self.kind {
                PotentialKind::Mathieu { q } => real(q),
                PotentialKind::Fourier { cos, sin } => cos.iter().chain(sin).all(real),
                PotentialKind::Samples { values, .. } => values.iter().all(real),
            }
    }

    /// `V₁(x) = ∫₀ˣ V(s) ds`.
    pub fn antiderivative_v1(&self, x: f64) -> Result<Complex64> {
        let x = Self::check_domain(x)?;
        Ok(self.v1_unchecked(x))
    }

    fn v1_unchecked(&self, x: f64) -> Complex64 {
        if x == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        match &self.kind {
            PotentialKind::Samples { x: xs, .. } => {
                let idx = xs.partition_point(|&s| s <= x).clamp(1, xs.len() - 1);
                let x0 = xs[idx - 1];
                let a = self.eval_sample_at(idx - 1);
                let b = self.eval(x);
                self.v1_table[idx - 1] + (a + b) * ((x - x0) / 2.0)
            }
            _ => {
                let (i, x0) = self.cell_of(x);
                self.v1_table[i] + self.simpson_piece(x0, x)
            }
        }
    }

    fn cell_of(&self, x: f64) -> (usize, f64) {
        let grid = self.quadrature;
        let i = ((x / grid.step()).floor() as usize).min(grid.intervals() - 1);
        (i, grid.x(i))
    }

    /// `V₂(x) = ∫₀ˣ V·V₁ − V(x) + V(0)`. For tabulated samples the value is
    /// flagged as best effort.
    pub fn second_term_v2(&self, x: f64) -> Result<SecondTerm> {
        let x = Self::check_domain(x)?;
        let integral = if x == 0.0 {
            Complex64::new(0.0, 0.0)
        } else {
            match &self.kind {
                PotentialKind::Samples { x: xs, .. } => {
                    let idx = xs.partition_point(|&s| s <= x).clamp(1, xs.len() - 1);
                    let x0 = xs[idx - 1];
                    let a = self.eval_sample_at(idx - 1) * self.v1_table[idx - 1];
                    let b = self.eval(x) * self.v1_unchecked(x);
                    self.vv1_table[idx - 1] + (a + b) * ((x - x0) / 2.0)
                }
                _ => {
                    let (i, x0) = self.cell_of(x);
                    let xm = 0.5 * (x0 + x);
                    let g = |s: f64| self.eval(s) * self.v1_unchecked(s);
                    self.vv1_table[i] + (g(x0) + g(xm) * 4.0 + g(x)) * ((x - x0) / 6.0)
                }
            }
        };
        let accuracy = if self.kind.is_analytic() {
            Accuracy::Quadrature
        } else {
            Accuracy::BestEffort
        };
        Ok(SecondTerm {
            value: integral - self.eval(x) + self.eval(0.0),
            accuracy,
        })
    }

    /// `V` sampled on a grid.
    pub fn sample(&self, grid: Grid) -> GridFunction {
        GridFunction::from_fn(grid, |x| self.eval(x))
    }
}

fn default_grid() -> Grid {
    Grid::new(DEFAULT_GRID).expect("default grid is even")
}

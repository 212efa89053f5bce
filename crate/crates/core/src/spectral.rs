//! Dirichlet eigenpairs of `L = −∂ₓ² + V` on `(0, π)`.
//!
//! Eigenvalues are found one index at a time by shooting: integrate
//! `−y″ + Vy = λy`, `y(0) = 0`, `y′(0) = √λ` across the interval together with
//! the variational equation for `z = ∂y/∂λ`, then run complex Newton on
//! `F(λ) = y(π; λ)` from the seed `j²`. The potential is mean-centred before
//! shooting and `⟨V⟩` is added back to the reported eigenvalue.
//!
//! Two propagators are available. [`Propagator::RungeKutta4`] is the classical
//! scheme; its phase error grows like `(√λ·h)⁴`, which limits it to low
//! indices. [`Propagator::Magnus4`] is the fourth-order Magnus integrator with
//! two Gauss points, exact for constant potentials, whose error does not grow
//! with `λ`. Eigenvalue searches use Magnus by default.

use log::warn;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::{Grid, GridFunction};
use crate::potential::Potential;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Propagator {
    RungeKutta4,
    #[default]
    Magnus4,
}

#[derive(Debug, Clone, Copy)]
pub struct EigenOptions {
    pub propagator: Propagator,
    /// Convergence threshold on `|y(π; λ)|`.
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for EigenOptions {
    fn default() -> Self {
        EigenOptions {
            propagator: Propagator::Magnus4,
            tolerance: 1e-10,
            max_iterations: 50,
        }
    }
}

/// One Dirichlet eigenpair.
#[derive(Debug, Clone)]
pub struct EigenPair {
    pub index: usize,
    /// Square root (positive real part) of the eigenvalue of the mean-centred
    /// operator.
    pub omega: Complex64,
    /// Eigenvalue of `L` itself, i.e. including `⟨V⟩`.
    pub lambda: Complex64,
    /// `k_j = (λ_j − ⟨V⟩ − j²)·j²`.
    pub deviation: Complex64,
    /// Shooting solution, `y(0) = 0` and `y′(0) = omega`.
    pub eigenfunction: GridFunction,
    /// `|y(π)|` at the accepted eigenvalue.
    pub residual: f64,
}

impl EigenPair {
    pub fn centered_lambda(&self) -> Complex64 {
        self.omega * self.omega
    }

    pub fn normalized_eigenfunction(&self) -> GridFunction {
        let norm = self.eigenfunction.l2_norm();
        self.eigenfunction.scale(Complex64::new(1.0 / norm, 0.0))
    }
}

/// Result of one shooting pass.
#[derive(Debug, Clone)]
pub struct Shot {
    pub endpoint: Complex64,
    /// `∂y(π)/∂λ` from the variational equation.
    pub derivative: Complex64,
    pub trajectory: Option<GridFunction>,
}

/// Potential samples laid out for one propagator on one grid.
#[derive(Debug, Clone)]
pub struct Shooter {
    grid: Grid,
    propagator: Propagator,
    // RK4: V at the nodes and at the cell midpoints.
    // Magnus: V at the two Gauss points of each cell.
    first: Vec<Complex64>,
    second: Vec<Complex64>,
}

impl Shooter {
    pub fn new(v: &Potential, grid: Grid, propagator: Propagator) -> Self {
        let h = grid.step();
        let m = grid.intervals();
        let (first, second) = match propagator {
            Propagator::RungeKutta4 => (
                (0..=m).map(|i| v.eval(grid.x(i))).collect(),
                (0..m).map(|i| v.eval(grid.x(i) + 0.5 * h)).collect(),
            ),
            Propagator::Magnus4 => {
                let c = 3f64.sqrt() / 6.0;
                (
                    (0..m).map(|i| v.eval(grid.x(i) + (0.5 - c) * h)).collect(),
                    (0..m).map(|i| v.eval(grid.x(i) + (0.5 + c) * h)).collect(),
                )
            }
        };
        Shooter {
            grid,
            propagator,
            first,
            second,
        }
    }

    /// Same samples multiplied by `alpha` (the family `−∂ₓ² + αV`).
    pub fn scaled(&self, alpha: f64) -> Self {
        let s = |v: &Vec<Complex64>| v.iter().map(|x| x * alpha).collect();
        Shooter {
            grid: self.grid,
            propagator: self.propagator,
            first: s(&self.first),
            second: s(&self.second),
        }
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn shoot(&self, lambda: Complex64, record: bool) -> Result<Shot> {
        let root = lambda.sqrt();
        let (p0, zp0) = if root.norm() > 1e-300 {
            (root, 0.5 / root)
        } else {
            (Complex64::new(1.0, 0.0), ZERO)
        };
        let mut state = [ZERO, p0, ZERO, zp0];
        let mut trajectory = record.then(|| {
            let mut t = Vec::with_capacity(self.grid.nodes());
            t.push(ZERO);
            t
        });
        let h = self.grid.step();
        for i in 0..self.grid.intervals() {
            state = match self.propagator {
                Propagator::RungeKutta4 => rk4_step(
                    state,
                    lambda,
                    self.first[i],
                    self.second[i],
                    self.first[i + 1],
                    h,
                ),
                Propagator::Magnus4 => magnus_step(state, lambda, self.first[i], self.second[i], h),
            };
            if let Some(t) = trajectory.as_mut() {
                t.push(state[0]);
            }
        }
        if !state.iter().all(|c| c.re.is_finite() && c.im.is_finite()) {
            return Err(Error::Overflow { lambda });
        }
        Ok(Shot {
            endpoint: state[0],
            derivative: state[2],
            trajectory: trajectory.map(|t| GridFunction::from_values(t).expect("even grid")),
        })
    }
}

fn rk4_step(
    s: [Complex64; 4],
    lambda: Complex64,
    v0: Complex64,
    vm: Complex64,
    v1: Complex64,
    h: f64,
) -> [Complex64; 4] {
    let rhs = |s: [Complex64; 4], v: Complex64| {
        let a = v - lambda;
        [s[1], a * s[0], s[3], a * s[2] - s[0]]
    };
    let add = |s: [Complex64; 4], k: [Complex64; 4], f: f64| {
        [
            s[0] + k[0] * f,
            s[1] + k[1] * f,
            s[2] + k[2] * f,
            s[3] + k[3] * f,
        ]
    };
    let k1 = rhs(s, v0);
    let k2 = rhs(add(s, k1, 0.5 * h), vm);
    let k3 = rhs(add(s, k2, 0.5 * h), vm);
    let k4 = rhs(add(s, k3, h), v1);
    let mut out = s;
    for i in 0..4 {
        out[i] += (k1[i] + k2[i] * 2.0 + k3[i] * 2.0 + k4[i]) * (h / 6.0);
    }
    out
}

/// `C(z) = cosh√z`, `S(z) = sinh√z/√z` and `S′(z)`, entire in `z`.
fn cosh_sinhc(z: Complex64) -> (Complex64, Complex64, Complex64) {
    if z.norm() < 1.0 {
        let mut c = ZERO;
        let mut s = ZERO;
        let mut ds = ZERO;
        let mut zk = Complex64::new(1.0, 0.0); // z^k
        let mut fact_even = 1.0; // (2k)!
        for k in 0..16 {
            let fact_odd = fact_even * (2 * k + 1) as f64; // (2k+1)!
            c += zk / fact_even;
            s += zk / fact_odd;
            // d/dz z^{k+1}/(2k+3)! = (k+1) z^k / (2k+3)!
            ds += zk * ((k + 1) as f64 / (fact_odd * ((2 * k + 2) * (2 * k + 3)) as f64));
            zk *= z;
            fact_even = fact_odd * (2 * k + 2) as f64;
        }
        (c, s, ds)
    } else {
        let r = z.sqrt();
        let c = r.cosh();
        let s = r.sinh() / r;
        (c, s, (c - s) / (z * 2.0))
    }
}

fn magnus_step(
    s: [Complex64; 4],
    lambda: Complex64,
    va: Complex64,
    vb: Complex64,
    h: f64,
) -> [Complex64; 4] {
    let abar = (va + vb) * 0.5 - lambda;
    let delta = (va - vb) * (3f64.sqrt() * h * h / 12.0);
    let z = delta * delta + abar * (h * h);
    let (c, sc, dsc) = cosh_sinhc(z);
    let dc = sc * 0.5;
    let e00 = c + sc * delta;
    let e01 = sc * h;
    let e10 = sc * abar * h;
    let e11 = c - sc * delta;
    let h2 = h * h;
    let d00 = -(dc + dsc * delta) * h2;
    let d01 = -dsc * (h2 * h);
    let d10 = -dsc * abar * (h2 * h) - sc * h;
    let d11 = -(dc - dsc * delta) * h2;
    let [y, p, zy, zp] = s;
    [
        e00 * y + e01 * p,
        e10 * y + e11 * p,
        e00 * zy + e01 * zp + d00 * y + d01 * p,
        e10 * zy + e11 * zp + d10 * y + d11 * p,
    ]
}

/// Integrates `−y″ + Vy = λy`, `y(0) = 0`, `y′(0) = √λ` with classical RK4 and
/// returns the trajectory and `y(π)`.
pub fn shoot(v: &Potential, lambda: Complex64, grid: Grid) -> Result<(GridFunction, Complex64)> {
    shoot_with(v, lambda, grid, Propagator::RungeKutta4)
}

pub fn shoot_with(
    v: &Potential,
    lambda: Complex64,
    grid: Grid,
    propagator: Propagator,
) -> Result<(GridFunction, Complex64)> {
    if grid.intervals() < 64 {
        return Err(Error::InvalidGrid(format!(
            "shooting needs at least 64 intervals, got {}",
            grid.intervals()
        )));
    }
    let shot = Shooter::new(v, grid, propagator).shoot(lambda, true)?;
    Ok((shot.trajectory.expect("recorded"), shot.endpoint))
}

pub fn find_eigenvalue(v: &Potential, j: usize, grid: Grid) -> Result<EigenPair> {
    find_eigenvalue_with(v, j, grid, &EigenOptions::default())
}

pub fn find_eigenvalue_with(
    v: &Potential,
    j: usize,
    grid: Grid,
    opts: &EigenOptions,
) -> Result<EigenPair> {
    if j == 0 {
        return Err(Error::InvalidArgument("eigen-indices start at 1".into()));
    }
    let shooter = Shooter::new(&v.centered(), grid, opts.propagator);
    solve_index(&shooter, v.mean(), j, opts)
}

fn solve_index(
    shooter: &Shooter,
    mean: Complex64,
    j: usize,
    opts: &EigenOptions,
) -> Result<EigenPair> {
    let seed = Complex64::new((j * j) as f64, 0.0);
    let (lambda, shot) = match newton(shooter, seed, j, opts) {
        Ok(found) if !misindexed(found.0, j) => found,
        // Trace the eigenvalue along −∂ₓ² + αV from α = 0.
        _ => {
            let steps = 16;
            let mut lambda = seed;
            for k in 1..steps {
                let partial = shooter.scaled(k as f64 / steps as f64);
                lambda = newton(&partial, lambda, j, opts)?.0;
            }
            newton(shooter, lambda, j, opts)?
        }
    };
    if misindexed(lambda, j) {
        return Err(Error::Misindexed {
            index: j,
            lambda: lambda + mean,
        });
    }
    let residual = shot.endpoint.norm();
    Ok(EigenPair {
        index: j,
        omega: lambda.sqrt(),
        lambda: lambda + mean,
        deviation: (lambda - (j * j) as f64) * (j * j) as f64,
        eigenfunction: shot.trajectory.expect("recorded"),
        residual,
    })
}

fn misindexed(lambda: Complex64, j: usize) -> bool {
    let d = |k: usize| (lambda - (k * k) as f64).norm();
    let own = d(j);
    own > d(j + 1) || (j > 1 && own > d(j - 1))
}

fn newton(
    shooter: &Shooter,
    seed: Complex64,
    j: usize,
    opts: &EigenOptions,
) -> Result<(Complex64, Shot)> {
    let mut lambda = seed;
    let max_step = j as f64;
    let mut last_residual = f64::INFINITY;
    for _ in 0..opts.max_iterations {
        let shot = shooter.shoot(lambda, false)?;
        last_residual = shot.endpoint.norm();
        if shot.derivative.norm() == 0.0 {
            break;
        }
        let mut step = shot.endpoint / shot.derivative;
        if last_residual < opts.tolerance {
            // one polishing step, kept only if it does not make things worse
            let polished = shooter.shoot(lambda - step, true)?;
            if polished.endpoint.norm() <= last_residual {
                return Ok((lambda - step, polished));
            }
            return Ok((lambda, shooter.shoot(lambda, true)?));
        }
        if step.norm() > max_step {
            step *= max_step / step.norm();
        }
        lambda -= step;
    }
    Err(Error::NoConvergence {
        index: j,
        last: lambda,
        residual: last_residual,
    })
}

/// Eigenpairs `j = 1..=n`, computed in parallel and returned in index order.
pub fn eigen_sweep(v: &Potential, n: usize, grid: Grid) -> Result<Vec<EigenPair>> {
    eigen_sweep_with(v, n, grid, &EigenOptions::default())
}

pub fn eigen_sweep_with(
    v: &Potential,
    n: usize,
    grid: Grid,
    opts: &EigenOptions,
) -> Result<Vec<EigenPair>> {
    if n == 0 {
        return Err(Error::InvalidArgument("need at least one mode".into()));
    }
    if !v.has_simple_spectrum_bound() {
        warn!(
            "sup |V| = {:.3} >= 3/2: eigenvalues are not guaranteed simple; continuing",
            v.sup_norm()
        );
    }
    let shooter = Shooter::new(&v.centered(), grid, opts.propagator);
    let mean = v.mean();
    let pairs = (1..=n)
        .into_par_iter()
        .map(|j| solve_index(&shooter, mean, j, opts).map_err(|e| e.at(j)))
        .collect::<Result<Vec<_>>>()?;
    for (a, pa) in pairs.iter().enumerate() {
        for pb in &pairs[a + 1..] {
            let scale = pa.lambda.norm().max(1.0);
            if (pa.lambda - pb.lambda).norm() < 1e-8 * scale {
                return Err(Error::NotSimple {
                    first: pa.index,
                    second: pb.index,
                    lambda: pa.lambda,
                });
            }
        }
    }
    Ok(pairs)
}

/// Two-term large-index approximation `sin(jx) − cos(jx)·V₁(x)/(2j)` of the
/// eigenfunction, with `V₁` taken from the mean-centred potential.
pub fn asymptotic_eigenfunction(v: &Potential, j: usize, grid: Grid) -> GridFunction {
    let mean = v.mean();
    let jf = j as f64;
    GridFunction::from_fn(grid, |x| {
        let v1 = v.antiderivative_v1(x).expect("grid nodes lie in [0, π]") - mean * x;
        (jf * x).sin() - (jf * x).cos() * v1 / (2.0 * jf)
    })
}

/// Sup distance between `a` and the multiple `c·b` that best fits it in `L²`.
pub fn aligned_sup_distance(a: &GridFunction, b: &GridFunction) -> Result<f64> {
    let c = a.inner(b)? / b.inner(b)?;
    Ok(a.try_sub(&b.scale(c))?.sup_norm())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn grid(m: usize) -> Grid {
        Grid::new(m).unwrap()
    }

    fn free_endpoint(lambda: Complex64) -> Complex64 {
        (lambda.sqrt() * std::f64::consts::PI).sin()
    }

    #[test]
    fn free_shooting_endpoints() {
        let v = Potential::zero();
        let (_, end) = shoot(&v, c(4.0, 0.0), grid(4096)).unwrap();
        assert!(end.norm() < 1e-9);
        let (traj, end) = shoot(&v, c(2.25, 0.0), grid(4096)).unwrap();
        assert!((end.norm() - 1.0).abs() < 1e-8);
        assert!((end - free_endpoint(c(2.25, 0.0))).norm() < 1e-8);
        assert_eq!(traj.values()[0], ZERO);
        assert!(shoot(&v, c(1.0, 0.0), grid(32)).is_err());
    }

    #[test]
    fn rk4_endpoint_converges_at_fourth_order() {
        let v = Potential::mathieu(ZERO);
        let lambda = c(49.0, 0.0);
        let errs: Vec<f64> = [128, 256, 512]
            .iter()
            .map(|&m| shoot(&v, lambda, grid(m)).unwrap().1.norm())
            .collect();
        for w in errs.windows(2) {
            let ratio = w[0] / w[1];
            assert!((12.0..20.0).contains(&ratio), "ratio {ratio}");
        }
    }

    #[test]
    fn magnus_is_exact_for_constant_potential() {
        let v = Potential::constant(c(0.3, 0.2));
        let lambda = c(9.3, 0.2);
        let (traj, end) = shoot_with(&v, lambda, grid(128), Propagator::Magnus4).unwrap();
        assert!(end.norm() < 1e-12);
        // y'(0) = sqrt(lambda) while the local frequency is sqrt(lambda - V) = 3
        let x = traj.x(40);
        let expected = lambda.sqrt() / 3.0 * (3.0 * x).sin();
        assert!((traj.values()[40] - expected).norm() < 1e-12);
    }

    #[test]
    fn variational_derivative_matches_finite_difference() {
        let v = Potential::mathieu(c(0.1, 0.3));
        for prop in [Propagator::RungeKutta4, Propagator::Magnus4] {
            let s = Shooter::new(&v, grid(1024), prop);
            let lambda = c(16.2, -0.4);
            let d = s.shoot(lambda, false).unwrap().derivative;
            let eps = 1e-6;
            let fd = (s.shoot(lambda + eps, false).unwrap().endpoint
                - s.shoot(lambda - eps, false).unwrap().endpoint)
                / (2.0 * eps);
            assert!((d - fd).norm() < 1e-7 * d.norm().max(1.0), "{prop:?}");
        }
    }

    #[test]
    fn free_eigenvalue() {
        let p = find_eigenvalue(&Potential::zero(), 5, grid(4096)).unwrap();
        assert!((p.lambda - 25.0).norm() < 1e-9);
        assert!(p.deviation.norm() < 1e-9 * 25.0);
        assert!(p.omega.re > 0.0);
        assert!(p.residual < 1e-10);
        assert_eq!(p.eigenfunction.values()[0], ZERO);
        assert!(find_eigenvalue(&Potential::zero(), 0, grid(4096)).is_err());
    }

    #[test]
    fn rk4_loses_high_modes_that_magnus_keeps() {
        let v = Potential::zero();
        let opts = EigenOptions {
            propagator: Propagator::RungeKutta4,
            ..Default::default()
        };
        let rk = find_eigenvalue_with(&v, 100, grid(4096), &opts).unwrap();
        let mg = find_eigenvalue(&v, 100, grid(4096)).unwrap();
        assert!((rk.lambda - 1e4).norm() > 1e-6);
        assert!((mg.lambda - 1e4).norm() < 1e-8);
    }

    #[test]
    fn mean_is_restored() {
        let k = c(0.3, 0.1);
        let p = find_eigenvalue(&Potential::constant(k), 3, grid(512)).unwrap();
        assert!((p.lambda - (9.0 + k)).norm() < 1e-10);
        assert!(p.deviation.norm() < 1e-8);
    }

    #[test]
    fn sweep_stays_near_squares() {
        let v = Potential::mathieu(c(0.0, 0.25));
        let pairs = eigen_sweep(&v, 100, grid(4096)).unwrap();
        for (j, p) in (1..).zip(&pairs) {
            assert_eq!(p.index, j);
            assert!((p.lambda - (j * j) as f64).norm() <= 0.5, "j = {j}");
        }
    }

    #[test]
    fn conjugate_potential_has_conjugate_spectrum() {
        let v = Potential::mathieu(c(0.2, 0.5));
        let a = eigen_sweep(&v, 12, grid(2048)).unwrap();
        let b = eigen_sweep(&v.conj(), 12, grid(2048)).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!((x.lambda - y.lambda.conj()).norm() < 1e-8);
        }
    }

    #[test]
    fn real_potential_has_real_spectrum() {
        let v = Potential::fourier(
            vec![c(0.1, 0.0), c(0.4, 0.0)],
            vec![c(0.0, 0.0), c(0.0, 0.0), c(0.7, 0.0)],
        );
        for p in eigen_sweep(&v, 20, grid(2048)).unwrap() {
            assert!(p.lambda.im.abs() < 1e-8);
        }
    }

    #[test]
    fn asymptotic_form_basics() {
        let g = grid(256);
        let f = asymptotic_eigenfunction(&Potential::zero(), 3, g);
        for i in 0..=256 {
            assert!((f.values()[i] - (3.0 * g.x(i)).sin()).norm() < 1e-15);
        }
        let f = asymptotic_eigenfunction(&Potential::mathieu(c(0.0, 0.7)), 4, g);
        assert!(f.values()[0].norm() < 1e-15);
    }
}

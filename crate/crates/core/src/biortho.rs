//! Bi-orthogonal eigenfunction systems for non-self-adjoint `L`.
//!
//! The eigenfunctions `y_j` of `L = −∂ₓ² + V` and `y*_j` of
//! `L* = −∂ₓ² + conj(V)` come from two independent sweeps and are paired by
//! index. They are rescaled so that
//!
//! * `⟨φ*_j, d_j⟩ = 1`: the adjoint family keeps unit leading sine
//!   coefficient, `φ*_j = d_j + O(1/j)`;
//! * `⟨φ_j, φ*_j⟩ = 1`: `φ_j = γ_j·(y_j scaled to unit leading coefficient)`,
//!   with `γ_j = ⟨φ_j, d_j⟩ → 1`.
//!
//! Inner products are `⟨f, g⟩ = ∫₀^π f·conj(g)` by composite Simpson.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::{Grid, GridFunction};
use crate::potential::Potential;
use crate::spectral::{eigen_sweep, EigenPair};

#[derive(Debug, Clone)]
pub struct BiorthogonalPair {
    pub index: usize,
    pub phi: GridFunction,
    pub phi_star: GridFunction,
    pub gamma: Complex64,
}

#[derive(Debug, Clone)]
pub struct BiorthogonalSystem {
    pub pairs: Vec<BiorthogonalPair>,
    /// `max_{j,k} |⟨φ_j, φ*_k⟩ − δ_jk|`.
    pub gram_defect: f64,
    eigenpairs: Vec<EigenPair>,
}

/// Sweeps `L` and `L*` for `j = 1..=n` and bi-orthogonalises the results.
pub fn build_system(v: &Potential, n: usize, grid: Grid) -> Result<BiorthogonalSystem> {
    let direct = eigen_sweep(v, n, grid)?;
    let adjoint = eigen_sweep(&v.conj(), n, grid)?;
    BiorthogonalSystem::from_sweeps(direct, adjoint)
}

impl BiorthogonalSystem {
    pub fn from_sweeps(direct: Vec<EigenPair>, adjoint: Vec<EigenPair>) -> Result<Self> {
        if direct.len() != adjoint.len() || direct.is_empty() {
            return Err(Error::InvalidArgument(format!(
                "sweeps of different lengths: {} vs {}",
                direct.len(),
                adjoint.len()
            )));
        }
        let grid = direct[0].eigenfunction.grid();
        let pairs = direct
            .par_iter()
            .zip(adjoint.par_iter())
            .map(|(y, ystar)| pair_up(y, ystar, grid))
            .collect::<Result<Vec<_>>>()?;
        let gram_defect = pairs
            .par_iter()
            .map(|a| {
                pairs
                    .iter()
                    .map(|b| {
                        let g = a.phi.inner_unchecked(&b.phi_star);
                        let delta = if a.index == b.index { 1.0 } else { 0.0 };
                        (g - delta).norm()
                    })
                    .fold(0.0, f64::max)
            })
            .reduce(|| 0.0, f64::max);
        Ok(BiorthogonalSystem {
            pairs,
            gram_defect,
            eigenpairs: direct,
        })
    }

    /// Eigenpairs of `L` the system was built from.
    pub fn eigenpairs(&self) -> &[EigenPair] {
        &self.eigenpairs
    }

    pub fn modes(&self) -> usize {
        self.pairs.len()
    }

    pub fn grid(&self) -> Grid {
        self.pairs[0].phi.grid()
    }

    /// `c_j = ⟨f, φ*_j⟩` for `j = 1..=N`.
    pub fn expand(&self, f: &GridFunction) -> Result<Vec<Complex64>> {
        f.check_same_grid(&self.pairs[0].phi_star)?;
        Ok(self
            .pairs
            .iter()
            .map(|p| f.inner_unchecked(&p.phi_star))
            .collect())
    }

    /// `Σ_{j ≤ n} c_j φ_j` for the leading `n` coefficients.
    pub fn reconstruct(&self, coeffs: &[Complex64]) -> GridFunction {
        let mut out = GridFunction::zeros(self.grid());
        for (c, p) in coeffs.iter().zip(&self.pairs) {
            for (o, v) in out.values_mut().iter_mut().zip(p.phi.values()) {
                *o += c * v;
            }
        }
        out
    }

    /// `‖φ_j/‖φ_j‖₂ − d_j‖₂` for each index.
    pub fn riesz_distances(&self) -> Vec<f64> {
        self.pairs
            .iter()
            .map(|p| {
                let d = GridFunction::sine_mode(p.phi.grid(), p.index);
                let unit = p.phi.scale(Complex64::new(1.0 / p.phi.l2_norm(), 0.0));
                unit.try_sub(&d).expect("same grid").l2_norm()
            })
            .collect()
    }
}

fn pair_up(y: &EigenPair, ystar: &EigenPair, grid: Grid) -> Result<BiorthogonalPair> {
    if y.index != ystar.index {
        return Err(Error::InvalidArgument(format!(
            "sweeps out of step: {} vs {}",
            y.index, ystar.index
        )));
    }
    let j = y.index;
    let d = GridFunction::sine_mode(grid, j);
    let overlap = y.eigenfunction.inner(&ystar.eigenfunction)?;
    let scale = y.eigenfunction.l2_norm() * ystar.eigenfunction.l2_norm();
    if overlap.norm() < 1e-12 * scale.max(1.0) {
        return Err(Error::Degenerate {
            index: j,
            value: overlap.norm() / scale,
        });
    }
    let lead = ystar.eigenfunction.inner(&d)?;
    if lead.norm() < 1e-12 {
        return Err(Error::Degenerate {
            index: j,
            value: lead.norm(),
        });
    }
    let phi_star = ystar.eigenfunction.scale(lead.inv());
    let norm = y.eigenfunction.inner(&phi_star)?;
    let phi = y.eigenfunction.scale(norm.inv());
    let gamma = phi.inner(&d)?;
    Ok(BiorthogonalPair {
        index: j,
        phi,
        phi_star,
        gamma,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn free_system_is_the_sine_basis() {
        let grid = Grid::new(2048).unwrap();
        let sys = build_system(&Potential::zero(), 50, grid).unwrap();
        assert!(sys.gram_defect < 1e-9, "{}", sys.gram_defect);
        for p in &sys.pairs {
            assert!((p.gamma - 1.0).norm() < 1e-9);
            let d = GridFunction::sine_mode(grid, p.index);
            assert!(p.phi.try_sub(&d).unwrap().sup_norm() < 1e-8);
            assert!(p.phi_star.try_sub(&d).unwrap().sup_norm() < 1e-8);
        }
    }

    #[test]
    fn expansion_of_simple_data() {
        let grid = Grid::new(1024).unwrap();
        let sys = build_system(&Potential::zero(), 20, grid).unwrap();
        let c3 = sys.expand(&GridFunction::sine_mode(grid, 3)).unwrap();
        for (j, v) in (1..).zip(&c3) {
            let expected = if j == 3 { 1.0 } else { 0.0 };
            assert!((v - expected).norm() < 1e-10);
        }
        let zero = sys.expand(&GridFunction::zeros(grid)).unwrap();
        assert!(zero.iter().all(|v| v.norm() == 0.0));
        assert!(sys
            .expand(&GridFunction::zeros(Grid::new(512).unwrap()))
            .is_err());
    }

    #[test]
    fn complex_mathieu_is_biorthogonal() {
        let grid = Grid::new(2048).unwrap();
        let sys = build_system(&Potential::mathieu(c(0.0, 0.25)), 30, grid).unwrap();
        assert!(sys.gram_defect < 1e-6, "{}", sys.gram_defect);
        for p in &sys.pairs {
            let d = GridFunction::sine_mode(grid, p.index);
            assert!((p.phi_star.inner(&d).unwrap() - 1.0).norm() < 1e-12);
            assert!((p.phi.inner(&p.phi_star).unwrap() - 1.0).norm() < 1e-12);
        }
    }
}

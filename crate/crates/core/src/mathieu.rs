//! Mathieu characteristic values `b_j(q)` and odd Mathieu functions
//! `se_j(x, q)` from a truncated sine-basis matrix.
//!
//! In the basis `{sin(kx)}` the operator `−∂ₓ² + 2q·cos(2x)` acts as
//! `k²` on the diagonal plus `q` between modes `k` and `k ± 2`, since
//! `2cos(2x)sin(kx) = sin((k+2)x) + sin((k−2)x)`. For `k = 1` the second term
//! is `sin(−x) = −sin(x)`, which puts `−q` on the first diagonal entry.
//! This route shares no code with the shooting solver and serves as its
//! independent cross-check.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{Grid, GridFunction};

#[derive(Debug, Clone)]
pub struct MathieuSpectrum {
    pub qcoef: Complex64,
    /// `b_j(q)` for `j = 1..=N`.
    pub values: Vec<Complex64>,
    /// Dimension `K` of the truncated matrix.
    pub truncation: usize,
    // sine coefficients of se_j, unit L² norm on (0, π)
    vectors: Vec<Vec<Complex64>>,
}

/// `max(2N, 64)`.
pub fn default_truncation(n: usize) -> usize {
    (2 * n).max(64)
}

fn sine_matrix(q: Complex64, k: usize) -> DMatrix<Complex64> {
    let mut h = DMatrix::<Complex64>::zeros(k, k);
    for a in 0..k {
        let j = (a + 1) as f64;
        h[(a, a)] = Complex64::new(j * j, 0.0);
        if a + 2 < k {
            h[(a, a + 2)] = q;
            h[(a + 2, a)] = q;
        }
    }
    h[(0, 0)] -= q;
    h
}

pub fn characteristic_values(
    qcoef: Complex64,
    n: usize,
    truncation: usize,
) -> Result<MathieuSpectrum> {
    if n == 0 {
        return Err(Error::InvalidArgument(
            "need at least one characteristic value".into(),
        ));
    }
    if truncation < (2 * n).max(32) {
        return Err(Error::InvalidArgument(format!(
            "truncation {truncation} is below max(2N, 32) = {}",
            (2 * n).max(32)
        )));
    }
    let h = sine_matrix(qcoef, truncation);
    let eigen = h
        .clone()
        .schur()
        .eigenvalues()
        .ok_or_else(|| Error::Linalg("Schur form did not triangularise".into()))?;
    let all: Vec<Complex64> = eigen.iter().copied().collect();

    let mut taken = vec![false; all.len()];
    let mut values = Vec::with_capacity(n);
    let mut vectors = Vec::with_capacity(n);
    for j in 1..=n {
        let target = (j * j) as f64;
        let mut order: Vec<usize> = (0..all.len()).collect();
        order.sort_by(|&a, &b| {
            (all[a] - target)
                .norm()
                .partial_cmp(&(all[b] - target).norm())
                .expect("finite eigenvalues")
        });
        let (best, runner_up) = (order[0], order[1]);
        let d0 = (all[best] - target).norm();
        let d1 = (all[runner_up] - target).norm();
        if taken[best] || (d1 - d0).abs() <= 1e-12 * target {
            return Err(Error::Collision { index: j });
        }
        taken[best] = true;
        let (value, vector) = refine(&h, all[best], j)?;
        values.push(value);
        vectors.push(vector);
    }
    Ok(MathieuSpectrum {
        qcoef,
        values,
        truncation,
        vectors,
    })
}

/// Inverse iteration for the eigenvector, then the (unconjugated) Rayleigh
/// quotient of the complex-symmetric matrix.
fn refine(
    h: &DMatrix<Complex64>,
    lambda: Complex64,
    j: usize,
) -> Result<(Complex64, Vec<Complex64>)> {
    let k = h.nrows();
    let shift = lambda + Complex64::new(1e-10, 1e-10) * (1.0 + lambda.norm());
    let mut shifted = h.clone();
    for a in 0..k {
        shifted[(a, a)] -= shift;
    }
    let lu = shifted.lu();
    let mut v = nalgebra::DVector::<Complex64>::from_element(k, Complex64::new(1e-3, 0.0));
    v[j - 1] = Complex64::new(1.0, 0.0);
    for _ in 0..3 {
        v = lu
            .solve(&v)
            .ok_or_else(|| Error::Linalg(format!("singular shift for index {j}")))?;
        let norm = v.norm();
        v /= Complex64::new(norm, 0.0);
    }
    let hv = h * &v;
    let num: Complex64 = v.iter().zip(hv.iter()).map(|(a, b)| a * b).sum();
    let den: Complex64 = v.iter().map(|a| a * a).sum();
    let refined = if den.norm() > 1e-8 { num / den } else { lambda };
    // the Schur value is backward stable; keep it unless the quotient agrees
    let value = if (refined - lambda).norm() < 1e-9 * (1.0 + lambda.norm()) {
        lambda
    } else {
        refined
    };

    let mut coeffs: Vec<Complex64> = v.iter().copied().collect();
    let scale = (2.0 / PI).sqrt() / coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    let biggest = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let lead = coeffs
        .iter()
        .find(|c| c.norm() > 1e-12 * biggest)
        .copied()
        .expect("nonzero eigenvector");
    let phase = lead.conj() / lead.norm();
    for c in &mut coeffs {
        *c *= phase * scale;
    }
    Ok((value, coeffs))
}

impl MathieuSpectrum {
    /// `se_j(x, q)` for a computed index `j ≤ N`.
    pub fn se(&self, j: usize, x: f64) -> Result<Complex64> {
        let coeffs = self.vectors.get(j.wrapping_sub(1)).ok_or_else(|| {
            Error::InvalidArgument(format!("index {j} outside 1..={}", self.values.len()))
        })?;
        Ok(coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| c * ((k + 1) as f64 * x).sin())
            .sum())
    }

    /// `se_j(·, q)` sampled on a grid.
    pub fn se_on_grid(&self, j: usize, grid: Grid) -> Result<GridFunction> {
        let values = (0..grid.nodes())
            .map(|i| self.se(j, grid.x(i)))
            .collect::<Result<Vec<_>>>()?;
        GridFunction::from_values(values)
    }

    pub fn sine_coefficients(&self, j: usize) -> Option<&[Complex64]> {
        self.vectors.get(j.wrapping_sub(1)).map(Vec::as_slice)
    }
}

/// `se_j(x, q)` with unit `L²(0, π)` norm and real-positive leading sine
/// coefficient.
pub fn se_function(qcoef: Complex64, j: usize, x: f64, truncation: usize) -> Result<Complex64> {
    characteristic_values(qcoef, j, truncation)?.se(j, x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn free_values_are_squares() {
        let s = characteristic_values(c(0.0, 0.0), 10, 64).unwrap();
        for (j, b) in (1..).zip(&s.values) {
            assert_eq!(*b, c((j * j) as f64, 0.0));
        }
    }

    #[test]
    fn small_q_matches_second_order_series() {
        let s = characteristic_values(c(0.1, 0.0), 5, 64).unwrap();
        assert!((s.values[2].re - 9.000625).abs() < 1e-4);
        // known low-order values: b_1 = 1 - q - q²/8 + ..., b_2 = 4 - q²/12 + ...
        assert!((s.values[0].re - (1.0 - 0.1 - 0.01 / 8.0)).abs() < 1e-4);
        assert!((s.values[1].re - (4.0 - 0.01 / 12.0)).abs() < 1e-6);
    }

    #[test]
    fn truncation_is_converged() {
        let q = c(0.0, 0.75);
        let a = characteristic_values(q, 20, 64).unwrap();
        let b = characteristic_values(q, 20, 128).unwrap();
        for (x, y) in a.values.iter().zip(&b.values) {
            assert!((x - y).norm() < 1e-10);
        }
    }

    #[test]
    fn conjugation_and_reality() {
        let q = c(0.3, 0.6);
        let a = characteristic_values(q, 12, 64).unwrap();
        let b = characteristic_values(q.conj(), 12, 64).unwrap();
        for (x, y) in a.values.iter().zip(&b.values) {
            assert!((x - y.conj()).norm() < 1e-10);
        }
        for v in characteristic_values(c(0.8, 0.0), 12, 64).unwrap().values {
            assert!(v.im.abs() < 1e-10);
        }
    }

    #[test]
    fn se_functions() {
        for i in 0..20 {
            let x = i as f64 * 0.15;
            let got = se_function(c(0.0, 0.0), 4, x, 64).unwrap();
            assert!((got - (2.0 / PI).sqrt() * (4.0 * x).sin()).norm() < 1e-14);
        }
        assert!(se_function(c(0.0, 0.25), 1, 0.0, 64).unwrap().norm() < 1e-15);
        let s = characteristic_values(c(0.0, 0.5), 5, 64).unwrap();
        let f = s.se_on_grid(3, Grid::new(2048).unwrap()).unwrap();
        assert!((f.l2_norm() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn bad_arguments() {
        assert!(characteristic_values(c(0.1, 0.0), 20, 32).is_err());
        assert!(characteristic_values(c(0.1, 0.0), 0, 64).is_err());
        let s = characteristic_values(c(0.1, 0.0), 3, 64).unwrap();
        assert!(s.se(0, 1.0).is_err());
        assert!(s.se(4, 1.0).is_err());
    }
}

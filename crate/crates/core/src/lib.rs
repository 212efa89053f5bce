//! Weak revivals for the linear Schrödinger equation
//! `∂ₜu = −i(−∂ₓ² + V)u` on `(0, π)` with Dirichlet conditions and a bounded
//! complex potential `V`.
//!
//! At a rational time `t = 2πp/q` the solution splits into a finite Gauss-sum
//! superposition of shifted copies of the odd periodic extension of the
//! initial datum, plus a correction that is continuous in `x`. The crate
//! computes both sides of that split numerically:
//!
//! * [`potential`]: the potential and its mean, `V₁` and `V₂`;
//! * [`spectral`]: Dirichlet eigenpairs by shooting and Newton;
//! * [`biortho`]: the bi-orthogonal system built from `L` and its adjoint;
//! * [`revival`]: rational times, Gauss sums and the revival superposition;
//! * [`evolution`]: the eigenfunction expansion of `u` and the decomposition;
//! * [`mathieu`]: Mathieu characteristic values by matrix truncation;
//! * [`diagnostics`]: jump and refinement diagnostics for continuity;
//! * [`validation`]: the reproducible validation suites.
//!
//! ```
//! use num_complex::Complex64;
//! use revival_core::{grid::Grid, potential::Potential, spectral::find_eigenvalue};
//!
//! let v = Potential::zero();
//! let pair = find_eigenvalue(&v, 3, Grid::new(1024).unwrap()).unwrap();
//! assert!((pair.lambda - Complex64::new(9.0, 0.0)).norm() < 1e-9);
//! ```

pub mod biortho;
pub mod diagnostics;
pub mod error;
pub mod evolution;
pub mod grid;
pub mod mathieu;
pub mod potential;
pub mod revival;
pub mod spectral;
pub mod validation;

pub use error::{Error, Result};
pub use grid::{Grid, GridFunction};
pub use potential::Potential;
pub use revival::RationalTime;

// The guide's code snippets are compiled and run as doc-tests.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    struct Introduction;
    #[doc = include_str!("../../../book/src/potentials.md")]
    struct Potentials;
    #[doc = include_str!("../../../book/src/spectrum.md")]
    struct Spectrum;
    #[doc = include_str!("../../../book/src/biorthogonal.md")]
    struct Biorthogonal;
    #[doc = include_str!("../../../book/src/revivals.md")]
    struct Revivals;
    #[doc = include_str!("../../../book/src/decomposition.md")]
    struct Decomposition;
    #[doc = include_str!("../../../book/src/mathieu.md")]
    struct Mathieu;
    #[doc = include_str!("../../../book/src/cli.md")]
    struct Cli;
}

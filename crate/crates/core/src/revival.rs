//! Rational times and the finite revival superposition
//!
//! ```text
//! R(x) = (1/q)·e^{−2πi⟨V⟩p/q} Σ_{k,m=0}^{q−1} e^{2πi(mk/q − m²p/q)} f°(x − 2πk/q)
//! ```
//!
//! where `f°` is the odd, 2π-periodic extension of `f`. For `V = 0` this is
//! exactly the free solution at `t = 2πp/q`. All phases are reduced modulo
//! `q` in integer arithmetic before the exponential is taken.

use std::f64::consts::PI;

use num_complex::Complex64;
use num_integer::Integer;

use crate::error::{Error, Result};
use crate::grid::GridFunction;

/// `t = 2π·p/q` with `gcd(p, q) = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RationalTime {
    p: u64,
    q: u64,
}

impl RationalTime {
    /// Reduces `p/q` to lowest terms.
    pub fn new(p: u64, q: u64) -> Result<Self> {
        if p == 0 || q == 0 {
            return Err(Error::InvalidArgument(format!(
                "rational time needs positive p and q, got {p}/{q}"
            )));
        }
        let g = p.gcd(&q);
        Ok(RationalTime { p: p / g, q: q / g })
    }

    pub fn p(self) -> u64 {
        self.p
    }

    pub fn q(self) -> u64 {
        self.q
    }

    /// `2πp/q`.
    pub fn time(self) -> f64 {
        2.0 * PI * self.p as f64 / self.q as f64
    }

    /// `e^{2πi·r/q}` for an integer residue `r`.
    pub fn root_of_unity(self, r: i64) -> Complex64 {
        let r = r.rem_euclid(self.q as i64);
        Complex64::from_polar(1.0, 2.0 * PI * r as f64 / self.q as f64)
    }
}

impl std::fmt::Display for RationalTime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "2π·{}/{}", self.p, self.q)
    }
}

/// Odd, 2π-periodic extension of `f` evaluated at any real `x`.
///
/// `x` is reduced to `(−π, π]`; values on `[0, π]` are read from `f`
/// (exactly at nodes, linearly interpolated between them) and values on
/// `(−π, 0)` are `−f(−x)`.
pub fn odd_periodic_extension(f: &GridFunction, x: f64) -> Complex64 {
    let two_pi = 2.0 * PI;
    let mut r = x.rem_euclid(two_pi);
    if r > PI {
        r -= two_pi;
    }
    if r >= 0.0 {
        f.interpolate(r.min(PI)).expect("reduced into [0, π]")
    } else {
        -f.interpolate((-r).min(PI)).expect("reduced into [0, π]")
    }
}

/// Node-exact variant: the value of `f°` at node offset `n` (in units of
/// `π/M`), any integer.
fn odd_extension_at_node(f: &GridFunction, n: i64) -> Complex64 {
    let m = f.intervals() as i64;
    let mut r = n.rem_euclid(2 * m);
    if r > m {
        r -= 2 * m;
    }
    if r >= 0 {
        f.values()[r as usize]
    } else {
        -f.values()[(-r) as usize]
    }
}

/// `Σ_{k=0}^{q−1} e^{2πi(m−j)k/q}` evaluated numerically.
pub fn gauss_sum(m: i64, j: i64, q: u64) -> Complex64 {
    let qi = q as i64;
    (0..qi)
        .map(|k| {
            let r = ((m - j) * k).rem_euclid(qi);
            Complex64::from_polar(1.0, 2.0 * PI * r as f64 / q as f64)
        })
        .sum()
}

/// `q` when `j ≡ m (mod q)`, else `0`, obtained by rounding [`gauss_sum`].
pub fn gauss_indicator(m: i64, j: i64, q: u64) -> i64 {
    gauss_sum(m, j, q).re.round() as i64
}

/// Inner weights `G_k = Σ_m e^{2πi(mk − m²p)/q}` of the double sum.
pub fn revival_weights(t: RationalTime) -> Vec<Complex64> {
    let q = t.q as i64;
    let p = t.p as i64;
    (0..q)
        .map(|k| {
            (0..q)
                .map(|m| {
                    let mk = (m * k).rem_euclid(q);
                    let m2p = ((m * m).rem_euclid(q) * (p % q)).rem_euclid(q);
                    t.root_of_unity(mk - m2p)
                })
                .sum()
        })
        .collect()
}

/// The revival superposition at every node of `f`'s grid.
///
/// When `q` divides `2M`, every shift `2πk/q` is a whole number of nodes and
/// the result uses the samples of `f` exactly; otherwise `f°` is linearly
/// interpolated.
pub fn revival_superposition(f: &GridFunction, t: RationalTime, mean_v: Complex64) -> GridFunction {
    let weights = revival_weights(t);
    let q = t.q as usize;
    let m = f.intervals();
    // e^{−2πi⟨V⟩p/q}, with ⟨V⟩ possibly complex
    let phase =
        (Complex64::new(0.0, -2.0 * PI * t.p as f64 / t.q as f64) * mean_v).exp() / t.q as f64;
    let mut out = GridFunction::zeros(f.grid());
    let on_grid = (2 * m).is_multiple_of(q);
    for (k, w) in weights.iter().enumerate() {
        if w.norm() < 1e-12 {
            continue;
        }
        if on_grid {
            let shift = (2 * m * k / q) as i64;
            for (i, o) in out.values_mut().iter_mut().enumerate() {
                *o += w * odd_extension_at_node(f, i as i64 - shift);
            }
        } else {
            let shift = 2.0 * PI * k as f64 / t.q as f64;
            let grid = f.grid();
            for (i, o) in out.values_mut().iter_mut().enumerate() {
                *o += w * odd_periodic_extension(f, grid.x(i) - shift);
            }
        }
    }
    for v in out.values_mut() {
        *v *= phase;
    }
    out
}

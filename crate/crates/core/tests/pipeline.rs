use std::f64::consts::PI;

use num_complex::Complex64;
use revival_core::biortho::build_system;
use revival_core::diagnostics::{jump_ratio, plateau_levels};
use revival_core::evolution::{decompose_at_rational_time, evolve, free_evolution_rational};
use revival_core::revival::revival_superposition;
use revival_core::{Grid, GridFunction, Potential, RationalTime};

fn step(grid: Grid) -> GridFunction {
    GridFunction::indicator(grid, 3.0 * PI / 8.0, 5.0 * PI / 8.0)
}

#[test]
fn revival_of_a_step_is_a_few_plateaus() {
    let t = RationalTime::new(1, 5).unwrap();
    let g = Grid::divisible_by(4096, t.q()).unwrap();
    let r = revival_superposition(&step(g), t, Complex64::new(0.0, 0.0));
    let nonzero = plateau_levels(&r, 1e-12)
        .iter()
        .filter(|l| l.norm() > 1e-12)
        .count();
    assert!(nonzero <= 5, "{nonzero}");
}

#[test]
fn revival_preserves_the_norm_of_steps() {
    // jumps on nodes keep the discrete norm exact
    let g = Grid::new(4000).unwrap();
    let f = GridFunction::from_fn(g, |x| {
        if x > 0.5 * PI && x < 0.75 * PI {
            Complex64::new(1.0, 0.5)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    for (p, q) in [(1, 5), (2, 5), (1, 4), (3, 8)] {
        let t = RationalTime::new(p, q).unwrap();
        let r = revival_superposition(&f, t, Complex64::new(0.0, 0.0));
        let trapezoid = |h: &GridFunction| -> f64 {
            let v = h.values();
            let inner: f64 = v[1..v.len() - 1].iter().map(|z| z.norm_sqr()).sum();
            ((inner + 0.5 * (v[0].norm_sqr() + v[v.len() - 1].norm_sqr())) * g.step()).sqrt()
        };
        assert!((trapezoid(&r) - trapezoid(&f)).abs() < 1e-9, "{p}/{q}");
    }
}

#[test]
fn free_series_converges_to_the_revival() {
    let t = RationalTime::new(2, 5).unwrap();
    let g = Grid::divisible_by(16384, t.q()).unwrap();
    let f = step(g);
    let r = revival_superposition(&f, t, Complex64::new(0.0, 0.0));
    let d: Vec<f64> = [250, 1000, 4000]
        .iter()
        .map(|&n| {
            r.try_sub(&free_evolution_rational(&f, t, n).unwrap())
                .unwrap()
                .l2_norm()
        })
        .collect();
    assert!(d[0] > d[1] && d[1] > d[2], "{d:?}");
    // O(N^{-1/2}): quadrupling N roughly halves the distance
    assert!(
        (d[0] / d[1] - 2.0).abs() < 0.3 && (d[1] / d[2] - 2.0).abs() < 0.3,
        "{d:?}"
    );
}

#[test]
fn smooth_data_is_reconstructed() {
    let g = Grid::new(4096).unwrap();
    let sys = build_system(&Potential::mathieu(Complex64::new(0.0, 0.25)), 100, g).unwrap();
    let f = GridFunction::from_real_fn(g, |x| x * (PI - x) * x.sin());
    let u0 = evolve(&sys, sys.eigenpairs(), &f, 0.0).unwrap();
    assert!(u0.try_sub(&f).unwrap().l2_norm() < 1e-4);
}

#[test]
fn step_reconstruction_improves_with_modes() {
    let g = Grid::new(4096).unwrap();
    let v = Potential::mathieu(Complex64::new(0.0, 0.25));
    let sys = build_system(&v, 120, g).unwrap();
    let f = step(g);
    let coeffs = sys.expand(&f).unwrap();
    let errs: Vec<f64> = [15, 30, 60, 120]
        .iter()
        .map(|&n| sys.reconstruct(&coeffs[..n]).try_sub(&f).unwrap().l2_norm())
        .collect();
    assert!(errs.windows(2).all(|w| w[1] < w[0]), "{errs:?}");
}

#[test]
fn decomposition_identity_and_small_correction_jumps() {
    let t = RationalTime::new(1, 5).unwrap();
    let g = Grid::divisible_by(4096, t.q()).unwrap();
    let v = Potential::mathieu(Complex64::new(0.0, 0.25));
    let sys = build_system(&v, 100, g).unwrap();
    let d = decompose_at_rational_time(&v, &sys, sys.eigenpairs(), &step(g), t).unwrap();
    let back = d.revival_part.try_add(&d.correction).unwrap();
    assert!(back.try_sub(&d.solution).unwrap().sup_norm() < 1e-14);
    assert!(jump_ratio(&d).unwrap() < 0.1);
    assert!(d.free_correction.max_jump() < 1e-2);
}

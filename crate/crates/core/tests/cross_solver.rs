use num_complex::Complex64;
use revival_core::biortho::build_system;
use revival_core::mathieu::{characteristic_values, default_truncation};
use revival_core::spectral::{aligned_sup_distance, asymptotic_eigenfunction, eigen_sweep};
use revival_core::{Grid, Potential};

fn i(x: f64) -> Complex64 {
    Complex64::new(0.0, x)
}

#[test]
fn shooting_matches_matrix_values() {
    let q = i(0.25);
    let shot = eigen_sweep(&Potential::mathieu(q), 20, Grid::new(4096).unwrap()).unwrap();
    let matrix = characteristic_values(q, 20, default_truncation(20)).unwrap();
    for (p, b) in shot.iter().zip(&matrix.values) {
        assert!(
            (p.lambda - b).norm() < 1e-6,
            "j = {}: {} vs {}",
            p.index,
            p.lambda,
            b
        );
    }
}

#[test]
fn shooting_matches_mathieu_functions() {
    let q = i(0.5);
    let grid = Grid::new(4096).unwrap();
    let shot = eigen_sweep(&Potential::mathieu(q), 3, grid).unwrap();
    let se3 = characteristic_values(q, 3, default_truncation(3))
        .unwrap()
        .se_on_grid(3, grid)
        .unwrap();
    let d = aligned_sup_distance(&shot[2].normalized_eigenfunction(), &se3).unwrap();
    assert!(d < 1e-5, "{d}");
}

#[test]
fn eigenfunctions_approach_the_two_term_form() {
    // the remainder after sin(jx) − cos(jx)V₁/(2j) is at most O(1/j²)
    let v = Potential::mathieu(i(0.25));
    let grid = Grid::new(4096).unwrap();
    let pairs = eigen_sweep(&v, 40, grid).unwrap();
    let scaled: Vec<f64> = [10usize, 20, 40]
        .iter()
        .map(|&j| {
            let y = pairs[j - 1]
                .eigenfunction
                .scale(Complex64::new(1.0 / pairs[j - 1].omega.norm(), 0.0));
            let d = aligned_sup_distance(&y, &asymptotic_eigenfunction(&v, j, grid)).unwrap();
            d * (j * j) as f64
        })
        .collect();
    assert!(scaled.windows(2).all(|w| w[1] <= 1.1 * w[0]), "{scaled:?}");
    assert!(scaled[0] < 0.1, "{scaled:?}");
}

#[test]
fn biorthogonal_system_tends_to_sines() {
    let sys = build_system(&Potential::mathieu(i(0.5)), 60, Grid::new(4096).unwrap()).unwrap();
    assert!(sys.gram_defect < 1e-6);
    let bound = sys
        .pairs
        .iter()
        .map(|p| (p.gamma - 1.0).norm() * p.index as f64)
        .fold(0.0, f64::max);
    assert!(bound < 1.0, "{bound}");
    let dist = sys.riesz_distances();
    assert!(dist[59] < dist[4]);
}

use std::f64::consts::PI;

use mpw_core::hj::HamiltonianSpec;
use mpw_core::oracle::{cn_evolve, compare_l2, free_gaussian, CnConfig, CompareMode};
use mpw_core::wave::{check_norm_conservation, Grid, WaveField};
use mpw_core::C64;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn global_phase_is_invisible_to_the_invariant_mode(
        re in prop::collection::vec(-1.0..1.0f64, 32),
        im in prop::collection::vec(-1.0..1.0f64, 32),
        theta in -PI..PI,
    ) {
        let g = Grid::line(0.0, 1.0, 32).unwrap();
        let a = WaveField::new(g, re.iter().zip(&im).map(|(x, y)| C64::new(*x, *y)).collect(), 0.0, 1.0).unwrap();
        prop_assume!(a.norm() > 1e-3);
        let b = a.scaled(C64::from_polar(1.0, theta));
        prop_assert!(compare_l2(&b, &a, CompareMode::GlobalPhaseInvariant).unwrap() <= 1e-7);
        let strict = compare_l2(&b, &a, CompareMode::Strict).unwrap();
        prop_assert!((strict - 2.0 * (0.5 * theta).sin().abs()).abs() <= 1e-7);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn crank_nicolson_conserves_the_norm(x0 in 0.3..0.7f64, p0 in -40.0..40.0f64, sigma in 0.03..0.1f64) {
        let grid = Grid::line(0.0, 1.0, 201).unwrap();
        let psi = WaveField::from_fn(grid, 0.0, 1.0, |x| C64::from_polar((-(x[0] - x0).powi(2) / (2.0 * sigma * sigma)).exp(), p0 * x[0]));
        let run = cn_evolve(&HamiltonianSpec::new(1), &psi, &CnConfig { dt: 1e-4, snapshot_every: 100, ..Default::default() }, 0.1).unwrap();
        prop_assert_eq!(run.steps, 1000);
        prop_assert!(check_norm_conservation(&run.snapshots, 1e-10).unwrap().max_drift <= 1e-10);
    }
}

fn stationary_error(nodes: usize, dt: f64) -> f64 {
    let grid = Grid::line(0.0, 1.0, nodes).unwrap();
    let psi = WaveField::from_fn(grid, 0.0, 1.0, |x| C64::from((2f64).sqrt() * (PI * x[0]).sin()));
    let t = 0.5;
    let run = cn_evolve(&HamiltonianSpec::new(1), &psi, &CnConfig { dt, ..Default::default() }, t).unwrap();
    let exact = psi.scaled(C64::from_polar(1.0, -0.5 * PI * PI * t));
    compare_l2(run.last(), &exact, CompareMode::Strict).unwrap()
}

#[test]
fn crank_nicolson_is_second_order() {
    let coarse = stationary_error(41, 1e-2);
    let fine = stationary_error(81, 5e-3);
    let ratio = coarse / fine;
    assert!((3.5..4.5).contains(&ratio), "ratio {ratio} ({coarse:e} / {fine:e})");
}

#[test]
fn free_packet_matches_the_propagated_kernel() {
    let (x0, p0, sigma, t) = (-5.0, 1.0, 1.0, 2.0);
    let grid = Grid::line(-20.0, 20.0, 4001).unwrap();
    let psi = WaveField::from_fn(grid.clone(), 0.0, 1.0, |x| free_gaussian(x[0], 0.0, x0, p0, sigma, 1.0, 1.0));
    let run = cn_evolve(&HamiltonianSpec::new(1), &psi, &CnConfig { dt: 2e-3, ..Default::default() }, t).unwrap();
    let exact = WaveField::from_fn(grid, t, 1.0, |x| free_gaussian(x[0], t, x0, p0, sigma, 1.0, 1.0));
    let err = compare_l2(run.last(), &exact, CompareMode::GlobalPhaseInvariant).unwrap();
    assert!(err <= 1e-4, "{err:e}");
}

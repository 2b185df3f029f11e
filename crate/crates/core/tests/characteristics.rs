use mpw_core::field::{real, real_vector};
use mpw_core::hj::{hj_residual, integrate_characteristic, BranchStart, CollisionMode, ConstraintSet, HamiltonianSpec, StepControl};
use mpw_core::scenarios::config::{BoxConfig, DoubleSlitConfig, HarmonicConfig};
use mpw_core::scenarios::{DoubleSlit, HarmonicOscillator, ParticleBox};
use proptest::prelude::*;

fn oscillator(dim: usize, omega: f64) -> HamiltonianSpec {
    let w2 = omega * omega;
    HamiltonianSpec::new(dim)
        .with_potential(real(move |x, _| 0.5 * w2 * x.iter().map(|v| v * v).sum::<f64>()))
        .with_potential_gradient(real_vector(move |x, _| x.iter().map(|v| w2 * v).collect()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn energy_is_conserved_without_time_dependence(
        x0 in prop::collection::vec(-2.0..2.0f64, 2),
        p0 in prop::collection::vec(-2.0..2.0f64, 2),
        omega in 0.5..2.0f64,
    ) {
        let spec = oscillator(2, omega);
        let traj = integrate_characteristic(&spec, &ConstraintSet::new(), &BranchStart::new(x0, p0), 3.0, StepControl::default()).unwrap();
        prop_assert!((traj.last().t - 3.0).abs() < 1e-12);
        prop_assert!(traj.energy_drift(&spec).unwrap() <= 1e-8);
    }

    #[test]
    fn reflections_preserve_kinetic_energy(
        x0 in prop::collection::vec(0.1..0.9f64, 2),
        p0 in prop::collection::vec(-3.0..3.0f64, 2),
    ) {
        let spec = HamiltonianSpec::new(2);
        let walls = ConstraintSet::box_walls(&[0.0, 0.0], &[1.0, 1.0], CollisionMode::Elastic);
        let control = StepControl { dt: 1e-2, ..Default::default() };
        let traj = integrate_characteristic(&spec, &walls, &BranchStart::new(x0, p0), 2.0, control).unwrap();
        for e in traj.reflection_energy_errors(&spec).unwrap() {
            prop_assert!(e <= 1e-10, "reflection error {e}");
        }
        for s in &traj.samples {
            prop_assert!(s.x.iter().all(|v| (-1e-9..=1.0 + 1e-9).contains(v)));
        }
    }

    #[test]
    fn analytic_gradients_match_stencils_at_second_order(
        x in (1.0..9.0f64, -8.0..8.0f64, -2.0..2.0f64),
        t in 0.0..3.0f64,
    ) {
        let ds = DoubleSlit::new(&DoubleSlitConfig::default()).unwrap();
        let spec = ds.spec();
        let x = [x.0, x.1, x.2];
        for term in ds.terms().iter().skip(1) {
            let (g1, l1) = term.branch.finite_difference_deviation(&spec, &x, t, 2e-2).unwrap();
            let (g2, l2) = term.branch.finite_difference_deviation(&spec, &x, t, 1e-2).unwrap();
            for (coarse, fine) in [(g1, g2), (l1, l2)] {
                prop_assert!(coarse < 1e-3);
                if fine > 1e-9 {
                    let ratio = coarse / fine;
                    prop_assert!((3.0..5.0).contains(&ratio), "ratio {ratio}");
                }
            }
        }
    }

    #[test]
    fn box_and_oscillator_branches_solve_hj(
        x in 0.0..1.0f64,
        t in 0.0..5.0f64,
        y in -2.0..2.0f64,
        wt in 0.2..2.9f64,
    ) {
        let bx = ParticleBox::new(&BoxConfig::default()).unwrap();
        let spec = bx.spec();
        for term in bx.terms(3).unwrap() {
            prop_assert!(hj_residual(&spec, &term.branch, &[x], t).unwrap().norm() <= 1e-8);
        }
        let osc = HarmonicOscillator::new(&HarmonicConfig::default()).unwrap();
        prop_assert!(hj_residual(&osc.spec(), &osc.branch(0), &[y], wt / osc.omega).unwrap().norm() <= 1e-8);
    }
}

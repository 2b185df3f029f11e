use std::f64::consts::TAU;

use mpw_core::scenarios::config::{BoxConfig, CoulombConfig};
use mpw_core::scenarios::spin::{epr_correlation, epr_correlation_with, unit_from_angles};
use mpw_core::scenarios::{kinetic_identity_defect, quaternion_map, quaternion_sheets_2d, Coulomb, ParticleBox, Sheet};
use mpw_core::wave::{assemble_wave, AssembleOptions};
use proptest::prelude::*;

fn unit() -> impl Strategy<Value = [f64; 3]> {
    (0.05..3.09f64, 0.0..TAU).prop_map(|(a, b)| unit_from_angles(a, b))
}

fn dot(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn epr_correlation_ignores_the_hidden_direction(n1 in unit(), n2 in unit(), hidden in prop::collection::vec(unit(), 8)) {
        let reference = epr_correlation(&n1, &n2).unwrap();
        prop_assert!((reference + dot(&n1, &n2)).abs() <= 1e-12);
        for n_o in &hidden {
            prop_assert!((epr_correlation_with(&n1, &n2, n_o).unwrap() - reference).abs() <= 1e-12);
        }
    }

    #[test]
    fn quaternion_sheets_round_trip(x2 in -5.0..5.0f64, x3 in -5.0..5.0f64) {
        let x = [0.0, x2, x3];
        prop_assume!(x2.hypot(x3) > 1e-6);
        let [a, b] = quaternion_sheets_2d(&x).unwrap();
        prop_assert_eq!((a.sheet, b.sheet), (Sheet::Plus, Sheet::Minus));
        let scale = x2.hypot(x3);
        for c in [a, b] {
            prop_assert!((c.r() - scale).abs() <= 1e-12 * scale);
            let y = quaternion_map(&c.q);
            for i in 0..3 {
                prop_assert!((y[i] - x[i]).abs() <= 1e-12 * scale);
            }
        }
    }

    #[test]
    fn kinetic_identity_holds_on_random_tangents(
        q in prop::array::uniform4(-2.0..2.0f64),
        qdot in prop::array::uniform4(-2.0..2.0f64),
    ) {
        prop_assume!(q.iter().map(|v| v * v).sum::<f64>() > 1e-3);
        prop_assert!(kinetic_identity_defect(&q, &qdot, true) <= 1e-12);
        let slice = [q[0], q[1], 0.0, 0.0];
        let tangent = [qdot[0], qdot[1], 0.0, 0.0];
        prop_assume!(slice[0].hypot(slice[1]) > 1e-2 && tangent[0].hypot(tangent[1]) > 1e-2);
        prop_assert!(kinetic_identity_defect(&slice, &tangent, false) <= 1e-12);
    }

    #[test]
    fn box_families_sum_to_the_sine_series(x_o in 0.05..0.95f64, t in 0.0..2.0f64, levels in 1usize..8) {
        let bx = ParticleBox::new(&BoxConfig { x_o, grid_nodes: 101, ..Default::default() }).unwrap();
        let psi = assemble_wave(&bx.terms(levels).unwrap(), &bx.grid().unwrap(), t, 1.0, AssembleOptions::default()).unwrap();
        for (x, v) in psi.grid.points().iter().zip(&psi.values) {
            prop_assert!((v - bx.closed_form(x[0], t, levels)).norm() <= 1e-10);
        }
    }

    #[test]
    fn spectra_match_closed_forms(length in 0.3..4.0f64, mass in 0.2..5.0f64, g in 0.2..5.0f64) {
        let bx = ParticleBox::new(&BoxConfig { length, mass, ..Default::default() }).unwrap();
        for (i, e) in bx.energies(20).unwrap().iter().enumerate() {
            let exact = bx.exact_energy(i + 1);
            prop_assert!((e - exact).abs() <= 1e-10 * exact);
        }
        let c = Coulomb::new(&CoulombConfig { mass, g, ..Default::default() }).unwrap();
        let levels = c.spectrum(10).unwrap();
        prop_assert_eq!(levels.len(), 10);
        for l in &levels {
            let exact = c.exact_energy(l.k);
            prop_assert!((l.energy - exact).abs() <= 1e-10 * exact);
            let ratio = levels[0].energy / l.energy;
            prop_assert!((ratio - (l.k * l.k) as f64).abs() <= 1e-10 * ratio);
        }
    }
}

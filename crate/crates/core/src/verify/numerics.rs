use std::f64::consts::PI;

use crate::error::Result;
use crate::field::{real, C64};
use crate::hj::HamiltonianSpec;
use crate::oracle::{cn_evolve, CnConfig};
use crate::scenarios::config::{BoxConfig, CoulombConfig};
use crate::scenarios::{Coulomb, ParticleBox};
use crate::verify::{CheckResult, Suite};
use crate::wave::{
    assemble_wave, check_norm_conservation, collapse, geometric_series_filter, AssembleOptions, Grid, MeasurementOperator, QuantizationProblem, WaveField,
};

fn filter_extremes(problem: &QuantizationProblem, roots: &[f64], k: u64) -> (f64, f64) {
    let phase = |w: f64| (problem.phase)(w) / problem.hbar;
    let at_roots = roots.iter().map(|&w| geometric_series_filter(phase(w), k)).fold(1.0, f64::min);
    let between = roots.windows(2).map(|p| geometric_series_filter(phase(0.5 * (p[0] + p[1])), k)).fold(0.0, f64::max);
    (at_roots, between)
}

pub(super) fn quantization(suite: &Suite) -> Result<Vec<CheckResult>> {
    let k = 100_000;
    let bx = ParticleBox::new(&suite.file("box").params::<BoxConfig>()?)?;
    let box_roots = bx.momenta(20)?;
    let (b_on, b_off) = filter_extremes(&bx.quantization(), &box_roots, k);
    let c = Coulomb::new(&suite.file("coulomb").params::<CoulombConfig>()?)?;
    let c_roots: Vec<f64> = c.spectrum(10)?.iter().map(|l| l.omega).rev().collect();
    let mut c_sorted = c_roots.clone();
    c_sorted.sort_by(f64::total_cmp);
    let (c_on, c_off) = filter_extremes(&c.quantization(), &c_sorted, k);
    let on = suite.tol("box", "filter_on", 0.99);
    let off = suite.tol("box", "filter_off", 0.05);
    Ok(vec![
        CheckResult::at_least("box filter at roots", b_on, on, "K = 1e5, p_1..p_20"),
        CheckResult::at_most("box filter at midpoints", b_off, off, ""),
        CheckResult::at_least("Coulomb filter at roots", c_on, on, "K = 1e5, ω_1..ω_10"),
        CheckResult::at_most("Coulomb filter at midpoints", c_off, off, ""),
    ])
}

pub(super) fn norm(suite: &Suite) -> Result<Vec<CheckResult>> {
    let tol = suite.tol("box", "cn_drift", 1e-10);
    let bx = ParticleBox::new(&suite.file("box").params::<BoxConfig>()?)?;
    let l = bx.cfg.length;
    let grid = bx.grid()?;
    let psi = WaveField::from_fn(grid, 0.0, bx.cfg.hbar, |x| {
        let d = x[0] - 0.3 * l;
        C64::from_polar((-d * d / (2.0 * (0.05 * l).powi(2))).exp(), 40.0 * x[0] / l)
    })
    .normalized()?;
    let run = cn_evolve(&bx.spec(), &psi, &CnConfig { dt: 1e-4 * l * l, snapshot_every: 100, ..Default::default() }, 0.1 * l * l)?;
    let drift_1d = check_norm_conservation(&run.snapshots, tol)?.max_drift;

    let g2 = Grid::spanning(&[-5.0, -5.0], &[5.0, 5.0], &[51, 51])?;
    let psi2 = WaveField::from_fn(g2, 0.0, 1.0, |x| C64::from_polar((-(x[0] - 1.0).powi(2) - x[1] * x[1]).exp(), 2.0 * x[1])).normalized()?;
    let spec2 = HamiltonianSpec::new(2).with_potential(real(|x, _| 0.5 * (x[0] * x[0] + x[1] * x[1])));
    let run2 = cn_evolve(&spec2, &psi2, &CnConfig { dt: 1e-3, snapshot_every: 100, ..Default::default() }, 1.0)?;
    let drift_2d = check_norm_conservation(&run2.snapshots, tol)?.max_drift;

    let terms = bx.terms(8)?;
    let assembled = assemble_wave(&terms, &bx.grid()?, 0.37, bx.cfg.hbar, AssembleOptions { normalize: true, ..Default::default() })?;
    let unit = (assembled.norm() - 1.0).abs();
    let p = 2.0 * PI * 3.0 / (assembled.grid.spacing[0] * assembled.grid.counts[0] as f64);
    let after_p = collapse(&assembled, &MeasurementOperator::Fourier, &[p])?;
    let after_x = collapse(&assembled, &MeasurementOperator::PositionDelta, &[0.5 * l])?;
    let pipeline = unit.max((after_p.norm() - 1.0).abs()).max((after_x.norm() - 1.0).abs());
    Ok(vec![
        CheckResult::at_most("CN drift, 1D box, 1000 steps", drift_1d, tol, format!("{} steps", run.steps)),
        CheckResult::at_most("CN drift, 2D oscillator, 1000 steps", drift_2d, tol, format!("{} steps", run2.steps)),
        CheckResult::at_most("assemble → collapse → renormalize", pipeline, suite.tol("box", "pipeline", 1e-12), "momentum and position outcomes"),
    ])
}

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::field::C64;
use crate::oracle::{cn_evolve, compare_l2, free_kernel, CnConfig, CompareMode};
use crate::scenarios::config::{BoxConfig, DoubleSlitConfig, HarmonicConfig, TunnelingConfig};
use crate::scenarios::{DoubleSlit, HarmonicOscillator, ParticleBox, Tunneling};
use crate::verify::{CheckResult, Suite};
use crate::wave::{schrodinger_residual_at, Grid, WaveField};

pub(super) fn two_slit(suite: &Suite) -> Result<Vec<CheckResult>> {
    let ds = DoubleSlit::new(&suite.file("two-slit").params::<DoubleSlitConfig>()?)?;
    let screen = ds.screen_intensity();
    let n = screen.len();
    let cell = screen[1].y - screen[0].y;
    let peak = screen.iter().map(|s| s.intensity).fold(0.0, f64::max);
    let asym = (0..n / 2).map(|i| (screen[i].intensity - screen[n - 1 - i].intensity).abs()).fold(0.0, f64::max) / peak;
    let top = screen.iter().max_by(|a, b| a.intensity.total_cmp(&b.intensity)).expect("non-empty screen");

    let roots = ds.extremum_roots(40 * n);
    let extrema: Vec<f64> = (1..n - 1)
        .filter(|&i| {
            let (a, b, c) = (screen[i - 1].intensity, screen[i].intensity, screen[i + 1].intensity);
            (b >= a && b > c) || (b <= a && b < c)
        })
        .map(|i| screen[i].y)
        .collect();
    let nearest = |set: &[f64], y: f64| set.iter().map(|r| (r - y).abs()).fold(f64::INFINITY, f64::min);
    let off = extrema.iter().map(|&y| nearest(&roots, y)).fold(0.0, f64::max) / cell;
    let interior_roots: Vec<f64> = roots.iter().copied().filter(|r| r.abs() < ds.cfg.screen_half_width - cell).collect();
    let missed = interior_roots.iter().map(|&r| nearest(&extrema, r)).fold(0.0, f64::max) / cell;
    let phase_roots = ds.phase_condition_roots(40 * n);
    let phase_off = extrema.iter().map(|&y| nearest(&phase_roots, y)).fold(0.0, f64::max) / cell;

    Ok(vec![
        CheckResult::at_most("screen asymmetry", asym, suite.tol("two-slit", "symmetry", 1e-12), "max |I(y) − I(−y)| / max I"),
        CheckResult::at_most(
            "global maximum offset / cell",
            top.y.abs() / cell,
            suite.tol("two-slit", "axis_max_cells", 0.5),
            format!("argmax y = {:.3e}", top.y),
        ),
        CheckResult::at_most(
            "extremum → root distance / cell",
            off,
            suite.tol("two-slit", "extrema_cells", 1.0),
            format!("{} discrete extrema, {} roots", extrema.len(), roots.len()),
        ),
        CheckResult::at_most(
            "root → extremum distance / cell",
            missed,
            suite.tol("two-slit", "extrema_cells", 1.0),
            "every interior root of d|ψ|²/dx² has a discrete extremum",
        ),
        CheckResult::report("extremum → phase-condition root / cell", phase_off, "roots of sin(p_o(r₁ − r₂)/ħ) only"),
    ])
}

pub(super) fn particle_box(suite: &Suite) -> Result<Vec<CheckResult>> {
    let bx = ParticleBox::new(&suite.file("box").params::<BoxConfig>()?)?;
    let levels = 20;
    let energies = bx.energies(levels)?;
    let worst = energies.iter().enumerate().map(|(i, e)| (e - bx.exact_energy(i + 1)).abs() / bx.exact_energy(i + 1)).fold(0.0, f64::max);
    let mut fidelity: f64 = 1.0;
    let mut phase_err: f64 = 0.0;
    for k in 1..=levels {
        let psi = bx.eigenterm(k)?;
        let period = bx.period(k);
        let out = cn_evolve(&bx.spec(), &psi, &CnConfig { dt: period / 1000.0, ..Default::default() }, period)?;
        let ov = psi.inner(out.last())? / psi.norm_sqr();
        fidelity = fidelity.min(ov.norm());
        phase_err = phase_err.max(ov.arg().abs());
    }
    Ok(vec![
        CheckResult::at_most("E_k relative error, k ≤ 20", worst, suite.tol("box", "spectrum", 1e-10), format!("E_1 = {:.10}", energies[0])),
        CheckResult::at_least("min CN fidelity over one period", fidelity, 1.0 - suite.tol("box", "fidelity", 1e-6), "k = 1..20, 1000 steps each"),
        CheckResult::report("max |phase − e^{−iE_kT/ħ}|", phase_err, "grid dispersion of the discrete Laplacian"),
    ])
}

pub(super) fn harmonic(suite: &Suite) -> Result<Vec<CheckResult>> {
    let cfg = suite.file("harmonic").params::<HarmonicConfig>()?;
    let osc = HarmonicOscillator::new(&HarmonicConfig { dim: 1, x_o: vec![cfg.x_o[0]], ..cfg.clone() })?;
    let (m, w, h) = (osc.mass, osc.omega, osc.hbar);
    let mut rng = ChaCha8Rng::seed_from_u64(suite.seed("harmonic", 5));
    let lim = (4.0 * h / (m * w)).sqrt();
    let mut mehler: f64 = 0.0;
    let mut abel: f64 = 0.0;
    for _ in 0..100 {
        let (x, xo) = (rng.random_range(-lim..lim), rng.random_range(-lim..lim));
        let t = rng.random_range(0.2..2.9) / w;
        let k = osc.kernel(&[x], &[xo], t)?;
        mehler = mehler.max((k - osc.eigen_expansion(&[x], &[xo], t, cfg.k_max)).norm());
        let tau = C64::new(t, -0.5 / w);
        let kc = osc.kernel_complex_time(&[x], &[xo], tau);
        abel = abel.max((kc - osc.eigen_expansion_complex_time(&[x], &[xo], tau, 4 * cfg.k_max)).norm() / kc.norm());
    }

    let grid = Grid::line(-8.0, 8.0, 1601)?;
    let (x0, sigma) = (1.0, (h / (m * w)).sqrt());
    let psi0 = WaveField::from_fn(grid, 0.0, h, |x| C64::from((-(x[0] - x0).powi(2) / (2.0 * sigma * sigma)).exp())).normalized()?;
    let t = 1.0 / w;
    let by_kernel = osc.kernel_propagate(&psi0, t)?;
    let by_cn = cn_evolve(&osc.spec(), &psi0, &CnConfig { dt: t / 1000.0, ..Default::default() }, t)?;
    let prop = compare_l2(&by_kernel, by_cn.last(), CompareMode::GlobalPhaseInvariant)?;

    let slow = HarmonicOscillator::new(&HarmonicConfig { omega: 1e-5, dim: 1, x_o: vec![0.0], ..cfg.clone() })?;
    let mut free: f64 = 0.0;
    for _ in 0..50 {
        let (x, xo, t) = (rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0), rng.random_range(0.1..3.0));
        let f = free_kernel(&[x], &[xo], t, m, h);
        free = free.max((slow.kernel(&[x], &[xo], t)? - f).norm() / f.norm());
    }
    Ok(vec![
        CheckResult::at_most("kernel − Hermite sum (K = 60)", mehler, suite.tol("harmonic", "mehler", 1e-9), "max abs over 100 samples, real time"),
        CheckResult::report("regularized sum (t − i/2ω), rel", abel, "same samples, 4K terms"),
        CheckResult::at_most("kernel propagation vs CN", prop, suite.tol("harmonic", "propagation", 1e-4), "phase-invariant relative L², ωt = 1"),
        CheckResult::at_most("ω → 0 vs free kernel", free, suite.tol("harmonic", "free_limit", 1e-6), "ω = 1e-5, relative"),
        CheckResult::at_most("E_0 − ħω/2", (osc.energy(0) - 0.5 * h * w).abs(), 1e-15, ""),
    ])
}

pub(super) fn tunneling(suite: &Suite) -> Result<Vec<CheckResult>> {
    let tn = Tunneling::new(&suite.file("tunneling").params::<TunnelingConfig>()?)?;
    let s = tn.solve()?;
    let spec = tn.spec();
    let terms = tn.terms()?;
    let h = 1e-4;
    let mut worst: f64 = 0.0;
    for side in [-1.0, 1.0] {
        for &d in &[0.5, 1.3, 2.9] {
            let x = [side * d];
            let psi = |y: &[f64]| terms.iter().map(|t| t.value(y, 0.4, spec.hbar())).sum::<C64>();
            let dpsi: C64 = terms.iter().map(|t| t.time_derivative(&x, 0.4, spec.hbar())).sum();
            let r = schrodinger_residual_at(&spec, &psi, dpsi, &x, 0.4, &[h])?;
            worst = worst.max(r.norm() / psi(&x).norm());
        }
    }
    let cn = tn.cn_transmission()?;
    Ok(vec![
        CheckResult::at_most(
            "step equations residual",
            s.residuals[0].max(s.residuals[1]),
            suite.tol("tunneling", "equations", 1e-12),
            format!("ρ_R = {:.6}, ρ_T = {:.6}", s.rho_r, s.rho_t),
        ),
        CheckResult::at_most("piecewise wave residual (h = 1e-4)", worst, suite.tol("tunneling", "wave_residual", 1e-6), "relative, both sides of the step"),
        CheckResult::report("unused middle equality gap", s.middle_gap, "(ρ_o + ρ_R) − (ρ_T + 2ρ_R)"),
        CheckResult::report("CN transmitted fraction", cn.cn_fraction, format!("branch {:.4}, textbook {:.4}", cn.branch_fraction, cn.textbook_fraction)),
        CheckResult::report("branch vs CN discrepancy", cn.discrepancy, "target 5 %, reported only"),
    ])
}

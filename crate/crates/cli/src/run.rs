use anyhow::{bail, Result};
use mpw_core::hj::hj_residual;
use mpw_core::scenarios::config::{AharonovBohmConfig, BoxConfig, CoulombConfig, DoubleSlitConfig, HarmonicConfig, SpinConfig, TunnelingConfig};
use mpw_core::scenarios::spin::{bell_binary_correlation, chsh, chsh_binary, coplanar, epr_correlation};
use mpw_core::scenarios::{AharonovBohm, Coulomb, DoubleSlit, HarmonicOscillator, ParticleBox, ScenarioFile, Tunneling};
use mpw_core::verify::{residual_slope, CheckResult};
use mpw_core::wave::{assemble_wave, AssembleOptions, BranchTerm, Grid};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::artifacts::{num, Artifacts};

/// Command-line overrides on top of the scenario file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub grid_scale: f64,
    pub screen: Option<f64>,
    pub levels: Option<usize>,
    pub angles: Option<Vec<f64>>,
    pub time: Option<f64>,
}

impl Overrides {
    fn nodes(&self, n: usize) -> usize {
        (((n - 1) as f64 * self.grid_scale).round() as usize).max(2) + 1
    }
}

pub fn run(file: &ScenarioFile, ov: &Overrides, out: &mut Artifacts) -> Result<Vec<CheckResult>> {
    let seed = ov.seed.or(file.seed).unwrap_or(0);
    match file.scenario.as_str() {
        "two-slit" => two_slit(file, ov, seed, out),
        "aharonov-bohm" => aharonov_bohm(file, ov, out),
        "box" => particle_box(file, ov, out),
        "tunneling" => tunneling(file, ov, out),
        "harmonic" => harmonic(file, ov, seed, out),
        "coulomb" => coulomb(file, ov, out),
        "epr" => epr(file, ov, out),
        other => bail!("unknown scenario `{other}`"),
    }
}

fn branch_rows(terms: &[BranchTerm]) -> Vec<Vec<String>> {
    terms
        .iter()
        .map(|t| {
            let b = &t.branch;
            vec![
                b.id.to_string(),
                b.label.clone(),
                format!("{:?}", b.kind),
                b.lineage.len().to_string(),
                num(t.weight.re),
                num(t.weight.im),
                b.complex_valued.to_string(),
            ]
        })
        .collect()
}

const BRANCH_HEADER: [&str; 7] = ["id", "label", "kind", "branch_points", "re_weight", "im_weight", "complex"];

fn two_slit(file: &ScenarioFile, ov: &Overrides, seed: u64, out: &mut Artifacts) -> Result<Vec<CheckResult>> {
    let mut cfg: DoubleSlitConfig = file.params()?;
    if let Some(x) = ov.screen {
        cfg.screen_x = x;
    }
    cfg.screen_nodes = ov.nodes(cfg.screen_nodes);
    let ds = DoubleSlit::new(&cfg)?;
    let screen = ds.screen_intensity();
    out.csv("screen.csv", &["y", "intensity", "d_intensity_dy"], screen.iter().map(|s| vec![num(s.y), num(s.intensity), num(ds.intensity_slope(s.y))]))?;

    let terms = ds.terms();
    out.csv("branches.csv", &BRANCH_HEADER, branch_rows(&terms))?;

    let spec = ds.spec();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut reports = Vec::new();
    let (mut worst_slope, mut worst_hj): (f64, f64) = (0.0, 0.0);
    for term in &terms {
        let side = if term.contains(&[1.0, 0.0, 0.0], 0.0) { 1.0 } else { -1.0 };
        let pts: Vec<Vec<f64>> = [[3.0, 1.0, 0.5], [6.0, -2.0, 1.0], [8.0, 4.0, -1.0]].iter().map(|p| vec![side * p[0], p[1], p[2]]).collect();
        let slope = residual_slope(&spec, term, &pts, 0.7, 0.1)?;
        let mut hj: f64 = 0.0;
        for _ in 0..1000 {
            let x = [side * rng.random_range(0.5..10.0), rng.random_range(-10.0..10.0), rng.random_range(-3.0..3.0)];
            hj = hj.max(hj_residual(&spec, &term.branch, &x, rng.random_range(0.0..5.0))?.norm());
        }
        worst_slope = worst_slope.max((slope.slope - 2.0).abs());
        worst_hj = worst_hj.max(hj);
        reports.push(json!({ "branch": term.branch.label, "residual": slope, "max_hj_residual": hj }));
    }
    let n = screen.len();
    let peak = screen.iter().map(|s| s.intensity).fold(0.0, f64::max);
    let asym = (0..n / 2).map(|i| (screen[i].intensity - screen[n - 1 - i].intensity).abs()).fold(0.0, f64::max) / peak;
    let checks = vec![
        CheckResult::at_most("|slope − 2|", worst_slope, file.tolerance("residual_slope", 0.2), "3-point log-log fit per branch"),
        CheckResult::at_most("max hj residual", worst_hj, file.tolerance("hj_residual", 1e-8), "1000 samples per branch"),
        CheckResult::at_most("screen asymmetry", asym, file.tolerance("symmetry", 1e-12), "max |I(y) − I(−y)| / max I"),
    ];
    out.json("residual.json", json!({ "screen_x": cfg.screen_x, "fringe_spacing": ds.fraunhofer_spacing(), "branches": reports, "checks": checks }))?;
    Ok(checks)
}

fn aharonov_bohm(file: &ScenarioFile, ov: &Overrides, out: &mut Artifacts) -> Result<Vec<CheckResult>> {
    let mut cfg: AharonovBohmConfig = file.params()?;
    if let Some(x) = ov.screen {
        cfg.slit.screen_x = x;
    }
    cfg.slit.screen_nodes = ov.nodes(cfg.slit.screen_nodes);
    let ab = AharonovBohm::new(&cfg)?;
    let terms = ab.terms()?;
    let hbar = cfg.slit.hbar;
    let rows = ab.slit.screen_ys().into_iter().map(|y| {
        let x = [cfg.slit.screen_x, y, 0.0];
        let psi: mpw_core::C64 = terms.iter().filter(|t| t.contains(&x, 0.0)).map(|t| t.value(&x, 0.0, hbar)).sum();
        let (circ, winding) = ab.loop_circulation(&x);
        vec![num(y), num(psi.norm_sqr()), num(ab.relative_phase(&x)), num(circ), winding.to_string()]
    });
    out.csv("screen.csv", &["y", "intensity", "relative_phase", "loop_circulation", "winding"], rows)?;
    out.csv("branches.csv", &BRANCH_HEADER, branch_rows(&terms))?;
    let gauge = ab.gauge()?;
    let checks = vec![CheckResult::at_most("max |∇·A|", gauge.max_divergence, gauge.tolerance, format!("{} samples", gauge.samples))];
    out.json("gauge.json", json!({ "gauge": gauge, "flux_phase": cfg.charge * cfg.flux / hbar, "checks": checks }))?;
    Ok(checks)
}

fn particle_box(file: &ScenarioFile, ov: &Overrides, out: &mut Artifacts) -> Result<Vec<CheckResult>> {
    let mut cfg: BoxConfig = file.params()?;
    cfg.grid_nodes = ov.nodes(cfg.grid_nodes);
    let levels = ov.levels.unwrap_or(cfg.k_max);
    let bx = ParticleBox::new(&cfg)?;
    let energies = bx.energies(levels)?;
    let rel: Vec<f64> = energies.iter().enumerate().map(|(i, e)| (e - bx.exact_energy(i + 1)).abs() / bx.exact_energy(i + 1)).collect();
    out.csv(
        "spectrum.csv",
        &["k", "energy", "exact", "rel_error"],
        energies.iter().enumerate().map(|(i, e)| vec![(i + 1).to_string(), num(*e), num(bx.exact_energy(i + 1)), num(rel[i])]),
    )?;
    let terms = bx.terms(levels)?;
    out.csv("branches.csv", &BRANCH_HEADER, branch_rows(&terms))?;
    let t = ov.time.unwrap_or(0.0);
    let psi = assemble_wave(&terms, &bx.grid()?, t, cfg.hbar, AssembleOptions::default())?;
    out.wave("wave.csv", &psi)?;
    let closed = psi.grid.points().iter().zip(&psi.values).map(|(x, v)| (v - bx.closed_form(x[0], t, levels)).norm()).fold(0.0, f64::max);
    let worst = rel.iter().copied().fold(0.0, f64::max);
    let checks = vec![
        CheckResult::at_most("E_k relative error", worst, file.tolerance("spectrum", 1e-10), format!("k = 1..{levels}")),
        CheckResult::report("families − sine series", closed, "max abs on the grid"),
    ];
    for (i, e) in energies.iter().enumerate() {
        println!("E_{:<3} = {e:.12}", i + 1);
    }
    out.json("report.json", json!({ "levels": levels, "time": t, "checks": checks }))?;
    Ok(checks)
}

fn tunneling(file: &ScenarioFile, ov: &Overrides, out: &mut Artifacts) -> Result<Vec<CheckResult>> {
    let mut cfg: TunnelingConfig = file.params()?;
    cfg.packet.nodes = ov.nodes(cfg.packet.nodes);
    let tn = Tunneling::new(&cfg)?;
    let sol = tn.solve()?;
    let terms = tn.terms()?;
    out.csv("branches.csv", &BRANCH_HEADER, branch_rows(&terms))?;
    let cn = tn.cn_transmission()?;
    let checks = vec![
        CheckResult::at_most("step equations residual", sol.residuals[0].max(sol.residuals[1]), file.tolerance("equations", 1e-12), "relative"),
        CheckResult::report("transmitted fraction discrepancy", cn.discrepancy, format!("CN {:.4}, branches {:.4}", cn.cn_fraction, cn.branch_fraction)),
    ];
    out.json("report.json", json!({ "step": sol, "transmission": cn, "checks": checks }))?;
    Ok(checks)
}

fn harmonic(file: &ScenarioFile, ov: &Overrides, seed: u64, out: &mut Artifacts) -> Result<Vec<CheckResult>> {
    let cfg: HarmonicConfig = file.params()?;
    let osc = HarmonicOscillator::new(&cfg)?;
    if osc.dim != 1 {
        bail!("the kernel table is written for dim = 1 only");
    }
    let t = ov.time.unwrap_or(1.0 / osc.omega);
    osc.check_time(t)?;
    let grid = Grid::line(-4.0, 4.0, ov.nodes(401))?;
    let mut rows = Vec::with_capacity(grid.len());
    for x in grid.points() {
        let k = osc.kernel(&x, &osc.x_o, t)?;
        let s = osc.eigen_expansion(&x, &osc.x_o, t, cfg.k_max);
        rows.push(vec![num(x[0]), num(k.re), num(k.im), num(s.re), num(s.im)]);
    }
    out.csv("kernel.csv", &["x", "re_kernel", "im_kernel", "re_hermite_sum", "im_hermite_sum"], rows)?;
    let levels = ov.levels.unwrap_or(10);
    out.csv("spectrum.csv", &["k", "energy"], (0..levels).map(|k| vec![k.to_string(), num(osc.energy(k))]))?;

    let spec = osc.spec();
    let branch = osc.branch(0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut hj: f64 = 0.0;
    for _ in 0..1000 {
        let x = [rng.random_range(-2.0..2.0)];
        let s = rng.random_range(0.2..2.9) / osc.omega;
        hj = hj.max(hj_residual(&spec, &branch, &x, s)?.norm());
    }
    let checks = vec![CheckResult::at_most("max hj residual", hj, file.tolerance("hj_residual", 1e-8), "1000 samples, ωt ∈ (0.2, 2.9)")];
    out.json("report.json", json!({ "time": t, "k_max": cfg.k_max, "checks": checks }))?;
    Ok(checks)
}

fn coulomb(file: &ScenarioFile, ov: &Overrides, out: &mut Artifacts) -> Result<Vec<CheckResult>> {
    let mut cfg: CoulombConfig = file.params()?;
    if let Some(l) = ov.levels {
        cfg.k_max = l;
    }
    let c = Coulomb::new(&cfg)?;
    let spectrum = c.spectrum(cfg.k_max)?;
    let rel: Vec<f64> = spectrum.iter().map(|l| (l.energy - c.exact_energy(l.k)).abs() / c.exact_energy(l.k).abs()).collect();
    out.csv(
        "spectrum.csv",
        &["k", "omega", "energy", "exact", "rel_error"],
        spectrum.iter().zip(&rel).map(|(l, r)| vec![l.k.to_string(), num(l.omega), num(l.energy), num(c.exact_energy(l.k)), num(*r)]),
    )?;
    let w = spectrum[0].omega;
    let orbit = c.kepler_orbit(w, 1, ov.nodes(401) - 1)?;
    let rows = (0..orbit.t.len()).map(|i| {
        let mut r = vec![num(orbit.t_prime[i]), num(orbit.t[i])];
        r.extend(orbit.q[i].iter().map(|v| num(*v)));
        r.extend(orbit.x[i].iter().map(|v| num(*v)));
        r
    });
    out.csv("orbit.csv", &["t_prime", "t", "q1", "q2", "q3", "q4", "x1", "x2", "x3"], rows)?;
    let grid = Grid::spanning(&[-4.0, -4.0], &[4.0, 4.0], &[ov.nodes(81), ov.nodes(81)])?;
    let orbitals = if cfg.orbital.is_empty() {
        Coulomb::named_orbitals().map(|(name, terms)| (format!("orbital_{name}.csv"), terms)).to_vec()
    } else {
        vec![("orbital.csv".to_string(), cfg.orbital.clone())]
    };
    for (name, terms) in orbitals {
        let c = Coulomb::new(&CoulombConfig { orbital: terms, ..cfg.clone() })?;
        out.csv(&name, &["q1", "q2", "density"], grid.points().into_iter().map(|q| vec![num(q[0]), num(q[1]), num(c.orbital_profile(q[0], q[1]))]))?;
    }
    let checks = vec![
        CheckResult::at_most("E_k relative error", rel.iter().copied().fold(0.0, f64::max), file.tolerance("spectrum", 1e-10), format!("k = 1..{}", cfg.k_max)),
        CheckResult::at_most("Kepler closure", orbit.closure, file.tolerance("closure", 1e-8), format!("ω = {w:.12}")),
    ];
    out.json("report.json", json!({ "levels": spectrum, "checks": checks }))?;
    Ok(checks)
}

fn epr(file: &ScenarioFile, ov: &Overrides, out: &mut Artifacts) -> Result<Vec<CheckResult>> {
    let mut cfg: SpinConfig = file.params()?;
    if let Some(a) = &ov.angles {
        cfg.angles_deg = a.clone();
    }
    if let Some(s) = ov.seed {
        cfg.seed = s;
    }
    let n: Vec<[f64; 3]> = cfg.angles_deg.iter().map(|&d| coplanar(d)).collect();
    let mut rows = Vec::new();
    let mut worst: f64 = 0.0;
    for (i, a) in n.iter().enumerate() {
        for (j, b) in n.iter().enumerate() {
            let e = epr_correlation(a, b)?;
            let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
            worst = worst.max((e + dot).abs());
            let bin = bell_binary_correlation(a, b, cfg.samples, cfg.seed, cfg.shards);
            rows.push(vec![i.to_string(), j.to_string(), num(cfg.angles_deg[i]), num(cfg.angles_deg[j]), num(e), num(-dot), num(bin)]);
        }
    }
    out.csv("correlations.csv", &["i", "j", "angle_i_deg", "angle_j_deg", "quantum", "minus_dot", "binary_mc"], rows)?;
    let mut report = json!({ "angles_deg": cfg.angles_deg, "samples": cfg.samples, "mc_seed": cfg.seed });
    if let [a, b, c, d] = n[..] {
        let quad = [a, b, c, d];
        let s = chsh(|x, y| epr_correlation(x, y).unwrap_or(f64::NAN), &quad);
        let s_bin = chsh_binary(&quad, cfg.samples, cfg.seed, cfg.shards);
        println!("CHSH S = {s:.4} (binary model {s_bin:.4}, bound 2, quantum 2√2 = {:.4})", 2.0 * 2f64.sqrt());
        report["chsh"] = json!(s);
        report["chsh_binary"] = json!(s_bin);
    }
    let checks = vec![CheckResult::at_most("E(n₁,n₂) + n₁·n₂", worst, file.tolerance("correlation", 1e-12), format!("{} pairs", n.len() * n.len()))];
    report["checks"] = json!(checks);
    out.json("report.json", report)?;
    Ok(checks)
}

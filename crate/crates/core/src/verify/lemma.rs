use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::Result;
use crate::hj::{hj_residual, HamiltonianSpec};
use crate::scenarios::config::{BoxConfig, CoulombConfig, DoubleSlitConfig, HarmonicConfig, TunnelingConfig};
use crate::scenarios::{Coulomb, DoubleSlit, HarmonicOscillator, ParticleBox, Tunneling};
use crate::verify::{CheckResult, Suite};
use crate::wave::{loglog_slope, schrodinger_residual_at, BranchTerm};

#[derive(Debug, Clone, Serialize)]
pub struct SlopeReport {
    pub h: Vec<f64>,
    pub errors: Vec<f64>,
    pub slope: f64,
}

/// Max relative pointwise Schrödinger residual of one branch term for
/// `h₀, h₀/2, h₀/4` and the log-log slope.
pub fn residual_slope(spec: &HamiltonianSpec, term: &BranchTerm, points: &[Vec<f64>], t: f64, h0: f64) -> Result<SlopeReport> {
    let hbar = spec.hbar();
    let hs: Vec<f64> = (0..3).map(|i| h0 / f64::powi(2.0, i)).collect();
    let mut errors = Vec::new();
    for &h in &hs {
        let mut worst: f64 = 0.0;
        for x in points {
            let psi = |y: &[f64]| term.value(y, t, hbar);
            let r = schrodinger_residual_at(spec, &psi, term.time_derivative(x, t, hbar), x, t, &vec![h; spec.dim()])?;
            worst = worst.max(r.norm() / psi(x).norm());
        }
        errors.push(worst);
    }
    Ok(SlopeReport { slope: loglog_slope(&hs, &errors), h: hs, errors })
}

type Sampler = Box<dyn Fn(&mut ChaCha8Rng) -> (Vec<f64>, f64)>;

struct Case {
    name: String,
    spec: HamiltonianSpec,
    terms: Vec<(BranchTerm, Vec<Vec<f64>>, Sampler)>,
    t: f64,
    h0: f64,
}

fn uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    rng.random_range(lo..hi)
}

fn cases(suite: &Suite) -> Result<Vec<Case>> {
    let mut out = Vec::new();

    let ds = DoubleSlit::new(&suite.file("two-slit").params::<DoubleSlitConfig>()?)?;
    let mut terms = Vec::new();
    for term in ds.terms() {
        let behind = term.contains(&[1.0, 0.0, 0.0], 0.0);
        let (pts, sampler): (Vec<Vec<f64>>, Sampler) = if behind {
            (
                vec![vec![3.0, 1.0, 0.5], vec![6.0, -2.0, 1.0], vec![8.0, 4.0, -1.0]],
                Box::new(|r| (vec![uniform(r, 0.5, 10.0), uniform(r, -10.0, 10.0), uniform(r, -3.0, 3.0)], uniform(r, 0.0, 5.0))),
            )
        } else {
            (
                vec![vec![-3.0, 1.0, 0.5], vec![-1.0, -2.0, 1.0]],
                Box::new(|r| (vec![uniform(r, -10.0, -0.1), uniform(r, -10.0, 10.0), uniform(r, -3.0, 3.0)], uniform(r, 0.0, 5.0))),
            )
        };
        terms.push((term, pts, sampler));
    }
    out.push(Case { name: "two-slit".into(), spec: ds.spec(), terms, t: 0.7, h0: 0.1 });

    let bx = ParticleBox::new(&suite.file("box").params::<BoxConfig>()?)?;
    let l = bx.cfg.length;
    let terms = bx
        .terms(3)?
        .into_iter()
        .map(|t| {
            let s: Sampler = Box::new(move |r| (vec![uniform(r, 0.0, l)], uniform(r, 0.0, 5.0)));
            (t, vec![vec![0.21 * l], vec![0.5 * l], vec![0.83 * l]], s)
        })
        .collect();
    out.push(Case { name: "box".into(), spec: bx.spec(), terms, t: 0.3, h0: 0.02 * l });

    let tn = Tunneling::new(&suite.file("tunneling").params::<TunnelingConfig>()?)?;
    let terms = tn
        .terms()?
        .into_iter()
        .map(|t| {
            let side = if t.contains(&[-1.0], 0.0) { -1.0 } else { 1.0 };
            let s: Sampler = Box::new(move |r| (vec![side * uniform(r, 0.1, 10.0)], uniform(r, 0.0, 5.0)));
            (t, vec![vec![side * 1.0], vec![side * 1.7], vec![side * 2.5]], s)
        })
        .collect();
    out.push(Case { name: "tunneling".into(), spec: tn.spec(), terms, t: 0.4, h0: 0.05 });

    let hcfg = suite.file("harmonic").params::<HarmonicConfig>()?;
    let osc = HarmonicOscillator::new(&hcfg)?;
    let (w, dim) = (osc.omega, osc.dim);
    let s: Sampler = Box::new(move |r| ((0..dim).map(|_| uniform(r, -2.0, 2.0)).collect(), uniform(r, 0.2, 2.9) / w));
    let pts = [-1.0, 0.3, 1.5].iter().map(|&v| vec![v; dim]).collect();
    out.push(Case { name: "harmonic".into(), spec: osc.spec(), terms: vec![(osc.term(0), pts, s)], t: 1.0 / w, h0: 0.05 });

    let c = Coulomb::new(&suite.file("coulomb").params::<CoulombConfig>()?)?;
    let w = c.spectrum(1)?[0].omega;
    let term = c.q_term(w, &c.cfg.q_o);
    let s: Sampler = Box::new(move |r| ((0..4).map(|_| uniform(r, -1.5, 1.5)).collect(), uniform(r, 0.2, 2.9) / w));
    let pts = vec![vec![0.5, -0.2, 0.1, 0.3], vec![-0.4, 0.6, -0.7, 0.2]];
    out.push(Case { name: "coulomb-q".into(), spec: c.q_spec(w), terms: vec![(term, pts, s)], t: 0.7 / w, h0: 0.05 });
    Ok(out)
}

pub(super) fn criterion(suite: &Suite) -> Result<Vec<CheckResult>> {
    let slope_tol = suite.tol("two-slit", "residual_slope", 0.2);
    let hj_tol = suite.tol("two-slit", "hj_residual", 1e-8);
    let mut rng = ChaCha8Rng::seed_from_u64(suite.seed("two-slit", 1));
    let mut out = Vec::new();
    for case in cases(suite)? {
        let mut worst_dev: f64 = 0.0;
        let mut slopes = Vec::new();
        let mut worst_hj: f64 = 0.0;
        for (term, pts, sampler) in &case.terms {
            let rep = residual_slope(&case.spec, term, pts, case.t, case.h0)?;
            worst_dev = worst_dev.max((rep.slope - 2.0).abs());
            slopes.push(format!("{}:{:.3}", term.branch.label, rep.slope));
            for _ in 0..1000 {
                let (x, t) = sampler(&mut rng);
                worst_hj = worst_hj.max(hj_residual(&case.spec, &term.branch, &x, t)?.norm());
            }
        }
        out.push(CheckResult::at_most(&format!("{} |slope − 2|", case.name), worst_dev, slope_tol, slopes.join(" ")));
        out.push(CheckResult::at_most(&format!("{} max hj residual", case.name), worst_hj, hj_tol, format!("{} branches × 1000 samples", case.terms.len())));
    }
    Ok(out)
}

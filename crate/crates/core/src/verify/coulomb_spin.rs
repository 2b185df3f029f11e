use std::f64::consts::PI;

use nalgebra::Matrix2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::field::C64;
use crate::scenarios::config::{CoulombConfig, SpinConfig};
use crate::scenarios::spin::eigenspinor::sigma_reconstruction_defect;
use crate::scenarios::spin::{
    bell_binary_correlation, chsh, chsh_binary, coplanar, dirac_anticommutator_defect, eigenspinors, epr_correlation, epr_correlation_with, gamma_p,
    literal_overlap, pauli, pauli_anticommutator_defect, relativistic_eigenspinors, sigma_dot, unit_from_angles,
};
use crate::scenarios::{quaternion_map, quaternion_sheets_2d, Coulomb};
use crate::verify::{CheckResult, Suite};

fn random_unit(rng: &mut ChaCha8Rng) -> [f64; 3] {
    let z: f64 = rng.random_range(-1.0..1.0);
    unit_from_angles(rng.random_range(0.0..2.0 * PI), z.acos())
}

pub(super) fn coulomb(suite: &Suite) -> Result<Vec<CheckResult>> {
    let c = Coulomb::new(&suite.file("coulomb").params::<CoulombConfig>()?)?;
    let mut rng = ChaCha8Rng::seed_from_u64(suite.seed("coulomb", 6));
    let mut trip: f64 = 0.0;
    for _ in 0..1000 {
        let x: [f64; 3] = [0.0, rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0)];
        let r = (x[1] * x[1] + x[2] * x[2]).sqrt();
        for s in quaternion_sheets_2d(&x)? {
            let y = quaternion_map(&s.q);
            trip = trip.max((0..3).map(|k| (y[k] - x[k]).abs()).fold(0.0, f64::max) / r);
            trip = trip.max((s.r() - r).abs() / r);
        }
    }
    let levels = c.spectrum(10)?;
    let ratio = levels.iter().map(|l| (levels[0].energy / l.energy - (l.k * l.k) as f64).abs() / (l.k * l.k) as f64).fold(0.0, f64::max);
    let w = levels[0].omega;
    let closure = [1i8, -1].iter().map(|&s| c.kepler_orbit(w, s, 20_000).map(|o| o.closure)).collect::<Result<Vec<_>>>()?;
    let mut profile: f64 = 0.0;
    let mut basis: f64 = 0.0;
    let ground = Coulomb::new(&CoulombConfig { orbital: Vec::new(), ..c.cfg.clone() })?;
    for _ in 0..200 {
        let (a, b): (f64, f64) = (rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0));
        let want = (-0.5 * (a * a + b * b)).exp() / PI.sqrt();
        profile = profile.max((ground.orbital_profile(a, b) - want).abs());
        basis = basis.max((ground.slice_wave(a, b) - want).abs());
    }
    Ok(vec![
        CheckResult::at_most("quaternion round trip", trip, suite.tol("coulomb", "round_trip", 1e-12), "1000 points on x¹ = 0, both sheets, relative"),
        CheckResult::at_most("Kepler closure after 2π/ω", closure[0].max(closure[1]), suite.tol("coulomb", "closure", 1e-8), format!("ω = {w:.12}, ± sheets")),
        CheckResult::at_most("E_1/E_k − k², k ≤ 10", ratio, suite.tol("coulomb", "spectrum", 1e-10), "relative"),
        CheckResult::at_most("1S profile vs e^{−r/2}/√π", profile, suite.tol("coulomb", "orbital", 1e-10), "caption formula"),
        CheckResult::at_most("1S Hermite product vs e^{−r/2}/√π", basis, suite.tol("coulomb", "orbital", 1e-10), "Ψ₀(q¹)Ψ₀(q²) in scaled units"),
    ])
}

fn angles(cfg: &SpinConfig) -> [[f64; 3]; 4] {
    let a = &cfg.angles_deg;
    [coplanar(a[0]), coplanar(a[1]), coplanar(a[2]), coplanar(a[3])]
}

pub(super) fn epr(suite: &Suite) -> Result<Vec<CheckResult>> {
    let cfg = suite.file("epr").params::<SpinConfig>()?;
    if cfg.angles_deg.len() != 4 {
        return Err(crate::Error::Config("angles_deg needs four entries".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut corr: f64 = 0.0;
    for _ in 0..1000 {
        let (a, b) = (random_unit(&mut rng), random_unit(&mut rng));
        let want = -(a[0] * b[0] + a[1] * b[1] + a[2] * b[2]);
        corr = corr.max((epr_correlation(&a, &b)? - want).abs());
    }
    let (a, b) = (random_unit(&mut rng), random_unit(&mut rng));
    let base = epr_correlation(&a, &b)?;
    let mut hidden: f64 = 0.0;
    let mut literal: f64 = 0.0;
    for _ in 0..100 {
        let n_o = random_unit(&mut rng);
        hidden = hidden.max((epr_correlation_with(&a, &b, &n_o)? - base).abs());
        literal = literal.max((literal_overlap(&a, &b, &n_o)? - base).abs());
    }
    let n = angles(&cfg);
    let s = chsh(|x, y| epr_correlation(x, y).expect("unit vectors"), &n);
    let s_bin = chsh_binary(&n, cfg.samples, cfg.seed, cfg.shards);
    let perp = bell_binary_correlation(&coplanar(0.0), &coplanar(90.0), cfg.samples, cfg.seed, cfg.shards);
    Ok(vec![
        CheckResult::at_most("E(n₁,n₂) + n₁·n₂", corr, suite.tol("epr", "correlation", 1e-12), "1000 random pairs"),
        CheckResult::at_most("hidden-direction variation", hidden, suite.tol("epr", "hidden", 1e-12), "100 random initial directions"),
        CheckResult::at_most("|S − 2√2|", (s - 2.0 * 2f64.sqrt()).abs(), suite.tol("epr", "chsh", 1e-10), format!("S = {s:.12}")),
        CheckResult::at_most("binary-model CHSH", s_bin, suite.tol("epr", "binary_chsh", 2.01), format!("{} samples, seed {}", cfg.samples, cfg.seed)),
        CheckResult::report("binary model at n₁ ⊥ n₂", perp, "closed form −1 + 2θ/π = 0"),
        CheckResult::report("two-spinor overlap formula deviation", literal, "½(ψ↑₁†ψ↓₂ + c.c.) vs −n₁·n₂"),
    ])
}

pub(super) fn algebra(suite: &Suite) -> Result<Vec<CheckResult>> {
    let tol = suite.tol("epr", "algebra", 1e-12);
    let mut rng = ChaCha8Rng::seed_from_u64(suite.seed("epr", 8) ^ 0x5eed);
    let s = pauli();
    let product = (s[0] * s[1] - s[2] * C64::i()).norm();
    let (mut square, mut eig, mut chi, mut recon, mut rel, mut rel_recon) = (0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for _ in 0..100 {
        let n = random_unit(&mut rng);
        let m = sigma_dot(&n);
        square = square.max((m * m - Matrix2::identity()).norm());
        let half_tr = 0.5 * (m[(0, 0)] + m[(1, 1)]);
        let disc = (half_tr * half_tr - m.determinant()).sqrt();
        let (l1, l2) = (half_tr + disc, half_tr - disc);
        eig = eig.max((l1.re.max(l2.re) - 1.0).abs().max((l1.re.min(l2.re) + 1.0).abs()).max(l1.im.abs()).max(l2.im.abs()));
        let (u, d) = eigenspinors(&n)?;
        chi = chi.max((m * u.components - u.components).norm()).max((m * d.components + d.components).norm());
        recon = recon.max(sigma_reconstruction_defect(&n)?);
        let p = [rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)];
        let (e_o, c) = (rng.random_range(0.5..2.0), rng.random_range(0.5..2.0));
        let r = relativistic_eigenspinors(&p, e_o, c)?;
        let g = gamma_p(&p, e_o, c);
        let e_want = (e_o * e_o + c * c * (p[0] * p[0] + p[1] * p[1] + p[2] * p[2])).sqrt();
        let mut dev = (r.e_plus - e_want).abs().max((r.e_minus + e_want).abs());
        for x in &r.xi_plus {
            dev = dev.max((g * x.components - x.components * C64::from(r.e_plus)).norm());
        }
        for x in &r.xi_minus {
            dev = dev.max((g * x.components - x.components * C64::from(r.e_minus)).norm());
        }
        rel = rel.max(dev / e_want);
        rel_recon = rel_recon.max(r.reconstruction_defect(&p, e_o, c) / e_want);
    }
    let rest = relativistic_eigenspinors(&[0.0; 3], 1.0, 1.0)?;
    let rest_dev = rest.xi_plus.iter().map(|x| x.components[2].norm() + x.components[3].norm()).sum::<f64>();
    Ok(vec![
        CheckResult::at_most("{σʲ,σᵏ} − 2δʲᵏI", pauli_anticommutator_defect(), tol, ""),
        CheckResult::at_most("σ¹σ² − iσ³", product, tol, ""),
        CheckResult::at_most("(Σ·n)² − I", square, tol, "100 random n"),
        CheckResult::at_most("eigenvalues of Σ·n vs ±1", eig, tol, "characteristic polynomial"),
        CheckResult::at_most("printed {γ^μ,γ^ν} − 2δ^{μν}I", dirac_anticommutator_defect(&[1.0; 4]), tol, "relation as printed"),
        CheckResult::report("printed {γ^μ,γ^ν} − 2η^{μν}I", dirac_anticommutator_defect(&[1.0, -1.0, -1.0, -1.0]), "Minkowski form, reported"),
        CheckResult::at_most("Σ·n χ = ±χ", chi, tol, ""),
        CheckResult::at_most("Σ·n − (χ↑χ↑† − χ↓χ↓†)", recon, tol, ""),
        CheckResult::at_most("E± and Γξ = Eξ, relative", rel, tol, "100 random (p, E_o, c)"),
        CheckResult::at_most("Σ Eξξ† − (γ⁰E_o + cγ·p), relative", rel_recon, tol, ""),
        CheckResult::at_most("rest frame ξ⁺ lower half", rest_dev, tol, "p = 0"),
    ])
}

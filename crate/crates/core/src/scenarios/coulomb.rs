//! Coulomb problem as a four-dimensional oscillator in quaternion
//! coordinates with the rescaled time `t′ = ∫ dt / r`.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{real, real_vector, scalar, C64};
use crate::hj::{integrate_characteristic, ActionBranch, BranchStart, ConstraintSet, HamiltonianSpec, StepControl};
use crate::scenarios::config::{CoulombConfig, HarmonicConfig, OrbitalTerm};
use crate::scenarios::harmonic::HarmonicOscillator;
use crate::scenarios::hermite::{hermite_function, hermite_norm, hermite_poly};
use crate::scenarios::quaternion::quaternion_map;
use crate::wave::{quantize, BranchTerm, QuantizationProblem};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CoulombLevel {
    pub k: usize,
    pub omega: f64,
    pub energy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KeplerOrbit {
    pub sheet: i8,
    pub t_prime: Vec<f64>,
    pub t: Vec<f64>,
    pub q: Vec<[f64; 4]>,
    pub x: Vec<[f64; 3]>,
    /// `‖q(2π/ω) − q(0)‖`.
    pub closure: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Coulomb {
    pub cfg: CoulombConfig,
}

impl Coulomb {
    pub fn new(cfg: &CoulombConfig) -> Result<Self> {
        if !(cfg.mass > 0.0 && cfg.hbar > 0.0 && cfg.g > 0.0) || cfg.k_max == 0 {
            return Err(Error::Config("mass, hbar, g positive and k_max ≥ 1 required".into()));
        }
        Ok(Self { cfg: cfg.clone() })
    }

    /// Extra phase `φ(ω) = 2πG/ω` collected by `G t′` over one period.
    pub fn quantization(&self) -> QuantizationProblem {
        let g = self.cfg.g;
        QuantizationProblem::new(move |w| 2.0 * PI * g / w, self.cfg.hbar)
    }

    /// Levels `k = 1..=levels` with `ω_k = G/(ħk)` and `E_k = (M/2) ω_k²`.
    pub fn spectrum(&self, levels: usize) -> Result<Vec<CoulombLevel>> {
        let w1 = self.cfg.g / self.cfg.hbar;
        let found = quantize(&self.quantization(), w1 / (levels as f64 + 0.5), 2.0 * w1, 8 * levels)?;
        let mut out: Vec<CoulombLevel> = found
            .into_iter()
            .filter(|q| q.k >= 1 && q.k as usize <= levels)
            .map(|q| CoulombLevel { k: q.k as usize, omega: q.omega, energy: 0.5 * self.cfg.mass * q.omega * q.omega })
            .collect();
        out.sort_by_key(|l| l.k);
        Ok(out)
    }

    pub fn exact_energy(&self, k: usize) -> f64 {
        let w = self.cfg.g / (self.cfg.hbar * k as f64);
        0.5 * self.cfg.mass * w * w
    }

    /// `H′ = pᵀp/(8M) + 2Mω² qᵀq − G` in `(q, t′)`.
    pub fn q_spec(&self, omega: f64) -> HamiltonianSpec {
        let (m, g) = (self.cfg.mass, self.cfg.g);
        let k = 4.0 * m * omega * omega;
        HamiltonianSpec::new(4)
            .with_mass(4.0 * m)
            .with_hbar(self.cfg.hbar)
            .with_potential(real(move |q, _| 0.5 * k * q.iter().map(|v| v * v).sum::<f64>() - g))
            .with_potential_gradient(real_vector(move |q, _| q.iter().map(|v| k * v).collect()))
    }

    fn oscillator(&self, omega: f64, q_o: &[f64; 4]) -> HarmonicOscillator {
        HarmonicOscillator::new(&HarmonicConfig {
            mass: 4.0 * self.cfg.mass,
            hbar: self.cfg.hbar,
            omega,
            dim: 4,
            x_o: q_o.to_vec(),
            k_max: 1,
            caustic_eps: 1e-9,
        })
        .expect("validated constants")
    }

    /// `φ = φ_osc(4M, ω; q, q_o, t′) + G t′`.
    pub fn q_term(&self, omega: f64, q_o: &[f64; 4]) -> BranchTerm {
        let osc = self.oscillator(omega, q_o);
        let base = osc.term(0);
        let g = self.cfg.g;
        let (b0, b1, b2) = (base.branch.clone(), base.branch.clone(), base.branch.clone());
        let w = omega;
        let branch = ActionBranch::new(0, "coulomb-q", 4, base.branch.init.clone(), scalar(move |q, t| b0.phi(q, t) + g * t))
            .with_gradient(crate::field::vector(move |q, t| b1.grad(q, t)))
            .with_laplacian(scalar(move |_, t| C64::from(4.0 * w / (w * t).tan())))
            .with_time_derivative(scalar(move |q, t| b2.dphi_dt(q, t) + g));
        BranchTerm { branch, ..base }
    }

    /// The plotted orbitals 1S, 2P and 3D on the `(q¹, q²)` slice.
    pub fn named_orbitals() -> [(&'static str, Vec<OrbitalTerm>); 3] {
        let t = |k1, k2, c| OrbitalTerm { k: [k1, k2, 0, 0], c };
        [("1S", vec![t(0, 0, 1.0)]), ("2P", vec![t(1, 1, 1.0)]), ("3D", vec![t(1, 3, 1.0), t(3, 1, -1.0)])]
    }

    pub fn orbital_terms(&self) -> Vec<OrbitalTerm> {
        if self.cfg.orbital.is_empty() {
            vec![OrbitalTerm { k: [0; 4], c: 1.0 }]
        } else {
            self.cfg.orbital.clone()
        }
    }

    /// `Σ c Π_n Ψ_{k_n}(q^n)` in scaled units `√(4Mω/ħ) = 1`.
    pub fn orbital_wave(&self, q: &[f64; 4]) -> f64 {
        self.orbital_terms().iter().map(|t| t.c * (0..4).map(|n| hermite_function(t.k[n], q[n])).product::<f64>()).sum()
    }

    /// Two-axis wave `Σ c Ψ_{k₁}(q¹) Ψ_{k₂}(q²)` over tuples with `k₃ = k₄ = 0`.
    pub fn slice_wave(&self, q1: f64, q2: f64) -> f64 {
        self.orbital_terms().iter().filter(|t| t.k[2] == 0 && t.k[3] == 0).map(|t| t.c * hermite_function(t.k[0], q1) * hermite_function(t.k[1], q2)).sum()
    }

    /// `(1/√(π Π 2^k k!)) (Σ c Π H_k)² e^{−r/2}` on the `q³ = q⁴ = 0` slice,
    /// normalized by the first tuple.
    pub fn orbital_profile(&self, q1: f64, q2: f64) -> f64 {
        let terms = self.orbital_terms();
        let norm: f64 = terms[0].k.iter().map(|&k| hermite_norm(k)).product();
        let q = [q1, q2, 0.0, 0.0];
        let s: f64 = terms.iter().map(|t| t.c * (0..4).map(|n| hermite_poly(t.k[n], q[n])).product::<f64>()).sum();
        let r = q1 * q1 + q2 * q2;
        s * s * (-0.5 * r).exp() / (PI * norm).sqrt()
    }

    /// `Π Ψ_k(q) + Π Ψ_k(−q)` for one Hermite tuple.
    pub fn sheet_sum(k: &[usize; 4], q: &[f64; 4]) -> f64 {
        let f = |s: f64| (0..4).map(|n| hermite_function(k[n], s * q[n])).product::<f64>();
        f(1.0) + f(-1.0)
    }

    /// Total Hermite degree `k′ = 2k − 2` of level `k`.
    pub fn even_degree(k: usize) -> usize {
        2 * k - 2
    }

    /// Characteristic of `H′ = 0` from `±q_o` in the `(q¹, q²)` plane over one
    /// period `2π/ω`, with `t = ∫ r dt′`.
    pub fn kepler_orbit(&self, omega: f64, sheet: i8, steps: usize) -> Result<KeplerOrbit> {
        let m = self.cfg.mass;
        let s = if sheet < 0 { -1.0 } else { 1.0 };
        let q_o: Vec<f64> = self.cfg.q_o.iter().map(|v| s * v).collect();
        let r_o: f64 = q_o.iter().map(|v| v * v).sum();
        let p2 = 8.0 * m * (self.cfg.g - 2.0 * m * omega * omega * r_o);
        if !(p2 > 0.0) || r_o == 0.0 {
            return Err(Error::Config("q_o is not inside the bound region of H′ = 0".into()));
        }
        let (a, b) = (q_o[0], q_o[1]);
        let len = (a * a + b * b).sqrt();
        if len == 0.0 {
            return Err(Error::Config("q_o needs a (q¹, q²) component".into()));
        }
        let pn = p2.sqrt() / len;
        let p_o = vec![-b * pn, a * pn, 0.0, 0.0];
        let period = 2.0 * PI / omega;
        let spec = self.q_spec(omega);
        let traj = integrate_characteristic(
            &spec,
            &ConstraintSet::new(),
            &BranchStart::new(q_o.clone(), p_o),
            period,
            StepControl { dt: period / steps as f64, ..Default::default() },
        )?;
        let q: Vec<[f64; 4]> = traj.samples.iter().map(|s| [s.x[0], s.x[1], s.x[2], s.x[3]]).collect();
        let t_prime: Vec<f64> = traj.samples.iter().map(|s| s.t).collect();
        let mut t = vec![0.0];
        for i in 1..q.len() {
            let r = |v: &[f64; 4]| v.iter().map(|c| c * c).sum::<f64>();
            t.push(t[i - 1] + 0.5 * (t_prime[i] - t_prime[i - 1]) * (r(&q[i]) + r(&q[i - 1])));
        }
        let last = q.last().expect("trajectory has samples");
        let closure = (0..4).map(|k| (last[k] - q_o[k]).powi(2)).sum::<f64>().sqrt();
        let x = q.iter().map(quaternion_map).collect();
        Ok(KeplerOrbit { sheet: if s < 0.0 { -1 } else { 1 }, t_prime, t, q, x, closure })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hj::hj_residual;

    #[test]
    fn spectrum_scales_as_inverse_square() {
        let c = Coulomb::new(&CoulombConfig::default()).unwrap();
        let levels = c.spectrum(10).unwrap();
        assert_eq!(levels.len(), 10);
        for l in &levels {
            assert!((levels[0].energy / l.energy - (l.k * l.k) as f64).abs() < 1e-10 * (l.k * l.k) as f64);
            assert!((l.energy - c.exact_energy(l.k)).abs() < 1e-10 * l.energy);
        }
    }

    #[test]
    fn ground_orbital() {
        let c = Coulomb::new(&CoulombConfig::default()).unwrap();
        for &(a, b) in &[(0.0, 0.0), (0.7, -1.2), (2.0, 0.5)] {
            let r: f64 = a * a + b * b;
            let want = (-0.5 * r).exp() / PI.sqrt();
            assert!((c.orbital_profile(a, b) - want).abs() < 1e-14);
            assert!((c.slice_wave(a, b) - want).abs() < 1e-14);
        }
    }

    #[test]
    fn excited_orbitals_match_their_captions() {
        let [_, (_, p2), (_, d3)] = Coulomb::named_orbitals();
        let p = Coulomb::new(&CoulombConfig { orbital: p2, ..Default::default() }).unwrap();
        let d = Coulomb::new(&CoulombConfig { orbital: d3, ..Default::default() }).unwrap();
        let h1 = |x: f64| 2.0 * x;
        let h3 = |x: f64| 8.0 * x.powi(3) - 12.0 * x;
        for &(a, b) in &[(0.3f64, 0.4f64), (-1.1, 0.6), (1.7, -2.2)] {
            let e = (-0.5 * (a * a + b * b)).exp();
            let x2 = quaternion_map(&[a, b, 0.0, 0.0])[1];
            let want_p = (4.0 * a * b).powi(2) * e / (2.0 * PI.sqrt());
            assert!((p.orbital_profile(a, b) - want_p).abs() < 1e-12 * want_p.max(1.0));
            assert!((2.0 / PI.sqrt() * x2.powi(2) * e - want_p).abs() < 1e-12 * want_p.max(1.0));
            let want_d = (h1(a) * h3(b) - h3(a) * h1(b)).powi(2) * e / (96.0 * PI).sqrt();
            assert!((d.orbital_profile(a, b) - want_d).abs() < 1e-12 * want_d.max(1.0));
        }
    }

    #[test]
    fn odd_tuples_cancel() {
        let q = [0.3, -0.8, 0.5, 1.1];
        assert_eq!(Coulomb::sheet_sum(&[1, 0, 0, 0], &q), 0.0);
        assert_eq!(Coulomb::sheet_sum(&[2, 1, 0, 2], &q), 0.0);
        assert!(Coulomb::sheet_sum(&[1, 1, 0, 0], &q).abs() > 1e-3);
    }

    #[test]
    fn q_branch_solves_hj_and_orbit_closes() {
        let c = Coulomb::new(&CoulombConfig::default()).unwrap();
        let w = c.spectrum(1).unwrap()[0].omega;
        let term = c.q_term(w, &[0.2, 0.1, -0.3, 0.4]);
        let r = hj_residual(&c.q_spec(w), &term.branch, &[0.5, -0.2, 0.1, 0.3], 0.7).unwrap();
        assert!(r.norm() < 1e-12, "{r}");
        let orbit = c.kepler_orbit(w, 1, 4000).unwrap();
        assert!(orbit.closure < 1e-8, "{}", orbit.closure);
    }
}

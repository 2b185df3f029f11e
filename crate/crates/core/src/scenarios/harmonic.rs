//! Harmonic oscillator: action, density, kernel and Hermite expansion.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::{real, real_vector, scalar, vector, C64};
use crate::hj::{ActionBranch, HamiltonianSpec, InitialCondition};
use crate::scenarios::config::HarmonicConfig;
use crate::scenarios::hermite::hermite_basis;
use crate::wave::{BranchTerm, WaveField};

#[derive(Debug, Clone, PartialEq)]
pub struct HarmonicOscillator {
    pub mass: f64,
    pub omega: f64,
    pub hbar: f64,
    pub dim: usize,
    pub x_o: Vec<f64>,
    pub caustic_eps: f64,
}

impl HarmonicOscillator {
    pub fn new(cfg: &HarmonicConfig) -> Result<Self> {
        if !(cfg.mass > 0.0 && cfg.omega > 0.0 && cfg.hbar > 0.0) {
            return Err(Error::Config("mass, omega and hbar must be positive".into()));
        }
        if cfg.dim == 0 || cfg.x_o.len() != cfg.dim || cfg.k_max == 0 {
            return Err(Error::Config("x_o must have `dim` entries and k_max ≥ 1".into()));
        }
        Ok(Self { mass: cfg.mass, omega: cfg.omega, hbar: cfg.hbar, dim: cfg.dim, x_o: cfg.x_o.clone(), caustic_eps: cfg.caustic_eps })
    }

    pub fn spec(&self) -> HamiltonianSpec {
        let k = self.mass * self.omega * self.omega;
        HamiltonianSpec::new(self.dim)
            .with_mass(self.mass)
            .with_hbar(self.hbar)
            .with_potential(real(move |x, _| 0.5 * k * x.iter().map(|v| v * v).sum::<f64>()))
            .with_potential_gradient(real_vector(move |x, _| x.iter().map(|v| k * v).collect()))
    }

    /// Fails within `caustic_eps` of `ωt = kπ`.
    pub fn check_time(&self, t: f64) -> Result<()> {
        if !(t > 0.0) {
            return Err(Error::InvalidArgument(format!("t = {t} must be positive")));
        }
        let wt = self.omega * t;
        let off = wt - (wt / PI).round() * PI;
        if off.abs() < self.caustic_eps {
            return Err(Error::CausticTime { t });
        }
        Ok(())
    }

    pub fn energy(&self, k: usize) -> f64 {
        self.hbar * self.omega * (k as f64 + 0.5 * self.dim as f64)
    }

    /// `(Mω/2)[(x² + x_o²) cot ωt − 2 x·x_o / sin ωt]`.
    pub fn action(&self, x: &[f64], x_o: &[f64], t: f64) -> f64 {
        let (s, c) = (self.omega * t).sin_cos();
        let (xx, oo, xo) = dots(x, x_o);
        0.5 * self.mass * self.omega * ((xx + oo) * c / s - 2.0 * xo / s)
    }

    /// `(Mω/(2iπħ sin ωt))^{N/2}`, continued with a factor `−i` per axis at each caustic.
    pub fn sqrt_rho(&self, t: f64) -> C64 {
        let wt = self.omega * t;
        let s = wt.sin();
        let m = (wt / PI).floor() as i64;
        let one = (self.mass * self.omega / (2.0 * PI * self.hbar * s.abs())).sqrt();
        let phase = -0.25 * PI - 0.5 * PI * m as f64;
        C64::from_polar(one, phase).powu(self.dim as u32)
    }

    /// Kernel from the principal lobe at complex time `τ`.
    pub fn kernel_complex_time(&self, x: &[f64], x_o: &[f64], tau: C64) -> C64 {
        let wt = tau * self.omega;
        let (s, c) = (wt.sin(), wt.cos());
        let (xx, oo, xo) = dots(x, x_o);
        let phi = 0.5 * self.mass * self.omega * ((xx + oo) * c / s - 2.0 * xo / s);
        let amp = (C64::from(self.mass * self.omega) / (C64::new(0.0, 2.0 * PI * self.hbar) * s)).sqrt();
        amp.powu(self.dim as u32) * (C64::i() * phi / self.hbar).exp()
    }

    pub fn kernel(&self, x: &[f64], x_o: &[f64], t: f64) -> Result<C64> {
        self.check_time(t)?;
        Ok(self.sqrt_rho(t) * C64::new(0.0, self.action(x, x_o, t) / self.hbar).exp())
    }

    /// Per-axis product of `Σ_{k≤K} e^{−iħω(k+½)τ/ħ} Ψ_k(x)Ψ_k(x_o)`.
    pub fn eigen_expansion_complex_time(&self, x: &[f64], x_o: &[f64], tau: C64, k_max: usize) -> C64 {
        (0..self.dim)
            .map(|n| {
                (0..=k_max)
                    .map(|k| {
                        let e = self.hbar * self.omega * (k as f64 + 0.5);
                        let basis = hermite_basis(k, x[n], self.mass, self.omega, self.hbar) * hermite_basis(k, x_o[n], self.mass, self.omega, self.hbar);
                        (-C64::i() * e * tau / self.hbar).exp() * basis
                    })
                    .sum::<C64>()
            })
            .product()
    }

    pub fn eigen_expansion(&self, x: &[f64], x_o: &[f64], t: f64, k_max: usize) -> C64 {
        self.eigen_expansion_complex_time(x, x_o, C64::from(t), k_max)
    }

    pub fn branch(&self, id: usize) -> ActionBranch {
        let this = self.clone();
        let (m, w, n) = (self.mass, self.omega, self.dim as f64);
        let xo = self.x_o.clone();
        let (xo_g, xo_t) = (xo.clone(), xo.clone());
        let phi_this = this.clone();
        ActionBranch::new(id, "harmonic", self.dim, InitialCondition::Position(xo.clone()), scalar(move |x, t| C64::from(phi_this.action(x, &xo, t))))
            .with_gradient(vector(move |x, t| {
                let (s, c) = (w * t).sin_cos();
                x.iter().zip(&xo_g).map(|(xi, oi)| C64::from(m * w * (xi * c / s - oi / s))).collect()
            }))
            .with_laplacian(scalar(move |_, t| C64::from(n * w / (w * t).tan())))
            .with_time_derivative(scalar(move |x, t| {
                let (s, c) = (w * t).sin_cos();
                let (xx, oo, xo) = dots(x, &xo_t);
                C64::from(0.5 * m * w * w * (-(xx + oo) + 2.0 * xo * c) / (s * s))
            }))
    }

    pub fn term(&self, id: usize) -> BranchTerm {
        let (a, b) = (self.clone(), self.clone());
        let half_n = 0.5 * self.dim as f64;
        BranchTerm::new(self.branch(id), scalar(move |_, t| a.sqrt_rho(t)))
            .with_density_rate(scalar(move |_, t| -half_n * b.omega / (b.omega * t).tan() * b.sqrt_rho(t)))
    }

    /// `∫ K(x, y, t) ψ₀(y) dy` by the trapezoid rule on the field's 1D grid.
    pub fn kernel_propagate(&self, psi0: &WaveField, t: f64) -> Result<WaveField> {
        if self.dim != 1 || psi0.grid.dim() != 1 {
            return Err(Error::InvalidArgument("kernel propagation is 1D".into()));
        }
        self.check_time(t)?;
        let g = &psi0.grid;
        let values = (0..g.len())
            .into_par_iter()
            .map(|i| {
                let x = g.point(i);
                (0..g.len()).map(|j| g.weight(j) * psi0.at(j) * self.kernel(&x, &g.point(j), t).expect("time checked")).sum()
            })
            .collect();
        WaveField::new(g.clone(), values, psi0.time + t, self.hbar)
    }
}

fn dots(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    x.iter().zip(y).fold((0.0, 0.0, 0.0), |(a, b, c), (u, v)| (a + u * u, b + v * v, c + u * v))
}

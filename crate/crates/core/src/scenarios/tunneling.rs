//! Potential step of height `V∞` at `x = 0`.

use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{real, scalar, vector, C64};
use crate::hj::{hj_residual, ActionBranch, BranchCause, BranchPoint, HamiltonianSpec, InitialCondition};
use crate::oracle::{cn_evolve, CnConfig};
use crate::scenarios::config::TunnelingConfig;
use crate::wave::{BranchTerm, Grid, WaveField};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StepSolution {
    pub p_t: C64,
    pub rho_r: C64,
    pub rho_t: C64,
    /// Relative residuals of the flux and equilibrium equations.
    pub residuals: [f64; 2],
    /// `(ρ_o + ρ_R) − (ρ_T + 2ρ_R)`, the unused middle member.
    pub middle_gap: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TransmissionReport {
    pub cn_fraction: f64,
    /// `Re(p_T)/p_o · Re(ρ_T)/ρ_o` from the step solution.
    pub branch_fraction: f64,
    /// `4 p_o Re p_T / |p_o + p_T|²`.
    pub textbook_fraction: f64,
    pub discrepancy: f64,
    pub norm_drift: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Tunneling {
    pub cfg: TunnelingConfig,
}

impl Tunneling {
    pub fn new(cfg: &TunnelingConfig) -> Result<Self> {
        if !(cfg.mass > 0.0 && cfg.hbar > 0.0 && cfg.rho_o > 0.0 && cfg.v_inf >= 0.0) {
            return Err(Error::Config("mass, hbar, rho_o positive and v_inf ≥ 0 required".into()));
        }
        Ok(Self { cfg: cfg.clone() })
    }

    pub fn energy(&self) -> f64 {
        self.cfg.p_o * self.cfg.p_o / (2.0 * self.cfg.mass)
    }

    /// Principal root of `p_o² − 2MV∞`.
    pub fn p_t(&self) -> C64 {
        C64::from(self.cfg.p_o * self.cfg.p_o - 2.0 * self.cfg.mass * self.cfg.v_inf).sqrt()
    }

    pub fn spec(&self) -> HamiltonianSpec {
        let v = self.cfg.v_inf;
        HamiltonianSpec::new(1).with_mass(self.cfg.mass).with_hbar(self.cfg.hbar).with_potential(real(move |x, _| if x[0] >= 0.0 { v } else { 0.0 }))
    }

    /// Solve `(p_o/M)ρ_o = (p_o/M)ρ_T + (p_T/M)ρ_R` and
    /// `(ρ_T + 2ρ_R)(p_o/M)² = ((p_o/M)² + (p_T/M)²)ρ_T` for `(ρ_R, ρ_T)`.
    pub fn solve(&self) -> Result<StepSolution> {
        let m = self.cfg.mass;
        let (u, w) = (C64::from(self.cfg.p_o / m), self.p_t() / m);
        let rho_o = self.cfg.rho_o;
        if !(self.cfg.p_o > 0.0) {
            return Err(Error::DegenerateSystem(format!("incident momentum {} must be positive", self.cfg.p_o)));
        }
        // [w  u ] [ρ_R]   [u ρ_o]
        // [2u² −w²] [ρ_T] = [0    ]
        let (a11, a12, a21, a22) = (w, u, 2.0 * u * u, -w * w);
        let det = a11 * a22 - a12 * a21;
        let scale = (a11.norm() + a12.norm()) * (a21.norm() + a22.norm());
        if det.norm() <= 1e-14 * scale {
            return Err(Error::DegenerateSystem(format!("determinant {det}")));
        }
        let b1 = u * rho_o;
        let rho_r = b1 * a22 / det;
        let rho_t = -b1 * a21 / det;
        let r1 = (u * rho_o - (u * rho_t + w * rho_r)).norm() / (u.norm() * rho_o);
        let r2 = ((rho_t + 2.0 * rho_r) * u * u - (u * u + w * w) * rho_t).norm() / (u.norm_sqr() * rho_o);
        let middle_gap = ((rho_o + rho_r) - (rho_t + 2.0 * rho_r)).norm() / rho_o;
        Ok(StepSolution { p_t: w * m, rho_r, rho_t, residuals: [r1, r2], middle_gap })
    }

    fn plane(&self, id: usize, label: &str, p: C64, amp: C64, left: bool) -> BranchTerm {
        let e = self.energy();
        let mut b = ActionBranch::new(id, label, 1, InitialCondition::Momentum(vec![p.re]), scalar(move |x, t| p * x[0] - e * t))
            .with_gradient(vector(move |_, _| vec![p]))
            .with_laplacian(scalar(|_, _| C64::from(0.0)))
            .with_time_derivative(scalar(move |_, _| C64::from(-e)));
        if label != "incident" {
            b = b.with_lineage(vec![BranchPoint { location: vec![0.0], time: 0.0, cause: BranchCause::Reflection }]);
        }
        if p.im != 0.0 {
            b = b.complex();
        }
        BranchTerm::new(b, scalar(move |_, _| amp)).with_density_rate(scalar(|_, _| C64::from(0.0))).with_domain(Arc::new(move |x, _| (x[0] < 0.0) == left))
    }

    /// Incident and reflected waves on `x < 0`, transmitted wave on `x ≥ 0`.
    pub fn terms(&self) -> Result<Vec<BranchTerm>> {
        let s = self.solve()?;
        let p = C64::from(self.cfg.p_o);
        Ok(vec![
            self.plane(0, "incident", p, C64::from(self.cfg.rho_o.sqrt()), true),
            self.plane(1, "reflected", -p, s.rho_r.sqrt(), true),
            self.plane(2, "transmitted", s.p_t, s.rho_t.sqrt(), false),
        ])
    }

    /// HJ residual of the transmitted action written with `−p_T² t / 2M`.
    pub fn literal_transmitted_residual(&self) -> Result<C64> {
        let (p, m) = (self.p_t(), self.cfg.mass);
        let b = ActionBranch::new(0, "transmitted", 1, InitialCondition::Momentum(vec![p.re]), scalar(move |x, t| p * x[0] - p * p * t / (2.0 * m)))
            .with_gradient(vector(move |_, _| vec![p]))
            .with_time_derivative(scalar(move |_, _| -p * p / (2.0 * m)));
        hj_residual(&self.spec(), &b, &[1.0], 0.5)
    }

    /// Gaussian packet scattered off the step by Crank–Nicolson.
    pub fn cn_transmission(&self) -> Result<TransmissionReport> {
        let pk = &self.cfg.packet;
        let (p, h, sigma) = (self.cfg.p_o, self.cfg.hbar, pk.sigma);
        let grid = Grid::line(-pk.half_width, pk.half_width, pk.nodes)?;
        let psi0 = WaveField::from_fn(grid, 0.0, h, |x| {
            let d = x[0] - pk.x0;
            C64::from_polar((-d * d / (4.0 * sigma * sigma)).exp(), p * x[0] / h)
        })
        .normalized()?;
        let out = cn_evolve(&self.spec(), &psi0, &CnConfig { dt: pk.dt, ..Default::default() }, pk.duration)?;
        let last = out.last();
        let total = last.norm_sqr();
        let right: f64 = (0..last.grid.len()).filter(|&k| last.grid.point(k)[0] > 0.0).map(|k| last.grid.weight(k) * last.at(k).norm_sqr()).sum();
        let s = self.solve()?;
        let cn_fraction = right / total;
        let branch_fraction = s.p_t.re / p * s.rho_t.re / self.cfg.rho_o;
        let textbook_fraction = 4.0 * p * s.p_t.re / (C64::from(p) + s.p_t).norm_sqr();
        Ok(TransmissionReport {
            cn_fraction,
            branch_fraction,
            textbook_fraction,
            discrepancy: (branch_fraction - cn_fraction).abs() / cn_fraction.max(1e-300),
            norm_drift: (total - 1.0).abs(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn equations_hold() {
        let t = Tunneling::new(&TunnelingConfig::default()).unwrap();
        let s = t.solve().unwrap();
        assert!(s.residuals[0] < 1e-12 && s.residuals[1] < 1e-12);
        assert!((s.p_t.re - 2f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn no_step_splits_one_to_two() {
        let t = Tunneling::new(&TunnelingConfig { v_inf: 0.0, ..Default::default() }).unwrap();
        let s = t.solve().unwrap();
        assert!((s.rho_r.re - 1.0 / 3.0).abs() < 1e-14);
        assert!((s.rho_t.re - 2.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn below_barrier_decays() {
        let t = Tunneling::new(&TunnelingConfig { v_inf: 3.0, ..Default::default() }).unwrap();
        let kappa = t.p_t().im;
        assert!(kappa > 0.0 && t.p_t().re.abs() < 1e-15);
        let terms = t.terms().unwrap();
        let tr = &terms[2];
        let ratio = tr.value(&[2.0], 0.0, 1.0).norm() / tr.value(&[1.0], 0.0, 1.0).norm();
        assert!((ratio - (-kappa).exp()).abs() < 1e-14);
    }

    #[test]
    fn zero_momentum_is_degenerate() {
        let t = Tunneling::new(&TunnelingConfig { p_o: 0.0, ..Default::default() }).unwrap();
        assert!(matches!(t.solve(), Err(Error::DegenerateSystem(_))));
    }

    #[test]
    fn literal_transmitted_time_dependence_misses_by_the_step() {
        let t = Tunneling::new(&TunnelingConfig::default()).unwrap();
        let r = t.literal_transmitted_residual().unwrap();
        assert!((r.re - t.cfg.v_inf).abs() < 1e-12);
    }
}

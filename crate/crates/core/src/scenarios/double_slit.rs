//! Two slits in a wall at `x¹ = 0`: a plane branch before the wall and one
//! outgoing cone per slit behind it.

use std::f64::consts::PI;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::field::{scalar, vector, C64};
use crate::hj::{ActionBranch, BranchCause, BranchPoint, HamiltonianSpec, InitialCondition};
use crate::scenarios::config::DoubleSlitConfig;
use crate::wave::BranchTerm;

/// A point source behind the wall with its quadrature weight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlitSource {
    pub slit: usize,
    pub position: [f64; 3],
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DoubleSlit {
    pub cfg: DoubleSlitConfig,
}

/// One screen sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScreenPoint {
    pub y: f64,
    pub intensity: f64,
}

impl DoubleSlit {
    pub fn new(cfg: &DoubleSlitConfig) -> Result<Self> {
        if !(cfg.mass > 0.0 && cfg.hbar > 0.0 && cfg.p_o > 0.0) {
            return Err(Error::Config("mass, hbar and p_o must be positive".into()));
        }
        if cfg.slits.is_empty() || cfg.screen_nodes < 3 || !(cfg.screen_x > 0.0) {
            return Err(Error::Config("need slits, a screen behind the wall and at least 3 screen nodes".into()));
        }
        if let Some(f) = &cfg.finite_slits {
            if f.samples < 2 || !(f.half_width > 0.0) {
                return Err(Error::Config("finite slits need positive width and at least 2 samples".into()));
            }
        }
        Ok(Self { cfg: cfg.clone() })
    }

    pub fn energy(&self) -> f64 {
        self.cfg.p_o * self.cfg.p_o / (2.0 * self.cfg.mass)
    }

    pub fn spec(&self) -> HamiltonianSpec {
        HamiltonianSpec::new(3).with_mass(self.cfg.mass).with_hbar(self.cfg.hbar)
    }

    /// Point slits, or trapezoid samples across each slit along `x²`.
    pub fn sources(&self) -> Vec<SlitSource> {
        match &self.cfg.finite_slits {
            None => self.cfg.slits.iter().enumerate().map(|(j, &s)| SlitSource { slit: j, position: s, weight: 1.0 }).collect(),
            Some(f) => {
                let n = f.samples;
                let mut out = Vec::new();
                for (j, s) in self.cfg.slits.iter().enumerate() {
                    for i in 0..n {
                        let u = -f.half_width + 2.0 * f.half_width * i as f64 / (n - 1) as f64;
                        let end = i == 0 || i + 1 == n;
                        let w = if end { 0.5 } else { 1.0 } / (n - 1) as f64;
                        out.push(SlitSource { slit: j, position: [s[0], s[1] + u, s[2]], weight: w });
                    }
                }
                out
            }
        }
    }

    pub fn plane_term(&self) -> BranchTerm {
        let (p, e) = (self.cfg.p_o, self.energy());
        let b = ActionBranch::new(0, "plane", 3, InitialCondition::Momentum(vec![p, 0.0, 0.0]), scalar(move |x, t| C64::from(p * x[0] - e * t)))
            .with_gradient(vector(move |_, _| vec![C64::from(p), C64::from(0.0), C64::from(0.0)]))
            .with_laplacian(scalar(|_, _| C64::from(0.0)))
            .with_time_derivative(scalar(move |_, _| C64::from(-e)));
        BranchTerm::new(b, scalar(|_, _| C64::from(1.0))).with_density_rate(scalar(|_, _| C64::from(0.0))).with_domain(Arc::new(|x, _| x[0] < 0.0))
    }

    /// `φ = p_o r − E t`, `√ρ = 1/r` around one source.
    pub fn cone_term(&self, id: usize, src: &SlitSource) -> BranchTerm {
        let (p, e, m) = (self.cfg.p_o, self.energy(), self.cfg.mass);
        let c = src.position;
        let b = ActionBranch::new(
            id,
            format!("cone-{}", src.slit + 1),
            3,
            InitialCondition::Position(c.to_vec()),
            scalar(move |x, t| C64::from(p * dist(x, &c) - e * t)),
        )
        .with_gradient(vector(move |x, _| {
            let r = dist(x, &c);
            (0..3).map(|a| C64::from(p * (x[a] - c[a]) / r)).collect()
        }))
        .with_laplacian(scalar(move |x, _| C64::from(2.0 * p / (m * dist(x, &c)))))
        .with_time_derivative(scalar(move |_, _| C64::from(-e)))
        .with_lineage(vec![BranchPoint { location: c.to_vec(), time: 0.0, cause: BranchCause::Slit }]);
        BranchTerm::new(b, scalar(move |x, _| C64::from(1.0 / dist(x, &c))))
            .with_density_rate(scalar(|_, _| C64::from(0.0)))
            .with_weight(C64::from(src.weight))
            .with_domain(Arc::new(|x, _| x[0] >= 0.0))
    }

    pub fn terms(&self) -> Vec<BranchTerm> {
        let mut out = vec![self.plane_term()];
        out.extend(self.sources().iter().enumerate().map(|(i, s)| self.cone_term(i + 1, s)));
        out
    }

    /// `Σ_j w_j e^{i p_o r_j/ħ} / r_j` at `x` (time factor dropped).
    pub fn screen_amplitude(&self, x: &[f64]) -> C64 {
        let k = self.cfg.p_o / self.cfg.hbar;
        self.sources()
            .iter()
            .map(|s| {
                let r = dist(x, &s.position);
                s.weight * C64::from_polar(1.0 / r, k * r)
            })
            .sum()
    }

    fn screen_point(&self, y: f64) -> [f64; 3] {
        [self.cfg.screen_x, y, 0.0]
    }

    pub fn screen_ys(&self) -> Vec<f64> {
        let (n, w) = (self.cfg.screen_nodes, self.cfg.screen_half_width);
        (0..n).map(|i| -w + 2.0 * w * i as f64 / (n - 1) as f64).collect()
    }

    pub fn screen_intensity(&self) -> Vec<ScreenPoint> {
        self.screen_ys().into_iter().map(|y| ScreenPoint { y, intensity: self.screen_amplitude(&self.screen_point(y)).norm_sqr() }).collect()
    }

    /// Analytic `d|ψ|²/dx²` along the screen.
    pub fn intensity_slope(&self, y: f64) -> f64 {
        let x = self.screen_point(y);
        let k = self.cfg.p_o / self.cfg.hbar;
        let mut s = C64::from(0.0);
        let mut ds = C64::from(0.0);
        for src in self.sources() {
            let r = dist(&x, &src.position);
            let dr = (y - src.position[1]) / r;
            let e = C64::from_polar(src.weight, k * r);
            s += e / r;
            ds += e * (C64::from(-dr / (r * r)) + C64::i() * k * dr / r);
        }
        2.0 * (s.conj() * ds).re
    }

    /// Roots of [`Self::intensity_slope`] on the screen.
    pub fn extremum_roots(&self, samples: usize) -> Vec<f64> {
        let w = self.cfg.screen_half_width;
        roots(|y| self.intensity_slope(y), -w, w, samples)
    }

    /// Screen positions where `p_o(r₁ − r₂)/ħ = mπ` for the first two slits.
    pub fn phase_condition_roots(&self, samples: usize) -> Vec<f64> {
        let k = self.cfg.p_o / self.cfg.hbar;
        let (a, b) = (self.cfg.slits[0], self.cfg.slits[1]);
        let w = self.cfg.screen_half_width;
        let g = |y: f64| {
            let x = self.screen_point(y);
            (k * (dist(&x, &a) - dist(&x, &b))).sin()
        };
        roots(g, -w, w, samples)
    }

    /// Small-angle fringe spacing `2πħ D / (p_o d)`.
    pub fn fraunhofer_spacing(&self) -> f64 {
        let d = dist(&self.cfg.slits[0], &self.cfg.slits[1]);
        2.0 * PI * self.cfg.hbar * self.cfg.screen_x / (self.cfg.p_o * d)
    }
}

pub(crate) fn dist(x: &[f64], c: &[f64]) -> f64 {
    x.iter().zip(c).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt()
}

/// Sign changes of `f` on a uniform sampling, refined by bisection.
pub(crate) fn roots(f: impl Fn(f64) -> f64, lo: f64, hi: f64, samples: usize) -> Vec<f64> {
    let mut out = Vec::new();
    let step = (hi - lo) / samples as f64;
    let mut a = lo;
    let mut fa = f(a);
    for i in 1..=samples {
        let b = lo + i as f64 * step;
        let fb = f(b);
        if fa == 0.0 {
            out.push(a);
        } else if fa * fb < 0.0 {
            let (mut l, mut r, mut fl) = (a, b, fa);
            for _ in 0..200 {
                let m = 0.5 * (l + r);
                let fm = f(m);
                if fm == 0.0 || r - l < 1e-14 * (1.0 + m.abs()) {
                    l = m;
                    r = m;
                    break;
                }
                if fl * fm < 0.0 {
                    r = m;
                } else {
                    l = m;
                    fl = fm;
                }
            }
            out.push(0.5 * (l + r));
        }
        a = b;
        fa = fb;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hj::hj_residual;
    use crate::scenarios::config::FiniteSlit;

    #[test]
    fn symmetric_screen_with_central_maximum() {
        let ds = DoubleSlit::new(&DoubleSlitConfig::default()).unwrap();
        let screen = ds.screen_intensity();
        let n = screen.len();
        for i in 0..n / 2 {
            assert!((screen[i].intensity - screen[n - 1 - i].intensity).abs() <= 1e-12 * screen[i].intensity.max(1e-300));
        }
        let top = screen.iter().max_by(|a, b| a.intensity.total_cmp(&b.intensity)).unwrap();
        assert!(top.y.abs() < 1e-12);
    }

    #[test]
    fn cones_solve_hj() {
        let ds = DoubleSlit::new(&DoubleSlitConfig::default()).unwrap();
        let spec = ds.spec();
        for term in ds.terms() {
            let r = hj_residual(&spec, &term.branch, &[3.0, 1.0, -2.0], 0.7).unwrap();
            assert!(r.norm() < 1e-13);
        }
    }

    #[test]
    fn half_wave_difference_is_a_dip() {
        let ds = DoubleSlit::new(&DoubleSlitConfig::default()).unwrap();
        let y = ds.phase_condition_roots(4000).into_iter().find(|y| *y > 1e-6).unwrap();
        let at = |y: f64| ds.screen_amplitude(&[10.0, y, 0.0]).norm_sqr();
        assert!(at(y) < 0.05 * at(0.0));
    }

    #[test]
    fn finite_slits_carry_unit_weight() {
        let cfg = DoubleSlitConfig { finite_slits: Some(FiniteSlit::default()), ..Default::default() };
        let ds = DoubleSlit::new(&cfg).unwrap();
        let total: f64 = ds.sources().iter().filter(|s| s.slit == 0).map(|s| s.weight).sum();
        assert!((total - 1.0).abs() < 1e-14);
        assert_eq!(ds.terms().len(), 1 + 2 * FiniteSlit::default().samples);
    }
}

//! Two slits with a thin solenoid behind the wall.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::field::{real_vector, scalar, vector, C64};
use crate::hj::{check_gauge, ActionBranch, GaugeReport, HamiltonianSpec};
use crate::scenarios::config::AharonovBohmConfig;
use crate::scenarios::double_slit::{dist, DoubleSlit, SlitSource};
use crate::wave::BranchTerm;

const GL5: [(f64, f64); 5] = [
    (0.0, 0.568_888_888_888_888_9),
    (-0.538_469_310_105_683_1, 0.478_628_670_499_366_5),
    (0.538_469_310_105_683_1, 0.478_628_670_499_366_5),
    (-0.906_179_845_938_664, 0.236_926_885_056_189_1),
    (0.906_179_845_938_664, 0.236_926_885_056_189_1),
];

#[derive(Debug, Clone, PartialEq)]
pub struct AharonovBohm {
    pub slit: DoubleSlit,
    pub charge: f64,
    pub flux: f64,
    pub solenoid: [f64; 2],
}

impl AharonovBohm {
    pub fn new(cfg: &AharonovBohmConfig) -> Result<Self> {
        let slit = DoubleSlit::new(&cfg.slit)?;
        if !(cfg.solenoid[0] > 0.0) {
            return Err(Error::Config("the solenoid must sit behind the wall (x¹ > 0)".into()));
        }
        Ok(Self { slit, charge: cfg.charge, flux: cfg.flux, solenoid: cfg.solenoid })
    }

    /// `A = Φ/(2πϱ²) (−Δy, Δx, 0)` around the solenoid axis, behind the wall only.
    pub fn a_field(&self, x: &[f64]) -> [f64; 3] {
        if x[0] < 0.0 {
            return [0.0; 3];
        }
        let (dx, dy) = (x[0] - self.solenoid[0], x[1] - self.solenoid[1]);
        let c = self.flux / (2.0 * PI * (dx * dx + dy * dy));
        [-c * dy, c * dx, 0.0]
    }

    pub fn spec(&self) -> HamiltonianSpec {
        let this = self.clone();
        self.slit.spec().with_vector_potential(real_vector(move |x, _| this.a_field(x).to_vec()), vec![self.charge; 3])
    }

    /// `∫ A·dx` along the straight segment, composite 5-point Gauss–Legendre.
    pub fn line_integral(&self, from: &[f64], to: &[f64]) -> f64 {
        let panels = 400;
        let d: Vec<f64> = (0..3).map(|a| to[a] - from[a]).collect();
        let mut acc = 0.0;
        for k in 0..panels {
            for (node, w) in GL5 {
                let s = (k as f64 + 0.5 * (node + 1.0)) / panels as f64;
                let x: Vec<f64> = (0..3).map(|a| from[a] + s * d[a]).collect();
                let a = self.a_field(&x);
                acc += 0.5 * w / panels as f64 * (a[0] * d[0] + a[1] * d[1] + a[2] * d[2]);
            }
        }
        acc
    }

    /// Gauge check on the particle domain, away from the solenoid core.
    pub fn gauge(&self) -> Result<GaugeReport> {
        let mut pts = Vec::new();
        for i in 0..9 {
            for j in 0..9 {
                let x = vec![0.5 + 1.2 * i as f64, -8.0 + 2.0 * j as f64, 0.3];
                if (x[0] - self.solenoid[0]).hypot(x[1] - self.solenoid[1]) > 0.5 {
                    pts.push(x);
                }
            }
        }
        check_gauge(&self.spec(), &pts, 0.0, 1e-4, 1e-6)
    }

    fn cone_term(&self, id: usize, src: &SlitSource) -> BranchTerm {
        let base = self.slit.cone_term(id, src);
        let (p, e, m, q) = (self.slit.cfg.p_o, self.slit.energy(), self.slit.cfg.mass, self.charge);
        let c = src.position;
        let (t1, t2) = (self.clone(), self.clone());
        let b = ActionBranch::new(
            id,
            base.branch.label.clone(),
            3,
            base.branch.init.clone(),
            scalar(move |x, t| C64::from(p * dist(x, &c) - e * t + q * t1.line_integral(&c, x))),
        )
        .with_gradient(vector(move |x, _| {
            let (r, a) = (dist(x, &c), t2.a_field(x));
            (0..3).map(|k| C64::from(p * (x[k] - c[k]) / r + q * a[k])).collect()
        }))
        .with_laplacian(scalar(move |x, _| C64::from(2.0 * p / (m * dist(x, &c)))))
        .with_time_derivative(scalar(move |_, _| C64::from(-e)))
        .with_lineage(base.branch.lineage.clone());
        BranchTerm { branch: b, ..base }
    }

    /// All branches; fails with `GaugeViolation` when `∇·A ≠ 0`.
    pub fn terms(&self) -> Result<Vec<BranchTerm>> {
        let g = self.gauge()?;
        if !g.passed {
            return Err(Error::GaugeViolation(g.max_divergence));
        }
        let mut out = vec![self.slit.plane_term()];
        out.extend(self.slit.sources().iter().enumerate().map(|(i, s)| self.cone_term(i + 1, s)));
        Ok(out)
    }

    /// `(Q/ħ)(∫_{x₁}^x A − ∫_{x₂}^x A)`, the extra phase of arm 1 over arm 2.
    pub fn relative_phase(&self, x: &[f64]) -> f64 {
        let s = &self.slit.cfg.slits;
        self.charge / self.slit.cfg.hbar * (self.line_integral(&s[0], x) - self.line_integral(&s[1], x))
    }

    /// Circulation of `A` around slit 1 → x → slit 2 → slit 1, and the
    /// winding number of that triangle about the solenoid.
    pub fn loop_circulation(&self, x: &[f64]) -> (f64, i32) {
        let s = &self.slit.cfg.slits;
        let circ = self.line_integral(&s[0], x) + self.line_integral(x, &s[1]) + self.line_integral(&s[1], &s[0]);
        (circ, winding(&[s[0][0], s[0][1]], &[x[0], x[1]], &[s[1][0], s[1][1]], &self.solenoid))
    }
}

fn winding(a: &[f64; 2], b: &[f64; 2], c: &[f64; 2], p: &[f64; 2]) -> i32 {
    let cross = |u: &[f64; 2], v: &[f64; 2]| (v[0] - u[0]) * (p[1] - u[1]) - (v[1] - u[1]) * (p[0] - u[0]);
    let (d1, d2, d3) = (cross(a, b), cross(b, c), cross(c, a));
    if d1 > 0.0 && d2 > 0.0 && d3 > 0.0 {
        1
    } else if d1 < 0.0 && d2 < 0.0 && d3 < 0.0 {
        -1
    } else {
        0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hj::hj_residual;

    #[test]
    fn zero_flux_is_the_plain_double_slit() {
        let ab = AharonovBohm::new(&AharonovBohmConfig { flux: 0.0, ..Default::default() }).unwrap();
        let plain = ab.slit.terms();
        let x = [6.0, 2.5, 0.1];
        for (a, b) in ab.terms().unwrap().iter().zip(&plain) {
            assert_eq!(a.value(&x, 0.4, 1.0), b.value(&x, 0.4, 1.0));
        }
    }

    #[test]
    fn line_integral_is_swept_angle() {
        let ab = AharonovBohm::new(&AharonovBohmConfig::default()).unwrap();
        let (from, to) = ([0.0, 5.0, 0.0], [10.0, -3.0, 0.0]);
        let ang = |x: &[f64]| (x[1] - 0.0).atan2(x[0] - 2.0);
        let exact = (ang(&to) - ang(&from)) / (2.0 * PI);
        assert!((ab.line_integral(&from, &to) - exact).abs() < 1e-12);
    }

    #[test]
    fn stokes_and_linearity() {
        let cfg = AharonovBohmConfig::default();
        let ab = AharonovBohm::new(&cfg).unwrap();
        let x = [10.0, 1.0, 0.0];
        let (circ, w) = ab.loop_circulation(&x);
        assert_eq!(w.abs(), 1);
        assert!((circ - w as f64 * cfg.flux).abs() < 1e-12);
        let twice = AharonovBohm::new(&AharonovBohmConfig { charge: 2.0 * cfg.charge, ..cfg.clone() }).unwrap();
        assert!((twice.relative_phase(&x) - 2.0 * ab.relative_phase(&x)).abs() < 1e-12);
        let spec = ab.spec();
        let terms = ab.terms().unwrap();
        assert!(hj_residual(&spec, &terms[0].branch, &[-3.0, 1.0, 0.0], 0.3).unwrap().norm() < 1e-12);
        for t in &terms[1..] {
            assert!(hj_residual(&spec, &t.branch, &x, 0.3).unwrap().norm() < 1e-12);
        }
    }
}

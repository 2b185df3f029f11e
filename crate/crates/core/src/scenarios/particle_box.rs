//! Particle in a box `[0, L]` with elastic walls.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::field::{scalar, vector, C64};
use crate::hj::{ActionBranch, BranchCause, BranchPoint, HamiltonianSpec, InitialCondition};
use crate::scenarios::config::BoxConfig;
use crate::wave::{quantize, BranchTerm, Grid, QuantizationProblem, WaveField};

/// Initial and final direction of travel.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    RightRight,
    RightLeft,
    LeftLeft,
    LeftRight,
}

impl Family {
    pub const ALL: [Family; 4] = [Family::RightRight, Family::RightLeft, Family::LeftLeft, Family::LeftRight];

    pub fn label(self) -> &'static str {
        match self {
            Family::RightRight => "→→",
            Family::RightLeft => "→←",
            Family::LeftLeft => "←←",
            Family::LeftRight => "←→",
        }
    }

    /// Wall hits on the shortest path of the family.
    pub fn reflections(self) -> u32 {
        match self {
            Family::RightRight => 0,
            Family::RightLeft | Family::LeftRight => 1,
            Family::LeftLeft => 2,
        }
    }

    /// Path length term of `φ` (without `2nLp − Et`), divided by `p`.
    fn offset(self, x: f64, x_o: f64, l: f64) -> f64 {
        match self {
            Family::RightRight => x - x_o,
            Family::RightLeft => 2.0 * l - (x + x_o),
            Family::LeftLeft => 2.0 * l - (x - x_o),
            Family::LeftRight => x + x_o,
        }
    }

    fn slope(self) -> f64 {
        match self {
            Family::RightRight | Family::LeftRight => 1.0,
            Family::RightLeft | Family::LeftLeft => -1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParticleBox {
    pub cfg: BoxConfig,
}

impl ParticleBox {
    pub fn new(cfg: &BoxConfig) -> Result<Self> {
        if !(cfg.mass > 0.0 && cfg.hbar > 0.0 && cfg.length > 0.0) {
            return Err(Error::Config("mass, hbar and length must be positive".into()));
        }
        if !(cfg.x_o > 0.0 && cfg.x_o < cfg.length) || cfg.k_max == 0 || cfg.grid_nodes < 3 {
            return Err(Error::Config("x_o must be interior, k_max ≥ 1, grid_nodes ≥ 3".into()));
        }
        Ok(Self { cfg: cfg.clone() })
    }

    pub fn spec(&self) -> HamiltonianSpec {
        HamiltonianSpec::new(1).with_mass(self.cfg.mass).with_hbar(self.cfg.hbar)
    }

    /// Round-trip phase `φ(p) = 2Lp`.
    pub fn quantization(&self) -> QuantizationProblem {
        let l = self.cfg.length;
        QuantizationProblem::new(move |p| 2.0 * l * p, self.cfg.hbar)
    }

    /// Quantized momenta `p_1..p_levels`.
    pub fn momenta(&self, levels: usize) -> Result<Vec<f64>> {
        let unit = PI * self.cfg.hbar / self.cfg.length;
        let found = quantize(&self.quantization(), 0.5 * unit, (levels as f64 + 0.5) * unit, 4 * levels)?;
        Ok(found.into_iter().filter(|q| q.k >= 1).map(|q| q.omega).collect())
    }

    pub fn energies(&self, levels: usize) -> Result<Vec<f64>> {
        Ok(self.momenta(levels)?.into_iter().map(|p| p * p / (2.0 * self.cfg.mass)).collect())
    }

    pub fn exact_energy(&self, k: usize) -> f64 {
        let (h, l) = (self.cfg.hbar, self.cfg.length);
        h * h * PI * PI * (k * k) as f64 / (2.0 * self.cfg.mass * l * l)
    }

    /// `√(2/L)/4 · (−1)^{reflections}`.
    pub fn amplitude(&self, f: Family) -> f64 {
        let s = if f.reflections().is_multiple_of(2) { 1.0 } else { -1.0 };
        s * (2.0 / self.cfg.length).sqrt() / 4.0
    }

    /// Branch of family `f` at momentum `p` after `windings` extra round trips.
    pub fn family_term(&self, id: usize, f: Family, p: f64, windings: u32) -> BranchTerm {
        let (l, x_o) = (self.cfg.length, self.cfg.x_o);
        let e = p * p / (2.0 * self.cfg.mass);
        let wrap = 2.0 * windings as f64 * l * p;
        let mut lineage = Vec::new();
        if matches!(f, Family::RightLeft | Family::LeftLeft) {
            lineage.push(BranchPoint { location: vec![l], time: 0.0, cause: BranchCause::Reflection });
        }
        if matches!(f, Family::LeftRight | Family::LeftLeft) {
            lineage.push(BranchPoint { location: vec![0.0], time: 0.0, cause: BranchCause::Reflection });
        }
        let slope = f.slope();
        let b = ActionBranch::new(
            id,
            f.label(),
            1,
            InitialCondition::Position(vec![x_o]),
            scalar(move |x, t| C64::from(wrap + p * f.offset(x[0], x_o, l) - e * t)),
        )
        .with_gradient(vector(move |_, _| vec![C64::from(slope * p)]))
        .with_laplacian(scalar(|_, _| C64::from(0.0)))
        .with_time_derivative(scalar(move |_, _| C64::from(-e)))
        .with_lineage(lineage);
        let a = self.amplitude(f);
        BranchTerm::new(b, scalar(move |_, _| C64::from(a))).with_density_rate(scalar(|_, _| C64::from(0.0)))
    }

    /// Four families for each of the first `levels` quantized momenta.
    pub fn terms(&self, levels: usize) -> Result<Vec<BranchTerm>> {
        let mut out = Vec::new();
        for p in self.momenta(levels)? {
            for f in Family::ALL {
                out.push(self.family_term(out.len(), f, p, 0));
            }
        }
        Ok(out)
    }

    /// `√(2/L) Σ_{k≤K} e^{−iE_k t/ħ} sin(πk x_o/L) sin(πk x/L)`.
    pub fn closed_form(&self, x: f64, t: f64, levels: usize) -> C64 {
        let (l, h) = (self.cfg.length, self.cfg.hbar);
        (1..=levels)
            .map(|k| {
                let a = PI * k as f64 / l;
                C64::from_polar((2.0 / l).sqrt() * (a * self.cfg.x_o).sin() * (a * x).sin(), -self.exact_energy(k) * t / h)
            })
            .sum()
    }

    pub fn grid(&self) -> Result<Grid> {
        Grid::line(0.0, self.cfg.length, self.cfg.grid_nodes)
    }

    /// Normalized eigenterm `√(2/L) sin(πk x/L)` on the box grid.
    pub fn eigenterm(&self, k: usize) -> Result<WaveField> {
        let l = self.cfg.length;
        Ok(WaveField::from_fn(self.grid()?, 0.0, self.cfg.hbar, |x| C64::from((2.0 / l).sqrt() * (PI * k as f64 * x[0] / l).sin())))
    }

    pub fn period(&self, k: usize) -> f64 {
        2.0 * PI * self.cfg.hbar / self.exact_energy(k)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hj::hj_residual;

    #[test]
    fn families_sum_to_sine_series() {
        let b = ParticleBox::new(&BoxConfig::default()).unwrap();
        let terms = b.terms(6).unwrap();
        for &(x, t) in &[(0.13, 0.0), (0.5, 0.21), (0.87, 1.3)] {
            let sum: C64 = terms.iter().map(|tm| tm.value(&[x], t, 1.0)).sum();
            assert!((sum - b.closed_form(x, t, 6)).norm() < 1e-12);
        }
        for t in &terms {
            assert!(hj_residual(&b.spec(), &t.branch, &[0.4], 0.2).unwrap().norm() < 1e-12);
        }
    }

    #[test]
    fn walls_are_nodes() {
        let b = ParticleBox::new(&BoxConfig::default()).unwrap();
        for levels in 1..8 {
            let terms = b.terms(levels).unwrap();
            for x in [0.0, 1.0] {
                let s: C64 = terms.iter().map(|tm| tm.value(&[x], 0.3, 1.0)).sum();
                assert!(s.norm() < 1e-12);
            }
        }
    }

    #[test]
    fn ground_energy() {
        let b = ParticleBox::new(&BoxConfig::default()).unwrap();
        let e = b.energies(1).unwrap();
        assert!((e[0] - PI * PI / 2.0).abs() < 1e-10);
    }
}

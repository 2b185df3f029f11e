use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{self, ScalarField, VectorField, C64};
use crate::hj::hamiltonian::HamiltonianSpec;
use crate::hj::operators;

/// Initial data of a branch: a position or a momentum, never both.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialCondition {
    Position(Vec<f64>),
    Momentum(Vec<f64>),
}

impl InitialCondition {
    pub fn from_options(x_o: Option<Vec<f64>>, p_o: Option<Vec<f64>>) -> Result<Self> {
        match (x_o, p_o) {
            (Some(x), None) => Ok(Self::Position(x)),
            (None, Some(p)) => Ok(Self::Momentum(p)),
            (Some(_), Some(_)) => Err(Error::InvalidArgument("both x_o and p_o given".into())),
            (None, None) => Err(Error::InvalidArgument("neither x_o nor p_o given".into())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BranchCause {
    Slit,
    Reflection,
    Singularity,
    TurningPoint,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BranchPoint {
    pub location: Vec<f64>,
    pub time: f64,
    pub cause: BranchCause,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BranchKind {
    Analytic,
    Numeric,
}

/// One single-valued sheet `φ_j` of the multi-valued action.
///
/// Gradient, Laplace–Beltrami value and time derivative are optional analytic
/// callbacks; when absent they fall back to central differences.
#[derive(Clone)]
pub struct ActionBranch {
    pub id: usize,
    pub label: String,
    pub kind: BranchKind,
    pub dim: usize,
    pub init: InitialCondition,
    pub lineage: Vec<BranchPoint>,
    pub complex_valued: bool,
    phi: ScalarField,
    grad_phi: Option<VectorField>,
    laplacian_phi: Option<ScalarField>,
    dphi_dt: Option<ScalarField>,
    fd_step: f64,
    dt_step: f64,
}

impl std::fmt::Debug for ActionBranch {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ActionBranch")
            .field("id", &self.id)
            .field("label", &self.label)
            .field("kind", &self.kind)
            .field("dim", &self.dim)
            .field("init", &self.init)
            .field("lineage", &self.lineage)
            .field("complex_valued", &self.complex_valued)
            .finish()
    }
}

impl ActionBranch {
    pub fn new(id: usize, label: impl Into<String>, dim: usize, init: InitialCondition, phi: ScalarField) -> Self {
        Self {
            id,
            label: label.into(),
            kind: BranchKind::Numeric,
            dim,
            init,
            lineage: Vec::new(),
            complex_valued: false,
            phi,
            grad_phi: None,
            laplacian_phi: None,
            dphi_dt: None,
            fd_step: 1e-4,
            dt_step: 1e-4,
        }
    }

    pub fn with_gradient(mut self, g: VectorField) -> Self {
        self.grad_phi = Some(g);
        self.kind = BranchKind::Analytic;
        self
    }

    /// Analytic `Δ_M φ` for the metric this branch is catalogued with.
    pub fn with_laplacian(mut self, l: ScalarField) -> Self {
        self.laplacian_phi = Some(l);
        self.kind = BranchKind::Analytic;
        self
    }

    pub fn with_time_derivative(mut self, d: ScalarField) -> Self {
        self.dphi_dt = Some(d);
        self
    }

    pub fn with_lineage(mut self, lineage: Vec<BranchPoint>) -> Self {
        self.lineage = lineage;
        self
    }

    pub fn complex(mut self) -> Self {
        self.complex_valued = true;
        self
    }

    pub fn with_fd_step(mut self, h: f64) -> Self {
        self.fd_step = h;
        self
    }

    pub fn has_analytic_gradient(&self) -> bool {
        self.grad_phi.is_some()
    }

    pub fn has_analytic_laplacian(&self) -> bool {
        self.laplacian_phi.is_some()
    }

    pub fn phi(&self, x: &[f64], t: f64) -> C64 {
        (self.phi)(x, t)
    }

    pub fn phi_field(&self) -> ScalarField {
        self.phi.clone()
    }

    pub fn grad(&self, x: &[f64], t: f64) -> Vec<C64> {
        match &self.grad_phi {
            Some(g) => g(x, t),
            None => self.grad_fd(x, t, self.fd_step),
        }
    }

    pub fn grad_fd(&self, x: &[f64], t: f64, h: f64) -> Vec<C64> {
        (0..self.dim)
            .map(|n| {
                let xp = field::shifted(x, n, h);
                let xm = field::shifted(x, n, -h);
                (self.phi(&xp, t) - self.phi(&xm, t)) / (2.0 * h)
            })
            .collect()
    }

    pub fn dphi_dt(&self, x: &[f64], t: f64) -> C64 {
        match &self.dphi_dt {
            Some(d) => d(x, t),
            None => field::time_derivative(&|s| self.phi(x, s), t, self.dt_step),
        }
    }

    /// `Δ_M φ`: analytic callback if present, else the stencil operator of `spec`.
    pub fn laplacian(&self, spec: &HamiltonianSpec, x: &[f64], t: f64) -> Result<C64> {
        match &self.laplacian_phi {
            Some(l) => Ok(l(x, t)),
            None => self.laplacian_fd(spec, x, t, self.fd_step),
        }
    }

    pub fn laplacian_fd(&self, spec: &HamiltonianSpec, x: &[f64], t: f64, h: f64) -> Result<C64> {
        operators::laplace_beltrami_stencil(spec, &|y: &[f64]| self.phi(y, t), x, h)
    }

    /// Largest absolute deviation between analytic and stencil gradient / Laplacian.
    pub fn finite_difference_deviation(&self, spec: &HamiltonianSpec, x: &[f64], t: f64, h: f64) -> Result<(f64, f64)> {
        let g_err = match &self.grad_phi {
            Some(g) => g(x, t).iter().zip(self.grad_fd(x, t, h)).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max),
            None => 0.0,
        };
        let l_err = match &self.laplacian_phi {
            Some(l) => (l(x, t) - self.laplacian_fd(spec, x, t, h)?).norm(),
            None => 0.0,
        };
        Ok((g_err, l_err))
    }

    /// Distance from `x` to the nearest declared branch point.
    pub fn distance_to_branch_points(&self, x: &[f64]) -> f64 {
        self.lineage
            .iter()
            .filter(|b| b.location.len() == x.len())
            .map(|b| b.location.iter().zip(x).map(|(a, c)| (a - c).powi(2)).sum::<f64>().sqrt())
            .fold(f64::INFINITY, f64::min)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{scalar, vector};

    fn quadratic_branch() -> ActionBranch {
        ActionBranch::new(0, "q", 2, InitialCondition::Position(vec![0.0, 0.0]), scalar(|x, t| C64::from(x[0] * x[0] + 3.0 * x[1] - t)))
            .with_gradient(vector(|x, _| vec![C64::from(2.0 * x[0]), C64::from(3.0)]))
            .with_laplacian(scalar(|_, _| C64::from(2.0)))
    }

    #[test]
    fn exclusive_initial_condition() {
        assert!(InitialCondition::from_options(Some(vec![0.0]), Some(vec![1.0])).is_err());
        assert!(InitialCondition::from_options(None, None).is_err());
        assert_eq!(InitialCondition::from_options(None, Some(vec![1.0])).unwrap(), InitialCondition::Momentum(vec![1.0]));
    }

    #[test]
    fn analytic_matches_stencil_to_second_order() {
        let b = quadratic_branch();
        let spec = HamiltonianSpec::new(2);
        let (g, l) = b.finite_difference_deviation(&spec, &[0.7, -0.2], 0.3, 1e-3).unwrap();
        assert!(g < 1e-9 && l < 1e-6, "{g} {l}");
        assert!((b.dphi_dt(&[0.1, 0.2], 1.0) + 1.0).norm() < 1e-10);
    }
}

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::field::{RealField, RealVectorField, C64};

/// Metric (inertia tensor) `M(x)`.
#[derive(Clone)]
pub enum Metric {
    Constant(DMatrix<f64>),
    Field(Arc<dyn Fn(&[f64]) -> DMatrix<f64> + Send + Sync>),
}

/// Metric evaluated at a point: inverse and `sqrt(|det M|)`.
#[derive(Debug, Clone)]
pub struct MetricAt {
    pub inverse: DMatrix<f64>,
    pub sqrt_det: f64,
}

/// Hamiltonian `H = ½ (p − Q A)ᵀ M⁻¹ (p − Q A) + V` together with ħ.
///
/// Immutable once built; cheap to clone (all fields are shared).
#[derive(Clone)]
pub struct HamiltonianSpec {
    dim: usize,
    metric: Metric,
    potential: Option<RealField>,
    potential_gradient: Option<RealVectorField>,
    vector_potential: Option<RealVectorField>,
    charge: Vec<f64>,
    hbar: f64,
    det_floor: f64,
    fd_step: f64,
}

impl std::fmt::Debug for HamiltonianSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("HamiltonianSpec")
            .field("dim", &self.dim)
            .field("hbar", &self.hbar)
            .field("charge", &self.charge)
            .field("has_potential", &self.potential.is_some())
            .field("has_vector_potential", &self.vector_potential.is_some())
            .finish()
    }
}

impl HamiltonianSpec {
    /// Free particle with `M = I`, `ħ = 1`.
    pub fn new(dim: usize) -> Self {
        assert!(dim > 0, "dimension must be positive");
        Self {
            dim,
            metric: Metric::Constant(DMatrix::identity(dim, dim)),
            potential: None,
            potential_gradient: None,
            vector_potential: None,
            charge: vec![0.0; dim],
            hbar: 1.0,
            det_floor: 1e-12,
            fd_step: 1e-5,
        }
    }

    pub fn with_mass(self, mass: f64) -> Self {
        let dim = self.dim;
        self.with_metric(DMatrix::identity(dim, dim) * mass)
    }

    pub fn with_metric(mut self, m: DMatrix<f64>) -> Self {
        assert_eq!(m.nrows(), self.dim);
        assert_eq!(m.ncols(), self.dim);
        self.metric = Metric::Constant(m);
        self
    }

    pub fn with_metric_field<F>(mut self, f: F) -> Self
    where
        F: Fn(&[f64]) -> DMatrix<f64> + Send + Sync + 'static,
    {
        self.metric = Metric::Field(Arc::new(f));
        self
    }

    pub fn with_potential(mut self, v: RealField) -> Self {
        self.potential = Some(v);
        self
    }

    /// Analytic `∇V`; without it forces use central differences.
    pub fn with_potential_gradient(mut self, g: RealVectorField) -> Self {
        self.potential_gradient = Some(g);
        self
    }

    /// Vector potential `A` and the diagonal of the charge matrix `Q`.
    pub fn with_vector_potential(mut self, a: RealVectorField, charge: Vec<f64>) -> Self {
        assert_eq!(charge.len(), self.dim);
        self.vector_potential = Some(a);
        self.charge = charge;
        self
    }

    pub fn with_hbar(mut self, hbar: f64) -> Self {
        assert!(hbar > 0.0);
        self.hbar = hbar;
        self
    }

    pub fn with_det_floor(mut self, floor: f64) -> Self {
        self.det_floor = floor;
        self
    }

    pub fn with_fd_step(mut self, h: f64) -> Self {
        self.fd_step = h;
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn charge(&self) -> &[f64] {
        &self.charge
    }

    pub fn fd_step(&self) -> f64 {
        self.fd_step
    }

    pub fn has_vector_potential(&self) -> bool {
        self.vector_potential.is_some()
    }

    pub fn metric_matrix(&self, x: &[f64]) -> DMatrix<f64> {
        match &self.metric {
            Metric::Constant(m) => m.clone(),
            Metric::Field(f) => f(x),
        }
    }

    pub fn metric_at(&self, x: &[f64]) -> Result<MetricAt> {
        let m = self.metric_matrix(x);
        let det = m.determinant();
        if !(det.abs() >= self.det_floor) {
            return Err(Error::SingularMetric { det, floor: self.det_floor });
        }
        let inverse = m.try_inverse().ok_or(Error::SingularMetric { det, floor: self.det_floor })?;
        Ok(MetricAt { inverse, sqrt_det: det.abs().sqrt() })
    }

    pub fn potential(&self, x: &[f64], t: f64) -> f64 {
        self.potential.as_ref().map_or(0.0, |v| v(x, t))
    }

    pub fn vector_potential(&self, x: &[f64], t: f64) -> Vec<f64> {
        match &self.vector_potential {
            Some(a) => a(x, t),
            None => vec![0.0; self.dim],
        }
    }

    /// `Q A(x, t)` as a vector.
    pub fn charged_potential(&self, x: &[f64], t: f64) -> Vec<f64> {
        self.vector_potential(x, t).iter().zip(&self.charge).map(|(a, q)| a * q).collect()
    }

    /// `H(x, p, t)` for a (possibly complex) momentum.
    pub fn hamiltonian(&self, x: &[f64], p: &[C64], t: f64) -> Result<C64> {
        let m = self.metric_at(x)?;
        let qa = self.charged_potential(x, t);
        let kin: Vec<C64> = p.iter().zip(&qa).map(|(pi, a)| pi - a).collect();
        let mut acc = C64::new(0.0, 0.0);
        for i in 0..self.dim {
            for j in 0..self.dim {
                acc += kin[i] * m.inverse[(i, j)] * kin[j];
            }
        }
        Ok(0.5 * acc + self.potential(x, t))
    }

    pub fn hamiltonian_real(&self, x: &[f64], p: &[f64], t: f64) -> Result<f64> {
        let pc: Vec<C64> = p.iter().map(|&v| C64::new(v, 0.0)).collect();
        Ok(self.hamiltonian(x, &pc, t)?.re)
    }

    /// Kinetic energy `½ (p − QA)ᵀ M⁻¹ (p − QA)`.
    pub fn kinetic_energy(&self, x: &[f64], p: &[f64], t: f64) -> Result<f64> {
        Ok(self.hamiltonian_real(x, p, t)? - self.potential(x, t))
    }

    /// `ẋ = M⁻¹ (p − QA)`.
    pub fn velocity(&self, x: &[f64], p: &[f64], t: f64) -> Result<Vec<f64>> {
        let m = self.metric_at(x)?;
        let qa = self.charged_potential(x, t);
        let kin = DVector::from_iterator(self.dim, p.iter().zip(&qa).map(|(pi, a)| pi - a));
        Ok((m.inverse * kin).iter().copied().collect())
    }

    /// `−∂H/∂x` at fixed canonical momentum.
    pub fn force(&self, x: &[f64], p: &[f64], t: f64) -> Result<Vec<f64>> {
        let simple = matches!(self.metric, Metric::Constant(_)) && self.vector_potential.is_none();
        if simple {
            if let Some(g) = &self.potential_gradient {
                return Ok(g(x, t).into_iter().map(|v| -v).collect());
            }
        }
        let h = self.fd_step;
        let mut f = Vec::with_capacity(self.dim);
        for n in 0..self.dim {
            let mut xp = x.to_vec();
            let mut xm = x.to_vec();
            xp[n] += h;
            xm[n] -= h;
            let dh = if simple {
                (self.potential(&xp, t) - self.potential(&xm, t)) / (2.0 * h)
            } else {
                (self.hamiltonian_real(&xp, p, t)? - self.hamiltonian_real(&xm, p, t)?) / (2.0 * h)
            };
            f.push(-dh);
        }
        Ok(f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::real;

    #[test]
    fn singular_metric_is_rejected() {
        let spec = HamiltonianSpec::new(2).with_metric(DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 0.0]));
        assert!(matches!(spec.metric_at(&[0.0, 0.0]), Err(Error::SingularMetric { .. })));
    }

    #[test]
    fn harmonic_energy_and_force() {
        let spec = HamiltonianSpec::new(1).with_mass(2.0).with_potential(real(|x, _| 0.5 * 2.0 * 9.0 * x[0] * x[0]));
        let e = spec.hamiltonian_real(&[1.0], &[4.0], 0.0).unwrap();
        assert!((e - (16.0 / 4.0 + 9.0)).abs() < 1e-12);
        let f = spec.force(&[1.0], &[4.0], 0.0).unwrap();
        assert!((f[0] + 18.0).abs() < 1e-6);
        assert_eq!(spec.velocity(&[1.0], &[4.0], 0.0).unwrap(), vec![2.0]);
    }
}

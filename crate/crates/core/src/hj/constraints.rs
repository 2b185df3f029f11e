use serde::{Deserialize, Serialize};

use crate::field::RealField;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CollisionMode {
    /// Kinetic energy preserved; normal momentum mirrored.
    Elastic,
    /// Kinetic energy removed; the trajectory stops.
    Plastic,
}

/// One inequality constraint `f_g(x, t) ≤ 0`.
#[derive(Clone)]
pub struct Constraint {
    pub f: RealField,
    pub mode: CollisionMode,
    pub label: String,
}

impl std::fmt::Debug for Constraint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Constraint").field("label", &self.label).field("mode", &self.mode).finish()
    }
}

#[derive(Debug, Clone)]
pub struct ConstraintSet {
    pub constraints: Vec<Constraint>,
    pub activation_tolerance: f64,
    fd_step: f64,
}

impl Default for ConstraintSet {
    fn default() -> Self {
        Self::new()
    }
}

impl ConstraintSet {
    pub fn new() -> Self {
        Self { constraints: Vec::new(), activation_tolerance: 1e-9, fd_step: 1e-6 }
    }

    pub fn with(mut self, label: impl Into<String>, f: RealField, mode: CollisionMode) -> Self {
        self.constraints.push(Constraint { f, mode, label: label.into() });
        self
    }

    pub fn with_activation_tolerance(mut self, tol: f64) -> Self {
        self.activation_tolerance = tol;
        self
    }

    pub fn len(&self) -> usize {
        self.constraints.len()
    }

    pub fn is_empty(&self) -> bool {
        self.constraints.is_empty()
    }

    pub fn value(&self, g: usize, x: &[f64], t: f64) -> f64 {
        (self.constraints[g].f)(x, t)
    }

    /// Indices with `|f_g| ≤ tolerance`.
    pub fn active_set(&self, x: &[f64], t: f64) -> Vec<usize> {
        (0..self.len()).filter(|&g| self.value(g, x, t).abs() <= self.activation_tolerance).collect()
    }

    /// First constraint (lowest index) with `f_g > 0`.
    pub fn first_violated(&self, x: &[f64], t: f64) -> Option<usize> {
        (0..self.len()).find(|&g| self.value(g, x, t) > 0.0)
    }

    pub fn gradient(&self, g: usize, x: &[f64], t: f64) -> Vec<f64> {
        let h = self.fd_step;
        (0..x.len())
            .map(|n| {
                let mut xp = x.to_vec();
                let mut xm = x.to_vec();
                xp[n] += h;
                xm[n] -= h;
                (self.value(g, &xp, t) - self.value(g, &xm, t)) / (2.0 * h)
            })
            .collect()
    }

    /// Axis-aligned box `lo ≤ x ≤ hi`, one constraint per face.
    pub fn box_walls(lo: &[f64], hi: &[f64], mode: CollisionMode) -> Self {
        let mut set = Self::new();
        for n in 0..lo.len() {
            let (l, u) = (lo[n], hi[n]);
            set = set.with(format!("lower[{n}]"), std::sync::Arc::new(move |x: &[f64], _| l - x[n]), mode).with(
                format!("upper[{n}]"),
                std::sync::Arc::new(move |x: &[f64], _| x[n] - u),
                mode,
            );
        }
        set
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn box_active_set() {
        let set = ConstraintSet::box_walls(&[0.0], &[1.0], CollisionMode::Elastic);
        assert_eq!(set.active_set(&[0.5], 0.0), Vec::<usize>::new());
        assert_eq!(set.active_set(&[1.0], 0.0), vec![1]);
        assert_eq!(set.first_violated(&[-0.1], 0.0), Some(0));
        let g = set.gradient(1, &[0.3], 0.0);
        assert!((g[0] - 1.0).abs() < 1e-9);
    }
}

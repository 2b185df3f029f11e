use crate::error::{Error, Result};
use crate::field::RealField;

#[derive(Clone)]
pub struct EnsembleElement {
    pub label: String,
    pub probability: f64,
    pub density: RealField,
}

/// Ensemble `𝔼` of initial conditions with probabilities `p^ε`.
#[derive(Clone)]
pub struct EnsembleSpec {
    elements: Vec<EnsembleElement>,
}

impl std::fmt::Debug for EnsembleSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_list().entries(self.elements.iter().map(|e| (&e.label, e.probability))).finish()
    }
}

impl EnsembleSpec {
    pub const SUM_TOLERANCE: f64 = 1e-12;

    pub fn new(elements: Vec<EnsembleElement>) -> Result<Self> {
        if elements.is_empty() {
            return Err(Error::InvalidArgument("empty ensemble".into()));
        }
        if let Some(e) = elements.iter().find(|e| !(e.probability >= 0.0)) {
            return Err(Error::InvalidArgument(format!("negative probability for {}", e.label)));
        }
        let total: f64 = elements.iter().map(|e| e.probability).sum();
        if (total - 1.0).abs() > Self::SUM_TOLERANCE {
            return Err(Error::InvalidArgument(format!("probabilities sum to {total}")));
        }
        Ok(Self { elements })
    }

    /// Uniform ensemble over the given labelled densities.
    pub fn uniform(items: Vec<(String, RealField)>) -> Result<Self> {
        let p = 1.0 / items.len().max(1) as f64;
        Self::new(items.into_iter().map(|(label, density)| EnsembleElement { label, probability: p, density }).collect())
    }

    pub fn elements(&self) -> &[EnsembleElement] {
        &self.elements
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.elements.iter().map(|e| e.probability).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::real;

    #[test]
    fn probabilities_must_sum_to_one() {
        let d = real(|_, _| 1.0);
        let el = |p| EnsembleElement { label: "e".into(), probability: p, density: d.clone() };
        assert!(EnsembleSpec::new(vec![el(0.5), el(0.5)]).is_ok());
        assert!(EnsembleSpec::new(vec![el(0.5), el(0.4)]).is_err());
        assert!(EnsembleSpec::new(vec![el(1.5), el(-0.5)]).is_err());
        assert_eq!(EnsembleSpec::uniform(vec![("a".into(), d.clone()), ("b".into(), d)]).unwrap().probabilities(), vec![0.5, 0.5]);
    }
}

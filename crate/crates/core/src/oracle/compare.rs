use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::wave::grid::WaveField;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CompareMode {
    GlobalPhaseInvariant,
    Strict,
}

/// Relative L² distance `‖a − e^{iθ}b‖/‖b‖`, minimized over `θ` in the
/// invariant mode (`θ = 0` when strict).
pub fn compare_l2(a: &WaveField, b: &WaveField, mode: CompareMode) -> Result<f64> {
    a.grid.check_same(&b.grid)?;
    if a.components != b.components {
        return Err(Error::GridMismatch("component count".into()));
    }
    let (na, nb) = (a.norm_sqr(), b.norm_sqr());
    if !(nb > 0.0) {
        return Err(Error::InvalidArgument("reference field has zero norm".into()));
    }
    let ip = b.inner(a)?;
    let cross = match mode {
        CompareMode::GlobalPhaseInvariant => ip.norm(),
        CompareMode::Strict => ip.re,
    };
    Ok(((na + nb - 2.0 * cross).max(0.0) / nb).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::C64;
    use crate::wave::grid::Grid;

    #[test]
    fn closed_form_examples() {
        let g = Grid::line(0.0, 1.0, 101).unwrap();
        let b = WaveField::from_fn(g.clone(), 0.0, 1.0, |x| C64::from((std::f64::consts::PI * x[0]).sin()));
        let a = b.scaled(C64::new(0.0, std::f64::consts::PI / 3.0).exp());
        assert!(compare_l2(&b, &b, CompareMode::Strict).unwrap() < 1e-15);
        assert!(compare_l2(&a, &b, CompareMode::GlobalPhaseInvariant).unwrap() < 1e-7);
        assert!((compare_l2(&a, &b, CompareMode::Strict).unwrap() - 1.0).abs() < 1e-12);
        let c = WaveField::from_fn(g, 0.0, 1.0, |x| C64::from((2.0 * std::f64::consts::PI * x[0]).sin()));
        assert!((compare_l2(&c, &b, CompareMode::GlobalPhaseInvariant).unwrap() - 2f64.sqrt()).abs() < 1e-12);
    }
}

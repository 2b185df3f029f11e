use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::C64;
use crate::wave::grid::{Grid, WaveField};

/// `ϱ = Σ_ε p^ε ψ^ε ψ^ε†` with trace normalized to one.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    pub grid: Grid,
    /// Normalized diagonal `ϱ(x, x)`.
    pub diagonal: Vec<f64>,
    pub full: Option<DMatrix<C64>>,
    /// Factor applied to reach unit trace.
    pub trace_factor: f64,
}

pub fn density_matrix(ensemble: &[(f64, &WaveField)], keep_full: bool) -> Result<DensityMatrix> {
    let Some((_, first)) = ensemble.first() else {
        return Err(Error::InvalidArgument("empty ensemble".into()));
    };
    let grid = first.grid.clone();
    for (_, psi) in ensemble {
        grid.check_same(&psi.grid)?;
        if psi.components != first.components {
            return Err(Error::GridMismatch("component count".into()));
        }
    }
    let total: f64 = ensemble.iter().map(|(p, _)| p).sum();
    if ensemble.iter().any(|(p, _)| *p < 0.0) || (total - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidArgument(format!("ensemble probabilities sum to {total}")));
    }
    let mut diagonal = vec![0.0; grid.len()];
    for (p, psi) in ensemble {
        for (d, v) in diagonal.iter_mut().zip(psi.density()) {
            *d += p * v;
        }
    }
    let trace: f64 = diagonal.iter().enumerate().map(|(k, d)| grid.weight(k) * d).sum();
    if !(trace > 0.0) {
        return Err(Error::InvalidArgument("density matrix has zero trace".into()));
    }
    let trace_factor = 1.0 / trace;
    diagonal.iter_mut().for_each(|d| *d *= trace_factor);
    let full = keep_full.then(|| {
        let n = grid.len() * first.components;
        let mut m = DMatrix::<C64>::zeros(n, n);
        for (p, psi) in ensemble {
            let v = nalgebra::DVector::from_column_slice(&psi.values);
            m += (&v * v.adjoint()) * C64::from(p * trace_factor);
        }
        m
    });
    Ok(DensityMatrix { grid, diagonal, full, trace_factor })
}

impl DensityMatrix {
    pub fn trace(&self) -> f64 {
        self.diagonal.iter().enumerate().map(|(k, d)| self.grid.weight(k) * d).sum()
    }
}

/// Trapezoid integral of the diagonal over the grid-aligned box `[lo, hi]`.
pub fn born_probability(rho: &DensityMatrix, lo: &[f64], hi: &[f64]) -> Result<f64> {
    let g = &rho.grid;
    if lo.len() != g.dim() || hi.len() != g.dim() {
        return Err(Error::DomainMismatch("region dimension".into()));
    }
    let mut ranges = Vec::with_capacity(g.dim());
    for a in 0..g.dim() {
        let i0 = ((lo[a] - g.origin[a]) / g.spacing[a]).round().max(0.0) as usize;
        let i1 = (((hi[a] - g.origin[a]) / g.spacing[a]).round() as usize).min(g.counts[a] - 1);
        ranges.push((i0, i1));
    }
    let mut total = 0.0;
    for k in 0..g.len() {
        let idx = g.multi_index(k);
        let mut w = 1.0;
        for (a, &(i0, i1)) in ranges.iter().enumerate() {
            let i = idx[a];
            if i < i0 || i > i1 {
                w = 0.0;
                break;
            }
            if i0 < i1 {
                w *= if i == i0 || i == i1 { 0.5 * g.spacing[a] } else { g.spacing[a] };
            }
        }
        total += w * rho.diagonal[k];
    }
    Ok(total)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NormDrift {
    pub times: Vec<f64>,
    pub norms: Vec<f64>,
    /// `|‖ψ(t)‖ − ‖ψ(0)‖| / ‖ψ(0)‖` per slice.
    pub drift: Vec<f64>,
    pub max_drift: f64,
    /// `max_drift` exceeds the tolerance.
    pub flagged: bool,
}

pub fn check_norm_conservation(series: &[WaveField], tolerance: f64) -> Result<NormDrift> {
    if series.len() < 2 {
        return Err(Error::InvalidArgument("need at least two time slices".into()));
    }
    let norms: Vec<f64> = series.iter().map(WaveField::norm).collect();
    let n0 = norms[0];
    let drift: Vec<f64> = norms.iter().map(|n| (n - n0).abs() / n0).collect();
    let max_drift = drift.iter().copied().fold(0.0, f64::max);
    Ok(NormDrift { times: series.iter().map(|p| p.time).collect(), norms, drift, max_drift, flagged: max_drift > tolerance })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ground_state(l: f64, n: usize) -> WaveField {
        let g = Grid::line(0.0, l, n).unwrap();
        WaveField::from_fn(g, 0.0, 1.0, |x| C64::from((2.0 / l).sqrt() * (std::f64::consts::PI * x[0] / l).sin()))
    }

    #[test]
    fn pure_state_trace_and_born_rule() {
        let psi = ground_state(1.0, 201);
        let rho = density_matrix(&[(1.0, &psi)], true).unwrap();
        assert!((rho.trace() - 1.0).abs() < 1e-14);
        assert!((born_probability(&rho, &[0.0], &[1.0]).unwrap() - 1.0).abs() < 1e-14);
        assert!((born_probability(&rho, &[0.0], &[0.5]).unwrap() - 0.5).abs() < 1e-14);
        let full = rho.full.unwrap();
        assert!((full[(100, 100)].re - rho.diagonal[100]).abs() < 1e-12);
    }

    #[test]
    fn mismatched_grids_are_rejected() {
        let a = ground_state(1.0, 11);
        let b = ground_state(1.0, 12);
        assert!(matches!(density_matrix(&[(0.5, &a), (0.5, &b)], false), Err(Error::GridMismatch(_))));
    }

    #[test]
    fn stationary_state_has_no_drift() {
        let a = ground_state(1.0, 101);
        let mut b = a.scaled(C64::new(0.0, -4.0).exp());
        b.time = 1.0;
        let rep = check_norm_conservation(&[a.clone(), b], 1e-12).unwrap();
        assert!(rep.max_drift < 1e-15 && !rep.flagged);
        let lossy = a.scaled(C64::from(0.9));
        assert!(check_norm_conservation(&[a, lossy], 1e-12).unwrap().flagged);
    }
}

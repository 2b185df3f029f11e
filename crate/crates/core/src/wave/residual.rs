use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::C64;
use crate::hj::hamiltonian::HamiltonianSpec;
use crate::hj::operators::metric_divergence;
use crate::wave::grid::WaveField;

/// Source of `∂ψ/∂t` for [`schrodinger_residual`].
pub enum TimeDerivative<'a> {
    /// Central difference of the slices at `t − dt` and `t + dt`.
    Slices { previous: &'a WaveField, next: &'a WaveField, dt: f64 },
    /// Analytic callback `x -> ∂ψ/∂t`.
    Analytic(&'a (dyn Fn(&[f64]) -> C64 + Sync)),
}

#[derive(Debug, Clone)]
pub struct ResidualOptions {
    /// Declared branch points; balls of `exclusion_cells · h` around them are skipped.
    pub branch_points: Vec<Vec<f64>>,
    pub exclusion_cells: f64,
    /// Regularizer in `|r| / (|ψ| + δ)`.
    pub delta: f64,
    /// When set, fail with `GridTooCoarse` if the Richardson estimate of the
    /// stencil error exceeds it.
    pub tolerance: Option<f64>,
}

impl Default for ResidualOptions {
    fn default() -> Self {
        Self { branch_points: Vec::new(), exclusion_cells: 3.0, delta: 1e-12, tolerance: None }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GridSummary {
    pub h: Vec<f64>,
    pub extents: Vec<(f64, f64)>,
}

/// JSON residual report.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ResidualSummary {
    pub max_rel: f64,
    /// Root-mean-square of the relative residual over evaluated nodes.
    pub l2_rel: f64,
    pub excluded_nodes: usize,
    pub grid: GridSummary,
}

#[derive(Debug, Clone)]
pub struct ResidualReport {
    pub residual: WaveField,
    /// Nodes where the residual was evaluated.
    pub evaluated: Vec<bool>,
    pub summary: ResidualSummary,
}

/// `½((ħ/i)∇_M − QA)·M⁻¹((ħ/i)∇ − QA)ψ + Vψ` by conservative central differences.
pub fn hamiltonian_operator(spec: &HamiltonianSpec, f: &dyn Fn(&[f64]) -> C64, x: &[f64], t: f64, h: &[f64]) -> Result<C64> {
    let c = C64::new(0.0, -spec.hbar());
    Ok(0.5 * metric_divergence(spec, f, x, t, h, c, true)? + spec.potential(x, t) * f(x))
}

/// Pointwise residual `[(ħ/i)∂_t + Ĥ]ψ` for an evaluable `ψ`.
pub fn schrodinger_residual_at(spec: &HamiltonianSpec, psi: &dyn Fn(&[f64]) -> C64, dpsi_dt: C64, x: &[f64], t: f64, h: &[f64]) -> Result<C64> {
    Ok(C64::new(0.0, -spec.hbar()) * dpsi_dt + hamiltonian_operator(spec, psi, x, t, h)?)
}

/// Residual of `ψ` on its grid with interior summary norms.
pub fn schrodinger_residual(spec: &HamiltonianSpec, psi: &WaveField, dt: TimeDerivative<'_>, opts: &ResidualOptions) -> Result<ResidualReport> {
    let grid = &psi.grid;
    if grid.dim() != spec.dim() || psi.components != 1 {
        return Err(Error::DomainMismatch("residual needs a scalar field on a grid of matching dimension".into()));
    }
    if let TimeDerivative::Slices { previous, next, .. } = &dt {
        grid.check_same(&previous.grid)?;
        grid.check_same(&next.grid)?;
    }
    let h = grid.spacing.clone();
    let h_max = h.iter().copied().fold(0.0, f64::max);
    let lookup = |y: &[f64]| -> C64 { grid.nearest(y).map_or(C64::new(f64::NAN, 0.0), |k| psi.at(k)) };
    let near_flag = |k: usize| -> bool {
        let idx = grid.multi_index(k);
        let n = grid.dim();
        // the stencil reaches one cell along each axis and its diagonals
        let mut offsets = vec![vec![0i64; n]];
        for a in 0..n {
            for b in 0..n {
                for (sa, sb) in [(1, 1), (1, -1), (-1, 1), (-1, -1)] {
                    let mut o = vec![0i64; n];
                    o[a] += sa;
                    if b != a {
                        o[b] += sb;
                    }
                    offsets.push(o);
                }
            }
        }
        offsets.iter().any(|o| {
            let j: Vec<usize> = idx.iter().zip(o).map(|(&i, &d)| (i as i64 + d) as usize).collect();
            psi.flagged[grid.flat_index(&j)]
        })
    };
    let mut values = vec![C64::new(0.0, 0.0); grid.len()];
    let mut evaluated = vec![false; grid.len()];
    let mut excluded = 0usize;
    let mut coarse_estimate: f64 = 0.0;
    for k in 0..grid.len() {
        if !grid.is_interior(k, 1) {
            continue;
        }
        let x = grid.point(k);
        let near_bp = opts.branch_points.iter().any(|b| b.iter().zip(&x).map(|(u, v)| (u - v).powi(2)).sum::<f64>().sqrt() < opts.exclusion_cells * h_max);
        if near_bp || near_flag(k) {
            excluded += 1;
            continue;
        }
        let d_t = match &dt {
            TimeDerivative::Slices { previous, next, dt } => (next.at(k) - previous.at(k)) / (2.0 * dt),
            TimeDerivative::Analytic(f) => f(&x),
        };
        let r = schrodinger_residual_at(spec, &lookup, d_t, &x, psi.time, &h)?;
        values[k] = r;
        evaluated[k] = true;
        if opts.tolerance.is_some() && grid.is_interior(k, 2) {
            let h2: Vec<f64> = h.iter().map(|v| 2.0 * v).collect();
            let coarse = hamiltonian_operator(spec, &lookup, &x, psi.time, &h2)?;
            let fine = hamiltonian_operator(spec, &lookup, &x, psi.time, &h)?;
            if coarse.re.is_finite() {
                coarse_estimate = coarse_estimate.max((fine - coarse).norm() / 3.0 / (psi.at(k).norm() + opts.delta));
            }
        }
    }
    if let Some(tol) = opts.tolerance {
        if coarse_estimate > tol {
            return Err(Error::GridTooCoarse { estimate: coarse_estimate, tolerance: tol });
        }
    }
    let (mut max_rel, mut sum, mut wsum) = (0.0f64, 0.0, 0.0);
    for k in (0..grid.len()).filter(|&k| evaluated[k]) {
        let rel = values[k].norm() / (psi.at(k).norm() + opts.delta);
        max_rel = max_rel.max(rel);
        let w = grid.weight(k);
        sum += w * rel * rel;
        wsum += w;
    }
    let mut residual = psi.zeros_like();
    residual.values = values;
    Ok(ResidualReport {
        residual,
        evaluated,
        summary: ResidualSummary {
            max_rel,
            l2_rel: if wsum > 0.0 { (sum / wsum).sqrt() } else { 0.0 },
            excluded_nodes: excluded,
            grid: GridSummary { h, extents: grid.extents() },
        },
    })
}

/// Least-squares slope of `ln e` against `ln h`.
pub fn loglog_slope(h: &[f64], e: &[f64]) -> f64 {
    let n = h.len() as f64;
    let (lx, ly): (Vec<f64>, Vec<f64>) = h.iter().zip(e).map(|(a, b)| (a.ln(), b.ln())).unzip();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let cov: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let var: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    cov / var
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wave::grid::Grid;

    fn plane_wave(g: Grid, p: f64, t: f64) -> WaveField {
        WaveField::from_fn(g, t, 1.0, |x| C64::new(0.0, p * x[0] - 0.5 * p * p * t).exp())
    }

    #[test]
    fn plane_wave_residual_is_second_order() {
        let spec = HamiltonianSpec::new(1);
        let p = 2.0;
        let mut errs = Vec::new();
        let mut hs = Vec::new();
        for n in [101, 201, 401] {
            let g = Grid::line(0.0, 2.0, n).unwrap();
            hs.push(g.spacing[0]);
            let psi = plane_wave(g, p, 0.0);
            let d = |x: &[f64]| C64::new(0.0, -0.5 * p * p) * C64::new(0.0, p * x[0]).exp();
            let rep = schrodinger_residual(&spec, &psi, TimeDerivative::Analytic(&d), &ResidualOptions::default()).unwrap();
            errs.push(rep.summary.max_rel);
        }
        let slope = loglog_slope(&hs, &errs);
        assert!((slope - 2.0).abs() < 0.05, "slope {slope}");
    }

    #[test]
    fn slices_match_analytic() {
        let spec = HamiltonianSpec::new(1);
        let g = Grid::line(0.0, 1.0, 201).unwrap();
        let dt = 1e-4;
        let (a, b, c) = (plane_wave(g.clone(), 1.0, -dt), plane_wave(g.clone(), 1.0, 0.0), plane_wave(g, 1.0, dt));
        let rep = schrodinger_residual(&spec, &b, TimeDerivative::Slices { previous: &a, next: &c, dt }, &ResidualOptions::default()).unwrap();
        assert!(rep.summary.max_rel < 1e-4);
        let json = serde_json::to_value(&rep.summary).unwrap();
        for key in ["max_rel", "l2_rel", "excluded_nodes", "grid"] {
            assert!(json.get(key).is_some());
        }
    }

    #[test]
    fn coarse_grid_is_reported() {
        let spec = HamiltonianSpec::new(1);
        let psi = plane_wave(Grid::line(0.0, 2.0, 11).unwrap(), 10.0, 0.0);
        let d = |x: &[f64]| C64::new(0.0, -50.0) * C64::new(0.0, 10.0 * x[0]).exp();
        let opts = ResidualOptions { tolerance: Some(1e-3), ..Default::default() };
        assert!(matches!(schrodinger_residual(&spec, &psi, TimeDerivative::Analytic(&d), &opts), Err(Error::GridTooCoarse { .. })));
    }

    #[test]
    fn exclusion_balls_are_counted() {
        let spec = HamiltonianSpec::new(1);
        let psi = plane_wave(Grid::line(-1.0, 1.0, 101).unwrap(), 1.0, 0.0);
        let d = |x: &[f64]| C64::new(0.0, -0.5) * C64::new(0.0, x[0]).exp();
        let opts = ResidualOptions { branch_points: vec![vec![0.0]], exclusion_cells: 2.5, ..Default::default() };
        let rep = schrodinger_residual(&spec, &psi, TimeDerivative::Analytic(&d), &opts).unwrap();
        assert_eq!(rep.summary.excluded_nodes, 5);
    }
}

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::field::C64;
use crate::wave::grid::{Grid, WaveField};

/// Unitary kernel `Û` of a measurement `Ŷ = Û† diag(y) Û`.
#[derive(Debug, Clone)]
pub enum MeasurementOperator {
    PositionDelta,
    /// Momentum: unitary DFT along every axis.
    Fourier,
    /// Energy: unitary DFT over a uniformly sampled time series; see
    /// [`collapse_series`].
    TemporalFourier {
        dt: f64,
    },
    /// User matrix on the grid nodes with one outcome label per row.
    Matrix {
        u: DMatrix<C64>,
        outcomes: Vec<f64>,
    },
}

pub const UNITARITY_TOLERANCE: f64 = 1e-8;

/// Unitary DFT along each axis of node-major data (axis 0 slowest).
fn fft_axes(values: &mut [C64], counts: &[usize], inverse: bool) {
    let mut planner = FftPlanner::<f64>::new();
    let total: usize = counts.iter().product();
    for a in 0..counts.len() {
        let n = counts[a];
        let stride: usize = counts[a + 1..].iter().product();
        let fft = if inverse { planner.plan_fft_inverse(n) } else { planner.plan_fft_forward(n) };
        let scale = 1.0 / (n as f64).sqrt();
        let mut line = vec![C64::new(0.0, 0.0); n];
        for base in 0..total {
            if !(base / stride).is_multiple_of(n) {
                continue;
            }
            for (j, v) in line.iter_mut().enumerate() {
                *v = values[base + j * stride];
            }
            fft.process(&mut line);
            for (j, v) in line.iter().enumerate() {
                values[base + j * stride] = v * scale;
            }
        }
    }
}

/// `ħ·2π·m/(N h)` in FFT order.
fn momentum_axis(n: usize, h: f64, hbar: f64) -> Vec<f64> {
    (0..n)
        .map(|j| {
            let m = if j < n.div_ceil(2) { j as f64 } else { j as f64 - n as f64 };
            hbar * 2.0 * PI * m / (n as f64 * h)
        })
        .collect()
}

fn nearest_index(axis: &[f64], y: f64) -> Option<usize> {
    if axis.len() < 2 {
        return Some(0);
    }
    let lo = axis.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = axis.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let step = (hi - lo) / (axis.len() - 1) as f64;
    if y < lo - 0.5 * step || y > hi + 0.5 * step {
        return None;
    }
    axis.iter().enumerate().min_by(|a, b| (a.1 - y).abs().total_cmp(&(b.1 - y).abs())).map(|(i, _)| i)
}

impl MeasurementOperator {
    pub fn matrix(u: DMatrix<C64>, outcomes: Vec<f64>) -> Result<Self> {
        if !u.is_square() || u.nrows() != outcomes.len() {
            return Err(Error::InvalidArgument("measurement matrix must be square with one outcome per row".into()));
        }
        let dev = (u.adjoint() * &u - DMatrix::<C64>::identity(u.nrows(), u.nrows())).norm();
        if dev > UNITARITY_TOLERANCE {
            return Err(Error::NotUnitary(dev));
        }
        Ok(Self::Matrix { u, outcomes })
    }

    /// `Û ψ` on the node values.
    pub fn forward(&self, psi: &WaveField) -> Result<Vec<C64>> {
        self.apply(&psi.grid, psi.values.clone(), false)
    }

    /// `Û† φ`.
    pub fn backward(&self, grid: &Grid, values: Vec<C64>) -> Result<Vec<C64>> {
        self.apply(grid, values, true)
    }

    fn apply(&self, grid: &Grid, mut values: Vec<C64>, inverse: bool) -> Result<Vec<C64>> {
        match self {
            Self::PositionDelta => Ok(values),
            Self::Fourier => {
                if values.len() != grid.len() {
                    return Err(Error::GridMismatch("Fourier measurement needs a scalar field".into()));
                }
                fft_axes(&mut values, &grid.counts, inverse);
                Ok(values)
            }
            Self::TemporalFourier { .. } => Err(Error::InvalidArgument("temporal Fourier acts on a time series".into())),
            Self::Matrix { u, .. } => {
                if u.nrows() != values.len() {
                    return Err(Error::GridMismatch(format!("matrix of size {} on {} values", u.nrows(), values.len())));
                }
                let v = DVector::from_vec(values);
                let out = if inverse { u.adjoint() * v } else { u * v };
                Ok(out.iter().copied().collect())
            }
        }
    }

    /// Node index in the transformed representation nearest to `outcome`.
    pub fn outcome_index(&self, grid: &Grid, hbar: f64, outcome: &[f64]) -> Result<usize> {
        let out_of_range = || Error::OutcomeOutOfRange(outcome.to_vec());
        match self {
            Self::PositionDelta => grid.nearest(outcome).ok_or_else(out_of_range),
            Self::Fourier => {
                if outcome.len() != grid.dim() {
                    return Err(out_of_range());
                }
                let mut idx = Vec::with_capacity(grid.dim());
                for a in 0..grid.dim() {
                    let axis = momentum_axis(grid.counts[a], grid.spacing[a], hbar);
                    idx.push(nearest_index(&axis, outcome[a]).ok_or_else(out_of_range)?);
                }
                Ok(grid.flat_index(&idx))
            }
            Self::TemporalFourier { .. } => Err(Error::InvalidArgument("temporal Fourier acts on a time series".into())),
            Self::Matrix { outcomes, .. } => {
                let y = *outcome.first().ok_or_else(out_of_range)?;
                let (i, d) = outcomes.iter().enumerate().map(|(i, o)| (i, (o - y).abs())).min_by(|a, b| a.1.total_cmp(&b.1)).ok_or_else(out_of_range)?;
                let spread = outcomes.iter().copied().fold(0.0f64, |m, o| m.max(o.abs())).max(1.0);
                if d > 1e-9 * spread {
                    return Err(out_of_range());
                }
                Ok(i)
            }
        }
    }

    /// Max relative `| ‖Ûψ‖ − ‖ψ‖ |` in the discrete l² sense.
    pub fn norm_defect(&self, psi: &WaveField) -> Result<f64> {
        let l2 = |v: &[C64]| v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        let before = l2(&psi.values);
        let after = l2(&self.forward(psi)?);
        Ok((after - before).abs() / before.max(f64::MIN_POSITIVE))
    }
}

/// Lemma-2 collapse: transform, keep the component at `outcome` (with its
/// phase), transform back and renormalize.
pub fn collapse(psi: &WaveField, u: &MeasurementOperator, outcome: &[f64]) -> Result<WaveField> {
    let k = u.outcome_index(&psi.grid, psi.hbar, outcome)?;
    let y = u.forward(psi)?;
    let amp = y[k];
    let phase = if amp.norm() > 0.0 { amp / amp.norm() } else { C64::new(1.0, 0.0) };
    let mut one_hot = vec![C64::new(0.0, 0.0); y.len()];
    one_hot[k] = phase;
    let back = u.backward(&psi.grid, one_hot)?;
    let mut out = psi.clone();
    out.values = back;
    out.flagged = vec![false; psi.grid.len()];
    out.normalization = None;
    out.normalized()
}

/// Energy collapse on a series `ψ(x, t_0 + j dt)`: temporal DFT at every node,
/// keep the frequency bin nearest `E/ħ`, return the normalized spatial profile
/// at `t_0`.
pub fn collapse_series(series: &[WaveField], dt: f64, energy: f64) -> Result<WaveField> {
    let Some(first) = series.first() else {
        return Err(Error::InvalidArgument("empty series".into()));
    };
    for s in series {
        first.grid.check_same(&s.grid)?;
    }
    let n = series.len();
    let hbar = first.hbar;
    // e^{−iEt/ħ} sits at forward-DFT bin m with E = 2πħ m / (n dt)
    let energies = momentum_axis(n, dt, hbar);
    let bin = nearest_index(&energies, energy).ok_or_else(|| Error::OutcomeOutOfRange(vec![energy]))?;
    let mut planner = FftPlanner::<f64>::new();
    let fft = planner.plan_fft_inverse(n);
    let nodes = first.values.len();
    let mut out = first.zeros_like();
    let mut line = vec![C64::new(0.0, 0.0); n];
    for k in 0..nodes {
        for (j, s) in series.iter().enumerate() {
            line[j] = s.values[k];
        }
        fft.process(&mut line);
        out.values[k] = line[bin] / n as f64;
    }
    out.flagged = vec![false; first.grid.len()];
    out.normalized()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn plane(p: f64) -> WaveField {
        let g = Grid::spanning(&[0.0], &[2.0 * PI * 127.0 / 128.0], &[128]).unwrap();
        WaveField::from_fn(g, 0.0, 1.0, |x| C64::new(0.0, p * x[0]).exp())
    }

    #[test]
    fn position_collapse_is_one_hot() {
        let psi = plane(3.0);
        let out = collapse(&psi, &MeasurementOperator::PositionDelta, &[psi.grid.point(10)[0]]).unwrap();
        assert_eq!(out.values.iter().filter(|v| v.norm() > 0.0).count(), 1);
        assert!((out.norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn plane_wave_is_a_momentum_fixed_point() {
        let psi = plane(3.0);
        let y = MeasurementOperator::Fourier.forward(&psi).unwrap();
        let k = MeasurementOperator::Fourier.outcome_index(&psi.grid, 1.0, &[3.0]).unwrap();
        let total: f64 = y.iter().map(|v| v.norm_sqr()).sum();
        assert!((y[k].norm_sqr() / total - 1.0).abs() < 1e-12);
        let out = collapse(&psi, &MeasurementOperator::Fourier, &[3.0]).unwrap();
        let target = psi.normalized().unwrap();
        let diff: f64 = out.values.iter().zip(&target.values).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        assert!(diff < 1e-12);
        assert!(matches!(collapse(&psi, &MeasurementOperator::Fourier, &[1e6]), Err(Error::OutcomeOutOfRange(_))));
    }

    #[test]
    fn fourier_is_unitary_in_2d() {
        let g = Grid::spanning(&[0.0, 0.0], &[1.0, 1.0], &[12, 10]).unwrap();
        let psi = WaveField::from_fn(g.clone(), 0.0, 1.0, |x| C64::new(x[0].sin(), x[1] * x[0]));
        let u = MeasurementOperator::Fourier;
        assert!(u.norm_defect(&psi).unwrap() < 1e-12);
        let back = u.backward(&g, u.forward(&psi).unwrap()).unwrap();
        assert!(back.iter().zip(&psi.values).all(|(a, b)| (a - b).norm() < 1e-12));
    }

    #[test]
    fn non_unitary_matrix_is_rejected() {
        let m = DMatrix::from_element(2, 2, C64::new(1.0, 0.0));
        assert!(matches!(MeasurementOperator::matrix(m, vec![0.0, 1.0]), Err(Error::NotUnitary(_))));
    }
}

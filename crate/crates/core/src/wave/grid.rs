use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::C64;

/// Uniform rectangular grid; axis 0 varies slowest in the flat node order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub origin: Vec<f64>,
    pub spacing: Vec<f64>,
    pub counts: Vec<usize>,
}

impl Grid {
    pub fn new(origin: Vec<f64>, spacing: Vec<f64>, counts: Vec<usize>) -> Result<Self> {
        if origin.is_empty() || origin.len() != spacing.len() || origin.len() != counts.len() {
            return Err(Error::InvalidArgument("grid axes disagree in length".into()));
        }
        if spacing.iter().any(|h| !(*h > 0.0)) || counts.contains(&0) {
            return Err(Error::InvalidArgument("grid spacing and counts must be positive".into()));
        }
        Ok(Self { origin, spacing, counts })
    }

    /// `n` nodes per axis spanning `[lo, hi]` inclusive.
    pub fn spanning(lo: &[f64], hi: &[f64], n: &[usize]) -> Result<Self> {
        if n.iter().any(|&c| c < 2) {
            return Err(Error::InvalidArgument("need at least two nodes per axis".into()));
        }
        let spacing = lo.iter().zip(hi).zip(n).map(|((a, b), c)| (b - a) / (*c - 1) as f64).collect();
        Self::new(lo.to_vec(), spacing, n.to_vec())
    }

    pub fn line(lo: f64, hi: f64, n: usize) -> Result<Self> {
        Self::spanning(&[lo], &[hi], &[n])
    }

    pub fn dim(&self) -> usize {
        self.counts.len()
    }

    pub fn len(&self) -> usize {
        self.counts.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn upper(&self) -> Vec<f64> {
        (0..self.dim()).map(|a| self.origin[a] + (self.counts[a] - 1) as f64 * self.spacing[a]).collect()
    }

    pub fn extents(&self) -> Vec<(f64, f64)> {
        self.origin.iter().copied().zip(self.upper()).collect()
    }

    pub fn multi_index(&self, mut flat: usize) -> Vec<usize> {
        let mut idx = vec![0; self.dim()];
        for a in (0..self.dim()).rev() {
            idx[a] = flat % self.counts[a];
            flat /= self.counts[a];
        }
        idx
    }

    pub fn flat_index(&self, idx: &[usize]) -> usize {
        idx.iter().zip(&self.counts).fold(0, |acc, (i, c)| acc * c + i)
    }

    pub fn point(&self, flat: usize) -> Vec<f64> {
        self.multi_index(flat).iter().enumerate().map(|(a, &i)| self.origin[a] + i as f64 * self.spacing[a]).collect()
    }

    pub fn points(&self) -> Vec<Vec<f64>> {
        (0..self.len()).map(|k| self.point(k)).collect()
    }

    /// Nearest node, or `None` outside the grid by more than half a cell.
    pub fn nearest(&self, x: &[f64]) -> Option<usize> {
        if x.len() != self.dim() {
            return None;
        }
        let mut idx = Vec::with_capacity(self.dim());
        for a in 0..self.dim() {
            let s = ((x[a] - self.origin[a]) / self.spacing[a]).round();
            if !(s >= 0.0 && s <= (self.counts[a] - 1) as f64) {
                return None;
            }
            idx.push(s as usize);
        }
        Some(self.flat_index(&idx))
    }

    /// Nodes at least `margin` cells away from every face.
    pub fn is_interior(&self, flat: usize, margin: usize) -> bool {
        self.multi_index(flat).iter().zip(&self.counts).all(|(&i, &c)| i >= margin && i + margin < c)
    }

    /// Trapezoid-rule weight of a node.
    pub fn weight(&self, flat: usize) -> f64 {
        self.multi_index(flat)
            .iter()
            .enumerate()
            .map(|(a, &i)| {
                let edge = self.counts[a] > 1 && (i == 0 || i + 1 == self.counts[a]);
                if self.counts[a] == 1 {
                    1.0
                } else if edge {
                    0.5 * self.spacing[a]
                } else {
                    self.spacing[a]
                }
            })
            .product()
    }

    pub fn check_same(&self, other: &Grid) -> Result<()> {
        let close = |a: &[f64], b: &[f64]| a.iter().zip(b).all(|(u, v)| (u - v).abs() <= 1e-12 * u.abs().max(v.abs()).max(1.0));
        if self.counts != other.counts || !close(&self.origin, &other.origin) || !close(&self.spacing, &other.spacing) {
            return Err(Error::GridMismatch(format!("{:?} vs {:?}", self.counts, other.counts)));
        }
        Ok(())
    }

    /// Same extents with spacing divided by `factor` per axis.
    pub fn refined(&self, factor: usize) -> Self {
        Self {
            origin: self.origin.clone(),
            spacing: self.spacing.iter().map(|h| h / factor as f64).collect(),
            counts: self.counts.iter().map(|c| (c - 1) * factor + 1).collect(),
        }
    }
}

/// Complex amplitudes (scalar or spinor) on a [`Grid`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WaveField {
    pub grid: Grid,
    /// Node-major storage; `components` consecutive values per node.
    pub values: Vec<C64>,
    pub components: usize,
    pub time: f64,
    pub hbar: f64,
    /// Nodes skipped during assembly (branch points).
    pub flagged: Vec<bool>,
    /// Factor applied by an explicit normalization, if any.
    pub normalization: Option<f64>,
}

impl WaveField {
    pub fn new(grid: Grid, values: Vec<C64>, time: f64, hbar: f64) -> Result<Self> {
        Self::with_components(grid, values, 1, time, hbar)
    }

    pub fn with_components(grid: Grid, values: Vec<C64>, components: usize, time: f64, hbar: f64) -> Result<Self> {
        if values.len() != grid.len() * components {
            return Err(Error::GridMismatch(format!("{} values for {} nodes × {components}", values.len(), grid.len())));
        }
        let flagged = vec![false; grid.len()];
        Ok(Self { grid, values, components, time, hbar, flagged, normalization: None })
    }

    pub fn from_fn(grid: Grid, time: f64, hbar: f64, f: impl Fn(&[f64]) -> C64) -> Self {
        let values = (0..grid.len()).map(|k| f(&grid.point(k))).collect();
        Self::new(grid, values, time, hbar).expect("one value per node")
    }

    pub fn zeros_like(&self) -> Self {
        Self { values: vec![C64::new(0.0, 0.0); self.values.len()], normalization: None, ..self.clone() }
    }

    /// Scalar value at node `k` (first component).
    pub fn at(&self, k: usize) -> C64 {
        self.values[k * self.components]
    }

    pub fn node(&self, k: usize) -> &[C64] {
        &self.values[k * self.components..(k + 1) * self.components]
    }

    /// `|ψ|²` summed over components at each node.
    pub fn density(&self) -> Vec<f64> {
        (0..self.grid.len()).map(|k| self.node(k).iter().map(|v| v.norm_sqr()).sum()).collect()
    }

    /// Trapezoid `∫|ψ|²`.
    pub fn norm_sqr(&self) -> f64 {
        self.density().iter().enumerate().map(|(k, d)| self.grid.weight(k) * d).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// Trapezoid `⟨self, other⟩ = ∫ self† other`.
    pub fn inner(&self, other: &WaveField) -> Result<C64> {
        self.grid.check_same(&other.grid)?;
        if self.components != other.components {
            return Err(Error::GridMismatch("component count".into()));
        }
        let mut acc = C64::new(0.0, 0.0);
        for k in 0..self.grid.len() {
            let w = self.grid.weight(k);
            for (a, b) in self.node(k).iter().zip(other.node(k)) {
                acc += w * a.conj() * b;
            }
        }
        Ok(acc)
    }

    pub fn scaled(&self, s: C64) -> Self {
        Self { values: self.values.iter().map(|v| v * s).collect(), ..self.clone() }
    }

    /// Unit-norm copy with the applied factor recorded.
    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm();
        if !(n > 0.0) || !n.is_finite() {
            return Err(Error::InvalidArgument(format!("cannot normalize a field of norm {n}")));
        }
        let mut out = self.scaled(C64::new(1.0 / n, 0.0));
        out.normalization = Some(1.0 / n);
        Ok(out)
    }

    /// CSV `x1..xN,re_psi,im_psi,abs2` (component index appended for spinors).
    pub fn write_csv<W: Write>(&self, mut w: W, comment: Option<&str>) -> Result<()> {
        if let Some(c) = comment {
            writeln!(w, "# {c}")?;
        }
        let n = self.grid.dim();
        let mut header: Vec<String> = (1..=n).map(|i| format!("x{i}")).collect();
        if self.components == 1 {
            header.extend(["re_psi", "im_psi", "abs2"].map(String::from));
        } else {
            for c in 0..self.components {
                header.push(format!("re_psi{c}"));
                header.push(format!("im_psi{c}"));
            }
            header.push("abs2".into());
        }
        writeln!(w, "{}", header.join(","))?;
        let dens = self.density();
        for k in 0..self.grid.len() {
            let mut row: Vec<String> = self.grid.point(k).iter().map(|v| format!("{v:.12e}")).collect();
            for v in self.node(k) {
                row.push(format!("{:.17e}", v.re));
                row.push(format!("{:.17e}", v.im));
            }
            row.push(format!("{:.17e}", dens[k]));
            writeln!(w, "{}", row.join(","))?;
        }
        Ok(())
    }
}

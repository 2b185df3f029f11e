//! Crank–Nicolson evolution of `iħ ∂ψ/∂t = Ĥψ` on 1D/2D grids.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::C64;
use crate::hj::hamiltonian::HamiltonianSpec;
use crate::wave::grid::{Grid, WaveField};
use crate::wave::residual::hamiltonian_operator;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Boundary {
    HardWall,
    Periodic,
    /// Hard wall behind a complex-potential layer `−i W(x)`.
    Absorbing {
        width: f64,
        strength: f64,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CnConfig {
    pub dt: f64,
    pub boundary: Boundary,
    /// Relative residual target of the iterative solve.
    pub tolerance: f64,
    pub max_iterations: usize,
    /// Keep every n-th step (the final state is always kept).
    pub snapshot_every: usize,
}

impl Default for CnConfig {
    fn default() -> Self {
        Self { dt: 1e-3, boundary: Boundary::HardWall, tolerance: 1e-13, max_iterations: 5000, snapshot_every: 0 }
    }
}

/// Row-compressed complex matrix over the unknowns.
#[derive(Debug, Clone)]
struct Sparse {
    rows: Vec<Vec<(usize, C64)>>,
}

impl Sparse {
    fn mul(&self, v: &[C64]) -> Vec<C64> {
        self.rows.iter().map(|r| r.iter().map(|(j, a)| a * v[*j]).sum()).collect()
    }

    fn diagonal(&self) -> Vec<C64> {
        self.rows.iter().enumerate().map(|(i, r)| r.iter().find(|(j, _)| *j == i).map_or(C64::new(1.0, 0.0), |e| e.1)).collect()
    }

    fn is_tridiagonal(&self) -> bool {
        self.rows.iter().enumerate().all(|(i, r)| r.iter().all(|(j, _)| i.abs_diff(*j) <= 1))
    }
}

/// Stepper holding the discretized `I ± i dt Ĥ / 2ħ`.
pub struct CnPropagator {
    grid: Grid,
    hbar: f64,
    cfg: CnConfig,
    /// Grid node of each unknown.
    unknowns: Vec<usize>,
    lhs: Sparse,
    rhs: Sparse,
}

fn absorber(grid: &Grid, x: &[f64], width: f64, strength: f64) -> f64 {
    let mut w: f64 = 0.0;
    for (a, (lo, hi)) in grid.extents().into_iter().enumerate() {
        let d = (x[a] - lo).min(hi - x[a]);
        if d < width {
            let s = (width - d) / width;
            w = w.max(strength * s * s);
        }
    }
    w
}

impl CnPropagator {
    pub fn new(spec: &HamiltonianSpec, grid: &Grid, hbar: f64, cfg: &CnConfig, t: f64) -> Result<Self> {
        let n = grid.dim();
        if !(1..=2).contains(&n) || n != spec.dim() {
            return Err(Error::InvalidArgument("the Crank–Nicolson oracle supports 1D and 2D grids".into()));
        }
        if !(cfg.dt > 0.0) {
            return Err(Error::InvalidArgument("dt must be positive".into()));
        }
        let periodic = matches!(cfg.boundary, Boundary::Periodic);
        let unknowns: Vec<usize> = (0..grid.len()).filter(|&k| periodic || grid.is_interior(k, 1)).collect();
        let mut position = vec![usize::MAX; grid.len()];
        for (i, &k) in unknowns.iter().enumerate() {
            position[k] = i;
        }
        let offsets: Vec<Vec<i64>> = if n == 1 { vec![vec![-1], vec![0], vec![1]] } else { (-1..=1).flat_map(|a| (-1..=1).map(move |b| vec![a, b])).collect() };
        let h = grid.spacing.clone();
        let factor = C64::new(0.0, 0.5 * cfg.dt / hbar);
        let mut lhs = Vec::with_capacity(unknowns.len());
        let mut rhs = Vec::with_capacity(unknowns.len());
        for (i, &k) in unknowns.iter().enumerate() {
            let x = grid.point(k);
            let idx = grid.multi_index(k);
            let mut row_l = Vec::new();
            let mut row_r = Vec::new();
            for o in &offsets {
                let indicator = |y: &[f64]| -> C64 {
                    let hit = (0..n).all(|a| ((y[a] - x[a]) / h[a]).round() as i64 == o[a]);
                    C64::from(if hit { 1.0 } else { 0.0 })
                };
                let mut entry = hamiltonian_operator(spec, &indicator, &x, t, &h)?;
                if o.iter().all(|&d| d == 0) {
                    if let Boundary::Absorbing { width, strength } = cfg.boundary {
                        entry -= C64::new(0.0, absorber(grid, &x, width, strength));
                    }
                }
                if entry.norm() == 0.0 {
                    continue;
                }
                let mut target = Vec::with_capacity(n);
                let mut outside = false;
                for a in 0..n {
                    let c = grid.counts[a] as i64;
                    let mut j = idx[a] as i64 + o[a];
                    if periodic {
                        j = j.rem_euclid(c);
                    } else if j < 0 || j >= c {
                        outside = true;
                    }
                    target.push(j as usize);
                }
                if outside {
                    continue;
                }
                let col = position[grid.flat_index(&target)];
                if col == usize::MAX {
                    continue;
                }
                let id = if col == i { 1.0 } else { 0.0 };
                row_l.push((col, id + factor * entry));
                row_r.push((col, id - factor * entry));
            }
            lhs.push(row_l);
            rhs.push(row_r);
        }
        Ok(Self { grid: grid.clone(), hbar, cfg: cfg.clone(), unknowns, lhs: Sparse { rows: lhs }, rhs: Sparse { rows: rhs } })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    /// Advance node values by one step in place.
    pub fn step(&self, values: &mut [C64]) -> Result<()> {
        let u: Vec<C64> = self.unknowns.iter().map(|&k| values[k]).collect();
        let b = self.rhs.mul(&u);
        let x = if self.lhs.is_tridiagonal() { thomas(&self.lhs, &b)? } else { self.bicgstab(&b, &u)? };
        values.iter_mut().for_each(|v| *v = C64::new(0.0, 0.0));
        for (i, &k) in self.unknowns.iter().enumerate() {
            values[k] = x[i];
        }
        Ok(())
    }

    fn bicgstab(&self, b: &[C64], guess: &[C64]) -> Result<Vec<C64>> {
        let a = &self.lhs;
        let diag = a.diagonal();
        let precond = |v: &[C64]| -> Vec<C64> { v.iter().zip(&diag).map(|(x, d)| x / d).collect() };
        let dot = |u: &[C64], v: &[C64]| -> C64 { u.iter().zip(v).map(|(a, b)| a.conj() * b).sum() };
        let norm = |u: &[C64]| dot(u, u).re.sqrt();
        let bnorm = norm(b).max(f64::MIN_POSITIVE);
        let mut x = guess.to_vec();
        let ax = a.mul(&x);
        let mut r: Vec<C64> = b.iter().zip(&ax).map(|(b, a)| b - a).collect();
        let r0 = r.clone();
        let (mut rho, mut alpha, mut omega) = (C64::new(1.0, 0.0), C64::new(1.0, 0.0), C64::new(1.0, 0.0));
        let n = b.len();
        let mut v = vec![C64::new(0.0, 0.0); n];
        let mut p = vec![C64::new(0.0, 0.0); n];
        let mut res = norm(&r) / bnorm;
        for it in 0..self.cfg.max_iterations {
            if res <= self.cfg.tolerance {
                return Ok(x);
            }
            let rho_new = dot(&r0, &r);
            if rho_new.norm() == 0.0 {
                return Err(Error::SolverDivergence { residual: res, iterations: it });
            }
            let beta = (rho_new / rho) * (alpha / omega);
            for i in 0..n {
                p[i] = r[i] + beta * (p[i] - omega * v[i]);
            }
            let phat = precond(&p);
            v = a.mul(&phat);
            alpha = rho_new / dot(&r0, &v);
            let s: Vec<C64> = (0..n).map(|i| r[i] - alpha * v[i]).collect();
            let shat = precond(&s);
            let t = a.mul(&shat);
            let tt = dot(&t, &t);
            omega = if tt.norm() > 0.0 { dot(&t, &s) / tt } else { C64::new(0.0, 0.0) };
            for i in 0..n {
                x[i] += alpha * phat[i] + omega * shat[i];
                r[i] = s[i] - omega * t[i];
            }
            rho = rho_new;
            res = norm(&r) / bnorm;
            if !res.is_finite() {
                break;
            }
        }
        if res <= self.cfg.tolerance {
            return Ok(x);
        }
        Err(Error::SolverDivergence { residual: res, iterations: self.cfg.max_iterations })
    }
}

/// Tridiagonal solve; rows hold entries at columns `i − 1, i, i + 1`.
fn thomas(a: &Sparse, d: &[C64]) -> Result<Vec<C64>> {
    let n = d.len();
    let get = |i: usize, j: usize| a.rows[i].iter().find(|(c, _)| *c == j).map_or(C64::new(0.0, 0.0), |e| e.1);
    let mut c_star = vec![C64::new(0.0, 0.0); n];
    let mut d_star = vec![C64::new(0.0, 0.0); n];
    for i in 0..n {
        let lower = if i > 0 { get(i, i - 1) } else { C64::new(0.0, 0.0) };
        let upper = if i + 1 < n { get(i, i + 1) } else { C64::new(0.0, 0.0) };
        let denom = get(i, i) - lower * if i > 0 { c_star[i - 1] } else { C64::new(0.0, 0.0) };
        if denom.norm() == 0.0 {
            return Err(Error::SolverDivergence { residual: f64::INFINITY, iterations: i });
        }
        c_star[i] = upper / denom;
        d_star[i] = (d[i] - lower * if i > 0 { d_star[i - 1] } else { C64::new(0.0, 0.0) }) / denom;
    }
    let mut x = d_star;
    for i in (0..n.saturating_sub(1)).rev() {
        let next = x[i + 1];
        x[i] -= c_star[i] * next;
    }
    Ok(x)
}

/// Snapshots of a Crank–Nicolson run.
#[derive(Debug, Clone)]
pub struct CnSeries {
    pub snapshots: Vec<WaveField>,
    pub steps: usize,
    pub dt: f64,
}

impl CnSeries {
    pub fn last(&self) -> &WaveField {
        self.snapshots.last().expect("series has the initial state")
    }
}

/// Evolve `psi0` to `psi0.time + duration`; `dt` is shrunk so the step count is integral.
pub fn cn_evolve(spec: &HamiltonianSpec, psi0: &WaveField, cfg: &CnConfig, duration: f64) -> Result<CnSeries> {
    if psi0.components != 1 {
        return Err(Error::InvalidArgument("scalar fields only".into()));
    }
    let steps = (duration / cfg.dt).round().max(1.0) as usize;
    let dt = duration / steps as f64;
    let cfg = CnConfig { dt, ..cfg.clone() };
    let prop = CnPropagator::new(spec, &psi0.grid, psi0.hbar, &cfg, psi0.time)?;
    let mut state = psi0.clone();
    state.flagged = vec![false; psi0.grid.len()];
    if !matches!(cfg.boundary, Boundary::Periodic) {
        for k in (0..state.grid.len()).filter(|&k| !state.grid.is_interior(k, 1)) {
            state.values[k] = C64::new(0.0, 0.0);
        }
    }
    let mut snapshots = vec![state.clone()];
    for s in 1..=steps {
        prop.step(&mut state.values)?;
        state.time = psi0.time + s as f64 * dt;
        if (cfg.snapshot_every > 0 && s % cfg.snapshot_every == 0) || s == steps {
            snapshots.push(state.clone());
        }
    }
    Ok(CnSeries { snapshots, steps, dt })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::real;

    #[test]
    fn box_eigenstate_is_stationary() {
        let l = 1.0;
        let g = Grid::line(0.0, l, 201).unwrap();
        let psi = WaveField::from_fn(g, 0.0, 1.0, |x| C64::from((std::f64::consts::PI * x[0] / l).sin()));
        let spec = HamiltonianSpec::new(1);
        let out = cn_evolve(&spec, &psi, &CnConfig { dt: 1e-3, ..Default::default() }, 0.5).unwrap();
        let overlap = psi.inner(out.last()).unwrap().norm() / psi.norm_sqr();
        assert!(overlap > 1.0 - 1e-8, "{overlap}");
    }

    #[test]
    fn two_dimensional_solve_preserves_norm() {
        let g = Grid::spanning(&[-4.0, -4.0], &[4.0, 4.0], &[41, 41]).unwrap();
        let psi = WaveField::from_fn(g, 0.0, 1.0, |x| C64::new(0.0, x[0]).exp() * (-(x[0] * x[0] + x[1] * x[1])).exp());
        let spec = HamiltonianSpec::new(2).with_potential(real(|x, _| 0.5 * (x[0] * x[0] + x[1] * x[1])));
        let out = cn_evolve(&spec, &psi, &CnConfig { dt: 1e-2, ..Default::default() }, 0.2).unwrap();
        let drift = (out.last().norm() - psi.norm()).abs() / psi.norm();
        assert!(drift < 1e-11, "{drift}");
    }

    #[test]
    fn absorber_loses_norm() {
        let g = Grid::line(-10.0, 10.0, 401).unwrap();
        let psi = WaveField::from_fn(g, 0.0, 1.0, |x| C64::new(0.0, 5.0 * x[0]).exp() * (-(x[0] - 5.0).powi(2)).exp());
        let spec = HamiltonianSpec::new(1);
        let cfg = CnConfig { dt: 5e-3, boundary: Boundary::Absorbing { width: 3.0, strength: 5.0 }, ..Default::default() };
        let out = cn_evolve(&spec, &psi, &cfg, 1.5).unwrap();
        assert!(out.last().norm() < 0.5 * psi.norm());
    }
}

use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::{ScalarField, C64};
use crate::hj::branch::ActionBranch;
use crate::wave::grid::{Grid, WaveField};

/// Indicator of the region where a branch exists.
pub type Domain = Arc<dyn Fn(&[f64], f64) -> bool + Send + Sync>;

/// One term `ψ_j = w √ρ_j e^{iφ_j/ħ}`.
#[derive(Clone)]
pub struct BranchTerm {
    pub branch: ActionBranch,
    pub sqrt_rho: ScalarField,
    pub dsqrt_rho_dt: Option<ScalarField>,
    /// Ensemble / family weight.
    pub weight: C64,
    pub domain: Option<Domain>,
}

impl std::fmt::Debug for BranchTerm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("BranchTerm").field("branch", &self.branch).field("weight", &self.weight).finish()
    }
}

impl BranchTerm {
    pub fn new(branch: ActionBranch, sqrt_rho: ScalarField) -> Self {
        Self { branch, sqrt_rho, dsqrt_rho_dt: None, weight: C64::new(1.0, 0.0), domain: None }
    }

    pub fn with_weight(mut self, w: C64) -> Self {
        self.weight = w;
        self
    }

    pub fn with_domain(mut self, d: Domain) -> Self {
        self.domain = Some(d);
        self
    }

    pub fn with_density_rate(mut self, d: ScalarField) -> Self {
        self.dsqrt_rho_dt = Some(d);
        self
    }

    pub fn contains(&self, x: &[f64], t: f64) -> bool {
        self.domain.as_ref().is_none_or(|d| d(x, t))
    }

    pub fn sqrt_rho(&self, x: &[f64], t: f64) -> C64 {
        (self.sqrt_rho)(x, t)
    }

    /// `w √ρ e^{iφ/ħ}`, zero outside the domain.
    pub fn value(&self, x: &[f64], t: f64, hbar: f64) -> C64 {
        if !self.contains(x, t) {
            return C64::new(0.0, 0.0);
        }
        self.weight * self.sqrt_rho(x, t) * (C64::i() * self.branch.phi(x, t) / hbar).exp()
    }

    /// `∂ψ_j/∂t` from the branch data.
    pub fn time_derivative(&self, x: &[f64], t: f64, hbar: f64) -> C64 {
        if !self.contains(x, t) {
            return C64::new(0.0, 0.0);
        }
        let dr = match &self.dsqrt_rho_dt {
            Some(d) => d(x, t),
            None => crate::field::time_derivative(&|s| self.sqrt_rho(x, s), t, 1e-4),
        };
        let e = (C64::i() * self.branch.phi(x, t) / hbar).exp();
        self.weight * (dr + self.sqrt_rho(x, t) * C64::i() / hbar * self.branch.dphi_dt(x, t)) * e
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct AssembleOptions {
    /// Rescale to unit L² norm (recorded in the output).
    pub normalize: bool,
    /// Flag nodes closer than this to a declared branch point.
    pub exclusion_radius: f64,
}

/// `ψ(x) = Σ_j √ρ_j(x,t) e^{iφ_j(x,t)/ħ}` on every node.
pub fn assemble_wave(terms: &[BranchTerm], grid: &Grid, t: f64, hbar: f64, opts: AssembleOptions) -> Result<WaveField> {
    if terms.is_empty() {
        return Err(Error::EmptyBranchSet);
    }
    if let Some(term) = terms.iter().find(|b| b.branch.dim != grid.dim()) {
        return Err(Error::DomainMismatch(format!("branch {} has dimension {}, grid {}", term.branch.label, term.branch.dim, grid.dim())));
    }
    let nodes: Vec<(C64, bool)> = (0..grid.len())
        .into_par_iter()
        .map(|k| {
            let x = grid.point(k);
            let mut acc = C64::new(0.0, 0.0);
            for term in terms {
                if opts.exclusion_radius > 0.0 && term.branch.distance_to_branch_points(&x) < opts.exclusion_radius {
                    return (C64::new(0.0, 0.0), true);
                }
                let v = term.value(&x, t, hbar);
                if !(v.re.is_finite() && v.im.is_finite()) {
                    return (C64::new(0.0, 0.0), true);
                }
                acc += v;
            }
            (acc, false)
        })
        .collect();
    let mut psi = WaveField::new(grid.clone(), nodes.iter().map(|n| n.0).collect(), t, hbar)?;
    psi.flagged = nodes.iter().map(|n| n.1).collect();
    if opts.normalize {
        psi = psi.normalized()?;
    }
    Ok(psi)
}

/// Reference for `ρ_oj, φ_oj` in [`feynman_kernel`].
#[derive(Debug, Clone, PartialEq)]
pub enum KernelReference {
    /// The branch emanates from a point source: `√ρ_j` already carries the
    /// delta normalization and `φ_oj = 0`.
    PointSource,
    /// Ratio against the branch itself at `(x_o, t_o)`.
    Slice { x_o: Vec<f64>, t_o: f64 },
}

/// `K_j = √(ρ_j/ρ_oj) e^{i(φ_j − φ_oj)/ħ}`; `ψ(x,t) = Σ_j K_j ψ_oj`.
pub fn feynman_kernel(term: &BranchTerm, x: &[f64], t: f64, hbar: f64, reference: &KernelReference) -> Result<C64> {
    let here = term.sqrt_rho(x, t) * (C64::i() * term.branch.phi(x, t) / hbar).exp();
    match reference {
        KernelReference::PointSource => Ok(here),
        KernelReference::Slice { x_o, t_o } => {
            let r0 = term.sqrt_rho(x_o, *t_o);
            if r0.norm() == 0.0 || !r0.norm().is_finite() {
                return Err(Error::ZeroInitialDensity);
            }
            Ok(here / (r0 * (C64::i() * term.branch.phi(x_o, *t_o) / hbar).exp()))
        }
    }
}

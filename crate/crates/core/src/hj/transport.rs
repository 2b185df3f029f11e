//! Density transport `√ρ = √ρ₀ exp(−½∫Δ_M φ dθ)` along a characteristic.

use crate::error::{Error, Result};
use crate::field::C64;
use crate::hj::branch::ActionBranch;
use crate::hj::hamiltonian::HamiltonianSpec;
use crate::hj::operators::{branch_laplacian, StencilOptions};
use crate::hj::trajectory::{EventKind, PathTrajectory, TrajectoryEvent};

/// What to do when the quadrature meets a pole of `Δ_M φ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CausticPolicy {
    Error,
    /// Continue through the pole with the `t − i0` prescription, which adds
    /// `iπ·residue` to the integral.
    Continue,
}

#[derive(Debug, Clone, Copy)]
pub struct TransportOptions<'a> {
    pub stencil: StencilOptions<'a>,
    pub policy: CausticPolicy,
    /// `|Δ_M φ|` above this at a quadrature node is treated as divergent.
    pub cap: f64,
    /// An interval is a pole candidate when `Re Δ_M φ` flips sign and
    /// `min |Δ_M φ| · Δt` at its ends exceeds this ratio.
    pub pole_ratio: f64,
}

impl Default for TransportOptions<'_> {
    fn default() -> Self {
        Self { stencil: StencilOptions::default(), policy: CausticPolicy::Error, cap: 1e8, pole_ratio: 0.25 }
    }
}

const GL_NODES: [f64; 3] = [-0.774_596_669_241_483_4, 0.0, 0.774_596_669_241_483_4];
const GL_WEIGHTS: [f64; 3] = [5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0];

/// Cubic Hermite interpolation of the sampled path using `ẋ` at both ends.
struct PathInterp<'a> {
    traj: &'a PathTrajectory,
    velocities: Vec<Vec<f64>>,
}

impl<'a> PathInterp<'a> {
    fn new(spec: &HamiltonianSpec, traj: &'a PathTrajectory) -> Result<Self> {
        let velocities = traj.samples.iter().map(|s| spec.velocity(&s.x, &s.p, s.t)).collect::<Result<Vec<_>>>()?;
        Ok(Self { traj, velocities })
    }

    fn on_interval(&self, k: usize, theta: f64) -> Vec<f64> {
        let (a, b) = (&self.traj.samples[k], &self.traj.samples[k + 1]);
        let tau = b.t - a.t;
        let s = (theta - a.t) / tau;
        let (s2, s3) = (s * s, s * s * s);
        let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
        let h10 = s3 - 2.0 * s2 + s;
        let h01 = -2.0 * s3 + 3.0 * s2;
        let h11 = s3 - s2;
        (0..a.x.len()).map(|i| h00 * a.x[i] + h10 * tau * self.velocities[k][i] + h01 * b.x[i] + h11 * tau * self.velocities[k + 1][i]).collect()
    }
}

struct Integrand<'a> {
    spec: &'a HamiltonianSpec,
    branch: &'a ActionBranch,
    path: PathInterp<'a>,
    stencil: StencilOptions<'a>,
    tol: f64,
}

impl<'a> Integrand<'a> {
    fn new(spec: &'a HamiltonianSpec, branch: &'a ActionBranch, traj: &'a PathTrajectory, opts: TransportOptions<'a>) -> Result<Self> {
        // stencil Laplacians carry rounding noise of order ε/h²
        let tol = if branch.has_analytic_laplacian() { 1e-13 } else { (1e-15 / (opts.stencil.h * opts.stencil.h)).max(1e-13) };
        Ok(Self { spec, branch, path: PathInterp::new(spec, traj)?, stencil: opts.stencil, tol })
    }

    fn at(&self, k: usize, theta: f64) -> Result<C64> {
        let x = self.path.on_interval(k, theta);
        branch_laplacian(self.spec, self.branch, &x, theta, self.stencil)
    }

    fn gauss_once(&self, k: usize, a: f64, b: f64, skip: &dyn Fn(f64) -> C64) -> Result<C64> {
        let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
        let mut acc = C64::new(0.0, 0.0);
        for (node, weight) in GL_NODES.iter().zip(GL_WEIGHTS) {
            let theta = mid + half * node;
            acc += weight * half * (self.at(k, theta)? - skip(theta));
        }
        Ok(acc)
    }

    /// Adaptive three-point Gauss–Legendre by interval halving.
    fn gauss(&self, k: usize, a: f64, b: f64, skip: &dyn Fn(f64) -> C64) -> Result<C64> {
        let whole = self.gauss_once(k, a, b, skip)?;
        self.refine(k, a, b, whole, skip, 0)
    }

    fn refine(&self, k: usize, a: f64, b: f64, whole: C64, skip: &dyn Fn(f64) -> C64, depth: usize) -> Result<C64> {
        let m = 0.5 * (a + b);
        let left = self.gauss_once(k, a, m, skip)?;
        let right = self.gauss_once(k, m, b, skip)?;
        let split = left + right;
        if depth >= 10 || (split - whole).norm() <= self.tol * split.norm().max(1.0) {
            return Ok(split);
        }
        Ok(self.refine(k, a, m, left, skip, depth + 1)? + self.refine(k, m, b, right, skip, depth + 1)?)
    }

    /// Adaptive Simpson, used as the independent rule in consistency checks.
    fn simpson(&self, k: usize, a: f64, b: f64) -> Result<C64> {
        let (fa, fm, fb) = (self.at(k, a)?, self.at(k, 0.5 * (a + b))?, self.at(k, b)?);
        self.simpson_step(k, a, b, fa, fm, fb, 0)
    }

    #[allow(clippy::too_many_arguments)]
    fn simpson_step(&self, k: usize, a: f64, b: f64, fa: C64, fm: C64, fb: C64, depth: usize) -> Result<C64> {
        let m = 0.5 * (a + b);
        let (flm, frm) = (self.at(k, 0.5 * (a + m))?, self.at(k, 0.5 * (m + b))?);
        let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let split = left + right;
        if depth >= 12 || (split - whole).norm() <= 10.0 * self.tol * split.norm().max(1e-3) {
            return Ok(split + (split - whole) / 15.0);
        }
        Ok(self.simpson_step(k, a, m, fa, flm, fm, depth + 1)? + self.simpson_step(k, m, b, fm, frm, fb, depth + 1)?)
    }

    /// `∫_a^b Δ_M φ dθ` across a simple pole: principal value plus `iπ r`.
    fn across_pole(&self, k: usize, a: f64, b: f64) -> Result<(C64, f64)> {
        let g = |theta: f64| -> Result<f64> { Ok(1.0 / self.at(k, theta)?).map(|v: C64| v.re) };
        let (mut lo, mut hi) = (a, b);
        let g_lo = g(lo)?;
        while hi - lo > 1e-15 * b.abs().max(1.0) {
            let mid = 0.5 * (lo + hi);
            if g(mid)?.signum() == g_lo.signum() {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let tc = 0.5 * (lo + hi);
        let d = 0.05 * (b - a);
        let inv = |theta: f64| -> Result<C64> { Ok(1.0 / self.at(k, theta)?) };
        let slope = (inv(tc - 2.0 * d)? - 8.0 * inv(tc - d)? + 8.0 * inv(tc + d)? - inv(tc + 2.0 * d)?) / (12.0 * d);
        let r = 1.0 / slope;
        let pole = |theta: f64| r / (theta - tc);
        let mut total = C64::new(0.0, 0.0);
        if tc - a > 1e-13 {
            total += self.gauss(k, a, tc, &pole)?;
        }
        if b - tc > 1e-13 {
            total += self.gauss(k, tc, b, &pole)?;
        }
        let log_ratio = ((b - tc).max(1e-300) / (tc - a).max(1e-300)).ln();
        total += r * log_ratio + C64::new(0.0, std::f64::consts::PI) * r;
        Ok((total, tc))
    }
}

/// Fill `sqrt_rho` along the trajectory from the principal root of `rho_0`.
///
/// The integral is accumulated interval by interval with three-point
/// Gauss–Legendre quadrature on the Hermite-interpolated path; the stored
/// amplitude is the exponential of the running integral, so the root branch is
/// continuous in `t` by construction.
pub fn transport_density(
    spec: &HamiltonianSpec,
    branch: &ActionBranch,
    traj: &PathTrajectory,
    rho_0: C64,
    opts: TransportOptions<'_>,
) -> Result<PathTrajectory> {
    if traj.samples.is_empty() {
        return Err(Error::InvalidArgument("empty trajectory".into()));
    }
    let integrand = Integrand::new(spec, branch, traj, opts)?;
    let root0 = rho_0.sqrt();
    let mut out = traj.clone();
    let mut integral = C64::new(0.0, 0.0);
    out.samples[0].sqrt_rho = root0;
    let n = traj.samples.len();
    let mut ends: Vec<Option<C64>> = vec![None; n];
    let mut caustics = Vec::new();
    for k in 0..n - 1 {
        let (a, b) = (traj.samples[k].t, traj.samples[k + 1].t);
        if b - a > 0.0 {
            let fa = match ends[k] {
                Some(v) => v,
                None => integrand.at(k, a)?,
            };
            let fb = integrand.at(k, b)?;
            ends[k + 1] = Some(fb);
            let flip = fa.re * fb.re < 0.0;
            let big = fa.norm().min(fb.norm()) * (b - a) > opts.pole_ratio;
            if flip && big {
                match opts.policy {
                    CausticPolicy::Error => return Err(Error::CausticCrossing { t: 0.5 * (a + b), magnitude: fa.norm().max(fb.norm()) }),
                    CausticPolicy::Continue => {
                        let (piece, tc) = integrand.across_pole(k, a, b)?;
                        integral += piece;
                        caustics.push((tc, k + 1));
                    }
                }
            } else {
                let piece = integrand.gauss(k, a, b, &|_| C64::new(0.0, 0.0))?;
                let magnitude = fa.norm().max(fb.norm()).max(piece.norm() / (b - a));
                if !(magnitude <= opts.cap) {
                    return Err(Error::CausticCrossing { t: 0.5 * (a + b), magnitude });
                }
                integral += piece;
            }
        } else {
            ends[k + 1] = ends[k];
        }
        out.samples[k + 1].sqrt_rho = root0 * (-0.5 * integral).exp();
    }
    for (tc, sample) in caustics {
        out.events.push(TrajectoryEvent { t: tc, sample, constraint: None, kind: EventKind::Caustic, impulse: 0.0 });
    }
    out.events.sort_by(|a, b| a.t.total_cmp(&b.t));
    Ok(out)
}

/// Max relative deviation of the stored amplitudes from an independent
/// composite-Simpson recomputation of the transport integral.
pub fn density_consistency(spec: &HamiltonianSpec, branch: &ActionBranch, traj: &PathTrajectory, opts: TransportOptions<'_>) -> Result<f64> {
    let integrand = Integrand::new(spec, branch, traj, opts)?;
    let root0 = traj.samples[0].sqrt_rho;
    let mut integral = C64::new(0.0, 0.0);
    let mut worst: f64 = 0.0;
    let caustic_samples: Vec<usize> = traj.events.iter().filter(|e| e.kind == EventKind::Caustic).map(|e| e.sample).collect();
    for k in 0..traj.samples.len() - 1 {
        let (a, b) = (traj.samples[k].t, traj.samples[k + 1].t);
        if b > a {
            if caustic_samples.contains(&(k + 1)) {
                integral += integrand.across_pole(k, a, b)?.0;
            } else {
                integral += integrand.simpson(k, a, b)?;
            }
        }
        let expect = root0 * (-0.5 * integral).exp();
        let stored = traj.samples[k + 1].sqrt_rho;
        worst = worst.max((stored - expect).norm() / expect.norm().max(f64::MIN_POSITIVE));
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{scalar, C64};
    use crate::hj::branch::InitialCondition;
    use crate::hj::constraints::ConstraintSet;
    use crate::hj::trajectory::{integrate_characteristic, BranchStart, StepControl};

    #[test]
    fn zero_laplacian_keeps_unit_density() {
        let spec = HamiltonianSpec::new(1);
        let branch = ActionBranch::new(0, "plane", 1, InitialCondition::Momentum(vec![1.0]), scalar(|x, t| C64::from(x[0] - 0.5 * t)))
            .with_laplacian(scalar(|_, _| C64::new(0.0, 0.0)));
        let traj =
            integrate_characteristic(&spec, &ConstraintSet::new(), &BranchStart::new(vec![0.0], vec![1.0]), 2.0, StepControl { dt: 0.1, ..Default::default() })
                .unwrap();
        let out = transport_density(&spec, &branch, &traj, C64::new(1.0, 0.0), TransportOptions::default()).unwrap();
        assert!(out.samples.iter().all(|s| (s.sqrt_rho - 1.0).norm() < 1e-15));
    }

    #[test]
    fn spherical_spreading_gives_inverse_square() {
        let spec = HamiltonianSpec::new(3);
        let po = 2.0;
        let branch = ActionBranch::new(
            0,
            "cone",
            3,
            InitialCondition::Position(vec![0.0; 3]),
            scalar(move |x, t| {
                let r = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
                C64::from(po * r - 0.5 * po * po * t)
            }),
        );
        let r0 = 1.0;
        let dir = [0.6, 0.0, 0.8];
        let start = BranchStart::new(dir.iter().map(|d| d * r0).collect(), dir.iter().map(|d| d * po).collect());
        let traj = integrate_characteristic(&spec, &ConstraintSet::new(), &start, 2.0, StepControl { dt: 0.01, ..Default::default() }).unwrap();
        let out = transport_density(&spec, &branch, &traj, C64::new(1.0, 0.0), TransportOptions::default()).unwrap();
        for s in &out.samples {
            let r = s.x.iter().map(|v| v * v).sum::<f64>().sqrt();
            let rho = s.sqrt_rho.norm_sqr();
            assert!((rho - (r0 / r).powi(2)).abs() < 1e-6, "r = {r}, rho = {rho}");
        }
        assert!(density_consistency(&spec, &branch, &out, TransportOptions::default()).unwrap() < 1e-10);
    }

    fn oscillator_branch(omega: f64) -> ActionBranch {
        ActionBranch::new(0, "osc", 1, InitialCondition::Position(vec![0.0]), scalar(move |x, t| C64::from(0.5 * omega * x[0] * x[0] / (omega * t).tan())))
            .with_laplacian(scalar(move |_, t| C64::from(omega / (omega * t).tan())))
    }

    #[test]
    fn oscillator_caustic_rotates_root_by_minus_i() {
        let omega = 1.0;
        let spec = HamiltonianSpec::new(1).with_potential(crate::field::real(move |x, _| 0.5 * omega * omega * x[0] * x[0]));
        let branch = oscillator_branch(omega);
        let t0: f64 = 0.5;
        let start = BranchStart::new(vec![t0.sin()], vec![t0.cos()]).at_time(t0);
        let traj = integrate_characteristic(&spec, &ConstraintSet::new(), &start, 5.0, StepControl { dt: 1e-2, ..Default::default() }).unwrap();
        let rho0 = C64::new(0.0, -1.0) / (2.0 * std::f64::consts::PI * t0.sin());
        assert!(matches!(transport_density(&spec, &branch, &traj, rho0, TransportOptions::default()), Err(Error::CausticCrossing { .. })));
        let opts = TransportOptions { policy: CausticPolicy::Continue, ..Default::default() };
        let out = transport_density(&spec, &branch, &traj, rho0, opts).unwrap();
        assert_eq!(out.events.iter().filter(|e| e.kind == EventKind::Caustic).count(), 1);
        for s in &out.samples {
            // principal root of ω/(2πi sin ωt), continued across ωt = π by e^{−iπ/2}
            let base = (C64::new(0.0, -1.0) / (2.0 * std::f64::consts::PI * (omega * s.t).sin().abs())).sqrt();
            let expect = if omega * s.t < std::f64::consts::PI { base } else { base * C64::new(0.0, -1.0) };
            assert!((s.sqrt_rho - expect).norm() < 1e-8 * expect.norm(), "t = {}: {} vs {}", s.t, s.sqrt_rho, expect);
        }
        assert!(density_consistency(&spec, &branch, &out, opts).unwrap() < 1e-8);
    }
}

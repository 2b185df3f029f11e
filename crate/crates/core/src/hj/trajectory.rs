use std::io::Write;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::C64;
use crate::hj::constraints::{CollisionMode, ConstraintSet};
use crate::hj::hamiltonian::HamiltonianSpec;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectorySample {
    pub t: f64,
    pub x: Vec<f64>,
    pub p: Vec<f64>,
    pub phi: C64,
    pub sqrt_rho: C64,
    /// Constraint index when this sample is the post-event state.
    pub event: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EventKind {
    ElasticReflection,
    PlasticStop,
    Caustic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryEvent {
    pub t: f64,
    pub sample: usize,
    pub constraint: Option<usize>,
    pub kind: EventKind,
    /// Reflection impulse `λ_g` along `∇f_g`.
    pub impulse: f64,
}

/// A sampled characteristic `(t, x, p, φ, √ρ)` with its events.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathTrajectory {
    pub branch_id: usize,
    pub samples: Vec<TrajectorySample>,
    pub events: Vec<TrajectoryEvent>,
    pub terminated: bool,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct StepControl {
    pub dt: f64,
    pub max_reflections: usize,
    /// Bisection tolerance on event times.
    pub event_tol: f64,
}

impl Default for StepControl {
    fn default() -> Self {
        Self { dt: 1e-3, max_reflections: 10_000, event_tol: 1e-12 }
    }
}

/// Starting state of a characteristic; for position-only branches the caller
/// supplies the shooting momentum.
#[derive(Debug, Clone, PartialEq)]
pub struct BranchStart {
    pub branch_id: usize,
    pub t0: f64,
    pub x0: Vec<f64>,
    pub p0: Vec<f64>,
    pub phi0: C64,
    pub sqrt_rho0: C64,
}

impl BranchStart {
    pub fn new(x0: Vec<f64>, p0: Vec<f64>) -> Self {
        Self { branch_id: 0, t0: 0.0, x0, p0, phi0: C64::new(0.0, 0.0), sqrt_rho0: C64::new(1.0, 0.0) }
    }

    pub fn at_time(mut self, t0: f64) -> Self {
        self.t0 = t0;
        self
    }

    pub fn with_branch(mut self, id: usize) -> Self {
        self.branch_id = id;
        self
    }
}

#[derive(Clone)]
struct State {
    x: Vec<f64>,
    p: Vec<f64>,
    phi: f64,
}

fn derivative(spec: &HamiltonianSpec, s: &State, t: f64) -> Result<State> {
    let v = spec.velocity(&s.x, &s.p, t)?;
    let f = spec.force(&s.x, &s.p, t)?;
    let h = spec.hamiltonian_real(&s.x, &s.p, t)?;
    let lagrangian = s.p.iter().zip(&v).map(|(a, b)| a * b).sum::<f64>() - h;
    Ok(State { x: v, p: f, phi: lagrangian })
}

fn axpy(s: &State, k: &State, a: f64) -> State {
    State { x: s.x.iter().zip(&k.x).map(|(u, v)| u + a * v).collect(), p: s.p.iter().zip(&k.p).map(|(u, v)| u + a * v).collect(), phi: s.phi + a * k.phi }
}

fn rk4(spec: &HamiltonianSpec, s: &State, t: f64, dt: f64) -> Result<State> {
    let k1 = derivative(spec, s, t)?;
    let k2 = derivative(spec, &axpy(s, &k1, 0.5 * dt), t + 0.5 * dt)?;
    let k3 = derivative(spec, &axpy(s, &k2, 0.5 * dt), t + 0.5 * dt)?;
    let k4 = derivative(spec, &axpy(s, &k3, dt), t + dt)?;
    let n = s.x.len();
    let comb = |a: &[f64], b: &[f64], c: &[f64], d: &[f64], base: &[f64]| -> Vec<f64> {
        (0..n).map(|i| base[i] + dt / 6.0 * (a[i] + 2.0 * b[i] + 2.0 * c[i] + d[i])).collect()
    };
    Ok(State {
        x: comb(&k1.x, &k2.x, &k3.x, &k4.x, &s.x),
        p: comb(&k1.p, &k2.p, &k3.p, &k4.p, &s.p),
        phi: s.phi + dt / 6.0 * (k1.phi + 2.0 * k2.phi + 2.0 * k3.phi + k4.phi),
    })
}

fn finite(s: &State) -> bool {
    s.x.iter().chain(&s.p).all(|v| v.is_finite()) && s.phi.is_finite()
}

/// Mirror the kinetic momentum about the constraint normal in the `M⁻¹` inner
/// product. Returns the new canonical momentum and the impulse `λ`.
pub fn reflect_momentum(spec: &HamiltonianSpec, x: &[f64], p: &[f64], t: f64, normal: &[f64], mode: CollisionMode) -> Result<(Vec<f64>, f64)> {
    let qa = spec.charged_potential(x, t);
    let m = spec.metric_at(x)?;
    let kin = DVector::from_iterator(p.len(), p.iter().zip(&qa).map(|(a, b)| a - b));
    let n = DVector::from_column_slice(normal);
    match mode {
        CollisionMode::Elastic => {
            let minv_n = &m.inverse * &n;
            let s = kin.dot(&minv_n);
            let d = n.dot(&minv_n);
            if d.abs() < f64::MIN_POSITIVE {
                return Err(Error::InvalidArgument("degenerate constraint normal".into()));
            }
            let lambda = -2.0 * s / d;
            let out = (kin + lambda * &n).iter().zip(&qa).map(|(k, a)| k + a).collect();
            Ok((out, lambda))
        }
        CollisionMode::Plastic => {
            let minv_n = &m.inverse * &n;
            let d = n.dot(&minv_n);
            let lambda = if d > 0.0 { -kin.dot(&minv_n) / d } else { 0.0 };
            Ok((qa, lambda))
        }
    }
}

/// Integrate `M ẋ = p − QA`, `ṗ = −∂H/∂x + Σ λ_g ∂f_g/∂x` with classical RK4
/// and bisection event detection on `f_g = 0`.
pub fn integrate_characteristic(
    spec: &HamiltonianSpec,
    constraints: &ConstraintSet,
    start: &BranchStart,
    t_final: f64,
    control: StepControl,
) -> Result<PathTrajectory> {
    if !(t_final > start.t0) {
        return Err(Error::InvalidArgument(format!("t_final {t_final} must exceed t0 {}", start.t0)));
    }
    if !(control.dt > 0.0) {
        return Err(Error::InvalidArgument("dt must be positive".into()));
    }
    if start.x0.len() != spec.dim() || start.p0.len() != spec.dim() {
        return Err(Error::DomainMismatch("initial state dimension".into()));
    }
    let mut traj = PathTrajectory { branch_id: start.branch_id, samples: Vec::new(), events: Vec::new(), terminated: false };
    let mut state = State { x: start.x0.clone(), p: start.p0.clone(), phi: 0.0 };
    let mut t = start.t0;
    let push = |traj: &mut PathTrajectory, s: &State, t: f64, event: Option<usize>| {
        traj.samples.push(TrajectorySample { t, x: s.x.clone(), p: s.p.clone(), phi: start.phi0 + s.phi, sqrt_rho: start.sqrt_rho0, event });
    };
    push(&mut traj, &state, t, None);
    let mut reflections = 0usize;
    let n_steps = ((t_final - start.t0) / control.dt).ceil() as usize;

    for step in 0..n_steps {
        let t_next = if step + 1 == n_steps { t_final } else { start.t0 + (step + 1) as f64 * control.dt };
        let mut remaining = t_next - t;
        while remaining > 0.0 {
            let trial = rk4(spec, &state, t, remaining)?;
            if !finite(&trial) {
                return Err(Error::NonFiniteState { t: t + remaining });
            }
            if constraints.first_violated(&trial.x, t + remaining).is_none() {
                state = trial;
                t += remaining;
                remaining = 0.0;
                continue;
            }
            // bisect the crossing time
            let (mut lo, mut hi) = (0.0, remaining);
            while hi - lo > control.event_tol {
                let mid = 0.5 * (lo + hi);
                let s = rk4(spec, &state, t, mid)?;
                if constraints.first_violated(&s.x, t + mid).is_some() {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            let at_hit = rk4(spec, &state, t, lo)?;
            let t_hit = t + lo;
            let probe = rk4(spec, &state, t, hi)?;
            let g = constraints.first_violated(&probe.x, t + hi).unwrap_or(0);
            push(&mut traj, &at_hit, t_hit, None);
            let normal = constraints.gradient(g, &at_hit.x, t_hit);
            let mode = constraints.constraints[g].mode;
            let (p_new, lambda) = reflect_momentum(spec, &at_hit.x, &at_hit.p, t_hit, &normal, mode)?;
            state = State { x: at_hit.x, p: p_new, phi: at_hit.phi };
            t = t_hit;
            remaining -= lo;
            push(&mut traj, &state, t, Some(g));
            let kind = match mode {
                CollisionMode::Elastic => EventKind::ElasticReflection,
                CollisionMode::Plastic => EventKind::PlasticStop,
            };
            traj.events.push(TrajectoryEvent { t, sample: traj.samples.len() - 1, constraint: Some(g), kind, impulse: lambda });
            if mode == CollisionMode::Plastic {
                traj.terminated = true;
                return Ok(traj);
            }
            reflections += 1;
            if reflections > control.max_reflections {
                return Err(Error::EventLoop { max: control.max_reflections, t });
            }
        }
        push(&mut traj, &state, t, None);
    }
    Ok(traj)
}

impl PathTrajectory {
    pub fn dim(&self) -> usize {
        self.samples.first().map_or(0, |s| s.x.len())
    }

    pub fn last(&self) -> &TrajectorySample {
        self.samples.last().expect("trajectory has samples")
    }

    /// Max relative drift of `H(x, p, t)` from its initial value.
    pub fn energy_drift(&self, spec: &HamiltonianSpec) -> Result<f64> {
        let e0 = spec.hamiltonian_real(&self.samples[0].x, &self.samples[0].p, self.samples[0].t)?;
        let scale = e0.abs().max(f64::MIN_POSITIVE);
        let mut worst: f64 = 0.0;
        for s in &self.samples {
            worst = worst.max((spec.hamiltonian_real(&s.x, &s.p, s.t)? - e0).abs() / scale);
        }
        Ok(worst)
    }

    /// Relative kinetic-energy change across each reflection event.
    pub fn reflection_energy_errors(&self, spec: &HamiltonianSpec) -> Result<Vec<f64>> {
        let mut out = Vec::new();
        for ev in self.events.iter().filter(|e| e.kind == EventKind::ElasticReflection) {
            let after = &self.samples[ev.sample];
            let before = &self.samples[ev.sample - 1];
            let kb = spec.kinetic_energy(&before.x, &before.p, before.t)?;
            let ka = spec.kinetic_energy(&after.x, &after.p, after.t)?;
            out.push((ka - kb).abs() / kb.abs().max(f64::MIN_POSITIVE));
        }
        Ok(out)
    }

    /// CSV: `t,x1..xN,p1..pN,re_phi,im_phi,re_sqrt_rho,im_sqrt_rho,event`.
    pub fn write_csv<W: Write>(&self, mut w: W, comment: Option<&str>) -> Result<()> {
        if let Some(c) = comment {
            writeln!(w, "# {c}")?;
        }
        let n = self.dim();
        let mut header = vec!["t".to_string()];
        header.extend((1..=n).map(|i| format!("x{i}")));
        header.extend((1..=n).map(|i| format!("p{i}")));
        header.extend(["re_phi", "im_phi", "re_sqrt_rho", "im_sqrt_rho", "event"].map(String::from));
        writeln!(w, "{}", header.join(","))?;
        for s in &self.samples {
            let mut row = vec![format!("{:.17e}", s.t)];
            row.extend(s.x.iter().map(|v| format!("{v:.17e}")));
            row.extend(s.p.iter().map(|v| format!("{v:.17e}")));
            row.push(format!("{:.17e}", s.phi.re));
            row.push(format!("{:.17e}", s.phi.im));
            row.push(format!("{:.17e}", s.sqrt_rho.re));
            row.push(format!("{:.17e}", s.sqrt_rho.im));
            row.push(s.event.map(|g| g.to_string()).unwrap_or_default());
            writeln!(w, "{}", row.join(","))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::real;

    #[test]
    fn free_particle_is_a_straight_line() {
        let spec = HamiltonianSpec::new(1);
        let traj = integrate_characteristic(
            &spec,
            &ConstraintSet::new(),
            &BranchStart::new(vec![0.0], vec![1.0]),
            3.0,
            StepControl { dt: 0.01, ..Default::default() },
        )
        .unwrap();
        assert!(traj.events.is_empty());
        for s in &traj.samples {
            assert!((s.x[0] - s.t).abs() < 1e-12);
        }
        assert!((traj.last().t - 3.0).abs() < 1e-12);
        // φ = ∫ L dt = t/2
        assert!((traj.last().phi.re - 1.5).abs() < 1e-12);
    }

    #[test]
    fn box_sawtooth_preserves_kinetic_energy() {
        let l = 1.0;
        let spec = HamiltonianSpec::new(1);
        let walls = ConstraintSet::box_walls(&[0.0], &[l], CollisionMode::Elastic);
        let p = 1.0;
        let period = 2.0 * l / p;
        let traj =
            integrate_characteristic(&spec, &walls, &BranchStart::new(vec![0.2 * l], vec![p]), period, StepControl { dt: 0.01, ..Default::default() }).unwrap();
        let hits: Vec<usize> = traj.events.iter().map(|e| e.constraint.unwrap()).collect();
        assert_eq!(hits, vec![1, 0]);
        assert!((traj.events[0].t - 0.8).abs() < 1e-11);
        assert!((traj.events[1].t - 1.8).abs() < 1e-11);
        for e in traj.reflection_energy_errors(&spec).unwrap() {
            assert!(e < 1e-10);
        }
        assert!((traj.last().x[0] - 0.2).abs() < 1e-10);
        assert!((traj.events[0].impulse + 2.0).abs() < 1e-8);
    }

    #[test]
    fn oblique_reflection_with_anisotropic_metric() {
        // wall x + y ≤ 1 with M = diag(1, 4)
        let spec = HamiltonianSpec::new(2).with_metric(nalgebra::DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 4.0]));
        let walls = ConstraintSet::new().with("diag", real(|x, _| x[0] + x[1] - 1.0), CollisionMode::Elastic);
        let traj = integrate_characteristic(&spec, &walls, &BranchStart::new(vec![0.0, 0.0], vec![1.0, 2.0]), 2.0, StepControl::default()).unwrap();
        assert_eq!(traj.events.len(), 1);
        assert!(traj.reflection_energy_errors(&spec).unwrap()[0] < 1e-10);
        assert!(traj.energy_drift(&spec).unwrap() < 1e-10);
    }

    #[test]
    fn plastic_collision_terminates() {
        let spec = HamiltonianSpec::new(1);
        let walls = ConstraintSet::box_walls(&[0.0], &[1.0], CollisionMode::Plastic);
        let traj = integrate_characteristic(&spec, &walls, &BranchStart::new(vec![0.5], vec![1.0]), 5.0, StepControl::default()).unwrap();
        assert!(traj.terminated);
        assert_eq!(traj.last().p, vec![0.0]);
        assert_eq!(traj.events[0].kind, EventKind::PlasticStop);
    }

    #[test]
    fn reflection_budget_is_enforced() {
        let spec = HamiltonianSpec::new(1);
        let walls = ConstraintSet::box_walls(&[0.0], &[0.01], CollisionMode::Elastic);
        let err =
            integrate_characteristic(&spec, &walls, &BranchStart::new(vec![0.005], vec![1.0]), 1.0, StepControl { max_reflections: 5, ..Default::default() });
        assert!(matches!(err, Err(Error::EventLoop { max: 5, .. })));
    }

    #[test]
    fn harmonic_energy_is_conserved() {
        let spec = HamiltonianSpec::new(1).with_potential(real(|x, _| 0.5 * x[0] * x[0]));
        let traj = integrate_characteristic(&spec, &ConstraintSet::new(), &BranchStart::new(vec![1.0], vec![0.0]), 10.0, StepControl::default()).unwrap();
        assert!(traj.energy_drift(&spec).unwrap() < 1e-8);
        assert!((traj.last().x[0] - 10f64.cos()).abs() < 1e-9);
    }

    #[test]
    fn csv_header_and_event_column() {
        let spec = HamiltonianSpec::new(1);
        let walls = ConstraintSet::box_walls(&[0.0], &[1.0], CollisionMode::Elastic);
        let traj =
            integrate_characteristic(&spec, &walls, &BranchStart::new(vec![0.5], vec![1.0]), 1.0, StepControl { dt: 0.25, ..Default::default() }).unwrap();
        let mut buf = Vec::new();
        traj.write_csv(&mut buf, None).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "t,x1,p1,re_phi,im_phi,re_sqrt_rho,im_sqrt_rho,event");
        assert!(text.lines().any(|l| l.ends_with(",1")));
    }
}

//! Stencil operators: Laplace–Beltrami, the Hamilton–Jacobi residual and the gauge check.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{shifted, C64};
use crate::hj::branch::ActionBranch;
use crate::hj::constraints::ConstraintSet;
use crate::hj::hamiltonian::HamiltonianSpec;

/// Options for [`laplace_beltrami`].
#[derive(Debug, Clone, Copy)]
pub struct StencilOptions<'a> {
    pub h: f64,
    pub constraints: Option<&'a ConstraintSet>,
    /// Use one-sided differences where the central stencil leaves the domain.
    pub one_sided: bool,
}

impl Default for StencilOptions<'_> {
    fn default() -> Self {
        Self { h: 1e-3, constraints: None, one_sided: false }
    }
}

/// `c ∇_M·(M⁻¹ w) − [coupled] QA·M⁻¹ w` with `w = c ∇f − [coupled] QA f`,
/// using step `h[n]` along axis `n`.
///
/// Conservative form: fluxes are taken at half nodes, so the truncation error is
/// `O(h²)` for any smooth metric.
pub(crate) fn metric_divergence(spec: &HamiltonianSpec, f: &dyn Fn(&[f64]) -> C64, x: &[f64], t: f64, h: &[f64], c: C64, coupled: bool) -> Result<C64> {
    let n = spec.dim();
    let zero = C64::new(0.0, 0.0);
    let f0 = f(x);
    let centre = spec.metric_at(x)?;
    let coupled = coupled && spec.has_vector_potential();
    let qa_at = |y: &[f64]| -> Vec<f64> {
        if coupled {
            spec.charged_potential(y, t)
        } else {
            vec![0.0; n]
        }
    };
    let grad_c = |y: &[f64]| -> Vec<C64> { (0..n).map(|m| (f(&shifted(y, m, h[m])) - f(&shifted(y, m, -h[m]))) / (2.0 * h[m])).collect() };
    let mut grad_x: Option<Vec<C64>> = None;

    let mut div = zero;
    for a in 0..n {
        let mut flux = [zero; 2];
        for (k, s) in [1.0f64, -1.0].into_iter().enumerate() {
            let half = shifted(x, a, 0.5 * s * h[a]);
            let nb = shifted(x, a, s * h[a]);
            let f_nb = f(&nb);
            let mh = spec.metric_at(&half)?;
            let qa = qa_at(&half);
            let f_avg = 0.5 * (f0 + f_nb);
            let mut acc = zero;
            for m in 0..n {
                let coeff = mh.inverse[(a, m)];
                if coeff == 0.0 {
                    continue;
                }
                let w = if m == a {
                    c * s * (f_nb - f0) / h[a] - qa[a] * f_avg
                } else {
                    let gx = grad_x.get_or_insert_with(|| grad_c(x))[m];
                    let gn = grad_c(&nb)[m];
                    c * 0.5 * (gx + gn) - qa[m] * f_avg
                };
                acc += coeff * w;
            }
            flux[k] = mh.sqrt_det * acc;
        }
        div += (flux[0] - flux[1]) / h[a];
    }
    let mut out = c * div / centre.sqrt_det;
    if coupled {
        let qa0 = qa_at(x);
        if qa0.iter().any(|v| *v != 0.0) {
            let g = grad_x.get_or_insert_with(|| grad_c(x)).clone();
            let w0: Vec<C64> = (0..n).map(|m| c * g[m] - qa0[m] * f0).collect();
            for a in 0..n {
                let mut mw = zero;
                for m in 0..n {
                    mw += centre.inverse[(a, m)] * w0[m];
                }
                out -= qa0[a] * mw;
            }
        }
    }
    Ok(out)
}

/// Central-stencil `Δ_M f` with step `h`.
pub fn laplace_beltrami_stencil(spec: &HamiltonianSpec, f: &dyn Fn(&[f64]) -> C64, x: &[f64], h: f64) -> Result<C64> {
    metric_divergence(spec, f, x, 0.0, &vec![h; spec.dim()], C64::new(1.0, 0.0), false)
}

/// `Δ_M f (x) = (1/√det M) Σ_n ∂_n (√det M (M⁻¹ ∇f)_n)`.
///
/// With constraints supplied, a stencil that leaves the admissible set is an
/// error unless `one_sided` is set, in which case each axis uses a second-order
/// one-sided stencil pointing into the domain.
pub fn laplace_beltrami(spec: &HamiltonianSpec, f: &dyn Fn(&[f64]) -> C64, x: &[f64], t: f64, opts: StencilOptions<'_>) -> Result<C64> {
    let h = opts.h;
    if let Some(cs) = opts.constraints {
        if let Some(g) = central_stencil_violation(cs, x, t, h) {
            if !opts.one_sided {
                return Err(Error::StencilOutOfDomain { x: x.to_vec(), h, constraint: g });
            }
            return one_sided_laplace_beltrami(spec, f, x, t, h, cs);
        }
    }
    laplace_beltrami_stencil(spec, f, x, h)
}

/// Branch Laplacian: analytic when catalogued, otherwise [`laplace_beltrami`].
pub fn branch_laplacian(spec: &HamiltonianSpec, branch: &ActionBranch, x: &[f64], t: f64, opts: StencilOptions<'_>) -> Result<C64> {
    if branch.has_analytic_laplacian() {
        return branch.laplacian(spec, x, t);
    }
    laplace_beltrami(spec, &|y: &[f64]| branch.phi(y, t), x, t, opts)
}

fn central_stencil_violation(cs: &ConstraintSet, x: &[f64], t: f64, h: f64) -> Option<usize> {
    let n = x.len();
    let mut pts = vec![x.to_vec()];
    for a in 0..n {
        for s in [h, -h] {
            let y = shifted(x, a, s);
            for b in 0..n {
                if b != a {
                    pts.push(shifted(&y, b, h));
                    pts.push(shifted(&y, b, -h));
                }
            }
            pts.push(y);
        }
    }
    pts.iter().find_map(|p| cs.first_violated(p, t))
}

fn one_sided_laplace_beltrami(spec: &HamiltonianSpec, f: &dyn Fn(&[f64]) -> C64, x: &[f64], t: f64, h: f64, cs: &ConstraintSet) -> Result<C64> {
    let n = spec.dim();
    let mut dir = vec![0.0; n];
    for a in 0..n {
        let ok = |s: f64| (1..=3).all(|k| cs.first_violated(&shifted(x, a, s * k as f64 * h), t).is_none());
        dir[a] = if ok(1.0) {
            1.0
        } else if ok(-1.0) {
            -1.0
        } else {
            return Err(Error::StencilOutOfDomain { x: x.to_vec(), h, constraint: cs.first_violated(x, t).unwrap_or(0) });
        };
    }
    let d1 = |u: &dyn Fn(&[f64]) -> C64, y: &[f64], a: usize| -> C64 {
        let s = dir[a];
        s * (-3.0 * u(y) + 4.0 * u(&shifted(y, a, s * h)) - u(&shifted(y, a, 2.0 * s * h))) / (2.0 * h)
    };
    let d2 = |u: &dyn Fn(&[f64]) -> C64, y: &[f64], a: usize| -> C64 {
        let s = dir[a];
        (2.0 * u(y) - 5.0 * u(&shifted(y, a, s * h)) + 4.0 * u(&shifted(y, a, 2.0 * s * h)) - u(&shifted(y, a, 3.0 * s * h))) / (h * h)
    };
    let centre = spec.metric_at(x)?;
    let mut out = C64::new(0.0, 0.0);
    for a in 0..n {
        for m in 0..n {
            let coeff = centre.inverse[(a, m)];
            if coeff != 0.0 {
                let second = if a == m {
                    d2(f, x, a)
                } else {
                    let inner = |y: &[f64]| d1(f, y, m);
                    d1(&inner, x, a)
                };
                out += coeff * second;
            }
            // (1/g) ∂_a (g M⁻¹_{am}) ∂_m f
            let gm = |y: &[f64]| -> C64 { spec.metric_at(y).map(|mm| C64::from(mm.sqrt_det * mm.inverse[(a, m)])).unwrap_or(C64::new(f64::NAN, 0.0)) };
            let dg = d1(&gm, x, a);
            if dg.norm() > 0.0 {
                out += dg / centre.sqrt_det * d1(f, x, m);
            }
        }
    }
    if !out.re.is_finite() {
        return Err(Error::SingularMetric { det: f64::NAN, floor: 0.0 });
    }
    Ok(out)
}

/// `∂φ/∂t + ½(∇φ − QA)ᵀ M⁻¹ (∇φ − QA) + V`; zero for an exact branch.
pub fn hj_residual(spec: &HamiltonianSpec, branch: &ActionBranch, x: &[f64], t: f64) -> Result<C64> {
    let grad = branch.grad(x, t);
    Ok(branch.dphi_dt(x, t) + spec.hamiltonian(x, &grad, t)?)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GaugeReport {
    pub max_divergence: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub samples: usize,
}

/// Max `|∇_M·A|` over the sample points by central differences.
pub fn check_gauge(spec: &HamiltonianSpec, points: &[Vec<f64>], t: f64, h: f64, tolerance: f64) -> Result<GaugeReport> {
    let n = spec.dim();
    let mut worst: f64 = 0.0;
    for x in points {
        let centre = spec.metric_at(x)?;
        let mut div = 0.0;
        for a in 0..n {
            let flux = |y: &[f64]| -> Result<f64> { Ok(spec.metric_at(y)?.sqrt_det * spec.vector_potential(y, t)[a]) };
            div += (flux(&shifted(x, a, h))? - flux(&shifted(x, a, -h))?) / (2.0 * h);
        }
        worst = worst.max((div / centre.sqrt_det).abs());
    }
    Ok(GaugeReport { max_divergence: worst, tolerance, passed: worst <= tolerance, samples: points.len() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{real_vector, scalar};
    use crate::hj::branch::InitialCondition;
    use crate::hj::constraints::CollisionMode;
    use nalgebra::DMatrix;

    #[test]
    fn plane_wave_action_has_zero_laplacian() {
        let spec = HamiltonianSpec::new(3).with_mass(2.0);
        let p = [0.3, -1.2, 2.0];
        let f = move |x: &[f64]| C64::from(p[0] * x[0] + p[1] * x[1] + p[2] * x[2]);
        let v = laplace_beltrami(&spec, &f, &[0.4, 0.1, -0.7], 0.0, StencilOptions::default()).unwrap();
        assert!(v.norm() < 1e-9);
    }

    #[test]
    fn spherical_action_laplacian_is_two_over_r() {
        // f = p_o r, M = m I, at r = 2: Δ_M f = (2/r) p_o/m = p_o/m
        let (p_o, m) = (1.7, 1.3);
        let spec = HamiltonianSpec::new(3).with_mass(m);
        let f = move |x: &[f64]| C64::from(p_o * (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt());
        let x = [2.0 / 3f64.sqrt(); 3];
        let v = laplace_beltrami(&spec, &f, &x, 0.0, StencilOptions { h: 1e-3, ..Default::default() }).unwrap();
        assert!((v.re - p_o / m).abs() < 1e-6, "{v}");
    }

    #[test]
    fn variable_metric_matches_product_rule() {
        // M = diag(1 + x², 2): Δ_M f for f = x y
        let spec = HamiltonianSpec::new(2).with_metric_field(|x| DMatrix::from_row_slice(2, 2, &[1.0 + x[0] * x[0], 0.0, 0.0, 2.0]));
        let f = |x: &[f64]| C64::from(x[0] * x[1]);
        let x = [0.6, -0.4];
        let v = laplace_beltrami_stencil(&spec, &f, &x, 1e-3).unwrap();
        // g = sqrt(2(1+x²)); (1/g) ∂x(g · y/(1+x²)) = y ∂x((1+x²)^{-1/2}) (1+x²)^{-1/2}
        let a: f64 = 1.0 + x[0] * x[0];
        let expect = x[1] * (-x[0] * a.powf(-1.5)) * a.powf(-0.5);
        assert!((v.re - expect).abs() < 1e-6, "{} vs {}", v.re, expect);
    }

    #[test]
    fn stencil_near_wall_requires_one_sided_mode() {
        let spec = HamiltonianSpec::new(1);
        let walls = ConstraintSet::box_walls(&[0.0], &[1.0], CollisionMode::Elastic);
        let f = |x: &[f64]| C64::from(x[0].powi(3));
        let x = [0.0005];
        let strict = StencilOptions { h: 1e-3, constraints: Some(&walls), one_sided: false };
        assert!(matches!(laplace_beltrami(&spec, &f, &x, 0.0, strict), Err(Error::StencilOutOfDomain { .. })));
        let v = laplace_beltrami(&spec, &f, &x, 0.0, StencilOptions { one_sided: true, ..strict }).unwrap();
        assert!((v.re - 6.0 * x[0]).abs() < 1e-5, "{v}");
    }

    #[test]
    fn harmonic_action_laplacian_is_omega_cot() {
        let (m, w, xo): (f64, f64, f64) = (1.0, 1.3, 0.4);
        let spec = HamiltonianSpec::new(1).with_mass(m);
        let t: f64 = 0.7;
        let f = move |x: &[f64]| {
            let (s, c) = (w * t).sin_cos();
            C64::from(m * w / 2.0 * ((x[0] * x[0] + xo * xo) * c / s - 2.0 * x[0] * xo / s))
        };
        let v = laplace_beltrami_stencil(&spec, &f, &[0.3], 1e-3).unwrap();
        assert!((v.re - w / (w * t).tan()).abs() < 1e-6);
    }

    #[test]
    fn perturbed_plane_wave_residual_matches_expansion() {
        // φ = p x − p² t/(2M) + ε x²  ⇒  residual = 2 ε x p/M + 2 ε² x²/M
        let (p, m, eps) = (1.5, 2.0, 1e-3);
        let spec = HamiltonianSpec::new(1).with_mass(m);
        let b = ActionBranch::new(
            0,
            "perturbed",
            1,
            InitialCondition::Momentum(vec![p]),
            scalar(move |x, t| C64::from(p * x[0] - p * p / (2.0 * m) * t + eps * x[0] * x[0])),
        );
        for &x in &[-1.0, 0.5, 2.0] {
            let r = hj_residual(&spec, &b, &[x], 0.3).unwrap();
            let expect = 2.0 * eps * x * p / m + 2.0 * eps * eps * x * x / m;
            assert!((r.re - expect).abs() < 1e-8, "{} {}", r.re, expect);
        }
    }

    #[test]
    fn gauge_examples() {
        let pts: Vec<Vec<f64>> = vec![vec![0.3, 0.2, -0.1], vec![1.0, -2.0, 0.5]];
        let zero = HamiltonianSpec::new(3);
        assert_eq!(check_gauge(&zero, &pts, 0.0, 1e-4, 1e-8).unwrap().max_divergence, 0.0);
        let uniform = HamiltonianSpec::new(3).with_vector_potential(real_vector(|x, _| vec![-x[1] / 2.0, x[0] / 2.0, 0.0]), vec![1.0; 3]);
        assert!(check_gauge(&uniform, &pts, 0.0, 1e-4, 1e-8).unwrap().passed);
        let bad = HamiltonianSpec::new(3).with_vector_potential(real_vector(|x, _| vec![x[0], 0.0, 0.0]), vec![1.0; 3]);
        let rep = check_gauge(&bad, &pts, 0.0, 1e-4, 1e-8).unwrap();
        assert!(!rep.passed && (rep.max_divergence - 1.0).abs() < 1e-8);
    }
}

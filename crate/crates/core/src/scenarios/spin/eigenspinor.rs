use nalgebra::{Matrix2, Matrix4, Vector2, Vector4};

use crate::error::{Error, Result};
use crate::field::C64;
use crate::scenarios::spin::algebra::{dirac, sigma_dot, Spinor2, Spinor4};

/// `n = (sin β cos α, sin β sin α, cos β)`.
pub fn unit_from_angles(alpha: f64, beta: f64) -> [f64; 3] {
    [beta.sin() * alpha.cos(), beta.sin() * alpha.sin(), beta.cos()]
}

/// `(α, β)` of a unit vector; `α = atan2(n₂, n₁)` also covers the poles.
pub fn direction_angles(n: &[f64; 3]) -> (f64, f64) {
    (n[1].atan2(n[0]), n[2].clamp(-1.0, 1.0).acos())
}

/// `χ↑ = (cos β/2, e^{iα} sin β/2)`, `χ↓ = (−e^{−iα} sin β/2, cos β/2)`.
pub fn eigenspinors(n: &[f64; 3]) -> Result<(Spinor2, Spinor2)> {
    let len = (n[0] * n[0] + n[1] * n[1] + n[2] * n[2]).sqrt();
    if (len - 1.0).abs() > 1e-10 {
        return Err(Error::InvalidArgument(format!("|n| = {len}")));
    }
    let (a, b) = direction_angles(n);
    let (s, c) = (0.5 * b).sin_cos();
    let up = Vector2::new(C64::from(c), C64::from_polar(s, a));
    let down = Vector2::new(-C64::from_polar(s, -a), C64::from(c));
    Ok((Spinor2::unit(up)?, Spinor2::unit(down)?))
}

/// `‖Σ·n − (χ↑χ↑† − χ↓χ↓†)‖`.
pub fn sigma_reconstruction_defect(n: &[f64; 3]) -> Result<f64> {
    let (u, d) = eigenspinors(n)?;
    let (u, d) = (u.components, d.components);
    let m: Matrix2<C64> = u * u.adjoint() - d * d.adjoint();
    Ok((sigma_dot(n) - m).norm())
}

/// `γ⁰ E_o + c γ·p`.
pub fn gamma_p(p: &[f64; 3], e_o: f64, c: f64) -> Matrix4<C64> {
    let g = dirac();
    g[0] * C64::from(e_o) + (g[1] * C64::from(p[0]) + g[2] * C64::from(p[1]) + g[3] * C64::from(p[2])) * C64::from(c)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelativisticEigenspinors {
    pub e_plus: f64,
    pub e_minus: f64,
    /// `ξ⁺_{↑,↓}`.
    pub xi_plus: [Spinor4; 2],
    /// `ξ⁻_{↑,↓}`.
    pub xi_minus: [Spinor4; 2],
}

impl RelativisticEigenspinors {
    /// `‖Σ E ξξ† − (γ⁰E_o + cγ·p)‖`.
    pub fn reconstruction_defect(&self, p: &[f64; 3], e_o: f64, c: f64) -> f64 {
        let mut m = Matrix4::<C64>::zeros();
        for x in &self.xi_plus {
            m += x.components * x.components.adjoint() * C64::from(self.e_plus);
        }
        for x in &self.xi_minus {
            m += x.components * x.components.adjoint() * C64::from(self.e_minus);
        }
        (m - gamma_p(p, e_o, c)).norm()
    }
}

/// `ξ⁺ = (χ; cΣ·p χ/Δ₊)/N₊`, `ξ⁻ = (cΣ·p χ/Δ₋; χ)/N₋` with `E± = ±√(E_o² + c²pᵀp)`,
/// `Δ± = E± ± E_o`, `N± = √(1 + c²pᵀp/Δ±²)`; χ along `p̂` (or `x³` at rest).
pub fn relativistic_eigenspinors(p: &[f64; 3], e_o: f64, c: f64) -> Result<RelativisticEigenspinors> {
    let p2 = p[0] * p[0] + p[1] * p[1] + p[2] * p[2];
    let e_plus = (e_o * e_o + c * c * p2).sqrt();
    let e_minus = -e_plus;
    let (d_plus, d_minus) = (e_plus + e_o, e_minus - e_o);
    if d_plus == 0.0 || d_minus == 0.0 {
        return Err(Error::PolarSingularity("Δ± vanishes".into()));
    }
    let n_plus = (1.0 + c * c * p2 / (d_plus * d_plus)).sqrt();
    let n_minus = (1.0 + c * c * p2 / (d_minus * d_minus)).sqrt();
    let len = p2.sqrt();
    let dir = if len > 0.0 { [p[0] / len, p[1] / len, p[2] / len] } else { [0.0, 0.0, 1.0] };
    let (up, down) = eigenspinors(&dir)?;
    let sp = sigma_dot(p) * C64::from(c);
    let stack = |top: Vector2<C64>, bottom: Vector2<C64>, n: f64| Spinor4::unit(Vector4::new(top[0], top[1], bottom[0], bottom[1]) / C64::from(n));
    let plus = |chi: &Spinor2| stack(chi.components, sp * chi.components / C64::from(d_plus), n_plus);
    let minus = |chi: &Spinor2| stack(sp * chi.components / C64::from(d_minus), chi.components, n_minus);
    Ok(RelativisticEigenspinors { e_plus, e_minus, xi_plus: [plus(&up)?, plus(&down)?], xi_minus: [minus(&up)?, minus(&down)?] })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pole_spinors() {
        let (u, d) = eigenspinors(&[0.0, 0.0, 1.0]).unwrap();
        assert_eq!(u.components, Vector2::new(C64::from(1.0), C64::from(0.0)));
        assert_eq!(d.components, Vector2::new(C64::from(0.0), C64::from(1.0)));
        let (u, _) = eigenspinors(&[0.0, 0.0, -1.0]).unwrap();
        let s = sigma_dot(&[0.0, 0.0, -1.0]);
        assert!((s * u.components - u.components).norm() < 1e-15);
    }

    #[test]
    fn eigen_relations() {
        let n = unit_from_angles(0.7, 2.1);
        let (u, d) = eigenspinors(&n).unwrap();
        let s = sigma_dot(&n);
        assert!((s * u.components - u.components).norm() < 1e-15);
        assert!((s * d.components + d.components).norm() < 1e-15);
        assert!(sigma_reconstruction_defect(&n).unwrap() < 1e-15);
    }

    #[test]
    fn rest_frame_and_moving() {
        let r = relativistic_eigenspinors(&[0.0; 3], 2.0, 1.0).unwrap();
        assert_eq!((r.e_plus, r.e_minus), (2.0, -2.0));
        assert_eq!(r.xi_plus[0].components[2], C64::from(0.0));
        let p = [0.3, -1.1, 0.8];
        let r = relativistic_eigenspinors(&p, 1.5, 2.0).unwrap();
        assert!(r.reconstruction_defect(&p, 1.5, 2.0) < 1e-13);
        assert!(matches!(relativistic_eigenspinors(&[0.0; 3], 0.0, 1.0), Err(Error::PolarSingularity(_))));
    }
}

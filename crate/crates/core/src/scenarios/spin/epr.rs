use nalgebra::Vector4;

use crate::error::Result;
use crate::field::C64;
use crate::scenarios::spin::algebra::sigma_dot;
use crate::scenarios::spin::eigenspinor::eigenspinors;

/// Unit vector at `deg` degrees from `x³` in the `x¹–x³` plane.
pub fn coplanar(deg: f64) -> [f64; 3] {
    let a = deg.to_radians();
    [a.sin(), 0.0, a.cos()]
}

/// `(χ↑⊗χ↓ − χ↓⊗χ↑)/√2` for the initial direction `n_o`.
pub fn singlet(n_o: &[f64; 3]) -> Result<Vector4<C64>> {
    let (u, d) = eigenspinors(n_o)?;
    let (u, d) = (u.components, d.components);
    let kron = |a: &nalgebra::Vector2<C64>, b: &nalgebra::Vector2<C64>| Vector4::new(a[0] * b[0], a[0] * b[1], a[1] * b[0], a[1] * b[1]);
    Ok((kron(&u, &d) - kron(&d, &u)) / C64::from(2f64.sqrt()))
}

/// `⟨ψ_o, (Σ·n₁ ⊗ Σ·n₂) ψ_o⟩` for the singlet built on `n_o`.
pub fn epr_correlation_with(n1: &[f64; 3], n2: &[f64; 3], n_o: &[f64; 3]) -> Result<f64> {
    let psi = singlet(n_o)?;
    let op = sigma_dot(n1).kronecker(&sigma_dot(n2));
    Ok((psi.adjoint() * op * psi)[(0, 0)].re)
}

pub fn epr_correlation(n1: &[f64; 3], n2: &[f64; 3]) -> Result<f64> {
    epr_correlation_with(n1, n2, &[0.0, 0.0, 1.0])
}

/// `½(ψ↑₁†ψ↓₂ + ψ↓₂†ψ↑₁)` with `ψ↑_p = Σ·n_p χ↑_o`, `ψ↓_p = Σ·n_p χ↓_o`.
pub fn literal_overlap(n1: &[f64; 3], n2: &[f64; 3], n_o: &[f64; 3]) -> Result<f64> {
    let (u, d) = eigenspinors(n_o)?;
    let a = sigma_dot(n1) * u.components;
    let b = sigma_dot(n2) * d.components;
    Ok(0.5 * ((a.adjoint() * b)[(0, 0)] + (b.adjoint() * a)[(0, 0)]).re)
}

/// `S = |E(n₁,n₂) − E(n₁,n₄) + E(n₃,n₂) + E(n₃,n₄)|`.
pub fn chsh(e: impl Fn(&[f64; 3], &[f64; 3]) -> f64, n: &[[f64; 3]; 4]) -> f64 {
    (e(&n[0], &n[1]) - e(&n[0], &n[3]) + e(&n[2], &n[1]) + e(&n[2], &n[3])).abs()
}

/// `|P(a,b) − P(a,c)| − (1 + P(b,c))`; positive values violate the inequality.
pub fn bell_inequality_gap(p: impl Fn(&[f64; 3], &[f64; 3]) -> f64, a: &[f64; 3], b: &[f64; 3], c: &[f64; 3]) -> f64 {
    (p(a, b) - p(a, c)).abs() - (1.0 + p(b, c))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn anticorrelation_and_orthogonality() {
        let z = [0.0, 0.0, 1.0];
        assert!((epr_correlation(&z, &z).unwrap() + 1.0).abs() < 1e-15);
        assert!(epr_correlation(&z, &[1.0, 0.0, 0.0]).unwrap().abs() < 1e-15);
        assert_eq!(literal_overlap(&z, &z, &z).unwrap(), 0.0);
    }

    #[test]
    fn optimal_chsh() {
        let n = [coplanar(0.0), coplanar(45.0), coplanar(90.0), coplanar(135.0)];
        let s = chsh(|a, b| epr_correlation(a, b).unwrap(), &n);
        assert!((s - 2.0 * 2f64.sqrt()).abs() < 1e-12);
        let gap = bell_inequality_gap(|a, b| epr_correlation(a, b).unwrap(), &coplanar(0.0), &coplanar(60.0), &coplanar(120.0));
        assert!(gap > 0.4);
    }
}

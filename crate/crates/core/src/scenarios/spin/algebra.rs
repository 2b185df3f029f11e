use nalgebra::{Matrix2, Matrix4, SVector};

use crate::error::{Error, Result};
use crate::field::C64;

/// Spinor with a normalization flag.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Spinor<const N: usize> {
    pub components: SVector<C64, N>,
    pub normalized: bool,
}

pub type Spinor2 = Spinor<2>;
pub type Spinor4 = Spinor<4>;

impl<const N: usize> Spinor<N> {
    pub fn new(components: SVector<C64, N>) -> Self {
        Self { components, normalized: false }
    }

    /// Declares unit norm; rejected unless it holds to `1e-12`.
    pub fn unit(components: SVector<C64, N>) -> Result<Self> {
        let n = components.norm();
        if (n - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidArgument(format!("spinor norm {n} is not 1")));
        }
        Ok(Self { components, normalized: true })
    }
}

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn pauli() -> [Matrix2<C64>; 3] {
    let (o, l, i) = (c(0.0, 0.0), c(1.0, 0.0), c(0.0, 1.0));
    [Matrix2::new(o, l, l, o), Matrix2::new(o, -i, i, o), Matrix2::new(l, o, o, -l)]
}

/// `γ⁰ = diag(I, −I)` and `γⁿ = [[0, σⁿ], [σⁿ, 0]]`.
pub fn dirac() -> [Matrix4<C64>; 4] {
    let s = pauli();
    let mut g = [Matrix4::zeros(); 4];
    for k in 0..4 {
        g[0][(k, k)] = c(if k < 2 { 1.0 } else { -1.0 }, 0.0);
    }
    for n in 0..3 {
        g[n + 1].fixed_view_mut::<2, 2>(0, 2).copy_from(&s[n]);
        g[n + 1].fixed_view_mut::<2, 2>(2, 0).copy_from(&s[n]);
    }
    g
}

/// `Σ·n`.
pub fn sigma_dot(n: &[f64; 3]) -> Matrix2<C64> {
    let s = pauli();
    s[0] * c(n[0], 0.0) + s[1] * c(n[1], 0.0) + s[2] * c(n[2], 0.0)
}

/// `max ‖{σʲ, σᵏ} − 2δʲᵏ I‖`.
pub fn pauli_anticommutator_defect() -> f64 {
    let s = pauli();
    let mut worst: f64 = 0.0;
    for j in 0..3 {
        for k in 0..3 {
            let want = if j == k { Matrix2::identity() * c(2.0, 0.0) } else { Matrix2::zeros() };
            worst = worst.max((s[j] * s[k] + s[k] * s[j] - want).norm());
        }
    }
    worst
}

/// `max ‖{γ^μ, γ^ν} − 2 g^{μν} I‖` against the diagonal metric `g`.
pub fn dirac_anticommutator_defect(metric: &[f64; 4]) -> f64 {
    let g = dirac();
    let mut worst: f64 = 0.0;
    for mu in 0..4 {
        for nu in 0..4 {
            let want = if mu == nu { Matrix4::identity() * c(2.0 * metric[mu], 0.0) } else { Matrix4::zeros() };
            worst = worst.max((g[mu] * g[nu] + g[nu] * g[mu] - want).norm());
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pauli_identities() {
        let s = pauli();
        assert_eq!(pauli_anticommutator_defect(), 0.0);
        assert!((s[0] * s[1] - s[2] * c(0.0, 1.0)).norm() == 0.0);
        let z = sigma_dot(&[0.0, 0.0, 1.0]);
        assert_eq!(z * z, Matrix2::identity());
    }

    #[test]
    fn printed_dirac_matrices_are_euclidean() {
        assert_eq!(dirac_anticommutator_defect(&[1.0; 4]), 0.0);
        assert_eq!(dirac_anticommutator_defect(&[1.0, -1.0, -1.0, -1.0]), 8.0);
    }

    #[test]
    fn unit_flag() {
        assert!(Spinor2::unit(SVector::<C64, 2>::new(c(1.0, 0.0), c(0.0, 0.0))).is_ok());
        assert!(Spinor2::unit(SVector::<C64, 2>::new(c(1.0, 0.0), c(0.1, 0.0))).is_err());
    }
}

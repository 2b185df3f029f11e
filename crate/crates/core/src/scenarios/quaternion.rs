//! Quaternion (Kustaanheimo–Stiefel type) coordinates `x = x(q)`.

use nalgebra::{Matrix3, Matrix3x4, Vector3, Vector4};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sheet {
    Plus,
    Minus,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuaternionCoord {
    pub q: [f64; 4],
    pub sheet: Sheet,
}

impl QuaternionCoord {
    /// `r = qᵀq`.
    pub fn r(&self) -> f64 {
        self.q.iter().map(|v| v * v).sum()
    }
}

pub fn quaternion_map(q: &[f64; 4]) -> [f64; 3] {
    let [a, b, c, d] = *q;
    [2.0 * a * c + 2.0 * b * d, -2.0 * a * b + 2.0 * c * d, a * a - b * b - c * c + d * d]
}

/// Both preimages on the slice `q³ = q⁴ = 0`; needs `x¹ = 0`.
pub fn quaternion_sheets_2d(x: &[f64; 3]) -> Result<[QuaternionCoord; 2]> {
    let r = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
    if r == 0.0 {
        return Err(Error::OriginBranchPoint);
    }
    if x[0].abs() > 1e-12 * r {
        return Err(Error::InvalidArgument(format!("x¹ = {} is off the q³ = q⁴ = 0 slice", x[0])));
    }
    let (q1, q2) = if x[2] >= 0.0 {
        let q1 = (0.5 * (r + x[2])).sqrt();
        (q1, -x[1] / (2.0 * q1))
    } else {
        let s = if x[1] < 0.0 { -1.0 } else { 1.0 };
        let q2 = -s * (0.5 * (r - x[2])).sqrt();
        (-x[1] / (2.0 * q2), q2)
    };
    Ok([QuaternionCoord { q: [q1, q2, 0.0, 0.0], sheet: Sheet::Plus }, QuaternionCoord { q: [-q1, -q2, 0.0, 0.0], sheet: Sheet::Minus }])
}

/// `∂x/∂q`.
pub fn jacobian(q: &[f64; 4]) -> Matrix3x4<f64> {
    let [a, b, c, d] = *q;
    2.0 * Matrix3x4::new(
        c, d, a, b, //
        -b, -a, d, c, //
        a, -b, -c, d,
    )
}

/// Unit vector spanning `ker ∂x/∂q` (fibre direction), by signed 3×3 minors.
pub fn fibre_direction(q: &[f64; 4]) -> Vector4<f64> {
    let j = jacobian(q);
    let mut n = Vector4::zeros();
    for i in 0..4 {
        let cols: Vec<usize> = (0..4).filter(|&c| c != i).collect();
        let m = Matrix3::from_fn(|r, c| j[(r, cols[c])]);
        n[i] = if i % 2 == 0 { 1.0 } else { -1.0 } * m.determinant();
    }
    let norm = n.norm();
    if norm > 0.0 {
        n / norm
    } else {
        n
    }
}

/// Relative defect of `ẋᵀẋ = 4 qᵀq q̇ᵀq̇` after removing the fibre part of `q̇`.
pub fn kinetic_identity_defect(q: &[f64; 4], qdot: &[f64; 4], project: bool) -> f64 {
    let mut v = Vector4::from_column_slice(qdot);
    if project {
        let n = fibre_direction(q);
        v -= n * n.dot(&v);
    }
    let xdot: Vector3<f64> = jacobian(q) * v;
    let r: f64 = q.iter().map(|a| a * a).sum();
    let rhs = 4.0 * r * v.norm_squared();
    (xdot.norm_squared() - rhs).abs() / rhs.max(f64::MIN_POSITIVE)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_quaternion_maps_to_pole() {
        assert_eq!(quaternion_map(&[1.0, 0.0, 0.0, 0.0]), [0.0, 0.0, 1.0]);
        assert!(matches!(quaternion_sheets_2d(&[0.0, 0.0, 0.0]), Err(Error::OriginBranchPoint)));
    }

    #[test]
    fn sheets_round_trip() {
        for x in [[0.0f64, 1.0, 2.0], [0.0, -3.0, -0.5], [0.0, 0.0, -4.0], [0.0, 2.0, -1e-9]] {
            let r = (x[1] * x[1] + x[2] * x[2]).sqrt();
            for s in quaternion_sheets_2d(&x).unwrap() {
                let y = quaternion_map(&s.q);
                assert!((0..3).all(|k| (y[k] - x[k]).abs() <= 1e-12 * r));
                assert!((s.r() - r).abs() <= 1e-12 * r);
            }
        }
    }

    #[test]
    fn jacobian_matches_differences() {
        let q = [0.3, -0.7, 1.1, 0.4];
        let j = jacobian(&q);
        let h = 1e-6;
        for c in 0..4 {
            let (mut a, mut b) = (q, q);
            a[c] += h;
            b[c] -= h;
            let (xa, xb) = (quaternion_map(&a), quaternion_map(&b));
            for r in 0..3 {
                assert!((j[(r, c)] - (xa[r] - xb[r]) / (2.0 * h)).abs() < 1e-8);
            }
        }
        assert!((j * fibre_direction(&q)).norm() < 1e-14);
    }

    #[test]
    fn kinetic_identity() {
        assert!(kinetic_identity_defect(&[0.3, -0.8, 0.0, 0.0], &[1.2, 0.5, 0.0, 0.0], false) < 1e-14);
        let (q, v) = ([0.3, -0.8, 0.5, 0.1], [1.2, 0.5, -0.3, 0.9]);
        assert!(kinetic_identity_defect(&q, &v, true) < 1e-13);
        assert!(kinetic_identity_defect(&q, &v, false) > 1e-3);
    }
}

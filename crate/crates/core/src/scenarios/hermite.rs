//! Hermite polynomials and oscillator eigenfunctions.

use std::f64::consts::PI;

/// Physicists' `H_k(z)` from `H_{k+1} = 2z H_k − 2k H_{k−1}`.
pub fn hermite_poly(k: usize, z: f64) -> f64 {
    let (mut h0, mut h1) = (1.0, 2.0 * z);
    if k == 0 {
        return h0;
    }
    for n in 1..k {
        let h2 = 2.0 * z * h1 - 2.0 * n as f64 * h0;
        h0 = h1;
        h1 = h2;
    }
    h1
}

/// Normalized Hermite function `(2^k k! √π)^{-1/2} H_k(z) e^{−z²/2}` by the
/// stable normalized recurrence.
pub fn hermite_function(k: usize, z: f64) -> f64 {
    let mut a = PI.powf(-0.25) * (-0.5 * z * z).exp();
    if k == 0 {
        return a;
    }
    let mut b = 2f64.sqrt() * z * a;
    for n in 1..k {
        let c = (2.0 / (n + 1) as f64).sqrt() * z * b - (n as f64 / (n + 1) as f64).sqrt() * a;
        a = b;
        b = c;
    }
    b
}

/// `Ψ_k(x) = (Mω/πħ)^{1/4} (2^k k!)^{-1/2} H_k(z) e^{−z²/2}`, `z = x√(Mω/ħ)`.
pub fn hermite_basis(k: usize, x: f64, mass: f64, omega: f64, hbar: f64) -> f64 {
    let s = (mass * omega / hbar).sqrt();
    s.sqrt() * hermite_function(k, x * s)
}

/// `2^k k!` as a float.
pub fn hermite_norm(k: usize) -> f64 {
    (1..=k).fold(1.0, |acc, n| acc * 2.0 * n as f64)
}

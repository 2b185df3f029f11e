//! Closed-form reference propagators.

use std::f64::consts::PI;

use crate::field::C64;

/// Free kernel `(M/(2πiħt))^{N/2} e^{iM|x−x_o|²/(2ħt)}`, principal root.
pub fn free_kernel(x: &[f64], x_o: &[f64], t: f64, mass: f64, hbar: f64) -> C64 {
    let d2: f64 = x.iter().zip(x_o).map(|(a, b)| (a - b).powi(2)).sum();
    let amp = (C64::from(mass) / C64::new(0.0, 2.0 * PI * hbar * t)).sqrt().powi(x.len() as i32);
    amp * C64::new(0.0, mass * d2 / (2.0 * hbar * t)).exp()
}

/// Freely evolved Gaussian packet `ψ(x,0) ∝ e^{−(x−x₀)²/(4σ₀²) + ip₀x/ħ}` in 1D, unit norm.
pub fn free_gaussian(x: f64, t: f64, x0: f64, p0: f64, sigma0: f64, mass: f64, hbar: f64) -> C64 {
    let s = C64::new(1.0, hbar * t / (2.0 * mass * sigma0 * sigma0));
    let v = p0 / mass;
    let norm = (2.0 * PI * sigma0 * sigma0).powf(-0.25) / s.sqrt();
    let dx = x - x0 - v * t;
    let phase = C64::new(0.0, (p0 * (x - x0) - 0.5 * p0 * v * t) / hbar);
    norm * (-(dx * dx) / (4.0 * sigma0 * sigma0 * s) + phase).exp()
}

/// Position spread `σ(t) = σ₀ √(1 + (ħt/(2Mσ₀²))²)`.
pub fn free_gaussian_width(t: f64, sigma0: f64, mass: f64, hbar: f64) -> f64 {
    sigma0 * (1.0 + (hbar * t / (2.0 * mass * sigma0 * sigma0)).powi(2)).sqrt()
}

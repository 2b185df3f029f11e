//! Shared callback types for scalar and vector fields over `(x, t)`.

use std::sync::Arc;

use num_complex::Complex64;

pub type C64 = Complex64;

/// Complex scalar field `(x, t) -> value`.
pub type ScalarField = Arc<dyn Fn(&[f64], f64) -> C64 + Send + Sync>;
/// Complex vector field `(x, t) -> value`.
pub type VectorField = Arc<dyn Fn(&[f64], f64) -> Vec<C64> + Send + Sync>;
/// Real scalar field `(x, t) -> value`.
pub type RealField = Arc<dyn Fn(&[f64], f64) -> f64 + Send + Sync>;
/// Real vector field `(x, t) -> value`.
pub type RealVectorField = Arc<dyn Fn(&[f64], f64) -> Vec<f64> + Send + Sync>;

pub fn scalar<F>(f: F) -> ScalarField
where
    F: Fn(&[f64], f64) -> C64 + Send + Sync + 'static,
{
    Arc::new(f)
}

pub fn vector<F>(f: F) -> VectorField
where
    F: Fn(&[f64], f64) -> Vec<C64> + Send + Sync + 'static,
{
    Arc::new(f)
}

pub fn real<F>(f: F) -> RealField
where
    F: Fn(&[f64], f64) -> f64 + Send + Sync + 'static,
{
    Arc::new(f)
}

pub fn real_vector<F>(f: F) -> RealVectorField
where
    F: Fn(&[f64], f64) -> Vec<f64> + Send + Sync + 'static,
{
    Arc::new(f)
}

pub(crate) fn shifted(x: &[f64], axis: usize, delta: f64) -> Vec<f64> {
    let mut y = x.to_vec();
    y[axis] += delta;
    y
}

/// Fourth-order central difference in time of a complex field.
pub(crate) fn time_derivative(f: &dyn Fn(f64) -> C64, t: f64, dt: f64) -> C64 {
    (f(t - 2.0 * dt) - 8.0 * f(t - dt) + 8.0 * f(t + dt) - f(t + 2.0 * dt)) / (12.0 * dt)
}

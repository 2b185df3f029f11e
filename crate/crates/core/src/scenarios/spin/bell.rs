use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// Monte Carlo mean of `A₁A₂` with `A₁ = sign(n₁·λ)`, `A₂ = −sign(n₂·λ)` and
/// `λ` uniform on the sphere. Shard `s` draws from stream `s` of `seed`.
pub fn bell_binary_correlation(n1: &[f64; 3], n2: &[f64; 3], samples: usize, seed: u64, shards: usize) -> f64 {
    let shards = shards.max(1);
    let total: i64 = (0..shards)
        .into_par_iter()
        .map(|s| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(s as u64);
            let count = samples / shards + usize::from(s < samples % shards);
            let mut acc = 0i64;
            for _ in 0..count {
                let z: f64 = rng.random_range(-1.0..1.0);
                let phi: f64 = rng.random_range(0.0..2.0 * PI);
                let rho = (1.0 - z * z).sqrt();
                let l = [rho * phi.cos(), rho * phi.sin(), z];
                let a = dot(n1, &l).signum();
                let b = -dot(n2, &l).signum();
                acc += (a * b) as i64;
            }
            acc
        })
        .sum();
    total as f64 / samples as f64
}

/// Closed form `−1 + 2θ/π` of the binary model.
pub fn binary_model_exact(n1: &[f64; 3], n2: &[f64; 3]) -> f64 {
    -1.0 + 2.0 * dot(n1, n2).clamp(-1.0, 1.0).acos() / PI
}

/// CHSH value of the binary model by Monte Carlo.
pub fn chsh_binary(n: &[[f64; 3]; 4], samples: usize, seed: u64, shards: usize) -> f64 {
    let e = |a: &[f64; 3], b: &[f64; 3]| bell_binary_correlation(a, b, samples, seed, shards);
    (e(&n[0], &n[1]) - e(&n[0], &n[3]) + e(&n[2], &n[1]) + e(&n[2], &n[3])).abs()
}

fn dot(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenarios::spin::epr::coplanar;

    #[test]
    fn aligned_detectors_anticorrelate() {
        let z = coplanar(0.0);
        assert_eq!(bell_binary_correlation(&z, &z, 10_000, 1, 4), -1.0);
    }

    #[test]
    fn reproducible_and_close_to_closed_form() {
        let (a, b) = (coplanar(0.0), coplanar(60.0));
        let x = bell_binary_correlation(&a, &b, 200_000, 7, 8);
        assert_eq!(x, bell_binary_correlation(&a, &b, 200_000, 7, 8));
        assert!((x - binary_model_exact(&a, &b)).abs() < 0.01);
    }
}

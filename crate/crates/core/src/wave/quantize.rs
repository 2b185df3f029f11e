use std::f64::consts::PI;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Phase increment `φ(ω)` per period as a function of a continuous parameter.
#[derive(Clone)]
pub struct QuantizationProblem {
    pub phase: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    pub hbar: f64,
}

impl QuantizationProblem {
    pub fn new(phase: impl Fn(f64) -> f64 + Send + Sync + 'static, hbar: f64) -> Self {
        Self { phase: Arc::new(phase), hbar }
    }

    /// `φ(ω) / (2πħ)`.
    pub fn winding(&self, omega: f64) -> f64 {
        (self.phase)(omega) / (2.0 * PI * self.hbar)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuantizedLevel {
    pub k: i64,
    pub omega: f64,
}

/// All `(k, ω_k)` in `[lo, hi]` with `φ(ω_k) = 2πkħ`, by bracketing on
/// `samples` sub-intervals and bisection to machine precision.
pub fn quantize(problem: &QuantizationProblem, lo: f64, hi: f64, samples: usize) -> Result<Vec<QuantizedLevel>> {
    if !(hi > lo) || samples == 0 {
        return Err(Error::InvalidArgument(format!("empty search interval [{lo}, {hi}]")));
    }
    let mut out: Vec<QuantizedLevel> = Vec::new();
    let w = (hi - lo) / samples as f64;
    let edge = |s: usize| if s == samples { hi } else { lo + s as f64 * w };
    for s in 0..samples {
        let (a, b) = (edge(s), edge(s + 1));
        let (ga, gb) = (problem.winding(a), problem.winding(b));
        if !(ga.is_finite() && gb.is_finite()) {
            continue;
        }
        let (gmin, gmax) = (ga.min(gb), ga.max(gb));
        let mut k = gmin.ceil() as i64;
        while (k as f64) <= gmax {
            let target = k as f64;
            let (mut l, mut r) = (a, b);
            let rising = gb > ga;
            for _ in 0..200 {
                let m = 0.5 * (l + r);
                if m <= l || m >= r {
                    break;
                }
                if (problem.winding(m) < target) == rising {
                    l = m;
                } else {
                    r = m;
                }
            }
            out.push(QuantizedLevel { k, omega: 0.5 * (l + r) });
            k += 1;
        }
    }
    if out.is_empty() {
        return Err(Error::NoRoots { lo, hi });
    }
    out.sort_by(|a, b| a.omega.total_cmp(&b.omega));
    // roots on a sub-interval boundary are found from both sides
    out.dedup_by(|b, a| a.k == b.k && (a.omega - b.omega).abs() <= 1e-10 * a.omega.abs().max(1.0));
    Ok(out)
}

/// `|(1/K) Σ_{κ=0}^{K−1} e^{iκ·phase}|`, in closed form.
pub fn geometric_series_filter(phase: f64, k: u64) -> f64 {
    assert!(k >= 1, "K must be at least 1");
    let r = phase.rem_euclid(2.0 * PI);
    let r = if r > PI { r - 2.0 * PI } else { r };
    let half = 0.5 * r;
    if half.sin().abs() < 1e-300 {
        return 1.0;
    }
    ((k as f64 * half).sin() / (k as f64 * half.sin())).abs().min(1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn box_momenta() {
        let l = 1.0;
        let p = QuantizationProblem::new(move |p| 2.0 * l * p, 1.0);
        let levels = quantize(&p, 0.5, 20.0 * PI + 0.5, 64).unwrap();
        assert_eq!(levels.len(), 20);
        for q in levels {
            let exact = PI * q.k as f64 / l;
            assert!((q.omega - exact).abs() <= 1e-12 * exact);
        }
    }

    #[test]
    fn roots_near_interval_edges_are_kept() {
        let l = 2.684570979175111;
        let p = QuantizationProblem::new(move |p| 2.0 * l * p, 1.0);
        let unit = PI / l;
        let levels = quantize(&p, 0.5 * unit, 20.5 * unit, 80).unwrap();
        assert_eq!(levels.iter().map(|q| q.k).collect::<Vec<_>>(), (1..=20).collect::<Vec<_>>());
    }

    #[test]
    fn linear_phase_and_no_roots() {
        let alpha = 3.0;
        let p = QuantizationProblem::new(move |w| alpha * w, 1.0);
        let levels = quantize(&p, 1.0, 10.0, 8).unwrap();
        for q in &levels {
            assert!((q.omega - 2.0 * PI * q.k as f64 / alpha).abs() < 1e-11);
        }
        assert!(matches!(quantize(&p, 2.2, 4.0, 8), Err(Error::NoRoots { .. })));
    }

    #[test]
    fn filter_examples() {
        assert!((geometric_series_filter(0.0, 10_000) - 1.0).abs() < 1e-15);
        assert!(geometric_series_filter(PI, 10_000) <= 2.0 / 10_000.0);
        assert!((geometric_series_filter(6.0 * PI, 7) - 1.0).abs() < 1e-12);
    }
}

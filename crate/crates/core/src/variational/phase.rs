//! Covariant phase measurement on `Σ c_m |m⟩`: the estimate error
//! `u = θ̃ − θ` has density `|Σ c_m e^{imu}|²/(2π)` on `[−π, π)`, and the
//! periodic cost is `4 sin²(u/2)`.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::states::PhaseStateCoefficients;
use crate::Complex;

/// Default number of midpoint cells on `[−π, π)`.
pub const DEFAULT_PDF_RESOLUTION: usize = 1 << 14;
const MIN_SAMPLES: usize = 1000;

/// `E[4 sin²(u/2)] = 2 − 2 Re Σ_m c̄_m c_{m+1}`.
pub fn phase_cost_analytic(coeffs: &PhaseStateCoefficients) -> f64 {
    let c = coeffs.coefficients();
    let overlap: Complex = c.windows(2).map(|w| w[0].conj() * w[1]).sum();
    2.0 - 2.0 * overlap.re
}

/// Outcome density of the covariant measurement, tabulated at cell midpoints.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseMeasurementModel {
    coeffs: PhaseStateCoefficients,
    pdf: Vec<f64>,
    cdf: Vec<f64>,
}

impl PhaseMeasurementModel {
    pub fn new(coeffs: PhaseStateCoefficients) -> Result<Self> {
        Self::with_resolution(coeffs, DEFAULT_PDF_RESOLUTION)
    }

    pub fn with_resolution(coeffs: PhaseStateCoefficients, resolution: usize) -> Result<Self> {
        if resolution <= coeffs.budget() {
            return Err(invalid("pdf resolution must exceed the excitation budget"));
        }
        let du = 2.0 * PI / resolution as f64;
        let pdf: Vec<f64> = (0..resolution)
            .map(|j| {
                let u = -PI + (j as f64 + 0.5) * du;
                let amp: Complex = coeffs
                    .coefficients()
                    .iter()
                    .enumerate()
                    .map(|(m, c)| c * Complex::from_polar(1.0, m as f64 * u))
                    .sum();
                amp.norm_sqr() / (2.0 * PI)
            })
            .collect();
        let mass: f64 = pdf.iter().sum::<f64>() * du;
        if !mass.is_finite() || (mass - 1.0).abs() > 1e-8 {
            return Err(Error::Numerical(format!(
                "pdf integrates to {mass}, expected 1"
            )));
        }
        let mut acc = 0.0;
        let mut cdf: Vec<f64> = pdf
            .iter()
            .map(|v| {
                acc += v * du;
                acc
            })
            .collect();
        // normalize so the final entry is exactly 1 and every draw lands in a cell
        let total = acc;
        cdf.iter_mut().for_each(|v| *v /= total);
        Ok(Self { coeffs, pdf, cdf })
    }

    pub fn coefficients(&self) -> &PhaseStateCoefficients {
        &self.coeffs
    }

    pub fn resolution(&self) -> usize {
        self.pdf.len()
    }

    /// Density values at the cell midpoints `−π + (j + ½)·2π/resolution`.
    pub fn pdf(&self) -> &[f64] {
        &self.pdf
    }

    /// Inverse of the piecewise-linear CDF of the tabulated density.
    pub fn quantile(&self, r: f64) -> f64 {
        let du = 2.0 * PI / self.pdf.len() as f64;
        let j = self.cdf.partition_point(|&c| c < r).min(self.cdf.len() - 1);
        let start = if j == 0 { 0.0 } else { self.cdf[j - 1] };
        let width = self.cdf[j] - start;
        let frac = if width > 0.0 {
            ((r - start) / width).clamp(0.0, 1.0)
        } else {
            0.5
        };
        -PI + (j as f64 + frac) * du
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub samples: usize,
    pub seed: u64,
}

/// Sample mean of `4 sin²(u/2)` over `samples` inverse-CDF draws, with its
/// standard error. The stream depends only on `seed`.
pub fn phase_cost_monte_carlo(
    model: &PhaseMeasurementModel,
    samples: usize,
    seed: u64,
) -> Result<MonteCarloEstimate> {
    if samples < MIN_SAMPLES {
        return Err(invalid(format!(
            "at least {MIN_SAMPLES} samples are required"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut sum, mut sum_sq) = (0.0, 0.0);
    for _ in 0..samples {
        let u = model.quantile(rng.random::<f64>());
        let cost = 4.0 * (u / 2.0).sin().powi(2);
        sum += cost;
        sum_sq += cost * cost;
    }
    let n = samples as f64;
    let mean = sum / n;
    let variance = ((sum_sq - n * mean * mean) / (n - 1.0)).max(0.0);
    Ok(MonteCarloEstimate {
        mean,
        stderr: (variance / n).sqrt(),
        samples,
        seed,
    })
}
